//! Named invariant checks over an [`Analysis`], shared by `analyze` reports
//! and fuzz campaigns.

use std::fmt;

use crate::analysis::Analysis;
use crate::asymptotics::{
    arveson_residual, complement_decay, convergence_split, limit_points_in_core_check, orbit,
    orthogonality_test, project_to_orthogonal, vanishing_check, Horizon, OrbitContext, RhoGeometry,
    DECAY_TARGET,
};
use crate::config::AnalysisConfig;
use crate::error::Result;
use crate::jordan::{schwarz_defect, CLOSURE_TOL, DEFECT_EIG_TOL};
use crate::linops::{containment_residual, LinearMap, Operator};
use crate::posmap::MapDescriptor;
use crate::random::{self, sub_seed};
use crate::registry::{Named, Registry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    /// Measured but not asserted, e.g. because the horizon hit its cap.
    Reported,
    NotApplicable,
    /// The statement's hypotheses do not hold; the measurement is informational.
    HypothesisUnmet,
    Fail,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Reported => "reported",
            Status::NotApplicable => "not_applicable",
            Status::HypothesisUnmet => "hypothesis_unmet",
            Status::Fail => "fail",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub status: Status,
    /// Worst value of the checked quantity.
    pub measured: f64,
    pub threshold: f64,
    pub note: String,
}

impl CheckOutcome {
    fn new(status: Status, measured: f64, threshold: f64, note: impl Into<String>) -> Self {
        CheckOutcome {
            status,
            measured,
            threshold,
            note: note.into(),
        }
    }

    fn plain(passed: bool, measured: f64, threshold: f64, note: impl Into<String>) -> Self {
        let status = if passed { Status::Pass } else { Status::Fail };
        Self::new(status, measured, threshold, note)
    }

    /// A check whose claim is only guaranteed under `hypothesis`.
    fn conditional(
        hypothesis: bool,
        passed: bool,
        measured: f64,
        threshold: f64,
        note: impl Into<String>,
    ) -> Self {
        let note = note.into();
        if hypothesis {
            return Self::plain(passed, measured, threshold, note);
        }
        let observed = if passed { "holds" } else { "does not hold" };
        Self::new(
            Status::HypothesisUnmet,
            measured,
            threshold,
            format!("no faithful invariant state; claim {observed} (not guaranteed). {note}"),
        )
    }

    fn not_applicable(why: &str) -> Self {
        Self::new(Status::NotApplicable, f64::NAN, f64::NAN, why)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: &'static str,
    pub outcome: CheckOutcome,
    /// Weak, strong-* and norm convergence are all read as HS-norm convergence.
    pub finite_dimensional_reading: bool,
}

/// Random-operator budgets for sampling checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckBudget {
    pub schwarz_operators: usize,
    pub orbit_operators: usize,
    pub monotonicity_steps: usize,
}

impl Default for CheckBudget {
    fn default() -> Self {
        CheckBudget {
            schwarz_operators: 100,
            orbit_operators: 50,
            monotonicity_steps: 200,
        }
    }
}

pub struct CheckContext<'a> {
    pub phi: &'a MapDescriptor,
    pub analysis: &'a Analysis,
    pub config: &'a AnalysisConfig,
    pub budget: CheckBudget,
}

impl CheckContext<'_> {
    fn rng(&self, stream: u64) -> random::SeededRng {
        random::rng(sub_seed(self.config.seed, 1000 + stream))
    }

    fn random_operators(&self, stream: u64, count: usize) -> Vec<Operator> {
        let mut rng = self.rng(stream);
        (0..count)
            .map(|_| random::unit_operator(&mut rng, self.phi.dim()))
            .collect()
    }

    fn phi_finite(&self) -> bool {
        self.analysis.phi_finite()
    }
}

pub trait InvariantCheck: Named + Send + Sync {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome>;

    fn finite_dimensional_reading(&self) -> bool {
        false
    }
}

macro_rules! check {
    ($ty:ident, $name:literal, $summary:literal) => {
        pub struct $ty;
        impl Named for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn summary(&self) -> &'static str {
                $summary
            }
        }
    };
}

check!(
    DefiniteSetIff,
    "definite_set_iff",
    "sampled elements of M_φ have zero quadratic defect, elements off it do not"
);
check!(
    DefiniteSetJordan,
    "definite_set_jordan",
    "M_φ is a Jordan subalgebra"
);
check!(
    StableSet,
    "stable_set",
    "M_Φ ⊆ M_φ, φ(M_Φ) ⊆ M_Φ and the defining chain is non-increasing"
);
check!(
    SchwarzDefect,
    "schwarz_defect",
    "φ(a∘a†) − φ(a)∘φ(a)† is positive semidefinite for random a"
);
check!(
    CoreInvariance,
    "core_invariance",
    "φ(C_φ) = C_φ and the core chain is non-increasing"
);
check!(CoreJordan, "core_jordan", "C_φ is a Jordan subalgebra");
check!(
    CoreAutomorphismCheck,
    "core_automorphism",
    "φ restricted to C_φ is multiplicative for ∘ and invertible"
);
check!(
    CoreEqualsPeripheral,
    "core_equals_peripheral",
    "the algebraic core and the peripheral eigenspace coincide"
);
check!(
    PeripheralSpectrum,
    "peripheral_spectrum",
    "spectral radius is at most 1 and peripheral eigenpairs are semisimple"
);
check!(
    InvariantState,
    "invariant_state",
    "the maximal-support invariant state is fixed by the trace dual"
);
check!(
    SeminormMonotonicity,
    "seminorm_monotonicity",
    "‖φᵏ(a)‖_ρ is non-increasing for every invariant state ρ"
);
check!(
    TelescopingIdentity,
    "telescoping_identity",
    "ρ(⟨x,x⟩) = ‖x‖²_ρ − ‖φ(x)‖²_ρ along orbits"
);
check!(
    DistanceMonotonicity,
    "dist_to_core_monotone",
    "distance from φᵏ(a) to C_φ never increases"
);
check!(
    LimitPointsInCore,
    "limit_points_in_core",
    "orbit tails approach C_φ"
);
check!(
    VanishingIffOrthogonal,
    "vanishing_iff_orthogonal",
    "orbits vanish exactly for operators orthogonal to C_φ in every invariant state"
);
check!(
    ConvergenceSplit,
    "convergence_split",
    "a convergent orbit has limit 0 exactly when its start is orthogonal"
);
check!(
    ConditionalExpectationCheck,
    "conditional_expectation",
    "the trace-preserving projection onto C_φ is positive, unital and commutes with φ"
);
check!(
    ComplementDecay,
    "complement_decay",
    "orbits of a − P(a) decay"
);
check!(
    ArvesonResidual,
    "arveson_residual",
    "‖φᵏ(a) − (φ∘P)ᵏ(a)‖ decays"
);
check!(
    ProjectionThreefold,
    "projection_threefold",
    "for idempotent φ the peripheral space, core and range coincide"
);

const CONTAINMENT_TOL: f64 = 1e-8;
const STATE_RESIDUAL_TOL: f64 = 1e-9;
const MONOTONE_SLACK: f64 = 1e-10;
const DISTANCE_SLACK: f64 = 1e-9;
const MULTIPLICATIVITY_TOL: f64 = 1e-9;

impl InvariantCheck for DefiniteSetIff {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let q = ctx.analysis.quadratic;
        Ok(CheckOutcome::plain(
            q.passes(),
            q.in_set_worst,
            crate::defset::QuadraticCheck::IN_SET_TOL,
            match q.out_of_set_min {
                Some(m) => format!("smallest defect off M_φ: {m:.3e}"),
                None => "M_φ is everything".into(),
            },
        ))
    }
}

impl InvariantCheck for DefiniteSetJordan {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let j = ctx.analysis.m_phi_jordan;
        Ok(CheckOutcome::plain(
            j.all(),
            j.worst_residual,
            CLOSURE_TOL,
            "",
        ))
    }
}

fn non_increasing(ranks: &[usize]) -> bool {
    ranks.windows(2).all(|w| w[1] <= w[0])
}

impl InvariantCheck for StableSet {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let d = &ctx.analysis.definite;
        let contained = containment_residual(&d.m_stable, &d.m_phi)?;
        let worst = contained.max(d.invariance_residual);
        Ok(CheckOutcome::plain(
            worst < CONTAINMENT_TOL && non_increasing(&d.rank_sequence),
            worst,
            CONTAINMENT_TOL,
            format!("ranks {:?}", d.rank_sequence),
        ))
    }
}

impl InvariantCheck for SchwarzDefect {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let worst = ctx
            .random_operators(1, ctx.budget.schwarz_operators)
            .iter()
            .map(|a| schwarz_defect(ctx.phi, a).min_eig)
            .fold(f64::INFINITY, f64::min);
        Ok(CheckOutcome::plain(
            worst >= -DEFECT_EIG_TOL,
            worst,
            -DEFECT_EIG_TOL,
            format!("{} random operators", ctx.budget.schwarz_operators),
        ))
    }
}

impl InvariantCheck for CoreInvariance {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let c = &ctx.analysis.core;
        Ok(CheckOutcome::plain(
            c.image_equal(ctx.config.angle_tol) && non_increasing(&c.chain_ranks),
            c.image_angle,
            ctx.config.angle_tol,
            format!("chain ranks {:?}", c.chain_ranks),
        ))
    }
}

impl InvariantCheck for CoreJordan {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let j = ctx.analysis.core.jordan;
        Ok(CheckOutcome::conditional(
            ctx.phi_finite(),
            j.all(),
            j.worst_residual,
            CLOSURE_TOL,
            "",
        ))
    }
}

impl InvariantCheck for CoreAutomorphismCheck {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let a = &ctx.analysis.automorphism;
        let worst = a.multiplicativity_residual.max(a.invariance_residual);
        Ok(CheckOutcome::conditional(
            ctx.phi_finite(),
            worst < MULTIPLICATIVITY_TOL && a.is_invertible(),
            worst,
            MULTIPLICATIVITY_TOL,
            format!("condition number {:.6e}", a.condition_number),
        ))
    }
}

impl InvariantCheck for CoreEqualsPeripheral {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let c = ctx.analysis.comparison;
        Ok(CheckOutcome::conditional(
            ctx.phi_finite(),
            c.equal,
            c.max_angle,
            ctx.config.angle_tol,
            format!(
                "ranks {} (core) and {} (peripheral)",
                c.rank_core, c.rank_peripheral
            ),
        ))
    }
}

impl InvariantCheck for PeripheralSpectrum {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let s = &ctx.analysis.spectrum;
        let p = &ctx.analysis.peripheral;
        let ok = s.spectral_radius <= 1.0 + crate::core_algebra::RADIUS_SLACK
            && p.worst_residual < crate::core_algebra::EIGENPAIR_TOL;
        Ok(CheckOutcome::plain(
            ok,
            p.worst_residual,
            crate::core_algebra::EIGENPAIR_TOL,
            format!("spectral radius {:.17e}", s.spectral_radius),
        ))
    }
}

impl InvariantCheck for InvariantState {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let st = &ctx.analysis.states;
        if st.faithful_candidate.is_none() {
            return Ok(CheckOutcome::plain(
                false,
                f64::NAN,
                STATE_RESIDUAL_TOL,
                st.diagnostics.join("; "),
            ));
        }
        Ok(CheckOutcome::plain(
            st.candidate_residual < STATE_RESIDUAL_TOL,
            st.candidate_residual,
            STATE_RESIDUAL_TOL,
            format!("min eigenvalue {:.6e}", st.min_eig_of_candidate),
        ))
    }
}

/// Worst seminorm increase and telescoping residual over random orbits.
fn seminorm_orbits(ctx: &CheckContext<'_>) -> Result<(f64, f64)> {
    let states = &ctx.analysis.states.states;
    let ops = ctx.random_operators(2, ctx.budget.orbit_operators);
    let mut increase = f64::NEG_INFINITY;
    let mut telescoping: f64 = 0.0;
    for a in &ops {
        let tr = orbit(
            ctx.phi,
            a,
            ctx.budget.monotonicity_steps,
            OrbitContext {
                states,
                ..Default::default()
            },
        )?;
        increase = increase.max(tr.max_seminorm_increase());
        telescoping = telescoping.max(tr.max_telescoping_residual());
    }
    Ok((increase, telescoping))
}

impl InvariantCheck for SeminormMonotonicity {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let (increase, _) = seminorm_orbits(ctx)?;
        Ok(CheckOutcome::plain(
            increase <= MONOTONE_SLACK,
            increase,
            MONOTONE_SLACK,
            format!(
                "{} invariant states, {} operators, {} steps",
                ctx.analysis.states.states.len(),
                ctx.budget.orbit_operators,
                ctx.budget.monotonicity_steps
            ),
        ))
    }
}

impl InvariantCheck for TelescopingIdentity {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let (_, residual) = seminorm_orbits(ctx)?;
        Ok(CheckOutcome::plain(
            residual <= MONOTONE_SLACK,
            residual,
            MONOTONE_SLACK,
            "",
        ))
    }
}

impl InvariantCheck for DistanceMonotonicity {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let an = ctx.analysis;
        let Some(rho) = an
            .states
            .faithful_candidate
            .as_ref()
            .filter(|_| ctx.phi_finite())
        else {
            return Ok(CheckOutcome::conditional(
                false,
                true,
                f64::NAN,
                DISTANCE_SLACK,
                "skipped",
            ));
        };
        let geometry = RhoGeometry::new(rho, &an.core.c_phi);
        let tp = ctx.phi.is_trace_preserving();
        let mut worst_rho = f64::NEG_INFINITY;
        let mut worst_hs = f64::NEG_INFINITY;
        for a in ctx.random_operators(3, ctx.budget.orbit_operators) {
            let tr = orbit(
                ctx.phi,
                &a,
                ctx.budget.monotonicity_steps,
                OrbitContext {
                    core: Some(&an.core.c_phi),
                    states: &[],
                    geometry: Some(&geometry),
                },
            )?;
            worst_rho = worst_rho.max(tr.max_rho_dist_increase().unwrap_or(f64::NEG_INFINITY));
            worst_hs = worst_hs.max(tr.max_dist_increase().unwrap_or(f64::NEG_INFINITY));
        }
        let worst = if tp {
            worst_rho.max(worst_hs)
        } else {
            worst_rho
        };
        Ok(CheckOutcome::plain(
            worst <= DISTANCE_SLACK,
            worst,
            DISTANCE_SLACK,
            if tp {
                format!("ρ-distance and HS distance; HS worst {worst_hs:.3e}")
            } else {
                format!("ρ-distance; HS distance (not asserted) worst {worst_hs:.3e}")
            },
        ))
    }
}

fn horizon_note(h: &Horizon) -> String {
    format!("horizon {} (n_tail {})", h.assert_at, h.n_tail)
}

impl InvariantCheck for LimitPointsInCore {
    fn finite_dimensional_reading(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let an = ctx.analysis;
        let mut worst: f64 = 0.0;
        let mut asserted = true;
        let mut longest = None;
        for a in ctx.random_operators(4, ctx.budget.orbit_operators.min(10)) {
            let h = Horizon::from_gap(
                an.spectrum.second_modulus,
                a.hs_norm(),
                ctx.phi.dim(),
                ctx.config.max_power,
            );
            let r = limit_points_in_core_check(ctx.phi, &a, &an.core.c_phi, h, true)?;
            asserted &= h.asserts();
            worst = worst.max(r.end_distance);
            longest = Some(h);
        }
        let note = longest.as_ref().map(horizon_note).unwrap_or_default();
        if !asserted && ctx.phi_finite() {
            return Ok(CheckOutcome::new(
                Status::Reported,
                worst,
                DECAY_TARGET,
                format!("slow mixing; {note}"),
            ));
        }
        Ok(CheckOutcome::conditional(
            ctx.phi_finite(),
            worst < DECAY_TARGET,
            worst,
            DECAY_TARGET,
            note,
        ))
    }
}

impl InvariantCheck for VanishingIffOrthogonal {
    fn finite_dimensional_reading(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let an = ctx.analysis;
        let count = ctx.budget.orbit_operators.min(10);
        let mut ops = ctx.random_operators(5, count);
        for a in ctx.random_operators(6, count) {
            let b = project_to_orthogonal(&a, &an.core.c_phi, &an.states)?;
            if b.hs_norm() > 1e-6 {
                ops.push(&b * (1.0 / b.hs_norm()));
            }
        }
        let mut failures = 0;
        let mut worst_orthogonal_tail: f64 = 0.0;
        let mut asserted = true;
        for a in &ops {
            let v = vanishing_check(
                ctx.phi,
                a,
                &an.core.c_phi,
                &an.states,
                an.spectrum.second_modulus,
                ctx.config.max_power,
            )?;
            asserted &= v.horizon.asserts();
            if v.forward == Some(false) || v.converse == Some(false) {
                failures += 1;
            }
            if v.orthogonality.orthogonal {
                worst_orthogonal_tail = worst_orthogonal_tail.max(v.tail_norm);
            }
        }
        let note = format!("{} operators, {failures} violations", ops.len());
        if !asserted && ctx.phi_finite() {
            return Ok(CheckOutcome::new(
                Status::Reported,
                worst_orthogonal_tail,
                DECAY_TARGET,
                note,
            ));
        }
        Ok(CheckOutcome::conditional(
            ctx.phi_finite(),
            failures == 0,
            worst_orthogonal_tail,
            DECAY_TARGET,
            note,
        ))
    }
}

impl InvariantCheck for ConvergenceSplit {
    fn finite_dimensional_reading(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let an = ctx.analysis;
        let mut starts = ctx.random_operators(7, ctx.budget.orbit_operators.min(10));
        for a in ctx.random_operators(8, ctx.budget.orbit_operators.min(10)) {
            let b = project_to_orthogonal(&a, &an.core.c_phi, &an.states)?;
            if b.hs_norm() > 1e-6 {
                starts.push(&b * (1.0 / b.hs_norm()));
            }
        }
        let mut converged = 0;
        let mut inconsistent = 0;
        for a in &starts {
            let tr = orbit(ctx.phi, a, ctx.config.orbit_steps, OrbitContext::default())?;
            let split = convergence_split(&tr, &an.core.c_phi, &an.states);
            match split.consistent {
                Some(true) => converged += 1,
                Some(false) => {
                    converged += 1;
                    inconsistent += 1;
                }
                None => {}
            }
        }
        let note = format!("{converged} of {} orbits converged", starts.len());
        Ok(CheckOutcome::conditional(
            ctx.phi_finite(),
            inconsistent == 0,
            inconsistent as f64,
            0.0,
            note,
        ))
    }
}

impl InvariantCheck for ConditionalExpectationCheck {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let Some(p) = &ctx.analysis.expectation else {
            return Ok(CheckOutcome::not_applicable(
                "φ does not preserve the trace",
            ));
        };
        Ok(CheckOutcome::plain(
            p.passes(ctx.config.angle_tol),
            p.commutation_residual,
            crate::core_algebra::ConditionalExpectation::COMMUTATION_TOL,
            format!(
                "idempotence {:.3e}, unit {:.3e}, range angle {:.3e}, worst sampled eigenvalue {:.3e}",
                p.idempotence_residual,
                p.unit_residual,
                p.range_angle,
                p.positivity.worst_min_eig
            ),
        ))
    }
}

impl InvariantCheck for ComplementDecay {
    fn finite_dimensional_reading(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let an = ctx.analysis;
        let Some(p) = &an.expectation else {
            return Ok(CheckOutcome::not_applicable(
                "φ does not preserve the trace",
            ));
        };
        let d = complement_decay(
            ctx.phi,
            p,
            an.spectrum.second_modulus,
            ctx.config.max_power,
            ctx.budget.orbit_operators.min(10),
            sub_seed(ctx.config.seed, 1009),
        )?;
        let note = format!("horizon {}", d.worst_horizon);
        if !d.asserted {
            return Ok(CheckOutcome::new(
                Status::Reported,
                d.worst_tail_norm,
                DECAY_TARGET,
                note,
            ));
        }
        Ok(CheckOutcome::plain(
            d.passes(),
            d.worst_tail_norm,
            DECAY_TARGET,
            note,
        ))
    }
}

impl InvariantCheck for ArvesonResidual {
    fn finite_dimensional_reading(&self) -> bool {
        true
    }

    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let an = ctx.analysis;
        let Some(p) = &an.expectation else {
            return Ok(CheckOutcome::not_applicable(
                "φ does not preserve the trace",
            ));
        };
        let mut worst: f64 = 0.0;
        let mut identity_gap: f64 = 0.0;
        let mut asserted = true;
        for a in ctx.random_operators(10, ctx.budget.orbit_operators.min(10)) {
            let d = &a - &p.apply(&a);
            let h = Horizon::from_gap(
                an.spectrum.second_modulus,
                d.hs_norm(),
                ctx.phi.dim(),
                ctx.config.max_power,
            );
            asserted &= h.asserts();
            let r = arveson_residual(ctx.phi, p, &a, h.assert_at)?;
            let direct = ctx.phi.power_apply(&d, h.assert_at)?.hs_norm();
            identity_gap = identity_gap.max((r - direct).abs());
            worst = worst.max(r);
        }
        let note = format!("|residual − ‖φᵏ(a − P(a))‖| ≤ {identity_gap:.3e}");
        if !asserted {
            return Ok(CheckOutcome::new(
                Status::Reported,
                worst,
                DECAY_TARGET,
                note,
            ));
        }
        Ok(CheckOutcome::plain(
            worst < DECAY_TARGET,
            worst,
            DECAY_TARGET,
            note,
        ))
    }
}

impl InvariantCheck for ProjectionThreefold {
    fn run(&self, ctx: &CheckContext<'_>) -> Result<CheckOutcome> {
        let Some(p) = &ctx.analysis.projection else {
            return Ok(CheckOutcome::not_applicable(
                "φ is not a faithful idempotent",
            ));
        };
        let worst = p
            .angle_peripheral_core
            .max(p.angle_core_range)
            .max(p.angle_peripheral_range);
        Ok(CheckOutcome::plain(
            p.passes(),
            worst,
            ctx.config.angle_tol,
            format!(
                "range rank {}, Jordan residual {:.3e}",
                p.range.rank(),
                p.range_jordan.worst_residual
            ),
        ))
    }
}

pub fn checks() -> Registry<dyn InvariantCheck> {
    Registry::<dyn InvariantCheck>::new("check")
        .with(Box::new(DefiniteSetIff))
        .with(Box::new(DefiniteSetJordan))
        .with(Box::new(StableSet))
        .with(Box::new(SchwarzDefect))
        .with(Box::new(CoreInvariance))
        .with(Box::new(CoreJordan))
        .with(Box::new(CoreAutomorphismCheck))
        .with(Box::new(CoreEqualsPeripheral))
        .with(Box::new(PeripheralSpectrum))
        .with(Box::new(InvariantState))
        .with(Box::new(SeminormMonotonicity))
        .with(Box::new(TelescopingIdentity))
        .with(Box::new(DistanceMonotonicity))
        .with(Box::new(LimitPointsInCore))
        .with(Box::new(VanishingIffOrthogonal))
        .with(Box::new(ConvergenceSplit))
        .with(Box::new(ConditionalExpectationCheck))
        .with(Box::new(ComplementDecay))
        .with(Box::new(ArvesonResidual))
        .with(Box::new(ProjectionThreefold))
}

/// Runs every registered check; a check that errors counts as failed.
pub fn run_all(ctx: &CheckContext<'_>) -> Vec<CheckRecord> {
    checks()
        .iter()
        .map(|c| CheckRecord {
            name: c.name(),
            finite_dimensional_reading: c.finite_dimensional_reading(),
            outcome: c.run(ctx).unwrap_or_else(|e| {
                CheckOutcome::new(Status::Fail, f64::NAN, f64::NAN, format!("error: {e}"))
            }),
        })
        .collect()
}

/// Worst status: any failure dominates, then unmet hypotheses.
pub fn overall(records: &[CheckRecord]) -> Status {
    if records.iter().any(|r| r.outcome.status == Status::Fail) {
        Status::Fail
    } else if records
        .iter()
        .any(|r| r.outcome.status == Status::HypothesisUnmet)
    {
        Status::HypothesisUnmet
    } else {
        Status::Pass
    }
}

/// `orthogonality_test` exposed for callers holding an [`Analysis`].
pub fn is_orthogonal(analysis: &Analysis, a: &Operator) -> bool {
    orthogonality_test(a, &analysis.core.c_phi, &analysis.states).orthogonal
}
