//! Orbit diagnostics: `ρ`-seminorm monotonicity, limit points in the core,
//! the orthogonality criterion for vanishing orbits, decay of the complement
//! of the conditional expectation and the residual against `φ∘P`.
//!
//! All topologies collapse to the Hilbert–Schmidt norm in finite dimensions,
//! and every asymptotic statement is checked at a finite horizon derived from
//! the spectral gap.

use std::collections::VecDeque;

use crate::core_algebra::{ConditionalExpectation, StateFamily};
use crate::error::{Error, Result};
use crate::jordan::{jordan_product, Density};
use crate::linops::{project, CMatrix, LinearMap, Operator, OperatorSubspace, RankTol, C64};
use crate::posmap::MapDescriptor;
use crate::random;

/// Number of trailing iterates compared for the Cauchy criterion.
pub const CAUCHY_WINDOW: usize = 20;
pub const CAUCHY_TOL: f64 = 1e-10;
/// Target size of decaying quantities at the horizon.
pub const DECAY_TARGET: f64 = 1e-6;
/// Below this the orbit counts as vanished for the converse direction.
pub const VANISHED_TOL: f64 = 1e-8;
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const LIMIT_ZERO_TOL: f64 = 1e-8;
/// Gaps below this make horizons meaningless; checks report instead of assert.
pub const SLOW_MIXING_GAP: f64 = 1e-3;

/// Steps after which a quantity of size `norm`, decaying like `gᵏ`, is
/// below [`DECAY_TARGET`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Horizon {
    pub n_tail: usize,
    /// `2·n_tail + n²`; the extra `n²` steps flush nilpotent parts, the
    /// doubling absorbs polynomial prefactors from non-normal spectra.
    pub assert_at: usize,
    pub capped: bool,
    pub slow_mixing: bool,
}

impl Horizon {
    pub fn from_gap(second_modulus: f64, norm: f64, n: usize, max_power: usize) -> Self {
        let g = second_modulus.clamp(0.0, 1.0);
        let slow_mixing = 1.0 - g < SLOW_MIXING_GAP;
        let raw = if norm <= DECAY_TARGET || g == 0.0 {
            1.0
        } else if g >= 1.0 {
            f64::INFINITY
        } else {
            ((DECAY_TARGET / norm).ln() / g.ln()).ceil().max(1.0)
        };
        let capped = raw > max_power as f64;
        let n_tail = if capped { max_power } else { raw as usize };
        let assert_at = (2 * n_tail + n * n).min(max_power.max(n_tail));
        Horizon {
            n_tail,
            assert_at,
            capped,
            slow_mixing,
        }
    }

    /// Whether checks at this horizon are asserted or only reported.
    pub fn asserts(&self) -> bool {
        !self.capped && !self.slow_mixing
    }
}

/// HS distance to the core measured in the `ρ`-seminorm of a faithful
/// invariant state: `min_{c∈C} ‖x − c‖_ρ`. Unlike the HS distance this is
/// non-increasing along every orbit.
#[derive(Clone, Debug)]
pub struct RhoGeometry {
    embed: CMatrix,
    core_image: CMatrix,
}

impl RhoGeometry {
    pub fn new(rho: &Density, core: &OperatorSubspace) -> Self {
        let n = rho.dim();
        let eig = rho.operator().matrix().clone().symmetric_eigen();
        let sqrt = eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0));
        let r = &eig.eigenvectors * CMatrix::from_diagonal(&sqrt) * eig.eigenvectors.adjoint();
        let id = CMatrix::identity(n, n);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        // ‖y‖²_ρ = ½(‖ρ^½ y‖² + ‖y ρ^½‖²) = ‖embed · vec(y)‖².
        let left = id.kronecker(&r) * h;
        let right = r.transpose().kronecker(&id) * h;
        let mut embed = CMatrix::zeros(2 * n * n, n * n);
        embed.rows_mut(0, n * n).copy_from(&left);
        embed.rows_mut(n * n, n * n).copy_from(&right);
        let core_image = if core.rank() == 0 {
            CMatrix::zeros(2 * n * n, 0)
        } else {
            (&embed * core.basis_matrix()).qr().q()
        };
        RhoGeometry { embed, core_image }
    }

    pub fn seminorm(&self, x: &Operator) -> f64 {
        (&self.embed * x.vec()).norm()
    }

    pub fn distance(&self, x: &Operator) -> f64 {
        let v = &self.embed * x.vec();
        let c = self.core_image.adjoint() * &v;
        (v - &self.core_image * c).norm()
    }
}

/// What to measure along an orbit besides the HS norm.
#[derive(Clone, Copy, Debug, Default)]
pub struct OrbitContext<'a> {
    pub core: Option<&'a OperatorSubspace>,
    pub states: &'a [Density],
    pub geometry: Option<&'a RhoGeometry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStep {
    pub k: usize,
    pub hs_norm: f64,
    pub dist_to_core: Option<f64>,
    pub dist_to_core_rho: Option<f64>,
    pub rho_seminorms: Vec<f64>,
    /// `max_ρ |ρ(⟨x,x⟩) − (‖x‖²_ρ − ‖φ(x)‖²_ρ)|` for `x = φᵏ(a)`; absent on
    /// the last step.
    pub telescoping_residual: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct OrbitTrace {
    pub start: Operator,
    pub steps: Vec<OrbitStep>,
    /// Largest `‖φᵏ(a) − φᴺ(a)‖` over the last [`CAUCHY_WINDOW`] steps.
    pub cauchy_window_delta: f64,
    pub converged: bool,
    pub limit: Option<Operator>,
    pub last: Operator,
}

impl OrbitTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_norm(&self) -> f64 {
        self.steps.last().map(|s| s.hs_norm).unwrap_or(0.0)
    }

    /// Largest `‖φ^{k+1}(a)‖_ρ − ‖φᵏ(a)‖_ρ` over steps and states.
    pub fn max_seminorm_increase(&self) -> f64 {
        self.steps
            .windows(2)
            .flat_map(|w| {
                w[1].rho_seminorms
                    .iter()
                    .zip(&w[0].rho_seminorms)
                    .map(|(b, a)| b - a)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_telescoping_residual(&self) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.telescoping_residual)
            .fold(0.0, f64::max)
    }

    fn max_increase(&self, f: impl Fn(&OrbitStep) -> Option<f64>) -> Option<f64> {
        let vals: Option<Vec<f64>> = self.steps.iter().map(f).collect();
        let vals = vals?;
        Some(
            vals.windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Largest one-step increase of the HS distance to the core.
    pub fn max_dist_increase(&self) -> Option<f64> {
        self.max_increase(|s| s.dist_to_core)
    }

    /// Largest one-step increase of the `ρ`-distance to the core.
    pub fn max_rho_dist_increase(&self) -> Option<f64> {
        self.max_increase(|s| s.dist_to_core_rho)
    }
}

fn raw_seminorm_sq(rho: &Density, x: &Operator) -> f64 {
    rho.expect(&jordan_product(x, &x.adjoint())).re
}

/// Iterates `φᵏ(a)` for `k = 0..=n_max`, recording per-step diagnostics.
pub fn orbit(
    phi: &MapDescriptor,
    a: &Operator,
    n_max: usize,
    ctx: OrbitContext<'_>,
) -> Result<OrbitTrace> {
    if n_max == 0 {
        return Err(Error::InvalidParameter(
            "orbit length must be at least 1".into(),
        ));
    }
    a.check_dim(phi.dim())?;
    let mut x = a.clone();
    let mut steps = Vec::with_capacity(n_max + 1);
    let mut window: VecDeque<Operator> = VecDeque::with_capacity(CAUCHY_WINDOW + 1);
    for k in 0..=n_max {
        if !x.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        let next = if k < n_max {
            Some(phi.apply_op(&x))
        } else {
            None
        };
        let telescoping_residual = next.as_ref().map(|y| {
            let fxx = phi.apply_op(&jordan_product(&x, &x.adjoint()));
            let defect = &fxx - &jordan_product(y, &y.adjoint());
            ctx.states
                .iter()
                .map(|rho| {
                    let lhs = rho.expect(&defect).re;
                    let rhs = raw_seminorm_sq(rho, &x) - raw_seminorm_sq(rho, y);
                    (lhs - rhs).abs()
                })
                .fold(0.0, f64::max)
        });
        steps.push(OrbitStep {
            k,
            hs_norm: x.hs_norm(),
            dist_to_core: ctx.core.map(|c| project(c, &x).distance),
            dist_to_core_rho: ctx.geometry.map(|g| g.distance(&x)),
            rho_seminorms: ctx
                .states
                .iter()
                .map(|rho| raw_seminorm_sq(rho, &x).max(0.0).sqrt())
                .collect(),
            telescoping_residual,
        });
        if window.len() == CAUCHY_WINDOW + 1 {
            window.pop_front();
        }
        window.push_back(x.clone());
        if let Some(y) = next {
            x = y;
        }
    }
    let cauchy_window_delta = if window.len() == CAUCHY_WINDOW + 1 {
        window
            .iter()
            .map(|w| (w - &x).hs_norm())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let converged = cauchy_window_delta < CAUCHY_TOL;
    Ok(OrbitTrace {
        start: a.clone(),
        steps,
        cauchy_window_delta,
        converged,
        limit: converged.then(|| x.clone()),
        last: x,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailDistance {
    pub horizon: Horizon,
    /// `max dist(φᵏ(a), C_φ)` over `k ∈ [n_tail, assert_at]`.
    pub max_tail_distance: f64,
    pub end_distance: f64,
    pub asserted: bool,
}

impl TailDistance {
    pub fn passes(&self) -> bool {
        !self.asserted || self.end_distance < DECAY_TARGET
    }
}

pub fn limit_points_in_core_check(
    phi: &MapDescriptor,
    a: &Operator,
    c_phi: &OperatorSubspace,
    horizon: Horizon,
    phi_finite: bool,
) -> Result<TailDistance> {
    let ctx = OrbitContext {
        core: Some(c_phi),
        ..Default::default()
    };
    let tr = orbit(phi, a, horizon.assert_at.max(1), ctx)?;
    let dists: Vec<f64> = tr.steps.iter().filter_map(|s| s.dist_to_core).collect();
    let lo = horizon.n_tail.min(dists.len() - 1);
    let max_tail_distance = dists[lo..].iter().copied().fold(0.0, f64::max);
    if horizon.slow_mixing {
        log::warn!("slow mixing: spectral gap below {SLOW_MIXING_GAP}");
    }
    Ok(TailDistance {
        horizon,
        max_tail_distance,
        end_distance: *dists.last().unwrap_or(&0.0),
        asserted: phi_finite && horizon.asserts(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orthogonality {
    pub orthogonal: bool,
    /// Largest `|tr(ρ(a∘b))|` over the invariant-state and core bases.
    pub worst: f64,
}

pub fn orthogonality_test(
    a: &Operator,
    c_phi: &OperatorSubspace,
    states: &StateFamily,
) -> Orthogonality {
    let mut worst: f64 = 0.0;
    for b in c_phi.basis() {
        let ab = jordan_product(a, &b);
        for rho in &states.hermitian_basis {
            worst = worst.max((rho * &ab).trace().norm());
        }
    }
    Orthogonality {
        orthogonal: worst < ORTHOGONALITY_TOL,
        worst,
    }
}

/// Operators `(ρ∘b)†` whose HS-orthogonal complement is exactly the set of
/// operators passing [`orthogonality_test`].
pub fn orthogonality_constraints(c_phi: &OperatorSubspace, states: &StateFamily) -> Vec<Operator> {
    let mut out = Vec::new();
    for b in c_phi.basis() {
        for rho in &states.hermitian_basis {
            out.push(jordan_product(rho, &b).adjoint());
        }
    }
    out
}

/// Removes from `a` its component along [`orthogonality_constraints`].
pub fn project_to_orthogonal(
    a: &Operator,
    c_phi: &OperatorSubspace,
    states: &StateFamily,
) -> Result<Operator> {
    let n = a.dim();
    let cons = orthogonality_constraints(c_phi, states);
    let span = crate::linops::orthonormalize(n, &cons, RankTol::new(1e-10))?;
    Ok(&a.clone() - &project(&span, a).component)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanishingVerdict {
    pub orthogonality: Orthogonality,
    pub horizon: Horizon,
    pub tail_norm: f64,
    /// `false` when `φ` has no faithful invariant state or the horizon is capped.
    pub asserted: bool,
    /// Orthogonal implies vanishing; `None` when orthogonality fails.
    pub forward: Option<bool>,
    /// Vanishing implies orthogonal; `None` when the orbit did not vanish.
    pub converse: Option<bool>,
}

impl VanishingVerdict {
    pub fn passes(&self) -> bool {
        !self.asserted || (self.forward != Some(false) && self.converse != Some(false))
    }
}

pub fn vanishing_check(
    phi: &MapDescriptor,
    a: &Operator,
    c_phi: &OperatorSubspace,
    states: &StateFamily,
    second_modulus: f64,
    max_power: usize,
) -> Result<VanishingVerdict> {
    let orthogonality = orthogonality_test(a, c_phi, states);
    let horizon = Horizon::from_gap(second_modulus, a.hs_norm(), phi.dim(), max_power);
    let tr = orbit(phi, a, horizon.assert_at.max(1), OrbitContext::default())?;
    let tail_norm = tr.final_norm();
    Ok(VanishingVerdict {
        orthogonality,
        horizon,
        tail_norm,
        asserted: states.is_phi_finite() && horizon.asserts(),
        forward: orthogonality.orthogonal.then_some(tail_norm < DECAY_TARGET),
        converse: (tail_norm < VANISHED_TOL).then_some(orthogonality.orthogonal),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceSplit {
    pub converged: bool,
    pub limit_norm: Option<f64>,
    pub orthogonal: bool,
    /// `(limit ≈ 0) ⇔ orthogonal`; `None` for non-convergent orbits.
    pub consistent: Option<bool>,
}

pub fn convergence_split(
    trace: &OrbitTrace,
    c_phi: &OperatorSubspace,
    states: &StateFamily,
) -> ConvergenceSplit {
    let orthogonal = orthogonality_test(&trace.start, c_phi, states).orthogonal;
    let limit_norm = trace.limit.as_ref().map(Operator::hs_norm);
    ConvergenceSplit {
        converged: trace.converged,
        limit_norm,
        orthogonal,
        consistent: limit_norm.map(|l| (l < LIMIT_ZERO_TOL) == orthogonal),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplementDecay {
    pub samples: usize,
    pub worst_tail_norm: f64,
    pub worst_horizon: usize,
    pub asserted: bool,
}

impl ComplementDecay {
    pub fn passes(&self) -> bool {
        !self.asserted || self.worst_tail_norm < DECAY_TARGET
    }
}

/// Orbits of `a − P(a)` for random `a` must decay.
pub fn complement_decay(
    phi: &MapDescriptor,
    p: &ConditionalExpectation,
    second_modulus: f64,
    max_power: usize,
    samples: usize,
    seed: u64,
) -> Result<ComplementDecay> {
    let n = phi.dim();
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    let mut worst_horizon = 0;
    let mut asserted = true;
    for _ in 0..samples {
        let a = random::unit_operator(&mut rng, n);
        let d = &a - &p.apply(&a);
        let h = Horizon::from_gap(second_modulus, d.hs_norm(), n, max_power);
        asserted &= h.asserts();
        let tail = phi.power_apply(&d, h.assert_at)?.hs_norm();
        if tail >= worst {
            worst = tail;
            worst_horizon = h.assert_at;
        }
    }
    if !asserted {
        log::warn!("complement decay reported without assertion: gap too small");
    }
    Ok(ComplementDecay {
        samples,
        worst_tail_norm: worst,
        worst_horizon,
        asserted,
    })
}

/// `‖φᵏ(a) − (φ∘P)ᵏ(a)‖_HS`, iterating both sides directly.
pub fn arveson_residual(
    phi: &MapDescriptor,
    p: &ConditionalExpectation,
    a: &Operator,
    k: usize,
) -> Result<f64> {
    a.check_dim(phi.dim())?;
    let mut x = a.clone();
    let mut y = a.clone();
    for step in 0..k {
        x = phi.apply_op(&x);
        y = phi.apply_op(&p.apply(&y));
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite { step });
        }
    }
    Ok((&x - &y).hs_norm())
}
