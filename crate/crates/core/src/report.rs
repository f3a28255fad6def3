//! Serializable reports. Field order is fixed, so equal inputs give
//! byte-identical JSON.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{Analysis, OrbitStudy};
use crate::asymptotics::{Horizon, OrbitTrace};
use crate::checks::{self, CheckRecord, Status};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::io::{complex, matrix_rows, operator_rows, MatrixRows};
use crate::jordan::JordanCheck;
use crate::linops::{LinearMap, OperatorSubspace, C64};
use crate::posmap::MapDescriptor;

pub const TOOL_NAME: &str = "core-analyzer";

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: TOOL_NAME,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigSection {
    pub tol_rank: f64,
    pub tol_peripheral: f64,
    pub tol_faithful: f64,
    pub angle_tol: f64,
    pub max_power: usize,
    pub orbit_steps: usize,
    pub samples: usize,
    pub seed: u64,
}

impl From<&AnalysisConfig> for ConfigSection {
    fn from(c: &AnalysisConfig) -> Self {
        ConfigSection {
            tol_rank: c.tol_rank,
            tol_peripheral: c.tol_peripheral,
            tol_faithful: c.tol_faithful,
            angle_tol: c.angle_tol,
            max_power: c.max_power,
            orbit_steps: c.orbit_steps,
            samples: c.samples,
            seed: c.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MapSection {
    pub name: String,
    pub dim: usize,
    pub unital: bool,
    pub trace_preserving: bool,
    pub completely_positive: bool,
}

impl From<&MapDescriptor> for MapSection {
    fn from(phi: &MapDescriptor) -> Self {
        MapSection {
            name: phi.name().to_string(),
            dim: phi.dim(),
            unital: phi.is_unital(),
            trace_preserving: phi.is_trace_preserving(),
            completely_positive: phi.is_cp(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSection {
    pub unital_residual: f64,
    pub trace_residual: f64,
    pub choi_min_eig: f64,
    pub positivity_samples: usize,
    /// Sampled evidence only; never a proof of positivity.
    pub positivity_worst_min_eig: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct JordanSection {
    pub closed_product: bool,
    pub closed_adjoint: bool,
    pub contains_unit: bool,
    pub worst_residual: f64,
}

impl From<JordanCheck> for JordanSection {
    fn from(j: JordanCheck) -> Self {
        JordanSection {
            closed_product: j.closed_product,
            closed_adjoint: j.closed_adjoint,
            contains_unit: j.contains_unit,
            worst_residual: j.worst_residual,
        }
    }
}

/// An orthonormal basis (HS inner product) of operators.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceSection {
    pub rank: usize,
    pub basis: Vec<MatrixRows>,
}

impl From<&OperatorSubspace> for SubspaceSection {
    fn from(u: &OperatorSubspace) -> Self {
        SubspaceSection {
            rank: u.rank(),
            basis: u.basis().iter().map(operator_rows).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DefiniteSetSection {
    #[serde(flatten)]
    pub space: SubspaceSection,
    pub jordan: JordanSection,
    pub quadratic_in_set_worst: f64,
    pub quadratic_out_of_set_min: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StableSetSection {
    #[serde(flatten)]
    pub space: SubspaceSection,
    pub rank_sequence: Vec<usize>,
    pub stabilization_steps: usize,
    pub invariance_residual: f64,
}

fn complexes(zs: &[C64]) -> Vec<[f64; 2]> {
    zs.iter().copied().map(complex).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSection {
    pub eigenvalues: Vec<[f64; 2]>,
    pub spectral_radius: f64,
    pub second_modulus: f64,
    pub spectral_gap: f64,
    pub tol_peripheral: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralSection {
    #[serde(flatten)]
    pub space: SubspaceSection,
    pub eigenvalues: Vec<[f64; 2]>,
    pub worst_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatesSection {
    pub fixed_space_dim: usize,
    /// `null` when the invariant state could not be determined.
    pub phi_finite: Option<bool>,
    pub faithful_candidate: Option<MatrixRows>,
    pub min_eig_of_candidate: f64,
    pub candidate_residual: f64,
    pub support_projection: Option<MatrixRows>,
    pub spanning_states: Vec<MatrixRows>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreSection {
    #[serde(flatten)]
    pub space: SubspaceSection,
    pub chain_ranks: Vec<usize>,
    pub jordan: JordanSection,
    pub image_rank: usize,
    pub image_angle: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismSection {
    pub multiplicativity_residual: f64,
    pub invariance_residual: f64,
    pub min_singular_value: f64,
    pub condition_number: f64,
    pub invertible: bool,
    pub hypothesis_met: bool,
    /// `φ` restricted to the core, in the core basis above.
    pub restricted_matrix: MatrixRows,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonSection {
    pub equal: bool,
    pub rank_core: usize,
    pub rank_peripheral: usize,
    pub max_angle: f64,
    pub hypothesis_met: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectationSection {
    pub idempotence_residual: f64,
    pub unit_residual: f64,
    pub range_rank: usize,
    pub range_angle: f64,
    pub commutation_residual: f64,
    pub positivity_samples: usize,
    pub positivity_worst_min_eig: f64,
    pub superop: MatrixRows,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionSection {
    pub idempotence_residual: f64,
    pub faithfulness_min_eig: f64,
    pub sampled_min_output_norm: f64,
    pub range_rank: usize,
    pub peripheral_rank: usize,
    pub core_rank: usize,
    pub angle_peripheral_core: f64,
    pub angle_core_range: f64,
    pub angle_peripheral_range: f64,
    pub threefold_equal: bool,
    pub range_jordan: JordanSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: &'static str,
    pub status: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub note: String,
    pub finite_dimensional_reading: bool,
}

impl From<&CheckRecord> for CheckEntry {
    fn from(r: &CheckRecord) -> Self {
        CheckEntry {
            name: r.name,
            status: r.outcome.status.as_str(),
            measured: r.outcome.measured,
            threshold: r.outcome.threshold,
            note: r.outcome.note.clone(),
            finite_dimensional_reading: r.finite_dimensional_reading,
        }
    }
}

/// Exit code for a verdict: 0 pass, 1 failed check, 2 unmet hypotheses.
pub fn exit_code(verdict: Status) -> i32 {
    match verdict {
        Status::Fail => 1,
        Status::HypothesisUnmet => 2,
        _ => 0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreReport {
    pub tool: ToolInfo,
    pub config: ConfigSection,
    pub map: MapSection,
    pub validation: ValidationSection,
    pub definite_set: DefiniteSetSection,
    pub stable_set: StableSetSection,
    pub spectrum: SpectrumSection,
    pub peripheral: PeripheralSection,
    pub invariant_states: StatesSection,
    pub core: CoreSection,
    pub core_automorphism: AutomorphismSection,
    pub core_vs_peripheral: ComparisonSection,
    pub conditional_expectation: Option<ExpectationSection>,
    pub projection: Option<ProjectionSection>,
    pub checks: Vec<CheckEntry>,
    pub verdict: &'static str,
    pub exit_code: i32,
}

impl CoreReport {
    pub fn new(
        phi: &MapDescriptor,
        an: &Analysis,
        config: &AnalysisConfig,
        records: &[CheckRecord],
    ) -> Self {
        let verdict = checks::overall(records);
        let v = &an.validation;
        let d = &an.definite;
        let st = &an.states;
        CoreReport {
            tool: ToolInfo::default(),
            config: config.into(),
            map: phi.into(),
            validation: ValidationSection {
                unital_residual: v.unital_residual,
                trace_residual: v.trace_residual,
                choi_min_eig: v.choi_min_eig,
                positivity_samples: v.positivity.samples,
                positivity_worst_min_eig: v.positivity.worst_min_eig,
            },
            definite_set: DefiniteSetSection {
                space: (&d.m_phi).into(),
                jordan: an.m_phi_jordan.into(),
                quadratic_in_set_worst: an.quadratic.in_set_worst,
                quadratic_out_of_set_min: an.quadratic.out_of_set_min,
            },
            stable_set: StableSetSection {
                space: (&d.m_stable).into(),
                rank_sequence: d.rank_sequence.clone(),
                stabilization_steps: d.stabilization_steps,
                invariance_residual: d.invariance_residual,
            },
            spectrum: SpectrumSection {
                eigenvalues: complexes(&an.spectrum.eigenvalues),
                spectral_radius: an.spectrum.spectral_radius,
                second_modulus: an.spectrum.second_modulus,
                spectral_gap: an.spectrum.gap(),
                tol_peripheral: an.spectrum.tol_peripheral,
                warnings: an.spectrum.warnings.clone(),
            },
            peripheral: PeripheralSection {
                space: (&an.peripheral.space).into(),
                eigenvalues: complexes(&an.peripheral.eigenvalues),
                worst_residual: an.peripheral.worst_residual,
            },
            invariant_states: StatesSection {
                fixed_space_dim: st.fixed_space_dim,
                phi_finite: st.phi_finite,
                faithful_candidate: st
                    .faithful_candidate
                    .as_ref()
                    .map(|r| operator_rows(r.operator())),
                min_eig_of_candidate: st.min_eig_of_candidate,
                candidate_residual: st.candidate_residual,
                support_projection: st.support_projection.as_ref().map(operator_rows),
                spanning_states: st
                    .states
                    .iter()
                    .map(|r| operator_rows(r.operator()))
                    .collect(),
                diagnostics: st.diagnostics.clone(),
            },
            core: CoreSection {
                space: (&an.core.c_phi).into(),
                chain_ranks: an.core.chain_ranks.clone(),
                jordan: an.core.jordan.into(),
                image_rank: an.core.image_rank,
                image_angle: an.core.image_angle,
            },
            core_automorphism: AutomorphismSection {
                multiplicativity_residual: an.automorphism.multiplicativity_residual,
                invariance_residual: an.automorphism.invariance_residual,
                min_singular_value: an.automorphism.min_singular_value,
                condition_number: an.automorphism.condition_number,
                invertible: an.automorphism.is_invertible(),
                hypothesis_met: an.automorphism.hypothesis_met,
                restricted_matrix: matrix_rows(an.automorphism.restricted_matrix()),
            },
            core_vs_peripheral: ComparisonSection {
                equal: an.comparison.equal,
                rank_core: an.comparison.rank_core,
                rank_peripheral: an.comparison.rank_peripheral,
                max_angle: an.comparison.max_angle,
                hypothesis_met: an.comparison.hypothesis_met,
            },
            conditional_expectation: an.expectation.as_ref().map(|p| ExpectationSection {
                idempotence_residual: p.idempotence_residual,
                unit_residual: p.unit_residual,
                range_rank: p.range_rank,
                range_angle: p.range_angle,
                commutation_residual: p.commutation_residual,
                positivity_samples: p.positivity.samples,
                positivity_worst_min_eig: p.positivity.worst_min_eig,
                superop: matrix_rows(p.map().superop()),
            }),
            projection: an.projection.as_ref().map(|p| ProjectionSection {
                idempotence_residual: p.idempotence_residual,
                faithfulness_min_eig: p.faithfulness_min_eig,
                sampled_min_output_norm: p.sampled_min_output_norm,
                range_rank: p.range.rank(),
                peripheral_rank: p.peripheral.rank(),
                core_rank: p.core.rank(),
                angle_peripheral_core: p.angle_peripheral_core,
                angle_core_range: p.angle_core_range,
                angle_peripheral_range: p.angle_peripheral_range,
                threefold_equal: p.threefold_equal,
                range_jordan: p.range_jordan.into(),
            }),
            checks: records.iter().map(CheckEntry::from).collect(),
            verdict: verdict.as_str(),
            exit_code: exit_code(verdict),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepEntry {
    pub k: usize,
    pub hs_norm: f64,
    pub dist_to_core: Option<f64>,
    pub dist_to_core_rho: Option<f64>,
    pub rho_seminorms: Vec<f64>,
    pub telescoping_residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizonSection {
    pub n_tail: usize,
    pub assert_at: usize,
    pub capped: bool,
    pub slow_mixing: bool,
}

impl From<Horizon> for HorizonSection {
    fn from(h: Horizon) -> Self {
        HorizonSection {
            n_tail: h.n_tail,
            assert_at: h.assert_at,
            capped: h.capped,
            slow_mixing: h.slow_mixing,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalitySection {
    pub orthogonal: bool,
    pub worst: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingSection {
    pub horizon: HorizonSection,
    pub tail_norm: f64,
    pub asserted: bool,
    pub forward: Option<bool>,
    pub converse: Option<bool>,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitSection {
    pub converged: bool,
    pub limit_norm: Option<f64>,
    pub orthogonal: bool,
    /// `null` when the orbit did not converge.
    pub consistent: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailSection {
    pub horizon: HorizonSection,
    pub max_tail_distance: f64,
    pub end_distance: f64,
    pub asserted: bool,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub tool: ToolInfo,
    pub config: ConfigSection,
    pub map: MapSection,
    pub phi_finite: Option<bool>,
    pub spectral_gap: f64,
    pub core_rank: usize,
    pub start: MatrixRows,
    pub converged: bool,
    pub cauchy_window_delta: f64,
    pub limit: Option<MatrixRows>,
    pub last: MatrixRows,
    pub orthogonality: OrthogonalitySection,
    pub vanishing: VanishingSection,
    pub convergence_split: SplitSection,
    pub tail_distance: TailSection,
    pub finite_dimensional_reading: &'static str,
    pub steps: Vec<StepEntry>,
}

const FINITE_DIMENSIONAL_READING: &str =
    "weak, strong-* and norm limits coincide on M_n; all limits are taken in the HS norm";

impl OrbitReport {
    pub fn new(
        phi: &MapDescriptor,
        an: &Analysis,
        config: &AnalysisConfig,
        study: &OrbitStudy,
    ) -> Self {
        let tr = &study.trace;
        let v = &study.vanishing;
        OrbitReport {
            tool: ToolInfo::default(),
            config: config.into(),
            map: phi.into(),
            phi_finite: an.states.phi_finite,
            spectral_gap: an.gap(),
            core_rank: an.core.c_phi.rank(),
            start: operator_rows(&tr.start),
            converged: tr.converged,
            cauchy_window_delta: tr.cauchy_window_delta,
            limit: tr.limit.as_ref().map(operator_rows),
            last: operator_rows(&tr.last),
            orthogonality: OrthogonalitySection {
                orthogonal: study.orthogonality.orthogonal,
                worst: study.orthogonality.worst,
            },
            vanishing: VanishingSection {
                horizon: v.horizon.into(),
                tail_norm: v.tail_norm,
                asserted: v.asserted,
                forward: v.forward,
                converse: v.converse,
                passes: v.passes(),
            },
            convergence_split: SplitSection {
                converged: study.split.converged,
                limit_norm: study.split.limit_norm,
                orthogonal: study.split.orthogonal,
                consistent: study.split.consistent,
            },
            tail_distance: TailSection {
                horizon: study.tail.horizon.into(),
                max_tail_distance: study.tail.max_tail_distance,
                end_distance: study.tail.end_distance,
                asserted: study.tail.asserted,
                passes: study.tail.passes(),
            },
            finite_dimensional_reading: FINITE_DIMENSIONAL_READING,
            steps: steps(tr),
        }
    }

    /// Exit code: 1 when an asserted verdict fails, 2 when the map has no
    /// faithful invariant state, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        let failed = !self.vanishing.passes
            || !self.tail_distance.passes
            || (self.phi_finite == Some(true) && self.convergence_split.consistent == Some(false));
        if failed && self.phi_finite == Some(true) {
            1
        } else if self.phi_finite != Some(true) {
            2
        } else {
            0
        }
    }
}

fn steps(tr: &OrbitTrace) -> Vec<StepEntry> {
    tr.steps
        .iter()
        .map(|s| StepEntry {
            k: s.k,
            hs_norm: s.hs_norm,
            dist_to_core: s.dist_to_core,
            dist_to_core_rho: s.dist_to_core_rho,
            rho_seminorms: s.rho_seminorms.clone(),
            telescoping_residual: s.telescoping_residual,
        })
        .collect()
}

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

/// Per-step columns of an orbit; empty cells where a value is absent.
pub fn write_orbit_csv<W: Write>(tr: &OrbitTrace, out: W) -> Result<()> {
    let states = tr.steps.first().map_or(0, |s| s.rho_seminorms.len());
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Io(format!("csv: {e}"));
    let mut header: Vec<String> = [
        "k",
        "hs_norm",
        "dist_to_core",
        "dist_to_core_rho",
        "telescoping_residual",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..states).map(|i| format!("rho_seminorm_{i}")));
    w.write_record(&header).map_err(io_err)?;
    for s in &tr.steps {
        let mut row = vec![
            s.k.to_string(),
            cell(Some(s.hs_norm)),
            cell(s.dist_to_core),
            cell(s.dist_to_core_rho),
            cell(s.telescoping_residual),
        ];
        row.extend(s.rho_seminorms.iter().map(|&x| cell(Some(x))));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, study_orbit};
    use crate::checks::{run_all, CheckBudget, CheckContext};
    use crate::io::to_json;
    use crate::linops::Operator;
    use crate::registry::Params;
    use crate::zoo;

    fn report(name: &str) -> (CoreReport, serde_json::Value) {
        let e = zoo::make(name, 2, &Params::new()).unwrap();
        let config = AnalysisConfig::default();
        let (phi, an) = analyze(e.map, &config).unwrap();
        let ctx = CheckContext {
            phi: &phi,
            analysis: &an,
            config: &config,
            budget: CheckBudget::default(),
        };
        let r = CoreReport::new(&phi, &an, &config, &run_all(&ctx));
        let v = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
        (r, v)
    }

    #[test]
    fn core_report_fields() {
        let (r, v) = report("depolarizing");
        assert_eq!(r.exit_code, 0);
        assert_eq!(v["core"]["rank"], 1);
        assert_eq!(v["core_vs_peripheral"]["equal"], true);
        assert_eq!(v["invariant_states"]["phi_finite"], true);
        assert_eq!(v["core"]["basis"][0].as_array().unwrap().len(), 2);
        assert!(v["conditional_expectation"]["superop"].is_array());
        assert!(v["projection"].is_null());

        let (r, v) = report("trace_to_corner");
        assert_eq!(r.exit_code, 2);
        assert_eq!(v["invariant_states"]["phi_finite"], false);
        assert_eq!(v["core_vs_peripheral"]["equal"], true);
        assert_eq!(v["verdict"], "hypothesis_unmet");
    }

    #[test]
    fn orbit_report_and_csv() {
        let e = zoo::make("depolarizing", 2, &Params::new()).unwrap();
        let config = AnalysisConfig {
            orbit_steps: 30,
            ..Default::default()
        };
        let (phi, an) = analyze(e.map, &config).unwrap();
        let study = study_orbit(&phi, &an, &Operator::sigma_z(), &config).unwrap();
        let r = OrbitReport::new(&phi, &an, &config, &study);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.steps.len(), 31);
        let mut buf = Vec::new();
        write_orbit_csv(&study.trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 32);
        assert!(lines[0].starts_with(
            "k,hs_norm,dist_to_core,dist_to_core_rho,telescoping_residual,rho_seminorm_0"
        ));
        assert!(lines[1].starts_with("0,1.4142135623730951e0,"));
    }
}
