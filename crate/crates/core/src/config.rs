use crate::error::{Error, Result};
use crate::linops::{RankTol, SUBSPACE_ANGLE_TOL};
use crate::posmap::DEFAULT_POSITIVITY_SAMPLES;

/// Tolerances and budgets shared by every analysis step.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub tol_rank: f64,
    pub tol_peripheral: f64,
    pub tol_faithful: f64,
    pub angle_tol: f64,
    /// Hard cap on orbit horizons.
    pub max_power: usize,
    pub orbit_steps: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tol_rank: RankTol::DEFAULT_REL,
            tol_peripheral: 1e-8,
            tol_faithful: 1e-9,
            angle_tol: SUBSPACE_ANGLE_TOL,
            max_power: 5000,
            orbit_steps: 500,
            samples: DEFAULT_POSITIVITY_SAMPLES,
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn rank_tol(&self) -> RankTol {
        RankTol::new(self.tol_rank)
    }

    /// Every tolerance must lie in `(0, 1e-2)`.
    pub fn check(&self) -> Result<()> {
        let tols = [
            ("tol-rank", self.tol_rank),
            ("tol-peripheral", self.tol_peripheral),
            ("tol-faithful", self.tol_faithful),
            ("angle-tol", self.angle_tol),
        ];
        for (name, t) in tols {
            if !(t > 0.0 && t < 1e-2) {
                return Err(Error::InvalidParameter(format!(
                    "--{name} must lie in (0, 1e-2), got {t}"
                )));
            }
        }
        if self.orbit_steps == 0 {
            return Err(Error::InvalidParameter(
                "--orbit-steps must be at least 1".into(),
            ));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter(
                "--samples must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AnalysisConfig::default().check().unwrap();
    }

    #[test]
    fn out_of_range_tolerance_is_rejected() {
        let c = AnalysisConfig {
            tol_peripheral: 0.5,
            ..Default::default()
        };
        assert!(c.check().is_err());
        let c = AnalysisConfig {
            tol_rank: 0.0,
            ..Default::default()
        };
        assert!(c.check().is_err());
    }
}
