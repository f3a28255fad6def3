//! Positive unital maps `φ: M_n → M_n` and their Kraus, Choi and
//! superoperator forms.
//!
//! The superoperator is the canonical representation. It acts on
//! column-stacked vectorizations, so a Kraus family `{K_i}` becomes
//! `Σ conj(K_i) ⊗ K_i`, using `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use crate::error::{Error, Result};
use crate::linops::{CMatrix, LinearMap, Operator, C64, ONE};
use crate::random;

/// Tolerance for the unital / trace-preserving / CP / positivity flags.
pub const FLAG_TOL: f64 = 1e-10;

/// Default number of rank-one inputs used to sample positivity.
pub const DEFAULT_POSITIVITY_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Kraus(Vec<Operator>),
    Choi(CMatrix),
    Superop,
}

/// Sampled positivity: worst minimum eigenvalue of `φ(ψψ†)` over Haar-random
/// unit vectors `ψ`. This is evidence, never a proof.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityEvidence {
    pub samples: usize,
    pub worst_min_eig: f64,
}

impl PositivityEvidence {
    pub fn passes(&self) -> bool {
        self.worst_min_eig >= -FLAG_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapFlags {
    pub unital: bool,
    pub trace_preserving: bool,
    pub cp: bool,
    pub positivity: Option<PositivityEvidence>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapDescriptor {
    name: String,
    dim: usize,
    superop: CMatrix,
    provenance: Option<Provenance>,
    flags: MapFlags,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub unital_residual: f64,
    pub trace_residual: f64,
    pub choi_min_eig: f64,
    pub positivity: PositivityEvidence,
}

impl ValidationReport {
    pub fn unital(&self) -> bool {
        self.unital_residual < FLAG_TOL
    }

    pub fn trace_preserving(&self) -> bool {
        self.trace_residual < FLAG_TOL
    }

    pub fn cp(&self) -> bool {
        self.choi_min_eig >= -FLAG_TOL
    }

    pub fn positive(&self) -> bool {
        self.positivity.passes()
    }

    /// Ok when the map is unital and no positivity sample failed.
    pub fn require_positive_unital(&self) -> Result<()> {
        if !self.unital() {
            return Err(Error::HypothesisViolation(format!(
                "map is not unital (‖φ(1) − 1‖ = {:.3e})",
                self.unital_residual
            )));
        }
        if !self.positive() {
            return Err(Error::HypothesisViolation(format!(
                "map is not positive (sampled min eigenvalue {:.3e})",
                self.positivity.worst_min_eig
            )));
        }
        Ok(())
    }
}

fn check_kraus(kraus: &[Operator]) -> Result<usize> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
    let n = first.dim();
    for k in kraus {
        k.check_dim(n)?;
    }
    Ok(n)
}

impl MapDescriptor {
    pub fn from_superop(name: impl Into<String>, n: usize, superop: CMatrix) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if superop.shape() != (n * n, n * n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: superop.nrows(),
            });
        }
        if superop
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidOperator(
                "non-finite superoperator entry".into(),
            ));
        }
        Ok(Self::assemble(
            name.into(),
            n,
            superop,
            Some(Provenance::Superop),
        ))
    }

    pub fn from_kraus(name: impl Into<String>, kraus: Vec<Operator>) -> Result<Self> {
        let n = check_kraus(&kraus)?;
        let mut s = CMatrix::zeros(n * n, n * n);
        for k in &kraus {
            s += k.matrix().map(|z| z.conj()).kronecker(k.matrix());
        }
        Ok(Self::assemble(
            name.into(),
            n,
            s,
            Some(Provenance::Kraus(kraus)),
        ))
    }

    /// From a Choi matrix `C = Σ_ij E_ij ⊗ φ(E_ij)`.
    pub fn from_choi(name: impl Into<String>, n: usize, choi: CMatrix) -> Result<Self> {
        if choi.shape() != (n * n, n * n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: choi.nrows(),
            });
        }
        let mut s = CMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let block = choi.view((i * n, j * n), (n, n));
                s.column_mut(j * n + i)
                    .copy_from_slice(block.clone_owned().as_slice());
            }
        }
        let mut m = Self::from_superop(name, n, s)?;
        m.provenance = Some(Provenance::Choi(choi));
        Ok(m)
    }

    /// Tabulates a linear map given as a closure on matrix units.
    pub fn from_fn(name: impl Into<String>, n: usize, f: impl Fn(&Operator) -> Operator) -> Self {
        let mut s = CMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let img = f(&Operator::unit(n, i, j));
                s.column_mut(j * n + i)
                    .copy_from_slice(img.matrix().as_slice());
            }
        }
        Self::assemble(name.into(), n, s, None)
    }

    fn assemble(
        name: String,
        dim: usize,
        superop: CMatrix,
        provenance: Option<Provenance>,
    ) -> Self {
        let mut m = MapDescriptor {
            name,
            dim,
            superop,
            provenance,
            flags: MapFlags {
                unital: false,
                trace_preserving: false,
                cp: false,
                positivity: None,
            },
        };
        m.flags.unital = m.unital_residual() < FLAG_TOL;
        m.flags.trace_preserving = m.trace_residual() < FLAG_TOL;
        m.flags.cp = m.choi_min_eig() >= -FLAG_TOL;
        m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn flags(&self) -> &MapFlags {
        &self.flags
    }

    pub fn is_unital(&self) -> bool {
        self.flags.unital
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.flags.trace_preserving
    }

    pub fn is_cp(&self) -> bool {
        self.flags.cp
    }

    /// `C = Σ_ij E_ij ⊗ φ(E_ij)`.
    pub fn choi(&self) -> CMatrix {
        let n = self.dim;
        let mut c = CMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let col = self.superop.column(j * n + i);
                let block = CMatrix::from_column_slice(n, n, col.clone_owned().as_slice());
                c.view_mut((i * n, j * n), (n, n)).copy_from(&block);
            }
        }
        c
    }

    /// Superoperator → Choi → superoperator.
    pub fn choi_roundtrip(&self) -> Result<Self> {
        let mut m = Self::from_choi(self.name.clone(), self.dim, self.choi())?;
        m.provenance = self.provenance.clone();
        Ok(m)
    }

    pub fn unital_residual(&self) -> f64 {
        let one = Operator::identity(self.dim);
        (&self.apply_op(&one) - &one).hs_norm()
    }

    /// `max |tr φ(e_ij) − tr e_ij|` over matrix units.
    pub fn trace_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let col = self.superop.column(j * n + i);
                let tr: C64 = (0..n).map(|k| col[k * n + k]).sum();
                let expected = if i == j { ONE } else { C64::new(0.0, 0.0) };
                worst = worst.max((tr - expected).norm());
            }
        }
        worst
    }

    pub fn choi_min_eig(&self) -> f64 {
        let c = self.choi();
        let h = (&c + c.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Worst minimum eigenvalue of `φ(ψψ†)` over `samples` Haar-random `ψ`.
    pub fn sample_positivity(&self, samples: usize, seed: u64) -> PositivityEvidence {
        let mut rng = random::rng(seed);
        let mut worst = f64::INFINITY;
        for _ in 0..samples {
            let p = random::pure_state(&mut rng, self.dim);
            worst = worst.min(self.apply_op(&p).min_hermitian_eigenvalue());
        }
        PositivityEvidence {
            samples,
            worst_min_eig: worst,
        }
    }

    pub fn validate(&self, samples: usize, seed: u64) -> ValidationReport {
        ValidationReport {
            unital_residual: self.unital_residual(),
            trace_residual: self.trace_residual(),
            choi_min_eig: self.choi_min_eig(),
            positivity: self.sample_positivity(samples.max(1), seed),
        }
    }

    /// Runs `validate` and records the positivity evidence on the descriptor.
    pub fn validated(mut self, samples: usize, seed: u64) -> (Self, ValidationReport) {
        let report = self.validate(samples, seed);
        self.flags.positivity = Some(report.positivity);
        (self, report)
    }

    /// HS adjoint: `⟨φ(x), y⟩ = ⟨x, φ†(y)⟩`.
    pub fn adjoint(&self) -> Self {
        let provenance = match &self.provenance {
            Some(Provenance::Kraus(ks)) => Some(Provenance::Kraus(
                ks.iter().map(Operator::adjoint).collect(),
            )),
            _ => None,
        };
        let mut m = Self::assemble(
            format!("{}†", self.name),
            self.dim,
            self.superop.adjoint(),
            provenance,
        );
        m.flags.positivity = None;
        m
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        x.check_dim(self.dim)?;
        Ok(self.apply_op(x))
    }

    /// `φᵏ(x)`. Negative powers exist only on the multiplicative core; see
    /// [`crate::core_algebra::CoreAutomorphism`].
    pub fn power_apply(&self, x: &Operator, k: usize) -> Result<Operator> {
        x.check_dim(self.dim)?;
        let mut v = x.vec();
        for _ in 0..k {
            v = &self.superop * v;
        }
        Ok(Operator::from_vec_unchecked(self.dim, v.as_slice()))
    }

    /// `outer ∘ inner`: applies `inner` first.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.dim != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: outer.dim,
                found: inner.dim,
            });
        }
        Ok(Self::assemble(
            format!("{}∘{}", outer.name, inner.name),
            outer.dim,
            &outer.superop * &inner.superop,
            None,
        ))
    }

    /// `Σ w_i φ_i`.
    pub fn convex(name: impl Into<String>, parts: &[(f64, &Self)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
        let n = first.1.dim;
        let mut s = CMatrix::zeros(n * n, n * n);
        for (w, m) in parts {
            if m.dim != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim,
                });
            }
            s += &m.superop * C64::new(*w, 0.0);
        }
        Ok(Self::assemble(name.into(), n, s, None))
    }
}

impl LinearMap for MapDescriptor {
    fn dim(&self) -> usize {
        self.dim
    }

    fn superop(&self) -> &CMatrix {
        &self.superop
    }
}
