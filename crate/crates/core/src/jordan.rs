//! Jordan product, the operator-valued form `⟨a,b⟩ = φ(a∘b†) − φ(a)∘φ(b)†`,
//! the Kadison–Schwarz defect and `ρ`-seminorms.

use crate::error::{Error, Result};
use crate::linops::{project, LinearMap, Operator, OperatorSubspace, C64};

/// Eigenvalues above this are numerical zero for PSD checks on defects.
pub const DEFECT_EIG_TOL: f64 = 1e-10;

/// Projection residual allowed for subalgebra closure.
pub const CLOSURE_TOL: f64 = 1e-9;

/// `a∘b = ½(ab + ba)`.
pub fn jordan_product(a: &Operator, b: &Operator) -> Operator {
    let ab = a * b;
    let ba = b * a;
    &(&ab + &ba) * 0.5
}

/// `⟨a,b⟩ = φ(a∘b†) − φ(a)∘φ(b)†`: linear in `a`, conjugate-linear in `b`.
pub fn form<M: LinearMap + ?Sized>(phi: &M, a: &Operator, b: &Operator) -> Operator {
    let b_adj = b.adjoint();
    let lhs = phi.apply_op(&jordan_product(a, &b_adj));
    let rhs = jordan_product(&phi.apply_op(a), &phi.apply_op(b).adjoint());
    &lhs - &rhs
}

#[derive(Clone, Debug)]
pub struct SchwarzDefect {
    pub matrix: Operator,
    pub min_eig: f64,
}

impl SchwarzDefect {
    pub fn is_psd(&self) -> bool {
        self.min_eig >= -DEFECT_EIG_TOL
    }
}

/// `φ(a∘a†) − φ(a)∘φ(a)†`, PSD for every positive unital `φ`.
pub fn schwarz_defect<M: LinearMap + ?Sized>(phi: &M, a: &Operator) -> SchwarzDefect {
    let matrix = form(phi, a, a);
    let min_eig = matrix.min_hermitian_eigenvalue();
    SchwarzDefect { matrix, min_eig }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanCheck {
    pub closed_product: bool,
    pub closed_adjoint: bool,
    pub contains_unit: bool,
    pub worst_residual: f64,
}

impl JordanCheck {
    pub fn all(&self) -> bool {
        self.closed_product && self.closed_adjoint && self.contains_unit
    }
}

/// Checks that `b_i∘b_j` and `b_i†` stay in `U` for all basis elements.
pub fn is_jordan_subalgebra(u: &OperatorSubspace) -> JordanCheck {
    let basis = u.basis();
    let mut prod_worst: f64 = 0.0;
    for (i, bi) in basis.iter().enumerate() {
        for bj in &basis[i..] {
            prod_worst = prod_worst.max(project(u, &jordan_product(bi, bj)).distance);
        }
    }
    let adj_worst = basis
        .iter()
        .map(|b| project(u, &b.adjoint()).distance)
        .fold(0.0, f64::max);
    let one = Operator::identity(u.ambient_dim());
    let unit_resid = project(u, &one).distance / one.hs_norm();
    JordanCheck {
        closed_product: prod_worst < CLOSURE_TOL,
        closed_adjoint: adj_worst < CLOSURE_TOL,
        contains_unit: unit_resid < CLOSURE_TOL,
        worst_residual: prod_worst.max(adj_worst),
    }
}

/// A density operator: PSD with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Density(Operator);

impl Density {
    pub fn new(op: Operator) -> Result<Self> {
        if op.hermiticity_residual() > 1e-12 {
            return Err(Error::InvalidOperator("density is not Hermitian".into()));
        }
        if (op.trace().re - 1.0).abs() > 1e-12 || op.trace().im.abs() > 1e-12 {
            return Err(Error::InvalidOperator(format!(
                "density trace is {} (expected 1)",
                op.trace()
            )));
        }
        let min = op.min_hermitian_eigenvalue();
        if min < -1e-12 {
            return Err(Error::InvalidOperator(format!(
                "density has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Density(op))
    }

    /// Hermitizes, clips negative eigenvalues and renormalizes the trace.
    pub fn from_approximate(op: &Operator) -> Result<Self> {
        let h = op.hermitian_part().into_matrix();
        let eig = h.symmetric_eigen();
        let clipped = eig.eigenvalues.map(|x| x.max(0.0));
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidOperator(
                "no positive part to normalize".into(),
            ));
        }
        let d = nalgebra::DMatrix::from_diagonal(&clipped.map(|x| C64::new(x / total, 0.0)));
        let m = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Density::new(Operator::from_matrix_unchecked(m))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Density(&Operator::identity(n) * (1.0 / n as f64))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `ρ(x) = tr(ρ x)`.
    pub fn expect(&self, x: &Operator) -> C64 {
        self.0.adjoint().hs_inner(x)
    }
}

/// `‖x‖_ρ = ρ(x∘x†)^{1/2}`, with tiny negative round-off clamped to 0.
pub fn rho_seminorm(rho: &Density, x: &Operator) -> f64 {
    rho.expect(&jordan_product(x, &x.adjoint()))
        .re
        .max(0.0)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{orthonormalize, RankTol};
    use crate::posmap::MapDescriptor;
    use crate::random;
    use approx::assert_abs_diff_eq;

    fn e(i: usize, j: usize) -> Operator {
        Operator::unit(2, i, j)
    }

    fn pinching() -> MapDescriptor {
        MapDescriptor::from_kraus("pinching", vec![e(0, 0), e(1, 1)]).unwrap()
    }

    #[test]
    fn jordan_product_examples() {
        let a = random::unit_operator(&mut random::rng(1), 2);
        assert!((&jordan_product(&a, &Operator::identity(2)) - &a).hs_norm() < 1e-15);
        assert!((&jordan_product(&e(0, 0), &e(0, 1)) - &(&e(0, 1) * 0.5)).hs_norm() < 1e-15);
        let expected = &Operator::identity(2) * 0.5;
        assert!((&jordan_product(&e(0, 1), &e(1, 0)) - &expected).hs_norm() < 1e-15);
    }

    #[test]
    fn form_vanishes_for_identity_map() {
        let id = MapDescriptor::from_kraus("id", vec![Operator::identity(2)]).unwrap();
        let mut r = random::rng(2);
        let a = random::unit_operator(&mut r, 2);
        let b = random::unit_operator(&mut r, 2);
        assert!(form(&id, &a, &b).hs_norm() < 1e-15);
    }

    #[test]
    fn form_for_pinching_on_e12() {
        let v = form(&pinching(), &e(0, 1), &e(0, 1));
        assert!((&v - &(&Operator::identity(2) * 0.5)).hs_norm() < 1e-15);
        let d = schwarz_defect(&pinching(), &e(0, 1));
        assert_abs_diff_eq!(d.min_eig, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn form_for_depolarizing_on_sigma_z() {
        // φ(σz∘σz) = φ(1) = 1 and φ(σz)∘φ(σz) = λ²·1, so ⟨σz,σz⟩ = (1 − λ²)·1.
        for lam in [0.0, 0.3, 0.5, 0.9, 1.0] {
            let phi = MapDescriptor::from_fn("dep", 2, |x| {
                &(x * lam) + &(&Operator::identity(2) * (x.trace() * ((1.0 - lam) / 2.0)))
            });
            let v = form(&phi, &Operator::sigma_z(), &Operator::sigma_z());
            let expected = &Operator::identity(2) * (1.0 - lam * lam);
            assert!((&v - &expected).hs_norm() < 1e-14, "λ = {lam}");
        }
    }

    #[test]
    fn schwarz_defect_trivial_cases() {
        let mut r = random::rng(3);
        assert!(
            schwarz_defect(&pinching(), &Operator::identity(2))
                .matrix
                .hs_norm()
                < 1e-15
        );
        let t = MapDescriptor::from_fn("transpose", 3, Operator::transpose);
        for _ in 0..10 {
            let a = random::unit_operator(&mut r, 3);
            assert!(schwarz_defect(&t, &a).matrix.hs_norm() < 1e-14);
        }
    }

    #[test]
    fn subalgebra_examples() {
        let diag = orthonormalize(2, &[e(0, 0), e(1, 1)], RankTol::default()).unwrap();
        assert!(is_jordan_subalgebra(&diag).all());
        let e12 = orthonormalize(2, &[e(0, 1)], RankTol::default()).unwrap();
        let c = is_jordan_subalgebra(&e12);
        assert!(c.closed_product && !c.closed_adjoint && !c.contains_unit);
        assert!(is_jordan_subalgebra(&OperatorSubspace::full(3)).all());
    }

    #[test]
    fn seminorm_examples() {
        let half = Density::maximally_mixed(2);
        assert_eq!(rho_seminorm(&half, &Operator::zeros(2)), 0.0);
        assert_abs_diff_eq!(
            rho_seminorm(&half, &Operator::sigma_z()),
            1.0,
            epsilon = 1e-15
        );
        let corner = Density::new(e(0, 0)).unwrap();
        assert_eq!(rho_seminorm(&corner, &e(1, 1)), 0.0);
    }

    #[test]
    fn density_validation() {
        assert!(Density::new(Operator::sigma_z()).is_err());
        assert!(Density::new(Operator::identity(2)).is_err());
        assert!(Density::new(e(0, 1)).is_err());
        let d = Density::from_approximate(&(&Operator::identity(2) * 3.0)).unwrap();
        assert_eq!(d, Density::maximally_mixed(2));
    }
}
