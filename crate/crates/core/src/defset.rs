//! The definite set `M_φ = {a : φ(a∘a†) = φ(a)∘φ(a)†}` and its largest
//! `φ`-invariant part `M_Φ = {a ∈ M_φ : φᵏ(a) ∈ M_φ for all k}`.
//!
//! `M_φ` is computed from the linear characterization: `a ∈ M_φ` iff
//! `⟨a, b⟩ = 0` for every `b`, and since the form is conjugate-linear in `b`
//! it suffices to test the matrix units. The stacked map
//! `a ↦ (⟨a, e_j⟩)_j` is an `n⁴ × n²` matrix whose null space is `M_φ`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::jordan::{form, jordan_product};
use crate::linops::{
    intersect, max_principal_angle, preimage, project, CMatrix, LinearMap, Operator,
    OperatorSubspace, RankTol,
};
use crate::posmap::MapDescriptor;
use crate::random;
use crate::MAX_DIM;

/// Consecutive iterates closer than this are the same subspace.
const STABLE_ANGLE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DefiniteSetResult {
    pub m_phi: OperatorSubspace,
    pub m_stable: OperatorSubspace,
    /// Ranks of `V_0 = M_φ, V_1, …` up to and including the fixed point.
    pub rank_sequence: Vec<usize>,
    pub stabilization_steps: usize,
    /// Worst `‖φ(a∘a†) − φ(a)∘φ(a)†‖` over sampled `a ∈ M_φ`.
    pub quadratic_check_residual: f64,
    /// Worst `dist(φ(b), M_Φ)` over the basis of `M_Φ`.
    pub invariance_residual: f64,
}

/// Refuses maps that are not unital or lack passing positivity evidence.
pub(crate) fn require_validated(phi: &MapDescriptor) -> Result<()> {
    if phi.dim() > MAX_DIM {
        return Err(Error::TooLarge(phi.dim()));
    }
    if !phi.is_unital() {
        return Err(Error::HypothesisViolation(format!(
            "`{}` is not unital; the definite set needs a positive unital map",
            phi.name()
        )));
    }
    match phi.flags().positivity {
        None => Err(Error::HypothesisViolation(format!(
            "`{}` has not been validated for positivity",
            phi.name()
        ))),
        Some(p) if !p.passes() => Err(Error::HypothesisViolation(format!(
            "`{}` failed sampled positivity (min eigenvalue {:.3e})",
            phi.name(),
            p.worst_min_eig
        ))),
        Some(_) => Ok(()),
    }
}

/// The `n⁴ × n²` matrix of `a ↦ (⟨a, e_j⟩)_j` in matrix-unit coordinates.
pub fn stacked_form_matrix(phi: &MapDescriptor) -> CMatrix {
    let n = phi.dim();
    let nn = n * n;
    let units: Vec<Operator> = (0..nn).map(|k| Operator::unit(n, k % n, k / n)).collect();
    let mut k_mat = CMatrix::zeros(nn * nn, nn);
    for (col, a) in units.iter().enumerate() {
        for (blk, b) in units.iter().enumerate() {
            let v = form(phi, a, b);
            k_mat
                .view_mut((blk * nn, col), (nn, 1))
                .copy_from_slice(v.matrix().as_slice());
        }
    }
    k_mat
}

/// `M_φ` as the null space of the stacked form matrix.
pub fn definite_set(phi: &MapDescriptor, tol: RankTol) -> Result<OperatorSubspace> {
    require_validated(phi)?;
    let k_mat = stacked_form_matrix(phi);
    let ns = crate::linops::null_space(&k_mat, tol, 1.0);
    Ok(OperatorSubspace::from_orthonormal_columns(phi.dim(), ns))
}

/// Both directions of the quadratic characterization, sampled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCheck {
    /// Worst defect norm over random unit `a ∈ U`; should be < 1e-9.
    pub in_set_worst: f64,
    /// Smallest defect norm over random unit `a` with orthogonal component
    /// of at least 0.1; should exceed 1e-10. `None` when `U` is everything.
    pub out_of_set_min: Option<f64>,
}

impl QuadraticCheck {
    pub const IN_SET_TOL: f64 = 1e-9;
    pub const OUT_OF_SET_FLOOR: f64 = 1e-10;

    pub fn passes(&self) -> bool {
        self.in_set_worst < Self::IN_SET_TOL
            && self
                .out_of_set_min
                .is_none_or(|m| m > Self::OUT_OF_SET_FLOOR)
    }
}

fn quadratic_defect_norm<M: LinearMap + ?Sized>(phi: &M, a: &Operator) -> f64 {
    let lhs = phi.apply_op(&jordan_product(a, &a.adjoint()));
    let pa = phi.apply_op(a);
    let rhs = jordan_product(&pa, &pa.adjoint());
    (&lhs - &rhs).hs_norm()
}

fn random_unit_in<R: Rng + ?Sized>(rng: &mut R, u: &OperatorSubspace) -> Operator {
    let n = u.ambient_dim();
    let coeffs = crate::linops::CVector::from_fn(u.rank(), |_, _| random::complex_gaussian(rng));
    let v = u.basis_matrix() * coeffs;
    let norm = v.norm();
    Operator::from_vec_unchecked(n, (v / crate::linops::C64::new(norm, 0.0)).as_slice())
}

pub fn quadratic_crosscheck(
    phi: &MapDescriptor,
    u: &OperatorSubspace,
    samples: usize,
    seed: u64,
    tol: RankTol,
) -> QuadraticCheck {
    let mut rng = random::rng(seed);
    let mut in_set_worst: f64 = 0.0;
    if u.rank() > 0 {
        for _ in 0..samples {
            let a = random_unit_in(&mut rng, u);
            in_set_worst = in_set_worst.max(quadratic_defect_norm(phi, &a));
        }
    }
    let comp = u.complement(tol);
    let out_of_set_min = (comp.rank() > 0).then(|| {
        let mut best = f64::INFINITY;
        for _ in 0..samples {
            let w = random_unit_in(&mut rng, &comp);
            let s: f64 = rng.random_range(0.1..=1.0);
            let a = if u.rank() > 0 {
                let inside = random_unit_in(&mut rng, u);
                &(&inside * (1.0 - s * s).sqrt()) + &(&w * s)
            } else {
                w
            };
            best = best.min(quadratic_defect_norm(phi, &a));
        }
        best
    });
    QuadraticCheck {
        in_set_worst,
        out_of_set_min,
    }
}

/// Iterates `V_{k+1} = V_k ∩ φ⁻¹(V_k)` from `V_0 = M_φ` to its fixed point.
pub fn stable_definite_set(
    phi: &MapDescriptor,
    m_phi: &OperatorSubspace,
    tol: RankTol,
) -> Result<DefiniteSetResult> {
    let n = phi.dim();
    let limit = n * n + 1;
    let mut current = m_phi.clone();
    let mut ranks = vec![current.rank()];
    let mut steps = 0;
    loop {
        if steps >= limit {
            return Err(Error::NonStabilization {
                what: "stable definite set",
                limit,
                ranks,
            });
        }
        let pre = preimage(phi, &current, tol)?;
        let next = intersect(&current, &pre, tol)?;
        steps += 1;
        let settled =
            next.rank() == current.rank() && max_principal_angle(&next, &current)? < STABLE_ANGLE;
        ranks.push(next.rank());
        current = next;
        if settled {
            break;
        }
    }
    let invariance_residual = current
        .basis()
        .iter()
        .map(|b| project(&current, &phi.apply_op(b)).distance)
        .fold(0.0, f64::max);
    let quadratic_check_residual = quadratic_crosscheck(phi, m_phi, 16, 0, tol).in_set_worst;
    Ok(DefiniteSetResult {
        m_phi: m_phi.clone(),
        m_stable: current,
        rank_sequence: ranks,
        stabilization_steps: steps,
        quadratic_check_residual,
        invariance_residual,
    })
}

/// `definite_set` followed by `stable_definite_set`.
pub fn analyze(phi: &MapDescriptor, tol: RankTol) -> Result<DefiniteSetResult> {
    let m_phi = definite_set(phi, tol)?;
    stable_definite_set(phi, &m_phi, tol)
}
