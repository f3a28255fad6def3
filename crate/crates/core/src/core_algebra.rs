//! The multiplicative core `C_φ = ⋂ₙ φⁿ(M_Φ)`, the peripheral eigenoperator
//! space `E_φ`, invariant states, the restriction of `φ` to its core and the
//! trace-preserving conditional expectation onto the core.
//!
//! `C_φ` and `E_φ` are computed by unrelated routes: the first by iterating
//! images of the stable definite set, the second from the spectrum of the
//! superoperator. Whenever a faithful invariant state exists the two must
//! coincide, which makes their comparison a strong self-check.

use nalgebra::DMatrix;

use crate::config::AnalysisConfig;
use crate::defset::{self, DefiniteSetResult};
use crate::error::{Error, Result};
use crate::jordan::{is_jordan_subalgebra, jordan_product, Density, JordanCheck};
use crate::linops::{
    image, max_principal_angle, orthonormalize, project, same_subspace, singular_values,
    smallest_right_singular, CMatrix, LinearMap, Operator, OperatorSubspace, RankTol, C64, I, ONE,
};
use crate::posmap::{MapDescriptor, PositivityEvidence};
use crate::random;

/// Eigenvalues closer than this are treated as one (semisimple) cluster.
pub const CLUSTER_RADIUS: f64 = 1e-6;

/// Largest residual `‖φ(v) − λv‖` accepted for a kept peripheral eigenpair.
pub const EIGENPAIR_TOL: f64 = 1e-8;

/// Spectral radius allowed above 1 before a numerics warning is raised.
pub const RADIUS_SLACK: f64 = 1e-8;

/// Eigenvalues of the superoperator and the derived spectral gap.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// All eigenvalues, by decreasing modulus.
    pub eigenvalues: Vec<C64>,
    pub tol_peripheral: f64,
    pub spectral_radius: f64,
    /// Largest modulus among non-peripheral eigenvalues (0 if there are none).
    pub second_modulus: f64,
    pub warnings: Vec<String>,
}

impl Spectrum {
    pub fn of<M: LinearMap + ?Sized>(phi: &M, tol_peripheral: f64) -> Result<Self> {
        let mut eigenvalues = schur_eigenvalues(phi.superop())?;
        eigenvalues.sort_by(|a, b| {
            b.norm()
                .total_cmp(&a.norm())
                .then(a.arg().total_cmp(&b.arg()))
        });
        let spectral_radius = eigenvalues.first().map(|z| z.norm()).unwrap_or(0.0);
        let second_modulus = eigenvalues
            .iter()
            .map(|z| z.norm())
            .filter(|&m| m < 1.0 - tol_peripheral)
            .fold(0.0, f64::max);
        let mut warnings = Vec::new();
        if spectral_radius > 1.0 + RADIUS_SLACK {
            let msg = format!(
                "spectral radius {spectral_radius:.12} exceeds 1; the map is probably not positive unital"
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(Spectrum {
            eigenvalues,
            tol_peripheral,
            spectral_radius,
            second_modulus,
            warnings,
        })
    }

    pub fn is_peripheral(&self, z: C64) -> bool {
        z.norm() >= 1.0 - self.tol_peripheral
    }

    pub fn peripheral(&self) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|&z| self.is_peripheral(z))
            .collect()
    }

    /// `1 − second_modulus`.
    pub fn gap(&self) -> f64 {
        1.0 - self.second_modulus
    }

    /// Algebraic multiplicity of eigenvalue 1.
    pub fn fixed_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|z| (*z - ONE).norm() < CLUSTER_RADIUS)
            .count()
    }
}

/// Seed of the fixed unitary similarity used when plain QR iteration stalls.
const SIMILARITY_SEED: u64 = 0x5eed;

/// Eigenvalues via complex Schur. Exactly structured superoperators (phased
/// permutations and the like) can stall the shifted QR iteration; a fixed
/// unitary similarity breaks the structure without moving the spectrum.
fn schur_eigenvalues(s: &CMatrix) -> Result<Vec<C64>> {
    let attempt = |m: CMatrix| {
        nalgebra::linalg::Schur::try_new(m, 1e-14, 10_000).and_then(|t| t.eigenvalues())
    };
    if let Some(ev) = attempt(s.clone()) {
        return Ok(ev.iter().copied().collect());
    }
    let w = random::haar_unitary(&mut random::rng(SIMILARITY_SEED), s.nrows());
    attempt(&w * s * w.adjoint())
        .map(|ev| ev.iter().copied().collect())
        .ok_or_else(|| Error::Eigensolver("Schur iteration did not converge".into()))
}

/// Groups eigenvalues into clusters of radius [`CLUSTER_RADIUS`]; returns
/// `(center, multiplicity)` pairs ordered by argument.
fn cluster(values: &[C64]) -> Vec<(C64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for z in sorted {
        match groups
            .iter_mut()
            .find(|g| (g.iter().sum::<C64>() / g.len() as f64 - z).norm() < CLUSTER_RADIUS)
        {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<C64>() / g.len() as f64, g.len()))
        .collect()
}

/// Eigenvectors for a cluster of multiplicity `m` at `center`: the `m`
/// smallest right singular vectors of `S − center·1`. Their singular values
/// are exactly the eigenpair residuals.
fn cluster_vectors(s: &CMatrix, center: C64, m: usize) -> (CMatrix, f64) {
    let nn = s.nrows();
    let shifted = s - CMatrix::identity(nn, nn) * center;
    smallest_right_singular(&shifted, m)
}

#[derive(Clone, Debug)]
pub struct PeripheralSpace {
    pub space: OperatorSubspace,
    /// Peripheral eigenvalues with multiplicity, ordered by argument.
    pub eigenvalues: Vec<C64>,
    /// Worst `‖φ(v) − λv‖_HS` over kept unit eigenvectors.
    pub worst_residual: f64,
}

/// `E_φ`: span of eigenoperators with `|λ| ≥ 1 − tol_peripheral`.
pub fn peripheral_space<M: LinearMap + ?Sized>(
    phi: &M,
    spectrum: &Spectrum,
    tol: RankTol,
) -> Result<PeripheralSpace> {
    let n = phi.dim();
    let s = phi.superop();
    let mut cols: Vec<CMatrix> = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut worst: f64 = 0.0;
    for (center, m) in cluster(&spectrum.peripheral()) {
        let (vecs, resid) = cluster_vectors(s, center, m);
        if resid >= EIGENPAIR_TOL {
            return Err(Error::Eigensolver(format!(
                "peripheral eigenvalue {center:.6} with multiplicity {m} has eigenvector \
                 residual {resid:.3e} (defective or unresolved cluster; singular values of \
                 S − λ: {:?})",
                singular_values(&(s - CMatrix::identity(n * n, n * n) * center))
            )));
        }
        worst = worst.max(resid);
        cols.push(vecs);
        eigenvalues.extend(std::iter::repeat_n(center, m));
    }
    let total: usize = cols.iter().map(|c| c.ncols()).sum();
    let mut stacked = CMatrix::zeros(n * n, total);
    let mut at = 0;
    for c in &cols {
        stacked.columns_mut(at, c.ncols()).copy_from(c);
        at += c.ncols();
    }
    Ok(PeripheralSpace {
        space: OperatorSubspace::span_of_columns(n, &stacked, tol, 1.0),
        eigenvalues,
        worst_residual: worst,
    })
}

/// `(1/N) Σ_{k<N} Lᵏ(x0)`.
pub fn cesaro_average<M: LinearMap + ?Sized>(map: &M, x0: &Operator, terms: usize) -> Operator {
    let mut acc = x0.vec() * C64::new(0.0, 0.0);
    let mut v = x0.vec();
    for _ in 0..terms {
        acc += &v;
        v = map.superop() * v;
    }
    acc /= C64::new(terms.max(1) as f64, 0.0);
    Operator::from_vec_unchecked(map.dim(), acc.as_slice())
}

/// Invariant states of `φ`, i.e. densities fixed by the trace dual `φ†`.
#[derive(Clone, Debug)]
pub struct StateFamily {
    /// Real dimension of the Hermitian fixed points of `φ†`.
    pub fixed_space_dim: usize,
    /// HS-orthonormal Hermitian basis of the fixed space of `φ†`.
    pub hermitian_basis: Vec<Operator>,
    /// Invariant densities spanning the fixed space.
    pub states: Vec<Density>,
    /// Ergodic average of `1/n` under `φ†`; has maximal support.
    pub faithful_candidate: Option<Density>,
    pub min_eig_of_candidate: f64,
    pub candidate_residual: f64,
    /// `None` when the ergodic projection could not be formed.
    pub phi_finite: Option<bool>,
    /// Support projection of the candidate when it is not faithful.
    pub support_projection: Option<Operator>,
    pub diagnostics: Vec<String>,
    ergodic: Option<CMatrix>,
}

impl StateFamily {
    pub fn is_phi_finite(&self) -> bool {
        self.phi_finite == Some(true)
    }

    /// Ergodic limit `lim (1/N) Σ φ†ᵏ(x)`, i.e. the spectral projection of
    /// `x` onto the fixed space of `φ†`.
    pub fn ergodic_limit(&self, x: &Operator) -> Option<Operator> {
        let e = self.ergodic.as_ref()?;
        let v = e * x.vec();
        Some(Operator::from_vec_unchecked(x.dim(), v.as_slice()))
    }
}

/// Realifies Hermitian operators and returns an orthonormal basis of their
/// real span, limited to `expected` elements.
fn hermitian_span(n: usize, ops: &[Operator], expected: usize) -> Vec<Operator> {
    if ops.is_empty() || expected == 0 {
        return Vec::new();
    }
    let nn = n * n;
    let mut real = DMatrix::<f64>::zeros(2 * nn, ops.len());
    for (c, h) in ops.iter().enumerate() {
        for (k, z) in h.matrix().iter().enumerate() {
            real[(k, c)] = z.re;
            real[(nn + k, c)] = z.im;
        }
    }
    // The real Gram matrix is tiny and its symmetric eigensolver is robust
    // to the denormal-sized entries that fixed vectors often carry.
    let gram = real.transpose() * &real;
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    order
        .into_iter()
        .take(expected)
        .filter(|&c| eig.eigenvalues[c] > 0.0)
        .map(|c| {
            let col = &real * eig.eigenvectors.column(c) / eig.eigenvalues[c].sqrt();
            let v: Vec<C64> = (0..nn).map(|k| C64::new(col[k], col[nn + k])).collect();
            Operator::from_vec_unchecked(n, &v).hermitian_part()
        })
        .collect()
}

/// Densities whose span is `M_n`: `|i⟩⟨i|`, `|i+j⟩⟨i+j|/2`, `|i+ij⟩⟨i+ij|/2`.
fn spanning_densities(n: usize) -> Vec<Operator> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(Operator::unit(n, i, i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for phase in [ONE, I] {
                let mut v = crate::linops::CVector::zeros(n);
                v[i] = ONE;
                v[j] = phase;
                let p = &v * v.adjoint() * C64::new(0.5, 0.0);
                out.push(Operator::from_matrix_unchecked(p));
            }
        }
    }
    out
}

pub fn invariant_states(
    phi: &MapDescriptor,
    spectrum: &Spectrum,
    config: &AnalysisConfig,
) -> Result<StateFamily> {
    let n = phi.dim();
    let nn = n * n;
    let s = phi.superop();
    let sd = s.adjoint();
    let m = spectrum.fixed_multiplicity();
    let mut diagnostics = Vec::new();
    let eye = CMatrix::identity(nn, nn);

    let (right, r_res) = smallest_right_singular(&(&sd - &eye), m);
    let (left, l_res) = smallest_right_singular(&(s - &eye), m);
    if r_res.max(l_res) >= EIGENPAIR_TOL {
        diagnostics.push(format!(
            "eigenvalue 1 is not resolved as semisimple (residuals {r_res:.3e}, {l_res:.3e})"
        ));
    }

    let fixed_ops: Vec<Operator> = right
        .column_iter()
        .map(|c| Operator::from_vec_unchecked(n, c.as_slice()))
        .collect();
    let mut herm = Vec::with_capacity(2 * m);
    for f in &fixed_ops {
        herm.push(f.hermitian_part());
        herm.push((&(f - &f.adjoint()) * C64::new(0.0, -0.5)).hermitian_part());
    }
    let hermitian_basis = hermitian_span(n, &herm, m);

    // Spectral projection onto ker(φ† − 1) along ran(φ† − 1).
    let gram = left.adjoint() * &right;
    let gram_sv = singular_values(&gram);
    let gram_min = gram_sv.last().copied().unwrap_or(0.0);
    let ergodic = if m > 0 && gram_min > 1e-12 {
        gram.try_inverse().map(|g| &right * g * left.adjoint())
    } else {
        None
    };

    let mut states = Vec::new();
    let mut candidate = None;
    let mut min_eig = f64::NAN;
    let mut residual = f64::NAN;
    let mut phi_finite = None;
    let mut support = None;

    if let Some(e) = &ergodic {
        let project_state = |x: &Operator| {
            let v = e * x.vec();
            Operator::from_vec_unchecked(n, v.as_slice()).hermitian_part()
        };
        let rho = project_state(&(&Operator::identity(n) * (1.0 / n as f64)));
        min_eig = rho.min_hermitian_eigenvalue();
        let dens = Density::from_approximate(&rho)?;
        residual = (&phi.adjoint().apply_op(dens.operator()) - dens.operator()).hs_norm();
        let faithful = min_eig > config.tol_faithful;
        phi_finite = Some(faithful);
        if !faithful {
            let h = dens.operator().matrix().clone();
            let eig = h.symmetric_eigen();
            let mut p = CMatrix::zeros(n, n);
            for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                if lam > config.tol_faithful {
                    let v = eig.eigenvectors.column(k);
                    p += v * v.adjoint();
                }
            }
            support = Some(Operator::from_matrix_unchecked(p));
        }
        candidate = Some(dens);

        let mut kept: Vec<Operator> = Vec::new();
        for sigma in spanning_densities(n) {
            if states.len() == m {
                break;
            }
            let img = project_state(&sigma);
            let mut trial = kept.clone();
            trial.push(img.clone());
            if orthonormalize(n, &trial, RankTol::new(1e-8))?.rank() > kept.len() {
                kept.push(img.clone());
                states.push(Density::from_approximate(&img)?);
            }
        }
    } else {
        diagnostics.push(format!(
            "ergodic projection unavailable (multiplicity {m}, smallest Gram singular value {gram_min:.3e})"
        ));
    }

    Ok(StateFamily {
        fixed_space_dim: hermitian_basis.len(),
        hermitian_basis,
        states,
        faithful_candidate: candidate,
        min_eig_of_candidate: min_eig,
        candidate_residual: residual,
        phi_finite,
        support_projection: support,
        diagnostics,
        ergodic,
    })
}

#[derive(Clone, Debug)]
pub struct CoreChain {
    pub c_phi: OperatorSubspace,
    /// Ranks of `M_Φ, φ(M_Φ), φ²(M_Φ), …` up to the repeat that ends the chain.
    pub chain_ranks: Vec<usize>,
    pub jordan: JordanCheck,
    /// Largest principal angle between `φ(C_φ)` and `C_φ`.
    pub image_angle: f64,
    pub image_rank: usize,
}

impl CoreChain {
    pub fn image_equal(&self, angle_tol: f64) -> bool {
        self.image_rank == self.c_phi.rank() && self.image_angle < angle_tol
    }
}

/// Iterates `W_{k+1} = φ(W_k)` from `W_0 = M_Φ` until the rank repeats.
pub fn multiplicative_core(
    phi: &MapDescriptor,
    defres: &DefiniteSetResult,
    tol: RankTol,
) -> Result<CoreChain> {
    let n = phi.dim();
    let limit = n * n + 1;
    let mut current = defres.m_stable.clone();
    let mut ranks = vec![current.rank()];
    loop {
        if ranks.len() > limit {
            return Err(Error::NonStabilization {
                what: "multiplicative core",
                limit,
                ranks,
            });
        }
        let next = image(phi, &current, tol)?;
        ranks.push(next.rank());
        if next.rank() == current.rank() {
            current = next;
            break;
        }
        current = next;
    }
    let img = image(phi, &current, tol)?;
    Ok(CoreChain {
        jordan: is_jordan_subalgebra(&current),
        image_angle: max_principal_angle(&img, &current)?,
        image_rank: img.rank(),
        c_phi: current,
        chain_ranks: ranks,
    })
}

/// `φ` restricted to its core, in the core's orthonormal basis.
#[derive(Clone, Debug)]
pub struct CoreAutomorphism {
    n: usize,
    basis: CMatrix,
    restricted: CMatrix,
    inverse: Option<CMatrix>,
    /// `max ‖φ(b_i∘b_j) − φ(b_i)∘φ(b_j)‖` over basis pairs.
    pub multiplicativity_residual: f64,
    /// `‖S Q − Q R‖`: how far `φ(C_φ)` leaves the core.
    pub invariance_residual: f64,
    pub min_singular_value: f64,
    pub condition_number: f64,
    /// Whether a faithful invariant state was found.
    pub hypothesis_met: bool,
}

impl CoreAutomorphism {
    pub fn restricted_matrix(&self) -> &CMatrix {
        &self.restricted
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    /// `φᵏ(x)` for `x` in the core, including negative `k`.
    pub fn power(&self, x: &Operator, k: i64) -> Result<Operator> {
        x.check_dim(self.n)?;
        let v = x.vec();
        let coeffs = self.basis.adjoint() * &v;
        let off = (&v - &self.basis * &coeffs).norm();
        if off > 1e-8 * v.norm().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "operator is not in the multiplicative core (distance {off:.3e})"
            )));
        }
        let step = if k >= 0 {
            &self.restricted
        } else {
            self.inverse.as_ref().ok_or_else(|| {
                Error::InvalidParameter("restriction to the core is not invertible".into())
            })?
        };
        let mut c = coeffs;
        for _ in 0..k.unsigned_abs() {
            c = step * c;
        }
        let out = &self.basis * c;
        Ok(Operator::from_vec_unchecked(self.n, out.as_slice()))
    }
}

pub fn core_automorphism(
    phi: &MapDescriptor,
    c_phi: &OperatorSubspace,
    states: &StateFamily,
) -> CoreAutomorphism {
    let n = phi.dim();
    let q = c_phi.basis_matrix();
    let sq = phi.superop() * q;
    let restricted = q.adjoint() * &sq;
    let invariance_residual = (&sq - q * &restricted).norm();
    let basis = c_phi.basis();
    let images: Vec<Operator> = basis.iter().map(|b| phi.apply_op(b)).collect();
    let mut mult: f64 = 0.0;
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let lhs = phi.apply_op(&jordan_product(&basis[i], &basis[j]));
            let rhs = jordan_product(&images[i], &images[j]);
            mult = mult.max((&lhs - &rhs).hs_norm());
        }
    }
    let sv = singular_values(&restricted);
    let (smax, smin) = match (sv.first(), sv.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (1.0, 1.0),
    };
    let inverse = if smin > 1e-12 * smax.max(1.0) {
        restricted.clone().try_inverse()
    } else {
        None
    };
    CoreAutomorphism {
        n,
        basis: q.clone(),
        restricted,
        inverse,
        multiplicativity_residual: mult,
        invariance_residual,
        min_singular_value: smin,
        condition_number: if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        },
        hypothesis_met: states.is_phi_finite(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceComparison {
    pub equal: bool,
    pub rank_core: usize,
    pub rank_peripheral: usize,
    pub max_angle: f64,
    /// The equality is only guaranteed under a faithful invariant state.
    pub hypothesis_met: bool,
}

pub fn compare_core_peripheral(
    c_phi: &OperatorSubspace,
    peripheral: &OperatorSubspace,
    states: &StateFamily,
    angle_tol: f64,
) -> Result<SubspaceComparison> {
    let max_angle = max_principal_angle(c_phi, peripheral)?;
    Ok(SubspaceComparison {
        equal: c_phi.rank() == peripheral.rank() && max_angle < angle_tol,
        rank_core: c_phi.rank(),
        rank_peripheral: peripheral.rank(),
        max_angle,
        hypothesis_met: states.is_phi_finite(),
    })
}

/// Trace-preserving conditional expectation onto `C_φ`: the HS-orthogonal
/// projection, which commutes with `φ` when `φ` preserves the trace.
#[derive(Clone, Debug)]
pub struct ConditionalExpectation {
    map: MapDescriptor,
    pub idempotence_residual: f64,
    pub unit_residual: f64,
    pub range_rank: usize,
    pub range_angle: f64,
    /// Frobenius norm of `Pφ − φP` on superoperators.
    pub commutation_residual: f64,
    pub positivity: PositivityEvidence,
}

impl ConditionalExpectation {
    pub const COMMUTATION_TOL: f64 = 1e-9;

    pub fn map(&self) -> &MapDescriptor {
        &self.map
    }

    pub fn apply(&self, x: &Operator) -> Operator {
        self.map.apply_op(x)
    }

    pub fn passes(&self, angle_tol: f64) -> bool {
        self.idempotence_residual < 1e-10
            && self.unit_residual < 1e-10
            && self.range_angle < angle_tol
            && self.commutation_residual < Self::COMMUTATION_TOL
            && self.positivity.passes()
    }
}

pub fn conditional_expectation(
    phi: &MapDescriptor,
    c_phi: &OperatorSubspace,
    samples: usize,
    seed: u64,
    tol: RankTol,
) -> Result<ConditionalExpectation> {
    if !phi.is_trace_preserving() || !phi.is_unital() {
        return Err(Error::HypothesisViolation(format!(
            "`{}` must be unital and trace-preserving for the tracial conditional expectation",
            phi.name()
        )));
    }
    let n = phi.dim();
    let p = c_phi.projector();
    let map = MapDescriptor::from_superop("conditional_expectation", n, p.clone())?;
    let idempotence_residual = (&p * &p - &p).norm();
    let one = Operator::identity(n);
    let unit_residual = (&map.apply_op(&one) - &one).hs_norm();
    let range = image(&map, &OperatorSubspace::full(n), tol)?;
    let range_angle = if range.rank() == c_phi.rank() {
        max_principal_angle(&range, c_phi)?
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let s = phi.superop();
    let commutation_residual = (&p * s - s * &p).norm();
    let mut rng = random::rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let x = random::density(&mut rng, n);
        worst = worst.min(map.apply_op(&x).min_hermitian_eigenvalue());
    }
    Ok(ConditionalExpectation {
        map,
        idempotence_residual,
        unit_residual,
        range_rank: range.rank(),
        range_angle,
        commutation_residual,
        positivity: PositivityEvidence {
            samples,
            worst_min_eig: worst,
        },
    })
}

/// Threefold comparison `E_P = C_P = P(M_n)` for a positive unital
/// idempotent `P`.
#[derive(Clone, Debug)]
pub struct ProjectionAnalysis {
    pub idempotence_residual: f64,
    /// Smallest eigenvalue of `P†(1)`; `P` is faithful iff this is positive.
    pub faithfulness_min_eig: f64,
    /// Smallest `‖P(ψψ†)‖_HS` over sampled pure states.
    pub sampled_min_output_norm: f64,
    pub range: OperatorSubspace,
    pub peripheral: OperatorSubspace,
    pub core: OperatorSubspace,
    pub angle_peripheral_core: f64,
    pub angle_core_range: f64,
    pub angle_peripheral_range: f64,
    pub threefold_equal: bool,
    pub range_jordan: JordanCheck,
}

impl ProjectionAnalysis {
    pub fn passes(&self) -> bool {
        self.threefold_equal && self.range_jordan.all()
    }
}

pub const IDEMPOTENCE_TOL: f64 = 1e-10;

/// Idempotence residual `‖S² − S‖` of a map's superoperator.
pub fn idempotence_residual<M: LinearMap + ?Sized>(p: &M) -> f64 {
    let s = p.superop();
    (s * s - s).norm()
}

pub fn projection_analysis(
    p: &MapDescriptor,
    config: &AnalysisConfig,
) -> Result<ProjectionAnalysis> {
    let n = p.dim();
    let tol = config.rank_tol();
    let idem = idempotence_residual(p);
    if idem >= IDEMPOTENCE_TOL {
        return Err(Error::HypothesisViolation(format!(
            "`{}` is not idempotent (‖P² − P‖ = {idem:.3e})",
            p.name()
        )));
    }
    defset::require_validated(p)?;
    let faithfulness_min_eig = p
        .adjoint()
        .apply_op(&Operator::identity(n))
        .min_hermitian_eigenvalue();
    if faithfulness_min_eig <= config.tol_faithful {
        return Err(Error::HypothesisViolation(format!(
            "`{}` is not faithful (min eigenvalue of P†(1) is {faithfulness_min_eig:.3e})",
            p.name()
        )));
    }
    let mut rng = random::rng(config.seed);
    let sampled_min_output_norm = (0..config.samples)
        .map(|_| p.apply_op(&random::pure_state(&mut rng, n)).hs_norm())
        .fold(f64::INFINITY, f64::min);

    let range = image(p, &OperatorSubspace::full(n), tol)?;
    let spectrum = Spectrum::of(p, config.tol_peripheral)?;
    let peripheral = peripheral_space(p, &spectrum, tol)?.space;
    let defres = defset::analyze(p, tol)?;
    let core = multiplicative_core(p, &defres, tol)?.c_phi;
    let angle = |a: &OperatorSubspace, b: &OperatorSubspace| -> Result<f64> {
        if a.rank() != b.rank() {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        max_principal_angle(a, b)
    };
    let angle_peripheral_core = angle(&peripheral, &core)?;
    let angle_core_range = angle(&core, &range)?;
    let angle_peripheral_range = angle(&peripheral, &range)?;
    let threefold_equal = same_subspace(&peripheral, &core, config.angle_tol)?
        && same_subspace(&core, &range, config.angle_tol)?
        && same_subspace(&peripheral, &range, config.angle_tol)?;
    Ok(ProjectionAnalysis {
        idempotence_residual: idem,
        faithfulness_min_eig,
        sampled_min_output_norm,
        range_jordan: is_jordan_subalgebra(&range),
        range,
        peripheral,
        core,
        angle_peripheral_core,
        angle_core_range,
        angle_peripheral_range,
        threefold_equal,
    })
}

/// Distance of `x` from a subspace, as a convenience for callers holding
/// only the core.
pub fn distance_to(u: &OperatorSubspace, x: &Operator) -> f64 {
    project(u, x).distance
}
