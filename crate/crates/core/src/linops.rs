//! Dense complex linear algebra over `M_n`, viewed as the `n²`-dimensional
//! Hilbert space with inner product `⟨x, y⟩ = tr(x† y)`.
//!
//! Operators are vectorized by stacking columns: entry `(i, j)` of an `n × n`
//! matrix lands at index `j * n + i`. This coincides with nalgebra's
//! column-major storage, so `vec` and `unvec` are plain copies.
//!
//! Subspaces are kept as orthonormal bases (an `n² × r` matrix whose columns
//! are vectorized operators). Every rank decision goes through a singular
//! value decomposition.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default angle threshold under which two subspaces are considered equal.
pub const SUBSPACE_ANGLE_TOL: f64 = 1e-8;

/// An element of `M_n`.
#[derive(Clone, PartialEq)]
pub struct Operator(CMatrix);

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator{}", self.0)
    }
}

impl Operator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidOperator(format!(
                "matrix is not square: {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidOperator(
                "dimension must be at least 1".into(),
            ));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidOperator("non-finite entry".into()));
        }
        Ok(Operator(matrix))
    }

    /// Wraps a matrix already known to be square and finite.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Operator(matrix)
    }

    /// Builds an operator from real-valued rows; handy for small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidOperator("ragged rows".into()));
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = C64::new(x, 0.0);
            }
        }
        Operator::new(m)
    }

    pub fn zeros(n: usize) -> Self {
        Operator(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Operator(CMatrix::identity(n, n))
    }

    /// Matrix unit `e_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        Operator(m)
    }

    pub fn sigma_x() -> Self {
        Operator(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn sigma_y() -> Self {
        Operator(CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn sigma_z() -> Self {
        Operator(CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]))
    }

    /// Rebuilds an operator from its column-stacked vectorization.
    pub fn from_vec(n: usize, v: &[C64]) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: v.len(),
            });
        }
        Operator::new(CMatrix::from_column_slice(n, n, v))
    }

    pub(crate) fn from_vec_unchecked(n: usize, v: &[C64]) -> Self {
        Operator(CMatrix::from_column_slice(n, n, v))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn vec(&self) -> CVector {
        CVector::from_column_slice(self.0.as_slice())
    }

    pub fn adjoint(&self) -> Self {
        Operator(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Operator(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `tr(self† · other)`.
    pub fn hs_inner(&self, other: &Operator) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_part(&self) -> Self {
        Operator((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Deviation from self-adjointness, `‖x − x†‖_HS`.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part().0;
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::NAN)
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator(&self.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        Operator(&self.0 * rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator(&self.0 * C64::new(rhs, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-&self.0)
    }
}

/// Anything that acts linearly on `M_n` through an `n² × n²` matrix.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn superop(&self) -> &CMatrix;

    fn apply_op(&self, x: &Operator) -> Operator {
        let v = self.superop() * x.vec();
        Operator::from_vec_unchecked(self.dim(), v.as_slice())
    }
}

/// Relative singular-value threshold for numerical rank decisions.
///
/// A singular value counts as nonzero when it exceeds `rel · max(σ_max, scale)`,
/// where `scale` is the natural magnitude of the problem (operator norm of
/// the map involved, 1 for projector stacks, 0 for raw spanning sets).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTol {
    pub rel: f64,
}

impl RankTol {
    pub const DEFAULT_REL: f64 = 1e-10;

    pub fn new(rel: f64) -> Self {
        RankTol { rel }
    }

    fn threshold(&self, sigma_max: f64, scale: f64) -> f64 {
        self.rel * sigma_max.max(scale)
    }
}

impl Default for RankTol {
    fn default() -> Self {
        RankTol {
            rel: Self::DEFAULT_REL,
        }
    }
}

/// Thin SVD with singular values sorted in descending order.
pub(crate) struct SortedSvd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub(crate) fn sorted_svd(a: &CMatrix) -> SortedSvd {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v = svd.v_t.expect("right singular vectors requested").adjoint();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = CMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    SortedSvd { u, sigma, v }
}

/// Singular values, descending.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Right singular vectors spanning the numerical null space of `a`.
///
/// Wide matrices are padded with zero rows so the thin SVD yields a full
/// set of right singular vectors.
pub(crate) fn null_space(a: &CMatrix, tol: RankTol, scale: f64) -> CMatrix {
    let (m, k) = a.shape();
    if k == 0 {
        return CMatrix::zeros(0, 0);
    }
    let padded;
    let a = if m < k {
        padded = a.clone().resize_vertically(k, ZERO);
        &padded
    } else {
        a
    };
    let svd = sorted_svd(a);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    let thr = tol.threshold(sigma_max, scale);
    let cols: Vec<usize> = (0..k).filter(|&i| svd.sigma[i] <= thr).collect();
    CMatrix::from_fn(k, cols.len(), |r, c| svd.v[(r, cols[c])])
}

/// The `count` right singular vectors of `a` with the smallest singular values,
/// together with the largest of those singular values.
pub(crate) fn smallest_right_singular(a: &CMatrix, count: usize) -> (CMatrix, f64) {
    let (m, k) = a.shape();
    let padded;
    let a = if m < k {
        padded = a.clone().resize_vertically(k, ZERO);
        &padded
    } else {
        a
    };
    let svd = sorted_svd(a);
    let start = k - count.min(k);
    let worst = if count == 0 { 0.0 } else { svd.sigma[start] };
    let basis = CMatrix::from_fn(k, k - start, |r, c| svd.v[(r, start + c)]);
    (basis, worst)
}

/// A complex-linear subspace of `M_n` held as an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSubspace {
    n: usize,
    basis: CMatrix,
}

impl OperatorSubspace {
    pub fn zero(n: usize) -> Self {
        OperatorSubspace {
            n,
            basis: CMatrix::zeros(n * n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        OperatorSubspace {
            n,
            basis: CMatrix::identity(n * n, n * n),
        }
    }

    /// Wraps columns that are already HS-orthonormal.
    pub(crate) fn from_orthonormal_columns(n: usize, basis: CMatrix) -> Self {
        debug_assert_eq!(basis.nrows(), n * n);
        OperatorSubspace { n, basis }
    }

    /// Orthonormal span of the columns of `cols` (vectorized operators).
    pub fn span_of_columns(n: usize, cols: &CMatrix, tol: RankTol, scale: f64) -> Self {
        if cols.ncols() == 0 {
            return OperatorSubspace::zero(n);
        }
        if cols.ncols() <= cols.nrows() && is_orthonormal(cols, 1e-13) {
            return OperatorSubspace {
                n,
                basis: cols.clone(),
            };
        }
        let svd = sorted_svd(cols);
        let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
        let thr = tol.threshold(sigma_max, scale);
        let r = svd.sigma.iter().filter(|&&s| s > thr).count();
        OperatorSubspace {
            n,
            basis: svd.u.columns(0, r).into_owned(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// The `n² × r` matrix of orthonormal basis columns.
    pub fn basis_matrix(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis(&self) -> Vec<Operator> {
        self.basis
            .column_iter()
            .map(|c| Operator::from_vec_unchecked(self.n, c.as_slice()))
            .collect()
    }

    /// Orthogonal projector onto the subspace as an `n² × n²` matrix.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn complement_projector(&self) -> CMatrix {
        let nn = self.n * self.n;
        CMatrix::identity(nn, nn) - self.projector()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self, tol: RankTol) -> Self {
        if self.rank() == 0 {
            return OperatorSubspace::full(self.n);
        }
        let ns = null_space(&self.basis.adjoint(), tol, 1.0);
        OperatorSubspace::from_orthonormal_columns(self.n, ns)
    }

    pub fn adjoint_closed_residual(&self) -> f64 {
        self.basis()
            .iter()
            .map(|b| project(self, &b.adjoint()).distance)
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

fn is_orthonormal(cols: &CMatrix, tol: f64) -> bool {
    let g = cols.adjoint() * cols;
    let k = g.nrows();
    (0..k).all(|i| (0..k).all(|j| (g[(i, j)] - if i == j { ONE } else { ZERO }).norm() <= tol))
}

fn stack_columns(n: usize, vectors: &[Operator]) -> Result<CMatrix> {
    for v in vectors {
        v.check_dim(n)?;
    }
    let mut cols = CMatrix::zeros(n * n, vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        cols.column_mut(c).copy_from_slice(v.matrix().as_slice());
    }
    Ok(cols)
}

/// HS-orthonormal basis spanning `vectors`. An empty input gives the zero
/// subspace of `M_n`.
pub fn orthonormalize(n: usize, vectors: &[Operator], tol: RankTol) -> Result<OperatorSubspace> {
    let cols = stack_columns(n, vectors)?;
    Ok(OperatorSubspace::span_of_columns(n, &cols, tol, 0.0))
}

/// `U ∩ V`, as the null space of the stacked complement projectors.
pub fn intersect(
    u: &OperatorSubspace,
    v: &OperatorSubspace,
    tol: RankTol,
) -> Result<OperatorSubspace> {
    u.check_same(v)?;
    let n = u.n;
    if u.rank() == 0 || v.rank() == 0 {
        return Ok(OperatorSubspace::zero(n));
    }
    let stacked = {
        let a = u.complement_projector();
        let b = v.complement_projector();
        let nn = n * n;
        let mut s = CMatrix::zeros(2 * nn, nn);
        s.rows_mut(0, nn).copy_from(&a);
        s.rows_mut(nn, nn).copy_from(&b);
        s
    };
    let ns = null_space(&stacked, tol, 1.0);
    Ok(OperatorSubspace::from_orthonormal_columns(n, ns))
}

fn map_norm<L: LinearMap + ?Sized>(map: &L) -> f64 {
    singular_values(map.superop())
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// Orthonormalized span of `{L(b) : b ∈ U}`.
pub fn image<L: LinearMap + ?Sized>(
    map: &L,
    u: &OperatorSubspace,
    tol: RankTol,
) -> Result<OperatorSubspace> {
    if map.dim() != u.n {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: u.n,
        });
    }
    let imgs = map.superop() * &u.basis;
    Ok(OperatorSubspace::span_of_columns(
        u.n,
        &imgs,
        tol,
        map_norm(map),
    ))
}

/// `{x : L(x) ∈ U}`, the null space of `P_{U⊥} ∘ L`.
pub fn preimage<L: LinearMap + ?Sized>(
    map: &L,
    u: &OperatorSubspace,
    tol: RankTol,
) -> Result<OperatorSubspace> {
    if map.dim() != u.n {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: u.n,
        });
    }
    let a = u.complement_projector() * map.superop();
    let ns = null_space(&a, tol, map_norm(map));
    Ok(OperatorSubspace::from_orthonormal_columns(u.n, ns))
}

/// Principal angles between `U` and `V`, ascending; there are
/// `min(rank U, rank V)` of them.
///
/// Small angles come from sines and large ones from cosines so that both
/// ends of the range keep full precision.
pub fn principal_angles(u: &OperatorSubspace, v: &OperatorSubspace) -> Result<Vec<f64>> {
    u.check_same(v)?;
    let (small, large) = if u.rank() <= v.rank() { (u, v) } else { (v, u) };
    let k = small.rank();
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut cosines = singular_values(&(large.basis.adjoint() * &small.basis));
    cosines.truncate(k);
    cosines.resize(k, 0.0);
    let resid = &small.basis - &large.basis * (large.basis.adjoint() * &small.basis);
    let mut sines = singular_values(&resid);
    sines.truncate(k);
    sines.resize(k, 0.0);
    sines.reverse();
    let angles = (0..k)
        .map(|i| {
            let s = sines[i].clamp(0.0, 1.0);
            if s < std::f64::consts::FRAC_1_SQRT_2 {
                s.asin()
            } else {
                cosines[i].clamp(0.0, 1.0).acos()
            }
        })
        .collect();
    Ok(angles)
}

/// Largest principal angle, or 0 for an empty pair.
pub fn max_principal_angle(u: &OperatorSubspace, v: &OperatorSubspace) -> Result<f64> {
    Ok(principal_angles(u, v)?.into_iter().fold(0.0, f64::max))
}

/// Equal iff ranks match and the largest principal angle is below `angle_tol`.
pub fn same_subspace(u: &OperatorSubspace, v: &OperatorSubspace, angle_tol: f64) -> Result<bool> {
    Ok(u.rank() == v.rank() && max_principal_angle(u, v)? < angle_tol)
}

/// Largest distance of a unit vector of `inner` from `outer`; zero iff
/// `inner ⊆ outer`.
pub fn containment_residual(inner: &OperatorSubspace, outer: &OperatorSubspace) -> Result<f64> {
    inner.check_same(outer)?;
    if inner.rank() == 0 {
        return Ok(0.0);
    }
    let resid = &inner.basis - &outer.basis * (outer.basis.adjoint() * &inner.basis);
    Ok(singular_values(&resid).first().copied().unwrap_or(0.0))
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub component: Operator,
    pub distance: f64,
}

/// HS-orthogonal projection of `x` onto `U`.
pub fn project(u: &OperatorSubspace, x: &Operator) -> Projection {
    let v = x.vec();
    let comp = &u.basis * (u.basis.adjoint() * &v);
    let resid = &v - &comp;
    Projection {
        component: Operator::from_vec_unchecked(u.n, comp.as_slice()),
        distance: resid.norm(),
    }
}
