//! Named channels with known structure and seeded random generators.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linops::{CMatrix, Operator, C64, ONE};
use crate::posmap::{MapDescriptor, DEFAULT_POSITIVITY_SAMPLES};
use crate::random::{self, SeededRng};
use crate::registry::{Named, Params, Registry};

const UNITARY_TOL: f64 = 1e-10;

fn check_unitary(u: &CMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(Error::InvalidParameter("unitary must be square".into()));
    }
    let n = u.nrows();
    let resid = (u.adjoint() * u - CMatrix::identity(n, n)).norm();
    if resid > UNITARY_TOL {
        return Err(Error::InvalidParameter(format!(
            "matrix is not unitary (‖U†U − 1‖ = {resid:.3e})"
        )));
    }
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    if n > crate::MAX_DIM {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

pub fn identity(n: usize) -> Result<MapDescriptor> {
    check_dim(n)?;
    MapDescriptor::from_kraus("identity", vec![Operator::identity(n)])
}

/// `a ↦ U a U†`.
pub fn unitary_conjugation(u: CMatrix) -> Result<MapDescriptor> {
    check_dim(u.nrows())?;
    check_unitary(&u)?;
    MapDescriptor::from_kraus("unitary_conjugation", vec![Operator::new(u)?])
}

pub fn diagonal_unitary(phases: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        phases.len(),
        phases.iter().map(|&t| C64::from_polar(1.0, t)),
    ))
}

/// Default phases `k·π√2` for [`unitary_conjugation`].
pub fn irrational_phases(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| k as f64 * std::f64::consts::PI * 2f64.sqrt())
        .collect()
}

pub fn transpose(n: usize) -> Result<MapDescriptor> {
    check_dim(n)?;
    Ok(MapDescriptor::from_fn("transpose", n, Operator::transpose))
}

fn block_projections(blocks: &[usize]) -> Result<Vec<Operator>> {
    if blocks.is_empty() || blocks.contains(&0) {
        return Err(Error::InvalidParameter(
            "blocks must be a non-empty list of positive sizes".into(),
        ));
    }
    let n: usize = blocks.iter().sum();
    check_dim(n)?;
    let mut start = 0;
    let mut out = Vec::new();
    for &b in blocks {
        let mut p = CMatrix::zeros(n, n);
        for i in start..start + b {
            p[(i, i)] = ONE;
        }
        start += b;
        out.push(Operator::new(p)?);
    }
    Ok(out)
}

/// Compression onto block-diagonal matrices with the given block sizes.
pub fn pinching(blocks: &[usize]) -> Result<MapDescriptor> {
    MapDescriptor::from_kraus("pinching", block_projections(blocks)?)
}

/// `a ↦ λa + (1 − λ)·tr(a)/n·1`.
pub fn depolarizing(n: usize, lambda: f64) -> Result<MapDescriptor> {
    check_dim(n)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing parameter must lie in [0, 1], got {lambda}"
        )));
    }
    let id = Operator::identity(n);
    Ok(MapDescriptor::from_fn("depolarizing", n, move |x| {
        &(x * lambda) + &(&id * (x.trace() * ((1.0 - lambda) / n as f64)))
    }))
}

/// Entrywise product `a ↦ C ∘ a` with a correlation matrix `C`.
pub fn schur(c: CMatrix) -> Result<MapDescriptor> {
    let n = c.nrows();
    check_dim(n)?;
    if !c.is_square() || (&c - c.adjoint()).norm() > 1e-12 {
        return Err(Error::InvalidParameter(
            "Schur matrix must be Hermitian".into(),
        ));
    }
    if (0..n).any(|i| (c[(i, i)] - ONE).norm() > 1e-12) {
        return Err(Error::InvalidParameter(
            "Schur matrix must have unit diagonal".into(),
        ));
    }
    let min = Operator::new(c.clone())?.min_hermitian_eigenvalue();
    if min < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "Schur matrix is not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(MapDescriptor::from_fn("schur", n, move |x| {
        Operator::from_matrix_unchecked(x.matrix().component_mul(&c))
    }))
}

/// `(1 − γ)·1 + γ·J` with `J` the all-ones matrix.
pub fn uniform_correlation(n: usize, gamma: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i == j { ONE } else { C64::new(gamma, 0.0) })
}

/// `a ↦ Σ w_k U_k a U_k†`.
pub fn mixed_unitary(weights: &[f64], unitaries: &[CMatrix]) -> Result<MapDescriptor> {
    if weights.len() != unitaries.len() || weights.is_empty() {
        return Err(Error::InvalidParameter(
            "mixed_unitary needs one weight per unitary".into(),
        ));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0)
        || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12
    {
        return Err(Error::InvalidParameter(
            "weights must be non-negative and sum to 1".into(),
        ));
    }
    let n = unitaries[0].nrows();
    check_dim(n)?;
    let mut kraus = Vec::with_capacity(weights.len());
    for (w, u) in weights.iter().zip(unitaries) {
        check_unitary(u)?;
        if u.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows(),
            });
        }
        kraus.push(Operator::new(u * C64::new(w.sqrt(), 0.0))?);
    }
    MapDescriptor::from_kraus("mixed_unitary", kraus)
}

/// `a ↦ tr(a e11)·1`: unital and positive, but with no faithful invariant state.
pub fn trace_to_corner(n: usize) -> Result<MapDescriptor> {
    check_dim(n)?;
    let id = Operator::identity(n);
    Ok(MapDescriptor::from_fn("trace_to_corner", n, move |x| {
        &id * x.matrix()[(0, 0)]
    }))
}

/// `a ↦ (a + aᵀ)/2`.
pub fn symmetrizer(n: usize) -> Result<MapDescriptor> {
    check_dim(n)?;
    Ok(MapDescriptor::from_fn("symmetrizer", n, |x| {
        &(x + &x.transpose()) * 0.5
    }))
}

/// Composition with `parts[0]` applied first.
pub fn composed(parts: &[MapDescriptor]) -> Result<MapDescriptor> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("composed needs at least one part".into()))?;
    let mut acc = first.clone();
    for p in rest {
        acc = MapDescriptor::compose(p, &acc)?;
    }
    let names: Vec<&str> = parts.iter().map(|p| p.name()).collect();
    Ok(acc.with_name(format!("composed({})", names.join(" then "))))
}

/// Catalog ground truth. `None` means the value depends on parameters in a
/// way the catalog does not predict.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expected {
    pub m_phi_rank: Option<usize>,
    pub core_rank: Option<usize>,
    /// Peripheral eigenvalues with multiplicity, in any order.
    pub peripheral: Option<Vec<C64>>,
    pub phi_finite: Option<bool>,
    pub trace_preserving: Option<bool>,
    pub cp: Option<bool>,
}

impl Expected {
    fn full(n: usize, cp: bool) -> Self {
        Expected {
            m_phi_rank: Some(n * n),
            core_rank: Some(n * n),
            peripheral: None,
            phi_finite: Some(true),
            trace_preserving: Some(true),
            cp: Some(cp),
        }
    }
}

/// A validated catalog channel together with its ground truth.
#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub family: &'static str,
    pub params: Params,
    pub map: MapDescriptor,
    pub expected: Expected,
}

pub trait ChannelFamily: Named + Send + Sync {
    /// Accepted parameter keys.
    fn params(&self) -> &'static [&'static str];
    fn build(&self, n: usize, params: &Params) -> Result<MapDescriptor>;
    fn expected(&self, n: usize, params: &Params) -> Result<Expected>;
}

macro_rules! family {
    ($ty:ident, $name:literal, $summary:literal, [$($p:literal),*]) => {
        pub struct $ty;
        impl Named for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn summary(&self) -> &'static str {
                $summary
            }
        }
        impl $ty {
            const PARAMS: &'static [&'static str] = &[$($p),*];
        }
    };
}

family!(Identity, "identity", "a ↦ a", []);
family!(
    UnitaryConjugation,
    "unitary_conjugation",
    "a ↦ U a U†; diagonal U from phases=θ1,..,θn (default k·π√2) or Haar U from seed=",
    ["phases", "seed"]
);
family!(
    Transpose,
    "transpose",
    "a ↦ aᵀ (positive, not completely positive)",
    []
);
family!(
    Pinching,
    "pinching",
    "compression to block-diagonal matrices; blocks=b1,..,bk summing to n (default all 1)",
    ["blocks"]
);
family!(
    Depolarizing,
    "depolarizing",
    "a ↦ λa + (1−λ)tr(a)/n·1; lambda= in [0,1] (default 0.5)",
    ["lambda"]
);
family!(
    Schur,
    "schur",
    "a ↦ C∘a with C = (1−γ)1 + γJ; gamma= in [−1/(n−1), 1] (default 0.5)",
    ["gamma"]
);
family!(
    MixedUnitary,
    "mixed_unitary",
    "a ↦ Σ w_k U_k a U_k† with Haar U_k; weights=w1,..,wm (default 0.5,0.5), seed=",
    ["weights", "seed"]
);
family!(
    TraceToCorner,
    "trace_to_corner",
    "a ↦ tr(a e11)·1 (no faithful invariant state)",
    []
);
family!(
    Symmetrizer,
    "symmetrizer",
    "a ↦ (a + aᵀ)/2 (idempotent)",
    []
);
family!(
    Composed,
    "composed",
    "parts=name[:k=v]..+name[:k=v].. applied left to right",
    ["parts"]
);

impl ChannelFamily for Identity {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, _: &Params) -> Result<MapDescriptor> {
        identity(n)
    }
    fn expected(&self, n: usize, _: &Params) -> Result<Expected> {
        Ok(Expected {
            peripheral: Some(vec![ONE; n * n]),
            ..Expected::full(n, true)
        })
    }
}

impl UnitaryConjugation {
    fn phases(n: usize, p: &Params) -> Result<Option<Vec<f64>>> {
        if p.raw("seed").is_some() {
            if p.raw("phases").is_some() {
                return Err(Error::InvalidParameter(
                    "give either phases or seed, not both".into(),
                ));
            }
            return Ok(None);
        }
        let phases = p
            .list::<f64>("phases")?
            .unwrap_or_else(|| irrational_phases(n));
        if phases.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} phases, got {}",
                phases.len()
            )));
        }
        Ok(Some(phases))
    }
}

impl ChannelFamily for UnitaryConjugation {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, p: &Params) -> Result<MapDescriptor> {
        check_dim(n)?;
        let u = match Self::phases(n, p)? {
            Some(ph) => diagonal_unitary(&ph),
            None => random::haar_unitary(&mut random::rng(p.get("seed")?.unwrap_or(0)), n),
        };
        unitary_conjugation(u)
    }
    fn expected(&self, n: usize, p: &Params) -> Result<Expected> {
        // (U x U†)_ij = u_i x_ij ū_j.
        let peripheral = Self::phases(n, p)?.map(|ph| {
            let mut v = Vec::with_capacity(n * n);
            for tj in &ph {
                for ti in &ph {
                    v.push(C64::from_polar(1.0, ti - tj));
                }
            }
            v
        });
        Ok(Expected {
            peripheral,
            ..Expected::full(n, true)
        })
    }
}

impl ChannelFamily for Transpose {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, _: &Params) -> Result<MapDescriptor> {
        transpose(n)
    }
    fn expected(&self, n: usize, _: &Params) -> Result<Expected> {
        let sym = n * (n + 1) / 2;
        let mut per = vec![ONE; sym];
        per.extend(std::iter::repeat_n(-ONE, n * n - sym));
        Ok(Expected {
            peripheral: Some(per),
            ..Expected::full(n, n == 1)
        })
    }
}

impl Pinching {
    fn blocks(n: usize, p: &Params) -> Result<Vec<usize>> {
        let blocks = p.list::<usize>("blocks")?.unwrap_or_else(|| vec![1; n]);
        if blocks.iter().sum::<usize>() != n {
            return Err(Error::InvalidParameter(format!(
                "block sizes {blocks:?} do not sum to {n}"
            )));
        }
        Ok(blocks)
    }
}

impl ChannelFamily for Pinching {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, p: &Params) -> Result<MapDescriptor> {
        pinching(&Self::blocks(n, p)?)
    }
    fn expected(&self, n: usize, p: &Params) -> Result<Expected> {
        let r: usize = Self::blocks(n, p)?.iter().map(|b| b * b).sum();
        Ok(Expected {
            m_phi_rank: Some(r),
            core_rank: Some(r),
            peripheral: Some(vec![ONE; r]),
            ..Expected::full(n, true)
        })
    }
}

fn lambda(p: &Params) -> Result<f64> {
    Ok(p.get("lambda")?.unwrap_or(0.5))
}

impl ChannelFamily for Depolarizing {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, p: &Params) -> Result<MapDescriptor> {
        depolarizing(n, lambda(p)?)
    }
    fn expected(&self, n: usize, p: &Params) -> Result<Expected> {
        let r = if lambda(p)? == 1.0 { n * n } else { 1 };
        Ok(Expected {
            m_phi_rank: Some(r),
            core_rank: Some(r),
            peripheral: Some(vec![ONE; r]),
            ..Expected::full(n, true)
        })
    }
}

impl Schur {
    fn matrix(n: usize, p: &Params) -> Result<CMatrix> {
        Ok(uniform_correlation(n, p.get("gamma")?.unwrap_or(0.5)))
    }
}

impl ChannelFamily for Schur {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, p: &Params) -> Result<MapDescriptor> {
        schur(Self::matrix(n, p)?)
    }
    fn expected(&self, n: usize, p: &Params) -> Result<Expected> {
        // The superoperator is diagonal with entries C_ij.
        let c = Self::matrix(n, p)?;
        let per: Vec<C64> = c
            .iter()
            .copied()
            .filter(|z| z.norm() > 1.0 - 1e-12)
            .collect();
        Ok(Expected {
            m_phi_rank: Some(per.len()),
            core_rank: Some(per.len()),
            peripheral: Some(per),
            ..Expected::full(n, true)
        })
    }
}

impl ChannelFamily for MixedUnitary {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, p: &Params) -> Result<MapDescriptor> {
        check_dim(n)?;
        let weights = p.list::<f64>("weights")?.unwrap_or_else(|| vec![0.5, 0.5]);
        let mut rng = random::rng(p.get("seed")?.unwrap_or(0));
        let us: Vec<CMatrix> = weights
            .iter()
            .map(|_| random::haar_unitary(&mut rng, n))
            .collect();
        mixed_unitary(&weights, &us)
    }
    fn expected(&self, n: usize, p: &Params) -> Result<Expected> {
        let weights = p.list::<f64>("weights")?.unwrap_or_else(|| vec![0.5, 0.5]);
        let single = weights.iter().filter(|&&w| w > 0.0).count() == 1;
        Ok(Expected {
            m_phi_rank: single.then_some(n * n),
            core_rank: single.then_some(n * n),
            ..Expected::full(n, true)
        })
    }
}

impl ChannelFamily for TraceToCorner {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, _: &Params) -> Result<MapDescriptor> {
        trace_to_corner(n)
    }
    fn expected(&self, n: usize, _: &Params) -> Result<Expected> {
        Ok(Expected {
            m_phi_rank: Some(1 + (n - 1) * (n - 1)),
            core_rank: Some(1),
            peripheral: Some(vec![ONE]),
            phi_finite: Some(n == 1),
            trace_preserving: Some(n == 1),
            cp: Some(true),
        })
    }
}

impl ChannelFamily for Symmetrizer {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, _: &Params) -> Result<MapDescriptor> {
        symmetrizer(n)
    }
    fn expected(&self, n: usize, _: &Params) -> Result<Expected> {
        let r = n * (n + 1) / 2;
        Ok(Expected {
            m_phi_rank: Some(r),
            core_rank: Some(r),
            peripheral: Some(vec![ONE; r]),
            ..Expected::full(n, n == 1)
        })
    }
}

impl Composed {
    fn parts(p: &Params) -> Result<Vec<(String, Params)>> {
        let text = p
            .raw("parts")
            .ok_or_else(|| Error::InvalidParameter("composed needs parts=".into()))?;
        text.split('+')
            .map(|part| {
                let mut it = part.split(':');
                let name = it.next().unwrap_or_default().trim().to_string();
                let kv: Vec<&str> = it.collect();
                Ok((name, Params::parse(&kv)?))
            })
            .collect()
    }
}

impl ChannelFamily for Composed {
    fn params(&self) -> &'static [&'static str] {
        Self::PARAMS
    }
    fn build(&self, n: usize, p: &Params) -> Result<MapDescriptor> {
        let reg = families();
        let maps = Self::parts(p)?
            .into_iter()
            .map(|(name, params)| {
                if name == "composed" {
                    return Err(Error::InvalidParameter("composed parts cannot nest".into()));
                }
                let f = reg.get(&name)?;
                params.restrict(f.params())?;
                f.build(n, &params)
            })
            .collect::<Result<Vec<_>>>()?;
        composed(&maps)
    }
    fn expected(&self, n: usize, p: &Params) -> Result<Expected> {
        let reg = families();
        let mut all_tp = true;
        for (name, params) in Self::parts(p)? {
            all_tp &= reg.get(&name)?.expected(n, &params)?.trace_preserving == Some(true);
        }
        Ok(Expected {
            trace_preserving: all_tp.then_some(true),
            ..Expected::default()
        })
    }
}

/// Every catalog family.
pub fn families() -> Registry<dyn ChannelFamily> {
    Registry::<dyn ChannelFamily>::new("zoo entry")
        .with(Box::new(Identity))
        .with(Box::new(UnitaryConjugation))
        .with(Box::new(Transpose))
        .with(Box::new(Pinching))
        .with(Box::new(Depolarizing))
        .with(Box::new(Schur))
        .with(Box::new(MixedUnitary))
        .with(Box::new(TraceToCorner))
        .with(Box::new(Symmetrizer))
        .with(Box::new(Composed))
}

/// Builds, validates and checks a catalog entry against its expected flags.
pub fn make(name: &str, n: usize, params: &Params) -> Result<ZooEntry> {
    let reg = families();
    let family = reg.get(name)?;
    params.restrict(family.params())?;
    let expected = family.expected(n, params)?;
    let (map, report) = family
        .build(n, params)?
        .validated(DEFAULT_POSITIVITY_SAMPLES, 0);
    report.require_positive_unital()?;
    let flag_mismatch = |what: &str, want: Option<bool>, got: bool| match want {
        Some(w) if w != got => Err(Error::InvalidParameter(format!(
            "{name}: expected {what} = {w}, validation found {got}"
        ))),
        _ => Ok(()),
    };
    flag_mismatch(
        "trace_preserving",
        expected.trace_preserving,
        report.trace_preserving(),
    )?;
    flag_mismatch("cp", expected.cp, report.cp())?;
    Ok(ZooEntry {
        family: family.name(),
        params: params.clone(),
        map,
        expected,
    })
}

/// Seeded generator of random positive unital maps.
pub trait RandomKind: Named + Send + Sync {
    fn generate(&self, n: usize, seed: u64) -> Result<MapDescriptor>;
    fn trace_preserving(&self) -> bool;
}

macro_rules! kind {
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

kind!(
    RandomMixedUnitary,
    "mixed_unitary",
    "Σ w_k U_k a U_k†: generic Haar, commuting, block-diagonal or single unitary"
);
kind!(
    PinchThenUnitary,
    "pinch_then_unitary",
    "U·E(a)·U† with a random block pinching E and U Haar or phased permutation"
);
kind!(
    PositiveNonCp,
    "positive_noncp",
    "random mixed unitary channel followed by the transpose"
);
kind!(
    ConvexWithDepolarizing,
    "convex_with_depolarizing",
    "½·ψ + ½·depolarizing(λ) with λ ≤ 0.9 and ψ drawn from the other generators"
);
kind!(
    DualChannel,
    "dual_channel",
    "Heisenberg dual of a random channel; sometimes compresses to a subspace, leaving no faithful invariant state"
);

fn weights(rng: &mut SeededRng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn random_blocks(rng: &mut SeededRng, n: usize) -> Vec<usize> {
    if n == 1 {
        return vec![1];
    }
    let count = rng.random_range(2..=n);
    let mut blocks = vec![1; count];
    for _ in count..n {
        let i = rng.random_range(0..count);
        blocks[i] += 1;
    }
    blocks
}

fn conjugate(v: &CMatrix, d: &CMatrix) -> CMatrix {
    v * d * v.adjoint()
}

fn random_phases(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

fn block_haar(rng: &mut SeededRng, blocks: &[usize]) -> CMatrix {
    let n: usize = blocks.iter().sum();
    let mut u = CMatrix::zeros(n, n);
    let mut at = 0;
    for &b in blocks {
        let ub = random::haar_unitary(rng, b);
        u.view_mut((at, at), (b, b)).copy_from(&ub);
        at += b;
    }
    u
}

fn random_mixed_unitary(rng: &mut SeededRng, n: usize) -> Result<MapDescriptor> {
    let variant = rng.random_range(0..4);
    let m = rng.random_range(2..=3);
    let w = weights(rng, m);
    let us: Vec<CMatrix> = match variant {
        0 => (0..m).map(|_| random::haar_unitary(rng, n)).collect(),
        1 => {
            let v = random::haar_unitary(rng, n);
            (0..m)
                .map(|_| conjugate(&v, &diagonal_unitary(&random_phases(rng, n))))
                .collect()
        }
        2 => {
            let v = random::haar_unitary(rng, n);
            let blocks = random_blocks(rng, n);
            (0..m)
                .map(|_| conjugate(&v, &block_haar(rng, &blocks)))
                .collect()
        }
        _ => return mixed_unitary(&[1.0], &[random::haar_unitary(rng, n)]),
    };
    mixed_unitary(&w, &us)
}

fn phased_permutation(rng: &mut SeededRng, n: usize) -> CMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let phases = random_phases(rng, n);
    let mut u = CMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        u[(i, j)] = C64::from_polar(1.0, phases[j]);
    }
    u
}

fn random_pinch_then_unitary(rng: &mut SeededRng, n: usize) -> Result<MapDescriptor> {
    let pinch = pinching(&random_blocks(rng, n))?;
    let u = if rng.random_bool(0.5) {
        phased_permutation(rng, n)
    } else {
        random::haar_unitary(rng, n)
    };
    composed(&[pinch, unitary_conjugation(u)?])
}

/// Thin Haar-distributed isometry `rows × cols` (`rows ≥ cols`).
fn random_isometry(rng: &mut SeededRng, rows: usize, cols: usize) -> CMatrix {
    let g = DMatrix::from_fn(rows, cols, |_, _| random::complex_gaussian(rng));
    g.qr().q()
}

fn random_dual_channel(rng: &mut SeededRng, n: usize) -> Result<MapDescriptor> {
    let compress = n > 1 && rng.random_bool(0.5);
    let r = if compress { rng.random_range(1..n) } else { n };
    let m = n.div_ceil(r) + 1;
    let v = random_isometry(rng, r * m, n);
    let range = random::haar_unitary(rng, n).columns(0, r).into_owned();
    // Kraus operators K_i of a channel with Σ K_i†K_i = 1 and outputs in ran(range).
    let kraus: Vec<Operator> = (0..m)
        .map(|i| {
            let k = &range * v.rows(i * r, r);
            Operator::new(k.adjoint())
        })
        .collect::<Result<_>>()?;
    MapDescriptor::from_kraus("dual_channel", kraus)
}

impl RandomKind for RandomMixedUnitary {
    fn generate(&self, n: usize, seed: u64) -> Result<MapDescriptor> {
        check_dim(n)?;
        Ok(random_mixed_unitary(&mut random::rng(seed), n)?.with_name(self.name()))
    }
    fn trace_preserving(&self) -> bool {
        true
    }
}

impl RandomKind for PinchThenUnitary {
    fn generate(&self, n: usize, seed: u64) -> Result<MapDescriptor> {
        check_dim(n)?;
        Ok(random_pinch_then_unitary(&mut random::rng(seed), n)?.with_name(self.name()))
    }
    fn trace_preserving(&self) -> bool {
        true
    }
}

impl RandomKind for PositiveNonCp {
    fn generate(&self, n: usize, seed: u64) -> Result<MapDescriptor> {
        check_dim(n)?;
        let inner = random_mixed_unitary(&mut random::rng(seed), n)?;
        Ok(composed(&[inner, transpose(n)?])?.with_name(self.name()))
    }
    fn trace_preserving(&self) -> bool {
        true
    }
}

impl RandomKind for ConvexWithDepolarizing {
    fn generate(&self, n: usize, seed: u64) -> Result<MapDescriptor> {
        check_dim(n)?;
        let mut rng = random::rng(seed);
        let psi = match rng.random_range(0..3) {
            0 => random_mixed_unitary(&mut rng, n)?,
            1 => random_pinch_then_unitary(&mut rng, n)?,
            _ => random_dual_channel(&mut rng, n)?,
        };
        let lam = rng.random_range(0.0..=0.9);
        let dep = depolarizing(n, lam)?;
        MapDescriptor::convex(self.name(), &[(0.5, &psi), (0.5, &dep)])
    }
    fn trace_preserving(&self) -> bool {
        false
    }
}

impl RandomKind for DualChannel {
    fn generate(&self, n: usize, seed: u64) -> Result<MapDescriptor> {
        check_dim(n)?;
        random_dual_channel(&mut random::rng(seed), n)
    }
    fn trace_preserving(&self) -> bool {
        false
    }
}

/// Every random generator; [`DEFAULT_KINDS`] lists those fuzzed by default.
pub fn random_kinds() -> Registry<dyn RandomKind> {
    Registry::<dyn RandomKind>::new("random kind")
        .with(Box::new(RandomMixedUnitary))
        .with(Box::new(PinchThenUnitary))
        .with(Box::new(PositiveNonCp))
        .with(Box::new(ConvexWithDepolarizing))
        .with(Box::new(DualChannel))
}

pub const DEFAULT_KINDS: &[&str] = &[
    "mixed_unitary",
    "pinch_then_unitary",
    "positive_noncp",
    "convex_with_depolarizing",
];

/// Draws from a registered kind and validates the result.
pub fn random_channel(kind: &str, n: usize, seed: u64) -> Result<MapDescriptor> {
    let reg = random_kinds();
    let k = reg.get(kind)?;
    let (map, report) = k
        .generate(n, seed)?
        .validated(DEFAULT_POSITIVITY_SAMPLES, seed);
    report.require_positive_unital()?;
    Ok(map)
}
