//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Quantities are recomputed here from `φ.apply_op` and plain matrix algebra
//! wherever that is practical, instead of reading the library's own verdicts.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use mcore::analysis::{analyze, Analysis};
use mcore::asymptotics::{orthogonality_test, project_to_orthogonal, Horizon};
use mcore::config::AnalysisConfig;
use mcore::fuzz::Campaign;
use mcore::linops::{project, CMatrix, LinearMap, Operator, OperatorSubspace, C64};
use mcore::posmap::MapDescriptor;
use mcore::random::{self, sub_seed};
use mcore::registry::Params;
use mcore::zoo::{self, random_channel, DEFAULT_KINDS};
use tempfile::TempDir;

const FUZZ_SEED: u64 = 42;
const FUZZ_COUNT: usize = 200;
const DECAY: f64 = 1e-6;

struct Verdict {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

struct Fuzzed {
    label: String,
    phi: MapDescriptor,
    an: Analysis,
}

fn config() -> AnalysisConfig {
    AnalysisConfig {
        seed: FUZZ_SEED,
        ..Default::default()
    }
}

fn half() -> C64 {
    C64::new(0.5, 0.0)
}

fn jordan(x: &CMatrix, y: &CMatrix) -> CMatrix {
    (x * y + y * x) * half()
}

fn op(m: CMatrix) -> Operator {
    Operator::new(m).unwrap()
}

/// `φ(a∘a†) − φ(a)∘φ(a)†`, Hermitian-symmetrized against round-off.
fn defect(phi: &MapDescriptor, a: &Operator) -> CMatrix {
    let m = a.matrix();
    let lhs = phi.apply_op(&op(jordan(m, &m.adjoint())));
    let pa = phi.apply_op(a);
    let pm = pa.matrix();
    let d = lhs.matrix() - jordan(pm, &pm.adjoint());
    (&d + d.adjoint()) * half()
}

fn min_eig(h: &CMatrix) -> f64 {
    h.clone().symmetric_eigenvalues().min()
}

/// `sin` of the largest principal angle between equal-rank subspaces.
fn max_angle(u: &OperatorSubspace, v: &OperatorSubspace) -> f64 {
    if u.rank() == 0 && v.rank() == 0 {
        return 0.0;
    }
    let q = v.basis_matrix();
    let r = q - u.projector() * q;
    r.singular_values().max().min(1.0).asin()
}

fn random_in<R: rand::Rng>(rng: &mut R, u: &OperatorSubspace) -> Operator {
    let n = u.ambient_dim();
    let mut a = Operator::zeros(n);
    for b in u.basis() {
        a = &a + &(&b * random::complex_gaussian(rng));
    }
    let s = a.hs_norm();
    &a * (1.0 / s)
}

fn unit(x: &Operator) -> Operator {
    x * (1.0 / x.hs_norm())
}

fn power(phi: &MapDescriptor, a: &Operator, k: usize) -> Operator {
    (0..k).fold(a.clone(), |x, _| phi.apply_op(&x))
}

fn expect(rho: &Operator, x: &CMatrix) -> f64 {
    (rho.matrix() * x).trace().re
}

fn same_multiset(found: &[C64], expected: &[C64], tol: f64) -> bool {
    if found.len() != expected.len() {
        return false;
    }
    let mut used = vec![false; expected.len()];
    found.iter().all(|z| {
        match expected
            .iter()
            .enumerate()
            .position(|(i, w)| !used[i] && (z - w).norm() < tol)
        {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

fn ranks(an: &Analysis) -> (usize, usize, usize) {
    (
        an.definite.m_phi.rank(),
        an.core.c_phi.rank(),
        an.peripheral.space.rank(),
    )
}

fn fuzz_set() -> (Vec<Fuzzed>, Vec<String>, f64) {
    let campaign = Campaign {
        count: FUZZ_COUNT,
        dims: vec![2, 3, 4],
        kinds: DEFAULT_KINDS.iter().map(|s| s.to_string()).collect(),
        seed: FUZZ_SEED,
    };
    let cfg = config();
    let start = Instant::now();
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for i in 0..FUZZ_COUNT {
        let (kind, n, seed) = campaign.instance(i);
        let label = format!("#{i} {kind} n={n}");
        match random_channel(&kind, n, seed).and_then(|phi| analyze(phi, &cfg)) {
            Ok((phi, an)) => out.push(Fuzzed { label, phi, an }),
            Err(e) => errors.push(format!("{label}: {e}")),
        }
    }
    (out, errors, start.elapsed().as_secs_f64())
}

fn zoo_ground_truth() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let run = |name: &str, params: &[&str]| {
        let e = zoo::make(name, 2, &Params::parse(params).unwrap()).unwrap();
        analyze(e.map, &AnalysisConfig::default()).unwrap().1
    };
    let dep = run("depolarizing", &["lambda=0.5"]);
    if ranks(&dep) != (1, 1, 1) {
        bad.push(format!("depolarizing ranks {:?}", ranks(&dep)));
    }
    let pin = run("pinching", &[]);
    if ranks(&pin) != (2, 2, 2) {
        bad.push(format!("pinching ranks {:?}", ranks(&pin)));
    }
    let tr = run("transpose", &[]);
    let one = C64::new(1.0, 0.0);
    if ranks(&tr) != (4, 4, 4)
        || !same_multiset(&tr.peripheral.eigenvalues, &[one, one, one, -one], 1e-9)
    {
        bad.push(format!(
            "transpose ranks {:?} eigenvalues {:?}",
            ranks(&tr),
            tr.peripheral.eigenvalues
        ));
    }
    let ttc = run("trace_to_corner", &[]);
    if ranks(&ttc) != (2, 1, 1) || ttc.states.phi_finite != Some(false) {
        bad.push(format!(
            "trace_to_corner ranks {:?} phi_finite {:?}",
            ranks(&ttc),
            ttc.states.phi_finite
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();

    // Every catalog family against its own expectation table, n = 2 and 3.
    let mut checked = 0;
    for f in zoo::families().iter() {
        for n in [2, 3] {
            let params = if f.name() == "composed" {
                Params::new().set("parts", "pinching+depolarizing")
            } else {
                Params::new()
            };
            let e = match zoo::make(f.name(), n, &params) {
                Ok(e) => e,
                Err(err) => {
                    bad.push(format!("{} n={n}: {err}", f.name()));
                    continue;
                }
            };
            let x = e.expected.clone();
            let an = analyze(e.map, &AnalysisConfig::default()).unwrap().1;
            checked += 1;
            let ok = x.m_phi_rank.is_none_or(|r| r == an.definite.m_phi.rank())
                && x.core_rank.is_none_or(|r| r == an.core.c_phi.rank())
                && x.phi_finite.is_none_or(|p| Some(p) == an.states.phi_finite)
                && x.peripheral
                    .as_ref()
                    .is_none_or(|p| same_multiset(&an.peripheral.eigenvalues, p, 1e-9));
            if !ok {
                bad.push(format!("{} n={n}: ranks {:?}", f.name(), ranks(&an)));
            }
        }
    }
    Verdict {
        id: 1,
        title: "zoo ground truth",
        pass: bad.is_empty() && elapsed < 1.0,
        detail: format!(
            "4 named entries in {elapsed:.3}s (limit 1s), {checked} catalog entries checked{}",
            mismatch_note(&bad)
        ),
    }
}

fn mismatch_note(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; {} problems, first: {}", bad.len(), bad[0])
    }
}

fn core_equals_peripheral(set: &[Fuzzed], errors: &[String], secs: f64) -> Verdict {
    let mut finite = 0;
    let mut bad = errors.to_vec();
    let mut worst: f64 = 0.0;
    for f in set.iter().filter(|f| f.an.states.phi_finite == Some(true)) {
        finite += 1;
        let (c, e) = (&f.an.core.c_phi, &f.an.peripheral.space);
        if c.rank() != e.rank() {
            bad.push(format!("{}: rank {} vs {}", f.label, c.rank(), e.rank()));
            continue;
        }
        let a = max_angle(c, e).max(max_angle(e, c));
        worst = worst.max(a);
        if a >= 1e-8 {
            bad.push(format!("{}: angle {a:.2e}", f.label));
        }
    }
    Verdict {
        id: 2,
        title: "core equals peripheral space",
        pass: bad.is_empty() && secs < 60.0 && finite > 0,
        detail: format!(
            "{finite}/{} channels with a faithful invariant state, worst angle {worst:.2e} (limit 1e-8), analysis {secs:.1}s (limit 60s){}",
            set.len() + errors.len(),
            mismatch_note(&bad)
        ),
    }
}

fn schwarz_positivity(set: &[Fuzzed]) -> Verdict {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    let mut noncp = 0;
    for (i, f) in set.iter().enumerate() {
        noncp += usize::from(!f.phi.is_cp());
        let mut rng = random::rng(sub_seed(3000, i as u64));
        for _ in 0..100 {
            let a = random::unit_operator(&mut rng, f.phi.dim());
            worst = worst.min(min_eig(&defect(&f.phi, &a)));
            count += 1;
        }
    }
    Verdict {
        id: 3,
        title: "Schwarz defect positivity",
        pass: worst >= -1e-10 && count == FUZZ_COUNT * 100,
        detail: format!("{count} operators over {} channels ({noncp} not CP), min eigenvalue {worst:.2e} (floor -1e-10)", set.len()),
    }
}

fn definite_set_iff(set: &[Fuzzed]) -> Verdict {
    let mut in_worst: f64 = 0.0;
    let mut out_min = f64::INFINITY;
    let mut out_samples = 0;
    for (i, f) in set.iter().take(50).enumerate() {
        let m = &f.an.definite.m_phi;
        let n = f.phi.dim();
        let mut rng = random::rng(sub_seed(4000, i as u64));
        for _ in 0..100 {
            let a = random_in(&mut rng, m);
            in_worst = in_worst.max(defect(&f.phi, &a).norm());
        }
        if m.rank() == n * n {
            continue;
        }
        for _ in 0..100 {
            let u = random_in(&mut rng, m);
            let x = random::unit_operator(&mut rng, n);
            let w = unit(&(&x - &project(m, &x).component));
            let s: f64 = rand::Rng::random_range(&mut rng, 0.1..=1.0);
            let a = &(&u * (1.0 - s * s).sqrt()) + &(&w * s);
            out_min = out_min.min(defect(&f.phi, &a).norm());
            out_samples += 1;
        }
    }
    Verdict {
        id: 4,
        title: "definite set iff zero defect",
        pass: in_worst < 1e-9 && out_min > 1e-10,
        detail: format!(
            "in-set worst {in_worst:.2e} (limit 1e-9), {out_samples} off-set samples min {out_min:.2e} (floor 1e-10)"
        ),
    }
}

fn monotonicity_and_telescoping(set: &[Fuzzed]) -> Verdict {
    let mut rise = f64::NEG_INFINITY;
    let mut tele: f64 = 0.0;
    let mut orbits = 0;
    for (i, f) in set.iter().enumerate() {
        let states: Vec<&Operator> = f.an.states.states.iter().map(|d| d.operator()).collect();
        let mut rng = random::rng(sub_seed(5000, i as u64));
        for _ in 0..50 {
            let a = random::unit_operator(&mut rng, f.phi.dim());
            let sq = |x: &Operator| -> Vec<f64> {
                let m = x.matrix();
                let xx = jordan(m, &m.adjoint());
                states.iter().map(|r| expect(r, &xx)).collect()
            };
            let first = sq(&a);
            let mut sum = vec![0.0; states.len()];
            let mut x = a.clone();
            let mut cur = first.clone();
            for _ in 0..200 {
                let d = defect(&f.phi, &x);
                let y = f.phi.apply_op(&x);
                let next = sq(&y);
                for s in 0..states.len() {
                    let step = expect(states[s], &d);
                    sum[s] += step;
                    rise = rise.max(next[s].max(0.0).sqrt() - cur[s].max(0.0).sqrt());
                    tele = tele.max((step - (cur[s] - next[s])).abs());
                }
                x = y;
                cur = next;
            }
            for s in 0..states.len() {
                tele = tele.max((sum[s] - (first[s] - cur[s])).abs());
            }
            orbits += 1;
        }
    }
    Verdict {
        id: 5,
        title: "seminorm monotonicity and telescoping",
        pass: rise <= 1e-10 && tele <= 1e-10,
        detail: format!("{orbits} orbits of 200 steps, max increase {rise:.2e}, telescoping residual {tele:.2e} (limit 1e-10)"),
    }
}

fn vanishing(set: &[Fuzzed]) -> Verdict {
    let cfg = config();
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    let mut horizon_max = 0;
    let (mut forward, mut converse) = (0, 0);
    for (i, f) in set.iter().enumerate() {
        if cases == 50 {
            break;
        }
        let (phi, an) = analyze(f.phi.clone(), &cfg).unwrap();
        if !an.phi_finite() || an.gap() < 0.05 {
            continue;
        }
        cases += 1;
        let n = phi.dim();
        let mut rng = random::rng(sub_seed(6000, i as u64));
        for j in 0..8 {
            let x = random::unit_operator(&mut rng, n);
            let a = if j % 2 == 0 {
                unit(&project_to_orthogonal(&x, &an.core.c_phi, &an.states).unwrap())
            } else {
                x
            };
            let orth = orthogonality_test(&a, &an.core.c_phi, &an.states).orthogonal;
            let h = Horizon::from_gap(an.spectrum.second_modulus, a.hs_norm(), n, cfg.max_power)
                .assert_at;
            horizon_max = horizon_max.max(h);
            let tail = power(&phi, &a, h).hs_norm();
            if h > 600 {
                bad.push(format!("{}: horizon {h}", f.label));
            }
            if orth {
                forward += 1;
                if tail >= DECAY {
                    bad.push(format!("{}: orthogonal but tail {tail:.2e}", f.label));
                }
            }
            if tail < DECAY {
                converse += 1;
                if !orth {
                    bad.push(format!("{}: vanishing but not orthogonal", f.label));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 6,
        title: "vanishing iff orthogonal",
        pass: bad.is_empty() && cases == 50 && secs < 30.0,
        detail: format!(
            "{cases} channels with gap >= 0.05, {forward} orthogonal and {converse} vanishing operators, horizon max {horizon_max} (limit 600), {secs:.1}s (limit 30s){}",
            mismatch_note(&bad)
        ),
    }
}

fn tp_channels(set: &[Fuzzed]) -> Vec<(String, MapDescriptor, Analysis)> {
    let mut out = Vec::new();
    for f in zoo::families().iter() {
        for n in [2, 3, 4] {
            let params = if f.name() == "composed" {
                Params::new().set("parts", "pinching+depolarizing")
            } else {
                Params::new()
            };
            let e = zoo::make(f.name(), n, &params).unwrap();
            if e.map.is_trace_preserving() {
                let (phi, an) = analyze(e.map, &AnalysisConfig::default()).unwrap();
                out.push((format!("{} n={n}", f.name()), phi, an));
            }
        }
    }
    for f in set.iter().filter(|f| f.phi.is_trace_preserving()) {
        out.push((f.label.clone(), f.phi.clone(), f.an.clone()));
    }
    out
}

fn expectation_checks(set: &[Fuzzed]) -> Verdict {
    let cfg = AnalysisConfig::default();
    let channels = tp_channels(set);
    let mut bad = Vec::new();
    let (mut comm, mut pos, mut decay, mut arv) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    let mut slow = Vec::new();
    for (i, (label, phi, an)) in channels.iter().enumerate() {
        let Some(p) = &an.expectation else {
            bad.push(format!("{label}: no conditional expectation"));
            continue;
        };
        let n = phi.dim();
        let mut c: f64 = 0.0;
        for k in 0..n * n {
            let e = Operator::unit(n, k % n, k / n);
            let d = &p.apply(&phi.apply_op(&e)) - &phi.apply_op(&p.apply(&e));
            c += d.hs_norm().powi(2);
        }
        comm = comm.max(c.sqrt());
        let mut rng = random::rng(sub_seed(7000, i as u64));
        for _ in 0..100 {
            let rho = random::density(&mut rng, n);
            pos = pos.min(p.apply(&rho).min_hermitian_eigenvalue());
        }
        let mut excluded = false;
        for _ in 0..20 {
            let a = random::unit_operator(&mut rng, n);
            let d = &a - &p.apply(&a);
            let h = Horizon::from_gap(an.spectrum.second_modulus, d.hs_norm(), n, cfg.max_power);
            if !h.asserts() {
                excluded = true;
                continue;
            }
            let k = h.assert_at;
            decay = decay.max(power(phi, &d, k).hs_norm());
            let mut y = a.clone();
            for _ in 0..k {
                y = phi.apply_op(&p.apply(&y));
            }
            arv = arv.max((&power(phi, &a, k) - &y).hs_norm());
        }
        if excluded {
            slow.push(label.clone());
        }
    }
    let pass = bad.is_empty() && comm < 1e-9 && pos >= -1e-10 && decay < DECAY && arv < DECAY;
    let slow_note = if slow.is_empty() {
        "none".to_string()
    } else {
        slow.join(", ")
    };
    Verdict {
        id: 7,
        title: "conditional expectation onto the core",
        pass,
        detail: format!(
            "{} trace-preserving channels, commutation {comm:.2e} (limit 1e-9), min output eigenvalue {pos:.2e}, complement tail {decay:.2e}, Arveson residual {arv:.2e} (limit 1e-6); slow-mixing exclusions: {slow_note}{}",
            channels.len(),
            mismatch_note(&bad)
        ),
    }
}

fn jordan_residual(u: &OperatorSubspace) -> f64 {
    let basis = u.basis();
    let n = u.ambient_dim();
    let mut worst = project(u, &Operator::identity(n)).distance;
    for b in &basis {
        worst = worst.max(project(u, &b.adjoint()).distance);
        for c in &basis {
            worst = worst.max(project(u, &op(jordan(b.matrix(), c.matrix()))).distance);
        }
    }
    worst
}

fn projections() -> Verdict {
    let mut cases: Vec<(String, MapDescriptor, usize)> = Vec::new();
    for blocks in [
        vec![1, 1],
        vec![1, 1, 1],
        vec![2, 1],
        vec![2, 2],
        vec![1, 3],
        vec![1, 1, 1, 1],
    ] {
        let dim = blocks.iter().map(|b| b * b).sum();
        cases.push((
            format!("pinching{blocks:?}"),
            zoo::pinching(&blocks).unwrap(),
            dim,
        ));
    }
    for n in 2..=4 {
        cases.push((
            format!("symmetrizer n={n}"),
            zoo::symmetrizer(n).unwrap(),
            n * (n + 1) / 2,
        ));
    }
    let mut bad = Vec::new();
    let (mut angle, mut jr) = (0.0f64, 0.0f64);
    for (label, p, dim) in &cases {
        let an = match analyze(p.clone(), &AnalysisConfig::default()) {
            Ok((_, an)) => an,
            Err(e) => {
                bad.push(format!("{label}: {e}"));
                continue;
            }
        };
        let Some(pa) = &an.projection else {
            bad.push(format!("{label}: not treated as a projection"));
            continue;
        };
        if [pa.range.rank(), pa.core.rank(), pa.peripheral.rank()] != [*dim; 3] {
            bad.push(format!("{label}: ranks differ from {dim}"));
            continue;
        }
        let a = max_angle(&pa.peripheral, &pa.core)
            .max(max_angle(&pa.core, &pa.range))
            .max(max_angle(&pa.peripheral, &pa.range));
        angle = angle.max(a);
        jr = jr.max(jordan_residual(&pa.range));
    }
    Verdict {
        id: 8,
        title: "projection threefold equality",
        pass: bad.is_empty() && angle < 1e-8 && jr < 1e-9,
        detail: format!(
            "{} projections, worst angle {angle:.2e} (limit 1e-8), Jordan residual {jr:.2e} (limit 1e-9){}",
            cases.len(),
            mismatch_note(&bad)
        ),
    }
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_core-analyzer"))
        .env_remove("CORE_ANALYZER_SEED")
        .args(args)
        .output()
        .unwrap()
}

/// Builds a command line given a tag that keeps the two runs' outputs apart.
type ArgsFn<'a> = Box<dyn Fn(&str) -> Vec<String> + 'a>;

fn determinism() -> Verdict {
    let dir = TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    fs::write(
        p("op.json"),
        r#"{"dim": 3, "data": [[1,0,0],[0,-1,0],[0,0,0.5]]}"#,
    )
    .unwrap();
    let runs: Vec<(&str, ArgsFn<'_>)> = vec![
        (
            "zoo make",
            Box::new(|tag| {
                vec![
                    "zoo".into(),
                    "make".into(),
                    "mixed_unitary".into(),
                    "--dim".into(),
                    "3".into(),
                    "seed=5".into(),
                    "--output".into(),
                    p(&format!("ch{tag}.json")),
                ]
            }),
        ),
        (
            "analyze",
            Box::new(|tag| {
                vec![
                    "analyze".into(),
                    "--input".into(),
                    p("cha.json"),
                    "--seed".into(),
                    "7".into(),
                    "--output".into(),
                    p(&format!("an{tag}.json")),
                ]
            }),
        ),
        (
            "orbit",
            Box::new(|tag| {
                vec![
                    "orbit".into(),
                    "--input".into(),
                    p("cha.json"),
                    "--operator".into(),
                    p("op.json"),
                    "--output".into(),
                    p(&format!("orb{tag}.json")),
                    "--csv".into(),
                    p(&format!("orb{tag}.csv")),
                ]
            }),
        ),
        (
            "fuzz",
            Box::new(|tag| {
                vec![
                    "fuzz".into(),
                    "--count".into(),
                    "12".into(),
                    "--seed".into(),
                    "42".into(),
                    "--output".into(),
                    p(&format!("fz{tag}.json")),
                ]
            }),
        ),
    ];
    let mut bad = Vec::new();
    let mut outputs = 0;
    for (name, args) in &runs {
        let mut files: Vec<Vec<Vec<u8>>> = Vec::new();
        for tag in ["a", "b"] {
            let a = args(tag);
            let refs: Vec<&str> = a.iter().map(String::as_str).collect();
            let out = cli(&refs);
            if !out.status.success() {
                bad.push(format!("{name}: exit {:?}", out.status.code()));
            }
            let written: Vec<Vec<u8>> = a
                .windows(2)
                .filter(|w| w[0] == "--output" || w[0] == "--csv")
                .map(|w| fs::read(Path::new(&w[1])).unwrap_or_default())
                .collect();
            files.push(written);
        }
        outputs += files[0].len();
        if files[0] != files[1] || files[0].iter().any(Vec::is_empty) {
            bad.push(format!("{name}: outputs differ"));
        }
    }
    let list = (cli(&["zoo", "list"]).stdout, cli(&["zoo", "list"]).stdout);
    if list.0 != list.1 {
        bad.push("zoo list: stdout differs".into());
    }
    Verdict {
        id: 9,
        title: "bit-identical repeated runs",
        pass: bad.is_empty(),
        detail: format!(
            "{} commands run twice, {outputs} files compared{}",
            runs.len() + 1,
            mismatch_note(&bad)
        ),
    }
}

fn main() -> ExitCode {
    let mut verdicts = vec![zoo_ground_truth()];
    let (set, errors, secs) = fuzz_set();
    verdicts.push(core_equals_peripheral(&set, &errors, secs));
    verdicts.push(schwarz_positivity(&set));
    verdicts.push(definite_set_iff(&set));
    verdicts.push(monotonicity_and_telescoping(&set));
    verdicts.push(vanishing(&set));
    verdicts.push(expectation_checks(&set));
    verdicts.push(projections());
    verdicts.push(determinism());
    println!();
    for v in &verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {}: {}", v.id, v.title, v.detail);
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!(
        "acceptance: {} of {} criteria pass\n",
        verdicts.len() - failed,
        verdicts.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
