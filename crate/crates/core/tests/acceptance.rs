//! The thirteen acceptance criteria. Each prints one PASS/FAIL line; the
//! run succeeds when the failing set equals KNOWN_RED exactly, so a
//! criterion that starts passing (or a new failure) breaks the build.
//!
//! Criterion 3 is red: the partial products for α = 2 converge, but their
//! increments only fall below 1e-6 near i ≈ 7.7·10³, not at 10³.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, ToPrimitive, Zero};
use odolab::criteria::optimize::{self, Optimizer, GAMMA_NODE_BUDGET};
use odolab::criteria::verdict::{evaluate, EvalParams, Status};
use odolab::gallery::{self, backend_for};
use odolab::maps::{boundedness, norm_probe};
use odolab::scalar::rat;
use odolab::shift::salas_products;
use odolab::spec::{Alphabet, Measure, ShiftSpec};
use odolab::witness::odometer::{fhc_witness, transitivity_witness, FhcOptions, TransitivityOptions};
use odolab::witness::shift::{shift_fhc_witness, ShiftFhcParams};
use odolab::witness::translation::rigidity_probe;
use odolab::witness::{LadderOptions, Method, WitnessReport};
use odolab::{AnySpec, Backend, MapKind, Rational, Scalar, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: &[usize] = &[3];
const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn product(id: &str) -> SystemSpec {
    match gallery::lookup(id).expect("registered gallery id").spec {
        AnySpec::Product(s) => s,
        AnySpec::Shift(_) => panic!("{id} is a shift"),
    }
}

fn shift(id: &str) -> ShiftSpec {
    match gallery::lookup(id).expect("registered gallery id").spec {
        AnySpec::Shift(s) => s,
        AnySpec::Product(_) => panic!("{id} is not a shift"),
    }
}

fn failed_checks(r: &WitnessReport) -> String {
    r.failed().iter().map(|c| format!("{} ({} vs {})", c.inequality, c.value, c.bound)).collect::<Vec<_>>().join("; ")
}

fn factorial(n: u64) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * rat(k as i64, 1))
}

// ---------------------------------------------------------------------------
// exhaustive oracles over rational weights (small alphabets)

fn masks(m: usize) -> impl Iterator<Item = usize> {
    0..1usize << m
}

fn mass(mu: &[Rational], d: usize) -> Rational {
    (0..mu.len()).filter(|j| d >> j & 1 == 1).map(|j| mu[j].clone()).sum()
}

fn kappa_brute(mu: &[Rational]) -> Rational {
    let m = mu.len();
    (1..m)
        .map(|j| masks(m).filter(|&d| d & (d << j) == 0).map(|d| mass(mu, d)).max().unwrap())
        .min()
        .unwrap()
}

fn gamma_brute(mu: &[Rational]) -> Rational {
    let m = mu.len();
    let full = (1usize << m) - 1;
    let rot = |d: usize, k: usize| ((d << k) | (d >> (m - k))) & full;
    (1..m)
        .map(|j| masks(m).map(|d| mass(mu, d).min(Rational::one() - mass(mu, rot(d, j)))).max().unwrap())
        .max()
        .unwrap()
}

// ---------------------------------------------------------------------------

fn c1_boundedness_identity() -> Outcome {
    let spec = product("fhc-binary");
    let report = boundedness::<Rational>(&spec, 20).map_err(|e| e.to_string())?;
    ensure!(report.values.len() == 20, "only {} levels computed", report.values.len());
    for l in 1..=20u64 {
        let expected = rat(l as i64, 1) / factorial(l - 1);
        let got = &report.values[l as usize - 1];
        ensure!(*got == expected, "level {l}: {got} != {expected}");
    }
    Ok("bracket = l/(l-1)! for l <= 20, exact".into())
}

fn c2_ornstein() -> Outcome {
    const TOP: usize = 10_000;
    let spec = product("ornstein");
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).min(16);
    let bad: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let spec = &spec;
                s.spawn(move || {
                    let mut bad = Vec::new();
                    for i in (2 + t..=TOP).step_by(threads) {
                        let mu: Vec<Rational> = spec.weights(i).unwrap();
                        let (eta, delta) = (optimize::eta(&mu), optimize::delta(&mu));
                        if eta != rat(1, 2) || delta != rat(1, 2 * i as i64) {
                            bad.push(format!("i = {i}: eta {eta}, delta {delta}"));
                        }
                    }
                    bad
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    let params = EvalParams { horizon: TOP, ..Default::default() };
    let v = evaluate::<Rational>(&AnySpec::Product(spec), "hc-spread", &params).map_err(|e| e.to_string())?;
    ensure!(v.status == Status::SatisfiedUpToHorizon || v.status == Status::Satisfied, "hc-spread is {}", v.status.tag());
    let margin = v.evidence["margin"].as_f64().ok_or("no margin in the evidence")?;
    ensure!(margin >= 0.25, "margin {margin} < 1/4");
    Ok(format!("eta = 1/2, delta = 1/(2i) for 2 <= i <= {TOP}; hc-spread {} with margin {margin}", v.status.tag()))
}

fn c3_alpha_two_products() -> Outcome {
    const FAR: usize = 200_000;
    let spec = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::BinaryAlpha { alpha: rat(2, 1) });
    let mut partial = vec![1.0f64; FAR + 1];
    for i in 1..=FAR {
        let mu: Vec<f64> = spec.weights(i).unwrap();
        partial[i] = partial[i - 1] * optimize::eta(&mu) / optimize::delta(&mu);
    }
    // the tail factors are (i²+2)/(i²−2) ≈ exp(4/i²)
    let limit = partial[FAR] * (4.0 / FAR as f64).exp();
    let increment = |i: usize| partial[i] - partial[i - 1];
    let (worst_at, worst) = (1001..=FAR).map(|i| (i, increment(i))).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let settles = (1001..=FAR).find(|&i| (i..=FAR.min(i + 1000)).all(|j| increment(j) < 1e-6));

    let depth = 16;
    let space = common::truncation::<f64>(&spec, depth);
    let probe_max = (1..=100).map(|n| norm_probe(&space, n).ratio_sup).fold(0.0, f64::max);
    let probes_ok = probe_max <= limit + 1e-9;

    let detail = format!(
        "limit {limit:.6}; max increment beyond 10^3 is {worst:.2e} at i = {worst_at}; increments fall below 1e-6 from i = {}; \
         norm probes n <= 100 at depth {depth}: max {probe_max:.6} ({})",
        settles.map_or("never".into(), |i| i.to_string()),
        if probes_ok { "within the limit" } else { "ABOVE the limit" }
    );
    ensure!(worst < 1e-6 && probes_ok, "{detail}");
    Ok(detail)
}

fn c4_hc_not_mixing() -> Outcome {
    let spec = product("hc-not-mixing");
    for i in 1..=200 {
        let mu: Vec<Rational> = spec.weights(i).unwrap();
        let c = optimize::eta(&mu);
        ensure!(c == odolab::spec::peak_weight(mu.len() as u64), "i = {i}: max weight is not the peak");
        ensure!(c >= rat(1, 4), "i = {i}: c = {c} < 1/4");
        let spread = &c - optimize::delta(&mu);
        ensure!(spread >= rat(1, 8), "i = {i}: eta - delta = {spread}");
        let (kappa, _) = optimize::kappa(&mu);
        ensure!(kappa <= rat(7, 8), "i = {i}: kappa = {kappa}");
        if mu.len() <= 14 {
            ensure!(kappa == kappa_brute(&mu), "i = {i}: path DP disagrees with enumeration");
        }
    }
    Ok("c_i >= 1/4, eta - delta >= 1/8, kappa <= 7/8 for i <= 200, exact".into())
}

fn c5_geometric_mixing() -> Outcome {
    const TOP: usize = 120;
    let spec = product("geometric-mixing");
    let tol = Rational::from_float(1e-12).unwrap();
    let mut kappa_100 = Rational::zero();
    for i in 2..=TOP {
        let m = spec.m(i).unwrap();
        let c = odolab::solve::geometric_c(i, m).map_err(|e| e.to_string())?;
        ensure!(c > rat(1, i as i64 + 1) && c <= rat(1, i as i64), "i = {i}: c = {c} outside (1/(i+1), 1/i]");
        // the root lies within tol below c
        let sum = |x: &Rational| (0..m).fold((Rational::zero(), Rational::one()), |(s, p), _| (s + &p, p * x)).0;
        let target = rat(i as i64 + 1, i as i64);
        ensure!(sum(&c) >= target && sum(&(&c - &tol)) < target, "i = {i}: c not within 1e-12 of the root");
        let mu: Vec<Rational> = spec.weights(i).unwrap();
        let eta = optimize::eta(&mu);
        ensure!(eta == rat(i as i64, i as i64 + 1), "i = {i}: eta = {eta}");
        let (kappa, _) = optimize::kappa(&mu);
        ensure!(kappa == kappa_brute(&mu), "i = {i}: path DP disagrees with enumeration");
        ensure!(kappa >= eta, "i = {i}: kappa {kappa} < eta");
        if i == 100 {
            kappa_100 = kappa;
        }
    }
    ensure!(kappa_100 >= rat(99, 100), "kappa_100 = {}", kappa_100.to_f64().unwrap());
    Ok(format!("c_i bracketed, eta exact, kappa >= eta for i <= {TOP}; kappa_100 = {:.6}", kappa_100.to_f64().unwrap()))
}

fn c6_fhc_not_mixing() -> Outcome {
    let spec = product("fhc-not-mixing");
    let fifth = rat(1, 5);
    for k in 1..=100i64 {
        let target = Rational::one() - rat(1, k + 1);
        let i = 3 * k as usize + 2;
        let mu: Vec<Rational> = spec.weights(i).unwrap();
        let g = optimize::gamma_odometer(&mu);
        ensure!(g.value == target, "gamma_{i} = {} != {target}", g.value);
        ensure!(g.value == gamma_brute(&mu), "gamma_{i}: search disagrees with enumeration");

        let i = 3 * k as usize + 1;
        let mu: Vec<Rational> = spec.weights(i).unwrap();
        let next = spec.m(i + 1).unwrap();
        let omega = optimize::omega(&mu, next, &fifth);
        // symbols j with 5j >= 5(m−1) − m·m_next
        let m = mu.len() as i64;
        let direct: Rational = (0..m).filter(|&j| 5 * j >= 5 * (m - 1) - m * next as i64).map(|j| mu[j as usize].clone()).sum();
        ensure!(omega == direct, "omega_{i}: {omega} vs direct {direct}");
        ensure!(omega == rat(1, k + 1), "omega_{i}(1/5) = {omega} != 1/{}", k + 1);
    }
    for k in 0..=100usize {
        let mu: Vec<Rational> = spec.weights(3 * k + 3).unwrap();
        ensure!(optimize::eta(&mu) == rat(1, 2), "eta_{} != 1/2", 3 * k + 3);
    }
    Ok("gamma_(3k+2) = 1 - 1/(k+1), omega_(3k+1)(1/5) = 1/(k+1) for 1 <= k <= 100; eta_(3k+3) = 1/2".into())
}

fn c7_transitivity() -> Outcome {
    let spec = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::BinaryAlpha { alpha: rat(1, 4) });
    let ladder = LadderOptions { seed: SEED, trials: 1_000_000, cap: 1 << 22 };
    let o = TransitivityOptions { epsilon: rat(1, 10), ladder, ..Default::default() };
    let r = transitivity_witness::<f64>(&spec, &o).map_err(|e| e.to_string())?;
    ensure!(r.pass, "failed: {}", failed_checks(&r));
    let mu_b = r.checks.iter().find(|c| c.inequality.starts_with("mu(B) >")).ok_or("no mu(B) check")?;
    ensure!(mu_b.method == Method::IndependenceProduct, "mu(B) not through the independence product");
    let disjoint = r.checks.iter().find(|c| c.inequality.contains("o^k(x) in B")).ok_or("no disjointness check")?;
    let how = match &disjoint.method {
        Method::Exact => "exhaustive".to_string(),
        Method::Sampled { trials, violations, .. } => {
            ensure!(*trials == 1_000_000 && *violations == 0, "sampled {trials} trials, {violations} violations");
            format!("{trials} samples")
        }
        other => return Err(format!("disjointness checked by {}", other.tag())),
    };
    Ok(format!("mu(B) = {} > 0.7, disjointness {how}", mu_b.value))
}

fn c8_fhc() -> Outcome {
    let spec = product("fhc-binary");
    let o = FhcOptions { epsilon: rat(1, 20), kappa: rat(1, 8), samples: 1000, seed: SEED, ..Default::default() };
    let r = fhc_witness::<Rational>(&spec, &o).map_err(|e| e.to_string())?;
    ensure!(r.pass, "failed: {}", failed_checks(&r));
    let proof = r.checks.iter().filter(|c| c.method == Method::ProofBound).count();
    ensure!(proof >= 2, "only {proof} proof-bound checks");
    let transport = r.checks.iter().find(|c| c.inequality.starts_with("exact transport")).ok_or("no transport check")?;
    let Method::Sampled { trials, violations, .. } = transport.method else {
        return Err("transport check is not seeded".into());
    };
    ensure!(trials >= 1000 && violations == 0, "{trials} spot checks, {violations} disagreements");
    let functional = r.checks.iter().filter(|c| c.inequality.contains("||")).count();
    ensure!(functional == 2, "{functional} function-level checks");
    Ok(format!("{} checks pass; {trials} transport spot checks agree", r.checks.len()))
}

fn c9_hoeffbis() -> Outcome {
    let spec = product("hoeffbis-blocks");
    let mut worst = 0.0f64;
    for i in 1..64usize {
        let l = odolab::spec::isqrt(i as u64) as i32;
        let n = 2f64.powi(l);
        let q = (1.0 + 1.0 / n).powf(n);
        let closed = (q - 1.0) / q;
        let mu: Vec<f64> = spec.weights(i).unwrap();
        let (beta, _) = optimize::beta(&mu);
        worst = worst.max((beta - closed).abs());
        ensure!((beta - closed).abs() <= 1e-12, "i = {i} (l = {l}): beta {beta} vs {closed}");
    }
    let mut theta_min = f64::INFINITY;
    for i in 25..=80usize {
        let l = odolab::spec::isqrt(i as u64);
        let mu: Vec<f64> = spec.weights(i).unwrap();
        let t = optimize::theta_shift(&mu, 1 << l);
        theta_min = theta_min.min(t);
        ensure!(t >= 0.2, "theta_({i}, 2^{l}) = {t}");
    }
    Ok(format!("beta within {worst:.1e} of the closed form for l <= 7; min theta_(i,2^l) = {theta_min:.4} for 5 <= l <= 8"))
}

fn rigidity<S: Scalar>(spec: &SystemSpec) -> odolab::Result<WitnessReport> {
    rigidity_probe::<S>(spec, 8, 6, 3)
}

fn c10_rigidity() -> Outcome {
    let spec = product("trans-rigid");
    let r = match backend_for(&AnySpec::Product(spec.clone()), 8) {
        Backend::Rational => rigidity::<Rational>(&spec),
        Backend::Float => rigidity::<f64>(&spec),
    }
    .map_err(|e| e.to_string())?;
    ensure!(r.pass, "failed: {}", failed_checks(&r));
    Ok(format!("cylinders fixed for i <= 8; K = {:.4}", r.params["K"].as_f64().unwrap_or(f64::NAN)))
}

fn c11_shift() -> Outcome {
    let spec = shift("shift-z");
    let products = salas_products::<Rational>(&spec, 20, 60);
    for w in products.windows(2) {
        let ((i, n, a), (j, _, b)) = (&w[0], &w[1]);
        if i == j {
            ensure!(b <= a, "not monotone at i = {i}, n = {n}");
        }
    }
    for (i, n, p) in &products {
        if *n as i64 >= i.abs() {
            let expected = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(4), *n as usize));
            ensure!(*p == expected, "nu_(i+n) nu_(i-n) at i = {i}, n = {n} is {p}");
        }
    }
    let v = evaluate::<Rational>(&AnySpec::Shift(spec.clone()), "supercyclic-shift", &EvalParams::default()).map_err(|e| e.to_string())?;
    ensure!(v.status.holds(), "supercyclic-shift is {}", v.status.tag());
    let p = ShiftFhcParams { kappa: rat(3, 20), ..Default::default() };
    let r = shift_fhc_witness::<Rational>(&spec, &p).map_err(|e| e.to_string())?;
    ensure!(r.pass, "failed: {}", failed_checks(&r));
    ensure!(r.checks.iter().all(|c| c.method == Method::Exact), "a window check is not exact");
    Ok(format!("products 4^-n and monotone on |i| <= 20; {} exact window checks", r.checks.len()))
}

fn c12_optimizers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for trial in 0..200 {
        let w = common::random_weights(&mut rng, 16);
        let mu = common::to_measure(&w);
        let m = w.len();
        let over = |x: u64| common::over(x, &w);
        for k in 1..m {
            ensure!(optimize::theta_shift(&mu, k as u64) == over(common::theta_shift(&w, k)), "trial {trial}: theta_k, k = {k}, {w:?}");
            ensure!(optimize::disjoint_set_zplus(&mu, k as u64).0 == over(common::disjoint_zplus(&w, k)), "trial {trial}: path DP, j = {k}, {w:?}");
            ensure!(optimize::alpha(&mu, k as u64) == over(common::alpha(&w, k)), "trial {trial}: cycle DP, n = {k}, {w:?}");
            let g = optimize::gamma_search(&mu, k as u64, GAMMA_NODE_BUDGET);
            ensure!(g.optimizer != Optimizer::SearchLowerBound, "trial {trial}: gamma search ran out of budget");
            ensure!(g.value == over(common::gamma_shift(&w, k)), "trial {trial}: gamma, j = {k}, {w:?}");
        }
        ensure!(optimize::kappa(&mu).0 == over(common::kappa(&w)), "trial {trial}: kappa, {w:?}");
        ensure!(optimize::path_mwis(&mu).0 == over(common::path_mwis(&w)), "trial {trial}: path mwis, {w:?}");

        let n = rng.gen_range(1..=18);
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=60)).collect();
        let vals: Vec<Rational> = v.iter().map(|&x| rat(x as i64, 60)).collect();
        let (num, card) = common::gamma_tilde(&v);
        let expected = Rational::new((num as i64).into(), (card as i64 * 3600).into());
        ensure!(optimize::gamma_tilde(&vals).0 == expected, "trial {trial}: gamma tilde, {v:?}");
    }
    Ok("200 measures with m <= 16 and 200 value lists with N <= 18 match enumeration".into())
}

fn structural<S: Scalar>(spec: &SystemSpec, depth: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let space = common::truncation::<S>(spec, depth);
    common::normalized(&space)?;
    for _ in 0..4 {
        let (a, b) = (rng.gen_range(-50..50), rng.gen_range(-50..50));
        common::bijection_laws(&space, a, b)?;
    }
    if spec.kind == MapKind::Odometer {
        common::rn_identity(spec, &space)?;
    }
    let radices = space.radix.radices().to_vec();
    for _ in 0..100 {
        let len = rng.gen_range(1..=depth);
        let digits: Vec<u64> = radices[..len].iter().map(|&m| rng.gen_range(0..m)).collect();
        common::period_laws(&space, &digits)?;
    }
    Ok(())
}

fn c13_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut seen = Vec::new();
    for e in gallery::all() {
        let AnySpec::Product(spec) = &e.spec else { continue };
        let depth = common::fitting_depth(spec, 6, 1 << 12);
        ensure!(depth >= 1, "{}: no truncation fits", e.id);
        let r = match backend_for(&e.spec, depth) {
            Backend::Rational => structural::<Rational>(spec, depth, &mut rng),
            Backend::Float => structural::<f64>(spec, depth, &mut rng),
        };
        r.map_err(|why| format!("{}: {why}", e.id))?;
        seen.push(format!("{}@{depth}", e.id));
    }
    Ok(format!("{} product specs: {}", seen.len(), seen.join(" ")))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(usize, &str, fn() -> Outcome); 13] = [
        (1, "boundedness identity", c1_boundedness_identity),
        (2, "Ornstein classification", c2_ornstein),
        (3, "alpha = 2 partial products", c3_alpha_two_products),
        (4, "hc-not-mixing bounds", c4_hc_not_mixing),
        (5, "geometric-mixing", c5_geometric_mixing),
        (6, "fhc-not-mixing sequences", c6_fhc_not_mixing),
        (7, "transitivity witness", c7_transitivity),
        (8, "FHC witness", c8_fhc),
        (9, "hoeffbis blocks", c9_hoeffbis),
        (10, "rigidity probe", c10_rigidity),
        (11, "weighted shift", c11_shift),
        (12, "optimizers vs enumeration", c12_optimizers),
        (13, "structural invariants", c13_structure),
    ];
    let mut failing = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                let note = if KNOWN_RED.contains(&n) { " (known red)" } else { "" };
                println!("criterion {n}: FAIL{note} {name}: {detail} [{secs:.1}s]");
                failing.push(n);
            }
        }
    }
    assert_eq!(failing, KNOWN_RED, "failing criteria differ from the known-red list");
}
