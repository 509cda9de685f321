//! Built-in examples with their registered expectations, and the suite that
//! checks artifact output against them.
//!
//! An expectation is never "proved" by the suite. A rule verdict that is
//! inconclusive leaves the expectation unresolved; only a verdict of the
//! opposite sign counts as a contradiction.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::criteria::table::{build_table, IndexRow, TableOptions};
use crate::criteria::verdict::{self, EvalParams, Status};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rat, rational_to_f64, render_rational, Backend, Rational, Scalar};
use crate::solve::{self, SolverSpec};
use crate::spec::{
    Alphabet, AnySpec, DeltaRule, IndexSet, MapKind, Measure, Repeat, ShiftSpec, ShiftWeights, SystemSpec,
};
use crate::witness::odometer::{self, FhcOptions, TransitivityOptions, UfhcOptions};
use crate::witness::shift::{shift_fhc_witness, ShiftFhcParams};
use crate::witness::translation::{self, ResidueSet};
use crate::witness::{LadderOptions, Relation, WitnessReport};

/// Ids in listing order. `binary-alpha` and `same-measure` take a parameter
/// after a colon.
pub const IDS: &[&str] = &[
    "ornstein",
    "binary-alpha",
    "binary-alpha-2",
    "same-measure",
    "same-measure-uniform",
    "same-measure-unbounded",
    "hc-not-mixing",
    "geometric-mixing",
    "fhc-binary",
    "fhc-not-mixing",
    "trans-hc",
    "trans-mixing",
    "trans-fhc",
    "trans-rigid",
    "trans-hufhc",
    "hoeffbis-blocks",
    "shift-z",
    "shift-zplus",
    "open-binary-three-quarters",
    "open-growing-alphabet",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    /// the rule's hypothesis holds for this system
    Holds,
    /// the hypothesis fails
    Fails,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleExpectation {
    pub rule: &'static str,
    pub expect: Expect,
    /// the statement the expectation rests on, quoted
    pub source: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Eta,
    Delta,
    /// η_i − δ_i
    Spread,
    Theta,
    Kappa,
    Gamma,
    Omega,
    Beta,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Eta => "eta",
            Quantity::Delta => "delta",
            Quantity::Spread => "eta-delta",
            Quantity::Theta => "theta",
            Quantity::Kappa => "kappa",
            Quantity::Gamma => "gamma",
            Quantity::Omega => "omega",
            Quantity::Beta => "beta",
        }
    }

    pub fn read<S: Scalar>(self, row: &IndexRow<S>) -> Option<S> {
        let v = |e: &Option<crate::criteria::table::Entry<S>>| e.as_ref().map(|e| e.value.clone());
        match self {
            Quantity::Eta => Some(row.eta.clone()),
            Quantity::Delta => Some(row.delta.clone()),
            Quantity::Spread => Some(row.eta.clone() - row.delta.clone()),
            Quantity::Theta => v(&row.theta),
            Quantity::Kappa => v(&row.kappa),
            Quantity::Gamma => v(&row.gamma),
            Quantity::Omega => row.omega.clone(),
            Quantity::Beta => v(&row.beta),
        }
    }
}

/// Closed-form value at index i.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Exact(Rational),
    /// compared in double precision within `FLOAT_SLACK`
    Float(f64),
}

pub const FLOAT_SLACK: f64 = 1e-12;

pub type ClosedForm = Arc<dyn Fn(usize) -> Option<Target> + Send + Sync>;

#[derive(Clone)]
pub struct Asymptotic {
    pub quantity: Quantity,
    pub relation: Relation,
    /// None where the formula does not apply
    pub value: ClosedForm,
    pub source: &'static str,
}

impl std::fmt::Debug for Asymptotic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Asymptotic({} {} ..)", self.quantity.name(), self.relation.symbol())
    }
}

/// A witness construction with the parameters registered for an entry.
#[derive(Debug, Clone)]
pub enum WitnessCall {
    Transitivity { epsilon: Rational },
    Mixing { k: u64, epsilon: Rational },
    Fhc { epsilon: Rational, kappa: Rational },
    UfhcCount { epsilon: Rational, kappa: Rational },
    SingleCoordinate { epsilon: Rational, horizon: usize },
    IntervalFhc { epsilon: Rational, kappa: Rational, horizon: usize },
    TailUfhc { epsilon: Rational, residues: ResidueSet, horizon: usize },
    Rigidity { max_i: usize, depth: usize, enumerate_depth: usize },
    ShiftFhc(ShiftFhcParams),
}

impl WitnessCall {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessCall::Transitivity { .. } => "transitivity",
            WitnessCall::Mixing { .. } => "mixing",
            WitnessCall::Fhc { .. } => "frequent-hypercyclicity",
            WitnessCall::UfhcCount { .. } => "u-frequent-count",
            WitnessCall::SingleCoordinate { .. } => "single-coordinate",
            WitnessCall::IntervalFhc { .. } => "interval-fhc",
            WitnessCall::TailUfhc { .. } => "tail-ufhc",
            WitnessCall::Rigidity { .. } => "rigidity",
            WitnessCall::ShiftFhc(_) => "shift-fhc",
        }
    }

    /// `horizon` bounds the index searches of the odometer constructions.
    pub fn run<S: Scalar>(&self, spec: &AnySpec, ladder: &LadderOptions, horizon: usize) -> Result<WitnessReport> {
        let product = || match spec {
            AnySpec::Product(s) => Ok(s),
            AnySpec::Shift(_) => Err(Error::WrongKind { expected: "product system" }),
        };
        match self {
            WitnessCall::Transitivity { epsilon } => {
                let o = TransitivityOptions { epsilon: epsilon.clone(), horizon, ladder: ladder.clone(), ..Default::default() };
                odometer::transitivity_witness::<S>(product()?, &o)
            }
            WitnessCall::Mixing { k, epsilon } => odometer::mixing_witness::<S>(product()?, &BigInt::from(*k), epsilon, ladder),
            WitnessCall::Fhc { epsilon, kappa } => {
                let o = FhcOptions { epsilon: epsilon.clone(), kappa: kappa.clone(), horizon, seed: ladder.seed, ..Default::default() };
                odometer::fhc_witness::<S>(product()?, &o)
            }
            WitnessCall::UfhcCount { epsilon, kappa } => {
                let o = UfhcOptions { epsilon: epsilon.clone(), kappa: kappa.clone(), ..Default::default() };
                odometer::ufhc_count::<S>(product()?, &o)
            }
            WitnessCall::SingleCoordinate { epsilon, horizon } => {
                translation::single_coordinate_witness::<S>(product()?, epsilon, *horizon, 4096)
            }
            WitnessCall::IntervalFhc { epsilon, kappa, horizon } => {
                translation::interval_fhc_witness::<S>(product()?, epsilon, kappa, *horizon)
            }
            WitnessCall::TailUfhc { epsilon, residues, horizon } => {
                translation::tail_ufhc_witness::<S>(product()?, epsilon, residues, *horizon)
            }
            WitnessCall::Rigidity { max_i, depth, enumerate_depth } => {
                translation::rigidity_probe::<S>(product()?, *max_i, *depth, *enumerate_depth)
            }
            WitnessCall::ShiftFhc(p) => match spec {
                AnySpec::Shift(s) => shift_fhc_witness::<S>(s, p),
                AnySpec::Product(_) => Err(Error::WrongKind { expected: "weighted shift" }),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct WitnessExpectation {
    pub call: WitnessCall,
    pub source: &'static str,
}

/// A free parameter pinned to a concrete admissible value.
#[derive(Debug, Clone, Serialize)]
pub struct Choice {
    pub value: &'static str,
    pub constraint: &'static str,
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub id: String,
    pub summary: &'static str,
    pub spec: AnySpec,
    pub solver: Option<SolverSpec>,
    pub choices: Vec<Choice>,
    pub rules: Vec<RuleExpectation>,
    pub asymptotics: Vec<Asymptotic>,
    pub witnesses: Vec<WitnessExpectation>,
}

impl GalleryEntry {
    /// Entries without any expectation only report their criterion values.
    pub fn is_open(&self) -> bool {
        self.rules.is_empty() && self.asymptotics.is_empty() && self.witnesses.is_empty()
    }

    pub fn default_backend(&self, horizon: usize) -> Backend {
        backend_for(&self.spec, horizon)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "summary": self.summary,
            "spec": self.spec.to_json(),
            "open": self.is_open(),
            "choices": self.choices,
            "rules": self.rules,
            "sequences": self.asymptotics.iter().map(|a| json!({
                "quantity": a.quantity.name(),
                "relation": a.relation.symbol(),
                "source": a.source,
            })).collect::<Vec<_>>(),
            "witnesses": self.witnesses.iter().map(|w| json!({"construction": w.call.name(), "source": w.source})).collect::<Vec<_>>(),
        })
    }
}

/// Rational when every weight is, float otherwise. Weights are inspected
/// up to `horizon` or the first index that cannot be produced.
pub fn backend_for(spec: &AnySpec, horizon: usize) -> Backend {
    match spec {
        AnySpec::Shift(_) => Backend::Rational,
        AnySpec::Product(s) => {
            if (1..=horizon).map_while(|i| s.raw_weights(i).ok()).all(|w| w.is_exact()) {
                Backend::Rational
            } else {
                Backend::Float
            }
        }
    }
}

fn odo(alphabet: Alphabet, measure: Measure) -> AnySpec {
    AnySpec::Product(SystemSpec::new(MapKind::Odometer, alphabet, measure))
}

fn trans(alphabet: Alphabet, measure: Measure) -> AnySpec {
    AnySpec::Product(SystemSpec::new(MapKind::Translation, alphabet, measure))
}

fn rule(rule: &'static str, expect: Expect, source: &'static str) -> RuleExpectation {
    RuleExpectation { rule, expect, source }
}

fn seq(quantity: Quantity, relation: Relation, source: &'static str, f: impl Fn(usize) -> Option<Target> + Send + Sync + 'static) -> Asymptotic {
    Asymptotic { quantity, relation, value: Arc::new(f), source }
}

fn exact(r: Rational) -> Option<Target> {
    Some(Target::Exact(r))
}

fn witness(call: WitnessCall, source: &'static str) -> WitnessExpectation {
    WitnessExpectation { call, source }
}

fn entry(id: &str, summary: &'static str, spec: AnySpec) -> GalleryEntry {
    GalleryEntry {
        id: id.to_string(),
        summary,
        spec,
        solver: None,
        choices: Vec::new(),
        rules: Vec::new(),
        asymptotics: Vec::new(),
        witnesses: Vec::new(),
    }
}

fn choice(value: &'static str, constraint: &'static str) -> Choice {
    Choice { value, constraint }
}

/// Parses "id" or "id:param".
pub fn lookup(id: &str) -> Result<GalleryEntry> {
    let (base, arg) = match id.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (id, None),
    };
    let no_arg = |e: GalleryEntry| match arg {
        None => Ok(e),
        Some(_) => Err(Error::UnknownGallery(id.to_string())),
    };
    match base {
        "ornstein" => no_arg(ornstein()),
        "binary-alpha" => binary_alpha(arg.map(parse_rational).transpose()?.unwrap_or_else(|| rat(1, 4))),
        "binary-alpha-2" => no_arg(binary_alpha(rat(2, 1))?),
        "same-measure" => {
            let nu = match arg {
                Some(a) => a.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>>>()?,
                None => vec![rat(1, 2), rat(1, 3), rat(1, 6)],
            };
            same_measure(nu, "same-measure")
        }
        "same-measure-uniform" => no_arg(same_measure(vec![rat(1, 3); 3], base)?),
        "same-measure-unbounded" => no_arg(same_measure(vec![rat(1, 6), rat(1, 3), rat(1, 2)], base)?),
        "hc-not-mixing" => no_arg(hc_not_mixing()),
        "geometric-mixing" => no_arg(geometric_mixing()),
        "fhc-binary" => no_arg(fhc_binary()),
        "fhc-not-mixing" => no_arg(fhc_not_mixing()),
        "trans-hc" => no_arg(trans_hc()),
        "trans-mixing" => no_arg(trans_mixing()),
        "trans-fhc" => no_arg(trans_fhc()),
        "trans-rigid" => no_arg(trans_rigid()),
        "trans-hufhc" => no_arg(trans_hufhc()),
        "hoeffbis-blocks" => no_arg(hoeffbis_blocks()),
        "shift-z" => no_arg(shift(IndexSet::Z)),
        "shift-zplus" => no_arg(shift(IndexSet::ZPlus)),
        "open-binary-three-quarters" => no_arg(entry(
            id,
            "binary odometer with μ_i(0) = 3/4: γ_i = 3/4 and ω_i(κ) ≥ 1/4, so the frequent criterion does not apply",
            odo(Alphabet::Constant(2), Measure::Binary { p0: rat(3, 4) }),
        )),
        "open-growing-alphabet" => {
            let mut e = entry(
                id,
                "odometer with m_i → ∞ (Ornstein weights, m_i = i + 2): ω_i(κ) is eventually 1",
                odo(Alphabet::Linear { offset: 2 }, Measure::Ornstein),
            );
            e.choices.push(choice("m_i = i + 2, Ornstein weights", "m_i → ∞ with a hypercyclic measure"));
            no_arg(e)
        }
        _ => Err(Error::UnknownGallery(id.to_string())),
    }
}

/// Every entry at its default parameters.
pub fn all() -> Vec<GalleryEntry> {
    IDS.iter().map(|id| lookup(id).expect("built-in id")).collect()
}

fn ornstein() -> GalleryEntry {
    let mut e = entry(
        "ornstein",
        "Ornstein odometer: Ω_i = ⟦0, i⟧, μ_i(0) = 1/2, μ_i(j) = 1/(2i)",
        odo(Alphabet::Linear { offset: 1 }, Measure::Ornstein),
    );
    let src = "C_𝔬 is (bounded and) hypercyclic";
    e.rules = vec![rule("bounded", Expect::Holds, src), rule("hc-spread", Expect::Holds, src)];
    e.asymptotics = vec![
        seq(Quantity::Eta, Relation::Eq, "μ_i(0) = 1/2", |_| exact(rat(1, 2))),
        seq(Quantity::Delta, Relation::Eq, "μ_i(j) = 1/2i", |i| exact(rat(1, 2 * i as i64))),
    ];
    e.witnesses = vec![witness(WitnessCall::Transitivity { epsilon: rat(1, 5) }, src)];
    e
}

fn binary_alpha(alpha: Rational) -> Result<GalleryEntry> {
    if alpha <= Rational::zero() {
        return Err(Error::Domain("α must be positive".into()));
    }
    let id = if alpha == rat(2, 1) { "binary-alpha-2".to_string() } else { format!("binary-alpha:{}", render_rational(&alpha)) };
    let mut e = entry(
        &id,
        "binary odometer with μ_i(0) = 1/2 + i^(-α) (uniform while i^(-α) ≥ 1/2)",
        odo(Alphabet::Constant(2), Measure::BinaryAlpha { alpha: alpha.clone() }),
    );
    e.choices.push(choice("μ_i uniform while i^(-α) ≥ 1/2", "μ_i(0) = 1/2 + i^(-α) must be a probability"));
    e.rules.push(rule("bounded", Expect::Holds, "C_𝔬 is easily seen to be bounded on L_p, for any α > 0"));
    let a = rational_to_f64(&alpha);
    let integer = alpha.is_integer();
    let alpha_int = alpha.clone();
    e.asymptotics.push(seq(Quantity::Eta, Relation::Eq, "μ_i(0) = 1/2 + 1/i^α", move |i| {
        if integer {
            let t = Rational::one() / num_traits::pow::pow(Rational::from_integer(BigInt::from(i)), rational_to_f64(&alpha_int) as usize);
            (t < rat(1, 2)).then(|| Target::Exact(rat(1, 2) + t))
        } else {
            let t = (i as f64).powf(-a);
            (t < 0.5).then_some(Target::Float(0.5 + t))
        }
    }));
    if a < 0.5 {
        let src = "if α ∈ (0, 1/2), then C_𝔬 is hypercyclic";
        e.rules.push(rule("hc-hoeffding", Expect::Holds, src));
        e.witnesses.push(witness(WitnessCall::Transitivity { epsilon: rat(1, 10) }, src));
    } else if a > 1.0 {
        e.rules.push(rule("power-bounded", Expect::Holds, "the infinite product ∏(η_i/δ_i) is convergent"));
    }
    Ok(e)
}

fn same_measure(nu: Vec<Rational>, id: &str) -> Result<GalleryEntry> {
    let n = nu.len() as u64;
    if n < 2 {
        return Err(Error::Domain("ν needs at least two symbols".into()));
    }
    let mut e = entry(
        id,
        "odometer with every μ_i equal to one measure ν on ⟦0, N−1⟧",
        odo(Alphabet::Constant(n), Measure::List { weights: vec![nu.clone()], repeat: Repeat::Cycle }),
    );
    let bounded = nu[0] >= nu[nu.len() - 1];
    let uniform = nu.iter().all(|w| *w == nu[0]);
    let src = "C_𝔬 is bounded on L_p if and only if ν(0) ≥ ν(N−1)";
    e.rules.push(rule("bounded", if bounded { Expect::Holds } else { Expect::Fails }, src));
    if bounded {
        let src = "hypercyclic if and only if ν is not the uniform distribution";
        e.rules.push(rule("hc-spread", if uniform { Expect::Fails } else { Expect::Holds }, src));
    }
    Ok(e)
}

fn hc_not_mixing() -> GalleryEntry {
    let mut e = entry(
        "hc-not-mixing",
        "odometer with two geometric flanks (ratio 1/2) around a central peak c_i, m_i = i + 1",
        odo(Alphabet::Linear { offset: 1 }, Measure::PeakSplit),
    );
    e.choices.push(choice("m_i = i + 1", "any sequence works; this one visits both parities"));
    e.rules = vec![
        rule("bounded", Expect::Holds, "μ_i(j−1)/μ_i(j) ∈ {1/2; 2}"),
        rule("hc-spread", Expect::Holds, "η_i − δ_i ≥ 1/8"),
        rule("mixing-kappa", Expect::Fails, "κ_i ≤ 7/8 for all i"),
    ];
    e.asymptotics = vec![
        seq(Quantity::Eta, Relation::Ge, "c_i ≥ 1/4", |_| exact(rat(1, 4))),
        seq(Quantity::Spread, Relation::Ge, "η_i − δ_i ≥ 1/8", |_| exact(rat(1, 8))),
        seq(Quantity::Kappa, Relation::Le, "κ_i ≤ 7/8", |_| exact(rat(7, 8))),
    ];
    e.witnesses = vec![witness(WitnessCall::Transitivity { epsilon: rat(1, 5) }, "η_i − δ_i ≥ 1/8")];
    e
}

fn geometric_mixing() -> GalleryEntry {
    let mut e = entry(
        "geometric-mixing",
        "odometer with μ_i(j) = (i/(i+1)) c_i^j, Σ_{j<m_i} c_i^j = (i+1)/i, m_i = 3",
        odo(Alphabet::Constant(3), Measure::GeometricC),
    );
    e.solver = Some(SolverSpec::GeometricC { m: 3 });
    e.choices.push(choice("m_i = 3", "any (m_i) with m_i ≥ 2; m_i = 2 would repeat fhc-binary"));
    e.choices.push(choice("k = 100 for the mixing witness", "top digit l ≥ 5, since μ(B) ≤ l/(l+2)"));
    e.choices.push(choice("μ_1 uniform", "the formula starts at i = 2"));
    let src = "C_𝔬 is topologically mixing";
    e.rules = vec![
        rule("bounded", Expect::Holds, src),
        rule("mixing-max-weight", Expect::Holds, src),
        rule("mixing-kappa", Expect::Holds, src),
        rule("ufhc-max-weight-interval", Expect::Holds, "μ_i(0) → 1"),
    ];
    e.asymptotics = vec![
        seq(Quantity::Eta, Relation::Eq, "μ_i(0) = i/(i+1)", |i| (i >= 2).then(|| Target::Exact(rat(i as i64, i as i64 + 1)))),
        seq(Quantity::Kappa, Relation::Ge, "κ_i ≥ η_i", |i| (i >= 2).then(|| Target::Exact(rat(i as i64, i as i64 + 1)))),
    ];
    e.witnesses = vec![witness(WitnessCall::Mixing { k: 100, epsilon: rat(3, 10) }, src)];
    e
}

fn fhc_binary() -> GalleryEntry {
    let mut e = entry(
        "fhc-binary",
        "binary odometer with μ_i(0) = 1 − 1/(i+1)",
        odo(Alphabet::Constant(2), Measure::BinaryHarmonic),
    );
    let src = "C_𝔬 is frequently hypercyclic";
    e.rules = vec![
        rule("bounded", Expect::Holds, "= l/(l−1)!"),
        rule("mixing-max-weight", Expect::Holds, "μ_i(0) = 1 − 1/(i+1)"),
        rule("fhc-bounded-mixing", Expect::Holds, src),
        rule("fhc-bounded-alphabet", Expect::Holds, src),
    ];
    e.asymptotics = vec![
        seq(Quantity::Eta, Relation::Eq, "μ_i(0) = 1 − 1/(i+1)", |i| exact(rat(i as i64, i as i64 + 1))),
        seq(Quantity::Omega, Relation::Eq, "ω_i(κ) = μ_i(1) for κ < 1/4", |i| exact(rat(1, i as i64 + 1))),
    ];
    e.witnesses = vec![
        witness(WitnessCall::Fhc { epsilon: rat(1, 20), kappa: rat(1, 8) }, src),
        witness(WitnessCall::UfhcCount { epsilon: rat(1, 2), kappa: rat(1, 5) }, src),
    ];
    e
}

fn fhc_not_mixing() -> GalleryEntry {
    let mut e = entry(
        "fhc-not-mixing",
        "binary odometer in blocks of three: μ_{3k+1}(0) = μ_{3k+2}(0) = 1 − 1/(k+1), μ_{3k+3}(0) = 1/2",
        odo(Alphabet::Constant(2), Measure::TripleBlocks),
    );
    e.choices.push(choice("μ_1 = μ_2 uniform", "1 − 1/(k+1) vanishes at k = 0"));
    let src = "frequently hypercyclic, but not topologically mixing";
    e.rules = vec![
        rule("bounded", Expect::Holds, src),
        rule("fhc-gamma-omega", Expect::Holds, "γ_{n_k} = 1−1/(k+1)"),
        rule("mixing-max-weight", Expect::Fails, "η_{3k+3} = 1/2"),
    ];
    let k_of = |i: usize, r: usize| (i >= 4 && i % 3 == r).then(|| ((i - r) / 3) as i64);
    e.asymptotics = vec![
        seq(Quantity::Gamma, Relation::Eq, "γ_{n_k} = 1−1/(k+1)", move |i| k_of(i, 2).map(|k| Target::Exact(rat(k, k + 1)))),
        seq(Quantity::Omega, Relation::Eq, "ω_{n_k−1}(1/5) = 1/(k+1)", move |i| k_of(i, 1).map(|k| Target::Exact(rat(1, k + 1)))),
        seq(Quantity::Eta, Relation::Eq, "η_{3k+3} = 1/2", |i| (i % 3 == 0).then(|| Target::Exact(rat(1, 2)))),
    ];
    e.witnesses = vec![
        witness(WitnessCall::Fhc { epsilon: rat(1, 10), kappa: rat(1, 5) }, "ω_{n_k−1}(1/5) = 1/(k+1)"),
        witness(WitnessCall::UfhcCount { epsilon: rat(1, 2), kappa: rat(1, 5) }, src),
    ];
    e
}

fn trans_hc() -> GalleryEntry {
    let mut e = entry(
        "trans-hc",
        "diagonal translation, m_i = 2^i, uniform head and geometric tail of length ⌊m_i/2⌋ with ρ_i = 1 + i^(-2)",
        trans(
            Alphabet::Doubling { scale: 1 },
            Measure::TwoInterval { fraction: rat(1, 2), delta: DeltaRule::InversePower(rat(2, 1)) },
        ),
    );
    e.choices = vec![
        choice("i_s = s (every coordinate)", "Σ 1/m_{i_s} < ∞"),
        choice("δ_s = s^(-2)", "δ_s m_{i_s} → ∞ and Σ δ_s < ∞"),
    ];
    let src = "C_𝔱 is hypercyclic";
    e.rules = vec![
        rule("bounded", Expect::Holds, "the infinite product ∏ ρ_s is convergent"),
        rule("hc-translation-disjoint", Expect::Holds, "limsup β_i ≥ limsup μ_{i_s}(D_{i_s}) = 1"),
    ];
    e.witnesses = vec![witness(WitnessCall::SingleCoordinate { epsilon: rat(1, 10), horizon: 14 }, src)];
    e
}

fn trans_mixing() -> GalleryEntry {
    let mut e = entry(
        "trans-mixing",
        "diagonal translation, m_i = 2^(i+2), geometric tail of length ⌊m_i/4⌋ with ρ_i = 1 + i^(-2)",
        trans(
            Alphabet::Doubling { scale: 4 },
            Measure::TwoInterval { fraction: rat(1, 4), delta: DeltaRule::InversePower(rat(2, 1)) },
        ),
    );
    e.choices = vec![
        choice("m_i = 4·2^i, κ = 1/4", "κ m_{i+1} + 1 ≤ (1−κ) m_i"),
        choice("δ_i = i^(-2)", "m_i δ_i → ∞ and Σ δ_i < ∞"),
    ];
    e.rules = vec![
        rule("bounded", Expect::Holds, "the convergence of ∏ ρ_i ensures the boundedness"),
        rule("mixing-translation-disjoint", Expect::Holds, "C_𝔱 is topologically mixing"),
        rule("hc-translation-disjoint", Expect::Holds, "μ_i(D_i) → 1"),
    ];
    e.witnesses = vec![witness(WitnessCall::SingleCoordinate { epsilon: rat(1, 10), horizon: 14 }, "μ_i(D_i) → 1")];
    e
}

fn three_interval_entry(id: &str, summary: &'static str, alphabet: Alphabet, delta: DeltaRule) -> GalleryEntry {
    entry(id, summary, trans(alphabet, Measure::ThreeInterval { start: 5, delta }))
}

fn trans_fhc() -> GalleryEntry {
    let mut e = three_interval_entry(
        "trans-fhc",
        "diagonal translation, m_i = 2^i, three intervals of lengths m_i − 2n_i, n_i, n_i with n_i = ⌊m_i/5⌋ and ρ_i = 1 + i^(-2)",
        Alphabet::Doubling { scale: 1 },
        DeltaRule::InversePower(rat(2, 1)),
    );
    e.choices = vec![
        choice("m_i = 2^i", "m_{i+1} a multiple of m_i, m_i → ∞"),
        choice("δ_i = i^(-2)", "Σ δ_i < ∞ and limsup δ_i m_i = ∞"),
        choice("μ_i uniform for i < 5", "any probability measure below i = 5"),
    ];
    let src = "C_𝔱 is frequently hypercyclic";
    e.rules = vec![rule("bounded", Expect::Holds, "the convergence of the infinite product ∏ ρ_i")];
    e.witnesses = vec![witness(WitnessCall::IntervalFhc { epsilon: rat(1, 10), kappa: rat(1, 6), horizon: 16 }, src)];
    e
}

fn trans_rigid() -> GalleryEntry {
    let mut e = three_interval_entry(
        "trans-rigid",
        "diagonal translation, m_i = 2^(i(i+1)/2), three intervals with δ_i = 2^(-i/2)/m_{i−1}",
        Alphabet::TriangularPower,
        DeltaRule::HalfPowerOverPrevious,
    );
    e.choices = vec![
        choice("m_i = 2^(i(i+1)/2)", "m_{i+1} a multiple of m_i with m_{i+1}/m_i unbounded"),
        choice("δ_i = 2^(-i/2)/m_{i−1}", "limsup δ_i m_i = ∞ and Σ δ_i m_{i−1} < ∞"),
    ];
    let src = "topologically rigid along (m_i)";
    e.rules = vec![
        rule("bounded", Expect::Holds, "sup ‖C_𝔱^{m_i}‖ < ∞"),
        rule("mixing-translation-disjoint", Expect::Fails, "In particular, C_𝔱 is not topologically mixing"),
    ];
    e.witnesses = vec![
        witness(WitnessCall::Rigidity { max_i: 8, depth: 6, enumerate_depth: 3 }, src),
    ];
    e
}

fn trans_hufhc() -> GalleryEntry {
    let mut e = entry(
        "trans-hufhc",
        "diagonal translation, n_i = 2^i, m_i = 3n_i, geometric tail J_{2,i} of length n_i with ρ_i = 1 + i^(-2)",
        trans(
            Alphabet::Doubling { scale: 3 },
            Measure::TwoInterval { fraction: rat(1, 3), delta: DeltaRule::InversePower(rat(2, 1)) },
        ),
    );
    e.choices = vec![choice("δ_i = i^(-2)", "bounded with μ_i(J_{2,i}) → 1")];
    let src = "C_𝔱 is hereditarily 𝒰-frequently hypercyclic";
    e.rules = vec![rule("bounded", Expect::Holds, "C_𝔱 is bounded on L_p(Ω,μ) and μ_i(J_{2,i}) → 1")];
    e.witnesses = vec![
        witness(WitnessCall::TailUfhc { epsilon: rat(1, 10), residues: ResidueSet::all(), horizon: 16 }, src),
        witness(WitnessCall::TailUfhc { epsilon: rat(1, 10), residues: ResidueSet { modulus: 3, residues: vec![1] }, horizon: 16 }, src),
    ];
    e
}

fn hoeffbis_blocks() -> GalleryEntry {
    let mut e = entry(
        "hoeffbis-blocks",
        "diagonal translation, m_i = 2^(l+1) for l² ≤ i < (l+1)², n_i = m_i/2 uniform then geometric symbols with ρ_i = 1 + 1/n_i",
        trans(Alphabet::DyadicBlocks, Measure::TwoInterval { fraction: rat(1, 2), delta: DeltaRule::InverseTail }),
    );
    e.solver = Some(SolverSpec::SumEpsilon { head: 2, rho: rat(3, 2), n: 2 });
    e.choices.push(choice("l = 1 for i < 4", "the block rule starts at l = 1"));
    e.rules = vec![
        rule("bounded", Expect::Holds, "Σ δ_i < ∞"),
        rule("hc-translation-hoeffding", Expect::Holds, "C_𝔱 is hypercyclic"),
        rule("hc-translation-disjoint", Expect::Fails, "limsup β_i < 1"),
    ];
    e.asymptotics = vec![seq(
        Quantity::Beta,
        Relation::Eq,
        "((1+2^{-l})^{2^l}−1)/((1+2^{-l})^{2^l})",
        |i| {
            let l = crate::spec::isqrt(i as u64);
            let n = (1u64 << l) as f64;
            let q = (1.0 + 1.0 / n).powf(n);
            (l <= 7).then_some(Target::Float((q - 1.0) / q))
        },
    )];
    e
}

/// ε_i of a block: the exact solution of n ε + (ρ^n − 1)/(ρ − 1) ε = 1.
pub fn hoeffbis_epsilon(l: u32) -> Result<Rational> {
    let n = 1u64 << l;
    solve::sum_epsilon(n, &(Rational::one() + rat(1, n as i64)), n as u32)
}

fn shift(index: IndexSet) -> GalleryEntry {
    let (id, summary) = match index {
        IndexSet::Z => ("shift-z", "weighted shift on ℤ with ν_i = 2^(-|i|)"),
        IndexSet::ZPlus => ("shift-zplus", "weighted shift on ℤ₊ with ν_i = 2^(-i)"),
    };
    let mut e = entry(id, summary, AnySpec::Shift(ShiftSpec { index, weights: ShiftWeights::Geometric { base: rat(1, 2) } }));
    let src = "C_φ is frequently hypercyclic on L_p(Ω,μ)";
    e.rules = vec![
        rule("bounded", Expect::Holds, "sup_{i∈Ω} μ(i)/μ(φ(i)) < ∞"),
        rule("supercyclic-shift", Expect::Holds, "ν_{i+n_k} ν_{i−n_k} → 0"),
        rule("fhc-shift", Expect::Holds, src),
    ];
    e.witnesses = vec![witness(WitnessCall::ShiftFhc(ShiftFhcParams::default()), src)];
    e
}

// ---------------------------------------------------------------------------
// the expectation suite

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub horizon: usize,
    pub ladder: LadderOptions,
    /// overrides the per-entry default
    pub backend: Option<Backend>,
    pub kappa: Rational,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { horizon: 120, ladder: LadderOptions::default(), backend: None, kappa: rat(1, 5) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Consistent,
    /// the artifact could not decide
    Unresolved,
    Contradiction,
    /// open entries: values only
    Reported,
}

impl Outcome {
    pub fn tag(self) -> &'static str {
        match self {
            Outcome::Consistent => "consistent",
            Outcome::Unresolved => "unresolved",
            Outcome::Contradiction => "contradiction",
            Outcome::Reported => "reported",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub id: String,
    /// rule, sequence, witness or report
    pub kind: &'static str,
    pub name: String,
    pub source: String,
    pub outcome: Outcome,
    pub detail: String,
}

fn finding(e: &GalleryEntry, kind: &'static str, name: String, source: &str, outcome: Outcome, detail: String) -> Finding {
    Finding { id: e.id.clone(), kind, name, source: source.to_string(), outcome, detail }
}

pub fn verify_entry(e: &GalleryEntry, o: &VerifyOptions) -> Vec<Finding> {
    match o.backend.unwrap_or_else(|| e.default_backend(o.horizon)) {
        Backend::Rational => verify_with::<Rational>(e, o),
        Backend::Float => verify_with::<f64>(e, o),
    }
}

pub fn verify_all(entries: &[GalleryEntry], o: &VerifyOptions) -> Vec<Finding> {
    entries.iter().flat_map(|e| verify_entry(e, o)).collect()
}

fn eval_params(o: &VerifyOptions) -> EvalParams {
    EvalParams { horizon: o.horizon, kappa: o.kappa.clone(), ..Default::default() }
}

fn verify_with<S: Scalar>(e: &GalleryEntry, o: &VerifyOptions) -> Vec<Finding> {
    let mut out = Vec::new();
    let params = eval_params(o);

    if e.is_open() {
        match verdict::classify::<S>(&e.spec, &params) {
            Ok(vs) => {
                for v in vs {
                    out.push(finding(e, "report", v.rule.clone(), "", Outcome::Reported, v.status.tag().to_string()));
                }
            }
            Err(err) => out.push(finding(e, "report", "classify".into(), "", Outcome::Contradiction, err.to_string())),
        }
        return out;
    }

    for r in &e.rules {
        let (outcome, detail) = match verdict::evaluate::<S>(&e.spec, r.rule, &params) {
            Ok(v) => {
                let contradicts = match r.expect {
                    Expect::Holds => v.status == Status::Violated,
                    Expect::Fails => v.status.holds(),
                };
                let outcome = if contradicts {
                    Outcome::Contradiction
                } else if v.status == Status::Inconclusive {
                    Outcome::Unresolved
                } else {
                    Outcome::Consistent
                };
                (outcome, v.status.tag().to_string())
            }
            Err(err) => (Outcome::Contradiction, err.to_string()),
        };
        let name = format!("{} {}", r.rule, if r.expect == Expect::Holds { "holds" } else { "fails" });
        out.push(finding(e, "rule", name, r.source, outcome, detail));
    }

    if !e.asymptotics.is_empty() {
        if let AnySpec::Product(spec) = &e.spec {
            let opts = TableOptions { kappa: o.kappa.clone(), ..Default::default() };
            match build_table::<S>(spec, o.horizon, &opts) {
                Ok(table) => {
                    for a in &e.asymptotics {
                        out.push(check_sequence(e, a, &table.rows));
                    }
                }
                Err(err) => out.push(finding(e, "sequence", "table".into(), "", Outcome::Contradiction, err.to_string())),
            }
        }
    }

    for w in &e.witnesses {
        let (outcome, detail) = match w.call.run::<S>(&e.spec, &o.ladder, o.horizon) {
            Ok(rep) if rep.pass => (Outcome::Consistent, format!("{} checks pass", rep.checks.len())),
            Ok(rep) => {
                let failed: Vec<String> = rep.failed().iter().map(|c| c.inequality.clone()).collect();
                (Outcome::Contradiction, format!("failed: {}", failed.join("; ")))
            }
            Err(err) => (Outcome::Contradiction, err.to_string()),
        };
        out.push(finding(e, "witness", w.call.name().to_string(), w.source, outcome, detail));
    }
    out
}

fn check_sequence<S: Scalar>(e: &GalleryEntry, a: &Asymptotic, rows: &[IndexRow<S>]) -> Finding {
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for row in rows {
        let (Some(target), Some(value)) = ((a.value)(row.i), a.quantity.read(row)) else { continue };
        checked += 1;
        let ok = match &target {
            Target::Exact(t) => a.relation.holds(&value, &S::from_rational(t)),
            Target::Float(t) => {
                let v = value.as_f64();
                match a.relation {
                    Relation::Eq => (v - t).abs() <= FLOAT_SLACK,
                    Relation::Le | Relation::Lt => v <= t + FLOAT_SLACK,
                    Relation::Ge | Relation::Gt => v >= t - FLOAT_SLACK,
                }
            }
        };
        if !ok && bad.len() < 3 {
            bad.push(format!("i={}: {}", row.i, value.render()));
        }
    }
    let name = format!("{} {} closed form", a.quantity.name(), a.relation.symbol());
    let (outcome, detail) = if !bad.is_empty() {
        (Outcome::Contradiction, bad.join(", "))
    } else if checked == 0 {
        (Outcome::Unresolved, "no index in range".to_string())
    } else {
        (Outcome::Consistent, format!("{checked} indices"))
    };
    finding(e, "sequence", name, a.source, outcome, detail)
}

/// Findings as TSV, one row each.
pub fn findings_tsv(findings: &[Finding]) -> String {
    let mut out = String::from("id\tkind\tname\toutcome\tdetail\tsource\n");
    for f in findings {
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\n", f.id, f.kind, f.name, f.outcome.tag(), f.detail, f.source));
    }
    out
}

pub fn contradictions(findings: &[Finding]) -> Vec<&Finding> {
    findings.iter().filter(|f| f.outcome == Outcome::Contradiction).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_resolves_and_round_trips() {
        for e in all() {
            let back = AnySpec::from_json(&e.spec.to_json()).unwrap();
            assert_eq!(back, e.spec, "{}", e.id);
        }
        assert!(lookup("nope").is_err());
        assert!(lookup("ornstein:3").is_err());
        assert_eq!(lookup("binary-alpha:1/3").unwrap().id, "binary-alpha:1/3");
    }

    #[test]
    fn open_entries_carry_no_expectation() {
        let open: Vec<_> = all().into_iter().filter(|e| e.is_open()).map(|e| e.id).collect();
        assert_eq!(open, vec!["open-binary-three-quarters", "open-growing-alphabet"]);
    }

    #[test]
    fn same_measure_expectations_follow_nu() {
        let u = lookup("same-measure-unbounded").unwrap();
        assert_eq!(u.rules.len(), 1);
        assert_eq!(u.rules[0].expect, Expect::Fails);
        let h = lookup("same-measure:1/4,1/4,1/4,1/4").unwrap();
        assert_eq!(h.rules[1].expect, Expect::Fails);
    }

    #[test]
    fn block_epsilon_matches_the_beta_closed_form() {
        for l in 1..=7u32 {
            let n = 1i64 << l;
            let beta = Rational::one() - rat(n, 1) * hoeffbis_epsilon(l).unwrap();
            let q = (1.0 + 1.0 / n as f64).powf(n as f64);
            assert!((rational_to_f64(&beta) - (q - 1.0) / q).abs() < 1e-12);
        }
    }
}
