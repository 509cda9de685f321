use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use odolab::criteria::table::{build_table, TableOptions};
use odolab::criteria::verdict::{self, EvalParams, Status, Verdict};
use odolab::function::orbit_trace;
use odolab::gallery::{self, Expect, GalleryEntry, VerifyOptions, WitnessCall};
use odolab::maps::{self, BoundVerdict};
use odolab::scalar::parse_rational;
use odolab::space::{build_truncation, DepthSet, SimpleFunction, TruncatedSpace, DEFAULT_CAP};
use odolab::witness::shift::ShiftFhcParams;
use odolab::witness::translation::{self, ResidueSet};
use odolab::witness::{LadderOptions, WitnessReport};
use odolab::{report, AnySpec, Backend, Error, MapKind, Rational, Scalar, SystemSpec};

#[derive(Parser)]
#[command(name = "odolab", version, about = "Criteria, witnesses and orbit traces for odometer, translation and shift composition operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// last index i examined (orbit: last iterate n)
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// truncation depth N
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, value_parser = rational)]
    epsilon: Option<Rational>,
    #[arg(long, global = true, value_parser = rational)]
    kappa: Option<Rational>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// largest number of cells enumerated exhaustively
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true, value_parser = backend)]
    backend: Option<Backend>,
    /// directory for report files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Boundedness and every applicable criterion
    Classify {
        /// gallery id, spec file, or inline JSON
        target: String,
        /// translation shifts n examined
        #[arg(long)]
        shifts: Option<u64>,
    },
    /// Per-index criterion quantities as TSV
    Sequences {
        target: String,
        /// also tabulate translation shifts 1..=n
        #[arg(long, default_value_t = 0)]
        shifts: u64,
    },
    /// Run a witness construction and re-check its inequalities
    Witness {
        target: String,
        /// transitivity, mixing, fhc, ufhc-count, single-coordinate,
        /// interval-fhc, tail-ufhc, rigidity, shift-fhc; registered ones if omitted
        #[arg(long)]
        construction: Option<String>,
        /// odometer shift k for mixing
        #[arg(long)]
        shift: Option<u64>,
        /// A as "q:r1,r2,..." or "all" for tail-ufhc
        #[arg(long)]
        residues: Option<String>,
    },
    /// Orbit of a simple function under C^n and its visits to an ε-ball
    Orbit {
        target: String,
        /// "cyl:d1,d2,..." (cylinder indicator) or "const:c"
        #[arg(long, default_value = "cyl:0")]
        f: String,
        #[arg(long, default_value = "cyl:0")]
        g: String,
        #[arg(long, default_value = "2", value_parser = rational)]
        p: Rational,
    },
    /// Boundedness values and lower bounds for ‖C^n‖^p
    Norms {
        target: String,
        /// number of powers n probed on the truncation
        #[arg(long, default_value_t = 16)]
        probes: u64,
        /// also run the power-boundedness probe (translations)
        #[arg(long)]
        rigidity: bool,
    },
    /// List gallery entries
    GalleryList {
        /// full entries as JSON
        #[arg(long)]
        json: bool,
    },
    /// Check every registered expectation of the gallery
    VerifyGallery {
        /// restrict to these ids
        ids: Vec<String>,
    },
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn backend(s: &str) -> Result<Backend, String> {
    s.parse::<Backend>().map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidSpec(_)
            | Error::UnknownGallery(_)
            | Error::UnknownTheorem(_)
            | Error::WrongKind { .. }
            | Error::CapExceeded { .. }
            | Error::Domain(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

/// Ok(true) when every check passed.
type Run = Result<bool, Failure>;

struct Target {
    label: String,
    spec: AnySpec,
    entry: Option<GalleryEntry>,
}

impl Target {
    fn resolve(text: &str) -> Result<Target, Failure> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return Ok(Target { label: "inline".into(), spec: AnySpec::parse(text)?, entry: None });
        }
        let path = Path::new(text);
        if path.is_file() {
            let body = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{text}: {e}")))?;
            return Ok(Target { label: text.to_string(), spec: AnySpec::parse(&body)?, entry: None });
        }
        match gallery::lookup(text) {
            Ok(e) => Ok(Target { label: e.id.clone(), spec: e.spec.clone(), entry: Some(e) }),
            Err(Error::UnknownGallery(_)) => {
                Err(Failure::Usage(format!("`{text}` is not a gallery id, a spec file or inline JSON")))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn product(&self) -> Result<&SystemSpec, Failure> {
        match &self.spec {
            AnySpec::Product(s) => Ok(s),
            AnySpec::Shift(_) => Err(Error::WrongKind { expected: "product system" }.into()),
        }
    }
}

struct Ctx {
    opts: Opts,
    target: Target,
    backend: Backend,
}

impl Ctx {
    fn horizon(&self, default: usize) -> usize {
        self.opts.horizon.unwrap_or(default)
    }

    fn kappa(&self, default: (i64, i64)) -> Rational {
        self.opts.kappa.clone().unwrap_or_else(|| odolab::scalar::rat(default.0, default.1))
    }

    fn epsilon(&self, default: (i64, i64)) -> Rational {
        self.opts.epsilon.clone().unwrap_or_else(|| odolab::scalar::rat(default.0, default.1))
    }

    fn ladder(&self) -> LadderOptions {
        ladder(&self.opts)
    }

    fn backend_tag(&self) -> &'static str {
        match self.backend {
            Backend::Rational => "rational",
            Backend::Float => "float",
        }
    }

    fn emit(&self, name: &str, contents: &str) -> Result<(), Failure> {
        emit(&self.opts, name, contents)
    }
}

/// Writes under --out when given; reports the path on stderr.
fn emit(opts: &Opts, name: &str, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = &opts.out {
        let p = report::write(dir, name, contents).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn ladder(opts: &Opts) -> LadderOptions {
    let d = LadderOptions::default();
    LadderOptions {
        seed: opts.seed.unwrap_or(d.seed),
        trials: opts.trials.unwrap_or(d.trials),
        cap: opts.cap.unwrap_or(d.cap),
    }
}

macro_rules! with_backend {
    ($ctx:expr, $f:ident ( $($arg:expr),* )) => {
        match $ctx.backend {
            Backend::Rational => $f::<Rational>($($arg),*),
            Backend::Float => $f::<f64>($($arg),*),
        }
    };
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap_or_default() + "\n"
}

// ---------------------------------------------------------------------------

fn classify<S: Scalar>(ctx: &Ctx, shifts: Option<u64>) -> Run {
    let horizon = ctx.horizon(200);
    let params = EvalParams {
        horizon,
        kappa: ctx.kappa((1, 5)),
        epsilon: ctx.opts.epsilon.as_ref().map(odolab::scalar::rational_to_f64).unwrap_or(0.1),
        shifts: shifts.unwrap_or(64),
        ..Default::default()
    };
    let mut ok = true;
    if let AnySpec::Product(spec) = &ctx.target.spec {
        let bound = maps::boundedness::<S>(spec, horizon)?;
        if let BoundVerdict::UnboundedWitness(l) = bound.verdict {
            eprintln!("bounded: violated, unbounded-witness({l})");
            ok = false;
        }
        ctx.emit("bound.tsv", &report::bound_tsv(&bound))?;
    }
    let verdicts = verdict::classify::<S>(&ctx.target.spec, &params)?;
    print!("{}", report::verdicts_tsv(&verdicts));
    if verdicts.iter().any(|v| v.rule == "bounded" && v.status == Status::Violated) {
        ok = false;
    }
    if let Some(entry) = &ctx.target.entry {
        ok &= expectations_hold(entry, &verdicts);
    }
    ctx.emit("verdicts.json", &pretty(&report::verdicts_json(&ctx.target.label, ctx.backend_tag(), &verdicts)))?;
    Ok(ok)
}

/// A registered expectation contradicted by a decided verdict is a failure.
fn expectations_hold(entry: &GalleryEntry, verdicts: &[Verdict]) -> bool {
    let mut ok = true;
    for r in &entry.rules {
        let Some(v) = verdicts.iter().find(|v| v.rule == r.rule) else { continue };
        let contradicts = match r.expect {
            Expect::Holds => v.status == Status::Violated,
            Expect::Fails => v.status.holds(),
        };
        if contradicts {
            eprintln!("contradiction: {} is {} but the gallery expects it to {:?} ({})", r.rule, v.status.tag(), r.expect, r.source);
            ok = false;
        }
    }
    ok
}

fn sequences<S: Scalar>(ctx: &Ctx, shifts: u64) -> Run {
    let spec = ctx.target.product()?;
    let opts = TableOptions { kappa: ctx.kappa((1, 5)), shifts, ..Default::default() };
    let table = build_table::<S>(spec, ctx.horizon(100), &opts)?;
    let tsv = table.to_tsv();
    print!("{tsv}");
    if let Some(reason) = &table.stopped {
        eprintln!("table stops at i = {}: {reason}", table.horizon());
    }
    ctx.emit("sequences.tsv", &tsv)?;
    if shifts > 0 && spec.kind == MapKind::Translation {
        let s = table.shifts_tsv();
        if ctx.opts.out.is_none() {
            print!("\n{s}");
        }
        ctx.emit("shifts.tsv", &s)?;
    }
    Ok(true)
}

fn witness_call(ctx: &Ctx, name: &str, shift: Option<u64>, residues: Option<&str>) -> Result<WitnessCall, Failure> {
    let residues = residues.map(ResidueSet::parse).transpose()?.unwrap_or_else(ResidueSet::all);
    Ok(match name {
        "transitivity" => WitnessCall::Transitivity { epsilon: ctx.epsilon((1, 10)) },
        "mixing" => WitnessCall::Mixing { k: shift.unwrap_or(100), epsilon: ctx.epsilon((3, 10)) },
        "fhc" | "frequent-hypercyclicity" => WitnessCall::Fhc { epsilon: ctx.epsilon((1, 20)), kappa: ctx.kappa((1, 8)) },
        "ufhc-count" | "u-frequent-count" => WitnessCall::UfhcCount { epsilon: ctx.epsilon((1, 2)), kappa: ctx.kappa((1, 5)) },
        "single-coordinate" => WitnessCall::SingleCoordinate { epsilon: ctx.epsilon((1, 10)), horizon: ctx.horizon(14) },
        "interval-fhc" => WitnessCall::IntervalFhc { epsilon: ctx.epsilon((1, 10)), kappa: ctx.kappa((1, 6)), horizon: ctx.horizon(16) },
        "tail-ufhc" => WitnessCall::TailUfhc { epsilon: ctx.epsilon((1, 10)), residues, horizon: ctx.horizon(16) },
        "rigidity" => {
            let depth = ctx.opts.depth.unwrap_or(6);
            WitnessCall::Rigidity { max_i: ctx.horizon(8), depth, enumerate_depth: depth.min(3) }
        }
        "shift-fhc" => {
            let d = ShiftFhcParams::default();
            WitnessCall::ShiftFhc(ShiftFhcParams { kappa: ctx.opts.kappa.clone().unwrap_or(d.kappa.clone()), n: shift.unwrap_or(d.n), ..d })
        }
        other => return Err(Failure::Usage(format!("unknown construction `{other}`"))),
    })
}

fn witness<S: Scalar>(ctx: &Ctx, construction: Option<&str>, shift: Option<u64>, residues: Option<&str>) -> Run {
    let calls: Vec<WitnessCall> = match (construction, &ctx.target.entry) {
        (Some(name), _) => vec![witness_call(ctx, name, shift, residues)?],
        (None, Some(e)) if !e.witnesses.is_empty() => e.witnesses.iter().map(|w| w.call.clone()).collect(),
        _ => return Err(Failure::Usage("--construction is required for targets without registered witnesses".into())),
    };
    let ladder = ctx.ladder();
    let horizon = ctx.horizon(200);
    let mut ok = true;
    let mut docs = Vec::new();
    for call in &calls {
        match call.run::<S>(&ctx.target.spec, &ladder, horizon) {
            Ok(rep) => {
                ok &= rep.pass;
                report_witness(ctx, call.name(), &rep)?;
                docs.push(report::witness_json(&ctx.target.label, ctx.backend_tag(), &rep));
            }
            Err(e) => match Failure::from(e) {
                Failure::Check(msg) => {
                    eprintln!("{}: {msg}", call.name());
                    ok = false;
                    docs.push(json!({"target": ctx.target.label, "construction": call.name(), "pass": false, "error": msg}));
                }
                usage => return Err(usage),
            },
        }
    }
    print!("{}", pretty(&Value::Array(docs)));
    Ok(ok)
}

fn report_witness(ctx: &Ctx, name: &str, rep: &WitnessReport) -> Result<(), Failure> {
    eprintln!("{name}: {} ({} checks)", if rep.pass { "pass" } else { "FAIL" }, rep.checks.len());
    for c in rep.failed() {
        eprintln!("  failed: {} ({} {} {})", c.inequality, c.value, c.relation.symbol(), c.bound);
    }
    ctx.emit(&format!("witness-{name}.json"), &pretty(&report::witness_json(&ctx.target.label, ctx.backend_tag(), rep)))?;
    ctx.emit(&format!("witness-{name}.tsv"), &rep.to_tsv())
}

/// "const:c" or "cyl:d1,d2,...": the cylinder is padded with full
/// coordinates up to the truncation depth.
fn parse_function<S: Scalar>(space: &TruncatedSpace<S>, text: &str) -> Result<SimpleFunction<S>, Failure> {
    let bad = |why: &str| Failure::Usage(format!("function `{text}`: {why}"));
    let (kind, body) = text.split_once(':').ok_or_else(|| bad("expected cyl:d1,d2,... or const:c"))?;
    match kind {
        "const" => Ok(SimpleFunction::constant(space, S::from_rational(&parse_rational(body)?))),
        "cyl" => {
            let digits: Vec<u64> = body.split(',').map(|d| d.trim().parse::<u64>().map_err(|_| bad("digits must be integers"))).collect::<Result<_, _>>()?;
            let radices = space.radix.radices();
            if digits.len() > radices.len() {
                return Err(bad("longer than the truncation depth"));
            }
            if digits.iter().zip(radices).any(|(d, m)| d >= m) {
                return Err(bad("digit outside its alphabet"));
            }
            let symbols: Vec<Vec<u64>> = radices
                .iter()
                .enumerate()
                .map(|(i, &m)| digits.get(i).map(|&d| vec![d]).unwrap_or_else(|| (0..m).collect()))
                .collect();
            Ok(SimpleFunction::indicator(space, &DepthSet::from_symbols(radices, &symbols)))
        }
        _ => Err(bad("expected cyl:... or const:...")),
    }
}

fn orbit<S: Scalar>(ctx: &Ctx, f: &str, g: &str, p: &Rational) -> Run {
    let spec = ctx.target.product()?;
    let space = build_truncation::<S>(spec, ctx.opts.depth.unwrap_or(3), ctx.opts.cap.unwrap_or(DEFAULT_CAP))?;
    let f = parse_function(&space, f)?;
    let g = parse_function(&space, g)?;
    let trace = orbit_trace(&space, &f, &g, &ctx.epsilon((1, 2)), p, ctx.horizon(64) as u64)?;
    let tsv = trace.to_tsv();
    print!("{tsv}");
    eprintln!(
        "period {}, visits {}, tail density in [{}, {}]",
        trace.period,
        trace.visit_set().len(),
        odolab::scalar::fmt_sig(trace.tail_lower_density),
        odolab::scalar::fmt_sig(trace.tail_upper_density)
    );
    ctx.emit("orbit.tsv", &tsv)?;
    Ok(true)
}

fn norms<S: Scalar>(ctx: &Ctx, probes: u64, rigidity: bool) -> Run {
    let spec = ctx.target.product()?;
    let bound = maps::boundedness::<S>(spec, ctx.horizon(24))?;
    let mut ok = !matches!(bound.verdict, BoundVerdict::UnboundedWitness(_));
    let bound_tsv = report::bound_tsv(&bound);
    print!("{bound_tsv}");
    eprintln!("boundedness: {}", serde_json::to_string(&bound.verdict).unwrap_or_default());
    ctx.emit("bound.tsv", &bound_tsv)?;
    ctx.emit("bound.json", &pretty(&report::bound_json(&bound)))?;

    let space = build_truncation::<S>(spec, ctx.opts.depth.unwrap_or(3), ctx.opts.cap.unwrap_or(DEFAULT_CAP))?;
    let last = probes.min(space.cells().saturating_sub(1)).max(1);
    let list: Vec<_> = (1..=last as i128).map(|n| maps::norm_probe(&space, n)).collect();
    let norms_tsv = report::norms_tsv(&list);
    if ctx.opts.out.is_none() {
        print!("\n{norms_tsv}");
    }
    ctx.emit("norms.tsv", &norms_tsv)?;

    if rigidity {
        let depth = ctx.opts.depth.unwrap_or(6);
        let rep = translation::rigidity_probe::<S>(spec, 8, depth, depth.min(3))?;
        ok &= rep.pass;
        report_witness(ctx, "rigidity", &rep)?;
    }
    Ok(ok)
}

fn gallery_list(opts: &Opts, as_json: bool) -> Run {
    let entries = gallery::all();
    if as_json {
        let v = Value::Array(entries.iter().map(|e| e.to_json()).collect());
        let s = pretty(&v);
        print!("{s}");
        emit(opts, "gallery.json", &s)?;
    } else {
        let s = report::gallery_tsv(&entries);
        print!("{s}");
        emit(opts, "gallery.tsv", &s)?;
    }
    Ok(true)
}

fn verify_gallery(opts: &Opts, ids: &[String]) -> Run {
    let entries = if ids.is_empty() {
        gallery::all()
    } else {
        ids.iter().map(|id| gallery::lookup(id)).collect::<odolab::Result<Vec<_>>>()?
    };
    let o = VerifyOptions {
        horizon: opts.horizon.unwrap_or(VerifyOptions::default().horizon),
        ladder: ladder(opts),
        backend: opts.backend,
        kappa: opts.kappa.clone().unwrap_or_else(|| VerifyOptions::default().kappa),
    };
    let findings = gallery::verify_all(&entries, &o);
    let tsv = gallery::findings_tsv(&findings);
    print!("{tsv}");
    emit(opts, "findings.tsv", &tsv)?;
    let bad = gallery::contradictions(&findings);
    for f in &bad {
        eprintln!("contradiction: {} {} {}: {}", f.id, f.kind, f.name, f.detail);
    }
    eprintln!("{} findings, {} contradictions", findings.len(), bad.len());
    Ok(bad.is_empty())
}

fn run(cli: Cli) -> Run {
    let opts = cli.opts;
    let ctx_for = |target: &str| -> Result<Ctx, Failure> {
        let target = Target::resolve(target)?;
        let backend = opts.backend.unwrap_or_else(|| gallery::backend_for(&target.spec, opts.horizon.unwrap_or(200)));
        Ok(Ctx { opts: opts.clone(), target, backend })
    };
    match &cli.command {
        Command::Classify { target, shifts } => {
            let ctx = ctx_for(target)?;
            with_backend!(ctx, classify(&ctx, *shifts))
        }
        Command::Sequences { target, shifts } => {
            let ctx = ctx_for(target)?;
            with_backend!(ctx, sequences(&ctx, *shifts))
        }
        Command::Witness { target, construction, shift, residues } => {
            let ctx = ctx_for(target)?;
            with_backend!(ctx, witness(&ctx, construction.as_deref(), *shift, residues.as_deref()))
        }
        Command::Orbit { target, f, g, p } => {
            let ctx = ctx_for(target)?;
            with_backend!(ctx, orbit(&ctx, f, g, p))
        }
        Command::Norms { target, probes, rigidity } => {
            let ctx = ctx_for(target)?;
            with_backend!(ctx, norms(&ctx, *probes, *rigidity))
        }
        Command::GalleryList { json } => gallery_list(&opts, *json),
        Command::VerifyGallery { ids } => verify_gallery(&opts, ids),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
