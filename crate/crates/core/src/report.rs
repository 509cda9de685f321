//! Flat report files: TSV for sequences, JSON documents for verdicts and
//! witnesses.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::criteria::verdict::Verdict;
use crate::gallery::GalleryEntry;
use crate::maps::{BoundReport, NormProbe};
use crate::scalar::Scalar;
use crate::witness::WitnessReport;

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Columns l, value, running_sup.
pub fn bound_tsv<S: Scalar>(r: &BoundReport<S>) -> String {
    let mut out = String::from("l\tvalue\trunning_sup\n");
    for (l, (v, s)) in r.values.iter().zip(&r.running_sup).enumerate() {
        out.push_str(&format!("{}\t{}\t{}\n", l + 1, v.render(), s.render()));
    }
    out
}

pub fn bound_json<S: Scalar>(r: &BoundReport<S>) -> Value {
    json!({
        "kind": r.kind.name(),
        "horizon": r.horizon,
        "verdict": r.verdict,
        "sup": r.sup().render(),
        "norm_estimate_p1": r.norm_estimate(1.0),
    })
}

pub fn norms_tsv<S: Scalar>(probes: &[NormProbe<S>]) -> String {
    let mut out = String::from("n\tratio_sup\targmax\tresolved_fraction\n");
    for p in probes {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            p.n,
            p.ratio_sup.render(),
            p.argmax,
            crate::scalar::fmt_sig(p.resolved_fraction)
        ));
    }
    out
}

pub fn verdicts_json(target: &str, backend: &str, verdicts: &[Verdict]) -> Value {
    json!({
        "target": target,
        "backend": backend,
        "verdicts": verdicts,
    })
}

/// status column per rule, for quick reading
pub fn verdicts_tsv(verdicts: &[Verdict]) -> String {
    let mut out = String::from("rule\tstatus\tmode\tstatement\n");
    for v in verdicts {
        let mode = serde_json::to_value(v.mode).ok().and_then(|m| m.as_str().map(str::to_string)).unwrap_or_default();
        out.push_str(&format!("{}\t{}\t{}\t{}\n", v.rule, v.status.tag(), mode, v.statement));
    }
    out
}

pub fn witness_json(target: &str, backend: &str, report: &WitnessReport) -> Value {
    json!({
        "target": target,
        "backend": backend,
        "construction": report.construction,
        "pass": report.pass,
        "params": report.params,
        "checks": report.checks,
    })
}

pub fn gallery_tsv(entries: &[GalleryEntry]) -> String {
    let mut out = String::from("id\tkind\topen\trules\tsequences\twitnesses\tsummary\n");
    for e in entries {
        let kind = match &e.spec {
            crate::AnySpec::Product(s) => s.kind.name(),
            crate::AnySpec::Shift(_) => "shift",
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            e.id,
            kind,
            e.is_open() as u8,
            e.rules.len(),
            e.asymptotics.len(),
            e.witnesses.len(),
            e.summary
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::boundedness;
    use crate::scalar::{rat, Rational};
    use crate::spec::{Alphabet, MapKind, Measure, SystemSpec};

    #[test]
    fn bound_tsv_has_one_row_per_level() {
        let spec = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::Binary { p0: rat(1, 4) });
        let r = boundedness::<Rational>(&spec, 5).unwrap();
        let tsv = bound_tsv(&r);
        assert_eq!(tsv.lines().count(), r.values.len() + 1);
        assert!(tsv.lines().nth(1).unwrap().starts_with("1\t"));
    }

    #[test]
    fn gallery_listing_covers_every_id() {
        let tsv = gallery_tsv(&crate::gallery::all());
        assert_eq!(tsv.lines().count(), crate::gallery::IDS.len() + 1);
    }

    #[test]
    fn write_creates_the_directory() {
        let dir = std::env::temp_dir().join(format!("odolab-report-{}", std::process::id()));
        let p = write(&dir.join("nested"), "x.tsv", "a\tb\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a\tb\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
