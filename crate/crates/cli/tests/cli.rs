use std::path::PathBuf;
use std::process::{Command, Output};

fn odolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odolab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("odolab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn classify_ornstein_succeeds_and_writes_reports() {
    let out = scratch("ornstein");
    let o = odolab(&["classify", "ornstein", "--horizon", "60", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let spread = text.lines().find(|l| l.starts_with("hc-spread\t")).expect("hc-spread row");
    assert!(spread.contains("\tsatisfied"), "{spread}");
    assert!(out.join("bound.tsv").exists());
    let verdicts: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("verdicts.json")).unwrap()).unwrap();
    assert_eq!(verdicts["target"], "ornstein");
    std::fs::remove_dir_all(out).unwrap();
}

#[test]
fn unbounded_system_exits_one() {
    let o = odolab(&["classify", "same-measure-unbounded", "--horizon", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unbounded-witness"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(odolab(&["classify", "no-such-system"]).status.code(), Some(2));
    assert_eq!(odolab(&["witness", "ornstein", "--construction", "nonsense"]).status.code(), Some(2));
    assert_eq!(odolab(&["classify", "{\"kind\": \"odometer\""]).status.code(), Some(2));
}

#[test]
fn sequences_show_the_fhc_not_mixing_pattern() {
    let o = odolab(&["sequences", "fhc-not-mixing", "--horizon", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split('\t').collect();
    let col = header.iter().position(|&h| h == "gamma").unwrap();
    for k in 1..=12usize {
        let row: Vec<&str> = text.lines().nth(3 * k + 2).unwrap().split('\t').collect();
        assert_eq!(row[0], (3 * k + 2).to_string());
        assert_eq!(row[col], format!("{k}/{}", k + 1));
    }
}

#[test]
fn inline_json_spec_is_accepted() {
    let spec = r#"{"kind":"odometer","alphabet":{"family":"constant","params":{"m":2}},"measure":{"family":"uniform"}}"#;
    let o = odolab(&["sequences", spec, "--horizon", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn gallery_list_names_every_entry() {
    let o = odolab(&["gallery-list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for id in ["ornstein", "fhc-binary", "trans-rigid", "shift-z"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn shift_witness_passes() {
    let o = odolab(&["witness", "shift-z"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
