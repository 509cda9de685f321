use odolab_web::{classify, gallery_list, orbit, sequences};
use serde_json::Value;

#[test]
fn gallery_list_is_json_with_every_id() {
    let v: Value = serde_json::from_str(&gallery_list()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), odolab::gallery::IDS.len());
}

#[test]
fn ornstein_table_has_the_closed_form_weights() {
    let tsv = sequences("ornstein", 4).unwrap();
    let rows: Vec<Vec<&str>> = tsv.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 5);
    let eta = rows[0].iter().position(|c| *c == "eta").unwrap();
    let delta = rows[0].iter().position(|c| *c == "delta").unwrap();
    assert_eq!(rows[3][eta], "1/2");
    assert_eq!(rows[3][delta], "1/6");
}

#[test]
fn classify_reports_the_bounded_rule_first() {
    let v: Value = serde_json::from_str(&classify("ornstein", 40).unwrap()).unwrap();
    assert_eq!(v[0]["rule"], "bounded");
    assert!(v[0]["status"].as_str().unwrap().starts_with("satisfied"));
}

#[test]
fn inline_spec_and_errors() {
    let spec = r#"{"kind":"odometer","alphabet":{"family":"constant","params":{"m":2}},"measure":{"family":"uniform","params":{}}}"#;
    let tsv = orbit(spec, 3, "0", "1", "1/2", 8).unwrap();
    // uniform binary odometer: 1_[0] moves to 1_[1] after one step and back
    let visited: Vec<&str> = tsv.lines().skip(1).map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert_eq!(visited, ["0", "1", "0", "1", "0", "1", "0", "1", "0"]);
    assert!(sequences("no-such-id", 5).is_err());
    assert!(sequences("ornstein", 0).is_err());
    assert!(orbit("ornstein", 3, "9", "0", "1/2", 4).is_err());
    assert!(sequences("shift-z", 5).is_err());
}
