use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples").join(name)
}

fn isoprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoprod"))
        .args(args)
        .env_remove("ISOPROD_GROUP_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("--json prints only JSON")
}

fn temp_doc(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn t1_equivariant_on_the_quartic_example() {
    let q = example("quartic_node.json");
    let o = isoprod(&["t1-equivariant", q.to_str().unwrap(), "--name", "nodal", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let t = &v["items"][0]["outcome"]["t1_equivariant"];
    assert_eq!((t["node_inv"].as_i64(), t["branch_inv"].as_i64(), t["minus_chi_inv"].as_i64()), (Some(1), Some(1), Some(2)));
    assert_eq!(t["total"], 4);
}

#[test]
fn default_output_has_both_blocks() {
    let q = example("quartic_node.json");
    let o = isoprod(&["genus", q.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let (human, machine) = out.split_once("\n\n").unwrap();
    assert!(human.starts_with("genus: ok"));
    assert!(human.contains("nodal"));
    let v: serde_json::Value = serde_json::from_str(machine).unwrap();
    assert_eq!(v["items"][0]["outcome"]["genus"]["genus"], 3);
}

#[test]
fn check_family_is_constant() {
    let q = example("quartic_node.json");
    let o = isoprod(&["check-family", q.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("constant at 4"));
}

#[test]
fn failed_certificate_exits_two() {
    let s = example("surfaces.json");
    let o = isoprod(&["certify-degeneration", s.to_str().unwrap(), "--name", "fixed_curve", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    let conds = v["items"][0]["outcome"]["certificate"]["conditions"].as_array().unwrap();
    let b = conds.iter().find(|c| c["id"] == "b").unwrap();
    assert_eq!(b["pass"], false);

    let o = isoprod(&["certify-degeneration", s.to_str().unwrap(), "--name", "codim1_free"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn surface_invariants_and_kuranishi() {
    let s = example("surfaces.json");
    let o = isoprod(&["surface-invariants", s.to_str().unwrap(), "--name", "isogenous", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let inv = &json(&o)["items"][0]["outcome"]["surface_invariants"];
    assert_eq!((inv["chi"].as_str(), inv["k_squared"].as_str(), inv["q"].as_u64()), (Some("1/1"), Some("8/1"), Some(3)));

    let o = isoprod(&["surface-invariants", s.to_str().unwrap(), "--name", "codim1_free"]);
    assert_eq!(o.status.code(), Some(2));

    let o = isoprod(&["kuranishi", s.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["items"][0]["outcome"]["kuranishi"]["total"], 8);
}

#[test]
fn smoothing_emits_a_loadable_document() {
    let q = example("quartic_node.json");
    let o = isoprod(&["smooth", q.to_str().unwrap(), "--name", "nodal", "--edge", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let smoothed = &v["items"][0]["outcome"]["smoothed"];
    assert_eq!(smoothed["model"], "swap");
    let doc = temp_doc(&smoothed["document"].to_string());
    let o = isoprod(&["quotient", doc.path().to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let sig = &json(&o)["items"][0]["outcome"]["quotient"]["signatures"][0];
    assert_eq!((sig["g_prime"].as_u64(), sig["b"].as_u64()), (Some(1), Some(4)));

    let o = isoprod(&["smooth", q.to_str().unwrap(), "--name", "nodal", "--json"]);
    let chain = &json(&o)["items"][0]["outcome"]["chain"];
    let doc = temp_doc(&chain["document"].to_string());
    let o = isoprod(&["check-family", doc.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("constant at 4"));
}

#[test]
fn unsmoothable_node_exits_two() {
    let doc = temp_doc(
        r#"{"version": "1", "group": {"degree": 2, "generators": [[[0, 1]]]},
            "curves": {"c": {"vertices": [{"genus": 2}], "half_edges": [{"vertex": 0}, {"vertex": 0}], "edges": [[0, 1]]}},
            "actions": {"a": {"curve": "c", "vertex_images": [[]], "half_edge_images": [[[0, 1]]],
                "smoothing_chars": [{"element": [[0, 1]], "edge": 0, "char": "1/2"}],
                "ramification": [{"vertex": 0, "element": [[0, 1]], "char": "1/2", "order": 2},
                                 {"vertex": 0, "element": [[0, 1]], "char": "1/2", "order": 2}]}}}"#,
    );
    let o = isoprod(&["smooth", doc.path().to_str().unwrap(), "--edge", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("not equivariantly smoothable"));
}

#[test]
fn schema_errors_exit_one_and_list_every_path() {
    let doc = temp_doc(
        r#"{"version": "1", "group": {"degree": 2, "generators": [[[0, 1]]]},
            "curves": {"c": {"vertices": [{"genus": 2}]}},
            "actions": {"a": {"curve": "c", "vertex_images": [[]], "half_edge_images": [[]],
                "ramification": [{"vertex": 0, "element": [[0, 1]], "char": "2/4", "order": 2}]},
                        "b": {"curve": "missing"}}}"#,
    );
    let o = isoprod(&["validate", doc.path().to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let messages = json(&o)["messages"].to_string();
    assert!(messages.contains("expected 1/2"), "{messages}");
    assert!(messages.contains("$.actions.b.curve"), "{messages}");
}

#[test]
fn empty_document_has_nothing_to_do() {
    let doc = temp_doc(r#"{"version": "1", "curves": []}"#);
    let o = isoprod(&["t1", doc.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nothing to do"));
}

#[test]
fn group_cap_is_read_from_the_environment() {
    let q = example("quartic_node.json");
    let o = Command::new(env!("CARGO_BIN_EXE_isoprod"))
        .args(["validate", q.to_str().unwrap(), "--json"])
        .env("ISOPROD_GROUP_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("too large"));

    let o = Command::new(env!("CARGO_BIN_EXE_isoprod"))
        .args(["validate", q.to_str().unwrap()])
        .env("ISOPROD_GROUP_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_file_and_unknown_name() {
    let o = isoprod(&["genus", "/nonexistent/doc.json"]);
    assert_eq!(o.status.code(), Some(1));
    let q = example("quartic_node.json");
    let o = isoprod(&["genus", q.to_str().unwrap(), "--name", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}
