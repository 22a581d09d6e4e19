use std::path::Path;
use std::process::{Command, Output};

use unitary_cayley::Coloring;

fn ucg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucg"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn graph_color_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for n in ["9", "15", "21", "45", "63", "105"] {
        let ring = format!("zn:{n}");
        assert!(ucg(d, &["graph", &ring, "--out", "g.json"]).status.success());
        assert!(ucg(d, &["color", "--construction", "thm1", "--ring", &ring, "--out", "c.json"])
            .status
            .success());
        let v = ucg(d, &["verify", "--graph", "g.json", "--coloring", "c.json", "--proper"]);
        assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    }
}

#[test]
fn dot_export_feeds_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ucg(d, &["graph", "zn:15", "--format", "dot", "--out", "g.dot"]).status.success());
    assert!(ucg(d, &["color", "--construction", "thm2", "--p", "3", "--q", "5", "--ring", "zn:15", "--out", "c.json"])
        .status
        .success());
    let v = ucg(d, &["verify", "--graph", "g.dot", "--coloring", "c.json"]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
}

#[test]
fn thm2_color_has_eleven_classes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ucg(dir.path(), &["color", "--construction", "thm2", "--p", "3", "--q", "7", "--out", "c.json"]);
    assert!(o.status.success());
    let c = Coloring::from_json(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(c.k(), 11);
    assert!(stdout(&o).contains("k=11"));
}

#[test]
fn clique_zn105() {
    let dir = tempfile::tempdir().unwrap();
    let o = ucg(dir.path(), &["clique", "zn:105"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("clique of size 9 (verified)"));
}

#[test]
fn tampered_coloring_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ucg(d, &["graph", "zn:15", "--out", "g.json"]).status.success());
    assert!(ucg(d, &["color", "--construction", "thm2", "--p", "3", "--q", "5", "--ring", "zn:15", "--out", "c.json"])
        .status
        .success());
    let mut c = Coloring::from_json(&std::fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
    // move one vertex next to a neighbour
    let v = c.classes[1].vertices.remove(0);
    let g: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("g.json")).unwrap()).unwrap();
    let nbr = g["edges"]
        .as_array()
        .unwrap()
        .iter()
        .find_map(|e| {
            let (i, j) = (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
            (i == v).then_some(j).or((j == v).then_some(i))
        })
        .unwrap();
    let target = c.classes.iter().position(|cl| cl.vertices.contains(&nbr)).unwrap();
    c.classes[target].vertices.push(v);
    c.classes[target].vertices.sort_unstable();
    c.classes.retain(|cl| !cl.vertices.is_empty());
    std::fs::write(d.join("bad.json"), c.to_json()).unwrap();
    let o = ucg(d, &["verify", "--graph", "g.json", "--coloring", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not proper"));
}

#[test]
fn oracle_and_budget_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = ucg(d, &["oracle", "--ring", "zn:15", "--param", "chi_a", "--budget", "1e8", "--out", "r.json"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["value"], 8);
    assert_eq!(r["exact"], true);
    let o = ucg(d, &["oracle", "--ring", "zn:21", "--param", "chi_a", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(ucg(d, &["oracle", "--ring", "zn:15", "--param", "theta"]).status.code(), Some(1));
}

#[test]
fn search_writes_coloring_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ucg(d, &["graph", "zn:35", "--out", "g.json"]).status.success());
    let o = ucg(d, &["search", "--graph", "g.json", "--target", "19", "--seed", "42", "--budget", "1e6", "--out", "s.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(d.join("s.trace.csv")).unwrap();
    assert!(trace.starts_with("restart,k,iterations\n"));
    let v = ucg(d, &["verify", "--graph", "g.json", "--coloring", "s.json"]);
    assert!(v.status.success());
    let c = Coloring::from_json(&std::fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert!(c.k() >= 19);

    let o = ucg(d, &["search", "--ring", "zn:15", "--target", "9", "--restarts", "2", "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn params_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = ucg(dir.path(), &["params", "zn:15"]);
    let s = stdout(&o);
    assert!(s.contains("omega: 4") && s.contains("chi_a: 8") && s.contains("edges: 56"));
    let o = ucg(dir.path(), &["table", "9,15,21,105,6"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(rows[0], "n,parity,m,omega,chi,construct_status,oracle_status");
    assert!(rows[4].starts_with("105,odd,3,9,9,verified"));
    assert!(rows[5].starts_with("6,even,2,2,2,"));
}
