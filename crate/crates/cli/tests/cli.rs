use std::path::Path;
use std::process::{Command, Output};

fn satnav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satnav"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = satnav(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows (comment lines and the column header removed) split on commas.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = csv
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .collect();
    let i = header.iter().position(|h| *h == name).expect("column exists");
    rows(csv).iter().map(|r| r[i].parse().unwrap()).collect()
}

fn write_fixture(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.txt"));
    let text = stdout_ok(&["fixtures", name]);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_tree_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_fixture(dir.path(), "tree");
    let out = stdout_ok(&["solve", "--net", &tree, "--p", "0.75", "--q", "0.573", "--start", "B"]);
    let t = column(&out, "time")[0];
    assert!((t - 5.283).abs() < 1e-2, "{t}");
}

#[test]
fn solve_random_walk_is_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let line = write_fixture(dir.path(), "line7");
    let out = stdout_ok(&[
        "solve", "--net", &line, "--p", "0.5", "--q", "0.5", "--start", "0", "--to", "4",
    ]);
    assert_eq!(column(&out, "time"), vec![16.0]);
}

#[test]
fn solve_with_degree_trusts_and_simulation() {
    let out = stdout_ok(&[
        "solve", "--fixture", "tree", "--p", "0.75", "--q2", "0.6339746", "--q3", "0.5505103",
        "--simulate", "20000", "--seed", "7",
    ]);
    let times = column(&out, "time");
    let means = column(&out, "sim_mean");
    let ses = column(&out, "sim_se");
    assert_eq!(times.len(), 4);
    for i in 0..4 {
        assert!((times[i] - means[i]).abs() < 4.0 * ses[i].max(1e-12));
    }
    assert!(out.contains("# seed: 7"));
}

#[test]
fn header_records_command_and_reruns_are_identical() {
    let args = ["solve", "--fixture", "triangle", "--p", "0.75", "--q", "0.68", "--simulate", "5000"];
    let a = stdout_ok(&args);
    let b = stdout_ok(&args);
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert!(lines.next().unwrap().starts_with("# satnav "));
    assert_eq!(
        lines.next().unwrap(),
        "# command: satnav solve --fixture triangle --p 0.75 --q 0.68 --simulate 5000"
    );
    assert_eq!(lines.next().unwrap(), "# seed: 0");
}

#[test]
fn optimize_table_one_entry() {
    let out = stdout_ok(&["optimize", "--star", "5", "--p", "0.75"]);
    let q = column(&out, "q")[0];
    assert!((q - 0.464).abs() < 5e-4);
}

#[test]
fn optimize_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = write_fixture(dir.path(), "c3");
    let out = stdout_ok(&["optimize", "--net", &c3, "--p", "0.75", "--start", "A"]);
    assert!((column(&out, "q")[0] - 0.78676).abs() < 5e-4);

    let c4 = write_fixture(dir.path(), "c4");
    let from = |s: &str| {
        column(
            &stdout_ok(&["optimize", "--net", &c4, "--p", "0.75", "--curve", "0.05:0.95:0.05", "--start", s]),
            "q",
        )
    };
    let (a, c) = (from("A"), from("C"));
    assert_eq!(a.len(), 19);
    assert!(a.iter().zip(&c).any(|(x, y)| (x - y).abs() > 1e-3));
}

#[test]
fn optimize_counting_columns() {
    let out = stdout_ok(&["optimize", "--fixture", "spike", "--p", "0.75", "--start", "X", "--mode", "counting"]);
    assert_eq!(column(&out, "q2"), vec![1.0]);
    assert!((column(&out, "q3")[0] - 0.55051).abs() < 1e-4);
    assert!((column(&out, "value")[0] - 5.056).abs() < 2e-3);
}

#[test]
fn line_output() {
    let out = stdout_ok(&["line", "--p", "0.75"]);
    let t = column(&out, "T0j");
    assert!((t[5] - t[3] - 12.187).abs() < 2e-3);
    let s = column(&out, "Sj");
    assert!(s.windows(2).all(|w| w[1] > w[0]));

    let out = stdout_ok(&["line", "--p", "1"]);
    let t = column(&out, "T0j");
    assert_eq!(t, (0..=6).map(f64::from).collect::<Vec<_>>());

    let out = stdout_ok(&["line", "--p", "0.5"]);
    let t = column(&out, "T0j");
    assert_eq!(t, (0..=6).map(|j| f64::from(j * j)).collect::<Vec<_>>());
}

#[test]
fn line_with_lengths() {
    let out = stdout_ok(&["line", "--p", "0.75", "--q", "0.6", "--lengths", "2,5,1"]);
    let r = rows(&out);
    assert_eq!(r.len(), 4);
    assert_eq!(r[3][4], "");
    assert_eq!(r[0][4], "2");
}

#[test]
fn game_equilibria() {
    let out = stdout_ok(&["game", "--mode", "symmetric", "--p", "0.6667"]);
    assert!((column(&out, "q_hat")[0] - 0.73205).abs() < 1e-3);
    let out = stdout_ok(&["game", "--mode", "asymmetric", "--p", "0.9"]);
    assert_eq!(column(&out, "q_hat"), vec![1.0]);
    assert_eq!(column(&out, "value"), vec![0.9]);
}

#[test]
fn game_curves_order() {
    let asym = column(
        &stdout_ok(&["game", "--mode", "asymmetric", "--curve", "0.5:1:0.01"]),
        "q_hat",
    );
    let sym = column(
        &stdout_ok(&["game", "--mode", "symmetric", "--curve", "0.5:0.99:0.01"]),
        "q_hat",
    );
    assert_eq!(asym.len(), 51);
    for (a, s) in asym.iter().zip(&sym) {
        assert!(a >= s);
    }
}

#[test]
fn game_responses() {
    let out = stdout_ok(&["game", "--mode", "asymmetric", "--p", "0.75", "--responses", "--grid", "0.25"]);
    assert!(out.contains("# best responses"));
    assert!(out.contains("0.75,r_given_q,0.5,"));
    assert_eq!(out.lines().filter(|l| l.contains("q_given_r")).count(), 3);
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.csv");
    let out = satnav(&["line", "--p", "0.75", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("T0j"));
}

#[test]
fn json_fixture_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.json");
    std::fs::write(&path, stdout_ok(&["fixtures", "triangle", "--json"])).unwrap();
    let out = stdout_ok(&["solve", "--net", path.to_str().unwrap(), "--p", "1", "--q", "1", "--start", "A"]);
    assert_eq!(column(&out, "time"), vec![2.0]);
}

#[test]
fn exit_codes() {
    assert_eq!(satnav(&["solve", "--net", "/no/such/file", "--p", "0.5", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(satnav(&["solve", "--fixture", "tree", "--p", "1.5", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(satnav(&["solve", "--fixture", "tree", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(satnav(&["solve", "--fixture", "nope", "--p", "0.5", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(satnav(&["game", "--mode", "asymmetric", "--p", "0.3"]).status.code(), Some(2));
    assert_eq!(satnav(&["bogus"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "home H\narc a H H 1\n").unwrap();
    assert_eq!(
        satnav(&["solve", "--net", bad.to_str().unwrap(), "--p", "0.5", "--q", "0.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn cap_exceeded_exits_3_and_simulation_still_runs() {
    // A 40-node unit line has 2^38 direction vectors.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("long.txt");
    let mut text = String::from("home N39\n");
    for i in 0..39 {
        text.push_str(&format!("arc e{i} N{i} N{} 1\n", i + 1));
    }
    std::fs::write(&path, text).unwrap();
    let net = path.to_str().unwrap();
    let out = satnav(&["solve", "--net", net, "--p", "0.9", "--q", "0.9", "--start", "N35"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--simulate"));

    let out = stdout_ok(&["solve", "--net", net, "--p", "0.9", "--q", "0.9", "--start", "N35", "--simulate", "2000"]);
    let r = rows(&out);
    assert_eq!(r[0][4], "");
    assert!(r[0][5].parse::<f64>().unwrap() > 4.0);
}

#[test]
fn fixtures_listing() {
    let out = stdout_ok(&["fixtures"]);
    let r = rows(&out);
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|row| row.len() == 5));
}
