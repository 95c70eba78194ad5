use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::process::{Command, Output};

use potnet::io::NetworkFile;

fn potnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Value column of a `property,value` CSV report.
fn csv_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .to_string()
}

const TRIANGLE: &str = r#"{"vertices": ["a", "b", "c"], "origin": "a",
  "edges": [{"u": "a", "v": "b", "c": 1}, {"u": "b", "v": "c", "c": 1}, {"u": "a", "v": "c", "c": 1}]}"#;

#[test]
fn describe_triangle_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triangle.json");
    fs::write(&path, TRIANGLE).unwrap();
    let out = potnet(&[
        "describe",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("property,value\n"));
    assert_eq!(csv_value(&text, "epsilon (min conductance)"), "1");
    assert_eq!(csv_value(&text, "bound 1/sqrt(epsilon)"), "1");
    assert_eq!(csv_value(&text, "connected"), "yes");
}

#[test]
fn describe_geometric_family() {
    let out = potnet(&[
        "describe",
        "--family",
        "geometric",
        "--n",
        "5",
        "--base",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(csv_value(&text, "vertices"), "11");
    assert_eq!(csv_value(&text, "edges"), "10");
}

#[test]
fn missing_origin_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"vertices\": [\"a\"],\n \"edges\": []}").unwrap();
    let out = potnet(&["describe", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("missing field `origin`") && err.contains("line 2"),
        "{err}"
    );
}

#[test]
fn disconnected_network_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.json");
    fs::write(
        &path,
        r#"{"vertices": ["a", "b", "c", "d"], "origin": "a",
            "edges": [{"u": "a", "v": "b", "c": 1}, {"u": "c", "v": "d", "c": 1}]}"#,
    )
    .unwrap();
    let out = potnet(&["describe", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no (2 components)"));
}

#[test]
fn input_and_family_are_exclusive() {
    let out = potnet(&[
        "describe", "--input", "x.json", "--family", "path", "--n", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = potnet(&["describe"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resistance_along_unit_path() {
    for n in [1, 4, 9] {
        let out = potnet(&[
            "resistance",
            "--family",
            "path",
            "--n",
            &n.to_string(),
            "--x",
            "0",
            "--y",
            &n.to_string(),
            "--format",
            "csv",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        let value: f64 = text
            .lines()
            .nth(1)
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!((value - n as f64).abs() < 1e-12, "{text}");
    }
    let out = potnet(&["resistance", "--family", "path", "--n", "2", "--x", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_on_geometric_pair() {
    let out = potnet(&[
        "invariant",
        "--family",
        "geometric",
        "--n",
        "60",
        "--b-base",
        "1.5",
        "--c-base",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let k: f64 = csv_value(&text, "K").parse().unwrap();
    let closed: f64 = csv_value(&text, "closed form sqrt((b-1)/(c-1))")
        .parse()
        .unwrap();
    assert!((k - FRAC_1_SQRT_2).abs() < 1e-4);
    assert!((closed - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((k - closed).abs() <= 1e-2);
    let alignment: f64 = csv_value(&text, "alignment").parse().unwrap();
    assert!(alignment >= 0.999);
}

#[test]
fn compare_reports_checks_and_rejects_undominated_pairs() {
    let out = potnet(&[
        "compare",
        "--family",
        "geometric",
        "--n",
        "6",
        "--b-base",
        "1.5",
        "--c-base",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 5, "{text}");

    let out = potnet(&[
        "compare",
        "--family",
        "geometric",
        "--n",
        "6",
        "--b-base",
        "3",
        "--c-base",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("b ≰ c at"));

    // an impossible tolerance turns a passing check into a failure
    let out = potnet(&[
        "compare", "--family", "complete", "--n", "4", "--alpha", "0.5", "--tol=-1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn moments_and_measure_csv() {
    let out = potnet(&[
        "moments", "--family", "path", "--n", "2", "--x", "2", "--y", "0", "--kmax", "2",
        "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // u = v_2 - v_0 on the unit path 0-1-2: R = 2, then 2, then c(2) + c(0) = 2
    assert_eq!(stdout(&out), "k,m_k\n0,2\n1,2\n2,2\n");

    let out = potnet(&[
        "measure", "--family", "path", "--n", "2", "--x", "2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("lambda,weight\n"));
    let mass: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((mass - 2.0).abs() < 1e-9);

    let out = potnet(&[
        "moments", "--family", "path", "--n", "2", "--x", "2", "--kmax", "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn walk_reports_exact_and_simulated() {
    let args = [
        "walk", "--family", "complete", "--n", "4", "--x", "1", "--trials", "20000", "--seed", "9",
        "--format", "csv",
    ];
    let out = potnet(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let exact: f64 = csv_value(&text, "exact escape probability")
        .parse()
        .unwrap();
    assert!((exact - 2.0 / 3.0).abs() < 1e-12);
    let mc: f64 = csv_value(&text, "monte carlo estimate").parse().unwrap();
    let se: f64 = csv_value(&text, "standard error").parse().unwrap();
    assert!((mc - exact).abs() <= 4.0 * se);
    assert_eq!(stdout(&potnet(&args)), text, "seeded runs repeat");
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.json");
    let out = potnet(&[
        "generate",
        "--family",
        "geometric",
        "--n",
        "4",
        "--base",
        "1.1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let net = NetworkFile::parse(&text).unwrap().to_network().unwrap();
    let expected = potnet::families::Family::GeometricIntegers { n: 4, base: 1.1 }
        .generate()
        .unwrap();
    assert_eq!(net, expected);
    // writing the parsed network again gives the same bytes
    assert_eq!(NetworkFile::from_network(&net).to_json(), text);

    let out = potnet(&[
        "describe",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(csv_value(&stdout(&out), "vertices"), "9");

    let pair_path = dir.path().join("pair.json");
    let out = potnet(&[
        "generate",
        "--family",
        "geometric",
        "--n",
        "5",
        "--b-base",
        "1.5",
        "--c-base",
        "2",
        "--out",
        pair_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = potnet(&["compare", "--pair", pair_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn reduce_preserves_resistance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k4.json");
    let out = potnet(&[
        "reduce",
        "--family",
        "complete",
        "--n",
        "4",
        "--keep",
        "0,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = potnet(&[
        "resistance",
        "--input",
        path.to_str().unwrap(),
        "--x",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&out), "x,y,resistance\n1,0,0.5\n");
}
