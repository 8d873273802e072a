use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gaussq::core::typicality::{pure_state_endpoint, scan_purity_plane, DEFAULT_QUAD_TOL};

fn gaussq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn field(report: &str, key: &str) -> f64 {
    let line = report.lines().find(|l| l.starts_with(&format!("{key}: "))).unwrap();
    line[key.len() + 2..].trim().parse().unwrap()
}

#[test]
fn analyze_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "id.txt", "2\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    let o = gaussq(&["analyze", &path]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(field(&r, "mu"), 1.0);
    assert_eq!(field(&r, "E_N"), 0.0);
    assert!(r.contains("bona_fide: yes"));
}

#[test]
fn analyze_squeezed_state() {
    let dir = tempfile::tempdir().unwrap();
    let text = "2\n1.25 0 0.75 0\n0 1.25 0 -0.75\n0.75 0 1.25 0\n0 -0.75 0 1.25\n";
    let o = gaussq(&["analyze", &write(dir.path(), "sq.txt", text)]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert!((field(&r, "E_N") - 1.0).abs() < 1e-12);
    assert!((field(&r, "mu") - 1.0).abs() < 1e-12);
    assert_eq!(field(&r, "N"), 2.0);
}

#[test]
fn analyze_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = gaussq(&["analyze", &write(dir.path(), "bad.txt", "2\n1 0 0 0\n0 1 0\n")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let o = gaussq(&["analyze", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_non_physical_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = gaussq(&["analyze", &write(dir.path(), "np.txt", "2\n0.5 0 0 0\n0 0.5 0 0\n0 0 1 0\n0 0 0 1\n")]);
    assert_eq!(o.status.code(), Some(2));
    let r = stdout(&o);
    assert!(r.contains("bona_fide: no"));
    assert_eq!(field(&r, "mu"), 2.0);
}

#[test]
fn usage_errors() {
    assert_eq!(gaussq(&["scan", "nonsense"]).status.code(), Some(1));
    assert_eq!(gaussq(&["scan", "purity-cut", "--mu", "1.5"]).status.code(), Some(1));
    assert_eq!(gaussq(&["scan", "purity-cut", "--grid", "0"]).status.code(), Some(1));
    assert_eq!(gaussq(&["scan", "--help"]).status.code(), Some(0));
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn purity_cut_is_linear_in_the_coexistence_band() {
    let o = gaussq(&["scan", "purity-cut", "--mu", "0.5", "--grid", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["mu_ab", "prop_entangled", "mean_EN"]);
    assert_eq!(rows.len(), 100);
    let band: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let p: f64 = r[1].parse().ok()?;
            (p > 0.0 && p < 1.0).then(|| (r[0].parse().unwrap(), p))
        })
        .collect();
    assert!(band.len() >= 3);
    let n = band.len() as f64;
    let (mx, my) = (band.iter().map(|p| p.0).sum::<f64>() / n, band.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = band.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / band.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let worst = band.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).abs()).fold(0.0, f64::max);
    assert!(worst < 0.02, "residual {worst}");
    assert!(slope < 0.0);
}

#[test]
fn purity_plane_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plane.csv");
    let o = gaussq(&["scan", "purity-plane", "--mu", "0.5", "--grid", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["mu_a", "mu_b", "class", "prop_entangled", "mean_EN"]);
    let direct = scan_purity_plane(0.5, 12, DEFAULT_QUAD_TOL).unwrap();
    assert_eq!(rows.len(), direct.len());
    for (row, d) in rows.iter().zip(&direct) {
        assert_eq!(row[0].parse::<f64>().unwrap(), d.mu_a);
        assert_eq!(row[1].parse::<f64>().unwrap(), d.mu_b);
        assert_eq!(row[2], d.class.as_str());
        assert_eq!(row[3].parse::<f64>().ok(), d.prop_entangled);
        assert_eq!(row[4].parse::<f64>().ok(), d.mean_en);
    }
    let classes: std::collections::HashSet<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    for c in ["unphysical", "separable", "coexistence", "entangled"] {
        assert!(classes.contains(c), "missing {c}");
    }
}

#[test]
fn pure_endpoint_row_matches_library() {
    let o = gaussq(&["scan", "pure-endpoint", "--E", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let p = pure_state_endpoint(4.0, DEFAULT_QUAD_TOL).unwrap();
    let v: Vec<f64> = rows[0].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(v, [4.0, p.prop_entangled, p.mean_en, p.prop_steerable, p.mean_g]);
}

#[test]
fn energy_curves_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_gaussq"))
            .args(["scan", "energy-curves", "--E", "5", "--mu-grid", "50", "--seed", "7", "--out"])
            .arg(&out)
            .env("GAUSS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(&out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (header, rows) = csv_rows(std::str::from_utf8(&a).unwrap());
    assert_eq!(header.len(), 10);
    assert_eq!(header[0], "E");
    assert_eq!(header[9], "mean_G_err");
    assert_eq!(rows.len(), 50);
    // μ ≤ 4/E² = 0.16 has no states.
    for r in &rows {
        let mu: f64 = r[1].parse().unwrap();
        assert_eq!(r[2].is_empty(), mu <= 0.16, "{r:?}");
    }
}

#[test]
fn sample_command_writes_states_on_the_shell() {
    let o = gaussq(&["sample", "--mu", "0.4", "--E", "6", "--count", "50", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header.len(), 23);
    assert_eq!(rows.len(), 50);
    for r in rows {
        let s: Vec<f64> = r[7..].iter().map(|v| v.parse().unwrap()).collect();
        let half_trace = 0.5 * (s[0] + s[5] + s[10] + s[15]);
        assert!((half_trace - 6.0).abs() < 1e-9);
    }
    assert_eq!(gaussq(&["sample", "--mu", "0.1", "--E", "4"]).status.code(), Some(1));
}
