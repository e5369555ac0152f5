use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moebius-flux"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, col: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn kv(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
}

#[test]
fn spectrum_of_a_bare_ring() {
    let o = run(&["spectrum", "--topology", "annulus", "--nx", "4", "--ny", "1", "--ty", "0", "--f", "0", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("index,eigenvalue,residual"));
    let e = column(&text, 1);
    for (got, want) in e.iter().zip([0.0, 2.0, 2.0, 4.0]) {
        assert!((got - want).abs() < 1e-12, "{e:?}");
    }
    assert!(column(&text, 2).iter().all(|r| *r < 1e-10));
}

#[test]
fn spectrum_is_periodic_in_flux() {
    let base = ["spectrum", "--nx", "8", "--ny", "3", "--k", "5"];
    let a = run(&[&base[..], &["--f", "0"]].concat());
    let b = run(&[&base[..], &["--f", "1"]].concat());
    for (x, y) in column(&stdout(&a), 1).iter().zip(column(&stdout(&b), 1)) {
        assert!((x - y).abs() <= 1e-9);
    }
}

#[test]
fn spectrum_of_one_sector() {
    let o = run(&["spectrum", "--nx", "8", "--ny", "5", "--f", "0.5", "--k", "3", "--sectors", "odd"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(column(&stdout(&o), 1).len(), 3);
    let o = run(&["spectrum", "--nx", "8", "--ny", "5", "--sectors", "even,odd"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "topologyy = moebius\n").unwrap();
    let o = run(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("topologyy"));

    for args in [
        &["spectrum", "--nx", "abc"][..],
        &["spectrum", "--topology", "torus"],
        &["spectrum", "--config", "/nonexistent/path.cfg"],
        &["spectrum", "--nx", "4", "--ny", "1", "--k", "9"],
        &["sweep", "--ny", "8"],
        &["sweep", "--f-min", "1", "--f-max", "0"],
        &["holonomy", "--loop", "offset=4"],
        &["holonomy", "--loop", "sideways"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# ring\ntopology = annulus\nnx = 4\nny = 1\nty = 0\nk = 2\n").unwrap();
    let o = run(&["spectrum", "--config", path.to_str().unwrap(), "--k", "3", "--f", "-0.25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(column(&stdout(&o), 1).len(), 3);
}

#[test]
fn holonomy_examples() {
    let o = run(&["holonomy", "--f", "0.5", "--loop", "center"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert_eq!(kv(&t, "class "), "1");
    assert!((kv(&t, "angle ").parse::<f64>().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    assert!((kv(&t, "holonomy_re ").parse::<f64>().unwrap() + 1.0).abs() < 1e-12);
    assert!(kv(&t, "holonomy_im ").parse::<f64>().unwrap().abs() < 1e-12);

    let t = stdout(&run(&["holonomy", "--f", "0.5", "--loop", "offset=0"]));
    assert_eq!(kv(&t, "class "), "2");
    assert!((kv(&t, "angle ").parse::<f64>().unwrap() - std::f64::consts::TAU).abs() < 1e-12);
    assert!((kv(&t, "holonomy_re ").parse::<f64>().unwrap() - 1.0).abs() < 1e-12);

    let t = stdout(&run(&["holonomy", "--topology", "annulus", "--f", "0.25", "--loop", "offset=0"]));
    assert_eq!(kv(&t, "class "), "1");
    assert!((kv(&t, "angle ").parse::<f64>().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

fn sweep_to(dir: &Path, extra: &[&str]) -> (Output, String) {
    let out = dir.join("sweep.csv");
    let mut args = vec!["sweep", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (o, text)
}

#[test]
fn default_sweep_writes_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("sweep.svg");
    let (o, text) = sweep_to(dir.path(), &["--plot", plot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "f,e0_full,e0_even,e0_odd,gap,node_amp,current,status");
    assert_eq!(lines.len(), 152);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
    // No current at the grid ends.
    assert!(lines[1].ends_with(",,ok") && lines[151].ends_with(",,ok"));
    let svg = std::fs::read_to_string(&plot).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg"));
    assert!(stderr(&o).contains("odd minimum at f = 0.5"));
}

#[test]
fn sweep_is_reproducible_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--nx", "10", "--ny", "5", "--f-steps", "21", "--sectors", "full,odd", "--solver", "lanczos", "--k", "2", "--seed", "3"];
    let (o, first) = sweep_to(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, second) = sweep_to(dir.path(), &args);
    assert_eq!(first, second);

    // Absent sector leaves an empty field; reparsed numbers re-serialize to the same bytes.
    let mut rebuilt = String::new();
    for (n, line) in first.lines().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if n > 0 {
            assert_eq!(fields[2], "");
            let again: Vec<String> = fields
                .iter()
                .map(|f| match f.parse::<f64>() {
                    Ok(x) => format!("{x:.16e}"),
                    Err(_) => f.to_string(),
                })
                .collect();
            rebuilt.push_str(&again.join(","));
        } else {
            rebuilt.push_str(line);
        }
        rebuilt.push('\n');
    }
    assert_eq!(rebuilt, first);
}

#[test]
fn strict_sweep_fails_on_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    // A tolerance below machine precision cannot be met.
    let args = ["--nx", "6", "--ny", "3", "--f-steps", "3", "--sectors", "full", "--solver", "lanczos", "--k", "2", "--tol", "1e-30"];
    let (o, text) = sweep_to(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",failed")));
    let mut strict = args.to_vec();
    strict.push("--strict");
    let (o, _) = sweep_to(dir.path(), &strict);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_passes_and_catches_broken_seam() {
    let o = run(&["verify"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 9);

    let o = run(&["verify", "--break-seam"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(1));
    for check in ["homology-invariance", "annulus-equivalence"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("FAIL {check}"))), "{text}");
    }
}
