use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn envq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envq"))
        .args(args)
        .output()
        .expect("envq runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn series(csv: &str) -> Vec<(f64, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,Q"));
    lines
        .map(|l| {
            let (t, q) = l.split_once(',').unwrap();
            (t.parse().unwrap(), q.parse().unwrap())
        })
        .collect()
}

fn report_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in report"))
        .parse()
        .unwrap()
}

#[test]
fn thermal_series_relaxes_to_one_minus_tanh() {
    let out = stdout(&envq(&["qt", "--config", &config("thermal.toml")]));
    assert!(!out.contains('\r') && out.ends_with('\n'));
    let s = series(&out);
    assert_eq!(s.len(), 121);
    assert_eq!(s[0], (0.0, 1.0));
    assert!(s.windows(2).all(|w| w[1].1 <= w[0].1));
    assert!((s.last().unwrap().1 - (1.0 - 1f64.tanh())).abs() < 1e-6);
}

#[test]
fn fluorescence_series_oscillates_towards_one_plus_dq() {
    let s = series(&stdout(&envq(&[
        "qt",
        "--config",
        &config("fluorescence.toml"),
    ])));
    let dq = report_value(
        &stdout(&envq(&["dq", "--config", &config("fluorescence.toml")])),
        "dq",
    );
    let turns = s
        .windows(3)
        .filter(|w| (w[1].1 - w[0].1) * (w[2].1 - w[1].1) < 0.0)
        .count();
    assert!(turns >= 4);
    assert!((s.last().unwrap().1 - (1.0 + dq)).abs() < 1e-3);
}

#[test]
fn every_shipped_config_starts_at_one() {
    for name in [
        "thermal.toml",
        "fluorescence.toml",
        "two_qubit.toml",
        "nonmarkov.toml",
        "oscillator.toml",
        "lindblad.toml",
        "microscopic.toml",
        "collisional.toml",
        "telegraph.toml",
    ] {
        let s = series(&stdout(&envq(&["qt", "--config", &config(name)])));
        assert_eq!(s[0], (0.0, 1.0), "{name}");
        assert!(s.iter().all(|(_, q)| q.is_finite()), "{name}");
    }
}

#[test]
fn two_qubit_report() {
    let text = stdout(&envq(&["dq", "--config", &config("two_qubit.toml")]));
    assert!((report_value(&text, "dq") - 1.914214).abs() < 1e-6);
    assert!((report_value(&text, "concurrence") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    assert!(text.contains("reversal = conjugate"));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("optimal_state["))
            .count(),
        16
    );
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("stationary_state["))
            .count(),
        16
    );
}

#[test]
fn degree_limits() {
    let dir = tempfile::tempdir().unwrap();
    let hot = write_config(
        dir.path(),
        "[times]\nt_max = 1\nsteps = 1\n[model]\nname = \"thermal-tls\"\nbeta_hw0 = 1e-6\n",
    );
    let dq = report_value(
        &stdout(&envq(&["dq", "--config", hot.to_str().unwrap()])),
        "dq",
    );
    assert!(dq.abs() < 1e-6);
    let undriven = write_config(
        dir.path(),
        "[times]\nt_max = 1\nsteps = 1\n[model]\nname = \"fluorescence\"\nomega = 0\n",
    );
    let dq = report_value(
        &stdout(&envq(&["dq", "--config", undriven.to_str().unwrap()])),
        "dq",
    );
    assert!((dq - 1.0).abs() < 1e-12);
    assert!(
        report_value(
            &stdout(&envq(&["dq", "--config", &config("telegraph.toml")])),
            "dq"
        ) == 0.0
    );
}

#[test]
fn sweeps() {
    let path = config("two_qubit.toml");
    let empty = stdout(&envq(&[
        "sweep", "--config", &path, "--param", "omega", "--values", "",
    ]));
    assert_eq!(empty, "omega,dq,concurrence\n");
    let table = stdout(&envq(&[
        "sweep", "--config", &path, "--param", "omega", "--values", "0:6:7",
    ]));
    let rows: Vec<Vec<f64>> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    for (k, row) in rows.iter().enumerate() {
        let w = k as f64;
        assert_eq!(row[0], w);
        assert!((row[2] - w / (1.0 + w * w).sqrt()).abs() < 1e-9);
    }
    let fl = stdout(&envq(&[
        "sweep",
        "--config",
        &config("fluorescence.toml"),
        "--param",
        "omega",
        "--values",
        "2,0",
    ]));
    assert_eq!(fl.lines().next(), Some("omega,dq"));
    assert!(fl.lines().nth(2).unwrap().starts_with("0,1"));
    let unknown = envq(&[
        "sweep", "--config", &path, "--param", "kappa", "--values", "1",
    ]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |text: &str, cmd: &str| {
        let p = write_config(dir.path(), text);
        envq(&[cmd, "--config", p.to_str().unwrap()]).status.code()
    };
    assert_eq!(run("[times\nt_max = 1", "qt"), Some(2));
    assert_eq!(run("[times]\nt_max = 1\nsteps = 2\n[model]\nname = \"fluorescence\"\ngamma = -1\nomega = 1\n", "qt"), Some(3));
    // a kernel of the wrong sign makes |c_t| grow past the physical range
    let growing = "initial_state = \"basis(0)\"\n[times]\nt_max = 2\nsteps = 4\n\
                   [model]\nname = \"nonmarkov-decay\"\ntau_c = 1\nkernel = \"tabulated\"\ndt = 0.5\nvalues = [-4, -4, -4, -4, -4, -4]\n";
    assert_eq!(run(growing, "qt"), Some(4));
    let closed = "[times]\nt_max = 1\nsteps = 1\n[lindblad]\nhamiltonian = \"2 2 1 0 0 -1\"\n";
    assert_eq!(run(closed, "dq"), Some(5));
    assert_eq!(envq(&["qt"]).status.code(), Some(2));
}

#[test]
fn seeds_and_modes() {
    let path = config("collisional.toml");
    let mc = |seed: &str| {
        stdout(&envq(&[
            "qt",
            "--config",
            &path,
            "--mode",
            "monte-carlo",
            "--seed",
            seed,
        ]))
    };
    let dir = tempfile::tempdir().unwrap();
    let damped = write_config(
        dir.path(),
        "mode = \"monte-carlo\"\ninitial_state = \"basis(0)\"\n[times]\nt_max = 2\nsteps = 4\n\
         [collisional]\nhamiltonian = \"2 2 0 0 0 0\"\nchannel = \"amplitude-damping\"\nwaiting = \"exponential\"\nrate = 1\npaths = 300\n",
    );
    let damped = damped.to_str().unwrap();
    assert_eq!(envq(&["qt", "--config", damped]).status.code(), Some(2));
    let a = stdout(&envq(&["qt", "--config", damped, "--seed", "1"]));
    let b = stdout(&envq(&["qt", "--config", damped, "--seed", "1"]));
    let c = stdout(&envq(&["qt", "--config", damped, "--seed", "2"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    // unital kicks: every sampled path keeps Q at 1
    assert!(series(&mc("5"))
        .iter()
        .all(|(_, q)| (q - 1.0).abs() < 1e-10));
    let exact = series(&stdout(&envq(&["qt", "--config", &path])));
    assert!(exact.iter().all(|(_, q)| (q - 1.0).abs() < 1e-9));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("q.csv");
    let o = envq(&[
        "qt",
        "--config",
        &config("thermal.toml"),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(stdout(&o).is_empty());
    let direct = stdout(&envq(&["qt", "--config", &config("thermal.toml")]));
    assert_eq!(std::fs::read_to_string(&target).unwrap(), direct);
}
