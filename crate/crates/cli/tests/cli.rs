use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_irs-deploy"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> usize {
    csv.lines().next().unwrap().split(',').position(|c| c == name).unwrap()
}

#[test]
fn allocate_row_for_one_hundred_elements() {
    let cfg = scenario("fixed_surfaces.cfg");
    let out = stdout(&run(&["allocate", "--config", cfg.to_str().unwrap(), "--set", "scheme=bapu"]));
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("100,bapu,67,33,"), "{row}");
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn evaluate_is_byte_identical_across_runs_and_thread_counts() {
    let cfg = scenario("fixed_surfaces.cfg");
    let args = ["evaluate", "--config", cfg.to_str().unwrap(), "--set", "n_p=60", "--set", "x_bi=45"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let c = bin().args(args).env("IRS_DEPLOY_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn sweep_output_does_not_depend_on_worker_count() {
    let args = ["sweep", "--var", "p_i_dbm", "--from", "0", "--to", "20", "--steps", "6", "--analysis", "place",
        "--resolution", "0.5", "--set", "n_p=500", "--set", "n_a=200"];
    let one = bin().args(args).env("IRS_DEPLOY_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("IRS_DEPLOY_THREADS", "4").output().unwrap();
    let text = stdout(&one);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(text.lines().count(), 1 + 6 * 3);
    let sweep: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(&sweep[..4], ["0", "0", "0", "4"]);
}

#[test]
fn reproduce_active_first_and_passive_first_meet_at_equal_powers() {
    let out = stdout(&run(&["reproduce", "fig6"]));
    let rate = column(&out, "rate_bps_hz");
    let at20: Vec<Vec<&str>> =
        out.lines().filter(|l| l.starts_with("20,")).map(|l| l.split(',').collect()).collect();
    let pick = |s: &str| at20.iter().find(|r| r[1] == s).unwrap()[rate].parse::<f64>().unwrap();
    let (bapu, bpau) = (pick("bapu"), pick("bpau"));
    assert!((bapu - bpau).abs() <= 1e-9 * bapu, "{bapu} vs {bpau}");
}

#[test]
fn reproduce_emits_oracle_columns() {
    for fig in ["fig3", "fig5", "fig7"] {
        let out = stdout(&run(&["reproduce", fig]));
        let oracle = column(&out, "oracle_rate_bps_hz");
        let filled = out.lines().skip(1).filter(|l| !l.split(',').nth(oracle).unwrap().is_empty()).count();
        assert!(filled > 0, "{fig} has no oracle values");
    }
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("irs-deploy-out-{}.csv", std::process::id()));
    let out = run(&["allocate", "--set", "x_b=5", "--set", "x_u=5", "--set", "x_bi=45", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("sweep_value,scheme,"));
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains('\r'));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["frobnicate"],
        vec!["allocate", "--no-such-flag"],
        vec!["allocate", "--set", "colour=blue"],
        vec!["allocate", "--set", "n_total=0"],
        vec!["sweep", "--var", "n", "--from", "10", "--to", "20", "--analysis", "evaluate"],
        vec!["reproduce", "fig2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn config_parse_errors_name_the_line() {
    let path = std::env::temp_dir().join(format!("irs-deploy-bad-{}.cfg", std::process::id()));
    std::fs::write(&path, "p_b_dbm = 30\n# fine\nthis line is wrong\n").unwrap();
    let out = run(&["allocate", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn computation_errors_exit_with_one() {
    let base = ["evaluate", "--set", "scheme=bapu", "--set", "n_p=5", "--set", "n_a=5", "--set", "x_b=5"];
    // Surfaces almost touching: the middle hop gain exceeds one.
    let touching = ["--set", "l=10", "--set", "x_u=4.999999999"];
    // Amplitude cap far below what the budget asks for.
    let capped = ["--set", "x_u=5", "--set", "alpha_max=1e-12"];
    for extra in [touching, capped] {
        let out = run(&[&base[..], &extra[..]].concat());
        assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn sample_scenarios_parse() {
    for name in ["fixed_surfaces.cfg", "placement.cfg", "high_power.cfg"] {
        let text = std::fs::read_to_string(scenario(name)).unwrap();
        irs_deploy_cli::parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn compare_reports_five_candidates_and_a_winner() {
    let cfg = scenario("high_power.cfg");
    let out = run(&["compare", "--config", cfg.to_str().unwrap(), "--resolution", "0.5"]);
    let text = stdout(&out);
    let schemes: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(schemes, ["bhu", "bapu", "bpau", "bpu", "bppu"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("best: bapu"));
}

#[test]
fn asymptotic_table_has_one_row_per_scheme() {
    let cfg = scenario("fixed_surfaces.cfg");
    let out = stdout(&run(&["asymptotic", "--config", cfg.to_str().unwrap(), "--var", "n", "--from", "1e4", "--to", "1e6"]));
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("scheme,variable,kind,limit_value,slope"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("bhu,n,"));
}
