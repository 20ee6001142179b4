use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locapprox")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("locapprox-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn decode_prints_minimal_pair() {
    let o = run(&["decode", "--q", "257", "--l", "10", "--m", "1", "--z", "86"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "86 -> 1/3\n");
    let o = run(&["decode", "--q", "257", "--l", "10", "--m", "1", "--z", "0"]);
    assert_eq!(stdout(&o), "0 -> 0/1\n");
}

#[test]
fn decode_window_violation_exits_1() {
    let o = run(&["decode", "--q", "257", "--l", "100", "--m", "2", "--z", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("window"));
}

#[test]
fn decode_not_local_exits_2() {
    let o = run(&["decode", "--q", "257", "--l", "3", "--z", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "NotLocal\n");
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("decode.cfg");
    fs::write(&cfg, "# decode settings\nq = 257\nl = 10\nz = 0\n").unwrap();
    let o = run(&["decode", "--config", cfg.to_str().unwrap(), "--z", "86"]);
    assert_eq!(stdout(&o), "86 -> 1/3\n");
    let o = run(&["decode", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metadata"]["command"], "decode");
    assert_eq!(v["metadata"]["config"]["q"], "257");
    assert_eq!(v["rows"][0]["value"], "0/1");
    assert_eq!(v["summary"]["local"], true);
}

#[test]
fn encode_and_dist() {
    assert_eq!(stdout(&run(&["encode", "--q", "257", "--r", "1/3"])), "1/3 -> 86\n");
    assert_eq!(stdout(&run(&["encode", "--q", "257", "--r", "-1/2"])), "-1/2 -> 128\n");
    assert_eq!(stdout(&run(&["dist", "--q", "257", "--l", "10", "--x", "86", "--y", "0"])), "d(86, 0) = 1/3\n");
    let o = run(&["dist", "--q", "257", "--l", "10", "--x", "86", "--y", "0", "--format", "csv"]);
    assert_eq!(stdout(&o), "x,y,dist\n86,0,1/3\n");
}

#[test]
fn audit_metric_reports_and_rejects_bad_input() {
    let o = run(&["audit-metric", "--q", "257", "--l", "3"]);
    let text = stdout(&o);
    assert!(text.starts_with("axiom,checked,failed\n"));
    assert!(text.contains("triangle,729,0\n"));
    // -1 and 1 lie in S_1 at distance 2
    assert!(text.contains("diameter,81,20\n"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["audit-metric", "--q", "257", "--l", "12"]).status.code(), Some(1));
    assert_eq!(run(&["audit-metric", "--q", "257", "--l", "3", "--samples", "0", "--seed", "1"]).status.code(), Some(1));
    assert_eq!(run(&["audit-metric", "--q", "257", "--l", "3", "--samples", "10"]).status.code(), Some(1));
}

#[test]
fn group_hom_passes_for_so3() {
    let o = run(&[
        "group-hom", "--family", "SO(3)", "--pairs", "20", "--height", "100", "--q", "2305843009213693951", "--l", "10",
        "--m", "8", "--seed", "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "check,checked,failed\nmembership,40,0\nproduct,20,0\n");
}

#[test]
fn covering_table_and_identity_grid() {
    let o = run(&["covering", "--family", "SO(3)", "--heights", "1,10", "--grid-size", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("height,points,grid_size,radius"));
    for line in lines {
        let radius = line.rsplit(',').next().unwrap();
        let digits = radius.chars().filter(char::is_ascii_digit).collect::<String>();
        assert_eq!(digits.trim_start_matches('0').len(), 6, "{radius}");
    }
    let o = run(&["covering", "--family", "SO(3)", "--heights", "1", "--grid", "identity"]);
    assert!(stdout(&o).ends_with(",0\n"));
    assert_eq!(run(&["covering", "--family", "SL2", "--heights", "1"]).status.code(), Some(1));
}

#[test]
fn variety_contains_pythagorean_point() {
    let sys = scratch("circle.txt");
    fs::write(&sys, "vars: x y\nx^2 + y^2 - 1\n").unwrap();
    let o = run(&["variety", "--system", sys.to_str().unwrap(), "--q", "1009", "--l", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "3/5,4/5"));
    let o = run(&["variety", "--vars", "x y", "--polys", "x^2 + y^2 - 1", "--q", "1009", "--l", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["spurious"], 0);
}

#[test]
fn eval_values_and_parse_errors() {
    assert_eq!(stdout(&run(&["eval", "--formula", "inf x:S1 . d1(x,x)", "--q", "331", "--l", "3"])), "0/1\n");
    let sq = "sup x:S1 . inf y:S1 . d2((y*y), x)";
    assert_eq!(stdout(&run(&["eval", "--formula", sq, "--q", "16411", "--l", "4"])), "1/2\n");
    assert_eq!(stdout(&run(&["eval", "--formula", sq, "--limit-height", "5"])), "1/2\n");
    let o = run(&["eval", "--formula", "sup x:S1 . d1(x", "--limit-height", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column"));
}

#[test]
fn los_table_and_output_file() {
    let out = scratch("los.csv");
    let o = run(&[
        "los", "--formula", "sup x:S1 . inf y:S1 . d2((y*y), x)", "--ls", "2,4", "--limit-height", "4", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("q,l,m,value_num,value_den,gap_num,gap_den\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn exhaustive_reports_are_byte_identical() {
    let args = ["variety", "--vars", "x y", "--polys", "x^2 + y^2 - 1", "--q", "1009", "--l", "5", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["decode", "--q", "257"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
