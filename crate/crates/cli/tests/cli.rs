//! End-to-end smoke tests of the binary surface.

use std::process::Command;

fn hlc(args: &[&str]) -> (String, String, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_hlc"))
        .args(args)
        .output()
        .expect("spawn hlc");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.success(),
    )
}

#[test]
fn sieve_emits_expected_rows() {
    let (stdout, _, ok) = hlc(&["sieve", "--start", "1", "--length", "31"]);
    assert!(ok);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "n,mu,lambda,vonmangoldt,spf");
    assert_eq!(lines.len(), 32);
    assert!(lines[1].starts_with("1,1,1,"));
    // 12 = 2^2·3: mu 0, lambda -1, spf 2
    let row12: Vec<&str> = lines[12].split(',').collect();
    assert_eq!(row12[0], "12");
    assert_eq!(row12[1], "0");
    assert_eq!(row12[2], "-1");
    assert_eq!(row12[4], "2");
    // 30 squarefree with 3 factors
    let row30: Vec<&str> = lines[30].split(',').collect();
    assert_eq!(row30[1], "-1");
}

#[test]
fn singular_emits_certified_interval() {
    let (stdout, _, ok) = hlc(&["singular", "--tuple", "0,2", "--trunc", "1000003"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.3203236).abs() < 1e-5);
    assert!(v["tail_low"].as_f64().unwrap() <= value);
    assert!(v["tail_high"].as_f64().unwrap() >= value);
    assert_eq!(v["truncation_prime"].as_u64().unwrap(), 1000003);
}

#[test]
fn typical_set_density_report() {
    let (stdout, _, ok) = hlc(&[
        "typical-set",
        "--p1",
        "100",
        "--q1",
        "10000",
        "--x",
        "1000000",
        "--report",
        "density",
    ]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["j"].as_u64().unwrap(), 1);
    let d = v["measured_complement_density"].as_f64().unwrap();
    let m = v["mertens_prediction_first_range"].as_f64().unwrap();
    assert!(d / m < 3.0 && m / d < 3.0);
}

#[test]
fn pretentious_scan_small() {
    let (stdout, _, ok) = hlc(&[
        "pretentious",
        "--f",
        "mu",
        "--x",
        "10000",
        "--Q",
        "5",
        "--tmax",
        "2.0",
        "--tstep",
        "0.1",
    ]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["statistic"]["value"].as_f64().unwrap() >= 0.0);
    assert!(v["note"].as_str().unwrap().contains("upper estimate"));
}

#[test]
fn moments_csv_row() {
    let (stdout, _, ok) = hlc(&[
        "moments", "--x", "500", "--h", "8", "--k", "2", "--shifts", "a=0", "--method",
        "convolution",
    ]);
    assert!(ok, "{stdout}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "x,h,k,method,value,normalized");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "500");
    assert_eq!(fields[3], "convolution");
    let value: f64 = fields[4].parse().unwrap();
    assert!(value > 0.0);
}

#[test]
fn correlate_header_and_rows() {
    let (stdout, _, ok) = hlc(&[
        "correlate",
        "--x",
        "10000",
        "--H",
        "50",
        "--f",
        "mu",
        "--g",
        "mu@+1,Lambda@0",
        "--mode",
        "fft",
    ]);
    assert!(ok);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].starts_with("# x=10000 h_max=50"));
    assert!(lines[0].contains("mode=Fft"));
    assert_eq!(lines[1], "h,s_h");
    assert_eq!(lines.len(), 2 + 50);
}

#[test]
fn experiment_round_trip() {
    let dir = std::env::temp_dir().join(format!("hlc_cli_exp_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "x = 20000\nh_max = 16\nf = mu\nfixed_a = 0\nepsilon = 1.0\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let (stdout, stderr, ok) = hlc(&[
        "experiment",
        "hlc-average",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(ok, "stderr: {stderr}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["a_statistic"].as_f64().unwrap() >= 0.0);
    assert!(out_dir.join("hlc_average_per_h.csv").exists());
    assert!(out_dir.join("hlc_average_summary.json").exists());

    let (stdout, _, ok) = hlc(&[
        "experiment",
        "params",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(ok);
    let rows: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(rows.as_array().unwrap().len() > 1);
    assert!(out_dir.join("parameter_table.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_inputs_fail_cleanly() {
    let (_, _, ok) = hlc(&["singular", "--tuple", "0,banana"]);
    assert!(!ok);
    let (_, _, ok) = hlc(&["correlate", "--x", "100", "--H", "5", "--f", "mu", "--g", "wat"]);
    assert!(!ok);
    let (_, _, ok) = hlc(&["typical-set", "--p1", "5", "--q1", "4", "--x", "10"]);
    assert!(!ok);
}
