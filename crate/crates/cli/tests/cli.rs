use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use sscd_core::engine::exact_evaluate;
use sscd_core::instances::gen_identical;
use sscd_core::metrics::fairness_ratio;
use sscd_core::rational::{self, ratio, Prob};
use sscd_core::schedulers::{SchedulerKind, SchedulerSpec};
use tempfile::TempDir;

fn sscd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sscd"))
        .args(args)
        .env_remove("SSCD_BRANCH_LIMIT")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn records(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = csv_text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn identical_config() -> Value {
    json!({
        "scheduler": {"kind": "fair_share_lottery"},
        "instance": {"generator": {"kind": "identical", "params": {"cdf": ["1/4", "1/2", "3/4", "1"], "n": 3, "deadline": 6}}},
        "engine": {"mode": "exact"}
    })
}

#[test]
fn list_prints_every_kind() {
    let o = sscd(&["list-schedulers"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    for k in SchedulerKind::ALL {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(k.name())), "{k}");
    }
    let o = sscd(&["list-schedulers", "--json"]);
    let list: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(list.len(), 12);
}

#[test]
fn fair_share_run_reports_half_fairness() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "run.json", &identical_config());
    let o = sscd(&["run", "--config", cfg.to_str().unwrap(), "--no-header-timestamp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = records(&stdout(&o));
    assert_eq!(rows.len(), 3);
    let (fs, got) = (column(&header, "fair_share"), column(&header, "achieved_exact"));
    for row in &rows {
        let fs = rational::parse(&row[fs]).unwrap();
        let got = rational::parse(&row[got]).unwrap();
        assert!(got >= fs * ratio(1, 2), "{row:?}");
        assert_eq!(row[column(&header, "mode")], "exact");
    }

    let cdf = serde_json::from_value(json!(["1/4", "1/2", "3/4", "1"])).unwrap();
    let inst = gen_identical(&cdf, 3, 6).unwrap();
    let lib = exact_evaluate(&SchedulerSpec::new(SchedulerKind::FairShareLottery), &inst, 1_000_000).unwrap();
    let want = fairness_ratio(&lib, &inst).ratio.value();
    let cli: f64 = rows[0][column(&header, "fairness_ratio")].parse().unwrap();
    assert_eq!(cli, want);
    assert!(want >= 0.5);
}

#[test]
fn csv_header_matches_schema_file() {
    let schema: Value = serde_json::from_str(include_str!("../schema/results.json")).unwrap();
    let names = |k: &str| -> Vec<String> {
        schema[k].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect()
    };
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "run.json", &identical_config());
    let o = sscd(&["run", "--config", cfg.to_str().unwrap(), "--no-header-timestamp"]);
    assert_eq!(records(&stdout(&o)).0, names("run"));

    let mut sweep = identical_config();
    sweep["sweep"] = json!([{"path": "instance.generator.params.n", "values": [2]}]);
    let cfg = write(dir.path(), "sweep.json", &sweep);
    let o = sscd(&["sweep", "--config", cfg.to_str().unwrap(), "--no-header-timestamp"]);
    let header = records(&stdout(&o)).0;
    let mut want = names("sweep");
    want[0] = "instance.generator.params.n".into();
    assert_eq!(header, want);
}

#[test]
fn malformed_rational_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let mut cfg = identical_config();
    cfg["instance"]["generator"]["params"]["cdf"][1] = json!("1.5");
    let path = write(dir.path(), "bad.json", &cfg);
    let o = sscd(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("cdf") && err.contains("1.5"), "{err}");

    let mut cfg = identical_config();
    cfg["engine"]["mood"] = json!("exact");
    let path = write(dir.path(), "typo.json", &cfg);
    let o = sscd(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mood"));

    let o = sscd(&["run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn monte_carlo_needs_trials_and_seed() {
    let dir = TempDir::new().unwrap();
    let mut cfg = identical_config();
    cfg["engine"] = json!({"mode": "monte_carlo", "seed": 1});
    let path = write(dir.path(), "mc.json", &cfg);
    let o = sscd(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("engine.trials"));
    let o = sscd(&["run", "--config", path.to_str().unwrap(), "--trials", "500", "--no-header-timestamp"]);
    assert!(o.status.success());
    let (header, rows) = records(&stdout(&o));
    assert_eq!(rows[0][column(&header, "mode")], "monte_carlo");
    assert_eq!(rows[0][column(&header, "trials")], "500");
    assert_eq!(rows[0][column(&header, "seed")], "1");
    let o = sscd(&["run", "--config", path.to_str().unwrap(), "--exact", "--no-header-timestamp"]);
    let (header, rows) = records(&stdout(&o));
    assert_eq!(rows[0][column(&header, "mode")], "exact");
}

#[test]
fn branch_limit_is_an_engine_error() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "scheduler": {"kind": "trivial_oblivious"},
        "instance": {"generator": {"kind": "theorem1", "params": {"deadline": 8, "group_cap": 100}}},
        "engine": {"mode": "exact", "branch_limit": 5000}
    });
    let path = write(dir.path(), "t1.json", &cfg);
    let o = sscd(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("branch limit"), "{}", stderr(&o));
}

#[test]
fn branch_limit_precedence() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "run.json", &identical_config());
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_sscd"));
        c.args(["run", "--config", path.to_str().unwrap()]);
        match env {
            Some(v) => c.env("SSCD_BRANCH_LIMIT", v),
            None => c.env_remove("SSCD_BRANCH_LIMIT"),
        };
        if let Some(f) = flag {
            c.args(["--branch-limit", f]);
        }
        c.output().unwrap().status.code()
    };
    assert_eq!(run(None, None), Some(0));
    assert_eq!(run(Some("3"), None), Some(3));
    assert_eq!(run(Some("3"), Some("100000")), Some(0));
    assert_eq!(run(None, Some("3")), Some(3));
    assert_eq!(run(Some("lots"), None), Some(2));
}

#[test]
fn generate_then_run_matches_inline() {
    let dir = TempDir::new().unwrap();
    let inst_path = dir.path().join("inst.json");
    let o = sscd(&["generate", "random", "seed=5", "--out", inst_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let instance: Value = serde_json::from_str(&std::fs::read_to_string(&inst_path).unwrap()).unwrap();

    let base = |source: Value| {
        json!({
            "scheduler": {"kind": "adaptive_fair_share"},
            "instance": source,
            "engine": {"mode": "exact"},
            "analyses": [{"kind": "payoff_curve", "player": 0}]
        })
    };
    let from_file = write(dir.path(), "file.json", &base(json!({"file": "inst.json"})));
    let inline = write(dir.path(), "inline.json", &base(json!({"inline": instance})));
    let run = |cfg: &Path, out: &str| {
        let out = dir.path().join(out);
        let o = sscd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--no-header-timestamp"]);
        assert!(o.status.success(), "{}", stderr(&o));
        (
            std::fs::read(out.with_extension("csv")).unwrap(),
            std::fs::read(out.with_extension("json")).unwrap(),
        )
    };
    assert_eq!(run(&from_file, "a"), run(&inline, "b"));

    let gen_cfg = write(dir.path(), "gen.json", &json!({"kind": "random", "params": {"seed": 5}}));
    let o = sscd(&["generate", "--config", gen_cfg.to_str().unwrap()]);
    let again: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(again, instance);
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "scheduler": {"kind": "trivial_oblivious"},
        "instance": {"generator": {"kind": "oblivious_lb", "params": {"n": 4}}},
        "engine": {"mode": "monte_carlo", "trials": 500, "seed": 11},
        "sweep": [{"path": "instance.generator.params.n", "values": [4, 8, 16]}]
    });
    let path = write(dir.path(), "sweep.json", &cfg);
    let o = sscd(&["sweep", "--config", path.to_str().unwrap(), "--no-header-timestamp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = records(&stdout(&o));
    assert_eq!(rows.len(), 3);
    let keys: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(keys, ["4", "8", "16"]);
    let n = column(&header, "n");
    assert_eq!(rows.iter().map(|r| r[n].as_str()).collect::<Vec<_>>(), ["4", "8", "16"]);
    assert!(rows.iter().all(|r| r[column(&header, "seed")] == "11"));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut cfg = identical_config();
    cfg["scheduler"] = json!({"kind": "random_threshold_oblivious"});
    cfg["engine"] = json!({"mode": "monte_carlo", "trials": 3000, "seed": 42});
    let path = write(dir.path(), "mc.json", &cfg);
    let a = sscd(&["run", "--config", path.to_str().unwrap(), "--no-header-timestamp"]);
    let b = sscd(&["run", "--config", path.to_str().unwrap(), "--no-header-timestamp"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).starts_with('#'));

    let stamped = sscd(&["run", "--config", path.to_str().unwrap()]);
    let text = stdout(&stamped);
    assert!(text.starts_with("# "));
    let rest: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert_eq!(rest, stdout(&a));

    let c = sscd(&["run", "--config", path.to_str().unwrap(), "--no-header-timestamp", "--seed", "43"]);
    assert_ne!(c.stdout, a.stdout);
}

#[test]
fn analyses_land_in_json() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "scheduler": {"kind": "forgiving_lottery"},
        "instance": {"inline": {"deadline": 12, "players": [
            {"true_cdf": ["0", "0", "0", "1"], "report": {"qualitative": 4}}
        ]}},
        "engine": {"mode": "exact"},
        "analyses": [
            {"kind": "error_properties", "player": 0, "true_length": 4},
            {"kind": "best_response_gap", "player": 0, "honest": {"qualitative": 4}, "grid": [{"qualitative": 3}, {"qualitative": 5}]},
            {"kind": "optimum"}
        ],
        "output": {"format": "json"}
    });
    let path = write(dir.path(), "an.json", &cfg);
    let o = sscd(&["run", "--config", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let an = doc["analyses"].as_array().unwrap();
    assert_eq!(an[0]["properties"]["symmetric"], true);
    assert_eq!(an[0]["properties"]["monotone"], true);
    assert_eq!(an[1]["gap"], "0/1");
    let opt: Prob = rational::parse(an[2]["welfare"].as_str().unwrap()).unwrap();
    assert_eq!(opt, ratio(1, 1));
}
