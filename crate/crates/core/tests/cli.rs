use std::path::Path;
use std::process::Command;

use curvsense::cli::{columns, run, write_csv, Cell, ExperimentConfig, Kind};
use curvsense::geometry::{closed_form, Surface};
use curvsense::Units;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curvsense"))
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let table = run(cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(cfg, &table, &mut buf).unwrap();
    buf
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const QFI_FREE: &str = r#"
kind = "qfi-free"
[qfi-free]
t = [1.0, 2.0, 4.0]
lambda = 1.0
probe = { type = "two-level", j = 1 }
"#;

const TORUS: &str = r#"
kind = "geometry"
[geometry]
surface = { type = "torus", tube = 1.0, center = 3.0 }
u = { start = 0.0, stop = 6.0, count = 13 }
v = [0.0, 2.0]
xi = [-1.0, 0.0]
"#;

#[test]
fn balanced_probe_qfi_column() {
    let cfg = ExperimentConfig::from_toml(QFI_FREE).unwrap();
    let table = run(&cfg).unwrap();
    let h = table.column("qfi").unwrap();
    let got: Vec<f64> = table.rows.iter().map(|r| r[h].as_f64().unwrap()).collect();
    for (g, want) in got.iter().zip([4.0, 16.0, 64.0]) {
        assert!((g - want).abs() < 1e-10 * want, "{got:?}");
    }
}

#[test]
fn default_ratio_scan_shape() {
    let cfg = ExperimentConfig::from_toml("kind = \"ratio-scan\"\n").unwrap();
    let table = run(&cfg).unwrap();
    assert_eq!(table.rows.len(), 25 * 12);
    let r = table.column("ratio").unwrap();
    for row in &table.rows {
        let x = row[r].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&x), "ratio {x} out of range in {row:?}");
    }
}

#[test]
fn torus_potential_matches_closed_form() {
    let cfg = ExperimentConfig::from_toml(TORUS).unwrap();
    let table = run(&cfg).unwrap();
    assert_eq!(table.rows.len(), 13 * 2 * 2);
    let s = Surface::torus(1.0, 3.0).unwrap();
    let (u, v, vs) = (
        table.column("u").unwrap(),
        table.column("v").unwrap(),
        table.column("v_s").unwrap(),
    );
    for row in &table.rows {
        let p = s.point(row[u].as_f64().unwrap(), row[v].as_f64().unwrap()).unwrap();
        let want = closed_form::surface_potential(&s, &p, &Units::NATURAL);
        let got = row[vs].as_f64().unwrap();
        assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn every_kind_matches_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (Kind::Geometry, TORUS.to_string()),
        (Kind::QfiFree, QFI_FREE.to_string()),
        (
            Kind::QfiField,
            "kind = \"qfi-field\"\n[qfi-field]\nsurface = \"cylinder\"\nfield = 0.5\nlambda = [0.5, 1.0]\n".into(),
        ),
        (
            Kind::FiPosition,
            "kind = \"fi-position\"\n[fi-position]\nt = 1.0\nlambda = [1.0, 2.0]\nprobe = { type = \"cylinder-uniform\", j = 3 }\n"
                .into(),
        ),
        (Kind::RatioScan, "kind = \"ratio-scan\"\n[ratio-scan]\nj = [1]\nt = 1.0\nlambda = 1.0\n".into()),
        (Kind::Mle, "kind = \"mle\"\n[mle]\nsamples = 200\nreplicas = 3\n".into()),
    ];
    for (kind, text) in configs {
        let cfg_path = write(dir.path(), &format!("{kind}.toml"), &text);
        let out = dir.path().join(format!("{kind}.csv"));
        let status = bin()
            .arg(kind.name())
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{kind}");
        let body = std::fs::read_to_string(&out).unwrap();
        let mut lines = body.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header, columns(kind), "{kind}");
        let meta = lines.next().unwrap();
        assert!(meta.starts_with(&format!("# kind={kind} config_sha256=")), "{meta}");
        assert!(meta.contains(" seed=0 ") && meta.contains("hbar=") && meta.contains("mass="));
        let rest = lines.collect::<Vec<_>>().join("\n");
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(rest.as_bytes());
        let mut n = 0;
        for rec in reader.records() {
            assert_eq!(rec.unwrap().len(), columns(kind).len(), "{kind}");
            n += 1;
        }
        assert!(n > 0, "{kind}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mle.toml",
        "kind = \"mle\"\nseed = 11\n[mle]\nsamples = 300\nreplicas = 6\n",
    );
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}.csv"));
        let status = bin()
            .args(["mle", "--threads", threads, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn config_round_trip_reproduces_output() {
    for text in [
        QFI_FREE,
        TORUS,
        "kind = \"mle\"\nseed = 5\n[mle]\nsamples = 100\nreplicas = 2\n",
    ] {
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let reloaded = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, reloaded);
        assert_eq!(csv_bytes(&cfg), csv_bytes(&reloaded));
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.toml",
        "kind = \"mle\"\n[mle]\nsamples = 100\nreplicas = 2\n",
    );
    let run_with = |seed: &str| {
        let out = bin()
            .args(["mle", "--seed", seed, "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let one = run_with("1");
    assert!(one.lines().nth(1).unwrap().contains(" seed=1 "));
    assert_ne!(one, run_with("2"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();

    assert_eq!(code(&["geometry"]), 1);
    let bad = write(
        dir.path(),
        "bad.toml",
        "kind = \"qfi-free\"\n[qfi-free]\nt = [2.0, 1.0]\nlambda = 1.0\n",
    );
    assert_eq!(code(&["qfi-free", "--config", bad.to_str().unwrap()]), 1);
    let other = write(dir.path(), "other.toml", QFI_FREE);
    assert_eq!(code(&["geometry", "--config", other.to_str().unwrap()]), 1);

    let missing = dir.path().join("none").join("out.csv");
    assert_eq!(
        code(&[
            "qfi-free",
            "--config",
            other.to_str().unwrap(),
            "--out",
            missing.to_str().unwrap()
        ]),
        3
    );
    assert_eq!(
        code(&["qfi-free", "--config", dir.path().join("absent.toml").to_str().unwrap()]),
        3
    );

    // A probe with zero QFI leaves the ratio undefined.
    let flat = write(
        dir.path(),
        "flat.toml",
        "kind = \"fi-position\"\n[fi-position]\nt = 0.0\nlambda = 1.0\n",
    );
    let flat = flat.to_str().unwrap();
    assert_eq!(code(&["fi-position", "--config", flat]), 0);
    assert_eq!(code(&["fi-position", "--strict", "--config", flat]), 2);
}

#[test]
fn field_scan_reports_both_prefactors() {
    let cfg = ExperimentConfig::from_toml(
        "kind = \"qfi-field\"\n[qfi-field]\nsurface = \"sphere\"\nfield = 1.0\nlambda = [0.5, 1.0, 2.0]\n",
    )
    .unwrap();
    let table = run(&cfg).unwrap();
    let (p, d, n) = (
        table.column("qfi_printed").unwrap(),
        table.column("qfi_derived").unwrap(),
        table.column("qfi_numeric").unwrap(),
    );
    for row in &table.rows {
        let [p, d, n] = [p, d, n].map(|i| row[i].as_f64().unwrap());
        assert!((d / p - 64.0 / 9.0).abs() < 1e-9);
        assert!(((n - d) / d).abs() < 1e-6);
    }
    assert!(table.rows.iter().all(|r| matches!(&r[r.len() - 1], Cell::Text(_))));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = std::fs::read_to_string(&path).unwrap();
            ExperimentConfig::from_toml(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 6);
}
