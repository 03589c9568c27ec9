//! CSV emission.
//!
//! Layout: header row, one `#` metadata line, then data rows.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::cli::config::ExperimentConfig;
use crate::cli::run::ResultTable;

/// Hex SHA-256 of the canonical TOML form of `cfg`.
pub fn config_digest(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The `#` metadata line (without trailing newline).
pub fn metadata_line(cfg: &ExperimentConfig, table: &ResultTable) -> String {
    let mut parts = vec![
        format!("kind={}", cfg.kind),
        format!("config_sha256={}", config_digest(cfg)),
        format!("seed={}", cfg.seed),
        format!("hbar={:.15e}", cfg.units.hbar),
        format!("mass={:.15e}", cfg.units.mass),
        format!("version={}", env!("CARGO_PKG_VERSION")),
    ];
    parts.extend(table.controls.iter().map(|(k, v)| format!("{k}={v}")));
    format!("# {}", parts.join(" "))
}

/// Writes the table as CSV.
pub fn write_csv<W: Write>(cfg: &ExperimentConfig, table: &ResultTable, out: W) -> std::io::Result<()> {
    let builder = || {
        let mut b = csv::WriterBuilder::new();
        b.terminator(csv::Terminator::Any(b'\n'));
        b
    };
    let mut w = builder().from_writer(out);
    w.write_record(&table.columns)?;
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    out.write_all(metadata_line(cfg, table).as_bytes())?;
    out.write_all(b"\n")?;
    let mut w = builder().has_headers(false).from_writer(out);
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.render()))?;
    }
    w.flush()
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(cfg: &ExperimentConfig, table: &ResultTable, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p)?;
            write_csv(cfg, table, std::io::BufWriter::new(file))
        }
        None => write_csv(cfg, table, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Kind;
    use crate::cli::run::{columns, Cell};

    #[test]
    fn empty_table_has_header_and_metadata() {
        let cfg = ExperimentConfig::from_toml("kind = \"ratio-scan\"\n").unwrap();
        let table = ResultTable {
            kind: Kind::RatioScan,
            columns: columns(Kind::RatioScan).to_vec(),
            rows: vec![],
            controls: vec![],
            summary: vec![],
        };
        let mut buf = Vec::new();
        write_csv(&cfg, &table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("j,m,beta"));
        assert!(lines[1].starts_with("# kind=ratio-scan config_sha256="));
    }

    #[test]
    fn floats_keep_fifteen_digits() {
        assert_eq!(Cell::Float(0.1).render(), "1.000000000000000e-1");
        assert_eq!(Cell::Float(-1234.5).render(), "-1.234500000000000e3");
    }

    #[test]
    fn digest_is_stable() {
        let a = ExperimentConfig::from_toml("kind = \"mle\"\nseed = 1\n").unwrap();
        let b = ExperimentConfig::from_toml("seed = 1\nkind = \"mle\"\n").unwrap();
        assert_eq!(config_digest(&a), config_digest(&b));
        let c = ExperimentConfig::from_toml("kind = \"mle\"\nseed = 2\n").unwrap();
        assert_ne!(config_digest(&a), config_digest(&c));
    }
}
