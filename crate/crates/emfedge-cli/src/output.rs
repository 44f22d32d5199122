//! Results persistence: trade-off tables, per-slot time series, manifests.
//!
//! Everything is plain CSV / TOML in SI units (W, W/m², bits/s, s). Floats
//! are written with Rust's shortest round-trip formatting, so identical
//! inputs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use emfedge::metrics::{SlotRecord, TradeoffPoint};

/// Column order of the trade-off table. Pinned by a golden test.
pub const TRADEOFF_HEADER: [&str; 14] = [
    "lyapunov_v",
    "realizations",
    "sum_rate_bps_mean",
    "sum_rate_bps_std",
    "max_pixel_emf_w_per_m2_mean",
    "max_pixel_emf_w_per_m2_std",
    "mean_device_power_w_mean",
    "mean_device_power_w_std",
    "max_device_power_w_mean",
    "max_device_power_w_std",
    "meh_power_w_mean",
    "meh_power_w_std",
    "mean_delay_s_mean",
    "mean_delay_s_std",
];

pub const TIMESERIES_HEADER: [&str; 14] = [
    "slot",
    "admitted_bits",
    "served_uplink_bits",
    "computed_bits",
    "mean_tx_power_w",
    "max_tx_power_w",
    "meh_freq_hz",
    "meh_power_w",
    "max_pixel_density_w_per_m2",
    "total_uplink_queue_bits",
    "total_comp_queue_bits",
    "max_vq_device_power",
    "vq_meh_power",
    "max_vq_pixel_emf",
];

/// One realization's per-slot dump, tagged for the file name.
pub struct TimeSeries {
    pub label: String,
    pub records: Vec<SlotRecord>,
}

/// Everything one invocation persists.
pub struct OutputBundle {
    pub tradeoff: Vec<TradeoffPoint>,
    pub time_series: Vec<TimeSeries>,
    /// Normalized SI config, reloadable as a config file.
    pub config_echo_toml: String,
    pub seeds: Vec<u64>,
    pub command: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
struct Manifest {
    code_version: String,
    created_unix_s: u64,
    wall_time_s: f64,
    command: String,
    seeds: Vec<u64>,
    config_file: String,
    tradeoff_file: String,
    time_series_files: Vec<String>,
    /// Every file this run emitted, manifest included.
    files: Vec<String>,
}

#[derive(Debug)]
pub struct WrittenFiles {
    pub dir: PathBuf,
    pub tradeoff: PathBuf,
    pub config_echo: PathBuf,
    pub time_series: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Writes the bundle into `dir`, creating it if needed. On any failure the
/// files written so far are removed.
pub fn write_results(bundle: &OutputBundle, dir: &Path) -> Result<WrittenFiles> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written: Vec<PathBuf> = Vec::new();
    match write_all(bundle, dir, &mut written) {
        Ok(files) => Ok(files),
        Err(e) => {
            for path in written.iter().rev() {
                let _ = fs::remove_file(path);
            }
            Err(e)
        }
    }
}

fn write_all(
    bundle: &OutputBundle,
    dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<WrittenFiles> {
    let tradeoff = dir.join("tradeoff.csv");
    write_tradeoff_csv(&bundle.tradeoff, &tradeoff)?;
    written.push(tradeoff.clone());

    let config_echo = dir.join("config.toml");
    fs::write(&config_echo, &bundle.config_echo_toml)
        .with_context(|| format!("writing {}", config_echo.display()))?;
    written.push(config_echo.clone());

    let mut time_series = Vec::new();
    for series in &bundle.time_series {
        let path = dir.join(format!("timeseries_{}.csv", series.label));
        write_timeseries_csv(&series.records, &path)?;
        written.push(path.clone());
        time_series.push(path);
    }

    let manifest_path = dir.join("manifest.toml");
    let rel = |p: &Path| -> String {
        p.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let mut files: Vec<String> = vec![rel(&tradeoff), rel(&config_echo)];
    files.extend(time_series.iter().map(|p| rel(p)));
    files.push("manifest.toml".to_string());
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        wall_time_s: bundle.wall_time_s,
        command: bundle.command.clone(),
        seeds: bundle.seeds.clone(),
        config_file: rel(&config_echo),
        tradeoff_file: rel(&tradeoff),
        time_series_files: time_series.iter().map(|p| rel(p)).collect(),
        files,
    };
    fs::write(&manifest_path, toml::to_string(&manifest)?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    written.push(manifest_path.clone());

    Ok(WrittenFiles {
        dir: dir.to_path_buf(),
        tradeoff,
        config_echo,
        time_series,
        manifest: manifest_path,
    })
}

fn write_tradeoff_csv(points: &[TradeoffPoint], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(TRADEOFF_HEADER)?;
    for p in points {
        w.write_record([
            fmt(p.lyapunov_v),
            p.realizations.to_string(),
            fmt(p.sum_rate_bps.mean),
            fmt(p.sum_rate_bps.std),
            fmt(p.max_pixel_emf_w_per_m2.mean),
            fmt(p.max_pixel_emf_w_per_m2.std),
            fmt(p.mean_device_power_w.mean),
            fmt(p.mean_device_power_w.std),
            fmt(p.max_device_power_w.mean),
            fmt(p.max_device_power_w.std),
            fmt(p.meh_power_w.mean),
            fmt(p.meh_power_w.std),
            fmt(p.mean_delay_s.mean),
            fmt(p.mean_delay_s.std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_timeseries_csv(records: &[SlotRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(TIMESERIES_HEADER)?;
    for r in records {
        w.write_record([
            r.slot.to_string(),
            fmt(r.admitted_bits),
            fmt(r.served_uplink_bits),
            fmt(r.computed_bits),
            fmt(r.mean_tx_power_w),
            fmt(r.max_tx_power_w),
            fmt(r.meh_freq_hz),
            fmt(r.meh_power_w),
            fmt(r.max_pixel_density_w_per_m2),
            fmt(r.total_uplink_queue_bits),
            fmt(r.total_comp_queue_bits),
            fmt(r.max_vq_device_power),
            fmt(r.vq_meh_power),
            fmt(r.max_vq_pixel_emf),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip float formatting, `.` separator, locale-independent.
fn fmt(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use emfedge::metrics::Stat;

    fn point(v: f64) -> TradeoffPoint {
        let s = |m: f64| Stat { mean: m, std: m / 10.0 };
        TradeoffPoint {
            lyapunov_v: v,
            realizations: 3,
            sum_rate_bps: s(3.5e8),
            max_pixel_emf_w_per_m2: s(0.04),
            mean_device_power_w: s(0.045),
            max_device_power_w: s(0.05),
            meh_power_w: s(45.0),
            mean_delay_s: s(0.048),
        }
    }

    fn bundle(points: Vec<TradeoffPoint>) -> OutputBundle {
        OutputBundle {
            tradeoff: points,
            time_series: vec![],
            config_echo_toml: "num_devices = 4\n".to_string(),
            seeds: vec![1, 2, 3],
            command: "test".to_string(),
            wall_time_s: 0.1,
        }
    }

    #[test]
    fn empty_sweep_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_results(&bundle(vec![]), dir.path()).unwrap();
        let text = std::fs::read_to_string(&files.tradeoff).unwrap();
        assert_eq!(text.trim(), TRADEOFF_HEADER.join(","));
    }

    #[test]
    fn tradeoff_round_trips_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let points = vec![point(1e3), point(3.981070000001e4)];
        let files = write_results(&bundle(points.clone()), dir.path()).unwrap();
        let mut reader = csv::Reader::from_path(&files.tradeoff).unwrap();
        assert_eq!(
            reader.headers().unwrap().iter().collect::<Vec<_>>(),
            TRADEOFF_HEADER.to_vec()
        );
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        for (row, p) in rows.iter().zip(&points) {
            assert_eq!(row[0].parse::<f64>().unwrap(), p.lyapunov_v);
            assert_eq!(row[2].parse::<f64>().unwrap(), p.sum_rate_bps.mean);
            assert_eq!(row[13].parse::<f64>().unwrap(), p.mean_delay_s.std);
        }
    }

    #[test]
    fn manifest_references_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = bundle(vec![point(1.0)]);
        b.time_series.push(TimeSeries {
            label: "seed1".to_string(),
            records: vec![],
        });
        let files = write_results(&b, dir.path()).unwrap();
        let manifest: toml::Value =
            toml::from_str(&std::fs::read_to_string(&files.manifest).unwrap()).unwrap();
        let listed: Vec<String> = manifest["files"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        for entry in std::fs::read_dir(dir.path()).unwrap() {
            let name = entry.unwrap().file_name().to_string_lossy().into_owned();
            assert!(listed.contains(&name), "{name} missing from manifest");
        }
    }

    #[test]
    fn identical_bundles_write_identical_data_files() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let b = bundle(vec![point(1e3), point(1e4)]);
        let f1 = write_results(&b, d1.path()).unwrap();
        let f2 = write_results(&b, d2.path()).unwrap();
        assert_eq!(
            std::fs::read(&f1.tradeoff).unwrap(),
            std::fs::read(&f2.tradeoff).unwrap()
        );
        assert_eq!(
            std::fs::read(&f1.config_echo).unwrap(),
            std::fs::read(&f2.config_echo).unwrap()
        );
    }
}
