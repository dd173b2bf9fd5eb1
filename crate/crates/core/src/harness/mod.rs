//! Experiment runner, γ-tradeoff sweep and bound verification, all
//! emitting CSV.

pub mod config;
pub mod experiment;
pub mod sweep;
pub mod verify;

use std::path::Path;

use crate::error::{Error, Result};

pub use config::{ExperimentConfig, Instance, DEFAULT_GAMMA_GRID};
pub use experiment::{run_experiment, run_preset, target_value, ExperimentSummary, PresetOutcome};
pub use sweep::{sweep_gamma, write_sweep, SweepRow};
pub use verify::{verify_bounds, CheckStatus, VerifyCheck, VerifyReport};

/// Decimal notation with 15 significant digits; `inf` for infinity.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).clamp(0, 340) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub(crate) fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(1.5), "1.5");
        assert_eq!(fmt_num(2000.0), "2000");
        assert_eq!(fmt_num(11.818_736_123_456_789), "11.8187361234568");
        let tiny = 1.234_567_890_123_45e-17;
        let s = fmt_num(tiny);
        assert!(!s.contains('e'));
        assert!((s.parse::<f64>().unwrap() - tiny).abs() <= 1e-14 * tiny);
        for x in [
            std::f64::consts::PI,
            -0.001_234_5,
            123_456.789,
            5.057_976_870_513_719,
        ] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-14 * x.abs());
        }
    }
}
