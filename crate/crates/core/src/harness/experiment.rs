use std::fs;

use rayon::prelude::*;

use crate::analysis::RoundMetrics;
use crate::error::Result;
use crate::game::PayoffMatrix;
use crate::harness::{fmt_num, write_csv, ExperimentConfig};
use crate::learners::{build_learner, Dynamics};
use crate::play::{play_match, TraceMode};
use crate::rates::{preset_rates, theoretical_upper, Preset, RateParams, Target};

/// One preset's match and its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetOutcome {
    pub preset: Preset,
    pub rates: RateParams,
    pub metrics: Vec<RoundMetrics>,
    /// `None` when no bound applies (X-only presets under the averaged dynamic).
    pub upper: Option<f64>,
}

impl PresetOutcome {
    pub fn last(&self) -> RoundMetrics {
        self.metrics.last().copied().unwrap_or_default()
    }

    pub fn measured_target(&self, dynamics: Dynamics) -> f64 {
        target_value(self.preset, dynamics, &self.last())
    }
}

/// The regret a preset's bound controls: the target external regret, or
/// under the averaged dynamic the larger dynamic regret (the x-player's for
/// X-only presets).
pub fn target_value(preset: Preset, dynamics: Dynamics, m: &RoundMetrics) -> f64 {
    match (dynamics, preset.target()) {
        (Dynamics::Hedge, Target::Social) => m.social,
        (Dynamics::Hedge, Target::XIndividual) => m.reg_x,
        (Dynamics::Hedge, Target::MaxIndividual) => m.max_ind,
        (Dynamics::Averaged, Target::XIndividual) => m.dreg_x,
        (Dynamics::Averaged, _) => m.dreg_x.max(m.dreg_y),
    }
}

/// Play one preset on `a` for `horizon` rounds, keeping only metrics.
pub fn run_preset(
    a: &PayoffMatrix,
    preset: Preset,
    dynamics: Dynamics,
    horizon: usize,
) -> Result<PresetOutcome> {
    let (m, n) = (a.rows(), a.cols());
    let rates = preset_rates(preset, m, n)?;
    let mut x = build_learner(dynamics, m, rates.eta)?;
    let mut y = build_learner(dynamics, n, rates.eta_prime)?;
    let trace = play_match(a, x.as_mut(), y.as_mut(), horizon, TraceMode::Metrics)?;
    let upper = match theoretical_upper(preset, m, n, dynamics, Some(horizon)) {
        Ok(v) => Some(v),
        Err(crate::Error::InvalidArgs(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(PresetOutcome {
        preset,
        rates,
        metrics: trace.metrics().to_vec(),
        upper,
    })
}

/// Run every preset (in parallel) on a validated config.
pub(crate) fn run_all(cfg: &ExperimentConfig, a: &PayoffMatrix) -> Result<Vec<PresetOutcome>> {
    cfg.presets
        .par_iter()
        .map(|&p| run_preset(a, p, cfg.dynamics, cfg.horizon))
        .collect()
}

pub(crate) fn metrics_rows(cfg: &ExperimentConfig, metrics: &[RoundMetrics]) -> Vec<Vec<String>> {
    metrics
        .iter()
        .filter(|m| cfg.emits(m.t))
        .map(|m| {
            std::iter::once(m.t.to_string())
                .chain(m.values().iter().map(|&v| fmt_num(v)))
                .collect()
        })
        .collect()
}

pub const SUMMARY_COLUMNS: [&str; 19] = [
    "preset",
    "dynamics",
    "eta",
    "eta_prime",
    "c",
    "c_prime",
    "T",
    "reg_x",
    "reg_y",
    "social",
    "max_ind",
    "dreg_x",
    "dreg_y",
    "nash_gap",
    "avg_nash_gap",
    "target",
    "measured_target",
    "theoretical_upper",
    "within_bound",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub outcomes: Vec<PresetOutcome>,
}

impl ExperimentSummary {
    pub fn get(&self, preset: Preset) -> Option<&PresetOutcome> {
        self.outcomes.iter().find(|o| o.preset == preset)
    }
}

pub(crate) fn summary_row(cfg: &ExperimentConfig, o: &PresetOutcome) -> Vec<String> {
    let last = o.last();
    let measured = o.measured_target(cfg.dynamics);
    let target = match (cfg.dynamics, o.preset.target()) {
        (Dynamics::Hedge, t) => t.name(),
        (Dynamics::Averaged, Target::XIndividual) => "dreg_x",
        (Dynamics::Averaged, _) => "max_dreg",
    };
    let mut row = vec![
        o.preset.name().to_string(),
        cfg.dynamics.name().to_string(),
        fmt_num(o.rates.eta),
        fmt_num(o.rates.eta_prime),
        fmt_num(o.rates.c),
        fmt_num(o.rates.c_prime),
        last.t.to_string(),
    ];
    row.extend(last.values().iter().map(|&v| fmt_num(v)));
    row.push(target.to_string());
    row.push(fmt_num(measured));
    match o.upper {
        Some(u) => {
            row.push(fmt_num(u));
            row.push((measured < u).to_string());
        }
        None => {
            row.push(String::new());
            row.push(String::new());
        }
    }
    row
}

/// Run the configured presets and write `<out>/<preset>.csv` plus
/// `<out>/summary.csv`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let a = cfg.instance.matrix(cfg.m, cfg.n)?;
    let outcomes = run_all(&cfg, &a)?;

    fs::create_dir_all(&cfg.out)?;
    for o in &outcomes {
        write_csv(
            &cfg.out.join(format!("{}.csv", o.preset.name())),
            &RoundMetrics::COLUMNS,
            &metrics_rows(&cfg, &o.metrics),
        )?;
    }
    let rows: Vec<_> = outcomes.iter().map(|o| summary_row(&cfg, o)).collect();
    write_csv(&cfg.out.join("summary.csv"), &SUMMARY_COLUMNS, &rows)?;
    Ok(ExperimentSummary { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Instance;

    #[test]
    fn single_round_regret() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            m: 3,
            n: 4,
            horizon: 1,
            instance: Instance::Adversarial { delta: 0.5 },
            presets: vec![Preset::USocial],
            out: dir.path().to_path_buf(),
            ..Default::default()
        };
        let summary = run_experiment(&cfg).unwrap();
        let last = summary.outcomes[0].last();
        assert!((last.reg_x - 0.5 * (1.0 - 1.0 / 3.0)).abs() < 1e-15);
        let text = fs::read_to_string(dir.path().join("U-Social.csv")).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(dir.path().join("summary.csv").exists());
    }

    #[test]
    fn empty_presets_rejected() {
        let cfg = ExperimentConfig {
            presets: vec![],
            ..Default::default()
        };
        assert!(matches!(
            run_experiment(&cfg),
            Err(crate::Error::Config { .. })
        ));
    }
}
