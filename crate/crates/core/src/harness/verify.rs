use std::fmt::Write as _;
use std::fs;

use rayon::prelude::*;

use crate::analysis::{lb_dynamic, lb_dynamic_at, lb_external, lb_external_at, RoundMetrics};
use crate::error::Result;
use crate::game::PayoffMatrix;
use crate::harness::experiment::{metrics_rows, run_preset, PresetOutcome};
use crate::harness::{fmt_num, write_csv, ExperimentConfig};
use crate::learners::Dynamics;
use crate::rates::{social_bound_for_rates, BoundInputs, Preset};

/// Slack allowed on the lower-bound comparisons.
pub const LOWER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl CheckStatus {
    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCheck {
    pub preset: Preset,
    pub check: String,
    pub lhs: f64,
    pub relation: &'static str,
    pub rhs: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub note: String,
}

impl VerifyCheck {
    fn compare(
        preset: Preset,
        check: impl Into<String>,
        lhs: f64,
        relation: &'static str,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let holds = match relation {
            "<" => lhs < rhs + tolerance,
            "<=" => lhs <= rhs + tolerance,
            ">=" => lhs >= rhs - tolerance,
            _ => unreachable!("unknown relation {relation}"),
        };
        Self {
            preset,
            check: check.into(),
            lhs,
            relation,
            rhs,
            tolerance,
            status: if holds {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: String::new(),
        }
    }

    fn skip(preset: Preset, check: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            preset,
            check: check.into(),
            lhs: f64::NAN,
            relation: "",
            rhs: f64::NAN,
            tolerance: 0.0,
            status: CheckStatus::Skip,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn to_text(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# verify m={} n={} T={} instance={} dynamics={}",
            cfg.m,
            cfg.n,
            cfg.horizon,
            cfg.instance,
            cfg.dynamics.name()
        );
        for c in &self.checks {
            let _ = match c.status {
                CheckStatus::Skip => writeln!(
                    out,
                    "SKIP  {:<13} {:<24} {}",
                    c.preset.name(),
                    c.check,
                    c.note
                ),
                s => writeln!(
                    out,
                    "{}  {:<13} {:<24} {} {} {}{}",
                    s.name(),
                    c.preset.name(),
                    c.check,
                    fmt_num(c.lhs),
                    c.relation,
                    fmt_num(c.rhs),
                    if c.tolerance > 0.0 {
                        format!(" (tol {})", fmt_num(c.tolerance))
                    } else {
                        String::new()
                    }
                ),
            };
        }
        let _ = writeln!(
            out,
            "# {} passed, {} failed, {} skipped",
            self.count(CheckStatus::Pass),
            self.count(CheckStatus::Fail),
            self.count(CheckStatus::Skip)
        );
        out
    }
}

/// Constants `C` with `t * nash_gap(x_t, y_t) <= C` for the averaged dynamic.
fn last_iterate_constants(
    preset: Preset,
    outcome: &PresetOutcome,
    b: &BoundInputs,
) -> Vec<(&'static str, f64)> {
    let (m, n) = (b.log_m, b.log_n);
    match preset {
        Preset::USocial => vec![("last_iterate", 2.0 * (m + n))],
        Preset::ASocial => vec![
            (
                "last_iterate_plus4",
                2.0 * (m * (n + 4.0)).sqrt() + 2.0 * (n * (m + 4.0)).sqrt(),
            ),
            ("last_iterate_plus_half", 2.0 * b.aware_scale()),
        ],
        Preset::UXOnly | Preset::AXOnly => vec![],
        _ => social_bound_for_rates(outcome.rates.eta, outcome.rates.eta_prime, b)
            .map(|c| vec![("last_iterate", c)])
            .unwrap_or_default(),
    }
}

struct PresetVerification {
    checks: Vec<VerifyCheck>,
    upper_metrics: Vec<RoundMetrics>,
    lower_metrics: Option<Vec<RoundMetrics>>,
}

fn verify_preset(
    cfg: &ExperimentConfig,
    a: &PayoffMatrix,
    preset: Preset,
) -> Result<PresetVerification> {
    let (m, n, horizon) = (cfg.m, cfg.n, cfg.horizon);
    let dynamics = cfg.dynamics;
    let b = BoundInputs::new(m, n)?;
    let mut checks = Vec::new();

    let upper = run_preset(a, preset, dynamics, horizon)?;
    let target = upper.measured_target(dynamics);
    let name = match dynamics {
        Dynamics::Hedge => format!("upper_{}", preset.target().name()),
        Dynamics::Averaged => "upper_dynamic".to_string(),
    };
    checks.push(match upper.upper {
        Some(bound) => VerifyCheck::compare(preset, name, target, "<", bound, 0.0),
        None => VerifyCheck::skip(preset, name, "no bound for this preset and dynamic"),
    });

    let mut lower_metrics = None;
    if m >= 2 && n >= 2 && upper.rates.eta > 0.0 {
        let rates = upper.rates;
        let lb = match dynamics {
            Dynamics::Hedge => lb_external(m, rates.eta, horizon)?,
            Dynamics::Averaged => lb_dynamic(m, rates.eta, horizon)?,
        };
        let instance = PayoffMatrix::adversarial(m, n, lb.delta_star)?;
        let run = run_preset(&instance, preset, dynamics, horizon)?;
        let last = run.last();
        let (lx, ly) = match dynamics {
            Dynamics::Hedge => (last.reg_x, last.reg_y),
            Dynamics::Averaged => (last.dreg_x, last.dreg_y),
        };
        checks.push(VerifyCheck::compare(
            preset, "lower_x", lx, ">=", lb.value, LOWER_TOL,
        ));
        if rates.eta_prime > 0.0 {
            let bound_y = match dynamics {
                Dynamics::Hedge => lb_external_at(n, rates.eta_prime, horizon, lb.delta_star)?,
                Dynamics::Averaged => lb_dynamic_at(n, rates.eta_prime, horizon, lb.delta_star)?,
            };
            checks.push(VerifyCheck::compare(
                preset, "lower_y", ly, ">=", bound_y, LOWER_TOL,
            ));
        } else {
            checks.push(VerifyCheck::skip(
                preset,
                "lower_y",
                "y-player does not learn",
            ));
        }
        lower_metrics = Some(run.metrics);
    } else {
        checks.push(VerifyCheck::skip(
            preset,
            "lower_x",
            "needs m, n >= 2 and a learning x-player",
        ));
    }

    if dynamics == Dynamics::Averaged {
        let constants = last_iterate_constants(preset, &upper, &b);
        if constants.is_empty() {
            checks.push(VerifyCheck::skip(
                preset,
                "last_iterate",
                "no last-iterate guarantee",
            ));
        }
        let worst = upper
            .metrics
            .iter()
            .filter(|r| cfg.emits(r.t))
            .map(|r| r.t as f64 * r.nash_gap)
            .fold(0.0, f64::max);
        for (label, constant) in constants {
            checks.push(VerifyCheck::compare(
                preset, label, worst, "<=", constant, 0.0,
            ));
        }
    }

    Ok(PresetVerification {
        checks,
        upper_metrics: upper.metrics,
        lower_metrics,
    })
}

pub const VERIFY_COLUMNS: [&str; 8] = [
    "preset",
    "check",
    "lhs",
    "relation",
    "rhs",
    "tolerance",
    "status",
    "note",
];

/// Check every configured preset against its upper bound, the lower bound on
/// the adversarial instance at the bound-maximizing gap, and (averaged
/// dynamic) the last-iterate Nash-gap rate. Writes `verify_report.txt`,
/// `verify.csv` and the metric files the comparisons are computed from.
pub fn verify_bounds(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let a = cfg.instance.matrix(cfg.m, cfg.n)?;
    let results: Vec<PresetVerification> = cfg
        .presets
        .par_iter()
        .map(|&p| verify_preset(&cfg, &a, p))
        .collect::<Result<_>>()?;

    fs::create_dir_all(&cfg.out)?;
    let mut report = VerifyReport::default();
    for (preset, r) in cfg.presets.iter().zip(results) {
        write_csv(
            &cfg.out.join(format!("{}.upper.csv", preset.name())),
            &RoundMetrics::COLUMNS,
            &metrics_rows(&cfg, &r.upper_metrics),
        )?;
        if let Some(lower) = &r.lower_metrics {
            write_csv(
                &cfg.out.join(format!("{}.lower.csv", preset.name())),
                &RoundMetrics::COLUMNS,
                &metrics_rows(&cfg, lower),
            )?;
        }
        report.checks.extend(r.checks);
    }

    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.preset.name().to_string(),
                c.check.clone(),
                fmt_num(c.lhs),
                c.relation.to_string(),
                fmt_num(c.rhs),
                fmt_num(c.tolerance),
                c.status.name().to_string(),
                c.note.clone(),
            ]
        })
        .collect();
    write_csv(&cfg.out.join("verify.csv"), &VERIFY_COLUMNS, &rows)?;
    fs::write(cfg.out.join("verify_report.txt"), report.to_text(&cfg))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Instance;

    #[test]
    fn small_verify_passes() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            m: 3,
            n: 5,
            horizon: 300,
            instance: Instance::Adversarial { delta: 1.0 },
            out: dir.path().to_path_buf(),
            ..Default::default()
        };
        let report = verify_bounds(&cfg).unwrap();
        assert!(report.all_pass(), "{}", report.to_text(&cfg));
        assert!(dir.path().join("verify.csv").exists());
        assert!(dir.path().join("A-Social.lower.csv").exists());
    }
}
