use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{fmt_num, write_csv};
use crate::optimizer::{minimize, Objective, OptimizeOptions, OptimizeResult};
use crate::rates::{BoundInputs, RateParams};

/// One optimum of the tradeoff: a `J_γ` minimizer (`gamma = Some`) or the
/// `max{f, g}` minimizer (`gamma = None`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: Option<f64>,
    pub f_star: f64,
    pub g_star: f64,
    pub j_star: Option<f64>,
    pub max_fg_star: f64,
    pub rates: RateParams,
    pub converged: bool,
}

impl SweepRow {
    fn from_result(gamma: Option<f64>, r: &OptimizeResult) -> Self {
        let (f, g) = (r.f_value.value(), r.g_value.value());
        Self {
            gamma,
            f_star: f,
            g_star: g,
            j_star: gamma.map(|_| r.objective_value),
            max_fg_star: f.max(g),
            rates: r.rates,
            converged: r.converged(),
        }
    }
}

/// `J_γ` optima over `grid` followed by the single `max{f, g}` optimum.
pub fn sweep_gamma(
    m: usize,
    n: usize,
    grid: &[f64],
    opts: &OptimizeOptions,
) -> Result<Vec<SweepRow>> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidArgs(format!(
            "the sweep needs m, n >= 2, got {m}x{n}"
        )));
    }
    if let Some(&bad) = grid.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
        return Err(Error::InvalidGamma(bad));
    }
    let b = BoundInputs::new(m, n)?;
    let mut rows = grid
        .iter()
        .map(|&gamma| {
            Ok(SweepRow::from_result(
                Some(gamma),
                &minimize(Objective::JGamma(gamma), &b, opts)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.push(SweepRow::from_result(
        None,
        &minimize(Objective::MaxFg, &b, opts)?,
    ));
    Ok(rows)
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "kind",
    "gamma",
    "f_star",
    "g_star",
    "J_star",
    "max_fg_star",
    "eta",
    "eta_prime",
    "c",
    "c_prime",
    "converged",
];

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                if r.gamma.is_some() {
                    "J_gamma"
                } else {
                    "max_fg"
                }
                .to_string(),
                opt(r.gamma),
                fmt_num(r.f_star),
                fmt_num(r.g_star),
                opt(r.j_star),
                fmt_num(r.max_fg_star),
                fmt_num(r.rates.eta),
                fmt_num(r.rates.eta_prime),
                fmt_num(r.rates.c),
                fmt_num(r.rates.c_prime),
                r.converged.to_string(),
            ]
        })
        .collect();
    write_csv(path, &SWEEP_COLUMNS, &records)
}
