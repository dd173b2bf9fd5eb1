//! Regret metrics, the Nash gap, the closed-form trajectory on the
//! adversarial instance, and lower-bound evaluators.

use crate::error::{Error, Result};
use crate::game::{dot, PayoffMatrix, Strategy};
use crate::play::{MatchTrace, TraceMode};

/// Running metrics after round `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoundMetrics {
    pub t: usize,
    pub reg_x: f64,
    pub reg_y: f64,
    pub social: f64,
    pub max_ind: f64,
    pub dreg_x: f64,
    pub dreg_y: f64,
    /// Nash gap of the pair played at round `t`.
    pub nash_gap: f64,
    /// Nash gap of the time-averaged pair after `t` rounds.
    pub avg_nash_gap: f64,
}

impl RoundMetrics {
    pub const COLUMNS: [&'static str; 9] = [
        "t",
        "reg_x",
        "reg_y",
        "social",
        "max_ind",
        "dreg_x",
        "dreg_y",
        "nash_gap",
        "avg_nash_gap",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.reg_x,
            self.reg_y,
            self.social,
            self.max_ind,
            self.dreg_x,
            self.dreg_y,
            self.nash_gap,
            self.avg_nash_gap,
        ]
    }
}

/// Single-pass regret bookkeeping; needs no stored history.
#[derive(Debug, Clone)]
pub struct RegretMeter {
    cum_gain: Vec<f64>,
    cum_loss: Vec<f64>,
    payoff_x: f64,
    payoff_y: f64,
    dyn_x: f64,
    dyn_y: f64,
    rounds: usize,
}

impl RegretMeter {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            cum_gain: vec![0.0; rows],
            cum_loss: vec![0.0; cols],
            payoff_x: 0.0,
            payoff_y: 0.0,
            dyn_x: 0.0,
            dyn_y: 0.0,
            rounds: 0,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Record one round with gains `g = A y` and losses `l = A^T x`.
    pub fn record(
        &mut self,
        x: &[f64],
        y: &[f64],
        gain: &[f64],
        loss: &[f64],
    ) -> Result<RoundMetrics> {
        let (m, n) = (self.cum_gain.len(), self.cum_loss.len());
        for (expected, got) in [(m, x.len()), (m, gain.len()), (n, y.len()), (n, loss.len())] {
            if expected != got {
                return Err(Error::DimensionMismatch { expected, got });
            }
        }
        self.rounds += 1;
        let value_x = dot(x, gain);
        let value_y = dot(y, loss);
        self.payoff_x += value_x;
        self.payoff_y += value_y;
        for (c, g) in self.cum_gain.iter_mut().zip(gain) {
            *c += g;
        }
        for (c, l) in self.cum_loss.iter_mut().zip(loss) {
            *c += l;
        }
        let best_gain = max(gain);
        let least_loss = min(loss);
        self.dyn_x += best_gain - value_x;
        self.dyn_y += value_y - least_loss;

        let t = self.rounds as f64;
        let best_cum_gain = max(&self.cum_gain);
        let least_cum_loss = min(&self.cum_loss);
        let reg_x = best_cum_gain - self.payoff_x;
        let reg_y = self.payoff_y - least_cum_loss;
        Ok(RoundMetrics {
            t: self.rounds,
            reg_x,
            reg_y,
            social: reg_x + reg_y,
            max_ind: reg_x.max(reg_y),
            dreg_x: self.dyn_x,
            dreg_y: self.dyn_y,
            nash_gap: best_gain - least_loss,
            avg_nash_gap: best_cum_gain / t - least_cum_loss / t,
        })
    }
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegretReport {
    pub rounds: usize,
    pub reg_x: f64,
    pub reg_y: f64,
    pub social: f64,
    pub max_individual: f64,
    pub dreg_x: f64,
    pub dreg_y: f64,
    pub per_round: Option<Vec<RoundMetrics>>,
}

impl RegretReport {
    fn from_metrics(last: Option<&RoundMetrics>, per_round: Vec<RoundMetrics>) -> Self {
        let last = last.copied().unwrap_or_default();
        Self {
            rounds: last.t,
            reg_x: last.reg_x,
            reg_y: last.reg_y,
            social: last.social,
            max_individual: last.max_ind,
            dreg_x: last.dreg_x,
            dreg_y: last.dreg_y,
            per_round: Some(per_round),
        }
    }
}

/// Final and running regrets of a trace. Full traces are re-metered from
/// the stored rounds; metrics-only traces report what was recorded live.
pub fn regret_report(trace: &MatchTrace) -> Result<RegretReport> {
    match trace.mode() {
        TraceMode::Metrics => Ok(RegretReport::from_metrics(
            trace.metrics().last(),
            trace.metrics().to_vec(),
        )),
        TraceMode::Full => {
            let mut meter = RegretMeter::new(trace.rows(), trace.cols());
            let mut per_round = Vec::with_capacity(trace.len());
            for r in trace.rounds() {
                per_round.push(meter.record(r.x.probs(), r.y.probs(), &r.gain, &r.loss)?);
            }
            Ok(RegretReport::from_metrics(
                per_round.last(),
                per_round.clone(),
            ))
        }
    }
}

/// `max_i (A y)(i) - min_j (A^T x)(j)`: the smallest `ε` for which `(x, y)`
/// is an `ε`-approximate Nash equilibrium.
pub fn nash_gap(a: &PayoffMatrix, x: &Strategy, y: &Strategy) -> Result<f64> {
    Ok(max(&a.gain(y.probs())?) - min(&a.loss(x.probs())?))
}

fn check_instance(m: usize, eta: f64, delta: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgs(format!("need m >= 2, got {m}")));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgs(format!(
            "rate {eta} must be nonnegative"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgs(format!("gap {delta} outside (0, 1]")));
    }
    Ok(())
}

/// Probability of action 1 at round `t` of optimistic Hedge self-play on
/// the adversarial instance: `1/m` at `t = 1`, then
/// `1 / (1 + (m - 1) exp(-η Δ t))`.
pub fn oracle_x1(m: usize, eta: f64, delta: f64, t: usize) -> Result<f64> {
    check_instance(m, eta, delta)?;
    if t == 0 {
        return Err(Error::InvalidArgs("rounds are numbered from 1".into()));
    }
    if t == 1 {
        return Ok(1.0 / m as f64);
    }
    Ok(1.0 / (1.0 + (m as f64 - 1.0) * (-eta * delta * t as f64).exp()))
}

/// External regret of the x-player on the adversarial instance, summed from
/// the closed-form trajectory: `Σ_t Δ (1 - x_t(1))`.
pub fn oracle_regret(m: usize, eta: f64, delta: f64, horizon: usize) -> Result<f64> {
    check_instance(m, eta, delta)?;
    (1..=horizon)
        .map(|t| Ok(delta * (1.0 - oracle_x1(m, eta, delta, t)?)))
        .sum()
}

/// Dynamic regret of the x-player under the averaged dynamic on the same
/// instance: the played `x_t(1)` is the running mean of the inner iterates.
pub fn oracle_dynamic_regret(m: usize, eta: f64, delta: f64, horizon: usize) -> Result<f64> {
    check_instance(m, eta, delta)?;
    let mut inner_sum = 0.0;
    let mut total = 0.0;
    for t in 1..=horizon {
        inner_sum += oracle_x1(m, eta, delta, t)?;
        total += delta * (1.0 - inner_sum / t as f64);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    LargeRate,
    SmallRate,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::LargeRate => "large_rate",
            Branch::SmallRate => "small_rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundValue {
    pub delta_star: f64,
    pub value: f64,
    pub branch: Branch,
}

fn check_bound_args(m: usize, eta: f64, horizon: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgs(format!("need m >= 2, got {m}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgs(format!("rate {eta} must be positive")));
    }
    if horizon == 0 {
        return Err(Error::InvalidArgs("horizon must be >= 1".into()));
    }
    Ok(())
}

/// External-regret lower bound for optimistic Hedge at rate `η` over `T`
/// rounds, with the gap `Δ*` that maximizes it.
pub fn lb_external(m: usize, eta: f64, horizon: usize) -> Result<LowerBoundValue> {
    check_bound_args(m, eta, horizon)?;
    let tp1 = horizon as f64 + 1.0;
    let log_m = (m as f64).ln();
    let big_l = ((m as f64 - 1.0) * tp1).ln();
    let delta_star = (big_l / (eta * tp1)).min(1.0);
    if eta >= big_l / tp1 {
        Ok(LowerBoundValue {
            delta_star,
            value: log_m / eta - (big_l + 1.0) / (eta * tp1),
            branch: Branch::LargeRate,
        })
    } else {
        Ok(LowerBoundValue {
            delta_star,
            value: (log_m - eta - (m as f64 - 1.0) * (-eta * tp1).exp()) / eta,
            branch: Branch::SmallRate,
        })
    }
}

/// The same bound at an arbitrary gap `Δ`:
/// `(1/η)(log m - η Δ - (m - 1) exp(-η Δ (T + 1)))`.
pub fn lb_external_at(m: usize, eta: f64, horizon: usize, delta: f64) -> Result<f64> {
    check_bound_args(m, eta, horizon)?;
    check_instance(m, eta, delta)?;
    let tp1 = horizon as f64 + 1.0;
    Ok(((m as f64).ln() - eta * delta - (m as f64 - 1.0) * (-eta * delta * tp1).exp()) / eta)
}

fn kappa(horizon: usize) -> f64 {
    (horizon as f64 + 1.0).sqrt() + 1.0
}

/// Dynamic-regret lower bound for the averaged dynamic, with
/// `κ = sqrt(T + 1) + 1`.
pub fn lb_dynamic(m: usize, eta: f64, horizon: usize) -> Result<LowerBoundValue> {
    check_bound_args(m, eta, horizon)?;
    let k = kappa(horizon);
    let log_m = (m as f64).ln();
    let log_t = (horizon as f64 + 1.0).ln();
    let big_l = ((m as f64 - 1.0) * k).ln();
    let delta_star = (big_l / (eta * k)).min(1.0);
    if eta >= big_l / k {
        Ok(LowerBoundValue {
            delta_star,
            value: log_m * log_t / (2.0 * eta) - (big_l + 1.0) / (eta * k),
            branch: Branch::LargeRate,
        })
    } else {
        Ok(LowerBoundValue {
            delta_star,
            value: log_t / (2.0 * eta) * (log_m - eta - (m as f64 - 1.0) * (-eta * k).exp()),
            branch: Branch::SmallRate,
        })
    }
}

/// The dynamic bound at an arbitrary gap `Δ`:
/// `(log(T + 1) / (2η)) (log m - η Δ - (m - 1) exp(-η Δ κ))`.
/// At the `Δ` of [`lb_dynamic`] this is smaller than the large-rate closed
/// form, whose correction term lacks the `log(T + 1) / 2` factor.
pub fn lb_dynamic_at(m: usize, eta: f64, horizon: usize, delta: f64) -> Result<f64> {
    check_bound_args(m, eta, horizon)?;
    check_instance(m, eta, delta)?;
    let k = kappa(horizon);
    let log_t = (horizon as f64 + 1.0).ln();
    Ok(log_t / (2.0 * eta)
        * ((m as f64).ln() - eta * delta - (m as f64 - 1.0) * (-eta * delta * k).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nash_gap_examples() {
        let mp = PayoffMatrix::matching_pennies();
        let u = Strategy::uniform(2);
        assert_eq!(nash_gap(&mp, &u, &u).unwrap(), 0.0);
        let e1 = Strategy::pure(2, 0);
        assert_eq!(nash_gap(&mp, &e1, &e1).unwrap(), 2.0);
        assert!(matches!(
            nash_gap(&mp, &Strategy::uniform(3), &u),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_x1(2, 0.5, 1.0, 1).unwrap(), 0.5);
        assert!((oracle_x1(2, 0.5, 1.0, 4).unwrap() - 0.880_797_077_977_882_4).abs() < 1e-15);
        assert!((oracle_x1(2, 0.5, 1.0, 2).unwrap() - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert!(oracle_x1(1, 0.5, 1.0, 2).is_err());
        assert!(oracle_x1(2, 0.5, 0.0, 2).is_err());
        assert!(oracle_x1(2, 0.5, 1.0, 0).is_err());
        let r = oracle_regret(2, 0.5, 1.0, 2000).unwrap();
        assert!((r - 1.2692).abs() < 1e-3, "{r}");
    }

    #[test]
    fn external_lower_bound_examples() {
        let lb = lb_external(2, 0.5, 2000).unwrap();
        assert_eq!(lb.branch, Branch::LargeRate);
        assert!((lb.delta_star - 0.007_597_6).abs() < 1e-7);
        assert!((lb.value - 1.377_697).abs() < 1e-6);
        // the closed form is the general bound evaluated at Δ*
        let at = lb_external_at(2, 0.5, 2000, lb.delta_star).unwrap();
        assert!((at - lb.value).abs() < 1e-12);

        let small = lb_external(2, 0.001, 2000).unwrap();
        assert_eq!(small.branch, Branch::SmallRate);
        assert_eq!(small.delta_star, 1.0);
        assert!((small.value - 556.947).abs() < 1e-3, "{}", small.value);

        // the gap to log(m)/η is (log(T+1) + 1)/(η(T+1)) and vanishes as T grows
        let far = lb_external(2, 0.5, 1_000_000).unwrap();
        let correction = 2f64.ln() / 0.5 - far.value;
        assert!((correction - (1_000_001f64.ln() + 1.0) / 500_000.5).abs() < 1e-15);
        assert!(correction < 3e-5);
        let farther = lb_external(2, 0.5, 100_000_000).unwrap();
        assert!(2f64.ln() / 0.5 - farther.value < 4e-7);
        assert!(lb_external(2, 0.0, 10).is_err());
    }

    #[test]
    fn dynamic_lower_bound_examples() {
        let lb = lb_dynamic(2, 0.5, 2000).unwrap();
        assert_eq!(lb.branch, Branch::LargeRate);
        // ln2 ln2001 - (ln(κ) + 1)/(κ/2) with κ = sqrt(2001) + 1
        let k = 2001f64.sqrt() + 1.0;
        let hand = 2f64.ln() * 2001f64.ln() - (k.ln() + 1.0) / (0.5 * k);
        assert!((lb.value - hand).abs() < 1e-12);
        assert!((lb.value - 5.057_977).abs() < 1e-6, "{}", lb.value);
        let lb10 = lb_dynamic(10, 0.5, 2000).unwrap();
        let hand10 = 10f64.ln() * 2001f64.ln() - ((9.0 * k).ln() + 1.0) / (0.5 * k);
        assert!((lb10.value - hand10).abs() < 1e-12);
        assert!((lb10.value - 17.195_872).abs() < 1e-6, "{}", lb10.value);
        assert_eq!(lb_dynamic(2, 0.08, 2000).unwrap().branch, Branch::SmallRate);
        assert_eq!(lb_dynamic(2, 0.09, 2000).unwrap().branch, Branch::LargeRate);
        // the stated large-rate form subtracts (L+1)/(ηκ); substituting Δ
        // into the general form subtracts log(T+1)/2 times that
        let at = lb_dynamic_at(2, 0.5, 2000, lb.delta_star).unwrap();
        let corr = (k.ln() + 1.0) / (0.5 * k);
        assert!((at - (hand - (2001f64.ln() / 2.0 - 1.0) * corr)).abs() < 1e-12);
        assert!(at < lb.value);
    }

    #[test]
    fn meter_basics() {
        let mut meter = RegretMeter::new(2, 2);
        let m = meter
            .record(&[0.5, 0.5], &[0.5, 0.5], &[0.5, -0.5], &[-0.5, 0.5])
            .unwrap();
        assert_eq!(m.t, 1);
        assert!((m.reg_x - 0.5).abs() < 1e-15 && (m.reg_y - 0.5).abs() < 1e-15);
        assert_eq!(m.social, m.reg_x + m.reg_y);
        assert_eq!(m.nash_gap, 1.0);
        assert!(meter
            .record(&[1.0], &[0.5, 0.5], &[0.0, 0.0], &[0.0, 0.0])
            .is_err());
    }
}
