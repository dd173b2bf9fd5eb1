//! The round protocol: both learners commit to a strategy, then each sees
//! only its own gradient.

use crate::analysis::{RegretMeter, RoundMetrics};
use crate::error::{Error, Result};
use crate::game::{PayoffMatrix, Strategy};
use crate::learners::Learner;

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub t: usize,
    pub x: Strategy,
    pub y: Strategy,
    /// `g_t = A y_t`
    pub gain: Vec<f64>,
    /// `l_t = A^T x_t`
    pub loss: Vec<f64>,
}

/// `Full` keeps every strategy and gradient; `Metrics` keeps only the
/// per-round metrics, which are computed identically in both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Full,
    Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchTrace {
    mode: TraceMode,
    rows: usize,
    cols: usize,
    rounds: Vec<Round>,
    metrics: Vec<RoundMetrics>,
}

impl MatchTrace {
    pub fn mode(&self) -> TraceMode {
        self.mode
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.metrics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metrics.is_empty()
    }

    /// Stored rounds; empty in metrics mode.
    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn metrics(&self) -> &[RoundMetrics] {
        &self.metrics
    }

    /// Largest deviation between the stored gradients and `A y_t`, `A^T x_t`
    /// recomputed from the stored strategies.
    pub fn max_gradient_deviation(&self, a: &PayoffMatrix) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for r in &self.rounds {
            let g = a.gain(r.y.probs())?;
            let l = a.loss(r.x.probs())?;
            for (u, v) in g.iter().zip(&r.gain).chain(l.iter().zip(&r.loss)) {
                worst = worst.max((u - v).abs());
            }
        }
        Ok(worst)
    }
}

/// Run `T` rounds of `x_learner` against `y_learner` on `A`.
pub fn play_match(
    a: &PayoffMatrix,
    x_learner: &mut dyn Learner,
    y_learner: &mut dyn Learner,
    horizon: usize,
    mode: TraceMode,
) -> Result<MatchTrace> {
    play_match_observed(a, x_learner, y_learner, horizon, mode, |_| {})
}

/// [`play_match`] with a callback that sees every round as it is played.
pub fn play_match_observed(
    a: &PayoffMatrix,
    x_learner: &mut dyn Learner,
    y_learner: &mut dyn Learner,
    horizon: usize,
    mode: TraceMode,
    mut on_round: impl FnMut(&Round),
) -> Result<MatchTrace> {
    let (m, n) = (a.rows(), a.cols());
    if x_learner.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: x_learner.dim(),
        });
    }
    if y_learner.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y_learner.dim(),
        });
    }

    let mut meter = RegretMeter::new(m, n);
    let mut trace = MatchTrace {
        mode,
        rows: m,
        cols: n,
        rounds: Vec::new(),
        metrics: Vec::with_capacity(horizon),
    };
    let mut gain = vec![0.0; m];
    let mut loss = vec![0.0; n];
    let mut neg_loss = vec![0.0; n];

    for t in 1..=horizon {
        let x = x_learner.next_strategy()?;
        let y = y_learner.next_strategy()?;
        a.gain_into(y.probs(), &mut gain)?;
        a.loss_into(x.probs(), &mut loss)?;

        x_learner.observe(&gain)?;
        for (nl, l) in neg_loss.iter_mut().zip(&loss) {
            *nl = -l;
        }
        y_learner.observe(&neg_loss)?;

        trace
            .metrics
            .push(meter.record(x.probs(), y.probs(), &gain, &loss)?);
        let round = Round {
            t,
            x,
            y,
            gain: gain.clone(),
            loss: loss.clone(),
        };
        on_round(&round);
        if mode == TraceMode::Full {
            trace.rounds.push(round);
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::HedgeState;

    #[test]
    fn empty_and_first_round() {
        let a = PayoffMatrix::adversarial(3, 2, 1.0).unwrap();
        let mut x = HedgeState::new(3, 0.5).unwrap();
        let mut y = HedgeState::new(2, 0.5).unwrap();
        let trace = play_match(&a, &mut x, &mut y, 0, TraceMode::Full).unwrap();
        assert!(trace.is_empty());

        let trace = play_match(&a, &mut x, &mut y, 1, TraceMode::Full).unwrap();
        assert_eq!(trace.rounds()[0].x, Strategy::uniform(3));
        assert_eq!(trace.rounds()[0].y, Strategy::uniform(2));
    }

    #[test]
    fn second_round_closed_form() {
        let a = PayoffMatrix::adversarial(2, 2, 1.0).unwrap();
        let mut x = HedgeState::new(2, 0.5).unwrap();
        let mut y = HedgeState::new(2, 0.5).unwrap();
        let trace = play_match(&a, &mut x, &mut y, 2, TraceMode::Full).unwrap();
        let x2 = trace.rounds()[1].x.probs()[0];
        assert!((x2 - 1.0 / (1.0 + (-1f64).exp())).abs() < 1e-15);
        assert_eq!(trace.max_gradient_deviation(&a).unwrap(), 0.0);
    }

    #[test]
    fn dimension_checks() {
        let a = PayoffMatrix::matching_pennies();
        let mut x = HedgeState::new(3, 0.5).unwrap();
        let mut y = HedgeState::new(2, 0.5).unwrap();
        assert!(matches!(
            play_match(&a, &mut x, &mut y, 1, TraceMode::Full),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn modes_agree() {
        let a = PayoffMatrix::adversarial(4, 3, 0.7).unwrap();
        let run = |mode| {
            let mut x = HedgeState::new(4, 0.3).unwrap();
            let mut y = HedgeState::new(3, 0.2).unwrap();
            play_match(&a, &mut x, &mut y, 50, mode).unwrap()
        };
        let full = run(TraceMode::Full);
        let lean = run(TraceMode::Metrics);
        assert_eq!(full.metrics(), lean.metrics());
        assert!(lean.rounds().is_empty());
    }
}
