//! Learner state machines.
//!
//! Every learner maximizes utility. The x-player feeds its gain vector
//! `g_t` directly; the y-player feeds the negated loss `-l_t`, so a single
//! implementation serves both sides of the game.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::Strategy;

/// Slack allowed on reconstructed utilities before they are rejected.
/// Reconstruction is exact in real arithmetic; this only absorbs rounding.
const RECONSTRUCTION_SLACK: f64 = 1e-9;

/// A player that produces one strategy per round and then observes that
/// round's utility vector.
pub trait Learner: Send {
    fn dim(&self) -> usize;

    /// Strategy for the current round. Calling it more than once in the
    /// same round returns the same strategy.
    fn next_strategy(&mut self) -> Result<Strategy>;

    /// Reveals the current round's utility vector and advances the round.
    fn observe(&mut self, utility: &[f64]) -> Result<()>;
}

/// Optimistic Hedge in cumulative form: `x_t(i) ∝ exp(η (Σ_{s<t} u_s(i) + u_{t-1}(i)))`
/// with `u_0 = 0`, so `x_1` is uniform.
///
/// The raw weights are never stored; only the cumulative and most recent
/// utilities are, and the softmax is evaluated with a max shift.
#[derive(Debug, Clone)]
pub struct HedgeState {
    rate: f64,
    cum: Vec<f64>,
    last: Vec<f64>,
    round: usize,
}

impl HedgeState {
    pub fn new(dim: usize, rate: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgs(
                "learner needs at least one action".into(),
            ));
        }
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgs(format!(
                "learning rate must be finite and nonnegative, got {rate}"
            )));
        }
        Ok(Self {
            rate,
            cum: vec![0.0; dim],
            last: vec![0.0; dim],
            round: 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.cum.len()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// 1-based index of the round whose strategy `next` returns.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    pub fn last(&self) -> &[f64] {
        &self.last
    }

    /// Strategy for the current round.
    pub fn next(&self) -> Result<Strategy> {
        if self.rate == 0.0 {
            return Ok(Strategy::uniform(self.dim()));
        }
        let logits: Vec<f64> = self
            .cum
            .iter()
            .zip(&self.last)
            .map(|(c, l)| self.rate * (c + l))
            .collect();
        softmax(logits)
    }

    /// Records utility `u` for the current round.
    pub fn observe(&mut self, u: &[f64]) -> Result<()> {
        self.check(u, 0.0)?;
        self.push(u);
        Ok(())
    }

    fn check(&self, u: &[f64], slack: f64) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if let Some((index, &value)) = u
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= 1.0 + slack))
        {
            return Err(Error::UtilityOutOfRange { index, value });
        }
        Ok(())
    }

    fn push(&mut self, u: &[f64]) {
        for ((c, l), &v) in self.cum.iter_mut().zip(self.last.iter_mut()).zip(u) {
            *c += v;
            *l = v;
        }
        self.round += 1;
    }
}

impl Learner for HedgeState {
    fn dim(&self) -> usize {
        HedgeState::dim(self)
    }

    fn next_strategy(&mut self) -> Result<Strategy> {
        self.next()
    }

    fn observe(&mut self, utility: &[f64]) -> Result<()> {
        HedgeState::observe(self, utility)
    }
}

/// Optimistic Hedge in one-step form: `w_t = w_{t-1} · exp(η (2 u_{t-1} - u_{t-2}))`,
/// tracked as log-weights. Produces the same iterates as [`HedgeState`].
#[derive(Debug, Clone)]
pub struct IncrementalHedge {
    rate: f64,
    log_weights: Vec<f64>,
    last: Vec<f64>,
}

impl IncrementalHedge {
    pub fn new(dim: usize, rate: f64) -> Result<Self> {
        // reuse the argument checks
        HedgeState::new(dim, rate)?;
        Ok(Self {
            rate,
            log_weights: vec![0.0; dim],
            last: vec![0.0; dim],
        })
    }

    pub fn next(&self) -> Result<Strategy> {
        softmax(self.log_weights.clone())
    }

    pub fn observe(&mut self, u: &[f64]) -> Result<()> {
        if u.len() != self.log_weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.log_weights.len(),
                got: u.len(),
            });
        }
        for ((w, l), &v) in self.log_weights.iter_mut().zip(self.last.iter_mut()).zip(u) {
            *w += self.rate * (2.0 * v - *l);
            *l = v;
        }
        Ok(())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Averaged-iterate dynamic: plays the running mean of an inner optimistic
/// Hedge learner and rebuilds the inner learner's feedback from the
/// gradients of the averaged strategies, `ĝ_t = t·g_t - Σ_{s<t} ĝ_s`.
#[derive(Debug, Clone)]
pub struct AveragedState {
    inner: HedgeState,
    hat_sum: Vec<CompensatedSum>,
    out_sum: Vec<f64>,
    current: Option<(Strategy, Strategy)>,
    last_reconstructed: Option<Vec<f64>>,
    round: usize,
}

impl AveragedState {
    pub fn new(dim: usize, rate: f64) -> Result<Self> {
        Ok(Self {
            inner: HedgeState::new(dim, rate)?,
            hat_sum: vec![CompensatedSum::default(); dim],
            out_sum: vec![0.0; dim],
            current: None,
            last_reconstructed: None,
            round: 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.out_sum.len()
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn inner(&self) -> &HedgeState {
        &self.inner
    }

    /// Averaged strategy `x_t = (1/t) Σ_{s≤t} x̂_s` for the current round.
    pub fn next(&mut self) -> Result<Strategy> {
        if let Some((_, avg)) = &self.current {
            return Ok(avg.clone());
        }
        let hat = self.inner.next()?;
        for (s, &p) in self.out_sum.iter_mut().zip(hat.probs()) {
            *s += p;
        }
        let t = self.round as f64;
        let avg = Strategy::from_normalized(self.out_sum.iter().map(|s| s / t).collect());
        self.current = Some((hat, avg.clone()));
        Ok(avg)
    }

    /// Inner optimistic Hedge iterate `x̂_t` of the current round, if
    /// [`next`](Self::next) has been called for it.
    pub fn current_inner(&self) -> Option<&Strategy> {
        self.current.as_ref().map(|(hat, _)| hat)
    }

    /// Reconstructed utility `ĝ` fed to the inner learner in the most
    /// recently completed round.
    pub fn last_reconstructed(&self) -> Option<&[f64]> {
        self.last_reconstructed.as_deref()
    }

    /// Observes the utility of the averaged strategy pair and feeds the
    /// reconstructed inner utility to the optimistic Hedge learner.
    pub fn observe(&mut self, averaged_utility: &[f64]) -> Result<()> {
        if averaged_utility.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: averaged_utility.len(),
            });
        }
        if self.current.is_none() {
            // the averaging step must see x̂_t before the round closes
            self.next()?;
        }
        let t = self.round as f64;
        let hat: Vec<f64> = averaged_utility
            .iter()
            .zip(&self.hat_sum)
            .map(|(g, s)| t * g - s.value())
            .collect();
        self.inner.check(&hat, RECONSTRUCTION_SLACK)?;
        self.inner.push(&hat);
        for (s, &v) in self.hat_sum.iter_mut().zip(&hat) {
            s.add(v);
        }
        self.last_reconstructed = Some(hat);
        self.current = None;
        self.round += 1;
        Ok(())
    }
}

impl Learner for AveragedState {
    fn dim(&self) -> usize {
        AveragedState::dim(self)
    }

    fn next_strategy(&mut self) -> Result<Strategy> {
        self.next()
    }

    fn observe(&mut self, utility: &[f64]) -> Result<()> {
        AveragedState::observe(self, utility)
    }
}

/// Plays the uniform distribution every round; the zero-rate limit.
#[derive(Debug, Clone)]
pub struct UniformLearner {
    dim: usize,
}

impl UniformLearner {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgs(
                "learner needs at least one action".into(),
            ));
        }
        Ok(Self { dim })
    }
}

impl Learner for UniformLearner {
    fn dim(&self) -> usize {
        self.dim
    }

    fn next_strategy(&mut self) -> Result<Strategy> {
        Ok(uniform_next(self.dim))
    }

    fn observe(&mut self, utility: &[f64]) -> Result<()> {
        if utility.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: utility.len(),
            });
        }
        Ok(())
    }
}

pub fn uniform_next(dim: usize) -> Strategy {
    Strategy::uniform(dim)
}

/// Which learning dynamic each player runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dynamics {
    /// Optimistic Hedge, playing its iterates directly.
    Hedge,
    /// Running average of optimistic Hedge iterates with gradient reconstruction.
    Averaged,
}

impl Dynamics {
    pub fn name(self) -> &'static str {
        match self {
            Dynamics::Hedge => "hedge",
            Dynamics::Averaged => "averaged",
        }
    }
}

impl FromStr for Dynamics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hedge" => Ok(Dynamics::Hedge),
            "averaged" | "avg" => Ok(Dynamics::Averaged),
            other => Err(Error::config(
                "algo",
                format!("unknown algorithm '{other}'"),
            )),
        }
    }
}

/// Builds a learner for `dim` actions. A zero rate yields the exact
/// uniform learner regardless of the dynamic.
pub fn build_learner(dynamics: Dynamics, dim: usize, rate: f64) -> Result<Box<dyn Learner>> {
    if rate == 0.0 {
        return Ok(Box::new(UniformLearner::new(dim)?));
    }
    Ok(match dynamics {
        Dynamics::Hedge => Box::new(HedgeState::new(dim, rate)?),
        Dynamics::Averaged => Box::new(AveragedState::new(dim, rate)?),
    })
}

/// Max-shifted softmax.
fn softmax(mut logits: Vec<f64>) -> Result<Strategy> {
    if let Some(index) = logits.iter().position(|z| !z.is_finite()) {
        return Err(Error::NonFiniteWeight { index });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        total += *z;
    }
    for z in logits.iter_mut() {
        *z /= total;
    }
    Ok(Strategy::from_normalized(logits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn first_round_is_uniform() {
        let h = HedgeState::new(3, 0.7).unwrap();
        assert_close(h.next().unwrap().probs(), &[1.0 / 3.0; 3], 1e-15);
    }

    #[test]
    fn zero_rate_is_uniform() {
        let mut h = HedgeState::new(2, 0.0).unwrap();
        h.observe(&[1.0, -1.0]).unwrap();
        h.observe(&[0.3, -0.9]).unwrap();
        assert_eq!(h.next().unwrap().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn second_round_closed_form() {
        // cum = last = g_1 = (0.5, -0.5), η = 1/2: logits (0.5, -0.5)
        let mut h = HedgeState::new(2, 0.5).unwrap();
        h.observe(&[0.5, -0.5]).unwrap();
        let x = h.next().unwrap();
        let e = (-1.0f64).exp();
        assert_close(x.probs(), &[1.0 / (1.0 + e), e / (1.0 + e)], 1e-15);
        assert!((x.probs()[0] - 0.731_058_578_630_005).abs() < 1e-12);
    }

    #[test]
    fn observe_semantics() {
        let mut h = HedgeState::new(2, 0.4).unwrap();
        h.observe(&[0.0, 0.0]).unwrap();
        assert_close(h.next().unwrap().probs(), &[0.5, 0.5], 0.0);

        let (g1, g2) = ([0.2, -0.6], [0.9, 0.1]);
        let mut h = HedgeState::new(2, 0.4).unwrap();
        h.observe(&g1).unwrap();
        h.observe(&g2).unwrap();
        let w: Vec<f64> = (0..2)
            .map(|i| (0.4 * (g1[i] + g2[i] + g2[i])).exp())
            .collect();
        let total: f64 = w.iter().sum();
        let expect: Vec<f64> = w.iter().map(|v| v / total).collect();
        assert_close(h.next().unwrap().probs(), &expect, 1e-15);
        assert_eq!(h.round(), 3);

        assert!(matches!(
            h.observe(&[1.5, 0.0]),
            Err(Error::UtilityOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            h.observe(&[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn large_histories_stay_finite() {
        // raw weights would overflow long before this
        let mut h = HedgeState::new(2, 0.5).unwrap();
        for _ in 0..5000 {
            h.observe(&[1.0, -1.0]).unwrap();
        }
        let x = h.next().unwrap();
        assert_eq!(x.probs()[0], 1.0);
        assert!(x.probs()[1] >= 0.0);
    }

    #[test]
    fn averaged_first_rounds() {
        let mut avg = AveragedState::new(2, 0.5).unwrap();
        let x1 = avg.next().unwrap();
        assert_close(x1.probs(), &[0.5, 0.5], 0.0);
        assert_eq!(avg.next().unwrap(), x1);

        avg.observe(&[0.5, -0.5]).unwrap();
        assert_close(avg.last_reconstructed().unwrap(), &[0.5, -0.5], 0.0);

        let x2 = avg.next().unwrap();
        let hat2 = avg.current_inner().unwrap().clone();
        let expect: Vec<f64> = hat2.probs().iter().map(|p| (p + 0.5) / 2.0).collect();
        assert_close(x2.probs(), &expect, 1e-15);

        // feeding the exact mean of (ĝ_1, ĝ_2) returns ĝ_2
        let g2 = [-0.25, 0.75];
        let mean: Vec<f64> = (0..2).map(|i| ([0.5, -0.5][i] + g2[i]) / 2.0).collect();
        avg.observe(&mean).unwrap();
        assert_close(avg.last_reconstructed().unwrap(), &g2, 1e-15);
    }

    #[test]
    fn averaged_keeps_uniform_mass() {
        let mut avg = AveragedState::new(4, 1.0).unwrap();
        for t in 1..=50usize {
            let x = avg.next().unwrap();
            let min = x.probs().iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= 1.0 / (4.0 * t as f64) - 1e-15);
            // a constant utility, so the averaged and inner feedback coincide
            avg.observe(&[1.0, -1.0, -1.0, -1.0]).unwrap();
        }
    }

    #[test]
    fn averaged_rejects_inconsistent_feedback() {
        let mut avg = AveragedState::new(2, 0.5).unwrap();
        avg.observe(&[1.0, -1.0]).unwrap();
        // ĝ_2 = 2·(-1) - 1 = -3
        assert!(matches!(
            avg.observe(&[-1.0, 1.0]),
            Err(Error::UtilityOutOfRange { .. })
        ));
    }

    #[test]
    fn uniform_learner() {
        assert_eq!(uniform_next(1).probs(), &[1.0]);
        assert_eq!(uniform_next(4).probs(), &[0.25; 4]);
        let mut u = UniformLearner::new(3).unwrap();
        u.observe(&[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(u.next_strategy().unwrap(), Strategy::uniform(3));
    }

    #[test]
    fn softmax_rejects_non_finite() {
        assert!(matches!(
            softmax(vec![0.0, f64::INFINITY]),
            Err(Error::NonFiniteWeight { index: 1 })
        ));
    }

    #[test]
    fn dynamics_parse() {
        assert_eq!("hedge".parse::<Dynamics>().unwrap(), Dynamics::Hedge);
        assert_eq!("Averaged".parse::<Dynamics>().unwrap(), Dynamics::Averaged);
        assert!("ftl".parse::<Dynamics>().is_err());
    }
}
