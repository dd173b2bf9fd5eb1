//! Learning-rate parameters `λ = (η, η', c, c')`, the regret-bound
//! functions built on them, and the named rate presets.
//!
//! `η, η'` are the players' learning rates; `c, c'` are analysis
//! coefficients that split the negative stability terms of the optimistic
//! Hedge bound. The feasible region is
//! `ηη' <= min{c'(1 - c), c(1 - c')}`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::learners::Dynamics;
use crate::optimizer::{self, Objective, OptimizeOptions};

/// Relative tolerance used to detect `ηη'` sitting on a constraint boundary.
pub const BOUNDARY_RTOL: f64 = 1e-12;

/// A regret bound value; the boundary of the feasible region maps to
/// [`Bound::Infinite`], which compares greater than every finite bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::Finite(v) => v,
            Bound::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Bound::Infinite, Bound::Infinite) => Some(Ordering::Equal),
            (Bound::Infinite, Bound::Finite(_)) => Some(Ordering::Greater),
            (Bound::Finite(_), Bound::Infinite) => Some(Ordering::Less),
            (Bound::Finite(a), Bound::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

/// `λ = (η, η', c, c')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub eta: f64,
    pub eta_prime: f64,
    pub c: f64,
    pub c_prime: f64,
}

impl RateParams {
    pub fn new(eta: f64, eta_prime: f64, c: f64, c_prime: f64) -> Result<Self> {
        let ok_rate = |r: f64| r >= 0.0 && r.is_finite();
        let ok_coef = |c: f64| c > 0.0 && c.is_finite();
        if !(ok_rate(eta) && ok_rate(eta_prime)) {
            return Err(Error::InvalidArgs(format!(
                "learning rates must be finite and nonnegative, got ({eta}, {eta_prime})"
            )));
        }
        if !(ok_coef(c) && ok_coef(c_prime)) {
            return Err(Error::InvalidArgs(format!(
                "coefficients must be finite and positive, got ({c}, {c_prime})"
            )));
        }
        Ok(Self {
            eta,
            eta_prime,
            c,
            c_prime,
        })
    }

    /// Membership in the feasible region, tested exactly with no slack.
    pub fn is_feasible(&self) -> bool {
        let prod = self.eta * self.eta_prime;
        prod <= self.c_prime * (1.0 - self.c) && prod <= self.c * (1.0 - self.c_prime)
    }
}

pub fn is_feasible(rates: &RateParams) -> bool {
    rates.is_feasible()
}

/// Transformed coordinates: `a = η/c`, `a' = η'/c'`, and the constraint
/// slacks `s = b/a - a'`, `s' = b'/a' - a` where `b = 1/c - 1`, `b' = 1/c' - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedParams {
    pub a: f64,
    pub a_prime: f64,
    pub s: f64,
    pub s_prime: f64,
}

impl TransformedParams {
    pub fn new(a: f64, a_prime: f64, s: f64, s_prime: f64) -> Result<Self> {
        if !(a > 0.0 && a_prime > 0.0 && a.is_finite() && a_prime.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "a, a' must be positive, got ({a}, {a_prime})"
            )));
        }
        if !(s >= 0.0 && s_prime >= 0.0 && s.is_finite() && s_prime.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "s, s' must be nonnegative, got ({s}, {s_prime})"
            )));
        }
        Ok(Self {
            a,
            a_prime,
            s,
            s_prime,
        })
    }

    /// From log coordinates `(p, p', q, q') = (log a, log a', log s, log s')`.
    pub fn from_log(z: [f64; 4]) -> Result<Self> {
        Self::new(z[0].exp(), z[1].exp(), z[2].exp(), z[3].exp())
    }

    /// Log coordinates; only defined when both slacks are positive.
    pub fn log_coords(&self) -> Option<[f64; 4]> {
        (self.s > 0.0 && self.s_prime > 0.0).then(|| {
            [
                self.a.ln(),
                self.a_prime.ln(),
                self.s.ln(),
                self.s_prime.ln(),
            ]
        })
    }
}

pub fn to_transformed(rates: &RateParams) -> Result<TransformedParams> {
    let RateParams {
        eta,
        eta_prime,
        c,
        c_prime,
    } = *rates;
    for (name, v) in [("c", c), ("c'", c_prime)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfDomain(format!("{name} = {v} outside (0, 1)")));
        }
    }
    if !(eta > 0.0 && eta_prime > 0.0) {
        return Err(Error::OutOfDomain(
            "transformed coordinates need positive learning rates".into(),
        ));
    }
    let (a, a_prime) = (eta / c, eta_prime / c_prime);
    let (b, b_prime) = (1.0 / c - 1.0, 1.0 / c_prime - 1.0);
    let s = snap_slack(b / a, a_prime)?;
    let s_prime = snap_slack(b_prime / a_prime, a)?;
    TransformedParams::new(a, a_prime, s, s_prime)
}

/// `lhs - rhs`, with differences inside rounding noise snapped to zero.
fn snap_slack(lhs: f64, rhs: f64) -> Result<f64> {
    let d = lhs - rhs;
    if d.abs() <= BOUNDARY_RTOL * lhs.abs().max(rhs.abs()) {
        Ok(0.0)
    } else if d < 0.0 {
        Err(Error::OutOfDomain(
            "rates violate the feasibility constraint (negative slack)".into(),
        ))
    } else {
        Ok(d)
    }
}

pub fn from_transformed(tp: &TransformedParams) -> RateParams {
    let c = 1.0 / (1.0 + tp.a * (tp.a_prime + tp.s));
    let c_prime = 1.0 / (1.0 + tp.a_prime * (tp.a + tp.s_prime));
    RateParams {
        eta: c * tp.a,
        eta_prime: c_prime * tp.a_prime,
        c,
        c_prime,
    }
}

/// `M = log m`, `N = log n` and the derived constants used by every bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub log_m: f64,
    pub log_n: f64,
}

impl BoundInputs {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgs(format!(
                "action counts must be positive, got {m}x{n}"
            )));
        }
        Ok(Self {
            log_m: (m as f64).ln(),
            log_n: (n as f64).ln(),
        })
    }

    /// Direct construction from `(M, N)`; useful for non-integer cardinalities.
    pub fn from_logs(log_m: f64, log_n: f64) -> Result<Self> {
        if !(log_m >= 0.0 && log_n >= 0.0 && log_m.is_finite() && log_n.is_finite()) {
            return Err(Error::InvalidArgs(format!(
                "log-cardinalities must be finite and nonnegative, got ({log_m}, {log_n})"
            )));
        }
        Ok(Self { log_m, log_n })
    }

    /// `M' = M + 1/2`
    pub fn m_prime(&self) -> f64 {
        self.log_m + 0.5
    }

    /// `N' = N + 1/2`
    pub fn n_prime(&self) -> f64 {
        self.log_n + 0.5
    }

    /// `D = sqrt(M'N') + sqrt(MN)`
    pub fn d(&self) -> f64 {
        (self.m_prime() * self.n_prime()).sqrt() + (self.log_m * self.log_n).sqrt()
    }

    /// Swap the roles of the two players.
    pub fn swapped(&self) -> Self {
        Self {
            log_m: self.log_n,
            log_n: self.log_m,
        }
    }

    /// `sqrt(M N') + sqrt(M' N)`, the quantity every aware bound scales with.
    pub fn aware_scale(&self) -> f64 {
        (self.log_m * self.n_prime()).sqrt() + (self.m_prime() * self.log_n).sqrt()
    }
}

/// `(ω, ω', Ω)` with `ω = M/η + η/(2c)`, `ω' = N/η' + η'/(2c')`, `Ω = ω + ω'`.
pub fn bound_omega(rates: &RateParams, b: &BoundInputs) -> Result<(f64, f64, f64)> {
    if rates.eta == 0.0 || rates.eta_prime == 0.0 {
        return Err(Error::ZeroRate);
    }
    let omega = b.log_m / rates.eta + rates.eta / (2.0 * rates.c);
    let omega_prime = b.log_n / rates.eta_prime + rates.eta_prime / (2.0 * rates.c_prime);
    Ok((omega, omega_prime, omega + omega_prime))
}

fn on_boundary(prod: f64, limit: f64) -> bool {
    (prod - limit).abs() <= BOUNDARY_RTOL * prod.abs().max(limit.abs())
}

/// Individual-regret bounds `(f, g)` of the x- and y-player in the
/// `(η, η', c, c')` form.
pub fn bound_fg(rates: &RateParams, b: &BoundInputs) -> Result<(Bound, Bound)> {
    let (omega, omega_prime, total) = bound_omega(rates, b)?;
    if !rates.is_feasible() {
        return Err(Error::Infeasible);
    }
    let RateParams {
        eta,
        eta_prime,
        c,
        c_prime,
    } = *rates;
    let prod = eta * eta_prime;

    let f = if on_boundary(prod, c * (1.0 - c_prime)) {
        Bound::Infinite
    } else {
        let lead = eta / (2.0 * c);
        let gap = (1.0 - c_prime) / (2.0 * eta_prime) - lead;
        Bound::Finite(omega + lead / gap * total)
    };
    let g = if on_boundary(prod, c_prime * (1.0 - c)) {
        Bound::Infinite
    } else {
        let lead = eta_prime / (2.0 * c_prime);
        let gap = (1.0 - c) / (2.0 * eta) - lead;
        Bound::Finite(omega_prime + lead / gap * total)
    };
    Ok((f, g))
}

/// `h(a, a') = M/a + (N + 1/2) a + N/a' + (M + 1/2) a'`.
pub fn h_term(a: f64, a_prime: f64, b: &BoundInputs) -> f64 {
    b.log_m / a + b.n_prime() * a + b.log_n / a_prime + b.m_prime() * a_prime
}

/// The same `(f, g)` in the transformed coordinates. `s' = 0` makes `f`
/// infinite and `s = 0` makes `g` infinite.
pub fn bound_fg_transformed(tp: &TransformedParams, b: &BoundInputs) -> (Bound, Bound) {
    let TransformedParams {
        a,
        a_prime,
        s,
        s_prime,
    } = *tp;
    let (m, n) = (b.log_m, b.log_n);
    let h = h_term(a, a_prime, b);
    let f = if s_prime == 0.0 {
        Bound::Infinite
    } else {
        Bound::Finite(m / a + a_prime * m + a / 2.0 + a * n + s * m + a / s_prime * (h + s * m))
    };
    let g = if s == 0.0 {
        Bound::Infinite
    } else {
        Bound::Finite(
            n / a_prime
                + a * n
                + a_prime / 2.0
                + a_prime * m
                + s_prime * n
                + a_prime / s * (h + s_prime * n),
        )
    };
    (f, g)
}

/// Best social-regret bound for fixed rates, minimizing `Ω` over the
/// analysis coefficients: `M/η + N/η' + (η + η')/(1 + sqrt(1 - 4ηη'))`.
/// Requires `ηη' <= 1/4`.
pub fn social_bound_for_rates(eta: f64, eta_prime: f64, b: &BoundInputs) -> Result<f64> {
    if eta <= 0.0 || eta_prime <= 0.0 {
        return Err(Error::ZeroRate);
    }
    let prod = eta * eta_prime;
    if prod > 0.25 {
        return Err(Error::Infeasible);
    }
    Ok(b.log_m / eta + b.log_n / eta_prime + (eta + eta_prime) / (1.0 + (1.0 - 4.0 * prod).sqrt()))
}

/// Which regret a preset's rates are tuned for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Social,
    XIndividual,
    MaxIndividual,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Social => "social",
            Target::XIndividual => "reg_x",
            Target::MaxIndividual => "max_ind",
        }
    }
}

/// The eight compared rate choices. `U-*` presets may not depend on the
/// action counts; `A-*` presets know both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    USocial,
    UXOnly,
    UMaxIndCl,
    UMaxIndNum,
    ASocial,
    AXOnly,
    AMaxIndCl,
    AMaxIndNum,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::USocial,
        Preset::UXOnly,
        Preset::UMaxIndCl,
        Preset::UMaxIndNum,
        Preset::ASocial,
        Preset::AXOnly,
        Preset::AMaxIndCl,
        Preset::AMaxIndNum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::USocial => "U-Social",
            Preset::UXOnly => "U-X-only",
            Preset::UMaxIndCl => "U-MaxInd-Cl",
            Preset::UMaxIndNum => "U-MaxInd-Num",
            Preset::ASocial => "A-Social",
            Preset::AXOnly => "A-X-only",
            Preset::AMaxIndCl => "A-MaxInd-Cl",
            Preset::AMaxIndNum => "A-MaxInd-Num",
        }
    }

    pub fn target(self) -> Target {
        match self {
            Preset::USocial | Preset::ASocial => Target::Social,
            Preset::UXOnly | Preset::AXOnly => Target::XIndividual,
            _ => Target::MaxIndividual,
        }
    }

    pub fn cardinality_aware(self) -> bool {
        matches!(
            self,
            Preset::ASocial | Preset::AXOnly | Preset::AMaxIndCl | Preset::AMaxIndNum
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

fn aware_inputs(preset: Preset, m: usize, n: usize) -> Result<BoundInputs> {
    if m < 2 || n < 2 {
        return Err(Error::DegenerateGame {
            preset: preset.name(),
            m,
            n,
        });
    }
    BoundInputs::new(m, n)
}

/// Rates minimizing `Ω`: `c = c' = sqrt(M'N')/D`, `η = sqrt(MM')/D`,
/// `η' = sqrt(NN')/D`. The point sits on both constraints; `η'` is nudged
/// down by a few ulps when rounding would otherwise leave it outside.
pub fn social_optimal_rates(b: &BoundInputs) -> RateParams {
    let d = b.d();
    let c = (b.m_prime() * b.n_prime()).sqrt() / d;
    snap_feasible(RateParams {
        eta: (b.log_m * b.m_prime()).sqrt() / d,
        eta_prime: (b.log_n * b.n_prime()).sqrt() / d,
        c,
        c_prime: c,
    })
}

/// Rates that sit on the constraint boundary up to rounding: step `η'`
/// down one ulp at a time until the exact feasibility test holds.
pub(crate) fn snap_feasible(mut rates: RateParams) -> RateParams {
    for _ in 0..64 {
        if rates.is_feasible() || rates.eta_prime == 0.0 {
            break;
        }
        rates.eta_prime = f64::from_bits(rates.eta_prime.to_bits() - 1);
    }
    rates
}

/// Learning rates (with matching analysis coefficients) for a preset.
pub fn preset_rates(preset: Preset, m: usize, n: usize) -> Result<RateParams> {
    let unaware_cl = 1.0 / (2.0 * 3f64.sqrt());
    match preset {
        Preset::USocial => RateParams::new(0.5, 0.5, 0.5, 0.5),
        // the y-player is uniform; c = 1 is the coefficient of the direct bound
        Preset::UXOnly => RateParams::new(1.0, 0.0, 1.0, 1.0),
        Preset::UMaxIndCl => RateParams::new(unaware_cl, unaware_cl, 0.5, 0.5),
        Preset::UMaxIndNum => {
            let (point, _) = optimizer::coeff_unaware(&OptimizeOptions::default())?;
            Ok(from_transformed(&point))
        }
        Preset::ASocial => Ok(social_optimal_rates(&aware_inputs(preset, m, n)?)),
        Preset::AXOnly => {
            let b = aware_inputs(preset, m, n)?;
            RateParams::new((b.log_m / b.n_prime()).sqrt(), 0.0, 1.0, 1.0)
        }
        Preset::AMaxIndCl => {
            let b = aware_inputs(preset, m, n)?;
            let d = b.d();
            RateParams::new(
                (b.log_m * b.m_prime()).sqrt() / (2.0 * d),
                (b.log_n * b.n_prime()).sqrt() / (2.0 * d),
                (b.m_prime() * b.n_prime()).sqrt() / d,
                (b.m_prime() * b.n_prime()).sqrt() / d,
            )
        }
        Preset::AMaxIndNum => {
            let b = aware_inputs(preset, m, n)?;
            Ok(optimizer::minimize(Objective::MaxFg, &b, &OptimizeOptions::default())?.rates)
        }
    }
}

/// Upper bound on the preset's target regret.
///
/// With [`Dynamics::Hedge`] this bounds the target external regret. With
/// [`Dynamics::Averaged`] it bounds each player's dynamic regret and needs
/// the horizon: a social bound `S` valid for the rates turns into
/// `S (log T + 1)`.
pub fn theoretical_upper(
    preset: Preset,
    m: usize,
    n: usize,
    dynamics: Dynamics,
    horizon: Option<usize>,
) -> Result<f64> {
    let b = BoundInputs::new(m, n)?;
    let log_mn = b.log_m + b.log_n;
    let sqrt3 = 3f64.sqrt();
    if dynamics == Dynamics::Averaged {
        let horizon = horizon.ok_or(Error::MissingHorizon)?;
        if horizon == 0 {
            return Err(Error::InvalidArgs("horizon must be positive".into()));
        }
        let social = match preset {
            Preset::USocial => 2.0 * log_mn + 1.0,
            Preset::ASocial => 2.0 * aware_inputs(preset, m, n)?.aware_scale(),
            Preset::UXOnly | Preset::AXOnly => {
                return Err(Error::InvalidArgs(format!(
                    "{preset} has no dynamic-regret bound (the y-player does not learn)"
                )))
            }
            _ => {
                let r = preset_rates(preset, m, n)?;
                social_bound_for_rates(r.eta, r.eta_prime, &b)?
            }
        };
        return Ok(social * ((horizon as f64).ln() + 1.0));
    }
    match preset {
        Preset::USocial => Ok(2.0 * log_mn + 1.0),
        Preset::UXOnly => Ok(b.log_m + 0.5),
        Preset::UMaxIndCl => Ok(3.0 * sqrt3 * log_mn + 1.0 / sqrt3),
        Preset::ASocial => Ok(2.0 * aware_inputs(preset, m, n)?.aware_scale()),
        Preset::AXOnly => {
            let b = aware_inputs(preset, m, n)?;
            Ok(1.5 * (b.log_m * b.n_prime()).sqrt())
        }
        Preset::AMaxIndCl => Ok(20.0 / 3.0 * aware_inputs(preset, m, n)?.aware_scale()),
        Preset::UMaxIndNum | Preset::AMaxIndNum => {
            // the individual bounds evaluated at the rates actually used
            let r = preset_rates(preset, m, n)?;
            let (f, g) = bound_fg(&r, &b)?;
            Ok(f.value().max(g.value()))
        }
    }
}
