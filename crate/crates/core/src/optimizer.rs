//! Convex minimization of the regret-bound objectives.
//!
//! In log coordinates `z = (p, p', q, q') = (log a, log a', log s, log s')`
//! the bounds `f` and `g` are posynomials, hence convex. The solver is a
//! projected gradient descent with Barzilai-Borwein steps and Armijo
//! backtracking on a box; `max{f, g}` and the worst-case coefficient
//! problem are smoothed with log-sum-exp on an increasing `ρ` schedule.

use crate::error::{Error, Result};
use crate::rates::{self, Bound, BoundInputs, RateParams, TransformedParams};

/// One monomial `coef * exp(<exps, z>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exps: [f64; 4],
}

/// A sum of monomials in the four log coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Posynomial {
    pub terms: Vec<Monomial>,
}

impl Posynomial {
    fn from_terms(terms: &[(f64, [f64; 4])]) -> Self {
        Self {
            terms: terms
                .iter()
                .map(|&(coef, exps)| Monomial { coef, exps })
                .collect(),
        }
    }

    pub fn eval(&self, z: &[f64; 4]) -> f64 {
        self.terms.iter().map(|t| term_value(t, z)).sum()
    }

    pub fn eval_grad(&self, z: &[f64; 4]) -> (f64, [f64; 4]) {
        let mut value = 0.0;
        let mut grad = [0.0; 4];
        for t in &self.terms {
            let v = term_value(t, z);
            value += v;
            for (g, e) in grad.iter_mut().zip(t.exps) {
                *g += e * v;
            }
        }
        (value, grad)
    }

    /// Sum of the absolute term contributions to each partial derivative.
    /// Small partials that arise from cancellation are measured against it.
    pub fn grad_scale(&self, z: &[f64; 4]) -> [f64; 4] {
        let mut scale = [0.0; 4];
        for t in &self.terms {
            let v = term_value(t, z);
            for (s, e) in scale.iter_mut().zip(t.exps) {
                *s += (e * v).abs();
            }
        }
        scale
    }
}

fn term_value(t: &Monomial, z: &[f64; 4]) -> f64 {
    let arg: f64 = t.exps.iter().zip(z).map(|(e, x)| e * x).sum();
    t.coef * arg.exp()
}

/// `f` as a posynomial in `(p, p', q, q')`.
pub fn f_posynomial(b: &BoundInputs) -> Posynomial {
    let (m, n, mp, np) = (b.log_m, b.log_n, b.m_prime(), b.n_prime());
    Posynomial::from_terms(&[
        (m, [-1.0, 0.0, 0.0, 0.0]),
        (m, [0.0, 1.0, 0.0, 0.0]),
        (np, [1.0, 0.0, 0.0, 0.0]),
        (m, [0.0, 0.0, 1.0, 0.0]),
        (m, [0.0, 0.0, 0.0, -1.0]),
        (mp, [1.0, 1.0, 0.0, -1.0]),
        (n, [1.0, -1.0, 0.0, -1.0]),
        (np, [2.0, 0.0, 0.0, -1.0]),
        (m, [1.0, 0.0, 1.0, -1.0]),
    ])
}

/// `g`: `f` with the players swapped (`p <-> p'`, `q <-> q'`, `M <-> N`).
pub fn g_posynomial(b: &BoundInputs) -> Posynomial {
    let mut g = f_posynomial(&b.swapped());
    for t in &mut g.terms {
        t.exps.swap(0, 1);
        t.exps.swap(2, 3);
    }
    g
}

/// The worst-case coefficients `[κ_M^f, κ_N^f, κ_M^g, κ_N^g]` of `log m`
/// and `log n` in `f` and `g`.
pub fn coefficient_posynomials() -> [Posynomial; 4] {
    let kappa_m_f = Posynomial::from_terms(&[
        (1.0, [-1.0, 0.0, 0.0, 0.0]),
        (1.0, [0.0, 1.0, 0.0, 0.0]),
        (1.0, [0.0, 0.0, 1.0, 0.0]),
        (1.0, [0.0, 0.0, 0.0, -1.0]),
        (1.0, [1.0, 1.0, 0.0, -1.0]),
        (1.0, [1.0, 0.0, 1.0, -1.0]),
    ]);
    let kappa_n_f = Posynomial::from_terms(&[
        (1.0, [1.0, -1.0, 0.0, -1.0]),
        (1.0, [2.0, 0.0, 0.0, -1.0]),
        (1.0, [1.0, 0.0, 0.0, 0.0]),
    ]);
    let mirror = |p: &Posynomial| {
        let mut p = p.clone();
        for t in &mut p.terms {
            t.exps.swap(0, 1);
            t.exps.swap(2, 3);
        }
        p
    };
    let kappa_m_g = mirror(&kappa_n_f);
    let kappa_n_g = mirror(&kappa_m_f);
    [kappa_m_f, kappa_n_f, kappa_m_g, kappa_n_g]
}

/// Values and gradients of `f` and `g` at a log-coordinate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFg {
    pub f: f64,
    pub g: f64,
    pub grad_f: [f64; 4],
    pub grad_g: [f64; 4],
}

pub fn eval_log_fg(z: &[f64; 4], b: &BoundInputs) -> LogFg {
    let (f, grad_f) = f_posynomial(b).eval_grad(z);
    let (g, grad_g) = g_posynomial(b).eval_grad(z);
    LogFg {
        f,
        g,
        grad_f,
        grad_g,
    }
}

/// Worst relative error of the analytic partials of `f` and `g` against
/// central differences with step `h`. Each error is divided by the sum of
/// absolute term contributions to that partial.
pub fn gradient_check(z: &[f64; 4], b: &BoundInputs, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgs(format!("step h = {h} must be positive")));
    }
    let mut worst: f64 = 0.0;
    for poly in [f_posynomial(b), g_posynomial(b)] {
        let (_, grad) = poly.eval_grad(z);
        let scale = poly.grad_scale(z);
        for i in 0..4 {
            let (mut up, mut down) = (*z, *z);
            up[i] += h;
            down[i] -= h;
            let numeric = (poly.eval(&up) - poly.eval(&down)) / (2.0 * h);
            let err = (numeric - grad[i]).abs() / scale[i].max(f64::MIN_POSITIVE);
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// What [`minimize`] optimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// `γ f + (1 - γ) g`, `γ ∈ [0, 1]`.
    JGamma(f64),
    /// `max{f, g}`.
    MaxFg,
    /// The social bound `Ω`.
    SocialOmega,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Iteration cap for each descent run.
    pub max_iters: usize,
    /// Target norm of the projected gradient.
    pub grad_tol: f64,
    pub initial_step: f64,
    /// Backtracking factor in `(0, 1)`.
    pub shrink: f64,
    /// Armijo constant in `(0, 1)`.
    pub sufficient_decrease: f64,
    /// Final smoothing parameter; the schedule runs `10, 100, ...` up to it.
    pub rho: f64,
    /// Log coordinates are kept inside `[-log_clamp, log_clamp]`.
    pub log_clamp: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            grad_tol: 1e-9,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            rho: 1e4,
            log_clamp: 12.0,
        }
    }
}

impl OptimizeOptions {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgs(format!("optimizer option {what}")));
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease < 1.0) {
            return bad("sufficient_decrease must lie in (0, 1)");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be positive");
        }
        if !(self.log_clamp > 0.0 && self.log_clamp.is_finite()) {
            return bad("log_clamp must be positive");
        }
        Ok(())
    }

    fn rho_schedule(&self) -> Vec<f64> {
        let mut schedule = Vec::new();
        let mut rho = 10f64.min(self.rho);
        loop {
            schedule.push(rho);
            if rho >= self.rho {
                return schedule;
            }
            rho = (rho * 10.0).min(self.rho);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    /// Stopped at the log-coordinate clamp with the gradient still pushing
    /// outward: the true optimum lies at infinity.
    AtBoundary,
    MaxIterations,
    /// Line search could not make progress.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub point: TransformedParams,
    /// `(p, p', q, q')` when both slacks are positive.
    pub log_point: Option<[f64; 4]>,
    pub rates: RateParams,
    pub f_value: Bound,
    pub g_value: Bound,
    pub objective_value: f64,
    pub iterations: usize,
    pub status: Status,
    pub grad_norm: f64,
}

impl OptimizeResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

struct Descent {
    x: [f64; 4],
    value: f64,
    iterations: usize,
    grad_norm: f64,
    status: Status,
}

struct BoxDomain {
    lo: [f64; 4],
    hi: [f64; 4],
    /// Bounds that are artificial clamps rather than true constraints.
    clamped: [bool; 4],
}

impl BoxDomain {
    fn log_box(clamp: f64) -> Self {
        Self {
            lo: [-clamp; 4],
            hi: [clamp; 4],
            clamped: [true; 4],
        }
    }

    fn project(&self, x: [f64; 4]) -> [f64; 4] {
        let mut out = x;
        for i in 0..4 {
            out[i] = x[i].clamp(self.lo[i], self.hi[i]);
        }
        out
    }

    fn projected_gradient_norm(&self, x: &[f64; 4], grad: &[f64; 4]) -> f64 {
        let mut trial = *x;
        for i in 0..4 {
            trial[i] -= grad[i];
        }
        let p = self.project(trial);
        (0..4).map(|i| (p[i] - x[i]).powi(2)).sum::<f64>().sqrt()
    }

    fn pinned_at_clamp(&self, x: &[f64; 4], grad: &[f64; 4], tol: f64) -> bool {
        (0..4).any(|i| {
            self.clamped[i]
                && ((x[i] <= self.lo[i] && grad[i] > tol) || (x[i] >= self.hi[i] && grad[i] < -tol))
        })
    }
}

fn dot(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn descend<F>(obj: F, x0: [f64; 4], domain: &BoxDomain, opts: &OptimizeOptions) -> Descent
where
    F: Fn(&[f64; 4]) -> (f64, [f64; 4]),
{
    let mut x = domain.project(x0);
    let (mut fx, mut gx) = obj(&x);
    let mut step = opts.initial_step;

    for iter in 0..opts.max_iters {
        let pg = domain.projected_gradient_norm(&x, &gx);
        if pg <= opts.grad_tol {
            let status = if domain.pinned_at_clamp(&x, &gx, opts.grad_tol) {
                Status::AtBoundary
            } else {
                Status::Converged
            };
            return Descent {
                x,
                value: fx,
                iterations: iter,
                grad_norm: pg,
                status,
            };
        }

        // rounding noise in f; without it the Armijo test fails spuriously
        // once the predicted decrease drops below a few ulps of f
        let noise = 16.0 * f64::EPSILON * fx.abs();
        let mut t = step;
        let mut accepted = None;
        for _ in 0..80 {
            let mut trial = x;
            for i in 0..4 {
                trial[i] -= t * gx[i];
            }
            let xn = domain.project(trial);
            let d = [xn[0] - x[0], xn[1] - x[1], xn[2] - x[2], xn[3] - x[3]];
            if d.iter().all(|&v| v == 0.0) {
                break;
            }
            let (fnew, gnew) = obj(&xn);
            if fnew.is_finite() && fnew <= fx + opts.sufficient_decrease * dot(&gx, &d) + noise {
                accepted = Some((xn, fnew, gnew, d));
                break;
            }
            t *= opts.shrink;
        }

        let Some((xn, fnew, gnew, s)) = accepted else {
            return Descent {
                x,
                value: fx,
                iterations: iter,
                grad_norm: pg,
                status: Status::Stalled,
            };
        };
        let y = [
            gnew[0] - gx[0],
            gnew[1] - gx[1],
            gnew[2] - gx[2],
            gnew[3] - gx[3],
        ];
        let sy = dot(&s, &y);
        step = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(1e-12, 1e12)
        } else {
            opts.initial_step
        };
        x = xn;
        fx = fnew;
        gx = gnew;
    }

    let pg = domain.projected_gradient_norm(&x, &gx);
    let status = if pg <= opts.grad_tol {
        Status::Converged
    } else {
        Status::MaxIterations
    };
    Descent {
        x,
        value: fx,
        iterations: opts.max_iters,
        grad_norm: pg,
        status,
    }
}

/// Log-sum-exp smoothing `(1/ρ) log Σ exp(ρ v_i)` of several smooth pieces.
fn smooth_max(pieces: &[(f64, [f64; 4])], rho: f64) -> (f64, [f64; 4]) {
    let top = pieces.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = pieces.iter().map(|p| (rho * (p.0 - top)).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut grad = [0.0; 4];
    for (w, (_, g)) in weights.iter().zip(pieces) {
        for i in 0..4 {
            grad[i] += w / total * g[i];
        }
    }
    (top + total.ln() / rho, grad)
}

fn initial_point(b: &BoundInputs) -> [f64; 4] {
    [
        0.5 * (b.log_m / b.n_prime()).ln(),
        0.5 * (b.log_n / b.m_prime()).ln(),
        0.0,
        0.0,
    ]
}

fn weighted_objective<'a>(
    fp: &'a Posynomial,
    gp: &'a Posynomial,
    gamma: f64,
) -> impl Fn(&[f64; 4]) -> (f64, [f64; 4]) + 'a {
    move |z| {
        let (f, df) = fp.eval_grad(z);
        let (g, dg) = gp.eval_grad(z);
        let mut grad = [0.0; 4];
        for i in 0..4 {
            grad[i] = gamma * df[i] + (1.0 - gamma) * dg[i];
        }
        (gamma * f + (1.0 - gamma) * g, grad)
    }
}

/// Minimize a bound objective over the feasible region.
///
/// Non-convergence is reported through [`OptimizeResult::status`]; the
/// best point found is still returned.
pub fn minimize(
    objective: Objective,
    b: &BoundInputs,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    opts.validate()?;
    if !(b.log_m > 0.0 && b.log_n > 0.0) {
        return Err(Error::InvalidArgs(
            "bound optimization needs m, n >= 2 (M, N > 0)".into(),
        ));
    }
    match objective {
        Objective::JGamma(gamma) => {
            if !(0.0..=1.0).contains(&gamma) {
                return Err(Error::InvalidGamma(gamma));
            }
            let (fp, gp) = (f_posynomial(b), g_posynomial(b));
            let domain = BoxDomain::log_box(opts.log_clamp);
            let run = descend(
                weighted_objective(&fp, &gp, gamma),
                initial_point(b),
                &domain,
                opts,
            );
            log_result(b, run, |f, g| gamma * f + (1.0 - gamma) * g)
        }
        Objective::MaxFg => minimize_max_fg(b, opts),
        Objective::SocialOmega => minimize_social(b, opts),
    }
}

fn log_result(
    b: &BoundInputs,
    run: Descent,
    objective: impl Fn(f64, f64) -> f64,
) -> Result<OptimizeResult> {
    let fg = eval_log_fg(&run.x, b);
    let point = TransformedParams::from_log(run.x)?;
    Ok(OptimizeResult {
        point,
        log_point: Some(run.x),
        rates: rates::snap_feasible(rates::from_transformed(&point)),
        f_value: Bound::Finite(fg.f),
        g_value: Bound::Finite(fg.g),
        objective_value: objective(fg.f, fg.g),
        iterations: run.iterations,
        status: run.status,
        grad_norm: run.grad_norm,
    })
}

/// Smoothed descent on `max{f, g}`, then an exact polish: the minimax value
/// equals `max_γ min J_γ`, and at the maximizing `γ` the minimizer of
/// `J_γ` balances `f = g`. The polish bisects on the sign of `f - g`.
fn minimize_max_fg(b: &BoundInputs, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    let (fp, gp) = (f_posynomial(b), g_posynomial(b));
    let domain = BoxDomain::log_box(opts.log_clamp);
    let exact_max = |z: &[f64; 4]| fp.eval(z).max(gp.eval(z));

    let mut x = initial_point(b);
    let mut iterations = 0;
    let mut best: Option<Descent> = None;
    let consider = |run: Descent, best: &mut Option<Descent>| {
        let better = match best {
            None => true,
            Some(cur) => exact_max(&run.x) < exact_max(&cur.x),
        };
        if better {
            *best = Some(run);
        }
    };

    for rho in opts.rho_schedule() {
        let run = descend(
            |z| smooth_max(&[fp.eval_grad(z), gp.eval_grad(z)], rho),
            x,
            &domain,
            opts,
        );
        iterations += run.iterations;
        x = run.x;
        consider(
            Descent {
                value: exact_max(&run.x),
                ..run
            },
            &mut best,
        );
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut polished = None;
    for _ in 0..64 {
        let gamma = 0.5 * (lo + hi);
        let run = descend(weighted_objective(&fp, &gp, gamma), x, &domain, opts);
        iterations += run.iterations;
        x = run.x;
        let (f, g) = (fp.eval(&x), gp.eval(&x));
        if f > g {
            lo = gamma;
        } else {
            hi = gamma;
        }
        let done = hi - lo < 1e-14 || f == g;
        polished = Some(run.status);
        consider(
            Descent {
                value: f.max(g),
                ..run
            },
            &mut best,
        );
        if done {
            break;
        }
    }

    let mut run = best.expect("at least one descent run");
    if run.status == Status::Converged {
        // report the polish outcome; the balanced point is only optimal if
        // the last J_γ solve converged
        run.status = polished.unwrap_or(run.status);
    }
    let mut result = log_result(b, run, f64::max)?;
    result.iterations = iterations;
    Ok(result)
}

/// `Ω = h(a, a') + M s + N s'` over `(p, p', s, s')` with `s, s' >= 0`.
/// The optimum sits on the boundary `s = s' = 0`, where `f` and `g` are
/// infinite.
fn minimize_social(b: &BoundInputs, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    let (m, n, mp, np) = (b.log_m, b.log_n, b.m_prime(), b.n_prime());
    let obj = |z: &[f64; 4]| {
        let (a, ap) = (z[0].exp(), z[1].exp());
        let value = m / a + np * a + n / ap + mp * ap + m * z[2] + n * z[3];
        let grad = [-m / a + np * a, -n / ap + mp * ap, m, n];
        (value, grad)
    };
    let c = opts.log_clamp;
    let domain = BoxDomain {
        lo: [-c, -c, 0.0, 0.0],
        hi: [c, c, f64::INFINITY, f64::INFINITY],
        clamped: [true, true, false, false],
    };
    let x0 = initial_point(b);
    let run = descend(obj, [x0[0], x0[1], 1.0, 1.0], &domain, opts);

    let point = TransformedParams::new(run.x[0].exp(), run.x[1].exp(), run.x[2], run.x[3])?;
    let (f_value, g_value) = rates::bound_fg_transformed(&point, b);
    Ok(OptimizeResult {
        log_point: point.log_coords(),
        rates: rates::snap_feasible(rates::from_transformed(&point)),
        point,
        f_value,
        g_value,
        objective_value: run.value,
        iterations: run.iterations,
        status: run.status,
        grad_norm: run.grad_norm,
    })
}

/// Minimize the largest coefficient of `log m` and `log n` in `f` and `g`
/// over the transformed coordinates. Independent of `(m, n)`.
pub fn coeff_unaware(opts: &OptimizeOptions) -> Result<(TransformedParams, f64)> {
    opts.validate()?;
    let kappas = coefficient_posynomials();
    let domain = BoxDomain::log_box(opts.log_clamp);
    let mut x = [0.0; 4];
    let mut iterations = 0;
    let mut last = None;
    for rho in opts.rho_schedule() {
        let run = descend(
            |z| {
                let pieces: Vec<_> = kappas.iter().map(|k| k.eval_grad(z)).collect();
                smooth_max(&pieces, rho)
            },
            x,
            &domain,
            opts,
        );
        iterations += run.iterations;
        x = run.x;
        last = Some(run);
    }
    let run = last.expect("nonempty schedule");
    if run.status != Status::Converged {
        return Err(Error::NotConverged {
            iterations,
            grad_norm: run.grad_norm,
        });
    }
    let kappa = kappas
        .iter()
        .map(|k| k.eval(&x))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((TransformedParams::from_log(x)?, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoundInputs {
        BoundInputs::from_logs(1.0, 1.0).unwrap()
    }

    #[test]
    fn log_form_examples() {
        let b = unit();
        let fg = eval_log_fg(&[0.0; 4], &b);
        assert!((fg.f - 10.5).abs() < 1e-12);
        assert!((fg.g - 10.5).abs() < 1e-12);

        let tp = TransformedParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (f, g) = rates::bound_fg_transformed(&tp, &b);
        assert!((f.value() - 10.5).abs() < 1e-12 && (g.value() - 10.5).abs() < 1e-12);

        let b = BoundInputs::new(20, 20).unwrap();
        let fg = eval_log_fg(&[0.3, 0.3, -0.7, -0.7], &b);
        assert_eq!(fg.f, fg.g);
    }

    #[test]
    fn log_form_matches_transformed_form() {
        let b = BoundInputs::new(3, 50).unwrap();
        for z in [
            [0.1, -0.4, 0.5, -1.0],
            [-2.0, 1.5, 0.0, 0.7],
            [1.0, 1.0, -3.0, 2.0],
        ] {
            let fg = eval_log_fg(&z, &b);
            let (f, g) = rates::bound_fg_transformed(&TransformedParams::from_log(z).unwrap(), &b);
            assert!((fg.f - f.value()).abs() <= 1e-12 * fg.f);
            assert!((fg.g - g.value()).abs() <= 1e-12 * fg.g);
        }
    }

    #[test]
    fn gradient_check_at_origin() {
        let err = gradient_check(&[0.0; 4], &unit(), 1e-5).unwrap();
        assert!(err <= 1e-6, "{err}");
        assert!(gradient_check(&[0.0; 4], &unit(), 0.0).is_err());
    }

    #[test]
    fn coefficients_at_closed_form() {
        let r3 = 3f64.sqrt();
        let z = [
            (1.0 / r3).ln(),
            (1.0 / r3).ln(),
            (2.0 / r3).ln(),
            (2.0 / r3).ln(),
        ];
        let k = coefficient_posynomials().map(|p| p.eval(&z));
        assert!((k[0] - 3.0 * r3).abs() < 1e-12 && (k[3] - 3.0 * r3).abs() < 1e-12);
        assert!(k[1] < k[0] && k[2] < k[0]);
        // f = κ_M M + κ_N N + (a/2)(1 + (a + a')/s')
        let b = BoundInputs::from_logs(0.8, 2.5).unwrap();
        let f = f_posynomial(&b).eval(&z);
        let (a, s) = (1.0 / r3, 2.0 / r3);
        let constant = a / 2.0 * (1.0 + 2.0 * a / s);
        assert!((f - (k[0] * 0.8 + k[1] * 2.5 + constant)).abs() < 1e-12);
    }

    #[test]
    fn social_matches_closed_form() {
        let b = unit();
        let res = minimize(Objective::SocialOmega, &b, &OptimizeOptions::default()).unwrap();
        assert!(res.converged());
        assert!((res.objective_value - 4.0 * 1.5f64.sqrt()).abs() < 1e-6);
        assert!((res.rates.eta - 0.489_898).abs() < 1e-4);
        assert!((res.rates.eta_prime - 0.489_898).abs() < 1e-4);
        assert!(res.log_point.is_none());
        assert!(res.rates.is_feasible());
    }

    #[test]
    fn coeff_unaware_closed_form() {
        let (tp, kappa) = coeff_unaware(&OptimizeOptions::default()).unwrap();
        let r3 = 3f64.sqrt();
        assert!((kappa - 3.0 * r3).abs() < 1e-6, "{kappa}");
        for (got, want) in [
            (tp.a, 1.0 / r3),
            (tp.a_prime, 1.0 / r3),
            (tp.s, 2.0 / r3),
            (tp.s_prime, 2.0 / r3),
        ] {
            assert!((got - want).abs() < 1e-5, "{tp:?}");
        }
    }

    #[test]
    fn weighted_and_max() {
        let b = unit();
        let opts = OptimizeOptions::default();
        let j = minimize(Objective::JGamma(0.5), &b, &opts).unwrap();
        assert!(j.converged(), "{:?}", j.status);
        assert!(j.objective_value <= 10.0 / 3.0 * 2.0 * 1.5f64.sqrt());
        let mx = minimize(Objective::MaxFg, &b, &opts).unwrap();
        assert!(mx.converged(), "{:?}", mx.status);
        assert!(mx.objective_value <= 2.0 * j.objective_value);
        // symmetric inputs: both minimizers coincide
        assert!((mx.objective_value - j.objective_value).abs() < 1e-8);
    }

    #[test]
    fn extreme_gamma_hits_clamp() {
        let b = BoundInputs::new(10, 10).unwrap();
        let res = minimize(Objective::JGamma(1.0), &b, &OptimizeOptions::default()).unwrap();
        assert_eq!(res.status, Status::AtBoundary);
        assert!(matches!(
            minimize(Objective::JGamma(1.5), &b, &OptimizeOptions::default()),
            Err(Error::InvalidGamma(_))
        ));
    }

    #[test]
    fn result_values_match_rate_form() {
        let b = BoundInputs::new(100, 100).unwrap();
        let res = minimize(Objective::JGamma(0.3), &b, &OptimizeOptions::default()).unwrap();
        let (f, g) = rates::bound_fg(&res.rates, &b).unwrap();
        assert!((f.value() - res.f_value.value()).abs() < 1e-9 * f.value().max(1.0));
        assert!((g.value() - res.g_value.value()).abs() < 1e-9 * g.value().max(1.0));
    }

    #[test]
    fn rho_schedule_shape() {
        assert_eq!(
            OptimizeOptions::default().rho_schedule(),
            vec![10.0, 100.0, 1000.0, 1e4]
        );
        let opts = OptimizeOptions {
            rho: 50.0,
            ..Default::default()
        };
        assert_eq!(opts.rho_schedule(), vec![10.0, 50.0]);
    }
}
