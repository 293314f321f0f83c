//! Dormand–Prince 5(4) with its fourth-order continuous extension.
//!
//! States are fixed-size arrays. The integrator runs forward or backward
//! (`t_end < t0`) and records every accepted step so the solution can be
//! evaluated, differentiated and twice differentiated anywhere in range.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};

/// Step-size control parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// When set, each accepted step also bounds the defect of the dense
    /// output, `|y′_interp − f(t, y_interp)| ≤ defect_tol·(1 + |f|)`, at three
    /// interior points, and is retried with a smaller step otherwise.
    #[serde(default)]
    pub defect_tol: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-11,
            h_init: None,
            h_max: 0.05,
            h_min: 1e-14,
            max_steps: 5_000_000,
            defect_tol: Some(2e-9),
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn with_defect_tol(mut self, defect_tol: Option<f64>) -> Self {
        self.defect_tol = defect_tol;
        self
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its interpolation coefficients.
#[derive(Clone, Debug)]
struct Step<const N: usize> {
    t0: f64,
    h: f64,
    // y(θ) = c0 + θ(c1 + (1−θ)(c2 + θ(c3 + (1−θ) c4)))
    coef: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    fn lo(&self) -> f64 {
        self.t0.min(self.t0 + self.h)
    }

    fn hi(&self) -> f64 {
        self.t0.max(self.t0 + self.h)
    }

    /// Value and first two parameter derivatives at `t`.
    fn jet(&self, t: f64) -> [[f64; N]; 3] {
        let th = (t - self.t0) / self.h;
        let [a, b, c, d, e] = &self.coef;
        let mut out = [[0.0; N]; 3];
        for i in 0..N {
            let p = c[i] + th * (d[i] + (1.0 - th) * e[i]);
            let dp = d[i] + e[i] - 2.0 * th * e[i];
            let ddp = -2.0 * e[i];
            let q = b[i] + (1.0 - th) * p;
            let dq = -p + (1.0 - th) * dp;
            let ddq = -2.0 * dp + (1.0 - th) * ddp;
            out[0][i] = a[i] + th * q;
            out[1][i] = (q + th * dq) / self.h;
            out[2][i] = (2.0 * dq + th * ddq) / (self.h * self.h);
        }
        out
    }
}

/// Piecewise dense output over every accepted step.
#[derive(Clone, Debug)]
pub struct DenseSolution<const N: usize> {
    steps: Vec<Step<N>>,
    nodes: Vec<(f64, [f64; N])>,
}

impl<const N: usize> DenseSolution<N> {
    fn new(t0: f64, y0: [f64; N]) -> Self {
        DenseSolution {
            steps: Vec::new(),
            nodes: vec![(t0, y0)],
        }
    }

    /// Accepted step nodes `(t, y)` in increasing `t`.
    pub fn nodes(&self) -> &[(f64, [f64; N])] {
        &self.nodes
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.nodes[0].0, self.nodes[self.nodes.len() - 1].0)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn locate(&self, t: f64) -> Option<&Step<N>> {
        if self.steps.is_empty() {
            return None;
        }
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let i = self.steps.partition_point(|s| s.lo() <= t);
        Some(&self.steps[i.saturating_sub(1).min(self.steps.len() - 1)])
    }

    /// Interpolated state at `t`, or `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        self.locate(t).map(|s| s.jet(t)[0])
    }

    /// State, first and second derivative of the interpolant at `t`.
    pub fn jet(&self, t: f64) -> Option<[[f64; N]; 3]> {
        self.locate(t).map(|s| s.jet(t))
    }

    /// Interpolant restricted to `[lo, hi]` as reported by [`Self::t_range`];
    /// steps straddling the bounds are kept so the interpolant is unchanged.
    pub fn truncate_to(&mut self, lo: f64, hi: f64, y_lo: [f64; N], y_hi: [f64; N]) {
        self.steps.retain(|s| s.hi() > lo && s.lo() < hi);
        self.nodes.retain(|(t, _)| *t > lo && *t < hi);
        self.nodes.insert(0, (lo, y_lo));
        self.nodes.push((hi, y_hi));
    }

    /// Joins a backward solution (integrated from `t0` downwards) with a
    /// forward one from the same `t0`.
    pub fn join(backward: DenseSolution<N>, forward: DenseSolution<N>) -> DenseSolution<N> {
        let mut steps: Vec<Step<N>> = backward.steps.into_iter().collect();
        steps.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
        steps.extend(forward.steps);
        let mut nodes = backward.nodes;
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        nodes.pop();
        nodes.extend(forward.nodes);
        DenseSolution { steps, nodes }
    }
}

/// How an integration ended.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<S> {
    Completed,
    Stopped { reason: S, t: f64 },
    StepFailure { t: f64, h: f64 },
}

pub struct Integration<const N: usize, S> {
    pub solution: DenseSolution<N>,
    pub outcome: Outcome<S>,
}

/// Integrates `y′ = f(t, y)` from `t0` to `t_end`.
///
/// `stop` is called after each accepted step with the new node and may end
/// the run early. A right-hand side returning non-finite values causes the
/// step to be rejected and shortened, which ends in
/// [`Outcome::StepFailure`] if the step underflows.
pub fn integrate<const N: usize, S, F, G>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut stop: G,
) -> Result<Integration<N, S>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N]) -> Option<S>,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(SolitonError::InvalidParameter(
            "ODE tolerances must be positive".into(),
        ));
    }
    if y0.iter().any(|v| !v.is_finite()) || !t0.is_finite() || !t_end.is_finite() {
        return Err(SolitonError::InvalidParameter(
            "non-finite initial data".into(),
        ));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut sol = DenseSolution::new(t0, y0);
    let span = (t_end - t0).abs();
    if span == 0.0 {
        return Ok(Integration {
            solution: sol,
            outcome: Outcome::Completed,
        });
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(SolitonError::StepFailure { at: t0, step: 0.0 });
    }

    let mut h = opts
        .h_init
        .unwrap_or_else(|| initial_step(&mut f, t, &y, &k1, dir, opts))
        .abs()
        .min(opts.h_max)
        .min(span);

    let mut accepted = 0usize;
    let mut last_rejected = false;

    while (t_end - t) * dir > 0.0 {
        if accepted >= opts.max_steps {
            return Ok(Integration {
                solution: sol,
                outcome: Outcome::StepFailure { t, h },
            });
        }
        if h < opts.h_min {
            return Ok(Integration {
                solution: sol,
                outcome: Outcome::StepFailure { t, h },
            });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining * (1.0 - 1e-12);
        let hs = if last { remaining } else { h } * dir;

        let stage = |y: &[f64; N], terms: &[(&[f64; N], f64)]| {
            let mut out = *y;
            for i in 0..N {
                let mut acc = 0.0;
                for (k, a) in terms {
                    acc += a * k[i];
                }
                out[i] += hs * acc;
            }
            out
        };

        let k2 = f(t + C2 * hs, &stage(&y, &[(&k1, A21)]));
        let k3 = f(t + C3 * hs, &stage(&y, &[(&k1, A31), (&k2, A32)]));
        let k4 = f(
            t + C4 * hs,
            &stage(&y, &[(&k1, A41), (&k2, A42), (&k3, A43)]),
        );
        let k5 = f(
            t + C5 * hs,
            &stage(&y, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]),
        );
        let k6 = f(
            t + hs,
            &stage(
                &y,
                &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)],
            ),
        );
        let y_new = stage(
            &y,
            &[(&k1, A71), (&k3, A73), (&k4, A74), (&k5, A75), (&k6, A76)],
        );
        let k7 = f(t + hs, &y_new);

        let mut err_sq = 0.0;
        let mut finite = y_new.iter().all(|v| v.is_finite()) && k7.iter().all(|v| v.is_finite());
        for i in 0..N {
            let e =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc).powi(2);
        }
        let err = (err_sq / N as f64).sqrt();
        if !err.is_finite() {
            finite = false;
        }

        if finite && err <= 1.0 {
            let mut coef = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = hs * k1[i] - dy;
                coef[0][i] = y[i];
                coef[1][i] = dy;
                coef[2][i] = bspl;
                coef[3][i] = dy - hs * k7[i] - bspl;
                coef[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = Step { t0: t, h: hs, coef };
            let mut defect_ratio: f64 = 0.0;
            if let Some(tol) = opts.defect_tol {
                for theta in [0.2, 0.5, 0.8] {
                    let tm = t + theta * hs;
                    let [ym, dym, _] = step.jet(tm);
                    let fm = f(tm, &ym);
                    for i in 0..N {
                        let d = (dym[i] - fm[i]).abs() / (tol * (1.0 + fm[i].abs()));
                        defect_ratio =
                            defect_ratio.max(if d.is_finite() { d } else { f64::INFINITY });
                    }
                }
            }
            if defect_ratio > 1.0 {
                let fac = if defect_ratio.is_finite() {
                    (0.9 * defect_ratio.powf(-0.25)).clamp(0.2, 0.9)
                } else {
                    0.25
                };
                h *= fac;
                last_rejected = true;
                continue;
            }
            sol.steps.push(step);
            t = if last { t_end } else { t + hs };
            y = y_new;
            k1 = k7;
            sol.nodes.push((t, y));
            accepted += 1;

            if let Some(reason) = stop(t, &y) {
                if dir < 0.0 {
                    sol.steps.reverse();
                    sol.nodes.reverse();
                }
                return Ok(Integration {
                    solution: sol,
                    outcome: Outcome::Stopped { reason, t },
                });
            }

            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let fac = if defect_ratio > 0.0 {
                fac.min((0.9 * defect_ratio.powf(-0.25)).max(0.2))
            } else {
                fac
            };
            let fac = if last_rejected { fac.min(1.0) } else { fac };
            h = (h * fac).min(opts.h_max);
            last_rejected = false;
        } else {
            let fac = if finite {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h *= fac;
            last_rejected = true;
        }
    }

    if dir < 0.0 {
        sol.steps.reverse();
        sol.nodes.reverse();
    }
    Ok(Integration {
        solution: sol,
        outcome: Outcome::Completed,
    })
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &OdeOptions,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let norm = |v: &[f64; N]| {
        (v.iter()
            .enumerate()
            .map(|(i, x)| (x / sc(i)).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += dir * h0 * f0[i];
    }
    let f1 = f(t + dir * h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    if !h1.is_finite() {
        return h0;
    }
    (100.0 * h0).min(h1)
}

/// Finds `t` in `[a, b]` with `g(t) = 0` by bisection, given a sign change.
pub fn bisect<G: FnMut(f64) -> f64>(mut g: G, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if !(ga * gb < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return Some(m);
        }
        let gm = g(m);
        if gm == 0.0 {
            return Some(m);
        }
        if ga * gm < 0.0 {
            b = m;
        } else {
            a = m;
            ga = gm;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64) -> DenseSolution<N>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let out: Integration<N, ()> =
            integrate(f, t0, y0, t1, &OdeOptions::default(), |_, _| None).unwrap();
        assert_eq!(out.outcome, Outcome::Completed);
        out.solution
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let sol = run(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0);
        for i in 0..=1000 {
            let t = i as f64 * 0.01;
            let [y, dy, ddy] = sol.jet(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-8, "t={t}");
            assert!((dy[0] - t.cos()).abs() < 1e-7, "t={t}");
            assert!((ddy[0] + t.sin()).abs() < 1e-5, "t={t}");
        }
        assert!(sol.eval(10.5).is_none());
    }

    #[test]
    fn backward_integration_and_join() {
        let f = |_: f64, y: &[f64; 1]| [y[0]];
        let back = run(f, 0.0, [1.0], -2.0);
        let fwd = run(f, 0.0, [1.0], 2.0);
        assert_eq!(back.t_range(), (-2.0, 0.0));
        let both = DenseSolution::join(back, fwd);
        assert_eq!(both.t_range(), (-2.0, 2.0));
        for t in [-1.7, -0.3, 0.0, 0.9, 2.0] {
            assert!((both.eval(t).unwrap()[0] - f64::exp(t)).abs() < 1e-8);
        }
        assert!(both.nodes().windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn stop_predicate_ends_run() {
        let out = integrate(
            |_, _: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            10.0,
            &OdeOptions::default(),
            |_, y| (y[0] > 1.0).then_some("crossed"),
        )
        .unwrap();
        match out.outcome {
            Outcome::Stopped { reason, t } => {
                assert_eq!(reason, "crossed");
                assert!(t > 1.0 && t < 1.2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn blowup_reports_step_failure() {
        let out: Integration<1, ()> = integrate(
            |_, y: &[f64; 1]| [1.0 + y[0] * y[0]],
            0.0,
            [0.0],
            2.0,
            &OdeOptions::default(),
            |_, _| None,
        )
        .unwrap();
        match out.outcome {
            Outcome::StepFailure { t, .. } => {
                assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-3)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-10).is_none());
    }
}
