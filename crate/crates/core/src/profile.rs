//! Arc-length profile curves of rotationally invariant solitons.
//!
//! A profile `s ↦ (r(s), t(s))` with angle φ against the radial direction
//! generates a translating soliton of speed `c` in `ℝ × P` exactly when
//!
//! ```text
//! ṙ = cos φ,   ṫ = sin φ,   φ̇ = c cos φ − (n−1)(ξ′/ξ)(r) sin φ.
//! ```

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::graph::{Chart, GraphEval, RadialGraph};
use crate::ode::{bisect, integrate, DenseSolution, OdeOptions, Outcome};
use crate::warp::{WarpKind, WarpModel};

/// Arc length at which bowls leave the axis series.
pub const AXIS_LAUNCH: f64 = 1e-4;

/// Radius below which a rotational profile counts as having reached the axis.
pub const AXIS_STOP: f64 = 1e-6;

/// Soliton family together with its family parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Bowl,
    Wing {
        epsilon: f64,
    },
    /// Ideal soliton; `epsilon` is the Busemann coordinate of the default
    /// launch point.
    Ideal {
        epsilon: f64,
    },
    Grim,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Bowl => "bowl",
            Family::Wing { .. } => "wing",
            Family::Ideal { .. } => "ideal",
            Family::Grim => "grim",
        }
    }

    fn required_kind(&self) -> WarpKind {
        match self {
            Family::Bowl | Family::Wing { .. } => WarpKind::Rotational,
            Family::Ideal { .. } => WarpKind::Busemann,
            Family::Grim => WarpKind::Equidistant,
        }
    }
}

/// Speed, dimension, family and base metric of a soliton.
#[derive(Clone, Debug)]
pub struct SolitonSpec {
    pub c: f64,
    pub n: u32,
    pub family: Family,
    pub warp: WarpModel,
}

impl SolitonSpec {
    /// Validates and builds a spec.
    ///
    /// `c = 0` is accepted and gives minimal hypersurfaces. `n = 1` is
    /// accepted for closed-form comparisons.
    pub fn new(c: f64, n: u32, family: Family, warp: WarpModel) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(SolitonError::InvalidParameter(format!(
                "speed c must be finite and non-negative, got {c}"
            )));
        }
        if n == 0 {
            return Err(SolitonError::InvalidParameter(
                "base dimension n must be positive".into(),
            ));
        }
        match family {
            Family::Wing { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                return Err(SolitonError::InvalidParameter(format!(
                    "wing radius ε must be positive, got {epsilon}"
                )))
            }
            Family::Ideal { epsilon } if !(epsilon >= 0.0 && epsilon.is_finite()) => {
                return Err(SolitonError::InvalidParameter(format!(
                    "ideal parameter must be non-negative, got {epsilon}"
                )))
            }
            _ => {}
        }
        if warp.kind() != family.required_kind() {
            return Err(SolitonError::Incompatible(format!(
                "{} solitons need a {} warp, got {} (`{}`)",
                family.name(),
                family.required_kind(),
                warp.kind(),
                warp.label()
            )));
        }
        Ok(SolitonSpec { c, n, family, warp })
    }

    pub fn bowl(c: f64, n: u32, warp: WarpModel) -> Result<Self> {
        Self::new(c, n, Family::Bowl, warp)
    }

    pub fn wing(c: f64, n: u32, epsilon: f64, warp: WarpModel) -> Result<Self> {
        Self::new(c, n, Family::Wing { epsilon }, warp)
    }

    pub fn ideal(c: f64, n: u32, epsilon: f64, warp: WarpModel) -> Result<Self> {
        Self::new(c, n, Family::Ideal { epsilon }, warp)
    }

    pub fn grim(c: f64, n: u32, warp: WarpModel) -> Result<Self> {
        Self::new(c, n, Family::Grim, warp)
    }

    /// `(n−1) ξ′/ξ` at `r`, or NaN where undefined.
    pub(crate) fn drift(&self, r: f64) -> f64 {
        if self.warp.kind() == WarpKind::Rotational && r < 0.0 {
            return f64::NAN;
        }
        self.warp.drift_coefficient(r, self.n)
    }

    pub fn describe(&self) -> String {
        let fam = match self.family {
            Family::Wing { epsilon } => format!("wing(ε={epsilon})"),
            Family::Ideal { epsilon } => format!("ideal(ε={epsilon})"),
            f => f.name().to_string(),
        };
        format!("{fam} c={} n={} warp={}", self.c, self.n, self.warp.label())
    }
}

/// A point of a profile curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub s: f64,
    pub r: f64,
    pub t: f64,
    pub phi: f64,
}

impl ProfileState {
    pub fn new(s: f64, r: f64, t: f64, phi: f64) -> Self {
        ProfileState { s, r, t, phi }
    }

    fn y(&self) -> [f64; 3] {
        [self.r, self.t, self.phi]
    }

    fn from_y(s: f64, y: [f64; 3]) -> Self {
        ProfileState::new(s, y[0], y[1], y[2])
    }
}

/// `(dr/ds, dt/ds, dφ/ds)` at `state`.
pub fn profile_rhs(state: &ProfileState, spec: &SolitonSpec) -> Result<[f64; 3]> {
    if !spec.warp.contains(state.r) {
        return Err(SolitonError::OutsideDomain {
            r: state.r,
            label: spec.warp.label().to_string(),
        });
    }
    if spec.warp.kind() == WarpKind::Rotational && state.r == 0.0 && spec.n > 1 {
        return Err(SolitonError::Singular {
            quantity: "ξ′/ξ",
            r: 0.0,
        });
    }
    Ok(rhs(spec, &state.y()))
}

fn rhs(spec: &SolitonSpec, y: &[f64; 3]) -> [f64; 3] {
    let (sin, cos) = y[2].sin_cos();
    let drift = if spec.n > 1 { spec.drift(y[0]) } else { 0.0 };
    let bend = if sin == 0.0 { 0.0 } else { drift * sin };
    [cos, sin, spec.c * cos - bend]
}

/// Limits that end an integration, whichever is hit first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopPolicy {
    pub s_max: f64,
    /// Bound on `r` (on `|r|` for coordinates covering ℝ).
    pub r_max: f64,
    pub t_max: f64,
}

impl Default for StopPolicy {
    fn default() -> Self {
        StopPolicy {
            s_max: 1e3,
            r_max: 1e2,
            t_max: 1e3,
        }
    }
}

impl StopPolicy {
    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_s_max(mut self, s_max: f64) -> Self {
        self.s_max = s_max;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0 && self.r_max > 0.0 && self.t_max > 0.0) {
            return Err(SolitonError::InvalidParameter(
                "stop limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    MaxArcLength,
    MaxRadius,
    MaxHeight,
    AxisReached,
}

/// Why and where an integration ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    pub reason: TerminationReason,
    pub s: f64,
    /// Set when `|φ|` reached π somewhere; the families here never wind.
    pub phi_wound: bool,
}

/// Which launch direction of a wing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// φ(0) = +π/2.
    Upper,
    /// φ(0) = −π/2; this branch attains the minimum height.
    Lower,
}

impl Branch {
    pub fn launch_angle(&self) -> f64 {
        match self {
            Branch::Upper => FRAC_PI_2,
            Branch::Lower => -FRAC_PI_2,
        }
    }
}

/// An integrated profile with dense interpolation.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub spec: SolitonSpec,
    pub samples: Vec<ProfileState>,
    pub termination: Termination,
    pub options: OdeOptions,
    pub branch: Option<Branch>,
    /// Minimum-height point of a lower wing branch.
    pub turning_point: Option<ProfileState>,
    /// Number of sign changes of φ between consecutive samples.
    pub phi_zero_crossings: usize,
    dense: DenseSolution<3>,
    /// Bowls are continued to `s = 0` by the axis series below this.
    series_below: Option<f64>,
    t0: f64,
}

impl ProfileCurve {
    pub fn s_range(&self) -> (f64, f64) {
        (self.samples[0].s, self.samples[self.samples.len() - 1].s)
    }

    /// State at arc length `s`, or `None` outside the curve.
    pub fn eval(&self, s: f64) -> Option<ProfileState> {
        self.jet(s).map(|j| ProfileState::from_y(s, j[0]))
    }

    /// `(r, t, φ)` with first and second arc-length derivatives at `s`.
    pub fn jet(&self, s: f64) -> Option<[[f64; 3]; 3]> {
        if let Some(s0) = self.series_below {
            if (0.0..s0).contains(&s) {
                let k = self.spec.c / f64::from(self.spec.n);
                return Some([
                    [s, self.t0 + 0.5 * k * s * s, k * s],
                    [1.0, k * s, k],
                    [0.0, k, 0.0],
                ]);
            }
        }
        self.dense.jet(s)
    }

    /// Arc-length values where the interpolant is backed by integrator
    /// steps, as opposed to the axis series.
    pub fn integrated_range(&self) -> (f64, f64) {
        self.dense.t_range()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Checks the structural invariants of the family; returns the list of
    /// failures.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.samples.windows(2) {
            let ds = w[1].s - w[0].s;
            if !(ds > 0.0) {
                out.push(format!("arc length not increasing at s = {}", w[0].s));
            }
            let slack = 1e-9 * ds.max(1.0);
            if (w[1].r - w[0].r).abs() > ds + slack || (w[1].t - w[0].t).abs() > ds + slack {
                out.push(format!("chord longer than arc at s = {}", w[0].s));
            }
        }
        if self.termination.phi_wound {
            out.push("|φ| reached π".into());
        }
        match self.spec.family {
            Family::Bowl => {
                for w in self.samples.windows(2) {
                    if w[1].r < w[0].r {
                        out.push(format!("bowl radius decreases at s = {}", w[0].s));
                    }
                }
                for p in &self.samples[1..] {
                    if !(p.phi.abs() < FRAC_PI_2) {
                        out.push(format!("bowl angle leaves (−π/2, π/2) at s = {}", p.s));
                    }
                }
            }
            Family::Wing { epsilon } => {
                for p in &self.samples {
                    if p.r < epsilon * (1.0 - 1e-12) {
                        out.push(format!("wing enters the ε-ball at s = {}", p.s));
                    }
                }
                if self.branch == Some(Branch::Lower) && self.phi_zero_crossings != 1 {
                    out.push(format!(
                        "lower wing branch has {} angle zeros",
                        self.phi_zero_crossings
                    ));
                }
            }
            _ => {}
        }
        out
    }
}

fn run(
    spec: &SolitonSpec,
    s0: f64,
    y0: [f64; 3],
    dir: f64,
    policy: &StopPolicy,
    opts: &OdeOptions,
) -> Result<(DenseSolution<3>, Termination)> {
    policy.validate()?;
    let rotational = spec.warp.kind() == WarpKind::Rotational;
    let mut wound = false;
    let radius = move |r: f64| if rotational { r } else { r.abs() };
    let check = |y: &[f64; 3]| -> Option<TerminationReason> {
        if radius(y[0]) > policy.r_max {
            Some(TerminationReason::MaxRadius)
        } else if y[1].abs() > policy.t_max {
            Some(TerminationReason::MaxHeight)
        } else if rotational && y[0] < AXIS_STOP {
            Some(TerminationReason::AxisReached)
        } else {
            None
        }
    };
    let s_end = s0 + dir * (policy.s_max - s0.abs()).max(0.0);
    let out = integrate(
        |_, y: &[f64; 3]| rhs(spec, y),
        s0,
        y0,
        s_end,
        opts,
        |_, y| {
            if y[2].abs() >= std::f64::consts::PI {
                wound = true;
            }
            check(y)
        },
    )?;
    let mut dense = out.solution;
    let termination = match out.outcome {
        Outcome::Completed => Termination {
            reason: TerminationReason::MaxArcLength,
            s: s_end,
            phi_wound: wound,
        },
        Outcome::StepFailure { t, h } => return Err(SolitonError::StepFailure { at: t, step: h }),
        Outcome::Stopped { reason, t: s_stop } => {
            let nodes = dense.nodes();
            let m = nodes.len();
            let (a, b) = if dir > 0.0 {
                (nodes[m - 2].0, nodes[m - 1].0)
            } else {
                (nodes[1].0, nodes[0].0)
            };
            let excess = |s: f64| -> f64 {
                let y = dense.eval(s).expect("inside last step");
                match reason {
                    TerminationReason::MaxRadius => radius(y[0]) - policy.r_max,
                    TerminationReason::MaxHeight => y[1].abs() - policy.t_max,
                    TerminationReason::AxisReached => AXIS_STOP - y[0],
                    TerminationReason::MaxArcLength => 0.0,
                }
            };
            let s_cross = bisect(excess, a, b, 1e-13).unwrap_or(s_stop);
            let y_cross = dense.eval(s_cross).expect("inside last step");
            let (lo, hi) = dense.t_range();
            if dir > 0.0 {
                let y_lo = dense.eval(lo).expect("start");
                dense.truncate_to(lo, s_cross, y_lo, y_cross);
            } else {
                let y_hi = dense.eval(hi).expect("start");
                dense.truncate_to(s_cross, hi, y_cross, y_hi);
            }
            Termination {
                reason,
                s: s_cross,
                phi_wound: wound,
            }
        }
    };
    Ok((dense, termination))
}

fn count_sign_changes(samples: &[ProfileState]) -> usize {
    samples
        .windows(2)
        .filter(|w| (w[0].phi < 0.0) != (w[1].phi < 0.0))
        .count()
}

/// Integrates a bowl from the axis point `(0, t0)` with horizontal tangent.
pub fn solve_bowl(
    spec: &SolitonSpec,
    t0: f64,
    policy: &StopPolicy,
    opts: &OdeOptions,
) -> Result<ProfileCurve> {
    if spec.family != Family::Bowl {
        return Err(SolitonError::Incompatible(format!(
            "solve_bowl called with a {} spec",
            spec.family.name()
        )));
    }
    let s0 = AXIS_LAUNCH;
    let k = spec.c / f64::from(spec.n);
    let y0 = [s0, t0 + 0.5 * k * s0 * s0, k * s0];
    let (dense, termination) = run(spec, s0, y0, 1.0, policy, opts)?;
    let mut samples = vec![ProfileState::new(0.0, 0.0, t0, 0.0)];
    samples.extend(
        dense
            .nodes()
            .iter()
            .map(|(s, y)| ProfileState::from_y(*s, *y)),
    );
    let phi_zero_crossings = count_sign_changes(&samples[1..]);
    Ok(ProfileCurve {
        spec: spec.clone(),
        samples,
        termination,
        options: *opts,
        branch: None,
        turning_point: None,
        phi_zero_crossings,
        dense,
        series_below: Some(s0),
        t0,
    })
}

/// Integrates one branch of a wing launched vertically from `(ε, 0)`.
pub fn solve_wing(
    spec: &SolitonSpec,
    branch: Branch,
    policy: &StopPolicy,
    opts: &OdeOptions,
) -> Result<ProfileCurve> {
    let Family::Wing { epsilon } = spec.family else {
        return Err(SolitonError::Incompatible(format!(
            "solve_wing called with a {} spec",
            spec.family.name()
        )));
    };
    let y0 = [epsilon, 0.0, branch.launch_angle()];
    let (dense, termination) = run(spec, 0.0, y0, 1.0, policy, opts)?;
    let samples: Vec<ProfileState> = dense
        .nodes()
        .iter()
        .map(|(s, y)| ProfileState::from_y(*s, *y))
        .collect();
    let phi_zero_crossings = count_sign_changes(&samples[1..]);
    let turning_point = match branch {
        Branch::Upper => None,
        Branch::Lower => samples
            .windows(2)
            .find(|w| w[0].phi < 0.0 && w[1].phi >= 0.0)
            .and_then(|w| {
                bisect(
                    |s| dense.eval(s).map_or(f64::NAN, |y| y[2]),
                    w[0].s,
                    w[1].s,
                    1e-10,
                )
            })
            .and_then(|s| dense.eval(s).map(|y| ProfileState::from_y(s, y))),
    };
    Ok(ProfileCurve {
        spec: spec.clone(),
        samples,
        termination,
        options: *opts,
        branch: Some(branch),
        turning_point,
        phi_zero_crossings,
        dense,
        series_below: None,
        t0: 0.0,
    })
}

/// Equilibrium angle `arctan(c / ((n−1) κ))` of an ideal soliton in a
/// Busemann chart with `ξ′/ξ ≡ κ`.
pub fn ideal_equilibrium_angle(c: f64, n: u32, kappa: f64) -> f64 {
    (c / (f64::from(n.saturating_sub(1)) * kappa)).atan()
}

/// Default launch state of an ideal soliton: the lowest point, at the
/// Busemann coordinate given by the family parameter.
pub fn ideal_default_initial(spec: &SolitonSpec) -> ProfileState {
    let eps = match spec.family {
        Family::Ideal { epsilon } => epsilon,
        _ => 0.0,
    };
    ProfileState::new(0.0, eps, 0.0, 0.0)
}

/// Integrates the profile system in a Busemann chart in both directions
/// from `initial`; `r` ranges over ℝ.
pub fn solve_ideal_parametric(
    spec: &SolitonSpec,
    initial: ProfileState,
    policy: &StopPolicy,
    opts: &OdeOptions,
) -> Result<ProfileCurve> {
    if !matches!(spec.family, Family::Ideal { .. }) {
        return Err(SolitonError::Incompatible(format!(
            "solve_ideal_parametric called with a {} spec",
            spec.family.name()
        )));
    }
    let y0 = initial.y();
    let (back, term_back) = run(spec, initial.s, y0, -1.0, policy, opts)?;
    let (fwd, term_fwd) = run(spec, initial.s, y0, 1.0, policy, opts)?;
    let dense = DenseSolution::join(back, fwd);
    let samples: Vec<ProfileState> = dense
        .nodes()
        .iter()
        .map(|(s, y)| ProfileState::from_y(*s, *y))
        .collect();
    let phi_zero_crossings = count_sign_changes(&samples);
    let mut termination = term_fwd;
    termination.phi_wound |= term_back.phi_wound;
    Ok(ProfileCurve {
        spec: spec.clone(),
        samples,
        termination,
        options: *opts,
        branch: None,
        turning_point: None,
        phi_zero_crossings,
        dense,
        series_below: None,
        t0: initial.t,
    })
}

/// Restricts a profile to its longest arc with `cos φ > dr_min` and
/// returns it as a radial graph `u(r(s)) = t(s)`, `u′ = tan φ`.
pub fn profile_to_graph(curve: &ProfileCurve, dr_min: f64) -> Result<RadialGraph> {
    let ok = |p: &ProfileState| p.phi.cos() > dr_min;
    let samples = &curve.samples;
    let mut best = (0usize, 0usize);
    let mut start: Option<usize> = None;
    for i in 0..=samples.len() {
        let extends = i < samples.len()
            && ok(&samples[i])
            && start.is_none_or(|_| samples[i].r > samples[i - 1].r);
        if extends {
            start.get_or_insert(i);
            continue;
        }
        if let Some(st) = start.take() {
            if i - st > best.1 - best.0 {
                best = (st, i);
            }
        }
        if i < samples.len() && ok(&samples[i]) {
            start = Some(i);
        }
    }
    if best.1 - best.0 < 2 {
        return Err(SolitonError::InvalidParameter(
            "profile has no sub-arc that is a graph over r".into(),
        ));
    }
    let arc = &curve.samples[best.0..best.1];
    let r: Vec<f64> = arc.iter().map(|p| p.r).collect();
    let u: Vec<f64> = arc.iter().map(|p| p.t).collect();
    let du: Vec<f64> = arc.iter().map(|p| p.phi.tan()).collect();
    let s_lo = arc[0].s;
    let s_hi = arc[arc.len() - 1].s;
    let curve_copy = curve.clone();
    let eval: GraphEval = std::sync::Arc::new(move |x: f64| {
        let s = bisect(
            |s| curve_copy.eval(s).map_or(f64::NAN, |p| p.r - x),
            s_lo,
            s_hi,
            1e-14,
        )?;
        let [y, dy, _] = curve_copy.jet(s)?;
        let (sin, cos) = y[2].sin_cos();
        let du = sin / cos;
        // d(tan φ)/dr = φ̇ / cos³ φ
        let ddu = dy[2] / (cos * cos * cos);
        Some([y[1], du, ddu])
    });
    RadialGraph::from_parts(
        curve.spec.clone(),
        Chart::from_kind(curve.spec.warp.kind()),
        r,
        u,
        du,
        eval,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn hyp() -> WarpModel {
        WarpModel::hyperbolic(-1.0).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let e = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let v = profile_rhs(&ProfileState::new(0.0, 1.0, 0.0, 0.0), &e).unwrap();
        assert_eq!(v, [1.0, 0.0, 1.0]);
        let v = profile_rhs(&ProfileState::new(0.0, 1.0, 0.0, FRAC_PI_2), &e).unwrap();
        assert!(v[0].abs() < 1e-16 && (v[1] - 1.0).abs() < 1e-16 && (v[2] + 1.0).abs() < 1e-15);
        let h = SolitonSpec::bowl(2.0, 3, hyp()).unwrap();
        let v = profile_rhs(&ProfileState::new(0.0, 1.0, 0.0, FRAC_PI_4), &h).unwrap();
        let coth1 = 1.0 / 1f64.tanh();
        let expected = SQRT_2 - 2.0 * coth1 * SQRT_2 / 2.0;
        assert!((v[2] - expected).abs() < 1e-14);
        assert!((v[2] + 0.442_699).abs() < 1e-6);
        assert!(profile_rhs(&ProfileState::new(0.0, -1.0, 0.0, 0.0), &h).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SolitonSpec::wing(1.0, 2, 0.0, hyp()).is_err());
        assert!(SolitonSpec::bowl(-1.0, 2, hyp()).is_err());
        let bus = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
        assert!(SolitonSpec::bowl(1.0, 2, bus.clone()).is_err());
        assert!(SolitonSpec::ideal(1.0, 2, 0.0, bus).is_ok());
    }

    #[test]
    fn bowl_axis_curvature() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let curve = solve_bowl(
            &spec,
            0.0,
            &StopPolicy::default().with_r_max(2.0),
            &OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.termination.reason, TerminationReason::MaxRadius);
        let last = curve.samples.last().unwrap();
        assert!((last.r - 2.0).abs() < 1e-10);
        // φ ≈ (c/n)s near the axis
        let p = curve.eval(1e-2).unwrap();
        assert!((p.phi - 0.5e-2).abs() < 1e-6);
        assert!(curve.invariant_failures().is_empty());
    }

    #[test]
    fn zero_speed_bowl_is_flat() {
        let spec = SolitonSpec::bowl(0.0, 2, hyp()).unwrap();
        let curve = solve_bowl(
            &spec,
            0.3,
            &StopPolicy::default().with_r_max(5.0),
            &OdeOptions::default(),
        )
        .unwrap();
        for p in &curve.samples {
            assert_eq!(p.phi, 0.0);
            assert_eq!(p.t, 0.3);
        }
    }

    #[test]
    fn lower_wing_turns_once() {
        let spec = SolitonSpec::wing(1.0, 2, 0.5, hyp()).unwrap();
        let policy = StopPolicy::default().with_r_max(8.0);
        let lower = solve_wing(&spec, Branch::Lower, &policy, &OdeOptions::default()).unwrap();
        let tp = lower.turning_point.unwrap();
        assert!(tp.phi.abs() < 1e-8);
        assert!(tp.r > 0.5 && tp.r - 0.5 <= FRAC_PI_2);
        assert_eq!(lower.phi_zero_crossings, 1);
        let first = lower.jet(0.0).unwrap();
        assert!(first[1][0].abs() < 1e-15 && (first[1][1] + 1.0).abs() < 1e-15);
        let upper = solve_wing(&spec, Branch::Upper, &policy, &OdeOptions::default()).unwrap();
        assert!(upper.turning_point.is_none());
        assert_eq!(upper.phi_zero_crossings, 0);
        assert!(lower.invariant_failures().is_empty());
    }

    #[test]
    fn ideal_equilibrium_line() {
        let bus = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
        let spec = SolitonSpec::ideal(1.0, 2, 0.0, bus).unwrap();
        let phi = ideal_equilibrium_angle(1.0, 2, 1.0);
        assert!((phi - FRAC_PI_4).abs() < 1e-15);
        let curve = solve_ideal_parametric(
            &spec,
            ProfileState::new(0.0, 0.0, 0.0, phi),
            &StopPolicy::default().with_s_max(20.0),
            &OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.s_range(), (-20.0, 20.0));
        for p in &curve.samples {
            assert!((p.phi - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn graph_of_bowl_starts_flat() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let curve = solve_bowl(
            &spec,
            0.0,
            &StopPolicy::default().with_r_max(3.0),
            &OdeOptions::default(),
        )
        .unwrap();
        let g = profile_to_graph(&curve, 1e-6).unwrap();
        assert_eq!(g.r[0], 0.0);
        assert_eq!(g.du[0], 0.0);
        let [u, du, _] = g.eval(1.5).unwrap();
        let p = curve.samples.iter().find(|p| p.r > 1.5).unwrap();
        assert!(u < p.t && du > 0.0);
    }
}
