//! Independent checks of the identities satisfied by computed solitons.
//!
//! Each check compares solver output against a separate evaluator: an
//! adaptive quadrature for first integrals, the geodesic equations of the
//! conformal metric `λ²(dr² + dt²)` with `λ = e^{ct} ξ^{n−1}(r)`, an
//! algebraic identity for the drift Laplacian of the height, or explicit
//! bounds.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::graph::{Chart, RadialGraph};
use crate::profile::{Branch, Family, ProfileCurve, ProfileState, SolitonSpec};
use crate::quadrature::integrate_adaptive;
use crate::warp::{CurvatureBounds, WarpKind};

/// Default pass tolerances.
pub mod tolerances {
    /// First integrals and other identities that involve a quadrature.
    pub const INTEGRAL: f64 = 1e-6;
    /// Pointwise algebraic identities.
    pub const ALGEBRAIC: f64 = 1e-9;
    /// Absolute tolerance of the reference quadrature.
    pub const QUADRATURE: f64 = 1e-10;
    /// Step of the five-point finite differences used on sampled curves,
    /// relative to the parameter scale.
    pub const FD_STEP: f64 = 1e-4;
    /// Agreement of the angle column with differenced positions on a
    /// sampled curve.
    pub const SAMPLED_TANGENT: f64 = 1e-5;
}

/// One line of a diagnostics report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub max_abs: f64,
    pub rms: f64,
    pub n: usize,
    pub tol: f64,
    pub pass: bool,
    /// `false` when the hypotheses of the check do not hold; such records
    /// never count as failures.
    #[serde(default = "yes")]
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn yes() -> bool {
    true
}

impl CheckRecord {
    /// Builds a record from residual samples; `pass ⇔ max_abs ≤ tol`.
    /// Non-finite residuals make the record fail.
    pub fn from_residuals(check: impl Into<String>, residuals: &[f64], tol: f64) -> Self {
        let n = residuals.len();
        let mut max_abs: f64 = 0.0;
        let mut sq = 0.0;
        let mut finite = true;
        for r in residuals {
            if !r.is_finite() {
                finite = false;
            }
            max_abs = max_abs.max(r.abs());
            sq += r * r;
        }
        if !finite {
            max_abs = f64::INFINITY;
        }
        let rms = if n == 0 { 0.0 } else { (sq / n as f64).sqrt() };
        CheckRecord {
            check: check.into(),
            max_abs,
            rms,
            n,
            tol,
            pass: finite && n > 0 && max_abs <= tol,
            applicable: true,
            note: None,
        }
    }

    pub fn not_applicable(check: impl Into<String>, why: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            max_abs: 0.0,
            rms: 0.0,
            n: 0,
            tol: 0.0,
            pass: true,
            applicable: false,
            note: Some(why.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Applicable and failed.
    pub fn failed(&self) -> bool {
        self.applicable && !self.pass
    }
}

/// A list of checks with a JSON form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub entries: Vec<CheckRecord>,
}

impl DiagnosticsReport {
    pub fn push(&mut self, record: CheckRecord) {
        self.entries.push(record);
    }

    pub fn all_pass(&self) -> bool {
        !self.entries.iter().any(CheckRecord::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.entries.iter().filter(|e| e.failed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("records serialise")
    }
}

/// A planar curve `s ↦ (r, t)` with first and second derivatives.
pub trait ProfilePath {
    /// Parameter values at which checks are evaluated.
    fn sample_params(&self) -> Vec<f64>;

    /// `[(r, t), (ṙ, ṫ), (r̈, ẗ)]` at parameter `s`.
    fn jet(&self, s: f64) -> Option<[[f64; 2]; 3]>;
}

impl ProfilePath for ProfileCurve {
    /// Integrator nodes and three interior points of every step.
    fn sample_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.samples.len());
        for w in self.samples.windows(2) {
            out.push(w[0].s);
            for q in [0.25, 0.5, 0.75] {
                out.push(w[0].s + q * (w[1].s - w[0].s));
            }
        }
        out.push(self.samples[self.samples.len() - 1].s);
        out
    }

    /// Velocity from the interpolant of `(r, t)`; acceleration from the
    /// interpolated angle and its derivative, `(−sin φ, cos φ) φ̇`.
    fn jet(&self, s: f64) -> Option<[[f64; 2]; 3]> {
        let [y, dy, _] = ProfileCurve::jet(self, s)?;
        let (sin, cos) = y[2].sin_cos();
        Some([[y[0], y[1]], [dy[0], dy[1]], [-sin * dy[2], cos * dy[2]]])
    }
}

/// A curve known only through point evaluation; derivatives come from
/// five-point central differences with step `h`.
pub struct FnPath<F: Fn(f64) -> Option<[f64; 2]>> {
    pub position: F,
    pub params: Vec<f64>,
    pub h: f64,
}

impl<F: Fn(f64) -> Option<[f64; 2]>> ProfilePath for FnPath<F> {
    fn sample_params(&self) -> Vec<f64> {
        self.params.clone()
    }

    fn jet(&self, s: f64) -> Option<[[f64; 2]; 3]> {
        let h = self.h;
        let p: Vec<[f64; 2]> = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|k| (self.position)(s + k * h))
            .collect::<Option<_>>()?;
        let mut out = [p[2], [0.0; 2], [0.0; 2]];
        for i in 0..2 {
            out[1][i] = (p[0][i] - 8.0 * p[1][i] + 8.0 * p[3][i] - p[4][i]) / (12.0 * h);
            out[2][i] = (-p[0][i] + 16.0 * p[1][i] - 30.0 * p[2][i] + 16.0 * p[3][i] - p[4][i])
                / (12.0 * h * h);
        }
        Some(out)
    }
}

/// Samples `(s_i, r_i, t_i, φ_i)` on a non-uniform grid. The jet takes the
/// tangent `(cos φ, sin φ)` from the angle column and `φ̇` from five-point
/// Fornberg weights; [`tangent_consistency`] ties the angle to the positions.
/// Used for curves read from files.
pub struct SampledPath {
    s: Vec<f64>,
    x: Vec<[f64; 2]>,
    phi: Vec<f64>,
}

impl SampledPath {
    pub fn new(samples: &[ProfileState]) -> Result<Self> {
        if samples.len() < 5 {
            return Err(SolitonError::InvalidParameter(
                "a sampled curve needs at least five points".into(),
            ));
        }
        if samples.windows(2).any(|w| !(w[1].s > w[0].s)) {
            return Err(SolitonError::InvalidParameter(
                "sample parameters must be strictly increasing".into(),
            ));
        }
        // unwrap the angle so that finite differences see a smooth function
        let mut phi = Vec::with_capacity(samples.len());
        let mut prev = samples[0].phi;
        phi.push(prev);
        for p in &samples[1..] {
            let mut a = p.phi;
            while a - prev > PI {
                a -= TAU;
            }
            while a - prev < -PI {
                a += TAU;
            }
            phi.push(a);
            prev = a;
        }
        Ok(SampledPath {
            s: samples.iter().map(|p| p.s).collect(),
            x: samples.iter().map(|p| [p.r, p.t]).collect(),
            phi,
        })
    }

    fn stencil(&self, s: f64) -> Option<(usize, usize, [Vec<f64>; 3])> {
        let i = self.s.iter().position(|&v| v == s)?;
        let lo = i.checked_sub(2)?;
        if i + 2 >= self.s.len() {
            return None;
        }
        Some((i, lo, fornberg(s, &self.s[lo..=i + 2])))
    }
}

/// `|ẋ − (cos φ, sin φ)|` at interior samples, with `ẋ` from five-point
/// differences of the positions.
pub fn tangent_consistency(path: &SampledPath, tol: f64) -> CheckRecord {
    let mut res = Vec::new();
    for s in path.sample_params() {
        let Some((i, lo, w)) = path.stencil(s) else {
            continue;
        };
        let d: [f64; 2] =
            std::array::from_fn(|comp| (0..5).map(|j| w[1][j] * path.x[lo + j][comp]).sum());
        let (sin, cos) = path.phi[i].sin_cos();
        res.push((d[0] - cos).hypot(d[1] - sin));
    }
    CheckRecord::from_residuals("tangent", &res, tol)
}

/// Weights for derivatives 0..=2 at `z` from nodes `x` (Fornberg).
fn fornberg(z: f64, x: &[f64]) -> [Vec<f64>; 3] {
    let n = x.len();
    let m = 2usize;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    let col = |k: usize| c.iter().map(|row| row[k]).collect::<Vec<_>>();
    [col(0), col(1), col(2)]
}

impl ProfilePath for SampledPath {
    /// Interior samples with a full five-point stencil.
    fn sample_params(&self) -> Vec<f64> {
        self.s[2..self.s.len() - 2].to_vec()
    }

    fn jet(&self, s: f64) -> Option<[[f64; 2]; 3]> {
        let (i, lo, w) = self.stencil(s)?;
        let phi_dot: f64 = (0..5).map(|j| w[1][j] * self.phi[lo + j]).sum();
        let (sin, cos) = self.phi[i].sin_cos();
        Some([self.x[i], [cos, sin], [-sin * phi_dot, cos * phi_dot]])
    }
}

/// `(λ_r/λ, λ_t/λ)` for `λ = e^{ct} ξ^{n−1}(r)`.
fn log_gradient(spec: &SolitonSpec, r: f64) -> (f64, f64) {
    (spec.drift(r), spec.c)
}

/// Geodesic curvature-type residual of the conformal metric at one point:
/// the part of `ẍ + Γ(ẋ, ẋ)` normal to `ẋ`, divided by `|ẋ|²`. For unit
/// speed this is the arc-length form of the geodesic equations,
/// `ẍᵏ + Γᵏᵢⱼẋⁱẋʲ − ẋᵏ(ẋ·∇ ln λ) = 0`.
pub fn geodesic_equation_residual(spec: &SolitonSpec, jet: &[[f64; 2]; 3]) -> [f64; 2] {
    let [x, v, a] = jet;
    let (lr, lt) = log_gradient(spec, x[0]);
    let (vr, vt) = (v[0], v[1]);
    let gamma_r = lr * vr * vr + 2.0 * lt * vr * vt - lr * vt * vt;
    let gamma_t = -lt * vr * vr + 2.0 * lr * vr * vt + lt * vt * vt;
    let e = [a[0] + gamma_r, a[1] + gamma_t];
    let v2 = vr * vr + vt * vt;
    let along = (e[0] * vr + e[1] * vt) / v2;
    [(e[0] - along * vr) / v2, (e[1] - along * vt) / v2]
}

/// Residual of the reduced angle relation `φ̇ = (λ_t/λ) ṙ − (λ_r/λ) ṫ`
/// per unit arc length.
pub fn angle_equation_residual(spec: &SolitonSpec, jet: &[[f64; 2]; 3]) -> f64 {
    let [x, v, a] = jet;
    let (lr, lt) = log_gradient(spec, x[0]);
    let speed = v[0].hypot(v[1]);
    let (tr, tt) = (v[0] / speed, v[1] / speed);
    let phi_dot = (v[0] * a[1] - v[1] * a[0]) / (speed * speed * speed);
    phi_dot - (lt * tr - lr * tt)
}

/// Full geodesic system and reduced angle relation along `path`.
pub fn geodesic_residual<P: ProfilePath + ?Sized>(
    path: &P,
    spec: &SolitonSpec,
    tol: f64,
) -> CheckRecord {
    let mut res = Vec::new();
    for s in path.sample_params() {
        let Some(jet) = path.jet(s) else { continue };
        if spec.warp.kind() == WarpKind::Rotational && !(jet[0][0] > 0.0) {
            continue;
        }
        let [a, b] = geodesic_equation_residual(spec, &jet);
        res.push(a.hypot(b));
        res.push(angle_equation_residual(spec, &jet));
    }
    CheckRecord::from_residuals("geodesic", &res, tol)
}

/// Residual of the profile system along an integrated curve: the
/// interpolant derivative against the right-hand side evaluated on the
/// interpolant.
pub fn profile_system_residual(curve: &ProfileCurve, tol: f64) -> CheckRecord {
    let spec = &curve.spec;
    let mut res = Vec::new();
    for s in ProfilePath::sample_params(curve) {
        let Some([y, dy, _]) = curve.jet(s) else {
            continue;
        };
        if spec.warp.kind() == WarpKind::Rotational && !(y[0] > 0.0) {
            continue;
        }
        let (sin, cos) = y[2].sin_cos();
        let drift = if spec.n > 1 { spec.drift(y[0]) } else { 0.0 };
        let f = [cos, sin, spec.c * cos - drift * sin];
        for k in 0..3 {
            res.push(dy[k] - f[k]);
        }
    }
    CheckRecord::from_residuals("profile_system", &res, tol)
}

/// `ẗ + (n−1)(ξ′/ξ) ṙ ṫ + c ṫ² − c` at a state, with `ẗ = cos φ · φ̇`
/// and `φ̇` taken from the profile system.
pub fn drift_identity_at(state: &ProfileState, spec: &SolitonSpec) -> f64 {
    let (sin, cos) = state.phi.sin_cos();
    let drift = if spec.n > 1 { spec.drift(state.r) } else { 0.0 };
    let phi_dot = spec.c * cos - drift * sin;
    let t_ddot = cos * phi_dot;
    t_ddot + drift * cos * sin + spec.c * sin * sin - spec.c
}

/// Drift-Laplacian identity `Δ_{−cη} η = c` for the height `η = t`,
/// reduced to a profile: `ẗ + (n−1)(ξ′/ξ) ṙṫ + c ṫ² − c = 0`, with
/// derivatives taken along `path` in arc length.
pub fn drift_identity_residual<P: ProfilePath + ?Sized>(
    path: &P,
    spec: &SolitonSpec,
    tol: f64,
) -> CheckRecord {
    let mut res = Vec::new();
    for s in path.sample_params() {
        let Some([x, v, a]) = path.jet(s) else {
            continue;
        };
        if spec.warp.kind() == WarpKind::Rotational && !(x[0] > 0.0) {
            continue;
        }
        let speed = v[0].hypot(v[1]);
        let tan = [v[0] / speed, v[1] / speed];
        let along = a[0] * tan[0] + a[1] * tan[1];
        let t_ddot = (a[1] - along * tan[1]) / (speed * speed);
        let drift = if spec.n > 1 { spec.drift(x[0]) } else { 0.0 };
        res.push(t_ddot + drift * tan[0] * tan[1] + spec.c * tan[1] * tan[1] - spec.c);
    }
    CheckRecord::from_residuals("drift_identity", &res, tol)
}

fn xi_power(spec: &SolitonSpec, r: f64) -> f64 {
    spec.warp.xi(r).powi(spec.n as i32 - 1)
}

/// Flux first integral of a polar graph,
/// `(u′/W) ξ^{n−1}(r) − (u′/W) ξ^{n−1}(r_a) = ∫_{r_a}^{r} c ξ^{n−1}/W`,
/// at every node, with the right side from adaptive quadrature.
pub fn flux_residual(graph: &RadialGraph, tol: f64) -> Result<CheckRecord> {
    if graph.chart != Chart::Polar {
        return Err(SolitonError::Incompatible(format!(
            "flux identity needs a polar chart, got {:?}",
            graph.chart
        )));
    }
    let spec = &graph.spec;
    let lhs = |r: f64, du: f64| {
        let w = du.hypot(1.0);
        if r == 0.0 && spec.n > 1 {
            0.0
        } else {
            du / w * xi_power(spec, r)
        }
    };
    let integrand = |r: f64| -> f64 {
        let du = graph.eval(r).map_or(f64::NAN, |e| e[1]);
        spec.c * xi_power(spec, r) / du.hypot(1.0)
    };
    let base = lhs(graph.r[0], graph.du[0]);
    let mut acc = 0.0;
    let mut res = Vec::with_capacity(graph.r.len());
    for i in 1..graph.r.len() {
        let q = integrate_adaptive(
            integrand,
            graph.r[i - 1],
            graph.r[i],
            tolerances::QUADRATURE / graph.r.len() as f64,
            1e-14,
        )?;
        acc += q.value;
        res.push(lhs(graph.r[i], graph.du[i]) - base - acc);
    }
    Ok(CheckRecord::from_residuals("flux", &res, tol))
}

/// Flux first integral in arc length, valid for every profile including
/// the vertical launch of a wing:
/// `sin φ ξ^{n−1}(r) |_{s_a}^{s} = ∫_{s_a}^{s} c cos² φ ξ^{n−1}(r) ds`.
/// Residuals are divided by `1 + ξ^{n−1}(r)`, since both sides grow with the
/// warp.
pub fn profile_flux_residual(curve: &ProfileCurve, tol: f64) -> Result<CheckRecord> {
    let spec = &curve.spec;
    if spec.warp.kind() != WarpKind::Rotational {
        return Err(SolitonError::Incompatible(
            "profile flux identity needs a rotational warp".into(),
        ));
    }
    let value = |p: &ProfileState| {
        if p.r == 0.0 && spec.n > 1 {
            0.0
        } else {
            p.phi.sin() * xi_power(spec, p.r)
        }
    };
    let integrand = |s: f64| -> f64 {
        curve.eval(s).map_or(f64::NAN, |p| {
            let c = p.phi.cos();
            spec.c * c * c * xi_power(spec, p.r)
        })
    };
    let m = curve.samples.len();
    let base = value(&curve.samples[0]);
    let mut acc = 0.0;
    let mut res = Vec::with_capacity(m);
    for i in 1..m {
        let q = integrate_adaptive(
            integrand,
            curve.samples[i - 1].s,
            curve.samples[i].s,
            tolerances::QUADRATURE / m as f64,
            1e-14,
        )?;
        acc += q.value;
        let scale = 1.0 + xi_power(spec, curve.samples[i].r);
        res.push((value(&curve.samples[i]) - base - acc) / scale);
    }
    Ok(CheckRecord::from_residuals("profile_flux", &res, tol))
}

/// Flux identity at the turning point of a lower wing branch,
/// `ξ^{n−1}(ε) = ∫_ε^{r₀} c ξ^{n−1}/W dr`, with the right side computed in
/// arc length to avoid the vertical tangent at `r = ε`.
pub fn wing_turning_flux(curve: &ProfileCurve, tol: f64) -> Result<CheckRecord> {
    let Family::Wing { epsilon } = curve.spec.family else {
        return Err(SolitonError::Incompatible("not a wing".into()));
    };
    let tp = curve.turning_point.ok_or_else(|| {
        SolitonError::TurningPointMissing("lower branch has no φ = 0 point".into())
    })?;
    let spec = &curve.spec;
    let integrand = |s: f64| -> f64 {
        curve.eval(s).map_or(f64::NAN, |p| {
            let c = p.phi.cos();
            spec.c * c * c * xi_power(spec, p.r)
        })
    };
    let q = integrate_adaptive(integrand, 0.0, tp.s, tolerances::QUADRATURE, 1e-14)?;
    let lhs = xi_power(spec, epsilon);
    Ok(CheckRecord::from_residuals(
        "wing_turning_flux",
        &[lhs - q.value],
        tol,
    ))
}

/// `ψ = u′ − (c/(n−1)) ξ/ξ′` and `λ = (ξ/ξ′) ψ` sampled on the outer decade
/// of a bowl graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSamples {
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    pub lambda: Vec<f64>,
}

pub fn asymptotic_samples(
    graph: &RadialGraph,
    r_from: f64,
    r_to: f64,
    count: usize,
) -> Result<AsymptoticSamples> {
    let spec = &graph.spec;
    if spec.n < 2 {
        return Err(SolitonError::InvalidParameter(
            "asymptotic slope needs n ≥ 2".into(),
        ));
    }
    let k = spec.c / f64::from(spec.n - 1);
    let mut out = AsymptoticSamples {
        r: Vec::new(),
        psi: Vec::new(),
        lambda: Vec::new(),
    };
    let (a, b) = (r_from.ln(), r_to.ln());
    for i in 0..count {
        let r = (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp();
        let Some([_, du, _]) = graph.eval(r) else {
            continue;
        };
        let g = spec.warp.inverse_log_derivative(r);
        let psi = du - k * g;
        out.r.push(r);
        out.psi.push(psi);
        out.lambda.push(g * psi);
    }
    if out.r.is_empty() {
        return Err(SolitonError::InvalidParameter(
            "sampling range outside the graph".into(),
        ));
    }
    Ok(out)
}

/// Slope asymptotics of a bowl when `K₊ < 0`. The record's residual is the
/// largest violation among: `ψ > 0`, growth of `|ψ|` and growth of `|λ|`
/// between consecutive samples of the outer decade; it passes when that
/// violation is zero. The decay of `ψ` has no rate attached, so this is a
/// monotonicity proxy.
pub fn asymptotic_report(graph: &RadialGraph, bounds: &CurvatureBounds) -> Result<CheckRecord> {
    const NAME: &str = "asymptotic_slope";
    if graph.chart != Chart::Polar {
        return Err(SolitonError::Incompatible(
            "asymptotic slope needs a polar chart".into(),
        ));
    }
    if !(bounds.k_plus < 0.0) {
        return Ok(CheckRecord::not_applicable(NAME, "K₊ = 0"));
    }
    let (_, r_max) = graph.r_range();
    let g_prime = graph.spec.warp.ratio_derivative(r_max).abs();
    if !(g_prime < 1e-3) {
        return Ok(CheckRecord::not_applicable(
            NAME,
            format!("(ξ/ξ′)′ = {g_prime:e} at the outer radius is not small"),
        ));
    }
    let samples = asymptotic_samples(graph, r_max / 10.0, r_max, 200)?;
    let mut violation: Vec<f64> = samples.psi.iter().map(|p| p.max(0.0)).collect();
    for w in samples.psi.windows(2) {
        violation.push((w[1].abs() - w[0].abs()).max(0.0));
    }
    for w in samples.lambda.windows(2) {
        violation.push((w[1].abs() - w[0].abs()).max(0.0));
    }
    Ok(
        CheckRecord::from_residuals(NAME, &violation, 0.0).with_note(format!(
            "ψ({:.3}) = {:e}, λ({:.3}) = {:e}; monotone-decay proxy",
            r_max,
            samples.psi[samples.psi.len() - 1],
            r_max,
            samples.lambda[samples.lambda.len() - 1]
        )),
    )
}

/// `(1−ϵ)(c/(n−1)) ξ/ξ′ ≤ u′ ≤ (c/(n−1)) ξ/ξ′` on `[r_from, r_max]`. The
/// residual is the largest violation of either side.
pub fn slope_sandwich(graph: &RadialGraph, r_from: f64, epsilon: f64) -> Result<CheckRecord> {
    let (_, r_max) = graph.r_range();
    let samples = asymptotic_samples(graph, r_from, r_max, 400)?;
    let k = graph.spec.c / f64::from(graph.spec.n - 1);
    let mut violation = Vec::with_capacity(samples.r.len());
    for (r, psi) in samples.r.iter().zip(&samples.psi) {
        let bound = epsilon * k * graph.spec.warp.inverse_log_derivative(*r);
        violation.push(psi.max(0.0) + (-psi - bound).max(0.0));
    }
    Ok(CheckRecord::from_residuals(
        "slope_sandwich",
        &violation,
        0.0,
    ))
}

/// Height gap of a wing and the bounds it must satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WingHeightReport {
    pub epsilon: f64,
    pub r0: f64,
    pub gap: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `π/(2c)`.
    pub radius_bound: f64,
    /// `(ξ′/ξ)′ ≤ 0` sampled on `[ε, r₀]`.
    pub hypothesis_holds: bool,
    pub pass: bool,
}

impl WingHeightReport {
    /// As a report line; the residual is the largest violation.
    pub fn record(&self) -> CheckRecord {
        let v = [
            (self.lower_bound - self.gap).max(0.0),
            (self.gap - self.upper_bound).max(0.0),
            (self.r0 - self.epsilon - self.radius_bound).max(0.0),
        ];
        let mut rec = CheckRecord::from_residuals("wing_height", &v, 0.0);
        if !self.hypothesis_holds {
            rec.applicable = false;
            rec.note = Some("(ξ′/ξ)′ ≤ 0 fails on [ε, r₀]".into());
        }
        rec
    }
}

/// Bounds on the height gap `t(ε) − t(r₀)` of the lower wing branch:
/// `(1/(n−1)) g(ε) (π/2 − c(r₀−ε)) ≤ gap ≤ (1/(n−1)) g(r₀) (π/2 − c(r₀−ε))`
/// with `g = ξ/ξ′`, and `r₀ − ε ≤ π/(2c)`.
pub fn wing_height_report(lower: &ProfileCurve) -> Result<WingHeightReport> {
    let spec = &lower.spec;
    let Family::Wing { epsilon } = spec.family else {
        return Err(SolitonError::Incompatible("not a wing".into()));
    };
    if lower.branch != Some(Branch::Lower) {
        return Err(SolitonError::InvalidParameter(
            "height gap is measured on the lower branch".into(),
        ));
    }
    if spec.n < 2 {
        return Err(SolitonError::InvalidParameter(
            "wing bounds need n ≥ 2".into(),
        ));
    }
    let tp = lower.turning_point.ok_or_else(|| {
        SolitonError::TurningPointMissing(format!(
            "no φ = 0 point before termination at s = {}",
            lower.termination.s
        ))
    })?;
    let r0 = tp.r;
    let gap = lower.samples[0].t - tp.t;
    let nm1 = f64::from(spec.n - 1);
    let factor = FRAC_PI_2 - spec.c * (r0 - epsilon);
    let g = |r: f64| spec.warp.inverse_log_derivative(r);
    let lower_bound = g(epsilon) * factor / nm1;
    let upper_bound = g(r0) * factor / nm1;
    let radius_bound = FRAC_PI_2 / spec.c;
    let hypothesis_holds = (0..=64).all(|i| {
        let r = epsilon + (r0 - epsilon) * i as f64 / 64.0;
        // (ξ′/ξ)′ = (ξ″ξ − ξ′²)/ξ²
        let [x, dx, ddx] = spec.warp.jet(r);
        (ddx * x - dx * dx) / (x * x) <= 1e-12
    });
    let pass = lower_bound <= gap && gap <= upper_bound && r0 - epsilon <= radius_bound;
    Ok(WingHeightReport {
        epsilon,
        r0,
        gap,
        lower_bound,
        upper_bound,
        radius_bound,
        hypothesis_holds,
        pass,
    })
}

/// The standard verification suite for a profile.
pub fn verify_profile(curve: &ProfileCurve) -> Result<DiagnosticsReport> {
    let mut report = DiagnosticsReport::default();
    report.push(profile_system_residual(curve, 50.0 * curve.options.rtol));
    report.push(geodesic_residual(curve, &curve.spec, tolerances::INTEGRAL));
    report.push(drift_identity_residual(
        curve,
        &curve.spec,
        tolerances::INTEGRAL,
    ));
    let algebraic: Vec<f64> = curve
        .samples
        .iter()
        .filter(|p| p.r > 0.0 || curve.spec.warp.kind() != WarpKind::Rotational)
        .map(|p| drift_identity_at(p, &curve.spec))
        .collect();
    report.push(CheckRecord::from_residuals(
        "drift_identity_algebraic",
        &algebraic,
        tolerances::ALGEBRAIC,
    ));
    if curve.spec.warp.kind() == WarpKind::Rotational {
        report.push(profile_flux_residual(curve, tolerances::INTEGRAL)?);
    }
    if let (Family::Wing { .. }, Some(Branch::Lower)) = (curve.spec.family, curve.branch) {
        report.push(wing_turning_flux(curve, tolerances::INTEGRAL)?);
        if curve.spec.n >= 2 && curve.spec.c > 0.0 {
            report.push(wing_height_report(curve)?.record());
        }
    }
    Ok(report)
}

/// Checks for a curve given only by samples: geodesic and drift identities
/// with finite-difference derivatives.
pub fn verify_samples(samples: &[ProfileState], spec: &SolitonSpec) -> Result<DiagnosticsReport> {
    let path = SampledPath::new(samples)?;
    let mut report = DiagnosticsReport::default();
    report.push(tangent_consistency(&path, tolerances::SAMPLED_TANGENT));
    report.push(geodesic_residual(&path, spec, tolerances::INTEGRAL));
    report.push(drift_identity_residual(&path, spec, tolerances::INTEGRAL));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::OdeOptions;
    use crate::profile::{solve_bowl, StopPolicy};
    use crate::warp::WarpModel;
    use std::f64::consts::FRAC_PI_6;

    #[test]
    fn drift_identity_examples() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::hyperbolic(-1.0).unwrap()).unwrap();
        let r = drift_identity_at(&ProfileState::new(0.0, 1.0, 0.0, FRAC_PI_6), &spec);
        assert!(r.abs() < 1e-12);
        let r = drift_identity_at(&ProfileState::new(0.0, 3.0, 0.0, 0.0), &spec);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn vertical_line_is_not_geodesic() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let path = FnPath {
            position: |s: f64| Some([0.5, s]),
            params: (0..20).map(|i| i as f64 * 0.1).collect(),
            h: 1e-3,
        };
        let rec = geodesic_residual(&path, &spec, 1e-6);
        assert!(!rec.pass);
        assert!(rec.max_abs > 1.0);
    }

    #[test]
    fn fornberg_matches_uniform_stencil() {
        let x = [0.0, 0.1, 0.25, 0.3, 0.5];
        let w = fornberg(0.25, &x);
        let f = |t: f64| t * t * t;
        let d1: f64 = (0..5).map(|j| w[1][j] * f(x[j])).sum();
        let d2: f64 = (0..5).map(|j| w[2][j] * f(x[j])).sum();
        assert!((d1 - 3.0 * 0.0625).abs() < 1e-12);
        assert!((d2 - 6.0 * 0.25).abs() < 1e-10);
    }

    #[test]
    fn constant_graph_zero_speed_flux() {
        let spec = SolitonSpec::bowl(0.0, 2, WarpModel::euclidean()).unwrap();
        let curve = solve_bowl(
            &spec,
            1.0,
            &StopPolicy::default().with_r_max(3.0),
            &OdeOptions::default(),
        )
        .unwrap();
        let g = crate::profile::profile_to_graph(&curve, 1e-6).unwrap();
        let rec = flux_residual(&g, 1e-12).unwrap();
        assert_eq!(rec.max_abs, 0.0);
    }

    #[test]
    fn euclidean_asymptotics_not_applicable() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let curve = solve_bowl(
            &spec,
            0.0,
            &StopPolicy::default().with_r_max(3.0),
            &OdeOptions::default(),
        )
        .unwrap();
        let g = crate::profile::profile_to_graph(&curve, 1e-6).unwrap();
        let rec = asymptotic_report(&g, &CurvatureBounds::constant(0.0).unwrap()).unwrap();
        assert!(!rec.applicable && rec.pass);
    }

    #[test]
    fn report_json_fields() {
        let mut rep = DiagnosticsReport::default();
        rep.push(CheckRecord::from_residuals("x", &[1e-3, -2e-3], 1e-2));
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in ["check", "max_abs", "rms", "n", "tol", "pass"] {
            assert!(v[0].get(key).is_some(), "{key}");
        }
        assert!(rep.all_pass());
        rep.push(CheckRecord::from_residuals("y", &[f64::NAN], 1.0));
        assert!(!rep.all_pass());
    }
}
