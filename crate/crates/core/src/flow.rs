//! Method-of-lines graphical mean curvature flow for graphs over a radial
//! coordinate, `∂u/∂τ = u″/(1+u′²) + Δr·u′`, and the weighted area
//! `F(τ) = ∫ exp(c·u − c²τ) W dμ`, whose decay rate is the soliton
//! defect `D(τ) = ∫ exp(c·u − c²τ) (H − c/W)² W dμ`.
//!
//! Rotational warps use the grid `[0, R]` with a symmetric ghost node on the
//! axis. Busemann warps and equidistant warps with `n = 2` use `[−R, R]`
//! with a boundary condition at each end.
//!
//! On a truncated domain the identity is
//! `dF/dτ + D = [K (u′/W) dμ/dr (∂u/∂τ − c)]` evaluated at the ends, see
//! [`boundary_flux`]; it vanishes when the boundary slope makes the end
//! nodes translate with speed `c`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::graph::{solve_grim, solve_horosphere_graph, solve_radial_graph, GraphIc};
use crate::ode::OdeOptions;
use crate::profile::SolitonSpec;
use crate::quadrature::simpson;
use crate::warp::{WarpKind, WarpModel};

/// Default outer radius of the flow grid.
pub const DEFAULT_RADIUS: f64 = 10.0;
/// Default node count of the flow grid.
pub const DEFAULT_NODES: usize = 2001;
/// Explicit stability factor: `dτ ≤ 0.375 Δr² · min(1, 2/n)`. The slope
/// boundary stencil has an eigenvalue near `−5.06/Δr²`, and Heun needs
/// `dτ·|λ| ≤ 2`.
pub const STABILITY_FACTOR: f64 = 0.375;
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 25;

/// Condition imposed at an end of the grid that is not the rotation axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `u′ = c/Δr` at the end node: the slope a soliton approaches where
    /// `Δr` is nearly constant, `(c/(n−1)) ξ/ξ′` on rotational warps.
    Robin,
    /// `u′` equal to the slope of the soliton graph of the same spec at the
    /// end node, so soliton data translates rigidly there.
    SolitonSlope,
    /// Prescribed slope.
    Neumann { slope: f64 },
    /// Height held at its initial value.
    Dirichlet,
}

/// Time integrator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Heun's method (explicit, second order).
    Explicit,
    /// Backward Euler with damped Newton iterations.
    Implicit,
}

/// Everything that defines the discrete problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowConfig {
    pub c: f64,
    pub n: u32,
    #[serde(skip, default = "WarpModel::euclidean")]
    pub warp: WarpModel,
    pub radius: f64,
    pub nodes: usize,
    /// Ignored on rotational warps, where the lower end is the axis.
    pub lower: BoundaryCondition,
    pub upper: BoundaryCondition,
}

impl FlowConfig {
    pub fn new(c: f64, n: u32, warp: WarpModel) -> Self {
        FlowConfig {
            c,
            n,
            warp,
            radius: DEFAULT_RADIUS,
            nodes: DEFAULT_NODES,
            lower: BoundaryCondition::Robin,
            upper: BoundaryCondition::Robin,
        }
    }

    pub fn with_grid(mut self, radius: f64, nodes: usize) -> Self {
        self.radius = radius;
        self.nodes = nodes;
        self
    }

    pub fn with_boundary(mut self, bc: BoundaryCondition) -> Self {
        self.lower = bc;
        self.upper = bc;
        self
    }

    fn two_sided(&self) -> bool {
        self.warp.kind() != WarpKind::Rotational
    }

    /// The soliton whose graph is the translating solution of this flow.
    pub fn soliton_spec(&self) -> Result<SolitonSpec> {
        match self.warp.kind() {
            WarpKind::Rotational => SolitonSpec::bowl(self.c, self.n, self.warp.clone()),
            WarpKind::Equidistant => SolitonSpec::grim(self.c, self.n, self.warp.clone()),
            WarpKind::Busemann => SolitonSpec::ideal(self.c, self.n, 0.0, self.warp.clone()),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(SolitonError::InvalidParameter(format!(
                "flow speed c must be finite and ≥ 0, got {}",
                self.c
            )));
        }
        if self.n == 0 {
            return Err(SolitonError::InvalidParameter("n must be ≥ 1".into()));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(SolitonError::InvalidParameter(format!(
                "grid radius must be positive, got {}",
                self.radius
            )));
        }
        if self.nodes < 5 {
            return Err(SolitonError::InvalidParameter(format!(
                "the flow grid needs at least 5 nodes, got {}",
                self.nodes
            )));
        }
        if self.warp.kind() == WarpKind::Equidistant && self.n > 2 {
            return Err(SolitonError::Incompatible(format!(
                "equidistant flows are supported for n = 2 only; Δr is singular at r = 0 for n = {}",
                self.n
            )));
        }
        let lo = if self.two_sided() { -self.radius } else { 0.0 };
        if !self.warp.contains(lo) || !self.warp.contains(self.radius) {
            return Err(SolitonError::OutsideDomain {
                r: self.radius,
                label: self.warp.label().to_string(),
            });
        }
        Ok(())
    }

    /// Soliton heights on the grid and their slopes at the two ends.
    pub fn soliton_on_grid(&self) -> Result<(Vec<f64>, [f64; 2])> {
        self.validate()?;
        let spec = self.soliton_spec()?;
        let r = grid(self);
        let opts = OdeOptions::default();
        let graph = match self.warp.kind() {
            WarpKind::Rotational => solve_radial_graph(
                &spec,
                (0.0, self.radius),
                GraphIc::new(0.0, 0.0, 0.0),
                &opts,
            )?,
            WarpKind::Equidistant => solve_grim(
                &spec,
                (-self.radius, self.radius),
                GraphIc::new(0.0, 0.0, 0.0),
                &opts,
            )?,
            WarpKind::Busemann => {
                let d = self.warp.drift_coefficient(0.0, self.n);
                if !(d != 0.0 && d.is_finite()) {
                    return Err(SolitonError::Incompatible(
                        "a Busemann soliton needs (n−1)ξ′/ξ ≠ 0".into(),
                    ));
                }
                solve_horosphere_graph(
                    &spec,
                    (-self.radius, self.radius),
                    GraphIc::new(0.0, 0.0, self.c / d),
                    &opts,
                )?
            }
        };
        if !graph.blowups.is_empty() {
            return Err(SolitonError::Incompatible(
                "the soliton graph is not entire on the flow grid".into(),
            ));
        }
        let mut u = Vec::with_capacity(r.len());
        let mut du = [0.0; 2];
        for (i, &ri) in r.iter().enumerate() {
            let [v, d, _] = graph.eval(ri).ok_or(SolitonError::OutsideDomain {
                r: ri,
                label: "soliton graph".into(),
            })?;
            u.push(v);
            if i == 0 {
                du[0] = d;
            }
            if i + 1 == r.len() {
                du[1] = d;
            }
        }
        Ok((u, du))
    }

    /// Validates the configuration and precomputes grid coefficients.
    pub fn build(&self) -> Result<Arc<FlowSetup>> {
        self.validate()?;
        let r = grid(self);
        let dr = r[1] - r[0];
        let two_sided = self.two_sided();
        let n = self.n;
        let drift: Vec<f64> = r
            .iter()
            .map(|&ri| {
                if !two_sided && ri == 0.0 {
                    0.0
                } else {
                    self.warp.drift_coefficient(ri, n)
                }
            })
            .collect();
        let density: Vec<f64> = r
            .iter()
            .map(|&ri| {
                let p = if n == 1 { 0 } else { n as i32 - 1 };
                match self.warp.kind() {
                    WarpKind::Equidistant => self.warp.xi(ri),
                    _ => self.warp.xi(ri).powi(p),
                }
            })
            .collect();
        if drift.iter().chain(&density).any(|v| !v.is_finite()) {
            return Err(SolitonError::Singular {
                quantity: "Δr",
                r: self.radius,
            });
        }
        let needs_soliton = [self.lower, self.upper].contains(&BoundaryCondition::SolitonSlope);
        let soliton_slopes = if needs_soliton {
            Some(self.soliton_on_grid()?.1)
        } else {
            None
        };
        let resolve = |bc: BoundaryCondition, end: usize| -> Result<End> {
            Ok(match bc {
                BoundaryCondition::Robin => {
                    let d = drift[if end == 0 { 0 } else { r.len() - 1 }];
                    if self.c == 0.0 {
                        End::Slope(0.0)
                    } else if d == 0.0 {
                        return Err(SolitonError::Singular {
                            quantity: "c/Δr",
                            r: r[if end == 0 { 0 } else { r.len() - 1 }],
                        });
                    } else {
                        End::Slope(self.c / d)
                    }
                }
                BoundaryCondition::SolitonSlope => {
                    End::Slope(soliton_slopes.expect("computed above")[end])
                }
                BoundaryCondition::Neumann { slope } => End::Slope(slope),
                BoundaryCondition::Dirichlet => End::Fixed,
            })
        };
        let lower = if two_sided {
            resolve(self.lower, 0)?
        } else {
            End::Axis
        };
        let upper = resolve(self.upper, 1)?;
        let area = if two_sided { 1.0 } else { sphere_area(n) };
        Ok(Arc::new(FlowSetup {
            config: self.clone(),
            r,
            dr,
            drift,
            density,
            area,
            lower,
            upper,
        }))
    }
}

fn grid(cfg: &FlowConfig) -> Vec<f64> {
    let m = cfg.nodes;
    let lo = if cfg.two_sided() { -cfg.radius } else { 0.0 };
    let h = (cfg.radius - lo) / (m - 1) as f64;
    (0..m)
        .map(|i| {
            if i + 1 == m {
                cfg.radius
            } else {
                lo + h * i as f64
            }
        })
        .collect()
}

/// `|𝕊^{n−1}| = 2π^{n/2}/Γ(n/2)`; `|𝕊⁰| = 2` counts the two ends of a
/// segment.
pub fn sphere_area(n: u32) -> f64 {
    // |S^{m}| = 2π/(m−1) |S^{m−2}|
    let m = n as i64 - 1;
    let (mut area, mut k) = if m % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    while k < m {
        k += 2;
        area *= 2.0 * PI / (k - 1) as f64;
    }
    area
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum End {
    Axis,
    Slope(f64),
    Fixed,
}

/// Grid, coefficients and resolved boundary conditions.
#[derive(Debug)]
pub struct FlowSetup {
    config: FlowConfig,
    r: Vec<f64>,
    dr: f64,
    drift: Vec<f64>,
    density: Vec<f64>,
    area: f64,
    lower: End,
    upper: End,
}

impl FlowSetup {
    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    /// Largest stable explicit step.
    pub fn stability_bound(&self) -> f64 {
        let n = f64::from(self.config.n);
        STABILITY_FACTOR * self.dr * self.dr * (2.0 / n).min(1.0)
    }

    /// Slope imposed at the lower and upper ends, if any.
    pub fn boundary_slopes(&self) -> [Option<f64>; 2] {
        let s = |e: End| match e {
            End::Axis => Some(0.0),
            End::Slope(m) => Some(m),
            End::Fixed => None,
        };
        [s(self.lower), s(self.upper)]
    }

    /// `u′` at every node: centred differences inside, the imposed slope at
    /// slope ends, one-sided second-order differences at fixed ends.
    fn slopes(&self, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        let h = self.dr;
        let mut p = vec![0.0; m];
        for i in 1..m - 1 {
            p[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        p[0] = match self.lower {
            End::Axis => 0.0,
            End::Slope(s) => s,
            End::Fixed => (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h),
        };
        p[m - 1] = match self.upper {
            End::Slope(s) => s,
            _ => (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * h),
        };
        p
    }

    fn rhs_into(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len();
        let h2 = self.dr * self.dr;
        let n = f64::from(self.config.n);
        for i in 1..m - 1 {
            let p = (u[i + 1] - u[i - 1]) / (2.0 * self.dr);
            let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
            out[i] = d2 / (1.0 + p * p) + self.drift[i] * p;
        }
        // slope ends: u″ = (8u₁ − u₂ − 7u₀ ∓ 6h·s)/(2h²), second order
        out[0] = match self.lower {
            End::Axis => 2.0 * n * (u[1] - u[0]) / h2,
            End::Slope(s) => {
                let d2 = (8.0 * u[1] - u[2] - 7.0 * u[0] - 6.0 * self.dr * s) / (2.0 * h2);
                d2 / (1.0 + s * s) + self.drift[0] * s
            }
            End::Fixed => 0.0,
        };
        out[m - 1] = match self.upper {
            End::Slope(s) => {
                let d2 =
                    (8.0 * u[m - 2] - u[m - 3] - 7.0 * u[m - 1] + 6.0 * self.dr * s) / (2.0 * h2);
                d2 / (1.0 + s * s) + self.drift[m - 1] * s
            }
            _ => 0.0,
        };
    }

    /// Jacobian of the right-hand side: tridiagonal `(sub, diag, sup)` plus
    /// the couplings of the first row to `u₂` and of the last row to
    /// `u_{m−3}` from the slope stencils.
    fn jacobian(&self, u: &[f64]) -> Jacobian {
        let m = u.len();
        let h = self.dr;
        let h2 = h * h;
        let n = f64::from(self.config.n);
        let (mut a, mut b, mut c) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut far = [0.0; 2];
        for i in 1..m - 1 {
            let p = (u[i + 1] - u[i - 1]) / (2.0 * h);
            let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
            let w2 = 1.0 + p * p;
            let coef = 1.0 / w2;
            let dcoef = -2.0 * p / (w2 * w2);
            let first = (dcoef * d2 + self.drift[i]) / (2.0 * h);
            a[i] = coef / h2 - first;
            b[i] = -2.0 * coef / h2;
            c[i] = coef / h2 + first;
        }
        match self.lower {
            End::Axis => {
                b[0] = -2.0 * n / h2;
                c[0] = 2.0 * n / h2;
            }
            End::Slope(s) => {
                let coef = 0.5 / ((1.0 + s * s) * h2);
                b[0] = -7.0 * coef;
                c[0] = 8.0 * coef;
                far[0] = -coef;
            }
            End::Fixed => {}
        }
        if let End::Slope(s) = self.upper {
            let coef = 0.5 / ((1.0 + s * s) * h2);
            a[m - 1] = 8.0 * coef;
            b[m - 1] = -7.0 * coef;
            far[1] = -coef;
        }
        Jacobian {
            sub: a,
            diag: b,
            sup: c,
            far,
        }
    }
}

/// Banded Jacobian of the discrete right-hand side.
struct Jacobian {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    /// `∂f₀/∂u₂` and `∂f_{m−1}/∂u_{m−3}`.
    far: [f64; 2],
}

/// Heights on the flow grid at flow time `tau`.
#[derive(Clone, Debug)]
pub struct GraphFlowState {
    setup: Arc<FlowSetup>,
    pub u: Vec<f64>,
    pub tau: f64,
}

impl GraphFlowState {
    pub fn new(setup: Arc<FlowSetup>, u: Vec<f64>, tau: f64) -> Result<Self> {
        if u.len() != setup.r.len() {
            return Err(SolitonError::InvalidParameter(format!(
                "expected {} heights, got {}",
                setup.r.len(),
                u.len()
            )));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(SolitonError::InvariantViolation(format!(
                "non-finite height at node {i}"
            )));
        }
        Ok(GraphFlowState { setup, u, tau })
    }

    pub fn setup(&self) -> &Arc<FlowSetup> {
        &self.setup
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.setup.r
    }

    pub fn config(&self) -> &FlowConfig {
        &self.setup.config
    }
}

/// Initial heights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialData {
    /// `u ≡ 0`.
    Flat,
    /// The translating soliton of the configuration, `u(0) = 0`.
    Soliton,
    /// `a·exp(−x²)`, `x = (r − center)/width`, added to the soliton or to
    /// the flat slice; mirrored through the axis on rotational grids.
    Bump {
        amplitude: f64,
        width: f64,
        center: f64,
        on_soliton: bool,
    },
    /// Heights at the grid nodes.
    Values { u: Vec<f64> },
}

/// Gaussian bump with peak `amplitude` at `center`.
pub fn bump(r: f64, amplitude: f64, width: f64, center: f64) -> f64 {
    let x = (r - center) / width;
    amplitude * (-x * x).exp()
}

/// Builds the initial state for `config`.
pub fn initial_state(config: &FlowConfig, data: &InitialData) -> Result<GraphFlowState> {
    let setup = config.build()?;
    let u = match data {
        InitialData::Flat => vec![0.0; setup.r.len()],
        InitialData::Soliton => config.soliton_on_grid()?.0,
        InitialData::Bump {
            amplitude,
            width,
            center,
            on_soliton,
        } => {
            if !(width.is_finite() && *width > 0.0 && amplitude.is_finite() && center.is_finite()) {
                return Err(SolitonError::InvalidParameter(format!(
                    "bump needs finite amplitude and centre and positive width, got ({amplitude}, {width}, {center})"
                )));
            }
            let base = if *on_soliton {
                config.soliton_on_grid()?.0
            } else {
                vec![0.0; setup.r.len()]
            };
            setup
                .r
                .iter()
                .zip(base)
                .map(|(&r, b)| {
                    // mirrored so the data stays even through the axis
                    let extra = if config.two_sided() || *center == 0.0 {
                        0.0
                    } else {
                        bump(-r, *amplitude, *width, *center)
                    };
                    b + bump(r, *amplitude, *width, *center) + extra
                })
                .collect()
        }
        InitialData::Values { u } => u.clone(),
    };
    GraphFlowState::new(setup, u, 0.0)
}

/// Nodal time derivatives `∂u/∂τ`.
pub fn flow_rhs(state: &GraphFlowState) -> Vec<f64> {
    let mut out = vec![0.0; state.u.len()];
    state.setup.rhs_into(&state.u, &mut out);
    out
}

/// Advances one step of size `dtau`.
pub fn step_flow(state: &GraphFlowState, dtau: f64, scheme: Scheme) -> Result<GraphFlowState> {
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "dtau must be positive, got {dtau}"
        )));
    }
    let setup = &state.setup;
    let u = match scheme {
        Scheme::Explicit => {
            let bound = setup.stability_bound();
            if dtau > bound * (1.0 + 1e-12) {
                return Err(SolitonError::Stability { dtau, bound });
            }
            heun(setup, &state.u, dtau)
        }
        Scheme::Implicit => backward_euler(setup, &state.u, dtau)?,
    };
    if u.iter().any(|v| !v.is_finite()) {
        return Err(SolitonError::StepFailure {
            at: state.tau,
            step: dtau,
        });
    }
    Ok(GraphFlowState {
        setup: Arc::clone(setup),
        u,
        tau: state.tau + dtau,
    })
}

fn heun(setup: &FlowSetup, u: &[f64], dt: f64) -> Vec<f64> {
    let m = u.len();
    let mut k1 = vec![0.0; m];
    setup.rhs_into(u, &mut k1);
    let pred: Vec<f64> = u.iter().zip(&k1).map(|(a, k)| a + dt * k).collect();
    let mut k2 = vec![0.0; m];
    setup.rhs_into(&pred, &mut k2);
    (0..m).map(|i| u[i] + 0.5 * dt * (k1[i] + k2[i])).collect()
}

fn residual(setup: &FlowSetup, u: &[f64], v: &[f64], dt: f64, work: &mut [f64]) -> Vec<f64> {
    setup.rhs_into(v, work);
    (0..u.len()).map(|i| v[i] - u[i] - dt * work[i]).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn backward_euler(setup: &FlowSetup, u: &[f64], dt: f64) -> Result<Vec<f64>> {
    let m = u.len();
    let mut work = vec![0.0; m];
    let mut v = u.to_vec();
    let scale = 1.0 + max_abs(u);
    let mut g = residual(setup, u, &v, dt, &mut work);
    let mut norm = max_abs(&g);
    for iter in 0..NEWTON_MAX_ITER {
        if norm <= NEWTON_TOL * scale {
            return Ok(v);
        }
        let jac = setup.jacobian(&v);
        let mut sub: Vec<f64> = jac.sub.iter().map(|x| -dt * x).collect();
        let mut diag: Vec<f64> = jac.diag.iter().map(|x| 1.0 - dt * x).collect();
        let mut sup: Vec<f64> = jac.sup.iter().map(|x| -dt * x).collect();
        let mut rhs = g.clone();
        // fold the far couplings into the tridiagonal band using rows 1 and m−2
        let far0 = -dt * jac.far[0];
        if far0 != 0.0 && sup[1] != 0.0 {
            let k = far0 / sup[1];
            diag[0] -= k * sub[1];
            sup[0] -= k * diag[1];
            rhs[0] -= k * rhs[1];
        }
        let far1 = -dt * jac.far[1];
        if far1 != 0.0 && sub[m - 2] != 0.0 {
            let k = far1 / sub[m - 2];
            sub[m - 1] -= k * diag[m - 2];
            diag[m - 1] -= k * sup[m - 2];
            rhs[m - 1] -= k * rhs[m - 2];
        }
        let delta = thomas(&sub, &diag, &sup, &rhs).ok_or(SolitonError::NewtonDivergence {
            iterations: iter,
            residual: norm,
        })?;
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(x, d)| x - alpha * d).collect();
            let g_trial = residual(setup, u, &trial, dt, &mut work);
            let n_trial = max_abs(&g_trial);
            if n_trial < norm || alpha < 1.0 / 64.0 {
                v = trial;
                g = g_trial;
                norm = n_trial;
                break;
            }
            alpha *= 0.5;
        }
        if !norm.is_finite() {
            break;
        }
    }
    if norm <= NEWTON_TOL * scale {
        Ok(v)
    } else {
        Err(SolitonError::NewtonDivergence {
            iterations: NEWTON_MAX_ITER,
            residual: norm,
        })
    }
}

/// Solves a tridiagonal system; `None` on a zero pivot.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    cp[0] = sup[0] / denom;
    dp[0] = rhs[0] / denom;
    for i in 1..m {
        denom = diag[i] - sub[i] * cp[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        cp[i] = sup[i] / denom;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = dp[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Some(x)
}

fn weights(state: &GraphFlowState) -> (Vec<f64>, Vec<f64>) {
    let setup = &state.setup;
    let c = setup.config.c;
    let p = setup.slopes(&state.u);
    let w: Vec<f64> = p.iter().map(|x| x.hypot(1.0)).collect();
    let k: Vec<f64> = state
        .u
        .iter()
        .map(|u| (c * u - c * c * state.tau).exp())
        .collect();
    (w, k)
}

/// `F = |𝕊^{n−1}| ∫ exp(c·u − c²τ) W ξ^{n−1} dr` by composite Simpson.
pub fn weighted_functional(state: &GraphFlowState) -> f64 {
    let setup = &state.setup;
    let (w, k) = weights(state);
    let f: Vec<f64> = (0..w.len())
        .map(|i| k[i] * w[i] * setup.density[i])
        .collect();
    setup.area * simpson(&f, setup.dr)
}

/// `D = |𝕊^{n−1}| ∫ exp(c·u − c²τ) (H − c/W)² W ξ^{n−1} dr` with
/// `H = (∂u/∂τ)/W`.
pub fn soliton_defect(state: &GraphFlowState) -> f64 {
    let setup = &state.setup;
    let c = setup.config.c;
    let (w, k) = weights(state);
    let rhs = flow_rhs(state);
    let f: Vec<f64> = (0..w.len())
        .map(|i| k[i] * (rhs[i] - c).powi(2) / w[i] * setup.density[i])
        .collect();
    setup.area * simpson(&f, setup.dr)
}

/// Boundary term of the truncated monotonicity identity,
/// `[|𝕊^{n−1}| K (u′/W) ξ^{n−1} (∂u/∂τ − c)]` upper end minus lower end.
pub fn boundary_flux(state: &GraphFlowState) -> f64 {
    let setup = &state.setup;
    let c = setup.config.c;
    let (w, k) = weights(state);
    let p = setup.slopes(&state.u);
    let rhs = flow_rhs(state);
    let m = w.len();
    let term = |i: usize| k[i] * p[i] / w[i] * setup.density[i] * (rhs[i] - c);
    let lower = if setup.lower == End::Axis {
        0.0
    } else {
        term(0)
    };
    setup.area * (term(m - 1) - lower)
}

/// Time stepping parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub dtau: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    /// Keep a snapshot every this many steps (0: first and last only).
    pub snapshot_every: usize,
}

impl FlowOptions {
    pub fn new(dtau: f64, horizon: f64, scheme: Scheme) -> Self {
        FlowOptions {
            dtau,
            horizon,
            scheme,
            snapshot_every: 0,
        }
    }
}

/// Samples of `F`, `D` and the boundary term at every step, plus
/// snapshots.
#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub tau: Vec<f64>,
    pub f_values: Vec<f64>,
    pub defect_values: Vec<f64>,
    pub boundary_flux: Vec<f64>,
    pub snapshots: Vec<GraphFlowState>,
}

impl FlowTrajectory {
    fn record(&mut self, s: &GraphFlowState) {
        self.tau.push(s.tau);
        self.f_values.push(weighted_functional(s));
        self.defect_values.push(soliton_defect(s));
        self.boundary_flux.push(boundary_flux(s));
    }

    /// `dF/dτ` by centred differences inside and second-order one-sided
    /// differences at the ends (uniform steps assumed).
    pub fn df_dtau(&self) -> Vec<f64> {
        let m = self.tau.len();
        let f = &self.f_values;
        let t = &self.tau;
        if m < 3 {
            return vec![f64::NAN; m];
        }
        let mut out = vec![0.0; m];
        for i in 1..m - 1 {
            out[i] = (f[i + 1] - f[i - 1]) / (t[i + 1] - t[i - 1]);
        }
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (t[2] - t[0]);
        out[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (t[m - 1] - t[m - 3]);
        out
    }

    /// `|dF/dτ + D|` at the interior samples.
    pub fn monotonicity_residuals(&self) -> Vec<f64> {
        let d = self.df_dtau();
        (1..self.tau.len().saturating_sub(1))
            .map(|i| (d[i] + self.defect_values[i]).abs())
            .collect()
    }

    /// Largest increase of `F` between consecutive samples (0 when
    /// non-increasing).
    pub fn max_increase(&self) -> f64 {
        self.f_values
            .windows(2)
            .fold(0.0, |m, w| m.max(w[1] - w[0]))
    }

    pub fn last(&self) -> &GraphFlowState {
        self.snapshots
            .last()
            .expect("the final state is always kept")
    }
}

/// Runs the flow to `opts.horizon` with `⌈horizon/dtau⌉` equal steps.
pub fn run_flow(initial: &GraphFlowState, opts: &FlowOptions) -> Result<FlowTrajectory> {
    if !(opts.horizon.is_finite() && opts.horizon > 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "horizon must be positive, got {}",
            opts.horizon
        )));
    }
    if !(opts.dtau.is_finite() && opts.dtau > 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "dtau must be positive, got {}",
            opts.dtau
        )));
    }
    let steps = (opts.horizon / opts.dtau * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = opts.horizon / steps as f64;
    let mut traj = FlowTrajectory {
        tau: Vec::with_capacity(steps + 1),
        f_values: Vec::with_capacity(steps + 1),
        defect_values: Vec::with_capacity(steps + 1),
        boundary_flux: Vec::with_capacity(steps + 1),
        snapshots: vec![initial.clone()],
    };
    traj.record(initial);
    let t0 = initial.tau;
    let mut state = initial.clone();
    for k in 1..=steps {
        let mut next = step_flow(&state, dt, opts.scheme)?;
        next.tau = t0 + dt * k as f64;
        traj.record(&next);
        if k == steps || (opts.snapshot_every > 0 && k % opts.snapshot_every == 0) {
            traj.snapshots.push(next.clone());
        }
        state = next;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(c: f64, n: u32, nodes: usize) -> FlowConfig {
        FlowConfig::new(c, n, WarpModel::euclidean()).with_grid(2.0, nodes)
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1), 2.0);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn constant_is_static() {
        let st = initial_state(
            &euclid(0.0, 2, 41),
            &InitialData::Values { u: vec![3.0; 41] },
        )
        .unwrap();
        assert!(flow_rhs(&st).iter().all(|v| *v == 0.0));
        let next = step_flow(&st, 1e-4, Scheme::Explicit).unwrap();
        assert_eq!(next.u, st.u);
    }

    #[test]
    fn parabola_axis_speed() {
        let cfg = euclid(1.0, 2, 201);
        let setup = cfg.build().unwrap();
        let u: Vec<f64> = setup.r_grid().iter().map(|r| r * r / 4.0).collect();
        let st = GraphFlowState::new(setup, u, 0.0).unwrap();
        assert!((flow_rhs(&st)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_ball_volume() {
        let st = initial_state(&euclid(0.0, 2, 101), &InitialData::Flat).unwrap();
        assert!((weighted_functional(&st) - PI * 4.0).abs() < 1e-12);
        let st = initial_state(&euclid(0.0, 3, 101), &InitialData::Flat).unwrap();
        assert!((weighted_functional(&st) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn flat_defect_is_c_squared_f() {
        let cfg = euclid(0.7, 2, 101).with_boundary(BoundaryCondition::Dirichlet);
        let st = initial_state(&cfg, &InitialData::Flat).unwrap();
        let f = weighted_functional(&st);
        let d = soliton_defect(&st);
        assert!((d - 0.49 * f).abs() < 1e-12 * f);
    }

    #[test]
    fn explicit_stability_guard() {
        let st = initial_state(&euclid(0.0, 3, 41), &InitialData::Flat).unwrap();
        let bound = st.setup().stability_bound();
        assert!(matches!(
            step_flow(&st, 1.01 * bound, Scheme::Explicit),
            Err(SolitonError::Stability { .. })
        ));
        assert!(step_flow(&st, 50.0 * bound, Scheme::Implicit).is_ok());
    }

    #[test]
    fn implicit_matches_explicit_on_bump() {
        let cfg = euclid(0.0, 2, 81);
        let data = InitialData::Bump {
            amplitude: 0.3,
            width: 1.0,
            center: 0.0,
            on_soliton: false,
        };
        let st = initial_state(&cfg, &data).unwrap();
        let dt = st.setup().stability_bound();
        let mut e = st.clone();
        let mut i = st.clone();
        for _ in 0..200 {
            e = step_flow(&e, dt, Scheme::Explicit).unwrap();
            i = step_flow(&i, dt, Scheme::Implicit).unwrap();
        }
        let diff =
            e.u.iter()
                .zip(&i.u)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-3, "{diff}");
    }

    #[test]
    fn thomas_solves() {
        let sub = [0.0, 1.0, 1.0];
        let diag = [4.0, 4.0, 4.0];
        let sup = [1.0, 1.0, 0.0];
        let x = thomas(&sub, &diag, &sup, &[5.0, 6.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_matches_differences() {
        let cfg = FlowConfig::new(1.0, 3, WarpModel::hyperbolic(-1.0).unwrap())
            .with_grid(1.0, 11)
            .with_boundary(BoundaryCondition::Neumann { slope: 0.4 });
        let setup = cfg.build().unwrap();
        let u: Vec<f64> = setup
            .r_grid()
            .iter()
            .map(|r| (1.3 * r).sin() + r * r)
            .collect();
        let jac = setup.jacobian(&u);
        let (a, b, c) = (&jac.sub, &jac.diag, &jac.sup);
        let m = u.len();
        let mut base = vec![0.0; m];
        setup.rhs_into(&u, &mut base);
        let h = 1e-6;
        for j in 0..m {
            let mut up = u.clone();
            up[j] += h;
            let mut f = vec![0.0; m];
            setup.rhs_into(&up, &mut f);
            for i in 0..m {
                let fd = (f[i] - base[i]) / h;
                let exact = if i == j {
                    b[i]
                } else if j + 1 == i {
                    a[i]
                } else if i + 1 == j {
                    c[i]
                } else if i == 0 && j == 2 {
                    jac.far[0]
                } else if i == m - 1 && j == m - 3 {
                    jac.far[1]
                } else {
                    0.0
                };
                assert!(
                    (fd - exact).abs() < 1e-3 * (1.0 + exact.abs()),
                    "{i} {j}: {fd} vs {exact}"
                );
            }
        }
    }
}
