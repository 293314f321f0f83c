//! Solitons written as graphs `t = u(r)` over a one-parameter foliation of
//! the base: geodesic spheres (bowls), horospheres (ideal solitons) and
//! equidistant hypersurfaces (grim reapers).
//!
//! Near `r = ∞` in a hyperbolic base the bowl slope `u′` approaches
//! `(c/(n−1)) ξ/ξ′` up to terms of size `e^{−2r}`. The radial solver
//! therefore integrates the deviation `ψ = u′ − (c/(n−1)) ξ/ξ′` instead of
//! `u′`, which keeps that deviation resolvable in double precision.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::ode::{bisect, integrate, DenseSolution, OdeOptions, Outcome};
use crate::profile::SolitonSpec;
use crate::warp::{WarpKind, WarpModel};

/// Slope magnitude that triggers gradient blow-up detection.
pub const BLOWUP_SLOPE: f64 = 1e6;

/// Radius at which bowl graphs leave the axis series.
pub const RADIAL_LAUNCH: f64 = 1e-4;

/// Offset from `r = 0` at which grim reapers with `n ≥ 3` are launched.
pub const GRIM_LAUNCH: f64 = 1e-3;

/// Which foliation the graph coordinate `r` measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Polar,
    Busemann,
    Equidistant,
}

impl Chart {
    pub fn from_kind(kind: WarpKind) -> Self {
        match kind {
            WarpKind::Rotational => Chart::Polar,
            WarpKind::Busemann => Chart::Busemann,
            WarpKind::Equidistant => Chart::Equidistant,
        }
    }
}

/// The second-order equation a graph satisfies, `u″ = F(r, u′)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphEquation {
    /// `u″ = (1+u′²)(c − Δr·u′)` with `Δr` the level mean curvature.
    /// Covers bowls, horosphere-foliated solitons and grim reapers.
    Soliton,
    /// `u″ = (c − (n−1)ξ′/ξ)(1+u′²)`, the constant-angle reduction used for
    /// ideal solitons with closed-form solutions.
    IdealReduced,
}

impl GraphEquation {
    /// `u″` prescribed by the equation.
    pub fn second_derivative(&self, spec: &SolitonSpec, r: f64, du: f64) -> f64 {
        let w2 = 1.0 + du * du;
        let drift = if spec.n > 1 {
            spec.warp.drift_coefficient(r, spec.n)
        } else {
            0.0
        };
        match self {
            GraphEquation::Soliton => {
                let bend = if du == 0.0 { 0.0 } else { drift * du };
                w2 * (spec.c - bend)
            }
            GraphEquation::IdealReduced => w2 * (spec.c - drift),
        }
    }
}

/// `r ↦ [u, u′, u″]`, `None` outside the solved range.
pub type GraphEval = Arc<dyn Fn(f64) -> Option<[f64; 3]> + Send + Sync>;

/// Where a solve detected a vertical tangent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientBlowup {
    /// Radius at which `|u′|` crossed [`BLOWUP_SLOPE`].
    pub r_detect: f64,
    /// Extrapolated radius of the vertical point.
    pub radius: f64,
    /// Direction of integration, `+1` or `−1`.
    pub direction: f64,
}

/// A graph `u(r)` with node samples and a dense evaluator.
#[derive(Clone)]
pub struct RadialGraph {
    pub spec: SolitonSpec,
    pub chart: Chart,
    pub equation: GraphEquation,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub blowups: Vec<GradientBlowup>,
    eval: GraphEval,
}

impl fmt::Debug for RadialGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGraph")
            .field("spec", &self.spec.describe())
            .field("chart", &self.chart)
            .field("nodes", &self.r.len())
            .field("range", &self.r_range())
            .field("blowups", &self.blowups)
            .finish()
    }
}

impl RadialGraph {
    pub(crate) fn from_parts(
        spec: SolitonSpec,
        chart: Chart,
        r: Vec<f64>,
        u: Vec<f64>,
        du: Vec<f64>,
        eval: GraphEval,
    ) -> Result<Self> {
        if r.len() < 2 || r.len() != u.len() || r.len() != du.len() {
            return Err(SolitonError::InvalidParameter(
                "graph needs at least two consistent samples".into(),
            ));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SolitonError::InvariantViolation(
                "graph radii must be strictly increasing".into(),
            ));
        }
        Ok(RadialGraph {
            spec,
            chart,
            equation: GraphEquation::Soliton,
            r,
            u,
            du,
            blowups: Vec::new(),
            eval,
        })
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    /// `[u, u′, u″]` at `r`.
    pub fn eval(&self, r: f64) -> Option<[f64; 3]> {
        (self.eval)(r)
    }

    /// Residual `u″ − F(r, u′)` of the graph equation, divided by `1+u′²`.
    pub fn residual(&self, r: f64) -> Option<f64> {
        let [_, du, ddu] = self.eval(r)?;
        let rhs = self.equation.second_derivative(&self.spec, r, du);
        Some((ddu - rhs) / (1.0 + du * du))
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Initial condition `u(r0) = u0`, `u′(r0) = du0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphIc {
    pub r0: f64,
    pub u0: f64,
    pub du0: f64,
}

impl GraphIc {
    pub fn new(r0: f64, u0: f64, du0: f64) -> Self {
        GraphIc { r0, u0, du0 }
    }
}

/// How the second state component maps to the slope.
#[derive(Clone)]
enum SlopeMap {
    /// State is `(u, u′)`.
    Plain,
    /// State is `(u, ψ)` with `u′ = k g(r) + ψ`, `g = ξ/ξ′`.
    Psi { k: f64, warp: WarpModel },
}

impl SlopeMap {
    fn slope(&self, r: f64, w: f64) -> f64 {
        match self {
            SlopeMap::Plain => w,
            SlopeMap::Psi { k, warp } => k * warp.inverse_log_derivative(r) + w,
        }
    }

    fn slope_rate(&self, r: f64, dw: f64) -> f64 {
        match self {
            SlopeMap::Plain => dw,
            SlopeMap::Psi { k, warp } => k * warp.ratio_derivative(r) + dw,
        }
    }

    fn state_from_slope(&self, r: f64, du: f64) -> f64 {
        match self {
            SlopeMap::Plain => du,
            SlopeMap::Psi { k, warp } => du - k * warp.inverse_log_derivative(r),
        }
    }
}

/// Quadratic Taylor piece `u0 + ½ k (r − center)²` used across a singular
/// launch point.
#[derive(Clone, Copy)]
struct SeriesPiece {
    lo: f64,
    hi: f64,
    center: f64,
    u0: f64,
    k: f64,
}

impl SeriesPiece {
    fn contains(&self, r: f64) -> bool {
        r >= self.lo && r <= self.hi
    }

    fn eval(&self, r: f64) -> [f64; 3] {
        let x = r - self.center;
        [self.u0 + 0.5 * self.k * x * x, self.k * x, self.k]
    }
}

struct Piece {
    dense: DenseSolution<2>,
    map: SlopeMap,
}

struct Assembly {
    pieces: Vec<Piece>,
    series: Option<SeriesPiece>,
    blowups: Vec<GradientBlowup>,
}

fn run_piece<F>(
    rhs: F,
    map: &SlopeMap,
    r0: f64,
    y0: [f64; 2],
    r_end: f64,
    opts: &OdeOptions,
) -> Result<(Piece, Option<GradientBlowup>)>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let dir = if r_end >= r0 { 1.0 } else { -1.0 };
    let out = integrate(&rhs, r0, y0, r_end, opts, |r, y| {
        (map.slope(r, y[1]).abs() > BLOWUP_SLOPE).then_some(())
    })?;
    let mut dense = out.solution;
    let blowup = match out.outcome {
        Outcome::Completed => None,
        Outcome::StepFailure { t, h } => {
            return Err(SolitonError::StepFailure { at: t, step: h });
        }
        Outcome::Stopped { t: r_stop, .. } => {
            let nodes = dense.nodes();
            let m = nodes.len();
            let (a, b) = if dir > 0.0 {
                (nodes[m - 2].0, nodes[m - 1].0)
            } else {
                (nodes[1].0, nodes[0].0)
            };
            let excess = |r: f64| {
                dense
                    .eval(r)
                    .map_or(f64::NAN, |y| map.slope(r, y[1]).abs() - BLOWUP_SLOPE)
            };
            let rc = bisect(excess, a, b, 1e-15).unwrap_or(r_stop);
            let yc = dense.eval(rc).expect("inside last step");
            let du = map.slope(rc, yc[1]);
            let ddu = map.slope_rate(rc, rhs(rc, &yc)[1]);
            let growth = (ddu / (1.0 + du * du)).abs();
            let radius = rc + dir * (1.0 / du.abs()).atan() / growth;
            let (lo, hi) = dense.t_range();
            if dir > 0.0 {
                let ylo = dense.eval(lo).expect("start");
                dense.truncate_to(lo, rc, ylo, yc);
            } else {
                let yhi = dense.eval(hi).expect("start");
                dense.truncate_to(rc, hi, yc, yhi);
            }
            Some(GradientBlowup {
                r_detect: rc,
                radius,
                direction: dir,
            })
        }
    };
    Ok((
        Piece {
            dense,
            map: map.clone(),
        },
        blowup,
    ))
}

/// Integrates from `r0` towards both ends of `span` (skipping empty sides).
fn run_both<F>(
    rhs: F,
    map: &SlopeMap,
    r0: f64,
    y0: [f64; 2],
    span: (f64, f64),
    opts: &OdeOptions,
) -> Result<Assembly>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let mut asm = Assembly {
        pieces: Vec::new(),
        series: None,
        blowups: Vec::new(),
    };
    if span.0 < r0 {
        let (p, b) = run_piece(&rhs, map, r0, y0, span.0, opts)?;
        asm.pieces.push(p);
        asm.blowups.extend(b);
    }
    if span.1 > r0 {
        let (p, b) = run_piece(&rhs, map, r0, y0, span.1, opts)?;
        asm.pieces.push(p);
        asm.blowups.extend(b);
    }
    Ok(asm)
}

fn assemble(spec: &SolitonSpec, equation: GraphEquation, asm: Assembly) -> Result<RadialGraph> {
    let mut samples: Vec<(f64, f64, f64)> = Vec::new();
    for piece in &asm.pieces {
        for (r, y) in piece.dense.nodes() {
            samples.push((*r, y[0], piece.map.slope(*r, y[1])));
        }
    }
    if let Some(s) = asm.series {
        for r in [s.lo, s.center, s.hi] {
            let [u, du, _] = s.eval(r);
            samples.push((r, u, du));
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|a, b| a.0 == b.0);

    let Assembly {
        pieces,
        series,
        blowups,
    } = asm;
    let eval: GraphEval = Arc::new(move |r: f64| {
        if let Some(s) = series {
            if s.contains(r) {
                return Some(s.eval(r));
            }
        }
        pieces.iter().find_map(|p| {
            let [y, dy, _] = p.dense.jet(r)?;
            Some([y[0], p.map.slope(r, y[1]), p.map.slope_rate(r, dy[1])])
        })
    });
    let mut graph = RadialGraph::from_parts(
        spec.clone(),
        Chart::from_kind(spec.warp.kind()),
        samples.iter().map(|x| x.0).collect(),
        samples.iter().map(|x| x.1).collect(),
        samples.iter().map(|x| x.2).collect(),
        eval,
    )?;
    graph.equation = equation;
    graph.blowups = blowups;
    Ok(graph)
}

fn check_span(span: (f64, f64), ic: &GraphIc) -> Result<()> {
    if !(span.0 <= ic.r0 && ic.r0 <= span.1 && span.0 < span.1) {
        return Err(SolitonError::InvalidParameter(format!(
            "initial radius {} must lie in the span [{}, {}]",
            ic.r0, span.0, span.1
        )));
    }
    if ![span.0, span.1, ic.u0, ic.du0]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(SolitonError::InvalidParameter(
            "non-finite span or initial data".into(),
        ));
    }
    Ok(())
}

/// Plain `(u, u′)` right-hand side for `u″ = F(r, u′)`.
fn plain_rhs<'a>(
    spec: &'a SolitonSpec,
    equation: GraphEquation,
) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + 'a {
    move |r, y| [y[1], equation.second_derivative(spec, r, y[1])]
}

/// Bowl-type graph over geodesic spheres:
/// `u″/(1+u′²) + (n−1)(ξ′/ξ) u′ = c`.
///
/// With `ic.r0 = 0` the solve starts on the axis (requires `du0 = 0`) from
/// the series `u = u0 + (c/(2n)) r²`.
pub fn solve_radial_graph(
    spec: &SolitonSpec,
    r_span: (f64, f64),
    ic: GraphIc,
    opts: &OdeOptions,
) -> Result<RadialGraph> {
    if spec.warp.kind() != WarpKind::Rotational {
        return Err(SolitonError::Incompatible(format!(
            "radial graphs need a rotational warp, got `{}`",
            spec.warp.label()
        )));
    }
    check_span(r_span, &ic)?;
    if spec.n == 1 {
        let rhs = plain_rhs(spec, GraphEquation::Soliton);
        let asm = run_both(rhs, &SlopeMap::Plain, ic.r0, [ic.u0, ic.du0], r_span, opts)?;
        return assemble(spec, GraphEquation::Soliton, asm);
    }
    if r_span.0 < 0.0 {
        return Err(SolitonError::OutsideDomain {
            r: r_span.0,
            label: spec.warp.label().to_string(),
        });
    }
    let nm1 = f64::from(spec.n - 1);
    let k = spec.c / nm1;
    let map = SlopeMap::Psi {
        k,
        warp: spec.warp.clone(),
    };
    let warp = &spec.warp;
    let c = spec.c;
    let rhs = move |r: f64, y: &[f64; 2]| {
        let g = warp.inverse_log_derivative(r);
        let du = k * g + y[1];
        let bend = if y[1] == 0.0 { 0.0 } else { nm1 * y[1] / g };
        [du, -bend * (1.0 + du * du) - k * warp.ratio_derivative(r)]
    };
    if ic.r0 == 0.0 {
        if ic.du0 != 0.0 {
            return Err(SolitonError::InvalidParameter(
                "a graph through the axis must have u′(0) = 0".into(),
            ));
        }
        let a = c / f64::from(spec.n);
        let r1 = RADIAL_LAUNCH.min(r_span.1);
        let series = SeriesPiece {
            lo: 0.0,
            hi: r1,
            center: 0.0,
            u0: ic.u0,
            k: a,
        };
        let [u1, du1, _] = series.eval(r1);
        let mut asm = run_both(
            rhs,
            &map,
            r1,
            [u1, map.state_from_slope(r1, du1)],
            (r1, r_span.1),
            opts,
        )?;
        asm.series = Some(series);
        return assemble(spec, GraphEquation::Soliton, asm);
    }
    if r_span.0 < RADIAL_LAUNCH {
        return Err(SolitonError::Singular {
            quantity: "ξ′/ξ",
            r: r_span.0,
        });
    }
    let y0 = [ic.u0, map.state_from_slope(ic.r0, ic.du0)];
    let asm = run_both(rhs, &map, ic.r0, y0, r_span, opts)?;
    assemble(spec, GraphEquation::Soliton, asm)
}

fn require_busemann(spec: &SolitonSpec) -> Result<()> {
    if spec.warp.kind() != WarpKind::Busemann {
        return Err(SolitonError::Incompatible(format!(
            "ideal solitons need a busemann warp, got `{}`",
            spec.warp.label()
        )));
    }
    Ok(())
}

/// Ideal soliton graph in the reduced form
/// `u″ = (c − (n−1)ξ′/ξ)(1+u′²)`; vertical points are recorded in
/// [`RadialGraph::blowups`].
pub fn solve_ideal_graph(
    spec: &SolitonSpec,
    r_span: (f64, f64),
    ic: GraphIc,
    opts: &OdeOptions,
) -> Result<RadialGraph> {
    require_busemann(spec)?;
    check_span(r_span, &ic)?;
    let eq = GraphEquation::IdealReduced;
    let asm = run_both(
        plain_rhs(spec, eq),
        &SlopeMap::Plain,
        ic.r0,
        [ic.u0, ic.du0],
        r_span,
        opts,
    )?;
    assemble(spec, eq, asm)
}

/// Horosphere-foliated soliton graph
/// `u″ = (1+u′²)(c − (n−1)(ξ′/ξ) u′)`, the graph form of the profile
/// system in a Busemann chart.
pub fn solve_horosphere_graph(
    spec: &SolitonSpec,
    r_span: (f64, f64),
    ic: GraphIc,
    opts: &OdeOptions,
) -> Result<RadialGraph> {
    require_busemann(spec)?;
    check_span(r_span, &ic)?;
    let eq = GraphEquation::Soliton;
    let asm = run_both(
        plain_rhs(spec, eq),
        &SlopeMap::Plain,
        ic.r0,
        [ic.u0, ic.du0],
        r_span,
        opts,
    )?;
    assemble(spec, eq, asm)
}

/// Grim reaper graph over hypersurfaces equidistant to a geodesic:
/// `u″ = (1+u′²)(c − Δr·u′)`.
///
/// For `n ≥ 3` the coefficient `Δr` has a `(n−2)/r` singularity at `r = 0`;
/// a solve through `r = 0` must have `du0 = 0` there and is launched at
/// `±10⁻³` from the series `u = u0 + c r²/(2(n−1))`.
pub fn solve_grim(
    spec: &SolitonSpec,
    r_span: (f64, f64),
    ic: GraphIc,
    opts: &OdeOptions,
) -> Result<RadialGraph> {
    if spec.warp.kind() != WarpKind::Equidistant {
        return Err(SolitonError::Incompatible(format!(
            "grim reapers need an equidistant warp, got `{}`",
            spec.warp.label()
        )));
    }
    check_span(r_span, &ic)?;
    let eq = GraphEquation::Soliton;
    let rhs = plain_rhs(spec, eq);
    if spec.n <= 2 {
        let asm = run_both(rhs, &SlopeMap::Plain, ic.r0, [ic.u0, ic.du0], r_span, opts)?;
        return assemble(spec, eq, asm);
    }
    let crosses_axis = r_span.0 < 0.0 && r_span.1 > 0.0;
    if ic.r0 == 0.0 || crosses_axis {
        if ic.r0 != 0.0 {
            return Err(SolitonError::Singular {
                quantity: "χ′/χ",
                r: 0.0,
            });
        }
        if ic.du0 != 0.0 {
            return Err(SolitonError::InvalidParameter(
                "a grim reaper through r = 0 must have u′(0) = 0 when n ≥ 3".into(),
            ));
        }
        let k = spec.c / f64::from(spec.n - 1);
        let lo = (-GRIM_LAUNCH).max(r_span.0);
        let hi = GRIM_LAUNCH.min(r_span.1);
        let series = SeriesPiece {
            lo,
            hi,
            center: 0.0,
            u0: ic.u0,
            k,
        };
        let mut asm = Assembly {
            pieces: Vec::new(),
            series: Some(series),
            blowups: Vec::new(),
        };
        for (start, end) in [(lo, r_span.0), (hi, r_span.1)] {
            if start != end {
                let [u, du, _] = series.eval(start);
                let (p, b) = run_piece(&rhs, &SlopeMap::Plain, start, [u, du], end, opts)?;
                asm.pieces.push(p);
                asm.blowups.extend(b);
            }
        }
        return assemble(spec, eq, asm);
    }
    let asm = run_both(rhs, &SlopeMap::Plain, ic.r0, [ic.u0, ic.du0], r_span, opts)?;
    assemble(spec, eq, asm)
}

/// Closed-form graphs used as independent references.
pub mod oracle {
    use std::f64::consts::FRAC_PI_2;

    use serde::{Deserialize, Serialize};

    use crate::error::{Result, SolitonError};

    #[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
    #[serde(tag = "kind", rename_all = "snake_case")]
    pub enum ClosedForm {
        /// `u = −(1/c) ln cos(c r)`, the grim reaper of `u″ = c(1+u′²)`.
        GrimN1 { c: f64 },
        /// Solution of `u″ = a(1+u′²)` with `u(r0) = u0`, `u′(r0) = du0`:
        /// `u′ = tan(a(r−r0) + θ0)`, `θ0 = arctan du0`.
        IdealConstCoeff { a: f64, r0: f64, u0: f64, du0: f64 },
        /// `u = u0 + m r`.
        Line { m: f64, u0: f64 },
    }

    impl ClosedForm {
        pub fn grim_n1(c: f64) -> Result<Self> {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SolitonError::InvalidParameter(format!(
                    "grim reaper speed must be positive, got {c}"
                )));
            }
            Ok(ClosedForm::GrimN1 { c })
        }

        pub fn ideal_const_coeff(a: f64, r0: f64, u0: f64, du0: f64) -> Result<Self> {
            if ![a, r0, u0, du0].iter().all(|v| v.is_finite()) {
                return Err(SolitonError::InvalidParameter(
                    "non-finite closed-form parameter".into(),
                ));
            }
            if a == 0.0 {
                return Ok(ClosedForm::Line {
                    m: du0,
                    u0: u0 - du0 * r0,
                });
            }
            Ok(ClosedForm::IdealConstCoeff { a, r0, u0, du0 })
        }

        pub fn line(m: f64, u0: f64) -> Self {
            ClosedForm::Line { m, u0 }
        }

        /// Open interval of existence.
        pub fn interval(&self) -> (f64, f64) {
            match *self {
                ClosedForm::GrimN1 { c } => (-FRAC_PI_2 / c, FRAC_PI_2 / c),
                ClosedForm::IdealConstCoeff { a, r0, du0, .. } => {
                    let th = du0.atan();
                    let lo = r0 + (-FRAC_PI_2 - th) / a;
                    let hi = r0 + (FRAC_PI_2 - th) / a;
                    (lo.min(hi), lo.max(hi))
                }
                ClosedForm::Line { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            }
        }

        /// The middle `fraction` of the interval of existence.
        pub fn core_interval(&self, fraction: f64) -> (f64, f64) {
            let (lo, hi) = self.interval();
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo) * fraction;
            (mid - half, mid + half)
        }

        /// `[u, u′]` at `r`.
        pub fn eval(&self, r: f64) -> Result<[f64; 2]> {
            let (lo, hi) = self.interval();
            if !(r > lo && r < hi) {
                return Err(SolitonError::InvalidParameter(format!(
                    "r = {r} outside the closed-form interval ({lo}, {hi})"
                )));
            }
            Ok(match *self {
                ClosedForm::GrimN1 { c } => {
                    let x = c * r;
                    [-x.cos().ln() / c, x.tan()]
                }
                ClosedForm::IdealConstCoeff { a, r0, u0, du0 } => {
                    let th = du0.atan();
                    let x = a * (r - r0) + th;
                    [u0 - (x.cos().ln() - th.cos().ln()) / a, x.tan()]
                }
                ClosedForm::Line { m, u0 } => [u0 + m * r, m],
            })
        }

        /// Radius of the vertical point reached moving in `direction`.
        pub fn blowup_radius(&self, direction: f64) -> Option<f64> {
            let (lo, hi) = self.interval();
            let r = if direction > 0.0 { hi } else { lo };
            r.is_finite().then_some(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::ClosedForm;
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn opts() -> OdeOptions {
        OdeOptions::default()
    }

    #[test]
    fn oracle_examples() {
        let g = ClosedForm::grim_n1(2.0).unwrap();
        let [u, _] = g.eval(0.5).unwrap();
        assert!((u - 0.307_813_3).abs() < 1e-7);
        assert!(g.eval(FRAC_PI_2 / 2.0).is_err());
        let i = ClosedForm::ideal_const_coeff(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(i.eval(0.0).unwrap(), [0.0, 0.0]);
        assert_eq!(ClosedForm::line(1.0, 0.0).eval(2.0).unwrap(), [2.0, 1.0]);
        assert!(ClosedForm::grim_n1(0.0).is_err());
    }

    #[test]
    fn n1_radial_graph_is_log_cos() {
        let spec = SolitonSpec::bowl(1.0, 1, WarpModel::euclidean()).unwrap();
        let g =
            solve_radial_graph(&spec, (-1.4, 1.4), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
        for r in [-1.3, -0.5, 0.0, 0.7, 1.4] {
            let [u, du, _] = g.eval(r).unwrap();
            assert!((u + r.cos().ln()).abs() < 1e-9, "r={r}");
            assert!((du - r.tan()).abs() < 1e-8);
        }
    }

    #[test]
    fn euclidean_axis_curvature() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let g =
            solve_radial_graph(&spec, (0.0, 5.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
        let [_, _, ddu] = g.eval(0.0).unwrap();
        assert_eq!(ddu, 0.5);
        assert!(g.blowups.is_empty());
        for r in [0.01, 0.5, 2.0, 4.9] {
            assert!(g.residual(r).unwrap().abs() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn hyperbolic_bowl_slope_limit() {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::hyperbolic(-1.0).unwrap()).unwrap();
        let g =
            solve_radial_graph(&spec, (0.0, 10.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
        let [_, du, _] = g.eval(10.0).unwrap();
        assert!((du - 1.0).abs() < 1e-2);
        assert!(du < 10f64.tanh());
    }

    #[test]
    fn ideal_graph_blowup() {
        let bus = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
        let spec = SolitonSpec::ideal(2.0, 2, 0.0, bus).unwrap();
        let g =
            solve_ideal_graph(&spec, (-3.0, 3.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
        assert_eq!(g.blowups.len(), 2);
        for b in &g.blowups {
            assert!((b.radius.abs() - FRAC_PI_2).abs() < 1e-6, "{b:?}");
        }
        let [u, _, _] = g.eval(1.0).unwrap();
        assert!((u + 1f64.cos().ln()).abs() < 1e-8);
    }

    #[test]
    fn ideal_graph_degenerate_line() {
        let bus = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
        let spec = SolitonSpec::ideal(1.0, 2, 0.0, bus).unwrap();
        let g =
            solve_ideal_graph(&spec, (-5.0, 5.0), GraphIc::new(0.0, 0.0, 0.7), &opts()).unwrap();
        for (du, r) in g.du.iter().zip(&g.r) {
            assert!((du - 0.7).abs() < 1e-14, "r={r}");
        }
    }

    #[test]
    fn grim_h2_is_even() {
        let w = WarpModel::builtin(WarpKind::Equidistant, -1.0).unwrap();
        let spec = SolitonSpec::grim(1.0, 2, w).unwrap();
        let g = solve_grim(&spec, (-20.0, 20.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
        assert!(g.blowups.is_empty());
        for r in [0.5, 3.0, 11.0, 20.0] {
            let a = g.eval(r).unwrap();
            let b = g.eval(-r).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-8);
            assert!((a[1] + b[1]).abs() < 1e-8);
        }
        assert!((g.eval(20.0).unwrap()[1] - 1.0).abs() < 1e-2);
    }

    #[test]
    fn grim_h3_launch() {
        let w = WarpModel::builtin(WarpKind::Equidistant, -1.0).unwrap();
        let spec = SolitonSpec::grim(1.0, 3, w).unwrap();
        assert!(solve_grim(&spec, (-5.0, 5.0), GraphIc::new(0.0, 0.0, 0.3), &opts()).is_err());
        let g = solve_grim(&spec, (-5.0, 5.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
        assert!(g.blowups.is_empty());
        assert!(g.r.contains(&0.0));
        let [_, du, _] = g.eval(5.0).unwrap();
        assert!(du > 0.0 && du < 1.0);
    }
}
