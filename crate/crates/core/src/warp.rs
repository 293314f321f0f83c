//! Rotationally symmetric base metrics `dr² + ξ²(r) dϑ²` and their variants.
//!
//! A [`WarpModel`] bundles the warping function ξ with its first two
//! derivatives. Builtin models evaluate everything in closed form, including
//! the quotients ξ′/ξ and ξ/ξ′ that the solvers need, so those stay accurate
//! far from the axis where the raw derivatives overflow in relative terms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};

/// Coordinate system the warping function lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarpKind {
    /// Geodesic polar coordinates around a pole, `r ≥ 0`.
    Rotational,
    /// Signed distance to a fixed horosphere, `r ∈ ℝ`.
    Busemann,
    /// Signed distance to a fixed geodesic, with a second factor χ.
    Equidistant,
}

impl fmt::Display for WarpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            WarpKind::Rotational => "rotational",
            WarpKind::Busemann => "busemann",
            WarpKind::Equidistant => "equidistant",
        };
        f.write_str(name)
    }
}

/// `r ↦ [ξ(r), ξ′(r), ξ″(r)]`
pub type WarpFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Euclidean,
    Hyperbolic {
        kappa: f64,
    },
    Exponential {
        kappa: f64,
    },
    CoshSinh {
        kappa: f64,
    },
    Table(HermiteTable),
    Custom {
        xi: WarpFn,
        chi: Option<WarpFn>,
        third_at_axis: f64,
    },
}

/// Default radius below which ξ′/ξ is replaced by its axis series.
pub const DEFAULT_R_SERIES: f64 = 1e-3;

#[derive(Clone)]
pub struct WarpModel {
    kind: WarpKind,
    shape: Shape,
    label: String,
    r_series: f64,
}

impl fmt::Debug for WarpModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpModel")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .finish()
    }
}

impl WarpModel {
    /// Builds one of the constant-curvature models.
    ///
    /// `curvature` is the sectional curvature `K ≤ 0`. Busemann and
    /// equidistant coordinates only exist for `K < 0`.
    pub fn builtin(kind: WarpKind, curvature: f64) -> Result<Self> {
        if !curvature.is_finite() || curvature > 0.0 {
            return Err(SolitonError::InvalidParameter(format!(
                "curvature must be finite and non-positive, got {curvature}"
            )));
        }
        let kappa = (-curvature).sqrt();
        let (shape, label) = match kind {
            WarpKind::Rotational if curvature == 0.0 => (Shape::Euclidean, "euclidean".to_string()),
            WarpKind::Rotational => (
                Shape::Hyperbolic { kappa },
                format!("hyperbolic(K={curvature})"),
            ),
            _ if curvature == 0.0 => {
                return Err(SolitonError::InvalidParameter(format!(
                    "{kind} warp requires K < 0"
                )))
            }
            WarpKind::Busemann => (
                Shape::Exponential { kappa },
                format!("busemann-hyperbolic(K={curvature})"),
            ),
            WarpKind::Equidistant => (
                Shape::CoshSinh { kappa },
                format!("equidistant-hyperbolic(K={curvature})"),
            ),
        };
        Ok(WarpModel {
            kind,
            shape,
            label,
            r_series: DEFAULT_R_SERIES,
        })
    }

    pub fn euclidean() -> Self {
        Self::builtin(WarpKind::Rotational, 0.0).expect("K = 0 is valid for rotational")
    }

    pub fn hyperbolic(curvature: f64) -> Result<Self> {
        Self::builtin(WarpKind::Rotational, curvature)
    }

    /// A user-supplied warp with analytic derivatives.
    ///
    /// `third_at_axis` is ξ‴(0), used by the axis series of ξ′/ξ for
    /// rotational models; ignored otherwise.
    pub fn custom<F>(kind: WarpKind, label: impl Into<String>, xi: F, third_at_axis: f64) -> Self
    where
        F: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        WarpModel {
            kind,
            shape: Shape::Custom {
                xi: Arc::new(xi),
                chi: None,
                third_at_axis,
            },
            label: label.into(),
            r_series: DEFAULT_R_SERIES,
        }
    }

    /// Attaches the second warping factor χ of an equidistant model.
    pub fn with_chi<F>(mut self, chi_fn: F) -> Self
    where
        F: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        if let Shape::Custom { chi, .. } = &mut self.shape {
            *chi = Some(Arc::new(chi_fn));
        }
        self
    }

    pub fn with_r_series(mut self, r_series: f64) -> Self {
        self.r_series = r_series.max(0.0);
        self
    }

    /// Builds a model from a tabulated description.
    pub fn from_table(spec: &WarpTableSpec) -> Result<Self> {
        let table = HermiteTable::new(&spec.table)?;
        let label = spec
            .label
            .clone()
            .unwrap_or_else(|| format!("table({} nodes)", spec.table.len()));
        Ok(WarpModel {
            kind: spec.kind,
            shape: Shape::Table(table),
            label,
            r_series: DEFAULT_R_SERIES,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: WarpTableSpec =
            serde_json::from_str(text).map_err(|e| SolitonError::Parse(e.to_string()))?;
        Self::from_table(&spec)
    }

    pub fn kind(&self) -> WarpKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sectional curvature of a builtin constant-curvature model.
    pub fn constant_curvature(&self) -> Option<f64> {
        match self.shape {
            Shape::Euclidean => Some(0.0),
            Shape::Hyperbolic { kappa }
            | Shape::Exponential { kappa }
            | Shape::CoshSinh { kappa } => Some(-kappa * kappa),
            _ => None,
        }
    }

    /// Closed interval on which the model is defined.
    pub fn r_domain(&self) -> (f64, f64) {
        match (&self.shape, self.kind) {
            (Shape::Table(t), _) => (t.r[0], *t.r.last().unwrap()),
            (_, WarpKind::Rotational) => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let (lo, hi) = self.r_domain();
        r >= lo && r <= hi
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        if r.is_finite() && self.contains(r) {
            Ok(())
        } else {
            Err(SolitonError::OutsideDomain {
                r,
                label: self.label.clone(),
            })
        }
    }

    /// `[ξ, ξ′, ξ″]` at `r`.
    pub fn jet(&self, r: f64) -> [f64; 3] {
        match &self.shape {
            Shape::Euclidean => [r, 1.0, 0.0],
            Shape::Hyperbolic { kappa } => {
                let k = *kappa;
                let sh = (k * r).sinh();
                [sh / k, (k * r).cosh(), k * sh]
            }
            Shape::Exponential { kappa } => {
                let e = (kappa * r).exp();
                [e, kappa * e, kappa * kappa * e]
            }
            Shape::CoshSinh { kappa } => {
                let k = *kappa;
                let ch = (k * r).cosh();
                [ch, k * (k * r).sinh(), k * k * ch]
            }
            Shape::Table(t) => t.eval(r),
            Shape::Custom { xi, .. } => xi(r),
        }
    }

    pub fn xi(&self, r: f64) -> f64 {
        self.jet(r)[0]
    }

    pub fn dxi(&self, r: f64) -> f64 {
        self.jet(r)[1]
    }

    pub fn ddxi(&self, r: f64) -> f64 {
        self.jet(r)[2]
    }

    /// `[χ, χ′, χ″]` for equidistant models.
    pub fn chi_jet(&self, r: f64) -> Option<[f64; 3]> {
        match &self.shape {
            Shape::CoshSinh { kappa } => {
                let k = *kappa;
                let sh = (k * r).sinh();
                Some([sh / k, (k * r).cosh(), k * sh])
            }
            Shape::Custom { chi: Some(chi), .. } => Some(chi(r)),
            _ => None,
        }
    }

    /// ξ‴(0), carried for the axis series of rotational models.
    pub fn third_at_axis(&self) -> f64 {
        match &self.shape {
            Shape::Euclidean => 0.0,
            Shape::Hyperbolic { kappa } => kappa * kappa,
            Shape::Table(t) => t.third_at_start(),
            Shape::Custom { third_at_axis, .. } => *third_at_axis,
            _ => 0.0,
        }
    }

    /// ξ′/ξ, regularised near the axis of rotational models by
    /// `1/r + ξ‴(0) r / 3`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        if self.kind == WarpKind::Rotational && r.abs() < self.r_series {
            if r == 0.0 {
                return f64::INFINITY;
            }
            return 1.0 / r + self.third_at_axis() * r / 3.0;
        }
        match &self.shape {
            Shape::Euclidean => 1.0 / r,
            Shape::Hyperbolic { kappa } => kappa / (kappa * r).tanh(),
            Shape::Exponential { kappa } => *kappa,
            Shape::CoshSinh { kappa } => kappa * (kappa * r).tanh(),
            _ => {
                let [x, dx, _] = self.jet(r);
                dx / x
            }
        }
    }

    /// g = ξ/ξ′.
    pub fn inverse_log_derivative(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => r,
            Shape::Hyperbolic { kappa } => (kappa * r).tanh() / kappa,
            Shape::Exponential { kappa } => 1.0 / kappa,
            Shape::CoshSinh { kappa } => 1.0 / (kappa * (kappa * r).tanh()),
            _ => {
                let [x, dx, _] = self.jet(r);
                x / dx
            }
        }
    }

    /// g′ = (ξ/ξ′)′ = 1 − ξξ″/ξ′².
    pub fn ratio_derivative(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 1.0,
            Shape::Hyperbolic { kappa } => {
                let ch = (kappa * r).cosh();
                1.0 / (ch * ch)
            }
            Shape::Exponential { .. } => 0.0,
            Shape::CoshSinh { kappa } => {
                let sh = (kappa * r).sinh();
                -1.0 / (sh * sh)
            }
            _ => {
                let [x, dx, ddx] = self.jet(r);
                1.0 - x * ddx / (dx * dx)
            }
        }
    }

    /// Radial curvature `K(r) = −ξ″(r)/ξ(r)`.
    pub fn radial_curvature(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        let [x, _, ddx] = self.jet(r);
        if x == 0.0 {
            return Err(SolitonError::Singular {
                quantity: "−ξ″/ξ",
                r,
            });
        }
        Ok(-ddx / x)
    }

    /// |g′ − 1 − K g²| with g = ξ/ξ′; vanishes identically for smooth warps.
    pub fn riccati_residual(&self, r: f64) -> Result<f64> {
        let k = self.radial_curvature(r)?;
        let g = self.inverse_log_derivative(r);
        Ok((self.ratio_derivative(r) - 1.0 - k * g * g).abs())
    }

    /// Laplacian of the distance coordinate, i.e. the (unnormalised) mean
    /// curvature of the level set `{r = const}` in an `n`-dimensional base.
    pub fn level_mean_curvature(&self, r: f64, n: u32) -> Result<f64> {
        if n < 2 {
            return Err(SolitonError::InvalidParameter(format!(
                "base dimension must be at least 2, got {n}"
            )));
        }
        self.check_domain(r)?;
        let nm1 = f64::from(n - 1);
        match self.kind {
            WarpKind::Rotational => {
                if r == 0.0 {
                    return Err(SolitonError::Singular { quantity: "Δr", r });
                }
                Ok(nm1 * self.log_derivative(r))
            }
            WarpKind::Busemann => Ok(nm1 * self.log_derivative(r)),
            WarpKind::Equidistant => {
                let first = self.log_derivative(r);
                if n == 2 {
                    return Ok(first);
                }
                if r == 0.0 {
                    return Err(SolitonError::Singular {
                        quantity: "χ′/χ",
                        r,
                    });
                }
                let [chi, dchi, _] = self.chi_jet(r).ok_or_else(|| {
                    SolitonError::Incompatible(format!(
                        "equidistant model `{}` has no χ factor",
                        self.label
                    ))
                })?;
                Ok(first + f64::from(n - 2) * dchi / chi)
            }
        }
    }

    /// Level mean curvature without error plumbing, for right-hand sides.
    /// Returns NaN where the quantity is undefined.
    pub(crate) fn drift_coefficient(&self, r: f64, n: u32) -> f64 {
        if n <= 1 {
            return 0.0;
        }
        match self.kind {
            WarpKind::Rotational | WarpKind::Busemann => f64::from(n - 1) * self.log_derivative(r),
            WarpKind::Equidistant => self.level_mean_curvature(r, n).unwrap_or(f64::NAN),
        }
    }

    /// Default validation grid: 512 log-spaced points on `[1e-4, 1e2]`
    /// for rotational models, 512 uniform points on `[−20, 20]` otherwise,
    /// clipped to the model's domain.
    pub fn default_validation_grid(&self) -> Vec<f64> {
        let m = 512usize;
        let raw: Vec<f64> = match self.kind {
            WarpKind::Rotational => {
                let (a, b) = (1e-4f64.ln(), 1e2f64.ln());
                (0..m)
                    .map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp())
                    .collect()
            }
            _ => (0..m)
                .map(|i| -20.0 + 40.0 * i as f64 / (m - 1) as f64)
                .collect(),
        };
        raw.into_iter().filter(|&r| self.contains(r)).collect()
    }

    pub fn validate(&self, grid: &[f64]) -> Vec<WarpViolation> {
        validate_warp(self, grid)
    }
}

/// A failed regularity or curvature condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WarpCondition {
    /// ξ(0) = 0 (rotational) or ξ(0) = 1 (equidistant).
    AxisValue,
    /// ξ′(0) = 1 (rotational) or ξ′(0) = 0 (equidistant).
    AxisSlope,
    Positive,
    NonPositiveCurvature,
    Increasing,
    Domain,
}

impl fmt::Display for WarpCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WarpCondition::AxisValue => "axis value of ξ",
            WarpCondition::AxisSlope => "axis value of ξ′",
            WarpCondition::Positive => "ξ > 0",
            WarpCondition::NonPositiveCurvature => "K ≤ 0",
            WarpCondition::Increasing => "ξ′ > 0",
            WarpCondition::Domain => "r in domain",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WarpViolation {
    pub condition: WarpCondition,
    pub r: f64,
    pub value: f64,
}

impl fmt::Display for WarpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at r = {} (value {})",
            self.condition, self.r, self.value
        )
    }
}

const AXIS_TOL: f64 = 1e-10;
const CURVATURE_TOL: f64 = 1e-10;

/// Checks the regularity conditions of `model` at the axis and its sign
/// conditions at every grid point. Never fails; returns every violation.
pub fn validate_warp(model: &WarpModel, grid: &[f64]) -> Vec<WarpViolation> {
    let mut out = Vec::new();
    let push = |out: &mut Vec<WarpViolation>, condition, r, value| {
        out.push(WarpViolation {
            condition,
            r,
            value,
        })
    };

    let axis_targets = match model.kind {
        WarpKind::Rotational => Some((0.0, 1.0)),
        WarpKind::Equidistant => Some((1.0, 0.0)),
        WarpKind::Busemann => None,
    };
    if let Some((v0, d0)) = axis_targets {
        if model.contains(0.0) {
            let [x, dx, _] = model.jet(0.0);
            if !((x - v0).abs() <= AXIS_TOL) {
                push(&mut out, WarpCondition::AxisValue, 0.0, x);
            }
            if !((dx - d0).abs() <= AXIS_TOL) {
                push(&mut out, WarpCondition::AxisSlope, 0.0, dx);
            }
        }
    }

    for &r in grid {
        if !model.contains(r) {
            push(&mut out, WarpCondition::Domain, r, r);
            continue;
        }
        let [x, dx, ddx] = model.jet(r);
        let needs_positive = match model.kind {
            WarpKind::Rotational => r > 0.0,
            _ => true,
        };
        if needs_positive && !(x > 0.0) {
            push(&mut out, WarpCondition::Positive, r, x);
        }
        if model.kind == WarpKind::Rotational && r > 0.0 && !(dx > 0.0) {
            push(&mut out, WarpCondition::Increasing, r, dx);
        }
        if x != 0.0 {
            let k = -ddx / x;
            if !(k <= CURVATURE_TOL * k.abs().max(1.0)) {
                push(&mut out, WarpCondition::NonPositiveCurvature, r, k);
            }
        }
    }
    out
}

/// Two-sided bound `K₋ ≤ K ≤ K₊ ≤ 0` on the radial curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    pub k_minus: f64,
    pub k_plus: f64,
}

impl CurvatureBounds {
    pub fn new(k_minus: f64, k_plus: f64) -> Result<Self> {
        if !(k_minus <= k_plus && k_plus <= 0.0) {
            return Err(SolitonError::InvalidParameter(format!(
                "need K₋ ≤ K₊ ≤ 0, got K₋ = {k_minus}, K₊ = {k_plus}"
            )));
        }
        Ok(CurvatureBounds { k_minus, k_plus })
    }

    /// Bounds for a constant-curvature model.
    pub fn constant(k: f64) -> Result<Self> {
        Self::new(k, k)
    }

    /// Hessian-comparison values `(ξ′₊/ξ₊, ξ′₋/ξ₋)` at `r > 0`, the
    /// constant-curvature log-derivatives that sandwich ξ′/ξ.
    pub fn comparison(&self, r: f64) -> (f64, f64) {
        let coth_model = |k: f64| {
            if k == 0.0 {
                1.0 / r
            } else {
                let a = (-k).sqrt();
                a / (a * r).tanh()
            }
        };
        (coth_model(self.k_plus), coth_model(self.k_minus))
    }
}

/// Input format for tabulated warps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpTableSpec {
    pub kind: WarpKind,
    pub table: Vec<WarpTableRow>,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WarpTableRow {
    pub r: f64,
    pub xi: f64,
    pub dxi: f64,
    pub ddxi: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    #[default]
    #[serde(rename = "cubic-hermite")]
    CubicHermite,
}

/// ξ from a cubic Hermite fit of (ξ, ξ′); ξ′ and ξ″ from a cubic Hermite
/// fit of (ξ′, ξ″), so the returned ξ″ is the exact derivative of ξ′.
#[derive(Clone, Debug)]
struct HermiteTable {
    r: Vec<f64>,
    xi: Vec<f64>,
    dxi: Vec<f64>,
    ddxi: Vec<f64>,
}

impl HermiteTable {
    fn new(rows: &[WarpTableRow]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(SolitonError::Parse(
                "warp table needs at least two rows".into(),
            ));
        }
        if rows.windows(2).any(|w| !(w[1].r > w[0].r)) {
            return Err(SolitonError::Parse(
                "warp table radii must be strictly increasing".into(),
            ));
        }
        if rows.iter().any(|row| {
            ![row.r, row.xi, row.dxi, row.ddxi]
                .iter()
                .all(|v| v.is_finite())
        }) {
            return Err(SolitonError::Parse(
                "warp table has non-finite entries".into(),
            ));
        }
        Ok(HermiteTable {
            r: rows.iter().map(|x| x.r).collect(),
            xi: rows.iter().map(|x| x.xi).collect(),
            dxi: rows.iter().map(|x| x.dxi).collect(),
            ddxi: rows.iter().map(|x| x.ddxi).collect(),
        })
    }

    fn eval(&self, r: f64) -> [f64; 3] {
        let last = self.r.len() - 1;
        if !(r >= self.r[0] && r <= self.r[last]) {
            return [f64::NAN; 3];
        }
        let i = match self.r.partition_point(|&x| x <= r) {
            0 => 0,
            p => (p - 1).min(last - 1),
        };
        let h = self.r[i + 1] - self.r[i];
        let t = (r - self.r[i]) / h;
        let (x, _) = hermite(
            t,
            h,
            self.xi[i],
            self.dxi[i],
            self.xi[i + 1],
            self.dxi[i + 1],
        );
        let (dx, ddx) = hermite(
            t,
            h,
            self.dxi[i],
            self.ddxi[i],
            self.dxi[i + 1],
            self.ddxi[i + 1],
        );
        [x, dx, ddx]
    }

    fn third_at_start(&self) -> f64 {
        (self.ddxi[1] - self.ddxi[0]) / (self.r[1] - self.r[0])
    }
}

/// Cubic Hermite value and derivative on one interval of width `h`.
fn hermite(t: f64, h: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1;
    let slope = ((6.0 * t2 - 6.0 * t) * y0
        + (3.0 * t2 - 4.0 * t + 1.0) * h * m0
        + (-6.0 * t2 + 6.0 * t) * y1
        + (3.0 * t2 - 2.0 * t) * h * m1)
        / h;
    (value, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_builtin() {
        let w = WarpModel::builtin(WarpKind::Rotational, 0.0).unwrap();
        for r in [0.0, 0.5, 3.0] {
            assert_eq!(w.jet(r), [r, 1.0, 0.0]);
        }
    }

    #[test]
    fn hyperbolic_value_at_two() {
        let w = WarpModel::hyperbolic(-1.0).unwrap();
        // sinh 2
        assert!((w.xi(2.0) - 3.626_860_407_847_019).abs() < 1e-12);
    }

    #[test]
    fn equidistant_h_factor_is_tanh() {
        let w = WarpModel::builtin(WarpKind::Equidistant, -1.0).unwrap();
        for r in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert!((w.xi(r) - f64::cosh(r)).abs() < 1e-12 * f64::cosh(r));
            assert!((w.log_derivative(r) - r.tanh()).abs() < 1e-15);
        }
    }

    #[test]
    fn builtin_rejects_bad_curvature() {
        assert!(WarpModel::builtin(WarpKind::Rotational, 0.5).is_err());
        assert!(WarpModel::builtin(WarpKind::Busemann, 0.0).is_err());
        assert!(WarpModel::builtin(WarpKind::Equidistant, 0.0).is_err());
        assert!(WarpModel::builtin(WarpKind::Busemann, -1.0).is_ok());
    }

    #[test]
    fn validate_flags_sine_warp() {
        let w = WarpModel::custom(
            WarpKind::Rotational,
            "sin",
            |r: f64| [r.sin(), r.cos(), -r.sin()],
            -1.0,
        );
        let v = validate_warp(&w, &[1.0, 4.0]);
        assert!(v
            .iter()
            .any(|x| x.condition == WarpCondition::Positive && x.r == 4.0));
        let msg = v
            .iter()
            .find(|x| x.condition == WarpCondition::Positive)
            .unwrap()
            .to_string();
        assert!(msg.starts_with("ξ > 0 fails at r = 4"), "{msg}");
    }

    #[test]
    fn validate_accepts_builtins() {
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 * 0.1).collect();
        assert!(validate_warp(&WarpModel::euclidean(), &grid).is_empty());
        for kind in [
            WarpKind::Rotational,
            WarpKind::Busemann,
            WarpKind::Equidistant,
        ] {
            let w = WarpModel::builtin(kind, -1.0).unwrap();
            let g = w.default_validation_grid();
            assert_eq!(g.len(), 512);
            assert!(validate_warp(&w, &g).is_empty(), "{kind}");
        }
    }

    #[test]
    fn radial_curvature_examples() {
        assert_eq!(WarpModel::euclidean().radial_curvature(2.0).unwrap(), 0.0);
        let h = WarpModel::hyperbolic(-1.0).unwrap();
        assert!((h.radial_curvature(1.0).unwrap() + 1.0).abs() < 1e-15);
        let b = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
        assert!((b.radial_curvature(3.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(h.radial_curvature(0.0).is_err());
        assert!(h.radial_curvature(-1.0).is_err());
    }

    #[test]
    fn level_mean_curvature_examples() {
        let e = WarpModel::euclidean();
        assert!((e.level_mean_curvature(2.0, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!(e.level_mean_curvature(0.0, 3).is_err());
        let q = WarpModel::builtin(WarpKind::Equidistant, -1.0).unwrap();
        assert!((q.level_mean_curvature(1.0, 2).unwrap() - 0.761_594_155_955_764_9).abs() < 1e-15);
        let expected = 1f64.tanh() + 1.0 / 1f64.tanh();
        assert!((q.level_mean_curvature(1.0, 3).unwrap() - expected).abs() < 1e-14);
        let b = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
        for r in [-4.0, 0.0, 9.0] {
            assert_eq!(b.level_mean_curvature(r, 4).unwrap(), 3.0);
        }
    }

    #[test]
    fn axis_series_matches_closed_form() {
        let h = WarpModel::hyperbolic(-2.0).unwrap();
        let k = 2f64.sqrt();
        for r in [1e-6, 1e-5, 5e-4] {
            let exact = k / (k * r).tanh();
            assert!((h.log_derivative(r) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn table_reproduces_cubic() {
        // ξ = r + r³/6 is reproduced exactly by a Hermite fit of (ξ, ξ′),
        // and ξ′ = 1 + r²/2 exactly by a Hermite fit of (ξ′, ξ″).
        let rows: Vec<WarpTableRow> = (0..=10)
            .map(|i| {
                let r = i as f64 * 0.3;
                WarpTableRow {
                    r,
                    xi: r + r * r * r / 6.0,
                    dxi: 1.0 + r * r / 2.0,
                    ddxi: r,
                }
            })
            .collect();
        let w = WarpModel::from_table(&WarpTableSpec {
            kind: WarpKind::Rotational,
            table: rows,
            interpolation: Interpolation::CubicHermite,
            label: None,
        })
        .unwrap();
        for r in [0.05, 0.77, 2.9] {
            let [x, dx, ddx] = w.jet(r);
            assert!((x - (r + r * r * r / 6.0)).abs() < 1e-13);
            assert!((dx - (1.0 + r * r / 2.0)).abs() < 1e-13);
            assert!((ddx - r).abs() < 1e-12);
        }
        assert!(w.jet(3.5)[0].is_nan());
        assert!((w.third_at_axis() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_json_round() {
        let text = r#"{"kind":"rotational","table":[{"r":0,"xi":0,"dxi":1,"ddxi":0},{"r":1,"xi":1,"dxi":1,"ddxi":0}],"interpolation":"cubic-hermite"}"#;
        let w = WarpModel::from_json(text).unwrap();
        assert_eq!(w.kind(), WarpKind::Rotational);
        assert!((w.xi(0.5) - 0.5).abs() < 1e-15);
        assert!(WarpModel::from_json(r#"{"kind":"rotational","table":[]}"#).is_err());
    }

    #[test]
    fn comparison_bounds_order() {
        assert!(CurvatureBounds::new(-1.0, -2.0).is_err());
        assert!(CurvatureBounds::new(-2.0, 0.1).is_err());
        let b = CurvatureBounds::new(-4.0, -1.0).unwrap();
        let (lo, hi) = b.comparison(1.0);
        assert!(lo < hi);
    }
}
