//! The hyperboloid model `{⟨p, p⟩ = −1, x₀ > 0}` of ℍⁿ in Minkowski space
//! `ℝ^{1,n}` with `⟨x, y⟩ = −x₀y₀ + Σ xᵢyᵢ`, and its hyperbolic and parabolic
//! translations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};

/// Tolerance of the hyperboloid and Lorentz-form invariants.
pub const INVARIANT_TOL: f64 = 1e-10;
/// Form defect above which compositions are re-orthonormalised.
pub const REORTHONORMALIZE_TOL: f64 = 1e-9;

/// Minkowski product `−x₀y₀ + Σ_{i≥1} xᵢyᵢ`.
pub fn lorentz_product(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// A point of ℍⁿ on the upper sheet of the hyperboloid.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzPoint {
    coords: Vec<f64>,
}

impl LorentzPoint {
    /// Checks `⟨p, p⟩ = −1` to [`INVARIANT_TOL`] (relative to `x₀²`) and
    /// `x₀ > 0`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(SolitonError::InvalidParameter(
                "a hyperboloid point needs at least two coordinates".into(),
            ));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(SolitonError::InvalidParameter(
                "non-finite hyperboloid coordinate".into(),
            ));
        }
        let q = lorentz_product(&coords, &coords);
        let scale = coords[0] * coords[0];
        if !(coords[0] > 0.0) || (q + 1.0).abs() > INVARIANT_TOL * scale.max(1.0) {
            return Err(SolitonError::InvariantViolation(format!(
                "⟨p, p⟩ = {q} and x₀ = {}; expected −1 and x₀ > 0",
                coords[0]
            )));
        }
        Ok(LorentzPoint { coords })
    }

    /// `o = (1, 0, …, 0)`.
    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        LorentzPoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Dimension `n` of ℍⁿ.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn inner(&self, other: &LorentzPoint) -> f64 {
        lorentz_product(&self.coords, &other.coords)
    }

    /// Hyperbolic distance `arccosh(−⟨p, q⟩)`.
    pub fn distance(&self, other: &LorentzPoint) -> f64 {
        (-self.inner(other)).max(1.0).acosh()
    }

    /// `|⟨p, p⟩ + 1|`.
    pub fn defect(&self) -> f64 {
        (lorentz_product(&self.coords, &self.coords) + 1.0).abs()
    }
}

/// `p = cosh r · e + sinh r · ω` with `ω` a unit vector orthogonal to `e`,
/// given by its `n` spatial components.
pub fn embed_polar(r: f64, omega: &[f64]) -> Result<LorentzPoint> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "polar radius must be finite and ≥ 0, got {r}"
        )));
    }
    let norm = omega.iter().map(|v| v * v).sum::<f64>().sqrt();
    if omega.is_empty() || (norm - 1.0).abs() > 1e-12 {
        return Err(SolitonError::InvalidParameter(format!(
            "direction must be a unit vector, |ω| = {norm}"
        )));
    }
    let mut coords = Vec::with_capacity(omega.len() + 1);
    coords.push(r.cosh());
    coords.extend(omega.iter().map(|w| r.sinh() * w));
    Ok(LorentzPoint { coords })
}

/// Point at signed distance `r` from the geodesic
/// `α(τ) = (cosh τ, 0, sinh τ, 0, …)` in the direction `ϑ`, a unit vector in
/// the coordinates `(x₁, x₃, …, x_n)`:
/// `(cosh r cosh τ, sinh r ϑ₁, cosh r sinh τ, sinh r ϑ₃, …)`.
pub fn equidistant_point(r: f64, tau: f64, theta: &[f64]) -> Result<LorentzPoint> {
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if theta.is_empty() || (norm - 1.0).abs() > 1e-12 || !r.is_finite() || !tau.is_finite() {
        return Err(SolitonError::InvalidParameter(format!(
            "equidistant chart needs finite (r, τ) and unit ϑ, got |ϑ| = {norm}"
        )));
    }
    let n = theta.len() + 1;
    let mut coords = vec![0.0; n + 1];
    coords[0] = r.cosh() * tau.cosh();
    coords[1] = r.sinh() * theta[0];
    coords[2] = r.cosh() * tau.sinh();
    for (k, t) in theta.iter().enumerate().skip(1) {
        coords[k + 2] = r.sinh() * t;
    }
    Ok(LorentzPoint { coords })
}

/// A linear isometry of ℍⁿ: `Mᵀ J M = J` with `J = diag(−1, 1, …, 1)` and
/// `M₀₀ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMap {
    matrix: DMatrix<f64>,
}

fn signature(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 1, n + 1);
    j[(0, 0)] = -1.0;
    j
}

impl LorentzMap {
    /// Validates the form invariant to [`INVARIANT_TOL`] relative to the
    /// largest entry squared.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(SolitonError::InvalidParameter(format!(
                "a Lorentz map needs a square matrix of size ≥ 2, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let map = LorentzMap { matrix };
        let defect = map.form_defect();
        let scale = map.matrix.amax().powi(2).max(1.0);
        if !(defect <= INVARIANT_TOL * scale) || !(map.matrix[(0, 0)] > 0.0) {
            return Err(SolitonError::InvariantViolation(format!(
                "matrix is not an orthochronous Lorentz transformation (form defect {defect:e}, M₀₀ = {})",
                map.matrix[(0, 0)]
            )));
        }
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        LorentzMap {
            matrix: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// `T_{−r₀}`: boost in the `(x₀, x₁)` plane moving `(cosh r₀, sinh r₀, 0, …)`
    /// to the origin.
    pub fn hyperbolic_translation(n: usize, r0: f64) -> Result<Self> {
        if n < 1 || !r0.is_finite() {
            return Err(SolitonError::InvalidParameter(format!(
                "hyperbolic translation needs n ≥ 1 and finite r₀, got n = {n}, r₀ = {r0}"
            )));
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        let (ch, sh) = (r0.cosh(), r0.sinh());
        m[(0, 0)] = ch;
        m[(0, 1)] = -sh;
        m[(1, 0)] = -sh;
        m[(1, 1)] = ch;
        Ok(LorentzMap { matrix: m })
    }

    /// `T_{−∞}`: parabolic map fixing the light-like direction
    /// `(1, −1, 0, …)` and every level `x₀ + x₁ = a`,
    /// `x ↦ (x₀ + A, x₁ − A, x₂ + α s, x₃, …)` with `s = x₀ + x₁` and
    /// `A = (α²/2) s + α x₂`. The factor ½ is what makes the map preserve
    /// the Lorentz form.
    pub fn parabolic_translation(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 || !alpha.is_finite() {
            return Err(SolitonError::InvalidParameter(format!(
                "parabolic translation needs n ≥ 2 and finite α, got n = {n}, α = {alpha}"
            )));
        }
        let a2 = 0.5 * alpha * alpha;
        let mut m = DMatrix::identity(n + 1, n + 1);
        m[(0, 0)] = 1.0 + a2;
        m[(0, 1)] = a2;
        m[(0, 2)] = alpha;
        m[(1, 0)] = -a2;
        m[(1, 1)] = 1.0 - a2;
        m[(1, 2)] = -alpha;
        m[(2, 0)] = alpha;
        m[(2, 1)] = alpha;
        m[(2, 2)] = 1.0;
        Ok(LorentzMap { matrix: m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// `max |Mᵀ J M − J|`.
    pub fn form_defect(&self) -> f64 {
        let j = signature(self.dim());
        (self.matrix.transpose() * &j * &self.matrix - j).amax()
    }

    /// `J Mᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = signature(self.dim());
        LorentzMap {
            matrix: &j * self.matrix.transpose() * j,
        }
    }

    /// `self ∘ other`, re-orthonormalised when the defect exceeds
    /// [`REORTHONORMALIZE_TOL`].
    pub fn compose(&self, other: &LorentzMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(SolitonError::InvalidParameter(format!(
                "cannot compose maps of ℍ^{} and ℍ^{}",
                self.dim(),
                other.dim()
            )));
        }
        let mut out = LorentzMap {
            matrix: &self.matrix * &other.matrix,
        };
        if out.form_defect() > REORTHONORMALIZE_TOL {
            out.reorthonormalize();
        }
        Ok(out)
    }

    /// Gram–Schmidt of the columns against the Lorentz form, the first
    /// column timelike.
    pub fn reorthonormalize(&mut self) {
        let m = self.matrix.ncols();
        let j = signature(m - 1);
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(m);
        for k in 0..m {
            let mut v: DVector<f64> = self.matrix.column(k).into_owned();
            for (i, e) in cols.iter().enumerate() {
                let sign = if i == 0 { -1.0 } else { 1.0 };
                let proj = (v.transpose() * &j * e)[(0, 0)] * sign;
                v -= e * proj;
            }
            let q = (v.transpose() * &j * &v)[(0, 0)];
            v /= q.abs().sqrt();
            cols.push(v);
        }
        self.matrix = DMatrix::from_columns(&cols);
    }

    pub fn apply_coords(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(x);
        v.iter().copied().collect()
    }

    pub fn apply(&self, p: &LorentzPoint) -> Result<LorentzPoint> {
        if p.dim() != self.dim() {
            return Err(SolitonError::InvalidParameter(format!(
                "map acts on ℍ^{}, point lies in ℍ^{}",
                self.dim(),
                p.dim()
            )));
        }
        LorentzPoint::new(self.apply_coords(&p.coords))
    }
}

/// Applies `map` to every point.
pub fn transform_points(map: &LorentzMap, points: &[LorentzPoint]) -> Result<Vec<LorentzPoint>> {
    points.iter().map(|p| map.apply(p)).collect()
}

/// Applies `map` to the ℍⁿ factor of points `(height, p)` of `ℝ × ℍⁿ`,
/// carrying the heights unchanged.
pub fn transform_stamped(
    map: &LorentzMap,
    points: &[(f64, LorentzPoint)],
) -> Result<Vec<(f64, LorentzPoint)>> {
    points
        .iter()
        .map(|(h, p)| Ok((*h, map.apply(p)?)))
        .collect()
}

/// `ν_{r₀} = T_{−r₀}(o)/cosh r₀ = (1, −tanh r₀, 0, …)`.
pub fn nu(n: usize, r0: f64) -> Result<Vec<f64>> {
    let t = LorentzMap::hyperbolic_translation(n, r0)?;
    let o = LorentzPoint::origin(n);
    Ok(t.apply_coords(o.coords())
        .iter()
        .map(|v| v / r0.cosh())
        .collect())
}

/// `ν_{−∞} = (1, −1, 0, …)`, the light-like limit of [`nu`].
pub fn nu_limit(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    v[0] = 1.0;
    v[1] = -1.0;
    v
}

/// JSON form of a map: `{"type": "hyperbolic" | "parabolic", "param": x}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    #[serde(rename = "type")]
    pub kind: MapKind,
    pub param: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Hyperbolic,
    Parabolic,
}

impl MapDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SolitonError::Parse(format!("map descriptor: {e}")))
    }

    pub fn to_map(&self, n: usize) -> Result<LorentzMap> {
        match self.kind {
            MapKind::Hyperbolic => LorentzMap::hyperbolic_translation(n, self.param),
            MapKind::Parabolic => LorentzMap::parabolic_translation(n, self.param),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_embedding() {
        assert_eq!(
            embed_polar(0.0, &[1.0, 0.0]).unwrap(),
            LorentzPoint::origin(2)
        );
        let p = embed_polar(1.0, &[1.0, 0.0]).unwrap();
        assert!((p.coords()[0] - 1.543_081).abs() < 1e-6);
        assert!((p.coords()[1] - 1.175_201).abs() < 1e-6);
        let o = LorentzPoint::origin(2);
        let q = embed_polar(2.5, &[0.6, 0.8]).unwrap();
        assert!((q.inner(&o) + 2.5f64.cosh()).abs() < 1e-12);
        assert!(embed_polar(1.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn boost_moves_anchor_to_origin() {
        assert_eq!(
            LorentzMap::hyperbolic_translation(3, 0.0).unwrap(),
            LorentzMap::identity(3)
        );
        let t = LorentzMap::hyperbolic_translation(2, 1.0).unwrap();
        let p0 = embed_polar(1.0, &[1.0, 0.0]).unwrap();
        let img = t.apply(&p0).unwrap();
        assert!((img.coords()[0] - 1.0).abs() < 1e-12);
        assert!(img.coords()[1].abs() < 1e-12);
        let o = t.apply(&LorentzPoint::origin(2)).unwrap();
        assert!((o.coords()[0] - 1f64.cosh()).abs() < 1e-12);
        assert!((o.coords()[1] + 1f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn parabolic_preserves_levels() {
        assert_eq!(
            LorentzMap::parabolic_translation(2, 0.0).unwrap(),
            LorentzMap::identity(2)
        );
        let t = LorentzMap::parabolic_translation(3, 0.7).unwrap();
        assert!(t.form_defect() < 1e-12);
        let p = embed_polar(1.3, &[0.0, 0.6, 0.8]).unwrap();
        let q = t.apply(&p).unwrap();
        let c = p.coords();
        let d = q.coords();
        assert!((d[0] + d[1] - c[0] - c[1]).abs() < 1e-12);
        assert!(q.defect() < 1e-12);
        assert!(LorentzMap::parabolic_translation(1, 0.3).is_err());
    }

    #[test]
    fn inverse_and_composition() {
        let a = LorentzMap::hyperbolic_translation(2, 0.8).unwrap();
        let b = LorentzMap::parabolic_translation(2, -0.4).unwrap();
        let ab = a.compose(&b).unwrap();
        let id = ab.compose(&ab.inverse()).unwrap();
        assert!((id.matrix() - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!(LorentzMap::new(ab.matrix().clone()).is_ok());
    }

    #[test]
    fn reorthonormalize_restores_form() {
        let mut m = LorentzMap::hyperbolic_translation(3, 2.0).unwrap();
        m.matrix[(2, 0)] += 1e-6;
        m.matrix[(1, 3)] -= 1e-6;
        assert!(m.form_defect() > 1e-7);
        m.reorthonormalize();
        assert!(m.form_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_isometry() {
        let mut m = DMatrix::identity(3, 3);
        m[(1, 1)] = 2.0;
        assert!(LorentzMap::new(m).is_err());
        let flip = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0]));
        assert!(LorentzMap::new(flip).is_err());
    }

    #[test]
    fn equidistant_chart_lands_on_tube() {
        for (r, tau) in [(0.0, 0.0), (0.7, -1.2), (-2.0, 3.0)] {
            let p = equidistant_point(r, tau, &[1.0]).unwrap();
            let c = p.coords();
            assert!(p.defect() < 1e-12);
            assert!((c[1] - f64::sinh(r)).abs() < 1e-12);
            let q = equidistant_point(r, tau, &[0.0, 0.6, 0.8]).unwrap();
            let d = q.coords();
            assert!(q.defect() < 1e-11);
            assert!((-d[0] * d[0] + d[2] * d[2] + f64::cosh(r).powi(2)).abs() < 1e-11);
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let d = MapDescriptor::from_json(r#"{"type": "parabolic", "param": 0.5}"#).unwrap();
        assert_eq!(d.kind, MapKind::Parabolic);
        assert!(d.to_map(2).is_ok());
        assert!(MapDescriptor::from_json(r#"{"type": "elliptic", "param": 0.5}"#).is_err());
    }
}
