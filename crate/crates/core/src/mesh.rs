//! Triangle meshes of surfaces of revolution generated by profile curves.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::profile::{ProfileCurve, ProfileState, SolitonSpec};
use crate::warp::WarpKind;

/// How a point `(t, r, ϑ)` of `ℝ × P` is placed in ℝ³.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshChart {
    /// `(t, r cos ϑ, r sin ϑ)`.
    Cylindrical,
    /// `(t, ρ cos ϑ, ρ sin ϑ)` with `ρ = tanh(κ̂r/2)/κ̂`, `K = −κ̂²`.
    PoincareDisk,
    /// `(t, x₁, x₂)` with `(x₁, x₂) = (sinh(κ̂r)/κ̂)(cos ϑ, sin ϑ)`, the
    /// spatial part of the point on the hyperboloid of curvature `−κ̂²`.
    Hyperboloid,
}

impl MeshChart {
    pub fn name(&self) -> &'static str {
        match self {
            MeshChart::Cylindrical => "cylindrical",
            MeshChart::PoincareDisk => "poincare_disk",
            MeshChart::Hyperboloid => "hyperboloid",
        }
    }
}

/// Intrinsic data carried by every vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexAttributes {
    pub r: f64,
    pub t: f64,
    pub phi: f64,
}

/// Vertices, 0-based triangles and per-vertex attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonMesh {
    pub chart: MeshChart,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub attributes: Vec<VertexAttributes>,
    /// Human-readable description of the soliton.
    pub label: String,
    /// Set for `n ≥ 3`: the mesh is the 3-D slice through the rotation axis.
    pub equatorial_slice: bool,
}

impl SolitonMesh {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() || self.faces.is_empty()
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = HashSet::new();
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }

    /// Every face indexes existing, distinct vertices.
    pub fn faces_valid(&self) -> bool {
        let v = self.vertices.len();
        self.faces
            .iter()
            .all(|f| f.iter().all(|&i| i < v) && f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
    }
}

fn planar_radius(chart: MeshChart, spec: &SolitonSpec, r: f64) -> Result<f64> {
    let kappa_hat = || -> Result<f64> {
        match spec.warp.constant_curvature() {
            Some(k) if k < 0.0 => Ok((-k).sqrt()),
            _ => Err(SolitonError::Incompatible(format!(
                "{} chart needs a warp of constant negative curvature, got `{}`",
                chart.name(),
                spec.warp.label()
            ))),
        }
    };
    Ok(match chart {
        MeshChart::Cylindrical => r,
        MeshChart::PoincareDisk => {
            let k = kappa_hat()?;
            (0.5 * k * r).tanh() / k
        }
        MeshChart::Hyperboloid => {
            let k = kappa_hat()?;
            (k * r).sinh() / k
        }
    })
}

/// Rotates the samples `(r, t)` about the axis `r = 0` with
/// `segments` angular steps. A first sample on the axis becomes a single
/// vertex closed by a triangle fan.
pub fn revolve_samples(
    samples: &[ProfileState],
    spec: &SolitonSpec,
    segments: usize,
    chart: MeshChart,
) -> Result<SolitonMesh> {
    if spec.warp.kind() != WarpKind::Rotational {
        return Err(SolitonError::Incompatible(format!(
            "only rotational profiles can be revolved, got `{}`",
            spec.warp.label()
        )));
    }
    if segments < 8 {
        return Err(SolitonError::InvalidParameter(format!(
            "at least 8 angular segments are needed, got {segments}"
        )));
    }
    if samples.len() < 2 {
        return Err(SolitonError::NothingToExport);
    }
    let axis = samples[0].r == 0.0;
    let mut vertices = Vec::new();
    let mut attributes = Vec::new();
    let mut faces = Vec::new();
    if axis {
        let p = &samples[0];
        vertices.push([p.t, 0.0, 0.0]);
        attributes.push(VertexAttributes {
            r: 0.0,
            t: p.t,
            phi: p.phi,
        });
    }
    let rings = if axis { &samples[1..] } else { samples };
    let offset = vertices.len();
    for p in rings {
        let rho = planar_radius(chart, spec, p.r)?;
        for j in 0..segments {
            let th = TAU * j as f64 / segments as f64;
            vertices.push([p.t, rho * th.cos(), rho * th.sin()]);
            attributes.push(VertexAttributes {
                r: p.r,
                t: p.t,
                phi: p.phi,
            });
        }
    }
    let idx = |ring: usize, j: usize| offset + ring * segments + j % segments;
    if axis {
        for j in 0..segments {
            faces.push([0, idx(0, j), idx(0, j + 1)]);
        }
    }
    for ring in 0..rings.len() - 1 {
        for j in 0..segments {
            let (a, b, c, d) = (
                idx(ring, j),
                idx(ring, j + 1),
                idx(ring + 1, j),
                idx(ring + 1, j + 1),
            );
            faces.push([a, c, b]);
            faces.push([b, c, d]);
        }
    }
    Ok(SolitonMesh {
        chart,
        vertices,
        faces,
        attributes,
        label: spec.describe(),
        equatorial_slice: spec.n >= 3,
    })
}

/// Surface of revolution of a profile curve.
pub fn revolve_profile(
    curve: &ProfileCurve,
    segments: usize,
    chart: MeshChart,
) -> Result<SolitonMesh> {
    if curve.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    revolve_samples(&curve.samples, &curve.spec, segments, chart)
}

/// The two branches of a wing as one curve from the end of the lower branch
/// through the launch point `(ε, 0)` to the end of the upper branch.
pub fn join_wing_branches(upper: &ProfileCurve, lower: &ProfileCurve) -> Vec<ProfileState> {
    let mut out: Vec<ProfileState> = lower
        .samples
        .iter()
        .rev()
        .map(|p| {
            // reversed orientation: the tangent angle turns by π
            let phi = p.phi + PI;
            ProfileState::new(-p.s, p.r, p.t, if phi > PI { phi - TAU } else { phi })
        })
        .collect();
    out.extend(upper.samples.iter().skip(1).copied());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::OdeOptions;
    use crate::profile::{solve_bowl, solve_wing, Branch, StopPolicy};
    use crate::warp::WarpModel;

    fn bowl() -> ProfileCurve {
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::hyperbolic(-1.0).unwrap()).unwrap();
        solve_bowl(
            &spec,
            0.5,
            &StopPolicy::default().with_r_max(3.0),
            &OdeOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn bowl_is_a_disk() {
        let curve = bowl();
        let m = revolve_profile(&curve, 16, MeshChart::Cylindrical).unwrap();
        assert_eq!(m.vertices[0], [0.5, 0.0, 0.0]);
        assert_eq!(m.vertices.len(), 1 + (curve.len() - 1) * 16);
        assert!(m.faces_valid());
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn wing_is_an_annulus() {
        let spec = SolitonSpec::wing(1.0, 2, 0.5, WarpModel::euclidean()).unwrap();
        let policy = StopPolicy::default().with_r_max(2.0);
        let opts = OdeOptions::default();
        let up = solve_wing(&spec, Branch::Upper, &policy, &opts).unwrap();
        let lo = solve_wing(&spec, Branch::Lower, &policy, &opts).unwrap();
        let m = revolve_profile(&up, 12, MeshChart::Cylindrical).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        let inner = m.vertices[..12]
            .iter()
            .map(|v| v[1].hypot(v[2]))
            .fold(0.0, f64::max);
        assert!((inner - 0.5).abs() < 1e-12);
        let joined = join_wing_branches(&up, &lo);
        assert!(joined.windows(2).all(|w| w[1].s > w[0].s));
        let m = revolve_samples(&joined, &spec, 12, MeshChart::Cylindrical).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn disk_chart_stays_inside_the_disk() {
        let m = revolve_profile(&bowl(), 8, MeshChart::PoincareDisk).unwrap();
        assert!(m.vertices.iter().all(|v| v[1].hypot(v[2]) < 1.0));
        let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
        let samples = [
            ProfileState::new(0.0, 0.0, 0.0, 0.0),
            ProfileState::new(1.0, 1.0, 0.0, 0.0),
        ];
        assert!(revolve_samples(&samples, &spec, 8, MeshChart::PoincareDisk).is_err());
        assert!(revolve_samples(&samples, &spec, 4, MeshChart::Cylindrical).is_err());
    }
}
