//! Browser bindings for three operations: solving a bowl or wing profile,
//! revolving it into a Poincaré-disk mesh, and stepping the radial flow from
//! a perturbed soliton.
//!
//! Each exported function wraps a plain Rust function returning
//! `Result<_, String>` so the logic can be tested natively.

use soliton_core::diagnostics::verify_profile;
use soliton_core::flow::{
    initial_state, soliton_defect, step_flow, weighted_functional, BoundaryCondition, FlowConfig,
    GraphFlowState, InitialData, Scheme,
};
use soliton_core::mesh::{join_wing_branches, revolve_samples, MeshChart};
use soliton_core::ode::OdeOptions;
use soliton_core::profile::{
    solve_bowl, solve_wing, Branch, ProfileState, SolitonSpec, StopPolicy,
};
use soliton_core::{WarpKind, WarpModel};
use wasm_bindgen::prelude::*;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn rotational(k: f64) -> Result<WarpModel, String> {
    WarpModel::builtin(WarpKind::Rotational, k).map_err(err)
}

/// Samples of a solved profile and its verification outcome.
#[wasm_bindgen]
pub struct Profile {
    spec: SolitonSpec,
    samples: Vec<ProfileState>,
    pass: bool,
    report: String,
}

#[wasm_bindgen]
impl Profile {
    pub fn r(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.r).collect()
    }

    pub fn t(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.t).collect()
    }

    pub fn phi(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.phi).collect()
    }

    /// Every applicable diagnostic passed.
    pub fn verified(&self) -> bool {
        self.pass
    }

    /// Diagnostics as a JSON array.
    pub fn report(&self) -> String {
        self.report.clone()
    }

    pub fn label(&self) -> String {
        self.spec.describe()
    }
}

/// Solves a bowl (`epsilon ≤ 0`) or a wing of launch radius `epsilon`; a
/// wing is returned as its two branches joined at the launch point.
pub fn profile(k: f64, n: u32, c: f64, epsilon: f64, r_max: f64) -> Result<Profile, String> {
    let policy = StopPolicy::default().with_r_max(r_max);
    let opts = OdeOptions::default();
    if epsilon <= 0.0 {
        let spec = SolitonSpec::bowl(c, n, rotational(k)?).map_err(err)?;
        let curve = solve_bowl(&spec, 0.0, &policy, &opts).map_err(err)?;
        let report = verify_profile(&curve).map_err(err)?;
        Ok(Profile {
            spec,
            samples: curve.samples.clone(),
            pass: report.all_pass(),
            report: report.to_json(),
        })
    } else {
        let spec = SolitonSpec::wing(c, n, epsilon, rotational(k)?).map_err(err)?;
        let up = solve_wing(&spec, Branch::Upper, &policy, &opts).map_err(err)?;
        let lo = solve_wing(&spec, Branch::Lower, &policy, &opts).map_err(err)?;
        let (ru, rl) = (
            verify_profile(&up).map_err(err)?,
            verify_profile(&lo).map_err(err)?,
        );
        let mut entries = ru.entries;
        entries.extend(rl.entries);
        let report = soliton_core::diagnostics::DiagnosticsReport { entries };
        Ok(Profile {
            samples: join_wing_branches(&up, &lo),
            spec,
            pass: report.all_pass(),
            report: report.to_json(),
        })
    }
}

#[wasm_bindgen(js_name = solveProfile)]
pub fn solve_profile(k: f64, n: u32, c: f64, epsilon: f64, r_max: f64) -> Result<Profile, JsError> {
    profile(k, n, c, epsilon, r_max).map_err(|e| JsError::new(&e))
}

/// Triangle mesh with flat coordinate and index buffers.
#[wasm_bindgen]
pub struct Mesh {
    vertices: Vec<f64>,
    faces: Vec<u32>,
    euler: i32,
}

#[wasm_bindgen]
impl Mesh {
    /// `(height, x, y)` triples.
    pub fn vertices(&self) -> Vec<f64> {
        self.vertices.clone()
    }

    /// 0-based triangle indices.
    pub fn faces(&self) -> Vec<u32> {
        self.faces.clone()
    }

    #[wasm_bindgen(js_name = eulerCharacteristic)]
    pub fn euler_characteristic(&self) -> i32 {
        self.euler
    }
}

/// Revolves a profile into the Poincaré-disk chart (`K < 0`) or the
/// cylindrical chart (`K = 0`).
pub fn mesh(profile: &Profile, segments: usize) -> Result<Mesh, String> {
    let negative = profile
        .spec
        .warp
        .constant_curvature()
        .is_some_and(|k| k < 0.0);
    let chart = if negative {
        MeshChart::PoincareDisk
    } else {
        MeshChart::Cylindrical
    };
    let m = revolve_samples(&profile.samples, &profile.spec, segments, chart).map_err(err)?;
    Ok(Mesh {
        vertices: m.vertices.iter().flatten().copied().collect(),
        faces: m
            .faces
            .iter()
            .flatten()
            .map(|&i| u32::try_from(i).map_err(err))
            .collect::<Result<_, _>>()?,
        euler: i32::try_from(m.euler_characteristic()).map_err(err)?,
    })
}

#[wasm_bindgen(js_name = diskMesh)]
pub fn disk_mesh(profile: &Profile, segments: usize) -> Result<Mesh, JsError> {
    mesh(profile, segments).map_err(|e| JsError::new(&e))
}

/// Radial flow of the bowl plus a Gaussian bump, with the soliton's own
/// slope imposed at the outer node.
#[wasm_bindgen]
pub struct FlowSession {
    state: GraphFlowState,
    dtau: f64,
}

impl FlowSession {
    #[allow(clippy::too_many_arguments)]
    pub fn create(
        k: f64,
        n: u32,
        c: f64,
        radius: f64,
        nodes: usize,
        amplitude: f64,
        width: f64,
        center: f64,
    ) -> Result<FlowSession, String> {
        let config = FlowConfig::new(c, n, rotational(k)?)
            .with_grid(radius, nodes)
            .with_boundary(BoundaryCondition::SolitonSlope);
        let data = InitialData::Bump {
            amplitude,
            width,
            center,
            on_soliton: true,
        };
        let state = initial_state(&config, &data).map_err(err)?;
        let dtau = state.setup().stability_bound();
        Ok(FlowSession { state, dtau })
    }

    pub fn advance(&mut self, steps: usize) -> Result<f64, String> {
        for _ in 0..steps {
            self.state = step_flow(&self.state, self.dtau, Scheme::Explicit).map_err(err)?;
        }
        Ok(self.state.tau)
    }
}

#[wasm_bindgen]
impl FlowSession {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k: f64,
        n: u32,
        c: f64,
        radius: f64,
        nodes: usize,
        amplitude: f64,
        width: f64,
        center: f64,
    ) -> Result<FlowSession, JsError> {
        Self::create(k, n, c, radius, nodes, amplitude, width, center).map_err(|e| JsError::new(&e))
    }

    /// Takes `steps` explicit steps at the stability bound; returns τ.
    pub fn step(&mut self, steps: usize) -> Result<f64, JsError> {
        self.advance(steps).map_err(|e| JsError::new(&e))
    }

    pub fn tau(&self) -> f64 {
        self.state.tau
    }

    pub fn r(&self) -> Vec<f64> {
        self.state.r_grid().to_vec()
    }

    /// Heights minus the translation `cτ`.
    pub fn u(&self) -> Vec<f64> {
        let shift = self.state.config().c * self.state.tau;
        self.state.u.iter().map(|u| u - shift).collect()
    }

    /// Weighted area `F`.
    pub fn functional(&self) -> f64 {
        weighted_functional(&self.state)
    }

    /// Soliton defect `D = −dF/dτ` up to the boundary term.
    pub fn defect(&self) -> f64 {
        soliton_defect(&self.state)
    }
}
