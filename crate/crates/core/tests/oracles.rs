//! End-to-end checks against closed forms and independently computed
//! references.

use std::f64::consts::PI;

use soliton_core::diagnostics::{
    asymptotic_report, flux_residual, geodesic_residual, verify_profile, verify_samples,
    wing_height_report, wing_turning_flux,
};
use soliton_core::flow::{
    boundary_flux, initial_state, run_flow, soliton_defect, step_flow, BoundaryCondition,
    FlowConfig, FlowOptions, InitialData, Scheme,
};
use soliton_core::graph::{solve_radial_graph, GraphIc};
use soliton_core::lorentz::{embed_polar, LorentzMap};
use soliton_core::mesh::{join_wing_branches, revolve_samples, MeshChart};
use soliton_core::ode::OdeOptions;
use soliton_core::profile::{
    ideal_equilibrium_angle, profile_to_graph, solve_bowl, solve_ideal_parametric, solve_wing,
    Branch, ProfileState, SolitonSpec, StopPolicy,
};
use soliton_core::{CurvatureBounds, WarpKind, WarpModel};

fn hyp() -> WarpModel {
    WarpModel::hyperbolic(-1.0).unwrap()
}

fn opts() -> OdeOptions {
    OdeOptions::default()
}

#[test]
fn minimal_euclidean_wing_is_a_catenoid() {
    // c = 0, n = 2: r(t) = ε cosh((t − t(ε))/ε)
    let eps = 0.7;
    let spec = SolitonSpec::wing(0.0, 2, eps, WarpModel::euclidean()).unwrap();
    let up = solve_wing(
        &spec,
        Branch::Upper,
        &StopPolicy::default().with_r_max(4.0),
        &opts(),
    )
    .unwrap();
    let t0 = up.samples[0].t;
    for p in &up.samples {
        let r = eps * ((p.t - t0) / eps).cosh();
        assert!((p.r - r).abs() < 1e-8 * r.max(1.0), "t = {}", p.t);
    }
    // the catenoid is a geodesic of λ = r: r φ̇ = −sin φ
    let rep = verify_profile(&up).unwrap();
    assert!(rep.all_pass(), "{}", rep.to_json());
}

#[test]
fn fast_wings_stay_close_to_the_launch_circle() {
    let spec = SolitonSpec::wing(10.0, 2, 0.1, hyp()).unwrap();
    let lower = solve_wing(
        &spec,
        Branch::Lower,
        &StopPolicy::default().with_r_max(3.0),
        &opts(),
    )
    .unwrap();
    let rep = wing_height_report(&lower).unwrap();
    assert!(rep.r0 - 0.1 <= PI / 20.0);
    assert!(rep.pass);
}

#[test]
fn wing_gap_shrinks_with_epsilon() {
    let mut gaps = Vec::new();
    for eps in [1.0, 0.1, 0.01] {
        let spec = SolitonSpec::wing(1.0, 2, eps, hyp()).unwrap();
        let lower = solve_wing(
            &spec,
            Branch::Lower,
            &StopPolicy::default().with_r_max(eps + 4.0),
            &opts(),
        )
        .unwrap();
        gaps.push(wing_height_report(&lower).unwrap().gap);
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.05);
}

#[test]
fn wing_flux_at_the_turning_point() {
    for n in [2, 3] {
        let spec = SolitonSpec::wing(1.0, n, 0.5, hyp()).unwrap();
        let lower = solve_wing(
            &spec,
            Branch::Lower,
            &StopPolicy::default().with_r_max(4.0),
            &opts(),
        )
        .unwrap();
        let rec = wing_turning_flux(&lower, 1e-7).unwrap();
        assert!(rec.pass, "{rec:?}");
    }
}

#[test]
fn lower_wing_launches_straight_down() {
    let spec = SolitonSpec::wing(1.0, 2, 0.5, hyp()).unwrap();
    let lower = solve_wing(
        &spec,
        Branch::Lower,
        &StopPolicy::default().with_r_max(2.0),
        &opts(),
    )
    .unwrap();
    let [_, dy, _] = lower.jet(0.0).unwrap();
    assert!(dy[0].abs() < 1e-12 && (dy[1] + 1.0).abs() < 1e-12);
}

#[test]
fn euclidean_bowl_flux_matches_quadrature() {
    let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
    let g = solve_radial_graph(&spec, (0.0, 10.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
    let rec = flux_residual(&g, 1e-7).unwrap();
    assert!(rec.pass, "{rec:?}");
}

#[test]
fn euclidean_bowl_near_the_axis() {
    // u = r²/4 + O(r⁴)
    let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
    let curve = solve_bowl(&spec, 0.0, &StopPolicy::default().with_r_max(1.0), &opts()).unwrap();
    let g = profile_to_graph(&curve, 1e-3).unwrap();
    for r in [0.01, 0.02, 0.05] {
        let [u, _, _] = g.eval(r).unwrap();
        assert!((u - r * r / 4.0).abs() < r.powi(4), "r = {r}");
    }
}

#[test]
fn hyperbolic_asymptotics_and_euclidean_exemption() {
    let spec = SolitonSpec::bowl(1.0, 2, hyp()).unwrap();
    let g = solve_radial_graph(&spec, (0.0, 20.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
    let rec = asymptotic_report(&g, &CurvatureBounds::constant(-1.0).unwrap()).unwrap();
    assert!(rec.applicable && rec.pass, "{rec:?}");
    let [_, du, _] = g.eval(20.0).unwrap();
    let psi = du - 20f64.tanh();
    assert!(psi < 0.0 && psi > -1e-3);

    let spec = SolitonSpec::bowl(1.0, 2, WarpModel::euclidean()).unwrap();
    let g = solve_radial_graph(&spec, (0.0, 10.0), GraphIc::new(0.0, 0.0, 0.0), &opts()).unwrap();
    let rec = asymptotic_report(&g, &CurvatureBounds::constant(0.0).unwrap()).unwrap();
    assert!(!rec.applicable);
}

#[test]
fn ideal_bowl_tends_monotonically_to_the_equilibrium_angle() {
    let bus = WarpModel::builtin(WarpKind::Busemann, -1.0).unwrap();
    let spec = SolitonSpec::ideal(1.0, 2, 0.0, bus).unwrap();
    let target = ideal_equilibrium_angle(1.0, 2, 1.0);
    let curve = solve_ideal_parametric(
        &spec,
        ProfileState::new(0.0, 0.0, 0.0, 0.0),
        &StopPolicy::default().with_s_max(15.0).with_r_max(50.0),
        &opts(),
    )
    .unwrap();
    let forward: Vec<f64> = curve
        .samples
        .iter()
        .filter(|p| p.s >= 0.0)
        .map(|p| p.phi)
        .collect();
    assert!(forward.windows(2).all(|w| w[1] >= w[0]));
    assert!(forward.iter().all(|&phi| phi < target));
    assert!((forward[forward.len() - 1] - target).abs() < 1e-6);
}

#[test]
fn profile_written_to_samples_still_verifies() {
    let spec = SolitonSpec::bowl(1.0, 2, hyp()).unwrap();
    let curve = solve_bowl(&spec, 0.0, &StopPolicy::default().with_r_max(5.0), &opts()).unwrap();
    let rep = verify_samples(&curve.samples, &spec).unwrap();
    assert!(rep.all_pass(), "{}", rep.to_json());
    // shifting a slab of samples breaks the identities
    let mut bad = curve.samples.clone();
    let m = bad.len();
    for p in &mut bad[m / 3..m / 2] {
        p.r += 1e-3;
    }
    assert!(!verify_samples(&bad, &spec).unwrap().all_pass());
}

#[test]
fn joined_wing_branches_are_one_geodesic() {
    let spec = SolitonSpec::wing(1.0, 2, 0.5, hyp()).unwrap();
    let policy = StopPolicy::default().with_r_max(3.0);
    let up = solve_wing(&spec, Branch::Upper, &policy, &opts()).unwrap();
    let lo = solve_wing(&spec, Branch::Lower, &policy, &opts()).unwrap();
    let joined = join_wing_branches(&up, &lo);
    let rep = verify_samples(&joined, &spec).unwrap();
    assert!(rep.all_pass(), "{}", rep.to_json());
    let mesh = revolve_samples(&joined, &spec, 24, MeshChart::PoincareDisk).unwrap();
    assert_eq!(mesh.euler_characteristic(), 0);
    assert!(mesh.faces_valid());
}

#[test]
fn every_profile_of_a_sweep_is_a_geodesic() {
    for c in [0.5, 1.0, 2.0] {
        let spec = SolitonSpec::bowl(c, 3, hyp()).unwrap();
        let curve =
            solve_bowl(&spec, 0.0, &StopPolicy::default().with_r_max(6.0), &opts()).unwrap();
        assert!(geodesic_residual(&curve, &spec, 1e-7).pass);
    }
}

fn euclid_flow(c: f64, radius: f64, nodes: usize) -> FlowConfig {
    FlowConfig::new(c, 2, WarpModel::euclidean())
        .with_grid(radius, nodes)
        .with_boundary(BoundaryCondition::SolitonSlope)
}

#[test]
fn one_step_from_a_soliton_translates_it() {
    // |u_new − u_old − c·dτ| ≤ C·dτ·Δr², and C stays put when Δr halves
    let mut ratios = Vec::new();
    for nodes in [201, 401] {
        let st = initial_state(&euclid_flow(1.0, 2.0, nodes), &InitialData::Soliton).unwrap();
        let dr = st.setup().dr();
        let dt = st.setup().stability_bound();
        let next = step_flow(&st, dt, Scheme::Explicit).unwrap();
        let err = next
            .u
            .iter()
            .zip(&st.u)
            .map(|(a, b)| (a - b - dt).abs())
            .fold(0.0, f64::max);
        ratios.push(err / (dt * dr * dr));
    }
    assert!(ratios[0] < 1.0 && ratios[1] < 1.0, "{ratios:?}");
}

#[test]
fn soliton_state_has_tiny_defect() {
    let st = initial_state(&euclid_flow(1.0, 2.0, 2001), &InitialData::Soliton).unwrap();
    assert!((st.setup().dr() - 1e-3).abs() < 1e-15);
    let d = soliton_defect(&st);
    assert!(d <= 1e-6, "D = {d:e}");
}

#[test]
fn bump_flow_decreases_the_functional() {
    // narrow bump: negligible at r = R, so no boundary transient
    let cfg = FlowConfig::new(1.0, 2, hyp())
        .with_grid(6.0, 601)
        .with_boundary(BoundaryCondition::SolitonSlope);
    let data = InitialData::Bump {
        amplitude: 0.5,
        width: 0.5,
        center: 2.0,
        on_soliton: true,
    };
    let st = initial_state(&cfg, &data).unwrap();
    let dt = st.setup().stability_bound();
    let traj = run_flow(&st, &FlowOptions::new(dt, 0.05, Scheme::Explicit)).unwrap();
    assert!(traj.f_values.windows(2).all(|w| w[1] < w[0]));
    // dF/dτ = −D + boundary term
    let d = traj.df_dtau();
    let interior = d.len() - 2;
    let rows = d.iter().zip(&traj.defect_values).zip(&traj.boundary_flux);
    for (i, ((df, defect), flux)) in rows.enumerate().skip(1).take(interior) {
        let lhs = df + defect - flux;
        assert!(lhs.abs() <= 1e-3 * defect + 1e-6, "step {i}: {lhs:e}");
    }
    assert!(boundary_flux(traj.last()).is_finite());
}

#[test]
fn bump_over_a_slice_flattens() {
    let cfg = euclid_flow(0.0, 4.0, 201).with_boundary(BoundaryCondition::Dirichlet);
    let data = InitialData::Bump {
        amplitude: 1.0,
        width: 0.8,
        center: 0.0,
        on_soliton: false,
    };
    let mut st = initial_state(&cfg, &data).unwrap();
    let dt = st.setup().stability_bound();
    let mut sup = st.u.iter().copied().fold(f64::MIN, f64::max);
    for _ in 0..200 {
        st = step_flow(&st, dt, Scheme::Explicit).unwrap();
        let next = st.u.iter().copied().fold(f64::MIN, f64::max);
        assert!(next < sup);
        sup = next;
    }
}

#[test]
fn geodesic_spheres_move_to_spheres() {
    let r0 = 0.8;
    let map = LorentzMap::hyperbolic_translation(2, r0).unwrap();
    let centre = map.apply_coords(&[1.0, 0.0, 0.0]);
    assert!((centre[0] - r0.cosh()).abs() < 1e-14 && (centre[1] + r0.sinh()).abs() < 1e-14);
    let r = 1.3;
    for k in 0..32 {
        let th = 2.0 * PI * f64::from(k) / 32.0;
        let p = embed_polar(r, &[th.cos(), th.sin()]).unwrap();
        let q = map.apply_coords(p.coords());
        let ip = -q[0] * centre[0] + q[1] * centre[1] + q[2] * centre[2];
        assert!((ip + r.cosh()).abs() < 1e-12);
    }
}

#[test]
fn poincare_disk_radius_of_a_known_point() {
    // ρ = tanh(r/2) for K = −1
    let spec = SolitonSpec::bowl(1.0, 2, hyp()).unwrap();
    let samples = [
        ProfileState::new(0.0, 0.0, 0.0, 0.0),
        ProfileState::new(1.0, 1.0, 0.3, 0.2),
    ];
    let m = revolve_samples(&samples, &spec, 8, MeshChart::PoincareDisk).unwrap();
    assert!((m.vertices[1][1] - 0.5f64.tanh()).abs() < 1e-15);
    let m = revolve_samples(&samples, &spec, 8, MeshChart::Hyperboloid).unwrap();
    assert!((m.vertices[1][1] - 1f64.sinh()).abs() < 1e-15);
}
