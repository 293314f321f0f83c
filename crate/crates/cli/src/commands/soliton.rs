//! `soliton {bowl|wing|ideal|grim}`.

use clap::{Args, ValueEnum};
use serde::Deserialize;
use soliton_core::diagnostics::{
    tolerances, verify_profile, wing_height_report, CheckRecord, DiagnosticsReport,
};
use soliton_core::graph::{solve_grim, GraphIc};
use soliton_core::io::{write_graph, write_obj, write_profile};
use soliton_core::mesh::{join_wing_branches, revolve_profile, revolve_samples, MeshChart};
use soliton_core::profile::{
    ideal_default_initial, solve_bowl, solve_ideal_parametric, solve_wing, Branch, SolitonSpec,
    StopPolicy,
};
use soliton_core::WarpKind;

use super::{finish, merge, warp, SpecArgs};
use crate::config::Context;
use crate::failure::Failure;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyName {
    Bowl,
    Wing,
    Ideal,
    Grim,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartName {
    Cylindrical,
    PoincareDisk,
    Hyperboloid,
}

impl From<ChartName> for MeshChart {
    fn from(c: ChartName) -> Self {
        match c {
            ChartName::Cylindrical => MeshChart::Cylindrical,
            ChartName::PoincareDisk => MeshChart::PoincareDisk,
            ChartName::Hyperboloid => MeshChart::Hyperboloid,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolitonArgs {
    /// Soliton family.
    pub family: FamilyName,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Wing launch radius ε > 0, or the Busemann coordinate of the lowest
    /// point of an ideal soliton [ideal default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Largest radius reached by the profile; half-width of a grim reaper [default: 10].
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    /// Height of the launch point [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Angular segments of the mesh [default: 64].
    #[arg(long)]
    pub segments: Option<usize>,
    /// Mesh chart [default: poincare-disk when K < 0, cylindrical when K = 0].
    #[arg(long, value_enum)]
    pub chart: Option<ChartName>,
    /// File stem of the outputs [default: the family name].
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run(ctx: &Context, args: &SolitonArgs) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let base = args.spec.resolve(cfg)?;
    let r_max: f64 = cfg.get(args.r_max, "r_max", 10.0)?;
    let t0: f64 = cfg.get(args.t0, "t0", 0.0)?;
    let segments: usize = cfg.get(args.segments, "segments", 64)?;
    let default_chart = if base.k < 0.0 {
        ChartName::PoincareDisk
    } else {
        ChartName::Cylindrical
    };
    let chart: MeshChart = cfg.get(args.chart, "chart", default_chart)?.into();
    let epsilon: Option<f64> = cfg.opt(args.epsilon, "epsilon")?;
    let stem = match cfg.opt(args.name.clone(), "name")? {
        Some(s) => s,
        None => format!("{:?}", args.family).to_lowercase(),
    };
    if !(r_max > 0.0) {
        return Err(Failure::usage(format!(
            "--r-max must be positive, got {r_max}"
        )));
    }
    let policy = StopPolicy::default().with_r_max(r_max);
    let mut report = DiagnosticsReport::default();

    match args.family {
        FamilyName::Bowl => {
            let spec = SolitonSpec::bowl(base.c, base.n, warp(WarpKind::Rotational, base.k)?)?;
            let curve = solve_bowl(&spec, t0, &policy, &ctx.ode)?;
            report = verify_profile(&curve)?;
            write_profile(&curve, &ctx.path(&format!("{stem}.csv"))?)?;
            let mesh = revolve_profile(&curve, segments, chart)?;
            write_obj(&mesh, &ctx.path(&format!("{stem}.obj"))?)?;
            println!(
                "{}: {} samples, {} mesh vertices",
                spec.describe(),
                curve.len(),
                mesh.vertices.len()
            );
        }
        FamilyName::Wing => {
            let eps = epsilon.ok_or_else(|| Failure::usage("wing needs --epsilon > 0"))?;
            let spec = SolitonSpec::wing(base.c, base.n, eps, warp(WarpKind::Rotational, base.k)?)?;
            let up = solve_wing(&spec, Branch::Upper, &policy, &ctx.ode)?;
            let lo = solve_wing(&spec, Branch::Lower, &policy, &ctx.ode)?;
            merge(&mut report, "upper", verify_profile(&up)?);
            merge(&mut report, "lower", verify_profile(&lo)?);
            if let Ok(h) = wing_height_report(&lo) {
                println!(
                    "turning radius r₀ = {:.10}, gap t(ε) − t(r₀) = {:.10} in [{:.10}, {:.10}]",
                    h.r0, h.gap, h.lower_bound, h.upper_bound
                );
            }
            write_profile(&up, &ctx.path(&format!("{stem}_upper.csv"))?)?;
            write_profile(&lo, &ctx.path(&format!("{stem}_lower.csv"))?)?;
            let joined = join_wing_branches(&up, &lo);
            let mesh = revolve_samples(&joined, &spec, segments, chart)?;
            write_obj(&mesh, &ctx.path(&format!("{stem}.obj"))?)?;
            println!(
                "{}: {} + {} samples, {} mesh vertices",
                spec.describe(),
                up.len(),
                lo.len(),
                mesh.vertices.len()
            );
        }
        FamilyName::Ideal => {
            let spec = SolitonSpec::ideal(
                base.c,
                base.n,
                epsilon.unwrap_or(0.0),
                warp(WarpKind::Busemann, base.k)?,
            )?;
            let curve =
                solve_ideal_parametric(&spec, ideal_default_initial(&spec), &policy, &ctx.ode)?;
            report = verify_profile(&curve)?;
            write_profile(&curve, &ctx.path(&format!("{stem}.csv"))?)?;
            println!(
                "{}: {} samples (profile only; ideal solitons are not surfaces of revolution)",
                spec.describe(),
                curve.len()
            );
        }
        FamilyName::Grim => {
            let spec = SolitonSpec::grim(base.c, base.n, warp(WarpKind::Equidistant, base.k)?)?;
            let graph = solve_grim(&spec, (-r_max, r_max), GraphIc::new(0.0, t0, 0.0), &ctx.ode)?;
            let residuals: Vec<f64> = graph
                .r
                .windows(2)
                .filter_map(|w| graph.residual(0.5 * (w[0] + w[1])))
                .collect();
            report.push(CheckRecord::from_residuals(
                "graph_equation",
                &residuals,
                tolerances::INTEGRAL,
            ));
            report.push(
                CheckRecord::from_residuals("entire", &[graph.blowups.len() as f64], 0.0)
                    .with_note("number of gradient blow-ups"),
            );
            write_graph(&graph, &ctx.path(&format!("{stem}.csv"))?)?;
            println!(
                "{}: {} graph nodes on [{}, {}]",
                spec.describe(),
                graph.len(),
                -r_max,
                r_max
            );
        }
    }
    finish(&report, &ctx.path(&format!("{stem}_diagnostics.json"))?)
}
