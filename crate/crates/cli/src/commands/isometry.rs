//! `isometry`: hyperbolic and parabolic translations of the hyperboloid.

use std::path::{Path, PathBuf};

use clap::Args;
use soliton_core::io::{read_obj, read_points_csv, write_obj, write_points_csv};
use soliton_core::lorentz::{LorentzPoint, MapDescriptor};
use soliton_core::mesh::{MeshChart, SolitonMesh};

use super::write_json;
use crate::config::Context;
use crate::failure::Failure;

#[derive(Args, Debug)]
pub struct IsometryArgs {
    /// Map as JSON, inline or a file path: `{"type": "hyperbolic" | "parabolic", "param": x}`.
    #[arg(long)]
    pub map: Option<String>,
    /// Points CSV with columns x0,…,xn on the unit hyperboloid.
    #[arg(long, conflicts_with = "mesh")]
    pub points: Option<PathBuf>,
    /// OBJ mesh written in the hyperboloid chart.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Curvature K < 0 the mesh was exported with [default: -1].
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// File stem of the output [default: isometry].
    #[arg(long)]
    pub name: Option<String>,
}

fn descriptor(text: &str) -> Result<MapDescriptor, Failure> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| Failure::Runtime(format!("{text}: {e}")))?
    };
    MapDescriptor::from_json(&json).map_err(|e| Failure::usage(e.to_string()))
}

pub fn run(ctx: &Context, args: &IsometryArgs) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let map_text: String = cfg
        .opt(args.map.clone(), "map")?
        .ok_or_else(|| Failure::usage("isometry needs --map <json>"))?;
    let desc = descriptor(&map_text)?;
    let stem: String = cfg.get(args.name.clone(), "name", "isometry".to_string())?;
    let points: Option<PathBuf> = cfg.opt(args.points.clone(), "points")?;
    let mesh: Option<PathBuf> = cfg.opt(args.mesh.clone(), "mesh")?;
    match (points, mesh) {
        (Some(p), None) => transform_points(ctx, &desc, &p, &stem),
        (None, Some(m)) => {
            let k: f64 = cfg.get(args.k, "K", -1.0)?;
            transform_mesh(ctx, &desc, &m, k, &stem)
        }
        _ => Err(Failure::usage("give exactly one of --points or --mesh")),
    }
}

fn transform_points(
    ctx: &Context,
    desc: &MapDescriptor,
    path: &Path,
    stem: &str,
) -> Result<(), Failure> {
    let rows = read_points_csv(path)?;
    let n = rows
        .first()
        .map(|r| r.len() - 1)
        .ok_or_else(|| Failure::usage(format!("{}: no points", path.display())))?;
    let map = desc.to_map(n)?;
    let mut moved = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let p = LorentzPoint::new(row)
            .map_err(|e| Failure::usage(format!("{} row {}: {e}", path.display(), i + 1)))?;
        moved.push(map.apply(&p)?.coords().to_vec());
    }
    let out = ctx.path(&format!("{stem}.csv"))?;
    write_points_csv(&moved, None, &out)?;
    write_json(&ctx.path(&format!("{stem}_map.json"))?, desc)?;
    println!(
        "{} points moved by {:?}({}), form defect {:.2e}: {}",
        moved.len(),
        desc.kind,
        desc.param,
        map.form_defect(),
        out.display()
    );
    Ok(())
}

/// Vertices `(t, x₁, x₂)` of the hyperboloid chart are lifted to the unit
/// hyperboloid, moved, and projected back; heights are unchanged.
fn transform_mesh(
    ctx: &Context,
    desc: &MapDescriptor,
    path: &Path,
    k: f64,
    stem: &str,
) -> Result<(), Failure> {
    if !(k < 0.0 && k.is_finite()) {
        return Err(Failure::usage(format!("--K must be negative, got {k}")));
    }
    let obj = read_obj(path)?;
    if !obj.comments.iter().any(|c| c == "chart: hyperboloid") {
        return Err(Failure::usage(format!(
            "{}: isometries act on meshes exported with --chart hyperboloid",
            path.display()
        )));
    }
    let kappa = (-k).sqrt();
    let map = desc.to_map(2)?;
    let mut vertices = Vec::with_capacity(obj.vertices.len());
    let mut lifted = Vec::with_capacity(obj.vertices.len());
    let mut heights = Vec::with_capacity(obj.vertices.len());
    for v in &obj.vertices {
        let (y1, y2) = (kappa * v[1], kappa * v[2]);
        let p = LorentzPoint::new(vec![(1.0 + y1 * y1 + y2 * y2).sqrt(), y1, y2])?;
        let q = map.apply(&p)?;
        let x = q.coords();
        vertices.push([v[0], x[1] / kappa, x[2] / kappa]);
        lifted.push(x.to_vec());
        heights.push(v[0]);
    }
    let label = obj
        .comments
        .iter()
        .find_map(|c| c.strip_prefix("soliton: "))
        .unwrap_or("mesh");
    let moved = SolitonMesh {
        chart: MeshChart::Hyperboloid,
        vertices,
        faces: obj.faces,
        attributes: Vec::new(),
        label: format!("{label} moved by {:?}({})", desc.kind, desc.param),
        equatorial_slice: obj
            .comments
            .iter()
            .any(|c| c.starts_with("equatorial slice")),
    };
    let out = ctx.path(&format!("{stem}.obj"))?;
    write_obj(&moved, &out)?;
    write_points_csv(
        &lifted,
        Some(&heights),
        &ctx.path(&format!("{stem}_points.csv"))?,
    )?;
    println!("{} vertices moved: {}", moved.vertices.len(), out.display());
    Ok(())
}
