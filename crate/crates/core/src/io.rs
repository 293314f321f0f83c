//! File formats: profile and graph CSV with JSON sidecars, diagnostics
//! reports, flow trajectories, OBJ meshes and point sets.
//!
//! Floats are written with 17 significant digits so identical inputs give
//! byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsReport;
use crate::error::{Result, SolitonError};
use crate::flow::FlowTrajectory;
use crate::graph::{Chart, GradientBlowup, GraphEquation, RadialGraph};
use crate::mesh::SolitonMesh;
use crate::ode::OdeOptions;
use crate::profile::{Branch, Family, ProfileCurve, ProfileState, SolitonSpec, Termination};
use crate::warp::{WarpKind, WarpModel};

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| SolitonError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| SolitonError::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| SolitonError::io(path, e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| SolitonError::Parse(format!("cannot serialise: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| SolitonError::Parse(format!("{}: {e}", path.display())))
}

/// Writes rows of floats under a header.
fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    write_text(path, &out)
}

/// Reads a numeric CSV; returns the header and the rows.
fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    SolitonError::Parse(format!(
                        "{}: row {}: `{f}` is not a number",
                        path.display(),
                        i + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn csv_error(path: &Path, e: csv::Error) -> SolitonError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => SolitonError::io(path, io),
            other => SolitonError::Parse(format!("{}: {other:?}", path.display())),
        }
    } else {
        SolitonError::Parse(format!("{}: {e}", path.display()))
    }
}

fn expect_header(path: &Path, header: &[String], expected: &[&str]) -> Result<()> {
    if header
        .iter()
        .map(String::as_str)
        .eq(expected.iter().copied())
    {
        Ok(())
    } else {
        Err(SolitonError::Parse(format!(
            "{}: expected columns {}, found {}",
            path.display(),
            expected.join(","),
            header.join(",")
        )))
    }
}

/// The JSON sidecar path of a CSV file: same stem, `.json` extension.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Base metric as recorded in metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpMeta {
    pub kind: WarpKind,
    /// Sectional curvature of the constant-curvature models; absent for
    /// tabulated or custom warps.
    pub curvature: Option<f64>,
    pub label: String,
}

/// A [`SolitonSpec`] as recorded in metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecMeta {
    #[serde(flatten)]
    pub family: Family,
    pub c: f64,
    pub n: u32,
    pub warp: WarpMeta,
}

impl SpecMeta {
    pub fn from_spec(spec: &SolitonSpec) -> Self {
        SpecMeta {
            family: spec.family,
            c: spec.c,
            n: spec.n,
            warp: WarpMeta {
                kind: spec.warp.kind(),
                curvature: spec.warp.constant_curvature(),
                label: spec.warp.label().to_string(),
            },
        }
    }

    /// Rebuilds the `SolitonSpec`; only constant-curvature warps can be restored.
    pub fn to_spec(&self) -> Result<SolitonSpec> {
        let k = self.warp.curvature.ok_or_else(|| {
            SolitonError::Incompatible(format!(
                "warp `{}` has no closed form; supply it explicitly",
                self.warp.label
            ))
        })?;
        let warp = WarpModel::builtin(self.warp.kind, k)?;
        SolitonSpec::new(self.c, self.n, self.family, warp)
    }
}

/// Sidecar of a profile CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub spec: SpecMeta,
    pub tolerances: OdeOptions,
    pub termination: Option<Termination>,
    pub branch: Option<Branch>,
    pub samples: usize,
}

impl ProfileMetadata {
    pub fn from_curve(curve: &ProfileCurve) -> Self {
        ProfileMetadata {
            spec: SpecMeta::from_spec(&curve.spec),
            tolerances: curve.options,
            termination: Some(curve.termination),
            branch: curve.branch,
            samples: curve.len(),
        }
    }
}

const PROFILE_COLUMNS: [&str; 4] = ["s", "r", "t", "phi"];

/// Writes samples as `s,r,t,phi` plus the sidecar.
pub fn write_profile_samples(
    samples: &[ProfileState],
    meta: &ProfileMetadata,
    path: &Path,
) -> Result<()> {
    if samples.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    write_table(
        path,
        &PROFILE_COLUMNS,
        samples.iter().map(|p| vec![p.s, p.r, p.t, p.phi]),
    )?;
    let meta = ProfileMetadata {
        samples: samples.len(),
        ..meta.clone()
    };
    write_json(&meta, &sidecar_path(path))
}

/// Writes a solved profile and its sidecar.
pub fn write_profile(curve: &ProfileCurve, path: &Path) -> Result<()> {
    write_profile_samples(&curve.samples, &ProfileMetadata::from_curve(curve), path)
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<ProfileState>> {
    let (header, rows) = read_table(path)?;
    expect_header(path, &header, &PROFILE_COLUMNS)?;
    if rows.is_empty() {
        return Err(SolitonError::Parse(format!(
            "{}: no samples",
            path.display()
        )));
    }
    Ok(rows
        .into_iter()
        .map(|r| ProfileState::new(r[0], r[1], r[2], r[3]))
        .collect())
}

pub fn read_profile_metadata(csv_path: &Path) -> Result<ProfileMetadata> {
    read_json(&sidecar_path(csv_path))
}

/// Sidecar of a graph CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub spec: SpecMeta,
    pub chart: Chart,
    pub equation: GraphEquation,
    pub blowups: Vec<GradientBlowup>,
    pub nodes: usize,
}

const GRAPH_COLUMNS: [&str; 3] = ["r", "u", "du"];

/// Writes a graph as `r,u,du` plus the sidecar.
pub fn write_graph(graph: &RadialGraph, path: &Path) -> Result<()> {
    if graph.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    write_table(
        path,
        &GRAPH_COLUMNS,
        (0..graph.len()).map(|i| vec![graph.r[i], graph.u[i], graph.du[i]]),
    )?;
    let meta = GraphMetadata {
        spec: SpecMeta::from_spec(&graph.spec),
        chart: graph.chart,
        equation: graph.equation,
        blowups: graph.blowups.clone(),
        nodes: graph.len(),
    };
    write_json(&meta, &sidecar_path(path))
}

/// Graph samples `(r, u, u′)`.
pub fn read_graph_csv(path: &Path) -> Result<Vec<[f64; 3]>> {
    let (header, rows) = read_table(path)?;
    expect_header(path, &header, &GRAPH_COLUMNS)?;
    Ok(rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
}

/// Writes a diagnostics report as a JSON array of check records.
pub fn write_report(report: &DiagnosticsReport, path: &Path) -> Result<()> {
    if report.entries.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    write_json(&report.entries, path)
}

/// Writes `tau,F,D,dF/dtau`.
pub fn write_trajectory(traj: &FlowTrajectory, path: &Path) -> Result<()> {
    if traj.tau.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    let d = traj.df_dtau();
    write_table(
        path,
        &["tau", "F", "D", "dF/dtau"],
        (0..traj.tau.len())
            .map(|i| vec![traj.tau[i], traj.f_values[i], traj.defect_values[i], d[i]]),
    )
}

/// Writes each snapshot as `dir/{stem}_{index:04}.csv` with columns
/// `r,u`; the flow times are listed in `dir/{stem}_index.csv`.
pub fn write_snapshots(traj: &FlowTrajectory, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if traj.snapshots.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    let mut paths = Vec::with_capacity(traj.snapshots.len());
    let mut index = String::from("index,tau,file\n");
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let name = format!("{stem}_{i:04}.csv");
        let path = dir.join(&name);
        write_table(
            &path,
            &["r", "u"],
            snap.r_grid().iter().zip(&snap.u).map(|(&r, &u)| vec![r, u]),
        )?;
        index.push_str(&format!("{i},{},{name}\n", fmt_f64(snap.tau)));
        paths.push(path);
    }
    write_text(&dir.join(format!("{stem}_index.csv")), &index)?;
    Ok(paths)
}

/// Reads initial data `r,u` for the flow.
pub fn read_snapshot_csv(path: &Path) -> Result<Vec<[f64; 2]>> {
    let (header, rows) = read_table(path)?;
    expect_header(path, &header, &["r", "u"])?;
    Ok(rows.into_iter().map(|r| [r[0], r[1]]).collect())
}

/// OBJ text: a comment header with spec and chart, `v` lines, then 1-based
/// `f` lines.
pub fn obj_string(mesh: &SolitonMesh) -> Result<String> {
    if mesh.is_empty() {
        return Err(SolitonError::NothingToExport);
    }
    let mut out = String::new();
    out.push_str(&format!("# soliton: {}\n", mesh.label));
    out.push_str(&format!("# chart: {}\n", mesh.chart.name()));
    if mesh.equatorial_slice {
        out.push_str("# equatorial slice through the rotation axis\n");
    }
    out.push_str(&format!(
        "# vertices: {} faces: {}\n",
        mesh.vertices.len(),
        mesh.faces.len()
    ));
    for v in &mesh.vertices {
        out.push_str(&format!(
            "v {} {} {}\n",
            fmt_f64(v[0]),
            fmt_f64(v[1]),
            fmt_f64(v[2])
        ));
    }
    for f in &mesh.faces {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    Ok(out)
}

pub fn write_obj(mesh: &SolitonMesh, path: &Path) -> Result<()> {
    write_text(path, &obj_string(mesh)?)
}

/// Geometry recovered from an OBJ file; faces are 0-based.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjData {
    pub comments: Vec<String>,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

/// Parses `v` and triangular `f` records; `f` entries may carry `/vt/vn`.
pub fn parse_obj(text: &str) -> Result<ObjData> {
    let mut data = ObjData::default();
    for (lineno, line) in text.lines().enumerate() {
        let bad = |what: &str| SolitonError::Parse(format!("OBJ line {}: {what}", lineno + 1));
        let line = line.trim();
        if let Some(c) = line.strip_prefix('#') {
            data.comments.push(c.trim().to_string());
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let xs: Vec<f64> = parts
                    .map(|p| p.parse::<f64>().map_err(|_| bad("bad coordinate")))
                    .collect::<Result<_>>()?;
                if xs.len() < 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                data.vertices.push([xs[0], xs[1], xs[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|p| {
                        p.split('/')
                            .next()
                            .and_then(|i| i.parse::<usize>().ok())
                            .filter(|&i| i >= 1)
                            .map(|i| i - 1)
                            .ok_or_else(|| bad("bad face index"))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(bad("only triangles are supported"));
                }
                data.faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    if let Some(f) = data
        .faces
        .iter()
        .find(|f| f.iter().any(|&i| i >= data.vertices.len()))
    {
        return Err(SolitonError::Parse(format!(
            "OBJ face {f:?} references a missing vertex"
        )));
    }
    Ok(data)
}

pub fn read_obj(path: &Path) -> Result<ObjData> {
    parse_obj(&read_text(path)?)
}

/// Reads points `x0,…,xn` in Lorentz coordinates; extra columns are ignored
/// unless named `x<k>`.
pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let (header, rows) = read_table(path)?;
    let dim = header
        .iter()
        .enumerate()
        .take_while(|(i, h)| **h == format!("x{i}"))
        .count();
    if dim < 2 {
        return Err(SolitonError::Parse(format!(
            "{}: expected columns x0,x1,…, found {}",
            path.display(),
            header.join(",")
        )));
    }
    Ok(rows.into_iter().map(|r| r[..dim].to_vec()).collect())
}

/// Writes points `x0,…,xn`, with a trailing `height` column when given.
pub fn write_points_csv(points: &[Vec<f64>], heights: Option<&[f64]>, path: &Path) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(SolitonError::NothingToExport);
    };
    let dim = first.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(SolitonError::InvalidParameter(
            "points of mixed dimension".into(),
        ));
    }
    if let Some(h) = heights {
        if h.len() != points.len() {
            return Err(SolitonError::InvalidParameter(format!(
                "{} heights for {} points",
                h.len(),
                points.len()
            )));
        }
    }
    let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    if heights.is_some() {
        header.push("height".into());
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(
        path,
        &header,
        points.iter().enumerate().map(|(i, p)| {
            let mut row = p.clone();
            if let Some(h) = heights {
                row.push(h[i]);
            }
            row
        }),
    )
}
