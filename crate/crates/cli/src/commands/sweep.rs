//! `sweep`: independent solves over a grid of ε or c, run in parallel.

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use soliton_core::diagnostics::{verify_profile, wing_height_report};
use soliton_core::io::write_profile;
use soliton_core::profile::{solve_bowl, solve_wing, Branch, SolitonSpec, StopPolicy};
use soliton_core::WarpKind;

use super::{warp, write_csv, write_json, BaseParams, SpecArgs};
use crate::config::Context;
use crate::failure::Failure;

/// Caps the number of worker threads.
pub const THREADS_ENV: &str = "SOLITON_FORGE_THREADS";

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Epsilon,
    C,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    Bowl,
    Wing,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Swept parameter [default: epsilon].
    #[arg(long, value_enum)]
    pub param: Option<SweepParam>,
    /// Comma-separated values; overrides --from/--to/--count.
    #[arg(long)]
    pub values: Option<String>,
    /// First value of an evenly spaced grid.
    #[arg(long)]
    pub from: Option<f64>,
    /// Last value of an evenly spaced grid.
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of grid values [default: 5].
    #[arg(long)]
    pub count: Option<usize>,
    /// Family [default: wing for ε sweeps, bowl for c sweeps].
    #[arg(long, value_enum)]
    pub family: Option<SweepFamily>,
    /// Fixed ε of a c sweep over wings [default: 0.5].
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Largest radius of every profile [default: 10].
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    /// File stem of the outputs [default: sweep].
    #[arg(long)]
    pub name: Option<String>,
}

/// Outcome of one solve.
#[derive(Clone, Debug, Serialize)]
struct SweepRecord {
    value: f64,
    file: String,
    samples: usize,
    verified: bool,
    /// Wing quantities, measured on the lower branch.
    r0: Option<f64>,
    gap: Option<f64>,
    gap_lower_bound: Option<f64>,
    gap_upper_bound: Option<f64>,
    bounds_hold: Option<bool>,
    hypothesis_holds: Option<bool>,
}

fn grid(args: &SweepArgs, ctx: &Context) -> Result<Vec<f64>, Failure> {
    let cfg = &ctx.cfg;
    if let Some(text) = cfg.opt(args.values.clone(), "values")? {
        let text: String = text;
        return text
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Failure::usage(format!("bad sweep value `{v}`")))
            })
            .collect();
    }
    let from: Option<f64> = cfg.opt(args.from, "from")?;
    let to: Option<f64> = cfg.opt(args.to, "to")?;
    let count: usize = cfg.get(args.count, "count", 5)?;
    match (from, to) {
        (Some(a), Some(b)) if count >= 2 => Ok((0..count)
            .map(|i| {
                let w = i as f64 / (count - 1) as f64;
                a * (1.0 - w) + b * w
            })
            .collect()),
        (Some(a), Some(_)) if count == 1 => Ok(vec![a]),
        _ => Err(Failure::usage(
            "sweep needs --values or --from, --to and --count ≥ 1",
        )),
    }
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

struct Task {
    param: SweepParam,
    family: SweepFamily,
    base: BaseParams,
    epsilon: f64,
    r_max: f64,
}

impl Task {
    fn solve(&self, ctx: &Context, value: f64, file: &str) -> Result<SweepRecord, Failure> {
        let (c, eps) = match self.param {
            SweepParam::Epsilon => (self.base.c, value),
            SweepParam::C => (value, self.epsilon),
        };
        let w = warp(WarpKind::Rotational, self.base.k)?;
        let policy = StopPolicy::default().with_r_max(self.r_max);
        let path = ctx.out.join(file);
        match self.family {
            SweepFamily::Bowl => {
                let spec = SolitonSpec::bowl(c, self.base.n, w)?;
                let curve = solve_bowl(&spec, 0.0, &policy, &ctx.ode)?;
                write_profile(&curve, &path)?;
                Ok(SweepRecord {
                    value,
                    file: file.to_string(),
                    samples: curve.len(),
                    verified: verify_profile(&curve)?.all_pass(),
                    r0: None,
                    gap: None,
                    gap_lower_bound: None,
                    gap_upper_bound: None,
                    bounds_hold: None,
                    hypothesis_holds: None,
                })
            }
            SweepFamily::Wing => {
                let spec = SolitonSpec::wing(c, self.base.n, eps, w)?;
                let lower = solve_wing(&spec, Branch::Lower, &policy, &ctx.ode)?;
                write_profile(&lower, &path)?;
                let h = wing_height_report(&lower)?;
                Ok(SweepRecord {
                    value,
                    file: file.to_string(),
                    samples: lower.len(),
                    verified: verify_profile(&lower)?.all_pass(),
                    r0: Some(h.r0),
                    gap: Some(h.gap),
                    gap_lower_bound: Some(h.lower_bound),
                    gap_upper_bound: Some(h.upper_bound),
                    bounds_hold: Some(h.pass),
                    hypothesis_holds: Some(h.hypothesis_holds),
                })
            }
        }
    }
}

pub fn run(ctx: &Context, args: &SweepArgs) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let param = cfg.get(args.param, "param", SweepParam::Epsilon)?;
    let default_family = match param {
        SweepParam::Epsilon => SweepFamily::Wing,
        SweepParam::C => SweepFamily::Bowl,
    };
    let family = cfg.get(args.family, "family", default_family)?;
    if param == SweepParam::Epsilon && family == SweepFamily::Bowl {
        return Err(Failure::usage("bowls have no ε; sweep c instead"));
    }
    let task = Task {
        param,
        family,
        base: args.spec.resolve(cfg)?,
        epsilon: cfg.get(args.epsilon, "epsilon", 0.5)?,
        r_max: cfg.get(args.r_max, "r_max", 10.0)?,
    };
    let stem: String = cfg.get(args.name.clone(), "name", "sweep".to_string())?;
    let values = grid(args, ctx)?;
    ctx.path("")?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))?;
    let records: Vec<SweepRecord> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| task.solve(ctx, v, &format!("{stem}_{i:03}.csv")))
            .collect::<Result<_, _>>()
    })?;

    let nan = f64::NAN;
    let flag = |b: Option<bool>| b.map_or(nan, |b| f64::from(u8::from(b)));
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            vec![
                r.value,
                f64::from(u8::from(r.verified)),
                r.r0.unwrap_or(nan),
                r.gap.unwrap_or(nan),
                r.gap_lower_bound.unwrap_or(nan),
                r.gap_upper_bound.unwrap_or(nan),
                flag(r.bounds_hold),
            ]
        })
        .collect();
    write_csv(
        &ctx.path(&format!("{stem}_summary.csv"))?,
        &[
            "value",
            "verified",
            "r0",
            "gap",
            "gap_lower_bound",
            "gap_upper_bound",
            "bounds_hold",
        ],
        &rows,
    )?;
    write_json(&ctx.path(&format!("{stem}_summary.json"))?, &records)?;
    for r in &records {
        match r.gap {
            Some(g) => println!(
                "{:?} = {:<10} verified {:<5} r₀ {:.8} gap {:.8}",
                param,
                r.value,
                r.verified,
                r.r0.unwrap_or(nan),
                g
            ),
            None => println!("{:?} = {:<10} verified {}", param, r.value, r.verified),
        }
    }

    let mut problems: Vec<String> = records
        .iter()
        .filter(|r| !r.verified || r.bounds_hold == Some(false))
        .map(|r| {
            format!(
                "{} (verified {}, bounds {:?})",
                r.value, r.verified, r.bounds_hold
            )
        })
        .collect();
    // the gap grows with ε when K < 0 and (ξ′/ξ)′ ≤ 0
    let monotone_applies = param == SweepParam::Epsilon
        && task.base.k < 0.0
        && records.iter().all(|r| r.hypothesis_holds == Some(true));
    if monotone_applies {
        let mut by_eps: Vec<(f64, f64)> = records
            .iter()
            .filter_map(|r| Some((r.value, r.gap?)))
            .collect();
        by_eps.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = by_eps.windows(2).find(|w| !(w[1].1 > w[0].1)) {
            problems.push(format!(
                "gap not increasing in ε: gap({}) = {} vs gap({}) = {}",
                w[0].0, w[0].1, w[1].0, w[1].1
            ));
        } else {
            println!("gap strictly increasing in ε over {} values", by_eps.len());
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(problems.join("; ")))
    }
}
