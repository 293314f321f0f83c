//! `verify --input <csv>`.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soliton_core::diagnostics::{drift_identity_at, tolerances, verify_samples, CheckRecord};
use soliton_core::io::{read_profile_csv, read_profile_metadata};
use soliton_core::profile::ProfileState;

use super::finish;
use crate::config::Context;
use crate::failure::Failure;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Profile CSV (`s,r,t,phi`) with its JSON sidecar next to it.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Random states, drawn with `--seed`, at which the drift identity is
    /// evaluated for the recorded spec [default: 1000].
    #[arg(long = "random-states")]
    pub random_states: Option<usize>,
}

pub fn run(ctx: &Context, args: &VerifyArgs) -> Result<(), Failure> {
    let input: PathBuf = ctx
        .cfg
        .opt(args.input.clone(), "input")?
        .ok_or_else(|| Failure::usage("verify needs --input <csv>"))?;
    let states: usize = ctx.cfg.get(args.random_states, "random_states", 1000)?;
    let samples = read_profile_csv(&input)?;
    let spec = read_profile_metadata(&input)?.spec.to_spec()?;
    let mut report = verify_samples(&samples, &spec)?;

    let r_hi = samples
        .iter()
        .map(|p| p.r.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let residuals: Vec<f64> = (0..states)
        .map(|_| {
            let r = rng.random_range(1e-3..r_hi);
            let phi = rng.random_range(-PI..PI);
            drift_identity_at(&ProfileState::new(0.0, r, 0.0, phi), &spec)
        })
        .collect();
    if states > 0 {
        report.push(CheckRecord::from_residuals(
            "random_drift_identity",
            &residuals,
            tolerances::ALGEBRAIC,
        ));
    }

    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("profile")
        .to_string();
    println!("{}: {} samples", spec.describe(), samples.len());
    finish(&report, &ctx.path(&format!("{stem}_verify.json"))?)
}
