use serde::Serialize;

use qdirect_core::io::StateFile;
use qdirect_core::{
    build_full_plan, choose_reference, error_bounds, reconstruct, simulate_counts, Basis,
    CoefficientError, CountRecord, Dims, ShotModel, Source,
};

use crate::args::RunArgs;
use crate::output::{Artifacts, CliError, Result};

#[derive(Serialize)]
struct BoundsFile {
    bounds: Vec<CoefficientError>,
}

#[derive(Serialize)]
struct RunSummary {
    dims: Dims,
    basis: Basis,
    reference: usize,
    setting_count: usize,
    shot: ShotModel,
    fidelity: f64,
    simulated_duration_seconds: f64,
    total_counts: f64,
}

pub fn execute(args: RunArgs) -> Result<()> {
    let source = super::resolve_source(&args.state, args.demo, &args.dims)?;
    let state = &source.state;

    let reference = match args.reference {
        Some(spec) => spec.flatten(state.dims()).map_err(CliError::Usage)?,
        None => choose_reference(&state.born_probabilities()),
    };
    let shot = ShotModel {
        reference_rate: args.rate,
        t_off_diagonal: args.t_off_diagonal,
        t_diagonal: args.t_diagonal,
        noise: args.noise.into(),
        ..ShotModel::default()
    };
    shot.validate()?;

    let config = serde_json::json!({
        "command": "run",
        "source": source.origin,
        "reference": reference,
        "shot": shot,
        "seed": args.seed,
    });
    let artifacts = Artifacts::new(&args.out_dir, args.seed, &config)?;

    let plan = build_full_plan(state.dims(), state.basis(), reference)?;
    let record = simulate_counts(Source::Pure(state), &plan, &shot, args.seed)?;
    let estimate = reconstruct(&record, &plan)?;
    let bounds = error_bounds(&record, &plan)?;
    let fidelity = estimate.fidelity(state)?;

    let summary = RunSummary {
        dims: state.dims(),
        basis: state.basis(),
        reference,
        setting_count: plan.setting_count(),
        shot,
        fidelity,
        simulated_duration_seconds: simulated_duration(&record),
        total_counts: total_counts(&record),
    };

    artifacts.save_compact("plan.json", &plan)?;
    artifacts.save_compact("counts.json", &record)?;
    artifacts.save_pretty("estimate.json", StateFile::from_state(&estimate))?;
    artifacts.save_pretty("error_bounds.json", BoundsFile { bounds })?;
    artifacts.save_pretty("summary.json", &summary)?;

    println!(
        "fidelity {:.6} from {} settings ({:.3e} counts over {:.3e} simulated seconds); artifacts in {}",
        summary.fidelity,
        summary.setting_count,
        summary.total_counts,
        summary.simulated_duration_seconds,
        args.out_dir.display()
    );
    Ok(())
}

fn simulated_duration(record: &CountRecord) -> f64 {
    record
        .blocks
        .iter()
        .map(|b| b.monitor.duration + b.projectors.iter().map(|m| m.duration).sum::<f64>())
        .sum()
}

fn total_counts(record: &CountRecord) -> f64 {
    record
        .blocks
        .iter()
        .map(|b| b.monitor.counts + b.projectors.iter().map(|m| m.counts).sum::<f64>())
        .sum()
}
