use qdirect_core::{run_mixed_state_study, MixedStudyConfig};

use crate::args::StudyArgs;
use crate::output::{csv_float, read_bytes, Artifacts, CliError, Result};

pub fn execute(args: StudyArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let bytes = read_bytes(path)?;
            serde_json::from_slice::<MixedStudyConfig>(&bytes)
                .map_err(|e| CliError::Read { path: path.clone(), source: e.into() })?
        }
        None => MixedStudyConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    let hash_input = serde_json::json!({ "command": "study", "config": config });
    let artifacts = Artifacts::new(&args.out_dir, config.seed, &hash_input)?;

    let result = run_mixed_state_study(&config)?;

    artifacts.save_csv(
        "study_trials.csv",
        "dim,rank,purity,trial,fidelity",
        result.cells.iter().flat_map(|cell| {
            cell.fidelities.iter().enumerate().map(move |(trial, &f)| {
                format!(
                    "{},{},{},{trial},{}",
                    cell.dim,
                    cell.rank,
                    csv_float(cell.purity),
                    csv_float(f)
                )
            })
        }),
    )?;

    artifacts.save_csv(
        "success_vs_purity.csv",
        "dim,rank,purity,feasible,trials,success_fraction",
        result.cells.iter().map(|cell| {
            format!(
                "{},{},{},{},{},{}",
                cell.dim,
                cell.rank,
                csv_float(cell.purity),
                cell.feasible,
                cell.fidelities.len(),
                csv_float(cell.success_fraction)
            )
        }),
    )?;

    artifacts.save_pretty("study.json", &result)?;

    let feasible = result.cells.iter().filter(|c| c.feasible).count();
    let skipped = result.cells.len() - feasible;
    let worst = result
        .cells
        .iter()
        .filter(|c| c.feasible)
        .map(|c| c.success_fraction)
        .fold(f64::NAN, f64::min);
    println!(
        "{feasible} feasible cells ({skipped} infeasible skipped), {} trials each, \
         worst success fraction {worst:.4}; artifacts in {}",
        config.trials,
        args.out_dir.display()
    );
    Ok(())
}
