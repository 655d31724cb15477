use qdirect_core::{cross_validate, CrossValidationOptions, ShotModel};

use crate::args::CrossValidateArgs;
use crate::output::{Artifacts, Result};

pub fn execute(args: CrossValidateArgs) -> Result<()> {
    let source = super::resolve_source(&args.state, args.demo, &args.dims)?;

    let options = CrossValidationOptions {
        batches: args.batches,
        settings_per_batch: args.settings_per_batch,
        tomography_rate: args.tomography_rate,
        integration_time: args.integration_time,
        shot: ShotModel {
            reference_rate: args.rate,
            t_off_diagonal: args.t_off_diagonal,
            t_diagonal: args.t_diagonal,
            noise: args.noise.into(),
            ..ShotModel::default()
        },
        seed: args.seed,
    };

    let config = serde_json::json!({
        "command": "cross-validate",
        "source": source.origin,
        "options": options,
    });
    let artifacts = Artifacts::new(&args.out_dir, args.seed, &config)?;

    let report = cross_validate(&source.state, &options)?;
    artifacts.save_pretty("cross_validation.json", &report)?;

    println!(
        "direct fidelity {:.6}; tomography over {} batches: fidelity {:.6} +- {:.6}, \
         purity {:.6} +- {:.6}; artifacts in {}",
        report.direct_fidelity,
        report.batches.len(),
        report.mean_fidelity,
        report.fidelity_std,
        report.mean_purity,
        report.purity_std,
        args.out_dir.display()
    );
    Ok(())
}
