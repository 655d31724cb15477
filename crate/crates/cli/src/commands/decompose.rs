use qdirect_core::io::DecompositionFile;
use qdirect_core::{decompose_column, ColumnOperator};

use crate::args::DecomposeArgs;
use crate::output::{Artifacts, CliError, Result};

pub fn execute(args: DecomposeArgs) -> Result<()> {
    let dims = args.dims.dims();
    let reference = args.reference.flatten(dims).map_err(CliError::Usage)?;
    let target = args.target.flatten(dims).map_err(CliError::Usage)?;

    let operator = ColumnOperator::new(dims, reference, target)?;
    let decomposition = decompose_column(&operator)?;

    let config = serde_json::json!({
        "command": "decompose",
        "dims": dims,
        "reference": reference,
        "target": target,
    });
    let artifacts = Artifacts::new(&args.out_dir, args.seed, &config)?;
    let path =
        artifacts.save_pretty("decomposition.json", DecompositionFile::from_decomposition(&decomposition))?;

    println!(
        "{} projector terms, residual {:.3e}, wrote {}",
        decomposition.terms().len(),
        decomposition.residual(),
        path.display()
    );
    Ok(())
}
