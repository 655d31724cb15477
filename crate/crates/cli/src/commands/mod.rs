mod analyze;
mod cross_validate;
mod decompose;
mod run;
mod study;

use std::path::PathBuf;

use qdirect_core::io::{content_hash, StateFile};
use qdirect_core::StateVector;

use crate::args::{Cli, Command, DimsSpec};
use crate::output::{read_bytes, CliError, Result};

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose(args) => decompose::execute(args),
        Command::Run(args) => run::execute(args),
        Command::Analyze(args) => analyze::execute(args),
        Command::Study(args) => study::execute(args),
        Command::CrossValidate(args) => cross_validate::execute(args),
    }
}

/// The state a command measures, plus a JSON receipt of where it came from
/// for the configuration hash: the demo parameters, or the input file's
/// content digest.
pub(crate) struct SourceState {
    pub state: StateVector,
    pub origin: serde_json::Value,
}

pub(crate) fn resolve_source(
    state: &Option<PathBuf>,
    demo: bool,
    dims: &Option<DimsSpec>,
) -> Result<SourceState> {
    match (state, demo) {
        (Some(path), _) => {
            let bytes = read_bytes(path)?;
            let file: StateFile = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Read { path: path.clone(), source: e.into() })?;
            Ok(SourceState {
                state: file.to_state()?,
                origin: serde_json::json!({ "state_file": content_hash(&bytes) }),
            })
        }
        (None, true) => {
            let spec = dims.ok_or_else(|| {
                CliError::usage("--demo needs --dims (DxD with D odd, or AxB-oam-walsh)")
            })?;
            let params = spec.demo_params().map_err(CliError::Usage)?;
            Ok(SourceState {
                state: qdirect_core::generate_demo_state(&params)?,
                origin: serde_json::json!({ "demo": params }),
            })
        }
        (None, false) => Err(CliError::usage("provide --state FILE or --demo")),
    }
}
