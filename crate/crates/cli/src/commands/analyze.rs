use serde::Serialize;

use qdirect_core::io::content_hash;
use qdirect_core::{schmidt_decompose, Basis, Error};

use crate::args::AnalyzeArgs;
use crate::output::{csv_float, read_bytes, Artifacts, CliError, Result};

#[derive(Serialize)]
struct AnalysisFile {
    dim: usize,
    shape: (usize, usize),
    basis: Basis,
    anchor: usize,
    schmidt_number: f64,
    /// Schmidt coefficients above 1e-8.
    schmidt_mode_count: usize,
    /// Probability mass on the correlated diagonal of the basis.
    diagonal_probability: f64,
    total_probability: f64,
}

pub fn execute(args: AnalyzeArgs) -> Result<()> {
    let bytes = read_bytes(&args.state)?;
    let file: qdirect_core::io::StateFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Read { path: args.state.clone(), source: e.into() })?;
    let state = file.to_state()?;
    let Some((d1, d2)) = state.shape() else {
        return Err(Error::NotBipartite(
            "analysis needs a state file with a bipartite shape".into(),
        )
        .into());
    };

    let basis = state.basis();
    if let Some(modes) = basis.mode_count() {
        if modes != d1 || modes != d2 {
            return Err(Error::InvalidBasis(format!(
                "basis labels {modes} modes per photon but the shape is {d1}x{d2}"
            ))
            .into());
        }
    }

    let config = serde_json::json!({
        "command": "analyze",
        "state_file": content_hash(&bytes),
    });
    let artifacts = Artifacts::new(&args.out_dir, args.seed, &config)?;

    let probabilities = state.born_probabilities();
    let schmidt = schmidt_decompose(&state)?;

    let matrix_header = match basis {
        Basis::Flat => "j1,j2,probability",
        Basis::OamWalsh { .. } => "l1,k1,l2,k2,probability",
    };
    artifacts.save_csv(
        "probability_matrix.csv",
        matrix_header,
        (0..d1 * d2).map(|flat| {
            let (j1, j2) = (flat / d2, flat % d2);
            let p = csv_float(probabilities[flat]);
            match basis {
                Basis::Flat => format!("{j1},{j2},{p}"),
                Basis::OamWalsh { .. } => {
                    let (l1, k1) = basis.label_of(j1).expect("checked against shape");
                    let (l2, k2) = basis.label_of(j2).expect("checked against shape");
                    format!("{l1},{k1},{l2},{k2},{p}")
                }
            }
        }),
    )?;

    artifacts.save_csv(
        "schmidt_spectrum.csv",
        "index,singular_value,probability",
        schmidt
            .values()
            .iter()
            .enumerate()
            .map(|(i, &s)| format!("{i},{},{}", csv_float(s), csv_float(s * s))),
    )?;

    let diagonal: Vec<(usize, usize)> = (0..d1)
        .filter_map(|j1| (0..d2).find(|&j2| basis.diagonal_pair(j1, j2)).map(|j2| (j1, j2)))
        .collect();
    let phase_header = match basis {
        Basis::Flat => "j,amplitude,phase",
        Basis::OamWalsh { .. } => "l,k,amplitude,phase",
    };
    artifacts.save_csv(
        "diagonal_phase.csv",
        phase_header,
        diagonal.iter().map(|&(j1, j2)| {
            let c = state.coefficient(j1 * d2 + j2);
            let tail = format!("{},{}", csv_float(c.norm()), csv_float(c.arg()));
            match basis {
                Basis::Flat => format!("{j1},{tail}"),
                Basis::OamWalsh { .. } => {
                    let (l, k) = basis.label_of(j1).expect("checked against shape");
                    format!("{l},{k},{tail}")
                }
            }
        }),
    )?;

    let analysis = AnalysisFile {
        dim: state.dim(),
        shape: (d1, d2),
        basis,
        anchor: state.anchor(),
        schmidt_number: schmidt.schmidt_number(),
        schmidt_mode_count: schmidt.mode_count(1e-8),
        diagonal_probability: diagonal.iter().map(|&(j1, j2)| probabilities[j1 * d2 + j2]).sum(),
        total_probability: probabilities.iter().sum(),
    };
    artifacts.save_pretty("analysis.json", &analysis)?;

    println!(
        "schmidt number {:.4} over {} modes, diagonal probability {:.4}; artifacts in {}",
        analysis.schmidt_number,
        analysis.schmidt_mode_count,
        analysis.diagonal_probability,
        args.out_dir.display()
    );
    Ok(())
}
