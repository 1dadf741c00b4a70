use std::path::Path;

use subqsl_core::linalg::HermitianOperator;
use subqsl_core::scenarios::{sample_instance, two_level};
use subqsl_core::subspace::{project_onto_span, OrthogonalProjector, SubspaceBasis};

use crate::config::{RunConfig, ScenarioConfig};
use crate::error::CliError;
use crate::formats::{parse_basis, parse_matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub hamiltonian: HermitianOperator,
    pub subspace: OrthogonalProjector,
}

/// Materializes the configured scenario; relative paths resolve against `base_dir`.
pub fn build_instances(cfg: &RunConfig, base_dir: &Path) -> Result<Vec<Instance>, CliError> {
    match &cfg.scenario {
        ScenarioConfig::TwoLevel { e1, e2 } => {
            let sc = two_level(*e1, *e2).map_err(|e| CliError::numeric("two_level", e))?;
            Ok(vec![Instance {
                id: "two_level".into(),
                hamiltonian: sc.hamiltonian().clone(),
                subspace: sc.initial().clone(),
            }])
        }
        ScenarioConfig::Ensemble { .. } => {
            let spec = cfg.ensemble_spec().expect("ensemble scenario");
            let width = spec.count.saturating_sub(1).to_string().len();
            (0..spec.count)
                .map(|i| {
                    let id = format!("{}_s{}_{:0width$}", spec.kind.as_str(), spec.seed, i);
                    let (hamiltonian, subspace) = sample_instance(&spec, i).map_err(|e| CliError::numeric(&id, e))?;
                    Ok(Instance { id, hamiltonian, subspace })
                })
                .collect()
        }
        ScenarioConfig::Explicit { matrix, basis } => {
            let matrix_path = base_dir.join(matrix);
            let basis_path = base_dir.join(basis);
            let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::io(p, e));
            let m = parse_matrix(&read(&matrix_path)?)
                .map_err(|message| CliError::Format { path: matrix_path.clone(), message })?;
            let vectors = parse_basis(&read(&basis_path)?, m.rows())
                .map_err(|message| CliError::Format { path: basis_path.clone(), message })?;
            let id = matrix_path.file_stem().map_or("explicit".into(), |s| s.to_string_lossy().into_owned());
            let hamiltonian = HermitianOperator::new(m).map_err(|e| CliError::Format {
                path: matrix_path.clone(),
                message: e.to_string(),
            })?;
            let basis = SubspaceBasis::new(hamiltonian.dim(), vectors).map_err(|e| CliError::Format {
                path: basis_path.clone(),
                message: e.to_string(),
            })?;
            let subspace = project_onto_span(&basis).map_err(|e| CliError::Format {
                path: basis_path.clone(),
                message: e.to_string(),
            })?;
            Ok(vec![Instance { id, hamiltonian, subspace }])
        }
    }
}
