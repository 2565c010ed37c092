//! Job configuration: one JSON document per run, merged with CLI flags.
//!
//! Every parameter the math depends on lands in the output report, so two
//! runs can be diffed by their payloads alone. The config hash in each
//! report is the SHA-256 of the canonical JSON of the effective (merged,
//! defaulted) configuration.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gabor_core::io::{LatticeDescriptor, WindowDescriptor};
use gabor_core::{Grid, WindowSpec};

use crate::{CliError, CliResult};

/// Deserialized job document. All fields optional; defaults are applied
/// and echoed when the command runs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct JobConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage_threshold: Option<f64>,
    /// Per-check threshold overrides for the verify commands. Overrides
    /// looser than the defaults are echoed as warnings, never silent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Sensitivity control: negate the transport phase so the theorem1
    /// check must fail. Debug only.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flip_gamma: bool,
}

impl JobConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = if path.as_os_str() == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Config(format!("reading stdin: {e}")))?;
            buf
        } else {
            fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?
        };
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("parsing {}: {e}", path.display())))
    }

    pub fn grid_or_default(&self) -> CliResult<Grid> {
        match self.grid {
            Some(g) => Ok(g),
            None => Grid::balanced(256).map_err(CliError::Domain),
        }
    }

    pub fn basis_or_default(&self) -> usize {
        self.basis_size.unwrap_or(128)
    }

    pub fn thetas_or_default(&self) -> Vec<f64> {
        self.theta.clone().unwrap_or_else(|| {
            vec![
                0.0,
                std::f64::consts::FRAC_PI_6,
                std::f64::consts::FRAC_PI_4,
                std::f64::consts::FRAC_PI_2,
            ]
        })
    }

    pub fn window_or_default(&self) -> WindowDescriptor {
        self.window
            .clone()
            .unwrap_or(WindowDescriptor::Spec(WindowSpec::Gaussian { width: 1.0 }))
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0x6AB0)
    }

    /// Canonical hash of the effective configuration.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canon.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse the `--grid` flag: either `n,dt,t0` or `balanced:n`.
pub fn parse_grid_flag(s: &str) -> CliResult<Grid> {
    if let Some(n) = s.strip_prefix("balanced:") {
        let n: usize = n
            .parse()
            .map_err(|e| CliError::Config(format!("bad grid size {n:?}: {e}")))?;
        return Grid::balanced(n).map_err(CliError::Domain);
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "--grid expects `n,dt,t0` or `balanced:n`, got {s:?}"
        )));
    }
    let n: usize = parts[0]
        .trim()
        .parse()
        .map_err(|e| CliError::Config(format!("bad n {:?}: {e}", parts[0])))?;
    let dt: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| CliError::Config(format!("bad dt {:?}: {e}", parts[1])))?;
    let t0: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|e| CliError::Config(format!("bad t0 {:?}: {e}", parts[2])))?;
    Grid::new(n, dt, t0).map_err(CliError::Domain)
}

/// Report envelope common to every command.
#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub config_hash: String,
    pub library_version: String,
    pub grid: Grid,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    pub parameters: JobConfig,
    pub warnings: Vec<String>,
    pub results: T,
}

pub fn write_report<T: Serialize>(
    dir: &Path,
    name: &str,
    report: &Report<T>,
) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("creating {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let payload = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("serializing report: {e}")))?;
    fs::write(&path, payload + "\n")
        .map_err(|e| CliError::Config(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}
