use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Knobs shared by every command. Echoed into output headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub node_count: usize,
    pub n_max_degree: usize,
    pub residual_threshold: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub direction_count: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            node_count: 128,
            n_max_degree: 16,
            residual_threshold: 1e-6,
            mc_samples: 1_000_000,
            seed: 42,
            direction_count: 32,
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    /// One-line `key=value` rendering for file headers.
    pub fn summary(&self) -> String {
        format!(
            "nodes={} max_degree={} threshold={:e} mc_samples={} seed={} directions={} format={}",
            self.node_count,
            self.n_max_degree,
            self.residual_threshold,
            self.mc_samples,
            self.seed,
            self.direction_count,
            self.format
        )
    }
}
