use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Values read from `--config FILE`. Keys match the long flag names with
/// `-` replaced by `_`; flags given on the command line win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub set: Option<String>,
    pub line: Option<String>,
    pub point: Option<String>,
    pub start: Option<String>,
    pub region: Option<String>,
    pub res: Option<String>,
    pub iters: Option<usize>,
    pub steps: Option<usize>,
    pub match_tol: Option<f64>,
    pub max_period: Option<usize>,
    pub grid: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub addr: Option<String>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = RunConfig {
            set: Some("ellipse:b=2".into()),
            line: Some("slope=2,intercept=0.25".into()),
            region: Some("-4:4:-4:4".into()),
            iters: Some(300),
            match_tol: Some(1e-3),
            out: Some("b.ppm".into()),
            ..RunConfig::default()
        };
        let back: RunConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(toml::from_str::<RunConfig>("colour = 3").is_err());
    }
}
