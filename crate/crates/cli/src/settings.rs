//! Shared flags, the key=value config file and grid/order parsing.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::Args;
use fockloss::corpus::{expand_specs, NamedState};
use fockloss::phase_space::Quadrature2D;

/// Usage or configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<fockloss::Error> for UsageError {
    fn from(e: fockloss::Error) -> Self {
        UsageError(e.to_string())
    }
}

pub type Usage<T> = std::result::Result<T, UsageError>;

pub fn usage<T>(msg: impl Into<String>) -> Usage<T> {
    Err(UsageError(msg.into()))
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// State list, e.g. `fock:1`, `coherent:1,0.5`, `random:200`, `file:rho.txt`; `;`-separated
    #[arg(long, visible_alias = "state")]
    pub states: Option<String>,
    /// Parameter grid `start:stop:steps`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Quasiprobability orders, comma-separated
    #[arg(long = "s", allow_hyphen_values = true)]
    pub orders: Option<String>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for random corpora
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiplier applied to every default tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Accept Hermitian trace-one operators that are not positive
    #[arg(long)]
    pub allow_nonpositive: bool,
    /// Phase-space quadrature sizes `radial:angular`
    #[arg(long)]
    pub quadrature: Option<String>,
    /// Plain-text `key = value` file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;

/// Keys a config file may set, by command.
const COMMON_KEYS: [&str; 8] = ["states", "grid", "s", "out", "seed", "tol", "allow-nonpositive", "quadrature"];

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path, extra_keys: &[&str]) -> Usage<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("config line {}: expected key = value", n + 1));
        };
        let k = k.trim().trim_start_matches("--").to_string();
        if !COMMON_KEYS.contains(&k.as_str()) && !extra_keys.contains(&k.as_str()) {
            return usage(format!("config line {}: unknown key '{k}'", n + 1));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Fills an unset flag from the config map.
pub fn fill<T: std::str::FromStr>(slot: &mut Option<T>, map: &HashMap<String, String>, key: &str) -> Usage<()> {
    if slot.is_none() {
        if let Some(v) = map.get(key) {
            *slot = Some(v.parse().map_err(|_| UsageError(format!("config key '{key}': cannot parse '{v}'")))?);
        }
    }
    Ok(())
}

impl Common {
    /// Merges the config file (if any) under the flags; returns the map for command-specific keys.
    pub fn merge_config(&mut self, extra_keys: &[&str]) -> Usage<HashMap<String, String>> {
        let Some(path) = self.config.clone() else {
            return Ok(HashMap::new());
        };
        let map = read_config(&path, extra_keys)?;
        fill(&mut self.states, &map, "states")?;
        fill(&mut self.grid, &map, "grid")?;
        fill(&mut self.orders, &map, "s")?;
        fill(&mut self.out, &map, "out")?;
        fill(&mut self.seed, &map, "seed")?;
        fill(&mut self.tol, &map, "tol")?;
        fill(&mut self.quadrature, &map, "quadrature")?;
        if !self.allow_nonpositive {
            if let Some(v) = map.get("allow-nonpositive") {
                self.allow_nonpositive = v.parse().map_err(|_| UsageError(format!("config key 'allow-nonpositive': cannot parse '{v}'")))?;
            }
        }
        Ok(map)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn tol_factor(&self) -> Usage<f64> {
        match self.tol {
            None => Ok(1.0),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => usage(format!("--tol must be a positive multiplier, got {t}")),
        }
    }

    pub fn states_or(&self, default: &str) -> Usage<Vec<NamedState>> {
        let spec = self.states.as_deref().unwrap_or(default);
        let states = expand_specs(spec, self.seed(), self.allow_nonpositive)?;
        if states.is_empty() {
            return usage("state list is empty");
        }
        Ok(states)
    }

    pub fn grid_or(&self, default: &str) -> Usage<Vec<f64>> {
        parse_grid(self.grid.as_deref().unwrap_or(default))
    }

    pub fn orders_or(&self, default: &[f64]) -> Usage<Vec<f64>> {
        match &self.orders {
            None => Ok(default.to_vec()),
            Some(text) => {
                let v: Vec<f64> = text
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| UsageError(format!("bad order '{x}' in --s"))))
                    .collect::<Usage<_>>()?;
                if v.iter().any(|s| !(*s < 1.0)) {
                    return usage("orders must satisfy s < 1");
                }
                Ok(v)
            }
        }
    }

    pub fn quadrature(&self) -> Usage<Quadrature2D> {
        match &self.quadrature {
            None => Ok(Quadrature2D::default()),
            Some(text) => {
                let (r, t) = text.split_once(':').ok_or_else(|| UsageError(format!("--quadrature expects r:theta, got '{text}'")))?;
                let parse = |x: &str| x.trim().parse::<usize>().ok().filter(|&n| n > 0);
                match (parse(r), parse(t)) {
                    (Some(r), Some(t)) => Ok(Quadrature2D::new(r, t)),
                    _ => usage(format!("--quadrature expects two positive integers, got '{text}'")),
                }
            }
        }
    }
}

/// `start:stop:steps` with `steps ≥ 1` points, endpoints included.
pub fn parse_grid(text: &str) -> Usage<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || UsageError(format!("malformed grid '{text}', expected start:stop:steps"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() || (n > 1 && b < a) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.25:0.25:1").unwrap(), vec![0.25]);
        let g = parse_grid("0:1:101").unwrap();
        assert_eq!(g[50], 0.5);
        for bad in ["0:1", "0:1:0", "a:1:3", "1:0:3", "0:1:2:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
