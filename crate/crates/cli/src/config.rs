//! Plain-text key=value configuration. Every key has a documented default;
//! unknown keys are rejected so typos cannot silently fall back.

use fraclab_core::solver::SolverParams;
use fraclab_core::verify::{SuiteConfig, Thresholds};
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub suite: SuiteConfig,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut solver = SolverParams::default();
        let mut t = Thresholds::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got `{line}`", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            let fval = || -> Result<f64, String> {
                value
                    .parse::<f64>()
                    .map_err(|e| format!("line {}: bad number `{value}`: {e}", lineno + 1))
            };
            let uval = || -> Result<usize, String> {
                value
                    .parse::<usize>()
                    .map_err(|e| format!("line {}: bad count `{value}`: {e}", lineno + 1))
            };
            match key {
                "solver.max_iter" => solver.max_iter = uval()?,
                "solver.tol_gap" => solver.tol_gap = fval()?,
                "solver.dual_box" => solver.dual_box = fval()?,
                "solver.collar_fraction" => solver.collar_fraction = fval()?,
                "solver.check_every" => solver.check_every = uval()?,
                "solver.rho_scale" => solver.rho_scale = fval()?,
                "threshold.inversion" => t.inversion = fval()?,
                "threshold.inversion_high_s" => t.inversion_high_s = fval()?,
                "threshold.gradient_identity" => t.gradient_identity = fval()?,
                "threshold.commutation" => t.commutation = fval()?,
                "threshold.hilbert_max_err" => t.hilbert_max_err = fval()?,
                "threshold.hilbert_window" => t.hilbert_window = fval()?,
                "threshold.liouville_fit_residual" => t.liouville_fit_residual = fval()?,
                "threshold.scaling_exact" => t.scaling_exact = fval()?,
                "threshold.ratio_cap" => t.ratio_cap = fval()?,
                "threshold.refine_drift" => t.refine_drift = fval()?,
                "threshold.dilation_drift" => t.dilation_drift = fval()?,
                "threshold.weak_drift" => t.weak_drift = fval()?,
                "threshold.strong_growth" => t.strong_growth = fval()?,
                "threshold.cap_growth" => t.cap_growth = fval()?,
                "threshold.cap_stability" => t.cap_stability = fval()?,
                "threshold.weak_cap_slack" => t.weak_cap_slack = fval()?,
                "threshold.trace_drift" => t.trace_drift = fval()?,
                "threshold.trace_growth" => t.trace_growth = fval()?,
                "threshold.fs_annulus_rel" => t.fs_annulus_rel = fval()?,
                "threshold.fs_scale_dev" => t.fs_scale_dev = fval()?,
                "threshold.divergence_residual" => t.divergence_residual = fval()?,
                "threshold.bmo_drift" => t.bmo_drift = fval()?,
                other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        Ok(Config {
            suite: SuiteConfig {
                thresholds: t,
                solver,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys_and_rejects_unknown() {
        let cfg =
            Config::parse("solver.max_iter = 5\n# comment\nthreshold.weak_drift=0.2\n").unwrap();
        assert_eq!(cfg.suite.solver.max_iter, 5);
        assert_eq!(cfg.suite.thresholds.weak_drift, 0.2);
        assert!(Config::parse("nope=1\n").is_err());
        assert!(Config::parse("solver.max_iter\n").is_err());
    }
}
