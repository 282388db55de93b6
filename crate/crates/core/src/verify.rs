//! Named verification suites binding operators, norms, and capacities to
//! measured pass/fail verdicts. Every check carries its numeric threshold in
//! the report; nothing depends on hidden state, and a fixed configuration
//! reproduces byte-identical reports regardless of worker count.

use crate::capacity::{
    level_set_capacity_integral, trace_ratio, DiscreteMeasure, DyadicSet, TraceMode,
};
use crate::error::{Error, Result};
use crate::fft;
use crate::fracops::{self, FracOrder, OperatorMethod, Side};
use crate::gamma::gamma_eval;
use crate::grid::{sample, subtract_mean, Grid, ScalarField, TestFamily};
use crate::norms::{self, HardyVariant, SeminormKind};
use crate::solver::{variational_capacity, CapacityKind, CapacityProblem, SolverParams};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// One measured check inside a suite report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub paper_ref: String,
    pub measured: f64,
    pub threshold: f64,
    pub relation: String,
    pub verdict: String,
}

impl Check {
    pub fn le(id: &str, statement: &str, measured: f64, threshold: f64) -> Self {
        Check {
            id: id.to_string(),
            paper_ref: statement.to_string(),
            measured,
            threshold,
            relation: "<=".to_string(),
            verdict: if measured <= threshold {
                "pass"
            } else {
                "fail"
            }
            .to_string(),
        }
    }

    pub fn ge(id: &str, statement: &str, measured: f64, threshold: f64) -> Self {
        Check {
            id: id.to_string(),
            paper_ref: statement.to_string(),
            measured,
            threshold,
            relation: ">=".to_string(),
            verdict: if measured >= threshold {
                "pass"
            } else {
                "fail"
            }
            .to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub n: usize,
    pub npts: usize,
    pub half_extent: f64,
    pub periodic: bool,
    pub s: Vec<f64>,
}

impl Environment {
    fn new(grid: Grid, s: &[f64]) -> Self {
        Environment {
            n: grid.n,
            npts: grid.npts,
            half_extent: grid.half_extent,
            periodic: grid.periodic,
            s: s.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub environment: Environment,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Frozen thresholds; each was fixed after a refinement study and lives in
/// the report next to the value it judges.
#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    pub inversion: f64,
    pub inversion_high_s: f64,
    pub gradient_identity: f64,
    pub commutation: f64,
    pub hilbert_max_err: f64,
    pub hilbert_window: f64,
    pub liouville_fit_residual: f64,
    pub scaling_exact: f64,
    pub ratio_cap: f64,
    pub refine_drift: f64,
    pub dilation_drift: f64,
    pub weak_drift: f64,
    pub strong_growth: f64,
    pub cap_growth: f64,
    pub cap_stability: f64,
    pub weak_cap_slack: f64,
    pub trace_drift: f64,
    pub trace_growth: f64,
    pub fs_annulus_rel: f64,
    pub fs_scale_dev: f64,
    pub divergence_residual: f64,
    pub bmo_drift: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            inversion: 1e-6,
            inversion_high_s: 1e-5,
            gradient_identity: 1e-8,
            commutation: 1e-10,
            hilbert_max_err: 1e-2,
            hilbert_window: 4.0,
            liouville_fit_residual: 1e-3,
            scaling_exact: 1e-12,
            ratio_cap: 1e3,
            refine_drift: 0.10,
            dilation_drift: 0.03,
            weak_drift: 0.15,
            // the concentration-family ratio grows like a power of
            // log(1/eps); the refinement study measured per-halving factors
            // of 1.05-1.27 declining along the sweep, so the frozen floor
            // certifies sustained growth without overclaiming the rate
            strong_growth: 1.05,
            cap_growth: 1.05,
            cap_stability: 0.20,
            weak_cap_slack: 1e-3,
            trace_drift: 0.10,
            trace_growth: 1.2,
            fs_annulus_rel: 5e-2,
            fs_scale_dev: 0.15,
            divergence_residual: 1e-10,
            bmo_drift: 0.15,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub thresholds: Thresholds,
    pub solver: SolverParams,
}

/// Scalar c with ln|x| = sum_j R_j(c x_j/|x|) for n >= 2, derived from the
/// transforms of both sides; equals 1 in the plane.
pub fn log_decomposition_scale(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Op("the log decomposition needs n >= 2".into()));
    }
    let nf = n as f64;
    Ok(PI.sqrt() * gamma_eval(nf / 2.0)? / (2.0 * gamma_eval((nf + 1.0) / 2.0)?))
}

fn rel_linf(a: &ScalarField, b: &ScalarField) -> f64 {
    let scale = b.max_abs().max(1e-300);
    a.values
        .iter()
        .zip(&b.values)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

fn family_pair(grid: Grid) -> Vec<(String, ScalarField)> {
    let radius = (grid.half_extent / 8.0).clamp(0.5, 1.0);
    vec![
        (
            "gaussian".into(),
            sample(&TestFamily::gaussian(1.0), grid).expect("gaussian fits default boxes"),
        ),
        (
            "bump".into(),
            sample(&TestFamily::bump(radius), grid).expect("bump fits default boxes"),
        ),
    ]
}

/// Interval indicator sampled with half-values at grid-aligned endpoints,
/// the Fourier-natural convention for a jump.
fn interval_indicator(grid: Grid, radius: f64) -> Result<ScalarField> {
    ScalarField::from_fn(grid, |x| {
        let d = x[0].abs();
        if (d - radius).abs() < 1e-12 {
            0.5
        } else if d < radius {
            1.0
        } else {
            0.0
        }
    })
}

fn hilbert_identity_error(grid: Grid, window: f64) -> Result<f64> {
    let ind = subtract_mean(&interval_indicator(grid, 1.0)?);
    let h = fracops::riesz_transform(&ind, 0)?;
    let mut max_err = 0.0f64;
    for i in 0..grid.len() {
        let x = grid.point(i)[0];
        if (x - 1.0).abs() >= 0.25 && (x + 1.0).abs() >= 0.25 && x.abs() <= window {
            let target = ((x + 1.0) / (x - 1.0)).abs().ln() / PI;
            max_err = max_err.max((h.values[i] - target).abs());
        }
    }
    Ok(max_err)
}

// ---------------------------------------------------------------------------
// identity suite
// ---------------------------------------------------------------------------

pub fn run_identity_suite(grid: &Grid, s_list: &[f64], cfg: &SuiteConfig) -> Result<SuiteReport> {
    let t = &cfg.thresholds;
    let mut checks = Vec::new();
    for &s in s_list {
        let ord = FracOrder::new(grid.n, s)?;
        let tol = if s >= 0.85 {
            t.inversion_high_s
        } else {
            t.inversion
        };
        for (name, raw) in family_pair(*grid) {
            let phi = subtract_mean(&raw);
            let a = fracops::frac_laplacian(&phi, &ord, OperatorMethod::Spectral)?;
            let inv = fracops::riesz_potential(&a, &ord, OperatorMethod::Spectral)?;
            checks.push(Check::le(
                &format!("inversion-potential-after-laplacian-{name}-s{s}"),
                "potential-inverts-laplacian",
                rel_linf(&inv, &phi),
                tol,
            ));
            let pot = fracops::riesz_potential(&phi, &ord, OperatorMethod::Spectral)?;
            let back = fracops::frac_laplacian(&pot, &ord, OperatorMethod::Spectral)?;
            checks.push(Check::le(
                &format!("inversion-laplacian-after-potential-{name}-s{s}"),
                "potential-inverts-laplacian",
                rel_linf(&back, &phi),
                tol,
            ));
        }
        // gradient identities on the gaussian
        let phi = subtract_mean(&sample(&TestFamily::gaussian(1.0), *grid)?);
        let grad = fracops::frac_gradient(&phi, &ord, OperatorMethod::Spectral)?;
        let a = fracops::frac_laplacian(&phi, &ord, OperatorMethod::Spectral)?;
        let riesz_a = fracops::riesz_transform_all(&a)?;
        let mut worst = 0.0f64;
        for (gc, rc) in grad.components.iter().zip(&riesz_a.components) {
            worst = worst.max(rel_linf(gc, rc));
        }
        checks.push(Check::le(
            &format!("gradient-is-riesz-of-laplacian-s{s}"),
            "gradient-riesz-laplacian-composition",
            worst,
            t.commutation,
        ));
        // other composition order
        let ra = fracops::riesz_transform_all(&phi)?;
        let mut worst2 = 0.0f64;
        for (gc, rc) in grad.components.iter().zip(&ra.components) {
            let arc = fracops::frac_laplacian(rc, &ord, OperatorMethod::Spectral)?;
            worst2 = worst2.max(rel_linf(gc, &arc));
        }
        checks.push(Check::le(
            &format!("gradient-commutes-with-laplacian-s{s}"),
            "gradient-riesz-laplacian-composition",
            worst2,
            t.commutation,
        ));
        // minus-gradient vs potential of the plain gradient; under the
        // classical transform sign the composition carries a minus
        let ord_dual = FracOrder::new(grid.n, 1.0 - s)?;
        let mut worst3 = 0.0f64;
        for axis in 0..grid.n {
            let dphi = fft::apply_multiplier(&phi, |m| {
                if m.nyquist[axis] {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, 2.0 * PI * m.xi[axis])
                }
            })?;
            let pot = fracops::riesz_potential(&dphi, &ord_dual, OperatorMethod::Spectral)?;
            let neg = pot.scale(-1.0);
            worst3 = worst3.max(rel_linf(&grad.components[axis], &neg));
        }
        checks.push(Check::le(
            &format!("minus-gradient-is-signed-potential-of-gradient-s{s}"),
            "gradient-potential-composition",
            worst3,
            t.gradient_identity,
        ));
    }
    // zero inputs map to exact zeros
    let zero = ScalarField::zeros(*grid);
    let ord = FracOrder::new(grid.n, s_list.first().copied().unwrap_or(0.5))?;
    let z1 = fracops::frac_laplacian(&zero, &ord, OperatorMethod::Spectral)?.max_abs();
    let z2 = fracops::riesz_potential(&zero, &ord, OperatorMethod::Spectral)?.max_abs();
    let z3 = fracops::riesz_transform(&zero, 0)?.max_abs();
    checks.push(Check::le(
        "zero-field-residues",
        "operators-vanish-on-zero",
        z1.max(z2).max(z3),
        0.0,
    ));
    if grid.n == 1 {
        checks.push(Check::le(
            "hilbert-log-identity",
            "hilbert-of-interval-indicator",
            hilbert_identity_error(*grid, t.hilbert_window)?,
            t.hilbert_max_err,
        ));
        for &s in s_list {
            let u = sample(&TestFamily::gaussian(1.0), *grid)?;
            let dp = fracops::liouville_one_sided(&u, s, Side::Plus)?;
            let dm = fracops::liouville_one_sided(&u, s, Side::Minus)?;
            let origin = grid.flatten(&[grid.npts / 2]);
            let dev =
                (dp.values[origin] - dm.values[origin]).abs() / dp.values[origin].abs().max(1e-300);
            checks.push(Check::le(
                &format!("one-sided-even-symmetry-s{s}"),
                "one-sided-derivatives-agree-on-even-fields",
                dev,
                1e-10,
            ));
        }
        // the one-sided quadrature converges like h^{2-s}; the fit needs the
        // finer grid once s approaches 1
        let fit_grid = if grid.npts >= 2048 {
            *grid
        } else {
            Grid::new(1, 2048, grid.half_extent, true)?
        };
        let s_mid = s_list.get(s_list.len() / 2).copied().unwrap_or(0.5);
        let (c_plus, res_p, c_minus, res_m) = fracops::fit_liouville_constants(fit_grid, s_mid)?;
        checks.push(Check::le(
            &format!("one-sided-sum-matches-laplacian-s{s_mid}-fitted-c{c_plus:.6}"),
            "one-sided-combination-constants",
            res_p,
            t.liouville_fit_residual,
        ));
        checks.push(Check::le(
            &format!("one-sided-difference-matches-gradient-s{s_mid}-fitted-c{c_minus:.6}"),
            "one-sided-combination-constants",
            res_m,
            t.liouville_fit_residual,
        ));
    }
    Ok(SuiteReport {
        suite: "identity".into(),
        environment: Environment::new(*grid, s_list),
        checks,
    })
}

// ---------------------------------------------------------------------------
// stein-weiss suite
// ---------------------------------------------------------------------------

fn sw_ratio(grid: Grid, ord: &FracOrder) -> Result<f64> {
    let p = ord.n as f64 / (ord.n as f64 - ord.s);
    let radius = (grid.half_extent / 8.0).clamp(0.5, 1.0);
    let members = [
        TestFamily::gaussian(1.0),
        TestFamily::bump(radius),
        TestFamily::ShiftedBumpPair {
            offset: vec![],
            radius,
            amplitude: 1.0,
        },
    ];
    let mut sup = 0.0f64;
    for member in members {
        let f = subtract_mean(&sample(&member, grid)?);
        let pot = fracops::riesz_potential(&f, ord, OperatorMethod::Spectral)?;
        let ratio = norms::lp_norm(&pot, p)? / norms::hardy_h1_norm(&f, HardyVariant::Riesz)?;
        sup = sup.max(ratio);
    }
    Ok(sup)
}

pub fn run_stein_weiss_suite(
    grid: &Grid,
    s_list: &[f64],
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    let t = &cfg.thresholds;
    let mut checks = Vec::new();
    for &s in s_list {
        let ord = FracOrder::new(grid.n, s)?;
        let p = grid.n as f64 / (grid.n as f64 - s);
        let sup = sw_ratio(*grid, &ord)?;
        checks.push(Check::le(
            &format!("embedding-ratio-finite-s{s}"),
            "potential-of-hardy-embeds-in-lebesgue",
            sup,
            t.ratio_cap,
        ));
        let refined = sw_ratio(grid.refined()?, &ord)?;
        checks.push(Check::le(
            &format!("embedding-ratio-refinement-drift-s{s}"),
            "potential-of-hardy-embeds-in-lebesgue",
            (refined - sup).abs() / sup,
            t.refine_drift,
        ));
        // exact scale invariance under u -> 2u
        let f = subtract_mean(&sample(&TestFamily::gaussian(1.0), *grid)?);
        let pot = fracops::riesz_potential(&f, &ord, OperatorMethod::Spectral)?;
        let r1 = norms::lp_norm(&pot, p)? / norms::hardy_h1_norm(&f, HardyVariant::Riesz)?;
        let f2 = f.scale(2.0);
        let pot2 = fracops::riesz_potential(&f2, &ord, OperatorMethod::Spectral)?;
        let r2 = norms::lp_norm(&pot2, p)? / norms::hardy_h1_norm(&f2, HardyVariant::Riesz)?;
        checks.push(Check::le(
            &format!("embedding-ratio-homogeneity-s{s}"),
            "both-sides-scale-linearly",
            (r2 / r1 - 1.0).abs(),
            t.scaling_exact,
        ));
        // dilation sweep: both sides scale identically under x -> x/r; the
        // bump pair is exactly mean-free, so no subtraction constant enters
        let pair_ratio = |r: f64| -> Result<f64> {
            let mut fr = ScalarField::from_fn(*grid, |x| {
                let plus: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(a, v)| {
                        let c = if a == 0 { 2.0 * r } else { 0.0 };
                        (v - c) * (v - c)
                    })
                    .sum();
                let minus: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(a, v)| {
                        let c = if a == 0 { -2.0 * r } else { 0.0 };
                        (v - c) * (v - c)
                    })
                    .sum();
                let bump = |d2: f64| {
                    let q = d2 / (r * r);
                    if q < 1.0 {
                        (1.0 - 1.0 / (1.0 - q)).exp()
                    } else {
                        0.0
                    }
                };
                bump(plus) - bump(minus)
            })?;
            fr = subtract_mean(&fr);
            let potr = fracops::riesz_potential(&fr, &ord, OperatorMethod::Spectral)?;
            Ok(norms::lp_norm(&potr, p)? / norms::hardy_h1_norm(&fr, HardyVariant::Riesz)?)
        };
        let base = pair_ratio(1.0)?;
        let mut worst = 0.0f64;
        for r in [0.5f64, 2.0] {
            worst = worst.max((pair_ratio(r)? / base - 1.0).abs());
        }
        checks.push(Check::le(
            &format!("embedding-ratio-dilation-drift-s{s}"),
            "embedding-ratio-dilation-invariant",
            worst,
            t.dilation_drift,
        ));
    }
    Ok(SuiteReport {
        suite: "stein-weiss".into(),
        environment: Environment::new(*grid, s_list),
        checks,
    })
}

// ---------------------------------------------------------------------------
// weak-type suite
// ---------------------------------------------------------------------------

fn concentration_member(grid: Grid, eps: f64) -> Result<ScalarField> {
    ScalarField::from_fn(grid, |x| {
        let d2: f64 = x.iter().map(|v| v * v).sum();
        (-d2 / (eps * eps)).exp()
    })
}

pub fn run_weak_type_suite(grid: &Grid, s: f64, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let t = &cfg.thresholds;
    let ord = FracOrder::new(grid.n, s)?;
    let p = grid.n as f64 / (grid.n as f64 - s);
    let mut checks = Vec::new();
    // weak-type ratios over smooth family members sized to the box
    let radius = grid.half_extent / 8.0;
    let members = [
        ("gaussian", TestFamily::gaussian(grid.half_extent / 8.0)),
        ("bump", TestFamily::bump(radius)),
        (
            "pair",
            TestFamily::ShiftedBumpPair {
                offset: vec![],
                radius,
                amplitude: 1.0,
            },
        ),
    ];
    let mut sup_l1 = 0.0f64;
    let mut sup_riesz = 0.0f64;
    for (_, member) in &members {
        let f = subtract_mean(&sample(member, *grid)?);
        let pot = fracops::riesz_potential(&f, &ord, OperatorMethod::Spectral)?;
        let weak = norms::weak_lp_norm(&pot, p)?;
        sup_l1 = sup_l1.max(weak / norms::lp_norm(&f, 1.0)?);
        let mut riesz_l1 = 0.0;
        for axis in 0..grid.n {
            riesz_l1 += norms::lp_norm(&fracops::riesz_transform(&f, axis)?, 1.0)?;
        }
        sup_riesz = sup_riesz.max(weak / riesz_l1);
    }
    checks.push(Check::le(
        "weak-ratio-vs-l1-finite",
        "weak-bound-by-l1-mass",
        sup_l1,
        t.ratio_cap,
    ));
    checks.push(Check::le(
        "weak-ratio-vs-riesz-finite",
        "weak-bound-by-riesz-mass",
        sup_riesz,
        t.ratio_cap,
    ));
    // concentration family: weak ratios stay put, strong ratios climb
    let eps_list = [1.0, 0.5, 0.25, 0.125];
    let mut weak_ratios = Vec::new();
    let mut strong_ratios = Vec::new();
    for &eps in &eps_list {
        let f = concentration_member(*grid, eps)?;
        let l1 = norms::lp_norm(&f, 1.0)?;
        let f0 = subtract_mean(&f);
        let pot = fracops::riesz_potential(&f0, &ord, OperatorMethod::Spectral)?;
        weak_ratios.push(norms::weak_lp_norm(&pot, p)? / l1);
        strong_ratios.push(norms::lp_norm(&pot, p)? / l1);
    }
    let wmax = weak_ratios
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let wmin = weak_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(Check::le(
        "concentration-weak-ratio-drift",
        "weak-bound-survives-concentration",
        wmax / wmin - 1.0,
        t.weak_drift,
    ));
    let min_factor = strong_ratios
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::ge(
        "concentration-strong-ratio-growth",
        "strong-bound-fails-under-concentration",
        min_factor,
        t.strong_growth,
    ));
    // exact homogeneity of the measured ratios
    let f = subtract_mean(&concentration_member(*grid, 1.0)?);
    let pot1 = fracops::riesz_potential(&f, &ord, OperatorMethod::Spectral)?;
    let r1 = norms::weak_lp_norm(&pot1, p)? / norms::lp_norm(&f, 1.0)?;
    let f2 = f.scale(2.0);
    let pot2 = fracops::riesz_potential(&f2, &ord, OperatorMethod::Spectral)?;
    let r2 = norms::weak_lp_norm(&pot2, p)? / norms::lp_norm(&f2, 1.0)?;
    checks.push(Check::le(
        "weak-ratio-homogeneity",
        "both-sides-scale-linearly",
        (r2 / r1 - 1.0).abs(),
        t.scaling_exact,
    ));
    Ok(SuiteReport {
        suite: "weak-type".into(),
        environment: Environment::new(*grid, &[s]),
        checks,
    })
}

// ---------------------------------------------------------------------------
// capacitary suite
// ---------------------------------------------------------------------------

fn seminorm_of(kind: CapacityKind, u: &ScalarField, ord: &FracOrder) -> Result<f64> {
    let k = match kind {
        CapacityKind::Hs1 => SeminormKind::Hs1,
        CapacityKind::Hs1Plus => SeminormKind::Hs1Plus,
        CapacityKind::Hs1Minus => SeminormKind::Hs1Minus,
        CapacityKind::Ws1 => return norms::gagliardo_seminorm(u, ord.s),
    };
    norms::seminorm(u, k, ord)
}

pub fn run_capacitary_suite(grid: &Grid, s: f64, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let t = &cfg.thresholds;
    let ord = FracOrder::new(grid.n, s)?;
    let mut checks = Vec::new();
    // strong capacitary integral against the seminorm on a bump
    let radius = (grid.half_extent / 8.0).clamp(0.5, 1.0);
    let u = subtract_mean(&sample(&TestFamily::bump(radius), *grid)?);
    let integral = level_set_capacity_integral(&u, CapacityKind::Hs1, &ord, &cfg.solver)?;
    let semi = seminorm_of(CapacityKind::Hs1, &u, &ord)?;
    let ratio = integral.midpoint / semi;
    checks.push(Check::le(
        "strong-integral-ratio-finite",
        "capacitary-integral-bounded-by-seminorm",
        ratio,
        t.ratio_cap,
    ));
    let refined = grid.refined()?;
    let u2 = subtract_mean(&sample(&TestFamily::bump(radius), refined)?);
    let integral2 = level_set_capacity_integral(&u2, CapacityKind::Hs1, &ord, &cfg.solver)?;
    let ratio2 = integral2.midpoint / seminorm_of(CapacityKind::Hs1, &u2, &ord)?;
    checks.push(Check::le(
        "strong-integral-refinement-drift",
        "capacitary-integral-bounded-by-seminorm",
        (ratio2 - ratio).abs() / ratio,
        t.cap_stability,
    ));
    // lowered-order strong estimate, evaluated at two trial orders
    for shat in [s / 2.0, 0.9 * s] {
        let ord_hat = FracOrder::new(grid.n, shat)?;
        let beta = (grid.n as f64 - s) / (grid.n as f64 - shat);
        let max_t = u.max_abs();
        let k_top = max_t.log2().floor() as i32;
        let floor = crate::capacity::collar_floor(
            &u,
            crate::solver::collar_cells(*grid, cfg.solver.collar_fraction),
        );
        let mut acc = 0.0;
        for k in (k_top - 12..=k_top).rev() {
            let tau = 2f64.powi(k);
            if tau <= floor {
                continue;
            }
            let set = DyadicSet::abs_super_level(&u, tau);
            if set.is_empty() {
                continue;
            }
            let rep = variational_capacity(&CapacityProblem {
                set,
                kind: CapacityKind::Hs1Minus,
                ord: ord_hat,
                params: cfg.solver.clone(),
            })?;
            // integral of Cap({|u| > t^beta}) dt over the tau-slab
            let t_hi = (2.0 * tau).powf(1.0 / beta);
            let t_lo = tau.powf(1.0 / beta);
            acc += rep.value * (t_hi - t_lo);
        }
        let minus = seminorm_of(CapacityKind::Hs1Minus, &u, &ord)?;
        checks.push(Check::le(
            &format!("lowered-order-strong-ratio-shat{shat:.3}"),
            "lowered-order-capacitary-estimate",
            acc.powf(beta) / minus,
            t.ratio_cap,
        ));
    }
    // weak capacitary bound at every dyadic level, both one-sided kinds
    for member in TestFamily::default_members(grid.half_extent) {
        let u0 = subtract_mean(&sample(&member, *grid)?);
        let max_t = u0.values.iter().cloned().fold(0.0f64, f64::max);
        let floor = crate::capacity::collar_floor(
            &u0,
            crate::solver::collar_cells(*grid, cfg.solver.collar_fraction),
        );
        if max_t <= 0.0 {
            continue;
        }
        let k_top = max_t.log2().floor() as i32;
        let levels: Vec<i32> = (k_top - 9..=k_top)
            .filter(|&k| 2f64.powi(k) > floor)
            .collect();
        for kind in [CapacityKind::Hs1Plus, CapacityKind::Hs1Minus] {
            let semi = seminorm_of(kind, &u0, &ord)?;
            let worst = levels
                .par_iter()
                .map(|&k| {
                    let tau = 2f64.powi(k);
                    let set = DyadicSet::super_level(&u0, tau);
                    if set.is_empty() {
                        return 0.0;
                    }
                    variational_capacity(&CapacityProblem {
                        set,
                        kind,
                        ord,
                        params: cfg.solver.clone(),
                    })
                    .map(|r| tau * r.value / semi)
                    .unwrap_or(f64::INFINITY)
                })
                .reduce(|| 0.0f64, f64::max);
            checks.push(Check::le(
                &format!("weak-capacitary-{}-{}", kind.as_str(), member.name()),
                "level-capacity-bounded-by-seminorm",
                worst,
                1.0 + t.weak_cap_slack,
            ));
        }
    }
    // concentration family: the one-sided strong integral ratio climbs
    let mut ratios = Vec::new();
    for eps in [1.0, 0.5, 0.25] {
        let f = subtract_mean(&concentration_member(*grid, eps)?);
        let pot = fracops::riesz_potential(&f, &ord, OperatorMethod::Spectral)?;
        let integral = level_set_capacity_integral(&pot, CapacityKind::Hs1Plus, &ord, &cfg.solver)?;
        let semi = seminorm_of(CapacityKind::Hs1Plus, &pot, &ord)?;
        ratios.push(integral.midpoint / semi);
    }
    let min_factor = ratios
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::ge(
        "concentration-strong-integral-growth",
        "one-sided-strong-capacitary-estimate-fails",
        min_factor,
        t.cap_growth,
    ));
    Ok(SuiteReport {
        suite: "capacitary".into(),
        environment: Environment::new(*grid, &[s]),
        checks,
    })
}

// ---------------------------------------------------------------------------
// trace suite
// ---------------------------------------------------------------------------

pub fn run_trace_suite(grid: &Grid, s: f64, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if grid.n != 2 {
        return Err(Error::Op("the trace suite runs on n=2".into()));
    }
    let t = &cfg.thresholds;
    let ord = FracOrder::new(2, s)?;
    let area = DiscreteMeasure::uniform_cube(2, 1.0, 1.0 / 64.0)?;
    let segment = DiscreteMeasure::segment(2, 1.0, 1.0 / 128.0)?;
    // bump supports stay inside the measured unit square so both sides of
    // each ratio scale by pure dilation
    let scales = [0.5f64, 0.25, 0.125];
    let mut area_ratios = Vec::new();
    let mut seg_ratios = Vec::new();
    for &r in &scales {
        let u = subtract_mean(&sample(&TestFamily::bump(r), *grid)?);
        area_ratios.push(trace_ratio(&area, &u, &ord, TraceMode::Strong)?);
        seg_ratios.push(trace_ratio(&segment, &u, &ord, TraceMode::Strong)?);
    }
    let amax = area_ratios
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let amin = area_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut checks = vec![Check::le(
        "area-measure-ratio-drift",
        "admissible-measure-traces-are-bounded",
        amax / amin - 1.0,
        t.trace_drift,
    )];
    let min_growth = seg_ratios
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::ge(
        "segment-measure-ratio-growth",
        "inadmissible-measure-traces-blow-up",
        min_growth,
        t.trace_growth,
    ));
    let zero = ScalarField::zeros(*grid);
    checks.push(Check::le(
        "zero-field-trace-ratio",
        "zero-over-zero-reports-zero",
        trace_ratio(&area, &zero, &ord, TraceMode::Strong)?,
        0.0,
    ));
    Ok(SuiteReport {
        suite: "trace".into(),
        environment: Environment::new(*grid, &[s]),
        checks,
    })
}

// ---------------------------------------------------------------------------
// log-decomposition suite
// ---------------------------------------------------------------------------

struct LogReconstruction {
    rel_l2: f64,
    fitted_scale: f64,
}

fn log_reconstruction(grid: Grid) -> Result<LogReconstruction> {
    let c = log_decomposition_scale(grid.n)?;
    let mut recon = ScalarField::zeros(grid);
    for axis in 0..grid.n {
        let gj = subtract_mean(&ScalarField::from_fn(grid, |x| {
            let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r == 0.0 {
                0.0
            } else {
                c * x[axis] / r
            }
        })?);
        recon = recon.add(&fracops::riesz_transform(&gj, axis)?)?;
    }
    let target = sample(&TestFamily::LogAbs, grid)?;
    // The outer quarter of the box carries an intrinsic periodization
    // correction of relative size (|x|/L)^2 that no resolution removes, so
    // the comparison window stops at L/4.
    let annulus: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let x = grid.point(i);
            let r: f64 = x[..grid.n].iter().map(|v| v * v).sum::<f64>().sqrt();
            (0.5..=grid.half_extent / 4.0).contains(&r)
        })
        .collect();
    let count = annulus.len() as f64;
    let mr = annulus.iter().map(|&i| recon.values[i]).sum::<f64>() / count;
    let mt = annulus.iter().map(|&i| target.values[i]).sum::<f64>() / count;
    let mut resid = 0.0;
    let mut refsq = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for &i in &annulus {
        let rv = recon.values[i] - mr;
        let tv = target.values[i] - mt;
        resid += (rv - tv).powi(2);
        refsq += tv * tv;
        num += rv * tv;
        den += rv * rv;
    }
    Ok(LogReconstruction {
        rel_l2: (resid / refsq).sqrt(),
        fitted_scale: num / den,
    })
}

pub fn run_fs_decomposition_suite(grid: &Grid, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if grid.n != 2 {
        return Err(Error::Op("the decomposition suite runs on n=2".into()));
    }
    let t = &cfg.thresholds;
    let recon = log_reconstruction(*grid)?;
    let mut checks = vec![
        Check::le(
            "log-reconstruction-annulus-error",
            "log-is-riesz-of-bounded-unit-field",
            recon.rel_l2,
            t.fs_annulus_rel,
        ),
        Check::le(
            "log-reconstruction-scale-deviation",
            "log-is-riesz-of-bounded-unit-field",
            (recon.fitted_scale - 1.0).abs(),
            t.fs_scale_dev,
        ),
    ];
    // companion identity on the line
    let line = Grid::new(1, grid.npts.max(1024), grid.half_extent, true)?;
    checks.push(Check::le(
        "hilbert-log-identity",
        "hilbert-of-interval-indicator",
        hilbert_identity_error(line, t.hilbert_window)?,
        t.hilbert_max_err,
    ));
    Ok(SuiteReport {
        suite: "fs".into(),
        environment: Environment::new(*grid, &[]),
        checks,
    })
}

// ---------------------------------------------------------------------------
// divergence suite
// ---------------------------------------------------------------------------

/// Two bounded components: a smoothed centered indicator and a smoothed
/// off-center one, both mean-freed.
fn bounded_components(grid: Grid, smooth_width: f64) -> Result<Vec<ScalarField>> {
    let radius = grid.half_extent / 4.0;
    let mollify = |f: &ScalarField| {
        fft::apply_multiplier(f, |m| {
            let r = m.xi_norm();
            Complex64::new((-PI * smooth_width * smooth_width * r * r).exp(), 0.0)
        })
    };
    let centered = sample(&TestFamily::IndicatorBall { radius }, grid)?;
    let shifted = ScalarField::from_fn(grid, |x| {
        let dx = x[0] - grid.half_extent / 4.0;
        let dy = x[1] + grid.half_extent / 8.0;
        if dx * dx + dy * dy <= radius * radius {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(vec![
        subtract_mean(&mollify(&centered)?),
        subtract_mean(&mollify(&shifted)?),
    ])
}

pub fn run_divergence_suite(grid: &Grid, s: f64, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if grid.n != 2 {
        return Err(Error::Op("the divergence suite runs on n=2".into()));
    }
    let t = &cfg.thresholds;
    let _ = FracOrder::new(2, s)?;
    // bounded data: indicator components smoothed at a fixed physical width
    let smooth_width = 4.0 * grid.spacing;
    let components = bounded_components(*grid, smooth_width)?;
    // y0 = sum_j R_j g_j
    let mut y0 = ScalarField::zeros(*grid);
    for (axis, gj) in components.iter().enumerate() {
        y0 = y0.add(&fracops::riesz_transform(gj, axis)?)?;
    }
    // solving field: div((-Delta)^{-1/2} Y) = y0 with Y = -g
    let mut div = ScalarField::zeros(*grid);
    for (axis, gj) in components.iter().enumerate() {
        let yj = gj.scale(-1.0);
        let dj = fft::apply_multiplier(&yj, |m| {
            if m.is_zero() || m.nyquist[axis] {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, m.xi[axis] / m.xi_norm())
            }
        })?;
        div = div.add(&dj)?;
    }
    let resid = rel_linf(&div, &y0);
    let mut checks = vec![Check::le(
        "divergence-equation-residual",
        "bounded-fields-solve-the-divergence-equation",
        resid,
        t.divergence_residual,
    )];
    // the right-hand side is a genuine bounded-mean-oscillation object
    let bmo1 = norms::bmo_norm(&y0)?;
    let refined = grid.refined()?;
    let components2 = bounded_components(refined, smooth_width)?;
    let mut y0b = ScalarField::zeros(refined);
    for (axis, gj) in components2.iter().enumerate() {
        y0b = y0b.add(&fracops::riesz_transform(gj, axis)?)?;
    }
    let bmo2 = norms::bmo_norm(&y0b)?;
    checks.push(Check::le(
        "rhs-bmo-refinement-drift",
        "constructed-rhs-has-stable-bmo-norm",
        (bmo2 - bmo1).abs() / bmo1,
        t.bmo_drift,
    ));
    // zero data
    let zero = ScalarField::zeros(*grid);
    let z = fracops::riesz_transform(&zero, 0)?.max_abs();
    checks.push(Check::le(
        "zero-data-residual",
        "operators-vanish-on-zero",
        z,
        0.0,
    ));
    // the log reconstruction reused at this grid
    let recon = log_reconstruction(*grid)?;
    checks.push(Check::le(
        "log-reconstruction-annulus-error",
        "log-is-riesz-of-bounded-unit-field",
        recon.rel_l2,
        t.fs_annulus_rel.max(0.1),
    ));
    Ok(SuiteReport {
        suite: "divergence".into(),
        environment: Environment::new(*grid, &[s]),
        checks,
    })
}

// ---------------------------------------------------------------------------
// suite selection and defaults
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identity,
    SteinWeiss,
    WeakType,
    Capacitary,
    Trace,
    Fs,
    Divergence,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Vec<Suite>> {
        Ok(match name {
            "identity" => vec![Suite::Identity],
            "stein-weiss" => vec![Suite::SteinWeiss],
            "weak-type" => vec![Suite::WeakType],
            "capacitary" => vec![Suite::Capacitary],
            "trace" => vec![Suite::Trace],
            "fs" => vec![Suite::Fs],
            "divergence" => vec![Suite::Divergence],
            "all" => vec![
                Suite::Identity,
                Suite::SteinWeiss,
                Suite::WeakType,
                Suite::Capacitary,
                Suite::Trace,
                Suite::Fs,
                Suite::Divergence,
            ],
            other => return Err(Error::Op(format!("unknown suite `{other}`"))),
        })
    }

    /// Grid each suite runs on when none is supplied.
    pub fn default_grid(&self) -> Grid {
        let g = |n, npts, l| Grid::new(n, npts, l, true).expect("static defaults are valid");
        match self {
            Suite::Identity => g(1, 1024, 16.0),
            Suite::SteinWeiss => g(1, 512, 16.0),
            Suite::WeakType => g(2, 256, 4.0),
            Suite::Capacitary => g(1, 256, 8.0),
            Suite::Trace => g(2, 512, 4.0),
            Suite::Fs => g(2, 512, 16.0),
            Suite::Divergence => g(2, 128, 8.0),
        }
    }

    pub fn default_s(&self) -> Vec<f64> {
        match self {
            Suite::Identity => vec![0.3, 0.5, 0.7, 0.9],
            Suite::SteinWeiss => vec![0.3, 0.5, 0.7],
            Suite::WeakType => vec![0.3],
            _ => vec![0.5],
        }
    }

    pub fn run(
        &self,
        grid: Option<Grid>,
        s: Option<f64>,
        cfg: &SuiteConfig,
    ) -> Result<SuiteReport> {
        let grid = grid.unwrap_or_else(|| self.default_grid());
        let s_list = s.map(|v| vec![v]).unwrap_or_else(|| self.default_s());
        match self {
            Suite::Identity => run_identity_suite(&grid, &s_list, cfg),
            Suite::SteinWeiss => run_stein_weiss_suite(&grid, &s_list, cfg),
            Suite::WeakType => run_weak_type_suite(&grid, s_list[0], cfg),
            Suite::Capacitary => run_capacitary_suite(&grid, s_list[0], cfg),
            Suite::Trace => run_trace_suite(&grid, s_list[0], cfg),
            Suite::Fs => run_fs_decomposition_suite(&grid, cfg),
            Suite::Divergence => run_divergence_suite(&grid, s_list[0], cfg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_verdicts() {
        assert!(Check::le("a", "s", 0.5, 1.0).passed());
        assert!(!Check::le("a", "s", 2.0, 1.0).passed());
        assert!(Check::ge("a", "s", 2.0, 1.0).passed());
        assert!(!Check::ge("a", "s", 0.5, 1.0).passed());
    }

    #[test]
    fn log_scale_is_one_in_the_plane() {
        assert!((log_decomposition_scale(2).unwrap() - 1.0).abs() < 1e-12);
        assert!(log_decomposition_scale(1).is_err());
    }

    #[test]
    fn suite_parse_rejects_unknown() {
        assert!(Suite::parse("nonsense").is_err());
        assert_eq!(Suite::parse("all").unwrap().len(), 7);
    }

    #[test]
    fn identity_suite_passes_on_default_grid() {
        let cfg = SuiteConfig::default();
        let grid = Suite::Identity.default_grid();
        let report = run_identity_suite(&grid, &[0.5], &cfg).unwrap();
        for c in &report.checks {
            assert!(
                c.passed(),
                "{}: measured {} vs {}",
                c.id,
                c.measured,
                c.threshold
            );
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let cfg = SuiteConfig::default();
        let grid = Grid::new(1, 256, 16.0, true).unwrap();
        let a = run_stein_weiss_suite(&grid, &[0.5], &cfg)
            .unwrap()
            .to_json();
        let b = run_stein_weiss_suite(&grid, &[0.5], &cfg)
            .unwrap()
            .to_json();
        assert_eq!(a, b);
    }
}
