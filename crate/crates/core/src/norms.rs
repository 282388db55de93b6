//! Function-space functionals: Lebesgue, weak-Lebesgue, Lorentz, Gagliardo,
//! Hardy, BMO, and the fractional seminorms composed from the operators.

use crate::error::{Error, Result};
use crate::fft;
use crate::fracops::{self, FracOrder, OperatorMethod};
use crate::grid::{ScalarField, MAX_DIM};
use crate::util::pairwise_sum;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Which Hardy-space characterization to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyVariant {
    /// ||u||_1 + sum_j ||R_j u||_1.
    Riesz,
    /// L1 norm of the radial maximal function over dyadic scales.
    Maximal,
}

/// Seminorm selector on the fractional Hardy scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeminormKind {
    /// ||(-Delta)^{s/2} u||_{H^1} via the Riesz characterization.
    Hs1,
    /// ||(-Delta)^{s/2} u||_1.
    Hs1Plus,
    /// sum_j ||(grad^s u)_j||_1.
    Hs1Minus,
}

/// Every functional the CLI can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    Lp(f64),
    WeakLp(f64),
    Lorentz { s: f64 },
    Gagliardo { s: f64 },
    HardyH1(HardyVariant),
    Bmo,
    Seminorm { kind: SeminormKind, s: f64 },
}

/// Truncation bookkeeping attached to CLI norm reports.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    pub half_extent: f64,
    pub boundary_max_abs: f64,
    pub skipped_diagonal_estimate: Option<f64>,
}

pub fn truncation_report(field: &ScalarField, skipped: Option<f64>) -> TruncationReport {
    let g = field.grid;
    let mut boundary = 0.0f64;
    for i in 0..g.len() {
        let idx = g.unflatten(i);
        if g.on_boundary_collar(&idx, 1) {
            boundary = boundary.max(field.values[i].abs());
        }
    }
    TruncationReport {
        half_extent: g.half_extent,
        boundary_max_abs: boundary,
        skipped_diagonal_estimate: skipped,
    }
}

/// (sum |u|^p h^n)^{1/p}; p = infinity gives the max norm.
pub fn lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(field.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::Norm(format!("exponent p={p} below 1")));
    }
    let hn = field.grid.cell_volume();
    let terms: Vec<f64> = field.values.iter().map(|v| v.abs().powf(p)).collect();
    Ok((pairwise_sum(&terms) * hn).powf(1.0 / p))
}

/// sup_t t |{|u| > t}|^{1/p}. For grid simple functions the supremum over all
/// t > 0 is attained in the limit t -> v^- at each level v, which equals the
/// maximum over attained levels of v (h^n #{|u| >= v})^{1/p}; that maximum is
/// what the scan evaluates, and it is exact for step functions.
pub fn weak_lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Norm(format!("exponent p={p} below 1")));
    }
    let hn = field.grid.cell_volume();
    let mut levels: Vec<f64> = field.values.iter().map(|v| v.abs()).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut best = 0.0f64;
    for (count, v) in levels.iter().enumerate() {
        if *v == 0.0 {
            break;
        }
        best = best.max(v * (hn * (count + 1) as f64).powf(1.0 / p));
    }
    Ok(best)
}

/// Lorentz L^{n/(n-s),1} norm: integral over t of |{|u|>t}|^{(n-s)/n},
/// computed exactly from the sorted level structure.
pub fn lorentz_norm(field: &ScalarField, ord: &FracOrder) -> Result<f64> {
    if field.grid.n != ord.n {
        return Err(Error::Norm("order dimension mismatch".into()));
    }
    let theta = (ord.n as f64 - ord.s) / ord.n as f64;
    let hn = field.grid.cell_volume();
    let mut levels: Vec<f64> = field.values.iter().map(|v| v.abs()).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    for (count, v) in levels.iter().enumerate() {
        let next = if count + 1 < levels.len() {
            levels[count + 1]
        } else {
            0.0
        };
        if *v == 0.0 {
            break;
        }
        acc += (v - next) * (hn * (count + 1) as f64).powf(theta);
    }
    Ok(acc)
}

/// Gagliardo seminorm: double sum of |u(x)-u(y)| / |x-y|^{n+s} h^{2n} over
/// distinct grid pairs (plain distances, no periodization). Also returns an
/// estimate of the skipped diagonal-cell mass, which is O(h^{1-s}) per point.
pub fn gagliardo_seminorm_detailed(field: &ScalarField, s: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Norm(format!("order s={s} outside (0,1)")));
    }
    let g = field.grid;
    let total = g.len();
    let expo = -(g.n as f64 + s);
    let decode: Vec<[u32; MAX_DIM]> = (0..total)
        .map(|flat| {
            let idx = g.unflatten(flat);
            [idx[0] as u32, idx[1] as u32, idx[2] as u32]
        })
        .collect();
    let kernel: Vec<f64> = (0..total)
        .map(|flat| {
            if flat == 0 {
                return 0.0;
            }
            let idx = g.unflatten(flat);
            let r2: f64 = (0..g.n)
                .map(|a| {
                    let v = idx[a] as f64 * g.spacing;
                    v * v
                })
                .sum();
            r2.powf(expo / 2.0)
        })
        .collect();
    let npts = g.npts as u32;
    let h2n = g.cell_volume() * g.cell_volume();
    let rows: Vec<f64> = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0.0f64; total],
            |scratch, x| {
                let xi = decode[x];
                let fx = field.values[x];
                for (y, term) in scratch.iter_mut().enumerate() {
                    let yi = decode[y];
                    let mut d = 0u32;
                    for a in 0..g.n {
                        d = d * npts + xi[a].abs_diff(yi[a]);
                    }
                    *term = (fx - field.values[y]).abs() * kernel[d as usize];
                }
                pairwise_sum(scratch)
            },
        )
        .collect();
    let value = pairwise_sum(&rows) * h2n;
    // Skipped diagonal cells: |u(x)-u(y)| ~ |grad u| |x-y| integrates against
    // the kernel to |grad u| h^{1-s} times a unit-cube moment, one cell each.
    let moment = unit_cube_moment_1ms(g.n, s);
    let grads: Vec<f64> = (0..total)
        .map(|x| {
            let idx = g.unflatten(x);
            let mut acc = 0.0;
            for a in 0..g.n {
                let up = if idx[a] + 1 < g.npts {
                    let mut j = idx;
                    j[a] += 1;
                    field.values[g.flatten(&j[..g.n])]
                } else {
                    field.values[x]
                };
                let dn = if idx[a] > 0 {
                    let mut j = idx;
                    j[a] -= 1;
                    field.values[g.flatten(&j[..g.n])]
                } else {
                    field.values[x]
                };
                acc += ((up - dn) / (2.0 * g.spacing)).powi(2);
            }
            acc.sqrt()
        })
        .collect();
    let skipped = pairwise_sum(&grads) * g.spacing.powf(1.0 - s) * moment * g.cell_volume();
    Ok((value, skipped))
}

fn unit_cube_moment_1ms(n: usize, s: f64) -> f64 {
    // integral of |w|^{1-n-s} over the unit cube, inscribed ball exact.
    let nf = n as f64;
    let sphere = 2.0 * PI.powf(nf / 2.0) / crate::gamma::gamma_eval(nf / 2.0).unwrap();
    let mut acc = sphere * 0.5f64.powf(1.0 - s) / (1.0 - s);
    if n > 1 {
        let sub = 64usize;
        let step = 1.0 / sub as f64;
        let vol = step.powi(n as i32);
        let coords: Vec<f64> = (0..sub).map(|k| -0.5 + (k as f64 + 0.5) * step).collect();
        for i in 0..sub.pow(n as u32) {
            let mut rem = i;
            let mut r2 = 0.0;
            for _ in 0..n {
                let c = coords[rem % sub];
                rem /= sub;
                r2 += c * c;
            }
            if r2 > 0.25 {
                acc += r2.powf((1.0 - nf - s) / 2.0) * vol;
            }
        }
    }
    acc
}

pub fn gagliardo_seminorm(field: &ScalarField, s: f64) -> Result<f64> {
    gagliardo_seminorm_detailed(field, s).map(|(v, _)| v)
}

/// Hardy space H^1 norm. Both variants insist on a mean-free input since a
/// nonzero mean makes the number grow with the box instead of converging.
pub fn hardy_h1_norm(field: &ScalarField, variant: HardyVariant) -> Result<f64> {
    if !field.is_mean_zero() {
        return Err(Error::Norm(
            "hardy norm of a field with nonzero mean is box-divergent; subtract the mean".into(),
        ));
    }
    match variant {
        HardyVariant::Riesz => {
            let mut acc = lp_norm(field, 1.0)?;
            for axis in 0..field.grid.n {
                let r = fracops::riesz_transform(field, axis)?;
                acc += lp_norm(&r, 1.0)?;
            }
            Ok(acc)
        }
        HardyVariant::Maximal => {
            let g = field.grid;
            if !g.periodic {
                return Err(Error::Norm("maximal variant needs a periodic grid".into()));
            }
            // phi = exp(-pi |x|^2): nonnegative, smooth, unit mass; its
            // dilates act spectrally as exp(-pi t^2 |xi|^2).
            let levels = (g.npts as f64).log2().round() as usize;
            let mut best = vec![0.0f64; g.len()];
            for k in 0..=levels {
                let t = g.spacing * (1u64 << k) as f64;
                let smoothed = fft::apply_multiplier(field, |m| {
                    let r = m.xi_norm();
                    Complex64::new((-PI * t * t * r * r).exp(), 0.0)
                })?;
                for (b, v) in best.iter_mut().zip(&smoothed.values) {
                    *b = b.max(v.abs());
                }
            }
            let sup = ScalarField::new(g, best)?;
            lp_norm(&sup, 1.0)
        }
    }
}

/// BMO norm over all dyadic subcubes of the box: the largest mean oscillation
/// (1/|Q|) sum_Q |u - u_Q| h^n.
pub fn bmo_norm(field: &ScalarField) -> Result<f64> {
    let g = field.grid;
    let levels = (g.npts as f64).log2().round() as usize;
    let mut best = 0.0f64;
    for level in 0..=levels {
        let cubes_per_axis = 1usize << level;
        let side = g.npts / cubes_per_axis;
        let n_cubes = cubes_per_axis.pow(g.n as u32);
        let level_best = (0..n_cubes)
            .into_par_iter()
            .map(|cube| {
                let mut rem = cube;
                let mut origin = [0usize; MAX_DIM];
                for a in (0..g.n).rev() {
                    origin[a] = (rem % cubes_per_axis) * side;
                    rem /= cubes_per_axis;
                }
                let count = side.pow(g.n as u32) as f64;
                let mut idx = [0usize; MAX_DIM];
                let mut sum = 0.0;
                for_each_in_block(g.n, side, &mut idx, &mut |off| {
                    let mut j = origin;
                    for a in 0..g.n {
                        j[a] += off[a];
                    }
                    sum += field.values[g.flatten(&j[..g.n])];
                });
                let mean = sum / count;
                let mut osc = 0.0;
                for_each_in_block(g.n, side, &mut idx, &mut |off| {
                    let mut j = origin;
                    for a in 0..g.n {
                        j[a] += off[a];
                    }
                    osc += (field.values[g.flatten(&j[..g.n])] - mean).abs();
                });
                osc / count
            })
            .reduce(|| 0.0f64, f64::max);
        best = best.max(level_best);
    }
    Ok(best)
}

fn for_each_in_block(
    n: usize,
    side: usize,
    idx: &mut [usize; MAX_DIM],
    f: &mut impl FnMut(&[usize; MAX_DIM]),
) {
    idx[..n].fill(0);
    loop {
        f(idx);
        let mut a = n;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < side {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Fractional Hardy seminorms composed from the spectral operators.
pub fn seminorm(field: &ScalarField, kind: SeminormKind, ord: &FracOrder) -> Result<f64> {
    if !field.is_mean_zero() {
        return Err(Error::Norm(
            "fractional seminorms are defined modulo constants; subtract the mean".into(),
        ));
    }
    match kind {
        SeminormKind::Hs1 => {
            let a = fracops::frac_laplacian(field, ord, OperatorMethod::Spectral)?;
            hardy_h1_norm(&a, HardyVariant::Riesz)
        }
        SeminormKind::Hs1Plus => {
            let a = fracops::frac_laplacian(field, ord, OperatorMethod::Spectral)?;
            lp_norm(&a, 1.0)
        }
        SeminormKind::Hs1Minus => {
            let grad = fracops::frac_gradient(field, ord, OperatorMethod::Spectral)?;
            let mut acc = 0.0;
            for c in &grad.components {
                acc += lp_norm(c, 1.0)?;
            }
            Ok(acc)
        }
    }
}

/// Evaluate any [`NormKind`].
pub fn evaluate(field: &ScalarField, kind: &NormKind) -> Result<f64> {
    match kind {
        NormKind::Lp(p) => lp_norm(field, *p),
        NormKind::WeakLp(p) => weak_lp_norm(field, *p),
        NormKind::Lorentz { s } => {
            let ord = FracOrder::new(field.grid.n, *s)?;
            lorentz_norm(field, &ord)
        }
        NormKind::Gagliardo { s } => gagliardo_seminorm(field, *s),
        NormKind::HardyH1(variant) => hardy_h1_norm(field, *variant),
        NormKind::Bmo => bmo_norm(field),
        NormKind::Seminorm { kind, s } => {
            let ord = FracOrder::new(field.grid.n, *s)?;
            seminorm(field, *kind, &ord)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, subtract_mean, Grid, TestFamily};

    #[test]
    fn lp_of_indicator_and_gaussian() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let ind = sample(&TestFamily::IndicatorBall { radius: 1.0 }, g).unwrap();
        let l2 = lp_norm(&ind, 2.0).unwrap();
        assert!((l2 - 2.0f64.sqrt()).abs() < 2.0 * g.spacing, "l2 {l2}");
        // exp(-pi x^2) integrates to exactly 1; trapezoid error is spectral.
        let gauss = ScalarField::from_fn(g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let l1 = lp_norm(&gauss, 1.0).unwrap();
        assert!((l1 - 1.0).abs() < 1e-10, "gaussian mass {l1}");
        assert_eq!(lp_norm(&ScalarField::zeros(g), 2.0).unwrap(), 0.0);
        assert!(lp_norm(&ind, 0.5).is_err());
    }

    #[test]
    fn weak_lp_matches_indicator_measure() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let ind = sample(&TestFamily::IndicatorBall { radius: 1.0 }, g).unwrap();
        let w = weak_lp_norm(&ind, 2.0).unwrap();
        let strong = lp_norm(&ind, 2.0).unwrap();
        assert!(
            (w - strong).abs() < 1e-12,
            "indicator weak {w} vs strong {strong}"
        );
        assert_eq!(weak_lp_norm(&ScalarField::zeros(g), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn weak_lp_stays_bounded_where_lp_diverges() {
        // |x|^{-1/2} on the line: weak-L2 stabilizes under refinement, L2 grows.
        let member = TestFamily::RieszKernelMollified {
            order: 0.5,
            width: 0.0,
            amplitude: 1.0,
        };
        let mut weak = Vec::new();
        let mut strong = Vec::new();
        for npts in [128usize, 256, 512, 1024] {
            let g = Grid::new(1, npts, 16.0, true).unwrap();
            let f = sample(&member, g).unwrap();
            weak.push(weak_lp_norm(&f, 2.0).unwrap());
            strong.push(lp_norm(&f, 2.0).unwrap());
        }
        assert!(strong[3] > strong[0] + 0.3, "L2 should grow: {strong:?}");
        let spread = (weak[3] - weak[0]).abs() / weak[0];
        assert!(spread < 0.1, "weak-L2 should stabilize: {weak:?}");
    }

    #[test]
    fn chebyshev_weak_below_strong() {
        let g = Grid::new(1, 64, 4.0, true).unwrap();
        let f = ScalarField::from_fn(g, |x| (3.1 * x[0]).sin() + 0.3 * x[0]).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let w = weak_lp_norm(&f, p).unwrap();
            let s = lp_norm(&f, p).unwrap();
            assert!(w <= s + 1e-12, "p={p}: weak {w} > strong {s}");
        }
    }

    #[test]
    fn lorentz_exact_on_indicators() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let ord = FracOrder::new(1, 0.5).unwrap();
        let ind = sample(&TestFamily::IndicatorBall { radius: 1.0 }, g).unwrap();
        let measure: f64 = ind.values.iter().sum::<f64>() * g.spacing;
        let got = lorentz_norm(&ind, &ord).unwrap();
        assert!((got - measure.powf(0.5)).abs() < 1e-12);
        assert_eq!(lorentz_norm(&ScalarField::zeros(g), &ord).unwrap(), 0.0);
    }

    #[test]
    fn lorentz_matches_riemann_oracle_on_two_levels() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let ord = FracOrder::new(1, 0.5).unwrap();
        // two disjoint plateaus of heights 1 and 2
        let f = ScalarField::from_fn(g, |x| {
            if (x[0] + 4.0).abs() <= 1.0 {
                1.0
            } else if (x[0] - 4.0).abs() <= 0.5 {
                2.0
            } else {
                0.0
            }
        })
        .unwrap();
        let exact = lorentz_norm(&f, &ord).unwrap();
        let theta = (1.0 - 0.5) / 1.0;
        let tmax = 2.5;
        let steps = 10_000usize;
        let dt = tmax / steps as f64;
        let hn = g.cell_volume();
        let mut riemann = 0.0;
        for k in 0..steps {
            let t = (k as f64 + 0.5) * dt;
            let count = f.values.iter().filter(|v| v.abs() > t).count();
            riemann += (hn * count as f64).powf(theta) * dt;
        }
        assert!(
            (exact - riemann).abs() < 2e-3 * exact,
            "sorted {exact} vs riemann {riemann}"
        );
    }

    #[test]
    fn gagliardo_zero_on_constants_and_grows_on_indicator() {
        let g = Grid::new(1, 64, 4.0, true).unwrap();
        let c = ScalarField::new(g, vec![2.5; 64]).unwrap();
        assert_eq!(gagliardo_seminorm(&c, 0.5).unwrap(), 0.0);
        // half-box indicator: finite per grid, grows under refinement
        let mut values = Vec::new();
        for npts in [32usize, 64, 128] {
            let g = Grid::new(1, npts, 4.0, true).unwrap();
            let f = ScalarField::from_fn(g, |x| if x[0] < 0.0 { 1.0 } else { 0.0 }).unwrap();
            values.push(gagliardo_seminorm(&f, 0.5).unwrap());
        }
        assert!(values[0] < values[1] && values[1] < values[2], "{values:?}");
    }

    #[test]
    fn hardy_rejects_nonzero_mean_and_is_finite_on_pairs() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let gauss = sample(&TestFamily::gaussian(1.0), g).unwrap();
        assert!(hardy_h1_norm(&gauss, HardyVariant::Riesz).is_err());
        let pair = sample(
            &TestFamily::ShiftedBumpPair {
                offset: vec![],
                radius: 1.0,
                amplitude: 1.0,
            },
            g,
        )
        .unwrap();
        let riesz = hardy_h1_norm(&pair, HardyVariant::Riesz).unwrap();
        let maximal = hardy_h1_norm(&pair, HardyVariant::Maximal).unwrap();
        assert!(riesz.is_finite() && maximal.is_finite());
        let ratio = riesz / maximal;
        assert!(
            (0.25..=4.0).contains(&ratio),
            "variants should agree within a factor 4, ratio {ratio}"
        );
        assert_eq!(
            hardy_h1_norm(&ScalarField::zeros(g), HardyVariant::Riesz).unwrap(),
            0.0
        );
    }

    #[test]
    fn laplacian_of_gaussian_lands_in_hardy_space() {
        let mut norms = Vec::new();
        for (npts, l) in [(256usize, 16.0), (512, 32.0)] {
            let g = Grid::new(1, npts, l, true).unwrap();
            let u = sample(&TestFamily::gaussian(1.0), g).unwrap();
            let ord = FracOrder::new(1, 0.5).unwrap();
            let a = fracops::frac_laplacian(&u, &ord, OperatorMethod::Spectral).unwrap();
            norms.push(hardy_h1_norm(&a, HardyVariant::Riesz).unwrap());
        }
        let drift = (norms[1] - norms[0]).abs() / norms[0];
        assert!(drift < 0.05, "hardy norm should be box-stable: {norms:?}");
    }

    #[test]
    fn bmo_basics() {
        let g = Grid::new(1, 128, 16.0, true).unwrap();
        let c = ScalarField::new(g, vec![7.0; 128]).unwrap();
        assert_eq!(bmo_norm(&c).unwrap(), 0.0);
        let ind = sample(&TestFamily::IndicatorBall { radius: 1.0 }, g).unwrap();
        let b = bmo_norm(&ind).unwrap();
        assert!(b > 0.0 && b <= 1.0, "indicator bmo {b}");
        let shifted = ind.map(|v| v + 3.0);
        assert_eq!(bmo_norm(&shifted).unwrap(), bmo_norm(&ind).unwrap());
    }

    #[test]
    fn bmo_of_log_is_refinement_stable_while_sup_grows() {
        let mut bmos = Vec::new();
        let mut near_origin_sups = Vec::new();
        for npts in [64usize, 128] {
            let g = Grid::new(2, npts, 16.0, true).unwrap();
            let f = sample(&TestFamily::LogAbs, g).unwrap();
            bmos.push(bmo_norm(&f).unwrap());
            let sup = (0..g.len())
                .filter(|&i| {
                    let x = g.point(i);
                    x[0].abs() <= 1.0 && x[1].abs() <= 1.0
                })
                .map(|i| f.values[i].abs())
                .fold(0.0f64, f64::max);
            near_origin_sups.push(sup);
        }
        assert!(
            near_origin_sups[1] > near_origin_sups[0],
            "the unbounded core should sharpen under refinement {near_origin_sups:?}"
        );
        let drift = (bmos[1] - bmos[0]).abs() / bmos[0];
        assert!(drift < 0.10, "bmo drift {drift} from {bmos:?}");
    }

    #[test]
    fn seminorm_additivity_plus_minus() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let u = subtract_mean(&sample(&TestFamily::bump(1.0), g).unwrap());
        let ord = FracOrder::new(1, 0.5).unwrap();
        let full = seminorm(&u, SeminormKind::Hs1, &ord).unwrap();
        let plus = seminorm(&u, SeminormKind::Hs1Plus, &ord).unwrap();
        let minus = seminorm(&u, SeminormKind::Hs1Minus, &ord).unwrap();
        assert!(
            ((plus + minus) - full).abs() < 1e-10 * full,
            "{plus} + {minus} != {full}"
        );
        let zero = ScalarField::zeros(g);
        assert_eq!(seminorm(&zero, SeminormKind::Hs1, &ord).unwrap(), 0.0);
    }

    #[test]
    fn gagliardo_dominates_hs1_on_bumps() {
        let g = Grid::new(1, 128, 16.0, true).unwrap();
        let u = subtract_mean(&sample(&TestFamily::bump(1.0), g).unwrap());
        let ord = FracOrder::new(1, 0.5).unwrap();
        let hs1 = seminorm(&u, SeminormKind::Hs1, &ord).unwrap();
        let raw = sample(&TestFamily::bump(1.0), g).unwrap();
        let w = gagliardo_seminorm(&raw, 0.5).unwrap();
        let c = hs1 / w;
        assert!(
            c.is_finite() && c > 0.0 && c < 10.0,
            "measured constant {c}"
        );
    }

    #[test]
    fn seminorm_dilation_covariance() {
        let ord = FracOrder::new(1, 0.5).unwrap();
        let g = Grid::new(1, 2048, 64.0, true).unwrap();
        let base = subtract_mean(&ScalarField::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap());
        let s0 = seminorm(&base, SeminormKind::Hs1, &ord).unwrap();
        for r in [0.5f64, 2.0] {
            let dilated = subtract_mean(
                &ScalarField::from_fn(g, |x| (-(x[0] / r) * (x[0] / r)).exp()).unwrap(),
            );
            let sr = seminorm(&dilated, SeminormKind::Hs1, &ord).unwrap();
            let predicted = r.powf(1.0 - 0.5) * s0;
            assert!(
                ((sr - predicted) / predicted).abs() < 0.02,
                "r={r}: {sr} vs {predicted}"
            );
        }
    }

    #[test]
    fn homogeneity_under_scaling() {
        let g = Grid::new(1, 64, 4.0, true).unwrap();
        let f = ScalarField::from_fn(g, |x| (1.3 * x[0]).sin()).unwrap();
        // powers of two scale L1/Linf/weak norms bitwise exactly
        let doubled = f.scale(2.0);
        assert_eq!(
            lp_norm(&doubled, 1.0).unwrap(),
            2.0 * lp_norm(&f, 1.0).unwrap()
        );
        assert_eq!(
            lp_norm(&doubled, f64::INFINITY).unwrap(),
            2.0 * lp_norm(&f, f64::INFINITY).unwrap()
        );
        assert_eq!(
            weak_lp_norm(&doubled, 2.0).unwrap(),
            2.0 * weak_lp_norm(&f, 2.0).unwrap()
        );
        let lam = 3.7;
        let scaled = f.scale(lam);
        let rel = (lp_norm(&scaled, 2.0).unwrap() - lam * lp_norm(&f, 2.0).unwrap()).abs()
            / lp_norm(&scaled, 2.0).unwrap();
        assert!(rel < 1e-14);
    }
}
