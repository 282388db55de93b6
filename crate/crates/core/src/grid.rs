//! Uniform discretization of a box [-L, L)^n, scalar/vector field containers,
//! and the library of analytic test functions used throughout the suites.

use crate::error::{Error, Result};
use serde::Serialize;

pub const MAX_DIM: usize = 3;

/// Relative tolerance below which a field counts as mean-free.
pub const MEAN_ZERO_REL_TOL: f64 = 1e-12;

/// Uniform grid on the box [-L, L)^n with N points per axis.
///
/// Points sit at x_k = -L + k*h with h = 2L/N, so the origin is always a
/// grid point. `periodic` selects torus semantics (spectral operators are
/// only defined there) versus a plain truncation of R^n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub n: usize,
    pub npts: usize,
    pub half_extent: f64,
    pub spacing: f64,
    pub periodic: bool,
}

impl Grid {
    pub fn new(n: usize, npts: usize, half_extent: f64, periodic: bool) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Grid(format!("dimension {n} outside 1..=3")));
        }
        if npts < 8 || !npts.is_power_of_two() {
            return Err(Error::Grid(format!(
                "points per axis {npts} must be a power of two >= 8"
            )));
        }
        if !(half_extent > 0.0) || !half_extent.is_finite() {
            return Err(Error::Grid(format!(
                "half extent {half_extent} must be positive"
            )));
        }
        Ok(Grid {
            n,
            npts,
            half_extent,
            spacing: 2.0 * half_extent / npts as f64,
            periodic,
        })
    }

    /// Total number of grid points N^n.
    pub fn len(&self) -> usize {
        self.npts.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume h^n.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.n as i32)
    }

    /// Coordinate along one axis: x_k = -L + k*h.
    pub fn coord(&self, k: usize) -> f64 {
        -self.half_extent + k as f64 * self.spacing
    }

    /// Row-major flatten of a multi-index (first axis slowest).
    pub fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.n);
        let mut flat = 0;
        for &k in idx {
            debug_assert!(k < self.npts);
            flat = flat * self.npts + k;
        }
        flat
    }

    /// Inverse of [`Grid::flatten`].
    pub fn unflatten(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for a in (0..self.n).rev() {
            idx[a] = flat % self.npts;
            flat /= self.npts;
        }
        idx
    }

    /// Coordinates of the point with flat index `flat` (first `n` entries valid).
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.n {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    /// True if the multi-index touches the outermost `width` layers of the box.
    pub fn on_boundary_collar(&self, idx: &[usize; MAX_DIM], width: usize) -> bool {
        (0..self.n).any(|a| idx[a] < width || idx[a] >= self.npts - width)
    }

    /// Grid with the same box but twice the resolution.
    pub fn refined(&self) -> Result<Grid> {
        Grid::new(self.n, self.npts * 2, self.half_extent, self.periodic)
    }
}

/// Real samples on a [`Grid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
    mean_zero: bool,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("field contains non-finite values".into()));
        }
        Ok(ScalarField {
            grid,
            values,
            mean_zero: false,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
            mean_zero: true,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                f(&x[..grid.n])
            })
            .collect();
        ScalarField::new(grid, values)
    }

    pub fn mean(&self) -> f64 {
        crate::util::pairwise_sum(&self.values) / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Whether the field is flagged or measured mean-free.
    pub fn is_mean_zero(&self) -> bool {
        if self.mean_zero {
            return true;
        }
        let scale = self.max_abs();
        scale == 0.0 || self.mean().abs() <= MEAN_ZERO_REL_TOL * scale
    }

    pub(crate) fn set_mean_zero(&mut self) {
        self.mean_zero = true;
    }

    /// Pointwise map; clears the mean-zero flag.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            mean_zero: false,
        }
    }

    pub fn scale(&self, lambda: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| lambda * v).collect(),
            mean_zero: self.mean_zero,
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip(other, |a, b| a - b)
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::Grid("fields live on different grids".into()));
        }
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            mean_zero: false,
        })
    }
}

/// n scalar components on one shared grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Grid(
                "vector field needs at least one component".into(),
            ));
        }
        let grid = components[0].grid;
        if components.len() != grid.n {
            return Err(Error::Grid(format!(
                "vector field has {} components on a {}-d grid",
                components.len(),
                grid.n
            )));
        }
        if components.iter().any(|c| c.grid != grid) {
            return Err(Error::Grid("vector components on mismatched grids".into()));
        }
        Ok(VectorField { components })
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid
    }
}

/// Analytic test functions standing in for rapidly decaying smooth inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFamily {
    /// amplitude * exp(-|x-c|^2 / width^2)
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// Smooth compactly supported bump: amplitude * exp(1 - 1/(1 - |x-c|^2/r^2)) inside |x-c| < r.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// bump(x - offset) - bump(x + offset): compactly supported with exact zero mean.
    ShiftedBumpPair {
        offset: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// ln|x| with the singular node patched by its neighbor average.
    LogAbs,
    /// 1 on |x| <= r, else 0.
    IndicatorBall { radius: f64 },
    /// amplitude * (|x-c|^2 + width^2)^((order-n)/2), a mollified power kernel.
    RieszKernelMollified {
        order: f64,
        width: f64,
        amplitude: f64,
    },
}

impl TestFamily {
    pub fn gaussian(width: f64) -> Self {
        TestFamily::Gaussian {
            center: vec![],
            width,
            amplitude: 1.0,
        }
    }

    pub fn bump(radius: f64) -> Self {
        TestFamily::Bump {
            center: vec![],
            radius,
            amplitude: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFamily::Gaussian { .. } => "gaussian",
            TestFamily::Bump { .. } => "bump",
            TestFamily::ShiftedBumpPair { .. } => "shifted_bump_pair",
            TestFamily::LogAbs => "log_abs",
            TestFamily::IndicatorBall { .. } => "indicator_ball",
            TestFamily::RieszKernelMollified { .. } => "riesz_kernel_mollified",
        }
    }

    /// The default members every suite iterates over, sized for the given box.
    pub fn default_members(half_extent: f64) -> Vec<TestFamily> {
        vec![
            TestFamily::gaussian(1.0),
            TestFamily::bump((half_extent / 8.0).min(1.0).max(0.5)),
            TestFamily::ShiftedBumpPair {
                offset: vec![],
                radius: (half_extent / 8.0).min(1.0).max(0.5),
                amplitude: 1.0,
            },
            TestFamily::LogAbs,
            TestFamily::IndicatorBall {
                radius: (half_extent / 4.0).min(1.0),
            },
            TestFamily::RieszKernelMollified {
                order: 0.5,
                width: 0.25,
                amplitude: 1.0,
            },
        ]
    }
}

fn center_of(center: &[f64], n: usize) -> Result<Vec<f64>> {
    if center.is_empty() {
        return Ok(vec![0.0; n]);
    }
    if center.len() != n {
        return Err(Error::Sample(format!(
            "center has {} coordinates on a {}-d grid",
            center.len(),
            n
        )));
    }
    Ok(center.to_vec())
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn bump_value(r2_over_rad2: f64, amplitude: f64) -> f64 {
    if r2_over_rad2 < 1.0 {
        amplitude * (1.0 - 1.0 / (1.0 - r2_over_rad2)).exp()
    } else {
        0.0
    }
}

/// Pointwise evaluation of a test family member on a grid.
///
/// Families whose decay or support violates their box invariants are rejected:
/// gaussian and bump tails must fall below 1e-12 of the amplitude at the
/// boundary, and indicator radii must stay below L/2.
pub fn sample(family: &TestFamily, grid: Grid) -> Result<ScalarField> {
    let l = grid.half_extent;
    match family {
        TestFamily::Gaussian {
            center,
            width,
            amplitude,
        } => {
            let c = center_of(center, grid.n)?;
            if !(*width > 0.0) {
                return Err(Error::Sample("gaussian width must be positive".into()));
            }
            let margin = l - c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let boundary = amplitude.abs() * (-(margin / width).powi(2)).exp();
            if margin <= 0.0 || boundary > 1e-12 * amplitude.abs() {
                return Err(Error::Sample(format!(
                    "gaussian tail {boundary:.3e} at the box boundary exceeds 1e-12 of amplitude"
                )));
            }
            ScalarField::from_fn(grid, |x| {
                amplitude * (-dist2(x, &c) / (width * width)).exp()
            })
        }
        TestFamily::Bump {
            center,
            radius,
            amplitude,
        } => {
            let c = center_of(center, grid.n)?;
            if !(*radius > 0.0) {
                return Err(Error::Sample("bump radius must be positive".into()));
            }
            let margin = l - c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if *radius >= margin {
                return Err(Error::Sample(
                    "bump support reaches the box boundary".into(),
                ));
            }
            let r2 = radius * radius;
            ScalarField::from_fn(grid, |x| bump_value(dist2(x, &c) / r2, *amplitude))
        }
        TestFamily::ShiftedBumpPair {
            offset,
            radius,
            amplitude,
        } => {
            let off = if offset.is_empty() {
                let mut o = vec![0.0; grid.n];
                o[0] = 2.0 * radius;
                o
            } else {
                center_of(offset, grid.n)?
            };
            let reach = off.iter().fold(0.0f64, |m, v| m.max(v.abs())) + radius;
            if reach >= l {
                return Err(Error::Sample(
                    "bump pair support reaches the box boundary".into(),
                ));
            }
            let r2 = radius * radius;
            let mut field = ScalarField::from_fn(grid, |x| {
                let plus: Vec<f64> = x.iter().zip(&off).map(|(a, b)| a - b).collect();
                let minus: Vec<f64> = x.iter().zip(&off).map(|(a, b)| a + b).collect();
                let origin = vec![0.0; x.len()];
                bump_value(dist2(&plus, &origin) / r2, *amplitude)
                    - bump_value(dist2(&minus, &origin) / r2, *amplitude)
            })?;
            field.set_mean_zero();
            Ok(field)
        }
        TestFamily::LogAbs => {
            let mut field = ScalarField::from_fn(grid, |x| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    0.0
                } else {
                    r.ln()
                }
            })?;
            // The origin is a grid point; one node cannot carry the singularity,
            // so it takes the average of its axis neighbors (= ln h).
            let mut origin_idx = [0usize; MAX_DIM];
            for a in 0..grid.n {
                origin_idx[a] = grid.npts / 2;
            }
            let origin = grid.flatten(&origin_idx[..grid.n]);
            let mut acc = 0.0;
            let mut count = 0.0;
            for a in 0..grid.n {
                for delta in [-1isize, 1] {
                    let mut idx = origin_idx;
                    idx[a] = (idx[a] as isize + delta) as usize;
                    acc += field.values[grid.flatten(&idx[..grid.n])];
                    count += 1.0;
                }
            }
            field.values[origin] = acc / count;
            Ok(field)
        }
        TestFamily::IndicatorBall { radius } => {
            if !(*radius > 0.0) || *radius >= l / 2.0 {
                return Err(Error::Sample(format!(
                    "indicator radius {radius} must lie in (0, L/2)"
                )));
            }
            let r2 = radius * radius;
            ScalarField::from_fn(grid, |x| {
                if x.iter().map(|v| v * v).sum::<f64>() <= r2 {
                    1.0
                } else {
                    0.0
                }
            })
        }
        TestFamily::RieszKernelMollified {
            order,
            width,
            amplitude,
        } => {
            if !(*order > 0.0 && *order < 1.0) {
                return Err(Error::Sample(format!("kernel order {order} outside (0,1)")));
            }
            if !(*width >= 0.0) {
                return Err(Error::Sample("kernel width must be nonnegative".into()));
            }
            let expo = (order - grid.n as f64) / 2.0;
            let w2 = width * width;
            ScalarField::from_fn(grid, |x| {
                let r2 = x.iter().map(|v| v * v).sum::<f64>() + w2;
                if r2 == 0.0 {
                    0.0
                } else {
                    amplitude * r2.powf(expo)
                }
            })
        }
    }
}

/// Arithmetic mean of the samples.
pub fn field_mean(field: &ScalarField) -> f64 {
    field.mean()
}

/// Subtract the grid mean, fixing the modulo-constants quotient.
///
/// Idempotent: a field already flagged mean-free is returned unchanged, so
/// `subtract_mean(subtract_mean(f))` is bitwise equal to `subtract_mean(f)`.
pub fn subtract_mean(field: &ScalarField) -> ScalarField {
    if field.mean_zero {
        return field.clone();
    }
    let m = field.mean();
    let mut out = ScalarField {
        grid: field.grid,
        values: field.values.iter().map(|&v| v - m).collect(),
        mean_zero: true,
    };
    out.set_mean_zero();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(1, 7, 4.0, true).is_err());
        assert!(Grid::new(0, 8, 4.0, true).is_err());
        assert!(Grid::new(4, 8, 4.0, true).is_err());
        assert!(Grid::new(1, 8, 0.0, true).is_err());
    }

    #[test]
    fn grid_coordinates_match_spacing() {
        let g = Grid::new(1, 8, 4.0, true).unwrap();
        assert_eq!(g.spacing, 1.0);
        let xs: Vec<f64> = (0..8).map(|k| g.coord(k)).collect();
        assert_eq!(xs, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let g2 = Grid::new(2, 8, 4.0, true).unwrap();
        assert_eq!(g2.len(), 64);
    }

    #[test]
    fn gaussian_peaks_at_origin() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let f = sample(&TestFamily::gaussian(1.0), g).unwrap();
        assert_eq!(f.max_abs(), 1.0);
        let origin = g.flatten(&[128]);
        assert_eq!(f.values[origin], 1.0);
    }

    #[test]
    fn indicator_ball_is_zero_one() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let f = sample(&TestFamily::IndicatorBall { radius: 1.0 }, g).unwrap();
        for i in 0..g.len() {
            let x = g.point(i)[0];
            let expect = if x.abs() <= 1.0 { 1.0 } else { 0.0 };
            assert_eq!(f.values[i], expect);
        }
    }

    #[test]
    fn log_abs_origin_patched() {
        let g = Grid::new(2, 64, 16.0, true).unwrap();
        let f = sample(&TestFamily::LogAbs, g).unwrap();
        let origin = g.flatten(&[32, 32]);
        assert!((f.values[origin] - g.spacing.ln()).abs() < 1e-12);
    }

    #[test]
    fn subtract_mean_is_idempotent_bitwise() {
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let f = sample(&TestFamily::gaussian(1.0), g).unwrap();
        let once = subtract_mean(&f);
        let twice = subtract_mean(&once);
        assert_eq!(once.values, twice.values);
        assert!(once.is_mean_zero());
    }

    #[test]
    fn constant_field_minus_mean_is_zero() {
        let g = Grid::new(1, 8, 4.0, false).unwrap();
        let f = ScalarField::new(g, vec![5.0; 8]).unwrap();
        let z = subtract_mean(&f);
        assert!(z.values.iter().all(|&v| v == 0.0));
        let zero = ScalarField::zeros(g);
        assert_eq!(subtract_mean(&zero).values, zero.values);
    }

    #[test]
    fn gaussian_grid_mean_matches_quadrature_oracle() {
        // exp(-x^2) integrates to sqrt(pi); the grid mean is that over 2L
        let g = Grid::new(1, 256, 16.0, true).unwrap();
        let f = sample(&TestFamily::gaussian(1.0), g).unwrap();
        let mean = field_mean(&f);
        let mut trapezoid = 0.0;
        for k in 0..g.npts {
            let x = g.coord(k);
            trapezoid += (-x * x).exp() * g.spacing;
        }
        let oracle = trapezoid / (2.0 * g.half_extent);
        assert!((mean - oracle).abs() < 1e-14);
        assert!((mean - std::f64::consts::PI.sqrt() / 32.0).abs() < 1e-12);
        let centered = subtract_mean(&f);
        assert!(centered.mean().abs() <= MEAN_ZERO_REL_TOL * centered.max_abs());
    }

    #[test]
    fn sampling_consistency_improves_under_refinement() {
        // midpoint interpolation defect against the twice-refined sampling
        let defect = |npts: usize| -> f64 {
            let coarse = Grid::new(1, npts, 16.0, true).unwrap();
            let fine = Grid::new(1, 2 * npts, 16.0, true).unwrap();
            let fc = sample(&TestFamily::gaussian(1.0), coarse).unwrap();
            let ff = sample(&TestFamily::gaussian(1.0), fine).unwrap();
            let mut acc = 0.0f64;
            for k in 0..npts - 1 {
                let mid = 0.5 * (fc.values[k] + fc.values[k + 1]);
                acc = acc.max((mid - ff.values[2 * k + 1]).abs());
            }
            acc
        };
        for family_defects in [(defect(128), defect(256))] {
            assert!(
                family_defects.1 < family_defects.0,
                "refinement should tighten sampling: {family_defects:?}"
            );
        }
    }

    #[test]
    fn oversized_supports_are_rejected() {
        let g = Grid::new(1, 8, 4.0, true).unwrap();
        assert!(sample(&TestFamily::gaussian(4.0), g).is_err());
        assert!(sample(&TestFamily::IndicatorBall { radius: 3.0 }, g).is_err());
        assert!(sample(&TestFamily::bump(5.0), g).is_err());
    }
}
