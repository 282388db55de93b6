//! Set functions: dyadic Hausdorff content by exact tree dynamic programming,
//! atomic measures with their growth norms, trace ratios, and the level-set
//! capacitary integral built on the variational solver.

use crate::error::{Error, Result};
use crate::fracops::FracOrder;
use crate::grid::{Grid, ScalarField, MAX_DIM};
use crate::norms::{self, SeminormKind};
use crate::solver::{variational_capacity, CapacityKind, CapacityProblem, SolverParams};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// A compact set marked as a union of finest-level dyadic cells.
#[derive(Debug, Clone)]
pub struct DyadicSet {
    pub grid: Grid,
    pub cells: BTreeSet<usize>,
}

impl DyadicSet {
    pub fn empty(grid: Grid) -> Self {
        DyadicSet {
            grid,
            cells: BTreeSet::new(),
        }
    }

    pub fn from_cells(grid: Grid, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let total = grid.len();
        let cells: BTreeSet<usize> = cells.into_iter().collect();
        if let Some(&bad) = cells.iter().find(|&&c| c >= total) {
            return Err(Error::Capacity(format!(
                "cell index {bad} outside grid of {total}"
            )));
        }
        Ok(DyadicSet { grid, cells })
    }

    /// Cells whose center lies in the closed ball B(center, r).
    pub fn ball(grid: Grid, center: &[f64], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Capacity(format!(
                "ball radius {radius} must be positive"
            )));
        }
        let mut cells = BTreeSet::new();
        for i in 0..grid.len() {
            let x = grid.point(i);
            let mut r2 = 0.0;
            for a in 0..grid.n {
                let c = center.get(a).copied().unwrap_or(0.0);
                r2 += (x[a] - c) * (x[a] - c);
            }
            if r2 <= radius * radius {
                cells.insert(i);
            }
        }
        Ok(DyadicSet { grid, cells })
    }

    /// Cells with |x|_inf <= side/2 (a centered cube of the given side).
    pub fn cube(grid: Grid, side: f64) -> Result<Self> {
        if !(side > 0.0) {
            return Err(Error::Capacity(format!(
                "cube side {side} must be positive"
            )));
        }
        let half = side / 2.0;
        let mut cells = BTreeSet::new();
        for i in 0..grid.len() {
            let x = grid.point(i);
            if (0..grid.n).all(|a| x[a].abs() <= half) {
                cells.insert(i);
            }
        }
        Ok(DyadicSet { grid, cells })
    }

    /// The open superlevel set {u > t} as finest-level cells.
    pub fn super_level(field: &ScalarField, t: f64) -> Self {
        let cells = field
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > t)
            .map(|(i, _)| i)
            .collect();
        DyadicSet {
            grid: field.grid,
            cells,
        }
    }

    /// {|u| > t}.
    pub fn abs_super_level(field: &ScalarField, t: f64) -> Self {
        let cells = field
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v.abs() > t)
            .map(|(i, _)| i)
            .collect();
        DyadicSet {
            grid: field.grid,
            cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn union(&self, other: &DyadicSet) -> Result<DyadicSet> {
        if self.grid != other.grid {
            return Err(Error::Capacity("set union across different grids".into()));
        }
        let cells = self.cells.union(&other.cells).copied().collect();
        Ok(DyadicSet {
            grid: self.grid,
            cells,
        })
    }

    pub fn is_subset(&self, other: &DyadicSet) -> bool {
        self.grid == other.grid && self.cells.is_subset(&other.cells)
    }
}

/// Dyadic Hausdorff content by bottom-up dynamic programming over the cube
/// tree: content(Q) = min(side(Q)^alpha, sum over children), exact for the
/// dyadic-cover definition. Ball-based content differs by at most a
/// dimensional factor, which reports carry rather than hide.
pub fn hausdorff_content(set: &DyadicSet, alpha: f64) -> Result<f64> {
    let g = set.grid;
    if !(alpha > 0.0 && alpha < g.n as f64) {
        return Err(Error::Capacity(format!(
            "content exponent {alpha} outside (0, n)"
        )));
    }
    if set.cells.is_empty() {
        return Ok(0.0);
    }
    let depth = (g.npts as f64).log2().round() as usize;
    // finest level: one entry per grid cell
    let mut level: Vec<f64> = vec![0.0; g.len()];
    let leaf_cost = g.spacing.powf(alpha);
    for &c in &set.cells {
        level[c] = leaf_cost;
    }
    for d in (0..depth).rev() {
        let cubes_per_axis = 1usize << d;
        let side = 2.0 * g.half_extent / cubes_per_axis as f64;
        let cover_cost = side.powf(alpha);
        let child_axis = cubes_per_axis * 2;
        let mut next = vec![0.0; cubes_per_axis.pow(g.n as u32)];
        for (parent, slot) in next.iter_mut().enumerate() {
            // decompose parent index, gather 2^n children
            let mut rem = parent;
            let mut origin = [0usize; MAX_DIM];
            for a in (0..g.n).rev() {
                origin[a] = (rem % cubes_per_axis) * 2;
                rem /= cubes_per_axis;
            }
            let mut child_sum = 0.0;
            for corner in 0..(1usize << g.n) {
                let mut flat = 0;
                for a in 0..g.n {
                    let bit = (corner >> (g.n - 1 - a)) & 1;
                    flat = flat * child_axis + origin[a] + bit;
                }
                child_sum += level[flat];
            }
            *slot = if child_sum > 0.0 {
                child_sum.min(cover_cost)
            } else {
                0.0
            };
        }
        level = next;
    }
    Ok(level[0])
}

/// Atomic nonnegative measure. `resolution` records the spacing of the
/// discretization it came from; the growth-norm scan never probes balls
/// smaller than it. Raw point masses (no resolution) legitimately diverge.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    pub n: usize,
    pub atoms: Vec<([f64; MAX_DIM], f64)>,
    pub resolution: Option<f64>,
}

impl DiscreteMeasure {
    pub fn new(
        n: usize,
        atoms: Vec<([f64; MAX_DIM], f64)>,
        resolution: Option<f64>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Capacity(format!(
                "measure dimension {n} outside 1..=3"
            )));
        }
        for (point, weight) in &atoms {
            if !weight.is_finite() || *weight < 0.0 {
                return Err(Error::Capacity(format!(
                    "atom weight {weight} must be >= 0"
                )));
            }
            if point[..n].iter().any(|c| !c.is_finite()) {
                return Err(Error::Capacity("atom coordinates must be finite".into()));
            }
        }
        Ok(DiscreteMeasure {
            n,
            atoms,
            resolution,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Uniform lattice measure of spacing `delta` filling the box
    /// [-side/2, side/2]^n, weight delta^n per atom (area/length element).
    pub fn uniform_cube(n: usize, side: f64, delta: f64) -> Result<Self> {
        let count = (side / delta).round() as usize + 1;
        let mut atoms = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let mut point = [0.0; MAX_DIM];
            for a in 0..n {
                point[a] = -side / 2.0 + idx[a] as f64 * delta;
            }
            atoms.push((point, delta.powi(n as i32)));
            let mut a = n;
            loop {
                if a == 0 {
                    return DiscreteMeasure::new(n, atoms, Some(delta));
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < count {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    /// Atoms along the first axis in [-length/2, length/2], weight delta each
    /// (arclength element), embedded in dimension n.
    pub fn segment(n: usize, length: f64, delta: f64) -> Result<Self> {
        let count = (length / delta).round() as usize + 1;
        let atoms = (0..count)
            .map(|k| {
                let mut point = [0.0; MAX_DIM];
                point[0] = -length / 2.0 + k as f64 * delta;
                (point, delta)
            })
            .collect();
        DiscreteMeasure::new(n, atoms, Some(delta))
    }

    fn mass_in_ball(&self, center: &[f64; MAX_DIM], radius: f64) -> f64 {
        let r2 = radius * radius;
        self.atoms
            .iter()
            .filter(|(p, _)| {
                let d2: f64 = (0..self.n).map(|a| (p[a] - center[a]).powi(2)).sum();
                d2 < r2
            })
            .map(|(_, w)| w)
            .sum()
    }
}

/// Growth norm sup over centers and dyadic radii of r^{beta-n} mu(B(x,r)).
/// Centers run over the atoms plus a coarse lattice across the atom bounding
/// box; radii halve dyadically from the diameter down to the measure
/// resolution. Without a resolution the scan keeps descending and reports
/// +infinity once the value passes 1e12 (a point mass diverges as r -> 0).
pub fn measure_growth_norm(mu: &DiscreteMeasure, beta: f64) -> Result<f64> {
    let n = mu.n;
    if !(beta >= 0.0 && beta < n as f64) {
        return Err(Error::Capacity(format!(
            "growth exponent {beta} outside [0, n)"
        )));
    }
    if mu.atoms.is_empty() || mu.atoms.iter().all(|(_, w)| *w == 0.0) {
        return Ok(0.0);
    }
    let mut lo = [f64::INFINITY; MAX_DIM];
    let mut hi = [f64::NEG_INFINITY; MAX_DIM];
    for (p, _) in &mu.atoms {
        for a in 0..n {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let diameter = (0..n)
        .map(|a| (hi[a] - lo[a]).powi(2))
        .sum::<f64>()
        .sqrt()
        .max(mu.resolution.unwrap_or(1e-3));
    let mut centers: Vec<[f64; MAX_DIM]> = mu.atoms.iter().map(|(p, _)| *p).collect();
    // coarse lattice over the bounding box adds off-atom candidates
    let lattice_step = (diameter / 16.0).max(mu.resolution.unwrap_or(diameter / 16.0));
    let mut idx = [0usize; MAX_DIM];
    let counts: Vec<usize> = (0..n)
        .map(|a| (((hi[a] - lo[a]) / lattice_step).floor() as usize + 2).min(33))
        .collect();
    'outer: loop {
        let mut point = [0.0; MAX_DIM];
        for a in 0..n {
            point[a] = lo[a] + idx[a] as f64 * lattice_step;
        }
        centers.push(point);
        let mut a = n;
        loop {
            if a == 0 {
                break 'outer;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    let expo = beta - n as f64;
    let mut best = 0.0f64;
    let mut radius = 2.0 * diameter;
    // Below a couple of resolutions the scan would measure lattice artifacts
    // of the discretization rather than the measure it stands for.
    let min_radius = mu.resolution.map(|r| 2.5 * r).unwrap_or(0.0);
    for _ in 0..200 {
        let scale = radius.powf(expo);
        let level_best = centers
            .par_iter()
            .map(|c| mu.mass_in_ball(c, radius))
            .reduce(|| 0.0f64, f64::max);
        best = best.max(scale * level_best);
        if best > 1e12 {
            return Ok(f64::INFINITY);
        }
        radius /= 2.0;
        if radius < min_radius {
            break;
        }
    }
    Ok(best)
}

/// Multilinear interpolation of a field at an off-grid point.
pub fn interpolate(field: &ScalarField, point: &[f64; MAX_DIM]) -> f64 {
    let g = field.grid;
    let mut base = [0usize; MAX_DIM];
    let mut frac = [0.0f64; MAX_DIM];
    for a in 0..g.n {
        let t = (point[a] + g.half_extent) / g.spacing;
        let t = t.clamp(0.0, (g.npts - 1) as f64 - 1e-9);
        base[a] = t.floor() as usize;
        frac[a] = t - base[a] as f64;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << g.n) {
        let mut w = 1.0;
        let mut idx = [0usize; MAX_DIM];
        for a in 0..g.n {
            let bit = (corner >> a) & 1;
            idx[a] = base[a] + bit;
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
        }
        if w > 0.0 {
            acc += w * field.values[g.flatten(&idx[..g.n])];
        }
    }
    acc
}

/// Trace comparison mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// mu-L^{n/(n-s)} norm against the full fractional Hardy seminorm.
    Strong,
    /// weak mu-norm against the minus-gradient seminorm.
    Weak,
}

/// Ratio of the measure-weighted norm of u to its seminorm; 0/0 reports 0 and
/// a zero seminorm with nonzero numerator reports +infinity (a constant-like
/// degenerate input).
pub fn trace_ratio(
    mu: &DiscreteMeasure,
    u: &ScalarField,
    ord: &FracOrder,
    mode: TraceMode,
) -> Result<f64> {
    if mu.n != u.grid.n {
        return Err(Error::Capacity(
            "measure and field dimensions differ".into(),
        ));
    }
    let p = ord.n as f64 / (ord.n as f64 - ord.s);
    let samples: Vec<(f64, f64)> = mu
        .atoms
        .iter()
        .map(|(point, w)| (interpolate(u, point).abs(), *w))
        .collect();
    let numerator = match mode {
        TraceMode::Strong => samples
            .iter()
            .map(|(v, w)| w * v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
        TraceMode::Weak => {
            let mut sorted = samples.clone();
            sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            let mut mass = 0.0;
            let mut best = 0.0f64;
            for (v, w) in sorted {
                mass += w;
                if v > 0.0 {
                    best = best.max(v * mass.powf(1.0 / p));
                }
            }
            best
        }
    };
    let kind = match mode {
        TraceMode::Strong => SeminormKind::Hs1,
        TraceMode::Weak => SeminormKind::Hs1Minus,
    };
    let denominator = norms::seminorm(u, kind, ord)?;
    if denominator == 0.0 {
        return Ok(if numerator == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(numerator / denominator)
}

/// Dyadic bracket of the capacitary level-set integral
/// int_0^infty Cap({|u| > t}) dt.
#[derive(Debug, Clone, Serialize)]
pub struct CapIntegral {
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    pub bracket_width: f64,
    /// (t, capacity value) per computed dyadic level, highest t first.
    pub levels: Vec<(f64, f64)>,
    /// estimate of the mass below the lowest computed level, extrapolating
    /// the last level's capacity (level caps saturate once the sets fill the
    /// admissible region)
    pub truncated_tail: f64,
}

/// Largest |u| on the boundary collar: mean-freed stand-ins for decaying
/// functions sit on a constant plateau of this size far from their support,
/// and dyadic levels below it describe the quotient fix rather than the
/// function.
pub fn collar_floor(u: &ScalarField, collar_width: usize) -> f64 {
    let g = u.grid;
    let mut floor = 0.0f64;
    for i in 0..g.len() {
        let idx = g.unflatten(i);
        if g.on_boundary_collar(&idx, collar_width) {
            floor = floor.max(u.values[i].abs());
        }
    }
    floor
}

/// Dyadic slicing of the capacitary integral: levels t = 2^k from just above
/// max|u| down to the collar floor, each level set solved as a capacity
/// problem; the sums over levels give a two-sided bracket whose midpoint is
/// reported.
pub fn level_set_capacity_integral(
    u: &ScalarField,
    kind: CapacityKind,
    ord: &FracOrder,
    params: &SolverParams,
) -> Result<CapIntegral> {
    let max_t = u.max_abs();
    if max_t == 0.0 {
        return Ok(CapIntegral {
            lower: 0.0,
            upper: 0.0,
            midpoint: 0.0,
            bracket_width: 0.0,
            levels: Vec::new(),
            truncated_tail: 0.0,
        });
    }
    let k_top = max_t.log2().floor() as i32;
    let floor = collar_floor(
        u,
        crate::solver::collar_cells(u.grid, params.collar_fraction),
    );
    let k_floor = if floor > 0.0 {
        floor.log2().floor() as i32 + 1
    } else {
        i32::MIN + 64
    };
    let k_min = (k_top - 18).max(k_floor);
    let ks: Vec<i32> = (k_min..=k_top).rev().collect();
    let caps: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let t = 2f64.powi(k);
            let set = DyadicSet::abs_super_level(u, t);
            let problem = CapacityProblem {
                set,
                kind,
                ord: *ord,
                params: params.clone(),
            };
            let cap = if problem.set.is_empty() {
                0.0
            } else {
                variational_capacity(&problem)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            };
            (t, cap)
        })
        .collect();
    if caps.iter().any(|(_, c)| c.is_nan()) {
        return Err(Error::Capacity("a level solve failed".into()));
    }
    let sum: f64 = caps.iter().map(|(t, c)| t * c).sum();
    // sets below the lowest level keep growing toward the admissible region,
    // where their capacity saturates near the last computed value
    let largest = caps.last().map(|(_, c)| *c).unwrap_or(0.0);
    let tail = 2f64.powi(k_min) * largest * 2.0;
    let upper = sum + tail;
    let lower = 0.5 * sum;
    Ok(CapIntegral {
        lower,
        upper,
        midpoint: 0.5 * (lower + upper),
        bracket_width: upper - lower,
        levels: caps,
        truncated_tail: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Lcg;

    fn grid1(npts: usize, l: f64) -> Grid {
        Grid::new(1, npts, l, true).unwrap()
    }

    #[test]
    fn content_of_empty_and_single_cube() {
        let g = grid1(32, 16.0);
        let empty = DyadicSet::empty(g);
        assert_eq!(hausdorff_content(&empty, 0.5).unwrap(), 0.0);
        // a single finest cell costs exactly h^alpha
        let single = DyadicSet::from_cells(g, [5usize]).unwrap();
        let got = hausdorff_content(&single, 0.5).unwrap();
        assert_eq!(got, g.spacing.powf(0.5));
    }

    #[test]
    fn content_of_two_far_unit_cubes() {
        // box [-16,16), h=1: unit cubes are single cells; two cells 8 apart
        // are cheaper covered separately (1+1) than by the enclosing cover.
        let g = grid1(32, 16.0);
        let a = (4.0f64 + 16.0) as usize; // x = 4
        let b = (12.0f64 + 16.0) as usize; // x = 12
        let set = DyadicSet::from_cells(g, [a, b]).unwrap();
        let got = hausdorff_content(&set, 0.5).unwrap();
        assert_eq!(got, 2.0, "expected separate unit covers, got {got}");
    }

    /// Exhaustive antichain covers of a dyadic tree, independent of the DP.
    fn brute_force_content(g: Grid, cells: &BTreeSet<usize>, alpha: f64) -> f64 {
        #[derive(Clone)]
        struct Cover {
            // (depth, flat index at that depth)
            cubes: Vec<(usize, usize)>,
        }
        fn enumerate(n: usize, depth: usize, max_depth: usize, flat: usize) -> Vec<Cover> {
            let mut covers = vec![Cover {
                cubes: vec![(depth, flat)],
            }];
            if depth < max_depth {
                let kids: Vec<Vec<Cover>> = (0..(1usize << n))
                    .map(|corner| {
                        // child flat index at depth+1
                        let axis = 1usize << depth;
                        let child_axis = axis * 2;
                        let mut rem = flat;
                        let mut origin = vec![0usize; n];
                        for a in (0..n).rev() {
                            origin[a] = (rem % axis) * 2;
                            rem /= axis;
                        }
                        let mut child = 0;
                        for a in 0..n {
                            let bit = (corner >> (n - 1 - a)) & 1;
                            child = child * child_axis + origin[a] + bit;
                        }
                        enumerate(n, depth + 1, max_depth, child)
                    })
                    .collect();
                // cartesian product of child covers
                let mut products: Vec<Cover> = vec![Cover { cubes: vec![] }];
                for options in kids {
                    let mut next = Vec::new();
                    for base in &products {
                        for opt in &options {
                            let mut c = base.clone();
                            c.cubes.extend(opt.cubes.iter().copied());
                            next.push(c);
                        }
                    }
                    products = next;
                }
                covers.extend(products);
            }
            covers
        }
        let max_depth = (g.npts as f64).log2().round() as usize;
        let covers = enumerate(g.n, 0, max_depth, 0);
        let mut best = f64::INFINITY;
        'cover: for cover in &covers {
            // check the cover contains every marked leaf, under some cube
            for &leaf in cells {
                let leaf_idx = g.unflatten(leaf);
                let mut covered = false;
                for &(d, flat) in &cover.cubes {
                    let shift = max_depth - d;
                    let axis = 1usize << d;
                    let mut rem = flat;
                    let mut ok = true;
                    for a in (0..g.n).rev() {
                        let cube_coord = rem % axis;
                        rem /= axis;
                        if leaf_idx[a] >> shift != cube_coord {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        covered = true;
                        break;
                    }
                }
                if !covered {
                    continue 'cover;
                }
            }
            let cost: f64 = cover
                .cubes
                .iter()
                .map(|&(d, flat)| {
                    let side = 2.0 * g.half_extent / (1usize << d) as f64;
                    // only count cubes that actually meet the set
                    let shift = max_depth - d;
                    let axis = 1usize << d;
                    let meets = cells.iter().any(|&leaf| {
                        let leaf_idx = g.unflatten(leaf);
                        let mut rem = flat;
                        let mut ok = true;
                        for a in (0..g.n).rev() {
                            let cube_coord = rem % axis;
                            rem /= axis;
                            if leaf_idx[a] >> shift != cube_coord {
                                ok = false;
                                break;
                            }
                        }
                        ok
                    });
                    if meets {
                        side.powf(alpha)
                    } else {
                        0.0
                    }
                })
                .sum();
            best = best.min(cost);
        }
        if cells.is_empty() {
            0.0
        } else {
            best
        }
    }

    #[test]
    fn dp_matches_brute_force_on_all_1d_depth3_subsets() {
        let g = Grid::new(1, 8, 4.0, true).unwrap();
        for mask in 0u32..256 {
            let cells: BTreeSet<usize> = (0..8).filter(|&c| mask >> c & 1 == 1).collect();
            let set = DyadicSet {
                grid: g,
                cells: cells.clone(),
            };
            let dp = hausdorff_content(&set, 0.7).unwrap_or(0.0);
            let bf = brute_force_content(g, &cells, 0.7);
            assert_eq!(dp, bf, "mask {mask:08b}: dp {dp} vs brute force {bf}");
        }
    }

    #[test]
    fn dp_matches_brute_force_on_sampled_2d_subsets() {
        let g = Grid::new(2, 8, 4.0, true).unwrap();
        let mut lcg = Lcg::new(42);
        for _ in 0..40 {
            let count = 1 + lcg.next_below(6);
            let cells: BTreeSet<usize> = (0..count).map(|_| lcg.next_below(64)).collect();
            let set = DyadicSet {
                grid: g,
                cells: cells.clone(),
            };
            let dp = hausdorff_content(&set, 1.2).unwrap();
            let bf = brute_force_content(g, &cells, 1.2);
            assert_eq!(dp, bf, "cells {cells:?}");
        }
    }

    #[test]
    fn content_monotone_and_subadditive() {
        let g = Grid::new(2, 16, 8.0, true).unwrap();
        let mut lcg = Lcg::new(7);
        for _ in 0..25 {
            let a: BTreeSet<usize> = (0..1 + lcg.next_below(10))
                .map(|_| lcg.next_below(g.len()))
                .collect();
            let b: BTreeSet<usize> = (0..1 + lcg.next_below(10))
                .map(|_| lcg.next_below(g.len()))
                .collect();
            let sa = DyadicSet {
                grid: g,
                cells: a.clone(),
            };
            let sb = DyadicSet {
                grid: g,
                cells: b.clone(),
            };
            let su = sa.union(&sb).unwrap();
            let ca = hausdorff_content(&sa, 1.5).unwrap();
            let cb = hausdorff_content(&sb, 1.5).unwrap();
            let cu = hausdorff_content(&su, 1.5).unwrap();
            assert!(cu <= ca + cb + 1e-12, "subadditivity: {cu} > {ca} + {cb}");
            assert!(ca <= cu + 1e-12, "monotonicity");
        }
    }

    #[test]
    fn growth_norm_of_point_mass_diverges() {
        let mu = DiscreteMeasure::new(2, vec![([0.0, 0.0, 0.0], 1.0)], None).unwrap();
        assert_eq!(measure_growth_norm(&mu, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn growth_norm_of_segment_measure() {
        // spacing delta, weight delta, beta = 1: mu(B(x,r)) ~ 2r, norm ~ 2
        let mu = DiscreteMeasure::segment(2, 1.0, 1.0 / 128.0).unwrap();
        let norm = measure_growth_norm(&mu, 1.0).unwrap();
        assert!((norm - 2.0).abs() < 0.3, "segment growth norm {norm}");
    }

    #[test]
    fn growth_norm_of_area_measure() {
        // mu(B) ~ pi r^2, beta = 0: norm ~ pi
        let mu = DiscreteMeasure::uniform_cube(2, 1.0, 1.0 / 64.0).unwrap();
        let norm = measure_growth_norm(&mu, 0.0).unwrap();
        assert!(
            (norm - std::f64::consts::PI).abs() < 0.35,
            "area growth norm {norm}"
        );
    }

    #[test]
    fn growth_norm_rejects_bad_beta() {
        let mu = DiscreteMeasure::segment(2, 1.0, 0.25).unwrap();
        assert!(measure_growth_norm(&mu, 2.0).is_err());
        assert!(measure_growth_norm(&mu, -0.1).is_err());
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        let g = Grid::new(2, 16, 4.0, false).unwrap();
        let f = ScalarField::from_fn(g, |x| 2.0 * x[0] - 0.5 * x[1] + 1.0).unwrap();
        let p = [0.3, -1.7, 0.0];
        let got = interpolate(&f, &p);
        let want = 2.0 * 0.3 - 0.5 * (-1.7) + 1.0;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn level_integral_of_cube_indicator_is_single_level() {
        use crate::solver::{variational_capacity, CapacityKind, CapacityProblem, SolverParams};
        let g = Grid::new(1, 128, 8.0, true).unwrap();
        let u = ScalarField::from_fn(g, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        let ord = FracOrder::new(1, 0.5).unwrap();
        let params = SolverParams::default();
        let integral =
            level_set_capacity_integral(&u, CapacityKind::Hs1Plus, &ord, &params).unwrap();
        let set = DyadicSet::abs_super_level(&u, 0.5);
        let cap = variational_capacity(&CapacityProblem {
            set,
            kind: CapacityKind::Hs1Plus,
            ord,
            params,
        })
        .unwrap()
        .value;
        // all dyadic slabs below the plateau see the same set, so the upper
        // sum telescopes to the single-level product Cap(Q) * height
        assert!(
            (integral.upper - integral.truncated_tail - cap).abs() < 0.01 * cap,
            "upper {} vs cap {cap}",
            integral.upper
        );
        let zero = ScalarField::zeros(g);
        let z = level_set_capacity_integral(
            &zero,
            CapacityKind::Hs1Plus,
            &ord,
            &SolverParams::default(),
        )
        .unwrap();
        assert_eq!(z.midpoint, 0.0);
        assert_eq!(z.levels.len(), 0);
    }

    #[test]
    fn trace_ratio_zero_conventions() {
        let g = Grid::new(2, 32, 8.0, true).unwrap();
        let ord = FracOrder::new(2, 0.5).unwrap();
        let mu = DiscreteMeasure::uniform_cube(2, 1.0, 0.25).unwrap();
        let zero = ScalarField::zeros(g);
        assert_eq!(
            trace_ratio(&mu, &zero, &ord, TraceMode::Strong).unwrap(),
            0.0
        );
    }
}
