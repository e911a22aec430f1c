//! Periodic ground states, the 7×7 block-spin representation and the Peierls audit.
//!
//! A periodic ground state is a torus MIS of extremal density: `1/7` (sparse, every
//! empty site sees exactly one occupied neighbour) or `1/3` (dense, a colour class).

use crate::configspace::{brute_enumerate_maximal, density, random_maximal, torus_counts, Configuration, MisProblem};
use crate::delaunay::{triangulate, Triangle};
use crate::error::{Error, Result};
use crate::lattice::{norm2, Region, Site};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeSet, VecDeque};

/// Side of a block in the block-spin representation.
pub const BLOCK: usize = 7;
/// Denominator of the linear Peierls constant.
pub const PEIERLS_DENOMINATOR: i64 = 378;

/// Torus maximal configurations with exactly `BLOCK` occupied sites on `T_{7,7}`.
pub fn enumerate_pgs_sparse() -> Result<Vec<Configuration>> {
    brute_enumerate_maximal(&Region::torus(BLOCK, BLOCK), Some(BLOCK))
}

/// Torus maximal configurations with exactly 3 occupied sites on `T_{3,3}`.
pub fn enumerate_pgs_dense() -> Result<Vec<Configuration>> {
    brute_enumerate_maximal(&Region::torus(3, 3), Some(3))
}

/// Image of a torus configuration under a site map, reduced to the torus.
fn map_torus(c: &Configuration, f: impl Fn(Site) -> Site) -> Configuration {
    let r = c.region();
    Configuration::from_occupied(r.clone(), c.occupied_sites().into_iter().map(|s| r.canonical(f(s)).expect("torus")))
        .expect("canonical sites lie in the torus")
}

pub fn translate(c: &Configuration, d: (i64, i64)) -> Configuration {
    map_torus(c, |s| s.offset(d))
}

/// Reflection `(i, j) -> (j, i)` of a square torus, a symmetry of the lattice.
pub fn mirror(c: &Configuration) -> Result<Configuration> {
    match *c.region() {
        Region::Torus { v1, v2 } if v1 == v2 => Ok(map_torus(c, |s| Site::new(s.j, s.i))),
        _ => Err(Error::InvalidArgument("mirror needs a square torus".into())),
    }
}

/// Orbits of a list of torus configurations under all torus translations, as index lists.
pub fn translation_orbits(configs: &[Configuration]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; configs.len()];
    let mut orbits = Vec::new();
    for k in 0..configs.len() {
        if seen[k] {
            continue;
        }
        let (v1, v2) = match *configs[k].region() {
            Region::Torus { v1, v2 } => (v1 as i64, v2 as i64),
            _ => (1, 1),
        };
        let images: BTreeSet<Vec<bool>> = (0..v1)
            .flat_map(|a| (0..v2).map(move |b| (a, b)))
            .map(|d| translate(&configs[k], d).bits().to_vec())
            .collect();
        let orbit: Vec<usize> = (0..configs.len()).filter(|&l| images.contains(configs[l].bits())).collect();
        for &l in &orbit {
            seen[l] = true;
        }
        orbits.push(orbit);
    }
    orbits
}

fn mask_of(c: &Configuration) -> u64 {
    c.bits().iter().enumerate().filter(|(_, &b)| b).fold(0, |m, (k, _)| m | 1 << k)
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundStateCatalog {
    pub sparse: Vec<Configuration>,
    pub dense: Vec<Configuration>,
    /// Occupancy masks of the sparse states as 7×7 blocks, row-major.
    pub patterns: Vec<u64>,
}

impl GroundStateCatalog {
    pub fn build() -> Result<GroundStateCatalog> {
        let sparse = enumerate_pgs_sparse()?;
        let dense = enumerate_pgs_dense()?;
        let patterns = sparse.iter().map(mask_of).collect();
        Ok(GroundStateCatalog { sparse, dense, patterns })
    }

    pub fn pattern_index(&self, mask: u64) -> Option<usize> {
        self.patterns.iter().position(|&p| p == mask)
    }

    /// The sparse state `q` repeated over `T_{7k1, 7k2}`.
    pub fn periodic_sparse(&self, q: usize, k1: usize, k2: usize) -> Configuration {
        let r = Region::torus(BLOCK * k1, BLOCK * k2);
        let b = BLOCK as i64;
        let sites = r.sites().into_iter().filter(|s| self.sparse[q].is_occupied(Site::new(s.i % b, s.j % b)));
        Configuration::from_occupied(r.clone(), sites).expect("sites of the torus")
    }

    /// Text grids of all states, sparse first.
    pub fn grids(&self) -> (Vec<String>, Vec<String>) {
        (self.sparse.iter().map(|c| c.to_grid()).collect(), self.dense.iter().map(|c| c.to_grid()).collect())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TorusDensityRow {
    pub v1: usize,
    pub v2: usize,
    pub configurations: u64,
    pub min_occupied: usize,
    pub max_occupied: usize,
    /// Configurations of density exactly 1/7.
    pub sparse: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DensityAudit {
    pub rows: Vec<TorusDensityRow>,
    pub random_trials: u64,
    pub random_violations: u64,
}

impl DensityAudit {
    pub fn violations(&self) -> u64 {
        self.rows.iter().map(|r| r.violations).sum::<u64>() + self.random_violations
    }

    pub fn configurations(&self) -> u64 {
        self.rows.iter().map(|r| r.configurations).sum::<u64>() + self.random_trials
    }
}

/// Density sandwich, the identity `N = 6|ω|`, the bounds `#empty <= N <= 3·#empty`,
/// and the characterisation of density `1/7` by single domination.
fn density_violation(c: &Configuration) -> bool {
    let t = torus_counts(c).expect("torus");
    let sites = c.region().len();
    let mut bad = 7 * t.occupied < sites || 3 * t.occupied > sites;
    bad |= t.pairs != 6 * t.occupied;
    bad |= t.pairs < t.empty || t.pairs > 3 * t.empty;
    if 7 * t.occupied == sites {
        bad |= t.min_empty_degree != 1 || t.max_empty_degree != 1;
    }
    bad
}

/// Exhaustive enumeration of every torus MIS with `lo <= v1, v2 <= hi`.
pub fn density_extremality_audit(lo: usize, hi: usize) -> Result<DensityAudit> {
    if lo < 2 {
        return Err(Error::InvalidArgument("tori with a side below 2 have self-adjacent sites".into()));
    }
    let dims: Vec<(usize, usize)> = (lo..=hi).flat_map(|a| (lo..=hi).map(move |b| (a, b))).collect();
    let rows = dims
        .into_par_iter()
        .map(|(v1, v2)| {
            let region = Region::torus(v1, v2);
            let p = MisProblem::for_region(&region)?;
            if region.len() > crate::configspace::BRUTE_FORCE_BUDGET {
                return Err(Error::BudgetExceeded(format!("torus {v1}x{v2} exceeds the exhaustive budget")));
            }
            let mut row = TorusDensityRow { v1, v2, min_occupied: usize::MAX, ..Default::default() };
            p.for_each(|m| {
                let c = Configuration::from_mask(region.clone(), m);
                let k = c.count();
                row.configurations += 1;
                row.min_occupied = row.min_occupied.min(k);
                row.max_occupied = row.max_occupied.max(k);
                row.sparse += (7 * k == region.len()) as u64;
                row.violations += density_violation(&c) as u64;
            });
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityAudit { rows, ..Default::default() })
}

/// Random greedy MISs on square tori with sides in `sides`, one ChaCha8 stream per trial.
pub fn random_density_audit(sides: std::ops::RangeInclusive<usize>, trials: u64, seed: u64) -> DensityAudit {
    let sides: Vec<usize> = sides.collect();
    let violations = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let a = *sides.choose(&mut rng).expect("nonempty side range");
            let b = *sides.choose(&mut rng).expect("nonempty side range");
            let c = random_maximal(&Region::torus(a, b), &mut rng).expect("greedy completion");
            density_violation(&c) as u64
        })
        .sum();
    DensityAudit { rows: Vec::new(), random_trials: trials, random_violations: violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "pattern")]
pub enum BlockClass {
    /// The block and its eight neighbours all carry sparse pattern `Q`.
    Correct(usize),
    /// Incorrect and meets a defective Delaunay triangle.
    TDefective,
    /// Incorrect, carries a sparse pattern and neighbours a t-defective block.
    NDefective,
    OtherIncorrect,
}

impl BlockClass {
    pub fn is_correct(self) -> bool {
        matches!(self, BlockClass::Correct(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSpin {
    /// Blocks along `i` and along `j`; block `(l, m)` has index `m·cols + l`.
    pub cols: usize,
    pub rows: usize,
    pub masks: Vec<u64>,
    pub labels: Vec<Option<usize>>,
    pub classes: Vec<BlockClass>,
    pub defective_triangles: usize,
}

impl BlockSpin {
    /// The eight surrounding blocks on the block torus (with repetitions on tiny tori).
    pub fn neighbors(&self, b: usize) -> Vec<usize> {
        let (l, m) = ((b % self.cols) as i64, (b / self.cols) as i64);
        let mut out = Vec::with_capacity(8);
        for dm in -1..=1i64 {
            for dl in -1..=1i64 {
                if (dl, dm) != (0, 0) {
                    let nl = (l + dl).rem_euclid(self.cols as i64) as usize;
                    let nm = (m + dm).rem_euclid(self.rows as i64) as usize;
                    out.push(nm * self.cols + nl);
                }
            }
        }
        out
    }

    pub fn incorrect(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&b| !self.classes[b].is_correct()).collect()
    }

    pub fn count(&self, class: BlockClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// King-move components of incorrect blocks.
    pub fn contours(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.classes.len()];
        let mut out = Vec::new();
        for b in self.incorrect() {
            if seen[b] {
                continue;
            }
            seen[b] = true;
            let mut comp = vec![b];
            let mut queue = VecDeque::from([b]);
            while let Some(x) = queue.pop_front() {
                for y in self.neighbors(x) {
                    if !seen[y] && !self.classes[y].is_correct() {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

fn block_dims(region: &Region) -> Result<(usize, usize)> {
    match *region {
        Region::Torus { v1, v2 } if v1 % BLOCK == 0 && v2 % BLOCK == 0 && v1 > 0 && v2 > 0 => Ok((v1 / BLOCK, v2 / BLOCK)),
        _ => Err(Error::InvalidArgument(format!("block spin needs a torus with sides divisible by {BLOCK}, got {region}"))),
    }
}

/// Whether a lattice triangle overlaps block `(l, m)` in a set of positive area; blocks
/// are the squares `[7l - 1/2, 7l + 13/2]` in lattice coordinates.
fn triangle_meets_block(t: &Triangle, l: i64, m: i64) -> bool {
    let b = 2 * BLOCK as i64;
    let (x0, x1, y0, y1) = (b * l - 1, b * l + b - 1, b * m - 1, b * m + b - 1);
    let p: Vec<(i64, i64)> = t.vertices.iter().map(|s| (2 * s.i, 2 * s.j)).collect();
    let sq = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
    let separated = |axis: (i64, i64)| {
        let proj = |q: &(i64, i64)| q.0 * axis.0 + q.1 * axis.1;
        let (tmin, tmax) = (p.iter().map(proj).min().unwrap(), p.iter().map(proj).max().unwrap());
        let (smin, smax) = (sq.iter().map(proj).min().unwrap(), sq.iter().map(proj).max().unwrap());
        tmax <= smin || smax <= tmin
    };
    if separated((1, 0)) || separated((0, 1)) {
        return false;
    }
    for k in 0..3 {
        let (a, c) = (p[k], p[(k + 1) % 3]);
        if separated((c.1 - a.1, a.0 - c.0)) {
            return false;
        }
    }
    true
}

/// Block-spin labels and classification of a torus MIS whose sides are multiples of 7.
pub fn block_spin(omega: &Configuration, catalog: &GroundStateCatalog) -> Result<BlockSpin> {
    let (cols, rows) = block_dims(omega.region())?;
    let n = cols * rows;
    let b = BLOCK as i64;
    let masks: Vec<u64> = (0..n)
        .map(|k| {
            let (l, m) = ((k % cols) as i64, (k / cols) as i64);
            let mut mask = 0u64;
            for y in 0..b {
                for x in 0..b {
                    if omega.is_occupied(Site::new(b * l + x, b * m + y)) {
                        mask |= 1 << (y * b + x);
                    }
                }
            }
            mask
        })
        .collect();
    let labels: Vec<Option<usize>> = masks.iter().map(|&m| catalog.pattern_index(m)).collect();
    let tri = triangulate(omega)?;
    let mut touched = vec![false; n];
    let mut defective_triangles = 0;
    for t in tri.defective() {
        defective_triangles += 1;
        let xs = t.vertices.iter().map(|s| 2 * s.i);
        let ys = t.vertices.iter().map(|s| 2 * s.j);
        let (xmin, xmax) = (xs.clone().min().unwrap(), xs.max().unwrap());
        let (ymin, ymax) = (ys.clone().min().unwrap(), ys.max().unwrap());
        let d = 2 * b;
        for m in (ymin + 1).div_euclid(d) - 1..=(ymax + 1).div_euclid(d) + 1 {
            for l in (xmin + 1).div_euclid(d) - 1..=(xmax + 1).div_euclid(d) + 1 {
                if triangle_meets_block(t, l, m) {
                    let k = m.rem_euclid(rows as i64) as usize * cols + l.rem_euclid(cols as i64) as usize;
                    touched[k] = true;
                }
            }
        }
    }
    let mut spin = BlockSpin { cols, rows, masks, labels, classes: vec![BlockClass::OtherIncorrect; n], defective_triangles };
    for (k, &hit) in touched.iter().enumerate() {
        if let Some(q) = spin.labels[k] {
            if spin.neighbors(k).iter().all(|&x| spin.labels[x] == Some(q)) {
                spin.classes[k] = BlockClass::Correct(q);
                continue;
            }
        }
        if hit {
            spin.classes[k] = BlockClass::TDefective;
        }
    }
    for k in 0..n {
        if spin.classes[k] == BlockClass::OtherIncorrect
            && spin.labels[k].is_some()
            && spin.neighbors(k).iter().any(|&x| spin.classes[x] == BlockClass::TDefective)
        {
            spin.classes[k] = BlockClass::NDefective;
        }
    }
    Ok(spin)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContourRecord {
    pub blocks: usize,
    pub t_defective: usize,
    pub n_defective: usize,
    pub omega_occupied: usize,
    pub eta_occupied: usize,
    pub excess: i64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeierlsReport {
    pub blocks: usize,
    pub defective_triangles: usize,
    pub contours: Vec<ContourRecord>,
}

impl PeierlsReport {
    pub fn violations(&self) -> usize {
        self.contours.iter().filter(|c| !c.passed).count()
    }
}

/// `excess >= max(1, blocks/378)` in integers.
pub fn peierls_bound_holds(excess: i64, blocks: usize) -> bool {
    excess >= 1 && PEIERLS_DENOMINATOR * excess >= blocks as i64
}

/// Contours of incorrect blocks of `omega` against the sparse ground state `eta`,
/// each checked against the linear Peierls bound.
pub fn peierls_audit(omega: &Configuration, eta: &Configuration, catalog: &GroundStateCatalog) -> Result<PeierlsReport> {
    if omega.region() != eta.region() {
        return Err(Error::InvalidArgument("configurations live on different tori".into()));
    }
    let (cols, _) = block_dims(omega.region())?;
    let spin = block_spin(omega, catalog)?;
    let b = BLOCK as i64;
    let eta_mask = {
        let mut mask = 0u64;
        for y in 0..b {
            for x in 0..b {
                if eta.is_occupied(Site::new(x, y)) {
                    mask |= 1 << (y * b + x);
                }
            }
        }
        mask
    };
    let Some(q) = catalog.pattern_index(eta_mask) else {
        return Err(Error::InvalidArgument("reference is not a sparse ground state".into()));
    };
    if *eta != catalog.periodic_sparse(q, cols, spin.rows) {
        return Err(Error::InvalidArgument("reference is not block-aligned periodic".into()));
    }
    if !spin.masks.contains(&eta_mask) {
        return Err(Error::Precondition("configuration does not agree with the ground state on any block".into()));
    }
    let occupied_in = |c: &Configuration, k: usize| {
        let (l, m) = ((k % cols) as i64, (k / cols) as i64);
        (0..b).flat_map(|y| (0..b).map(move |x| (x, y))).filter(|&(x, y)| c.is_occupied(Site::new(b * l + x, b * m + y))).count()
    };
    let contours = spin
        .contours()
        .into_iter()
        .map(|blocks| {
            let omega_occupied: usize = blocks.iter().map(|&k| occupied_in(omega, k)).sum();
            let eta_occupied: usize = blocks.iter().map(|&k| occupied_in(eta, k)).sum();
            let excess = omega_occupied as i64 - eta_occupied as i64;
            ContourRecord {
                blocks: blocks.len(),
                t_defective: blocks.iter().filter(|&&k| spin.classes[k] == BlockClass::TDefective).count(),
                n_defective: blocks.iter().filter(|&&k| spin.classes[k] == BlockClass::NDefective).count(),
                omega_occupied,
                eta_occupied,
                excess,
                passed: peierls_bound_holds(excess, blocks.len()),
            }
        })
        .collect();
    Ok(PeierlsReport { blocks: spin.classes.len(), defective_triangles: spin.defective_triangles, contours })
}

/// Flips a site: an occupied site is emptied; an empty one is occupied after emptying its
/// occupied neighbours. The result is independent but usually not maximal.
pub fn toggle_site(c: &Configuration, s: Site) -> Result<Configuration> {
    let r = c.region();
    let s = r.canonical(s).ok_or_else(|| Error::InvalidArgument(format!("site {s} is outside {r}")))?;
    if c.is_occupied(s) {
        return c.with_site(s, false);
    }
    let mut out = c.clone();
    for t in r.neighbors(s) {
        out = out.with_site(t, false)?;
    }
    out.with_site(s, true)
}

/// Every maximal configuration obtained from an independent torus configuration by
/// occupying some of the sites within squared distance 16 of `center`. Errors if an
/// undominated site lies farther out.
pub fn all_completions_near(c: &Configuration, center: Site) -> Result<Vec<Configuration>> {
    let r = c.region();
    let undominated = c.undominated();
    let mut free = Vec::new();
    for dj in -5..=5i64 {
        for di in -5..=5i64 {
            if norm2(di, dj) <= 16 {
                let p = center.offset((di, dj));
                if undominated.contains(&r.canonical(p).expect("torus")) {
                    free.push(p);
                }
            }
        }
    }
    if free.len() != undominated.len() {
        return Err(Error::Precondition("undominated sites are not local to the perturbation".into()));
    }
    let local = Region::from_sites(free);
    let p = MisProblem::for_region(&local)?;
    let sites = local.sites();
    let mut out = Vec::new();
    for m in p.collect() {
        let mut x = c.clone();
        for (k, &s) in sites.iter().enumerate() {
            if m >> k & 1 == 1 {
                x = x.with_site(r.canonical(s).expect("torus"), true)?;
            }
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PeierlsSweep {
    pub configurations: usize,
    pub contours: usize,
    pub violations: usize,
    pub min_excess: Option<i64>,
    pub max_blocks: usize,
    pub max_defective_triangles: usize,
}

impl PeierlsSweep {
    fn absorb(&mut self, r: &PeierlsReport) {
        self.configurations += 1;
        self.contours += r.contours.len();
        self.violations += r.violations();
        self.max_defective_triangles = self.max_defective_triangles.max(r.defective_triangles);
        for c in &r.contours {
            self.min_excess = Some(self.min_excess.map_or(c.excess, |e| e.min(c.excess)));
            self.max_blocks = self.max_blocks.max(c.blocks);
        }
    }

    fn merge(mut self, other: PeierlsSweep) -> PeierlsSweep {
        self.configurations += other.configurations;
        self.contours += other.contours;
        self.violations += other.violations;
        self.max_defective_triangles = self.max_defective_triangles.max(other.max_defective_triangles);
        self.max_blocks = self.max_blocks.max(other.max_blocks);
        self.min_excess = match (self.min_excess, other.min_excess) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// All single-site flips of every sparse ground state on `T_{7k,7k}`, each completed to a
/// maximal configuration in every possible way, audited against the unperturbed state.
pub fn single_site_peierls_sweep(catalog: &GroundStateCatalog, k: usize) -> Result<PeierlsSweep> {
    let jobs: Vec<(usize, Site)> = (0..catalog.sparse.len())
        .flat_map(|q| Region::torus(BLOCK * k, BLOCK * k).sites().into_iter().map(move |s| (q, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(q, s)| {
            let eta = catalog.periodic_sparse(q, k, k);
            let mut sweep = PeierlsSweep::default();
            for omega in all_completions_near(&toggle_site(&eta, s)?, s)? {
                sweep.absorb(&peierls_audit(&omega, &eta, catalog)?);
            }
            Ok(sweep)
        })
        .try_reduce(PeierlsSweep::default, |a, b| Ok(a.merge(b)))
}

/// Random flips of `flips` sites of a random sparse ground state, completed greedily in a
/// random order; one ChaCha8 stream per trial.
pub fn random_peierls_sweep(catalog: &GroundStateCatalog, k: usize, flips: usize, trials: u64, seed: u64) -> Result<PeierlsSweep> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let q = rng.gen_range(0..catalog.sparse.len());
            let eta = catalog.periodic_sparse(q, k, k);
            let side = (BLOCK * k) as i64;
            let mut omega = eta.clone();
            for _ in 0..flips {
                let s = Site::new(rng.gen_range(0..side), rng.gen_range(0..side));
                omega = toggle_site(&omega, s)?;
            }
            let mut order = omega.region().sites();
            order.shuffle(&mut rng);
            let omega = omega.complete_in_order(&order)?;
            let mut sweep = PeierlsSweep::default();
            sweep.absorb(&peierls_audit(&omega, &eta, catalog)?);
            Ok(sweep)
        })
        .try_reduce(PeierlsSweep::default, |a, b| Ok(a.merge(b)))
}

/// Exact density of every state in the catalog, sparse first.
pub fn catalog_densities(catalog: &GroundStateCatalog) -> Vec<Rational64> {
    catalog.sparse.iter().chain(&catalog.dense).map(|c| density(c).expect("torus")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> GroundStateCatalog {
        GroundStateCatalog::build().unwrap()
    }

    #[test]
    fn sparse_states() {
        let cat = catalog();
        assert_eq!(cat.sparse.len(), 14);
        for c in &cat.sparse {
            let t = torus_counts(c).unwrap();
            assert_eq!((t.min_empty_degree, t.max_empty_degree), (1, 1));
            assert!(c.is_maximal());
        }
        let orbits = translation_orbits(&cat.sparse);
        assert_eq!(orbits.iter().map(Vec::len).collect::<Vec<_>>(), vec![7, 7]);
        let m = mirror(&cat.sparse[orbits[0][0]]).unwrap();
        assert!(orbits[1].iter().any(|&k| cat.sparse[k] == m));
        let distinct: BTreeSet<u64> = cat.patterns.iter().copied().collect();
        assert_eq!(distinct.len(), 14);
    }

    #[test]
    fn dense_states_are_color_classes() {
        let cat = catalog();
        assert_eq!(cat.dense.len(), 3);
        let r = Region::torus(3, 3);
        for c in crate::lattice::Color::ALL {
            let class = Configuration::from_occupied(r.clone(), r.sites().into_iter().filter(|s| s.color() == c)).unwrap();
            assert!(cat.dense.contains(&class));
        }
        for c in &cat.dense {
            let t = torus_counts(c).unwrap();
            assert_eq!((t.min_empty_degree, t.max_empty_degree), (3, 3));
        }
        assert!(catalog_densities(&cat)[..14].iter().all(|d| *d == Rational64::new(1, 7)));
        assert!(catalog_densities(&cat)[14..].iter().all(|d| *d == Rational64::new(1, 3)));
    }

    #[test]
    fn small_tori_respect_the_density_sandwich() {
        let a = density_extremality_audit(3, 5).unwrap();
        assert_eq!(a.violations(), 0);
        for r in &a.rows {
            assert!(r.sparse == 0 || (r.v1 * r.v2) % 7 == 0);
        }
        assert_eq!(random_density_audit(7..=12, 200, 1).violations(), 0);
    }

    #[test]
    fn ground_state_block_spin_is_constant() {
        let cat = catalog();
        for q in [0, 9] {
            let eta = cat.periodic_sparse(q, 3, 3);
            let spin = block_spin(&eta, &cat).unwrap();
            assert!(spin.classes.iter().all(|&c| c == BlockClass::Correct(q)));
            assert_eq!(spin.defective_triangles, 0);
            let r = peierls_audit(&eta, &eta, &cat).unwrap();
            assert!(r.contours.is_empty());
        }
    }

    #[test]
    fn single_flip_creates_defects() {
        let cat = catalog();
        let eta = cat.periodic_sparse(0, 3, 3);
        let s = eta.occupied_sites()[10];
        let flipped = toggle_site(&eta, s.offset((1, 0))).unwrap();
        let all = all_completions_near(&flipped, s).unwrap();
        assert!(!all.is_empty());
        for omega in all {
            assert!(omega.is_maximal());
            let spin = block_spin(&omega, &cat).unwrap();
            assert!(!spin.incorrect().is_empty());
            assert!(spin.count(BlockClass::TDefective) >= 1);
            for k in 0..spin.classes.len() {
                if spin.classes[k] == BlockClass::TDefective {
                    for x in spin.neighbors(k) {
                        if !spin.classes[x].is_correct() && spin.labels[x].is_some() && spin.classes[x] != BlockClass::TDefective {
                            assert_eq!(spin.classes[x], BlockClass::NDefective);
                        }
                    }
                }
            }
            let r = peierls_audit(&omega, &eta, &cat).unwrap();
            assert_eq!(r.violations(), 0, "{r:?}");
        }
    }

    #[test]
    fn misaligned_regions_are_rejected() {
        let cat = catalog();
        let w = random_maximal(&Region::torus(10, 14), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(block_spin(&w, &cat), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn random_perturbations_on_a_larger_torus() {
        let cat = catalog();
        let s = random_peierls_sweep(&cat, 5, 3, 20, 11).unwrap();
        assert_eq!(s.violations, 0);
        assert!(s.contours > 0);
    }
}
