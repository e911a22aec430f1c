//! Configurations on finite regions and tori: independence, maximality,
//! completion, merging, exhaustive enumeration and the text grid format.

use crate::error::{Error, Result};
use crate::lattice::{Region, Site, NEIGHBOR_OFFSETS};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Largest region accepted by [`brute_enumerate_maximal`].
pub const BRUTE_FORCE_BUDGET: usize = 49;

/// Occupancy assignment over the sites of a region, indexed in [`Region::sites`] order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    region: Region,
    occupied: Vec<bool>,
}

impl Configuration {
    pub fn empty(region: Region) -> Self {
        let n = region.len();
        Configuration { region, occupied: vec![false; n] }
    }

    pub fn from_occupied<I: IntoIterator<Item = Site>>(region: Region, sites: I) -> Result<Self> {
        let mut c = Configuration::empty(region);
        for s in sites {
            let k = c
                .region
                .index_of(s)
                .ok_or_else(|| Error::InvalidArgument(format!("site {s} is outside {}", c.region)))?;
            c.occupied[k] = true;
        }
        Ok(c)
    }

    pub fn from_bits(region: Region, occupied: Vec<bool>) -> Result<Self> {
        if occupied.len() != region.len() {
            return Err(Error::InvalidArgument(format!(
                "{} occupancy bits for a region of {} sites",
                occupied.len(),
                region.len()
            )));
        }
        Ok(Configuration { region, occupied })
    }

    pub(crate) fn from_mask(region: Region, mask: u64) -> Self {
        let n = region.len();
        let occupied = (0..n).map(|k| mask >> k & 1 == 1).collect();
        Configuration { region, occupied }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn bits(&self) -> &[bool] {
        &self.occupied
    }

    pub fn is_occupied(&self, s: Site) -> bool {
        self.region.index_of(s).is_some_and(|k| self.occupied[k])
    }

    /// Number of occupied sites.
    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    pub fn occupied_sites(&self) -> Vec<Site> {
        self.occupied
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| self.region.site_at(k))
            .collect()
    }

    pub fn with_site(&self, s: Site, value: bool) -> Result<Self> {
        let k = self
            .region
            .index_of(s)
            .ok_or_else(|| Error::InvalidArgument(format!("site {s} is outside {}", self.region)))?;
        let mut c = self.clone();
        c.occupied[k] = value;
        Ok(c)
    }

    /// Sites of the region adjacent to `s`, counted once per neighbour offset
    /// (so a wrapped torus may list a site twice, or `s` itself).
    fn offset_neighbors(&self, s: Site) -> impl Iterator<Item = Site> + '_ {
        NEIGHBOR_OFFSETS.iter().filter_map(move |&d| self.region.canonical(s.offset(d)))
    }

    fn occupied_neighbor_count(&self, s: Site) -> usize {
        self.offset_neighbors(s).filter(|&t| self.is_occupied(t)).count()
    }

    /// No two occupied sites are adjacent (wrapped adjacency on a torus).
    pub fn is_independent(&self) -> bool {
        self.occupied_sites().into_iter().all(|s| self.occupied_neighbor_count(s) == 0)
    }

    /// Independent, and every empty site has an occupied neighbour inside the region.
    pub fn is_maximal(&self) -> bool {
        self.is_independent() && self.undominated().is_empty()
    }

    /// Empty sites with no occupied neighbour.
    pub fn undominated(&self) -> Vec<Site> {
        self.region
            .sites()
            .into_iter()
            .enumerate()
            .filter(|&(k, s)| !self.occupied[k] && self.occupied_neighbor_count(s) == 0)
            .map(|(_, s)| s)
            .collect()
    }

    /// Restriction to a sub-region; every site of `sub` must belong to this region.
    pub fn restrict(&self, sub: &Region) -> Result<Configuration> {
        let bits = sub
            .sites()
            .into_iter()
            .map(|s| {
                self.region
                    .index_of(s)
                    .map(|k| self.occupied[k])
                    .ok_or_else(|| Error::InvalidArgument(format!("site {s} not in {}", self.region)))
            })
            .collect::<Result<Vec<_>>>()?;
        Configuration::from_bits(sub.clone(), bits)
    }

    /// Greedy completion: scan sites row-major and occupy each one that has no occupied neighbour.
    pub fn greedy_complete(&self) -> Result<Configuration> {
        let order = self.region.sites();
        self.complete_in_order(&order)
    }

    pub(crate) fn complete_in_order(&self, order: &[Site]) -> Result<Configuration> {
        if !self.is_independent() {
            return Err(Error::Precondition("completion of a non-independent configuration".into()));
        }
        let mut c = self.clone();
        for &s in order {
            let k = c.region.index_of(s).expect("site in region");
            if !c.occupied[k] && c.occupied_neighbor_count(s) == 0 {
                if c.offset_neighbors(s).any(|t| t == s) {
                    return Err(Error::Construction(format!("site {s} is its own neighbour and undominated")));
                }
                c.occupied[k] = true;
            }
        }
        Ok(c)
    }

    pub fn to_grid(&self) -> String {
        to_grid(self)
    }
}

/// Extension by one row and column: a maximal configuration on `Λ_{n,m}` is completed to a
/// maximal configuration on `Λ_{n+1,m+1}` with the same restriction.
pub fn extend_to_mis(omega: &Configuration) -> Result<Configuration> {
    let Region::Rhombus { n, m } = *omega.region() else {
        return Err(Error::InvalidArgument("extension is defined on rhombi".into()));
    };
    if !omega.is_maximal() {
        return Err(Error::NotMaximal(format!("input on {}", omega.region())));
    }
    let big = Configuration::from_occupied(Region::rhombus(n + 1, m + 1), omega.occupied_sites())?;
    big.greedy_complete()
}

fn l1_distance(a: &[Site], b: &[Site]) -> i64 {
    let mut best = i64::MAX;
    for s in a {
        for t in b {
            best = best.min((s.i - t.i).abs() + (s.j - t.j).abs());
        }
    }
    best
}

/// Minimum coordinate ℓ1 distance at which [`merge_configurations`] accepts its inputs.
pub const MERGE_DISTANCE: i64 = 4;

/// Merges two maximal configurations on finite regions at ℓ1 distance at least 4
/// into one maximal configuration on their bounding parallelogram, agreeing with both.
pub fn merge_configurations(sigma: &Configuration, eta: &Configuration) -> Result<Configuration> {
    if sigma.region().is_torus() || eta.region().is_torus() {
        return Err(Error::InvalidArgument("merging is defined for finite regions".into()));
    }
    for c in [sigma, eta] {
        if !c.is_maximal() {
            return Err(Error::NotMaximal(format!("merge input on {}", c.region())));
        }
    }
    let (a, b) = (sigma.region().sites(), eta.region().sites());
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty region".into()));
    }
    let d = l1_distance(&a, &b);
    if d < MERGE_DISTANCE {
        return Err(Error::Precondition(format!("regions at distance {d} < {MERGE_DISTANCE}")));
    }
    let all = a.iter().chain(&b);
    let (i0, i1) = (all.clone().map(|s| s.i).min().unwrap(), all.clone().map(|s| s.i).max().unwrap());
    let (j0, j1) = (all.clone().map(|s| s.j).min().unwrap(), all.map(|s| s.j).max().unwrap());
    let hull = Region::from_sites((j0..=j1).flat_map(|j| (i0..=i1).map(move |i| Site::new(i, j))));
    let seeded = Configuration::from_occupied(hull, sigma.occupied_sites().into_iter().chain(eta.occupied_sites()))?;
    let merged = seeded.greedy_complete()?;
    if merged.restrict(sigma.region())? != *sigma || merged.restrict(eta.region())? != *eta || !merged.is_maximal() {
        return Err(Error::Construction("merge altered an input block".into()));
    }
    Ok(merged)
}

/// Side-by-side merge: `sigma` on `Λ_{n,m}` and `eta` on `(0, m+1) + Λ_{n,m}` (given
/// as a configuration on `Λ_{n,m}`), completed on `Λ_{n,2m+1}`. Only the seam row
/// `j = m + 1` receives new occupied sites.
pub fn merge_side_by_side(sigma: &Configuration, eta: &Configuration) -> Result<Configuration> {
    let Region::Rhombus { n, m } = *sigma.region() else {
        return Err(Error::InvalidArgument("side-by-side merge needs rhombi".into()));
    };
    if *eta.region() != Region::rhombus(n, m) {
        return Err(Error::InvalidArgument("both blocks must have the same shape".into()));
    }
    for c in [sigma, eta] {
        if !c.is_maximal() {
            return Err(Error::NotMaximal(format!("merge input on {}", c.region())));
        }
    }
    let shift = m as i64 + 1;
    let sites = sigma
        .occupied_sites()
        .into_iter()
        .chain(eta.occupied_sites().into_iter().map(|s| s.offset((0, shift))));
    let seeded = Configuration::from_occupied(Region::rhombus(n, 2 * m + 1), sites)?;
    let merged = seeded.greedy_complete()?;
    for s in merged.occupied_sites() {
        let original = if s.j <= m as i64 {
            sigma.is_occupied(s)
        } else if s.j > shift {
            eta.is_occupied(s.offset((0, -shift)))
        } else {
            continue;
        };
        if !original {
            return Err(Error::Construction(format!("seam fill touched payload site {s}")));
        }
    }
    Ok(merged)
}

/// Exact density `|ω| / (v1·v2)` of a torus configuration.
pub fn density(omega: &Configuration) -> Result<Rational64> {
    match *omega.region() {
        Region::Torus { v1, v2 } => Ok(Rational64::new(omega.count() as i64, (v1 * v2) as i64)),
        _ => Err(Error::InvalidArgument("density is defined on tori".into())),
    }
}

/// Double-counting data for a torus configuration: `pairs` counts ordered
/// (occupied, empty) neighbour pairs with multiplicity over the six offsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusCounts {
    pub occupied: usize,
    pub empty: usize,
    pub pairs: usize,
    /// Smallest and largest number of occupied neighbours of an empty site.
    pub min_empty_degree: usize,
    pub max_empty_degree: usize,
}

pub fn torus_counts(omega: &Configuration) -> Result<TorusCounts> {
    if !omega.region().is_torus() {
        return Err(Error::InvalidArgument("double counting is defined on tori".into()));
    }
    let mut pairs = 0;
    let (mut lo, mut hi) = (usize::MAX, 0);
    for (k, s) in omega.region().sites().into_iter().enumerate() {
        if omega.occupied[k] {
            pairs += omega.offset_neighbors(s).filter(|&t| !omega.is_occupied(t)).count();
        } else {
            let d = omega.occupied_neighbor_count(s);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    let occupied = omega.count();
    Ok(TorusCounts { occupied, empty: omega.region().len() - occupied, pairs, min_empty_degree: lo, max_empty_degree: hi })
}

/// Random maximal configuration: greedy completion of the empty configuration in a random order.
pub fn random_maximal<R: Rng + ?Sized>(region: &Region, rng: &mut R) -> Result<Configuration> {
    let mut order = region.sites();
    order.shuffle(rng);
    Configuration::empty(region.clone()).complete_in_order(&order)
}

/// Bitmask search for maximal independent sets of a graph on at most 64 vertices,
/// with optional forcing, external domination and cover constraints.
#[derive(Clone, Debug, Default)]
pub(crate) struct MisProblem {
    pub adj: Vec<u64>,
    /// Vertices that may not be occupied.
    pub blocked: u64,
    /// Vertices that must be occupied.
    pub forced: u64,
    /// Vertices that must end up occupied or dominated.
    pub need_dom: u64,
    /// Vertices dominated by something outside the graph.
    pub pre_dom: u64,
    /// Each mask must meet the occupied set.
    pub covers: Vec<u64>,
    pub size: Option<u32>,
}

impl MisProblem {
    /// Graph of a region with wrapped adjacency on a torus; self-adjacent sites are blocked.
    pub fn for_region(region: &Region) -> Result<MisProblem> {
        let n = region.len();
        if n > 64 {
            return Err(Error::BudgetExceeded(format!("{n} sites exceed the 64-site bitmask search")));
        }
        let mut p = MisProblem { adj: vec![0; n], need_dom: full_mask(n), ..Default::default() };
        for (k, s) in region.sites().into_iter().enumerate() {
            for d in NEIGHBOR_OFFSETS {
                if let Some(t) = region.canonical(s.offset(d)) {
                    let l = region.index_of(t).expect("canonical site is indexed");
                    if l == k {
                        p.blocked |= 1 << k;
                    } else {
                        p.adj[k] |= 1 << l;
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn for_each<F: FnMut(u64)>(&self, mut emit: F) {
        self.search(&mut |m| {
            emit(m);
            true
        });
    }

    /// Runs the search until `emit` returns false.
    fn search<F: FnMut(u64) -> bool>(&self, emit: &mut F) {
        let n = self.adj.len();
        if n == 0 {
            if self.covers.is_empty() && self.size.is_none_or(|s| s == 0) {
                emit(0);
            }
            return;
        }
        let mut close_at: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            if self.need_dom >> v & 1 == 1 {
                let last = (0..n).filter(|&u| u == v || self.adj[v] >> u & 1 == 1).max().unwrap();
                close_at[last].push(v);
            }
        }
        let mut covers_at: Vec<Vec<u64>> = vec![Vec::new(); n];
        for &c in &self.covers {
            if c == 0 {
                return;
            }
            covers_at[63 - c.leading_zeros() as usize].push(c);
        }
        let ctx = Search { p: self, n, close_at, covers_at };
        ctx.dfs(0, 0, emit);
    }

    /// First solution in search order, stopping the search there.
    pub fn first(&self) -> Option<u64> {
        let mut found = None;
        self.search(&mut |m| {
            found = Some(m);
            false
        });
        found
    }

    pub fn collect(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each(|m| out.push(m));
        out
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

struct Search<'a> {
    p: &'a MisProblem,
    n: usize,
    close_at: Vec<Vec<usize>>,
    covers_at: Vec<Vec<u64>>,
}

impl Search<'_> {
    /// Returns false once the consumer asks to stop.
    fn dfs<F: FnMut(u64) -> bool>(&self, k: usize, occ: u64, emit: &mut F) -> bool {
        if k == self.n {
            if self.p.size.is_none_or(|s| occ.count_ones() == s) {
                return emit(occ);
            }
            return true;
        }
        let bit = 1u64 << k;
        let can_occupy = self.p.blocked & bit == 0 && self.p.adj[k] & occ == 0;
        let can_skip = self.p.forced & bit == 0;
        if can_skip && !self.step(k, occ, emit) {
            return false;
        }
        if can_occupy && !self.step(k, occ | bit, emit) {
            return false;
        }
        true
    }

    fn step<F: FnMut(u64) -> bool>(&self, k: usize, occ: u64, emit: &mut F) -> bool {
        if let Some(s) = self.p.size {
            let placed = occ.count_ones();
            if placed > s || placed + ((self.n - k - 1) as u32) < s {
                return true;
            }
        }
        for &v in &self.close_at[k] {
            let bit = 1u64 << v;
            if occ & bit == 0 && self.p.adj[v] & occ == 0 && self.p.pre_dom & bit == 0 {
                return true;
            }
        }
        if self.covers_at[k].iter().any(|&c| c & occ == 0) {
            return true;
        }
        self.dfs(k + 1, occ, emit)
    }
}

/// All maximal configurations on a region (wrapped adjacency on a torus), optionally
/// restricted to a given number of occupied sites. Deterministic order.
pub fn brute_enumerate_maximal(region: &Region, size: Option<usize>) -> Result<Vec<Configuration>> {
    if region.len() > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{} sites exceed the exhaustive budget of {BRUTE_FORCE_BUDGET}",
            region.len()
        )));
    }
    let mut p = MisProblem::for_region(region)?;
    p.size = size.map(|s| s as u32);
    Ok(p.collect().into_iter().map(|m| Configuration::from_mask(region.clone(), m)).collect())
}

/// Writes the text grid: a `tri <kind> <dims>` header, then one line per `j` (increasing)
/// with one `0`/`1` per `i` (increasing). Sites absent from a `set` region print as `.`.
pub fn to_grid(c: &Configuration) -> String {
    let mut out = String::new();
    let (i0, i1, j0, j1) = grid_bounds(c.region());
    match c.region() {
        Region::Rhombus { n, m } => writeln!(out, "tri rhombus {n} {m}"),
        Region::CenteredBox { half } => writeln!(out, "tri box {half}"),
        Region::Torus { v1, v2 } => writeln!(out, "tri torus {v1} {v2}"),
        Region::Sites { .. } => writeln!(out, "tri set {i0} {j0} {} {}", i1 - i0 + 1, j1 - j0 + 1),
    }
    .unwrap();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let s = Site::new(i, j);
            let ch = match c.region.index_of(s) {
                Some(k) if c.region.contains(s) => {
                    if c.occupied[k] {
                        '1'
                    } else {
                        '0'
                    }
                }
                _ => '.',
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

fn grid_bounds(r: &Region) -> (i64, i64, i64, i64) {
    match r {
        Region::Sites { sites } if sites.is_empty() => (0, -1, 0, -1),
        Region::Sites { sites } => (
            sites.iter().map(|s| s.i).min().unwrap(),
            sites.iter().map(|s| s.i).max().unwrap(),
            sites.iter().map(|s| s.j).min().unwrap(),
            sites.iter().map(|s| s.j).max().unwrap(),
        ),
        _ => r.parallelogram().unwrap(),
    }
}

fn parse_dims(line_no: usize, fields: &[&str], want: usize) -> Result<Vec<i64>> {
    if fields.len() != want {
        return Err(Error::Parse { line: line_no, msg: format!("expected {want} dimensions, got {}", fields.len()) });
    }
    fields
        .iter()
        .map(|f| f.parse::<i64>().map_err(|e| Error::Parse { line: line_no, msg: format!("bad integer `{f}`: {e}") }))
        .collect()
}

/// Parses the text grid format written by [`to_grid`]. Returns the configuration and
/// the number of lines consumed.
pub fn parse_grid_lines(lines: &[&str], first_line_no: usize) -> Result<(Configuration, usize)> {
    let header = lines.first().ok_or(Error::Parse { line: first_line_no, msg: "missing header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&"tri") || fields.len() < 2 {
        return Err(Error::Parse { line: first_line_no, msg: format!("expected `tri <kind> <dims>`, got `{header}`") });
    }
    let nonneg = |x: i64| -> Result<usize> {
        usize::try_from(x).map_err(|_| Error::Parse { line: first_line_no, msg: format!("negative dimension {x}") })
    };
    let (region, set_frame) = match fields[1] {
        "rhombus" => {
            let d = parse_dims(first_line_no, &fields[2..], 2)?;
            (Region::rhombus(nonneg(d[0])?, nonneg(d[1])?), None)
        }
        "box" => {
            let d = parse_dims(first_line_no, &fields[2..], 1)?;
            (Region::centered(nonneg(d[0])?), None)
        }
        "torus" => {
            let d = parse_dims(first_line_no, &fields[2..], 2)?;
            (Region::torus(nonneg(d[0])?, nonneg(d[1])?), None)
        }
        "set" => {
            let d = parse_dims(first_line_no, &fields[2..], 4)?;
            (Region::from_sites([]), Some((d[0], d[1], nonneg(d[2])?, nonneg(d[3])?)))
        }
        other => return Err(Error::Parse { line: first_line_no, msg: format!("unknown region kind `{other}`") }),
    };
    let (i0, j0, w, h) = match set_frame {
        Some(f) => f,
        None => {
            let (i0, i1, j0, j1) = region.parallelogram().unwrap();
            (i0, j0, (i1 - i0 + 1).max(0) as usize, (j1 - j0 + 1).max(0) as usize)
        }
    };
    if lines.len() < 1 + h {
        return Err(Error::Parse { line: first_line_no + lines.len(), msg: format!("expected {h} grid rows") });
    }
    let mut members = Vec::new();
    let mut occupied = Vec::new();
    for (r, row) in lines[1..=h].iter().enumerate() {
        let line_no = first_line_no + 1 + r;
        let row = row.trim_end();
        if row.chars().count() != w {
            return Err(Error::Parse { line: line_no, msg: format!("expected {w} cells, got {}", row.chars().count()) });
        }
        for (c, ch) in row.chars().enumerate() {
            let s = Site::new(i0 + c as i64, j0 + r as i64);
            match ch {
                '0' => members.push(s),
                '1' => {
                    members.push(s);
                    occupied.push(s);
                }
                '.' if set_frame.is_some() => {}
                _ => return Err(Error::Parse { line: line_no, msg: format!("unexpected cell `{ch}`") }),
            }
        }
    }
    let region = if set_frame.is_some() { Region::from_sites(members) } else { region };
    Ok((Configuration::from_occupied(region, occupied)?, 1 + h))
}

pub fn from_grid(text: &str) -> Result<Configuration> {
    let lines: Vec<&str> = text.lines().collect();
    let (c, used) = parse_grid_lines(&lines, 1)?;
    if lines[used..].iter().any(|l| !l.trim().is_empty()) {
        return Err(Error::Parse { line: used + 1, msg: "trailing content after grid".into() });
    }
    Ok(c)
}
