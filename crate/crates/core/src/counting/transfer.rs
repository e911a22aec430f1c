//! Column-by-column transfer sweep over a parallelogram.
//!
//! A column holds `rows` sites `(x, 0..rows)`. A state is the pair
//! `(occ, pend)`: the occupancy of the current column and the sites of the
//! current column that still wait to be dominated by the next column. Both
//! masks are packed into one `u64` key (`occ` in the low 32 bits).
//!
//! Triangular adjacency joins `(x, y)` to `(x, y±1)`, `(x+1, y)` and
//! `(x+1, y-1)`; square adjacency drops the last one.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

/// Widest column the sweep accepts.
pub const MAX_ROWS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adjacency {
    Triangular,
    Square,
}

/// Per-column constraints, as bit masks over the rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ColumnRule {
    pub forced_on: u32,
    pub forced_off: u32,
    /// Sites that must end up occupied or dominated.
    pub need_dom: u32,
    /// Sites dominated by something outside the sweep.
    pub pre_dom: u32,
    /// Sites whose occupation carries one factor of the activity.
    pub weighted: u32,
}

impl ColumnRule {
    pub fn free(rows: usize) -> Self {
        let full = row_mask(rows);
        ColumnRule { need_dom: full, weighted: full, ..Default::default() }
    }

    pub fn independent_only(rows: usize) -> Self {
        ColumnRule { weighted: row_mask(rows), ..Default::default() }
    }
}

pub fn row_mask(rows: usize) -> u32 {
    if rows >= 32 {
        u32::MAX
    } else {
        (1u32 << rows) - 1
    }
}

/// Semiring-like accumulator for the sweep.
pub trait Weight: Clone + Send + Sync {
    fn nothing() -> Self;
    fn unit() -> Self;
    fn is_nothing(&self) -> bool;
    /// `self += other · λ^k`.
    fn add_scaled(&mut self, other: &Self, k: u32);
}

impl Weight for BigUint {
    fn nothing() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nothing(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_scaled(&mut self, other: &Self, _k: u32) {
        *self += other;
    }
}

/// Generating polynomial in the activity: `coeffs[k]` counts configurations with
/// `k` weighted occupied sites.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<BigUint>,
}

impl Poly {
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !Zero::is_zero(c))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !Zero::is_zero(c))
    }

    pub fn coeff(&self, k: usize) -> BigUint {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }
}

impl Weight for Poly {
    fn nothing() -> Self {
        Poly::default()
    }
    fn unit() -> Self {
        Poly { coeffs: vec![BigUint::one()] }
    }
    fn is_nothing(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
    fn add_scaled(&mut self, other: &Self, k: u32) {
        let k = k as usize;
        if self.coeffs.len() < other.coeffs.len() + k {
            self.coeffs.resize(other.coeffs.len() + k, BigUint::zero());
        }
        for (d, c) in other.coeffs.iter().enumerate() {
            if !Zero::is_zero(c) {
                self.coeffs[d + k] += c;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransferState {
    pub occ: u32,
    pub pend: u32,
}

impl TransferState {
    pub fn key(self) -> u64 {
        self.occ as u64 | (self.pend as u64) << 32
    }

    pub fn from_key(k: u64) -> Self {
        TransferState { occ: k as u32, pend: (k >> 32) as u32 }
    }
}

#[derive(Clone, Debug)]
pub struct Sweep {
    rows: usize,
    adjacency: Adjacency,
    columns: Vec<ColumnRule>,
    /// Independent in-column masks, ascending.
    independent: Vec<u32>,
}

impl Sweep {
    pub fn new(rows: usize, adjacency: Adjacency, columns: Vec<ColumnRule>) -> Self {
        assert!(rows <= MAX_ROWS, "column height {rows} exceeds {MAX_ROWS}");
        let independent = (0..=row_mask(rows)).filter(|&m| m & (m << 1) == 0).collect();
        Sweep { rows, adjacency, columns, independent }
    }

    /// Free-boundary sweep over `rows × len` (every site must be dominated).
    pub fn maximal(rows: usize, len: usize, adjacency: Adjacency) -> Self {
        Sweep::new(rows, adjacency, vec![ColumnRule::free(rows); len])
    }

    pub fn independent_sets(rows: usize, len: usize, adjacency: Adjacency) -> Self {
        Sweep::new(rows, adjacency, vec![ColumnRule::independent_only(rows); len])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    fn full(&self) -> u32 {
        row_mask(self.rows)
    }

    fn in_column(&self, occ: u32) -> u32 {
        (occ | occ << 1 | occ >> 1) & self.full()
    }

    /// Sites of the next column adjacent to occupied sites of this one.
    fn forward_block(&self, occ: u32) -> u32 {
        match self.adjacency {
            Adjacency::Triangular => (occ | occ >> 1) & self.full(),
            Adjacency::Square => occ,
        }
    }

    /// Sites of the previous column adjacent to occupied sites of this one.
    fn backward_dom(&self, occ: u32) -> u32 {
        match self.adjacency {
            Adjacency::Triangular => (occ | occ << 1) & self.full(),
            Adjacency::Square => occ,
        }
    }

    /// Occupancy masks allowed in column `x`, ascending.
    pub fn candidates(&self, x: usize) -> impl Iterator<Item = u32> + '_ {
        let r = self.columns[x];
        self.independent.iter().copied().filter(move |&m| m & r.forced_off == 0 && m & r.forced_on == r.forced_on)
    }

    /// State reached by placing `occ` in column `x` after `prev` (or as the first column).
    pub fn step(&self, prev: Option<TransferState>, x: usize, occ: u32) -> Option<TransferState> {
        let r = self.columns[x];
        let blocked = prev.map_or(0, |p| self.forward_block(p.occ));
        if occ & blocked != 0 {
            return None;
        }
        if let Some(p) = prev {
            if p.pend & !self.backward_dom(occ) != 0 {
                return None;
            }
        }
        let pend = r.need_dom & !occ & !self.in_column(occ) & !blocked & !r.pre_dom & self.full();
        Some(TransferState { occ, pend })
    }

    fn weight_of(&self, x: usize, occ: u32) -> u32 {
        (occ & self.columns[x].weighted).count_ones()
    }

    fn initial<W: Weight>(&self) -> HashMap<u64, W> {
        let mut v: HashMap<u64, W> = HashMap::new();
        if self.columns.is_empty() {
            return v;
        }
        for occ in self.candidates(0) {
            if let Some(s) = self.step(None, 0, occ) {
                v.entry(s.key()).or_insert_with(W::nothing).add_scaled(&W::unit(), self.weight_of(0, occ));
            }
        }
        v
    }

    fn advance<W: Weight>(&self, cur: &HashMap<u64, W>, x: usize) -> HashMap<u64, W> {
        let cands: Vec<u32> = self.candidates(x).collect();
        let entries: Vec<(&u64, &W)> = cur.iter().collect();
        let chunk = (entries.len() / (4 * rayon::current_num_threads()).max(1)).max(64);
        entries
            .par_chunks(chunk)
            .map(|part| {
                let mut acc: HashMap<u64, W> = HashMap::new();
                for &(&key, w) in part {
                    let prev = TransferState::from_key(key);
                    for &occ in &cands {
                        if let Some(s) = self.step(Some(prev), x, occ) {
                            acc.entry(s.key()).or_insert_with(W::nothing).add_scaled(w, self.weight_of(x, occ));
                        }
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                if a.len() < b.len() {
                    return merge_into(b, a);
                }
                for (k, w) in b {
                    a.entry(k).or_insert_with(W::nothing).add_scaled(&w, 0);
                }
                a
            })
    }

    fn finish<W: Weight>(&self, v: &HashMap<u64, W>) -> W {
        let mut keys: Vec<&u64> = v.keys().collect();
        keys.sort();
        let mut total = W::nothing();
        for k in keys {
            if TransferState::from_key(*k).pend == 0 {
                total.add_scaled(&v[k], 0);
            }
        }
        total
    }

    /// Total weight of all admissible column sequences.
    pub fn total<W: Weight>(&self) -> W {
        self.totals_by_length(|_, _| {}).pop().unwrap_or_else(W::nothing)
    }

    /// Totals of every prefix sweep `columns[..=x]`, for `x = 0..len`. The callback
    /// sees `(x, number of live states)` after each column.
    pub fn totals_by_length<W: Weight, F: FnMut(usize, usize)>(&self, mut progress: F) -> Vec<W> {
        if self.columns.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.columns.len());
        let mut v = self.initial::<W>();
        progress(0, v.len());
        out.push(self.finish(&v));
        for x in 1..self.columns.len() {
            v = self.advance(&v, x);
            progress(x, v.len());
            out.push(self.finish(&v));
        }
        out
    }

    /// Largest number of simultaneously live states over the sweep.
    pub fn state_count(&self) -> usize {
        let mut most = 0;
        let mut v = self.initial::<BigUint>();
        most = most.max(v.len());
        for x in 1..self.columns.len() {
            v = self.advance(&v, x);
            most = most.max(v.len());
        }
        most
    }

    /// Number of completions of columns `x+1..` from each reachable state at column `x`
    /// (only sequences ending with nothing pending count).
    pub fn completions(&self) -> Vec<HashMap<u64, BigUint>> {
        let m = self.columns.len();
        if m == 0 {
            return Vec::new();
        }
        let mut reach: Vec<Vec<u64>> = Vec::with_capacity(m);
        let mut v = self.initial::<BigUint>();
        reach.push(sorted_keys(&v));
        for x in 1..m {
            v = self.advance(&v, x);
            reach.push(sorted_keys(&v));
        }
        let mut out: Vec<HashMap<u64, BigUint>> = vec![HashMap::new(); m];
        out[m - 1] = reach[m - 1]
            .iter()
            .map(|&k| (k, if TransferState::from_key(k).pend == 0 { BigUint::one() } else { BigUint::zero() }))
            .collect();
        for x in (0..m - 1).rev() {
            let cands: Vec<u32> = self.candidates(x + 1).collect();
            let next = &out[x + 1];
            let layer: HashMap<u64, BigUint> = reach[x]
                .par_iter()
                .map(|&k| {
                    let s = TransferState::from_key(k);
                    let mut c = BigUint::zero();
                    for &occ in &cands {
                        if let Some(t) = self.step(Some(s), x + 1, occ) {
                            if let Some(w) = next.get(&t.key()) {
                                c += w;
                            }
                        }
                    }
                    (k, c)
                })
                .collect();
            out[x] = layer;
        }
        out
    }
}

fn merge_into<W: Weight>(mut big: HashMap<u64, W>, small: HashMap<u64, W>) -> HashMap<u64, W> {
    for (k, w) in small {
        big.entry(k).or_insert_with(W::nothing).add_scaled(&w, 0);
    }
    big
}

fn sorted_keys<W>(v: &HashMap<u64, W>) -> Vec<u64> {
    let mut k: Vec<u64> = v.keys().copied().collect();
    k.sort_unstable();
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_accumulates_by_degree() {
        let mut p = Poly::nothing();
        p.add_scaled(&Poly::unit(), 2);
        p.add_scaled(&Poly::unit(), 0);
        p.add_scaled(&Poly { coeffs: vec![BigUint::from(3u32)] }, 2);
        assert_eq!(p.coeffs, vec![BigUint::from(1u32), BigUint::zero(), BigUint::from(4u32)]);
        assert_eq!(p.lowest_degree(), Some(0));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.total(), BigUint::from(5u32));
    }

    #[test]
    fn single_column_counts() {
        // path graph on 3 vertices: MIS {0,2}, {1}; independent sets: 5
        let t: BigUint = Sweep::maximal(3, 1, Adjacency::Triangular).total();
        assert_eq!(t, BigUint::from(2u32));
        let t: BigUint = Sweep::independent_sets(3, 1, Adjacency::Square).total();
        assert_eq!(t, BigUint::from(5u32));
    }

    #[test]
    fn states_keep_pending_disjoint_from_occupancy() {
        let sw = Sweep::maximal(6, 5, Adjacency::Triangular);
        let mut prev: Vec<Option<TransferState>> = vec![None];
        for x in 0..5 {
            let mut next = Vec::new();
            for p in &prev {
                for occ in sw.candidates(x) {
                    if let Some(s) = sw.step(*p, x, occ) {
                        assert_eq!(s.occ & s.pend, 0);
                        assert_eq!(s.occ & (s.occ << 1), 0);
                        next.push(Some(s));
                    }
                }
            }
            next.sort();
            next.dedup();
            prev = next;
        }
    }
}
