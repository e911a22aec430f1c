//! Exact counts of maximal configurations on rhombi, capacity bounds and the
//! ranking bijection used by the codec.
//!
//! Columns of `Λ_{n,m}` are the sets `{j fixed, i = 1..n}`, so the sweep has
//! height `n` and length `m`, and the natural site order (rows by `j`) agrees
//! with the column order.

pub mod transfer;

use crate::configspace::Configuration;
use crate::error::{Error, Result};
use crate::lattice::Region;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
pub use transfer::{Adjacency, ColumnRule, Poly, Sweep, TransferState, Weight, MAX_ROWS};

/// Hard-hexagon entropy constant (growth rate of independent sets).
pub const HARD_HEXAGON_KAPPA: f64 = 1.39548;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub n: usize,
    pub m: usize,
    #[serde(with = "decimal")]
    pub count: BigUint,
    /// `log2(count) / ((n+1)(m+1))`.
    pub bits_per_site: f64,
}

pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom("bad decimal integer"))
    }
}

impl CountResult {
    fn new(n: usize, m: usize, count: BigUint) -> Self {
        let bits_per_site = log2_big(&count) / ((n + 1) * (m + 1)) as f64;
        CountResult { n, m, count, bits_per_site }
    }

    pub const CSV_HEADER: &'static str = "n,m,count_digits,bits_per_site";

    pub fn csv_row(&self) -> String {
        let digits = if self.count.is_zero() { 1 } else { self.count.to_str_radix(10).len() };
        format!("{},{},{},{:.10}", self.n, self.m, digits, self.bits_per_site)
    }
}

/// Base-2 logarithm of a big integer from its bit length and leading 64 bits.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_u64().unwrap_or(0).to_f64().unwrap_or(0.0).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    shift as f64 + (top as f64).log2()
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("rhombus dimensions must be positive, got {n}x{m}")));
    }
    if n.min(m) > MAX_ROWS {
        return Err(Error::BudgetExceeded(format!(
            "transfer state space for {n}x{m} exceeds column height {MAX_ROWS}"
        )));
    }
    Ok(())
}

/// Picks the shorter side as column height (counts are symmetric in `n, m`).
fn oriented(n: usize, m: usize) -> (usize, usize) {
    if n <= m {
        (n, m)
    } else {
        (m, n)
    }
}

/// Number of maximal configurations on `Λ_{n,m}` with free boundary.
pub fn count_maximal(n: usize, m: usize) -> Result<CountResult> {
    check_dims(n, m)?;
    let (h, l) = oriented(n, m);
    let count: BigUint = Sweep::maximal(h, l, Adjacency::Triangular).total();
    Ok(CountResult::new(n, m, count))
}

/// Counts for `Λ_{n,1}, …, Λ_{n,m_max}` from a single sweep of height `n`.
pub fn count_maximal_prefixes<F: FnMut(usize, usize)>(n: usize, m_max: usize, progress: F) -> Result<Vec<CountResult>> {
    check_dims(n, m_max)?;
    if n > MAX_ROWS {
        return Err(Error::BudgetExceeded(format!("column height {n} exceeds {MAX_ROWS}")));
    }
    let totals: Vec<BigUint> = Sweep::maximal(n, m_max, Adjacency::Triangular).totals_by_length(progress);
    Ok(totals.into_iter().enumerate().map(|(k, c)| CountResult::new(n, k + 1, c)).collect())
}

/// `log2 |M(Λ_{n,m})| / ((n+1)(m+1))`, a lower bound on the topological entropy.
pub fn capacity_lower(n: usize, m: usize) -> Result<f64> {
    Ok(count_maximal(n, m)?.bits_per_site)
}

/// `log2 |M(Z²_{n×m})| / ((n+1)(m+1))` for the grid graph, a lower bound on its entropy.
pub fn capacity_lower_z2(n: usize, m: usize) -> Result<f64> {
    Ok(log2_big(&count_maximal_z2(n, m)?) / ((n + 1) * (m + 1)) as f64)
}

/// Upper bound on the topological entropy: the hard-hexagon entropy.
pub fn capacity_upper() -> f64 {
    HARD_HEXAGON_KAPPA.log2()
}

/// Number of independent sets on `Λ_{n,m}`.
pub fn count_independent(n: usize, m: usize) -> Result<BigUint> {
    check_dims(n, m)?;
    let (h, l) = oriented(n, m);
    Ok(Sweep::independent_sets(h, l, Adjacency::Triangular).total())
}

/// Number of maximal independent sets of the `n × m` grid graph of Z².
pub fn count_maximal_z2(n: usize, m: usize) -> Result<BigUint> {
    check_dims(n, m)?;
    let (h, l) = oriented(n, m);
    Ok(Sweep::maximal(h, l, Adjacency::Square).total())
}

/// Bijection between `{0, …, |M(Λ_{n,m})| - 1}` and maximal configurations,
/// ordered lexicographically by column masks (column `j = 1` most significant,
/// bit `i - 1` of a mask for site `(i, j)`).
#[derive(Clone, Debug)]
pub struct MaximalRanker {
    n: usize,
    m: usize,
    sweep: Sweep,
    completions: Vec<HashMap<u64, BigUint>>,
    total: BigUint,
}

impl MaximalRanker {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        check_dims(n, m)?;
        if n > MAX_ROWS {
            return Err(Error::BudgetExceeded(format!("column height {n} exceeds {MAX_ROWS}")));
        }
        let sweep = Sweep::maximal(n, m, Adjacency::Triangular);
        let completions = sweep.completions();
        let mut total = BigUint::zero();
        for occ in sweep.candidates(0) {
            if let Some(s) = sweep.step(None, 0, occ) {
                if let Some(c) = completions[0].get(&s.key()) {
                    total += c;
                }
            }
        }
        Ok(MaximalRanker { n, m, sweep, completions, total })
    }

    pub fn region(&self) -> Region {
        Region::rhombus(self.n, self.m)
    }

    pub fn count(&self) -> &BigUint {
        &self.total
    }

    fn column_masks(&self, omega: &Configuration) -> Result<Vec<u32>> {
        if omega.region() != &self.region() {
            return Err(Error::InvalidArgument(format!(
                "configuration lives on {}, ranker expects {}",
                omega.region(),
                self.region()
            )));
        }
        if !omega.is_maximal() {
            return Err(Error::NotMaximal(format!("{} undominated or conflicting sites", omega.undominated().len())));
        }
        let bits = omega.bits();
        Ok((0..self.m)
            .map(|j| (0..self.n).filter(|&i| bits[j * self.n + i]).fold(0u32, |a, i| a | 1 << i))
            .collect())
    }

    fn weight(&self, x: usize, s: TransferState) -> BigUint {
        self.completions[x].get(&s.key()).cloned().unwrap_or_default()
    }

    pub fn rank(&self, omega: &Configuration) -> Result<BigUint> {
        let masks = self.column_masks(omega)?;
        let mut rank = BigUint::zero();
        let mut state: Option<TransferState> = None;
        for (x, &target) in masks.iter().enumerate() {
            for occ in self.sweep.candidates(x).take_while(|&o| o < target) {
                if let Some(s) = self.sweep.step(state, x, occ) {
                    rank += self.weight(x, s);
                }
            }
            state = Some(
                self.sweep
                    .step(state, x, target)
                    .ok_or_else(|| Error::Construction(format!("column {} rejected by the sweep", x + 1)))?,
            );
        }
        Ok(rank)
    }

    pub fn unrank(&self, k: &BigUint) -> Result<Configuration> {
        if k >= &self.total {
            return Err(Error::OutOfRange { index: k.to_string(), size: self.total.to_string() });
        }
        let mut k = k.clone();
        let mut state: Option<TransferState> = None;
        let mut masks = Vec::with_capacity(self.m);
        for x in 0..self.m {
            let mut chosen = None;
            for occ in self.sweep.candidates(x) {
                if let Some(s) = self.sweep.step(state, x, occ) {
                    let w = self.weight(x, s);
                    if k < w {
                        chosen = Some((occ, s));
                        break;
                    }
                    k -= w;
                }
            }
            let (occ, s) = chosen.ok_or_else(|| Error::Construction(format!("no column {} fits", x + 1)))?;
            masks.push(occ);
            state = Some(s);
        }
        let mut bits = vec![false; self.n * self.m];
        for (j, mask) in masks.iter().enumerate() {
            for i in 0..self.n {
                bits[j * self.n + i] = mask >> i & 1 == 1;
            }
        }
        Configuration::from_bits(self.region(), bits)
    }
}

pub fn rank(omega: &Configuration) -> Result<BigUint> {
    match *omega.region() {
        Region::Rhombus { n, m } => MaximalRanker::new(n, m)?.rank(omega),
        ref r => Err(Error::InvalidArgument(format!("ranking needs a rhombus, got {r}"))),
    }
}

pub fn unrank(k: &BigUint, n: usize, m: usize) -> Result<Configuration> {
    MaximalRanker::new(n, m)?.unrank(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::brute_enumerate_maximal;

    #[test]
    fn small_counts() {
        assert_eq!(count_maximal(1, 1).unwrap().count, BigUint::from(1u32));
        assert_eq!(count_maximal(2, 2).unwrap().count, BigUint::from(3u32));
        assert_eq!(count_independent(1, 1).unwrap(), BigUint::from(2u32));
        // four sites, five edges: one non-adjacent pair
        assert_eq!(count_independent(2, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(count_maximal_z2(1, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(capacity_lower(1, 1).unwrap(), 0.0);
    }

    #[test]
    fn matches_brute_force() {
        for n in 1..=5 {
            for m in 1..=5 {
                if n * m > 20 {
                    continue;
                }
                let brute = brute_enumerate_maximal(&Region::rhombus(n, m), None).unwrap().len();
                assert_eq!(count_maximal(n, m).unwrap().count, BigUint::from(brute), "{n}x{m}");
            }
        }
    }

    #[test]
    fn independent_sets_match_subset_filter() {
        for (n, m) in [(2, 2), (3, 3), (2, 5), (4, 4)] {
            let region = Region::rhombus(n, m);
            let sites = region.sites();
            let k = sites.len();
            let edges: Vec<(usize, usize)> = (0..k)
                .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
                .filter(|&(a, b)| sites[a].is_adjacent(sites[b]))
                .collect();
            let brute = (0u32..1 << k).filter(|s| edges.iter().all(|&(a, b)| s >> a & s >> b & 1 == 0)).count();
            assert_eq!(count_independent(n, m).unwrap(), BigUint::from(brute), "{n}x{m}");
        }
    }

    #[test]
    fn z2_matches_grid_brute_force() {
        for (n, m) in [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
            let k = n * m;
            let adj = |a: usize, b: usize| {
                let (ia, ja, ib, jb) = ((a % n) as i64, (a / n) as i64, (b % n) as i64, (b / n) as i64);
                (ia - ib).abs() + (ja - jb).abs() == 1
            };
            let brute = (0u32..1 << k)
                .filter(|s| {
                    (0..k).all(|a| {
                        let on = s >> a & 1 == 1;
                        let nb = (0..k).any(|b| adj(a, b) && s >> b & 1 == 1);
                        if on { !nb } else { nb }
                    })
                })
                .count();
            assert_eq!(count_maximal_z2(n, m).unwrap(), BigUint::from(brute), "{n}x{m}");
        }
    }

    #[test]
    fn symmetric_in_sides() {
        for n in 1..=6 {
            for m in 1..=6 {
                let a: BigUint = Sweep::maximal(n, m, Adjacency::Triangular).total();
                let b: BigUint = Sweep::maximal(m, n, Adjacency::Triangular).total();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn prefixes_agree_with_single_counts() {
        let pre = count_maximal_prefixes(4, 7, |_, _| {}).unwrap();
        for r in &pre {
            assert_eq!(r.count, count_maximal(4, r.m).unwrap().count);
        }
    }

    #[test]
    fn log2_of_large_integers() {
        let x = BigUint::from(3u32).pow(500);
        assert!((log2_big(&x) - 500.0 * 3f64.log2()).abs() < 1e-9);
        assert_eq!(log2_big(&BigUint::from(1024u32)), 10.0);
    }

    #[test]
    fn rank_round_trip_on_small_rhombus() {
        let r = MaximalRanker::new(3, 4).unwrap();
        let all = brute_enumerate_maximal(&Region::rhombus(3, 4), None).unwrap();
        assert_eq!(r.count(), &BigUint::from(all.len()));
        let mut ranks: Vec<BigUint> = all.iter().map(|c| r.rank(c).unwrap()).collect();
        for (c, k) in all.iter().zip(&ranks) {
            assert_eq!(&r.unrank(k).unwrap(), c);
        }
        ranks.sort();
        ranks.dedup();
        assert_eq!(ranks.len(), all.len());
        assert!(r.unrank(r.count()).is_err());
    }

    #[test]
    fn count_result_serializes_full_count() {
        let r = count_maximal(3, 3).unwrap();
        let js = serde_json::to_string(&r).unwrap();
        let back: CountResult = serde_json::from_str(&js).unwrap();
        assert_eq!(back.count, r.count);
        assert!((back.bits_per_site - r.bits_per_site).abs() < 1e-15);
        assert!(r.csv_row().starts_with("3,3,"));
    }
}
