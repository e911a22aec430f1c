//! Block encoder: bit strings to tiled maximal configurations and back.
//!
//! Each segment of `N = floor(log2 |M(Λ_{n,m})|)` bits is unranked into a maximal
//! configuration on `Λ_{n,m}`. Block `(a, b)` of a `t1 × t2` window occupies
//! `(a(n+1), b(m+1)) + Λ_{n,m}`; the seam lines between blocks are filled by a
//! row-major greedy completion, which never touches a payload site because every
//! payload site is already dominated inside its block.

use crate::configspace::{parse_grid_lines, Configuration};
use crate::counting::MaximalRanker;
use crate::error::{Error, Result};
use crate::lattice::Region;
use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Block shape, its payload size and the ranking bijection.
#[derive(Clone, Debug)]
pub struct CodecParams {
    pub n: usize,
    pub m: usize,
    /// Payload bits per block.
    pub bits_per_block: usize,
    ranker: MaximalRanker,
}

impl CodecParams {
    pub fn new(n: usize, m: usize) -> Result<CodecParams> {
        let ranker = MaximalRanker::new(n, m)?;
        let bits = ranker.count().bits();
        if bits < 2 {
            return Err(Error::InvalidArgument(format!("Λ_{{{n},{m}}} has a single maximal configuration; nothing to encode")));
        }
        Ok(CodecParams { n, m, bits_per_block: bits as usize - 1, ranker })
    }

    pub fn count(&self) -> &BigUint {
        self.ranker.count()
    }

    /// `N / ((n+1)(m+1))` as numerator and denominator.
    pub fn rate_fraction(&self) -> (usize, usize) {
        (self.bits_per_block, (self.n + 1) * (self.m + 1))
    }

    pub fn rate(&self) -> f64 {
        let (p, q) = self.rate_fraction();
        p as f64 / q as f64
    }

    fn block_origin(&self, a: usize, b: usize) -> (i64, i64) {
        ((a * (self.n + 1)) as i64, (b * (self.m + 1)) as i64)
    }

    fn window(&self, t1: usize, t2: usize) -> Region {
        Region::rhombus(t1 * (self.n + 1), t2 * (self.m + 1))
    }
}

/// Rate of the block code with `Λ_{n,m}` payloads.
pub fn rate(n: usize, m: usize) -> Result<f64> {
    Ok(CodecParams::new(n, m)?.rate())
}

/// An encoded window: `t1 × t2` blocks, of which the first `ceil(payload_bits / N)` in
/// row-major order (`a` fastest) carry data and the rest carry zero segments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TiledConfiguration {
    pub n: usize,
    pub m: usize,
    pub t1: usize,
    pub t2: usize,
    pub payload_bits: usize,
    pub configuration: Configuration,
}

impl TiledConfiguration {
    /// Header `codec n m t1 t2 payload_bits` followed by the text grid.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "codec {} {} {} {} {}", self.n, self.m, self.t1, self.t2, self.payload_bits).unwrap();
        out.push_str(&self.configuration.to_grid());
        out
    }

    pub fn from_text(text: &str) -> Result<TiledConfiguration> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let header = lines.first().ok_or(Error::Parse { line: 1, msg: "missing codec header".into() })?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 6 || f[0] != "codec" {
            return Err(Error::Parse { line: 1, msg: format!("expected `codec n m t1 t2 bits`, got `{header}`") });
        }
        let v: Vec<usize> = f[1..]
            .iter()
            .map(|x| x.parse::<usize>().map_err(|e| Error::Parse { line: 1, msg: format!("bad field `{x}`: {e}") }))
            .collect::<Result<_>>()?;
        let (configuration, used) = parse_grid_lines(&lines[1..], 2)?;
        if used + 1 != lines.len() {
            return Err(Error::Parse { line: used + 2, msg: "trailing content after grid".into() });
        }
        let t = TiledConfiguration { n: v[0], m: v[1], t1: v[2], t2: v[3], payload_bits: v[4], configuration };
        if *t.configuration.region() != Region::rhombus(t.t1 * (t.n + 1), t.t2 * (t.m + 1)) {
            return Err(Error::Parse { line: 2, msg: "grid shape does not match the codec header".into() });
        }
        Ok(t)
    }

    /// Payload block `(a, b)` as a configuration on `Λ_{n,m}`.
    pub fn block(&self, a: usize, b: usize) -> Configuration {
        let (di, dj) = ((a * (self.n + 1)) as i64, (b * (self.m + 1)) as i64);
        let r = Region::rhombus(self.n, self.m);
        let sites = r.sites().into_iter().filter(|s| self.configuration.is_occupied(s.offset((di, dj))));
        Configuration::from_occupied(r.clone(), sites).expect("block sites")
    }
}

/// Default window for `segments` blocks: `t1 = ceil(sqrt(segments))` columns.
pub fn default_layout(segments: usize) -> (usize, usize) {
    let segments = segments.max(1);
    let mut t1 = (segments as f64).sqrt().ceil() as usize;
    while t1 * t1 < segments {
        t1 += 1;
    }
    (t1, segments.div_ceil(t1))
}

fn segment_value(bits: &[bool]) -> BigUint {
    bits.iter().fold(BigUint::zero(), |acc, &b| (acc << 1u32) + BigUint::from(b as u8))
}

/// Encodes `bits` with the default layout, zero-padding the last segment.
pub fn encode(bits: &[bool], params: &CodecParams) -> Result<TiledConfiguration> {
    let (t1, t2) = default_layout(bits.len().div_ceil(params.bits_per_block));
    encode_with_layout(bits, params, t1, t2)
}

pub fn encode_with_layout(bits: &[bool], params: &CodecParams, t1: usize, t2: usize) -> Result<TiledConfiguration> {
    let nb = params.bits_per_block;
    let segments = bits.len().div_ceil(nb);
    if t1 * t2 < segments.max(1) {
        return Err(Error::InvalidArgument(format!("{segments} segments do not fit a {t1}x{t2} window")));
    }
    let blocks: Vec<Configuration> = (0..t1 * t2)
        .into_par_iter()
        .map(|k| {
            let lo = (k * nb).min(bits.len());
            let hi = ((k + 1) * nb).min(bits.len());
            let mut seg = bits[lo..hi].to_vec();
            seg.resize(nb, false);
            params.ranker.unrank(&segment_value(&seg))
        })
        .collect::<Result<_>>()?;
    let mut occupied = Vec::new();
    for (k, block) in blocks.iter().enumerate() {
        let (di, dj) = params.block_origin(k % t1, k / t1);
        occupied.extend(block.occupied_sites().into_iter().map(|s| s.offset((di, dj))));
    }
    let seeded = Configuration::from_occupied(params.window(t1, t2), occupied)?;
    let configuration = seeded.greedy_complete()?;
    let tiled = TiledConfiguration { n: params.n, m: params.m, t1, t2, payload_bits: bits.len(), configuration };
    for (k, block) in blocks.iter().enumerate() {
        if tiled.block(k % t1, k / t1) != *block {
            return Err(Error::Construction(format!("seam fill altered payload block {k}")));
        }
    }
    Ok(tiled)
}

/// Reads every payload block back through the ranking bijection.
pub fn decode(c: &TiledConfiguration, params: &CodecParams) -> Result<Vec<bool>> {
    if (c.n, c.m) != (params.n, params.m) {
        return Err(Error::InvalidArgument(format!("window uses {}x{} blocks, codec expects {}x{}", c.n, c.m, params.n, params.m)));
    }
    let nb = params.bits_per_block;
    let segments = c.payload_bits.div_ceil(nb);
    if segments > c.t1 * c.t2 {
        return Err(Error::InvalidArgument("header declares more payload than the window holds".into()));
    }
    let limit = BigUint::from(1u8) << nb;
    let parts: Vec<Vec<bool>> = (0..segments)
        .into_par_iter()
        .map(|k| {
            let block = c.block(k % c.t1, k / c.t1);
            let r = params.ranker.rank(&block).map_err(|e| Error::Corrupted { block: k, msg: e.to_string() })?;
            if r >= limit {
                return Err(Error::Corrupted { block: k, msg: format!("rank {r} exceeds {nb} bits") });
            }
            Ok((0..nb).rev().map(|b| r.bit(b as u64)).collect())
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<bool> = parts.into_iter().flatten().collect();
    if out[c.payload_bits..].iter().any(|&b| b) {
        return Err(Error::Corrupted { block: segments.saturating_sub(1), msg: "nonzero padding".into() });
    }
    out.truncate(c.payload_bits);
    Ok(out)
}

/// Number of sites of a window that are neither occupied nor dominated.
pub fn window_defects(c: &TiledConfiguration) -> usize {
    c.configuration.undominated().len() + (!c.configuration.is_independent()) as usize
}

#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub m: usize,
    pub bits_per_block: usize,
    pub rate: f64,
}

/// `N / ((n+1)(m+1))` for every `m` in a range at fixed `n`, from the counting sweep.
pub fn rate_sweep(n: usize, m_max: usize) -> Result<Vec<RateRow>> {
    Ok(crate::counting::count_maximal_prefixes(n, m_max, |_, _| {})?
        .into_iter()
        .filter(|r| r.count.bits() >= 2)
        .map(|r| {
            let nb = r.count.bits() as usize - 1;
            RateRow { n: r.n, m: r.m, bits_per_block: nb, rate: nb as f64 / ((r.n + 1) * (r.m + 1)) as f64 }
        })
        .collect())
}

/// Bits per site of a tiled window, for reporting.
pub fn window_rate(c: &TiledConfiguration) -> f64 {
    c.payload_bits as f64 / c.configuration.region().len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_by_two_blocks() {
        let p = CodecParams::new(2, 2).unwrap();
        assert_eq!(*p.count(), BigUint::from(3u32));
        assert_eq!(p.bits_per_block, 1);
        assert_eq!(p.rate_fraction(), (1, 9));
        let bits = [true, false, true, true];
        let c = encode(&bits, &p).unwrap();
        assert_eq!((c.t1, c.t2), (2, 2));
        assert!(c.configuration.is_maximal());
        assert_eq!(decode(&c, &p).unwrap(), bits);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, m) in [(2, 2), (3, 4), (4, 4)] {
            let p = CodecParams::new(n, m).unwrap();
            let count = p.count().clone();
            assert!(BigUint::from(1u8) << p.bits_per_block <= count);
            assert!(count < BigUint::from(1u8) << (p.bits_per_block + 1));
            for len in [0, 1, p.bits_per_block, 100 * p.bits_per_block, 37] {
                let bits: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
                let c = encode(&bits, &p).unwrap();
                assert_eq!(window_defects(&c), 0);
                assert_eq!(decode(&c, &p).unwrap(), bits);
                let again = TiledConfiguration::from_text(&c.to_text()).unwrap();
                assert_eq!(again, c);
            }
        }
    }

    #[test]
    fn corruption_is_detected() {
        let p = CodecParams::new(3, 4).unwrap();
        let bits: Vec<bool> = (0..4 * p.bits_per_block).map(|k| k % 3 == 0).collect();
        let c = encode(&bits, &p).unwrap();
        for s in Region::rhombus(3, 4).sites() {
            let mut bad = c.clone();
            let v = bad.configuration.is_occupied(s);
            bad.configuration = bad.configuration.with_site(s, !v).unwrap();
            match decode(&bad, &p) {
                Ok(out) => assert_ne!(out, bits),
                Err(e) => assert!(matches!(e, Error::Corrupted { block: 0, .. })),
            }
        }
    }

    #[test]
    fn rate_sweep_matches_params() {
        let rows = rate_sweep(3, 6).unwrap();
        for r in &rows {
            assert_eq!(r.rate, CodecParams::new(r.n, r.m).unwrap().rate());
        }
        assert!(CodecParams::new(1, 1).is_err());
    }
}
