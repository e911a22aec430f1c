//! Finite-volume maximal hard-core Gibbs measures on parallelogram boxes with
//! colored or explicit boundary conditions.
//!
//! Partition functions are computed as generating polynomials in the activity
//! (coefficient `k` counts admissible configurations with `k` occupied sites in
//! the box) by the transfer sweep, then evaluated exactly for rational activities
//! or in the log domain for floating ones.

use crate::configspace::{Configuration, MisProblem};
use crate::counting::{log2_big, ColumnRule, Poly, Sweep, MAX_ROWS};
use crate::error::{Error, Result};
use crate::lattice::{Color, Region, Site, NEIGHBOR_OFFSETS};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Largest `λ` below which the contour series diverges.
pub const SERIES_THRESHOLD: f64 = 11_390_625.0;

/// Budget for explicit enumeration of admissible configurations.
pub const ENUMERATION_BUDGET: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub enum Activity {
    Exact(BigRational),
    Float(f64),
}

impl Activity {
    pub fn one() -> Self {
        Activity::Exact(BigRational::one())
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Activity::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Activity::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Activity::Float(x) => *x,
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            Activity::Exact(r) => ln_big(r.numer().magnitude()) - ln_big(r.denom().magnitude()),
            Activity::Float(x) => x.ln(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Activity::Exact(r) => r.is_one(),
            Activity::Float(x) => *x == 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Activity::Exact(r) => r.is_positive(),
            Activity::Float(x) => x.is_finite() && *x > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("activity must be positive, got {self}")))
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::Exact(r) => write!(f, "{r}"),
            Activity::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Integers and `p/q` parse exactly; anything else as a float.
impl FromStr for Activity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse activity {s:?}"));
        let a = if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Activity::Exact(BigRational::new(p, q))
        } else if let Ok(p) = s.parse::<BigInt>() {
            Activity::Exact(BigRational::from_integer(p))
        } else {
            Activity::Float(s.parse::<f64>().map_err(|_| bad())?)
        };
        a.validate()?;
        Ok(a)
    }
}

fn ln_big(x: &BigUint) -> f64 {
    log2_big(x) * std::f64::consts::LN_2
}

/// The configuration outside the box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Every site of one color class occupied.
    Color(Color),
    /// Occupancy read from a configuration whose region contains the width-2 collar.
    Explicit(Configuration),
}

impl BoundaryCondition {
    pub fn occupied(&self, s: Site) -> Result<bool> {
        match self {
            BoundaryCondition::Color(c) => Ok(s.color() == *c),
            BoundaryCondition::Explicit(cfg) => {
                if cfg.region().contains(s) {
                    Ok(cfg.is_occupied(s))
                } else {
                    Err(Error::Precondition(format!("boundary configuration does not cover collar site {s}")))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            BoundaryCondition::Color(c) => c.name().to_string(),
            BoundaryCondition::Explicit(_) => "explicit".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GibbsSpec {
    pub region: Region,
    pub activity: Activity,
    pub boundary: BoundaryCondition,
}

impl GibbsSpec {
    pub fn new(region: Region, activity: Activity, boundary: BoundaryCondition) -> Result<Self> {
        activity.validate()?;
        box_bounds(&region)?;
        Ok(GibbsSpec { region, activity, boundary })
    }

    /// The box `{1..n}²`.
    pub fn rhombus(n: usize, activity: Activity, boundary: BoundaryCondition) -> Result<Self> {
        GibbsSpec::new(Region::square(n), activity, boundary)
    }

    /// The box `{-h..h}²`.
    pub fn centered(half: usize, activity: Activity, boundary: BoundaryCondition) -> Result<Self> {
        GibbsSpec::new(Region::centered(half), activity, boundary)
    }

    pub fn with_activity(&self, activity: Activity) -> Result<Self> {
        GibbsSpec::new(self.region.clone(), activity, self.boundary.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Red,
    Green,
    Homogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventSpec {
    pub m: usize,
    pub kind: EventKind,
}

impl EventSpec {
    pub fn red(m: usize) -> Self {
        EventSpec { m, kind: EventKind::Red }
    }
    pub fn green(m: usize) -> Self {
        EventSpec { m, kind: EventKind::Green }
    }
    pub fn homogeneous(m: usize) -> Self {
        EventSpec { m, kind: EventKind::Homogeneous }
    }
}

/// `{-m..m+1} × {-m..m}`.
pub fn east_window(m: usize) -> Vec<Site> {
    let m = m as i64;
    (-m..=m).flat_map(|j| (-m..=m + 1).map(move |i| Site::new(i, j))).collect()
}

/// `{-m-1..m} × {-m..m}`.
pub fn west_window(m: usize) -> Vec<Site> {
    let m = m as i64;
    (-m..=m).flat_map(|j| (-m - 1..=m).map(move |i| Site::new(i, j))).collect()
}

/// Sites forced occupied by the m-red event.
pub fn red_sites(m: usize) -> Vec<Site> {
    east_window(m).into_iter().filter(|s| s.color() == Color::Red).collect()
}

/// Sites forced occupied by the m-green event.
pub fn green_sites(m: usize) -> Vec<Site> {
    west_window(m).into_iter().filter(|s| s.color() == Color::Green).collect()
}

fn box_bounds(region: &Region) -> Result<(i64, i64, i64, i64)> {
    match region {
        Region::Rhombus { .. } | Region::CenteredBox { .. } if !region.is_empty() => {
            Ok(region.parallelogram().expect("parallelogram region"))
        }
        _ => Err(Error::InvalidArgument(format!("Gibbs boxes must be nonempty rhombi or centered boxes, got {region}"))),
    }
}

/// Sites at lattice distance exactly `d` (1 or 2) from the box.
pub fn collar(region: &Region, d: usize) -> Vec<Site> {
    let mut layer: Vec<Site> = region.sites();
    let mut seen: std::collections::BTreeSet<(i64, i64)> = layer.iter().map(|s| (s.j, s.i)).collect();
    for _ in 0..d {
        let mut next = Vec::new();
        for s in &layer {
            for t in s.neighbors() {
                if seen.insert((t.j, t.i)) {
                    next.push(t);
                }
            }
        }
        layer = next;
    }
    layer.sort_by_key(|s| (s.j, s.i));
    layer
}

/// Whether `η` together with the boundary is independent and every site of the box
/// and of its first collar layer is occupied or has an occupied neighbor.
pub fn admissible(eta: &Configuration, b: &BoundaryCondition) -> Result<bool> {
    let region = eta.region();
    box_bounds(region)?;
    let occ = |s: Site| -> Result<bool> {
        if region.contains(s) {
            Ok(eta.is_occupied(s))
        } else {
            b.occupied(s)
        }
    };
    let mut check: Vec<Site> = region.sites();
    check.extend(collar(region, 1));
    for s in check {
        let here = occ(s)?;
        let mut dominated = here;
        for t in s.neighbors() {
            if occ(t)? {
                if here {
                    return Ok(false);
                }
                dominated = true;
            }
        }
        if !dominated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Transfer sweep over the box plus one collar layer, with the collar fixed by the
/// boundary and extra box sites forced occupied.
fn box_sweep(region: &Region, b: &BoundaryCondition, forced: &[Site]) -> Result<Option<Sweep>> {
    let (i0, i1, j0, j1) = box_bounds(region)?;
    let rows = (i1 - i0 + 3) as usize;
    if rows > MAX_ROWS {
        return Err(Error::BudgetExceeded(format!("box width {} exceeds the sweep height", rows - 2)));
    }
    let inner: std::collections::HashSet<Site> = collar(region, 1).into_iter().collect();
    let mut columns = Vec::with_capacity((j1 - j0 + 3) as usize);
    for j in j0 - 1..=j1 + 1 {
        let mut rule = ColumnRule::default();
        for i in i0 - 1..=i1 + 1 {
            let s = Site::new(i, j);
            let bit = 1u32 << (i - i0 + 1);
            if region.contains(s) {
                rule.need_dom |= bit;
                rule.weighted |= bit;
            } else {
                if b.occupied(s)? {
                    rule.forced_on |= bit;
                } else {
                    rule.forced_off |= bit;
                }
                if inner.contains(&s) {
                    rule.need_dom |= bit;
                }
                let mut outside_dom = false;
                for d in NEIGHBOR_OFFSETS {
                    let t = s.offset(d);
                    if !region.contains(t) && b.occupied(t)? {
                        outside_dom = true;
                    }
                }
                if outside_dom {
                    rule.pre_dom |= bit;
                }
            }
        }
        columns.push(rule);
    }
    for s in forced {
        if !region.contains(*s) {
            if b.occupied(*s)? {
                continue;
            }
            return Ok(None);
        }
        let (x, y) = ((s.j - j0 + 1) as usize, s.i - i0 + 1);
        columns[x].forced_on |= 1 << y;
    }
    for r in &columns {
        if r.forced_on & r.forced_off != 0 {
            return Ok(None);
        }
    }
    Ok(Some(Sweep::new(rows, crate::counting::Adjacency::Triangular, columns)))
}

/// `Z(λ) = Σ_k c_k λ^k` over admissible configurations of the box, optionally
/// restricted to those occupying every site in `forced`.
pub fn partition_polynomial(region: &Region, b: &BoundaryCondition, forced: &[Site]) -> Result<Poly> {
    Ok(match box_sweep(region, b, forced)? {
        Some(sw) => {
            let mut p: Poly = sw.total();
            while p.coeffs.last().is_some_and(|c| c.is_zero()) {
                p.coeffs.pop();
            }
            p
        }
        None => Poly::default(),
    })
}

pub fn eval_exact(p: &Poly, lambda: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.coeffs.iter().rev() {
        acc = acc * lambda + BigRational::from_integer(BigInt::from(c.clone()));
    }
    acc
}

/// `ln Z(λ)`, or `-∞` when there is no admissible configuration.
pub fn ln_eval(p: &Poly, ln_lambda: f64) -> f64 {
    let terms: Vec<f64> = p
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| ln_big(c) + k as f64 * ln_lambda)
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    /// Natural logarithm of the value.
    Ln(f64),
}

impl Value {
    pub fn ln(&self) -> f64 {
        match self {
            Value::Exact(r) => {
                if r.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    ln_big(r.numer().magnitude()) - ln_big(r.denom().magnitude())
                }
            }
            Value::Ln(x) => *x,
        }
    }
}

pub fn evaluate(p: &Poly, a: &Activity) -> Value {
    match a {
        Activity::Exact(r) => Value::Exact(eval_exact(p, r)),
        Activity::Float(x) => Value::Ln(ln_eval(p, x.ln())),
    }
}

pub fn partition_function(g: &GibbsSpec) -> Result<Value> {
    Ok(evaluate(&partition_polynomial(&g.region, &g.boundary, &[])?, &g.activity))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Approx(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Probability::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Approx(_) => None,
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{r}"),
            Probability::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Constrained partition polynomials for the homogeneity events at half-width `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventPolynomials {
    pub m: usize,
    pub all: Poly,
    pub green: Poly,
    pub red: Poly,
    pub both: Poly,
}

impl EventPolynomials {
    pub fn new(region: &Region, b: &BoundaryCondition, m: usize) -> Result<Self> {
        let (i0, i1, j0, j1) = box_bounds(region)?;
        let m_ = m as i64;
        if -m_ - 1 < i0 || m_ + 1 > i1 || -m_ < j0 || m_ > j1 {
            return Err(Error::Precondition(format!("event windows for m = {m} do not fit inside {region}")));
        }
        let g = green_sites(m);
        let r = red_sites(m);
        let gr: Vec<Site> = g.iter().chain(r.iter()).copied().collect();
        Ok(EventPolynomials {
            m,
            all: partition_polynomial(region, b, &[])?,
            green: partition_polynomial(region, b, &g)?,
            red: partition_polynomial(region, b, &r)?,
            both: partition_polynomial(region, b, &gr)?,
        })
    }

    /// Weight of the m-homogeneous event.
    pub fn homogeneous(&self) -> Poly {
        let mut coeffs = Vec::new();
        let len = self.green.coeffs.len().max(self.red.coeffs.len());
        for k in 0..len {
            coeffs.push(self.green.coeff(k) + self.red.coeff(k) - self.both.coeff(k));
        }
        Poly { coeffs }
    }

    fn numerator(&self, kind: EventKind) -> Poly {
        match kind {
            EventKind::Green => self.green.clone(),
            EventKind::Red => self.red.clone(),
            EventKind::Homogeneous => self.homogeneous(),
        }
    }

    /// `μ(event | m-homogeneous)` at the given activity.
    pub fn conditional(&self, kind: EventKind, a: &Activity) -> Result<Probability> {
        let den = self.homogeneous();
        if den.lowest_degree().is_none() {
            return Err(Error::EmptyConditioning);
        }
        let num = self.numerator(kind);
        Ok(match a {
            Activity::Exact(r) => Probability::Exact(eval_exact(&num, r) / eval_exact(&den, r)),
            Activity::Float(x) => {
                let l = x.ln();
                Probability::Approx((ln_eval(&num, l) - ln_eval(&den, l)).exp())
            }
        })
    }

    /// Limit of the conditional probability as `λ → 0`: only the least occupied
    /// homogeneous configurations contribute.
    pub fn low_activity_limit(&self, kind: EventKind) -> Result<BigRational> {
        let den = self.homogeneous();
        let k = den.lowest_degree().ok_or(Error::EmptyConditioning)?;
        Ok(BigRational::new(self.numerator(kind).coeff(k).into(), den.coeff(k).into()))
    }

    /// Limit as `λ → ∞`: only the most occupied homogeneous configurations contribute.
    pub fn high_activity_limit(&self, kind: EventKind) -> Result<BigRational> {
        let den = self.homogeneous();
        let k = den.degree().ok_or(Error::EmptyConditioning)?;
        Ok(BigRational::new(self.numerator(kind).coeff(k).into(), den.coeff(k).into()))
    }
}

pub fn event_probability(g: &GibbsSpec, e: EventSpec) -> Result<Probability> {
    EventPolynomials::new(&g.region, &g.boundary, e.m)?.conditional(e.kind, &g.activity)
}

/// One line of a λ-sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub lambda: String,
    pub boundary: String,
    pub p_green_given_hom: f64,
    pub p_red_given_hom: f64,
    pub z_log: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_green_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_red_exact: Option<String>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "n,m,lambda,boundary,P_green_given_hom,P_red_given_hom,Z_log";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.15},{:.15},{:.12}",
            self.n, self.m, self.lambda, self.boundary, self.p_green_given_hom, self.p_red_given_hom, self.z_log
        )
    }
}

/// Conditional event probabilities on `{-h..h}²` for each activity, reusing one set
/// of polynomials per boundary.
pub fn gibbs_sweep(half: usize, m: usize, boundary: &BoundaryCondition, activities: &[Activity]) -> Result<Vec<SweepRow>> {
    let region = Region::centered(half);
    let ev = EventPolynomials::new(&region, boundary, m)?;
    activities
        .iter()
        .map(|a| {
            a.validate()?;
            let pg = ev.conditional(EventKind::Green, a)?;
            let pr = ev.conditional(EventKind::Red, a)?;
            Ok(SweepRow {
                n: 2 * half + 1,
                m,
                lambda: a.to_string(),
                boundary: boundary.name(),
                p_green_given_hom: pg.to_f64(),
                p_red_given_hom: pr.to_f64(),
                z_log: evaluate(&ev.all, a).ln(),
                p_green_exact: pg.exact().map(|r| r.to_string()),
                p_red_exact: pr.exact().map(|r| r.to_string()),
            })
        })
        .collect()
}

/// Admissible configurations of a box, by depth-first search over the box sites.
pub fn enumerate_admissible(region: &Region, b: &BoundaryCondition) -> Result<Vec<Configuration>> {
    box_bounds(region)?;
    let mut p = MisProblem::for_region(region)?;
    let sites = region.sites();
    for (k, s) in sites.iter().enumerate() {
        for t in s.neighbors() {
            if !region.contains(t) && b.occupied(t)? {
                p.blocked |= 1 << k;
                p.pre_dom |= 1 << k;
            }
        }
    }
    for s in collar(region, 1) {
        let mut inside = 0u64;
        let mut outside_dom = b.occupied(s)?;
        for t in s.neighbors() {
            match region.index_of(t) {
                Some(l) => inside |= 1 << l,
                None => outside_dom |= b.occupied(t)?,
            }
        }
        if b.occupied(s)? {
            p.blocked |= inside;
        } else if !outside_dom {
            p.covers.push(inside);
        }
    }
    let mut out = Vec::new();
    let mut overflow = false;
    p.for_each(|m| {
        if out.len() < ENUMERATION_BUDGET {
            out.push(m);
        } else {
            overflow = true;
        }
    });
    if overflow {
        return Err(Error::BudgetExceeded(format!("more than {ENUMERATION_BUDGET} admissible configurations")));
    }
    Ok(out.into_iter().map(|m| Configuration::from_mask(region.clone(), m)).collect())
}

/// A random admissible configuration: sites of the first collar layer that need the
/// box are served first by a random box neighbour, then the box is completed greedily
/// in random order. Retries until the result is admissible.
pub fn random_admissible<R: Rng + ?Sized>(region: &Region, b: &BoundaryCondition, rng: &mut R) -> Result<Configuration> {
    box_bounds(region)?;
    let sites = region.sites();
    let occ_outside = |s: Site| -> Result<bool> { b.occupied(s) };
    for _ in 0..1000 {
        let mut bits = vec![false; sites.len()];
        let free = |bits: &[bool], s: Site| -> Result<bool> {
            for t in s.neighbors() {
                let o = match region.index_of(t) {
                    Some(l) => bits[l],
                    None => occ_outside(t)?,
                };
                if o {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut needy = collar(region, 1);
        needy.shuffle(rng);
        for s in needy {
            if occ_outside(s)? {
                continue;
            }
            let mut dominated = false;
            let mut options = Vec::new();
            for t in s.neighbors() {
                match region.index_of(t) {
                    Some(l) => {
                        dominated |= bits[l];
                        options.push(t);
                    }
                    None => dominated |= occ_outside(t)?,
                }
            }
            if dominated {
                continue;
            }
            options.shuffle(rng);
            for t in options {
                if free(&bits, t)? {
                    bits[region.index_of(t).expect("box site")] = true;
                    break;
                }
            }
        }
        let mut order = sites.clone();
        order.shuffle(rng);
        for s in order {
            let k = region.index_of(s).expect("box site");
            if !bits[k] && free(&bits, s)? {
                bits[k] = true;
            }
        }
        let eta = Configuration::from_bits(region.clone(), bits)?;
        if admissible(&eta, b)? {
            return Ok(eta);
        }
    }
    Err(Error::Construction(format!("no admissible configuration found on {region}")))
}

/// Whether every admissible configuration receives the same conditional mass.
pub fn uniformity_check(g: &GibbsSpec) -> Result<bool> {
    let all = enumerate_admissible(&g.region, &g.boundary)?;
    if all.is_empty() {
        return Err(Error::EmptyConditioning);
    }
    let first = all[0].count();
    if all.iter().all(|c| c.count() == first) {
        return Ok(true);
    }
    Ok(match &g.activity {
        Activity::Exact(r) => r.is_one(),
        Activity::Float(x) => (x.ln()).abs() < 1e-15,
    })
}

/// `C · Σ_{l ≥ 4m} l² 15^l λ^{-l/6}` in closed form; `+∞` unless `λ > 15⁶`.
pub fn series_bound(lambda: f64, m: u64, c: f64) -> f64 {
    if lambda <= SERIES_THRESHOLD || lambda.is_nan() {
        return f64::INFINITY;
    }
    let r = 15.0 * lambda.powf(-1.0 / 6.0);
    let l = (4 * m) as f64;
    let q = 1.0 - r;
    let tail = l * l / q + 2.0 * l * r / (q * q) + r * (1.0 + r) / (q * q * q);
    c * (l * r.ln()).exp() * tail
}

/// Direct summation of the same series up to `l_max`.
pub fn series_partial(lambda: f64, m: u64, c: f64, l_max: u64) -> f64 {
    let ln_r = 15f64.ln() - lambda.ln() / 6.0;
    let mut acc = 0.0;
    for l in (4 * m)..=l_max {
        let lf = l as f64;
        acc += lf * lf * (lf * ln_r).exp();
    }
    c * acc
}

/// Least `m` with `series_bound(λ, m, C) < target`, searching up to `m_max`.
pub fn series_threshold_m(lambda: f64, c: f64, target: f64, m_max: u64) -> Option<u64> {
    (0..=m_max).find(|&m| series_bound(lambda, m, c) < target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_poly(region: &Region, b: &BoundaryCondition, forced: &[Site]) -> Poly {
        let sites = region.sites();
        let mut p = Poly::default();
        for mask in 0u64..1 << sites.len() {
            let bits: Vec<bool> = (0..sites.len()).map(|k| mask >> k & 1 == 1).collect();
            let eta = Configuration::from_bits(region.clone(), bits).unwrap();
            if forced.iter().all(|s| eta.is_occupied(*s)) && admissible(&eta, b).unwrap() {
                crate::counting::Weight::add_scaled(&mut p, &<Poly as crate::counting::Weight>::unit(), eta.count() as u32);
            }
        }
        while p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        p
    }

    #[test]
    fn ground_restriction_is_admissible() {
        for c in Color::ALL {
            let region = Region::centered(2);
            let eta = Configuration::from_occupied(region.clone(), region.sites().into_iter().filter(|s| s.color() == c)).unwrap();
            assert!(admissible(&eta, &BoundaryCondition::Color(c)).unwrap());
            let other = Color::from_index(c.index() as i64 + 1);
            assert!(!admissible(&eta, &BoundaryCondition::Color(other)).unwrap());
        }
    }

    #[test]
    fn polynomial_matches_brute_force() {
        for n in 1..=3 {
            for c in Color::ALL {
                let b = BoundaryCondition::Color(c);
                let r = Region::square(n);
                assert_eq!(partition_polynomial(&r, &b, &[]).unwrap(), brute_poly(&r, &b, &[]), "n={n} {c}");
            }
        }
        let r = Region::centered(1);
        for c in Color::ALL {
            let b = BoundaryCondition::Color(c);
            let f = [Site::new(0, 0)];
            assert_eq!(partition_polynomial(&r, &b, &f).unwrap(), brute_poly(&r, &b, &f));
        }
    }

    #[test]
    fn enumeration_matches_polynomial() {
        for c in Color::ALL {
            let b = BoundaryCondition::Color(c);
            let r = Region::square(4);
            let all = enumerate_admissible(&r, &b).unwrap();
            let p = partition_polynomial(&r, &b, &[]).unwrap();
            assert_eq!(BigUint::from(all.len()), p.total());
            assert!(all.iter().all(|e| admissible(e, &b).unwrap()));
        }
    }

    #[test]
    fn activity_parsing() {
        assert_eq!("1/2".parse::<Activity>().unwrap(), Activity::ratio(1, 2));
        assert_eq!("3".parse::<Activity>().unwrap(), Activity::ratio(3, 1));
        assert_eq!("2.5e7".parse::<Activity>().unwrap(), Activity::Float(2.5e7));
        assert!("0".parse::<Activity>().is_err());
        assert!("-1/2".parse::<Activity>().is_err());
        assert!("x".parse::<Activity>().is_err());
    }

    #[test]
    fn log_domain_agrees_with_exact() {
        let p = partition_polynomial(&Region::square(4), &BoundaryCondition::Color(Color::Blue), &[]).unwrap();
        for (num, den) in [(1, 2), (1, 1), (7, 3)] {
            let exact = eval_exact(&p, &BigRational::new(num.into(), den.into()));
            let f = ln_eval(&p, (num as f64 / den as f64).ln());
            assert!((Value::Exact(exact).ln() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn series_closed_form() {
        assert_eq!(series_bound(SERIES_THRESHOLD, 3, 1.0), f64::INFINITY);
        assert_eq!(series_bound(1.0, 3, 1.0), f64::INFINITY);
        let lam = 2.0 * SERIES_THRESHOLD;
        let closed = series_bound(lam, 5, 1.0);
        let partial = series_partial(lam, 5, 1.0, 10_000);
        assert!((closed - partial).abs() <= 1e-9 * closed.max(1.0));
        assert!(series_bound(lam, 60, 1.0) < series_bound(lam, 30, 1.0));
    }
}
