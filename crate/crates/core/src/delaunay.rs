//! Exact Delaunay geometry for occupied lattice sites.
//!
//! Every predicate works on integer coordinates. A site `(i, j)` is mapped to
//! `(x, y) = (2i + j, j)`, which is the Euclidean embedding scaled by 2 in `x` and by
//! `2/sqrt(3)` in `y`; the lifting map `x² + 3y²` then gives the in-circle test with
//! the same sign as the Euclidean one. Areas are rational multiples of `sqrt(3)`:
//! a triangle whose edge vectors have lattice determinant `c` has area `|c|·sqrt(3)/4`.

use crate::configspace::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{embed, norm2, Region, Site};
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Lattice determinant of a regular triangle (side `sqrt(7)`).
pub const REGULAR_CROSS: i64 = 7;
/// Largest lattice determinant allowed for a defective triangle: area `3·sqrt(3)/2`.
pub const DEFECTIVE_CROSS_BOUND: i64 = 6;

fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// A length given by its exact square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Radius {
    #[serde(serialize_with = "ser_ratio")]
    pub squared: Rational64,
}

impl Radius {
    pub fn from_squared(squared: Rational64) -> Result<Radius> {
        if squared <= Rational64::zero() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got sqrt({squared})")));
        }
        Ok(Radius { squared })
    }

    /// Circumradius of the regular triangle, `sqrt(7/3)`.
    pub fn rho() -> Radius {
        Radius { squared: Rational64::new(7, 3) }
    }

    /// Covering-radius variant `1.578`.
    pub fn rho_covering() -> Radius {
        Radius { squared: Rational64::new(1578 * 1578, 1_000_000) }
    }

    pub fn doubled(self) -> Radius {
        Radius { squared: self.squared * 4 }
    }

    pub fn to_f64(self) -> f64 {
        self.squared.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl Default for Radius {
    fn default() -> Self {
        Radius::rho()
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sqrt({})", self.squared)
    }
}

/// Accepts `sqrt(p/q)`, `sqrt(p)`, a fraction `p/q` or a finite decimal such as `1.578`,
/// all parsed exactly.
impl FromStr for Radius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Radius> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            return Radius::from_squared(parse_exact(inner)?);
        }
        let r = parse_exact(s)?;
        Radius::from_squared(r * r)
    }
}

fn parse_exact(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidArgument(format!("cannot parse {s:?} as an exact number"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = 10i64.pow(frac.len() as u32);
    let w: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
    let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let sign = if whole.starts_with('-') { -1 } else { 1 };
    Ok(Rational64::new(w * scale + sign * f, scale))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleClass {
    Regular,
    Defective,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Triangle {
    pub vertices: [Site; 3],
    /// Squared side lengths opposite to each vertex.
    pub sides2: [i64; 3],
    /// Absolute lattice determinant; the area is `cross·sqrt(3)/4`.
    pub cross: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub circumradius2: Rational64,
    /// Euclidean circumcentre, for display only.
    pub circumcenter: (f64, f64),
    pub class: TriangleClass,
}

impl Triangle {
    /// `None` for collinear triples.
    pub fn new(a: Site, b: Site, c: Site) -> Option<Triangle> {
        let cross = ((b.i - a.i) * (c.j - a.j) - (b.j - a.j) * (c.i - a.i)).abs();
        if cross == 0 {
            return None;
        }
        let sides2 = [b.dist2(c), a.dist2(c), a.dist2(b)];
        let circumradius2 = Rational64::new(sides2[0] * sides2[1] * sides2[2], 3 * cross * cross);
        let class = if sides2.iter().all(|&s| s == 7) { TriangleClass::Regular } else { TriangleClass::Defective };
        Some(Triangle { vertices: [a, b, c], sides2, cross, circumradius2, circumcenter: circumcenter(a, b, c), class })
    }

    /// Area divided by `sqrt(3)`.
    pub fn area_over_sqrt3(&self) -> Rational64 {
        Rational64::new(self.cross, 4)
    }

    pub fn area(&self) -> f64 {
        self.cross as f64 * 3f64.sqrt() / 4.0
    }

    pub fn is_regular(&self) -> bool {
        self.class == TriangleClass::Regular
    }

    /// Whether `p` lies strictly inside the circumcircle.
    pub fn strictly_inside(&self, p: Site) -> bool {
        let [a, b, c] = self.vertices;
        in_circle(a, b, c, p) == Ordering::Greater
    }
}

fn circumcenter(a: Site, b: Site, c: Site) -> (f64, f64) {
    let (ax, ay) = embed(a);
    let (bx, by) = embed(b);
    let (cx, cy) = embed(c);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
    ((a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d, (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d)
}

fn lift(s: Site) -> (i128, i128, i128) {
    let x = (2 * s.i + s.j) as i128;
    let y = s.j as i128;
    (x, y, x * x + 3 * y * y)
}

/// Sign of the orientation of `(a, b, c)`: positive for counter-clockwise.
pub fn orient(a: Site, b: Site, c: Site) -> i64 {
    ((b.i - a.i) * (c.j - a.j) - (b.j - a.j) * (c.i - a.i)).signum()
}

/// Position of `d` relative to the circle through `a, b, c`: `Greater` strictly inside,
/// `Equal` on the circle, `Less` outside. The triple must not be collinear.
pub fn in_circle(a: Site, b: Site, c: Site, d: Site) -> Ordering {
    let (dx, dy, dw) = lift(d);
    let row = |s: Site| {
        let (x, y, w) = lift(s);
        (x - dx, y - dy, w - dw)
    };
    let (a1, a2, a3) = row(a);
    let (b1, b2, b3) = row(b);
    let (c1, c2, c3) = row(c);
    let det = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1);
    (det * orient(a, b, c) as i128).cmp(&0)
}

fn sites_within(norm2_max: i64) -> Vec<Site> {
    let r = (2.0 * (norm2_max.max(0) as f64).sqrt()).ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in -r..=r {
        for i in -r..=r {
            if (i, j) != (0, 0) && norm2(i, j) <= norm2_max {
                out.push(Site::new(i, j));
            }
        }
    }
    out
}

/// Nonzero sites within `radius` of the origin, sorted by `(norm, j, i)`.
pub fn candidate_vertices(radius: Radius) -> Vec<Site> {
    let bound = radius.squared.floor().to_integer();
    let mut out: Vec<Site> =
        sites_within(bound).into_iter().filter(|s| Rational64::from(norm2(s.i, s.j)) <= radius.squared).collect();
    out.sort_by_key(|s| (norm2(s.i, s.j), s.j, s.i));
    out
}

/// Points strictly inside the circumdisk are vertices, neighbours of vertices, or
/// have a neighbour that is not strictly inside (a possible dominating occupied site).
fn domination_feasible(t: &Triangle) -> bool {
    let reach = (t.circumradius2 * 4).ceil().to_integer();
    let [a, b, c] = t.vertices;
    sites_within(reach).into_iter().chain(std::iter::once(Site::ORIGIN)).all(|d| {
        let p = a.offset((d.i, d.j));
        if !t.strictly_inside(p) || t.vertices.contains(&p) {
            return true;
        }
        if [a, b, c].iter().any(|v| v.is_adjacent(p)) {
            return true;
        }
        p.neighbors().iter().any(|&q| !t.strictly_inside(q))
    })
}

/// Feasible triangles with one vertex at the origin and circumradius at most `rho`,
/// each listed once with its other two vertices in candidate order.
pub fn feasible_triangles(rho: Radius) -> Vec<Triangle> {
    let cands = candidate_vertices(rho.doubled());
    let o = Site::ORIGIN;
    (0..cands.len())
        .into_par_iter()
        .flat_map_iter(|x| {
            let cands = &cands;
            (x + 1..cands.len()).filter_map(move |y| {
                let (u, v) = (cands[x], cands[y]);
                if u.dist2(o) < 3 || v.dist2(o) < 3 || u.dist2(v) < 3 {
                    return None;
                }
                let t = Triangle::new(o, u, v)?;
                (t.circumradius2 <= rho.squared && domination_feasible(&t)).then_some(t)
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectiveAreaAudit {
    pub rho: Radius,
    pub rho_f64: f64,
    pub candidates: usize,
    pub feasible: usize,
    pub regular: usize,
    pub defective: usize,
    /// Largest defective area divided by `sqrt(3)`.
    #[serde(serialize_with = "ser_ratio")]
    pub max_defective_area_over_sqrt3: Rational64,
    pub max_defective_area: f64,
    #[serde(serialize_with = "ser_ratio")]
    pub bound_over_sqrt3: Rational64,
    pub bound: f64,
    pub regular_area: f64,
    pub witness: Option<Triangle>,
    pub passed: bool,
}

/// Largest area over defective feasible triangles, compared exactly with `3·sqrt(3)/2`.
pub fn defective_area_audit(rho: Radius) -> DefectiveAreaAudit {
    let tris = feasible_triangles(rho);
    let regular = tris.iter().filter(|t| t.is_regular()).count();
    let witness = tris
        .iter()
        .filter(|t| !t.is_regular())
        .max_by_key(|t| (t.cross, std::cmp::Reverse(t.vertices)))
        .cloned();
    let max_cross = witness.as_ref().map_or(0, |t| t.cross);
    DefectiveAreaAudit {
        rho,
        rho_f64: rho.to_f64(),
        candidates: candidate_vertices(rho.doubled()).len(),
        feasible: tris.len(),
        regular,
        defective: tris.len() - regular,
        max_defective_area_over_sqrt3: Rational64::new(max_cross, 4),
        max_defective_area: max_cross as f64 * 3f64.sqrt() / 4.0,
        bound_over_sqrt3: Rational64::new(DEFECTIVE_CROSS_BOUND, 4),
        bound: 1.5 * 3f64.sqrt(),
        regular_area: 1.75 * 3f64.sqrt(),
        witness,
        passed: max_cross <= DEFECTIVE_CROSS_BOUND,
    }
}

/// Delaunay triangulation of the occupied sites of a torus configuration. Vertices are
/// lifted to the plane; the first vertex of every triangle is the canonical representative.
#[derive(Clone, Debug, Serialize)]
pub struct Triangulation {
    pub v1: usize,
    pub v2: usize,
    pub occupied: usize,
    pub triangles: Vec<Triangle>,
}

/// Squared reach of a Delaunay circle of a maximal configuration: every empty disk has
/// radius below `1 + 1/sqrt(3)`, so `4R² < 10`.
const REACH2: i64 = 9;

fn min_period_norm2(v1: i64, v2: i64) -> i64 {
    let mut best = i64::MAX;
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            if (a, b) != (0, 0) {
                best = best.min(norm2(a * v1, b * v2));
            }
        }
    }
    best
}

/// Delaunay triangulation of a maximal torus configuration. Co-circular vertex sets are
/// fanned from their lowest vertex in `(j, i)` order.
pub fn triangulate(omega: &Configuration) -> Result<Triangulation> {
    let Region::Torus { v1, v2 } = *omega.region() else {
        return Err(Error::InvalidArgument("triangulation is defined on tori".into()));
    };
    if !omega.is_maximal() {
        return Err(Error::NotMaximal("triangulation needs a maximal configuration".into()));
    }
    let region = omega.region();
    let reach = sites_within(REACH2);
    let key = |s: Site| (s.j, s.i);
    let cells: Vec<Vec<Site>> = omega
        .occupied_sites()
        .par_iter()
        .flat_map_iter(|&a| {
            let near: Vec<Site> =
                reach.iter().map(|d| a.offset((d.i, d.j))).filter(|&p| omega.is_occupied(region.canonical(p).unwrap())).collect();
            let mut found: BTreeSet<Vec<Site>> = BTreeSet::new();
            for x in 0..near.len() {
                for y in x + 1..near.len() {
                    let (b, c) = (near[x], near[y]);
                    let Some(t) = Triangle::new(a, b, c) else { continue };
                    if t.circumradius2 * 4 >= Rational64::from(REACH2 + 1) {
                        continue;
                    }
                    let mut on = vec![a];
                    let mut empty = true;
                    for &p in &near {
                        match in_circle(a, b, c, p) {
                            Ordering::Greater => {
                                empty = false;
                                break;
                            }
                            Ordering::Equal => on.push(p),
                            Ordering::Less => {}
                        }
                    }
                    if !empty || on.iter().any(|&p| key(p) < key(a)) {
                        continue;
                    }
                    on.sort_by(|&p, &q| {
                        if p == a {
                            return Ordering::Less;
                        }
                        if q == a {
                            return Ordering::Greater;
                        }
                        0.cmp(&orient(a, p, q))
                    });
                    found.insert(on);
                }
            }
            found.into_iter()
        })
        .collect();
    let mut triangles = Vec::new();
    for poly in cells {
        for k in 1..poly.len() - 1 {
            triangles.push(Triangle::new(poly[0], poly[k], poly[k + 1]).expect("cocircular points are not collinear"));
        }
    }
    triangles.sort_by_key(|t| t.vertices);
    if let Some(max_r2) = triangles.iter().map(|t| t.circumradius2).max() {
        if max_r2 * 4 >= Rational64::from(min_period_norm2(v1 as i64, v2 as i64)) {
            return Err(Error::Precondition(format!(
                "torus {v1}x{v2} is too small for circumradius sqrt({max_r2})"
            )));
        }
    }
    Ok(Triangulation { v1, v2, occupied: omega.count(), triangles })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangulationAudit {
    pub triangles: usize,
    pub occupied: usize,
    pub regular: usize,
    pub defective: usize,
    pub count_law: bool,
    /// Sum of lattice determinants against `2·v1·v2`.
    pub total_cross: i64,
    pub area_law: bool,
    pub edges_paired: bool,
    pub empty_circles: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub max_circumradius2: Rational64,
    /// Flag only: every circumradius is at most the given bound.
    pub within_rho: bool,
}

impl TriangulationAudit {
    pub fn passed(&self) -> bool {
        self.count_law && self.area_law && self.edges_paired && self.empty_circles
    }
}

impl Triangulation {
    pub fn regular_count(&self) -> usize {
        self.triangles.iter().filter(|t| t.is_regular()).count()
    }

    pub fn defective(&self) -> impl Iterator<Item = &Triangle> {
        self.triangles.iter().filter(|t| !t.is_regular())
    }

    pub fn total_cross(&self) -> i64 {
        self.triangles.iter().map(|t| t.cross).sum()
    }

    fn edges_paired(&self, region: &Region) -> bool {
        let mut edges: BTreeMap<(Site, (i64, i64)), usize> = BTreeMap::new();
        for t in &self.triangles {
            let [a, b, c] = t.vertices;
            for (p, q) in [(a, b), (b, c), (c, a)] {
                let (p, q) = if (q.j - p.j, q.i - p.i) > (0, 0) { (p, q) } else { (q, p) };
                let base = region.canonical(p).expect("torus site");
                *edges.entry((base, (q.i - p.i, q.j - p.j))).or_default() += 1;
            }
        }
        edges.values().all(|&n| n == 2)
    }

    /// Checks the count, area, edge-pairing and empty-circle invariants against `omega`.
    pub fn audit(&self, omega: &Configuration, rho: Radius) -> TriangulationAudit {
        let region = omega.region();
        let reach = sites_within(REACH2 + 1);
        let empty_circles = self.triangles.par_iter().all(|t| {
            let a = t.vertices[0];
            reach
                .iter()
                .map(|d| a.offset((d.i, d.j)))
                .all(|p| !omega.is_occupied(region.canonical(p).unwrap()) || !t.strictly_inside(p))
        });
        let total_cross = self.total_cross();
        let max_circumradius2 = self.triangles.iter().map(|t| t.circumradius2).max().unwrap_or_default();
        TriangulationAudit {
            triangles: self.triangles.len(),
            occupied: self.occupied,
            regular: self.regular_count(),
            defective: self.triangles.len() - self.regular_count(),
            count_law: self.triangles.len() == 2 * self.occupied,
            total_cross,
            area_law: total_cross == 2 * (self.v1 * self.v2) as i64,
            edges_paired: self.edges_paired(region),
            empty_circles,
            max_circumradius2,
            within_rho: max_circumradius2 <= rho.squared && !max_circumradius2.is_negative(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangulationSweepRow {
    pub side: usize,
    pub trials: usize,
    pub count_law_failures: usize,
    pub area_law_failures: usize,
    pub edge_failures: usize,
    pub empty_circle_failures: usize,
    /// Triangulations with some circumradius above `rho` (reported, not a failure).
    pub beyond_rho: usize,
    pub defective_triangles: usize,
}

impl TriangulationSweepRow {
    pub fn violations(&self) -> usize {
        self.count_law_failures + self.area_law_failures + self.edge_failures + self.empty_circle_failures
    }
}

/// Audits the triangulations of `trials` random greedy MISs on each square torus side,
/// one ChaCha8 stream per trial.
pub fn random_triangulation_audit(sides: &[usize], trials: usize, seed: u64, rho: Radius) -> Result<Vec<TriangulationSweepRow>> {
    use rand::SeedableRng;
    sides
        .iter()
        .map(|&side| {
            let audits: Vec<TriangulationAudit> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let stream = (side as u64) << 32 | t as u64;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                    let w = crate::configspace::random_maximal(&Region::torus(side, side), &mut rng)?;
                    Ok(triangulate(&w)?.audit(&w, rho))
                })
                .collect::<Result<_>>()?;
            Ok(TriangulationSweepRow {
                side,
                trials,
                count_law_failures: audits.iter().filter(|a| !a.count_law).count(),
                area_law_failures: audits.iter().filter(|a| !a.area_law).count(),
                edge_failures: audits.iter().filter(|a| !a.edges_paired).count(),
                empty_circle_failures: audits.iter().filter(|a| !a.empty_circles).count(),
                beyond_rho: audits.iter().filter(|a| !a.within_rho).count(),
                defective_triangles: audits.iter().map(|a| a.defective).sum(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::random_maximal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn candidate_shells() {
        let c = candidate_vertices(Radius::rho().doubled());
        assert_eq!(c.len(), 36);
        let mut mult = BTreeMap::new();
        for s in &c {
            *mult.entry(norm2(s.i, s.j)).or_insert(0) += 1;
        }
        assert_eq!(mult.into_iter().collect::<Vec<_>>(), vec![(1, 6), (3, 6), (4, 6), (7, 12), (9, 6)]);
        assert_eq!(candidate_vertices("1.01".parse().unwrap()).len(), 6);
        for s in &c {
            // rotation by 60 degrees and the (i, j) <-> (j, i) mirror
            assert!(c.contains(&Site::new(-s.j, s.i + s.j)));
            assert!(c.contains(&Site::new(s.j, s.i)));
        }
    }

    #[test]
    fn in_circle_signs() {
        let (a, b, c) = (Site::new(0, 0), Site::new(1, 2), Site::new(-2, 3));
        assert_eq!(in_circle(a, b, c, Site::new(0, 1)), Ordering::Greater);
        assert_eq!(in_circle(a, c, b, Site::new(0, 1)), Ordering::Greater);
        assert_eq!(in_circle(a, b, c, Site::new(3, 3)), Ordering::Less);
        // the unit hexagon is cocircular with its centre's opposite vertices
        let h = Site::ORIGIN.neighbors();
        assert_eq!(in_circle(h[0], h[2], h[4], h[1]), Ordering::Equal);
    }

    #[test]
    fn regular_triangle_is_feasible() {
        let t = Triangle::new(Site::ORIGIN, Site::new(1, 2), Site::new(-2, 3)).unwrap();
        assert!(t.is_regular());
        assert_eq!(t.circumradius2, Rational64::new(7, 3));
        assert_eq!(t.cross, REGULAR_CROSS);
        let tris = feasible_triangles(Radius::rho());
        assert!(tris.iter().any(|u| u.is_regular() && u.circumradius2 == Rational64::new(7, 3)));
        assert!(tris.iter().any(|u| !u.is_regular()));
        assert!(tris.iter().all(|u| u.sides2.iter().all(|&s| s >= 3)));
    }

    #[test]
    fn defective_area_bound() {
        for rho in [Radius::rho(), Radius::rho_covering()] {
            let a = defective_area_audit(rho);
            assert!(a.passed, "{a:?}");
            assert_eq!(a.candidates, 36);
            assert_eq!(a.max_defective_area_over_sqrt3, Rational64::new(3, 2));
            assert_eq!(a.witness.unwrap().cross, DEFECTIVE_CROSS_BOUND);
        }
    }

    #[test]
    fn radius_parsing() {
        assert_eq!("sqrt(7/3)".parse::<Radius>().unwrap(), Radius::rho());
        assert_eq!("1.578".parse::<Radius>().unwrap(), Radius::rho_covering());
        assert!("0".parse::<Radius>().is_err());
        assert!("abc".parse::<Radius>().is_err());
    }

    #[test]
    fn dense_ground_state_triangulation() {
        let r = Region::torus(3, 3);
        let w = Configuration::from_occupied(r.clone(), r.sites().into_iter().filter(|s| s.color().index() == 0)).unwrap();
        let t = triangulate(&w).unwrap();
        assert_eq!(t.triangles.len(), 6);
        assert!(t.triangles.iter().all(|x| x.sides2 == [3, 3, 3] && !x.is_regular()));
        assert!(t.audit(&w, Radius::rho()).passed());
    }

    #[test]
    fn random_triangulations_obey_count_and_area_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for size in [7, 9, 14] {
            for _ in 0..10 {
                let w = random_maximal(&Region::torus(size, size), &mut rng).unwrap();
                let t = triangulate(&w).unwrap();
                let a = t.audit(&w, Radius::rho());
                assert!(a.passed(), "{a:?}\n{}", w.to_grid());
            }
        }
    }

    #[test]
    fn seeded_sweep_is_reproducible() {
        let a = random_triangulation_audit(&[7], 5, 9, Radius::rho()).unwrap();
        assert_eq!(a, random_triangulation_audit(&[7], 5, 9, Radius::rho()).unwrap());
        assert_eq!(a[0].violations(), 0);
    }

    #[test]
    fn rejects_non_tori_and_non_maximal() {
        let r = Region::torus(7, 7);
        assert!(matches!(triangulate(&Configuration::empty(r)), Err(Error::NotMaximal(_))));
        assert!(matches!(triangulate(&Configuration::empty(Region::square(3))), Err(Error::InvalidArgument(_))));
    }
}
