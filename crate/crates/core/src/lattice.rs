//! Geometry of the triangular lattice.
//!
//! Sites are written in the basis `b1 = (1, 0)`, `b2 = (1/2, sqrt(3)/2)`. The six
//! nearest neighbours of `(i, j)` are `(i±1, j)`, `(i, j±1)`, `(i+1, j-1)` and
//! `(i-1, j+1)`. Squared Euclidean distances are the integer quadratic form
//! `d1² + d1·d2 + d2²`, which is what every exact predicate in this crate uses.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Offsets of the six nearest neighbours, in counter-clockwise order starting east.
pub const NEIGHBOR_OFFSETS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Shift by `b2 - b1`.
pub const NORTH_WEST: (i64, i64) = (-1, 1);
/// Shift by `b2`.
pub const NORTH_EAST: (i64, i64) = (0, 1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: i64,
    pub j: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { i: 0, j: 0 };

    pub const fn new(i: i64, j: i64) -> Self {
        Site { i, j }
    }

    pub fn offset(self, (di, dj): (i64, i64)) -> Site {
        Site::new(self.i + di, self.j + dj)
    }

    pub fn neighbors(self) -> [Site; 6] {
        NEIGHBOR_OFFSETS.map(|d| self.offset(d))
    }

    pub fn is_adjacent(self, other: Site) -> bool {
        norm2(other.i - self.i, other.j - self.j) == 1
    }

    pub fn color(self) -> Color {
        color(self)
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist2(self, other: Site) -> i64 {
        norm2(other.i - self.i, other.j - self.j)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Squared Euclidean length of the lattice vector `d1·b1 + d2·b2`.
pub fn norm2(d1: i64, d2: i64) -> i64 {
    d1 * d1 + d1 * d2 + d2 * d2
}

/// The three sublattice classes. Convention: class `(i - j) mod 3`, with
/// 0 = blue, 1 = red, 2 = green.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
    Green,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Blue, Color::Red, Color::Green];

    pub fn index(self) -> u8 {
        match self {
            Color::Blue => 0,
            Color::Red => 1,
            Color::Green => 2,
        }
    }

    pub fn from_index(k: i64) -> Color {
        match k.rem_euclid(3) {
            0 => Color::Blue,
            1 => Color::Red,
            _ => Color::Green,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Red => "red",
            Color::Green => "green",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Color {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blue" | "b" => Ok(Color::Blue),
            "red" | "r" => Ok(Color::Red),
            "green" | "g" => Ok(Color::Green),
            _ => Err(format!("unknown color `{s}`")),
        }
    }
}

pub fn color(s: Site) -> Color {
    Color::from_index(s.i - s.j)
}

/// Euclidean embedding `i·b1 + j·b2`.
pub fn embed(s: Site) -> (f64, f64) {
    let (i, j) = (s.i as f64, s.j as f64);
    (i + 0.5 * j, j * 3f64.sqrt() / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// A triangular face. Up-faces have vertices `(i,j),(i+1,j),(i,j+1)`;
/// down-faces have `(i+1,j),(i,j+1),(i+1,j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub anchor: Site,
    pub orientation: Orientation,
}

impl Face {
    pub const fn up(i: i64, j: i64) -> Face {
        Face { anchor: Site::new(i, j), orientation: Orientation::Up }
    }

    pub const fn down(i: i64, j: i64) -> Face {
        Face { anchor: Site::new(i, j), orientation: Orientation::Down }
    }

    pub fn vertices(self) -> [Site; 3] {
        let Site { i, j } = self.anchor;
        match self.orientation {
            Orientation::Up => [Site::new(i, j), Site::new(i + 1, j), Site::new(i, j + 1)],
            Orientation::Down => [Site::new(i + 1, j), Site::new(i, j + 1), Site::new(i + 1, j + 1)],
        }
    }

    pub fn translate(self, d: (i64, i64)) -> Face {
        Face { anchor: self.anchor.offset(d), orientation: self.orientation }
    }

    /// The three faces sharing an edge with this one.
    pub fn edge_neighbors(self) -> [Face; 3] {
        let Site { i, j } = self.anchor;
        match self.orientation {
            Orientation::Up => [Face::down(i, j), Face::down(i - 1, j), Face::down(i, j - 1)],
            Orientation::Down => [Face::up(i, j), Face::up(i + 1, j), Face::up(i, j + 1)],
        }
    }

    /// The three faces meeting this one at a single vertex from the opposite side.
    pub fn point_neighbors(self) -> [Face; 3] {
        let Site { i, j } = self.anchor;
        match self.orientation {
            Orientation::Up => [Face::down(i - 1, j - 1), Face::down(i + 1, j - 1), Face::down(i - 1, j + 1)],
            Orientation::Down => [Face::up(i + 1, j + 1), Face::up(i - 1, j + 1), Face::up(i + 1, j - 1)],
        }
    }

    /// Edge- and point-connected faces (the six neighbours in the face connectivity graph).
    pub fn connected(self) -> [Face; 6] {
        let e = self.edge_neighbors();
        let p = self.point_neighbors();
        [e[0], e[1], e[2], p[0], p[1], p[2]]
    }

    /// All twelve faces that share at least one vertex with this one.
    pub fn adjacent(self) -> Vec<Face> {
        let mut out = Vec::with_capacity(12);
        for v in self.vertices() {
            for f in faces_around(v) {
                if f != self && !out.contains(&f) {
                    out.push(f);
                }
            }
        }
        out
    }

    pub fn has_vertex(self, s: Site) -> bool {
        self.vertices().contains(&s)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.orientation {
            Orientation::Up => "up",
            Orientation::Down => "down",
        };
        write!(f, "{o}@{}", self.anchor)
    }
}

/// The six faces incident to a site.
pub fn faces_around(s: Site) -> [Face; 6] {
    let Site { i, j } = s;
    [
        Face::up(i, j),
        Face::up(i - 1, j),
        Face::up(i, j - 1),
        Face::down(i - 1, j - 1),
        Face::down(i, j - 1),
        Face::down(i - 1, j),
    ]
}

/// A finite piece of the lattice, or a torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// `{1..n} × {1..m}`.
    Rhombus { n: usize, m: usize },
    /// `{-half..half}²`.
    CenteredBox { half: usize },
    /// `Z/v1 × Z/v2` with wrapped adjacency.
    Torus { v1: usize, v2: usize },
    /// Arbitrary finite set, kept sorted by `(j, i)`.
    Sites { sites: Vec<Site> },
}

impl Region {
    pub fn rhombus(n: usize, m: usize) -> Region {
        Region::Rhombus { n, m }
    }

    pub fn square(n: usize) -> Region {
        Region::Rhombus { n, m: n }
    }

    pub fn centered(half: usize) -> Region {
        Region::CenteredBox { half }
    }

    pub fn torus(v1: usize, v2: usize) -> Region {
        Region::Torus { v1, v2 }
    }

    pub fn from_sites<I: IntoIterator<Item = Site>>(sites: I) -> Region {
        let mut v: Vec<Site> = sites.into_iter().collect();
        v.sort_by_key(|s| (s.j, s.i));
        v.dedup();
        Region::Sites { sites: v }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Region::Torus { .. })
    }

    /// Inclusive coordinate bounds `(i_lo, i_hi, j_lo, j_hi)` of a parallelogram region.
    pub fn parallelogram(&self) -> Option<(i64, i64, i64, i64)> {
        match *self {
            Region::Rhombus { n, m } => Some((1, n as i64, 1, m as i64)),
            Region::CenteredBox { half } => {
                let h = half as i64;
                Some((-h, h, -h, h))
            }
            Region::Torus { v1, v2 } => Some((0, v1 as i64 - 1, 0, v2 as i64 - 1)),
            Region::Sites { .. } => None,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Region::Rhombus { n, m } => n * m,
            Region::CenteredBox { half } => (2 * half + 1).pow(2),
            Region::Torus { v1, v2 } => v1 * v2,
            Region::Sites { sites } => sites.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reduces a site to its canonical representative (torus) or checks membership.
    pub fn canonical(&self, s: Site) -> Option<Site> {
        match self {
            Region::Torus { v1, v2 } => {
                if *v1 == 0 || *v2 == 0 {
                    return None;
                }
                Some(Site::new(s.i.rem_euclid(*v1 as i64), s.j.rem_euclid(*v2 as i64)))
            }
            _ => self.contains(s).then_some(s),
        }
    }

    pub fn contains(&self, s: Site) -> bool {
        match self {
            Region::Torus { v1, v2 } => *v1 > 0 && *v2 > 0,
            Region::Sites { sites } => sites.binary_search_by_key(&(s.j, s.i), |t| (t.j, t.i)).is_ok(),
            _ => {
                let (i0, i1, j0, j1) = self.parallelogram().expect("parallelogram");
                (i0..=i1).contains(&s.i) && (j0..=j1).contains(&s.j)
            }
        }
    }

    /// Position of a site in [`Region::sites`] order (row-major: `j` outer, `i` inner).
    pub fn index_of(&self, s: Site) -> Option<usize> {
        match self {
            Region::Sites { sites } => sites.binary_search_by_key(&(s.j, s.i), |t| (t.j, t.i)).ok(),
            _ => {
                let c = self.canonical(s)?;
                let (i0, i1, j0, _) = self.parallelogram()?;
                let w = (i1 - i0 + 1) as usize;
                Some((c.j - j0) as usize * w + (c.i - i0) as usize)
            }
        }
    }

    pub fn site_at(&self, k: usize) -> Site {
        match self {
            Region::Sites { sites } => sites[k],
            _ => {
                let (i0, i1, j0, _) = self.parallelogram().expect("parallelogram");
                let w = (i1 - i0 + 1) as usize;
                Site::new(i0 + (k % w) as i64, j0 + (k / w) as i64)
            }
        }
    }

    pub fn sites(&self) -> Vec<Site> {
        (0..self.len()).map(|k| self.site_at(k)).collect()
    }

    /// Neighbours of `s` inside the region (wrapped and deduplicated on a torus).
    pub fn neighbors(&self, s: Site) -> Vec<Site> {
        let mut out: Vec<Site> = s.neighbors().into_iter().filter_map(|t| self.canonical(t)).collect();
        if self.is_torus() {
            out.sort();
            out.dedup();
        }
        out
    }

    /// All faces whose three vertices lie in the region; on a torus, one face per
    /// orientation per fundamental cell.
    pub fn faces(&self) -> Vec<Face> {
        match self {
            Region::Torus { .. } => {
                let mut out = Vec::with_capacity(2 * self.len());
                for s in self.sites() {
                    out.push(Face::up(s.i, s.j));
                    out.push(Face::down(s.i, s.j));
                }
                out
            }
            _ => {
                let mut out = Vec::new();
                for s in self.sites() {
                    for f in [Face::up(s.i, s.j), Face::down(s.i, s.j)] {
                        if f.vertices().iter().all(|&v| self.contains(v)) {
                            out.push(f);
                        }
                    }
                }
                out
            }
        }
    }

    /// Canonical representative of a face on a torus (anchor reduced).
    pub fn canonical_face(&self, f: Face) -> Face {
        match self.canonical(f.anchor) {
            Some(a) if self.is_torus() => Face { anchor: a, orientation: f.orientation },
            _ => f,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Rhombus { n, m } => write!(f, "rhombus {n} {m}"),
            Region::CenteredBox { half } => write!(f, "box {half}"),
            Region::Torus { v1, v2 } => write!(f, "torus {v1} {v2}"),
            Region::Sites { sites } => write!(f, "set of {} sites", sites.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn origin_neighbors() {
        let mut got: Vec<Site> = Site::ORIGIN.neighbors().to_vec();
        got.sort();
        let mut want = vec![
            Site::new(1, 0),
            Site::new(-1, 0),
            Site::new(0, 1),
            Site::new(0, -1),
            Site::new(1, -1),
            Site::new(-1, 1),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(got.iter().all(|&t| t.dist2(Site::ORIGIN) == 1));
    }

    #[test]
    fn torus_neighbors() {
        let t = Region::torus(3, 3);
        for s in t.sites() {
            assert_eq!(t.neighbors(s).len(), 6);
        }
        assert!(t.neighbors(Site::new(2, 0)).contains(&Site::new(0, 0)));
        let t7 = Region::torus(7, 5);
        assert!(t7.sites().iter().all(|&s| t7.neighbors(s).len() == 6));
    }

    #[test]
    fn boundary_sites_have_fewer_neighbors() {
        let r = Region::rhombus(3, 3);
        assert_eq!(r.neighbors(Site::new(1, 1)).len(), 2);
        assert_eq!(r.neighbors(Site::new(2, 2)).len(), 6);
        assert_eq!(r.neighbors(Site::new(3, 1)).len(), 3);
    }

    #[test]
    fn coloring_is_proper_and_periodic() {
        assert_eq!(color(Site::ORIGIN), Color::Blue);
        for i in -6..6 {
            for j in -6..6 {
                let s = Site::new(i, j);
                for t in s.neighbors() {
                    assert_ne!(color(s), color(t));
                }
                assert_eq!(color(s), color(s.offset((1, 1))));
                assert_eq!(color(s), color(s.offset((-1, 2))));
            }
        }
    }

    #[test]
    fn faces_carry_all_three_colors() {
        for i in 0..3 {
            for j in 0..3 {
                for f in [Face::up(i, j), Face::down(i, j)] {
                    let mut cs: Vec<Color> = f.vertices().iter().map(|&v| color(v)).collect();
                    cs.sort();
                    assert_eq!(cs, vec![Color::Blue, Color::Red, Color::Green]);
                }
            }
        }
    }

    #[test]
    fn embedding() {
        assert_eq!(embed(Site::new(1, 0)), (1.0, 0.0));
        let (x, y) = embed(Site::new(0, 1));
        assert_eq!(x, 0.5);
        assert!((y - 0.866_025_403_784_438_6).abs() < 1e-15);
        let pairs = [((0, 0), (3, -1)), ((2, 5), (-1, 1)), ((-4, 2), (1, 1)), ((7, -3), (0, 0)), ((1, 1), (1, -2))];
        for ((a, b), (c, d)) in pairs {
            let (s, t) = (Site::new(a, b), Site::new(c, d));
            let (x1, y1) = embed(s);
            let (x2, y2) = embed(t);
            let e = (x1 - x2).powi(2) + (y1 - y2).powi(2);
            assert!((e - s.dist2(t) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn face_counts() {
        assert_eq!(Region::torus(4, 5).faces().len(), 40);
        assert_eq!(Face::up(0, 0).vertices(), [Site::new(0, 0), Site::new(1, 0), Site::new(0, 1)]);
        let f2 = Region::square(2).faces();
        assert_eq!(f2, vec![Face::up(1, 1), Face::down(1, 1)]);
    }

    #[test]
    fn every_edge_borders_two_faces_on_torus() {
        let t = Region::torus(4, 4);
        let mut edges: HashMap<(Site, Site), usize> = HashMap::new();
        for f in t.faces() {
            let v = f.vertices().map(|s| t.canonical(s).unwrap());
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                let key = if v[a] < v[b] { (v[a], v[b]) } else { (v[b], v[a]) };
                *edges.entry(key).or_default() += 1;
            }
        }
        assert_eq!(edges.len(), 3 * 16);
        assert!(edges.values().all(|&c| c == 2));
    }

    #[test]
    fn face_connectivity_shape() {
        let f = Face::up(0, 0);
        assert_eq!(f.adjacent().len(), 12);
        for g in f.edge_neighbors() {
            let shared = f.vertices().iter().filter(|v| g.has_vertex(**v)).count();
            assert_eq!(shared, 2);
            assert!(g.edge_neighbors().contains(&f));
        }
        for g in f.point_neighbors() {
            let shared = f.vertices().iter().filter(|v| g.has_vertex(**v)).count();
            assert_eq!(shared, 1);
            assert!(g.point_neighbors().contains(&f));
        }
        let d = Face::down(3, -2);
        assert_eq!(d.adjacent().len(), 12);
        for g in d.connected() {
            assert!(g.connected().contains(&d));
            assert_ne!(g.orientation, d.orientation);
        }
    }

    #[test]
    fn region_indexing_round_trips() {
        for r in [Region::rhombus(3, 4), Region::centered(2), Region::torus(5, 3), Region::from_sites([Site::new(4, 1), Site::new(-2, 0), Site::new(0, 0)])] {
            for (k, s) in r.sites().into_iter().enumerate() {
                assert_eq!(r.index_of(s), Some(k));
            }
        }
        assert_eq!(Region::torus(5, 3).index_of(Site::new(-1, 4)), Some(4 + 5));
    }
}
