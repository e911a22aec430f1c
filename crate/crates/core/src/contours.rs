//! Empty faces, contours and the contour-elimination map.
//!
//! Faces are vertices of the 6-regular connectivity graph (edge neighbours plus
//! the three faces meeting at a single vertex from the opposite side). A contour
//! is a connected component of empty faces touching the box; its exterior is
//! found by an edge-connected flood fill from far outside.

use crate::configspace::{Configuration, MisProblem};
use crate::error::{Error, Result};
use crate::gibbs::{admissible, enumerate_admissible, random_admissible, BoundaryCondition};
use crate::lattice::{faces_around, Color, Face, Orientation, Region, Site, NORTH_EAST, NORTH_WEST};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

/// Largest contour size `count_contour_graphs` accepts.
pub const MAX_CONTOUR_GRAPH_SIZE: usize = 14;

/// Enumeration budget for `count_contour_graphs`.
pub const CONTOUR_GRAPH_BUDGET: u64 = 2_000_000_000;

/// Faces of a region none of whose vertices are occupied (faces of the region as in
/// [`Region::faces`]).
pub fn empty_faces(omega: &Configuration) -> Vec<Face> {
    let r = omega.region();
    r.faces()
        .into_iter()
        .filter(|f| f.vertices().iter().all(|&v| r.canonical(v).is_some_and(|c| !omega.is_occupied(c))))
        .collect()
}

/// Box configuration seen together with its boundary.
struct Scene<'a> {
    eta: &'a Configuration,
    b: &'a BoundaryCondition,
}

impl Scene<'_> {
    fn occ(&self, s: Site) -> Result<bool> {
        if self.eta.region().contains(s) {
            Ok(self.eta.is_occupied(s))
        } else {
            self.b.occupied(s)
        }
    }

    /// Color of the face's occupied vertex, `None` for an empty face.
    fn face_color(&self, f: Face) -> Result<Option<Color>> {
        for v in f.vertices() {
            if self.occ(v)? {
                return Ok(Some(v.color()));
            }
        }
        Ok(None)
    }

    fn touching_faces(&self) -> BTreeSet<Face> {
        self.eta.region().sites().into_iter().flat_map(faces_around).collect()
    }

    fn empty_faces(&self) -> Result<BTreeSet<Face>> {
        let mut out = BTreeSet::new();
        for f in self.touching_faces() {
            if self.face_color(f)?.is_none() {
                out.insert(f);
            }
        }
        Ok(out)
    }
}

/// Empty faces with at least one vertex in the box, the boundary supplying the rest.
pub fn empty_faces_in_box(eta: &Configuration, b: &BoundaryCondition) -> Result<Vec<Face>> {
    Ok(Scene { eta, b }.empty_faces()?.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Island {
    pub faces: Vec<Face>,
    /// Color of the hexagons edge-adjacent to the contour, if they agree.
    pub wall_color: Option<Color>,
    /// Occupied sites whose hexagons lie in the island.
    pub sites: Vec<Site>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contour {
    pub faces: Vec<Face>,
    /// Color shared by the exterior faces connected to the contour, if they agree.
    pub exterior_color: Option<Color>,
    /// Every color seen among exterior faces connected to the contour.
    pub exterior_colors: Vec<Color>,
    pub interior: Vec<Face>,
    pub islands: Vec<Island>,
}

impl Contour {
    pub fn size(&self) -> usize {
        self.faces.len()
    }

    /// Whether every face of the contour and of its interior has all vertices in `region`.
    pub fn is_strictly_inside(&self, region: &Region) -> bool {
        self.faces.iter().chain(&self.interior).all(|f| f.vertices().iter().all(|&v| region.contains(v)))
    }
}

fn box_window(region: &Region) -> Result<(i64, i64, i64, i64)> {
    match region {
        Region::Rhombus { .. } | Region::CenteredBox { .. } => Ok(region.parallelogram().expect("parallelogram")),
        _ => Err(Error::InvalidArgument(format!("contours need a rhombus or centered box, got {region}"))),
    }
}

/// Exterior and interior of a face set, relative to a window three layers beyond the box.
fn exterior_interior(region: &Region, gamma: &BTreeSet<Face>) -> Result<(HashSet<Face>, BTreeSet<Face>)> {
    let (i0, i1, j0, j1) = box_window(region)?;
    let m = 3;
    let in_window = |f: Face| {
        f.anchor.i >= i0 - m && f.anchor.i <= i1 + m && f.anchor.j >= j0 - m && f.anchor.j <= j1 + m
    };
    let mut window = Vec::new();
    for j in j0 - m..=j1 + m {
        for i in i0 - m..=i1 + m {
            window.push(Face::up(i, j));
            window.push(Face::down(i, j));
        }
    }
    let mut exterior: HashSet<Face> = HashSet::new();
    let mut queue = VecDeque::new();
    for &f in &window {
        if !gamma.contains(&f) && f.edge_neighbors().iter().any(|&g| !in_window(g)) && exterior.insert(f) {
            queue.push_back(f);
        }
    }
    while let Some(f) = queue.pop_front() {
        for g in f.edge_neighbors() {
            if in_window(g) && !gamma.contains(&g) && exterior.insert(g) {
                queue.push_back(g);
            }
        }
    }
    let interior = window.into_iter().filter(|f| !gamma.contains(f) && !exterior.contains(f)).collect();
    Ok((exterior, interior))
}

fn components<F: Fn(Face) -> Vec<Face>>(faces: &BTreeSet<Face>, next: F) -> Vec<Vec<Face>> {
    let mut seen: HashSet<Face> = HashSet::new();
    let mut out = Vec::new();
    for &f in faces {
        if !seen.insert(f) {
            continue;
        }
        let mut comp = vec![f];
        let mut stack = vec![f];
        while let Some(x) = stack.pop() {
            for y in next(x) {
                if faces.contains(&y) && seen.insert(y) {
                    comp.push(y);
                    stack.push(y);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

fn build_contour(scene: &Scene, faces: Vec<Face>) -> Result<Contour> {
    let region = scene.eta.region();
    let gamma: BTreeSet<Face> = faces.iter().copied().collect();
    let (exterior, interior) = exterior_interior(region, &gamma)?;
    let mut ext_colors = BTreeSet::new();
    for f in &faces {
        for g in f.connected() {
            if exterior.contains(&g) {
                if let Some(c) = scene.face_color(g)? {
                    ext_colors.insert(c);
                }
            }
        }
    }
    let exterior_colors: Vec<Color> = ext_colors.into_iter().collect();
    let exterior_color = if exterior_colors.len() == 1 { Some(exterior_colors[0]) } else { None };

    let occupied = scene.eta.occupied_sites();
    let mut islands = Vec::new();
    for comp in components(&interior, |f| f.edge_neighbors().to_vec()) {
        let set: BTreeSet<Face> = comp.iter().copied().collect();
        let mut walls = BTreeSet::new();
        for f in &comp {
            if f.edge_neighbors().iter().any(|g| gamma.contains(g)) {
                if let Some(c) = scene.face_color(*f)? {
                    walls.insert(c);
                }
            }
        }
        let wall_color = if walls.len() == 1 { walls.into_iter().next() } else { None };
        let sites = occupied.iter().copied().filter(|&s| faces_around(s).iter().all(|f| set.contains(f))).collect();
        islands.push(Island { faces: comp, wall_color, sites });
    }
    Ok(Contour { faces, exterior_color, exterior_colors, interior: interior.into_iter().collect(), islands })
}

/// Connected components of empty faces touching the box, with exterior color,
/// interior and island decomposition.
pub fn extract_contours(eta: &Configuration, b: &BoundaryCondition) -> Result<Vec<Contour>> {
    box_window(eta.region())?;
    let scene = Scene { eta, b };
    let empty = scene.empty_faces()?;
    components(&empty, |f| f.connected().to_vec())
        .into_iter()
        .map(|faces| build_contour(&scene, faces))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaceSetAudit {
    pub size: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub bipartite: bool,
    pub planar: bool,
    pub violations: Vec<String>,
}

impl FaceSetAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Degree, bipartiteness and crossing checks on a face set viewed as a subgraph of
/// the connectivity graph.
pub fn audit_face_set(faces: &[Face]) -> FaceSetAudit {
    let set: BTreeSet<Face> = faces.iter().copied().collect();
    let mut a = FaceSetAudit { size: set.len(), min_degree: usize::MAX, bipartite: true, planar: true, ..Default::default() };
    for &f in &set {
        let nb: Vec<Face> = f.connected().into_iter().filter(|g| set.contains(g)).collect();
        let d = nb.len();
        a.min_degree = a.min_degree.min(d);
        a.max_degree = a.max_degree.max(d);
        if !(2..=4).contains(&d) {
            a.violations.push(format!("{f} has degree {d}"));
        }
        if nb.iter().any(|g| g.orientation == f.orientation) {
            a.bipartite = false;
            a.violations.push(format!("{f} is connected to a face of the same orientation"));
        }
    }
    if set.is_empty() {
        a.min_degree = 0;
    }
    // point-connected pairs are opposite faces around a shared vertex
    let mut vertices: BTreeSet<Site> = BTreeSet::new();
    for f in &set {
        vertices.extend(f.vertices());
    }
    for v in vertices {
        let ring = ring_order(v, faces_around(v));
        let pairs = (0..3).filter(|&k| set.contains(&ring[k]) && set.contains(&ring[k + 3])).count();
        if pairs >= 2 {
            a.planar = false;
            a.violations.push(format!("{pairs} point-connected pairs cross at {v}"));
        }
    }
    a
}

/// The six faces around `v` in angular order.
fn ring_order(v: Site, faces: [Face; 6]) -> [Face; 6] {
    let mut with_angle: Vec<(f64, Face)> = faces
        .iter()
        .map(|f| {
            let c = f.vertices().iter().fold((0.0, 0.0), |acc, s| {
                let (x, y) = crate::lattice::embed(*s);
                (acc.0 + x, acc.1 + y)
            });
            let (vx, vy) = crate::lattice::embed(v);
            ((c.1 / 3.0 - vy).atan2(c.0 / 3.0 - vx), *f)
        })
        .collect();
    with_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = faces;
    for (k, (_, f)) in with_angle.into_iter().enumerate() {
        out[k] = f;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContourAudit {
    pub graph: FaceSetAudit,
    pub size_divisible_by_six: bool,
    pub exterior_monochromatic: bool,
    pub islands_monochromatic: bool,
}

impl ContourAudit {
    pub fn passed(&self) -> bool {
        self.graph.passed() && self.size_divisible_by_six && self.exterior_monochromatic && self.islands_monochromatic
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = self.graph.violations.clone();
        if !self.size_divisible_by_six {
            v.push(format!("size {} is not divisible by 6", self.graph.size));
        }
        if !self.exterior_monochromatic {
            v.push("exterior faces connected to the contour have several colors".into());
        }
        if !self.islands_monochromatic {
            v.push("an island wall has several colors".into());
        }
        v
    }
}

pub fn audit_contour(gamma: &Contour) -> ContourAudit {
    ContourAudit {
        graph: audit_face_set(&gamma.faces),
        size_divisible_by_six: gamma.size().is_multiple_of(6),
        exterior_monochromatic: gamma.exterior_color.is_some(),
        islands_monochromatic: gamma.islands.iter().all(|i| i.wall_color.is_some()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourReport {
    pub size: usize,
    pub exterior_color: Option<Color>,
    pub interior_size: usize,
    pub islands: Vec<IslandReport>,
    pub faces: Vec<Face>,
    pub audit: ContourAudit,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IslandReport {
    pub wall_color: Option<Color>,
    pub faces: usize,
    pub sites: usize,
}

impl ContourReport {
    pub fn new(gamma: &Contour) -> Self {
        let audit = audit_contour(gamma);
        ContourReport {
            size: gamma.size(),
            exterior_color: gamma.exterior_color,
            interior_size: gamma.interior.len(),
            islands: gamma
                .islands
                .iter()
                .map(|i| IslandReport { wall_color: i.wall_color, faces: i.faces.len(), sites: i.sites.len() })
                .collect(),
            faces: gamma.faces.clone(),
            passed: audit.passed(),
            audit,
        }
    }
}

/// Shift that carries an island with wall color `wall` onto color `target`.
pub fn island_shift(target: Color, wall: Color) -> (i64, i64) {
    match (wall.index() as i64 - target.index() as i64).rem_euclid(3) {
        0 => (0, 0),
        2 => NORTH_WEST,
        _ => NORTH_EAST,
    }
}

/// The map ψ: shift islands onto the contour's color, then fill the freed area with
/// sites of that color in row-major order. The contour may touch the collar as long
/// as every moved site stays in the box.
pub fn eliminate_contour(eta: &Configuration, b: &BoundaryCondition, gamma: &Contour) -> Result<Configuration> {
    let region = eta.region();
    let color = gamma.exterior_color.ok_or_else(|| Error::Precondition("contour exterior is not monochromatic".into()))?;
    let mut moved_from = Vec::new();
    let mut moved_to = Vec::new();
    for island in &gamma.islands {
        let wall = island.wall_color.ok_or_else(|| Error::Precondition("island wall is not monochromatic".into()))?;
        let d = island_shift(color, wall);
        if d == (0, 0) {
            continue;
        }
        for &s in &island.sites {
            moved_from.push(s);
            moved_to.push(s.offset(d));
        }
    }
    let mut bits = eta.bits().to_vec();
    for s in &moved_from {
        bits[region.index_of(*s).expect("island site in box")] = false;
    }
    for s in &moved_to {
        let k = region
            .index_of(*s)
            .ok_or_else(|| Error::Precondition(format!("shifted site {s} leaves the box")))?;
        if bits[k] {
            return Err(Error::Construction(format!("shifted islands collide at {s}")));
        }
        bits[k] = true;
    }
    let shifted = Configuration::from_bits(region.clone(), bits)?;
    let order: Vec<Site> = region.sites().into_iter().filter(|s| s.color() == color).collect();
    let out = complete_with_boundary(&shifted, b, &order)?;
    if !admissible(&out, b)? {
        return Err(Error::Construction("contour elimination did not produce an admissible configuration".into()));
    }
    Ok(out)
}

fn complete_with_boundary(c: &Configuration, b: &BoundaryCondition, order: &[Site]) -> Result<Configuration> {
    let region = c.region();
    let mut bits = c.bits().to_vec();
    for &s in order {
        let k = region.index_of(s).expect("site in box");
        if bits[k] {
            continue;
        }
        let mut free = true;
        for t in s.neighbors() {
            let occ = match region.index_of(t) {
                Some(l) => bits[l],
                None => b.occupied(t)?,
            };
            if occ {
                free = false;
                break;
            }
        }
        if free {
            bits[k] = true;
        }
    }
    Configuration::from_bits(region.clone(), bits)
}

/// Recovers the configuration ψ was applied to from its image and the contour's faces,
/// by undoing each island shift. Errors unless exactly one preimage is consistent.
pub fn restore_contour(image: &Configuration, b: &BoundaryCondition, faces: &[Face]) -> Result<Configuration> {
    let region = image.region();
    let gamma: BTreeSet<Face> = faces.iter().copied().collect();
    let faces: Vec<Face> = gamma.iter().copied().collect();
    let (exterior, interior) = exterior_interior(region, &gamma)?;
    let islands = components(&interior, |f| f.edge_neighbors().to_vec());
    let kept: Vec<Site> = image
        .occupied_sites()
        .into_iter()
        .filter(|&s| faces_around(s).iter().any(|f| exterior.contains(f)))
        .collect();
    // per island, the un-shifts whose restored hexagons cover the island's wall faces
    let mut options: Vec<Vec<Vec<Site>>> = Vec::with_capacity(islands.len());
    for island in &islands {
        let wall: Vec<Face> =
            island.iter().copied().filter(|f| f.edge_neighbors().iter().any(|g| gamma.contains(g))).collect();
        let mut opts = Vec::new();
        for d in [(0, 0), NORTH_WEST, NORTH_EAST] {
            let target: HashSet<Face> = island.iter().map(|f| f.translate(d)).collect();
            let back: Vec<Site> = image
                .occupied_sites()
                .into_iter()
                .filter(|&s| faces_around(s).iter().all(|f| target.contains(f)))
                .map(|s| s.offset((-d.0, -d.1)))
                .collect();
            if back.iter().any(|s| !region.contains(*s)) {
                continue;
            }
            if wall.iter().all(|f| f.vertices().iter().any(|v| back.contains(v))) {
                opts.push(back);
            }
        }
        if opts.is_empty() {
            return Err(Error::Construction("an island admits no consistent un-shift".into()));
        }
        options.push(opts);
    }
    let total: usize = options.iter().map(|o| o.len()).try_fold(1usize, |a, k| a.checked_mul(k)).unwrap_or(usize::MAX);
    if total > 1 << 12 {
        return Err(Error::BudgetExceeded(format!("{total} candidate preimages")));
    }
    let mut found: Vec<Configuration> = Vec::new();
    for code in 0..total {
        let mut sites = kept.clone();
        let mut c = code;
        for opts in &options {
            sites.extend(opts[c % opts.len()].iter().copied());
            c /= opts.len();
        }
        let Ok(cand) = Configuration::from_occupied(region.clone(), sites) else { continue };
        if !cand.is_independent() || !admissible(&cand, b)? {
            continue;
        }
        let Some(g) = extract_contours(&cand, b)?.into_iter().find(|g| g.faces == faces) else { continue };
        if matches!(eliminate_contour(&cand, b, &g), Ok(ref img) if img == image) && !found.contains(&cand) {
            found.push(cand);
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one preimage")),
        0 => Err(Error::Construction("no preimage reproduces the image".into())),
        k => Err(Error::Construction(format!("{k} preimages map to the same image"))),
    }
}

/// Outcome of checking every contour of a family of admissible configurations: the
/// structural audit, the occupancy law `|ψ(η)| = |η| + |γ|/6`, recovery of `η` from
/// `(ψ(η), γ)`, and injectivity of `η ↦ (γ, ψ(η))` across the family.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ContourLawReport {
    pub configurations: usize,
    pub contours: usize,
    pub max_size: usize,
    pub audit_failures: usize,
    pub elimination_failures: usize,
    pub occupancy_failures: usize,
    pub restore_failures: usize,
    pub collisions: usize,
    /// Contour counts by size.
    pub sizes: BTreeMap<usize, usize>,
    /// First few violation messages.
    pub examples: Vec<String>,
}

impl ContourLawReport {
    pub fn violations(&self) -> usize {
        self.audit_failures + self.elimination_failures + self.occupancy_failures + self.restore_failures + self.collisions
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

type ImageKey = (Vec<Face>, Vec<bool>);

struct ContourCheck {
    size: usize,
    audit: Option<String>,
    elimination: Option<String>,
    occupancy: bool,
    restored: bool,
    image: Option<ImageKey>,
}

fn check_contours(eta: &Configuration, b: &BoundaryCondition) -> Result<Vec<ContourCheck>> {
    let mut out = Vec::new();
    for g in extract_contours(eta, b)? {
        let a = audit_contour(&g);
        let mut c = ContourCheck {
            size: g.size(),
            audit: (!a.passed()).then(|| a.violations().join("; ")),
            elimination: None,
            occupancy: true,
            restored: true,
            image: None,
        };
        match eliminate_contour(eta, b, &g) {
            Ok(img) => {
                c.occupancy = g.size() % 6 == 0 && img.count() as i64 - eta.count() as i64 == g.size() as i64 / 6;
                c.restored = matches!(restore_contour(&img, b, &g.faces), Ok(ref x) if x == eta);
                c.image = Some((g.faces.clone(), img.bits().to_vec()));
            }
            Err(e) => c.elimination = Some(e.to_string()),
        }
        out.push(c);
    }
    Ok(out)
}

/// Checks every contour of every configuration in `family`.
pub fn contour_law_audit(family: &[Configuration], b: &BoundaryCondition) -> Result<ContourLawReport> {
    let checks: Vec<Vec<ContourCheck>> = family.par_iter().map(|eta| check_contours(eta, b)).collect::<Result<_>>()?;
    let mut r = ContourLawReport { configurations: family.len(), ..Default::default() };
    let mut seen: HashMap<ImageKey, usize> = HashMap::new();
    let note = |r: &mut ContourLawReport, msg: String| {
        if r.examples.len() < 5 {
            r.examples.push(msg);
        }
    };
    for (k, cs) in checks.into_iter().enumerate() {
        for c in cs {
            r.contours += 1;
            r.max_size = r.max_size.max(c.size);
            *r.sizes.entry(c.size).or_default() += 1;
            if let Some(v) = c.audit {
                r.audit_failures += 1;
                note(&mut r, format!("configuration {k}: {v}"));
            }
            if let Some(e) = c.elimination {
                r.elimination_failures += 1;
                note(&mut r, format!("configuration {k}: elimination failed: {e}"));
            }
            if !c.occupancy {
                r.occupancy_failures += 1;
                note(&mut r, format!("configuration {k}: occupancy law fails for a contour of size {}", c.size));
            }
            if !c.restored {
                r.restore_failures += 1;
                note(&mut r, format!("configuration {k}: contour of size {} not recovered", c.size));
            }
            if let Some(key) = c.image {
                match seen.get(&key) {
                    // a repeated sample maps to the same image without breaking injectivity
                    Some(&prev) if family[prev] != family[k] => {
                        r.collisions += 1;
                        note(&mut r, format!("configurations {prev} and {k} share an image"));
                    }
                    _ => {
                        seen.insert(key, k);
                    }
                }
            }
        }
    }
    Ok(r)
}

/// All admissible configurations of `Λ_n` under `b`, audited.
pub fn exhaustive_contour_audit(n: usize, b: &BoundaryCondition) -> Result<ContourLawReport> {
    contour_law_audit(&enumerate_admissible(&Region::square(n), b)?, b)
}

/// Random admissible configurations on `Λ_n` with `n` cycling through `sides` and the
/// boundary color cycling through blue, red, green; one ChaCha8 stream per fixture.
pub fn random_contour_audit(sides: &[usize], trials: usize, seed: u64) -> Result<ContourLawReport> {
    if sides.is_empty() {
        return Err(Error::InvalidArgument("no box sizes given".into()));
    }
    let fixtures: Vec<(Configuration, BoundaryCondition)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let b = BoundaryCondition::Color(Color::ALL[k % 3]);
            let eta = random_admissible(&Region::square(sides[k % sides.len()]), &b, &mut rng)?;
            Ok((eta, b))
        })
        .collect::<Result<_>>()?;
    let mut total = ContourLawReport::default();
    for c in Color::ALL {
        let b = BoundaryCondition::Color(c);
        let family: Vec<Configuration> = fixtures.iter().filter(|(_, x)| *x == b).map(|(e, _)| e.clone()).collect();
        let r = contour_law_audit(&family, &b)?;
        total.configurations += r.configurations;
        total.contours += r.contours;
        total.max_size = total.max_size.max(r.max_size);
        total.audit_failures += r.audit_failures;
        total.elimination_failures += r.elimination_failures;
        total.occupancy_failures += r.occupancy_failures;
        total.restore_failures += r.restore_failures;
        total.collisions += r.collisions;
        for (s, k) in r.sizes {
            *total.sizes.entry(s).or_default() += k;
        }
        total.examples.extend(r.examples.into_iter().take(5 - total.examples.len().min(5)));
    }
    Ok(total)
}

/// How the incoming contour neighbour meets the central face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKind {
    Edge,
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternCounts {
    /// `(degree, kind) → realizable neighbour choices`.
    pub by_kind: BTreeMap<String, usize>,
    /// Maximum over kinds, for degrees 4, 3, 2.
    pub degree4: usize,
    pub degree3: usize,
    pub degree2: usize,
}

impl PatternCounts {
    pub fn total(&self) -> usize {
        self.degree4 + self.degree3 + self.degree2
    }

    pub fn get(&self, degree: usize, kind: ConnectionKind) -> usize {
        self.by_kind.get(&pattern_key(degree, kind)).copied().unwrap_or(0)
    }
}

fn pattern_key(degree: usize, kind: ConnectionKind) -> String {
    format!("{degree}-{}", if kind == ConnectionKind::Edge { "edge" } else { "vertex" })
}

/// Whether some independent set makes exactly `empty` (among `center` and its connected
/// faces) empty while dominating every vertex of the empty faces.
fn locally_realizable(center: Face, empty: &[Face]) -> bool {
    let mut involved: BTreeSet<Site> = BTreeSet::new();
    let mut nearby: Vec<Face> = vec![center];
    nearby.extend(center.connected());
    for f in &nearby {
        involved.extend(f.vertices());
    }
    let vacant: BTreeSet<Site> = empty.iter().flat_map(|f| f.vertices()).collect();
    let mut window = involved.clone();
    for v in &vacant {
        window.extend(v.neighbors());
    }
    let region = Region::from_sites(window);
    let mut p = MisProblem::for_region(&region).expect("small window");
    p.need_dom = 0;
    for v in &vacant {
        let k = region.index_of(*v).expect("vacant site in window");
        p.blocked |= 1 << k;
        p.need_dom |= 1 << k;
    }
    for f in &nearby {
        if !empty.contains(f) {
            p.covers.push(f.vertices().iter().fold(0u64, |m, v| m | 1 << region.index_of(*v).expect("in window")));
        }
    }
    p.first().is_some()
}

/// Realizable choices of further contour neighbours for a contour face entered
/// through one connected neighbour, by degree and connection kind.
pub fn local_pattern_counts() -> PatternCounts {
    let w = Face::up(0, 0);
    let edges = w.edge_neighbors();
    let mut by_kind = BTreeMap::new();
    for kind in [ConnectionKind::Edge, ConnectionKind::Vertex] {
        let u = if kind == ConnectionKind::Edge { edges[0] } else { w.point_neighbors()[0] };
        let others: Vec<Face> = w.connected().into_iter().filter(|&f| f != u).collect();
        for extra in 1..=3usize {
            let mut count = 0;
            for mask in 0u32..1 << others.len() {
                if mask.count_ones() as usize != extra {
                    continue;
                }
                let mut empty = vec![w, u];
                empty.extend((0..others.len()).filter(|k| mask >> k & 1 == 1).map(|k| others[k]));
                if locally_realizable(w, &empty) {
                    count += 1;
                }
            }
            by_kind.insert(pattern_key(extra + 1, kind), count);
        }
    }
    let best = |d: usize| {
        by_kind.get(&pattern_key(d, ConnectionKind::Edge)).copied().unwrap_or(0).max(
            by_kind.get(&pattern_key(d, ConnectionKind::Vertex)).copied().unwrap_or(0),
        )
    };
    PatternCounts { degree4: best(4), degree3: best(3), degree2: best(2), by_kind }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContourGraphCount {
    pub size: usize,
    /// Connected face sets with the anchor as least face, no other restriction.
    #[serde(serialize_with = "crate::counting::decimal::serialize")]
    pub unfiltered: BigUint,
    /// Those whose induced degrees stay at most 4 and that never empty a whole
    /// closed neighbourhood of a site.
    #[serde(serialize_with = "crate::counting::decimal::serialize")]
    pub realizable: BigUint,
    /// Realizable sets whose induced degrees are all in `[2, 4]`.
    #[serde(serialize_with = "crate::counting::decimal::serialize")]
    pub closed: BigUint,
}

struct Animal {
    filtered: bool,
    target: usize,
    unfiltered: u64,
    realizable: u64,
    closed: u64,
    budget: u64,
    visits: u64,
}

fn face_rank(f: Face) -> (i64, i64, u8) {
    (f.anchor.j, f.anchor.i, if f.orientation == Orientation::Up { 0 } else { 1 })
}

impl Animal {
    fn degree(set: &[Face], f: Face) -> usize {
        f.connected().iter().filter(|g| set.contains(g)).count()
    }

    /// A site with itself and all six neighbours on faces of the set.
    fn covers_neighbourhood(set: &[Face], f: Face) -> bool {
        let vertices: HashSet<Site> = set.iter().flat_map(|g| g.vertices()).collect();
        f.vertices().iter().flat_map(|v| std::iter::once(*v).chain(v.neighbors())).any(|c| {
            vertices.contains(&c) && c.neighbors().iter().all(|n| vertices.contains(n))
        })
    }

    fn admissible_after_add(set: &[Face], f: Face) -> bool {
        if Self::degree(set, f) > 4 {
            return false;
        }
        for g in f.connected() {
            if set.contains(&g) && Self::degree(set, g) + 1 > 4 {
                return false;
            }
        }
        let mut with = set.to_vec();
        with.push(f);
        !Self::covers_neighbourhood(&with, f)
    }

    fn grow(&mut self, set: &mut Vec<Face>, untried: Vec<Face>, seen: &mut HashSet<Face>, realizable: bool) -> Result<()> {
        self.visits += 1;
        if self.visits > self.budget {
            return Err(Error::BudgetExceeded(format!("more than {} partial contour graphs", self.budget)));
        }
        if set.len() == self.target {
            self.unfiltered += 1;
            if realizable {
                self.realizable += 1;
                if set.iter().all(|&f| Self::degree(set, f) >= 2) {
                    self.closed += 1;
                }
            }
            return Ok(());
        }
        let mut untried = untried;
        while let Some(f) = untried.pop() {
            let ok = realizable && Self::admissible_after_add(set, f);
            if self.filtered && !ok {
                continue;
            }
            let mut next = untried.clone();
            let mut added = Vec::new();
            let anchor = set[0];
            for g in f.connected() {
                if face_rank(g) > face_rank(anchor) && seen.insert(g) {
                    next.push(g);
                    added.push(g);
                }
            }
            set.push(f);
            self.grow(set, next, seen, ok)?;
            set.pop();
            for g in added {
                seen.remove(&g);
            }
        }
        Ok(())
    }
}

fn count_animals(l: usize, filtered: bool) -> Result<Animal> {
    let anchor = Face::up(0, 0);
    let mut a = Animal { filtered, target: l, unfiltered: 0, realizable: 0, closed: 0, budget: CONTOUR_GRAPH_BUDGET, visits: 0 };
    let mut seen: HashSet<Face> = HashSet::new();
    seen.insert(anchor);
    let mut untried = Vec::new();
    for g in anchor.connected() {
        if face_rank(g) > face_rank(anchor) && seen.insert(g) {
            untried.push(g);
        }
    }
    let mut set = vec![anchor];
    a.grow(&mut set, untried, &mut seen, true)?;
    Ok(a)
}

/// Connected `l`-face subgraphs of the connectivity graph whose least face is a fixed
/// up-face, split by the realizability filters. The unfiltered count is only
/// enumerated for `l ≤ 10`; above that it is reported as zero.
pub fn count_contour_graphs(l: usize) -> Result<ContourGraphCount> {
    if l == 0 || l > MAX_CONTOUR_GRAPH_SIZE {
        return Err(Error::InvalidArgument(format!("contour graph size must be in 1..={MAX_CONTOUR_GRAPH_SIZE}, got {l}")));
    }
    let filtered = count_animals(l, true)?;
    let unfiltered = if l <= 10 { count_animals(l, false)?.unfiltered } else { 0 };
    Ok(ContourGraphCount {
        size: l,
        unfiltered: BigUint::from(unfiltered),
        realizable: BigUint::from(filtered.realizable),
        closed: BigUint::from(filtered.closed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground(region: &Region, c: Color) -> Configuration {
        Configuration::from_occupied(region.clone(), region.sites().into_iter().filter(|s| s.color() == c)).unwrap()
    }

    #[test]
    fn ground_states_have_no_empty_faces() {
        for c in Color::ALL {
            let r = Region::centered(3);
            let g = ground(&r, c);
            assert!(empty_faces(&g).is_empty());
            assert!(extract_contours(&g, &BoundaryCondition::Color(c)).unwrap().is_empty());
        }
    }

    #[test]
    fn shifts_map_walls_onto_contour_color() {
        for t in Color::ALL {
            for w in Color::ALL {
                let d = island_shift(t, w);
                let s = Site::new(4, 2);
                let s = if s.color() == w { s } else if s.offset((1, 0)).color() == w { s.offset((1, 0)) } else { s.offset((2, 0)) };
                assert_eq!(s.offset(d).color(), t);
            }
        }
    }

    #[test]
    fn isolated_and_overfull_face_sets_are_rejected() {
        assert!(!audit_face_set(&[Face::up(0, 0)]).passed());
        let w = Face::up(0, 0);
        let mut five = vec![w];
        five.extend(w.connected().into_iter().take(5));
        let a = audit_face_set(&five);
        assert_eq!(a.max_degree, 5);
        assert!(!a.passed());
    }

    #[test]
    fn contour_laws_on_small_boxes() {
        let r = exhaustive_contour_audit(4, &BoundaryCondition::Color(Color::Blue)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.contours > 0);
        let r = random_contour_audit(&[8, 9], 30, 7).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn pattern_counts() {
        let p = local_pattern_counts();
        assert_eq!((p.degree4, p.degree3, p.degree2), (5, 7, 3));
        assert_eq!(p.total(), 15);
    }

    #[test]
    fn small_contour_graph_counts() {
        let c1 = count_contour_graphs(1).unwrap();
        assert_eq!(c1.realizable, BigUint::from(1u32));
        assert_eq!(c1.unfiltered, BigUint::from(1u32));
        let mut prev = c1.realizable;
        for l in 2..=7 {
            let c = count_contour_graphs(l).unwrap();
            assert!(c.realizable <= c.unfiltered);
            assert!(c.closed <= c.realizable);
            assert!(c.realizable <= &prev * 15u32);
            prev = c.realizable;
        }
    }
}
