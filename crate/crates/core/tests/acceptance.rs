//! Acceptance criteria 1-12, one `criterion N: PASS|FAIL` line each. Criterion 1 is
//! reported but not required; any other failure makes the target exit nonzero.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trimis::codec::{decode, encode, window_defects, CodecParams};
use trimis::configspace::{random_maximal, torus_counts};
use trimis::contours::{exhaustive_contour_audit, local_pattern_counts, random_contour_audit};
use trimis::counting::{capacity_lower_z2, capacity_upper, count_independent, count_maximal, count_maximal_z2, log2_big};
use trimis::delaunay::{defective_area_audit, random_triangulation_audit, Radius};
use trimis::gibbs::{
    admissible, eval_exact, gibbs_sweep, partition_polynomial, series_bound, series_partial, series_threshold_m,
    uniformity_check, Activity, BoundaryCondition, GibbsSpec, SERIES_THRESHOLD,
};
use trimis::groundstates::{
    density_extremality_audit, enumerate_pgs_dense, enumerate_pgs_sparse, mirror, random_density_audit, random_peierls_sweep,
    single_site_peierls_sweep, translation_orbits, GroundStateCatalog,
};
use trimis::{Color, Configuration, Region};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Maximal independent sets of a graph on up to 20 vertices given by neighbour masks.
fn brute_maximal(adj: &[u32]) -> u64 {
    let n = adj.len();
    let mut count = 0;
    for s in 0u32..1 << n {
        let ok = (0..n).all(|v| {
            let inside = s >> v & 1 == 1;
            if inside {
                s & adj[v] == 0
            } else {
                s & adj[v] != 0
            }
        });
        count += ok as u64;
    }
    count
}

/// Neighbour masks of an `n × m` grid under the given offsets, without wrap-around.
fn grid_adjacency(n: usize, m: usize, offsets: &[(i64, i64)]) -> Vec<u32> {
    let idx = |i: i64, j: i64| (i >= 0 && j >= 0 && i < n as i64 && j < m as i64).then(|| (i + j * n as i64) as usize);
    let mut adj = vec![0u32; n * m];
    for j in 0..m as i64 {
        for i in 0..n as i64 {
            let a = idx(i, j).unwrap();
            for &(di, dj) in offsets {
                for (x, y) in [(i + di, j + dj), (i - di, j - dj)] {
                    if let Some(b) = idx(x, y) {
                        adj[a] |= 1 << b;
                    }
                }
            }
        }
    }
    adj
}

const TRI: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, 1)];
const SQUARE: [(i64, i64); 2] = [(1, 0), (0, 1)];

fn criterion_01_capacity_lower_bound() -> Outcome {
    let mut checked = 0;
    for n in 1..=20usize {
        for m in 1..=20 / n {
            let exact = count_maximal(n, m).unwrap().count;
            assert_eq!(
                exact,
                BigUint::from(brute_maximal(&grid_adjacency(n, m, &TRI))),
                "rhombus {n}x{m}"
            );
            checked += 1;
        }
    }
    let r = count_maximal(10, 132).unwrap();
    let claimed = 0.4609;
    let passed = r.bits_per_site + 1e-4 >= claimed;
    outcome(
        passed,
        format!(
            "log2|M|/(11*133) = {:.5} against {claimed}; transfer counts equal brute force on {checked} rhombi with n*m <= 20",
            r.bits_per_site
        ),
    )
}

fn criterion_02_upper_bound_constant() -> Outcome {
    let upper = capacity_upper();
    let mut estimates = Vec::new();
    for n in 1..=12usize {
        let z = count_independent(n, 60).unwrap();
        let z1 = count_independent(n, 61).unwrap();
        estimates.push((log2_big(&z1) - log2_big(&z)) / n as f64);
    }
    let above = estimates.iter().all(|&e| e > upper);
    let decreasing = estimates.windows(2).all(|w| w[1] < w[0]);
    // log2(1.39548) = 0.480761..., which the quoted 0.4807 truncates to four places
    let truncated = (upper * 1e4).floor() / 1e4;
    let passed = (truncated - 0.4807).abs() <= 5e-5 && above && decreasing;
    outcome(passed, format!(
            "capacity_upper = {upper:.6} (truncated {truncated:.4}, {:.1e} from 0.4807); strip estimates decrease to {:.6} at n=12",
            (upper - 0.4807).abs(),
            estimates[11]
    ))
}

fn criterion_03_z2_cross_check() -> Outcome {
    for n in 1..=4usize {
        for m in 1..=4 {
            assert_eq!(
                count_maximal_z2(n, m).unwrap(),
                BigUint::from(brute_maximal(&grid_adjacency(n, m, &SQUARE))),
                "Z2 {n}x{m}"
            );
        }
    }
    let bound = capacity_lower_z2(12, 400).unwrap();
    let passed = bound >= 0.3012;
    outcome(
        passed,
        format!("Z2 lower bound at n=12, m=400: {bound:.5} (>= 0.3012); oracle equality for n,m <= 4"),
    )
}

fn criterion_04_pgs_catalog() -> Outcome {
    let sparse = enumerate_pgs_sparse().unwrap();
    let dense = enumerate_pgs_dense().unwrap();
    let orbits = translation_orbits(&sparse);
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    let all_maximal = sparse.iter().chain(&dense).all(|c| c.is_maximal());
    let mirror_closed = sparse.iter().all(|c| sparse.contains(&mirror(c).unwrap()));
    let passed = sparse.len() == 14 && dense.len() == 3 && sizes == [7, 7] && all_maximal && mirror_closed;
    outcome(
        passed,
        format!("{} sparse in orbits {sizes:?}, {} dense", sparse.len(), dense.len()),
    )
}

fn criterion_05_density_sandwich() -> Outcome {
    let exhaustive = density_extremality_audit(2, 6).unwrap();
    let random = random_density_audit(7..=20, 10_000, 5);
    // the double-counting identity, recomputed directly on a fresh sample
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..200 {
        let (a, b) = (rng.gen_range(3..=15), rng.gen_range(3..=15));
        let c = random_maximal(&Region::torus(a, b), &mut rng).unwrap();
        let t = torus_counts(&c).unwrap();
        assert_eq!(t.pairs, 6 * t.occupied);
        assert!(7 * t.occupied >= a * b && 3 * t.occupied <= a * b);
    }
    let passed = exhaustive.violations() == 0 && random.violations() == 0;
    outcome(
        passed,
        format!(
            "{} exhaustive torus MISs (sides 2..6) and {} random ones (sides 7..20), {} violations",
            exhaustive.configurations(),
            random.random_trials,
            exhaustive.violations() + random.violations()
        ),
    )
}

fn criterion_06_delaunay_audit() -> Outcome {
    let a = defective_area_audit(Radius::rho());
    let b = defective_area_audit("1.578".parse().unwrap());
    let half_three = num_rational::Rational64::new(3, 2);
    let passed = a.candidates == 36 && a.passed && b.passed && a.max_defective_area_over_sqrt3 <= half_three;
    outcome(
        passed,
        format!(
            "{} candidates, {} feasible triangles ({} defective); max defective area = {} * sqrt(3) <= 3/2 * sqrt(3)",
            a.candidates, a.feasible, a.defective, a.max_defective_area_over_sqrt3
        ),
    )
}

fn criterion_07_triangulation_law() -> Outcome {
    let rows = random_triangulation_audit(&[7, 14, 21], 100, 7, Radius::rho()).unwrap();
    let bad: usize = rows.iter().map(|r| r.violations()).sum();
    let trials: usize = rows.iter().map(|r| r.trials).sum();
    let passed = bad == 0 && trials == 300;
    outcome(
        passed,
        format!("{trials} random torus MISs on sides 7, 14, 21; {bad} violations"),
    )
}

fn criterion_08_contour_laws() -> Outcome {
    let blue = BoundaryCondition::Color(Color::Blue);
    let red = BoundaryCondition::Color(Color::Red);
    let mut reports = Vec::new();
    for n in 1..=5 {
        reports.push(exhaustive_contour_audit(n, &blue).unwrap());
    }
    reports.push(exhaustive_contour_audit(6, &blue).unwrap());
    reports.push(exhaustive_contour_audit(5, &red).unwrap());
    reports.push(random_contour_audit(&[8, 9, 10, 11, 12], 1000, 8).unwrap());
    let configurations: usize = reports.iter().map(|r| r.configurations).sum();
    let contours: usize = reports.iter().map(|r| r.contours).sum();
    let bad: usize = reports.iter().map(|r| r.violations()).sum();
    let passed = bad == 0 && contours > 0;
    let examples: Vec<String> = reports.iter().flat_map(|r| r.examples.clone()).take(3).collect();
    outcome(
        passed,
        format!(
            "{configurations} admissible configurations, {contours} contours, {bad} violations{}",
            if examples.is_empty() {
                String::new()
            } else {
                format!(" {examples:?}")
            }
        ),
    )
}

fn criterion_09_pattern_counts() -> Outcome {
    let p = local_pattern_counts();
    let got = (p.degree4, p.degree3, p.degree2);
    let passed = got == (5, 7, 3) && p.total() == 15;
    outcome(passed, format!("(degree 4, 3, 2) = {got:?}, total {}", p.total()))
}

fn criterion_10_peierls_audit() -> Outcome {
    let cat = GroundStateCatalog::build().unwrap();
    let single = single_site_peierls_sweep(&cat, 3).unwrap();
    let random = random_peierls_sweep(&cat, 3, 3, 1000, 10).unwrap();
    let passed = single.violations == 0 && random.violations == 0 && single.configurations >= 14 * 21 * 21;
    outcome(
        passed,
        format!(
            "{} single-site and {} random 3-site perturbations on T(21,21); {} contours, {} violations",
            single.configurations,
            random.configurations,
            single.contours + random.contours,
            single.violations + random.violations
        ),
    )
}

/// Brute-force `Σ λ^|η|` over admissible configurations of an `n × n` rhombus.
fn brute_partition(n: usize, b: &BoundaryCondition, lambda: &BigRational) -> BigRational {
    let region = Region::rhombus(n, n);
    let k = region.len();
    let mut z = BigRational::zero();
    for mask in 0u32..1 << k {
        let bits = (0..k).map(|t| mask >> t & 1 == 1).collect();
        let eta = Configuration::from_bits(region.clone(), bits).unwrap();
        if admissible(&eta, b).unwrap() {
            let mut w = BigRational::one();
            for _ in 0..mask.count_ones() {
                w *= lambda;
            }
            z += w;
        }
    }
    z
}

fn criterion_11_gibbs_machinery() -> Outcome {
    let lambdas = [
        BigRational::new(1.into(), 1.into()),
        BigRational::new(3.into(), 7.into()),
        BigRational::new(9.into(), 2.into()),
    ];
    for n in 1..=4 {
        for color in Color::ALL {
            let b = BoundaryCondition::Color(color);
            let poly = partition_polynomial(&Region::rhombus(n, n), &b, &[]).unwrap();
            for l in &lambdas {
                assert_eq!(eval_exact(&poly, l), brute_partition(n, &b, l), "n={n} {color:?} lambda={l}");
            }
        }
    }
    for n in 2..=4 {
        let g = GibbsSpec::rhombus(n, Activity::one(), BoundaryCondition::Color(Color::Blue)).unwrap();
        assert!(uniformity_check(&g).unwrap());
    }

    let lambdas: Vec<Activity> = (0..=6).map(|k| Activity::ratio(4i64.pow(k), 1)).collect();
    let blue = gibbs_sweep(3, 1, &BoundaryCondition::Color(Color::Blue), &lambdas).unwrap();
    let symmetric = blue
        .iter()
        .all(|r| (r.p_green_given_hom - 0.5).abs() <= 1e-12 && (r.p_red_given_hom - 0.5).abs() <= 1e-12);
    let red = gibbs_sweep(3, 1, &BoundaryCondition::Color(Color::Red), &lambdas).unwrap();
    let green = gibbs_sweep(3, 1, &BoundaryCondition::Color(Color::Green), &lambdas).unwrap();
    let gaps: Vec<f64> = red
        .iter()
        .zip(&green)
        .map(|(r, g)| g.p_green_given_hom - r.p_green_given_hom)
        .collect();
    let ordered = gaps[1..].iter().all(|&d| d > 0.0);
    let monotone = gaps.windows(2).all(|w| w[1] > w[0]);

    let finite_iff = series_bound(SERIES_THRESHOLD, 10, 1.0).is_infinite()
        && series_bound(SERIES_THRESHOLD * 0.999, 10, 1.0).is_infinite()
        && series_bound(SERIES_THRESHOLD * 1.001, 10, 1.0).is_finite();
    let lambda = 2.0 * SERIES_THRESHOLD;
    let m = series_threshold_m(lambda, 1.0, 1.0 / 3.0, 10_000);
    let below_third = m.is_some_and(|m| series_bound(lambda, m, 1.0) < 1.0 / 3.0);
    let partial_matches = [1u64, 5, 20, 40].iter().all(|&m| {
        let closed = series_bound(lambda, m, 1.0);
        let partial = series_partial(lambda, m, 1.0, 4 * m + 20_000);
        ((closed - partial) / closed).abs() <= 1e-9
    });

    let passed = symmetric && ordered && monotone && finite_iff && below_third && partial_matches;
    outcome(passed, format!(
            "DP equals brute force for n <= 4; blue symmetry; green-minus-red gap at half=3, m=1 over lambda=4^k: {}; series < 1/3 from m = {} at lambda = 2*15^6",
            gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>().join(" "),
            m.map_or("none".into(), |m| m.to_string())
    ))
}

fn criterion_12_codec() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut trips = 0;
    for (n, m) in [(2, 2), (3, 4), (4, 4)] {
        let params = CodecParams::new(n, m).unwrap();
        let exact_count = count_maximal(n, m).unwrap().count;
        assert_eq!(params.bits_per_block as u64, exact_count.bits() - 1);
        assert_eq!(params.rate_fraction(), (params.bits_per_block, (n + 1) * (m + 1)));
        assert_eq!(params.rate(), params.bits_per_block as f64 / ((n + 1) * (m + 1)) as f64);
        for _ in 0..10_000 {
            let len = rng.gen_range(1..=6 * params.bits_per_block);
            let bits: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
            let window = encode(&bits, &params).unwrap();
            assert_eq!(window_defects(&window), 0);
            assert_eq!(decode(&window, &params).unwrap(), bits);
            trips += 1;
        }
    }
    outcome(
        true,
        format!("{trips} random round trips, every window maximal, rate N/((n+1)(m+1)) exact"),
    )
}

type Criterion = fn() -> Outcome;

/// Criteria whose failure is reported without failing the target.
const REPORTED_ONLY: [usize; 1] = [1];

fn main() {
    let criteria: [(&str, Criterion); 12] = [
        ("capacity lower bound", criterion_01_capacity_lower_bound),
        ("upper bound constant", criterion_02_upper_bound_constant),
        ("Z2 cross-check", criterion_03_z2_cross_check),
        ("PGS catalog", criterion_04_pgs_catalog),
        ("density sandwich", criterion_05_density_sandwich),
        ("Delaunay audit", criterion_06_delaunay_audit),
        ("triangulation law", criterion_07_triangulation_law),
        ("contour laws", criterion_08_contour_laws),
        ("pattern counts", criterion_09_pattern_counts),
        ("Peierls audit", criterion_10_peierls_audit),
        ("Gibbs machinery", criterion_11_gibbs_machinery),
        ("codec", criterion_12_codec),
    ];
    let mut required_failures = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let k = k + 1;
        let start = std::time::Instant::now();
        let o = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {k:>2} ({name}): {verdict} | {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.passed && !REPORTED_ONLY.contains(&k) {
            required_failures += 1;
        }
    }
    if required_failures > 0 {
        println!("{required_failures} required criteria failed");
        std::process::exit(1);
    }
}
