use crate::output::{emit, emit_bytes, json, Failure, Table};
use crate::{Cli, Command, CountKind, Format, Lattice, PgsMode};
use serde::Serialize;
use std::io::Read;
use std::path::Path;
use trimis::codec::{decode, default_layout, encode_with_layout, CodecParams, TiledConfiguration};
use trimis::contours::{count_contour_graphs, exhaustive_contour_audit, local_pattern_counts, random_contour_audit, ContourLawReport};
use trimis::counting::{
    capacity_lower_z2, capacity_upper, count_independent, count_maximal, count_maximal_prefixes, count_maximal_z2, log2_big,
};
use trimis::delaunay::{defective_area_audit, random_triangulation_audit, Radius};
use trimis::gibbs::{gibbs_sweep, series_bound, series_partial, series_threshold_m, Activity, BoundaryCondition};
use trimis::groundstates::{
    density_extremality_audit, random_density_audit, random_peierls_sweep, single_site_peierls_sweep, translation_orbits,
    GroundStateCatalog, PeierlsSweep,
};
use trimis::Color;

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Capacity { n, m, lattice, progress } => capacity(cli, *n, *m, *lattice, *progress),
        Command::Count { n, m, kind, prefixes } => count(cli, *n, *m, *kind, *prefixes),
        Command::GibbsSweep { half, m, boundary, lambda } => gibbs(cli, *half, *m, boundary, lambda),
        Command::ContourAudit { n, boundary, random, sizes } => contour_audit(cli, *n, boundary, *random, sizes),
        Command::PatternCount { graphs } => pattern_count(cli, *graphs),
        Command::Pgs { mode, min_side, max_side, random } => pgs(cli, *mode, *min_side, *max_side, *random),
        Command::PeierlsAudit { k, no_single, random, flips } => peierls(cli, *k, !*no_single, *random, *flips),
        Command::DelaunayAudit { rho, triangulations, sides } => delaunay(cli, rho, *triangulations, sides),
        Command::Encode { n, m, input, bytes, t1 } => encode_cmd(cli, *n, *m, input.as_deref(), *bytes, *t1),
        Command::Decode { input, bytes } => decode_cmd(cli, input.as_deref(), *bytes),
        Command::SeriesBound { lambda, m, c, target, terms } => series(cli, *lambda, m, *c, *target, *terms),
    }
}

fn f(x: f64) -> String {
    format!("{x:.10}")
}

#[derive(Serialize)]
struct CapacityRecord {
    lattice: &'static str,
    n: usize,
    m: usize,
    count: String,
    log2_count: f64,
    bound: f64,
    upper: Option<f64>,
}

fn capacity(cli: &Cli, n: usize, m: usize, lattice: Lattice, progress: bool) -> Result<(), Failure> {
    let rec = match lattice {
        Lattice::Triangular => {
            let r = if progress {
                let all = count_maximal_prefixes(n, m, |done, total| eprintln!("column {done}/{total}"))?;
                all.into_iter().last().expect("m >= 1")
            } else {
                count_maximal(n, m)?
            };
            CapacityRecord {
                lattice: "triangular",
                n,
                m,
                log2_count: log2_big(&r.count),
                count: r.count.to_string(),
                bound: r.bits_per_site,
                upper: Some(capacity_upper()),
            }
        }
        Lattice::Z2 => {
            let c = count_maximal_z2(n, m)?;
            CapacityRecord { lattice: "z2", n, m, log2_count: log2_big(&c), count: c.to_string(), bound: capacity_lower_z2(n, m)?, upper: None }
        }
    };
    let text = match cli.format {
        Format::Json => json(&rec),
        Format::Csv => {
            let mut t = Table::new("lattice,n,m,log2_count,bound,upper");
            t.row(&[
                rec.lattice.into(),
                n.to_string(),
                m.to_string(),
                f(rec.log2_count),
                f(rec.bound),
                rec.upper.map(f).unwrap_or_default(),
            ]);
            t.finish()
        }
    };
    emit(cli, &text)
}

#[derive(Serialize)]
struct CountRecord {
    kind: &'static str,
    n: usize,
    m: usize,
    count: String,
}

fn count(cli: &Cli, n: usize, m: usize, kind: CountKind, prefixes: bool) -> Result<(), Failure> {
    let recs: Vec<CountRecord> = match (kind, prefixes) {
        (CountKind::Maximal, true) => count_maximal_prefixes(n, m, |_, _| {})?
            .into_iter()
            .map(|r| CountRecord { kind: "maximal", n: r.n, m: r.m, count: r.count.to_string() })
            .collect(),
        (_, true) => return Err(Failure::usage("--prefixes is available for maximal counts only")),
        (CountKind::Maximal, false) => vec![CountRecord { kind: "maximal", n, m, count: count_maximal(n, m)?.count.to_string() }],
        (CountKind::Independent, false) => vec![CountRecord { kind: "independent", n, m, count: count_independent(n, m)?.to_string() }],
        (CountKind::Z2, false) => vec![CountRecord { kind: "z2", n, m, count: count_maximal_z2(n, m)?.to_string() }],
    };
    let text = match cli.format {
        Format::Json => json(&recs),
        Format::Csv => {
            let mut t = Table::new("kind,n,m,count");
            for r in &recs {
                t.row(&[r.kind.into(), r.n.to_string(), r.m.to_string(), r.count.clone()]);
            }
            t.finish()
        }
    };
    emit(cli, &text)
}

fn parse_color(s: &str) -> Result<Color, Failure> {
    s.parse::<Color>().map_err(|_| Failure::usage(format!("unknown boundary color `{s}` (blue, red, green)")))
}

fn gibbs(cli: &Cli, half: usize, m: usize, boundary: &[String], lambda: &[String]) -> Result<(), Failure> {
    let activities: Vec<Activity> = lambda.iter().map(|s| s.parse::<Activity>()).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for b in boundary {
        let bc = BoundaryCondition::Color(parse_color(b)?);
        rows.extend(gibbs_sweep(half, m, &bc, &activities)?);
    }
    let text = match cli.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut out = format!("{}\n", trimis::gibbs::SweepRow::CSV_HEADER);
            for r in &rows {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            out
        }
    };
    emit(cli, &text)
}

#[derive(Serialize)]
struct ContourFamily {
    family: String,
    report: ContourLawReport,
}

fn contour_audit(cli: &Cli, n: usize, boundary: &str, random: usize, sizes: &[usize]) -> Result<(), Failure> {
    let b = BoundaryCondition::Color(parse_color(boundary)?);
    let mut families = vec![ContourFamily { family: format!("exhaustive n={n} {}", b.name()), report: exhaustive_contour_audit(n, &b)? }];
    if random > 0 {
        families.push(ContourFamily { family: format!("random {random}"), report: random_contour_audit(sizes, random, cli.seed)? });
    }
    let text = match cli.format {
        Format::Json => json(&families),
        Format::Csv => {
            let mut t = Table::new(
                "family,configurations,contours,max_size,audit_failures,elimination_failures,occupancy_failures,restore_failures,collisions",
            );
            for fam in &families {
                let r = &fam.report;
                t.row(&[
                    fam.family.clone(),
                    r.configurations.to_string(),
                    r.contours.to_string(),
                    r.max_size.to_string(),
                    r.audit_failures.to_string(),
                    r.elimination_failures.to_string(),
                    r.occupancy_failures.to_string(),
                    r.restore_failures.to_string(),
                    r.collisions.to_string(),
                ]);
            }
            t.finish()
        }
    };
    emit(cli, &text)?;
    let bad: usize = families.iter().map(|x| x.report.violations()).sum();
    if bad > 0 {
        let examples: Vec<String> = families.iter().flat_map(|x| x.report.examples.clone()).collect();
        return Err(Failure::violation(format!("{bad} contour law violations: {}", examples.join(" | "))));
    }
    Ok(())
}

#[derive(Serialize)]
struct PatternRecord {
    patterns: trimis::contours::PatternCounts,
    total: usize,
    graphs: Vec<trimis::contours::ContourGraphCount>,
}

fn pattern_count(cli: &Cli, graphs: usize) -> Result<(), Failure> {
    let patterns = local_pattern_counts();
    let total = patterns.total();
    let graphs: Vec<_> = (1..=graphs).map(count_contour_graphs).collect::<Result<_, _>>()?;
    let text = match cli.format {
        Format::Json => json(&PatternRecord { patterns: patterns.clone(), total, graphs: graphs.clone() }),
        Format::Csv => {
            let mut t = Table::new("degree,patterns");
            t.row(&["4".into(), patterns.degree4.to_string()]);
            t.row(&["3".into(), patterns.degree3.to_string()]);
            t.row(&["2".into(), patterns.degree2.to_string()]);
            t.row(&["total".into(), total.to_string()]);
            let mut out = t.finish();
            if !graphs.is_empty() {
                let mut g = Table::new("size,unfiltered,realizable,closed");
                for c in &graphs {
                    let unfiltered = if c.size <= 10 { c.unfiltered.to_string() } else { String::new() };
                    g.row(&[c.size.to_string(), unfiltered, c.realizable.to_string(), c.closed.to_string()]);
                }
                out.push('\n');
                out.push_str(&g.finish());
            }
            out
        }
    };
    emit(cli, &text)?;
    if (patterns.degree4, patterns.degree3, patterns.degree2) != (5, 7, 3) {
        return Err(Failure::violation(format!(
            "pattern counts ({}, {}, {}) differ from (5, 7, 3)",
            patterns.degree4, patterns.degree3, patterns.degree2
        )));
    }
    for w in graphs.windows(2) {
        if w[1].realizable > &w[0].realizable * 15u32 {
            return Err(Failure::violation(format!("contour graphs grow faster than 15 at size {}", w[1].size)));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PgsRecord {
    mode: &'static str,
    index: usize,
    orbit: usize,
    occupied: usize,
    density: String,
    grid: String,
}

fn pgs(cli: &Cli, mode: PgsMode, min_side: usize, max_side: usize, random: u64) -> Result<(), Failure> {
    if mode == PgsMode::Audit {
        return density_audit(cli, min_side, max_side, random);
    }
    let cat = GroundStateCatalog::build()?;
    let mut recs = Vec::new();
    let mut push = |label: &'static str, list: &[trimis::Configuration]| {
        let orbits = translation_orbits(list);
        for (k, c) in list.iter().enumerate() {
            let orbit = orbits.iter().position(|o| o.contains(&k)).expect("every state has an orbit");
            recs.push(PgsRecord {
                mode: label,
                index: k,
                orbit,
                occupied: c.count(),
                density: trimis::configspace::density(c).expect("torus").to_string(),
                grid: c.to_grid(),
            });
        }
    };
    if matches!(mode, PgsMode::Sparse | PgsMode::All) {
        push("sparse", &cat.sparse);
    }
    if matches!(mode, PgsMode::Dense | PgsMode::All) {
        push("dense", &cat.dense);
    }
    let text = match cli.format {
        Format::Json => json(&recs),
        Format::Csv => {
            let mut t = Table::new("mode,index,orbit,occupied,density,grid");
            for r in &recs {
                let rows: Vec<&str> = r.grid.lines().skip(1).collect();
                t.row(&[r.mode.into(), r.index.to_string(), r.orbit.to_string(), r.occupied.to_string(), r.density.clone(), rows.join("/")]);
            }
            t.finish()
        }
    };
    emit(cli, &text)?;
    if cat.sparse.len() != 14 || cat.dense.len() != 3 {
        return Err(Failure::violation(format!("found {} sparse and {} dense ground states", cat.sparse.len(), cat.dense.len())));
    }
    Ok(())
}

fn density_audit(cli: &Cli, lo: usize, hi: usize, random: u64) -> Result<(), Failure> {
    let exhaustive = density_extremality_audit(lo, hi)?;
    let rand = random_density_audit(7..=20, random, cli.seed);
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({ "exhaustive": exhaustive, "random": rand })),
        Format::Csv => {
            let mut t = Table::new("v1,v2,configurations,min_occupied,max_occupied,sparse,violations");
            for r in &exhaustive.rows {
                t.row(&[
                    r.v1.to_string(),
                    r.v2.to_string(),
                    r.configurations.to_string(),
                    r.min_occupied.to_string(),
                    r.max_occupied.to_string(),
                    r.sparse.to_string(),
                    r.violations.to_string(),
                ]);
            }
            t.row(&[
                "random".into(),
                "7..20".into(),
                rand.random_trials.to_string(),
                String::new(),
                String::new(),
                String::new(),
                rand.random_violations.to_string(),
            ]);
            t.finish()
        }
    };
    emit(cli, &text)?;
    let bad = exhaustive.violations() + rand.violations();
    if bad > 0 {
        return Err(Failure::violation(format!("{bad} torus MISs violate the density sandwich")));
    }
    Ok(())
}

#[derive(Serialize)]
struct PeierlsFamily {
    family: String,
    sweep: PeierlsSweep,
}

fn peierls(cli: &Cli, k: usize, single: bool, random: u64, flips: usize) -> Result<(), Failure> {
    if k == 0 {
        return Err(Failure::usage("--k must be positive"));
    }
    let cat = GroundStateCatalog::build()?;
    let mut fams = Vec::new();
    if single {
        fams.push(PeierlsFamily { family: "single-site".into(), sweep: single_site_peierls_sweep(&cat, k)? });
    }
    if random > 0 {
        fams.push(PeierlsFamily {
            family: format!("random {flips}-site"),
            sweep: random_peierls_sweep(&cat, k, flips, random, cli.seed)?,
        });
    }
    let text = match cli.format {
        Format::Json => json(&fams),
        Format::Csv => {
            let mut t = Table::new("family,torus,configurations,contours,violations,min_excess,max_blocks,max_defective_triangles");
            for x in &fams {
                let s = &x.sweep;
                t.row(&[
                    x.family.clone(),
                    format!("{0}x{0}", 7 * k),
                    s.configurations.to_string(),
                    s.contours.to_string(),
                    s.violations.to_string(),
                    s.min_excess.map(|e| e.to_string()).unwrap_or_default(),
                    s.max_blocks.to_string(),
                    s.max_defective_triangles.to_string(),
                ]);
            }
            t.finish()
        }
    };
    emit(cli, &text)?;
    let bad: usize = fams.iter().map(|x| x.sweep.violations).sum();
    if bad > 0 {
        return Err(Failure::violation(format!("{bad} contours violate the Peierls bound")));
    }
    Ok(())
}

fn delaunay(cli: &Cli, rho: &[String], triangulations: usize, sides: &[usize]) -> Result<(), Failure> {
    let radii: Vec<Radius> = rho.iter().map(|s| s.parse::<Radius>()).collect::<Result<_, _>>()?;
    let audits: Vec<_> = radii.iter().map(|&r| defective_area_audit(r)).collect();
    let tris = if triangulations > 0 { random_triangulation_audit(sides, triangulations, cli.seed, Radius::rho())? } else { Vec::new() };
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({ "area": audits, "triangulations": tris })),
        Format::Csv => {
            let mut t = Table::new(
                "rho,candidates,feasible,regular,defective,max_defective_area_over_sqrt3,max_defective_area,bound,passed",
            );
            for a in &audits {
                t.row(&[
                    a.rho.to_string(),
                    a.candidates.to_string(),
                    a.feasible.to_string(),
                    a.regular.to_string(),
                    a.defective.to_string(),
                    a.max_defective_area_over_sqrt3.to_string(),
                    format!("{:.9}", a.max_defective_area),
                    format!("{:.9}", a.bound),
                    a.passed.to_string(),
                ]);
            }
            let mut out = t.finish();
            if !tris.is_empty() {
                let mut t = Table::new("side,trials,count_law_failures,area_law_failures,edge_failures,empty_circle_failures,beyond_rho,defective_triangles");
                for r in &tris {
                    t.row(&[
                        r.side.to_string(),
                        r.trials.to_string(),
                        r.count_law_failures.to_string(),
                        r.area_law_failures.to_string(),
                        r.edge_failures.to_string(),
                        r.empty_circle_failures.to_string(),
                        r.beyond_rho.to_string(),
                        r.defective_triangles.to_string(),
                    ]);
                }
                out.push('\n');
                out.push_str(&t.finish());
            }
            out
        }
    };
    emit(cli, &text)?;
    if audits.iter().any(|a| !a.passed) {
        return Err(Failure::violation("a defective feasible triangle exceeds area 3*sqrt(3)/2"));
    }
    let bad: usize = tris.iter().map(|r| r.violations()).sum();
    if bad > 0 {
        return Err(Failure::violation(format!("{bad} triangulation law failures")));
    }
    Ok(())
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) => std::fs::read(p).map_err(Failure::io),
        None => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).map_err(Failure::io)?;
            Ok(buf)
        }
    }
}

fn parse_bits(raw: &[u8], bytes: bool) -> Result<Vec<bool>, Failure> {
    if bytes {
        return Ok(raw.iter().flat_map(|b| (0..8).rev().map(move |k| b >> k & 1 == 1)).collect());
    }
    raw.iter()
        .filter(|c| !c.is_ascii_whitespace())
        .map(|&c| match c {
            b'0' => Ok(false),
            b'1' => Ok(true),
            other => Err(Failure::usage(format!("unexpected character {:?} in bit input", other as char))),
        })
        .collect()
}

#[derive(Serialize)]
struct EncodeRecord {
    n: usize,
    m: usize,
    t1: usize,
    t2: usize,
    payload_bits: usize,
    bits_per_block: usize,
    rate: f64,
    window: String,
}

fn encode_cmd(cli: &Cli, n: usize, m: usize, input: Option<&Path>, bytes: bool, t1: Option<usize>) -> Result<(), Failure> {
    let bits = parse_bits(&read_input(input)?, bytes)?;
    let params = CodecParams::new(n, m)?;
    let segments = bits.len().div_ceil(params.bits_per_block).max(1);
    let (t1, t2) = match t1 {
        Some(0) => return Err(Failure::usage("--t1 must be positive")),
        Some(t) => (t, segments.div_ceil(t)),
        None => default_layout(segments),
    };
    let tiled = encode_with_layout(&bits, &params, t1, t2)?;
    let text = match cli.format {
        Format::Csv => tiled.to_text(),
        Format::Json => json(&EncodeRecord {
            n,
            m,
            t1,
            t2,
            payload_bits: bits.len(),
            bits_per_block: params.bits_per_block,
            rate: params.rate(),
            window: tiled.to_text(),
        }),
    };
    emit(cli, &text)
}

fn decode_cmd(cli: &Cli, input: Option<&Path>, bytes: bool) -> Result<(), Failure> {
    let raw = read_input(input)?;
    let text = String::from_utf8(raw).map_err(|_| Failure::usage("window input is not UTF-8 text"))?;
    let text = match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(v) => v.get("window").and_then(|w| w.as_str()).map(str::to_string).unwrap_or(text),
        Err(_) => text,
    };
    let tiled = TiledConfiguration::from_text(&text)?;
    let params = CodecParams::new(tiled.n, tiled.m)?;
    let bits = decode(&tiled, &params)?;
    if bytes {
        if bits.len() % 8 != 0 {
            return Err(Failure::usage(format!("{} payload bits do not form whole bytes", bits.len())));
        }
        let out: Vec<u8> = bits.chunks(8).map(|c| c.iter().fold(0u8, |a, &b| a << 1 | b as u8)).collect();
        return emit_bytes(cli, &out);
    }
    let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let text = match cli.format {
        Format::Csv => format!("{s}\n"),
        Format::Json => json(&serde_json::json!({ "payload_bits": bits.len(), "bits": s })),
    };
    emit(cli, &text)
}

#[derive(Serialize)]
struct SeriesRecord {
    lambda: f64,
    m: u64,
    c: f64,
    closed_form: f64,
    partial_sum: f64,
}

fn series(cli: &Cli, lambda: f64, ms: &[u64], c: f64, target: f64, terms: u64) -> Result<(), Failure> {
    if lambda.is_nan() || lambda <= 0.0 || lambda.is_infinite() {
        return Err(Failure::usage("--lambda must be a positive number"));
    }
    let recs: Vec<SeriesRecord> = ms
        .iter()
        .map(|&m| SeriesRecord {
            lambda,
            m,
            c,
            closed_form: series_bound(lambda, m, c),
            partial_sum: series_partial(lambda, m, c, 4 * m + terms),
        })
        .collect();
    let threshold = series_threshold_m(lambda, c, target, 10_000);
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({ "rows": recs, "target": target, "least_m": threshold })),
        Format::Csv => {
            let mut t = Table::new("lambda,m,C,closed_form,partial_sum,least_m_below_target");
            let least = threshold.map(|x| x.to_string()).unwrap_or_default();
            for r in &recs {
                t.row(&[
                    format!("{}", r.lambda),
                    r.m.to_string(),
                    format!("{}", r.c),
                    format!("{:.12e}", r.closed_form),
                    format!("{:.12e}", r.partial_sum),
                    least.clone(),
                ]);
            }
            t.finish()
        }
    };
    emit(cli, &text)
}
