//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! nonzero status if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cayminor::construction::{decompose_23, detour_offsets};
use cayminor::ends::{
    end_count_estimate, live_components, max_disjoint_paths, thin_end_size_at_scale,
};
use cayminor::generate::{connected_graphs, random_suite};
use cayminor::group::Key;
use cayminor::minor::{brute_force_minor, find_minor, hadwiger_lower_bound, Budget, MinorOutcome};
use cayminor::{build_ball, power_union, Ball, GenSet, Graph, GroupModel};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cayminor"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let value: Value = serde_json::from_str(stdout.trim())
        .map_err(|e| format!("`{}` printed non-JSON ({e}): {stdout}", args.join(" ")))?;
    if !out.status.success() {
        return Err(format!("`{}` failed: {value}", args.join(" ")));
    }
    Ok(value)
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn ball(spec: &str, gens: Option<&str>, radius: usize) -> Ball {
    let g = GroupModel::from_spec(spec).unwrap();
    let s = match gens {
        Some(w) => GenSet::parse(&g, w).unwrap(),
        None => GenSet::defaults(&g),
    };
    build_ball(&g, &s, radius).unwrap()
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn z5_dichotomy(dir: &Path) -> Outcome {
    let start = Instant::now();
    let cert = dir.join("z5_cert.json");
    let graph = dir.join("z5_graph.json");
    let found = cli(&[
        "minor",
        "--group",
        "cyclic:5",
        "--gens",
        "all",
        "--radius",
        "1",
        "--pattern",
        "k:5",
        "--cert-out",
        cert.to_str().unwrap(),
        "--graph-out",
        graph.to_str().unwrap(),
    ])?;
    check(found["verdict"] == "found", "K5 not found in Cay(Z5, all)")?;
    let verified = cli(&[
        "verify",
        "--graph",
        graph.to_str().unwrap(),
        "--cert",
        cert.to_str().unwrap(),
    ])?;
    check(verified["accepted"] == true, "K5 certificate rejected")?;
    let k4 = cli(&[
        "minor",
        "--group",
        "cyclic:5",
        "--gens",
        "1",
        "--radius",
        "2",
        "--pattern",
        "k:4",
    ])?;
    check(
        k4["verdict"] == "absent",
        format!("K4 verdict {}", k4["verdict"]),
    )?;
    let planar = cli(&[
        "planar", "--group", "cyclic:5", "--gens", "1", "--radius", "2",
    ])?;
    check(
        planar["verdict"] == "planar",
        format!("planarity verdict {}", planar["verdict"]),
    )?;
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(1),
        format!("took {}", secs(elapsed)),
    )?;
    Ok(format!(
        "K5 found and verified, K4 absent, C5 planar in {}",
        secs(elapsed)
    ))
}

fn z2_planarity() -> Outcome {
    let start = Instant::now();
    let planar = cli(&["planar", "--group", "z^2", "--radius", "6"])?;
    let elapsed = start.elapsed();
    let searches = planar["searches"].as_array().cloned().unwrap_or_default();
    let absent = |name: &str| {
        searches
            .iter()
            .any(|s| s["pattern"] == name && s["verdict"] == "absent")
    };
    check(
        planar["verdict"] == "planar",
        format!("verdict {}", planar["verdict"]),
    )?;
    check(
        absent("k:5") && absent("k:3,3"),
        "K5 and K3,3 searches were not both absent",
    )?;
    check(
        elapsed < Duration::from_secs(300),
        format!("took {}", secs(elapsed)),
    )?;
    let expansions: Vec<String> = searches
        .iter()
        .map(|s| s["expansions"].to_string())
        .collect();
    Ok(format!(
        "radius 6, {} vertices: K3,3 and K5 absent ({} expansions) in {}",
        planar["vertices"],
        expansions.join(" / "),
        secs(elapsed)
    ))
}

fn tree_exclusion() -> Outcome {
    for spec in ["free:2", "freeprod:cyclic:2,cyclic:2,cyclic:2"] {
        for radius in 1..=6 {
            let b = ball(spec, None, radius);
            let k3 = find_minor(b.graph(), &Graph::complete(3), Budget::UNLIMITED)
                .map_err(|e| e.to_string())?;
            check(
                k3 == MinorOutcome::Absent,
                format!("{spec} radius {radius}: K3 {}", k3.verdict()),
            )?;
            let (h, _) =
                hadwiger_lower_bound(b.graph(), Budget::DEFAULT).map_err(|e| e.to_string())?;
            check(
                h == 2,
                format!("{spec} radius {radius}: hadwiger bound {h}"),
            )?;
        }
    }
    Ok("free(2) and Z2*Z2*Z2, radii 1..=6: K3 absent, hadwiger bound 2".into())
}

/// Straight-line drawing of a Z^2 ball from its coordinates: every edge is a
/// unit lattice segment and distinct vertices sit at distinct points, so no
/// two edges cross.
fn lattice_drawing_is_planar(b: &Ball) -> bool {
    let coords: Vec<(i64, i64)> = b
        .vertices()
        .iter()
        .map(|e| match e.key() {
            Key::Abelian(v) => (v[0], v[1]),
            _ => unreachable!(),
        })
        .collect();
    let mut sorted = coords.clone();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len() == coords.len()
        && b.graph().edges().iter().all(|&(u, v)| {
            let (a, c) = (coords[u], coords[v]);
            (a.0 - c.0).abs() + (a.1 - c.1).abs() == 1
        })
}

fn construction(dir: &Path) -> Outcome {
    let mut notes = Vec::new();
    for (m, radius) in [(4, 24), (5, 36), (6, 48)] {
        let cert = dir.join(format!("construct_{m}.json"));
        let graph = dir.join(format!("boosted_{m}.json"));
        let (m_s, r_s) = (m.to_string(), radius.to_string());
        let args = [
            "construct",
            "--group",
            "z^2",
            "--m",
            &m_s,
            "--radius",
            &r_s,
            "--cert-out",
            cert.to_str().unwrap(),
            "--graph-out",
            graph.to_str().unwrap(),
        ];
        let start = Instant::now();
        let first = cli(&args)?;
        let elapsed = start.elapsed();
        let second = cli(&args)?;
        check(
            first["verified"] == true,
            format!("m={m}: certificate not verified"),
        )?;
        check(
            first["certificate"] == second["certificate"] && first["trace"] == second["trace"],
            format!("m={m}: two runs differ"),
        )?;
        check(
            elapsed < Duration::from_secs(120),
            format!("m={m}: took {}", secs(elapsed)),
        )?;
        let verified = cli(&[
            "verify",
            "--graph",
            graph.to_str().unwrap(),
            "--cert",
            cert.to_str().unwrap(),
        ])?;
        check(
            verified["accepted"] == true,
            format!("m={m}: verify rejected the exported certificate"),
        )?;
        check(
            verified["pattern"]["n"] == m
                && first["boosted"]["gens"].as_array().map(Vec::len) == Some(24),
            format!("m={m}: wrong pattern or boosted generating set"),
        )?;
        let base = ball("z^2", None, radius);
        check(
            lattice_drawing_is_planar(&base),
            format!("m={m}: base ball drawing not planar"),
        )?;
        notes.push(format!("K{m}@R{radius} {}", secs(elapsed)));
    }
    Ok(format!(
        "{}; deterministic; un-boosted balls are planar lattice drawings (no K5/K6)",
        notes.join(", ")
    ))
}

fn ends_table() -> Outcome {
    let estimate = |spec: &str, r: usize, outer: usize| {
        let g = GroupModel::from_spec(spec).unwrap();
        end_count_estimate(&g, &GenSet::defaults(&g), r, outer).map_err(|e| e.to_string())
    };
    for outer in 3..=6 {
        for r in 0..outer {
            let g = GroupModel::from_spec("cyclic:5").unwrap();
            let n = end_count_estimate(&g, &GenSet::parse(&g, "1").unwrap(), r, outer)
                .map_err(|e| e.to_string())?;
            check(n == 0, format!("Z5 R={outer} r={r}: {n}"))?;
        }
    }
    for spec in ["z", "freeprod:cyclic:2,cyclic:2"] {
        for r in 0..6 {
            let n = estimate(spec, r, 8)?;
            check(n == 2, format!("{spec} r={r}: {n}"))?;
        }
    }
    for r in 0..8 - 1 {
        let n = estimate("z^2", r, 8)?;
        check(n == 1, format!("Z^2 R=8 r={r}: {n}"))?;
    }
    let free = estimate("free:2", 1, 4)?;
    check(free >= 4, format!("free(2) r=1: {free}"))?;
    for spec in ["z", "freeprod:cyclic:2,cyclic:2"] {
        let b = ball(spec, None, 8);
        let profile = live_components(&b, 2).map_err(|e| e.to_string())?;
        for id in profile.live_ids() {
            let size = thin_end_size_at_scale(&b, &profile, id).map_err(|e| e.to_string())?;
            check(
                size == 1,
                format!("{spec} component {id}: thin-end size {size}"),
            )?;
        }
    }
    Ok(format!(
        "Z5 0, Z 2, D_inf 2, Z^2 1, free(2) {free}; thin-end size 1 for Z and D_inf"
    ))
}

fn oracle_equivalence() -> Outcome {
    let patterns = [
        Graph::complete(3),
        Graph::complete(4),
        Graph::complete(5),
        Graph::complete_bipartite(3, 3),
    ];
    let hosts: Vec<Graph> = (1..=7)
        .flat_map(connected_graphs)
        .chain(random_suite(200, 10, 2024))
        .collect();
    let mut disagreements = 0;
    for host in &hosts {
        for p in &patterns {
            let exact = find_minor(host, p, Budget::UNLIMITED).map_err(|e| e.to_string())?;
            let brute = brute_force_minor(host, p).map_err(|e| e.to_string())?;
            if exact.is_found() != brute || exact == MinorOutcome::BudgetExhausted {
                disagreements += 1;
            }
        }
    }
    check(disagreements == 0, format!("{disagreements} disagreements"))?;
    Ok(format!(
        "{} hosts x 4 patterns, 0 disagreements",
        hosts.len()
    ))
}

/// Smallest vertex set meeting every source-target path, by exhaustion.
fn brute_min_cut(g: &Graph, sources: &[usize], targets: &[usize]) -> usize {
    let n = g.n();
    let mut best = n;
    for mask in 0u32..1 << n {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let alive = |v: usize| mask >> v & 1 == 0;
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = sources.iter().copied().filter(|&s| alive(s)).collect();
        for &s in &stack {
            seen[s] = true;
        }
        let mut separated = true;
        while let Some(v) = stack.pop() {
            if targets.contains(&v) {
                separated = false;
                break;
            }
            for &w in g.neighbors(v) {
                if alive(w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if separated {
            best = size;
        }
    }
    best
}

fn menger() -> Outcome {
    let hosts = random_suite(100, 10, 7);
    let mut disagreements = 0;
    for (i, g) in hosts.iter().enumerate() {
        let n = g.n();
        let a = 1 + i % 3;
        let b = 1 + (i / 3) % 3;
        let sources: Vec<usize> = (0..a).collect();
        let targets: Vec<usize> = (n - b..n).collect();
        let flow = max_disjoint_paths(g, &sources, &targets).map_err(|e| e.to_string())?;
        if flow.count != brute_min_cut(g, &sources, &targets) {
            disagreements += 1;
        }
    }
    check(disagreements == 0, format!("{disagreements} disagreements"))?;
    Ok(format!("{} graphs, 0 disagreements", hosts.len()))
}

fn boosted_distance() -> Outcome {
    for (spec, radius) in [("z^2", 9), ("free:2", 6)] {
        let base = ball(spec, None, radius);
        let boosted_gens = power_union(base.model(), base.gens(), 3).map_err(|e| e.to_string())?;
        let boosted = build_ball(base.model(), &boosted_gens, radius.div_ceil(3))
            .map_err(|e| e.to_string())?;
        for v in 0..base.len() {
            let d = base.dist(v);
            let w = boosted
                .index_of(base.element(v))
                .ok_or_else(|| format!("{spec}: vertex {v} missing from the boosted ball"))?;
            check(
                boosted.dist(w) == d.div_ceil(3),
                format!(
                    "{spec}: vertex at distance {d} has boosted distance {}",
                    boosted.dist(w)
                ),
            )?;
        }
    }
    Ok("Z^2 radius 9 and free(2) radius 6: every vertex satisfies the law".into())
}

fn detour_scheme() -> Outcome {
    for d in 2..=100 {
        let (l, lp) = detour_offsets(d).map_err(|e| e.to_string())?;
        check(
            l.first() == Some(&0) && l.last() == Some(&d),
            format!("d={d}: L endpoints"),
        )?;
        check(
            lp.first() == Some(&1) && lp.last() == Some(&(d + 1)),
            format!("d={d}: L' endpoints"),
        )?;
        check(
            l.iter().all(|x| !lp.contains(x)),
            format!("d={d}: L and L' overlap"),
        )?;
        for seq in [&l, &lp] {
            check(
                seq.windows(2).all(|w| matches!(w[1] - w[0], 2 | 3)),
                format!("d={d}: gap outside {{2, 3}}"),
            )?;
        }
    }
    for n in 2..=1000 {
        let (r, s) = decompose_23(n).map_err(|e| e.to_string())?;
        check(2 * r + 3 * s == n, format!("N={n}: 2*{r} + 3*{s}"))?;
    }
    Ok("d in 2..=100 and N in 2..=1000".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        ("1 Z5 dichotomy", Box::new(|| z5_dichotomy(dir.path()))),
        ("2 Z^2 planarity", Box::new(z2_planarity)),
        ("3 tree exclusion", Box::new(tree_exclusion)),
        (
            "4 construction end-to-end",
            Box::new(|| construction(dir.path())),
        ),
        ("5 ends table", Box::new(ends_table)),
        ("6 oracle equivalence", Box::new(oracle_equivalence)),
        ("7 Menger property", Box::new(menger)),
        ("8 boosted-distance law", Box::new(boosted_distance)),
        ("9 L/L' scheme", Box::new(detour_scheme)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
