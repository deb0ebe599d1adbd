use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use cayminor::construction::build_clique_minor;
use cayminor::ends::{ends_report, extract_rays, live_components, RayOutcome, RaySystem};
use cayminor::generate::random_suite;
use cayminor::minor::{
    brute_force_minor, find_minor_with_stats, hadwiger_lower_bound, CertificateJson,
};
use cayminor::{
    build_ball, verify_embedding, Ball, Budget, GenSet, Graph, GroupModel, MinorEmbedding,
    MinorOutcome,
};
use serde_json::{json, Value};

use crate::args::{
    BallArgs, ConstructArgs, EndsArgs, GroupArgs, MinorArgs, OracleArgs, RayChoice, RaysArgs,
    SearchArgs, VerifyArgs,
};
use crate::pattern::parse_pattern;

/// A command result: the JSON report and, when it makes sense, a graph for
/// DOT output.
pub struct Report {
    pub json: Value,
    pub dot: Option<String>,
}

fn load_ball(args: &GroupArgs) -> Result<Ball> {
    let model = GroupModel::from_spec(&args.group)?;
    let gens = match &args.gens {
        Some(list) => GenSet::parse(&model, list)?,
        None => GenSet::defaults(&model),
    };
    let ball = build_ball(&model, &gens, args.radius)?;
    log::info!("ball of radius {} has {} vertices", args.radius, ball.len());
    Ok(ball)
}

fn ball_summary(ball: &Ball) -> Value {
    let mut sphere_sizes = vec![0usize; ball.radius() + 1];
    for &d in ball.distances() {
        sphere_sizes[d] += 1;
    }
    json!({
        "group": ball.model().description(),
        "gens": ball.gens().elements().iter().map(|e| ball.model().format(e)).collect::<Vec<_>>(),
        "radius": ball.radius(),
        "vertices": ball.len(),
        "edges": ball.graph().edge_count(),
        "sphere_sizes": sphere_sizes,
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

pub fn ball(args: &BallArgs) -> Result<Report> {
    let b = load_ball(&args.group)?;
    if let Some(path) = &args.graph_out {
        write_json(path, &b.to_json())?;
    }
    let mut json = ball_summary(&b);
    json["command"] = "ball".into();
    json["generation"] = serde_json::to_value(b.model().generates_check(b.gens(), b.radius()))?;
    json["acyclic"] = b.graph().is_forest().into();
    Ok(Report {
        json,
        dot: Some(b.to_dot()),
    })
}

fn certificate_value(emb: &MinorEmbedding) -> Result<Value> {
    Ok(serde_json::to_value(emb.to_json())?)
}

fn export_search(args: &SearchArgs, ball: &Ball, emb: Option<&MinorEmbedding>) -> Result<()> {
    if let Some(path) = &args.graph_out {
        write_json(path, &ball.to_json())?;
    }
    if let (Some(path), Some(emb)) = (&args.cert_out, emb) {
        write_json(path, &emb.to_json())?;
    }
    Ok(())
}

pub fn minor(args: &MinorArgs) -> Result<Report> {
    let pattern = parse_pattern(&args.pattern)?;
    let ball = load_ball(&args.search.group)?;
    let start = Instant::now();
    let (outcome, stats) =
        find_minor_with_stats(ball.graph(), &pattern, Budget(args.search.budget.budget))?;
    let elapsed = elapsed_ms(start);
    let emb = match &outcome {
        MinorOutcome::Found(e) => Some(e),
        _ => None,
    };
    export_search(&args.search, &ball, emb)?;
    let mut json = ball_summary(&ball);
    json["command"] = "minor".into();
    json["pattern"] = serde_json::to_value(pattern.to_json())?;
    json["verdict"] = outcome.verdict().into();
    json["verified"] = match emb {
        Some(e) => verify_embedding(ball.graph(), e)?.into(),
        None => Value::Null,
    };
    json["certificate"] = match emb {
        Some(e) => certificate_value(e)?,
        None => Value::Null,
    };
    json["expansions"] = stats.expansions.into();
    json["largest_piece"] = stats.largest_piece.into();
    json["elapsed_ms"] = elapsed.into();
    Ok(Report {
        json,
        dot: Some(ball.to_dot()),
    })
}

pub fn planar(args: &SearchArgs) -> Result<Report> {
    let ball = load_ball(&args.group)?;
    let start = Instant::now();
    let mut searches = Vec::new();
    let mut verdict = "planar";
    let mut witness = None;
    for (name, pattern) in [
        ("k:3,3", Graph::complete_bipartite(3, 3)),
        ("k:5", Graph::complete(5)),
    ] {
        let (outcome, stats) =
            find_minor_with_stats(ball.graph(), &pattern, Budget(args.budget.budget))?;
        searches.push(json!({
            "pattern": name,
            "verdict": outcome.verdict(),
            "expansions": stats.expansions,
        }));
        match outcome {
            MinorOutcome::Found(e) => {
                verdict = "non-planar";
                witness = Some(e);
                break;
            }
            MinorOutcome::BudgetExhausted => verdict = "budget-exhausted",
            MinorOutcome::Absent => {}
        }
    }
    let elapsed = elapsed_ms(start);
    export_search(args, &ball, witness.as_ref())?;
    let mut json = ball_summary(&ball);
    json["command"] = "planar".into();
    json["verdict"] = verdict.into();
    json["searches"] = searches.into();
    json["certificate"] = match &witness {
        Some(e) => certificate_value(e)?,
        None => Value::Null,
    };
    json["elapsed_ms"] = elapsed.into();
    Ok(Report {
        json,
        dot: Some(ball.to_dot()),
    })
}

pub fn hadwiger(args: &SearchArgs) -> Result<Report> {
    let ball = load_ball(&args.group)?;
    let start = Instant::now();
    let (m, emb) = hadwiger_lower_bound(ball.graph(), Budget(args.budget.budget))?;
    let elapsed = elapsed_ms(start);
    export_search(args, &ball, Some(&emb))?;
    let mut json = ball_summary(&ball);
    json["command"] = "hadwiger".into();
    json["lower_bound"] = m.into();
    json["certificate"] = certificate_value(&emb)?;
    json["elapsed_ms"] = elapsed.into();
    Ok(Report {
        json,
        dot: Some(ball.to_dot()),
    })
}

pub fn ends(args: &EndsArgs) -> Result<Report> {
    let ball = load_ball(&args.group)?;
    let report = ends_report(&ball, args.inner)?;
    let mut json = ball_summary(&ball);
    json["command"] = "ends".into();
    json["inner"] = args.inner.into();
    json["live_components"] = report.end_count_estimate.into();
    json["report"] = serde_json::to_value(&report)?;
    Ok(Report { json, dot: None })
}

/// Picks rays as requested, or at the smallest start sphere that yields `m`
/// disjoint paths.
fn choose_rays(ball: &Ball, choice: &RayChoice) -> Result<RaySystem> {
    if choice.m == 0 {
        bail!("--m must be at least 1");
    }
    let profile = live_components(ball, choice.inner)?;
    let component = match choice.component {
        Some(id) => id,
        None => match profile.live_ids().first() {
            Some(&id) => id,
            None => bail!("no live component outside radius {}", choice.inner),
        },
    };
    let starts: Vec<usize> = match choice.start_radius {
        Some(s) => vec![s],
        None => (1..=ball.radius()).collect(),
    };
    let mut best = 0;
    for start in starts {
        match extract_rays(ball, &profile, component, choice.m, start)? {
            RayOutcome::Rays(rays) => return Ok(rays),
            RayOutcome::Insufficient(k) => best = best.max(k),
        }
    }
    bail!(
        "component {component} has at most {best} disjoint rays; {} requested",
        choice.m
    )
}

pub fn rays(args: &RaysArgs) -> Result<Report> {
    let ball = load_ball(&args.group)?;
    let rays = choose_rays(&ball, &args.rays)?;
    let mut json = ball_summary(&ball);
    json["command"] = "rays".into();
    json["rays"] = serde_json::to_value(&rays)?;
    json["ray_labels"] = rays
        .paths
        .iter()
        .map(|p| {
            p.iter()
                .map(|&v| ball.model().format(ball.element(v)))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into();
    Ok(Report { json, dot: None })
}

pub fn construct(args: &ConstructArgs) -> Result<Report> {
    let ball = load_ball(&args.group)?;
    let start = Instant::now();
    let rays = choose_rays(&ball, &args.rays)?;
    let result = build_clique_minor(&ball, &rays)?;
    let verified = verify_embedding(result.boosted.graph(), &result.embedding)?;
    if !verified {
        bail!("assembled certificate failed verification");
    }
    let elapsed = elapsed_ms(start);
    if let Some(path) = &args.graph_out {
        write_json(path, &result.boosted.to_json())?;
    }
    if let Some(path) = &args.cert_out {
        write_json(path, &result.embedding.to_json())?;
    }
    let mut json = ball_summary(&ball);
    json["command"] = "construct".into();
    json["m"] = args.rays.m.into();
    json["rays"] = serde_json::to_value(&rays)?;
    json["boosted"] = ball_summary(&result.boosted);
    json["frozen_radius"] = result.frozen_radius.into();
    json["trace"] = serde_json::to_value(&result.trace)?;
    json["verified"] = verified.into();
    json["certificate"] = certificate_value(&result.embedding)?;
    json["elapsed_ms"] = elapsed.into();
    Ok(Report {
        json,
        dot: Some(result.boosted.to_dot()),
    })
}

pub fn verify(args: &VerifyArgs) -> Result<Report> {
    let graph_text = fs::read_to_string(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let graph = Graph::from_json_value(&serde_json::from_str(&graph_text)?)?;
    let cert_text = fs::read_to_string(&args.cert)
        .with_context(|| format!("reading {}", args.cert.display()))?;
    let cert: CertificateJson = serde_json::from_str(&cert_text)?;
    let emb = MinorEmbedding::from_json(&cert)?;
    let accepted = verify_embedding(&graph, &emb)?;
    let json = json!({
        "command": "verify",
        "graph_vertices": graph.n(),
        "graph_edges": graph.edge_count(),
        "pattern": emb.pattern.to_json(),
        "accepted": accepted,
        "verdict": if accepted { "accepted" } else { "rejected" },
    });
    Ok(Report { json, dot: None })
}

pub fn oracle(args: &OracleArgs) -> Result<Report> {
    let patterns = [
        ("k:3", Graph::complete(3)),
        ("k:4", Graph::complete(4)),
        ("k:5", Graph::complete(5)),
        ("k:3,3", Graph::complete_bipartite(3, 3)),
    ];
    let start = Instant::now();
    let hosts = random_suite(args.count, args.max_n, args.seed);
    let mut disagreements = Vec::new();
    let mut exhausted = 0;
    let mut comparisons = 0;
    for (i, host) in hosts.iter().enumerate() {
        for (name, pattern) in &patterns {
            let exact = match cayminor::find_minor(host, pattern, Budget(args.budget.budget))? {
                MinorOutcome::Found(_) => true,
                MinorOutcome::Absent => false,
                MinorOutcome::BudgetExhausted => {
                    exhausted += 1;
                    continue;
                }
            };
            comparisons += 1;
            if exact != brute_force_minor(host, pattern)? {
                disagreements.push(json!({"graph": i, "pattern": name, "search": exact}));
            }
        }
    }
    let json = json!({
        "command": "oracle",
        "seed": args.seed,
        "graphs": hosts.len(),
        "comparisons": comparisons,
        "budget_exhausted": exhausted,
        "disagreements": disagreements,
        "elapsed_ms": elapsed_ms(start),
    });
    Ok(Report { json, dot: None })
}
