//! Finite-scale views of the ends of a Cayley graph.
//!
//! A ball of radius `R` with the closed ball of radius `r` removed splits into
//! components; the ones reaching the outer sphere are "live" and stand in for
//! ends. Disjoint-path counts through a live component stand in for the size
//! of a thin end, and disjoint path systems from an inner sphere to the outer
//! sphere serve as ray prefixes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{build_ball, Ball, BallError};
use crate::graph::Graph;
use crate::group::{GenSet, GroupModel};

#[derive(Debug, Error)]
pub enum EndsError {
    #[error("source or target set is empty")]
    EmptyTerminalSet,
    #[error("vertex {0} is both a source and a target")]
    TerminalsOverlap(usize),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("inner radius {r} must be below the ball radius {radius}")]
    RadiusOutOfRange { r: usize, radius: usize },
    #[error("component {id} does not exist ({count} components)")]
    NoSuchComponent { id: usize, count: usize },
    #[error("component {0} does not reach the outer sphere")]
    DeadComponent(usize),
    #[error("start radius {start} must be at most the ball radius {radius}")]
    BadStartRadius { start: usize, radius: usize },
    #[error(transparent)]
    Ball(#[from] BallError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndComponent {
    /// Ball vertex indices, sorted.
    pub vertices: Vec<usize>,
    /// Whether the component contains a vertex of the outer sphere.
    pub live: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndProfile {
    pub inner_radius: usize,
    pub outer_radius: usize,
    /// Ordered by least vertex index.
    pub components: Vec<EndComponent>,
    pub live_count: usize,
}

impl EndProfile {
    fn component(&self, id: usize) -> Result<&EndComponent, EndsError> {
        self.components.get(id).ok_or(EndsError::NoSuchComponent {
            id,
            count: self.components.len(),
        })
    }

    pub fn live_ids(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&i| self.components[i].live)
            .collect()
    }
}

/// Components of the ball minus its closed radius-`r` ball.
pub fn live_components(ball: &Ball, r: usize) -> Result<EndProfile, EndsError> {
    let radius = ball.radius();
    if r >= radius {
        return Err(EndsError::RadiusOutOfRange { r, radius });
    }
    let keep: Vec<bool> = (0..ball.len()).map(|v| ball.dist(v) > r).collect();
    let components: Vec<EndComponent> = ball
        .graph()
        .components_where(&keep)
        .into_iter()
        .map(|vertices| EndComponent {
            live: vertices.iter().any(|&v| ball.dist(v) == radius),
            vertices,
        })
        .collect();
    let live_count = components.iter().filter(|c| c.live).count();
    Ok(EndProfile {
        inner_radius: r,
        outer_radius: radius,
        components,
        live_count,
    })
}

/// Number of live components of the radius-`outer` ball with the radius-`r`
/// ball removed.
pub fn end_count_estimate(
    model: &GroupModel,
    gens: &GenSet,
    r: usize,
    outer: usize,
) -> Result<usize, EndsError> {
    if r >= outer {
        return Err(EndsError::RadiusOutOfRange { r, radius: outer });
    }
    let ball = build_ball(model, gens, outer)?;
    Ok(live_components(&ball, r)?.live_count)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointPaths {
    pub count: usize,
    pub paths: Vec<Vec<usize>>,
}

/// Maximum number of pairwise vertex-disjoint paths from `sources` to
/// `targets`. Every vertex, terminals included, lies on at most one path, so
/// by Menger's theorem the count equals the least number of vertices whose
/// removal leaves no source-target path. Each returned path meets `sources`
/// only at its first vertex and `targets` only at its last; a vertex in both
/// sets is a one-vertex path.
pub fn max_disjoint_paths(
    g: &Graph,
    sources: &[usize],
    targets: &[usize],
) -> Result<DisjointPaths, EndsError> {
    disjoint_paths_in(g, sources, targets, None, false)
}

/// Maximum number of source-target paths that share no vertices except
/// terminals. Terminals have unlimited capacity and each direct
/// source-target edge counts as one path. The two sets must be disjoint. For single vertices `s`, `t` this
/// is the classical local connectivity (with `s`-`t` edges counted).
pub fn max_internally_disjoint_paths(
    g: &Graph,
    sources: &[usize],
    targets: &[usize],
) -> Result<DisjointPaths, EndsError> {
    disjoint_paths_in(g, sources, targets, None, true)
}

/// Allowed arcs: `arc(u, w)` decides whether a path may step from `u` to `w`.
type ArcFilter<'a> = &'a dyn Fn(usize, usize) -> bool;

fn disjoint_paths_in(
    g: &Graph,
    sources: &[usize],
    targets: &[usize],
    arc: Option<ArcFilter<'_>>,
    internal: bool,
) -> Result<DisjointPaths, EndsError> {
    if sources.is_empty() || targets.is_empty() {
        return Err(EndsError::EmptyTerminalSet);
    }
    let n = g.n();
    if let Some(&v) = sources.iter().chain(targets).find(|&&v| v >= n) {
        return Err(EndsError::VertexOutOfRange(v));
    }
    let mut is_source = vec![false; n];
    let mut is_target = vec![false; n];
    for &s in sources {
        is_source[s] = true;
    }
    for &t in targets {
        is_target[t] = true;
    }
    if internal {
        if let Some(v) = (0..n).find(|&v| is_source[v] && is_target[v]) {
            return Err(EndsError::TerminalsOverlap(v));
        }
    }
    let terminal = |v: usize| is_source[v] || is_target[v];
    let unbounded = n + 1;
    // Node 2v is v's entry, 2v+1 its exit; 2n is the super source, 2n+1 the sink.
    let (src, sink) = (2 * n, 2 * n + 1);
    let mut net = Network::new(2 * n + 2);
    for v in 0..n {
        let cap = if internal && terminal(v) {
            unbounded
        } else {
            1
        };
        net.add(2 * v, 2 * v + 1, cap);
    }
    for v in 0..n {
        for &w in g.neighbors(v) {
            if arc.is_none_or(|f| f(v, w)) {
                net.add(2 * v + 1, 2 * w, 1);
            }
        }
    }
    for &s in sources {
        net.add(src, 2 * s, if internal { unbounded } else { 1 });
    }
    for &t in targets {
        net.add(2 * t + 1, sink, if internal { unbounded } else { 1 });
    }
    let count = net.max_flow(src, sink);
    let mut paths: Vec<Vec<usize>> = net
        .decompose(src, sink, n)
        .into_iter()
        .map(remove_loops)
        .collect();
    if !internal {
        for p in &mut paths {
            let last_source = p.iter().rposition(|&v| is_source[v]).unwrap();
            p.drain(..last_source);
            let first_target = p.iter().position(|&v| is_target[v]).unwrap();
            p.truncate(first_target + 1);
        }
    }
    paths.sort();
    debug_assert_eq!(paths.len(), count);
    Ok(DisjointPaths { count, paths })
}

/// Shortcuts repeated vertices, which flow walks can only produce through
/// terminals of unlimited capacity.
fn remove_loops(walk: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for v in walk {
        if let Some(i) = out.iter().position(|&u| u == v) {
            out.truncate(i);
        }
        out.push(v);
    }
    out
}

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<usize>,
    flow_cap: Vec<usize>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            flow_cap: Vec::new(),
        }
    }

    /// Arc `2i` is forward, `2i + 1` its residual twin.
    fn add(&mut self, u: usize, v: usize, cap: usize) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.flow_cap.push(cap);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
        self.flow_cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0;
        let mut via = vec![usize::MAX; self.head.len()];
        loop {
            via.fill(usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            while let Some(u) = queue.pop_front() {
                for &a in &self.head[u] {
                    let w = self.to[a];
                    if self.cap[a] > 0 && w != s && via[w] == usize::MAX {
                        via[w] = a;
                        if w == t {
                            reached = true;
                            break;
                        }
                        queue.push_back(w);
                    }
                }
                if reached {
                    break;
                }
            }
            if !reached {
                return total;
            }
            let mut w = t;
            while w != s {
                let a = via[w];
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                w = self.to[a ^ 1];
            }
            total += 1;
        }
    }

    /// Splits the flow into source-sink walks, reported as graph vertices.
    fn decompose(&mut self, s: usize, t: usize, n: usize) -> Vec<Vec<usize>> {
        let mut used: Vec<usize> = (0..self.to.len())
            .map(|a| {
                if a % 2 == 0 {
                    self.flow_cap[a] - self.cap[a]
                } else {
                    0
                }
            })
            .collect();
        let mut paths = Vec::new();
        loop {
            let mut path = Vec::new();
            let mut u = s;
            while let Some(&a) = self.head[u].iter().find(|&&a| a % 2 == 0 && used[a] > 0) {
                used[a] -= 1;
                u = self.to[a];
                if u == t {
                    break;
                }
                if u < 2 * n && u.is_multiple_of(2) {
                    path.push(u / 2);
                }
            }
            if u != t {
                return paths;
            }
            paths.push(path);
        }
    }
}

/// Disjoint-path count from the first sphere outside the removed ball to the
/// outer sphere, inside one live component.
pub fn thin_end_size_at_scale(
    ball: &Ball,
    profile: &EndProfile,
    component_id: usize,
) -> Result<usize, EndsError> {
    let comp = profile.component(component_id)?;
    if !comp.live {
        return Err(EndsError::DeadComponent(component_id));
    }
    let inner = profile.inner_radius + 1;
    let outer = profile.outer_radius;
    let sub = ball.graph().induced(&comp.vertices);
    let local = |d: usize| -> Vec<usize> {
        (0..comp.vertices.len())
            .filter(|&i| ball.dist(comp.vertices[i]) == d)
            .collect()
    };
    let (sources, targets) = (local(inner), local(outer));
    Ok(max_disjoint_paths(&sub, &sources, &targets)?.count)
}

/// `m` disjoint paths of a ball from its start sphere to its outer sphere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaySystem {
    pub component_id: usize,
    pub start_radius: usize,
    /// Whether every path moves one step outward at each edge.
    pub geodesic: bool,
    pub paths: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayOutcome {
    Rays(RaySystem),
    /// Fewer than the requested number of disjoint paths exist; the maximum.
    Insufficient(usize),
}

impl RaySystem {
    /// Checks the path invariants against the ball: disjoint, ball paths,
    /// starting on the start sphere and ending on the outer sphere.
    pub fn check(&self, ball: &Ball) -> Result<(), String> {
        self.check_paths(ball)?;
        match self
            .paths
            .iter()
            .position(|p| ball.dist(p[0]) != self.start_radius)
        {
            Some(i) => Err(format!(
                "path {i} does not start on sphere {}",
                self.start_radius
            )),
            None => Ok(()),
        }
    }

    /// The invariants other than the common start sphere.
    pub fn check_paths(&self, ball: &Ball) -> Result<(), String> {
        let mut seen = vec![false; ball.len()];
        for (i, p) in self.paths.iter().enumerate() {
            let Some(&last) = p.last() else {
                return Err(format!("path {i} is empty"));
            };
            if p.iter().any(|&v| v >= ball.len()) {
                return Err(format!("path {i} leaves the ball"));
            }
            if ball.dist(last) != ball.radius() {
                return Err(format!("path {i} does not reach the outer sphere"));
            }
            for &v in p {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(format!("vertex {v} is used twice"));
                }
            }
            if let Some(w) = p.windows(2).find(|w| !ball.graph().has_edge(w[0], w[1])) {
                return Err(format!("path {i} steps along a non-edge {:?}", w));
            }
        }
        Ok(())
    }
}

/// Extracts `m` disjoint paths from sphere `start_radius` to the outer sphere
/// that lie beyond the removed ball inside the given live component (or, when
/// `start_radius` is inside the removed ball, enter the component from it).
///
/// Paths that only move outward are tried first; if there are not enough of
/// those, arbitrary paths are allowed.
pub fn extract_rays(
    ball: &Ball,
    profile: &EndProfile,
    component_id: usize,
    m: usize,
    start_radius: usize,
) -> Result<RayOutcome, EndsError> {
    let comp = profile.component(component_id)?;
    if !comp.live {
        return Err(EndsError::DeadComponent(component_id));
    }
    let outer = profile.outer_radius;
    if start_radius > outer {
        return Err(EndsError::BadStartRadius {
            start: start_radius,
            radius: outer,
        });
    }
    let mut in_comp = vec![false; ball.len()];
    for &v in &comp.vertices {
        in_comp[v] = true;
    }
    let r = profile.inner_radius;
    let allowed: Vec<bool> = (0..ball.len())
        .map(|v| ball.dist(v) >= start_radius && (in_comp[v] || ball.dist(v) <= r))
        .collect();
    let sources: Vec<usize> = (0..ball.len())
        .filter(|&v| allowed[v] && ball.dist(v) == start_radius)
        .collect();
    let targets: Vec<usize> = comp
        .vertices
        .iter()
        .copied()
        .filter(|&v| ball.dist(v) == outer)
        .collect();
    if sources.is_empty() {
        return Ok(RayOutcome::Insufficient(0));
    }
    let geodesic =
        |u: usize, w: usize| allowed[u] && allowed[w] && ball.dist(w) == ball.dist(u) + 1;
    let any = |u: usize, w: usize| allowed[u] && allowed[w];
    let mut best = 0;
    for (is_geodesic, filter) in [
        (true, &geodesic as ArcFilter<'_>),
        (false, &any as ArcFilter<'_>),
    ] {
        let found = disjoint_paths_in(ball.graph(), &sources, &targets, Some(filter), false)?;
        best = best.max(found.count);
        if found.count >= m {
            let mut paths = found.paths;
            paths.truncate(m);
            let rays = RaySystem {
                component_id,
                start_radius,
                geodesic: is_geodesic,
                paths,
            };
            debug_assert!(rays.check(ball).is_ok());
            return Ok(RayOutcome::Rays(rays));
        }
    }
    Ok(RayOutcome::Insufficient(best))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub size: usize,
    pub live: bool,
    /// Disjoint-path count for live components.
    pub disjoint_paths: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndsReport {
    pub r: usize,
    #[serde(rename = "R")]
    pub outer: usize,
    pub components: Vec<ComponentReport>,
    pub end_count_estimate: usize,
}

pub fn ends_report(ball: &Ball, r: usize) -> Result<EndsReport, EndsError> {
    let profile = live_components(ball, r)?;
    let components = (0..profile.components.len())
        .map(|id| {
            let c = &profile.components[id];
            Ok(ComponentReport {
                size: c.vertices.len(),
                live: c.live,
                disjoint_paths: if c.live {
                    Some(thin_end_size_at_scale(ball, &profile, id)?)
                } else {
                    None
                },
            })
        })
        .collect::<Result<Vec<_>, EndsError>>()?;
    Ok(EndsReport {
        r,
        outer: profile.outer_radius,
        components,
        end_count_estimate: profile.live_count,
    })
}
