//! Clique minors from disjoint rays.
//!
//! Given `m` disjoint ray prefixes in a ball of `Cay(G, S)`, connect every
//! pair of rays by a path outside a growing frozen ball about the identity.
//! A connector that has to cross a third ray is repaired by rerouting that
//! ray with hops of length 2 or 3, which are edges of `Cay(G, T)` for
//! `T = S ∪ S² ∪ S³`. Each ray plus half of each of its connectors becomes a
//! branch set of a `K_m` minor of the `T`-ball.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{build_ball, Ball, BallError};
use crate::ends::RaySystem;
use crate::graph::Graph;
use crate::group::{power_union, GroupError};
use crate::minor::{verify_embedding, MinorEmbedding};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("cannot write {0} as 2r + 3s")]
    TooShort(usize),
    #[error("a detour needs a span of at least 2, got {0}")]
    SegmentTooShort(usize),
    #[error(
        "pair ({}, {}): a ray has no tail outside the frozen ball; try radius {suggested_radius}",
        pair.0, pair.1
    )]
    FrozenRegionExhausted {
        pair: (usize, usize),
        suggested_radius: usize,
    },
    #[error("pair ({}, {}): no connector exists outside the frozen ball", pair.0, pair.1)]
    RoutingFailed { pair: (usize, usize) },
    #[error("invalid ray system: {0}")]
    BadRays(String),
    #[error("pair ({}, {}) is not valid here", .0 .0, .0 .1)]
    BadPair((usize, usize)),
    #[error("construction invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Writes `n = 2r + 3s` with `s ∈ {0, 1}`.
pub fn decompose_23(n: usize) -> Result<(usize, usize), ConstructionError> {
    match n {
        0 | 1 => Err(ConstructionError::TooShort(n)),
        _ if n.is_multiple_of(2) => Ok((n / 2, 0)),
        _ => Ok(((n - 3) / 2, 1)),
    }
}

/// Ray offsets used by a detour across a span of `d` ray edges.
///
/// The connector takes the offsets `L` from `0` to `d` and the ray keeps the
/// offsets `L'` from `1` to `d + 1`. Both step by 2 when `d` is even; when `d`
/// is odd both start with a step of 3. The sets are disjoint and every step
/// is 2 or 3.
pub fn detour_offsets(d: usize) -> Result<(Vec<usize>, Vec<usize>), ConstructionError> {
    if d < 2 {
        return Err(ConstructionError::SegmentTooShort(d));
    }
    let (twos, threes) = decompose_23(d)?;
    let mut l = vec![0];
    for _ in 0..threes {
        l.push(l.last().unwrap() + 3);
    }
    for _ in 0..twos {
        l.push(l.last().unwrap() + 2);
    }
    let l_prime = l.iter().map(|&o| o + 1).collect();
    Ok((l, l_prime))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairCase {
    /// The connector met the ray once; that vertex leaves the ray.
    SingleVertex,
    /// The connector met the ray in two consecutive vertices; both leave it.
    TwoVertices,
    /// The connector met the ray across a longer span; both are rerouted.
    Detour,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairRecord {
    pub ray: usize,
    pub case: RepairCase,
    /// Number of ray edges between the first and last crossing.
    pub span: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTrace {
    pub pair: (usize, usize),
    pub shell_width: usize,
    pub crossed_rays: bool,
    pub repairs: Vec<RepairRecord>,
    pub connector_len: usize,
    pub frozen_radius: usize,
}

/// A construction in progress. Rays and connectors are stored as base-ball
/// vertex indices.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    base: Ball,
    boosted: Ball,
    to_boosted: Vec<usize>,
    rays: Vec<Vec<usize>>,
    connectors: BTreeMap<(usize, usize), Vec<usize>>,
    frozen_radius: usize,
    /// Vertices owned by connectors or dropped from rays by repairs.
    used: Vec<bool>,
    /// `(ray, index)` for each vertex currently on a ray.
    on_ray: Vec<Option<(usize, usize)>>,
    trace: Vec<PairTrace>,
}

/// A repaired connector, its repair records and the ray vertices that moved.
type Repaired = (Vec<usize>, Vec<RepairRecord>, Vec<usize>);

const NO_PREDECESSOR: usize = usize::MAX;

impl ConstructionState {
    /// Builds the boosted ball covering `base` and checks the rays.
    pub fn new(base: &Ball, rays: &RaySystem) -> Result<Self, ConstructionError> {
        rays.check_paths(base).map_err(ConstructionError::BadRays)?;
        if rays.paths.is_empty() {
            return Err(ConstructionError::BadRays("no rays".into()));
        }
        let model = base.model();
        let t = power_union(model, base.gens(), 3)?;
        let boosted = build_ball(model, &t, base.radius().div_ceil(3))?;
        let to_boosted = base
            .vertices()
            .iter()
            .map(|e| {
                boosted
                    .index_of(e)
                    .expect("boosted ball covers the base ball")
            })
            .collect();
        let min_start = rays.paths.iter().map(|p| base.dist(p[0])).min().unwrap();
        let mut state = ConstructionState {
            to_boosted,
            rays: rays.paths.clone(),
            connectors: BTreeMap::new(),
            frozen_radius: min_start.saturating_sub(1),
            used: vec![false; base.len()],
            on_ray: vec![None; base.len()],
            trace: Vec::new(),
            boosted,
            base: base.clone(),
        };
        state.reindex();
        state.check_invariants()?;
        Ok(state)
    }

    pub fn base(&self) -> &Ball {
        &self.base
    }

    pub fn boosted(&self) -> &Ball {
        &self.boosted
    }

    pub fn rays(&self) -> &[Vec<usize>] {
        &self.rays
    }

    pub fn connectors(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.connectors
    }

    pub fn frozen_radius(&self) -> usize {
        self.frozen_radius
    }

    pub fn trace(&self) -> &[PairTrace] {
        &self.trace
    }

    fn reindex(&mut self) {
        self.on_ray.fill(None);
        for (k, ray) in self.rays.iter().enumerate() {
            for (i, &v) in ray.iter().enumerate() {
                self.on_ray[v] = Some((k, i));
            }
        }
    }

    fn dist(&self, v: usize) -> usize {
        self.base.dist(v)
    }

    fn s_edge(&self, u: usize, v: usize) -> bool {
        self.base.graph().has_edge(u, v)
    }

    fn t_edge(&self, u: usize, v: usize) -> bool {
        self.boosted
            .graph()
            .has_edge(self.to_boosted[u], self.to_boosted[v])
    }

    /// Number of leading ray vertices inside the frozen ball (last such index + 1).
    fn frozen_len(&self, k: usize) -> usize {
        let ray = &self.rays[k];
        ray.iter()
            .rposition(|&v| self.dist(v) <= self.frozen_radius)
            .map_or(0, |i| i + 1)
    }

    /// First ray index a connector may cross. Earlier vertices are frozen or
    /// follow a hop that is not an `S`-edge; the first vertex is never moved.
    fn crossable_from(&self, k: usize) -> usize {
        let ray = &self.rays[k];
        let bent = (1..ray.len())
            .rev()
            .find(|&i| !self.s_edge(ray[i - 1], ray[i]))
            .map_or(0, |i| i + 1);
        self.frozen_len(k).max(bent).max(1)
    }

    /// Connects rays `i < j` outside the frozen ball, repairing crossed rays.
    pub fn connect_pair(&mut self, i: usize, j: usize) -> Result<(), ConstructionError> {
        let m = self.rays.len();
        if i >= j || j >= m || self.connectors.contains_key(&(i, j)) {
            return Err(ConstructionError::BadPair((i, j)));
        }
        let radius = self.base.radius();
        let exhausted = ConstructionError::FrozenRegionExhausted {
            pair: (i, j),
            suggested_radius: (2 * radius).max(radius + 3),
        };
        if self.frozen_len(i) == self.rays[i].len() || self.frozen_len(j) == self.rays[j].len() {
            return Err(exhausted);
        }
        let rho = self.frozen_radius;
        for width in 1..=radius - rho {
            let shell = (rho + 1, rho + width);
            let found = self
                .route(i, j, shell, false)
                .map(|p| (p, false))
                .or_else(|| self.route(i, j, shell, true).map(|p| (p, true)));
            let Some((path, crossed)) = found else {
                continue;
            };
            let snapshot: Vec<Vec<usize>> = (0..m)
                .map(|k| self.rays[k][..self.frozen_len(k)].to_vec())
                .collect();
            let (path, repairs, touched) = self.repair_all(i, j, path)?;
            for &v in path.iter().chain(&touched) {
                self.frozen_radius = self.frozen_radius.max(self.dist(v));
            }
            for &v in &path[1..path.len() - 1] {
                self.used[v] = true;
            }
            self.trace.push(PairTrace {
                pair: (i, j),
                shell_width: width,
                crossed_rays: crossed,
                repairs,
                connector_len: path.len(),
                frozen_radius: self.frozen_radius,
            });
            self.connectors.insert((i, j), path);
            for (k, prefix) in snapshot.iter().enumerate() {
                if !self.rays[k].starts_with(prefix) {
                    return Err(ConstructionError::Invariant(format!(
                        "ray {k} changed inside the frozen ball"
                    )));
                }
            }
            self.check_invariants()?;
            return Ok(());
        }
        Err(ConstructionError::RoutingFailed { pair: (i, j) })
    }

    /// Cheapest path from ray `i` to ray `j` inside the shell, minimizing
    /// crossed ray vertices first and length second. Its interior avoids rays
    /// `i` and `j`, used vertices, and (unless `cross`) every other ray.
    fn route(&self, i: usize, j: usize, shell: (usize, usize), cross: bool) -> Option<Vec<usize>> {
        let n = self.base.len();
        let in_shell = |v: usize| (shell.0..=shell.1).contains(&self.dist(v));
        let limits: Vec<(usize, usize)> = (0..self.rays.len())
            .map(|k| (self.crossable_from(k), self.rays[k].len().saturating_sub(1)))
            .collect();
        let frozen: Vec<usize> = (0..self.rays.len()).map(|k| self.frozen_len(k)).collect();
        // Ray i vertices only start paths; ray j vertices only end them.
        let attach = |k: usize, v: usize| match self.on_ray[v] {
            Some((r, idx)) => r == k && idx >= frozen[k] && in_shell(v),
            None => false,
        };
        // Cost of entering v as an interior vertex, if allowed.
        let enter = |v: usize| -> Option<usize> {
            if !in_shell(v) || self.used[v] {
                return None;
            }
            match self.on_ray[v] {
                None => Some(0),
                Some((k, idx)) if cross && k != i && k != j => {
                    (idx >= limits[k].0 && idx < limits[k].1).then_some(1)
                }
                Some(_) => None,
            }
        };
        let mut best = vec![(usize::MAX, usize::MAX); n];
        let mut pred = vec![NO_PREDECESSOR; n];
        let mut heap = BinaryHeap::new();
        for &v in &self.rays[i] {
            if attach(i, v) {
                best[v] = (0, 0);
                heap.push(Reverse(((0usize, 0usize), v)));
            }
        }
        while let Some(Reverse((cost, u))) = heap.pop() {
            if cost > best[u] {
                continue;
            }
            if attach(j, u) {
                let mut path = vec![u];
                let mut w = u;
                while pred[w] != NO_PREDECESSOR {
                    w = pred[w];
                    path.push(w);
                }
                path.reverse();
                return Some(path);
            }
            for &w in self.base.graph().neighbors(u) {
                let step = if attach(j, w) { Some(0) } else { enter(w) };
                let Some(extra) = step else {
                    continue;
                };
                let next = (cost.0 + extra, cost.1 + 1);
                if next < best[w] {
                    best[w] = next;
                    pred[w] = u;
                    heap.push(Reverse((next, w)));
                }
            }
        }
        None
    }

    /// Repairs every ray other than `i`, `j` that the connector crosses.
    /// Returns the final connector, the repairs, and the ray vertices whose
    /// position changed.
    fn repair_all(
        &mut self,
        i: usize,
        j: usize,
        mut path: Vec<usize>,
    ) -> Result<Repaired, ConstructionError> {
        let mut repairs = Vec::new();
        let mut touched = Vec::new();
        loop {
            let crossed = path[1..path.len() - 1]
                .iter()
                .filter_map(|&v| self.on_ray[v].map(|(k, _)| k))
                .filter(|&k| k != i && k != j)
                .min();
            let Some(k) = crossed else {
                break;
            };
            let (new_path, record, moved) = self.repair_intersection(&path, k)?;
            path = new_path;
            repairs.push(record);
            touched.extend(moved);
        }
        Ok((path, repairs, touched))
    }

    /// Removes the crossings of `connector` with ray `k`. Returns the
    /// rerouted connector, what was done, and the affected ray vertices.
    pub fn repair_intersection(
        &mut self,
        connector: &[usize],
        k: usize,
    ) -> Result<(Vec<usize>, RepairRecord, Vec<usize>), ConstructionError> {
        let hits: Vec<usize> = (0..connector.len())
            .filter(|&p| self.on_ray[connector[p]].is_some_and(|(r, _)| r == k))
            .collect();
        let (Some(&first), Some(&last)) = (hits.first(), hits.last()) else {
            return Err(ConstructionError::Invariant(format!(
                "connector does not meet ray {k}"
            )));
        };
        if first == 0 || last == connector.len() - 1 {
            return Err(ConstructionError::Invariant(format!(
                "ray {k} meets a connector end"
            )));
        }
        let index = |v: usize| self.on_ray[v].unwrap().1;
        let (a, b) = (index(connector[first]), index(connector[last]));
        let (lo, hi) = (a.min(b), a.max(b));
        let d = hi - lo;
        let ray = self.rays[k].clone();
        if lo < self.crossable_from(k) || hi + 1 >= ray.len() {
            return Err(ConstructionError::Invariant(format!(
                "ray {k} crossed outside its movable part"
            )));
        }
        let (middle, kept, case): (Vec<usize>, Vec<usize>, RepairCase) = match d {
            0 => (vec![ray[lo]], vec![], RepairCase::SingleVertex),
            1 => {
                let m = if a < b {
                    vec![ray[lo], ray[hi]]
                } else {
                    vec![ray[hi], ray[lo]]
                };
                (m, vec![], RepairCase::TwoVertices)
            }
            _ => {
                let (l, l_prime) = detour_offsets(d)?;
                let mut m: Vec<usize> = l.iter().map(|&o| ray[lo + o]).collect();
                if a > b {
                    m.reverse();
                }
                let kept = l_prime.iter().map(|&o| ray[lo + o]).collect();
                (m, kept, RepairCase::Detour)
            }
        };
        let mut new_path = connector[..first].to_vec();
        new_path.extend(&middle);
        new_path.extend(&connector[last + 1..]);
        let resume = if case == RepairCase::Detour {
            hi + 2
        } else {
            hi + 1
        };
        let mut new_ray = ray[..lo].to_vec();
        new_ray.extend(&kept);
        new_ray.extend(&ray[resume..]);
        let moved: Vec<usize> = ray[lo..=hi + 1].to_vec();
        for &v in &moved {
            if !new_ray.contains(&v) {
                self.used[v] = true;
            }
        }
        self.rays[k] = new_ray;
        self.reindex();
        Ok((
            new_path,
            RepairRecord {
                ray: k,
                case,
                span: d,
            },
            moved,
        ))
    }

    /// Checks disjointness of rays and connectors and that all of them are
    /// paths of the boosted ball.
    pub fn check_invariants(&self) -> Result<(), ConstructionError> {
        let bad = |msg: String| Err(ConstructionError::Invariant(msg));
        let mut owner: Vec<Option<String>> = vec![None; self.base.len()];
        let mut claim = |v: usize, who: String| -> Result<(), ConstructionError> {
            if let Some(prev) = &owner[v] {
                return Err(ConstructionError::Invariant(format!(
                    "vertex {v} belongs to {prev} and {who}"
                )));
            }
            owner[v] = Some(who);
            Ok(())
        };
        for (k, ray) in self.rays.iter().enumerate() {
            if ray.is_empty() {
                return bad(format!("ray {k} is empty"));
            }
            for &v in ray {
                claim(v, format!("ray {k}"))?;
            }
            if let Some(w) = ray.windows(2).find(|w| !self.t_edge(w[0], w[1])) {
                return bad(format!("ray {k} has a non-edge {w:?}"));
            }
        }
        for (&(i, j), path) in &self.connectors {
            if self.on_ray[path[0]].map(|x| x.0) != Some(i)
                || self.on_ray[*path.last().unwrap()].map(|x| x.0) != Some(j)
            {
                return bad(format!("connector ({i}, {j}) lost its endpoints"));
            }
            for &v in &path[1..path.len() - 1] {
                claim(v, format!("connector ({i}, {j})"))?;
            }
            if let Some(w) = path.windows(2).find(|w| !self.t_edge(w[0], w[1])) {
                return bad(format!("connector ({i}, {j}) has a non-edge {w:?}"));
            }
        }
        Ok(())
    }

    /// Branch sets from the truncated rays and split connectors, in
    /// boosted-ball indices, verified against the boosted ball.
    pub fn assemble_embedding(&self) -> Result<MinorEmbedding, ConstructionError> {
        let m = self.rays.len();
        for i in 0..m {
            for j in i + 1..m {
                if !self.connectors.contains_key(&(i, j)) {
                    return Err(ConstructionError::BadPair((i, j)));
                }
            }
        }
        let mut sets: Vec<Vec<usize>> = (0..m)
            .map(|k| self.rays[k][..self.frozen_len(k).max(1)].to_vec())
            .collect();
        let mut witness = BTreeMap::new();
        for (&(i, j), path) in &self.connectors {
            let interior = &path[1..path.len() - 1];
            let half = interior.len().div_ceil(2);
            sets[i].extend(&interior[..half]);
            sets[j].extend(&interior[half..]);
            witness.insert((i, j), (path[half], path[half + 1]));
        }
        let map = |v: usize| self.to_boosted[v];
        let emb = MinorEmbedding {
            pattern: Graph::complete(m),
            branch_sets: sets
                .into_iter()
                .map(|s| {
                    let mut s: Vec<usize> = s.into_iter().map(map).collect();
                    s.sort_unstable();
                    s
                })
                .collect(),
            edge_witness: witness
                .into_iter()
                .map(|(key, (u, v))| (key, (map(u), map(v))))
                .collect(),
        };
        match verify_embedding(self.boosted.graph(), &emb) {
            Ok(true) => Ok(emb),
            Ok(false) => Err(ConstructionError::Invariant(
                "assembled certificate does not verify".into(),
            )),
            Err(e) => Err(ConstructionError::Invariant(e.to_string())),
        }
    }
}

/// Result of a full construction.
#[derive(Clone, Debug)]
pub struct CliqueConstruction {
    pub embedding: MinorEmbedding,
    pub boosted: Ball,
    pub trace: Vec<PairTrace>,
    pub frozen_radius: usize,
}

/// Runs the whole construction: every pair in lexicographic order, then
/// assembly.
pub fn build_clique_minor(
    base: &Ball,
    rays: &RaySystem,
) -> Result<CliqueConstruction, ConstructionError> {
    let mut state = ConstructionState::new(base, rays)?;
    let m = state.rays.len();
    for i in 0..m {
        for j in i + 1..m {
            state.connect_pair(i, j)?;
            log::debug!(
                "pair ({i}, {j}) connected; frozen radius {}",
                state.frozen_radius
            );
        }
    }
    let embedding = state.assemble_embedding()?;
    Ok(CliqueConstruction {
        embedding,
        trace: state.trace,
        frozen_radius: state.frozen_radius,
        boosted: state.boosted,
    })
}
