//! Exact minor search over host vertices in sweep order.
//!
//! Host vertices are decided one at a time in a fixed order chosen to keep the
//! frontier (decided vertices with undecided neighbours) small. Each vertex is
//! either left unused or given a pattern label. The state after a prefix of
//! the order is fully described by the frontier's labels, which frontier
//! vertices already lie in a common piece of their branch set, the set of
//! pattern edges realized so far, and which labels are finished. States that
//! have been exhausted without success are remembered, so the search never
//! re-expands an equivalent frontier. Labels of twin pattern vertices are
//! interchangeable and states are keyed up to that symmetry.

use rustc_hash::FxHashMap;

use crate::graph::Graph;

pub const MAX_PATTERN_VERTICES: usize = 32;
pub const MAX_PATTERN_EDGES: usize = 256;

const WORDS: usize = MAX_PATTERN_EDGES / 64;

pub(crate) struct Counter {
    limit: u64,
    used: u64,
}

impl Counter {
    pub(crate) fn new(limit: u64) -> Self {
        Counter { limit, used: 0 }
    }

    pub(crate) fn used(&self) -> u64 {
        self.used
    }

    fn tick(&mut self) -> bool {
        if self.used >= self.limit {
            return false;
        }
        self.used += 1;
        true
    }
}

#[derive(Debug)]
pub(crate) enum Outcome {
    /// Branch sets indexed by pattern vertex, in the searched graph's indices.
    Found(Vec<Vec<usize>>),
    Absent,
    Exhausted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
struct EdgeSet([u64; WORDS]);

impl EdgeSet {
    fn set(&mut self, e: usize) {
        self.0[e / 64] |= 1 << (e % 64);
    }

    fn contains_all(&self, other: &EdgeSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits >> b & 1 == 1)
                .map(move |b| w * 64 + b)
        })
    }
}

fn bit(label: u8) -> u32 {
    1 << (label - 1)
}

/// Pattern data indexed by label (`pattern vertex + 1`).
pub(crate) struct PatternInfo {
    k: usize,
    edge_index: Vec<Vec<u16>>,
    edges: Vec<(u8, u8)>,
    incident: Vec<EdgeSet>,
    all: EdgeSet,
    /// Twin classes in try order (higher degree first), labels ascending inside.
    classes: Vec<Vec<u8>>,
}

impl PatternInfo {
    pub(crate) fn new(pattern: &Graph) -> Self {
        let k = pattern.n();
        assert!(k <= MAX_PATTERN_VERTICES && pattern.edge_count() <= MAX_PATTERN_EDGES);
        let mut edge_index = vec![vec![u16::MAX; k + 1]; k + 1];
        let mut edges = Vec::new();
        let mut incident = vec![EdgeSet::default(); k + 1];
        let mut all = EdgeSet::default();
        for (e, (a, b)) in pattern.edges().into_iter().enumerate() {
            let (la, lb) = (a as u8 + 1, b as u8 + 1);
            edge_index[la as usize][lb as usize] = e as u16;
            edge_index[lb as usize][la as usize] = e as u16;
            edges.push((la, lb));
            incident[la as usize].set(e);
            incident[lb as usize].set(e);
            all.set(e);
        }
        let twins = |a: usize, b: usize| {
            let na: Vec<usize> = pattern
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&x| x != b)
                .collect();
            let nb: Vec<usize> = pattern
                .neighbors(b)
                .iter()
                .copied()
                .filter(|&x| x != a)
                .collect();
            na == nb
        };
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for v in 0..k {
            match classes.iter_mut().find(|c| c.iter().all(|&u| twins(u, v))) {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        classes.sort_by_key(|c| (std::cmp::Reverse(pattern.degree(c[0])), c[0]));
        PatternInfo {
            k,
            edge_index,
            edges,
            incident,
            all,
            classes: classes
                .into_iter()
                .map(|c| c.into_iter().map(|v| v as u8 + 1).collect())
                .collect(),
        }
    }

    fn edge(&self, a: u8, b: u8) -> Option<usize> {
        let e = self.edge_index[a as usize][b as usize];
        (e != u16::MAX).then_some(e as usize)
    }

    fn full(&self) -> u32 {
        if self.k == 32 {
            u32::MAX
        } else {
            (1u32 << self.k) - 1
        }
    }
}

/// Vertex order and the frontier bookkeeping derived from it.
struct Plan {
    order: Vec<usize>,
    /// `frontier[s]`: decided vertices with an undecided neighbour, before step `s`.
    frontier: Vec<Vec<usize>>,
    /// `keep[s][i]`: whether slot `i` of `frontier[s]` survives step `s`.
    keep: Vec<Vec<bool>>,
    stays: Vec<bool>,
    nbr_slots: Vec<Vec<usize>>,
}

impl Plan {
    fn new(g: &Graph, base: f64) -> Self {
        let n = g.n();
        let order = choose_order(g, base);
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let last: Vec<usize> = (0..n)
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .map(|&w| pos[w])
                    .fold(pos[v], usize::max)
            })
            .collect();
        let mut frontier = Vec::with_capacity(n + 1);
        let mut keep = Vec::with_capacity(n);
        let mut stays = Vec::with_capacity(n);
        let mut nbr_slots = Vec::with_capacity(n);
        let mut current: Vec<usize> = Vec::new();
        for (s, &v) in order.iter().enumerate() {
            keep.push(current.iter().map(|&u| last[u] > s).collect());
            stays.push(last[v] > s);
            nbr_slots.push(
                current
                    .iter()
                    .enumerate()
                    .filter(|&(_, &u)| g.has_edge(u, v))
                    .map(|(i, _)| i)
                    .collect(),
            );
            let mut next: Vec<usize> = current.iter().copied().filter(|&u| last[u] > s).collect();
            if last[v] > s {
                next.push(v);
            }
            frontier.push(std::mem::replace(&mut current, next));
        }
        frontier.push(current);
        Plan {
            order,
            frontier,
            keep,
            stays,
            nbr_slots,
        }
    }
}

/// Frontier size before each step of `order`.
fn frontier_sizes(g: &Graph, order: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Vertex v is on the frontier for steps pos[v]+1 ..= last[v].
    let mut delta = vec![0i64; n + 2];
    for v in 0..n {
        let last = g
            .neighbors(v)
            .iter()
            .map(|&w| pos[w])
            .fold(pos[v], usize::max);
        if last > pos[v] {
            delta[pos[v] + 1] += 1;
            delta[last + 1] -= 1;
        }
    }
    let mut size = 0i64;
    (0..n)
        .map(|s| {
            size += delta[s];
            size as usize
        })
        .collect()
}

/// Rough count of search states for `order`, with `base` choices per slot.
fn order_cost(g: &Graph, order: &[usize], base: f64) -> f64 {
    frontier_sizes(g, order)
        .iter()
        .map(|&f| base.powi(f as i32))
        .sum()
}

const ALL_STARTS_UP_TO: usize = 200;
const ALL_PAIRS_UP_TO: usize = 150;

/// Picks the cheapest of several candidate orders: greedy sweeps from many
/// start vertices, and for small graphs the orders by `d(u, x) - d(v, x)`
/// over all vertex pairs `(u, v)`, which sweep along the direction from `u`
/// towards `v`.
fn choose_order(g: &Graph, base: f64) -> Vec<usize> {
    let n = g.n();
    let mut best = sweep_order(g, None);
    let mut best_cost = order_cost(g, &best, base);
    let mut consider = |order: Vec<usize>| {
        let cost = order_cost(g, &order, base);
        if cost < best_cost {
            best_cost = cost;
            best = order;
        }
    };
    let step = n.div_ceil(ALL_STARTS_UP_TO.min(32)).max(1);
    let starts: Vec<usize> = if n <= ALL_STARTS_UP_TO {
        (0..n).collect()
    } else {
        (0..n).step_by(step).collect()
    };
    for s in starts {
        consider(sweep_order(g, Some(s)));
    }
    if n <= ALL_PAIRS_UP_TO {
        let dist: Vec<Vec<usize>> = (0..n).map(|v| g.bfs_distances(v)).collect();
        for u in 0..n {
            for v in u + 1..n {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&x| (dist[u][x] as i64 - dist[v][x] as i64, dist[u][x], x));
                consider(order);
            }
        }
    }
    best
}

/// Greedy order keeping the frontier small: start from `start` (or a
/// peripheral vertex), then repeatedly take the vertex whose addition grows
/// the frontier least.
fn sweep_order(g: &Graph, start: Option<usize>) -> Vec<usize> {
    let n = g.n();
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    let mut open: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut touched = vec![false; n];
    let mut candidates: Vec<usize> = Vec::new();
    while order.len() < n {
        let pick = if let (true, Some(s)) = (order.is_empty(), start) {
            s
        } else if candidates.is_empty() {
            peripheral_start(g, &done)
        } else {
            let mut best = None;
            let mut best_score = (i64::MAX, i64::MAX, usize::MAX);
            for &v in &candidates {
                let enters = i64::from(open[v] > 0);
                let mut freed = 0;
                let mut decided = 0;
                for &u in g.neighbors(v) {
                    if done[u] {
                        decided += 1;
                        if open[u] == 1 {
                            freed += 1;
                        }
                    }
                }
                let score = (enters - freed, -decided, v);
                if score < best_score {
                    best_score = score;
                    best = Some(v);
                }
            }
            best.unwrap()
        };
        done[pick] = true;
        order.push(pick);
        candidates.retain(|&v| v != pick);
        for &u in g.neighbors(pick) {
            open[u] -= 1;
            if !done[u] && !touched[u] {
                touched[u] = true;
                candidates.push(u);
            }
        }
    }
    order
}

fn peripheral_start(g: &Graph, done: &[bool]) -> usize {
    let n = g.n();
    let seed = (0..n)
        .filter(|&v| !done[v])
        .min_by_key(|&v| (g.degree(v), v))
        .unwrap();
    // One BFS sweep from the seed; start at the farthest minimum-degree vertex.
    let dist = g.bfs_distances(seed);
    (0..n)
        .filter(|&v| !done[v] && dist[v] != usize::MAX)
        .min_by_key(|&v| (g.degree(v), std::cmp::Reverse(dist[v]), v))
        .unwrap()
}

#[derive(Clone, Debug)]
struct State {
    labels: Vec<u8>,
    comps: Vec<u16>,
    realized: EdgeSet,
    started: u32,
    closed: u32,
}

impl State {
    fn active(&self) -> u32 {
        self.labels
            .iter()
            .filter(|&&l| l != 0)
            .fold(0, |m, &l| m | bit(l))
    }
}

struct Frame {
    state: State,
    choices: Vec<u8>,
    next: usize,
    key: (Box<[u8]>, EdgeSet),
}

/// Dead states grouped by everything except the realized edges. Realizing
/// more edges never hurts, so a state is dead when some dead state with the
/// same key realized a superset of its edges.
#[derive(Default)]
struct Memo {
    dead: FxHashMap<Box<[u8]>, Vec<EdgeSet>>,
}

impl Memo {
    fn is_dead(&self, key: &(Box<[u8]>, EdgeSet)) -> bool {
        self.dead
            .get(&key.0)
            .is_some_and(|sets| sets.iter().any(|d| d.contains_all(&key.1)))
    }

    fn insert(&mut self, key: (Box<[u8]>, EdgeSet)) {
        let sets = self.dead.entry(key.0).or_default();
        sets.retain(|d| !key.1.contains_all(d));
        sets.push(key.1);
    }
}

struct Search<'a> {
    pat: &'a PatternInfo,
    /// False when some model is known to use every host vertex.
    allow_unused: bool,
    plan: Plan,
    n: usize,
}

impl Search<'_> {
    fn apply(&self, s: usize, st: &State, c: u8) -> Option<State> {
        const FRESH: u16 = u16::MAX;
        let w = st.labels.len();
        if c != 0 && st.closed & bit(c) != 0 {
            return None;
        }
        let mut labels = st.labels.clone();
        labels.push(c);
        let mut comps = st.comps.clone();
        comps.push(0);
        let mut realized = st.realized;
        if c != 0 {
            comps[w] = FRESH;
            for &i in &self.plan.nbr_slots[s] {
                let l = labels[i];
                if l == c {
                    let old = comps[i];
                    if old != FRESH {
                        for x in comps.iter_mut().filter(|x| **x == old) {
                            *x = FRESH;
                        }
                    }
                } else if l != 0 {
                    if let Some(e) = self.pat.edge(c, l) {
                        realized.set(e);
                    }
                }
            }
        }
        let keep = &self.plan.keep[s];
        let stays = self.plan.stays[s];
        let kept = |i: usize| if i < w { keep[i] } else { stays };
        let mut newly_closed = 0u32;
        for i in 0..=w {
            let l = labels[i];
            if l == 0 || kept(i) {
                continue;
            }
            let x = comps[i];
            if (0..=w).any(|j| kept(j) && comps[j] == x) || (0..i).any(|j| comps[j] == x) {
                continue;
            }
            // The piece `x` of label `l` leaves the frontier for good.
            if newly_closed & bit(l) != 0 || (0..=w).any(|j| kept(j) && labels[j] == l) {
                return None;
            }
            if !realized.contains_all(&self.pat.incident[l as usize]) {
                return None;
            }
            newly_closed |= bit(l);
        }
        let mut next_labels = Vec::with_capacity(w + 1);
        let mut next_comps = Vec::with_capacity(w + 1);
        let mut renumber: Vec<(u16, u16)> = Vec::new();
        for i in (0..=w).filter(|&i| kept(i)) {
            next_labels.push(labels[i]);
            let old = comps[i];
            let new = if old == 0 {
                0
            } else if let Some(&(_, n)) = renumber.iter().find(|(o, _)| *o == old) {
                n
            } else {
                let n = renumber.len() as u16 + 1;
                renumber.push((old, n));
                n
            };
            next_comps.push(new);
        }
        Some(State {
            labels: next_labels,
            comps: next_comps,
            realized,
            started: if c == 0 {
                st.started
            } else {
                st.started | bit(c)
            },
            closed: st.closed | newly_closed,
        })
    }

    fn success(&self, st: &State) -> bool {
        if st.started != self.pat.full() || !st.realized.contains_all(&self.pat.all) {
            return false;
        }
        let mut first_comp = [0u16; MAX_PATTERN_VERTICES + 1];
        for (&l, &c) in st.labels.iter().zip(&st.comps) {
            if l == 0 {
                continue;
            }
            let slot = &mut first_comp[l as usize];
            if *slot == 0 {
                *slot = c;
            } else if *slot != c {
                return false;
            }
        }
        true
    }

    fn choices(&self, s: usize, st: &State) -> Vec<u8> {
        let mut out = Vec::new();
        let active = st.active();
        let mut adjacent = 0u32;
        for &i in &self.plan.nbr_slots[s] {
            if st.labels[i] != 0 {
                adjacent |= bit(st.labels[i]);
            }
        }
        for l in 1..=self.pat.k as u8 {
            if adjacent & active & bit(l) != 0 {
                out.push(l);
            }
        }
        for class in &self.pat.classes {
            if let Some(&l) = class.iter().find(|&&l| st.started & bit(l) == 0) {
                out.push(l);
            }
        }
        if self.plan.stays[s] {
            for l in 1..=self.pat.k as u8 {
                if active & !adjacent & bit(l) != 0 {
                    out.push(l);
                }
            }
        }
        if self.allow_unused {
            out.push(0);
        }
        out
    }

    /// Memo key, canonical under permutations of twin labels, and the
    /// realized edge set under the same relabelling.
    fn key(&self, s: usize, st: &State) -> (Box<[u8]>, EdgeSet) {
        let mut perm = [0u8; MAX_PATTERN_VERTICES + 1];
        let mut first_seen = [usize::MAX; MAX_PATTERN_VERTICES + 1];
        for (i, &l) in st.labels.iter().enumerate() {
            if l != 0 && first_seen[l as usize] == usize::MAX {
                first_seen[l as usize] = i;
            }
        }
        for class in &self.pat.classes {
            let mut ranked: Vec<(u8, usize, u8)> = class
                .iter()
                .map(|&l| {
                    let group = if first_seen[l as usize] != usize::MAX {
                        0
                    } else if st.closed & bit(l) != 0 {
                        1
                    } else {
                        2
                    };
                    (group, first_seen[l as usize], l)
                })
                .collect();
            ranked.sort_unstable();
            for (slot, &(_, _, l)) in ranked.iter().enumerate() {
                perm[l as usize] = class[slot];
            }
        }
        let mut realized = EdgeSet::default();
        for e in st.realized.ones() {
            let (a, b) = self.pat.edges[e];
            realized.set(self.pat.edge(perm[a as usize], perm[b as usize]).unwrap());
        }
        let closed = (1..=self.pat.k as u8)
            .filter(|&l| st.closed & bit(l) != 0)
            .fold(0u32, |m, l| m | bit(perm[l as usize]));
        let mut key = Vec::with_capacity(8 + 3 * st.labels.len());
        key.extend_from_slice(&(s as u32).to_le_bytes());
        for (&l, &c) in st.labels.iter().zip(&st.comps) {
            key.push(if l == 0 { 0 } else { perm[l as usize] });
            key.extend_from_slice(&c.to_le_bytes());
        }
        key.extend_from_slice(&closed.to_le_bytes());
        (key.into_boxed_slice(), realized)
    }

    fn unstarted(&self, st: &State) -> usize {
        (self.pat.full() & !st.started).count_ones() as usize
    }

    fn branch_sets(&self, assigned: &[u8]) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.pat.k];
        for (s, &c) in assigned.iter().enumerate() {
            if c != 0 {
                sets[c as usize - 1].push(self.plan.order[s]);
            }
        }
        sets
    }

    fn run(&self, counter: &mut Counter) -> Outcome {
        let root = State {
            labels: Vec::new(),
            comps: Vec::new(),
            realized: EdgeSet::default(),
            started: 0,
            closed: 0,
        };
        if self.unstarted(&root) > self.n {
            return Outcome::Absent;
        }
        if !counter.tick() {
            return Outcome::Exhausted;
        }
        let mut memo = Memo::default();
        let mut assigned = vec![0u8; self.n];
        let mut stack = vec![Frame {
            choices: self.choices(0, &root),
            key: self.key(0, &root),
            state: root,
            next: 0,
        }];
        while !stack.is_empty() {
            let s = stack.len() - 1;
            let frame = &mut stack[s];
            if frame.next == frame.choices.len() {
                let done = stack.pop().unwrap();
                memo.insert(done.key);
                continue;
            }
            let c = frame.choices[frame.next];
            frame.next += 1;
            let Some(child) = self.apply(s, &frame.state, c) else {
                continue;
            };
            assigned[s] = c;
            let t = s + 1;
            if self.success(&child) {
                return Outcome::Found(self.branch_sets(&assigned[..t]));
            }
            if t == self.n || self.unstarted(&child) > self.n - t {
                continue;
            }
            let key = self.key(t, &child);
            if memo.is_dead(&key) {
                continue;
            }
            if !counter.tick() {
                return Outcome::Exhausted;
            }
            stack.push(Frame {
                choices: self.choices(t, &child),
                key,
                state: child,
                next: 0,
            });
        }
        Outcome::Absent
    }
}

/// Exhaustive search for a minor of the pattern described by `pat` in `g`.
///
/// With `spanning`, only models whose branch sets cover every vertex are
/// searched. That loses nothing when `g` and the pattern are both connected,
/// since unused vertices can always be absorbed into a neighbouring branch set.
pub(crate) fn search(
    g: &Graph,
    pat: &PatternInfo,
    spanning: bool,
    counter: &mut Counter,
) -> Outcome {
    let search = Search {
        pat,
        allow_unused: !spanning,
        plan: Plan::new(g, (pat.k + usize::from(!spanning)) as f64),
        n: g.n(),
    };
    log::debug!(
        "sweep search: {} vertices, max frontier {}",
        g.n(),
        search.plan.frontier.iter().map(Vec::len).max().unwrap_or(0)
    );
    search.run(counter)
}

#[cfg(test)]
pub(crate) fn max_frontier(g: &Graph) -> usize {
    Plan::new(g, 2.0)
        .frontier
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
}
