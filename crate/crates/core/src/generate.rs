//! Small graph families used for oracle checks: every connected graph up to
//! isomorphism on a few vertices, and seeded random graphs.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Largest vertex count accepted by [`connected_graphs`].
pub const MAX_ENUMERATED: usize = 8;

/// All connected graphs on `n` vertices, one per isomorphism class, in a
/// deterministic order.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(
        n <= MAX_ENUMERATED,
        "enumeration is limited to {MAX_ENUMERATED} vertices"
    );
    if n == 0 {
        return Vec::new();
    }
    let mut level: BTreeSet<Vec<u8>> = BTreeSet::from([vec![0]]);
    for k in 1..n {
        let mut next = BTreeSet::new();
        for code in &level {
            for mask in 1u32..(1 << k) {
                let mut grown = code.clone();
                grown.push(mask as u8);
                for (v, row) in grown.iter_mut().enumerate().take(k) {
                    if mask >> v & 1 == 1 {
                        *row |= 1 << k;
                    }
                }
                next.insert(canonical(&grown));
            }
        }
        level = next;
    }
    level.iter().map(|code| to_graph(code)).collect()
}

/// Erdős–Rényi graph `G(n, p)` from a seeded ChaCha stream.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gnp_with(n, p, &mut rng)
}

pub fn gnp_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are valid")
}

/// The seeded random instances used by the oracle suites: `count` graphs
/// with 5 to `max_n` vertices and edge probability in `[0.2, 0.8]`.
pub fn random_suite(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(5..=max_n.max(5));
            let p = rng.gen_range(0.2..=0.8);
            gnp_with(n, p, &mut rng)
        })
        .collect()
}

// Graphs here are adjacency bitmask rows; a code is the rows of the
// lexicographically smallest relabelling.

fn to_graph(adj: &[u8]) -> Graph {
    let n = adj.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| {
            (u + 1..n)
                .filter(move |&v| adj[u] >> v & 1 == 1)
                .map(move |v| (u, v))
        })
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

fn canonical(adj: &[u8]) -> Vec<u8> {
    let n = adj.len();
    let degree: Vec<u32> = adj.iter().map(|r| r.count_ones()).collect();
    // Vertices may only move within their invariant class.
    let invariant: Vec<(u32, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<u32> = (0..n)
                .filter(|&w| adj[v] >> w & 1 == 1)
                .map(|w| degree[w])
                .collect();
            nd.sort_unstable();
            (degree[v], nd)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| invariant[a].cmp(&invariant[b]));
    let mut best: Option<Vec<u8>> = None;
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    search_perm(adj, &invariant, &order, 0, &mut perm, &mut used, &mut best);
    best.unwrap()
}

/// `perm[i]` is the original vertex placed at new position `i`; position `i`
/// must hold a vertex with the invariant of `order[i]`.
fn search_perm(
    adj: &[u8],
    inv: &[(u32, Vec<u32>)],
    order: &[usize],
    i: usize,
    perm: &mut [usize],
    used: &mut [bool],
    best: &mut Option<Vec<u8>>,
) {
    let n = adj.len();
    if i == n {
        let mut inverse = vec![0; n];
        for (pos, &v) in perm.iter().enumerate() {
            inverse[v] = pos;
        }
        let code: Vec<u8> = perm
            .iter()
            .map(|&v| {
                (0..n)
                    .filter(|&w| adj[v] >> w & 1 == 1)
                    .fold(0u8, |m, w| m | 1 << inverse[w])
            })
            .collect();
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return;
    }
    for v in 0..n {
        if used[v] || inv[v] != inv[order[i]] {
            continue;
        }
        used[v] = true;
        perm[i] = v;
        search_perm(adj, inv, order, i + 1, perm, used, best);
        used[v] = false;
    }
}
