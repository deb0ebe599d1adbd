//! Host reductions that cannot change whether a pattern is a minor, and the
//! splitting of the host into components or blocks.

use std::collections::BTreeSet;

use super::sweep::{self, Counter, Outcome, PatternInfo};
use crate::graph::Graph;

/// A reduced host together with, for each of its vertices, the original host
/// vertices it stands for. Every `rep` set is connected in the original host.
struct Piece {
    graph: Graph,
    rep: Vec<Vec<usize>>,
}

struct PatternShape {
    min_degree: usize,
    connected: bool,
    biconnected: bool,
}

pub(super) fn solve(
    host: &Graph,
    pattern: &Graph,
    counter: &mut Counter,
    largest_piece: &mut usize,
) -> Outcome {
    if pattern.n() > host.n() || pattern.edge_count() > host.edge_count() {
        return Outcome::Absent;
    }
    let shape = PatternShape {
        min_degree: pattern.min_degree(),
        connected: pattern.n() > 0 && pattern.is_connected(),
        biconnected: pattern.n() >= 3 && {
            let blocks = blocks(pattern);
            blocks.len() == 1 && blocks[0].len() == pattern.n()
        },
    };
    let info = PatternInfo::new(pattern);
    let piece = Piece {
        graph: host.clone(),
        rep: (0..host.n()).map(|v| vec![v]).collect(),
    };
    solve_piece(piece, pattern, &shape, &info, counter, largest_piece)
}

fn solve_piece(
    piece: Piece,
    pattern: &Graph,
    shape: &PatternShape,
    info: &PatternInfo,
    counter: &mut Counter,
    largest_piece: &mut usize,
) -> Outcome {
    let piece = reduce(piece, shape.min_degree);
    if piece.graph.n() < pattern.n() || piece.graph.edge_count() < pattern.edge_count() {
        return Outcome::Absent;
    }
    let parts = if shape.biconnected {
        blocks(&piece.graph)
    } else if shape.connected {
        piece.graph.components()
    } else {
        vec![(0..piece.graph.n()).collect()]
    };
    if parts.len() == 1 && parts[0].len() == piece.graph.n() {
        *largest_piece = (*largest_piece).max(piece.graph.n());
        return match sweep::search(&piece.graph, info, shape.connected, counter) {
            Outcome::Found(sets) => Outcome::Found(
                sets.into_iter()
                    .map(|set| {
                        let mut out: Vec<usize> = set
                            .iter()
                            .flat_map(|&v| piece.rep[v].iter().copied())
                            .collect();
                        out.sort_unstable();
                        out
                    })
                    .collect(),
            ),
            other => other,
        };
    }
    let mut exhausted = false;
    for part in parts {
        if part.len() < pattern.n() {
            continue;
        }
        let sub = Piece {
            graph: piece.graph.induced(&part),
            rep: part.iter().map(|&v| piece.rep[v].clone()).collect(),
        };
        match solve_piece(sub, pattern, shape, info, counter, largest_piece) {
            Outcome::Found(sets) => return Outcome::Found(sets),
            Outcome::Exhausted => exhausted = true,
            Outcome::Absent => {}
        }
    }
    if exhausted {
        Outcome::Exhausted
    } else {
        Outcome::Absent
    }
}

/// Deletes vertices of degree below the pattern's minimum degree (up to 2) and
/// contracts degree-2 vertices when the pattern has minimum degree at least 3.
fn reduce(piece: Piece, min_degree: usize) -> Piece {
    if min_degree == 0 {
        return piece;
    }
    let n = piece.graph.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| piece.graph.neighbors(v).iter().copied().collect())
        .collect();
    let mut rep = piece.rep;
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).rev().collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        let d = adj[v].len();
        if d < min_degree.min(2) {
            alive[v] = false;
            for w in std::mem::take(&mut adj[v]) {
                adj[w].remove(&v);
                queue.push(w);
            }
        } else if d == 2 && min_degree >= 3 {
            let mut it = adj[v].iter().copied();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            alive[v] = false;
            adj[v].clear();
            adj[a].remove(&v);
            adj[b].remove(&v);
            adj[a].insert(b);
            adj[b].insert(a);
            let moved = std::mem::take(&mut rep[v]);
            rep[a].extend(moved);
            queue.push(a);
            queue.push(b);
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        index[v] = i;
    }
    let edges: Vec<(usize, usize)> = keep
        .iter()
        .flat_map(|&v| adj[v].iter().filter(move |&&w| w > v).map(move |&w| (v, w)))
        .map(|(v, w)| (index[v], index[w]))
        .collect();
    Piece {
        graph: Graph::from_edges(keep.len(), &edges).expect("reduced edges are valid"),
        rep: keep
            .into_iter()
            .map(|v| std::mem::take(&mut rep[v]))
            .collect(),
    }
}

/// Vertex sets of the biconnected components (bridges give two-vertex blocks,
/// isolated vertices give none).
pub(super) fn blocks(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut disc = vec![0usize; n];
    let mut low = vec![0usize; n];
    let mut time = 1;
    let mut out = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != 0 {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent, i) = *top;
            if i < g.degree(v) {
                top.2 += 1;
                let w = g.neighbors(v)[i];
                if disc[w] == 0 {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            let Some(&(u, _, _)) = stack.last() else {
                continue;
            };
            low[u] = low[u].min(low[v]);
            if low[v] >= disc[u] {
                let mut block = Vec::new();
                while let Some((a, b)) = edge_stack.pop() {
                    block.push(a);
                    block.push(b);
                    if (a, b) == (u, v) {
                        break;
                    }
                }
                block.sort_unstable();
                block.dedup();
                out.push(block);
            }
        }
    }
    out
}
