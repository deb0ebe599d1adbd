//! Minor containment on finite graphs.
//!
//! [`find_minor`] is exact: `Absent` means the search space was exhausted.
//! The host is first shrunk by reductions that cannot change the answer for
//! the given pattern (pruning low-degree vertices, suppressing degree-2
//! vertices, splitting into components or blocks), then each remaining piece
//! is searched by [`sweep`], a backtracking search over host vertices in a
//! narrow sweep order that memoizes frontier states already proven dead.
//! Every `Found` result carries a certificate that passes
//! [`verify_embedding`] against the original host.

mod oracle;
mod reduce;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, PlainGraphJson};

pub use oracle::{brute_force_minor, BRUTE_FORCE_MAX_HOST};
pub use sweep::{MAX_PATTERN_EDGES, MAX_PATTERN_VERTICES};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinorError {
    #[error("certificate refers to {what} {index}, outside 0..{bound}")]
    IndexOutOfBounds {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error(
        "host has {0} vertices; the brute-force oracle accepts at most {BRUTE_FORCE_MAX_HOST}"
    )]
    HostTooLarge(usize),
    #[error("pattern too large: {vertices} vertices, {edges} edges")]
    PatternTooLarge { vertices: usize, edges: usize },
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

/// Search effort limit, counted in search-tree node expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Budget(pub u64);

impl Budget {
    pub const UNLIMITED: Budget = Budget(u64::MAX);
    pub const DEFAULT: Budget = Budget(20_000_000);
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// A minor model of `pattern`: one connected branch set per pattern vertex,
/// plus one host edge per pattern edge joining the two branch sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorEmbedding {
    pub pattern: Graph,
    pub branch_sets: Vec<Vec<usize>>,
    /// Keyed by pattern edge `(i, j)` with `i < j`; the value joins branch set `i` to `j`.
    pub edge_witness: BTreeMap<(usize, usize), (usize, usize)>,
}

impl MinorEmbedding {
    /// Completes branch sets with the first host edge found for every pattern edge.
    /// Returns `None` when some pattern edge has no host edge between its branch sets.
    pub fn from_branch_sets(
        host: &Graph,
        pattern: &Graph,
        mut branch_sets: Vec<Vec<usize>>,
    ) -> Option<Self> {
        let mut owner = vec![usize::MAX; host.n()];
        for (i, set) in branch_sets.iter_mut().enumerate() {
            set.sort_unstable();
            for &v in set.iter() {
                owner[v] = i;
            }
        }
        let mut edge_witness = BTreeMap::new();
        for (u, v) in host.edges() {
            let (a, b) = (owner[u], owner[v]);
            if a == usize::MAX || b == usize::MAX || a == b || !pattern.has_edge(a, b) {
                continue;
            }
            let (key, w) = if a < b {
                ((a, b), (u, v))
            } else {
                ((b, a), (v, u))
            };
            edge_witness.entry(key).or_insert(w);
        }
        (edge_witness.len() == pattern.edge_count()).then_some(MinorEmbedding {
            pattern: pattern.clone(),
            branch_sets,
            edge_witness,
        })
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            pattern: self.pattern.to_json(),
            branch_sets: self.branch_sets.clone(),
            edge_witness: self
                .edge_witness
                .iter()
                .map(|(&(i, j), &(u, v))| (format!("{i}-{j}"), [u, v]))
                .collect(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self, MinorError> {
        let pattern =
            Graph::try_from(&j.pattern).map_err(|e| MinorError::Malformed(e.to_string()))?;
        let mut edge_witness = BTreeMap::new();
        for (key, w) in &j.edge_witness {
            let (a, b) = key
                .split_once('-')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| MinorError::Malformed(format!("bad edge key `{key}`")))?;
            let (k, w) = if a <= b {
                ((a, b), (w[0], w[1]))
            } else {
                ((b, a), (w[1], w[0]))
            };
            edge_witness.insert(k, w);
        }
        Ok(MinorEmbedding {
            pattern,
            branch_sets: j.branch_sets.clone(),
            edge_witness,
        })
    }
}

/// Certificate file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub pattern: PlainGraphJson,
    pub branch_sets: Vec<Vec<usize>>,
    pub edge_witness: BTreeMap<String, [usize; 2]>,
}

/// Checks that branch sets are nonempty, pairwise disjoint and connected in
/// `host`, and that every pattern edge has a host-edge witness between the
/// right branch sets.
pub fn verify_embedding(host: &Graph, emb: &MinorEmbedding) -> Result<bool, MinorError> {
    let n = host.n();
    let k = emb.pattern.n();
    for set in &emb.branch_sets {
        if let Some(&v) = set.iter().find(|&&v| v >= n) {
            return Err(MinorError::IndexOutOfBounds {
                what: "host vertex",
                index: v,
                bound: n,
            });
        }
    }
    for (&(i, j), &(u, v)) in &emb.edge_witness {
        for p in [i, j] {
            if p >= k {
                return Err(MinorError::IndexOutOfBounds {
                    what: "pattern vertex",
                    index: p,
                    bound: k,
                });
            }
        }
        for x in [u, v] {
            if x >= n {
                return Err(MinorError::IndexOutOfBounds {
                    what: "host vertex",
                    index: x,
                    bound: n,
                });
            }
        }
    }
    if emb.branch_sets.len() != k {
        return Ok(false);
    }
    let mut owner = vec![usize::MAX; n];
    for (i, set) in emb.branch_sets.iter().enumerate() {
        if set.is_empty() {
            return Ok(false);
        }
        for &v in set {
            if owner[v] != usize::MAX {
                return Ok(false);
            }
            owner[v] = i;
        }
        if !host.is_connected_subset(set) {
            return Ok(false);
        }
    }
    if emb.edge_witness.len() != emb.pattern.edge_count() {
        return Ok(false);
    }
    for (a, b) in emb.pattern.edges() {
        let Some(&(u, v)) = emb.edge_witness.get(&(a, b)) else {
            return Ok(false);
        };
        if !host.has_edge(u, v) || owner[u] != a || owner[v] != b {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorOutcome {
    Found(MinorEmbedding),
    Absent,
    BudgetExhausted,
}

impl MinorOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, MinorOutcome::Found(_))
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            MinorOutcome::Found(_) => "found",
            MinorOutcome::Absent => "absent",
            MinorOutcome::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: u64,
    /// Vertices in the largest piece left after reductions.
    pub largest_piece: usize,
}

pub fn find_minor(
    host: &Graph,
    pattern: &Graph,
    budget: Budget,
) -> Result<MinorOutcome, MinorError> {
    find_minor_with_stats(host, pattern, budget).map(|(o, _)| o)
}

pub fn find_minor_with_stats(
    host: &Graph,
    pattern: &Graph,
    budget: Budget,
) -> Result<(MinorOutcome, SearchStats), MinorError> {
    if pattern.n() > MAX_PATTERN_VERTICES || pattern.edge_count() > MAX_PATTERN_EDGES {
        return Err(MinorError::PatternTooLarge {
            vertices: pattern.n(),
            edges: pattern.edge_count(),
        });
    }
    let mut stats = SearchStats::default();
    if pattern.n() == 0 {
        let emb = MinorEmbedding {
            pattern: pattern.clone(),
            branch_sets: Vec::new(),
            edge_witness: BTreeMap::new(),
        };
        return Ok((MinorOutcome::Found(emb), stats));
    }
    let mut counter = sweep::Counter::new(budget.0);
    let outcome = reduce::solve(host, pattern, &mut counter, &mut stats.largest_piece);
    stats.expansions = counter.used();
    let outcome = match outcome {
        sweep::Outcome::Found(sets) => {
            let emb = MinorEmbedding::from_branch_sets(host, pattern, sets)
                .expect("search produced branch sets without edge witnesses");
            assert!(
                verify_embedding(host, &emb) == Ok(true),
                "search produced an invalid certificate"
            );
            MinorOutcome::Found(emb)
        }
        sweep::Outcome::Absent => MinorOutcome::Absent,
        sweep::Outcome::Exhausted => MinorOutcome::BudgetExhausted,
    };
    Ok((outcome, stats))
}

/// `find_minor` with pattern `K_m`; the search treats branch sets as unordered.
pub fn find_clique_minor(
    host: &Graph,
    m: usize,
    budget: Budget,
) -> Result<MinorOutcome, MinorError> {
    find_minor(host, &Graph::complete(m), budget)
}

/// Largest `m` for which a `K_m` minor was found within `budget` (per search),
/// together with its certificate.
pub fn hadwiger_lower_bound(
    host: &Graph,
    budget: Budget,
) -> Result<(usize, MinorEmbedding), MinorError> {
    let mut best = (
        0,
        MinorEmbedding {
            pattern: Graph::empty(0),
            branch_sets: Vec::new(),
            edge_witness: BTreeMap::new(),
        },
    );
    for m in 1..=MAX_PATTERN_VERTICES.min(host.n()) {
        let edges = m * (m - 1) / 2;
        if edges > host.edge_count() || edges > MAX_PATTERN_EDGES {
            break;
        }
        match find_clique_minor(host, m, budget)? {
            MinorOutcome::Found(emb) => best = (m, emb),
            _ => break,
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Planarity {
    Planar,
    /// Carries a verified `K5` or `K3,3` minor.
    NonPlanar(MinorEmbedding),
    BudgetExhausted,
}

/// Planarity by exclusion of `K5` and `K3,3` minors. `budget` applies to each
/// of the two searches.
pub fn is_planar(host: &Graph, budget: Budget) -> Planarity {
    let n = host.n();
    let dense = n >= 3 && host.edge_count() > 3 * n - 6;
    if dense {
        log::debug!("edge count exceeds 3n-6; searching for a witness");
    }
    let mut exhausted = false;
    for pattern in [Graph::complete_bipartite(3, 3), Graph::complete(5)] {
        match find_minor(host, &pattern, budget).expect("fixed patterns are small") {
            MinorOutcome::Found(emb) => return Planarity::NonPlanar(emb),
            MinorOutcome::Absent => {}
            MinorOutcome::BudgetExhausted => exhausted = true,
        }
    }
    if exhausted {
        Planarity::BudgetExhausted
    } else {
        assert!(
            !dense,
            "exact search missed a Kuratowski minor in a dense graph"
        );
        Planarity::Planar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(pattern: Graph, sets: Vec<Vec<usize>>, host: &Graph) -> MinorEmbedding {
        MinorEmbedding::from_branch_sets(host, &pattern, sets).unwrap()
    }

    #[test]
    fn verify_examples() {
        let k5 = Graph::complete(5);
        let e = emb(k5.clone(), (0..5).map(|v| vec![v]).collect(), &k5);
        assert_eq!(verify_embedding(&k5, &e), Ok(true));

        let c5 = Graph::cycle(5);
        let e = emb(
            Graph::complete(3),
            vec![vec![0, 1], vec![2, 3], vec![4]],
            &c5,
        );
        assert_eq!(verify_embedding(&c5, &e), Ok(true));

        let mut bad = e.clone();
        bad.branch_sets = vec![vec![0, 2], vec![1], vec![3, 4]];
        bad.edge_witness = BTreeMap::from([((0, 1), (0, 1)), ((0, 2), (0, 4)), ((1, 2), (1, 2))]);
        assert_eq!(verify_embedding(&c5, &bad), Ok(false));
    }

    #[test]
    fn verify_rejects_malformed() {
        let c5 = Graph::cycle(5);
        let mut e = emb(
            Graph::complete(3),
            vec![vec![0, 1], vec![2, 3], vec![4]],
            &c5,
        );
        e.branch_sets[2] = vec![9];
        assert!(matches!(
            verify_embedding(&c5, &e),
            Err(MinorError::IndexOutOfBounds { index: 9, .. })
        ));
        let mut e = emb(
            Graph::complete(3),
            vec![vec![0, 1], vec![2, 3], vec![4]],
            &c5,
        );
        e.edge_witness.insert((0, 7), (0, 1));
        assert!(matches!(
            verify_embedding(&c5, &e),
            Err(MinorError::IndexOutOfBounds { index: 7, .. })
        ));
        // overlapping sets and a missing witness
        let mut e = emb(
            Graph::complete(3),
            vec![vec![0, 1], vec![2, 3], vec![4]],
            &c5,
        );
        e.branch_sets[2] = vec![3, 4];
        assert_eq!(verify_embedding(&c5, &e), Ok(false));
        let mut e = emb(
            Graph::complete(3),
            vec![vec![0, 1], vec![2, 3], vec![4]],
            &c5,
        );
        e.edge_witness.remove(&(0, 2));
        assert_eq!(verify_embedding(&c5, &e), Ok(false));
    }

    #[test]
    fn certificate_json_round_trip() {
        let c5 = Graph::cycle(5);
        let e = emb(
            Graph::complete(3),
            vec![vec![0, 1], vec![2, 3], vec![4]],
            &c5,
        );
        let j = serde_json::to_string(&e.to_json()).unwrap();
        let back: CertificateJson = serde_json::from_str(&j).unwrap();
        assert_eq!(MinorEmbedding::from_json(&back).unwrap(), e);
        assert!(j.contains("\"0-1\""));
    }

    #[test]
    fn find_minor_examples() {
        let c5 = Graph::cycle(5);
        assert_eq!(
            find_minor(&c5, &Graph::complete(4), Budget::UNLIMITED),
            Ok(MinorOutcome::Absent)
        );
        let out = find_minor(&Graph::petersen(), &Graph::complete(5), Budget::UNLIMITED).unwrap();
        let MinorOutcome::Found(e) = out else {
            panic!("{out:?}")
        };
        assert_eq!(verify_embedding(&Graph::petersen(), &e), Ok(true));
        let out = find_minor(&Graph::path(4), &Graph::complete(1), Budget::UNLIMITED).unwrap();
        assert!(out.is_found());
    }

    #[test]
    fn clique_minor_examples() {
        assert!(find_clique_minor(&Graph::cycle(5), 3, Budget::UNLIMITED)
            .unwrap()
            .is_found());
        assert_eq!(
            find_clique_minor(&Graph::path(5), 3, Budget::UNLIMITED),
            Ok(MinorOutcome::Absent)
        );
        let circulant = Graph::from_edges(
            5,
            &(0..5)
                .flat_map(|i| [(i, (i + 1) % 5), (i, (i + 2) % 5)])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(find_clique_minor(&circulant, 5, Budget::UNLIMITED)
            .unwrap()
            .is_found());
    }

    #[test]
    fn hadwiger_examples() {
        assert_eq!(
            hadwiger_lower_bound(&Graph::cycle(5), Budget::UNLIMITED)
                .unwrap()
                .0,
            3
        );
        let (m, cert) = hadwiger_lower_bound(&Graph::complete(6), Budget::UNLIMITED).unwrap();
        assert_eq!(m, 6);
        assert_eq!(verify_embedding(&Graph::complete(6), &cert), Ok(true));
        let tree = Graph::from_edges(
            10,
            &[
                (0, 1),
                (0, 2),
                (1, 3),
                (1, 4),
                (2, 5),
                (2, 6),
                (3, 7),
                (4, 8),
                (5, 9),
            ],
        )
        .unwrap();
        assert_eq!(hadwiger_lower_bound(&tree, Budget::UNLIMITED).unwrap().0, 2);
    }

    #[test]
    fn planarity_examples() {
        assert_eq!(
            is_planar(&Graph::cycle(5), Budget::UNLIMITED),
            Planarity::Planar
        );
        for g in [
            Graph::complete(5),
            Graph::complete_bipartite(3, 3),
            Graph::petersen(),
        ] {
            let Planarity::NonPlanar(w) = is_planar(&g, Budget::UNLIMITED) else {
                panic!("expected non-planar")
            };
            assert_eq!(verify_embedding(&g, &w), Ok(true));
        }
    }

    #[test]
    fn tiny_budget_is_reported() {
        let out = find_minor(&Graph::petersen(), &Graph::complete(5), Budget(3)).unwrap();
        assert_eq!(out, MinorOutcome::BudgetExhausted);
    }

    #[test]
    fn oversized_pattern_is_an_error() {
        let big = Graph::complete(MAX_PATTERN_VERTICES + 1);
        assert!(matches!(
            find_minor(&big, &big, Budget::UNLIMITED),
            Err(MinorError::PatternTooLarge { .. })
        ));
    }
}
