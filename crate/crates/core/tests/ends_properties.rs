use cayminor::ends::{live_components, max_disjoint_paths, max_internally_disjoint_paths};
use cayminor::generate::random_gnp;
use cayminor::{build_ball, GenSet, Graph, GroupModel};
use proptest::prelude::*;

/// Least number of vertices (terminals allowed) meeting every source-target path.
fn min_vertex_cut(
    g: &Graph,
    sources: &[usize],
    targets: &[usize],
    removable: impl Fn(usize) -> bool,
) -> usize {
    let n = g.n();
    let mut best = usize::MAX;
    for mask in 0u32..1 << n {
        let size = mask.count_ones() as usize;
        if size >= best || (0..n).any(|v| mask >> v & 1 == 1 && !removable(v)) {
            continue;
        }
        let alive = |v: usize| mask >> v & 1 == 0;
        let mut seen: Vec<bool> = (0..n).map(|v| sources.contains(&v) && alive(v)).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
        let mut reached = false;
        while let Some(v) = stack.pop() {
            reached |= targets.contains(&v);
            for &w in g.neighbors(v) {
                if alive(w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if !reached {
            best = size;
        }
    }
    best
}

fn terminals(n: usize, a: usize, b: usize, overlap: bool) -> (Vec<usize>, Vec<usize>) {
    let sources: Vec<usize> = (0..a.min(n)).collect();
    let first_target = if overlap { 0 } else { a.min(n - 1) };
    let targets: Vec<usize> = (first_target..(first_target + b).min(n)).collect();
    (sources, targets)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn disjoint_paths_match_minimum_cut(seed in any::<u64>(), n in 3usize..11, p in 0.1f64..0.7, a in 1usize..4, b in 1usize..4, overlap in any::<bool>()) {
        let g = random_gnp(n, p, seed);
        let (sources, targets) = terminals(n, a, b, overlap);
        let found = max_disjoint_paths(&g, &sources, &targets).unwrap();
        prop_assert_eq!(found.count, min_vertex_cut(&g, &sources, &targets, |_| true));
        prop_assert_eq!(found.paths.len(), found.count);
        let mut used = vec![false; n];
        for path in &found.paths {
            prop_assert!(sources.contains(&path[0]));
            prop_assert!(targets.contains(path.last().unwrap()));
            prop_assert!(path[1..].iter().all(|v| !sources.contains(v)));
            prop_assert!(path[..path.len() - 1].iter().all(|v| !targets.contains(v)));
            for w in path.windows(2) {
                prop_assert!(g.has_edge(w[0], w[1]));
            }
            for &v in path {
                prop_assert!(!used[v], "vertex {} on two paths", v);
                used[v] = true;
            }
        }
    }

    #[test]
    fn local_connectivity_matches_separators(seed in any::<u64>(), n in 3usize..10, p in 0.2f64..0.8) {
        let g = random_gnp(n, p, seed);
        let (s, t) = (0, n - 1);
        prop_assume!(!g.has_edge(s, t));
        let found = max_internally_disjoint_paths(&g, &[s], &[t]).unwrap();
        let cut = min_vertex_cut(&g, &[s], &[t], |v| v != s && v != t);
        prop_assert_eq!(found.count, cut);
        let mut used = vec![false; n];
        for path in &found.paths {
            for &v in &path[1..path.len() - 1] {
                prop_assert!(!used[v]);
                used[v] = true;
            }
        }
    }
}

#[test]
fn profiles_partition_the_annulus() {
    for spec in [
        "z^2",
        "z",
        "free:2",
        "freeprod:cyclic:2,cyclic:2",
        "freeprod:cyclic:2,cyclic:3",
        "cyclic:9",
    ] {
        let g = GroupModel::from_spec(spec).unwrap();
        let ball = build_ball(&g, &GenSet::defaults(&g), 6).unwrap();
        for r in 0..6 {
            let profile = live_components(&ball, r).unwrap();
            let mut count = vec![0; ball.len()];
            for c in &profile.components {
                assert!(ball.graph().is_connected_subset(&c.vertices));
                for &v in &c.vertices {
                    count[v] += 1;
                }
            }
            for (v, &c) in count.iter().enumerate() {
                let expect = usize::from(ball.dist(v) > r);
                assert_eq!(c, expect, "{spec} r={r} vertex {v}");
            }
            // No edge joins two different components.
            let mut owner = vec![usize::MAX; ball.len()];
            for (i, c) in profile.components.iter().enumerate() {
                for &v in &c.vertices {
                    owner[v] = i;
                }
            }
            for (u, v) in ball.graph().edges() {
                if owner[u] != usize::MAX && owner[v] != usize::MAX {
                    assert_eq!(owner[u], owner[v], "{spec} r={r}");
                }
            }
        }
    }
}

#[test]
fn live_counts_by_group() {
    for spec in ["free:2", "free:3", "freeprod:cyclic:2,cyclic:3"] {
        let g = GroupModel::from_spec(spec).unwrap();
        let ball = build_ball(&g, &GenSet::defaults(&g), 6).unwrap();
        let counts: Vec<usize> = (0..6)
            .map(|r| live_components(&ball, r).unwrap().live_count)
            .collect();
        assert!(
            counts.windows(2).all(|w| w[0] <= w[1]),
            "{spec}: {counts:?}"
        );
    }
    let z2 = GroupModel::from_spec("z^2").unwrap();
    let ball = build_ball(&z2, &GenSet::defaults(&z2), 10).unwrap();
    assert!((0..9).all(|r| live_components(&ball, r).unwrap().live_count == 1));
    let z = GroupModel::from_spec("z").unwrap();
    let ball = build_ball(&z, &GenSet::defaults(&z), 10).unwrap();
    assert!((0..10).all(|r| live_components(&ball, r).unwrap().live_count == 2));
}
