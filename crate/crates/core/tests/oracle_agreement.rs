use cayminor::generate::{connected_graphs, random_suite};
use cayminor::minor::{brute_force_minor, find_minor, verify_embedding, Budget, MinorOutcome};
use cayminor::Graph;

fn patterns() -> Vec<(&'static str, Graph)> {
    vec![
        ("K3", Graph::complete(3)),
        ("K4", Graph::complete(4)),
        ("K5", Graph::complete(5)),
        ("K3,3", Graph::complete_bipartite(3, 3)),
    ]
}

fn agree(host: &Graph) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, p) in patterns() {
        let exact = brute_force_minor(host, &p).unwrap();
        match find_minor(host, &p, Budget::UNLIMITED).unwrap() {
            MinorOutcome::Found(emb) => {
                assert!(verify_embedding(host, &emb).unwrap());
                if !exact {
                    bad.push(format!(
                        "{name} found but oracle says absent in {:?}",
                        host.edges()
                    ));
                }
            }
            MinorOutcome::Absent => {
                if exact {
                    bad.push(format!(
                        "{name} absent but oracle finds it in {:?}",
                        host.edges()
                    ));
                }
            }
            MinorOutcome::BudgetExhausted => unreachable!("unlimited budget"),
        }
    }
    bad
}

#[test]
fn all_connected_graphs_up_to_seven_vertices() {
    let mut bad = Vec::new();
    for n in 1..=7 {
        for g in connected_graphs(n) {
            bad.extend(agree(&g));
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn seeded_random_graphs_up_to_ten_vertices() {
    let mut bad = Vec::new();
    for g in random_suite(200, 10, 2024) {
        bad.extend(agree(&g));
    }
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn disconnected_patterns_against_oracle() {
    let two_triangles =
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
    let edge_and_point = Graph::from_edges(3, &[(0, 1)]).unwrap();
    for g in random_suite(60, 9, 99) {
        for p in [&two_triangles, &edge_and_point] {
            let exact = brute_force_minor(&g, p).unwrap();
            let got = find_minor(&g, p, Budget::UNLIMITED).unwrap();
            assert_eq!(got.is_found(), exact, "{:?} vs {:?}", g.edges(), p.edges());
        }
    }
}
