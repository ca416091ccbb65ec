//! Benchmark dataset statistics: densities follow from the published counts.

use peco::InteractionGraph;

/// A graph with exactly `edges` interactions spread over all users.
fn graph_with_counts(users: usize, items: usize, edges: usize) -> InteractionGraph {
    let rows = (0..users)
        .map(|u| {
            let degree = edges / users + usize::from(u < edges % users);
            (0..degree).map(|k| ((u + k) % items) as u32).collect()
        })
        .collect();
    InteractionGraph::from_rows(items, rows).unwrap()
}

fn density_percent(users: usize, items: usize, edges: usize) -> f64 {
    let g = graph_with_counts(users, items, edges);
    assert_eq!((g.num_users(), g.num_items(), g.num_edges()), (users, items, edges));
    100.0 * g.density()
}

#[test]
fn published_densities() {
    // (users, items, interactions, printed density in percent)
    for (users, items, edges, printed) in [
        (6034, 3247, 574_631, 2.932),
        (45_919, 45_538, 930_030, 0.044),
        (43_169, 35_648, 777_426, 0.051),
    ] {
        let d = density_percent(users, items, edges);
        assert!((d - printed).abs() < 1e-3, "{d} vs printed {printed}");
    }
}

#[test]
fn beauty_density_follows_counts() {
    // The published 0.299% does not follow from 70506 / (7068 * 3750).
    let d = density_percent(7068, 3750, 70_506);
    assert!((d - 0.266).abs() < 1e-3, "{d}");
    assert_eq!(d, 100.0 * 70_506.0 / (7068.0 * 3750.0));
}
