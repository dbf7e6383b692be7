//! Shared builders for solver and acceptance tests.
#![allow(dead_code)] // each test binary uses a subset of these helpers

use greenroute_core::network::{ArcRecord, NetworkFile, NodeRecord, RoadNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded random 8-node elevation graph. Nodes 0..8 carry random
/// elevations; a chain 0→1→…→7 guarantees that (0, 7) is reachable, and ten
/// extra random arcs add alternative routes. Grades derive from elevations
/// and get clipped at ±10%.
pub fn random_elevation_graph(seed: u64, with_traffic: bool) -> RoadNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 8u64;
    let nodes: Vec<NodeRecord> = (0..n)
        .map(|id| NodeRecord {
            id,
            x: id as f64 * 100.0,
            y: 0.0,
            elev: rng.gen_range(0.0..30.0),
        })
        .collect();
    let mut arcs: Vec<ArcRecord> = Vec::new();
    let push = |arcs: &mut Vec<ArcRecord>, rng: &mut ChaCha8Rng, from: u64, to: u64| {
        let v_min = if rng.gen_bool(0.3) {
            0.0
        } else {
            rng.gen_range(1.0..5.0)
        };
        let v_max = rng.gen_range(8.0..30.0);
        let vtraffic = if with_traffic {
            Some(rng.gen_range(1.0..v_max))
        } else {
            None
        };
        arcs.push(ArcRecord {
            id: arcs.len() as u64,
            from,
            to,
            length: rng.gen_range(50.0..400.0),
            grade_pct: None,
            vmin: Some(v_min),
            vmax: Some(v_max),
            vtraffic,
        });
    };
    for i in 0..n - 1 {
        push(&mut arcs, &mut rng, i, i + 1);
    }
    let mut added = 0;
    while added < 10 {
        let from = rng.gen_range(0..n);
        let to = rng.gen_range(0..n);
        if from != to {
            push(&mut arcs, &mut rng, from, to);
            added += 1;
        }
    }
    RoadNetwork::from_file_model(NetworkFile { nodes, arcs }).unwrap()
}

/// Two routes from node 0 to node 2: a short route over a 4% hill
/// (arcs 0, 1) and a longer flat contour via nodes 3 and 4 (arcs 2, 3, 4).
/// For an HDD truck under the dynamic policy the hill route is greenest when
/// empty and the contour route is greenest at 80% load.
pub fn hill_vs_contour_network() -> RoadNetwork {
    let arc = |id: u64, from: u64, to: u64, length: f64, grade_pct: f64| ArcRecord {
        id,
        from,
        to,
        length,
        grade_pct: Some(grade_pct),
        vmin: Some(5.56),
        vmax: Some(25.0),
        vtraffic: None,
    };
    RoadNetwork::from_file_model(NetworkFile {
        nodes: (0..5)
            .map(|id| NodeRecord {
                id,
                x: id as f64 * 100.0,
                y: 0.0,
                elev: 0.0,
            })
            .collect(),
        arcs: vec![
            arc(0, 0, 1, 500.0, 4.0),
            arc(1, 1, 2, 500.0, -4.0),
            arc(2, 0, 3, 600.0, 0.0),
            arc(3, 3, 4, 600.0, 0.0),
            arc(4, 4, 2, 600.0, 0.0),
        ],
    })
    .unwrap()
}
