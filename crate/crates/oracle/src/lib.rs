//! Brute-force reference implementations used only by tests.
//!
//! These deliberately avoid the engine's search machinery: path optima come
//! from exhaustive enumeration of simple paths, speed optima from dense grid
//! search over the arc's speed band. Production binaries must not link this
//! crate; it exists to cross-check the solvers, so any disagreement is a hard
//! test failure rather than a tolerance case.

use greenroute_core::network::{Arc, RoadNetwork};
use greenroute_core::physics::{fuel_improved, Coefficients, VehicleParams};
use greenroute_core::routing::Path;
use thiserror::Error;

/// Guards for the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Refuse to enumerate networks with more nodes than this.
    pub max_nodes: usize,
    /// Grid step (m/s) for speed search helpers that use the config.
    pub speed_grid_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_nodes: 12,
            speed_grid_step: 1e-3,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.max_nodes < 2 {
            return Err(OracleError::InvalidConfig(format!(
                "max_nodes must be at least 2, got {}",
                self.max_nodes
            )));
        }
        if !self.speed_grid_step.is_finite() || self.speed_grid_step <= 0.0 {
            return Err(OracleError::InvalidConfig(format!(
                "speed_grid_step must be positive, got {}",
                self.speed_grid_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("network has {nodes} nodes, above the enumeration guard of {max}")]
    NetworkTooLarge { nodes: usize, max: usize },
    #[error("no simple path from {from} to {to}")]
    NoPath { from: u64, to: u64 },
    #[error("invalid oracle config: {0}")]
    InvalidConfig(String),
}

/// Same tie-break rule as the solvers: lower cost wins outright beyond 1e-12,
/// otherwise fewer arcs, then the lexicographically smaller arc-id sequence.
fn candidate_beats(cost: f64, arcs: &[u64], best_cost: f64, best_arcs: &[u64]) -> bool {
    if cost < best_cost - 1e-12 {
        return true;
    }
    if cost > best_cost + 1e-12 {
        return false;
    }
    (arcs.len(), arcs) < (best_arcs.len(), best_arcs)
}

/// Exhaustive depth-first enumeration of every simple path from `source` to
/// `target`, returning the global optimum of the per-arc weight sum under the
/// shared tie-break rule.
pub fn enumerate_paths_bruteforce<F>(
    net: &RoadNetwork,
    source: u64,
    target: u64,
    config: &OracleConfig,
    cost: F,
) -> Result<(Path, f64), OracleError>
where
    F: Fn(&Arc) -> f64,
{
    config.validate()?;
    if net.nodes().len() > config.max_nodes {
        return Err(OracleError::NetworkTooLarge {
            nodes: net.nodes().len(),
            max: config.max_nodes,
        });
    }

    struct Search<'a, F> {
        net: &'a RoadNetwork,
        target: u64,
        cost: F,
        visited: Vec<u64>,
        arcs: Vec<u64>,
        best: Option<(f64, Vec<u64>)>,
    }

    impl<F: Fn(&Arc) -> f64> Search<'_, F> {
        fn explore(&mut self, node: u64, acc: f64) {
            if node == self.target {
                let improves = match &self.best {
                    None => true,
                    Some((best_cost, best_arcs)) => {
                        candidate_beats(acc, &self.arcs, *best_cost, best_arcs)
                    }
                };
                if improves {
                    self.best = Some((acc, self.arcs.clone()));
                }
                return;
            }
            let out: Vec<(u64, u64, f64)> = self
                .net
                .outgoing(node)
                .map(|arc| (arc.id, arc.to, (self.cost)(arc)))
                .collect();
            for (arc_id, to, w) in out {
                if self.visited.contains(&to) {
                    continue;
                }
                self.visited.push(to);
                self.arcs.push(arc_id);
                self.explore(to, acc + w);
                self.arcs.pop();
                self.visited.pop();
            }
        }
    }

    let mut search = Search {
        net,
        target,
        cost,
        visited: vec![source],
        arcs: Vec::new(),
        best: None,
    };
    search.explore(source, 0.0);
    match search.best {
        Some((cost, arcs)) => Ok((
            Path {
                arcs,
                source,
                target,
            },
            cost,
        )),
        None => Err(OracleError::NoPath {
            from: source,
            to: target,
        }),
    }
}

/// Argmin of the improved-model fuel over the speed grid
/// `{start, start + step, …} ∩ (0, v_max]`, where `start` is `v_min`, or
/// `step` when the lower bound is zero. Returns the grid point with minimal
/// fuel, preferring the slowest on exact ties.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_speed(
    coef: &Coefficients,
    vp: &VehicleParams,
    length: f64,
    angle: f64,
    v_min: f64,
    v_max: f64,
    load: f64,
    step: f64,
) -> f64 {
    assert!(step > 0.0, "grid step must be positive");
    assert!(v_min >= 0.0 && v_max >= v_min && v_max > 0.0);
    let start = if v_min > 0.0 { v_min } else { step };
    let mut best = (f64::INFINITY, v_max);
    let mut i = 0u64;
    loop {
        let v = start + i as f64 * step;
        if v > v_max + 1e-12 {
            break;
        }
        let v = v.min(v_max);
        let fuel = fuel_improved(coef, vp, length, angle, v, load)
            .expect("grid speeds are positive and finite");
        if fuel < best.0 {
            best = (fuel, v);
        }
        i += 1;
    }
    best.1
}
