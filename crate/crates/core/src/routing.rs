//! Shortest, fastest, greenest, and asymptotic-greenest path solvers.
//!
//! All four run the same label-setting search with one deterministic
//! tie-break: labels whose costs differ by at most 1e-12 are ordered by arc
//! count, then by lexicographic arc-id sequence. Arc weights are computed
//! lazily per query because greenest weights depend on payload and the speed
//! policy, so they cannot be preprocessed.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{augmented_ascent, Arc, RoadNetwork};
use crate::physics::{arc_emissions, ArcCost, Coefficients, PhysicsError, VehicleParams};
use crate::speed::{
    dynamic_speed, static_speed, SpeedDecision, SpeedError, SpeedPolicyKind, SpeedRegime,
};

/// Costs closer than this are ties, resolved by arc count then arc-id order.
const TIE_EPS: f64 = 1e-12;

/// Errors from path solving and metric evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("no path from node {from} to node {to}")]
    Unreachable { from: u64, to: u64 },
    #[error("node {0} does not exist in the network")]
    UnknownNode(u64),
    #[error("arc {0} has no traffic speed but the Traffic policy requires one")]
    MissingTrafficSpeed(u64),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("path mismatch: {0}")]
    PathMismatch(String),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Speed(#[from] SpeedError),
}

/// An ordered arc-id sequence from `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub arcs: Vec<u64>,
    pub source: u64,
    pub target: u64,
}

impl Path {
    /// The set of nodes visited, in order.
    pub fn nodes(&self, net: &RoadNetwork) -> Result<Vec<u64>, RoutingError> {
        let mut nodes = vec![self.source];
        let mut at = self.source;
        for &arc_id in &self.arcs {
            let arc = net
                .arc(arc_id)
                .ok_or(RoutingError::PathMismatch(format!("arc {arc_id} missing")))?;
            if arc.from != at {
                return Err(RoutingError::PathMismatch(format!(
                    "arc {arc_id} starts at {} but the path is at {at}",
                    arc.from
                )));
            }
            at = arc.to;
            nodes.push(at);
        }
        if at != self.target {
            return Err(RoutingError::PathMismatch(format!(
                "path ends at {at}, expected {}",
                self.target
            )));
        }
        Ok(nodes)
    }

    /// Total length (m) of the path's arcs.
    pub fn length(&self, net: &RoadNetwork) -> f64 {
        self.arcs
            .iter()
            .filter_map(|id| net.arc(*id))
            .map(|a| a.length)
            .sum()
    }
}

/// A routing question: origin, destination, vehicle, payload, speed policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub source: u64,
    pub target: u64,
    pub vehicle: VehicleParams,
    pub load: f64,
    pub policy: SpeedPolicyKind,
}

impl Query {
    /// Validates endpoints and keeps the payload within vehicle capacity.
    pub fn new(
        source: u64,
        target: u64,
        vehicle: VehicleParams,
        load: f64,
        policy: SpeedPolicyKind,
    ) -> Result<Self, RoutingError> {
        let q = Self::with_load_unchecked(source, target, vehicle, load, policy)?;
        if load > vehicle.l_max {
            return Err(RoutingError::InvalidQuery(format!(
                "load {load} exceeds capacity {}",
                vehicle.l_max
            )));
        }
        Ok(q)
    }

    /// Like [`Query::new`] but without the capacity ceiling, for payload
    /// convergence studies that evaluate loads far beyond `l_max`.
    pub fn with_load_unchecked(
        source: u64,
        target: u64,
        vehicle: VehicleParams,
        load: f64,
        policy: SpeedPolicyKind,
    ) -> Result<Self, RoutingError> {
        if source == target {
            return Err(RoutingError::InvalidQuery(format!(
                "source and target are both {source}"
            )));
        }
        if !load.is_finite() || load < 0.0 {
            return Err(RoutingError::InvalidQuery(format!(
                "load must be finite and nonnegative, got {load}"
            )));
        }
        vehicle.validate()?;
        Ok(Query {
            source,
            target,
            vehicle,
            load,
            policy,
        })
    }

    /// The per-arc speed resolution context for this query.
    pub fn policy_context(&self) -> Result<PolicyContext, RoutingError> {
        PolicyContext::new(self.vehicle, self.load, self.policy)
    }
}

/// Resolves the per-arc speed for a (vehicle, load, policy) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyContext {
    pub vehicle: VehicleParams,
    pub coef: Coefficients,
    pub load: f64,
    pub kind: SpeedPolicyKind,
}

impl PolicyContext {
    pub fn new(
        vehicle: VehicleParams,
        load: f64,
        kind: SpeedPolicyKind,
    ) -> Result<Self, RoutingError> {
        let coef = vehicle.coefficients()?;
        if !load.is_finite() || load < 0.0 {
            return Err(RoutingError::InvalidQuery(format!(
                "load must be finite and nonnegative, got {load}"
            )));
        }
        Ok(PolicyContext {
            vehicle,
            coef,
            load,
            kind,
        })
    }

    /// The speed decision for one arc under this context.
    pub fn arc_speed(&self, arc: &Arc) -> Result<SpeedDecision, RoutingError> {
        match self.kind {
            SpeedPolicyKind::Static => Ok(static_speed(&self.coef, arc.v_min, arc.v_max)?),
            SpeedPolicyKind::Dynamic => Ok(dynamic_speed(
                &self.coef,
                &self.vehicle,
                arc.angle,
                self.load,
                arc.v_min,
                arc.v_max,
            )?),
            SpeedPolicyKind::Traffic => {
                let speed = arc
                    .traffic_speed
                    .ok_or(RoutingError::MissingTrafficSpeed(arc.id))?;
                Ok(SpeedDecision {
                    speed,
                    regime: SpeedRegime::Interior,
                    terminal: 0.0,
                })
            }
        }
    }

    /// Fuel/CO₂/time of one arc at the policy speed.
    pub fn arc_cost(&self, arc: &Arc) -> Result<ArcCost, RoutingError> {
        let decision = self.arc_speed(arc)?;
        Ok(arc_emissions(
            &self.coef,
            &self.vehicle,
            arc.length,
            arc.angle,
            decision.speed,
            self.load,
        )?)
    }
}

#[derive(Clone, PartialEq)]
struct Label {
    cost: f64,
    arcs: Vec<u64>,
}

impl Label {
    fn beats(&self, other: &Label) -> bool {
        if self.cost < other.cost - TIE_EPS {
            return true;
        }
        if self.cost > other.cost + TIE_EPS {
            return false;
        }
        (self.arcs.len(), &self.arcs) < (other.arcs.len(), &other.arcs)
    }
}

struct HeapEntry {
    label: Label,
    node: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // min-heap via reversed comparison
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .label
            .cost
            .total_cmp(&self.label.cost)
            .then_with(|| other.label.arcs.len().cmp(&self.label.arcs.len()))
            .then_with(|| other.label.arcs.cmp(&self.label.arcs))
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Label-setting search over nonnegative arc weights. `weight` returns
/// `Ok(None)` to exclude an arc from the search. Labels store the full arc
/// sequence so equal-cost candidates resolve to the fewest-arcs, smallest
/// arc-id-sequence path.
fn dijkstra<F>(
    net: &RoadNetwork,
    source: u64,
    target: u64,
    weight: F,
) -> Result<Path, RoutingError>
where
    F: Fn(&Arc) -> Result<Option<f64>, RoutingError>,
{
    if !net.has_node(source) {
        return Err(RoutingError::UnknownNode(source));
    }
    if !net.has_node(target) {
        return Err(RoutingError::UnknownNode(target));
    }
    let mut best: HashMap<u64, Label> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let start = Label {
        cost: 0.0,
        arcs: Vec::new(),
    };
    best.insert(source, start.clone());
    heap.push(HeapEntry {
        label: start,
        node: source,
    });

    while let Some(HeapEntry { label, node }) = heap.pop() {
        match best.get(&node) {
            Some(current) if *current == label => {}
            _ => continue, // stale entry
        }
        for arc in net.outgoing(node) {
            let Some(w) = weight(arc)? else { continue };
            debug_assert!(w.is_finite() && w >= 0.0, "arc weights must be nonnegative");
            let mut arcs = label.arcs.clone();
            arcs.push(arc.id);
            let candidate = Label {
                cost: label.cost + w,
                arcs,
            };
            let improves = match best.get(&arc.to) {
                Some(existing) => candidate.beats(existing),
                None => true,
            };
            if improves {
                best.insert(arc.to, candidate.clone());
                heap.push(HeapEntry {
                    label: candidate,
                    node: arc.to,
                });
            }
        }
    }

    match best.remove(&target) {
        Some(label) => Ok(Path {
            arcs: label.arcs,
            source,
            target,
        }),
        None => Err(RoutingError::Unreachable {
            from: source,
            to: target,
        }),
    }
}

/// The minimum-distance path.
pub fn shortest_path(net: &RoadNetwork, source: u64, target: u64) -> Result<Path, RoutingError> {
    dijkstra(net, source, target, |arc| Ok(Some(arc.length)))
}

/// The minimum-travel-time path under the context's speed policy.
pub fn fastest_path(
    net: &RoadNetwork,
    source: u64,
    target: u64,
    ctx: &PolicyContext,
) -> Result<Path, RoutingError> {
    ensure_policy_resolvable(net, ctx.kind)?;
    dijkstra(net, source, target, |arc| {
        Ok(Some(arc.length / ctx.arc_speed(arc)?.speed))
    })
}

/// The minimum-CO₂ path under the query's speed policy and payload, together
/// with its metrics. Weights are strictly positive, so the label-setting
/// search is exact.
pub fn greenest_path(
    net: &RoadNetwork,
    query: &Query,
) -> Result<(Path, PathMetrics), RoutingError> {
    let ctx = query.policy_context()?;
    ensure_policy_resolvable(net, ctx.kind)?;
    let path = dijkstra(net, query.source, query.target, |arc| {
        Ok(Some(ctx.arc_cost(arc)?.co2))
    })?;
    let metrics = path_metrics(net, &path, query)?;
    Ok((path, metrics))
}

/// The greenest path in the infinite-payload limit.
///
/// When the target is reachable through arcs steeper downhill than
/// `−arctan C_r` alone, this is the time-minimizing path in that restricted
/// subgraph, driven at `v_max` under the Dynamic policy (the saturated
/// regime), at the static clamp under Static, or at the traffic speed under
/// Traffic. Otherwise it minimizes total augmented ascent over the full
/// network.
pub fn asymptotic_greenest_path(
    net: &RoadNetwork,
    source: u64,
    target: u64,
    vehicle: &VehicleParams,
    policy: SpeedPolicyKind,
) -> Result<Path, RoutingError> {
    let coef = vehicle.coefficients()?;
    let c_r = vehicle.c_r;
    let steep_speed = |arc: &Arc| -> Result<f64, RoutingError> {
        match policy {
            SpeedPolicyKind::Dynamic => Ok(arc.v_max),
            SpeedPolicyKind::Static => Ok(static_speed(&coef, arc.v_min, arc.v_max)?.speed),
            SpeedPolicyKind::Traffic => arc
                .traffic_speed
                .ok_or(RoutingError::MissingTrafficSpeed(arc.id)),
        }
    };
    let restricted = dijkstra(net, source, target, |arc| {
        if arc.grade() < -c_r {
            Ok(Some(arc.length / steep_speed(arc)?))
        } else {
            Ok(None)
        }
    });
    match restricted {
        Ok(path) => Ok(path),
        Err(RoutingError::Unreachable { .. }) => dijkstra(net, source, target, |arc| {
            Ok(Some(augmented_ascent(arc.length, arc.angle, c_r)))
        }),
        Err(other) => Err(other),
    }
}

/// Per-arc breakdown entry of [`PathMetrics`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerArcMetrics {
    pub arc: u64,
    pub decision: SpeedDecision,
    pub cost: ArcCost,
}

/// Totals and per-arc breakdown for traversing a path under a query's
/// (policy, load) context. Totals are sequential sums over the breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMetrics {
    /// Total length (m).
    pub distance: f64,
    /// Total travel time (s).
    pub time: f64,
    /// Total fuel (L).
    pub fuel: f64,
    /// Total CO₂ (kg).
    pub co2: f64,
    pub per_arc: Vec<PerArcMetrics>,
}

/// Evaluates a path under the query's speed policy and payload.
pub fn path_metrics(
    net: &RoadNetwork,
    path: &Path,
    query: &Query,
) -> Result<PathMetrics, RoutingError> {
    if path.arcs.is_empty() {
        return Err(RoutingError::PathMismatch(
            "path has no arcs (source and target must differ)".into(),
        ));
    }
    let ctx = query.policy_context()?;
    let mut at = path.source;
    let mut per_arc = Vec::with_capacity(path.arcs.len());
    let (mut distance, mut time, mut fuel, mut co2) = (0.0, 0.0, 0.0, 0.0);
    for &arc_id in &path.arcs {
        let arc = net
            .arc(arc_id)
            .ok_or(RoutingError::PathMismatch(format!("arc {arc_id} missing")))?;
        if arc.from != at {
            return Err(RoutingError::PathMismatch(format!(
                "arc {arc_id} does not chain: starts at {} while the path is at {at}",
                arc.from
            )));
        }
        at = arc.to;
        let decision = ctx.arc_speed(arc)?;
        let cost = arc_emissions(
            &ctx.coef,
            &ctx.vehicle,
            arc.length,
            arc.angle,
            decision.speed,
            ctx.load,
        )?;
        distance += arc.length;
        time += cost.time;
        fuel += cost.fuel;
        co2 += cost.co2;
        per_arc.push(PerArcMetrics {
            arc: arc_id,
            decision,
            cost,
        });
    }
    if at != path.target {
        return Err(RoutingError::PathMismatch(format!(
            "path ends at {at}, expected {}",
            path.target
        )));
    }
    Ok(PathMetrics {
        distance,
        time,
        fuel,
        co2,
        per_arc,
    })
}

fn ensure_policy_resolvable(net: &RoadNetwork, kind: SpeedPolicyKind) -> Result<(), RoutingError> {
    if kind == SpeedPolicyKind::Traffic {
        if let Some(arc) = net.arcs().iter().find(|a| a.traffic_speed.is_none()) {
            return Err(RoutingError::MissingTrafficSpeed(arc.id));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ArcRecord, NetworkFile, NodeRecord};
    use crate::physics::TruckClass;

    fn node(id: u64, x: f64, elev: f64) -> NodeRecord {
        NodeRecord {
            id,
            x,
            y: 0.0,
            elev,
        }
    }

    fn arc(id: u64, from: u64, to: u64, length: f64) -> ArcRecord {
        ArcRecord {
            id,
            from,
            to,
            length,
            grade_pct: Some(0.0),
            vmin: Some(5.56),
            vmax: Some(25.0),
            vtraffic: None,
        }
    }

    fn triangle() -> RoadNetwork {
        // direct 5 m arc vs a 3 m + 4 m detour
        RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![node(0, 0.0, 0.0), node(1, 3.0, 0.0), node(2, 5.0, 0.0)],
            arcs: vec![arc(0, 0, 1, 3.0), arc(1, 1, 2, 4.0), arc(2, 0, 2, 5.0)],
        })
        .unwrap()
    }

    #[test]
    fn shortest_on_chain_is_the_chain() {
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: (0..4).map(|i| node(i, i as f64 * 100.0, 0.0)).collect(),
            arcs: (0..3).map(|i| arc(i, i, i + 1, 100.0)).collect(),
        })
        .unwrap();
        let p = shortest_path(&net, 0, 3).unwrap();
        assert_eq!(p.arcs, vec![0, 1, 2]);
        assert_eq!(p.nodes(&net).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn shortest_picks_direct_triangle_arc() {
        let p = shortest_path(&triangle(), 0, 2).unwrap();
        assert_eq!(p.arcs, vec![2]);
    }

    #[test]
    fn unreachable_is_reported() {
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![node(0, 0.0, 0.0), node(1, 1.0, 0.0), node(2, 2.0, 0.0)],
            arcs: vec![arc(0, 0, 1, 10.0)],
        })
        .unwrap();
        assert!(matches!(
            shortest_path(&net, 0, 2),
            Err(RoutingError::Unreachable { from: 0, to: 2 })
        ));
        assert!(matches!(
            shortest_path(&net, 0, 9),
            Err(RoutingError::UnknownNode(9))
        ));
    }

    #[test]
    fn equal_cost_ties_resolve_to_fewest_then_smallest_arc_ids() {
        // two parallel 5 m arcs and an equal-length two-arc detour
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![node(0, 0.0, 0.0), node(1, 2.5, 0.0), node(2, 5.0, 0.0)],
            arcs: vec![
                arc(3, 0, 2, 5.0),
                arc(7, 0, 2, 5.0),
                arc(4, 0, 1, 2.5),
                arc(5, 1, 2, 2.5),
            ],
        })
        .unwrap();
        let p = shortest_path(&net, 0, 2).unwrap();
        assert_eq!(p.arcs, vec![3]);
    }

    #[test]
    fn fastest_with_uniform_traffic_matches_shortest() {
        let mut file = NetworkFile {
            nodes: vec![node(0, 0.0, 0.0), node(1, 3.0, 0.0), node(2, 5.0, 0.0)],
            arcs: vec![arc(0, 0, 1, 3.0), arc(1, 1, 2, 4.0), arc(2, 0, 2, 5.0)],
        };
        for a in &mut file.arcs {
            a.vtraffic = Some(8.0);
        }
        let net = RoadNetwork::from_file_model(file).unwrap();
        let ctx = PolicyContext::new(TruckClass::Mdd.params(), 0.0, SpeedPolicyKind::Traffic)
            .unwrap();
        let fast = fastest_path(&net, 0, 2, &ctx).unwrap();
        let short = shortest_path(&net, 0, 2).unwrap();
        assert_eq!(fast.arcs, short.arcs);

        // same under the static policy: one speed everywhere on a flat
        // network, so time is proportional to distance
        let ctx = PolicyContext::new(TruckClass::Mdd.params(), 0.0, SpeedPolicyKind::Static)
            .unwrap();
        let fast = fastest_path(&net, 0, 2, &ctx).unwrap();
        assert_eq!(fast.arcs, short.arcs);
    }

    #[test]
    fn fastest_prefers_longer_route_with_double_traffic_speed() {
        // route A: one 1000 m arc at 5 m/s (200 s)
        // route B: 1800 m over two arcs at 10 m/s (180 s)
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![node(0, 0.0, 0.0), node(1, 1.0, 0.0), node(2, 2.0, 0.0)],
            arcs: vec![
                ArcRecord {
                    vtraffic: Some(5.0),
                    ..arc(0, 0, 2, 1000.0)
                },
                ArcRecord {
                    vtraffic: Some(10.0),
                    ..arc(1, 0, 1, 900.0)
                },
                ArcRecord {
                    vtraffic: Some(10.0),
                    ..arc(2, 1, 2, 900.0)
                },
            ],
        })
        .unwrap();
        let ctx = PolicyContext::new(TruckClass::Ldd.params(), 0.0, SpeedPolicyKind::Traffic)
            .unwrap();
        let fast = fastest_path(&net, 0, 2, &ctx).unwrap();
        assert_eq!(fast.arcs, vec![1, 2]);
    }

    #[test]
    fn traffic_policy_requires_speeds_everywhere() {
        let net = triangle();
        let ctx = PolicyContext::new(TruckClass::Ldd.params(), 0.0, SpeedPolicyKind::Traffic)
            .unwrap();
        assert!(matches!(
            fastest_path(&net, 0, 2, &ctx),
            Err(RoutingError::MissingTrafficSpeed(0))
        ));
    }

    #[test]
    fn greenest_on_flat_network_is_the_shortest_path() {
        let net = triangle();
        let query = Query::new(0, 2, TruckClass::Hdd.params(), 10000.0, SpeedPolicyKind::Static)
            .unwrap();
        let (p, m) = greenest_path(&net, &query).unwrap();
        assert_eq!(p.arcs, shortest_path(&net, 0, 2).unwrap().arcs);
        assert!(m.co2 > 0.0);
        assert_eq!(m.distance, 5.0);
    }

    #[test]
    fn asymptotic_flat_network_minimizes_length() {
        let net = triangle();
        let p = asymptotic_greenest_path(
            &net,
            0,
            2,
            &TruckClass::Hdd.params(),
            SpeedPolicyKind::Dynamic,
        )
        .unwrap();
        assert_eq!(p.arcs, vec![2]);
    }

    #[test]
    fn asymptotic_prefers_steep_corridor_over_short_mixed_route() {
        // corridor 0→1→2 entirely below −arctan C_r; direct flat 0→2 is shorter
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![node(0, 0.0, 100.0), node(1, 1.0, 50.0), node(2, 2.0, 0.0)],
            arcs: vec![
                ArcRecord {
                    grade_pct: Some(-5.0),
                    ..arc(0, 0, 1, 1000.0)
                },
                ArcRecord {
                    grade_pct: Some(-5.0),
                    ..arc(1, 1, 2, 1000.0)
                },
                ArcRecord {
                    grade_pct: Some(0.0),
                    ..arc(2, 0, 2, 500.0)
                },
            ],
        })
        .unwrap();
        let p = asymptotic_greenest_path(
            &net,
            0,
            2,
            &TruckClass::Hdd.params(),
            SpeedPolicyKind::Dynamic,
        )
        .unwrap();
        assert_eq!(p.arcs, vec![0, 1]);
        // two steep corridors: the faster (higher v_max) one wins
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![
                node(0, 0.0, 100.0),
                node(1, 1.0, 50.0),
                node(2, 2.0, 0.0),
                node(3, 1.0, 50.0),
            ],
            arcs: vec![
                ArcRecord {
                    grade_pct: Some(-5.0),
                    vmax: Some(15.0),
                    ..arc(0, 0, 1, 1000.0)
                },
                ArcRecord {
                    grade_pct: Some(-5.0),
                    vmax: Some(15.0),
                    ..arc(1, 1, 2, 1000.0)
                },
                ArcRecord {
                    grade_pct: Some(-5.0),
                    vmax: Some(25.0),
                    ..arc(2, 0, 3, 1100.0)
                },
                ArcRecord {
                    grade_pct: Some(-5.0),
                    vmax: Some(25.0),
                    ..arc(3, 3, 2, 1100.0)
                },
            ],
        })
        .unwrap();
        let p = asymptotic_greenest_path(
            &net,
            0,
            2,
            &TruckClass::Hdd.params(),
            SpeedPolicyKind::Dynamic,
        )
        .unwrap();
        assert_eq!(p.arcs, vec![2, 3]);
    }

    #[test]
    fn metrics_reject_broken_paths() {
        let net = triangle();
        let query =
            Query::new(0, 2, TruckClass::Ldd.params(), 0.0, SpeedPolicyKind::Static).unwrap();
        let empty = Path {
            arcs: vec![],
            source: 0,
            target: 2,
        };
        assert!(path_metrics(&net, &empty, &query).is_err());
        let broken = Path {
            arcs: vec![1],
            source: 0,
            target: 2,
        };
        assert!(path_metrics(&net, &broken, &query).is_err());
    }

    #[test]
    fn metrics_add_over_concatenated_subpaths() {
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: (0..5).map(|i| node(i, i as f64 * 100.0, (i as f64) * 2.0)).collect(),
            arcs: (0..4)
                .map(|i| ArcRecord {
                    grade_pct: None,
                    ..arc(i, i, i + 1, 100.0)
                })
                .collect(),
        })
        .unwrap();
        let vehicle = TruckClass::Mdd.params();
        let q = |s, t| Query::new(s, t, vehicle, 5000.0, SpeedPolicyKind::Dynamic).unwrap();
        let whole = path_metrics(
            &net,
            &Path {
                arcs: vec![0, 1, 2, 3],
                source: 0,
                target: 4,
            },
            &q(0, 4),
        )
        .unwrap();
        let first = path_metrics(
            &net,
            &Path {
                arcs: vec![0, 1],
                source: 0,
                target: 2,
            },
            &q(0, 2),
        )
        .unwrap();
        let second = path_metrics(
            &net,
            &Path {
                arcs: vec![2, 3],
                source: 2,
                target: 4,
            },
            &q(2, 4),
        )
        .unwrap();
        for (whole, parts) in [
            (whole.fuel, first.fuel + second.fuel),
            (whole.co2, first.co2 + second.co2),
            (whole.time, first.time + second.time),
            (whole.distance, first.distance + second.distance),
        ] {
            assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1.0));
        }
    }

    #[test]
    fn single_flat_arc_metrics_match_physics() {
        let net = RoadNetwork::from_file_model(NetworkFile {
            nodes: vec![node(0, 0.0, 0.0), node(1, 1000.0, 0.0)],
            arcs: vec![arc(0, 0, 1, 1000.0)],
        })
        .unwrap();
        let vehicle = TruckClass::Hdd.params();
        let coef = vehicle.coefficients().unwrap();
        let query = Query::new(0, 1, vehicle, 15600.0, SpeedPolicyKind::Static).unwrap();
        let (_, m) = greenest_path(&net, &query).unwrap();
        let speed = static_speed(&coef, 5.56, 25.0).unwrap().speed;
        let expected = arc_emissions(&coef, &vehicle, 1000.0, 0.0, speed, 15600.0).unwrap();
        assert_eq!(m.fuel, expected.fuel);
        assert_eq!(m.co2, expected.co2);
        assert_eq!(m.time, expected.time);
    }

    #[test]
    fn query_validates_inputs() {
        let vp = TruckClass::Ldd.params();
        assert!(Query::new(1, 1, vp, 0.0, SpeedPolicyKind::Static).is_err());
        assert!(Query::new(0, 1, vp, -5.0, SpeedPolicyKind::Static).is_err());
        assert!(Query::new(0, 1, vp, 4001.0, SpeedPolicyKind::Static).is_err());
        assert!(Query::with_load_unchecked(0, 1, vp, 1e7, SpeedPolicyKind::Static).is_ok());
    }
}
