//! Road-network data model, JSON file ingestion, grade derivation and
//! clipping, augmented ascent, and deterministic synthetic-city generation.
//!
//! The on-disk format is a single UTF-8 JSON document:
//!
//! ```json
//! {"nodes":[{"id":0,"x":0.0,"y":0.0,"elev":12.0}],
//!  "arcs":[{"id":0,"from":0,"to":1,"length":200.0,
//!           "grade_pct":1.5,"vmin":5.56,"vmax":25.0,"vtraffic":9.0}]}
//! ```
//!
//! `grade_pct`, `vmin`, `vmax`, and `vtraffic` are optional on input; an
//! absent grade is derived from endpoint elevations as
//! `100 · (elev_to − elev_from) / length` and then clipped to ±10%. On output
//! arcs are sorted by id and grades/bounds are always written, so a network
//! re-serializes to the same document byte for byte.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default lower speed bound (m/s), 20 km/h rounded to two decimals.
pub const DEFAULT_V_MIN: f64 = 5.56;
/// Default upper speed bound (m/s), 90 km/h.
pub const DEFAULT_V_MAX: f64 = 25.0;
/// Grades are clipped to this many percent in absolute value at ingestion.
pub const GRADE_CLIP_PCT: f64 = 10.0;
/// Rolling-resistance coefficient used for the cached per-arc augmented
/// ascent; all built-in truck classes share this value.
pub const DEFAULT_ROLLING_RESISTANCE: f64 = 0.01;

/// Errors from parsing, constructing, or generating networks.
#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate node id {0}")]
    DuplicateNodeId(u64),
    #[error("duplicate arc id {0}")]
    DuplicateArcId(u64),
    #[error("arc {arc}: endpoint node {node} does not exist")]
    DanglingEndpoint { arc: u64, node: u64 },
    #[error("arc {arc}: length must be positive and finite, got {length}")]
    NonPositiveLength { arc: u64, length: f64 },
    #[error("arc {arc}: field `{field}` is invalid ({message})")]
    InvalidArcField {
        arc: u64,
        field: &'static str,
        message: String,
    },
    #[error("node {node}: field `{field}` must be finite")]
    NonFiniteNodeField { node: u64, field: &'static str },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// A vertex of the road network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: u64,
    /// Planar x coordinate (m).
    pub x: f64,
    /// Planar y coordinate (m).
    pub y: f64,
    /// Elevation above datum (m).
    pub elevation: f64,
}

/// A directed road segment. `grade_pct` is the canonical stored slope
/// (100·tanθ, clipped to ±[`GRADE_CLIP_PCT`]); `angle` and
/// `augmented_ascent` are derived from it at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub id: u64,
    pub from: u64,
    pub to: u64,
    /// Length (m), strictly positive.
    pub length: f64,
    /// Slope in percent, the canonical stored value.
    pub grade_pct: f64,
    /// Slope angle θ = atan(grade_pct / 100) in radians.
    pub angle: f64,
    /// Lower speed bound (m/s); zero means no lower bound.
    pub v_min: f64,
    /// Upper speed bound (m/s).
    pub v_max: f64,
    /// Observed traffic speed (m/s), if available.
    pub traffic_speed: Option<f64>,
    /// `length · max(0, sin(angle + arctan C_r))` at the default rolling
    /// resistance [`DEFAULT_ROLLING_RESISTANCE`].
    pub augmented_ascent: f64,
}

impl Arc {
    /// Slope as a fraction, `tanθ = grade_pct / 100`.
    pub fn grade(&self) -> f64 {
        self.grade_pct / 100.0
    }
}

/// Augmented ascent of an arc: `length · max(0, sin(angle + arctan c_r))`.
///
/// Zero exactly on slopes at or below `−arctan c_r`; on flat arcs it is
/// proportional to length.
pub fn augmented_ascent(length: f64, angle: f64, c_r: f64) -> f64 {
    length * (angle + c_r.atan()).sin().max(0.0)
}

/// Serde model of the network file; see the module docs for the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<NodeRecord>,
    pub arcs: Vec<ArcRecord>,
}

/// One node record of the network file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    pub elev: f64,
}

/// One arc record of the network file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub id: u64,
    pub from: u64,
    pub to: u64,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vmin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vmax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vtraffic: Option<f64>,
}

/// A directed multigraph of [`Node`]s and [`Arc`]s with an adjacency index
/// from node id to outgoing arcs. Immutable after construction except for
/// [`RoadNetwork::arcs_mut`], which exists so tests can inject invariant
/// violations for [`validate_network`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    arcs: Vec<Arc>,
    node_pos: HashMap<u64, usize>,
    outgoing: HashMap<u64, Vec<usize>>,
}

impl RoadNetwork {
    /// Builds a network from the file model: resolves endpoints, derives and
    /// clips grades, computes augmented ascents, and sorts arcs by id.
    pub fn from_file_model(file: NetworkFile) -> Result<Self, NetworkError> {
        let mut nodes: Vec<Node> = Vec::with_capacity(file.nodes.len());
        let mut node_pos = HashMap::with_capacity(file.nodes.len());
        let mut sorted_nodes = file.nodes;
        sorted_nodes.sort_by_key(|n| n.id);
        for rec in sorted_nodes {
            for (field, value) in [("x", rec.x), ("y", rec.y), ("elev", rec.elev)] {
                if !value.is_finite() {
                    return Err(NetworkError::NonFiniteNodeField {
                        node: rec.id,
                        field,
                    });
                }
            }
            if node_pos.insert(rec.id, nodes.len()).is_some() {
                return Err(NetworkError::DuplicateNodeId(rec.id));
            }
            nodes.push(Node {
                id: rec.id,
                x: rec.x,
                y: rec.y,
                elevation: rec.elev,
            });
        }

        let mut sorted_arcs = file.arcs;
        sorted_arcs.sort_by_key(|a| a.id);
        let mut arcs: Vec<Arc> = Vec::with_capacity(sorted_arcs.len());
        let mut seen = HashMap::with_capacity(sorted_arcs.len());
        for rec in sorted_arcs {
            if seen.insert(rec.id, ()).is_some() {
                return Err(NetworkError::DuplicateArcId(rec.id));
            }
            if !rec.length.is_finite() || rec.length <= 0.0 {
                return Err(NetworkError::NonPositiveLength {
                    arc: rec.id,
                    length: rec.length,
                });
            }
            let from_pos =
                *node_pos
                    .get(&rec.from)
                    .ok_or(NetworkError::DanglingEndpoint {
                        arc: rec.id,
                        node: rec.from,
                    })?;
            let to_pos = *node_pos.get(&rec.to).ok_or(NetworkError::DanglingEndpoint {
                arc: rec.id,
                node: rec.to,
            })?;
            let raw_grade = match rec.grade_pct {
                Some(g) if g.is_finite() => g,
                Some(g) => {
                    return Err(NetworkError::InvalidArcField {
                        arc: rec.id,
                        field: "grade_pct",
                        message: format!("must be finite, got {g}"),
                    })
                }
                None => {
                    let rise = nodes[to_pos].elevation - nodes[from_pos].elevation;
                    100.0 * rise / rec.length
                }
            };
            let grade_pct = raw_grade.clamp(-GRADE_CLIP_PCT, GRADE_CLIP_PCT);
            let v_min = rec.vmin.unwrap_or(DEFAULT_V_MIN);
            let v_max = rec.vmax.unwrap_or(DEFAULT_V_MAX);
            if !v_min.is_finite() || v_min < 0.0 {
                return Err(NetworkError::InvalidArcField {
                    arc: rec.id,
                    field: "vmin",
                    message: format!("must be finite and nonnegative, got {v_min}"),
                });
            }
            if !v_max.is_finite() || v_max <= 0.0 || v_max < v_min {
                return Err(NetworkError::InvalidArcField {
                    arc: rec.id,
                    field: "vmax",
                    message: format!("must be positive and at least vmin, got {v_max}"),
                });
            }
            if let Some(vf) = rec.vtraffic {
                if !vf.is_finite() || vf <= 0.0 {
                    return Err(NetworkError::InvalidArcField {
                        arc: rec.id,
                        field: "vtraffic",
                        message: format!("must be finite and positive, got {vf}"),
                    });
                }
            }
            let angle = (grade_pct / 100.0).atan();
            arcs.push(Arc {
                id: rec.id,
                from: rec.from,
                to: rec.to,
                length: rec.length,
                grade_pct,
                angle,
                v_min,
                v_max,
                traffic_speed: rec.vtraffic,
                augmented_ascent: augmented_ascent(rec.length, angle, DEFAULT_ROLLING_RESISTANCE),
            });
        }

        let mut outgoing: HashMap<u64, Vec<usize>> = HashMap::with_capacity(nodes.len());
        for node in &nodes {
            outgoing.insert(node.id, Vec::new());
        }
        for (idx, arc) in arcs.iter().enumerate() {
            outgoing.get_mut(&arc.from).expect("endpoint checked").push(idx);
        }

        Ok(RoadNetwork {
            nodes,
            arcs,
            node_pos,
            outgoing,
        })
    }

    /// The file model of this network; arcs sorted by id, grades and speed
    /// bounds always present.
    pub fn to_file_model(&self) -> NetworkFile {
        NetworkFile {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id,
                    x: n.x,
                    y: n.y,
                    elev: n.elevation,
                })
                .collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcRecord {
                    id: a.id,
                    from: a.from,
                    to: a.to,
                    length: a.length,
                    grade_pct: Some(a.grade_pct),
                    vmin: Some(a.v_min),
                    vmax: Some(a.v_max),
                    vtraffic: a.traffic_speed,
                })
                .collect(),
        }
    }

    /// Nodes sorted by id.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Arcs sorted by id.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Mutable access to arcs, intended for injecting invariant violations in
    /// tests. Changing `from`/`to` desynchronizes the adjacency index.
    pub fn arcs_mut(&mut self) -> &mut [Arc] {
        &mut self.arcs
    }

    /// Node lookup by id.
    pub fn node(&self, id: u64) -> Option<&Node> {
        self.node_pos.get(&id).map(|&i| &self.nodes[i])
    }

    /// Whether a node id exists.
    pub fn has_node(&self, id: u64) -> bool {
        self.node_pos.contains_key(&id)
    }

    /// Arc lookup by id.
    pub fn arc(&self, id: u64) -> Option<&Arc> {
        self.arcs
            .binary_search_by_key(&id, |a| a.id)
            .ok()
            .map(|i| &self.arcs[i])
    }

    /// Outgoing arcs of a node in ascending arc-id order.
    pub fn outgoing(&self, node: u64) -> impl Iterator<Item = &Arc> {
        self.outgoing
            .get(&node)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.arcs[i])
    }

    /// True when every arc carries a traffic speed (required by the Traffic
    /// speed policy).
    pub fn has_full_traffic_speeds(&self) -> bool {
        self.arcs.iter().all(|a| a.traffic_speed.is_some())
    }

    /// Serializes to the canonical JSON document (compact, arcs sorted by id,
    /// trailing newline). Deterministic for a given network.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string(&self.to_file_model())
            .expect("network file model serializes infallibly");
        s.push('\n');
        s
    }

    /// Parses the canonical JSON document.
    pub fn from_json_str(text: &str) -> Result<Self, NetworkError> {
        let file: NetworkFile =
            serde_json::from_str(text).map_err(|e| NetworkError::Parse(e.to_string()))?;
        Self::from_file_model(file)
    }
}

/// Loads a network from a JSON file on disk.
pub fn load_network(path: impl AsRef<std::path::Path>) -> Result<RoadNetwork, NetworkError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })?;
    RoadNetwork::from_json_str(&text)
}

/// Writes a network to disk in the canonical JSON form.
pub fn save_network(
    net: &RoadNetwork,
    path: impl AsRef<std::path::Path>,
) -> Result<(), NetworkError> {
    let path = path.as_ref();
    std::fs::write(path, net.to_json_string()).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parameters for [`generate_synthetic_city`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Grid side; the city has `n × n` nodes.
    pub n: usize,
    /// Spacing between adjacent nodes (m).
    pub spacing: f64,
    /// Number of Gaussian hills summed into the elevation field.
    pub hills: usize,
    /// Peak hill amplitude (m); zero yields a perfectly flat city.
    pub amplitude: f64,
    /// Lower speed bound applied to every arc (m/s).
    pub v_min: f64,
    /// Upper speed bound applied to every arc (m/s).
    pub v_max: f64,
    /// When set, every arc gets a traffic speed drawn uniformly from this
    /// `(low, high)` range.
    pub traffic: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 10,
            spacing: 200.0,
            hills: 5,
            amplitude: 40.0,
            v_min: DEFAULT_V_MIN,
            v_max: DEFAULT_V_MAX,
            traffic: None,
        }
    }
}

/// Generates a strongly connected bidirectional `n × n` grid city with
/// elevations drawn from a seeded sum of Gaussian hills. Grades are derived
/// from endpoint elevations and clipped to ±10%. Deterministic: the same
/// `(seed, spec)` always produces the identical network.
pub fn generate_synthetic_city(seed: u64, spec: &GridSpec) -> Result<RoadNetwork, NetworkError> {
    if spec.n < 2 {
        return Err(NetworkError::InvalidSpec(format!(
            "grid side must be at least 2, got {}",
            spec.n
        )));
    }
    if !spec.spacing.is_finite() || spec.spacing <= 0.0 {
        return Err(NetworkError::InvalidSpec(format!(
            "spacing must be positive, got {}",
            spec.spacing
        )));
    }
    if !spec.amplitude.is_finite() || spec.amplitude < 0.0 {
        return Err(NetworkError::InvalidSpec(format!(
            "amplitude must be nonnegative, got {}",
            spec.amplitude
        )));
    }
    if !spec.v_min.is_finite() || spec.v_min < 0.0 || spec.v_max <= 0.0 || spec.v_max < spec.v_min {
        return Err(NetworkError::InvalidSpec(format!(
            "speed bounds must satisfy 0 <= vmin <= vmax, got [{}, {}]",
            spec.v_min, spec.v_max
        )));
    }
    if let Some((low, high)) = spec.traffic {
        if !(low.is_finite() && high.is_finite()) || low <= 0.0 || high < low {
            return Err(NetworkError::InvalidSpec(format!(
                "traffic range must satisfy 0 < low <= high, got [{low}, {high}]"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n;
    let extent = (n - 1) as f64 * spec.spacing;

    struct Hill {
        cx: f64,
        cy: f64,
        sigma: f64,
        amp: f64,
    }
    let hills: Vec<Hill> = (0..spec.hills)
        .map(|_| {
            let cx = rng.gen_range(0.0..=extent.max(f64::MIN_POSITIVE));
            let cy = rng.gen_range(0.0..=extent.max(f64::MIN_POSITIVE));
            let sigma = rng.gen_range(0.15..0.40) * extent.max(spec.spacing);
            let scale: f64 = rng.gen_range(0.3..1.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Hill {
                cx,
                cy,
                sigma,
                amp: spec.amplitude * scale * sign,
            }
        })
        .collect();
    let elevation_at = |x: f64, y: f64| -> f64 {
        hills
            .iter()
            .map(|h| {
                let dx = x - h.cx;
                let dy = y - h.cy;
                h.amp * (-(dx * dx + dy * dy) / (2.0 * h.sigma * h.sigma)).exp()
            })
            .sum()
    };

    let node_id = |row: usize, col: usize| (row * n + col) as u64;
    let mut nodes = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let x = col as f64 * spec.spacing;
            let y = row as f64 * spec.spacing;
            nodes.push(NodeRecord {
                id: node_id(row, col),
                x,
                y,
                elev: elevation_at(x, y),
            });
        }
    }

    // Both directions per grid edge: horizontal edges row by row, then
    // vertical edges. Arc ids are sequential in that enumeration order.
    let mut arcs = Vec::with_capacity(4 * n * (n - 1));
    let mut next_id = 0u64;
    let mut push_pair = |arcs: &mut Vec<ArcRecord>, rng: &mut ChaCha8Rng, a: u64, b: u64| {
        for (from, to) in [(a, b), (b, a)] {
            let vtraffic = spec
                .traffic
                .map(|(low, high)| if low == high { low } else { rng.gen_range(low..high) });
            arcs.push(ArcRecord {
                id: next_id,
                from,
                to,
                length: spec.spacing,
                grade_pct: None,
                vmin: Some(spec.v_min),
                vmax: Some(spec.v_max),
                vtraffic,
            });
            next_id += 1;
        }
    };
    for row in 0..n {
        for col in 0..n - 1 {
            push_pair(&mut arcs, &mut rng, node_id(row, col), node_id(row, col + 1));
        }
    }
    for row in 0..n - 1 {
        for col in 0..n {
            push_pair(&mut arcs, &mut rng, node_id(row, col), node_id(row + 1, col));
        }
    }

    RoadNetwork::from_file_model(NetworkFile { nodes, arcs })
}

/// One invariant violation found by [`validate_network`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("node {node}: duplicate id")]
    DuplicateNodeId { node: u64 },
    #[error("arc {arc}: duplicate id")]
    DuplicateArcId { arc: u64 },
    #[error("arc {arc}: endpoint {node} missing")]
    DanglingEndpoint { arc: u64, node: u64 },
    #[error("arc {arc}: non-positive length {length}")]
    NonPositiveLength { arc: u64, length: f64 },
    #[error("arc {arc}: grade {grade_pct}% outside clipping range ±{limit}%")]
    GradeOutOfRange {
        arc: u64,
        grade_pct: f64,
        limit: f64,
    },
    #[error("arc {arc}: angle inconsistent with stored grade")]
    AngleMismatch { arc: u64 },
    #[error("arc {arc}: speed bounds vmin {v_min} > vmax {v_max} (or not positive)")]
    SpeedBounds { arc: u64, v_min: f64, v_max: f64 },
    #[error("arc {arc}: non-positive traffic speed {speed}")]
    NonPositiveTraffic { arc: u64, speed: f64 },
    #[error("arc {arc}: augmented ascent {stored} differs from derived {derived}")]
    AugmentedAscentMismatch { arc: u64, stored: f64, derived: f64 },
}

/// Checks every node and arc invariant; returns an empty list iff the network
/// is well formed. Violations are data, not errors.
pub fn validate_network(net: &RoadNetwork) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen_nodes = HashMap::new();
    for node in net.nodes() {
        if seen_nodes.insert(node.id, ()).is_some() {
            violations.push(Violation::DuplicateNodeId { node: node.id });
        }
    }
    let mut seen_arcs = HashMap::new();
    for arc in net.arcs() {
        if seen_arcs.insert(arc.id, ()).is_some() {
            violations.push(Violation::DuplicateArcId { arc: arc.id });
        }
        for node in [arc.from, arc.to] {
            if !seen_nodes.contains_key(&node) {
                violations.push(Violation::DanglingEndpoint { arc: arc.id, node });
            }
        }
        if !arc.length.is_finite() || arc.length <= 0.0 {
            violations.push(Violation::NonPositiveLength {
                arc: arc.id,
                length: arc.length,
            });
        }
        // 1e-12 slack absorbs the atan/tan round trip on clipped grades
        if !arc.grade_pct.is_finite() || arc.grade_pct.abs() > GRADE_CLIP_PCT + 1e-12 {
            violations.push(Violation::GradeOutOfRange {
                arc: arc.id,
                grade_pct: arc.grade_pct,
                limit: GRADE_CLIP_PCT,
            });
        }
        if (arc.angle - (arc.grade_pct / 100.0).atan()).abs() > 1e-12 {
            violations.push(Violation::AngleMismatch { arc: arc.id });
        }
        if !arc.v_min.is_finite()
            || !arc.v_max.is_finite()
            || arc.v_min < 0.0
            || arc.v_max <= 0.0
            || arc.v_min > arc.v_max
        {
            violations.push(Violation::SpeedBounds {
                arc: arc.id,
                v_min: arc.v_min,
                v_max: arc.v_max,
            });
        }
        if let Some(speed) = arc.traffic_speed {
            if !speed.is_finite() || speed <= 0.0 {
                violations.push(Violation::NonPositiveTraffic { arc: arc.id, speed });
            }
        }
        let derived = augmented_ascent(arc.length, arc.angle, DEFAULT_ROLLING_RESISTANCE);
        if (arc.augmented_ascent - derived).abs() > 1e-9 * derived.abs().max(1.0) {
            violations.push(Violation::AugmentedAscentMismatch {
                arc: arc.id,
                stored: arc.augmented_ascent,
                derived,
            });
        }
    }
    violations
}
