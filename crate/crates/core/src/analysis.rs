//! Comparison ratios, origin–destination features, factorial sweeps, and
//! report emission.
//!
//! A sweep runs a full factorial over (OD pair, vehicle, payload, policy
//! pair). Each cell solves both path-speed policies, then records three
//! ratios: relative CO₂ reduction, length-weighted path distinction, and
//! relative time increase. Cells are evaluated in parallel and merged in
//! canonical order, so reports are byte-identical across parallelism levels.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::RoadNetwork;
use crate::routing::{
    asymptotic_greenest_path, fastest_path, greenest_path, path_metrics, shortest_path, Path,
    PathMetrics, PolicyContext, Query, RoutingError,
};
use crate::physics::VehicleParams;
use crate::speed::SpeedPolicyKind;

/// Errors from ratio evaluation and sweep configuration.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("baseline {name} must be positive, got {value}")]
    NonPositiveBaseline { name: &'static str, value: f64 },
    #[error("the baseline path has no arcs")]
    EmptyPath,
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("report is empty")]
    EmptyReport,
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

/// Which solver produces the path of a policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Shortest,
    Fastest,
    Greenest,
    /// Greenest path computed as if driving at traffic speed; the triple's
    /// speed policy still governs traversal metrics.
    GreenestUnderTraffic,
    Asymptotic,
}

impl PathKind {
    pub fn label(self) -> &'static str {
        match self {
            PathKind::Shortest => "shortest",
            PathKind::Fastest => "fastest",
            PathKind::Greenest => "greenest",
            PathKind::GreenestUnderTraffic => "greenest_under_traffic",
            PathKind::Asymptotic => "asymptotic",
        }
    }
}

/// A path-speed policy without the payload dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolicySpec {
    pub path: PathKind,
    pub speed: SpeedPolicyKind,
}

impl PolicySpec {
    pub const fn new(path: PathKind, speed: SpeedPolicyKind) -> Self {
        PolicySpec { path, speed }
    }

    /// Whether resolving this policy needs traffic speeds on every arc.
    pub fn needs_traffic(&self) -> bool {
        self.speed == SpeedPolicyKind::Traffic || self.path == PathKind::GreenestUnderTraffic
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.path.label(), self.speed.label())
    }
}

/// A full path-speed policy `(π, 𝑣, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyTriple {
    pub path: PathKind,
    pub speed: SpeedPolicyKind,
    /// Payload in kg.
    pub load: f64,
}

impl PolicyTriple {
    pub fn spec(&self) -> PolicySpec {
        PolicySpec::new(self.path, self.speed)
    }
}

/// An ordered (baseline, alternative) pair of policies to compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatioPair {
    pub baseline: PolicySpec,
    pub alternative: PolicySpec,
}

impl RatioPair {
    pub const fn new(baseline: PolicySpec, alternative: PolicySpec) -> Self {
        RatioPair {
            baseline,
            alternative,
        }
    }
}

/// The free-flow comparison set: greenest and asymptotic policies against
/// shortest-path baselines under static and dynamic speeds.
pub fn default_ratio_pairs() -> Vec<RatioPair> {
    use PathKind::*;
    use SpeedPolicyKind::*;
    let p = PolicySpec::new;
    vec![
        RatioPair::new(p(Shortest, Static), p(Greenest, Dynamic)),
        RatioPair::new(p(Shortest, Static), p(Greenest, Static)),
        RatioPair::new(p(Shortest, Dynamic), p(Greenest, Dynamic)),
        RatioPair::new(p(Greenest, Static), p(Greenest, Dynamic)),
        RatioPair::new(p(Shortest, Dynamic), p(Asymptotic, Dynamic)),
        RatioPair::new(p(Shortest, Static), p(Asymptotic, Static)),
        RatioPair::new(p(Greenest, Dynamic), p(Asymptotic, Dynamic)),
        RatioPair::new(p(Greenest, Static), p(Asymptotic, Static)),
    ]
}

/// The additional comparison set for networks with traffic speeds: greenest
/// policies against fastest-path baselines.
pub fn traffic_ratio_pairs() -> Vec<RatioPair> {
    use PathKind::*;
    use SpeedPolicyKind::*;
    let p = PolicySpec::new;
    vec![
        RatioPair::new(p(Fastest, Traffic), p(Greenest, Dynamic)),
        RatioPair::new(p(Fastest, Traffic), p(Greenest, Static)),
        RatioPair::new(p(Fastest, Traffic), p(Greenest, Traffic)),
        RatioPair::new(p(Fastest, Dynamic), p(Greenest, Dynamic)),
        RatioPair::new(p(Fastest, Static), p(Greenest, Static)),
        RatioPair::new(p(Fastest, Dynamic), p(GreenestUnderTraffic, Dynamic)),
        RatioPair::new(p(GreenestUnderTraffic, Dynamic), p(Greenest, Dynamic)),
        RatioPair::new(p(Fastest, Dynamic), p(Asymptotic, Dynamic)),
    ]
}

/// The three comparison metrics of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRatios {
    /// Relative CO₂ reduction of the alternative over the baseline (%).
    pub e_pct: f64,
    /// Length share of the baseline path not shared with the alternative (%).
    pub delta_pct: f64,
    /// Relative time increase of the alternative over the baseline (%).
    pub t_pct: f64,
}

/// Features of an origin–destination pair along its shortest path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdFeatures {
    /// Target elevation minus source elevation (m).
    pub delta_h: f64,
    /// Shortest-path length (m).
    pub dist_sp: f64,
    /// Population standard deviation of per-arc grades (tanθ) along the
    /// shortest path, unweighted by arc length.
    pub sigma_grade: f64,
}

/// Relative CO₂ reduction: `100 · (e1 − e2) / e1`. Negative when the second
/// policy emits more.
pub fn emission_reduction_ratio(e1: f64, e2: f64) -> Result<f64, AnalysisError> {
    if !e1.is_finite() || e1 <= 0.0 {
        return Err(AnalysisError::NonPositiveBaseline {
            name: "emissions",
            value: e1,
        });
    }
    Ok(100.0 * (e1 - e2) / e1)
}

/// Length-weighted share of `p1`'s arcs that `p2` does not use:
/// `100 · Σ_{a ∈ π1∖π2} δ(a) / Σ_{a ∈ π1} δ(a)`. Asymmetric in general.
pub fn path_distinction_ratio(
    p1: &Path,
    p2: &Path,
    net: &RoadNetwork,
) -> Result<f64, AnalysisError> {
    if p1.arcs.is_empty() {
        return Err(AnalysisError::EmptyPath);
    }
    let shared: std::collections::HashSet<u64> = p2.arcs.iter().copied().collect();
    let mut total = 0.0;
    let mut distinct = 0.0;
    for arc_id in &p1.arcs {
        let arc = net.arc(*arc_id).ok_or(RoutingError::PathMismatch(format!(
            "arc {arc_id} missing from network"
        )))?;
        total += arc.length;
        if !shared.contains(arc_id) {
            distinct += arc.length;
        }
    }
    Ok(100.0 * distinct / total)
}

/// Relative time increase of selecting the second policy: `100 · (t2 − t1) / t1`.
/// Negative when the second policy is faster.
pub fn time_increase_ratio(t1: f64, t2: f64) -> Result<f64, AnalysisError> {
    if !t1.is_finite() || t1 <= 0.0 {
        return Err(AnalysisError::NonPositiveBaseline {
            name: "time",
            value: t1,
        });
    }
    Ok(100.0 * (t2 - t1) / t1)
}

/// Elevation difference, shortest-path length, and grade dispersion for one
/// origin–destination pair.
pub fn od_features(
    net: &RoadNetwork,
    source: u64,
    target: u64,
) -> Result<OdFeatures, RoutingError> {
    let sp = shortest_path(net, source, target)?;
    let src = net.node(source).ok_or(RoutingError::UnknownNode(source))?;
    let dst = net.node(target).ok_or(RoutingError::UnknownNode(target))?;
    let grades: Vec<f64> = sp
        .arcs
        .iter()
        .map(|id| net.arc(*id).expect("solver arcs exist").grade())
        .collect();
    let mean = grades.iter().sum::<f64>() / grades.len() as f64;
    let variance = grades.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / grades.len() as f64;
    Ok(OdFeatures {
        delta_h: dst.elevation - src.elevation,
        dist_sp: sp.length(net),
        sigma_grade: variance.sqrt(),
    })
}

/// One emitted report row; `ratio_name` is `"{metric}:{baseline}->{alternative}"`
/// with metric one of `E`, `delta`, `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub net: String,
    pub od_source: u64,
    pub od_target: u64,
    pub truck: String,
    pub load_pct: f64,
    pub ratio_name: String,
    pub value: f64,
    pub delta_h: f64,
    pub dist_sp: f64,
    pub sigma_grade: f64,
}

/// A sweep cell that failed, with enough context to diagnose it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub od_source: u64,
    pub od_target: u64,
    pub truck: String,
    pub load_pct: f64,
    pub pair: String,
    pub message: String,
    pub unreachable: bool,
}

/// Conventions pinned by this report format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub sigma_grade: String,
    pub quartiles: String,
    pub tie_break: String,
    pub load_semantics: String,
}

impl Default for ReportMetadata {
    fn default() -> Self {
        ReportMetadata {
            sigma_grade: "population standard deviation of per-arc grades (tan theta) along \
                          the shortest path, unweighted by arc length"
                .into(),
            quartiles: "inclusive linear interpolation on sorted values".into(),
            tie_break: "equal-cost paths (within 1e-12) prefer fewer arcs, then the \
                        lexicographically smaller arc-id sequence"
                .into(),
            load_semantics: "load_pct is payload as a percentage of each vehicle's maximum \
                             capacity"
                .into(),
        }
    }
}

/// The outcome of [`run_sweep`]: rows in canonical order plus per-cell errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ReportRow>,
    pub errors: Vec<CellError>,
    pub metadata: ReportMetadata,
}

/// Aggregate statistics for one (net, truck, load, ratio) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub net: String,
    pub truck: String,
    pub load_pct: f64,
    pub ratio_name: String,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Solves one policy triple: the path comes from the triple's kind, the
/// traversal metrics from its speed policy and payload.
pub fn resolve_policy(
    net: &RoadNetwork,
    source: u64,
    target: u64,
    vehicle: &VehicleParams,
    triple: &PolicyTriple,
) -> Result<(Path, PathMetrics), RoutingError> {
    let query = Query::new(source, target, *vehicle, triple.load, triple.speed)?;
    let path = match triple.path {
        PathKind::Shortest => shortest_path(net, source, target)?,
        PathKind::Fastest => {
            let ctx = PolicyContext::new(*vehicle, triple.load, triple.speed)?;
            fastest_path(net, source, target, &ctx)?
        }
        PathKind::Greenest => return greenest_path(net, &query),
        PathKind::GreenestUnderTraffic => {
            let traffic_query =
                Query::new(source, target, *vehicle, triple.load, SpeedPolicyKind::Traffic)?;
            greenest_path(net, &traffic_query)?.0
        }
        PathKind::Asymptotic => {
            asymptotic_greenest_path(net, source, target, vehicle, triple.speed)?
        }
    };
    let metrics = path_metrics(net, &path, &query)?;
    Ok((path, metrics))
}

/// Evaluates all three ratios for one (OD, vehicle, load, pair) cell.
pub fn compare_cell(
    net: &RoadNetwork,
    source: u64,
    target: u64,
    vehicle: &VehicleParams,
    load: f64,
    pair: &RatioPair,
) -> Result<ComparisonRatios, AnalysisError> {
    let baseline = PolicyTriple {
        path: pair.baseline.path,
        speed: pair.baseline.speed,
        load,
    };
    let alternative = PolicyTriple {
        path: pair.alternative.path,
        speed: pair.alternative.speed,
        load,
    };
    let (p1, m1) = resolve_policy(net, source, target, vehicle, &baseline)?;
    let (p2, m2) = resolve_policy(net, source, target, vehicle, &alternative)?;
    let ratios = ComparisonRatios {
        e_pct: emission_reduction_ratio(m1.co2, m2.co2)?,
        delta_pct: path_distinction_ratio(&p1, &p2, net)?,
        t_pct: time_increase_ratio(m1.time, m2.time)?,
    };
    debug_assert!(ratios.e_pct < 100.0, "emissions are strictly positive");
    debug_assert!((0.0..=100.0).contains(&ratios.delta_pct));
    debug_assert!(ratios.t_pct.is_finite());
    Ok(ratios)
}

fn ratio_name(metric: &str, pair: &RatioPair) -> String {
    format!("{metric}:{}->{}", pair.baseline, pair.alternative)
}

/// Runs the full factorial sweep over `(OD, vehicle, load, pair)`.
///
/// `loads_pct` are payloads as percentages of each vehicle's capacity. Cells
/// run in parallel; per-cell failures are recorded and the sweep continues.
/// Aborts only on an invalid spec (empty dimensions, loads outside [0, 100],
/// or traffic-dependent pairs on a network without full traffic speeds).
pub fn run_sweep(
    net: &RoadNetwork,
    net_label: &str,
    od_pairs: &[(u64, u64)],
    vehicles: &[(String, VehicleParams)],
    loads_pct: &[f64],
    pairs: &[RatioPair],
) -> Result<ComparisonReport, AnalysisError> {
    if od_pairs.is_empty() || vehicles.is_empty() || loads_pct.is_empty() || pairs.is_empty() {
        return Err(AnalysisError::InvalidSpec(
            "ods, vehicles, loads, and ratio pairs must all be nonempty".into(),
        ));
    }
    for &(s, t) in od_pairs {
        if s == t {
            return Err(AnalysisError::InvalidSpec(format!(
                "OD pair ({s}, {t}) has identical endpoints"
            )));
        }
        if !net.has_node(s) || !net.has_node(t) {
            return Err(AnalysisError::InvalidSpec(format!(
                "OD pair ({s}, {t}) references a missing node"
            )));
        }
    }
    for (label, vp) in vehicles {
        vp.validate()
            .map_err(|e| AnalysisError::InvalidSpec(format!("vehicle {label}: {e}")))?;
    }
    for &pct in loads_pct {
        if !(0.0..=100.0).contains(&pct) {
            return Err(AnalysisError::InvalidSpec(format!(
                "load percentage {pct} outside [0, 100]"
            )));
        }
    }
    let needs_traffic = pairs
        .iter()
        .any(|p| p.baseline.needs_traffic() || p.alternative.needs_traffic());
    if needs_traffic && !net.has_full_traffic_speeds() {
        return Err(AnalysisError::InvalidSpec(
            "a requested ratio needs traffic speeds but some arcs have none".into(),
        ));
    }

    // Features once per OD pair; unreachable ODs surface as cell errors.
    let features: HashMap<(u64, u64), Result<OdFeatures, String>> = od_pairs
        .par_iter()
        .map(|&(s, t)| ((s, t), od_features(net, s, t).map_err(|e| e.to_string())))
        .collect();

    let mut cells = Vec::new();
    for (oi, &(s, t)) in od_pairs.iter().enumerate() {
        for (vi, _) in vehicles.iter().enumerate() {
            for (li, _) in loads_pct.iter().enumerate() {
                for (pi, _) in pairs.iter().enumerate() {
                    cells.push((oi, vi, li, pi, s, t));
                }
            }
        }
    }

    enum CellOutcome {
        Rows(Box<[ReportRow; 3]>),
        Error(Box<CellError>),
    }

    let mut outcomes: Vec<(usize, CellOutcome)> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(_oi, vi, li, pi, s, t))| {
            let (truck_label, vehicle) = &vehicles[vi];
            let pct = loads_pct[li];
            let pair = &pairs[pi];
            let load = pct / 100.0 * vehicle.l_max;
            let outcome = match (&features[&(s, t)], compare_cell(net, s, t, vehicle, load, pair))
            {
                (Ok(feat), Ok(ratios)) => {
                    let row = |metric: &str, value: f64| ReportRow {
                        net: net_label.to_string(),
                        od_source: s,
                        od_target: t,
                        truck: truck_label.clone(),
                        load_pct: pct,
                        ratio_name: ratio_name(metric, pair),
                        value,
                        delta_h: feat.delta_h,
                        dist_sp: feat.dist_sp,
                        sigma_grade: feat.sigma_grade,
                    };
                    CellOutcome::Rows(Box::new([
                        row("E", ratios.e_pct),
                        row("delta", ratios.delta_pct),
                        row("t", ratios.t_pct),
                    ]))
                }
                (feat, ratios) => {
                    let message = match (&feat, ratios) {
                        (Err(msg), _) => msg.clone(),
                        (_, Err(e)) => e.to_string(),
                        _ => unreachable!(),
                    };
                    let unreachable = message.contains("no path from");
                    CellOutcome::Error(Box::new(CellError {
                        od_source: s,
                        od_target: t,
                        truck: truck_label.clone(),
                        load_pct: pct,
                        pair: format!("{}->{}", pair.baseline, pair.alternative),
                        message,
                        unreachable,
                    }))
                }
            };
            (idx, outcome)
        })
        .collect();
    outcomes.sort_by_key(|(idx, _)| *idx);

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (_, outcome) in outcomes {
        match outcome {
            CellOutcome::Rows(cell_rows) => rows.extend(*cell_rows),
            CellOutcome::Error(err) => errors.push(*err),
        }
    }
    Ok(ComparisonReport {
        rows,
        errors,
        metadata: ReportMetadata::default(),
    })
}

/// Quantile by inclusive linear interpolation on a sorted slice.
fn quantile_inclusive(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Aggregates report rows into per-(net, truck, load, ratio) summary rows in
/// deterministic key order.
pub fn summarize(report: &ComparisonReport) -> Result<Vec<SummaryRow>, AnalysisError> {
    if report.rows.is_empty() {
        return Err(AnalysisError::EmptyReport);
    }
    let mut groups: HashMap<(String, String, u64, String), Vec<f64>> = HashMap::new();
    for row in &report.rows {
        groups
            .entry((
                row.net.clone(),
                row.truck.clone(),
                row.load_pct.to_bits(),
                row.ratio_name.clone(),
            ))
            .or_default()
            .push(row.value);
    }
    let mut keys: Vec<_> = groups.keys().cloned().collect();
    keys.sort_by(|a, b| {
        (&a.0, &a.1, f64::from_bits(a.2), &a.3)
            .partial_cmp(&(&b.0, &b.1, f64::from_bits(b.2), &b.3))
            .expect("load percentages are finite")
    });
    let mut out = Vec::with_capacity(keys.len());
    for key in keys {
        let mut values = groups.remove(&key).expect("key from map");
        values.sort_by(f64::total_cmp);
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        out.push(SummaryRow {
            net: key.0,
            truck: key.1,
            load_pct: f64::from_bits(key.2),
            ratio_name: key.3,
            count,
            mean,
            min: values[0],
            q1: quantile_inclusive(&values, 0.25),
            median: quantile_inclusive(&values, 0.5),
            q3: quantile_inclusive(&values, 0.75),
            max: values[count - 1],
        });
    }
    Ok(out)
}

/// Report CSV header, in the exact emitted column order.
pub const REPORT_CSV_HEADER: &str =
    "net,od_source,od_target,truck,load_pct,ratio_name,value,delta_h,dist_sp,sigma_grade";

/// Renders the report as CSV with the fixed column order. Deterministic for
/// a given report.
pub fn report_to_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.net,
            r.od_source,
            r.od_target,
            r.truck,
            r.load_pct,
            r.ratio_name,
            r.value,
            r.delta_h,
            r.dist_sp,
            r.sigma_grade
        ));
    }
    out
}

/// Renders summary rows as CSV.
pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("net,truck,load_pct,ratio_name,count,mean,min,q1,median,q3,max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.net,
            r.truck,
            r.load_pct,
            r.ratio_name,
            r.count,
            r.mean,
            r.min,
            r.q1,
            r.median,
            r.q3,
            r.max
        ));
    }
    out
}
