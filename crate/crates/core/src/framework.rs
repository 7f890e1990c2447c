//! Feature vectors, instance/solution similarity, neighbor selection with
//! confidence discounting, and the weighted-sum objective. Everything here is
//! a pure function of its inputs.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum FrameworkError {
    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("feature value at index {0} is not finite")]
    NonFiniteValue(usize),
    #[error("confidence score {0} outside [-1, 1]")]
    LambdaOutOfRange(f64),
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("beta {0} must be finite and nonnegative")]
    InvalidBeta(f64),
    #[error("neighbor count k must be at least 1")]
    ZeroNeighborCount,
    #[error("incidence vector has {got} entries, expected {expected}")]
    IncidenceLength { expected: usize, got: usize },
    #[error("feature edge id {edge} out of range for {edge_count} edges")]
    FeatureEdgeOutOfRange { edge: EdgeId, edge_count: usize },
}

/// Fixed-dimension vector of finite reals. Instance features live in
/// dimension p, solution features in dimension q; both compare only against
/// vectors of equal dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FrameworkError> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(FrameworkError::NonFiniteValue(i));
            }
        }
        Ok(Self(values))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn euclidean_distance(&self, other: &Self) -> Result<f64, FrameworkError> {
        if self.0.len() != other.0.len() {
            return Err(FrameworkError::DimensionMismatch {
                left: self.0.len(),
                right: other.0.len(),
            });
        }
        let sq: f64 = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sq.sqrt())
    }

    pub fn manhattan_distance(&self, other: &Self) -> Result<f64, FrameworkError> {
        if self.0.len() != other.0.len() {
            return Err(FrameworkError::DimensionMismatch {
                left: self.0.len(),
                right: other.0.len(),
            });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum())
    }
}

/// Calendar date plus minutes-of-day; scenario data is keyed by daytime only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamp {
    pub date: NaiveDate,
    pub minutes_of_day: u32,
}

/// One historic data point: the instance's feature payload, the employed
/// solution as an edge-incidence vector, and a confidence score in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoricRecord {
    pub id: String,
    pub instance_features: FeatureVector,
    pub st: (NodeId, NodeId),
    pub solution_incidence: Vec<bool>,
    pub lambda: f64,
    pub timestamp: Option<Timestamp>,
}

impl HistoricRecord {
    pub fn new(
        id: impl Into<String>,
        instance_features: FeatureVector,
        st: (NodeId, NodeId),
        solution_incidence: Vec<bool>,
        lambda: f64,
        timestamp: Option<Timestamp>,
    ) -> Result<Self, FrameworkError> {
        if !(-1.0..=1.0).contains(&lambda) || !lambda.is_finite() {
            return Err(FrameworkError::LambdaOutOfRange(lambda));
        }
        Ok(Self { id: id.into(), instance_features, st, solution_incidence, lambda, timestamp })
    }
}

/// A selected neighbor: the record, its instance distance, and the
/// confidence discounted by that distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub record: HistoricRecord,
    pub distance: f64,
    /// lambda / (1 + beta * distance); the weight of this record in the
    /// explainability sum.
    pub influence: f64,
}

/// The most similar historic records, sorted by nondecreasing distance.
/// Records at infinite distance (different s-t pair) are never selected.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborSet {
    entries: Vec<Neighbor>,
    beta: f64,
}

impl NeighborSet {
    /// Assembles a neighbor set from records with precomputed distances,
    /// sorting by (distance, id) and deriving each influence weight.
    pub fn from_scored(
        scored: Vec<(HistoricRecord, f64)>,
        beta: f64,
    ) -> Result<Self, FrameworkError> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(FrameworkError::InvalidBeta(beta));
        }
        let mut scored = scored;
        for (_, d) in &scored {
            if !d.is_finite() || *d < 0.0 {
                return Err(FrameworkError::NonFiniteValue(0));
            }
        }
        scored.sort_by(|(ra, da), (rb, db)| da.total_cmp(db).then_with(|| ra.id.cmp(&rb.id)));
        let entries = scored
            .into_iter()
            .map(|(record, distance)| {
                let influence = record.lambda / (1.0 + beta * distance);
                Neighbor { record, distance, influence }
            })
            .collect();
        Ok(Self { entries, beta })
    }

    pub fn empty(beta: f64) -> Self {
        Self { entries: Vec::new(), beta }
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Distance between the query instance and a historic record: infinite when
/// the s-t pairs differ, otherwise Euclidean in instance-feature space.
pub fn instance_distance(
    query: &FeatureVector,
    query_st: (NodeId, NodeId),
    record: &HistoricRecord,
) -> Result<f64, FrameworkError> {
    if query.dimension() != record.instance_features.dimension() {
        return Err(FrameworkError::DimensionMismatch {
            left: query.dimension(),
            right: record.instance_features.dimension(),
        });
    }
    if query_st != record.st {
        return Ok(f64::INFINITY);
    }
    query.euclidean_distance(&record.instance_features)
}

/// Selects the `k` records nearest to the query in instance-feature space.
///
/// Records at infinite distance are excluded outright; fewer than `k`
/// entries are returned when fewer finite-distance records exist. Ties at
/// the k-th distance break by record id. `max_distance` additionally caps
/// the selection radius (the threshold form of the neighborhood).
pub fn select_neighbors(
    query: &FeatureVector,
    query_st: (NodeId, NodeId),
    records: &[HistoricRecord],
    k: usize,
    beta: f64,
    max_distance: Option<f64>,
) -> Result<NeighborSet, FrameworkError> {
    if k == 0 {
        return Err(FrameworkError::ZeroNeighborCount);
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(FrameworkError::InvalidBeta(beta));
    }
    let mut scored: Vec<(f64, &HistoricRecord)> = Vec::new();
    for record in records {
        let d = instance_distance(query, query_st, record)?;
        if !d.is_finite() {
            continue;
        }
        if let Some(cutoff) = max_distance {
            if d > cutoff {
                continue;
            }
        }
        scored.push((d, record));
    }
    scored.sort_by(|(da, ra), (db, rb)| da.total_cmp(db).then_with(|| ra.id.cmp(&rb.id)));
    scored.truncate(k);
    NeighborSet::from_scored(scored.into_iter().map(|(d, r)| (r.clone(), d)).collect(), beta)
}

/// Length-weighted Manhattan distance between two solution incidence
/// vectors, restricted to the feature edges. With unit lengths and the full
/// edge set this is the Hamming distance.
pub fn solution_distance(
    x: &[bool],
    xi: &[bool],
    lengths: &[f64],
    feature_edges: &[EdgeId],
) -> Result<f64, FrameworkError> {
    if x.len() != xi.len() {
        return Err(FrameworkError::IncidenceLength { expected: x.len(), got: xi.len() });
    }
    if lengths.len() != x.len() {
        return Err(FrameworkError::IncidenceLength { expected: x.len(), got: lengths.len() });
    }
    let mut total = 0.0;
    for &e in feature_edges {
        if e >= x.len() {
            return Err(FrameworkError::FeatureEdgeOutOfRange { edge: e, edge_count: x.len() });
        }
        if x[e] != xi[e] {
            total += lengths[e];
        }
    }
    Ok(total)
}

/// The explainability value of a solution: the influence-weighted sum of its
/// solution distances to the selected neighbors. Smaller means more
/// explainable; negative values arise only from negative confidences.
pub fn explainability_value(
    x: &[bool],
    neighbors: &NeighborSet,
    lengths: &[f64],
    feature_edges: &[EdgeId],
) -> Result<f64, FrameworkError> {
    let mut total = 0.0;
    for neighbor in neighbors.entries() {
        let d = solution_distance(x, &neighbor.record.solution_incidence, lengths, feature_edges)?;
        total += neighbor.influence * d;
    }
    Ok(total)
}

/// alpha * optimality + (1 - alpha) * explainability.
pub fn scalarized_objective(
    alpha: f64,
    optimality_value: f64,
    explainability_value: f64,
) -> Result<f64, FrameworkError> {
    check_alpha(alpha)?;
    Ok(alpha * optimality_value + (1.0 - alpha) * explainability_value)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), FrameworkError> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(FrameworkError::AlphaOutOfRange(alpha));
    }
    Ok(())
}
