//! Directed weighted graphs and the path / edge-progression encodings the
//! solvers operate on.

use std::io;

use thiserror::Error;

/// Node index into a [`DirectedGraph`].
pub type NodeId = usize;
/// Edge index into a [`DirectedGraph`].
pub type EdgeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node id {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("edge {edge} is a self-loop at node {node}")]
    SelfLoop { edge: EdgeId, node: NodeId },
    #[error("edge {edge} has invalid cost {value} (must be finite and nonnegative)")]
    InvalidCost { edge: EdgeId, value: f64 },
    #[error("edge {edge} has invalid length {value} (must be finite and nonnegative)")]
    InvalidLength { edge: EdgeId, value: f64 },
    #[error("edge sequence does not chain at position {position}")]
    BrokenChain { position: usize },
    #[error("path starts at node {got}, expected {expected}")]
    WrongSource { expected: NodeId, got: NodeId },
    #[error("path ends at node {got}, expected {expected}")]
    WrongTarget { expected: NodeId, got: NodeId },
    #[error("path repeats node {node}")]
    RepeatedNode { node: NodeId },
    #[error("edge id {edge} out of range for {edge_count} edges")]
    EdgeOutOfRange { edge: EdgeId, edge_count: usize },
    #[error("incidence vector has {got} entries, expected {expected}")]
    IncidenceLength { expected: usize, got: usize },
    #[error("incidence does not encode a single elementary path: {reason}")]
    InvalidIncidence { reason: String },
    #[error("graph csv, record {record}: {message}")]
    Csv { record: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A directed edge with its nominal weight `c` (travel time) and fixed
/// length `l` (distance). Both are nonnegative; signed costs used by the
/// solvers live in separate per-edge arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: f64,
    pub length: f64,
}

/// Immutable directed graph with adjacency indexed in edge-id order.
/// Parallel edges are permitted, self-loops are not.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    node_count: usize,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl DirectedGraph {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut out_edges = vec![Vec::new(); node_count];
        let mut in_edges = vec![Vec::new(); node_count];
        for (id, edge) in edges.iter().enumerate() {
            for node in [edge.tail, edge.head] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if edge.tail == edge.head {
                return Err(GraphError::SelfLoop { edge: id, node: edge.tail });
            }
            if !edge.cost.is_finite() || edge.cost < 0.0 {
                return Err(GraphError::InvalidCost { edge: id, value: edge.cost });
            }
            if !edge.length.is_finite() || edge.length < 0.0 {
                return Err(GraphError::InvalidLength { edge: id, value: edge.length });
            }
            out_edges[edge.tail].push(id);
            in_edges[edge.head].push(id);
        }
        Ok(Self { node_count, edges, out_edges, in_edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing edge ids of `node`, ascending.
    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node]
    }

    /// Incoming edge ids of `node`, ascending.
    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.in_edges[node]
    }

    /// The nominal weights `c` as a per-edge array.
    pub fn nominal_costs(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    /// The fixed lengths `l` as a per-edge array.
    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    /// Rebuilds the graph with new nominal costs (and optionally lengths).
    pub fn with_weights(&self, costs: &[f64], lengths: Option<&[f64]>) -> Result<Self, GraphError> {
        if costs.len() != self.edges.len() {
            return Err(GraphError::IncidenceLength { expected: self.edges.len(), got: costs.len() });
        }
        if let Some(lengths) = lengths {
            if lengths.len() != self.edges.len() {
                return Err(GraphError::IncidenceLength {
                    expected: self.edges.len(),
                    got: lengths.len(),
                });
            }
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| Edge {
                tail: e.tail,
                head: e.head,
                cost: costs[id],
                length: lengths.map_or(e.length, |l| l[id]),
            })
            .collect();
        Self::new(self.node_count, edges)
    }

    /// Reads a graph from CSV with header `edge_id,tail,head,c,l`.
    /// Lines starting with `#` are skipped. Edge ids must be dense from 0.
    pub fn from_csv<R: io::Read>(reader: R) -> Result<Self, GraphError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        {
            let headers = rdr.headers().map_err(|e| GraphError::Csv { record: 0, message: e.to_string() })?;
            let expected = ["edge_id", "tail", "head", "c", "l"];
            let got: Vec<&str> = headers.iter().collect();
            if got != expected {
                return Err(GraphError::Csv {
                    record: 0,
                    message: format!("expected header edge_id,tail,head,c,l, got {}", got.join(",")),
                });
            }
        }
        let mut rows: Vec<(usize, Edge)> = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| GraphError::Csv { record: i + 1, message: e.to_string() })?;
            let field = |idx: usize, name: &str| -> Result<&str, GraphError> {
                record.get(idx).ok_or_else(|| GraphError::Csv {
                    record: i + 1,
                    message: format!("missing field {name}"),
                })
            };
            let parse_usize = |idx: usize, name: &str| -> Result<usize, GraphError> {
                field(idx, name)?.trim().parse().map_err(|e| GraphError::Csv {
                    record: i + 1,
                    message: format!("field {name}: {e}"),
                })
            };
            let parse_f64 = |idx: usize, name: &str| -> Result<f64, GraphError> {
                field(idx, name)?.trim().parse().map_err(|e| GraphError::Csv {
                    record: i + 1,
                    message: format!("field {name}: {e}"),
                })
            };
            let id = parse_usize(0, "edge_id")?;
            let edge = Edge {
                tail: parse_usize(1, "tail")?,
                head: parse_usize(2, "head")?,
                cost: parse_f64(3, "c")?,
                length: parse_f64(4, "l")?,
            };
            rows.push((id, edge));
        }
        rows.sort_by_key(|(id, _)| *id);
        for (pos, (id, _)) in rows.iter().enumerate() {
            if *id != pos {
                return Err(GraphError::Csv {
                    record: 0,
                    message: format!("edge ids must be dense from 0; {id} is out of place"),
                });
            }
        }
        let edges: Vec<Edge> = rows.into_iter().map(|(_, e)| e).collect();
        let node_count = edges.iter().map(|e| e.tail.max(e.head) + 1).max().unwrap_or(0);
        Self::new(node_count, edges)
    }

    /// Writes the graph as CSV; `comment` lines (if any) are emitted first,
    /// each prefixed with `#`.
    pub fn to_csv<W: io::Write>(&self, mut writer: W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(writer, "# {line}")?;
        }
        writeln!(writer, "edge_id,tail,head,c,l")?;
        for (id, e) in self.edges.iter().enumerate() {
            writeln!(writer, "{id},{},{},{},{}", e.tail, e.head, e.cost, e.length)?;
        }
        Ok(())
    }
}

/// An elementary s-t path: consecutive edges chain head-to-tail and no node
/// repeats. The empty path is valid exactly when source == target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    source: NodeId,
    target: NodeId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn new(
        graph: &DirectedGraph,
        source: NodeId,
        target: NodeId,
        edges: Vec<EdgeId>,
    ) -> Result<Self, GraphError> {
        check_node(graph, source)?;
        check_node(graph, target)?;
        if edges.is_empty() {
            if source != target {
                return Err(GraphError::WrongTarget { expected: target, got: source });
            }
            return Ok(Self { source, target, edges });
        }
        check_chain(graph, source, target, &edges)?;
        let mut seen = vec![false; graph.node_count()];
        seen[source] = true;
        for &e in &edges {
            let head = graph.edge(e).head;
            if seen[head] {
                return Err(GraphError::RepeatedNode { node: head });
            }
            seen[head] = true;
        }
        Ok(Self { source, target, edges })
    }

    /// Decodes a 0/1 incidence vector into the elementary path it encodes.
    pub fn from_incidence(
        graph: &DirectedGraph,
        source: NodeId,
        target: NodeId,
        incidence: &[bool],
    ) -> Result<Self, GraphError> {
        if incidence.len() != graph.edge_count() {
            return Err(GraphError::IncidenceLength {
                expected: graph.edge_count(),
                got: incidence.len(),
            });
        }
        let selected: usize = incidence.iter().filter(|&&b| b).count();
        let mut edges = Vec::with_capacity(selected);
        let mut current = source;
        loop {
            let mut next = None;
            for &e in graph.out_edges(current) {
                if incidence[e] {
                    if next.is_some() {
                        return Err(GraphError::InvalidIncidence {
                            reason: format!("node {current} has two selected outgoing edges"),
                        });
                    }
                    next = Some(e);
                }
            }
            match next {
                Some(e) => {
                    edges.push(e);
                    current = graph.edge(e).head;
                    if edges.len() > selected {
                        return Err(GraphError::InvalidIncidence {
                            reason: "selected edges contain a cycle".into(),
                        });
                    }
                    if current == target {
                        break;
                    }
                }
                None => {
                    if current == target {
                        break;
                    }
                    return Err(GraphError::InvalidIncidence {
                        reason: format!("walk stops at node {current} before reaching the target"),
                    });
                }
            }
        }
        if edges.len() != selected {
            return Err(GraphError::InvalidIncidence {
                reason: "selected edges are not all on the source-target walk".into(),
            });
        }
        Self::new(graph, source, target, edges)
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Total cost under a per-edge cost array, summed in path order.
    pub fn cost(&self, costs: &[f64]) -> f64 {
        self.edges.iter().map(|&e| costs[e]).sum()
    }

    /// 0/1 incidence over the full edge index space.
    pub fn incidence(&self, edge_count: usize) -> Vec<bool> {
        let mut x = vec![false; edge_count];
        for &e in &self.edges {
            x[e] = true;
        }
        x
    }

    /// The visited node sequence, starting at the source.
    pub fn nodes(&self, graph: &DirectedGraph) -> Vec<NodeId> {
        let mut nodes = Vec::with_capacity(self.edges.len() + 1);
        nodes.push(self.source);
        for &e in &self.edges {
            nodes.push(graph.edge(e).head);
        }
        nodes
    }
}

/// An s-t edge progression: edges chain head-to-tail but nodes and edges may
/// repeat. Incidence is the binary indicator "edge appears at least once".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeProgression {
    source: NodeId,
    target: NodeId,
    edges: Vec<EdgeId>,
}

impl EdgeProgression {
    pub fn new(
        graph: &DirectedGraph,
        source: NodeId,
        target: NodeId,
        edges: Vec<EdgeId>,
    ) -> Result<Self, GraphError> {
        check_node(graph, source)?;
        check_node(graph, target)?;
        if edges.is_empty() {
            if source != target {
                return Err(GraphError::WrongTarget { expected: target, got: source });
            }
        } else {
            check_chain(graph, source, target, &edges)?;
        }
        Ok(Self { source, target, edges })
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Total cost counting every traversal.
    pub fn cost(&self, costs: &[f64]) -> f64 {
        self.edges.iter().map(|&e| costs[e]).sum()
    }

    /// Presence indicator per edge, ignoring multiplicity.
    pub fn incidence(&self, edge_count: usize) -> Vec<bool> {
        let mut x = vec![false; edge_count];
        for &e in &self.edges {
            x[e] = true;
        }
        x
    }

    /// Largest number of times any single edge is traversed.
    pub fn max_multiplicity(&self) -> usize {
        let mut counts = std::collections::HashMap::new();
        for &e in &self.edges {
            *counts.entry(e).or_insert(0usize) += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }
}

fn check_node(graph: &DirectedGraph, node: NodeId) -> Result<(), GraphError> {
    if node >= graph.node_count() {
        return Err(GraphError::NodeOutOfRange { node, node_count: graph.node_count() });
    }
    Ok(())
}

fn check_chain(
    graph: &DirectedGraph,
    source: NodeId,
    target: NodeId,
    edges: &[EdgeId],
) -> Result<(), GraphError> {
    for (pos, &e) in edges.iter().enumerate() {
        if e >= graph.edge_count() {
            return Err(GraphError::EdgeOutOfRange { edge: e, edge_count: graph.edge_count() });
        }
        let expected_tail = if pos == 0 { source } else { graph.edge(edges[pos - 1]).head };
        if graph.edge(e).tail != expected_tail {
            if pos == 0 {
                return Err(GraphError::WrongSource { expected: source, got: graph.edge(e).tail });
            }
            return Err(GraphError::BrokenChain { position: pos });
        }
    }
    let last_head = graph.edge(*edges.last().unwrap()).head;
    if last_head != target {
        return Err(GraphError::WrongTarget { expected: target, got: last_head });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> DirectedGraph {
        // 0 -> 1 -> 3 and 0 -> 2 -> 3
        DirectedGraph::new(
            4,
            vec![
                Edge { tail: 0, head: 1, cost: 1.0, length: 1.0 },
                Edge { tail: 1, head: 3, cost: 1.0, length: 1.0 },
                Edge { tail: 0, head: 2, cost: 5.0, length: 1.0 },
                Edge { tail: 2, head: 3, cost: 1.0, length: 1.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_self_loop() {
        let err = DirectedGraph::new(
            2,
            vec![Edge { tail: 1, head: 1, cost: 0.0, length: 0.0 }],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop { .. }));
    }

    #[test]
    fn rejects_negative_nominal_cost() {
        let err = DirectedGraph::new(
            2,
            vec![Edge { tail: 0, head: 1, cost: -1.0, length: 0.0 }],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::InvalidCost { .. }));
    }

    #[test]
    fn permits_parallel_edges() {
        let g = DirectedGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, cost: 1.0, length: 1.0 },
                Edge { tail: 0, head: 1, cost: 2.0, length: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(g.out_edges(0), &[0, 1]);
    }

    #[test]
    fn path_validation() {
        let g = diamond();
        let p = Path::new(&g, 0, 3, vec![0, 1]).unwrap();
        assert_eq!(p.cost(&g.nominal_costs()), 2.0);
        assert_eq!(p.nodes(&g), vec![0, 1, 3]);
        assert!(Path::new(&g, 0, 3, vec![0, 3]).is_err());
        assert!(Path::new(&g, 0, 3, vec![1]).is_err());
        // empty path only when s == t
        assert!(Path::new(&g, 0, 0, vec![]).is_ok());
        assert!(Path::new(&g, 0, 3, vec![]).is_err());
    }

    #[test]
    fn path_rejects_repeated_node() {
        let g = DirectedGraph::new(
            3,
            vec![
                Edge { tail: 0, head: 1, cost: 1.0, length: 1.0 },
                Edge { tail: 1, head: 2, cost: 1.0, length: 1.0 },
                Edge { tail: 2, head: 0, cost: 1.0, length: 1.0 },
                Edge { tail: 0, head: 2, cost: 1.0, length: 1.0 },
            ],
        )
        .unwrap();
        let err = Path::new(&g, 0, 2, vec![0, 1, 2, 3]).unwrap_err();
        assert!(matches!(err, GraphError::RepeatedNode { node: 0 }));
    }

    #[test]
    fn incidence_roundtrip() {
        let g = diamond();
        let p = Path::new(&g, 0, 3, vec![2, 3]).unwrap();
        let x = p.incidence(g.edge_count());
        let q = Path::from_incidence(&g, 0, 3, &x).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn incidence_rejects_disconnected_extra_edges() {
        let g = diamond();
        let mut x = Path::new(&g, 0, 3, vec![0, 1]).unwrap().incidence(4);
        x[3] = true; // 2 -> 3 is not on the walk from 0
        assert!(Path::from_incidence(&g, 0, 3, &x).is_err());
    }

    #[test]
    fn progression_allows_repeats() {
        let g = DirectedGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, cost: 1.0, length: 1.0 },
                Edge { tail: 1, head: 0, cost: 1.0, length: 1.0 },
            ],
        )
        .unwrap();
        let p = EdgeProgression::new(&g, 0, 1, vec![0, 1, 0]).unwrap();
        assert_eq!(p.cost(&[1.0, 1.0]), 3.0);
        assert_eq!(p.incidence(2), vec![true, true]);
        assert_eq!(p.max_multiplicity(), 2);
    }

    #[test]
    fn csv_roundtrip() {
        let g = diamond();
        let mut buf = Vec::new();
        g.to_csv(&mut buf, &["generated for tests".into()]).unwrap();
        let parsed = DirectedGraph::from_csv(&buf[..]).unwrap();
        assert_eq!(parsed.node_count(), 4);
        assert_eq!(parsed.edge_count(), 4);
        assert_eq!(parsed.edge(2).cost, 5.0);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let data = "edge,tail,head,c,l\n0,0,1,1.0,1.0\n";
        assert!(matches!(
            DirectedGraph::from_csv(data.as_bytes()),
            Err(GraphError::Csv { .. })
        ));
    }
}
