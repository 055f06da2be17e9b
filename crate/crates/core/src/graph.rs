//! Metric graphs with semi-infinite leads.
//!
//! A [`MetricGraph`] is a finite set of vertices joined by internal edges of
//! positive length, plus leads (half-lines) attached at vertices. Vertices,
//! edges and leads carry dense integer ids in insertion order; every
//! downstream ordering (matrix rows and columns, exponent vectors) is derived
//! from these ids.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LeadId(pub usize);

/// Internal edge, parametrised as `[0, length]` from `tail` to `head`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn touches(&self, v: VertexId) -> bool {
        self.tail == v || self.head == v
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        if self.tail == v {
            Some(self.head)
        } else if self.head == v {
            Some(self.tail)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lead {
    pub id: LeadId,
    pub vertex: VertexId,
}

/// Compact metric graph plus leads.
///
/// The graph is immutable once built. It may hold data that fails
/// [`MetricGraph::validate`]; operations that need a well-formed graph call
/// [`MetricGraph::ensure_valid`] first.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    leads: Vec<Lead>,
}

#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    names: Vec<String>,
    edges: Vec<Edge>,
    leads: Vec<Lead>,
}

impl GraphBuilder {
    pub fn vertex(&mut self, name: impl Into<String>) -> VertexId {
        self.names.push(name.into());
        VertexId(self.names.len() - 1)
    }

    pub fn edge(&mut self, tail: VertexId, head: VertexId, length: f64) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge {
            id,
            tail,
            head,
            length,
        });
        id
    }

    pub fn lead(&mut self, vertex: VertexId) -> LeadId {
        let id = LeadId(self.leads.len());
        self.leads.push(Lead { id, vertex });
        id
    }

    pub fn leads(&mut self, vertex: VertexId, count: usize) {
        for _ in 0..count {
            self.lead(vertex);
        }
    }

    /// Builds without validation.
    pub fn build(self) -> MetricGraph {
        MetricGraph {
            names: self.names,
            edges: self.edges,
            leads: self.leads,
        }
    }

    pub fn build_validated(self) -> Result<MetricGraph> {
        let graph = self.build();
        graph.ensure_valid()?;
        Ok(graph)
    }
}

/// A single problem found by [`MetricGraph::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Tadpole { edge: EdgeId },
    DanglingEdge { edge: EdgeId, vertex: VertexId },
    DanglingLead { lead: LeadId, vertex: VertexId },
    NonPositiveLength { edge: EdgeId, length: f64 },
    IsolatedVertex { vertex: VertexId },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Tadpole { .. } => "tadpole",
            Violation::DanglingEdge { .. } | Violation::DanglingLead { .. } => "dangling reference",
            Violation::NonPositiveLength { .. } => "non-positive length",
            Violation::IsolatedVertex { .. } => "isolated vertex",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Tadpole { edge } => write!(f, "tadpole: edge {} starts and ends at one vertex", edge.0),
            Violation::DanglingEdge { edge, vertex } => {
                write!(f, "dangling reference: edge {} uses vertex {}", edge.0, vertex.0)
            }
            Violation::DanglingLead { lead, vertex } => {
                write!(f, "dangling reference: lead {} attached at vertex {}", lead.0, vertex.0)
            }
            Violation::NonPositiveLength { edge, length } => {
                write!(f, "non-positive length: edge {} has length {}", edge.0, length)
            }
            Violation::IsolatedVertex { vertex } => {
                write!(f, "isolated vertex: vertex {} has degree 0", vertex.0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Degree data of one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexProfile {
    pub vertex: VertexId,
    /// Number of internal-edge endpoints at the vertex (`p`).
    pub internal_degree: usize,
    /// Number of leads attached (`q`).
    pub lead_count: usize,
}

impl VertexProfile {
    pub fn degree(&self) -> usize {
        self.internal_degree + self.lead_count
    }

    pub fn is_external(&self) -> bool {
        self.lead_count > 0
    }

    /// External vertex with as many leads as internal edges.
    pub fn is_balanced(&self) -> bool {
        self.is_external() && self.internal_degree == self.lead_count
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylClassification {
    pub is_weyl: bool,
    pub balanced_vertices: Vec<VertexId>,
    /// Total length of the internal edges.
    pub volume: f64,
}

impl MetricGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn leads(&self) -> &[Lead] {
        &self.leads
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name).map(VertexId)
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    /// Sum of internal edge lengths, accumulated in edge-id order.
    pub fn volume(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn leads_at(&self, v: VertexId) -> impl Iterator<Item = &Lead> + '_ {
        self.leads.iter().filter(move |l| l.vertex == v)
    }

    /// Edges joining `u` and `v` (there may be several).
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges
            .iter()
            .filter(move |e| u != v && e.touches(u) && e.touches(v))
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.names.len();
        let mut violations = Vec::new();
        for e in &self.edges {
            for v in [e.tail, e.head] {
                if v.0 >= n {
                    violations.push(Violation::DanglingEdge { edge: e.id, vertex: v });
                }
            }
            if e.tail == e.head {
                violations.push(Violation::Tadpole { edge: e.id });
            }
            // `!(x > 0)` also rejects NaN.
            if !(e.length > 0.0) || !e.length.is_finite() {
                violations.push(Violation::NonPositiveLength {
                    edge: e.id,
                    length: e.length,
                });
            }
        }
        for l in &self.leads {
            if l.vertex.0 >= n {
                violations.push(Violation::DanglingLead {
                    lead: l.id,
                    vertex: l.vertex,
                });
            }
        }
        for v in self.vertices() {
            let profile = self.profile_unchecked(v);
            if profile.degree() == 0 {
                violations.push(Violation::IsolatedVertex { vertex: v });
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_pass() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.violations))
        }
    }

    pub fn vertex_profile(&self, v: VertexId) -> Result<VertexProfile> {
        if v.0 >= self.names.len() {
            return Err(Error::UnknownVertex(format!("#{}", v.0)));
        }
        Ok(self.profile_unchecked(v))
    }

    fn profile_unchecked(&self, v: VertexId) -> VertexProfile {
        VertexProfile {
            vertex: v,
            internal_degree: self.edges.iter().filter(|e| e.touches(v)).count(),
            lead_count: self.leads.iter().filter(|l| l.vertex == v).count(),
        }
    }

    pub fn profiles(&self) -> Vec<VertexProfile> {
        self.vertices().map(|v| self.profile_unchecked(v)).collect()
    }

    /// Weyl iff no external vertex is balanced.
    pub fn classify_weyl(&self) -> WeylClassification {
        let balanced_vertices: Vec<VertexId> = self
            .profiles()
            .into_iter()
            .filter(VertexProfile::is_balanced)
            .map(|p| p.vertex)
            .collect();
        WeylClassification {
            is_weyl: balanced_vertices.is_empty(),
            balanced_vertices,
            volume: self.volume(),
        }
    }

    /// Parses the JSON graph description. Names map to ids in file order;
    /// each lead entry expands into `count` leads.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut b = MetricGraph::builder();
        for (i, name) in file.vertices.iter().enumerate() {
            if file.vertices[..i].contains(name) {
                return Err(Error::Parse(format!("duplicate vertex name {name:?}")));
            }
            b.vertex(name.clone());
        }
        let lookup = |b: &GraphBuilder, name: &str| {
            b.names
                .iter()
                .position(|n| n == name)
                .map(VertexId)
                .ok_or_else(|| Error::UnknownVertex(name.to_owned()))
        };
        for e in &file.edges {
            let u = lookup(&b, &e.u)?;
            let v = lookup(&b, &e.v)?;
            b.edge(u, v, e.length);
        }
        for l in &file.leads {
            let at = lookup(&b, &l.at)?;
            b.leads(at, l.count);
        }
        Ok(b.build())
    }

    pub fn to_json_string(&self) -> String {
        let mut leads: Vec<LeadEntry> = Vec::new();
        for l in &self.leads {
            let name = self.names[l.vertex.0].clone();
            match leads.last_mut() {
                Some(last) if last.at == name => last.count += 1,
                _ => leads.push(LeadEntry { at: name, count: 1 }),
            }
        }
        let file = GraphFile {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    u: self.names[e.tail.0].clone(),
                    v: self.names[e.head.0].clone(),
                    length: e.length,
                })
                .collect(),
            leads,
        };
        serde_json::to_string_pretty(&file).expect("graph file serialises")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
    #[serde(default)]
    leads: Vec<LeadEntry>,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    u: String,
    v: String,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct LeadEntry {
    at: String,
    #[serde(default = "one")]
    count: usize,
}

fn one() -> usize {
    1
}
