//! Strand diagrams over a fixed semigroup presentation.
//!
//! A strand diagram is an acyclic ordered multigraph: edges carry generator
//! labels, interior vertices are cells of a relation with an orientation, and
//! the ordered source/sink slots form the top and bottom boundaries.  A
//! forward vertex reads the relation's `lhs` on its in-edges and `rhs` on its
//! out-edges; a backward vertex the reverse.  Over a tree-like presentation
//! every interior vertex is therefore a split (one in-edge) or a merge (one
//! out-edge).
//!
//! Two adjacent vertices of the same relation with opposite orientations,
//! where the first's ordered out-edges are exactly the second's ordered
//! in-edges, form a dipole and cancel.  Reduced diagrams are a normal form:
//! [`StrandDiagram::reduce`] eliminates dipoles in worklist order, and
//! [`StrandDiagram::canonical_key`] serializes a reduced diagram up to
//! renumbering so that equal keys mean equal group elements.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::presentation::{GenId, Presentation, Word};

/// Orientation of a cell vertex relative to its relation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    /// In-edges spell the relation's `lhs`, out-edges its `rhs`.
    Forward,
    /// In-edges spell the relation's `rhs`, out-edges its `lhs`.
    Backward,
}

impl Orientation {
    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

/// Where an edge starts: a top-boundary slot or an interior vertex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeOrigin {
    Source(usize),
    Vertex(usize),
}

/// Where an edge ends: a bottom-boundary slot or an interior vertex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeTarget {
    Sink(usize),
    Vertex(usize),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub label: GenId,
    pub from: EdgeOrigin,
    pub to: EdgeTarget,
}

/// An interior vertex: one cell of the diagram.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CellVertex {
    pub relation: usize,
    pub orientation: Orientation,
    pub in_edges: Vec<usize>,
    pub out_edges: Vec<usize>,
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum StrandError {
    #[error("diagrams over the empty word are not allowed")]
    EmptyWord,
    #[error("relation id {id} out of range")]
    BadRelationId { id: usize },
    #[error("diagrams are over different presentations")]
    PresentationMismatch,
    #[error("boundary label mismatch at position {position}: `{left}` vs `{right}`")]
    LabelMismatch { position: usize, left: String, right: String },
    #[error("operation requires a reduced diagram")]
    NotReduced,
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

/// Assigns a signed external tag to every interior vertex, derived from the
/// vertex's relation and orientation.
#[derive(Clone, Debug)]
pub struct PathLabeling {
    roles: Vec<(usize, Orientation)>,
}

impl PathLabeling {
    /// `roles[r] = (tag, positive_orientation)`: a cell of relation `r`
    /// carries tag `tag`, signed `+1` exactly when its orientation equals
    /// `positive_orientation`.
    pub fn new(roles: Vec<(usize, Orientation)>) -> PathLabeling {
        PathLabeling { roles }
    }

    pub fn tag(&self, v: &CellVertex) -> (usize, i8) {
        let (tag, positive) = self.roles[v.relation];
        (tag, if v.orientation == positive { 1 } else { -1 })
    }

    pub fn covers(&self, relation: usize) -> bool {
        relation < self.roles.len()
    }
}

/// A strand diagram over a shared presentation.
///
/// Values are immutable: every operation returns a new diagram.
#[derive(Clone, Debug)]
pub struct StrandDiagram {
    pres: Arc<Presentation>,
    sources: Vec<usize>,
    sinks: Vec<usize>,
    vertices: Vec<CellVertex>,
    edges: Vec<Edge>,
}

impl StrandDiagram {
    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[CellVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids on the top boundary, left to right.
    pub fn source_edges(&self) -> &[usize] {
        &self.sources
    }

    /// Edge ids on the bottom boundary, left to right.
    pub fn sink_edges(&self) -> &[usize] {
        &self.sinks
    }

    pub fn top_word(&self) -> Word {
        self.sources.iter().map(|&e| self.edges[e].label).collect()
    }

    pub fn bottom_word(&self) -> Word {
        self.sinks.iter().map(|&e| self.edges[e].label).collect()
    }

    /// The trivial diagram on `word`: parallel labeled strands, no cells.
    pub fn trivial(pres: Arc<Presentation>, word: &[GenId]) -> Result<StrandDiagram, StrandError> {
        if word.is_empty() {
            return Err(StrandError::EmptyWord);
        }
        let edges: Vec<Edge> = word
            .iter()
            .enumerate()
            .map(|(i, &g)| Edge {
                label: g,
                from: EdgeOrigin::Source(i),
                to: EdgeTarget::Sink(i),
            })
            .collect();
        let slots: Vec<usize> = (0..word.len()).collect();
        let d = StrandDiagram {
            pres,
            sources: slots.clone(),
            sinks: slots,
            vertices: Vec::new(),
            edges,
        };
        d.debug_validated()
    }

    /// One cell of relation `rel` flanked by trivial strands: the diagram
    /// `left + cell + right`, with top label `left · (in side) · right`.
    pub fn atom(
        pres: Arc<Presentation>,
        left: &[GenId],
        rel: usize,
        orientation: Orientation,
        right: &[GenId],
    ) -> Result<StrandDiagram, StrandError> {
        let relation = pres
            .relation(rel)
            .map_err(|_| StrandError::BadRelationId { id: rel })?
            .clone();
        let (top, bottom) = match orientation {
            Orientation::Forward => (&relation.lhs, &relation.rhs),
            Orientation::Backward => (&relation.rhs, &relation.lhs),
        };

        let mut edges = Vec::new();
        let mut sources = Vec::new();
        let mut sinks = Vec::new();
        let mut in_edges = Vec::new();
        let mut out_edges = Vec::new();

        for (i, &g) in left.iter().enumerate() {
            edges.push(Edge { label: g, from: EdgeOrigin::Source(i), to: EdgeTarget::Sink(i) });
            sources.push(edges.len() - 1);
            sinks.push(edges.len() - 1);
        }
        for (k, &g) in top.iter().enumerate() {
            edges.push(Edge {
                label: g,
                from: EdgeOrigin::Source(left.len() + k),
                to: EdgeTarget::Vertex(0),
            });
            sources.push(edges.len() - 1);
            in_edges.push(edges.len() - 1);
        }
        for (k, &g) in bottom.iter().enumerate() {
            edges.push(Edge {
                label: g,
                from: EdgeOrigin::Vertex(0),
                to: EdgeTarget::Sink(left.len() + k),
            });
            sinks.push(edges.len() - 1);
            out_edges.push(edges.len() - 1);
        }
        for (i, &g) in right.iter().enumerate() {
            edges.push(Edge {
                label: g,
                from: EdgeOrigin::Source(left.len() + top.len() + i),
                to: EdgeTarget::Sink(left.len() + bottom.len() + i),
            });
            sources.push(edges.len() - 1);
            sinks.push(edges.len() - 1);
        }

        let d = StrandDiagram {
            pres,
            sources,
            sinks,
            vertices: vec![CellVertex { relation: rel, orientation, in_edges, out_edges }],
            edges,
        };
        d.debug_validated()
    }

    /// Concatenation: splices this diagram's sinks to `other`'s sources.
    /// Requires equal boundary labels letter for letter.  No reduction is
    /// performed.
    pub fn compose(&self, other: &StrandDiagram) -> Result<StrandDiagram, StrandError> {
        if !Arc::ptr_eq(&self.pres, &other.pres) && *self.pres != *other.pres {
            return Err(StrandError::PresentationMismatch);
        }
        let bottom = self.bottom_word();
        let top = other.top_word();
        if bottom != top {
            let position = bottom
                .iter()
                .zip(top.iter())
                .position(|(a, b)| a != b)
                .unwrap_or_else(|| bottom.len().min(top.len()));
            let side = |w: &Word, i: usize| {
                w.get(i).map_or("<end>".to_string(), |g| self.pres.gen_name(*g).to_string())
            };
            return Err(StrandError::LabelMismatch {
                position,
                left: side(&bottom, position),
                right: side(&top, position),
            });
        }

        let v_off = self.vertices.len();
        let mut edges = self.edges.clone();
        let mut vertices = self.vertices.clone();

        // Map every edge of `other` to an id in the combined arena.  Source
        // edges of `other` are unified with the corresponding sink edges of
        // `self`; the rest are appended.
        let mut edge_map: Vec<Option<usize>> = vec![None; other.edges.len()];
        let mut is_other_source = vec![false; other.edges.len()];
        for (k, &src_edge) in other.sources.iter().enumerate() {
            edge_map[src_edge] = Some(self.sinks[k]);
            is_other_source[src_edge] = true;
        }
        for (e, old) in other.edges.iter().enumerate() {
            if edge_map[e].is_none() {
                edges.push(old.clone());
                edge_map[e] = Some(edges.len() - 1);
            }
        }
        let edge_map: Vec<usize> = edge_map.into_iter().map(Option::unwrap).collect();

        for (e, old) in other.edges.iter().enumerate() {
            let new_id = edge_map[e];
            let to = match old.to {
                EdgeTarget::Sink(j) => EdgeTarget::Sink(j),
                EdgeTarget::Vertex(v) => EdgeTarget::Vertex(v + v_off),
            };
            if is_other_source[e] {
                // Unified edge: keep `self`'s origin, take `other`'s target.
                edges[new_id].to = to;
            } else {
                edges[new_id].from = match old.from {
                    EdgeOrigin::Vertex(v) => EdgeOrigin::Vertex(v + v_off),
                    EdgeOrigin::Source(_) => unreachable!("non-source edge with boundary origin"),
                };
                edges[new_id].to = to;
            }
        }
        for v in &other.vertices {
            vertices.push(CellVertex {
                relation: v.relation,
                orientation: v.orientation,
                in_edges: v.in_edges.iter().map(|&e| edge_map[e]).collect(),
                out_edges: v.out_edges.iter().map(|&e| edge_map[e]).collect(),
            });
        }
        let sinks = other.sinks.iter().map(|&e| edge_map[e]).collect();

        let d = StrandDiagram {
            pres: self.pres.clone(),
            sources: self.sources.clone(),
            sinks,
            vertices,
            edges,
        };
        d.debug_validated()
    }

    /// Addition: places `other` to the right of this diagram.
    pub fn sum(&self, other: &StrandDiagram) -> Result<StrandDiagram, StrandError> {
        if !Arc::ptr_eq(&self.pres, &other.pres) && *self.pres != *other.pres {
            return Err(StrandError::PresentationMismatch);
        }
        let v_off = self.vertices.len();
        let e_off = self.edges.len();
        let src_off = self.sources.len();
        let sink_off = self.sinks.len();

        let mut edges = self.edges.clone();
        for old in &other.edges {
            edges.push(Edge {
                label: old.label,
                from: match old.from {
                    EdgeOrigin::Source(i) => EdgeOrigin::Source(i + src_off),
                    EdgeOrigin::Vertex(v) => EdgeOrigin::Vertex(v + v_off),
                },
                to: match old.to {
                    EdgeTarget::Sink(j) => EdgeTarget::Sink(j + sink_off),
                    EdgeTarget::Vertex(v) => EdgeTarget::Vertex(v + v_off),
                },
            });
        }
        let mut vertices = self.vertices.clone();
        for v in &other.vertices {
            vertices.push(CellVertex {
                relation: v.relation,
                orientation: v.orientation,
                in_edges: v.in_edges.iter().map(|&e| e + e_off).collect(),
                out_edges: v.out_edges.iter().map(|&e| e + e_off).collect(),
            });
        }
        let mut sources = self.sources.clone();
        sources.extend(other.sources.iter().map(|&e| e + e_off));
        let mut sinks = self.sinks.clone();
        sinks.extend(other.sinks.iter().map(|&e| e + e_off));

        let d = StrandDiagram { pres: self.pres.clone(), sources, sinks, vertices, edges };
        d.debug_validated()
    }

    /// Reflection along the horizontal axis: reverses every edge, flips
    /// every cell, and swaps the boundaries.
    pub fn invert(&self) -> StrandDiagram {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                label: e.label,
                from: match e.to {
                    EdgeTarget::Sink(j) => EdgeOrigin::Source(j),
                    EdgeTarget::Vertex(v) => EdgeOrigin::Vertex(v),
                },
                to: match e.from {
                    EdgeOrigin::Source(i) => EdgeTarget::Sink(i),
                    EdgeOrigin::Vertex(v) => EdgeTarget::Vertex(v),
                },
            })
            .collect();
        let vertices = self
            .vertices
            .iter()
            .map(|v| CellVertex {
                relation: v.relation,
                orientation: v.orientation.flipped(),
                in_edges: v.out_edges.clone(),
                out_edges: v.in_edges.clone(),
            })
            .collect();
        let d = StrandDiagram {
            pres: self.pres.clone(),
            sources: self.sinks.clone(),
            sinks: self.sources.clone(),
            vertices,
            edges,
        };
        d.debug_validated().expect("inversion preserves validity")
    }

    fn find_dipole_below(&self, v: usize) -> Option<usize> {
        let p = &self.vertices[v];
        match self.edges[*p.out_edges.first()?].to {
            EdgeTarget::Vertex(q) => {
                let qv = &self.vertices[q];
                if p.relation == qv.relation
                    && p.orientation != qv.orientation
                    && p.out_edges == qv.in_edges
                {
                    Some(q)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Eliminates dipoles until none remain.  The result is independent of
    /// elimination order; this entry point uses a deterministic worklist
    /// seeded with all vertices in index order.
    pub fn reduce(&self) -> StrandDiagram {
        let order: Vec<usize> = (0..self.vertices.len()).collect();
        self.reduce_in_order(&order)
    }

    /// Like [`reduce`](Self::reduce) but seeds the worklist in a seeded
    /// random order.  Exists so tests can confirm the normal form does not
    /// depend on elimination order.
    pub fn reduce_shuffled(&self, seed: u64) -> StrandDiagram {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        self.reduce_in_order(&order)
    }

    fn reduce_in_order(&self, initial: &[usize]) -> StrandDiagram {
        let mut work = Scratch::from_diagram(self);
        let mut queue: VecDeque<usize> = initial.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            if work.vertices[v].is_none() {
                continue;
            }
            if let Some(q) = work.find_dipole_below(v) {
                for touched in work.remove_dipole(v, q) {
                    queue.push_back(touched);
                }
            }
        }
        let d = work.into_diagram(self.pres.clone());
        debug_assert!(d.validate().is_ok(), "reduce produced an invalid diagram");
        debug_assert!(d.find_any_dipole().is_none(), "reduce left a dipole behind");
        d
    }

    fn find_any_dipole(&self) -> Option<(usize, usize)> {
        (0..self.vertices.len()).find_map(|v| self.find_dipole_below(v).map(|q| (v, q)))
    }

    /// True when the reduced form of this diagram has no interior vertices.
    pub fn is_trivial(&self) -> bool {
        self.reduce().vertices.is_empty()
    }

    /// Interior vertices in breadth-first order: edges are scanned starting
    /// from the ordered source slots, following each vertex's out-edges in
    /// order; a vertex is numbered on first encounter.
    fn canonical_vertex_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut sequence = Vec::new();
        let mut queue: VecDeque<usize> = self.sources.iter().copied().collect();
        while let Some(e) = queue.pop_front() {
            if let EdgeTarget::Vertex(v) = self.edges[e].to {
                if !seen[v] {
                    seen[v] = true;
                    sequence.push(v);
                    for &o in &self.vertices[v].out_edges {
                        queue.push_back(o);
                    }
                }
            }
        }
        debug_assert_eq!(sequence.len(), self.vertices.len(), "unreachable vertex");
        sequence
    }

    /// Deterministic encoding of a reduced diagram, invariant under interior
    /// renumbering: two reduced diagrams over the same presentation are equal
    /// in the diagram group iff their keys are equal.
    pub fn canonical_key(&self) -> Result<Vec<u8>, StrandError> {
        if self.find_any_dipole().is_some() {
            return Err(StrandError::NotReduced);
        }
        Ok(self.encode())
    }

    fn encode(&self) -> Vec<u8> {
        let sequence = self.canonical_vertex_order();
        let mut rank = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in sequence.iter().enumerate() {
            rank[v] = i;
        }
        let edge_target = |edge_id: usize, out: &mut String| match self.edges[edge_id].to {
            EdgeTarget::Sink(j) => {
                let _ = write!(out, "S{j}");
            }
            EdgeTarget::Vertex(v) => {
                let port = self.vertices[v]
                    .in_edges
                    .iter()
                    .position(|&e| e == edge_id)
                    .expect("edge missing from its target's in-list");
                let _ = write!(out, "V{}.{}", rank[v], port);
            }
        };

        let mut out = String::new();
        out.push_str("top:");
        for (i, &e) in self.sources.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(self.pres.gen_name(self.edges[e].label));
        }
        out.push(';');
        out.push_str("src:");
        for (i, &e) in self.sources.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            edge_target(e, &mut out);
        }
        out.push(';');
        for (i, &v) in sequence.iter().enumerate() {
            let cell = &self.vertices[v];
            let orient = match cell.orientation {
                Orientation::Forward => '+',
                Orientation::Backward => '-',
            };
            let _ = write!(out, "V{i}:r{}{}[", cell.relation, orient);
            for (k, &e) in cell.out_edges.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                edge_target(e, &mut out);
            }
            out.push_str("];");
        }
        out.into_bytes()
    }

    /// All tag sequences read along maximal source-to-sink paths, collapsed
    /// to a set.  `tags` must cover every relation used by the diagram.
    pub fn maximal_path_labels(&self, tags: &PathLabeling) -> BTreeSet<Vec<(usize, i8)>> {
        for v in &self.vertices {
            assert!(
                tags.covers(v.relation),
                "path labeling does not cover relation {}",
                v.relation
            );
        }
        let mut memo: HashMap<usize, BTreeSet<Vec<(usize, i8)>>> = HashMap::new();
        let mut result = BTreeSet::new();
        for &e in &self.sources {
            result.extend(self.suffixes(e, tags, &mut memo).iter().cloned());
        }
        result
    }

    fn suffixes(
        &self,
        edge: usize,
        tags: &PathLabeling,
        memo: &mut HashMap<usize, BTreeSet<Vec<(usize, i8)>>>,
    ) -> BTreeSet<Vec<(usize, i8)>> {
        if let Some(hit) = memo.get(&edge) {
            return hit.clone();
        }
        let set = match self.edges[edge].to {
            EdgeTarget::Sink(_) => {
                let mut s = BTreeSet::new();
                s.insert(Vec::new());
                s
            }
            EdgeTarget::Vertex(v) => {
                let tag = tags.tag(&self.vertices[v]);
                let mut s = BTreeSet::new();
                for &o in &self.vertices[v].out_edges {
                    for suffix in self.suffixes(o, tags, memo) {
                        let mut seq = Vec::with_capacity(suffix.len() + 1);
                        seq.push(tag);
                        seq.extend(suffix);
                        s.insert(seq);
                    }
                }
                s
            }
        };
        memo.insert(edge, set.clone());
        set
    }

    /// Checks the structural invariants: boundary and vertex edge lists are
    /// mutually consistent, every edge has exactly one producer and one
    /// consumer, vertex labels spell their relation sides, and the graph is
    /// acyclic.
    pub fn validate(&self) -> Result<(), StrandError> {
        let fail = |msg: String| Err(StrandError::Invalid(msg));
        let mut produced = vec![0usize; self.edges.len()];
        let mut consumed = vec![0usize; self.edges.len()];

        for (slot, &e) in self.sources.iter().enumerate() {
            match self.edges.get(e) {
                Some(edge) if edge.from == EdgeOrigin::Source(slot) => produced[e] += 1,
                _ => return fail(format!("source slot {slot} does not match edge {e}")),
            }
        }
        for (slot, &e) in self.sinks.iter().enumerate() {
            match self.edges.get(e) {
                Some(edge) if edge.to == EdgeTarget::Sink(slot) => consumed[e] += 1,
                _ => return fail(format!("sink slot {slot} does not match edge {e}")),
            }
        }
        for (vi, v) in self.vertices.iter().enumerate() {
            let rel = self
                .pres
                .relation(v.relation)
                .map_err(|_| StrandError::BadRelationId { id: v.relation })?;
            let (top, bottom) = match v.orientation {
                Orientation::Forward => (&rel.lhs, &rel.rhs),
                Orientation::Backward => (&rel.rhs, &rel.lhs),
            };
            if v.in_edges.len() != top.len() || v.out_edges.len() != bottom.len() {
                return fail(format!("vertex {vi} has wrong degree for its relation"));
            }
            for (k, (&e, &want)) in v.in_edges.iter().zip(top.iter()).enumerate() {
                let edge = &self.edges[e];
                if edge.to != EdgeTarget::Vertex(vi) {
                    return fail(format!("in-edge {k} of vertex {vi} does not point at it"));
                }
                if edge.label != want {
                    return fail(format!("in-edge {k} of vertex {vi} has wrong label"));
                }
                consumed[e] += 1;
            }
            for (k, (&e, &want)) in v.out_edges.iter().zip(bottom.iter()).enumerate() {
                let edge = &self.edges[e];
                if edge.from != EdgeOrigin::Vertex(vi) {
                    return fail(format!("out-edge {k} of vertex {vi} does not leave it"));
                }
                if edge.label != want {
                    return fail(format!("out-edge {k} of vertex {vi} has wrong label"));
                }
                produced[e] += 1;
            }
        }
        if let Some(e) = produced.iter().position(|&c| c != 1) {
            return fail(format!("edge {e} has {} producers", produced[e]));
        }
        if let Some(e) = consumed.iter().position(|&c| c != 1) {
            return fail(format!("edge {e} has {} consumers", consumed[e]));
        }

        // Acyclicity via Kahn's algorithm on interior vertices.
        let mut indegree: Vec<usize> = self
            .vertices
            .iter()
            .map(|v| {
                v.in_edges
                    .iter()
                    .filter(|&&e| matches!(self.edges[e].from, EdgeOrigin::Vertex(_)))
                    .count()
            })
            .collect();
        let mut ready: VecDeque<usize> =
            indegree.iter().enumerate().filter(|(_, &d)| d == 0).map(|(v, _)| v).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop_front() {
            seen += 1;
            for &e in &self.vertices[v].out_edges {
                if let EdgeTarget::Vertex(w) = self.edges[e].to {
                    indegree[w] -= 1;
                    if indegree[w] == 0 {
                        ready.push_back(w);
                    }
                }
            }
        }
        if seen != self.vertices.len() {
            return fail("cycle among interior vertices".into());
        }
        Ok(())
    }

    fn debug_validated(self) -> Result<StrandDiagram, StrandError> {
        debug_assert!(self.validate().is_ok(), "{:?}", self.validate());
        Ok(self)
    }

    /// Deterministic text dump: boundary words plus vertices in canonical
    /// order with relation, orientation, and out-edge targets.
    pub fn render(&self) -> String {
        let body = String::from_utf8(self.encode()).expect("key is ascii");
        let mut out = String::new();
        let _ = writeln!(out, "top    {}", self.pres.word_string(&self.top_word()));
        let _ = writeln!(out, "bottom {}", self.pres.word_string(&self.bottom_word()));
        let _ = writeln!(out, "cells  {}", self.vertices.len());
        for part in body.split(';').filter(|p| p.starts_with('V')) {
            let _ = writeln!(out, "  {part}");
        }
        out
    }

    /// Graph-description export in DOT format for visualization tools.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph strand {\n  rankdir=TB;\n");
        for (i, _) in self.sources.iter().enumerate() {
            let _ = writeln!(out, "  src{i} [shape=point];");
        }
        for (i, _) in self.sinks.iter().enumerate() {
            let _ = writeln!(out, "  snk{i} [shape=point];");
        }
        for (v, cell) in self.vertices.iter().enumerate() {
            let orient = match cell.orientation {
                Orientation::Forward => '+',
                Orientation::Backward => '-',
            };
            let _ = writeln!(out, "  v{v} [label=\"r{}{}\"];", cell.relation, orient);
        }
        for edge in &self.edges {
            let from = match edge.from {
                EdgeOrigin::Source(i) => format!("src{i}"),
                EdgeOrigin::Vertex(v) => format!("v{v}"),
            };
            let to = match edge.to {
                EdgeTarget::Sink(j) => format!("snk{j}"),
                EdgeTarget::Vertex(v) => format!("v{v}"),
            };
            let _ =
                writeln!(out, "  {from} -> {to} [label=\"{}\"];", self.pres.gen_name(edge.label));
        }
        out.push_str("}\n");
        out
    }

    /// Builds a diagram directly from parts.  Used by peeling algorithms
    /// that perform graph surgery; the result is validated.
    pub(crate) fn from_parts(
        pres: Arc<Presentation>,
        sources: Vec<usize>,
        sinks: Vec<usize>,
        vertices: Vec<CellVertex>,
        edges: Vec<Edge>,
    ) -> Result<StrandDiagram, StrandError> {
        let d = StrandDiagram { pres, sources, sinks, vertices, edges };
        d.validate()?;
        Ok(d)
    }
}

/// Mutable arena used during reduction; vertices and edges are tombstoned
/// and the survivors compacted at the end.
struct Scratch {
    sources: Vec<usize>,
    sinks: Vec<usize>,
    vertices: Vec<Option<CellVertex>>,
    edges: Vec<Option<Edge>>,
}

impl Scratch {
    fn from_diagram(d: &StrandDiagram) -> Scratch {
        Scratch {
            sources: d.sources.clone(),
            sinks: d.sinks.clone(),
            vertices: d.vertices.iter().cloned().map(Some).collect(),
            edges: d.edges.iter().cloned().map(Some).collect(),
        }
    }

    fn find_dipole_below(&self, v: usize) -> Option<usize> {
        let p = self.vertices[v].as_ref()?;
        let first = *p.out_edges.first()?;
        match self.edges[first].as_ref()?.to {
            EdgeTarget::Vertex(q) => {
                let qv = self.vertices[q].as_ref()?;
                if p.relation == qv.relation
                    && p.orientation != qv.orientation
                    && p.out_edges == qv.in_edges
                {
                    Some(q)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Removes the dipole `(p, q)` and splices `p`'s in-edges to `q`'s
    /// out-edges pairwise.  Returns vertices whose neighborhood changed.
    fn remove_dipole(&mut self, p: usize, q: usize) -> Vec<usize> {
        let pv = self.vertices[p].take().expect("dipole vertex vanished");
        let qv = self.vertices[q].take().expect("dipole vertex vanished");
        debug_assert_eq!(pv.out_edges, qv.in_edges);

        let mut touched = Vec::new();
        for (&e_in, &e_out) in pv.in_edges.iter().zip(qv.out_edges.iter()) {
            let new_target = self.edges[e_out].as_ref().expect("spliced edge vanished").to;
            self.edges[e_in].as_mut().expect("spliced edge vanished").to = new_target;
            match new_target {
                EdgeTarget::Sink(slot) => self.sinks[slot] = e_in,
                EdgeTarget::Vertex(w) => {
                    let wv = self.vertices[w].as_mut().expect("consumer vanished");
                    let port = wv.in_edges.iter().position(|&e| e == e_out).expect("port");
                    wv.in_edges[port] = e_in;
                    touched.push(w);
                }
            }
            if let EdgeOrigin::Vertex(u) = self.edges[e_in].as_ref().unwrap().from {
                touched.push(u);
            }
            self.edges[e_out] = None;
        }
        for &shared in &pv.out_edges {
            self.edges[shared] = None;
        }
        touched
    }

    fn into_diagram(self, pres: Arc<Presentation>) -> StrandDiagram {
        let mut edge_rank = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (e, slot) in self.edges.iter().enumerate() {
            if let Some(edge) = slot {
                edge_rank[e] = edges.len();
                edges.push(edge.clone());
            }
        }
        let mut vertex_rank = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (v, slot) in self.vertices.iter().enumerate() {
            if let Some(cell) = slot {
                vertex_rank[v] = vertices.len();
                vertices.push(cell.clone());
            }
        }
        for edge in &mut edges {
            if let EdgeOrigin::Vertex(v) = edge.from {
                edge.from = EdgeOrigin::Vertex(vertex_rank[v]);
            }
            if let EdgeTarget::Vertex(v) = edge.to {
                edge.to = EdgeTarget::Vertex(vertex_rank[v]);
            }
        }
        for cell in &mut vertices {
            for e in cell.in_edges.iter_mut().chain(cell.out_edges.iter_mut()) {
                *e = edge_rank[*e];
            }
        }
        StrandDiagram {
            pres,
            sources: self.sources.into_iter().map(|e| edge_rank[e]).collect(),
            sinks: self.sinks.into_iter().map(|e| edge_rank[e]).collect(),
            vertices,
            edges,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;

    /// The four-letter presentation of the two-bump crossing configuration:
    /// relations A=AB, B=BC, C=BC, D=CD with base ABCD.
    fn crossing_pres() -> Arc<Presentation> {
        Presentation::from_names(
            &["A", "B", "C", "D"],
            &[
                (&["A"], &["A", "B"]),
                (&["B"], &["B", "C"]),
                (&["C"], &["B", "C"]),
                (&["D"], &["C", "D"]),
            ],
            Some(&["A", "B", "C", "D"]),
        )
        .into_arc()
    }

    fn base(p: &Arc<Presentation>) -> Word {
        p.base().unwrap().clone()
    }

    /// First generator diagram of the crossing configuration: split on A,
    /// merge onto C, strand on D.
    fn beta_f(p: &Arc<Presentation>) -> StrandDiagram {
        let split = StrandDiagram::atom(p.clone(), &[], 0, Orientation::Forward, &[]).unwrap();
        let merge = StrandDiagram::atom(p.clone(), &[], 2, Orientation::Backward, &[GenId(3)])
            .unwrap();
        split.sum(&merge).unwrap()
    }

    /// Second generator diagram: split on B, merge onto D, strand on A.
    fn beta_g(p: &Arc<Presentation>) -> StrandDiagram {
        let split = StrandDiagram::atom(p.clone(), &[GenId(0)], 1, Orientation::Forward, &[])
            .unwrap();
        let merge = StrandDiagram::atom(p.clone(), &[], 3, Orientation::Backward, &[]).unwrap();
        split.sum(&merge).unwrap()
    }

    fn labeling() -> PathLabeling {
        PathLabeling::new(vec![
            (0, Orientation::Forward),
            (1, Orientation::Forward),
            (0, Orientation::Backward),
            (1, Orientation::Backward),
        ])
    }

    #[test]
    fn trivial_has_parallel_strands() {
        let p = crossing_pres();
        let d = StrandDiagram::trivial(p.clone(), &base(&p)).unwrap();
        assert_eq!(d.vertex_count(), 0);
        assert_eq!(d.top_word(), base(&p));
        assert_eq!(d.bottom_word(), base(&p));
        assert!(matches!(StrandDiagram::trivial(p, &[]), Err(StrandError::EmptyWord)));
    }

    #[test]
    fn atom_boundary_words() {
        let p = crossing_pres();
        let d =
            StrandDiagram::atom(p.clone(), &[], 0, Orientation::Forward, &[GenId(2), GenId(3)])
                .unwrap();
        assert_eq!(p.word_string(&d.top_word()), "A C D");
        assert_eq!(p.word_string(&d.bottom_word()), "A B C D");
        assert!(matches!(
            StrandDiagram::atom(p, &[], 99, Orientation::Forward, &[]),
            Err(StrandError::BadRelationId { id: 99 })
        ));
    }

    #[test]
    fn generator_diagram_has_expected_shape() {
        let p = crossing_pres();
        let d = beta_f(&p);
        assert_eq!(d.vertex_count(), 2);
        assert_eq!(d.top_word(), base(&p));
        assert_eq!(d.bottom_word(), base(&p));
        // Sum of the two atoms equals stacking them: the merge atom has top
        // ABCD and bottom ACD, the split atom top ACD and bottom ABCD.
        let via_compose = {
            let merge =
                StrandDiagram::atom(p.clone(), &[GenId(0)], 2, Orientation::Backward, &[GenId(3)])
                    .unwrap();
            let split =
                StrandDiagram::atom(p.clone(), &[], 0, Orientation::Forward, &[GenId(2), GenId(3)])
                    .unwrap();
            merge.compose(&split).unwrap()
        };
        assert_eq!(
            d.canonical_key().unwrap(),
            via_compose.canonical_key().unwrap()
        );
    }

    #[test]
    fn compose_with_trivial_is_identity_on_keys() {
        let p = crossing_pres();
        let id = StrandDiagram::trivial(p.clone(), &base(&p)).unwrap();
        let d = beta_f(&p);
        let left = id.compose(&d).unwrap();
        let right = d.compose(&id).unwrap();
        assert_eq!(left.canonical_key().unwrap(), d.canonical_key().unwrap());
        assert_eq!(right.canonical_key().unwrap(), d.canonical_key().unwrap());
    }

    #[test]
    fn compose_reports_first_mismatch_position() {
        let p = crossing_pres();
        let d = beta_f(&p);
        let other = StrandDiagram::trivial(
            p.clone(),
            &[GenId(0), GenId(2), GenId(2), GenId(3)],
        )
        .unwrap();
        match d.compose(&other) {
            Err(StrandError::LabelMismatch { position, .. }) => assert_eq!(position, 1),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn sum_concatenates_boundaries() {
        let p = crossing_pres();
        let u = StrandDiagram::trivial(p.clone(), &[GenId(0), GenId(1)]).unwrap();
        let v = StrandDiagram::trivial(p.clone(), &[GenId(2), GenId(3)]).unwrap();
        let s = u.sum(&v).unwrap();
        assert_eq!(s.top_word(), base(&p));
        assert_eq!(
            s.canonical_key().unwrap(),
            StrandDiagram::trivial(p.clone(), &base(&p)).unwrap().canonical_key().unwrap()
        );
    }

    #[test]
    fn invert_is_an_involution() {
        let p = crossing_pres();
        let d = beta_f(&p);
        let dd = d.invert().invert();
        assert_eq!(dd.canonical_key().unwrap(), d.canonical_key().unwrap());
        let inv = d.invert();
        assert_eq!(inv.top_word(), d.bottom_word());
        assert_eq!(inv.bottom_word(), d.top_word());
    }

    #[test]
    fn atom_times_inverse_reduces_to_trivial() {
        let p = crossing_pres();
        let d =
            StrandDiagram::atom(p.clone(), &[], 0, Orientation::Forward, &[GenId(2), GenId(3)])
                .unwrap();
        let prod = d.compose(&d.invert()).unwrap();
        assert_eq!(prod.vertex_count(), 2);
        let reduced = prod.reduce();
        assert_eq!(reduced.vertex_count(), 0);
        assert_eq!(reduced.top_word(), d.top_word());
        assert_eq!(reduced.bottom_word(), d.top_word());
        assert!(prod.is_trivial());
    }

    #[test]
    fn generator_diagram_times_inverse_is_trivial() {
        let p = crossing_pres();
        for d in [beta_f(&p), beta_g(&p)] {
            let prod = d.compose(&d.invert()).unwrap();
            assert!(prod.is_trivial());
            assert!(!d.is_trivial());
        }
    }

    #[test]
    fn merge_then_split_is_also_a_dipole() {
        let p = crossing_pres();
        let cd: Word = vec![GenId(2), GenId(3)];
        let back = StrandDiagram::atom(p.clone(), &[], 0, Orientation::Backward, &cd).unwrap();
        let fwd = StrandDiagram::atom(p.clone(), &[], 0, Orientation::Forward, &cd).unwrap();
        let prod = back.compose(&fwd).unwrap();
        assert_eq!(prod.reduce().vertex_count(), 0);
    }

    #[test]
    fn stacked_same_orientation_cells_are_not_a_dipole() {
        // Two forward cells of an identity-shaped relation x = x stacked on
        // each other must not cancel; only opposite orientations do.
        let p = Presentation::from_names(&["x"], &[(&["x"], &["x"])], Some(&["x"])).into_arc();
        let fwd = StrandDiagram::atom(p.clone(), &[], 0, Orientation::Forward, &[]).unwrap();
        let stack = fwd.compose(&fwd).unwrap();
        assert_eq!(stack.reduce().vertex_count(), 2);
        let cancel = fwd.compose(&fwd.invert()).unwrap();
        assert_eq!(cancel.reduce().vertex_count(), 0);
    }

    #[test]
    fn crossing_generators_do_not_commute() {
        let p = crossing_pres();
        let f = beta_f(&p);
        let g = beta_g(&p);
        let w =
            f.compose(&g).unwrap().compose(&f.invert()).unwrap().compose(&g.invert()).unwrap();
        assert!(!w.is_trivial());
    }

    #[test]
    fn reduction_order_does_not_change_the_key() {
        let p = crossing_pres();
        let f = beta_f(&p);
        let g = beta_g(&p);
        let mut d = StrandDiagram::trivial(p.clone(), &base(&p)).unwrap();
        for factor in [&f, &g, &f.invert(), &g, &f, &g.invert()] {
            d = d.compose(factor).unwrap();
        }
        let reference = d.reduce().canonical_key().unwrap();
        for seed in 0..5 {
            assert_eq!(d.reduce_shuffled(seed).canonical_key().unwrap(), reference);
        }
    }

    #[test]
    fn canonical_key_requires_reduced_input() {
        let p = crossing_pres();
        let d = beta_f(&p);
        let prod = d.compose(&d.invert()).unwrap();
        assert!(matches!(prod.canonical_key(), Err(StrandError::NotReduced)));
        assert!(prod.reduce().canonical_key().is_ok());
    }

    #[test]
    fn canonical_key_of_trivial_depends_only_on_word() {
        let p = crossing_pres();
        let d1 = StrandDiagram::trivial(p.clone(), &base(&p)).unwrap();
        let d2 = StrandDiagram::trivial(p.clone(), &[GenId(0)]).unwrap();
        assert_ne!(d1.canonical_key().unwrap(), d2.canonical_key().unwrap());
    }

    #[test]
    fn associativity_up_to_reduction() {
        let p = crossing_pres();
        let a = beta_f(&p);
        let b = beta_g(&p);
        let c = beta_f(&p).invert();
        let left = a.compose(&b).unwrap().compose(&c).unwrap().reduce();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap().reduce();
        assert_eq!(left.canonical_key().unwrap(), right.canonical_key().unwrap());
    }

    #[test]
    fn split_merge_dichotomy_over_tree_like_presentation() {
        let p = crossing_pres();
        assert!(p.is_tree_like());
        let f = beta_f(&p);
        let g = beta_g(&p);
        let d = f.compose(&g).unwrap().compose(&f.invert()).unwrap().reduce();
        for v in d.vertices() {
            assert!(v.in_edges.len() == 1 || v.out_edges.len() == 1);
        }
    }

    #[test]
    fn path_labels_on_trivial_is_empty_sequence() {
        let p = crossing_pres();
        let d = StrandDiagram::trivial(p.clone(), &base(&p)).unwrap();
        let labels = d.maximal_path_labels(&labeling());
        assert_eq!(labels.len(), 1);
        assert!(labels.contains(&Vec::new()));
    }

    #[test]
    fn path_labels_on_generator_diagram() {
        let p = crossing_pres();
        let labels = beta_f(&p).maximal_path_labels(&labeling());
        // Paths through the split and through the merge carry (f); the D
        // strand contributes the empty sequence.
        let expected: BTreeSet<Vec<(usize, i8)>> = [vec![], vec![(0, 1)]].into_iter().collect();
        assert_eq!(labels, expected);
    }

    #[test]
    fn validate_rejects_tampering() {
        let p = crossing_pres();
        let mut d = beta_f(&p);
        assert!(d.validate().is_ok());
        d.edges[0].label = GenId(3);
        assert!(d.validate().is_err());
    }

    #[test]
    fn render_and_dot_are_deterministic() {
        let p = crossing_pres();
        let d = beta_f(&p);
        assert_eq!(d.render(), d.clone().render());
        assert!(d.to_dot().starts_with("digraph strand {"));
    }
}
