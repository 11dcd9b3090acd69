//! Quivers: finite directed multigraphs with named vertices and arrows.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An arrow of a quiver, stored with vertex *indices* into the owning
/// quiver's vertex list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite directed multigraph.  Vertices are ordered and named; arrows
/// carry their own ids so that instance files and error messages can refer
/// to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// Validate and build a quiver from vertex ids and `(arrow id, src id,
    /// dst id)` triples.  The vertex set must be non-empty and all ids
    /// unique; arrow endpoints must be declared vertices.
    pub fn new<V, A>(vertices: V, arrows: A) -> Result<Arc<Self>>
    where
        V: IntoIterator<Item = String>,
        A: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(Error::EmptyQuiver);
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let index_of = |id: &str| vertices.iter().position(|v| v == id);
        let mut built = Vec::new();
        let mut arrow_ids = BTreeSet::new();
        for (id, src, dst) in arrows {
            if seen.contains(&id) || !arrow_ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            let src = index_of(&src).ok_or_else(|| Error::DanglingArrow {
                arrow: id.clone(),
                vertex: src.clone(),
            })?;
            let dst = index_of(&dst).ok_or_else(|| Error::DanglingArrow {
                arrow: id.clone(),
                vertex: dst.clone(),
            })?;
            built.push(Arrow { id, src, dst });
        }
        Ok(Arc::new(Quiver {
            vertices,
            arrows: built,
        }))
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Vertex ids in declaration order.
    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    /// All arrows, in declaration order.
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Indices of arrows whose source is `vertex`.
    pub fn arrows_out(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.src == vertex)
            .map(|(i, _)| i)
    }

    /// Indices of arrows whose target is `vertex`.
    pub fn arrows_in(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.dst == vertex)
            .map(|(i, _)| i)
    }

    /// The quiver with two vertices and two parallel arrows from the first
    /// to the second — the running example throughout the test suite and the
    /// base of the moduli reference computation.
    pub fn kronecker() -> Arc<Self> {
        Quiver::new(
            ["1".to_string(), "2".to_string()],
            [
                ("a".to_string(), "1".to_string(), "2".to_string()),
                ("b".to_string(), "1".to_string(), "2".to_string()),
            ],
        )
        .expect("static quiver")
    }

    /// Single vertex with one loop.
    pub fn loop_quiver() -> Arc<Self> {
        Quiver::new(
            ["1".to_string()],
            [("l".to_string(), "1".to_string(), "1".to_string())],
        )
        .expect("static quiver")
    }

    /// Two vertices joined by a single arrow.
    pub fn single_arrow() -> Arc<Self> {
        Quiver::new(
            ["1".to_string(), "2".to_string()],
            [("a".to_string(), "1".to_string(), "2".to_string())],
        )
        .expect("static quiver")
    }
}
