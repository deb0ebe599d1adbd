//! Finite balls of Cayley graphs, built breadth-first from the identity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::group::{Element, GenSet, GroupError, GroupModel};

/// Default cap on the number of vertices in a ball.
pub const DEFAULT_MAX_VERTICES: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum BallError {
    #[error("generating set is empty")]
    EmptyGenerators,
    #[error("ball exceeds {limit} vertices; completed radius {achieved_radius}")]
    BallTooLarge {
        achieved_radius: usize,
        limit: usize,
    },
    #[error("radius {requested} outside 0..={radius}")]
    RadiusOutOfRange { requested: usize, radius: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The radius-`r` ball of `Cay(G, S)` about the identity.
///
/// Vertex 0 is the identity. Vertices are listed by distance, and within one
/// distance by canonical key order, so indices are reproducible.
#[derive(Clone, Debug)]
pub struct Ball {
    model: GroupModel,
    gens: GenSet,
    radius: usize,
    vertices: Vec<Element>,
    dist: Vec<usize>,
    index: HashMap<Element, usize>,
    graph: Graph,
}

pub fn build_ball(model: &GroupModel, gens: &GenSet, radius: usize) -> Result<Ball, BallError> {
    build_ball_with_limit(model, gens, radius, DEFAULT_MAX_VERTICES)
}

pub fn build_ball_with_limit(
    model: &GroupModel,
    gens: &GenSet,
    radius: usize,
    max_vertices: usize,
) -> Result<Ball, BallError> {
    if gens.is_empty() {
        return Err(BallError::EmptyGenerators);
    }
    let identity = model.identity();
    let mut vertices = vec![identity.clone()];
    let mut dist = vec![0];
    let mut index = HashMap::from([(identity, 0)]);
    let mut layer_start = 0;
    for d in 1..=radius {
        let mut layer: Vec<Element> = Vec::new();
        for u in &vertices[layer_start..] {
            for s in gens.elements() {
                let w = model.mul(u, s)?;
                if !index.contains_key(&w) {
                    layer.push(w);
                }
            }
        }
        layer.sort_unstable();
        layer.dedup();
        if layer.is_empty() {
            break;
        }
        if vertices.len() + layer.len() > max_vertices {
            return Err(BallError::BallTooLarge {
                achieved_radius: d - 1,
                limit: max_vertices,
            });
        }
        layer_start = vertices.len();
        for w in layer {
            index.insert(w.clone(), vertices.len());
            vertices.push(w);
            dist.push(d);
        }
    }
    let mut edges = Vec::new();
    for (u, g) in vertices.iter().enumerate() {
        for s in gens.elements() {
            if let Some(&v) = index.get(&model.mul(g, s)?) {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
    }
    let graph = Graph::from_edges(vertices.len(), &edges).expect("ball edges are in range");
    Ok(Ball {
        model: model.clone(),
        gens: gens.clone(),
        radius,
        vertices,
        dist,
        index,
        graph,
    })
}

impl Ball {
    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn gens(&self) -> &GenSet {
        &self.gens
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Element] {
        &self.vertices
    }

    pub fn element(&self, v: usize) -> &Element {
        &self.vertices[v]
    }

    pub fn dist(&self, v: usize) -> usize {
        self.dist[v]
    }

    pub fn distances(&self) -> &[usize] {
        &self.dist
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// The ball's vertex and edge data as a plain graph, index-preserving.
    pub fn induced_graph(&self) -> Graph {
        self.graph.clone()
    }

    /// Vertices at distance exactly `i`.
    pub fn sphere(&self, i: usize) -> Result<Vec<usize>, BallError> {
        if i > self.radius {
            return Err(BallError::RadiusOutOfRange {
                requested: i,
                radius: self.radius,
            });
        }
        Ok((0..self.len()).filter(|&v| self.dist[v] == i).collect())
    }

    pub fn labels(&self) -> Vec<String> {
        self.vertices.iter().map(|e| self.model.format(e)).collect()
    }

    pub fn to_json(&self) -> BallJson {
        BallJson {
            vertices: (0..self.len())
                .map(|v| BallVertexJson {
                    index: v,
                    key: self.model.format(&self.vertices[v]),
                    dist: self.dist[v],
                })
                .collect(),
            edges: self
                .graph
                .edges()
                .into_iter()
                .map(|(u, v)| [u, v])
                .collect(),
            radius: self.radius,
            gens: self
                .gens
                .elements()
                .iter()
                .map(|e| self.model.format(e))
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot(Some(&self.labels()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallVertexJson {
    pub index: usize,
    pub key: String,
    pub dist: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson {
    pub vertices: Vec<BallVertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub radius: usize,
    pub gens: Vec<String>,
}
