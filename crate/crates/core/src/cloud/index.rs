//! Static k-d tree over a snapshot of cloud coordinates.
//!
//! Results are exact: ties are broken by `(distance, input index)`, so a
//! query returns precisely what a linear scan sorted the same way returns.

use super::{Point3, PointCloud};
use nalgebra::Vector3;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;

/// A query hit: input index and Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Anything with a 3D position that can be used as a query.
pub trait Coords {
    fn coords(&self) -> [f64; 3];
}

impl Coords for Point3 {
    fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Coords for Vector3<f64> {
    fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Coords for [f64; 3] {
    fn coords(&self) -> [f64; 3] {
        *self
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    coords: Vec<[f64; 3]>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    d2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

impl KdTree {
    pub fn build(cloud: &PointCloud) -> KdTree {
        KdTree::from_coords(cloud.points.iter().map(Coords::coords).collect())
    }

    pub fn from_positions(points: &[Vector3<f64>]) -> KdTree {
        KdTree::from_coords(points.iter().map(Coords::coords).collect())
    }

    pub fn from_coords(coords: Vec<[f64; 3]>) -> KdTree {
        let mut tree = KdTree {
            order: (0..coords.len()).collect(),
            coords,
            nodes: Vec::new(),
        };
        if !tree.coords.is_empty() {
            tree.build_node(0, tree.coords.len());
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        if axis.is_none() {
            // all coincident
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = axis.unwrap();
        let mid = start + (end - start) / 2;
        let coords = &self.coords;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a][axis]
                .total_cmp(&coords[b][axis])
                .then(a.cmp(&b))
        });
        let value = self.coords[self.order[mid]][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, start: usize, end: usize) -> Option<usize> {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.order[start..end] {
            for a in 0..3 {
                lo[a] = lo[a].min(self.coords[i][a]);
                hi[a] = hi[a].max(self.coords[i][a]);
            }
        }
        let (axis, spread) = (0..3)
            .map(|a| (a, hi[a] - lo[a]))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        (spread > 0.0).then_some(axis)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The `k` nearest points sorted by `(distance, index)`.
    ///
    /// Returns every point when `k` exceeds the point count.
    pub fn knn(&self, query: &impl Coords, k: usize) -> Vec<Neighbor> {
        if k == 0 || self.coords.is_empty() {
            return Vec::new();
        }
        let q = query.coords();
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.knn_node(0, &q, k, &mut heap);
        finish(heap.into_vec())
    }

    fn knn_node(&self, node: usize, q: &[f64; 3], k: usize, heap: &mut BinaryHeap<Candidate>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &index in &self.order[start..end] {
                    let c = Candidate {
                        d2: dist2(&self.coords[index], q),
                        index,
                    };
                    if heap.len() < k {
                        heap.push(c);
                    } else if c < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(c);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.knn_node(near, q, k, heap);
                // equal distances must still be visited for the index tie-break
                if heap.len() < k || diff * diff <= heap.peek().unwrap().d2 {
                    self.knn_node(far, q, k, heap);
                }
            }
        }
    }

    /// Every point within `radius` (inclusive), sorted by `(distance, index)`.
    pub fn radius_query(&self, query: &impl Coords, radius: f64) -> Vec<Neighbor> {
        if self.coords.is_empty() || !(radius >= 0.0) {
            return Vec::new();
        }
        let q = query.coords();
        let r2 = radius * radius;
        let mut hits = Vec::new();
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &index in &self.order[start..end] {
                        let d2 = dist2(&self.coords[index], &q);
                        if d2 <= r2 {
                            hits.push(Candidate { d2, index });
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let diff = q[axis] - value;
                    if diff <= 0.0 || diff * diff <= r2 {
                        stack.push(left);
                    }
                    if diff >= 0.0 || diff * diff <= r2 {
                        stack.push(right);
                    }
                }
            }
        }
        finish(hits)
    }
}

fn finish(mut hits: Vec<Candidate>) -> Vec<Neighbor> {
    hits.sort_unstable();
    hits.into_iter()
        .map(|c| Neighbor {
            index: c.index,
            distance: c.d2.sqrt(),
        })
        .collect()
}
