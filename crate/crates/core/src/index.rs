//! Exact spatial index for ε-ball and nearest-neighbor queries.
//!
//! A kd-tree with bucketed leaves. Every query is exact: radius queries
//! return the same set as a linear scan, which the δ-net diagnostics and
//! the error-bound checks depend on.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Kd-tree over a set of points stored row-major.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    dim: usize,
    points: Vec<f64>,
    // Leaves refer to contiguous ranges of this permutation.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

/// A neighbor returned by an index query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub index: usize,
    pub distance: f64,
}

/// Builds an index over `points` (row-major, `dim` values per point).
///
/// Panics if `dim` is zero or the slice length is not a multiple of `dim`.
pub fn build_index(points: &[f64], dim: usize) -> SpatialIndex {
    SpatialIndex::new(points.to_vec(), dim)
}

impl SpatialIndex {
    pub fn new(points: Vec<f64>, dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        assert_eq!(points.len() % dim, 0, "ragged point buffer");
        let n = points.len() / dim;
        let mut index = SpatialIndex {
            dim,
            points,
            order: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n > 0 {
            index.build(0, n);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let dim = self.widest_dim(start, end);
        let mid = start + (end - start) / 2;
        {
            let (points, d) = (&self.points, self.dim);
            self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                points[a * d + dim]
                    .total_cmp(&points[b * d + dim])
                    .then(a.cmp(&b))
            });
        }
        let value = self.points[self.order[mid] * self.dim + dim];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    fn widest_dim(&self, start: usize, end: usize) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for k in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.order[start..end] {
                let v = self.points[i * self.dim + k];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > best.1 {
                best = (k, hi - lo);
            }
        }
        best.0
    }

    /// All points with `‖q − x‖ ≤ radius`, in unspecified order.
    pub fn within_radius(&self, query: &[f64], radius: f64) -> Vec<Hit> {
        assert_eq!(query.len(), self.dim, "query dimension mismatch");
        let mut out = Vec::new();
        if self.nodes.is_empty() || !(radius >= 0.0) {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                Node::Leaf { start, end } => {
                    for &i in &self.order[start..end] {
                        // Compare on the rooted value so the result matches a
                        // scan that tests `distance <= radius`.
                        let distance = squared_distance(query, self.point(i)).sqrt();
                        if distance <= radius {
                            out.push(Hit { index: i, distance });
                        }
                    }
                }
                Node::Split {
                    dim,
                    value,
                    left,
                    right,
                } => {
                    let diff = query[dim] - value;
                    if diff <= radius {
                        stack.push(left);
                    }
                    if -diff <= radius {
                        stack.push(right);
                    }
                }
            }
        }
        out
    }

    /// The `k` nearest points, ascending by distance with ties broken by index.
    pub fn nearest(&self, query: &[f64], k: usize) -> Vec<Hit> {
        assert_eq!(query.len(), self.dim, "query dimension mismatch");
        if k == 0 || self.nodes.is_empty() {
            return Vec::new();
        }
        let mut heap: BinaryHeap<HeapHit> = BinaryHeap::with_capacity(k + 1);
        self.nearest_rec(0, query, k, &mut heap);
        let mut hits: Vec<Hit> = heap
            .into_iter()
            .map(|h| Hit {
                index: h.index,
                distance: h.d2.sqrt(),
            })
            .collect();
        sort_hits(&mut hits);
        hits
    }

    fn nearest_rec(&self, id: usize, query: &[f64], k: usize, heap: &mut BinaryHeap<HeapHit>) {
        match self.nodes[id] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let cand = HeapHit {
                        d2: squared_distance(query, self.point(i)),
                        index: i,
                    };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = query[dim] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.nearest_rec(near, query, k, heap);
                let worst = heap.peek().map_or(f64::INFINITY, |h| h.d2);
                if heap.len() < k || diff * diff <= worst {
                    self.nearest_rec(far, query, k, heap);
                }
            }
        }
    }

    /// Distance to the nearest indexed point.
    pub fn nearest_distance(&self, query: &[f64]) -> Option<f64> {
        self.nearest(query, 1).first().map(|h| h.distance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapHit {
    d2: f64,
    index: usize,
}

impl Eq for HeapHit {}

impl Ord for HeapHit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for HeapHit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorts ascending by distance, then by index.
pub fn sort_hits(hits: &mut [Hit]) {
    hits.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.index.cmp(&b.index))
    });
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Empirical δ of a δ-net: the largest distance from any probe point to its
/// nearest training point.
///
/// `training` and `probes` are row-major with `dim` values per point. This is
/// a diagnostic over a finite probe set, not a certified bound.
pub fn covering_radius(training: &[f64], probes: &[f64], dim: usize) -> f64 {
    let index = build_index(training, dim);
    probes
        .chunks_exact(dim)
        .filter_map(|p| index.nearest_distance(p))
        .fold(0.0, f64::max)
}
