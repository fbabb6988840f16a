//! Static 3D KD-tree over a point cloud.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::Point3;

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Point3>,
    ids: Vec<u32>,
    nodes: Vec<Node>,
}

/// Max-heap entry ordered by (squared distance, id).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    d2: f64,
    id: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    /// Builds the tree; the id of a point is its index in `points`.
    pub fn build(points: &[Point3]) -> Self {
        assert!(points.len() < u32::MAX as usize, "too many points for a u32-indexed tree");
        let mut ids: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1);
        if !points.is_empty() {
            build_node(points, &mut ids, 0, &mut nodes);
        }
        let ordered = ids.iter().map(|&i| points[i as usize]).collect();
        Self {
            points: ordered,
            ids,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `count` nearest points as `(squared distance, id)`, ascending by
    /// distance then id.
    pub fn nearest(&self, query: &Point3, count: usize) -> Vec<(f64, u32)> {
        if count == 0 || self.is_empty() {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(count + 1);
        self.knn_rec(0, query, count, &mut heap);
        let mut out: Vec<(f64, u32)> = heap.into_iter().map(|c| (c.d2, c.id)).collect();
        out.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    fn knn_rec(&self, node: usize, q: &Point3, count: usize, heap: &mut BinaryHeap<Candidate>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for i in start as usize..end as usize {
                    let c = Candidate {
                        d2: self.points[i].dist2(q),
                        id: self.ids[i],
                    };
                    if heap.len() < count {
                        heap.push(c);
                    } else if c < *heap.peek().expect("full heap") {
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
                let diff = q.coord(axis as usize) - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.knn_rec(near as usize, q, count, heap);
                let worst = if heap.len() < count {
                    f64::INFINITY
                } else {
                    heap.peek().expect("full heap").d2
                };
                if diff * diff <= worst {
                    self.knn_rec(far as usize, q, count, heap);
                }
            }
        }
    }

    /// Calls `visit(id, squared distance)` for every point within `radius`
    /// (inclusive), in tree order.
    pub fn within<F: FnMut(u32, f64)>(&self, query: &Point3, radius: f64, mut visit: F) {
        if self.is_empty() || radius < 0.0 {
            return;
        }
        let r2 = radius * radius;
        let mut stack = vec![0u32];
        while let Some(node) = stack.pop() {
            match self.nodes[node as usize] {
                Node::Leaf { start, end } => {
                    for i in start as usize..end as usize {
                        let d2 = self.points[i].dist2(query);
                        if d2 <= r2 {
                            visit(self.ids[i], d2);
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let diff = query.coord(axis as usize) - value;
                    if diff <= 0.0 {
                        stack.push(left);
                        if diff * diff <= r2 {
                            stack.push(right);
                        }
                    } else {
                        stack.push(right);
                        if diff * diff <= r2 {
                            stack.push(left);
                        }
                    }
                }
            }
        }
    }

    /// Approximate heap footprint in bytes.
    pub fn memory_bytes(&self) -> usize {
        self.points.len() * std::mem::size_of::<Point3>()
            + self.ids.len() * 4
            + self.nodes.len() * std::mem::size_of::<Node>()
    }
}

fn build_node(points: &[Point3], ids: &mut [u32], offset: usize, nodes: &mut Vec<Node>) -> u32 {
    let me = nodes.len() as u32;
    if ids.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset as u32,
            end: (offset + ids.len()) as u32,
        });
        return me;
    }
    let mut lo = points[ids[0] as usize];
    let mut hi = lo;
    for &i in ids.iter() {
        lo = lo.min(&points[i as usize]);
        hi = hi.max(&points[i as usize]);
    }
    let spread = hi - lo;
    let axis = if spread.x >= spread.y && spread.x >= spread.z {
        0
    } else if spread.y >= spread.z {
        1
    } else {
        2
    };
    let mid = ids.len() / 2;
    ids.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize]
            .coord(axis)
            .total_cmp(&points[b as usize].coord(axis))
            .then(a.cmp(&b))
    });
    let value = points[ids[mid] as usize].coord(axis);
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (left_ids, right_ids) = ids.split_at_mut(mid);
    let left = build_node(points, left_ids, offset, nodes);
    let right = build_node(points, right_ids, offset + mid, nodes);
    nodes[me as usize] = Node::Split {
        axis: axis as u8,
        value,
        left,
        right,
    };
    me
}
