//! Static interval trees and the three-axis box index built on them.

/// Centered interval tree over closed intervals, built once.
#[derive(Debug, Clone, Default)]
pub struct IntervalTree {
    nodes: Vec<Node>,
    root: Option<usize>,
}

#[derive(Debug, Clone)]
struct Node {
    center: f64,
    /// Intervals straddling `center`, ascending by low end.
    by_lo: Vec<(f64, usize)>,
    /// Same intervals, descending by high end.
    by_hi: Vec<(f64, usize)>,
    left: Option<usize>,
    right: Option<usize>,
}

impl IntervalTree {
    /// Intervals are `(lo, hi)` with `lo <= hi`; ids are their positions.
    pub fn new(intervals: &[(f64, f64)]) -> Self {
        let mut tree = Self::default();
        let ids: Vec<usize> = (0..intervals.len()).collect();
        tree.root = tree.build(intervals, ids);
        tree
    }

    fn build(&mut self, iv: &[(f64, f64)], ids: Vec<usize>) -> Option<usize> {
        if ids.is_empty() {
            return None;
        }
        let mut mids: Vec<f64> = ids.iter().map(|&i| 0.5 * (iv[i].0 + iv[i].1)).collect();
        let k = mids.len() / 2;
        let center = *mids.select_nth_unstable_by(k, f64::total_cmp).1;
        let (mut here, mut left, mut right) = (Vec::new(), Vec::new(), Vec::new());
        for i in ids {
            if iv[i].1 < center {
                left.push(i);
            } else if iv[i].0 > center {
                right.push(i);
            } else {
                here.push(i);
            }
        }
        let mut by_lo: Vec<(f64, usize)> = here.iter().map(|&i| (iv[i].0, i)).collect();
        by_lo.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut by_hi: Vec<(f64, usize)> = here.iter().map(|&i| (iv[i].1, i)).collect();
        by_hi.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let slot = self.nodes.len();
        self.nodes.push(Node {
            center,
            by_lo,
            by_hi,
            left: None,
            right: None,
        });
        let l = self.build(iv, left);
        let r = self.build(iv, right);
        self.nodes[slot].left = l;
        self.nodes[slot].right = r;
        Some(slot)
    }

    /// Ids of all intervals meeting `[lo, hi]`, sorted ascending.
    pub fn query(&self, lo: f64, hi: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if hi < node.center {
                out.extend(node.by_lo.iter().take_while(|e| e.0 <= hi).map(|e| e.1));
                stack.extend(node.left);
            } else if lo > node.center {
                out.extend(node.by_hi.iter().take_while(|e| e.0 >= lo).map(|e| e.1));
                stack.extend(node.right);
            } else {
                out.extend(node.by_lo.iter().map(|e| e.1));
                stack.extend(node.left);
                stack.extend(node.right);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Axis-aligned box as `[[xmin, xmax], [ymin, ymax], [zmin, zmax]]`.
pub type Aabb = [[f64; 2]; 3];

pub fn boxes_overlap(a: &Aabb, b: &Aabb) -> bool {
    (0..3).all(|k| a[k][0] <= b[k][1] && b[k][0] <= a[k][1])
}

/// Three per-axis interval trees; a box query intersects their answers.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    boxes: Vec<Aabb>,
    axes: [IntervalTree; 3],
}

impl SpatialIndex {
    pub fn new(boxes: Vec<Aabb>) -> Self {
        let axis = |k: usize| {
            let iv: Vec<(f64, f64)> = boxes.iter().map(|b| (b[k][0], b[k][1])).collect();
            IntervalTree::new(&iv)
        };
        let axes = [axis(0), axis(1), axis(2)];
        Self { boxes, axes }
    }

    pub fn boxes(&self) -> &[Aabb] {
        &self.boxes
    }

    /// Ids whose boxes overlap `query` on every axis, sorted.
    pub fn query(&self, query: &Aabb) -> Vec<usize> {
        let x = self.axes[0].query(query[0][0], query[0][1]);
        let y = self.axes[1].query(query[1][0], query[1][1]);
        let z = self.axes[2].query(query[2][0], query[2][1]);
        intersect_sorted(&intersect_sorted(&x, &y), &z)
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Faces whose boxes overlap face `face`'s box, `face` itself excluded.
pub fn potential_intersections(face: usize, index: &SpatialIndex) -> Vec<usize> {
    let mut hits = index.query(&index.boxes[face]);
    hits.retain(|&f| f != face);
    hits
}
