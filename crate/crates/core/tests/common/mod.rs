//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use arrangement::geom::Point2;
use arrangement::SignedOperator;

/// Dense integer product `a · bᵗ` of two 0/1 row lists.
pub fn dense_product_transposed(a: &[Vec<usize>], b: &[Vec<usize>], cols: usize) -> Vec<Vec<i64>> {
    let dense = |rows: &[Vec<usize>]| -> Vec<Vec<i64>> {
        rows.iter()
            .map(|r| {
                let mut v = vec![0i64; cols];
                for &c in r {
                    v[c] = 1;
                }
                v
            })
            .collect()
    };
    let (a, b) = (dense(a), dense(b));
    a.iter()
        .map(|x| {
            b.iter()
                .map(|y| x.iter().zip(y).map(|(p, q)| p * q).sum())
                .collect()
        })
        .collect()
}

/// Dense matrix-vector product over the integers.
pub fn dense_apply(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Component label of every vertex, ignoring `removed`; isolated or removed
/// vertices get their own label.
pub fn component_labels(n: usize, ev: &[[usize; 2]], removed: Option<usize>) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &[a, b] in ev {
        if Some(a) == removed || Some(b) == removed {
            continue;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Connected components among vertices that have at least one edge.
pub fn edge_components(n: usize, ev: &[[usize; 2]]) -> usize {
    let label = component_labels(n, ev, None);
    ev.iter()
        .map(|e| label[e[0]])
        .collect::<BTreeSet<_>>()
        .len()
}

/// Blocks by vertex deletion: two edges share a block when they are
/// connected and no single vertex removal separates what is left of them.
pub fn blocks_by_vertex_removal(n: usize, ev: &[[usize; 2]]) -> Vec<Vec<usize>> {
    let whole = component_labels(n, ev, None);
    let without: Vec<Vec<usize>> = (0..n).map(|v| component_labels(n, ev, Some(v))).collect();
    let same_block = |e: usize, f: usize| {
        if whole[ev[e][0]] != whole[ev[f][0]] {
            return false;
        }
        (0..n).all(|v| {
            let left: Vec<usize> = ev[e].iter().copied().filter(|&x| x != v).collect();
            let right: Vec<usize> = ev[f].iter().copied().filter(|&x| x != v).collect();
            left.iter()
                .all(|&a| right.iter().all(|&b| without[v][a] == without[v][b]))
        })
    };
    let mut assigned = vec![false; ev.len()];
    let mut blocks = Vec::new();
    for e in 0..ev.len() {
        if assigned[e] {
            continue;
        }
        let block: Vec<usize> = (e..ev.len())
            .filter(|&f| !assigned[f] && (f == e || same_block(e, f)))
            .collect();
        for &f in &block {
            assigned[f] = true;
        }
        blocks.push(block);
    }
    blocks.sort();
    blocks
}

fn seg_point_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (qx * qx + qy * qy).sqrt()
}

/// Whether two closed segments meet, with a tiny distance allowance.
pub fn segments_meet(a: [Point2; 2], b: [Point2; 2], tol: f64) -> bool {
    let u = [a[1][0] - a[0][0], a[1][1] - a[0][1]];
    let v = [b[1][0] - b[0][0], b[1][1] - b[0][1]];
    let w = [b[0][0] - a[0][0], b[0][1] - a[0][1]];
    let den = u[0] * v[1] - u[1] * v[0];
    let scale = (u[0].hypot(u[1]) * v[0].hypot(v[1])).max(f64::MIN_POSITIVE);
    if den.abs() > 1e-9 * scale {
        let t = (w[0] * v[1] - w[1] * v[0]) / den;
        let s = (w[0] * u[1] - w[1] * u[0]) / den;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
            return true;
        }
    }
    seg_point_dist(a[0], b[0], b[1]) <= tol
        || seg_point_dist(a[1], b[0], b[1]) <= tol
        || seg_point_dist(b[0], a[0], a[1]) <= tol
        || seg_point_dist(b[1], a[0], a[1]) <= tol
}

/// First edge pair whose supports meet anywhere but a shared endpoint.
pub fn overlapping_edge_pair(
    verts: &[Point2],
    ev: &[[usize; 2]],
    tol: f64,
) -> Option<(usize, usize)> {
    let seg = |e: usize| [verts[ev[e][0]], verts[ev[e][1]]];
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            let shared: Vec<usize> = ev[i]
                .iter()
                .copied()
                .filter(|v| ev[j].contains(v))
                .collect();
            let bad = match shared.len() {
                0 => segments_meet(seg(i), seg(j), tol),
                1 => {
                    let s = shared[0];
                    let far_i = if ev[i][0] == s { ev[i][1] } else { ev[i][0] };
                    let far_j = if ev[j][0] == s { ev[j][1] } else { ev[j][0] };
                    seg_point_dist(verts[far_i], verts[ev[j][0]], verts[ev[j][1]]) <= tol
                        || seg_point_dist(verts[far_j], verts[ev[i][0]], verts[ev[i][1]]) <= tol
                }
                _ => true,
            };
            if bad {
                return Some((i, j));
            }
        }
    }
    None
}

/// Columns as sign-normalized entry lists (first entry positive), sorted.
pub fn columns_up_to_sign(op: &SignedOperator) -> Vec<Vec<(usize, i8)>> {
    let mut cols: Vec<Vec<(usize, i8)>> = (0..op.cols())
        .map(|j| {
            let col: Vec<(usize, i8)> = op.column(j).collect();
            let s = col.first().map_or(1, |e| e.1);
            col.into_iter().map(|(i, v)| (i, v * s)).collect()
        })
        .collect();
    cols.sort();
    cols
}

/// Axis-aligned square `[x, x+s] × [y, y+s]` with integer corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Square {
    pub x: i64,
    pub y: i64,
    pub s: i64,
}

impl Square {
    pub fn strictly_contains(&self, o: &Square) -> bool {
        self.x < o.x && self.y < o.y && o.x + o.s < self.x + self.s && o.y + o.s < self.y + self.s
    }

    pub fn apart(&self, o: &Square) -> bool {
        self.x + self.s < o.x || o.x + o.s < self.x || self.y + self.s < o.y || o.y + o.s < self.y
    }

    pub fn segments(&self) -> Vec<[Point2; 2]> {
        let (x0, y0, x1, y1) = (
            self.x as f64,
            self.y as f64,
            (self.x + self.s) as f64,
            (self.y + self.s) as f64,
        );
        vec![
            [[x0, y0], [x1, y0]],
            [[x1, y0], [x1, y1]],
            [[x1, y1], [x0, y1]],
            [[x0, y1], [x0, y0]],
        ]
    }

    pub fn on_boundary(&self, p: Point2) -> bool {
        self.segments()
            .iter()
            .any(|s| seg_point_dist(p, s[0], s[1]) < 1e-9)
    }
}

/// Keeps candidates whose boundaries stay clear of the ones already kept.
pub fn nested_squares(candidates: &[(i64, i64, i64)], limit: usize) -> Vec<Square> {
    let mut kept: Vec<Square> = Vec::new();
    for &(x, y, s) in candidates {
        let q = Square { x, y, s };
        if kept
            .iter()
            .all(|k| k.strictly_contains(&q) || q.strictly_contains(k) || k.apart(&q))
        {
            kept.push(q);
        }
        if kept.len() == limit {
            break;
        }
    }
    kept
}

/// Transitively reduced strict containment among squares.
pub fn containment_oracle(squares: &[Square]) -> Vec<(usize, usize)> {
    let n = squares.len();
    let c = |a: usize, b: usize| squares[a].strictly_contains(&squares[b]);
    let mut arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| c(a, b) && !(0..n).any(|k| c(a, k) && c(k, b)))
        .collect();
    arcs.sort_unstable();
    arcs
}
