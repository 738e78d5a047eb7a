//! Arrangements of line segments in the plane.

use std::collections::HashSet;

use log::debug;
use rayon::prelude::*;

use crate::chain::SignedOperator;
use crate::cluster::cluster_points;
use crate::error::{Error, Result};
use crate::geom::{orient2d, project_to_segment, Point2};
use crate::index::IntervalTree;
use crate::lar::{ChainComplexResult, GeometricComplex};
use crate::shells::wrap_top_cells;
use crate::tgw::SeedPolicy;

pub type Segment = [Point2; 2];

/// Validated input segments.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    segments: Vec<Segment>,
    dropped: usize,
}

impl SegmentSet {
    /// Drops zero-length segments and exact duplicates (in either direction).
    pub fn new(raw: Vec<Segment>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut segments = Vec::with_capacity(raw.len());
        let mut dropped = 0;
        for (k, s) in raw.into_iter().enumerate() {
            if s.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::Validation(format!(
                    "segment {k} has a non-finite coordinate"
                )));
            }
            let key = |p: Point2| (p[0].to_bits(), p[1].to_bits());
            let (a, b) = (key(s[0]), key(s[1]));
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                dropped += 1;
                continue;
            }
            segments.push(s);
        }
        if dropped > 0 {
            debug!("dropped {dropped} zero-length or duplicate segments");
        }
        Ok(Self { segments, dropped })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let pts: Vec<[f64; 3]> = self
            .segments
            .iter()
            .flatten()
            .map(|p| [p[0], p[1], 0.0])
            .collect();
        crate::geom::bbox_diagonal(&pts)
    }

    /// Snap tolerance relative to the bounding-box diagonal.
    pub fn tolerance(&self, relative: f64) -> f64 {
        let d = self.bbox_diagonal();
        relative * if d > 0.0 { d } else { 1.0 }
    }
}

/// Vertices and edges meeting only at shared endpoints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanarGraph {
    pub verts: Vec<Point2>,
    pub ev: Vec<[usize; 2]>,
}

impl PlanarGraph {
    /// Keeps the listed edges and the vertices they use, preserving order.
    pub fn subgraph(&self, edges: &[usize]) -> PlanarGraph {
        let mut keep = vec![false; self.verts.len()];
        for &e in edges {
            keep[self.ev[e][0]] = true;
            keep[self.ev[e][1]] = true;
        }
        let mut remap = vec![usize::MAX; self.verts.len()];
        let mut verts = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                remap[v] = verts.len();
                verts.push(self.verts[v]);
            }
        }
        let ev = edges
            .iter()
            .map(|&e| [remap[self.ev[e][0]], remap[self.ev[e][1]]])
            .collect();
        PlanarGraph { verts, ev }
    }
}

/// How candidate segment pairs are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSearch {
    BruteForce,
    IntervalTree,
}

fn candidate_pairs(segs: &[Segment], eps: f64, search: PairSearch) -> Vec<(usize, usize)> {
    let boxes: Vec<[[f64; 2]; 2]> = segs
        .iter()
        .map(|s| {
            [
                [s[0][0].min(s[1][0]) - eps, s[0][0].max(s[1][0]) + eps],
                [s[0][1].min(s[1][1]) - eps, s[0][1].max(s[1][1]) + eps],
            ]
        })
        .collect();
    let overlap = |i: usize, j: usize| {
        (0..2).all(|k| boxes[i][k][0] <= boxes[j][k][1] && boxes[j][k][0] <= boxes[i][k][1])
    };
    match search {
        PairSearch::BruteForce => (0..segs.len())
            .flat_map(|i| (i + 1..segs.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| overlap(i, j))
            .collect(),
        PairSearch::IntervalTree => {
            let xs: Vec<(f64, f64)> = boxes.iter().map(|b| (b[0][0], b[0][1])).collect();
            let tree = IntervalTree::new(&xs);
            (0..segs.len())
                .into_par_iter()
                .flat_map_iter(|i| {
                    tree.query(xs[i].0, xs[i].1)
                        .into_iter()
                        .filter(move |&j| j > i && overlap(i, j))
                        .map(move |j| (i, j))
                })
                .collect()
        }
    }
}

/// Split points `(segment, parameter, point)` contributed by one pair.
fn pair_splits(
    i: usize,
    j: usize,
    s: &Segment,
    r: &Segment,
    eps: f64,
) -> Vec<(usize, f64, Point2)> {
    let mut out = Vec::new();
    for (p, other, host) in [(s[0], r, j), (s[1], r, j), (r[0], s, i), (r[1], s, i)] {
        let (t, d) = project_to_segment(p, other[0], other[1]);
        if d <= eps {
            out.push((host, t, p));
        }
    }
    let (a, b, c, d) = (s[0], s[1], r[0], r[1]);
    let sgn = |v: f64| v.partial_cmp(&0.0).map_or(0, |o| o as i8);
    let (o1, o2) = (sgn(orient2d(a, b, c)), sgn(orient2d(a, b, d)));
    let (o3, o4) = (sgn(orient2d(c, d, a)), sgn(orient2d(c, d, b)));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        let (ux, uy) = (b[0] - a[0], b[1] - a[1]);
        let (vx, vy) = (d[0] - c[0], d[1] - c[1]);
        let (wx, wy) = (c[0] - a[0], c[1] - a[1]);
        let den = ux * vy - uy * vx;
        let t = ((wx * vy - wy * vx) / den).clamp(0.0, 1.0);
        let u = ((wx * uy - wy * ux) / den).clamp(0.0, 1.0);
        let p = [a[0] + t * ux, a[1] + t * uy];
        out.push((i, t, p));
        out.push((j, u, p));
    }
    out
}

/// Subdivides the segments at every pairwise intersection and snaps points
/// closer than `eps` to their cluster centroid.
pub fn intersect_segments(s: &SegmentSet, eps: f64) -> PlanarGraph {
    intersect_segments_with(s, eps, PairSearch::IntervalTree)
}

pub fn intersect_segments_with(s: &SegmentSet, eps: f64, search: PairSearch) -> PlanarGraph {
    let segs = s.segments();
    let pairs = candidate_pairs(segs, eps, search);
    let splits: Vec<Vec<(usize, f64, Point2)>> = pairs
        .par_iter()
        .map(|&(i, j)| pair_splits(i, j, &segs[i], &segs[j], eps))
        .collect();
    let mut points: Vec<Point2> = Vec::with_capacity(2 * segs.len());
    let mut along: Vec<Vec<(f64, usize)>> = Vec::with_capacity(segs.len());
    for (k, seg) in segs.iter().enumerate() {
        along.push(vec![(0.0, 2 * k), (1.0, 2 * k + 1)]);
        points.push(seg[0]);
        points.push(seg[1]);
    }
    for (host, t, p) in splits.into_iter().flatten() {
        along[host].push((t, points.len()));
        points.push(p);
    }
    let clusters = cluster_points(&points, eps);
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for list in &mut along {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut prev: Option<usize> = None;
        for &(_, p) in list.iter() {
            let v = clusters.labels[p];
            if let Some(u) = prev {
                if u != v {
                    edges.push([u.min(v), u.max(v)]);
                }
            }
            prev = Some(v);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let graph = PlanarGraph {
        verts: clusters.centroids,
        ev: edges,
    };
    let all: Vec<usize> = (0..graph.ev.len()).collect();
    let out = graph.subgraph(&all);
    debug!(
        "intersection: {} segments -> {} vertices, {} edges",
        segs.len(),
        out.verts.len(),
        out.ev.len()
    );
    out
}

/// Edge sets of all biconnected components (bridges form singleton sets).
pub fn biconnected_components(n_verts: usize, ev: &[[usize; 2]]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_verts];
    for (e, &[a, b]) in ev.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n_verts];
    let mut low = vec![0usize; n_verts];
    let mut time = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    struct Frame {
        v: usize,
        via: usize,
        next: usize,
    }
    for root in 0..n_verts {
        if disc[root] != UNSEEN || adj[root].is_empty() {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut calls = vec![Frame {
            v: root,
            via: usize::MAX,
            next: 0,
        }];
        while let Some(top) = calls.last_mut() {
            let v = top.v;
            if top.next < adj[v].len() {
                let (w, e) = adj[v][top.next];
                top.next += 1;
                if e == top.via {
                    continue;
                }
                if disc[w] == UNSEEN {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    calls.push(Frame {
                        v: w,
                        via: e,
                        next: 0,
                    });
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                let done = calls.pop().expect("non-empty");
                if let Some(parent) = calls.last() {
                    let u = parent.v;
                    low[u] = low[u].min(low[done.v]);
                    if low[done.v] >= disc[u] {
                        let mut comp = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            comp.push(e);
                            if e == done.via {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Maximal 2-connected subgraphs; bridges and pendant trees are discarded.
pub fn biconnected_filter(g: &PlanarGraph) -> Vec<PlanarGraph> {
    biconnected_components(g.verts.len(), &g.ev)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| g.subgraph(&c))
        .collect()
}

/// Union of all 2-connected components as one graph.
pub fn regularize(g: &PlanarGraph) -> PlanarGraph {
    let mut keep: Vec<usize> = biconnected_components(g.verts.len(), &g.ev)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .flatten()
        .collect();
    keep.sort_unstable();
    g.subgraph(&keep)
}

/// Full planar chain complex of the arrangement induced by `s`.
pub fn arrangement2d(s: &SegmentSet, eps: f64) -> Result<ChainComplexResult> {
    arrangement2d_with(s, eps, SeedPolicy::LowestIndex)
}

pub fn arrangement2d_with(
    s: &SegmentSet,
    eps: f64,
    policy: SeedPolicy,
) -> Result<ChainComplexResult> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::Validation(format!(
            "snap tolerance must be positive, got {eps}"
        )));
    }
    let graph = regularize(&intersect_segments(s, eps));
    complex_from_graph(&graph, policy)
}

/// Wraps the faces of an already regular planar graph.
pub fn complex_from_graph(graph: &PlanarGraph, policy: SeedPolicy) -> Result<ChainComplexResult> {
    if graph.ev.is_empty() {
        return Err(Error::EmptyArrangement);
    }
    let skeleton = GeometricComplex::planar(&graph.verts, graph.ev.clone(), Vec::new())?;
    let d1 = skeleton.signed_boundary_1()?;
    let top = wrap_top_cells(&skeleton, &d1, policy)?;
    if top.boundary.cols() == 0 {
        return Err(Error::EmptyArrangement);
    }
    let fv = vertex_supports(&top.boundary, &graph.ev);
    let complex = GeometricComplex::planar(&graph.verts, graph.ev.clone(), fv)?;
    Ok(ChainComplexResult {
        complex,
        boundaries: vec![d1, top.boundary],
        outer: top.outer,
    })
}

/// Vertex set of every column of a face-by-edge operator.
pub fn vertex_supports(op: &SignedOperator, ev: &[[usize; 2]]) -> Vec<Vec<usize>> {
    (0..op.cols())
        .map(|j| {
            let mut vs: Vec<usize> = op.column_rows(j).iter().flat_map(|&e| ev[e]).collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .collect()
}
