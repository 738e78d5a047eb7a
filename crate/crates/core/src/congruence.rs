//! Gluing of per-face fragments into one complex by identifying congruent
//! vertices, edges and faces.

use std::collections::HashMap;

use log::debug;

use crate::chain::SignedOperator;
use crate::cluster::cluster_points;
use crate::error::{Error, Result};
use crate::fragment::FaceFragments;
use crate::geom::Point3;

/// Where every fragment cell landed in the quotient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuotientMap {
    /// Per fragment, the global vertex of each local vertex.
    pub vertex: Vec<Vec<usize>>,
    /// Per fragment, the global edge and relative sign of each local edge;
    /// `None` when the edge collapsed to a point.
    pub edge: Vec<Vec<Option<(usize, i8)>>>,
    /// Per fragment, the global face and relative sign of each local face;
    /// `None` when the face vanished.
    pub face: Vec<Vec<Option<(usize, i8)>>>,
}

/// Glued cells: vertices, edges and an oriented face-by-edge operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientComplex {
    pub verts: Vec<Point3>,
    pub ev: Vec<[usize; 2]>,
    pub faces: SignedOperator,
}

/// Identifies cells across fragments.
///
/// Vertices closer than `eps` are merged (transitively) and replaced by their
/// centroid; a merged group wider than `eps` is a [`Error::ToleranceCollision`].
/// Edges are keyed by their sorted endpoints and faces by their sorted edge
/// sets. The first face of a class keeps its orientation; every face is then
/// signed so that its lowest edge has coefficient `+1`.
pub fn quotient_complex(
    fragments: &[FaceFragments],
    eps: f64,
) -> Result<(QuotientComplex, QuotientMap)> {
    let points: Vec<Point3> = fragments
        .iter()
        .flat_map(|p| p.verts.iter().copied())
        .collect();
    let clusters = cluster_points(&points, eps);
    if clusters.max_diameter > eps {
        return Err(Error::ToleranceCollision {
            diameter: clusters.max_diameter,
            eps,
        });
    }
    let mut map = QuotientMap::default();
    let mut offset = 0;
    for p in fragments {
        map.vertex
            .push(clusters.labels[offset..offset + p.verts.len()].to_vec());
        offset += p.verts.len();
    }

    let mut edge_id: HashMap<[usize; 2], usize> = HashMap::new();
    let mut ev: Vec<[usize; 2]> = Vec::new();
    for (k, p) in fragments.iter().enumerate() {
        let edges =
            p.ev.iter()
                .map(|&[a, b]| {
                    let (u, v) = (map.vertex[k][a], map.vertex[k][b]);
                    if u == v {
                        return None;
                    }
                    let key = [u.min(v), u.max(v)];
                    let id = *edge_id.entry(key).or_insert_with(|| {
                        ev.push(key);
                        ev.len() - 1
                    });
                    Some((id, if u < v { 1 } else { -1 }))
                })
                .collect();
        map.edge.push(edges);
    }

    let mut face_id: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut columns: Vec<Vec<(usize, i8)>> = Vec::new();
    for (k, p) in fragments.iter().enumerate() {
        let mut faces = Vec::with_capacity(p.faces.len());
        for cycle in &p.faces {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(e, c) in cycle {
                if let Some((g, s)) = map.edge[k][e] {
                    *acc.entry(g).or_default() += i64::from(c * s);
                }
            }
            let mut column = Vec::with_capacity(acc.len());
            for (g, c) in acc {
                match c {
                    0 => {}
                    1 | -1 => column.push((g, c as i8)),
                    _ => {
                        return Err(Error::DegenerateGeometry(format!(
                            "fragment of face {} folds onto itself",
                            p.face
                        )))
                    }
                }
            }
            column.sort_unstable();
            if column.is_empty() {
                faces.push(None);
                continue;
            }
            let key: Vec<usize> = column.iter().map(|e| e.0).collect();
            let lead = column[0].1;
            let id = *face_id.entry(key).or_insert_with(|| {
                columns.push(column.iter().map(|&(e, c)| (e, c * lead)).collect());
                columns.len() - 1
            });
            faces.push(Some((id, lead)));
        }
        map.face.push(faces);
    }
    debug!(
        "congruence: {} points -> {} vertices, {} edges, {} faces",
        points.len(),
        clusters.centroids.len(),
        ev.len(),
        columns.len()
    );
    let faces = SignedOperator::boundary(2, ev.len(), columns)?;
    Ok((
        QuotientComplex {
            verts: clusters.centroids,
            ev,
            faces,
        },
        map,
    ))
}

/// Drops, until none is left, faces with an edge used by no other face, then
/// unused edges and vertices.
pub fn prune_open_faces(q: &QuotientComplex) -> Result<QuotientComplex> {
    let n_faces = q.faces.cols();
    let mut alive = vec![true; n_faces];
    let mut degree = vec![0usize; q.ev.len()];
    for f in 0..n_faces {
        for &e in q.faces.column_rows(f) {
            degree[e] += 1;
        }
    }
    let by_edge = q.faces.transpose();
    let mut stack: Vec<usize> = (0..q.ev.len()).filter(|&e| degree[e] == 1).collect();
    while let Some(e) = stack.pop() {
        for &f in by_edge.column_rows(e) {
            if !alive[f] {
                continue;
            }
            alive[f] = false;
            for &g in q.faces.column_rows(f) {
                degree[g] -= 1;
                if degree[g] == 1 {
                    stack.push(g);
                }
            }
        }
    }
    let mut used = vec![false; q.verts.len()];
    for e in (0..q.ev.len()).filter(|&e| degree[e] >= 2) {
        used[q.ev[e][0]] = true;
        used[q.ev[e][1]] = true;
    }
    let mut vmap = vec![usize::MAX; q.verts.len()];
    let mut verts = Vec::new();
    for v in (0..q.verts.len()).filter(|&v| used[v]) {
        vmap[v] = verts.len();
        verts.push(q.verts[v]);
    }
    // Monotone renumbering keeps every edge direction and column sign.
    let mut emap = vec![usize::MAX; q.ev.len()];
    let mut ev = Vec::new();
    for e in (0..q.ev.len()).filter(|&e| degree[e] >= 2) {
        emap[e] = ev.len();
        ev.push(q.ev[e].map(|v| vmap[v]));
    }
    let columns: Vec<Vec<(usize, i8)>> = (0..n_faces)
        .filter(|&f| alive[f])
        .map(|f| q.faces.column(f).map(|(e, c)| (emap[e], c)).collect())
        .collect();
    let removed = n_faces - columns.len();
    if removed > 0 {
        debug!("pruned {removed} faces with free edges");
    }
    let faces = SignedOperator::boundary(2, ev.len(), columns)?;
    Ok(QuotientComplex { verts, ev, faces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(offset: f64, flip: bool) -> FaceFragments {
        let verts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [offset, 1.0, 0.0],
        ];
        let ev = vec![[0, 1], [1, 2], [2, 3], [3, 0]];
        let s = if flip { -1 } else { 1 };
        FaceFragments {
            face: 0,
            verts,
            ev,
            faces: vec![vec![(0, s), (1, s), (2, s), (3, s)]],
        }
    }

    #[test]
    fn duplicate_faces_merge() {
        let (q, map) = quotient_complex(&[square(0.0, false), square(1e-12, true)], 1e-9).unwrap();
        assert_eq!(q.verts.len(), 4);
        assert_eq!(q.ev.len(), 4);
        assert_eq!(q.faces.cols(), 1);
        assert_eq!(map.face[0][0].unwrap().0, map.face[1][0].unwrap().0);
        assert_eq!(map.face[0][0].unwrap().1, -map.face[1][0].unwrap().1);
        assert_eq!(q.faces.column(0).next().unwrap().1, 1);
    }

    #[test]
    fn wide_cluster_is_rejected() {
        let mut frag = square(0.0, false);
        frag.verts.push([0.0, 0.0, 6e-10]);
        frag.verts.push([0.0, 0.0, 1.2e-9]);
        let err = quotient_complex(&[frag], 1e-9).unwrap_err();
        assert!(matches!(err, Error::ToleranceCollision { .. }));
    }

    #[test]
    fn open_faces_are_pruned() {
        let (q, _) = quotient_complex(&[square(0.0, false)], 1e-9).unwrap();
        let p = prune_open_faces(&q).unwrap();
        assert_eq!(p.faces.cols(), 0);
        assert!(p.ev.is_empty() && p.verts.is_empty());
    }
}
