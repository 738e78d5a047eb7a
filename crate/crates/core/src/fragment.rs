//! Fragmentation of every planar face of a polygon collection against the
//! faces it may meet.

use log::debug;
use nalgebra::{Rotation3, Unit, Vector3};
use rayon::prelude::*;

use crate::chain::SignedOperator;
use crate::error::{Error, Result};
use crate::geom::{
    bbox_diagonal, dist2d, inside_segments, normalize, project_to_segment, Point2, Point3,
};
use crate::index::{potential_intersections, Aabb, SpatialIndex};
use crate::lar::{vector_area, GeometricComplex};
use crate::planar::{arrangement2d, Segment, SegmentSet};

/// Polygons in space with an explicit oriented face-by-edge operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSoup {
    pub verts: Vec<Point3>,
    pub ev: Vec<[usize; 2]>,
    pub faces: SignedOperator,
}

impl FaceSoup {
    pub fn from_complex(g: &GeometricComplex) -> Result<Self> {
        Ok(Self {
            verts: g.verts().to_vec(),
            ev: g.ev().to_vec(),
            faces: g.oriented_face_boundary()?,
        })
    }

    pub fn face_count(&self) -> usize {
        self.faces.cols()
    }

    pub fn face_points(&self, f: usize) -> Vec<Point3> {
        let mut vs: Vec<usize> = self
            .faces
            .column_rows(f)
            .iter()
            .flat_map(|&e| self.ev[e])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs.iter().map(|&v| self.verts[v]).collect()
    }

    pub fn face_box(&self, f: usize) -> Aabb {
        let mut b = [[f64::INFINITY, f64::NEG_INFINITY]; 3];
        for p in self.face_points(f) {
            for k in 0..3 {
                b[k][0] = b[k][0].min(p[k]);
                b[k][1] = b[k][1].max(p[k]);
            }
        }
        b
    }

    pub fn index(&self) -> SpatialIndex {
        SpatialIndex::new((0..self.face_count()).map(|f| self.face_box(f)).collect())
    }
}

/// Rigid map taking a face's plane to `z = 0` with the face normal on `+z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    rotation: Rotation3<f64>,
    origin: Vector3<f64>,
}

impl AffineMap {
    pub fn new(normal: Point3, origin: Point3) -> Result<Self> {
        let n = Vector3::from(
            normalize(normal).ok_or_else(|| Error::DegenerateGeometry("zero normal".into()))?,
        );
        let z = Vector3::z();
        let rotation = Rotation3::rotation_between(&n, &z).unwrap_or_else(|| {
            Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::x()), std::f64::consts::PI)
        });
        Ok(Self {
            rotation,
            origin: Vector3::from(origin),
        })
    }

    /// Map for face `f` of `soup`; fails when the face is not planar within `tol`.
    pub fn for_face(soup: &FaceSoup, f: usize, tol: f64) -> Result<Self> {
        let normal = vector_area(soup.faces.column(f), &soup.verts, &soup.ev);
        let pts = soup.face_points(f);
        let mut c = [0.0; 3];
        for p in &pts {
            for k in 0..3 {
                c[k] += p[k] / pts.len() as f64;
            }
        }
        let map = Self::new(normal, c).map_err(|_| Error::NonPlanarFace(f))?;
        if pts.iter().any(|&p| map.apply(p)[2].abs() > tol) {
            return Err(Error::NonPlanarFace(f));
        }
        Ok(map)
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        (self.rotation * (Vector3::from(p) - self.origin)).into()
    }

    pub fn invert(&self, q: Point3) -> Point3 {
        (self.rotation.inverse() * Vector3::from(q) + self.origin).into()
    }
}

/// Cuts a polygon, given by its edges in local coordinates, with `z = 0`.
///
/// Heights within `tol` count as positive; edges lying in the plane are
/// returned as they are. Crossing points are paired along the cut line.
pub fn slice_face(edges: &[(Point3, Point3)], tol: f64) -> Vec<Segment> {
    let flat = |p: Point3| -> Point2 { [p[0], p[1]] };
    let on = |z: f64| z.abs() <= tol;
    let mut out = Vec::new();
    let mut cuts: Vec<Point2> = Vec::new();
    for &(a, b) in edges {
        if on(a[2]) && on(b[2]) {
            out.push([flat(a), flat(b)]);
            continue;
        }
        let (sa, sb) = (on(a[2]) || a[2] > 0.0, on(b[2]) || b[2] > 0.0);
        if sa == sb {
            continue;
        }
        let p = if on(a[2]) {
            flat(a)
        } else if on(b[2]) {
            flat(b)
        } else {
            let t = a[2] / (a[2] - b[2]);
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        };
        cuts.push(p);
    }
    if cuts.len() >= 2 {
        let p0 = cuts[0];
        let far = cuts
            .iter()
            .copied()
            .max_by(|a, b| dist2d(*a, p0).total_cmp(&dist2d(*b, p0)))
            .unwrap_or(p0);
        let d = [far[0] - p0[0], far[1] - p0[1]];
        let key = |p: &Point2| (p[0] - p0[0]) * d[0] + (p[1] - p0[1]) * d[1];
        cuts.sort_by(|a, b| key(a).total_cmp(&key(b)));
        for pair in cuts.chunks_exact(2) {
            if dist2d(pair[0], pair[1]) > tol {
                out.push([pair[0], pair[1]]);
            }
        }
    }
    out
}

/// Pieces of one input face: a small complex in space whose faces tile it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaceFragments {
    pub face: usize,
    pub verts: Vec<Point3>,
    pub ev: Vec<[usize; 2]>,
    /// Oriented edge cycles, coherent with the input face's orientation.
    pub faces: Vec<Vec<(usize, i8)>>,
}

/// Splits face `f` by every candidate face and keeps the pieces inside it.
pub fn fragment_face(
    soup: &FaceSoup,
    f: usize,
    candidates: &[usize],
    eps: f64,
) -> Result<FaceFragments> {
    let map = AffineMap::for_face(soup, f, eps.max(1e-9 * bbox_diagonal(&soup.face_points(f))))?;
    let local = |v: usize| map.apply(soup.verts[v]);
    let boundary: Vec<(Point2, Point2)> = soup
        .faces
        .column_rows(f)
        .iter()
        .map(|&e| {
            let (a, b) = (local(soup.ev[e][0]), local(soup.ev[e][1]));
            ([a[0], a[1]], [b[0], b[1]])
        })
        .collect();
    let mut raw: Vec<Segment> = boundary.iter().map(|&(a, b)| [a, b]).collect();
    for &g in candidates {
        let edges: Vec<(Point3, Point3)> = soup
            .faces
            .column_rows(g)
            .iter()
            .map(|&e| (local(soup.ev[e][0]), local(soup.ev[e][1])))
            .collect();
        raw.extend(slice_face(&edges, eps));
    }
    let arrangement = arrangement2d(&SegmentSet::new(raw)?, eps)?;
    let verts2 = arrangement.complex.verts();
    let ev2 = arrangement.complex.ev();
    let on_boundary = |p: Point2| {
        boundary
            .iter()
            .any(|&(a, b)| project_to_segment(p, a, b).1 <= eps)
    };
    let inside = |p: Point2| inside_segments(p, boundary.iter().copied());
    let point = |v: usize| -> Point2 { [verts2[v][0], verts2[v][1]] };
    let d2 = arrangement.boundary(2);
    let mut kept: Vec<Vec<(usize, i8)>> = Vec::new();
    for j in 0..d2.cols() {
        let column: Vec<(usize, i8)> = d2.column(j).collect();
        let mut verdict = None;
        for &(e, _) in &column {
            let (a, b) = (point(ev2[e][0]), point(ev2[e][1]));
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            if !on_boundary(mid) {
                verdict = Some(inside(mid));
                break;
            }
        }
        let keep = match verdict {
            Some(v) => v,
            None => {
                let &(e, c) = column
                    .iter()
                    .max_by(|x, y| {
                        let len = |e: usize| dist2d(point(ev2[e][0]), point(ev2[e][1]));
                        len(x.0).total_cmp(&len(y.0))
                    })
                    .ok_or(Error::OpenChain)?;
                let (mut a, mut b) = (point(ev2[e][0]), point(ev2[e][1]));
                if c < 0 {
                    std::mem::swap(&mut a, &mut b);
                }
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let probe = [
                    0.5 * (a[0] + b[0]) - 1e-4 * dy,
                    0.5 * (a[1] + b[1]) + 1e-4 * dx,
                ];
                inside(probe)
            }
        };
        if keep {
            kept.push(column);
        }
    }
    let mut remap = vec![usize::MAX; ev2.len()];
    let mut vmap = vec![usize::MAX; verts2.len()];
    let mut out = FaceFragments {
        face: f,
        ..Default::default()
    };
    for column in &mut kept {
        for (e, _) in column.iter_mut() {
            if remap[*e] == usize::MAX {
                let mut ends = [0; 2];
                for (k, &v) in ev2[*e].iter().enumerate() {
                    if vmap[v] == usize::MAX {
                        vmap[v] = out.verts.len();
                        out.verts
                            .push(map.invert([verts2[v][0], verts2[v][1], 0.0]));
                    }
                    ends[k] = vmap[v];
                }
                remap[*e] = out.ev.len();
                out.ev.push(ends);
            }
            *e = remap[*e];
        }
    }
    out.faces = kept;
    Ok(out)
}

/// Fragments all faces in parallel.
pub fn fragment_all(soup: &FaceSoup, index: &SpatialIndex, eps: f64) -> Result<Vec<FaceFragments>> {
    let out = (0..soup.face_count())
        .into_par_iter()
        .map(|f| fragment_face(soup, f, &potential_intersections(f, index), eps))
        .collect::<Result<Vec<_>>>()?;
    debug!(
        "fragmentation: {} faces -> {} pieces",
        soup.face_count(),
        out.iter().map(|p| p.faces.len()).sum::<usize>()
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene;

    #[test]
    fn map_round_trip_and_plane() {
        for normal in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 2.0, -0.5]] {
            let m = AffineMap::new(normal, [0.3, -1.0, 2.0]).unwrap();
            let p = [1.5, 0.25, -3.0];
            let back = m.invert(m.apply(p));
            assert!((0..3).all(|k| (back[k] - p[k]).abs() < 1e-12));
            let n = normalize(normal).unwrap();
            let tip = m.apply([0.3 + n[0], -1.0 + n[1], 2.0 + n[2]]);
            assert!((tip[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn slicing_square_across_plane() {
        let sq = [
            [-1.0, 0.0, -1.0],
            [1.0, 0.0, -1.0],
            [1.0, 0.0, 1.0],
            [-1.0, 0.0, 1.0],
        ];
        let edges: Vec<(Point3, Point3)> = (0..4).map(|k| (sq[k], sq[(k + 1) % 4])).collect();
        let s = slice_face(&edges, 1e-12);
        assert_eq!(s.len(), 1);
        let xs = [s[0][0][0].min(s[0][1][0]), s[0][0][0].max(s[0][1][0])];
        assert_eq!(xs, [-1.0, 1.0]);
    }

    #[test]
    fn slicing_touching_vertex_gives_nothing() {
        let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, -1.0], [0.0, 1.0, -1.0]];
        let edges: Vec<(Point3, Point3)> = (0..3).map(|k| (tri[k], tri[(k + 1) % 3])).collect();
        assert!(slice_face(&edges, 1e-12).is_empty());
    }

    #[test]
    fn cube_faces_stay_whole() {
        let soup = FaceSoup::from_complex(&scene::cube_grid(1)).unwrap();
        let pieces = fragment_all(&soup, &soup.index(), 1e-9).unwrap();
        assert!(pieces.iter().all(|p| p.faces.len() == 1 && p.ev.len() == 4));
    }

    #[test]
    fn crossing_square_splits_face() {
        let verts = vec![
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [2.0, 2.0, 0.0],
            [0.0, 2.0, 0.0],
            [1.0, -1.0, -1.0],
            [1.0, 3.0, -1.0],
            [1.0, 3.0, 1.0],
            [1.0, -1.0, 1.0],
        ];
        let g =
            scene::from_polygons(verts, &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]], Vec::new()).unwrap();
        let soup = FaceSoup::from_complex(&g).unwrap();
        let pieces = fragment_all(&soup, &soup.index(), 1e-9).unwrap();
        assert_eq!(pieces[0].faces.len(), 2);
        // The cut through the vertical square ends inside it and is dropped.
        assert_eq!(pieces[1].faces.len(), 1);
        let area: f64 = pieces[0]
            .faces
            .iter()
            .map(|c| vector_area(c.iter().copied(), &pieces[0].verts, &pieces[0].ev)[2])
            .sum();
        assert!((area.abs() - 4.0).abs() < 1e-9);
    }
}
