//! Deterministic test scenes: primitive meshes, rigid motions and random
//! segment or mesh collections.

use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geom::{add, Point3};
use crate::lar::GeometricComplex;
use crate::planar::Segment;

/// Builds a 3D face complex from polygons given as vertex loops.
pub fn from_polygons(
    verts: Vec<Point3>,
    polygons: &[Vec<usize>],
    cells: Vec<Vec<usize>>,
) -> Result<GeometricComplex> {
    let mut edges = BTreeSet::new();
    for poly in polygons {
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            edges.insert([a.min(b), a.max(b)]);
        }
    }
    GeometricComplex::new(
        3,
        verts,
        edges.into_iter().collect(),
        polygons.to_vec(),
        cells,
    )
}

/// Unit cube `[0,1]³` with its single solid cell.
pub fn unit_cube() -> GeometricComplex {
    let mut g = cube_grid(1);
    g = GeometricComplex::new(
        3,
        g.verts().to_vec(),
        g.ev().to_vec(),
        g.fv().to_vec(),
        vec![(0..8).collect()],
    )
    .expect("valid cube");
    g
}

/// `n × n × n` grid of unit cubes spanning `[0, n]³`, all faces included.
pub fn cube_grid(n: usize) -> GeometricComplex {
    let m = n + 1;
    let id = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    let mut verts = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                verts.push([i as f64, j as f64, k as f64]);
            }
        }
    }
    let mut quads = Vec::new();
    for a in 0..m {
        for b in 0..n {
            for c in 0..n {
                quads.push(vec![
                    id(a, b, c),
                    id(a, b + 1, c),
                    id(a, b + 1, c + 1),
                    id(a, b, c + 1),
                ]);
                quads.push(vec![
                    id(b, a, c),
                    id(b + 1, a, c),
                    id(b + 1, a, c + 1),
                    id(b, a, c + 1),
                ]);
                quads.push(vec![
                    id(b, c, a),
                    id(b + 1, c, a),
                    id(b + 1, c + 1, a),
                    id(b, c + 1, a),
                ]);
            }
        }
    }
    from_polygons(verts, &quads, Vec::new()).expect("valid grid")
}

/// Regular-ish tetrahedron surface.
pub fn tetrahedron() -> GeometricComplex {
    let verts = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 0.9, 0.0],
        [0.5, 0.3, 0.8],
    ];
    let tris = vec![vec![0, 1, 2], vec![0, 1, 3], vec![1, 2, 3], vec![0, 2, 3]];
    from_polygons(verts, &tris, Vec::new()).expect("valid tetrahedron")
}

/// Unit cube split into six tetrahedra around its main diagonal; all
/// triangles (boundary and internal) are faces. With `mirrored`, the cube
/// is reflected in `y`, which swaps the diagonal used on every side face.
pub fn tetrahedralized_cube(mirrored: bool) -> GeometricComplex {
    let corner = |x: usize, y: usize, z: usize| x + 2 * y + 4 * z;
    let mut verts = Vec::new();
    for v in 0..8usize {
        let (x, y, z) = ((v & 1) as f64, ((v >> 1) & 1) as f64, ((v >> 2) & 1) as f64);
        verts.push([x, if mirrored { 1.0 - y } else { y }, z]);
    }
    let axes = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut tris = BTreeSet::new();
    for perm in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let mut p = [0usize; 3];
        let mut tet = vec![corner(0, 0, 0)];
        for &a in &perm {
            for k in 0..3 {
                p[k] += axes[a][k];
            }
            tet.push(corner(p[0], p[1], p[2]));
        }
        for skip in 0..4 {
            let mut t: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| tet[k]).collect();
            t.sort_unstable();
            tris.insert(t);
        }
    }
    let tris: Vec<Vec<usize>> = tris.into_iter().collect();
    from_polygons(verts, &tris, Vec::new()).expect("valid tetrahedralization")
}

/// Rotation plus translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub translation: Point3,
}

impl RigidMotion {
    pub fn translation(t: Point3) -> Self {
        Self {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: t,
        }
    }

    /// Uniformly random rotation (unit quaternion) and translation in `[-t, t]³`.
    pub fn random(rng: &mut ChaCha8Rng, t: f64) -> Self {
        let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let tau = std::f64::consts::TAU;
        let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
        let (w, x, y, z) = (
            a * (tau * u2).sin(),
            a * (tau * u2).cos(),
            b * (tau * u3).sin(),
            b * (tau * u3).cos(),
        );
        let rotation = [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - z * w),
                2.0 * (x * z + y * w),
            ],
            [
                2.0 * (x * y + z * w),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - x * w),
            ],
            [
                2.0 * (x * z - y * w),
                2.0 * (y * z + x * w),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ];
        let translation = [
            rng.random_range(-t..=t),
            rng.random_range(-t..=t),
            rng.random_range(-t..=t),
        ];
        Self {
            rotation,
            translation,
        }
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let r = &self.rotation;
        add(
            [
                r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
                r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
                r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2],
            ],
            self.translation,
        )
    }
}

/// Applies `f` to every vertex.
pub fn map_vertices(g: &GeometricComplex, f: impl Fn(Point3) -> Point3) -> GeometricComplex {
    let verts = g.verts().iter().map(|&p| f(p)).collect();
    GeometricComplex::new(
        g.dim(),
        verts,
        g.ev().to_vec(),
        g.fv().to_vec(),
        g.cv().to_vec(),
    )
    .expect("relabelled complex stays valid")
}

/// Disjoint union with vertex indices offset; coincident points are kept.
pub fn disjoint_union(parts: &[GeometricComplex]) -> GeometricComplex {
    let dim = parts.first().map_or(3, GeometricComplex::dim);
    let (mut verts, mut ev, mut fv, mut cv) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for g in parts {
        let off = verts.len();
        verts.extend_from_slice(g.verts());
        ev.extend(g.ev().iter().map(|e| [e[0] + off, e[1] + off]));
        fv.extend(
            g.fv()
                .iter()
                .map(|f| f.iter().map(|v| v + off).collect::<Vec<_>>()),
        );
        cv.extend(
            g.cv()
                .iter()
                .map(|c| c.iter().map(|v| v + off).collect::<Vec<_>>()),
        );
    }
    GeometricComplex::new(dim, verts, ev, fv, cv).expect("offset union stays valid")
}

/// Random segments centred in the unit square with lengths in `[0.4, 0.9]`,
/// dense enough that the regular part is usually connected.
pub fn random_segments(n: usize, seed: u64) -> Vec<Segment> {
    random_segments_with(n, seed, 0.4..0.9)
}

/// Random segments centred in the unit square with lengths drawn from `lengths`.
pub fn random_segments_with(n: usize, seed: u64, lengths: std::ops::Range<f64>) -> Vec<Segment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let len: f64 = rng.random_range(lengths.clone());
            let a: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let h = [0.5 * len * a.cos(), 0.5 * len * a.sin()];
            [[c[0] - h[0], c[1] - h[1]], [c[0] + h[0], c[1] + h[1]]]
        })
        .collect()
}

/// Two 2×2×2 cube grids, each under an independent random rigid motion,
/// overlapping around the origin.
pub fn two_cube_grids(seed: u64) -> GeometricComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = cube_grid(2);
    let parts: Vec<GeometricComplex> = (0..2)
        .map(|_| {
            let m = RigidMotion::random(&mut rng, 0.4);
            map_vertices(&grid, |p| m.apply([p[0] - 1.0, p[1] - 1.0, p[2] - 1.0]))
        })
        .collect();
    disjoint_union(&parts)
}

/// `k` meshes (unit cubes or tetrahedra), randomly scaled and moved so that
/// they tend to overlap.
pub fn random_mesh_scene(k: usize, seed: u64) -> GeometricComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<GeometricComplex> = (0..k)
        .map(|_| {
            let base = if rng.random_bool(0.5) {
                cube_grid(1)
            } else {
                tetrahedron()
            };
            let s: f64 = rng.random_range(0.6..1.2);
            let m = RigidMotion::random(&mut rng, 0.5);
            map_vertices(&base, |p| {
                m.apply([s * (p[0] - 0.5), s * (p[1] - 0.5), s * (p[2] - 0.5)])
            })
        })
        .collect();
    disjoint_union(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let g = cube_grid(2);
        assert_eq!(g.verts().len(), 27);
        assert_eq!(g.ev().len(), 54);
        assert_eq!(g.fv().len(), 36);
    }

    #[test]
    fn tetrahedralization_counts() {
        let t = tetrahedralized_cube(false);
        // 12 boundary triangles plus 6 interior ones.
        assert_eq!(t.fv().len(), 18);
        assert_eq!(t.ev().len(), 19);
        let on_right: Vec<&Vec<usize>> = t
            .fv()
            .iter()
            .filter(|f| f.iter().all(|&v| t.verts()[v][0] == 1.0))
            .collect();
        assert_eq!(on_right.len(), 2);
    }

    #[test]
    fn rotations_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = RigidMotion::random(&mut rng, 1.0);
        let r = m.rotation;
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                assert!((d - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
        }
    }
}
