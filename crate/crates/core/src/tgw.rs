//! Topological gift wrapping: extraction of the minimal top-dimensional
//! cycles of a regular codimension-one skeleton.
//!
//! Hinges are the cells of codimension two (vertices in the plane, edges in
//! space). Around each hinge the incident cells are sorted counterclockwise
//! about the hinge axis: `+z` in the plane, the edge direction from its lower
//! to its higher vertex index in space. A cell `f` entering the current cycle
//! with sign `s` meets hinge `h` with incidence `s·∂[h, f]`; the wrap continues to
//! the clockwise neighbour when the incidence is positive and to the counterclockwise one
//! otherwise, taking the sign that cancels `h`. Bounded cells come out with
//! positive measure and the unbounded cell with negative measure.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{SignedChain, SignedOperator};
use crate::error::{Error, Result};
use crate::geom::{cross, dot, normalize, sub, Point3};
use crate::lar::{vector_area, GeometricComplex};

/// Angular separation below which two cells around a hinge are coincident.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// Order in which seed cells are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Lowest index with fewer than two uses; fresh seeds are taken positively.
    LowestIndex,
    /// Random permutation and random initial signs from the given seed.
    Shuffled(u64),
}

/// Incident cells around one hinge, counterclockwise about its axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicOrder {
    pub hinge: usize,
    pub ring: Vec<usize>,
    /// Incidence `∂[hinge, ring[k]]` of each member.
    pub flags: Vec<i8>,
}

impl CyclicOrder {
    fn position(&self, cell: usize) -> Option<usize> {
        self.ring.iter().position(|&c| c == cell)
    }

    /// Counterclockwise successor of the member at `pos`.
    pub fn next(&self, pos: usize) -> usize {
        (pos + 1) % self.ring.len()
    }

    /// Clockwise successor of the member at `pos`.
    pub fn prev(&self, pos: usize) -> usize {
        (pos + self.ring.len() - 1) % self.ring.len()
    }
}

/// Cyclic order of the cells incident to one hinge. `boundary` is the
/// operator from the wrapped cells to the hinges.
pub fn cyclic_order(
    hinge: usize,
    boundary: &SignedOperator,
    complex: &GeometricComplex,
) -> Result<CyclicOrder> {
    let by_hinge = boundary.transpose();
    if hinge >= by_hinge.cols() {
        return Err(Error::IndexOutOfRange {
            index: hinge,
            size: by_hinge.cols(),
        });
    }
    let frame = Frames::new(boundary, complex)?;
    frame.order(hinge, by_hinge.column(hinge).collect())
}

/// Geometry needed to sort cells around hinges.
enum Frames<'a> {
    Planar {
        verts: &'a [Point3],
        ev: &'a [[usize; 2]],
    },
    Spatial {
        verts: &'a [Point3],
        ev: &'a [[usize; 2]],
        normals: Vec<Option<Point3>>,
    },
}

impl<'a> Frames<'a> {
    fn new(boundary: &SignedOperator, complex: &'a GeometricComplex) -> Result<Self> {
        let (verts, ev) = (complex.verts(), complex.ev());
        match complex.dim() {
            2 => {
                if boundary.cols() != ev.len() || boundary.rows() != verts.len() {
                    return Err(Error::DimensionMismatch(
                        "planar wrap needs ∂_1 over the complex edges".into(),
                    ));
                }
                Ok(Frames::Planar { verts, ev })
            }
            _ => {
                if boundary.rows() != ev.len() {
                    return Err(Error::DimensionMismatch(
                        "spatial wrap needs ∂_2 over the complex edges".into(),
                    ));
                }
                let normals = (0..boundary.cols())
                    .map(|f| normalize(vector_area(boundary.column(f), verts, ev)))
                    .collect();
                Ok(Frames::Spatial { verts, ev, normals })
            }
        }
    }

    fn order(&self, hinge: usize, incident: Vec<(usize, i8)>) -> Result<CyclicOrder> {
        let mut keyed: Vec<(f64, usize, i8)> = Vec::with_capacity(incident.len());
        match self {
            Frames::Planar { verts, ev } => {
                let p = verts[hinge];
                for (e, flag) in incident {
                    let [a, b] = ev[e];
                    let q = verts[if a == hinge { b } else { a }];
                    keyed.push(((q[1] - p[1]).atan2(q[0] - p[0]), e, flag));
                }
            }
            Frames::Spatial { verts, ev, normals } => {
                let [lo, hi] = ev[hinge];
                let axis = normalize(sub(verts[hi], verts[lo])).ok_or_else(|| {
                    Error::DegenerateGeometry(format!("edge {hinge} has zero length"))
                })?;
                let helper = if axis[0].abs() <= axis[1].abs() && axis[0].abs() <= axis[2].abs() {
                    [1.0, 0.0, 0.0]
                } else if axis[1].abs() <= axis[2].abs() {
                    [0.0, 1.0, 0.0]
                } else {
                    [0.0, 0.0, 1.0]
                };
                let r = normalize(cross(axis, helper)).expect("helper axis is never parallel");
                let s = cross(axis, r);
                for (f, flag) in incident {
                    let n = normals[f].ok_or_else(|| {
                        Error::DegenerateGeometry(format!("face {f} has zero area"))
                    })?;
                    let dir = if flag > 0 {
                        axis
                    } else {
                        [-axis[0], -axis[1], -axis[2]]
                    };
                    let t = cross(n, dir);
                    keyed.push((dot(t, s).atan2(dot(t, r)), f, flag));
                }
            }
        }
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if keyed.len() >= 3 {
            for k in 0..keyed.len() {
                let (a, b) = (keyed[k].0, keyed[(k + 1) % keyed.len()].0);
                let gap = if k + 1 == keyed.len() {
                    b + std::f64::consts::TAU - a
                } else {
                    b - a
                };
                if gap < ANGLE_TOLERANCE {
                    return Err(Error::DegenerateGeometry(format!(
                        "cells {} and {} coincide around hinge {hinge}",
                        keyed[k].1,
                        keyed[(k + 1) % keyed.len()].1
                    )));
                }
            }
        }
        Ok(CyclicOrder {
            hinge,
            ring: keyed.iter().map(|k| k.1).collect(),
            flags: keyed.iter().map(|k| k.2).collect(),
        })
    }
}

/// Precomputed rings for repeated extraction on one skeleton.
pub struct Wrapper<'a> {
    boundary: &'a SignedOperator,
    dim: u8,
    rings: Vec<CyclicOrder>,
}

impl<'a> Wrapper<'a> {
    pub fn new(boundary: &'a SignedOperator, complex: &GeometricComplex) -> Result<Self> {
        let frames = Frames::new(boundary, complex)?;
        let by_hinge = boundary.transpose();
        let rings = (0..by_hinge.cols())
            .map(|h| frames.order(h, by_hinge.column(h).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            boundary,
            dim: complex.dim() as u8,
            rings,
        })
    }

    pub fn rings(&self) -> &[CyclicOrder] {
        &self.rings
    }

    /// Grows the cycle through `sign · seed`, one layer of hinge neighbours
    /// per round. Returns the partial cycle after every round; the last entry
    /// is the closed cycle.
    pub fn trace(&self, seed: usize, sign: i8) -> Result<Vec<SignedChain>> {
        self.grow(seed, sign, true)
    }

    fn grow(&self, seed: usize, sign: i8, record: bool) -> Result<Vec<SignedChain>> {
        let n = self.boundary.cols();
        if seed >= n {
            return Err(Error::IndexOutOfRange {
                index: seed,
                size: n,
            });
        }
        let mut coef = vec![0i8; n];
        let mut members = vec![seed];
        coef[seed] = sign;
        let mut frontier = vec![seed];
        let mut rounds = if record {
            vec![self.chain_of(&members, &coef)?]
        } else {
            Vec::new()
        };
        while !frontier.is_empty() {
            let mut fresh = Vec::new();
            for &f in &frontier {
                for (h, b) in self.boundary.column(f) {
                    let incidence = coef[f] * b;
                    let ring = &self.rings[h];
                    let pos = ring.position(f).expect("cell is listed in its hinge ring");
                    let adj = if incidence > 0 {
                        ring.prev(pos)
                    } else {
                        ring.next(pos)
                    };
                    let g = ring.ring[adj];
                    let sg = -incidence * ring.flags[adj];
                    match coef[g] {
                        0 => {
                            coef[g] = sg;
                            fresh.push(g);
                        }
                        c if c == sg => {}
                        _ => return Err(Error::NonManifoldInput(g)),
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            fresh.sort_unstable();
            members.extend_from_slice(&fresh);
            if record {
                rounds.push(self.chain_of(&members, &coef)?);
            }
            frontier = fresh;
        }
        if !record {
            rounds.push(self.chain_of(&members, &coef)?);
        }
        Ok(rounds)
    }

    fn chain_of(&self, members: &[usize], coef: &[i8]) -> Result<SignedChain> {
        SignedChain::from_entries(
            self.dim - 1,
            self.boundary.cols(),
            members.iter().map(|&m| (m, i64::from(coef[m]))),
        )
    }

    pub fn extract(&self, seed: usize, sign: i8) -> Result<SignedChain> {
        Ok(self
            .grow(seed, sign, false)?
            .pop()
            .expect("growth yields the closed cycle"))
    }

    /// All minimal cycles, each codimension-one cell used exactly twice.
    pub fn run(&self, policy: SeedPolicy) -> Result<SignedOperator> {
        let n = self.boundary.cols();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = match policy {
            SeedPolicy::LowestIndex => None,
            SeedPolicy::Shuffled(s) => {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                order.shuffle(&mut rng);
                Some(rng)
            }
        };
        let mut marks = vec![0u8; n];
        let mut used_sign = vec![0i8; n];
        let mut total = 0usize;
        let mut cycles = Vec::new();
        let mut cursor = 0;
        while total < 2 * n {
            while cursor < n && marks[order[cursor]] >= 2 {
                cursor += 1;
            }
            let Some(&seed) = order.get(cursor) else {
                return Err(Error::NonTerminating(format!(
                    "{} of {} uses consumed",
                    total,
                    2 * n
                )));
            };
            let sign = match (marks[seed], rng.as_mut()) {
                (0, Some(r)) => {
                    if r.random_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                }
                (0, None) => 1,
                _ => -used_sign[seed],
            };
            let cycle = self.extract(seed, sign)?;
            for &(f, s) in cycle.entries() {
                if marks[f] >= 2 || (marks[f] == 1 && used_sign[f] == s) {
                    return Err(Error::NonManifoldInput(f));
                }
                marks[f] += 1;
                used_sign[f] = s;
            }
            total += cycle.nnz();
            cycles.push(cycle);
            if cycles.len() > 2 * n {
                return Err(Error::NonTerminating("more cycles than uses".into()));
            }
        }
        SignedOperator::from_chains(self.dim, n, &cycles)
    }
}

/// Signed `[∂_d⁺]` whose columns are all minimal cycles, the unbounded one
/// included.
pub fn tgw(
    boundary: &SignedOperator,
    complex: &GeometricComplex,
    policy: SeedPolicy,
) -> Result<SignedOperator> {
    Wrapper::new(boundary, complex)?.run(policy)
}

/// Total absolute coefficient mass equals twice the number of rows.
pub fn satisfies_eq1(cycles: &SignedOperator) -> bool {
    cycles.nnz() == 2 * cycles.rows()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Arithmetic;

    fn square() -> (GeometricComplex, SignedOperator) {
        let c = GeometricComplex::planar(
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1], [1, 2], [2, 3], [0, 3]],
            vec![],
        )
        .unwrap();
        let d1 = c.signed_boundary_1().unwrap();
        (c, d1)
    }

    #[test]
    fn compass_order() {
        let c = GeometricComplex::planar(
            &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
            vec![[0, 3], [0, 1], [0, 4], [0, 2]],
            vec![],
        )
        .unwrap();
        let d1 = c.signed_boundary_1().unwrap();
        let o = cyclic_order(0, &d1, &c).unwrap();
        // East, north, west, south, up to rotation.
        let start = o.ring.iter().position(|&e| e == 1).unwrap();
        let rotated: Vec<usize> = (0..4).map(|k| o.ring[(start + k) % 4]).collect();
        assert_eq!(rotated, vec![1, 3, 0, 2]);
        assert_eq!(o.ring[o.next(o.prev(2))], o.ring[2]);
    }

    #[test]
    fn half_planes_around_z_axis() {
        // Triangles sharing the edge (0,0,0)-(0,0,1), opening at 0°, 120°, 240°.
        let mut verts = vec![[0.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for deg in [0.0f64, 240.0, 120.0] {
            let r = deg.to_radians();
            verts.push([r.cos(), r.sin(), 0.5]);
        }
        let ev = vec![[0, 1], [0, 2], [1, 2], [0, 3], [1, 3], [0, 4], [1, 4]];
        let fv = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]];
        let c = GeometricComplex::new(3, verts, ev, fv, vec![]).unwrap();
        let d2 = c.oriented_face_boundary().unwrap();
        let o = cyclic_order(0, &d2, &c).unwrap();
        let start = o.ring.iter().position(|&f| f == 0).unwrap();
        let rotated: Vec<usize> = (0..3).map(|k| o.ring[(start + k) % 3]).collect();
        assert_eq!(rotated, vec![0, 2, 1]);
    }

    #[test]
    fn square_gives_cycle_and_negation() {
        let (c, d1) = square();
        let cycles = tgw(&d1, &c, SeedPolicy::LowestIndex).unwrap();
        assert_eq!(cycles.cols(), 2);
        assert_eq!(cycles.column_chain(0), cycles.column_chain(1).negated());
        assert!(satisfies_eq1(&cycles));
        assert!(d1.composes_to_zero(&cycles).unwrap());
        let area = crate::lar::signed_measure(&cycles.column_chain(0), &c).unwrap();
        assert_eq!(area, 1.0);
    }

    #[test]
    fn cube_edge_ring_is_two_cycle() {
        let cube = crate::scene::unit_cube();
        let d2 = cube.oriented_face_boundary().unwrap();
        let o = cyclic_order(0, &d2, &cube).unwrap();
        assert_eq!(o.ring.len(), 2);
        assert_eq!(o.next(0), o.prev(0));
    }

    #[test]
    fn cube_shell_wraps_into_two_columns() {
        let cube = crate::scene::unit_cube();
        let d2 = cube.oriented_face_boundary().unwrap();
        let cycles = tgw(&d2, &cube, SeedPolicy::LowestIndex).unwrap();
        assert_eq!(cycles.cols(), 2);
        assert_eq!(cycles.column_nnz(0), 6);
        assert_eq!(cycles.nnz(), 12);
        let vols: Vec<f64> = (0..2)
            .map(|j| {
                crate::lar::signed_measure_with(
                    &cycles.column_chain(j),
                    cube.verts(),
                    cube.ev(),
                    Some(&d2),
                )
                .unwrap()
            })
            .collect();
        assert!(vols.iter().any(|v| (v - 1.0).abs() < 1e-12));
        assert!(vols.iter().any(|v| (v + 1.0).abs() < 1e-12));
        assert!(d2
            .apply(&cycles.column_chain(0), Arithmetic::Integer)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn dangling_edge_is_rejected() {
        let c = GeometricComplex::planar(&[[0.0, 0.0], [1.0, 0.0]], vec![[0, 1]], vec![]).unwrap();
        let d1 = c.signed_boundary_1().unwrap();
        assert!(matches!(
            tgw(&d1, &c, SeedPolicy::LowestIndex),
            Err(Error::NonManifoldInput(_))
        ));
    }
}
