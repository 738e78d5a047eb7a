//! Component decomposition, per-component wrapping, outer shells, nesting
//! and assembly of the global top-dimensional boundary operator.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::chain::{SignedChain, SignedOperator};
use crate::cluster::UnionFind;
use crate::error::{Error, Result};
use crate::geom::{
    bbox_diagonal, dot, inside_segments, normalize, project_to_segment, Point2, Point3,
};
use crate::lar::{cycle_area_z, shell_volume, vector_area, GeometricComplex};
use crate::tgw::{satisfies_eq1, SeedPolicy, Wrapper};

/// One connected piece of the codimension-one skeleton with local indices.
#[derive(Debug, Clone)]
pub struct Piece {
    /// Global ids of the piece's codimension-one cells, ascending.
    pub cells: Vec<usize>,
    /// Global ids of its hinges (vertices in 2D, edges in 3D), ascending.
    pub hinges: Vec<usize>,
    /// Global ids of its vertices, ascending.
    pub verts: Vec<usize>,
    /// Hinge-by-cell operator in local indices.
    pub boundary: SignedOperator,
    /// Local geometry: the piece's vertices and (in 3D) its hinge edges.
    pub complex: GeometricComplex,
}

#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    pub pieces: Vec<Piece>,
}

/// Splits the skeleton into pieces connected through shared hinges.
///
/// `lower` maps codimension-one cells to hinges: `∂_1` for planar complexes,
/// `∂_2` for spatial ones.
pub fn split_components(
    lower: &SignedOperator,
    complex: &GeometricComplex,
) -> Result<ComponentDecomposition> {
    let n = lower.cols();
    let by_hinge = lower.transpose();
    let mut uf = UnionFind::new(n);
    for h in 0..by_hinge.cols() {
        let cells = by_hinge.column_rows(h);
        for w in cells.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let (labels, count) = uf.labels();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (c, &l) in labels.iter().enumerate() {
        cells[l].push(c);
    }
    let pieces = cells
        .into_par_iter()
        .map(|cells| build_piece(cells, lower, complex))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComponentDecomposition { pieces })
}

fn build_piece(
    cells: Vec<usize>,
    lower: &SignedOperator,
    complex: &GeometricComplex,
) -> Result<Piece> {
    let ev = complex.ev();
    let mut hinges: Vec<usize> = cells
        .iter()
        .flat_map(|&c| lower.column_rows(c).iter().copied())
        .collect();
    hinges.sort_unstable();
    hinges.dedup();
    let mut verts: Vec<usize> = match complex.dim() {
        2 => hinges.clone(),
        _ => hinges.iter().flat_map(|&h| ev[h]).collect(),
    };
    verts.sort_unstable();
    verts.dedup();
    let local = |ids: &[usize], g: usize| ids.binary_search(&g).expect("id belongs to piece");
    let columns: Vec<Vec<(usize, i8)>> = cells
        .iter()
        .map(|&c| {
            lower
                .column(c)
                .map(|(h, v)| (local(&hinges, h), v))
                .collect()
        })
        .collect();
    let boundary = SignedOperator::from_columns(
        lower.domain_dim(),
        lower.codomain_dim(),
        hinges.len(),
        columns,
    )?;
    let points: Vec<Point3> = verts.iter().map(|&v| complex.verts()[v]).collect();
    let local_ev: Vec<[usize; 2]> = match complex.dim() {
        2 => cells
            .iter()
            .map(|&c| [local(&verts, ev[c][0]), local(&verts, ev[c][1])])
            .collect(),
        _ => hinges
            .iter()
            .map(|&h| [local(&verts, ev[h][0]), local(&verts, ev[h][1])])
            .collect(),
    };
    let geometry = GeometricComplex::new(complex.dim(), points, local_ev, Vec::new(), Vec::new())?;
    Ok(Piece {
        cells,
        hinges,
        verts,
        boundary,
        complex: geometry,
    })
}

/// Entries of one operator column.
type Column = Vec<(usize, i8)>;

/// Column pairs `(i, j)`, `i < j`, whose sum is the zero chain.
pub fn detect_hole_pairs(op: &SignedOperator) -> Vec<(usize, usize)> {
    let mut groups: HashMap<Column, Vec<(usize, i8)>> = HashMap::new();
    for j in 0..op.cols() {
        let col: Vec<(usize, i8)> = op.column(j).collect();
        let Some(&(_, first)) = col.first() else {
            continue;
        };
        let key: Vec<(usize, i8)> = col.iter().map(|&(i, v)| (i, v * first)).collect();
        groups.entry(key).or_default().push((j, first));
    }
    let mut pairs = Vec::new();
    for members in groups.values() {
        for (a, &(i, si)) in members.iter().enumerate() {
            for &(j, sj) in &members[a + 1..] {
                if si != sj {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Measures of all columns, closure checked against `lower` built once.
fn column_measures(
    cycles: &SignedOperator,
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Result<Vec<f64>> {
    let d1;
    let lower = match faces {
        Some(d2) => d2,
        None => {
            d1 = complex.signed_boundary_1()?;
            &d1
        }
    };
    (0..cycles.cols())
        .map(|j| {
            let cycle = cycles.column_chain(j);
            if !lower.apply_raw(&cycle)?.is_empty() {
                return Err(Error::OpenChain);
            }
            Ok(match faces {
                None => cycle_area_z(cycle.entries(), complex.verts(), complex.ev()),
                Some(d2) => shell_volume(cycle.entries(), complex.verts(), complex.ev(), d2),
            })
        })
        .collect()
}

/// Separates the unbounded cell's boundary (most negative measure) from the
/// bounded cycles.
pub fn split_outer(
    cycles: &SignedOperator,
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Result<(SignedChain, SignedOperator)> {
    let measures = column_measures(cycles, complex, faces)?;
    let (outer, worst) = measures
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::AmbiguousOuter)?;
    if worst >= 0.0 {
        return Err(Error::AmbiguousOuter);
    }
    let rival = measures
        .iter()
        .enumerate()
        .any(|(j, &m)| j != outer && m < 0.0 && m.abs() >= worst.abs() * (1.0 - 1e-9));
    if rival {
        return Err(Error::AmbiguousOuter);
    }
    Ok((cycles.column_chain(outer), cycles.remove_column(outer)?))
}

const DIRECTIONS: usize = 24;

fn ray_directions() -> impl Iterator<Item = Point3> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    (0..DIRECTIONS).map(move |k| {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / DIRECTIONS as f64 + 0.0123456789;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let a = std::f64::consts::TAU * (k as f64 * phi).fract() + 0.314159;
        normalize([r * a.cos(), r * a.sin(), z]).expect("unit direction")
    })
}

fn cycle_points(
    cycle: &SignedChain,
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Vec<usize> {
    let ev = complex.ev();
    let mut vs: Vec<usize> = match faces {
        None => cycle.support().iter().flat_map(|&e| ev[e]).collect(),
        Some(d2) => cycle
            .support()
            .iter()
            .flat_map(|&f| d2.column_rows(f).iter().flat_map(|&e| ev[e]))
            .collect(),
    };
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Whether `p` lies in the bounded region enclosed by `cycle` (ray parity).
pub fn point_in_cycle(
    p: Point3,
    cycle: &SignedChain,
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Result<bool> {
    let verts = complex.verts();
    let ev = complex.ev();
    let pts: Vec<Point3> = cycle_points(cycle, complex, faces)
        .iter()
        .map(|&v| verts[v])
        .collect();
    let tol = 1e-10 * bbox_diagonal(&pts).max(f64::MIN_POSITIVE);
    match faces {
        None => {
            let seg = |e: usize| -> (Point2, Point2) {
                let [a, b] = ev[e];
                ([verts[a][0], verts[a][1]], [verts[b][0], verts[b][1]])
            };
            let q = [p[0], p[1]];
            for e in cycle.support() {
                let (a, b) = seg(e);
                if project_to_segment(q, a, b).1 <= tol {
                    return Err(Error::PointOnBoundary);
                }
            }
            Ok(inside_segments(q, cycle.support().into_iter().map(seg)))
        }
        Some(d2) => point_in_shell(p, cycle, verts, ev, d2, tol),
    }
}

struct PlanarFace {
    normal: Point3,
    offset: f64,
    drop: usize,
    edges: Vec<(Point2, Point2)>,
}

impl PlanarFace {
    fn project(&self, p: Point3) -> Point2 {
        match self.drop {
            0 => [p[1], p[2]],
            1 => [p[2], p[0]],
            _ => [p[0], p[1]],
        }
    }

    fn near_edge(&self, q: Point2, tol: f64) -> bool {
        self.edges
            .iter()
            .any(|&(a, b)| project_to_segment(q, a, b).1 <= tol)
    }

    fn contains(&self, q: Point2) -> bool {
        inside_segments(q, self.edges.iter().copied())
    }
}

fn point_in_shell(
    p: Point3,
    cycle: &SignedChain,
    verts: &[Point3],
    ev: &[[usize; 2]],
    d2: &SignedOperator,
    tol: f64,
) -> Result<bool> {
    let mut faces = Vec::with_capacity(cycle.nnz());
    for f in cycle.support() {
        let Some(normal) = normalize(vector_area(d2.column(f), verts, ev)) else {
            continue;
        };
        let drop = (0..3)
            .max_by(|&a, &b| normal[a].abs().total_cmp(&normal[b].abs()))
            .unwrap_or(2);
        let p0 = verts[ev[d2.column_rows(f)[0]][0]];
        let mut face = PlanarFace {
            normal,
            offset: dot(normal, p0),
            drop,
            edges: Vec::new(),
        };
        face.edges = d2
            .column_rows(f)
            .iter()
            .map(|&e| (face.project(verts[ev[e][0]]), face.project(verts[ev[e][1]])))
            .collect();
        let height = dot(normal, p) - face.offset;
        if height.abs() <= tol {
            let q = face.project(p);
            if face.near_edge(q, tol) || face.contains(q) {
                return Err(Error::PointOnBoundary);
            }
        }
        faces.push(face);
    }
    'directions: for dir in ray_directions() {
        let mut inside = false;
        for face in &faces {
            let den = dot(face.normal, dir);
            if den.abs() < 1e-12 {
                continue;
            }
            let t = (face.offset - dot(face.normal, p)) / den;
            if t <= 0.0 {
                continue;
            }
            let hit = [p[0] + t * dir[0], p[1] + t * dir[1], p[2] + t * dir[2]];
            let q = face.project(hit);
            if face.near_edge(q, tol) {
                continue 'directions;
            }
            if face.contains(q) {
                inside = !inside;
            }
        }
        return Ok(inside);
    }
    Err(Error::DegenerateGeometry(
        "no clean ray through shell".into(),
    ))
}

/// Shells with their transitively reduced containment arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellForest {
    pub shells: Vec<SignedChain>,
    /// `(container, contained)` arcs after transitive reduction.
    pub arcs: Vec<(usize, usize)>,
    /// Number of shells enclosing each shell (roots have depth 0).
    pub depth: Vec<usize>,
}

impl ShellForest {
    /// Arcs whose contained shell sits at odd depth.
    pub fn odd_depth_arcs(&self) -> Vec<(usize, usize)> {
        self.arcs
            .iter()
            .copied()
            .filter(|&(_, c)| self.depth[c] % 2 == 1)
            .collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.shells.len())
            .filter(|&s| self.depth[s] == 0)
            .collect()
    }
}

/// Transitive reduction and depths of a strict nesting relation given as
/// `(container, contained)` pairs over `n` shells.
pub fn reduce_containment(
    n: usize,
    relation: &[(usize, usize)],
) -> (Vec<(usize, usize)>, Vec<usize>) {
    let mut contains = vec![vec![false; n]; n];
    for &(a, b) in relation {
        contains[a][b] = true;
    }
    let mut depth = vec![0usize; n];
    for &(_, b) in relation {
        depth[b] += 1;
    }
    let mut arcs: Vec<(usize, usize)> = relation
        .iter()
        .copied()
        .filter(|&(a, b)| !(0..n).any(|k| contains[a][k] && contains[k][b]))
        .collect();
    arcs.sort_unstable();
    arcs.dedup();
    (arcs, depth)
}

fn bbox(points: &[Point3]) -> [[f64; 2]; 3] {
    let mut b = [[f64::INFINITY, f64::NEG_INFINITY]; 3];
    for p in points {
        for k in 0..3 {
            b[k][0] = b[k][0].min(p[k]);
            b[k][1] = b[k][1].max(p[k]);
        }
    }
    b
}

/// Tries candidate points until one is off the cycle.
fn locate(
    candidates: &[usize],
    cycle: &SignedChain,
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Result<bool> {
    for &v in candidates {
        match point_in_cycle(complex.verts()[v], cycle, complex, faces) {
            Err(Error::PointOnBoundary) => continue,
            other => return other,
        }
    }
    Err(Error::PointOnBoundary)
}

/// Nesting of pairwise disjoint shells.
pub fn containment_forest(
    shells: &[SignedChain],
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Result<ShellForest> {
    let n = shells.len();
    let points: Vec<Vec<usize>> = shells
        .iter()
        .map(|s| cycle_points(s, complex, faces))
        .collect();
    let boxes: Vec<[[f64; 2]; 3]> = points
        .iter()
        .map(|vs| bbox(&vs.iter().map(|&v| complex.verts()[v]).collect::<Vec<_>>()))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let hits = pairs
        .par_iter()
        .map(|&(a, b)| {
            let nested = (0..3)
                .all(|k| boxes[a][k][0] <= boxes[b][k][0] && boxes[b][k][1] <= boxes[a][k][1]);
            if !nested {
                return Ok(None);
            }
            Ok(locate(&points[b], &shells[a], complex, faces)?.then_some((a, b)))
        })
        .collect::<Result<Vec<_>>>()?;
    let relation: Vec<(usize, usize)> = hits.into_iter().flatten().collect();
    let (arcs, depth) = reduce_containment(n, &relation);
    Ok(ShellForest {
        shells: shells.to_vec(),
        arcs,
        depth,
    })
}

/// Output of wrapping one connected piece, in global indices.
#[derive(Debug, Clone)]
pub struct ComponentCells {
    pub inner: Vec<SignedChain>,
    pub outer: SignedChain,
    pub measures: Vec<f64>,
    /// Vertices of the piece, used as probe points.
    pub verts: Vec<usize>,
}

/// Merges every contained shell into its container cell and concatenates the
/// component blocks. Returns the bounded top operator and the boundary of the
/// unbounded cell.
pub fn assemble(
    components: &[ComponentCells],
    forest: &ShellForest,
    complex: &GeometricComplex,
    faces: Option<&SignedOperator>,
) -> Result<(SignedOperator, SignedChain)> {
    let mut columns: Vec<Vec<SignedChain>> = components.iter().map(|c| c.inner.clone()).collect();
    for &(container, contained) in &forest.arcs {
        let host = &components[container];
        let mut best: Option<(usize, f64)> = None;
        for (k, cell) in host.inner.iter().enumerate() {
            if locate(&components[contained].verts, cell, complex, faces)? {
                let m = host.measures[k].abs();
                if best.is_none_or(|(_, bm)| m < bm) {
                    best = Some((k, m));
                }
            }
        }
        let (k, _) = best.ok_or(Error::ContainerNotFound(contained))?;
        columns[container][k] = columns[container][k].checked_add(&components[contained].outer)?;
    }
    let all: Vec<SignedChain> = columns.into_iter().flatten().collect();
    let rows = components.first().map_or(0, |c| c.outer.len());
    let dim = components.first().map_or(1, |c| c.outer.dim() + 1);
    let op = SignedOperator::from_chains(dim, rows, &all)?;
    let outer_entries = forest.roots().into_iter().flat_map(|r| {
        components[r]
            .outer
            .entries()
            .iter()
            .map(|&(i, v)| (i, i64::from(v)))
            .collect::<Vec<_>>()
    });
    let outer = SignedChain::from_entries(dim - 1, rows, outer_entries)?;
    Ok((op, outer))
}

/// Bounded top cells of a skeleton and the bookkeeping behind them.
#[derive(Debug, Clone)]
pub struct TopCells {
    pub boundary: SignedOperator,
    pub outer: SignedChain,
    pub forest: ShellForest,
    /// Per component: whether its wrapped operator met the generator count.
    pub eq1: Vec<bool>,
}

/// Full top-cell discovery: components, wrapping, outer split, nesting and
/// assembly. `lower` is `∂_{d-1}` of `complex`.
pub fn wrap_top_cells(
    complex: &GeometricComplex,
    lower: &SignedOperator,
    policy: SeedPolicy,
) -> Result<TopCells> {
    let faces = (complex.dim() == 3).then_some(lower);
    let pieces = split_components(lower, complex)?.pieces;
    let wrapped = pieces
        .par_iter()
        .map(|piece| -> Result<(ComponentCells, bool)> {
            let local_faces = (complex.dim() == 3).then_some(&piece.boundary);
            let cycles = Wrapper::new(&piece.boundary, &piece.complex)?.run(policy)?;
            let eq1 = satisfies_eq1(&cycles);
            let (outer, inner) = split_outer(&cycles, &piece.complex, local_faces)?;
            let measures = column_measures(&inner, &piece.complex, local_faces)?;
            let globalize = |c: &SignedChain| {
                SignedChain::from_entries(
                    c.dim(),
                    lower.cols(),
                    c.entries()
                        .iter()
                        .map(|&(i, v)| (piece.cells[i], i64::from(v))),
                )
            };
            Ok((
                ComponentCells {
                    inner: inner
                        .columns()
                        .iter()
                        .map(globalize)
                        .collect::<Result<_>>()?,
                    outer: globalize(&outer)?,
                    measures,
                    verts: piece.verts.clone(),
                },
                eq1,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (components, eq1): (Vec<ComponentCells>, Vec<bool>) = wrapped.into_iter().unzip();
    let shells: Vec<SignedChain> = components.iter().map(|c| c.outer.clone()).collect();
    let forest = containment_forest(&shells, complex, faces)?;
    let (boundary, outer) = if components.is_empty() {
        let d = complex.dim() as u8;
        (
            SignedOperator::zeros(d, d - 1, lower.cols(), 0),
            SignedChain::zero(d - 1, lower.cols()),
        )
    } else {
        assemble(&components, &forest, complex, faces)?
    };
    Ok(TopCells {
        boundary,
        outer,
        forest,
        eq1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::{arrangement2d, SegmentSet};

    fn squares(list: &[(f64, f64, f64)]) -> SegmentSet {
        let mut raw = Vec::new();
        for &(x, y, s) in list {
            let c = [[x, y], [x + s, y], [x + s, y + s], [x, y + s]];
            for k in 0..4 {
                raw.push([c[k], c[(k + 1) % 4]]);
            }
        }
        SegmentSet::new(raw).unwrap()
    }

    #[test]
    fn hole_pairs() {
        let c = SignedChain::from_dense(1, &[1, -1, 0, 1]).unwrap();
        let d = SignedChain::from_dense(1, &[0, 1, 1, 0]).unwrap();
        let op = SignedOperator::from_chains(2, 4, &[c.clone(), c.negated()]).unwrap();
        assert_eq!(detect_hole_pairs(&op), vec![(0, 1)]);
        let op = SignedOperator::from_chains(2, 4, &[c.clone(), d, c]).unwrap();
        assert!(detect_hole_pairs(&op).is_empty());
    }

    #[test]
    fn unit_square_point_tests() {
        let r = arrangement2d(&squares(&[(0.0, 0.0, 1.0)]), 1e-9).unwrap();
        let cell = r.boundary(2).column_chain(0);
        assert!(point_in_cycle([0.5, 0.5, 0.0], &cell, &r.complex, None).unwrap());
        assert!(!point_in_cycle([2.0, 2.0, 0.0], &cell, &r.complex, None).unwrap());
        assert_eq!(
            point_in_cycle([1.0, 0.5, 0.0], &cell, &r.complex, None),
            Err(Error::PointOnBoundary)
        );
        assert!(point_in_cycle([0.5, 0.5, 0.0], &r.outer, &r.complex, None).unwrap());
    }

    #[test]
    fn nested_forest_reduction() {
        let (arcs, depth) = reduce_containment(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(arcs, vec![(0, 1), (1, 2)]);
        assert_eq!(depth, vec![0, 1, 2]);
        let forest = ShellForest {
            shells: Vec::new(),
            arcs,
            depth,
        };
        assert_eq!(forest.odd_depth_arcs(), vec![(0, 1)]);
    }

    #[test]
    fn disjoint_squares_have_no_arcs() {
        let r = arrangement2d(&squares(&[(0.0, 0.0, 1.0), (3.0, 0.0, 1.0)]), 1e-9).unwrap();
        assert_eq!(r.cell_counts(), vec![8, 8, 2]);
        assert!(r.is_chain_complex().unwrap());
        assert!(r.satisfies_eq1().unwrap());
    }

    #[test]
    fn small_square_in_big_square() {
        let r = arrangement2d(&squares(&[(0.0, 0.0, 3.0), (1.0, 1.0, 1.0)]), 1e-9).unwrap();
        assert_eq!(r.cell_counts(), vec![8, 8, 2]);
        assert!(r.satisfies_eq1().unwrap());
        assert!(r.is_chain_complex().unwrap());
        let big = r
            .boundary(2)
            .columns()
            .into_iter()
            .max_by_key(SignedChain::nnz)
            .unwrap();
        assert_eq!(big.nnz(), 8);
    }

    #[test]
    fn annulus_outer_holds_extreme_vertex() {
        // Two concentric squares joined by two radial edges.
        let mut set = squares(&[(0.0, 0.0, 4.0), (1.0, 1.0, 2.0)])
            .segments()
            .to_vec();
        set.push([[0.0, 2.0], [1.0, 2.0]]);
        set.push([[3.0, 2.0], [4.0, 2.0]]);
        let r = arrangement2d(&SegmentSet::new(set).unwrap(), 1e-9).unwrap();
        assert_eq!(r.cell_counts()[2], 3);
        let right = r
            .complex
            .verts()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1[0].total_cmp(&b.1[0]).then(b.0.cmp(&a.0)))
            .unwrap()
            .0;
        let touches = r
            .outer
            .support()
            .iter()
            .any(|&e| r.complex.ev()[e].contains(&right));
        assert!(touches);
    }
}
