//! Linear algebraic representation of a geometric cell complex: vertex
//! coordinates plus sorted vertex lists per dimension, and the operators
//! derived from them.

use crate::chain::{
    filter_entries, unsigned_product, Arithmetic, SignedChain, SignedOperator, UnsignedMatrix,
};
use crate::error::{Error, Result};
use crate::geom::{add, cross, dot, scale, Point3};

/// A strictly increasing list of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCell(Vec<usize>);

impl CanonicalCell {
    pub fn new(mut verts: Vec<usize>) -> Self {
        verts.sort_unstable();
        verts.dedup();
        Self(verts)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl AsRef<[usize]> for CanonicalCell {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

/// Vertex embedding plus edges, faces and (in 3D) solid cells.
///
/// Coordinates are stored in three components; planar complexes keep `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricComplex {
    dim: usize,
    verts: Vec<Point3>,
    ev: Vec<[usize; 2]>,
    fv: Vec<Vec<usize>>,
    cv: Vec<Vec<usize>>,
}

impl GeometricComplex {
    pub fn new(
        dim: usize,
        verts: Vec<Point3>,
        ev: Vec<[usize; 2]>,
        fv: Vec<Vec<usize>>,
        cv: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Validation(format!(
                "ambient dimension must be 2 or 3, got {dim}"
            )));
        }
        let n = verts.len();
        if let Some(bad) = verts.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::Validation(format!(
                "vertex {bad} has a non-finite coordinate"
            )));
        }
        let mut ev_sorted = Vec::with_capacity(ev.len());
        for (k, &[a, b]) in ev.iter().enumerate() {
            check_index(a, n)?;
            check_index(b, n)?;
            if a == b {
                return Err(Error::DegenerateEdge(k));
            }
            ev_sorted.push([a.min(b), a.max(b)]);
        }
        check_unique(ev_sorted.iter().map(|e| e.to_vec()), "edge")?;
        let canon = |cells: Vec<Vec<usize>>, what: &str| -> Result<Vec<Vec<usize>>> {
            let out: Vec<Vec<usize>> = cells
                .into_iter()
                .map(|c| CanonicalCell::new(c).into_inner())
                .collect();
            for c in &out {
                for &v in c {
                    check_index(v, n)?;
                }
            }
            check_unique(out.iter().cloned(), what)?;
            Ok(out)
        };
        let fv = canon(fv, "face")?;
        let cv = canon(cv, "solid cell")?;
        let verts = if dim == 2 {
            verts.into_iter().map(|p| [p[0], p[1], 0.0]).collect()
        } else {
            verts
        };
        Ok(Self {
            dim,
            verts,
            ev: ev_sorted,
            fv,
            cv,
        })
    }

    /// Trusted constructor for pipeline output: cells are sorted but not
    /// checked for duplicates, since the boundary operators carry identity.
    pub(crate) fn from_parts(
        dim: usize,
        verts: Vec<Point3>,
        ev: Vec<[usize; 2]>,
        fv: Vec<Vec<usize>>,
        cv: Vec<Vec<usize>>,
    ) -> Self {
        let sort = |cells: Vec<Vec<usize>>| {
            cells
                .into_iter()
                .map(|c| CanonicalCell::new(c).into_inner())
                .collect()
        };
        Self {
            dim,
            verts,
            ev,
            fv: sort(fv),
            cv: sort(cv),
        }
    }

    /// Planar complex from 2D points.
    pub fn planar(points: &[[f64; 2]], ev: Vec<[usize; 2]>, fv: Vec<Vec<usize>>) -> Result<Self> {
        let verts = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
        Self::new(2, verts, ev, fv, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn verts(&self) -> &[Point3] {
        &self.verts
    }

    pub fn ev(&self) -> &[[usize; 2]] {
        &self.ev
    }

    pub fn fv(&self) -> &[Vec<usize>] {
        &self.fv
    }

    pub fn cv(&self) -> &[Vec<usize>] {
        &self.cv
    }

    /// Cell lists of dimension `p` (1 = EV, 2 = FV, 3 = CV).
    pub fn cells(&self, p: usize) -> Vec<Vec<usize>> {
        match p {
            0 => (0..self.verts.len()).map(|v| vec![v]).collect(),
            1 => self.ev.iter().map(|e| e.to_vec()).collect(),
            2 => self.fv.clone(),
            3 => self.cv.clone(),
            _ => Vec::new(),
        }
    }

    pub fn signed_boundary_1(&self) -> Result<SignedOperator> {
        signed_boundary_1(&self.ev, self.verts.len())
    }

    /// Coherently oriented face boundaries, each walked from its lowest
    /// edge in that edge's stored direction.
    pub fn oriented_face_boundary(&self) -> Result<SignedOperator> {
        let unsigned = unsigned_boundary_2(&self.fv, &self.ev, self.verts.len())?;
        let by_face = unsigned.transpose();
        let mut columns = Vec::with_capacity(self.fv.len());
        for f in 0..self.fv.len() {
            columns.push(
                orient_face_edges(&self.verts, &self.ev, by_face.row(f)).map_err(|e| match e {
                    Error::OpenChain => {
                        Error::Validation(format!("face {f} boundary is not closed"))
                    }
                    other => other,
                })?,
            );
        }
        SignedOperator::boundary(2, self.ev.len(), columns)
    }
}

fn check_index(v: usize, n: usize) -> Result<()> {
    if v >= n {
        Err(Error::IndexOutOfRange { index: v, size: n })
    } else {
        Ok(())
    }
}

fn check_unique(cells: impl Iterator<Item = Vec<usize>>, what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for c in cells {
        if !seen.insert(c.clone()) {
            return Err(Error::Validation(format!("duplicate {what} {c:?}")));
        }
    }
    Ok(())
}

pub fn characteristic_matrix<C: AsRef<[usize]>>(
    cells: &[C],
    n_verts: usize,
) -> Result<UnsignedMatrix> {
    let rows: Vec<Vec<usize>> = cells.iter().map(|c| c.as_ref().to_vec()).collect();
    UnsignedMatrix::from_rows(n_verts, &rows)
}

/// `+1` at the higher vertex index and `-1` at the lower one, per edge.
pub fn signed_boundary_1(ev: &[[usize; 2]], n_verts: usize) -> Result<SignedOperator> {
    let mut columns = Vec::with_capacity(ev.len());
    for (k, &[a, b]) in ev.iter().enumerate() {
        check_index(a, n_verts)?;
        check_index(b, n_verts)?;
        if a == b {
            return Err(Error::DegenerateEdge(k));
        }
        columns.push(vec![(a.min(b), -1), (a.max(b), 1)]);
    }
    SignedOperator::boundary(1, n_verts, columns)
}

/// Edge-by-face incidence: an edge bounds a face when both endpoints belong
/// to the face's vertex set.
pub fn unsigned_boundary_2<F: AsRef<[usize]>>(
    fv: &[F],
    ev: &[[usize; 2]],
    n_verts: usize,
) -> Result<UnsignedMatrix> {
    let m1 = characteristic_matrix(ev, n_verts)?;
    let m2 = characteristic_matrix(fv, n_verts)?;
    Ok(filter_entries(&unsigned_product(&m1, &m2)?, 2))
}

/// Orients the edges of one face into coherent cycles: the longest cycle
/// (by vector area) is the outer boundary and the others run opposite to it.
/// The result is normalized so the lowest edge carries `+1`.
pub fn orient_face_edges(
    verts: &[Point3],
    ev: &[[usize; 2]],
    edges: &[usize],
) -> Result<Vec<(usize, i8)>> {
    use std::collections::HashMap;
    let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edges {
        for v in ev[e] {
            at.entry(v).or_default().push(e);
        }
    }
    if at.values().any(|inc| inc.len() % 2 == 1) {
        return Err(Error::OpenChain);
    }
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    let mut used: HashMap<usize, bool> = sorted.iter().map(|&e| (e, false)).collect();
    let mut cycles: Vec<(Vec<(usize, i8)>, Point3)> = Vec::new();
    for &start in &sorted {
        if used[&start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut area = [0.0; 3];
        let (mut e, mut sign) = (start, 1i8);
        loop {
            used.insert(e, true);
            cycle.push((e, sign));
            let [lo, hi] = ev[e];
            let (from, to) = if sign > 0 { (lo, hi) } else { (hi, lo) };
            area = add(area, cross(verts[from], verts[to]));
            let next = at[&to].iter().copied().find(|n| !used[n]);
            match next {
                Some(n) => {
                    sign = if ev[n][0] == to { 1 } else { -1 };
                    e = n;
                }
                None => break,
            }
        }
        cycles.push((cycle, scale(area, 0.5)));
    }
    let outer = cycles
        .iter()
        .enumerate()
        .max_by(|a, b| dot(a.1 .1, a.1 .1).total_cmp(&dot(b.1 .1, b.1 .1)))
        .map(|(k, _)| k)
        .ok_or(Error::OpenChain)?;
    let normal = cycles[outer].1;
    let mut column: Vec<(usize, i8)> = Vec::with_capacity(edges.len());
    for (k, (cycle, area)) in cycles.iter().enumerate() {
        let flip = k != outer && dot(*area, normal) > 0.0;
        column.extend(cycle.iter().map(|&(e, s)| (e, if flip { -s } else { s })));
    }
    column.sort_unstable_by_key(|e| e.0);
    if column.first().is_some_and(|e| e.1 < 0) {
        for e in &mut column {
            e.1 = -e.1;
        }
    }
    Ok(column)
}

/// Oriented area (2D) or volume (3D) enclosed by a cycle of codimension-one
/// cells.
pub fn signed_measure(cycle: &SignedChain, complex: &GeometricComplex) -> Result<f64> {
    match complex.dim {
        2 => signed_measure_with(cycle, complex.verts(), complex.ev(), None),
        _ => {
            let faces = complex.oriented_face_boundary()?;
            signed_measure_with(cycle, complex.verts(), complex.ev(), Some(&faces))
        }
    }
}

/// [`signed_measure`] with an explicit face boundary operator for 3D cycles.
pub fn signed_measure_with(
    cycle: &SignedChain,
    verts: &[Point3],
    ev: &[[usize; 2]],
    faces: Option<&SignedOperator>,
) -> Result<f64> {
    match faces {
        None => {
            if cycle.len() != ev.len() || cycle.dim() != 1 {
                return Err(Error::DimensionMismatch(
                    "area needs a 1-chain over all edges".into(),
                ));
            }
            let d1 = signed_boundary_1(ev, verts.len())?;
            if !d1.apply(cycle, Arithmetic::Integer)?.is_zero() {
                return Err(Error::OpenChain);
            }
            Ok(cycle_area_z(cycle.entries(), verts, ev))
        }
        Some(d2) => {
            if cycle.len() != d2.cols() || cycle.dim() != 2 {
                return Err(Error::DimensionMismatch(
                    "volume needs a 2-chain over all faces".into(),
                ));
            }
            if !d2.apply(cycle, Arithmetic::Integer)?.is_zero() {
                return Err(Error::OpenChain);
            }
            Ok(shell_volume(cycle.entries(), verts, ev, d2))
        }
    }
}

/// Twice-halved shoelace sum over oriented edges.
pub(crate) fn cycle_area_z(entries: &[(usize, i8)], verts: &[Point3], ev: &[[usize; 2]]) -> f64 {
    let mut s = 0.0;
    for &(e, c) in entries {
        let [a, b] = ev[e];
        let (pa, pb) = (verts[a], verts[b]);
        s += f64::from(c) * (pa[0] * pb[1] - pa[1] * pb[0]);
    }
    0.5 * s
}

/// Vector area of an oriented edge cycle.
pub(crate) fn vector_area(
    entries: impl Iterator<Item = (usize, i8)>,
    verts: &[Point3],
    ev: &[[usize; 2]],
) -> Point3 {
    let mut a = [0.0; 3];
    for (e, c) in entries {
        let [lo, hi] = ev[e];
        a = add(a, scale(cross(verts[lo], verts[hi]), f64::from(c)));
    }
    scale(a, 0.5)
}

pub(crate) fn shell_volume(
    entries: &[(usize, i8)],
    verts: &[Point3],
    ev: &[[usize; 2]],
    d2: &SignedOperator,
) -> f64 {
    let mut v = 0.0;
    for &(f, c) in entries {
        let area = vector_area(d2.column(f), verts, ev);
        let Some(e0) = d2.column(f).next() else {
            continue;
        };
        let p0 = verts[ev[e0.0][0]];
        v += f64::from(c) * dot(p0, area);
    }
    v / 3.0
}

/// Full pipeline output: graded cell bases and boundary operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainComplexResult {
    pub complex: GeometricComplex,
    /// `[∂_1, ..., ∂_d]`; columns of `∂_d` are the bounded top cells.
    pub boundaries: Vec<SignedOperator>,
    /// Boundary of the unbounded top cell.
    pub outer: SignedChain,
}

impl ChainComplexResult {
    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn boundary(&self, p: usize) -> &SignedOperator {
        &self.boundaries[p - 1]
    }

    /// Cell counts per dimension, bounded top cells only.
    pub fn cell_counts(&self) -> Vec<usize> {
        let mut c = vec![self.complex.verts().len()];
        c.extend(self.boundaries.iter().map(SignedOperator::cols));
        c
    }

    /// Cell counts with the unbounded top cell included.
    pub fn augmented_counts(&self) -> Vec<usize> {
        let mut c = self.cell_counts();
        if let Some(last) = c.last_mut() {
            *last += 1;
        }
        c
    }

    /// Top boundary operator with the outer cell appended as a last column.
    pub fn augmented_top(&self) -> Result<SignedOperator> {
        self.boundaries
            .last()
            .ok_or_else(|| Error::Validation("empty complex".into()))?
            .append_column(&self.outer)
    }

    /// `∂_p ∘ ∂_{p+1} = 0` for every consecutive pair, including the outer cell.
    pub fn is_chain_complex(&self) -> Result<bool> {
        for p in 1..self.boundaries.len() {
            if !self.boundaries[p - 1].composes_to_zero(&self.boundaries[p])? {
                return Ok(false);
            }
        }
        let d = self.boundaries.len();
        if d >= 2 {
            let img = self.boundaries[d - 2].apply(&self.outer, Arithmetic::Integer)?;
            if !img.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every codimension-one cell lies in exactly two top cells counting the
    /// outer one, with opposite signs.
    pub fn satisfies_eq1(&self) -> Result<bool> {
        let top = self.augmented_top()?;
        let rows = top.rows();
        let t = top.transpose();
        let ok = (0..rows).all(|r| {
            let vals: Vec<i8> = t.column(r).map(|e| e.1).collect();
            vals.len() == 2 && vals[0] + vals[1] == 0
        });
        Ok(ok && top.nnz() == 2 * rows)
    }
}

/// Alternating sum of cell counts, optionally counting the unbounded cell.
pub fn euler_characteristic(result: &ChainComplexResult, include_outer: bool) -> i64 {
    let counts = if include_outer {
        result.augmented_counts()
    } else {
        result.cell_counts()
    };
    counts
        .iter()
        .enumerate()
        .map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}
