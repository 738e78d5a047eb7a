//! Sparse chains and operator matrices with coefficients in {-1, 0, +1}.
//!
//! Arithmetic is exact over the integers. Any entry that leaves {-1, 0, +1}
//! after cancellation is reported as [`Error::CoefficientOverflow`], since a
//! coherently oriented complex never produces one.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// How products are reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    /// Exact integers; results must stay within {-1, 0, +1}.
    Integer,
    /// Coefficients reduced modulo 2 (orientation ignored).
    Mod2,
}

/// A sparse p-chain: sorted `(index, ±1)` pairs over a basis of `len` cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedChain {
    dim: u8,
    len: usize,
    entries: Vec<(usize, i8)>,
}

impl SignedChain {
    pub fn zero(dim: u8, len: usize) -> Self {
        Self {
            dim,
            len,
            entries: Vec::new(),
        }
    }

    pub fn unit(dim: u8, len: usize, index: usize, sign: i8) -> Result<Self> {
        Self::from_entries(dim, len, [(index, i64::from(sign))])
    }

    /// Builds a chain from possibly repeated entries, summing duplicates.
    pub fn from_entries<I>(dim: u8, len: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut raw: Vec<(usize, i64)> = entries.into_iter().collect();
        raw.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(usize, i8)> = Vec::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            let idx = raw[i].0;
            if idx >= len {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    size: len,
                });
            }
            let mut v = 0i64;
            while i < raw.len() && raw[i].0 == idx {
                v += raw[i].1;
                i += 1;
            }
            match v {
                0 => {}
                1 | -1 => out.push((idx, v as i8)),
                _ => {
                    return Err(Error::CoefficientOverflow {
                        index: idx,
                        value: v,
                    })
                }
            }
        }
        Ok(Self {
            dim,
            len,
            entries: out,
        })
    }

    pub fn from_dense(dim: u8, values: &[i64]) -> Result<Self> {
        Self::from_entries(dim, values.len(), values.iter().copied().enumerate())
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Size of the underlying basis.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, i8)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> i8 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.len];
        for &(i, c) in &self.entries {
            v[i] = i64::from(c);
        }
        v
    }

    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            len: self.len,
            entries: self.entries.iter().map(|&(i, c)| (i, -c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &SignedChain) -> Result<Self> {
        if self.dim != other.dim || self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "cannot add a {}-chain over {} cells to a {}-chain over {} cells",
                self.dim, self.len, other.dim, other.len
            )));
        }
        let merged = self
            .entries
            .iter()
            .chain(other.entries.iter())
            .map(|&(i, c)| (i, i64::from(c)));
        Self::from_entries(self.dim, self.len, merged)
    }
}

/// A boundary or coboundary matrix in compressed sparse column form.
///
/// Column `j` is the image of the `j`-th basis cell of the domain; rows are
/// sorted and unique within each column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedOperator {
    domain_dim: u8,
    codomain_dim: u8,
    rows: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<i8>,
}

/// Structural edit applied by [`column_ops`].
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnAction {
    Append(SignedChain),
    Remove(usize),
    Negate(usize),
}

impl SignedOperator {
    /// Boundary operator `C_p -> C_{p-1}` from its columns.
    pub fn boundary(p: u8, rows: usize, columns: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        Self::from_columns(p, p.saturating_sub(1), rows, columns)
    }

    pub fn from_columns(
        domain_dim: u8,
        codomain_dim: u8,
        rows: usize,
        columns: Vec<Vec<(usize, i8)>>,
    ) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for col in columns {
            let chain = SignedChain::from_entries(
                codomain_dim,
                rows,
                col.into_iter().map(|(i, v)| (i, i64::from(v))),
            )?;
            for (i, v) in chain.entries {
                row_idx.push(i);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            domain_dim,
            codomain_dim,
            rows,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Operator whose columns are the given chains.
    pub fn from_chains(domain_dim: u8, rows: usize, chains: &[SignedChain]) -> Result<Self> {
        let codomain_dim = domain_dim.saturating_sub(1);
        let mut col_ptr = Vec::with_capacity(chains.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for c in chains {
            if c.len != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column chain over {} cells, operator has {} rows",
                    c.len, rows
                )));
            }
            for &(i, v) in &c.entries {
                row_idx.push(i);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            domain_dim,
            codomain_dim,
            rows,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn zeros(domain_dim: u8, codomain_dim: u8, rows: usize, cols: usize) -> Self {
        Self {
            domain_dim,
            codomain_dim,
            rows,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from 0-based `(row, col, value)` triples; duplicates are summed.
    pub fn from_coo(
        domain_dim: u8,
        codomain_dim: u8,
        rows: usize,
        cols: usize,
        triples: &[(usize, usize, i64)],
    ) -> Result<Self> {
        let mut columns: Vec<Vec<(usize, i64)>> = vec![Vec::new(); cols];
        for &(i, j, v) in triples {
            if j >= cols {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    size: cols,
                });
            }
            if i >= rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: rows,
                });
            }
            columns[j].push((i, v));
        }
        let mut out = Self::zeros(domain_dim, codomain_dim, rows, 0);
        for col in columns {
            let chain = SignedChain::from_entries(codomain_dim, rows, col)?;
            out.push_chain_entries(&chain.entries);
        }
        Ok(out)
    }

    fn push_chain_entries(&mut self, entries: &[(usize, i8)]) {
        for &(i, v) in entries {
            self.row_idx.push(i);
            self.values.push(v);
        }
        self.col_ptr.push(self.row_idx.len());
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn domain_dim(&self) -> u8 {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> u8 {
        self.codomain_dim
    }

    /// Stored `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        self.row_idx[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn column_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    pub fn column_rows(&self, j: usize) -> &[usize] {
        &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn column_chain(&self, j: usize) -> SignedChain {
        SignedChain {
            dim: self.codomain_dim,
            len: self.rows,
            entries: self.column(j).collect(),
        }
    }

    pub fn columns(&self) -> Vec<SignedChain> {
        (0..self.cols()).map(|j| self.column_chain(j)).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        let rows = self.column_rows(j);
        match rows.binary_search(&i) {
            Ok(k) => self.values[self.col_ptr[j] + k],
            Err(_) => 0,
        }
    }

    /// Column-major `(row, col, value)` triples.
    pub fn to_coo(&self) -> Vec<(usize, usize, i8)> {
        (0..self.cols())
            .flat_map(|j| self.column(j).map(move |(i, v)| (i, j, v)))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols()]; self.rows];
        for (i, j, v) in self.to_coo() {
            m[i][j] = i64::from(v);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let cols = self.cols();
        let mut counts = vec![0usize; self.rows + 1];
        for &i in &self.row_idx {
            counts[i + 1] += 1;
        }
        for i in 0..self.rows {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0usize; self.nnz()];
        let mut values = vec![0i8; self.nnz()];
        // Visiting source columns in order keeps target columns sorted.
        for j in 0..cols {
            for (i, v) in self.column(j) {
                let slot = next[i];
                row_idx[slot] = j;
                values[slot] = v;
                next[i] += 1;
            }
        }
        Self {
            domain_dim: self.codomain_dim,
            codomain_dim: self.domain_dim,
            rows: cols,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Unreduced integer product `self * c`, sorted by row.
    pub fn apply_raw(&self, c: &SignedChain) -> Result<Vec<(usize, i64)>> {
        if c.len != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "chain over {} cells, operator has {} columns",
                c.len,
                self.cols()
            )));
        }
        let mut acc: Vec<(usize, i64)> = Vec::new();
        for &(j, cj) in &c.entries {
            for (i, v) in self.column(j) {
                acc.push((i, i64::from(v) * i64::from(cj)));
            }
        }
        acc.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(acc.len());
        for (i, v) in acc {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|e| e.1 != 0);
        Ok(out)
    }

    pub fn apply(&self, c: &SignedChain, arithmetic: Arithmetic) -> Result<SignedChain> {
        if c.dim != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "{}-chain given to an operator on {}-chains",
                c.dim, self.domain_dim
            )));
        }
        let raw = self.apply_raw(c)?;
        match arithmetic {
            Arithmetic::Integer => SignedChain::from_entries(self.codomain_dim, self.rows, raw),
            Arithmetic::Mod2 => SignedChain::from_entries(
                self.codomain_dim,
                self.rows,
                raw.into_iter()
                    .filter(|e| e.1.rem_euclid(2) == 1)
                    .map(|e| (e.0, 1)),
            ),
        }
    }

    /// True when `self * rhs` is exactly the zero matrix over the integers.
    pub fn composes_to_zero(&self, rhs: &SignedOperator) -> Result<bool> {
        if self.cols() != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols(),
                rhs.rows,
                rhs.cols()
            )));
        }
        let bad = (0..rhs.cols()).into_par_iter().find_any(|&j| {
            let c = SignedChain {
                dim: self.domain_dim,
                len: rhs.rows,
                entries: rhs.column(j).collect(),
            };
            !self.apply_raw(&c).map(|r| r.is_empty()).unwrap_or(false)
        });
        Ok(bad.is_none())
    }

    /// Integer sum of all columns.
    pub fn column_sum(&self) -> Vec<(usize, i64)> {
        let mut dense = vec![0i64; self.rows];
        for (&i, &v) in self.row_idx.iter().zip(&self.values) {
            dense[i] += i64::from(v);
        }
        dense.into_iter().enumerate().filter(|e| e.1 != 0).collect()
    }

    pub fn select_columns(&self, keep: &[usize]) -> Result<Self> {
        let mut out = Self::zeros(self.domain_dim, self.codomain_dim, self.rows, 0);
        for &j in keep {
            if j >= self.cols() {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    size: self.cols(),
                });
            }
            let entries: Vec<(usize, i8)> = self.column(j).collect();
            out.push_chain_entries(&entries);
        }
        Ok(out)
    }

    pub fn append_column(&self, c: &SignedChain) -> Result<Self> {
        if c.len != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "column over {} cells, operator has {} rows",
                c.len, self.rows
            )));
        }
        let mut out = self.clone();
        out.push_chain_entries(&c.entries);
        Ok(out)
    }

    pub fn remove_column(&self, j: usize) -> Result<Self> {
        if j >= self.cols() {
            return Err(Error::IndexOutOfRange {
                index: j,
                size: self.cols(),
            });
        }
        let keep: Vec<usize> = (0..self.cols()).filter(|&k| k != j).collect();
        self.select_columns(&keep)
    }

    pub fn negate_column(&self, j: usize) -> Result<Self> {
        if j >= self.cols() {
            return Err(Error::IndexOutOfRange {
                index: j,
                size: self.cols(),
            });
        }
        let mut out = self.clone();
        for v in &mut out.values[self.col_ptr[j]..self.col_ptr[j + 1]] {
            *v = -*v;
        }
        Ok(out)
    }

    /// Multiplies row `i` by -1 (re-orients one codomain cell).
    pub fn negate_row(&mut self, i: usize) {
        for (r, v) in self.row_idx.iter().zip(self.values.iter_mut()) {
            if *r == i {
                *v = -*v;
            }
        }
    }

    /// Flips every row whose entry in `signs` is negative.
    pub fn reorient_rows(&mut self, signs: &[i8]) {
        for (r, v) in self.row_idx.iter().zip(self.values.iter_mut()) {
            if signs[*r] < 0 {
                *v = -*v;
            }
        }
    }

    /// Coordinate text exchange format, 1-based, column-major.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate integer general\n");
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols(), self.nnz());
        for (i, j, v) in self.to_coo() {
            let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
        }
        s
    }

    pub fn from_matrix_market(text: &str, domain_dim: u8, codomain_dim: u8) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
        if tokens.len() != 5
            || tokens[0] != "%%matrixmarket"
            || tokens[1] != "matrix"
            || tokens[2] != "coordinate"
            || tokens[3] != "integer"
            || tokens[4] != "general"
        {
            return Err(Error::Parse(format!("unsupported matrix header: {header}")));
        }
        let mut body = lines
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('%'));
        let size = body
            .next()
            .ok_or_else(|| Error::Parse("missing size line".into()))?;
        let dims = parse_numbers::<usize>(size, 3)?;
        let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
        let mut triples = Vec::with_capacity(nnz);
        for line in body {
            let f = parse_numbers::<i64>(line, 3)?;
            if f[0] < 1 || f[1] < 1 {
                return Err(Error::Parse(format!("non-positive index in '{line}'")));
            }
            triples.push(((f[0] - 1) as usize, (f[1] - 1) as usize, f[2]));
        }
        if triples.len() != nnz {
            return Err(Error::Parse(format!(
                "expected {nnz} entries, found {}",
                triples.len()
            )));
        }
        Self::from_coo(domain_dim, codomain_dim, rows, cols, &triples)
    }
}

fn parse_numbers<T: std::str::FromStr>(line: &str, n: usize) -> Result<Vec<T>> {
    let out: Vec<T> = line
        .split_whitespace()
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::Parse(format!("bad number '{t}'")))
        })
        .collect::<Result<_>>()?;
    if out.len() != n {
        return Err(Error::Parse(format!("expected {n} fields in '{line}'")));
    }
    Ok(out)
}

pub fn apply_operator(
    op: &SignedOperator,
    c: &SignedChain,
    arithmetic: Arithmetic,
) -> Result<SignedChain> {
    op.apply(c, arithmetic)
}

pub fn transpose(op: &SignedOperator) -> SignedOperator {
    op.transpose()
}

pub fn column_ops(op: &SignedOperator, action: &ColumnAction) -> Result<SignedOperator> {
    match action {
        ColumnAction::Append(c) => op.append_column(c),
        ColumnAction::Remove(j) => op.remove_column(*j),
        ColumnAction::Negate(j) => op.negate_column(*j),
    }
}

/// Binary matrix in compressed sparse row form (values implicitly 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnsignedMatrix {
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl UnsignedMatrix {
    /// Rows are sorted and deduplicated.
    pub fn from_rows(cols: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for r in rows {
            let mut r = r.clone();
            r.sort_unstable();
            r.dedup();
            if let Some(&bad) = r.iter().find(|&&c| c >= cols) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    size: cols,
                });
            }
            col_idx.extend(r);
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            cols,
            row_ptr,
            col_idx,
        })
    }

    /// Sparsity pattern of a signed operator (row-wise).
    pub fn pattern_of(op: &SignedOperator) -> Self {
        let t = op.transpose();
        let rows: Vec<Vec<usize>> = (0..t.cols()).map(|i| t.column_rows(i).to_vec()).collect();
        Self {
            cols: op.cols(),
            row_ptr: prefix(&rows),
            col_idx: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        (0..self.rows()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); self.cols];
        for i in 0..self.rows() {
            for &j in self.row(i) {
                rows[j].push(i);
            }
        }
        Self {
            cols: self.rows(),
            row_ptr: prefix(&rows),
            col_idx: rows.concat(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows()];
        for (i, row) in m.iter_mut().enumerate() {
            for &j in self.row(i) {
                row[j] = 1;
            }
        }
        m
    }

    /// Applies the matrix to the indicator vector of `support`.
    pub fn apply(&self, support: &[usize], arithmetic: Arithmetic) -> Result<Vec<i64>> {
        let mut x = vec![false; self.cols];
        for &j in support {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    size: self.cols,
                });
            }
            x[j] = true;
        }
        Ok((0..self.rows())
            .map(|i| {
                let v = self.row(i).iter().filter(|&&j| x[j]).count() as i64;
                match arithmetic {
                    Arithmetic::Integer => v,
                    Arithmetic::Mod2 => v % 2,
                }
            })
            .collect())
    }
}

fn prefix(rows: &[Vec<usize>]) -> Vec<usize> {
    let mut p = Vec::with_capacity(rows.len() + 1);
    p.push(0);
    for r in rows {
        p.push(p.last().copied().unwrap_or(0) + r.len());
    }
    p
}

/// Sparse matrix of positive integer counts (compressed rows).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<u32>,
}

impl IntegerMatrix {
    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.row(i).find(|e| e.0 == j).map(|e| e.1).unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows()];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = i64::from(v);
            }
        }
        m
    }
}

/// `A * Bᵗ` where entry `(i, j)` counts the shared columns of row `i` of `A`
/// and row `j` of `B`.
pub fn unsigned_product(a: &UnsignedMatrix, b: &UnsignedMatrix) -> Result<IntegerMatrix> {
    if a.cols != b.cols {
        return Err(Error::DimensionMismatch(format!(
            "product needs equal column counts, got {} and {}",
            a.cols, b.cols
        )));
    }
    let by_col = b.transpose();
    let rows: Vec<Vec<(usize, u32)>> = (0..a.rows())
        .into_par_iter()
        .map(|i| {
            let mut hits: Vec<usize> = a
                .row(i)
                .iter()
                .flat_map(|&k| by_col.row(k).iter().copied())
                .collect();
            hits.sort_unstable();
            let mut out: Vec<(usize, u32)> = Vec::new();
            for j in hits {
                match out.last_mut() {
                    Some(last) if last.0 == j => last.1 += 1,
                    _ => out.push((j, 1)),
                }
            }
            out
        })
        .collect();
    let mut row_ptr = vec![0];
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for r in rows {
        for (j, v) in r {
            col_idx.push(j);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(IntegerMatrix {
        cols: b.rows(),
        row_ptr,
        col_idx,
        values,
    })
}

/// Keeps exactly the positions whose value equals `k`.
pub fn filter_entries(m: &IntegerMatrix, k: u32) -> UnsignedMatrix {
    let rows: Vec<Vec<usize>> = (0..m.rows())
        .map(|i| m.row(i).filter(|e| e.1 == k).map(|e| e.0).collect())
        .collect();
    UnsignedMatrix {
        cols: m.cols,
        row_ptr: prefix(&rows),
        col_idx: rows.concat(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
        let mut c = vec![vec![0; p]; n];
        for i in 0..n {
            for k in 0..m {
                for j in 0..p {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    fn path_graph(n: usize) -> UnsignedMatrix {
        let rows: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        UnsignedMatrix::from_rows(n, &rows).unwrap()
    }

    #[test]
    fn chain_rejects_large_coefficients() {
        let err = SignedChain::from_entries(1, 4, [(1, 1), (1, 1)]).unwrap_err();
        assert_eq!(err, Error::CoefficientOverflow { index: 1, value: 2 });
        let ok = SignedChain::from_entries(1, 4, [(1, 1), (1, -1), (3, -1)]).unwrap();
        assert_eq!(ok.entries(), &[(3, -1)]);
    }

    #[test]
    fn zero_chain_maps_to_zero() {
        let op = SignedOperator::boundary(1, 2, vec![vec![(0, -1), (1, 1)]]).unwrap();
        let z = SignedChain::zero(1, 1);
        assert!(op.apply(&z, Arithmetic::Integer).unwrap().is_zero());
    }

    #[test]
    fn dimension_checks() {
        let op = SignedOperator::boundary(1, 2, vec![vec![(0, -1), (1, 1)]]).unwrap();
        assert!(matches!(
            op.apply(&SignedChain::zero(1, 3), Arithmetic::Integer),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            op.apply(&SignedChain::zero(2, 1), Arithmetic::Integer),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn transpose_of_empty() {
        let t = SignedOperator::zeros(2, 1, 3, 5).transpose();
        assert_eq!((t.rows(), t.cols(), t.nnz()), (5, 3, 0));
    }

    #[test]
    fn identity_product_gives_row_cardinalities() {
        let m = UnsignedMatrix::from_rows(5, &[vec![0, 1, 2], vec![3], vec![1, 4]]).unwrap();
        let p = unsigned_product(&m, &m).unwrap();
        assert_eq!(p.get(0, 0), 3);
        assert_eq!(p.get(1, 1), 1);
        assert_eq!(p.get(2, 2), 2);
        assert_eq!(p.get(0, 2), 1);
        let eye =
            UnsignedMatrix::from_rows(4, &(0..4).map(|i| vec![i]).collect::<Vec<_>>()).unwrap();
        let d = unsigned_product(&eye, &eye).unwrap().to_dense();
        for (i, row) in d.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, i64::from(i == j));
            }
        }
    }

    #[test]
    fn filter_above_max_is_empty() {
        let m = path_graph(6);
        let p = unsigned_product(&m, &m).unwrap();
        assert_eq!(filter_entries(&p, 3).nnz(), 0);
    }

    #[test]
    fn filter_one_on_path_gives_edge_adjacency() {
        let m = path_graph(7);
        let p = unsigned_product(&m, &m).unwrap();
        let adj = filter_entries(&p, 1).to_dense();
        let dm = m.to_dense();
        let mt: Vec<Vec<i64>> = (0..dm[0].len())
            .map(|j| dm.iter().map(|r| r[j]).collect())
            .collect();
        let oracle = dense_mul(&dm, &mt);
        for i in 0..adj.len() {
            for j in 0..adj.len() {
                assert_eq!(adj[i][j], i64::from(oracle[i][j] == 1));
                if i == j {
                    assert_eq!(adj[i][j], 0);
                }
            }
        }
    }

    #[test]
    fn remove_and_negate_columns() {
        let op = SignedOperator::boundary(
            1,
            3,
            vec![
                vec![(0, -1), (1, 1)],
                vec![(1, -1), (2, 1)],
                vec![(0, -1), (2, 1)],
            ],
        )
        .unwrap();
        let r = op.remove_column(1).unwrap();
        assert_eq!(r.cols(), 2);
        assert_eq!(r.column_chain(0), op.column_chain(0));
        assert_eq!(r.column_chain(1), op.column_chain(2));
        assert_eq!(op.negate_column(2).unwrap().negate_column(2).unwrap(), op);
        assert!(matches!(
            op.remove_column(3),
            Err(Error::IndexOutOfRange { .. })
        ));
        let c = column_ops(&op, &ColumnAction::Negate(0)).unwrap();
        assert_eq!(c.get(0, 0), 1);
    }

    #[test]
    fn matrix_market_round_trip() {
        let op = SignedOperator::boundary(
            1,
            3,
            vec![vec![(0, -1), (2, 1)], vec![], vec![(1, 1), (2, -1)]],
        )
        .unwrap();
        let text = op.to_matrix_market();
        assert!(
            text.starts_with("%%MatrixMarket matrix coordinate integer general\n3 3 4\n1 1 -1\n")
        );
        let back = SignedOperator::from_matrix_market(&text, 1, 0).unwrap();
        assert_eq!(back, op);
        assert!(SignedOperator::from_matrix_market(
            "%%MatrixMarket matrix array real general\n",
            1,
            0
        )
        .is_err());
    }

    #[test]
    fn mod2_application_drops_orientation() {
        let op = SignedOperator::boundary(1, 3, vec![vec![(0, -1), (1, 1)], vec![(1, -1), (2, 1)]])
            .unwrap();
        let c = SignedChain::from_dense(1, &[1, 1]).unwrap();
        let r = op.apply(&c, Arithmetic::Mod2).unwrap();
        assert_eq!(r.to_dense(), vec![1, 0, 1]);
    }
}
