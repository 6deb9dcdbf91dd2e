//! Dense matrices and subspaces over a finite field.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over {:?}",
            self.rows, self.cols, self.field
        )?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of row reduction.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    /// Builds a matrix from rows of equal length `cols`.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from canonical element integers.
    pub fn from_ints(field: &Field, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| field.element(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, cols, &rows)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_ints(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.index()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols || self.field != other.field {
            return Err(Error::ShapeMismatch(
                "vstack of incompatible matrices".into(),
            ));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Submatrix on the given columns, all rows.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Reduced row echelon form. Zero rows are dropped from the returned matrix.
    pub fn rref(&self) -> Rref {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(sel) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, sel);
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for j in col..m.cols {
                let v = f.mul(m.get(row, j), inv);
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let factor = m.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        m.data.truncate(row * m.cols);
        m.rows = row;
        Rref {
            rank: row,
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis (as rows) of the right kernel `{x : self * x = 0}`.
    pub fn kernel(&self) -> Matrix {
        let Rref { matrix, pivots, .. } = self.rref();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, Elem::ONE);
            for (i, &pc) in pivots.iter().enumerate() {
                out.set(k, pc, f.neg(matrix.get(i, fc)));
            }
        }
        out
    }

    /// Determinant of a square matrix by elimination.
    pub fn det(&self) -> Result<Elem> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Elem::ONE;
        for col in 0..n {
            let Some(sel) = (col..n).find(|&i| !m.get(i, col).is_zero()) else {
                return Ok(Elem::ZERO);
            };
            if sel != col {
                m.swap_rows(col, sel);
                det = f.neg(det);
            }
            let pivot = m.get(col, col);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for i in col + 1..n {
                let factor = f.mul(m.get(i, col), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(col, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }
}

/// A linear subspace of `F^m`, stored as its canonical RREF basis.
///
/// Two subspaces are equal exactly when their canonical bases are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rank())
            .map(|i| {
                let r: Vec<String> = self.basis.row(i).iter().map(|e| e.to_string()).collect();
                format!("({})", r.join(","))
            })
            .collect();
        write!(
            f,
            "span{{{}}} < {:?}^{}",
            rows.join(", "),
            self.field(),
            self.ambient()
        )
    }
}

impl Subspace {
    /// Row space of `mat`, canonicalized.
    pub fn from_rows(mat: &Matrix) -> Self {
        let Rref { matrix, pivots, .. } = mat.rref();
        Subspace {
            basis: matrix,
            pivots,
        }
    }

    /// Span of the given vectors in `F^m`.
    pub fn span(field: &Field, m: usize, vectors: &[Vec<Elem>]) -> Result<Self> {
        Ok(Self::from_rows(&Matrix::from_rows(field, m, vectors)?))
    }

    /// Wraps a matrix already known to be in RREF without zero rows.
    pub(crate) fn from_rref_unchecked(basis: Matrix, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(basis.rref().matrix, basis);
        Subspace { basis, pivots }
    }

    pub fn zero(field: &Field, m: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(field, 0, m),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Field, m: usize) -> Self {
        Subspace {
            basis: Matrix::identity(field, m),
            pivots: (0..m).collect(),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(field: &Field, m: usize, indices: &[usize]) -> Result<Self> {
        let vecs: Vec<Vec<Elem>> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![Elem::ZERO; m];
                v[i] = Elem::ONE;
                v
            })
            .collect();
        Self::span(field, m, &vecs)
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.ambient() != other.ambient() {
            return Err(Error::AmbientMismatch(format!(
                "ambient ranks {} and {}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in the subspace.
    pub fn coordinates_of(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        let f = self.field();
        let coords: Vec<Elem> = self.pivots.iter().map(|&p| v[p]).collect();
        for (j, &x) in v.iter().enumerate().take(self.ambient()) {
            let mut acc = Elem::ZERO;
            for (i, &c) in coords.iter().enumerate() {
                acc = f.add(acc, f.mul(c, self.basis.get(i, j)));
            }
            if acc != x {
                return None;
            }
        }
        Some(coords)
    }

    pub fn contains_vector(&self, v: &[Elem]) -> bool {
        v.len() == self.ambient() && self.coordinates_of(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.compatible(other)?;
        Ok((0..other.rank()).all(|i| self.contains_vector(other.basis.row(i))))
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        Ok(Subspace::from_rows(&self.basis.vstack(&other.basis)?))
    }

    /// `U^⊥` under the standard scalar product.
    pub fn orthogonal_complement(&self) -> Subspace {
        Subspace::from_rows(&self.basis.kernel())
    }

    /// `U ∩ V`, computed as `(U^⊥ ∨ V^⊥)^⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let joined = self
            .orthogonal_complement()
            .join(&other.orthogonal_complement())?;
        Ok(joined.orthogonal_complement())
    }

    /// `rank(U ∩ V)` via the modular law, without building the intersection.
    pub fn meet_rank(&self, other: &Subspace) -> Result<usize> {
        self.compatible(other)?;
        let joined = self.basis.vstack(&other.basis)?.rank();
        Ok(self.rank() + other.rank() - joined)
    }

    /// Text form: header `m=<ambient> q=<field>` then one basis row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("m={} q={}\n", self.ambient(), self.field());
        for i in 0..self.rank() {
            let row: Vec<String> = self.basis.row(i).iter().map(|e| e.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// JSON form `{"m":4,"rows":[[1,0,3,4],[0,1,3,2]]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "m": self.ambient(), "rows": self.basis.to_ints() })
    }

    /// Accepts the [`Subspace::to_json`] form; the rows need not be reduced.
    pub fn from_json(field: &Field, value: &serde_json::Value) -> Result<Subspace> {
        let rows = value
            .get("rows")
            .and_then(|r| r.as_array())
            .ok_or_else(|| Error::Parse("subspace needs a `rows` array".into()))?;
        let rows = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("row must be an array".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .ok_or_else(|| Error::Parse(format!("bad entry {x}")))
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = match value.get("m").and_then(|m| m.as_u64()) {
            Some(m) => m as usize,
            None => rows
                .first()
                .map(Vec::len)
                .ok_or_else(|| Error::Parse("cannot infer ambient rank".into()))?,
        };
        Ok(Subspace::from_rows(&Matrix::from_ints(field, m, &rows)?))
    }

    pub fn from_text(text: &str) -> Result<Subspace> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty subspace text".into()))?;
        let mut m = None;
        let mut field = None;
        for part in header.split_whitespace() {
            if let Some(v) = part.strip_prefix("m=") {
                m = Some(
                    v.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad ambient: {e}")))?,
                );
            } else if let Some(v) = part.strip_prefix("q=") {
                field = Some(v.parse::<Field>()?);
            } else {
                return Err(Error::Parse(format!("unexpected header token `{part}`")));
            }
        }
        let m = m.ok_or_else(|| Error::Parse("missing m= in header".into()))?;
        let field = field.ok_or_else(|| Error::Parse("missing q= in header".into()))?;
        let rows = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|x| {
                        x.parse::<u64>()
                            .map_err(|e| Error::Parse(format!("bad entry `{x}`: {e}")))
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subspace::from_rows(&Matrix::from_ints(&field, m, &rows)?))
    }
}
