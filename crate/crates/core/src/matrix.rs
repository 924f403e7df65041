//! Quantale-valued matrices, the concrete form of relations.

use crate::quantale::{Elem, Quantale};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Elem>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, v: Elem) -> Self {
        Matrix::new(rows, cols, vec![v; rows * cols])
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Unit on the diagonal, bottom elsewhere.
    pub fn crisp_identity(q: &Quantale, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { q.unit() } else { q.bottom() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `(self ; other)(x,z) = ⋁_y self(x,y)·other(y,z)`.
    pub fn compose(&self, other: &Matrix, q: &Quantale) -> Matrix {
        assert_eq!(self.cols, other.rows, "composing matrices of mismatched shape");
        let mut out = Matrix::filled(self.rows, other.cols, q.bottom());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == q.bottom() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = q.join(out.get(i, j), q.tensor(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn leq(&self, other: &Matrix, q: &Quantale) -> bool {
        self.data.iter().zip(&other.data).all(|(&a, &b)| q.leq(a, b))
    }

    pub fn join(&self, other: &Matrix, q: &Quantale) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| q.join(a, b)).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    /// Rows of quantale element names, the wire form of a matrix.
    pub fn to_names(&self, q: &Quantale) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| q.name(self.get(i, j)).to_string()).collect())
            .collect()
    }

    pub fn from_names(rows: &[Vec<String>], q: &Quantale) -> Result<Matrix, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err("ragged matrix".to_string());
            }
            for s in row {
                data.push(q.index_of(s).ok_or_else(|| format!("unknown quantale element {s:?}"))?);
            }
        }
        Ok(Matrix::new(r, c, data))
    }

    /// Compact label, e.g. `[[1,0],[0,1]]`.
    pub fn label(&self, q: &Quantale) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<&str> = (0..self.cols).map(|j| q.name(self.get(i, j))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}
