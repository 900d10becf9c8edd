//! Dense matrices and column vectors over [`Scalar`].
//!
//! Matrices act on configuration columns: entry `(i, j)` is the weight of the
//! transition from state `j` to state `i`. Kronecker products flatten index
//! pairs row-major, so `(i₁, i₂)` sits at `i₁·n₂ + i₂`.

use std::fmt;

use thiserror::Error;

use crate::scalar::{ParseScalarError, Scalar, ScalarMode};

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {left:?} against {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("mixed scalar modes: {0} and {1}")]
    MixedModes(ScalarMode, ScalarMode),
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
}

fn check_modes(a: ScalarMode, b: ScalarMode) -> Result<(), LinalgError> {
    if a == b {
        Ok(())
    } else {
        Err(LinalgError::MixedModes(a, b))
    }
}

fn check_entries(mode: ScalarMode, data: &[Scalar]) -> Result<(), LinalgError> {
    match data.iter().find(|s| s.mode() != mode) {
        Some(s) => Err(LinalgError::MixedModes(mode, s.mode())),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    mode: ScalarMode,
    data: Vec<Scalar>,
}

impl Vector {
    pub fn new(mode: ScalarMode, data: Vec<Scalar>) -> Result<Self, LinalgError> {
        check_entries(mode, &data)?;
        Ok(Vector { mode, data })
    }

    pub fn zeros(mode: ScalarMode, dim: usize) -> Self {
        Vector {
            mode,
            data: vec![Scalar::zero(mode); dim],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(mode: ScalarMode, dim: usize, index: usize) -> Self {
        let mut v = Vector::zeros(mode, dim);
        v.data[index] = Scalar::one(mode);
        v
    }

    pub fn parse(mode: ScalarMode, entries: &[&str]) -> Result<Self, LinalgError> {
        let data = entries
            .iter()
            .map(|e| Scalar::parse(mode, e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Vector { mode, data })
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.data[i]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.data
    }

    pub fn sum(&self) -> Scalar {
        self.data
            .iter()
            .fold(Scalar::zero(self.mode), |acc, x| acc + x)
    }

    pub fn l1_norm(&self) -> Scalar {
        self.data
            .iter()
            .fold(Scalar::zero(self.mode), |acc, x| acc + x.abs())
    }

    pub fn l2_norm_squared(&self) -> Scalar {
        self.data
            .iter()
            .fold(Scalar::zero(self.mode), |acc, x| acc + x * x)
    }

    pub fn dot(&self, other: &Vector) -> Result<Scalar, LinalgError> {
        check_modes(self.mode, other.mode)?;
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                op: "dot",
                left: (1, self.dim()),
                right: (other.dim(), 1),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(Scalar::zero(self.mode), |acc, (a, b)| acc + a * b))
    }

    pub fn kron(&self, other: &Vector) -> Result<Vector, LinalgError> {
        check_modes(self.mode, other.mode)?;
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Ok(Vector {
            mode: self.mode,
            data,
        })
    }

    pub fn approx_eq(&self, other: &Vector, tol: f64) -> bool {
        self.mode == other.mode
            && self.dim() == other.dim()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    mode: ScalarMode,
    data: Vec<Scalar>,
}

impl Matrix {
    /// Row-major constructor.
    pub fn new(
        mode: ScalarMode,
        rows: usize,
        cols: usize,
        data: Vec<Scalar>,
    ) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                expected: rows * cols,
                found: data.len(),
            });
        }
        check_entries(mode, &data)?;
        Ok(Matrix {
            rows,
            cols,
            mode,
            data,
        })
    }

    pub fn from_rows(mode: ScalarMode, rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Matrix::new(mode, n, cols, data)
    }

    /// Builds a matrix from rows of textual scalars, e.g. `["1/2", "0"]`.
    pub fn parse_rows(mode: ScalarMode, rows: &[&[&str]]) -> Result<Self, LinalgError> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| Scalar::parse(mode, e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(mode, parsed)
    }

    pub fn from_fn(
        mode: ScalarMode,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(mode, rows, cols, data)
    }

    pub fn zeros(mode: ScalarMode, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            mode,
            data: vec![Scalar::zero(mode); rows * cols],
        }
    }

    pub fn identity(mode: ScalarMode, n: usize) -> Self {
        let mut m = Matrix::zeros(mode, n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one(mode);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector {
            mode: self.mode,
            data: (0..self.rows).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            mode: self.mode,
            data,
        }
    }

    pub fn map(&self, f: impl FnMut(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            mode: self.mode,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Result<Matrix, LinalgError> {
        check_modes(self.mode, factor.mode())?;
        Ok(self.map(|x| x * factor))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(&Scalar, &Scalar) -> Scalar,
    ) -> Result<Matrix, LinalgError> {
        check_modes(self.mode, other.mode)?;
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            mode: self.mode,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        check_modes(self.mode, other.mode)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = vec![Scalar::zero(self.mode); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cell = &mut data[i * other.cols + j];
                    *cell = &*cell + &(a * b);
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            mode: self.mode,
            data,
        })
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector, LinalgError> {
        matvec(self, v)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.mode == other.mode
            && self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&Matrix::identity(self.mode, self.rows), tol)
    }

    /// Extends a matrix by one state so that every column sums to one: the
    /// new last row compensates each column, and the new last column is the
    /// unit vector of the extra state.
    ///
    /// ```text
    /// [ M  0 ]
    /// [ c  1 ]   with c_j = 1 - Σ_i M[i][j]
    /// ```
    pub fn affine_extension(&self) -> Matrix {
        let n = self.rows;
        let m = self.cols;
        let sums = column_sums(self);
        let one = Scalar::one(self.mode);
        let mut out = Matrix::zeros(self.mode, n + 1, m + 1);
        for i in 0..n {
            for j in 0..m {
                out.data[i * (m + 1) + j] = self.get(i, j).clone();
            }
        }
        for j in 0..m {
            out.data[n * (m + 1) + j] = &one - sums.get(j);
        }
        out.data[n * (m + 1) + m] = one;
        out
    }

    /// Conjugates by a permutation: `perm[old] = new` index.
    pub fn permute(&self, perm: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.mode, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[perm[i] * self.cols + perm[j]] = self.get(i, j).clone();
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `M · v`.
pub fn matvec(m: &Matrix, v: &Vector) -> Result<Vector, LinalgError> {
    check_modes(m.mode, v.mode)?;
    if m.cols != v.dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "matvec",
            left: m.shape(),
            right: (v.dim(), 1),
        });
    }
    let mut out = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut acc = Scalar::zero(m.mode);
        for (a, x) in m.row(i).iter().zip(&v.data) {
            if a.is_zero() || x.is_zero() {
                continue;
            }
            acc = acc + a * x;
        }
        out.push(acc);
    }
    Ok(Vector {
        mode: m.mode,
        data: out,
    })
}

/// `A ⊗ B` with `(A⊗B)[(i₁,i₂),(j₁,j₂)] = A[i₁,j₁]·B[i₂,j₂]`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    check_modes(a.mode, b.mode)?;
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![Scalar::zero(a.mode); rows * cols];
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let x = a.get(i1, j1);
            if x.is_zero() {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    let y = b.get(i2, j2);
                    if y.is_zero() {
                        continue;
                    }
                    data[(i1 * b.rows + i2) * cols + j1 * b.cols + j2] = x * y;
                }
            }
        }
    }
    Ok(Matrix {
        rows,
        cols,
        mode: a.mode,
        data,
    })
}

/// `M^{⊗t}`; `t = 0` gives the 1×1 identity.
pub fn kronecker_power(m: &Matrix, t: usize) -> Result<Matrix, LinalgError> {
    let mut acc = Matrix::identity(m.mode, 1);
    for _ in 0..t {
        acc = kronecker(&acc, m)?;
    }
    Ok(acc)
}

pub fn column_sums(m: &Matrix) -> Vector {
    let mut sums = vec![Scalar::zero(m.mode); m.cols];
    for i in 0..m.rows {
        for (j, x) in m.row(i).iter().enumerate() {
            if !x.is_zero() {
                sums[j] = &sums[j] + x;
            }
        }
    }
    Vector {
        mode: m.mode,
        data: sums,
    }
}

pub fn l1_norm(v: &Vector) -> Scalar {
    v.l1_norm()
}

/// Strongest structural label of a square matrix, in the order
/// Stochastic, Affine, Orthogonal, General.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixClass {
    Stochastic,
    Affine,
    Orthogonal,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MatrixProperties {
    pub stochastic: bool,
    pub affine: bool,
    pub orthogonal: bool,
}

pub fn is_affine(m: &Matrix, tol: f64) -> bool {
    let one = Scalar::one(m.mode);
    m.is_square() && column_sums(m).entries().iter().all(|s| s.approx_eq(&one, tol))
}

pub fn is_stochastic(m: &Matrix, tol: f64) -> bool {
    let nonnegative = m.entries().iter().all(|x| match x {
        Scalar::Rational(_) => !x.is_negative(),
        Scalar::Float(v) => *v >= -tol,
    });
    nonnegative && is_affine(m, tol)
}

/// `MᵀM = I`.
pub fn is_orthogonal(m: &Matrix, tol: f64) -> bool {
    m.is_square()
        && m
            .transpose()
            .mul(m)
            .map(|g| g.is_identity(tol))
            .unwrap_or(false)
}

pub fn matrix_properties(m: &Matrix, tol: f64) -> MatrixProperties {
    MatrixProperties {
        stochastic: is_stochastic(m, tol),
        affine: is_affine(m, tol),
        orthogonal: is_orthogonal(m, tol),
    }
}

/// Comparisons are exact in rational mode and within `tol` in float mode.
pub fn classify_matrix(m: &Matrix, tol: f64) -> MatrixClass {
    let p = matrix_properties(m, tol);
    if p.stochastic {
        MatrixClass::Stochastic
    } else if p.affine {
        MatrixClass::Affine
    } else if p.orthogonal {
        MatrixClass::Orthogonal
    } else {
        MatrixClass::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_TOL;

    const Q: ScalarMode = ScalarMode::Rational;

    fn q(rows: &[&[&str]]) -> Matrix {
        Matrix::parse_rows(Q, rows).unwrap()
    }

    fn qv(entries: &[&str]) -> Vector {
        Vector::parse(Q, entries).unwrap()
    }

    #[test]
    fn matvec_examples() {
        assert_eq!(
            matvec(&Matrix::identity(Q, 2), &qv(&["1", "0"])).unwrap(),
            qv(&["1", "0"])
        );
        let halving = q(&[&["1/2", "0"], &["1/2", "1"]]);
        assert_eq!(
            matvec(&halving, &qv(&["1", "0"])).unwrap(),
            qv(&["1/2", "1/2"])
        );
        // p = 1/3 drift applied to (m, 1-m) with m = 1/2
        let drift = q(&[&["4/3", "1/3"], &["-1/3", "2/3"]]);
        assert_eq!(
            matvec(&drift, &qv(&["1/2", "1/2"])).unwrap(),
            qv(&["5/6", "1/6"])
        );
    }

    #[test]
    fn matvec_errors() {
        let m = Matrix::identity(Q, 2);
        assert!(matches!(
            matvec(&m, &qv(&["1", "0", "0"])),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        let fv = Vector::basis(ScalarMode::Float, 2, 0);
        assert_eq!(
            matvec(&m, &fv),
            Err(LinalgError::MixedModes(Q, ScalarMode::Float))
        );
    }

    #[test]
    fn kronecker_examples() {
        let i2 = Matrix::identity(Q, 2);
        assert_eq!(kronecker(&i2, &i2).unwrap(), Matrix::identity(Q, 4));
        let r = q(&[&["3/5", "-4/5"], &["4/5", "3/5"]]);
        let rr = kronecker(&r, &r).unwrap();
        assert_eq!(rr.get(0, 0), &Scalar::ratio(9, 25));
        assert_eq!(rr.get(1, 2), &Scalar::ratio(-16, 25));
        assert_eq!(rr.get(3, 0), &Scalar::ratio(16, 25));
        let a = q(&[&["2", "1/2"], &["-1", "1/2"]]);
        let b = q(&[&["1/3", "5"], &["2/3", "-4"]]);
        let col = column_sums(&kronecker(&a, &b).unwrap());
        assert!(col.entries().iter().all(|s| *s == Scalar::ratio(1, 1)));
        assert!(kronecker(&a, &Matrix::identity(ScalarMode::Float, 1)).is_err());
    }

    #[test]
    fn column_sum_examples() {
        assert_eq!(column_sums(&Matrix::zeros(Q, 2, 2)), qv(&["0", "0"]));
        // two-state unary matrix with p = 1/4, q = 1/3
        let eq2 = q(&[&["2/3", "1/4"], &["1/3", "3/4"]]);
        assert_eq!(column_sums(&eq2), qv(&["1", "1"]));
        let count_left = q(&[&["8", "0"], &["-7", "1"]]);
        assert_eq!(column_sums(&count_left), qv(&["1", "1"]));
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_norm(&qv(&["1", "0"])), Scalar::ratio(1, 1));
        assert_eq!(l1_norm(&qv(&["2", "-1"])), Scalar::ratio(3, 1));
        assert_eq!(l1_norm(&qv(&["-1", "0", "2"])), Scalar::ratio(3, 1));
    }

    #[test]
    fn classification_examples() {
        let id = Matrix::identity(Q, 3);
        assert_eq!(classify_matrix(&id, DEFAULT_TOL), MatrixClass::Stochastic);
        assert!(matrix_properties(&id, DEFAULT_TOL).orthogonal);
        let drift = q(&[&["9/8", "1/8"], &["-1/8", "7/8"]]);
        assert_eq!(classify_matrix(&drift, DEFAULT_TOL), MatrixClass::Affine);
        let r = q(&[&["3/5", "-4/5"], &["4/5", "3/5"]]);
        assert_eq!(classify_matrix(&r, DEFAULT_TOL), MatrixClass::Orthogonal);
        let g = q(&[&["2", "0"], &["0", "2"]]);
        assert_eq!(classify_matrix(&g, DEFAULT_TOL), MatrixClass::General);
        let rect = Matrix::zeros(Q, 2, 3);
        assert_eq!(classify_matrix(&rect, DEFAULT_TOL), MatrixClass::General);
    }

    #[test]
    fn float_classification_uses_tolerance() {
        let almost = Matrix::from_rows(
            ScalarMode::Float,
            vec![
                vec![Scalar::Float(0.5 + 1e-12), Scalar::Float(0.0)],
                vec![Scalar::Float(0.5), Scalar::Float(1.0)],
            ],
        )
        .unwrap();
        assert_eq!(classify_matrix(&almost, DEFAULT_TOL), MatrixClass::Stochastic);
        assert_eq!(classify_matrix(&almost, 0.0), MatrixClass::General);
    }

    #[test]
    fn affine_extension_fixes_column_sums() {
        let r = q(&[&["3/5", "-4/5"], &["4/5", "3/5"]]);
        let ext = r.affine_extension();
        assert_eq!(ext.shape(), (3, 3));
        assert_eq!(ext.row(2), &[Scalar::ratio(-2, 5), Scalar::ratio(6, 5), Scalar::ratio(1, 1)]);
        assert_eq!(classify_matrix(&ext, 0.0), MatrixClass::Affine);
    }

    #[test]
    fn mixed_construction_is_rejected() {
        let err = Matrix::new(Q, 1, 2, vec![Scalar::ratio(1, 2), Scalar::Float(0.5)]);
        assert_eq!(err, Err(LinalgError::MixedModes(Q, ScalarMode::Float)));
    }
}
