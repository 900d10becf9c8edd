use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{Scalar, ScalarMode};

/// Complex matrix stored as a pair of real matrices `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    re: Matrix,
    im: Matrix,
}

impl ComplexMatrix {
    pub fn new(re: Matrix, im: Matrix) -> Result<Self, LinalgError> {
        if re.mode() != im.mode() {
            return Err(LinalgError::MixedModes(re.mode(), im.mode()));
        }
        if re.shape() != im.shape() {
            return Err(LinalgError::DimensionMismatch {
                op: "complex",
                left: re.shape(),
                right: im.shape(),
            });
        }
        Ok(ComplexMatrix { re, im })
    }

    pub fn real(re: Matrix) -> Self {
        let im = Matrix::zeros(re.mode(), re.rows(), re.cols());
        ComplexMatrix { re, im }
    }

    pub fn identity(mode: ScalarMode, n: usize) -> Self {
        ComplexMatrix::real(Matrix::identity(mode, n))
    }

    pub fn zeros(mode: ScalarMode, n: usize) -> Self {
        ComplexMatrix::real(Matrix::zeros(mode, n, n))
    }

    /// `|i⟩⟨j|` as an `n×n` matrix.
    pub fn unit(mode: ScalarMode, n: usize, i: usize, j: usize) -> Self {
        let re = Matrix::from_fn(mode, n, n, |r, c| {
            if r == i && c == j {
                Scalar::one(mode)
            } else {
                Scalar::zero(mode)
            }
        })
        .expect("uniform mode");
        ComplexMatrix::real(re)
    }

    pub fn re(&self) -> &Matrix {
        &self.re
    }

    pub fn im(&self) -> &Matrix {
        &self.im
    }

    pub fn mode(&self) -> ScalarMode {
        self.re.mode()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.re.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> (&Scalar, &Scalar) {
        (self.re.get(i, j), self.im.get(i, j))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        ComplexMatrix {
            re: self.re.transpose(),
            im: self.im.transpose().map(|x| -x),
        }
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<Self, LinalgError> {
        let re = self.re.mul(&other.re)?.sub(&self.im.mul(&other.im)?)?;
        let im = self.re.mul(&other.im)?.add(&self.im.mul(&other.re)?)?;
        Ok(ComplexMatrix { re, im })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<Self, LinalgError> {
        Ok(ComplexMatrix {
            re: self.re.add(&other.re)?,
            im: self.im.add(&other.im)?,
        })
    }

    /// Multiplies by the real scalar `factor`.
    pub fn scale(&self, factor: &Scalar) -> Result<Self, LinalgError> {
        Ok(ComplexMatrix {
            re: self.re.scale(factor)?,
            im: self.im.scale(factor)?,
        })
    }

    /// Multiplies by the imaginary unit.
    pub fn times_i(&self) -> Self {
        ComplexMatrix {
            re: self.im.map(|x| -x),
            im: self.re.clone(),
        }
    }

    /// `(Re tr, Im tr)`.
    pub fn trace(&self) -> (Scalar, Scalar) {
        let n = self.re.rows().min(self.re.cols());
        let mode = self.mode();
        (0..n).fold((Scalar::zero(mode), Scalar::zero(mode)), |(a, b), k| {
            (a + self.re.get(k, k), b + self.im.get(k, k))
        })
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.re.approx_eq(&other.re, tol) && self.im.approx_eq(&other.im, tol)
    }
}
