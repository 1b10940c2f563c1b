//! Fixed-size complex linear algebra for the 2x2 polarization domain.
//!
//! Everything here is closed-form; no decomposition library is needed for
//! 2x2 systems and keeping it explicit makes the receiver math auditable.

use num_complex::Complex64;

pub type C64 = Complex64;

/// 2x2 complex matrix, row-major: `m[r][c]` couples transmit branch `c`
/// into receive branch `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[C64; 2]; 2],
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::new(C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0))
    }

    /// Column `j` as a length-2 vector.
    pub fn col(&self, j: usize) -> [C64; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn mul_vec(&self, x: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * x[0] + self.m[0][1] * x[1],
            self.m[1][0] * x[0] + self.m[1][1] * x[1],
        ]
    }

    pub fn mul_mat(&self, o: &Mat2) -> Mat2 {
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] *= s;
            }
        }
        r
    }

    /// Conjugate transpose.
    pub fn herm(&self) -> Mat2 {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Closed-form inverse. `None` when the determinant is zero or not finite.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm_sqr() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
            return None;
        }
        let inv_d = C64::new(1.0, 0.0) / d;
        Some(Mat2::new(
            self.m[1][1] * inv_d,
            -self.m[0][1] * inv_d,
            -self.m[1][0] * inv_d,
            self.m[0][0] * inv_d,
        ))
    }

    /// Gram matrix `self^H * self` (Hermitian positive semidefinite).
    pub fn gram(&self) -> Mat2 {
        self.herm().mul_mat(self)
    }

    pub fn frob_sq(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues (min, max) of a Hermitian 2x2 matrix. Only the real parts
    /// of the diagonal and one off-diagonal entry are consulted, so callers
    /// must pass an actually Hermitian matrix.
    pub fn hermitian_eigvals(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b2 = self.m[0][1].norm_sqr();
        let mid = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b2).sqrt();
        (mid - disc, mid + disc)
    }

    /// Condition number of a Hermitian positive semidefinite matrix
    /// (lambda_max / lambda_min); infinite when singular.
    pub fn hermitian_cond(&self) -> f64 {
        let (lo, hi) = self.hermitian_eigvals();
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

pub fn vec_add(a: [C64; 2], b: [C64; 2]) -> [C64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn vec_sub(a: [C64; 2], b: [C64; 2]) -> [C64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn vec_scale(a: [C64; 2], s: C64) -> [C64; 2] {
    [a[0] * s, a[1] * s]
}

pub fn norm_sq(a: [C64; 2]) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr()
}

/// Inner product `a^H b`.
pub fn inner(a: [C64; 2], b: [C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}
