//! Minimal real 2x2 matrix arithmetic.
//!
//! Everything the discriminator pipeline manipulates is a real 2x2 matrix or
//! a two-component vector, so a tiny fixed-size type beats a general linear
//! algebra dependency.

use num_complex::Complex64;

/// Real 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(s1: f64, s2: f64) -> Self {
        Mat2([[s1, 0.0], [0.0, s2]])
    }

    /// Rotation by `theta`: `[[cos, -sin], [sin, cos]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2([[c, -s], [s, c]])
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    /// Apply to a complex two-vector (the matrix itself is real).
    pub fn mul_cvec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            v[0] * self.0[0][0] + v[1] * self.0[0][1],
            v[0] * self.0[1][0] + v[1] * self.0[1][1],
        ]
    }

    pub fn scale(&self, k: f64) -> Mat2 {
        Mat2([
            [self.0[0][0] * k, self.0[0][1] * k],
            [self.0[1][0] * k, self.0[1][1] * k],
        ])
    }

    pub fn neg(&self) -> Mat2 {
        self.scale(-1.0)
    }

    /// Largest absolute deviation from `rhs`, entry by entry.
    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - rhs.0[r][c]).abs());
            }
        }
        worst
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Deviation from orthogonality, `max |M M^T - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        self.mul(&self.transpose()).max_abs_diff(&Mat2::IDENTITY)
    }

    /// Promote to a complex 2x2 operator for single-qubit application.
    pub fn to_complex(&self) -> [[Complex64; 2]; 2] {
        let c = |x: f64| Complex64::new(x, 0.0);
        [
            [c(self.0[0][0]), c(self.0[0][1])],
            [c(self.0[1][0]), c(self.0[1][1])],
        ]
    }
}
