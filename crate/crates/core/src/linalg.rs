//! Complex 2x2 matrices and the quadratic solver behind every eigenvalue
//! computation in the crate.

use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{lit, modulus, principal_sqrt, Scalar};

/// Roots of `a z^2 + b z + c = 0`, larger modulus first.
///
/// The larger root comes from `q = -(b + sign * sqrt(b^2 - 4ac)) / 2` with the
/// sign chosen to avoid cancellation; the companion is recovered from the
/// product `c / a`. Returns `None` when `a == 0`.
pub fn quadratic_roots<T: Scalar>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
) -> Option<[Complex<T>; 2]> {
    let zero = Complex::new(T::zero(), T::zero());
    if a == zero {
        return None;
    }
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let sq = principal_sqrt(b * b - a * c * four);
    let aligned = (b.conj() * sq).re >= T::zero();
    let q = if aligned { -(b + sq) / two } else { -(b - sq) / two };
    if q == zero {
        // b == 0 and c == 0: double root at the origin
        return Some([zero, zero]);
    }
    let big = q / a;
    let small = c / q;
    if modulus(big) >= modulus(small) {
        Some([big, small])
    } else {
        Some([small, big])
    }
}

/// Complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new(o, z, z, o)
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Eigenvalues from `x^2 - trace x + det = 0`, larger modulus first.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let one = Complex::new(T::one(), T::zero());
        quadratic_roots(one, -self.trace(), self.det()).expect("monic quadratic")
    }

    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &z| acc.max(modulus(z)))
    }

    /// `max |self - other| / max |other|` over entries.
    pub fn rel_error(&self, reference: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max(modulus(self.m[i][j] - reference.m[i][j]));
            }
        }
        let scale = reference.max_abs();
        if scale == T::zero() {
            worst
        } else {
            worst / scale
        }
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
