//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real field the map is evaluated over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal or tolerance into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Widens a scalar to `f64` for reporting.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// Modulus via `hypot`, free of intermediate overflow.
#[inline]
pub fn modulus<T: Scalar>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn is_finite<T: Scalar>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Principal square root: branch cut on the negative real axis, result with
/// non-negative real part. Negative reals map to the positive imaginary axis
/// regardless of the sign of a zero imaginary part.
pub fn principal_sqrt<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let zero = T::zero();
    let two = lit::<T>(2.0);
    if z.re == zero && z.im == zero {
        return Complex::new(zero, zero);
    }
    let t = ((modulus(z) + z.re.abs()) / two).sqrt();
    if z.re >= zero {
        Complex::new(t, z.im / (two * t))
    } else {
        let im = if z.im < zero { -t } else { t };
        Complex::new(z.im.abs() / (two * t), im)
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff<T: Scalar>(a: Complex<T>, b: Complex<T>) -> T {
    let scale = modulus(a).max(modulus(b));
    if scale == T::zero() {
        T::zero()
    } else {
        modulus(a - b) / scale
    }
}

/// Formats `a+bi` for humans; machine output always uses `[re, im]`.
pub fn format_complex<T: Scalar>(z: Complex<T>) -> String {
    let (re, im) = (to_f64(z.re), to_f64(z.im));
    if im.is_sign_negative() {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_negative_real_lands_on_positive_imaginary_axis() {
        let r = principal_sqrt(Complex::new(-4.0_f64, 0.0));
        assert_eq!(r, Complex::new(0.0, 2.0));
        let r = principal_sqrt(Complex::new(-4.0_f64, -0.0));
        assert_eq!(r, Complex::new(0.0, 2.0));
    }

    #[test]
    fn sqrt_just_below_the_cut_flips() {
        let r = principal_sqrt(Complex::new(-4.0_f64, -1e-300));
        assert!(r.im < 0.0);
        assert!((r.im + 2.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back_and_has_nonnegative_real_part() {
        for &(re, im) in &[(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (1e-200, 1e-200), (1e200, -1e200)] {
            let z = Complex::new(re, im);
            let r = principal_sqrt(z);
            assert!(r.re >= 0.0);
            assert!(rel_diff(r * r, z) < 1e-14, "{z} -> {r}");
        }
    }

    #[test]
    fn works_in_single_precision() {
        let r = principal_sqrt(Complex::new(-9.0_f32, 0.0));
        assert_eq!(r, Complex::new(0.0, 3.0));
    }

    #[test]
    fn formats_both_signs() {
        assert_eq!(format_complex(Complex::new(1.5_f64, -2.0)), "1.5-2i");
        assert_eq!(format_complex(Complex::new(1.5_f64, 2.0)), "1.5+2i");
    }
}
