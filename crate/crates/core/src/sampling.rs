//! Seeded sampling helpers shared by the scan harnesses.

use num_complex::Complex;
use rand::Rng;

/// Uniform point in the closed disk `|z| <= radius` (rejection sampling).
pub fn uniform_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex<f64> {
    loop {
        let x: f64 = rng.gen_range(-1.0..=1.0);
        let y: f64 = rng.gen_range(-1.0..=1.0);
        if x * x + y * y <= 1.0 {
            return Complex::new(radius * x, radius * y);
        }
    }
}

/// Uniform point in the square `[-half, half]^2`.
pub fn uniform_in_square<R: Rng + ?Sized>(rng: &mut R, half: f64) -> Complex<f64> {
    Complex::new(rng.gen_range(-half..=half), rng.gen_range(-half..=half))
}

/// Uniformly distributed unit vector in R^4, read as a direction in C^2.
pub fn unit_direction4<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.map(|x| x / n);
        }
    }
}
