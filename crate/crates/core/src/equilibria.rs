//! Fixed points of the recurrence and their local stability.
//!
//! The equilibria solve `(1 + b) z^2 - z - a = 0`:
//!
//! ```text
//! z_minus = (1 - sqrt(1 + 4a + 4ab)) / (2 (1 + b))
//! z_plus  = (1 + sqrt(1 + 4a + 4ab)) / (2 (1 + b))
//! ```
//!
//! with the principal square root. Linearizing at `(z, z)` gives
//! `x^2 + c1 x + c0 = 0`, written here also in the normal form
//! `x^2 - r x - s = 0` (`r = -c1`, `s = -c0`) used by the disk criteria.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::quadratic_roots;
use crate::map::Params;
use crate::scalar::{lit, modulus, principal_sqrt, rel_diff, to_f64, Scalar};

/// Parameter combinations closer than this to zero count as degenerate.
pub const DEGENERATE_EPS: f64 = 1e-12;
/// Root moduli within this distance of 1 are treated as on the unit circle.
pub const BOUNDARY_EPS: f64 = 1e-9;
/// Tolerance for the closed-form vs derivative coefficient agreement.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Denominator cutoff for evaluating derivatives at an equilibrium.
const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("degenerate parameters: {reason}")]
    Degenerate {
        reason: String,
        /// Root of the linear equation left over when `b = -1`.
        linear_root: Option<Complex<f64>>,
    },
    #[error("denominator vanishes at the equilibrium (|(1+b) z| = {denominator:e})")]
    Singular { denominator: f64 },
}

/// Which sign of the square root produced the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `(1 - sqrt(..)) / (2 (1 + b))`, the first equilibrium.
    Minus,
    /// `(1 + sqrt(..)) / (2 (1 + b))`, the second equilibrium.
    Plus,
}

impl Branch {
    pub fn index(self) -> u8 {
        match self {
            Branch::Minus => 1,
            Branch::Plus => 2,
        }
    }
}

/// `x^2 - r x - s = 0`, equivalently `x^2 + c1 x + c0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharQuadratic<T> {
    pub r: Complex<T>,
    pub s: Complex<T>,
    pub c1: Complex<T>,
    pub c0: Complex<T>,
}

impl<T: Scalar> CharQuadratic<T> {
    pub fn from_coefficients(c1: Complex<T>, c0: Complex<T>) -> Self {
        Self { r: -c1, s: -c0, c1, c0 }
    }

    pub fn from_normal_form(r: Complex<T>, s: Complex<T>) -> Self {
        Self { r, s, c1: -r, c0: -s }
    }

    /// Roots of the quadratic, larger modulus first.
    pub fn roots(&self) -> [Complex<T>; 2] {
        let one = Complex::new(T::one(), T::zero());
        quadratic_roots(one, self.c1, self.c0).expect("monic quadratic")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    LocallyAsymptoticallyStable,
    Saddle,
    Unstable,
    Inconclusive,
}

impl StabilityClass {
    pub fn is_decisive(self) -> bool {
        !matches!(self, StabilityClass::Inconclusive)
    }
}

/// Sufficient-condition classifier: stable when `|r| < |1 - s| < 2`, saddle
/// when `|r| > |1 - s|`, otherwise inconclusive.
pub fn classify_by_lemma<T: Scalar>(q: &CharQuadratic<T>) -> StabilityClass {
    let one = Complex::new(T::one(), T::zero());
    let r_abs = modulus(q.r);
    let one_minus_s = modulus(one - q.s);
    if r_abs < one_minus_s && one_minus_s < lit(2.0) {
        StabilityClass::LocallyAsymptoticallyStable
    } else if r_abs > one_minus_s {
        StabilityClass::Saddle
    } else {
        StabilityClass::Inconclusive
    }
}

/// Direct classification from the root moduli (larger first).
pub fn classify_roots<T: Scalar>(q: &CharQuadratic<T>) -> (StabilityClass, [T; 2]) {
    let roots = q.roots();
    let moduli = [modulus(roots[0]), modulus(roots[1])];
    (classify_moduli(moduli), moduli)
}

/// Shared rule for eigenvalue moduli: any modulus within [`BOUNDARY_EPS`] of 1
/// is inconclusive; both inside is stable; one on each side is a saddle.
pub fn classify_moduli<T: Scalar>(moduli: [T; 2]) -> StabilityClass {
    let one = T::one();
    let eps = lit::<T>(BOUNDARY_EPS);
    if moduli.iter().any(|&m| (m - one).abs() <= eps) {
        return StabilityClass::Inconclusive;
    }
    let inside = moduli.iter().filter(|&&m| m < one).count();
    match inside {
        2 => StabilityClass::LocallyAsymptoticallyStable,
        1 => StabilityClass::Saddle,
        _ => StabilityClass::Unstable,
    }
}

/// Linearization of the recurrence at a point `(z, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearization<T> {
    /// Coefficients from the partial derivatives of the map.
    pub char_poly: CharQuadratic<T>,
    /// Larger first.
    pub root_moduli: [T; 2],
    /// Classification from the root moduli.
    pub stability: StabilityClass,
    /// Classification from the disk-criterion lemmas.
    pub lemma_stability: StabilityClass,
    /// `|r|` of the normal form.
    pub lemma_r: T,
    /// `|1 - s|` of the normal form, the quantity compared against `|r|` and 2.
    pub criterion_value: T,
    /// Closed-form `c0 = (1 + 2a + w) / (2a (1 + b))`, `w = 1 - 2 (1 + b) z`;
    /// `None` when `a (1 + b) = 0`.
    pub closed_form_c0: Option<Complex<T>>,
    /// Largest relative disagreement between the closed form and the
    /// derivative coefficients.
    pub closed_form_discrepancy: Option<T>,
    /// `|f(z, z) - z|`; nonzero means the point was not an equilibrium.
    pub fixed_point_residual: T,
}

/// Builds the characteristic quadratic at `(z, z)` from the partial
/// derivatives `c1 = -df/dz[n]`, `c0 = -df/dz[n-1]` and cross-checks the
/// closed-form coefficients `c1 = b / (1 + b)`, `c0 = (1 + 2a + w) / (2a + 2ab)`.
pub fn linearize_at<T: Scalar>(params: &Params<T>, eq: Complex<T>) -> Result<Linearization<T>, EquilibriumError> {
    let (a, b) = (params.alpha, params.beta);
    let one = Complex::new(T::one(), T::zero());
    let two = lit::<T>(2.0);

    let den = b * eq + eq;
    if modulus(den) < lit(SINGULAR_EPS) {
        return Err(EquilibriumError::Singular {
            denominator: to_f64(modulus(den)),
        });
    }
    let d2 = den * den;
    let c1 = b * (a + eq) / d2;
    let c0 = (a - b * eq) / d2;
    let char_poly = CharQuadratic::from_coefficients(c1, c0);

    let degenerate = modulus(a * (one + b)) < lit(DEGENERATE_EPS);
    let (closed_form_c0, closed_form_discrepancy) = if degenerate {
        (None, None)
    } else {
        let w = one - (one + b) * eq * two;
        let c0_closed = (one + a * two + w) / ((a + a * b) * two);
        let c1_closed = b / (one + b);
        let disc = rel_diff(c1_closed, c1).max(rel_diff(c0_closed, c0));
        (Some(c0_closed), Some(disc))
    };

    let (stability, root_moduli) = classify_roots(&char_poly);
    Ok(Linearization {
        char_poly,
        root_moduli,
        stability,
        lemma_stability: classify_by_lemma(&char_poly),
        lemma_r: modulus(char_poly.r),
        criterion_value: modulus(one - char_poly.s),
        closed_form_c0,
        closed_form_discrepancy,
        fixed_point_residual: modulus(params.eval(eq, eq) - eq),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport<T> {
    pub value: Complex<T>,
    pub branch: Branch,
    /// `|f(z, z) - z|`; absent for spurious roots, where `f` is undefined.
    pub fixed_point_residual: Option<T>,
    /// The point solves the quadratic but makes the map's denominator vanish.
    pub spurious: bool,
    /// Absent for spurious roots.
    pub linearization: Option<Linearization<T>>,
}

impl<T: Scalar> EquilibriumReport<T> {
    pub fn stability(&self) -> StabilityClass {
        self.linearization
            .as_ref()
            .map_or(StabilityClass::Inconclusive, |l| l.stability)
    }

    fn build(params: &Params<T>, value: Complex<T>, branch: Branch) -> Self {
        let one = Complex::new(T::one(), T::zero());
        let den = modulus((one + params.beta) * value);
        let spurious = den < lit(SINGULAR_EPS);
        let fixed_point_residual = (!spurious).then(|| modulus(params.eval(value, value) - value));
        Self {
            value,
            branch,
            fixed_point_residual,
            spurious,
            linearization: if spurious { None } else { linearize_at(params, value).ok() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibria<T> {
    pub minus: EquilibriumReport<T>,
    pub plus: EquilibriumReport<T>,
}

impl<T: Scalar> Equilibria<T> {
    pub fn values(&self) -> [Complex<T>; 2] {
        [self.minus.value, self.plus.value]
    }

    pub fn get(&self, branch: Branch) -> &EquilibriumReport<T> {
        match branch {
            Branch::Minus => &self.minus,
            Branch::Plus => &self.plus,
        }
    }

    pub fn has_spurious(&self) -> bool {
        self.minus.spurious || self.plus.spurious
    }
}

/// `sqrt(1 + 4a + 4ab)`, principal branch.
pub fn discriminant_root<T: Scalar>(params: &Params<T>) -> Complex<T> {
    let (a, b) = (params.alpha, params.beta);
    let one = Complex::new(T::one(), T::zero());
    let four = lit::<T>(4.0);
    principal_sqrt(one + a * four + a * b * four)
}

/// Both equilibria with their linearizations.
pub fn equilibria<T: Scalar>(params: &Params<T>) -> Result<Equilibria<T>, EquilibriumError> {
    let (a, b) = (params.alpha, params.beta);
    let one = Complex::new(T::one(), T::zero());
    let two = lit::<T>(2.0);
    let one_plus_b = one + b;
    if modulus(one_plus_b) < lit(DEGENERATE_EPS) {
        return Err(EquilibriumError::Degenerate {
            reason: "b = -1 reduces the fixed-point quadratic to -z - a = 0".into(),
            linear_root: Some(Complex::new(to_f64(-a.re), to_f64(-a.im))),
        });
    }
    let d = discriminant_root(params);
    // Evaluate the larger numerator directly and recover the other root from
    // the product z_minus * z_plus = -a / (1 + b).
    let (num_minus, num_plus) = (one - d, one + d);
    let denom = one_plus_b * two;
    let product = -a / one_plus_b;
    let (z_minus, z_plus) = if modulus(num_plus) >= modulus(num_minus) {
        let z_plus = num_plus / denom;
        let z_minus = if modulus(z_plus) > T::zero() { product / z_plus } else { num_minus / denom };
        (z_minus, z_plus)
    } else {
        let z_minus = num_minus / denom;
        let z_plus = if modulus(z_minus) > T::zero() { product / z_minus } else { num_plus / denom };
        (z_minus, z_plus)
    };
    Ok(Equilibria {
        minus: EquilibriumReport::build(params, z_minus, Branch::Minus),
        plus: EquilibriumReport::build(params, z_plus, Branch::Plus),
    })
}

/// `1 + (1 + 2a +/- sqrt(1 + 4a + 4ab)) / (2a + 2ab)`; the `+` root belongs to
/// the minus-branch equilibrium and vice versa.
fn one_plus_closed_c0<T: Scalar>(params: &Params<T>, branch: Branch) -> Result<Complex<T>, EquilibriumError> {
    let (a, b) = (params.alpha, params.beta);
    let one = Complex::new(T::one(), T::zero());
    let two = lit::<T>(2.0);
    let denom = (a + a * b) * two;
    if modulus(denom) < lit(DEGENERATE_EPS) {
        return Err(EquilibriumError::Degenerate {
            reason: "a (1 + b) = 0 leaves the closed-form coefficient undefined".into(),
            linear_root: None,
        });
    }
    let d = discriminant_root(params);
    let signed = match branch {
        Branch::Minus => d,
        Branch::Plus => -d,
    };
    Ok(one + (one + a * two + signed) / denom)
}

/// Magnitude whose being below 2 certifies local stability of the branch's
/// equilibrium (given `|b / (1 + b)|` is smaller still).
pub fn stability_margin<T: Scalar>(params: &Params<T>, branch: Branch) -> Result<T, EquilibriumError> {
    one_plus_closed_c0(params, branch).map(modulus)
}

/// `|b / (1 + b)| - stability_margin`; positive values mark a saddle.
pub fn saddle_margin<T: Scalar>(params: &Params<T>, branch: Branch) -> Result<T, EquilibriumError> {
    let one = Complex::new(T::one(), T::zero());
    let b = params.beta;
    if modulus(one + b) < lit(DEGENERATE_EPS) {
        return Err(EquilibriumError::Degenerate {
            reason: "b = -1".into(),
            linear_root: None,
        });
    }
    let margin = stability_margin(params, branch)?;
    Ok(modulus(b / (one + b)) - margin)
}

/// The printed condition `|1 + 1/(1+a)| < |1 + 1/(a + a^2)| < 2` for `a = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplayedCondition<T> {
    pub lower: T,
    pub middle: T,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialCase<T> {
    /// The equilibrium at 1.
    pub unit: EquilibriumReport<T>,
    /// The equilibrium at `-a / (1 + a)`.
    pub other: EquilibriumReport<T>,
    pub displayed_condition: DisplayedCondition<T>,
}

/// Equal parameters `a = b`: the quadratic `(1 + a) z^2 - z - a` factors as
/// `(z - 1)((1 + a) z + a)`, so the equilibria are exactly `1` and `-a/(1+a)`.
pub fn special_case_alpha_eq_beta<T: Scalar>(alpha: Complex<T>) -> Result<SpecialCase<T>, EquilibriumError> {
    let one = Complex::new(T::one(), T::zero());
    if modulus(alpha) < lit(DEGENERATE_EPS) || modulus(one + alpha) < lit(DEGENERATE_EPS) {
        return Err(EquilibriumError::Degenerate {
            reason: "a = b requires a not in {0, -1}".into(),
            linear_root: None,
        });
    }
    let params = Params::new(alpha, alpha);
    let other_value = -alpha / (one + alpha);
    let general = equilibria(&params)?;
    let branch_of = |z: Complex<T>| {
        if modulus(general.minus.value - z) <= modulus(general.plus.value - z) {
            Branch::Minus
        } else {
            Branch::Plus
        }
    };
    let lower = modulus(one + one / (one + alpha));
    let middle = modulus(one + one / (alpha + alpha * alpha));
    Ok(SpecialCase {
        unit: EquilibriumReport::build(&params, one, branch_of(one)),
        other: EquilibriumReport::build(&params, other_value, branch_of(other_value)),
        displayed_condition: DisplayedCondition {
            lower,
            middle,
            holds: lower < middle && middle < lit(2.0),
        },
    })
}
