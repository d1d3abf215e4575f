//! Complex helpers shared by the solvers.

#[cfg(not(test))]
use num_traits::Float;
use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square root with `arg(z) ∈ (−π, π]` mapped onto `arg ∈ (−π/2, π/2]`.
///
/// The negative real axis (including a `-0.0` imaginary part) goes to the
/// positive imaginary axis. Tiny imaginary parts survive: the result is
/// built from `hypot` and a division rather than from polar angles.
pub fn sqrt_branch(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if !x.is_finite() || !y.is_finite() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    // t = sqrt((|x| + |z|) / 2), scaled to avoid overflow in hypot.
    let t = ((x.abs() + x.hypot(y)) * 0.5).sqrt();
    if x >= 0.0 {
        Complex64::new(t, y / (2.0 * t))
    } else if y == 0.0 {
        Complex64::new(0.0, t)
    } else {
        Complex64::new(y.abs() / (2.0 * t), t.copysign(y))
    }
}

/// `sin(z)/z`, continuous through `z = 0`.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Pairwise (cascade) summation of complex terms.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 16;
    if terms.len() <= BLOCK {
        terms.iter().fold(Complex64::new(0.0, 0.0), |acc, t| acc + t)
    } else {
        let mid = terms.len() / 2;
        pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
    }
}

/// Pairwise summation of real terms.
pub fn pairwise_sum_real(terms: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if terms.len() <= BLOCK {
        terms.iter().sum()
    } else {
        let mid = terms.len() / 2;
        pairwise_sum_real(&terms[..mid]) + pairwise_sum_real(&terms[mid..])
    }
}

/// Argument of `b / a` in `(−π, π]`, computed without forming the quotient.
pub(crate) fn arg_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}
