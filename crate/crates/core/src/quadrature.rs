//! Composite Simpson rules on uniform grids with pairwise summation.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cmath::{pairwise_sum, pairwise_sum_real};
use crate::error::{Error, Result};

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// `∫ f` over `n` equally spaced samples with spacing `h`; `n` must be odd.
pub fn simpson(values: &[Complex64], h: f64) -> Result<Complex64> {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidGrid("Simpson's rule needs an odd number (>= 3) of samples"));
    }
    let terms: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * simpson_weight(i, n))
        .collect();
    Ok(pairwise_sum(&terms) * (h / 3.0))
}

/// Real-valued variant of [`simpson`].
pub fn simpson_real(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidGrid("Simpson's rule needs an odd number (>= 3) of samples"));
    }
    let terms: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * simpson_weight(i, n))
        .collect();
    Ok(pairwise_sum_real(&terms) * (h / 3.0))
}

/// Simpson weights (including the `h/3` factor) for `n` samples.
pub fn simpson_weights(n: usize, h: f64) -> Result<Vec<f64>> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidGrid("Simpson's rule needs an odd number (>= 3) of samples"));
    }
    Ok((0..n).map(|i| simpson_weight(i, n) * h / 3.0).collect())
}

/// `n` equally spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let xs = linspace(0.0, 2.0, 11);
        let v: Vec<f64> = xs.iter().map(|x| x * x * x - x + 1.0).collect();
        let exact = 4.0 - 2.0 + 2.0;
        assert!((simpson_real(&v, 0.2).unwrap() - exact).abs() < 1e-13);
    }

    #[test]
    fn simpson_rejects_even_counts() {
        assert!(simpson_real(&[1.0, 2.0], 0.1).is_err());
        assert!(simpson(&[Complex64::new(1.0, 0.0); 4], 0.1).is_err());
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let f = |x: f64| x.sin();
        let err = |n: usize| {
            let xs = linspace(0.0, core::f64::consts::PI, n);
            let v: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            (simpson_real(&v, core::f64::consts::PI / (n - 1) as f64).unwrap() - 2.0).abs()
        };
        let order = (err(21) / err(41)).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }
}
