//! Regular solution of the radial equation for a piecewise-constant potential.
//!
//! The solution is fixed by `χ(0) = 0`, `χ'(0) = k` (so `χ = sin(kr)` when the
//! innermost layer is free) and carried outward by matching value and slope
//! at every breakpoint. Each layer stores its own local representation,
//! referenced to the layer's inner edge:
//!
//! * `Trig`: `χ = v cos(qΔ) + s sin(qΔ)/q`, used when the layer is thin in
//!   units of `1/|Im q|` (and always when `q = 0`, where it reduces to the
//!   linear solution `v + sΔ`);
//! * `Waves`: `χ = c₊ e^{iqΔ} + c₋ e^{−iqΔ}`, used for strongly evanescent or
//!   growing layers and for the exterior.
//!
//! The split keeps the growing and decaying pieces of a thick barrier apart,
//! which is what lets extremely narrow resonances be located. A per-layer
//! log-scale absorbs growth beyond `e^30`.

use alloc::vec::Vec;

#[cfg(not(test))]
use num_traits::Float;
use num_complex::Complex64;

use crate::cmath::{sinc, I};
use crate::error::{Error, Result};
use crate::potential::{wavenumber_for_height, PhysicalScale, Potential};

/// Layers with `|Im q|·width` above this use the exponential representation.
const TRIG_LIMIT: f64 = 2.0;
/// Exponent magnitude that triggers renormalization into the log-scale.
const RESCALE_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    Trig { value: Complex64, slope: Complex64 },
    Waves { out: Complex64, inc: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    start: f64,
    end: f64,
    /// Point the local representation is referenced to.
    origin: f64,
    height: f64,
    q: Complex64,
    form: Form,
    log_scale: f64,
}

impl Layer {
    /// Value and slope at offset `d` from the layer origin, as mantissas plus
    /// an extra log-scale.
    fn local(&self, d: f64) -> (Complex64, Complex64, f64) {
        let q = self.q;
        match self.form {
            Form::Trig { value, slope } => {
                let z = q * d;
                let (c, sd) = (z.cos(), sinc(z) * d);
                (value * c + slope * sd, slope * c - value * q * q * sd, 0.0)
            }
            Form::Waves { out, inc } => {
                let z = I * q * d;
                let shift = if z.re.abs() > RESCALE_LIMIT { z.re.abs() } else { 0.0 };
                let ep = (z - shift).exp();
                let em = (-z - shift).exp();
                let (a, b) = (out * ep, inc * em);
                (a + b, I * q * (a - b), shift)
            }
        }
    }

    /// The two exponential components at offset `d` (waves form only).
    fn components(&self, d: f64) -> Option<(Complex64, Complex64, f64)> {
        match self.form {
            Form::Waves { out, inc } => {
                let z = I * self.q * d;
                let shift = if z.re.abs() > RESCALE_LIMIT { z.re.abs() } else { 0.0 };
                Some((out * (z - shift).exp(), inc * (-z - shift).exp(), shift))
            }
            Form::Trig { .. } => None,
        }
    }

    /// Absolute amplitudes `(c_out, c_in)` with `χ = c_out e^{iqr} + c_in e^{−iqr}`.
    fn amplitudes(&self) -> Option<(Complex64, Complex64)> {
        let q = self.q;
        let (out, inc) = match self.form {
            Form::Waves { out, inc } => (out, inc),
            Form::Trig { value, slope } => {
                if q == Complex64::new(0.0, 0.0) {
                    return None;
                }
                let s = I * (slope / q);
                ((value - s) * 0.5, (value + s) * 0.5)
            }
        };
        let phase = I * q * self.origin;
        Some((
            scaled(out, self.log_scale, -phase),
            scaled(inc, self.log_scale, phase),
        ))
    }
}

/// `m · e^{ls + z}` with `z` complex, skipping the multiply when trivial.
fn scaled(m: Complex64, log_scale: f64, z: Complex64) -> Complex64 {
    if log_scale == 0.0 && z == Complex64::new(0.0, 0.0) {
        m
    } else {
        m * (z + log_scale).exp()
    }
}

fn scaled_real(m: Complex64, log_scale: f64) -> Complex64 {
    if log_scale == 0.0 {
        m
    } else {
        m * log_scale.exp()
    }
}

/// The regular solution `χ(r;k)` as per-layer local representations.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSolution {
    k: Complex64,
    kappa: f64,
    layers: Vec<Layer>,
}

impl LayerSolution {
    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Local wavenumber used in `layer`.
    pub fn wavenumber(&self, layer: usize) -> Option<Complex64> {
        self.layers.get(layer).map(|l| l.q)
    }

    /// Height of the potential in `layer`.
    pub fn height(&self, layer: usize) -> Option<f64> {
        self.layers.get(layer).map(|l| l.height)
    }

    /// `(c_out, c_in)` on `layer`, referenced to `r = 0`, so that
    /// `χ = c_out e^{iqr} + c_in e^{−iqr}` there. `None` when `q = 0` in the
    /// layer or the index is out of range.
    ///
    /// For a shell these are `(𝒥₁, 𝒥₂)` on the shell and `(𝒥₃, 𝒥₄)` outside.
    pub fn amplitudes(&self, layer: usize) -> Option<(Complex64, Complex64)> {
        self.layers.get(layer).and_then(Layer::amplitudes)
    }

    /// Exterior amplitudes `(𝒥₃, 𝒥₄)`.
    pub fn exterior(&self) -> (Complex64, Complex64) {
        self.layers
            .last()
            .and_then(Layer::amplitudes)
            .expect("exterior layer has q = k ≠ 0")
    }

    /// `𝒥₄/𝒥₃`'s reciprocal partner: the ratio `𝒥₃/𝒥₄` without forming the
    /// (possibly overflowing) absolute amplitudes.
    pub(crate) fn exterior_ratio(&self, outer_radius: f64) -> Complex64 {
        let ext = self.layers.last().expect("at least one layer");
        match ext.form {
            Form::Waves { out, inc } => out / inc * (-2.0 * I * self.k * outer_radius).exp(),
            Form::Trig { .. } => unreachable!("exterior is always stored as waves"),
        }
    }

    /// Value and slope at `r` evaluated with the representation of `layer`.
    /// Used to probe continuity from either side of a breakpoint.
    pub fn evaluate_in_layer(&self, layer: usize, r: f64) -> Result<(Complex64, Complex64)> {
        let l = self.layers.get(layer).ok_or(Error::LayerOutOfRange {
            layer,
            layers: self.layers.len(),
        })?;
        let (v, s, shift) = l.local(r - l.origin);
        let ls = l.log_scale + shift;
        Ok((scaled_real(v, ls), scaled_real(s, ls)))
    }

    fn layer_index(&self, r: f64) -> usize {
        self.layers
            .iter()
            .skip(1)
            .take_while(|l| l.start <= r)
            .count()
    }

    fn value_and_slope(&self, r: f64) -> Result<(Complex64, Complex64)> {
        if !(r >= 0.0) {
            return Err(Error::NegativeRadius(r));
        }
        self.evaluate_in_layer(self.layer_index(r), r)
    }

    /// `χ(r)`.
    pub fn chi(&self, r: f64) -> Result<Complex64> {
        self.value_and_slope(r).map(|(v, _)| v)
    }

    /// `dχ/dr`.
    pub fn chi_derivative(&self, r: f64) -> Result<Complex64> {
        self.value_and_slope(r).map(|(_, s)| s)
    }

    /// `d²χ/dr² = −q² χ` in the open layer containing `r`.
    pub fn chi_second_derivative(&self, r: f64) -> Result<Complex64> {
        let (v, _) = self.value_and_slope(r)?;
        let q = self.layers[self.layer_index(r)].q;
        Ok(-q * q * v)
    }
}

fn choose_form(q: Complex64, width: f64, value: Complex64, slope: Complex64, exterior: bool) -> Form {
    let trig = !exterior && (q == Complex64::new(0.0, 0.0) || q.im.abs() * width <= TRIG_LIMIT);
    if trig {
        Form::Trig { value, slope }
    } else {
        let s = -I * (slope / q);
        Form::Waves {
            out: (value + s) * 0.5,
            inc: (value - s) * 0.5,
        }
    }
}

/// Form for the next layer given the previous layer at the shared interface.
///
/// Between two exponential layers the amplitudes are mapped directly, so a
/// growing and a decaying component are never recovered from their sum.
fn next_form(
    prev: Option<(&Layer, f64)>,
    q: Complex64,
    width: f64,
    value: Complex64,
    slope: Complex64,
    exterior: bool,
) -> Form {
    let form = choose_form(q, width, value, slope, exterior);
    if let (Form::Waves { .. }, Some((layer, d))) = (form, prev) {
        if let Some((a, b, _)) = layer.components(d) {
            let rho = layer.q / q;
            return Form::Waves {
                out: ((1.0 + rho) * a + (1.0 - rho) * b) * 0.5,
                inc: ((1.0 - rho) * a + (1.0 + rho) * b) * 0.5,
            };
        }
    }
    form
}

fn renormalize(form: Form, log_scale: &mut f64) -> Form {
    let (a, b) = match form {
        Form::Trig { value, slope } => (value, slope),
        Form::Waves { out, inc } => (out, inc),
    };
    let m = a.norm().max(b.norm());
    if m > 0.0 && m.is_finite() && m.ln().abs() > RESCALE_LIMIT {
        *log_scale += m.ln();
        let (a, b) = (a / m, b / m);
        match form {
            Form::Trig { .. } => Form::Trig { value: a, slope: b },
            Form::Waves { .. } => Form::Waves { out: a, inc: b },
        }
    } else {
        form
    }
}

/// Regular solution at wavenumber `k` (real or complex, `k ≠ 0`).
pub fn solve_regular(pot: &Potential, scale: PhysicalScale, k: Complex64) -> Result<LayerSolution> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::NonConvergent("non-finite wavenumber"));
    }
    let n = pot.layer_count();
    let mut layers = Vec::with_capacity(n);
    let mut value = Complex64::new(0.0, 0.0);
    let mut slope = k;
    let mut log_scale = 0.0;
    for l in 0..n {
        let (start, end) = pot.layer_bounds(l)?;
        let height = pot.height(l)?;
        let q = wavenumber_for_height(scale, k, height);
        let exterior = l + 1 == n;
        let prev = layers.last().map(|p: &Layer| (p, p.end - p.origin));
        let form = next_form(prev, q, end - start, value, slope, exterior);
        let form = renormalize(form, &mut log_scale);
        let layer = Layer {
            start,
            end,
            origin: start,
            height,
            q,
            form,
            log_scale,
        };
        if !exterior {
            let (v, s, shift) = layer.local(end - start);
            value = v;
            slope = s;
            log_scale += shift;
        }
        layers.push(layer);
    }
    Ok(LayerSolution {
        k,
        kappa: scale.kappa(),
        layers,
    })
}

/// Solution with a purely outgoing exterior `e^{ikr}`, carried inward.
///
/// At a zero of `𝒥₊` this is `χ/𝒥₃`. Integrating from the outside keeps
/// every interface continuous by construction; the regular condition at the
/// origin then holds to the accuracy of the pole position.
pub fn solve_outgoing(pot: &Potential, scale: PhysicalScale, k: Complex64) -> Result<LayerSolution> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::NonConvergent("non-finite wavenumber"));
    }
    let n = pot.layer_count();
    let b = pot.outer_radius();
    let mut layers = Vec::with_capacity(n);
    layers.push(Layer {
        start: b,
        end: f64::INFINITY,
        origin: b,
        height: 0.0,
        q: k,
        form: Form::Waves {
            out: (I * k * b).exp(),
            inc: Complex64::new(0.0, 0.0),
        },
        log_scale: 0.0,
    });
    let (mut value, mut slope, mut log_scale) = {
        let (v, s, shift) = layers[0].local(0.0);
        (v, s, shift)
    };
    for l in (0..n - 1).rev() {
        let (start, end) = pot.layer_bounds(l)?;
        let height = pot.height(l)?;
        let q = wavenumber_for_height(scale, k, height);
        let prev = layers.last().map(|p: &Layer| (p, p.start - p.origin));
        let form = next_form(prev, q, end - start, value, slope, false);
        let form = renormalize(form, &mut log_scale);
        let layer = Layer {
            start,
            end,
            origin: end,
            height,
            q,
            form,
            log_scale,
        };
        let (v, s, shift) = layer.local(start - end);
        value = v;
        slope = s;
        log_scale += shift;
        layers.push(layer);
    }
    layers.reverse();
    Ok(LayerSolution {
        k,
        kappa: scale.kappa(),
        layers,
    })
}

/// `χ(r;k)` for `r ≥ 0`.
pub fn evaluate_chi(sol: &LayerSolution, r: f64) -> Result<Complex64> {
    sol.chi(r)
}

/// `χ'(r;k)` for `r ≥ 0`.
pub fn evaluate_chi_derivative(sol: &LayerSolution, r: f64) -> Result<Complex64> {
    sol.chi_derivative(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_shell;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn free_solution_is_sine() {
        let free = make_shell(0.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        for k in [c(2.0, 0.0), c(0.7, -0.3), c(-1.5, -0.2), c(3.0, 1.0)] {
            let sol = solve_regular(&free, scale, k).unwrap();
            let half_i = c(0.0, -0.5);
            let (j3, j4) = sol.exterior();
            assert!(close(j3, half_i, 1e-14), "{j3}");
            assert!(close(j4, -half_i, 1e-14), "{j4}");
            for r in [0.0, 0.3, 1.0, 1.7, 2.0, 5.0] {
                assert!(close(sol.chi(r).unwrap(), (k * r).sin(), 1e-13));
                assert!(close(sol.chi_derivative(r).unwrap(), k * (k * r).cos(), 1e-13));
            }
        }
        let sol = solve_regular(&free, scale, c(2.0, 0.0)).unwrap();
        assert!(close(sol.chi(0.5).unwrap(), c(1.0f64.sin(), 0.0), 1e-15));
        assert!(close(sol.chi_derivative(0.5).unwrap(), c(2.0 * 1.0f64.cos(), 0.0), 1e-15));
    }

    #[test]
    fn innermost_amplitudes_exact() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let sol = solve_regular(&shell, PhysicalScale::default(), c(3.0, -0.4)).unwrap();
        assert_eq!(sol.amplitudes(0), Some((c(0.0, -0.5), c(0.0, 0.5))));
        assert_eq!(sol.chi(0.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        assert_eq!(solve_regular(&shell, scale, c(0.0, 0.0)), Err(Error::ZeroWavenumber));
        let sol = solve_regular(&shell, scale, c(3.0, 0.0)).unwrap();
        assert_eq!(sol.chi(-0.1), Err(Error::NegativeRadius(-0.1)));
        assert!(sol.chi_derivative(-1.0).is_err());
        assert!(sol.chi(f64::NAN).is_err());
    }

    #[test]
    fn continuity_at_breakpoints() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        for k in [c(3.0, 0.0), c(2.2, -0.02), c(1.0, 0.0), c(5.0, -1.5), c(-2.0, -0.3)] {
            let sol = solve_regular(&shell, scale, k).unwrap();
            for (i, &bp) in shell.breakpoints().iter().enumerate() {
                let (vl, sl) = sol.evaluate_in_layer(i, bp).unwrap();
                let (vr, sr) = sol.evaluate_in_layer(i + 1, bp).unwrap();
                let s = vl.norm().max(sl.norm());
                assert!((vl - vr).norm() <= 1e-12 * s, "value jump at {bp} for k={k}");
                assert!((sl - sr).norm() <= 1e-12 * s, "slope jump at {bp} for k={k}");
            }
        }
    }

    #[test]
    fn degenerate_layer_uses_linear_limit() {
        // k² = κV exactly in the shell: q = 0.
        let shell = make_shell(4.0, 1.0, 2.0).unwrap();
        let sol = solve_regular(&shell, PhysicalScale::default(), c(2.0, 0.0)).unwrap();
        assert_eq!(sol.wavenumber(1), Some(c(0.0, 0.0)));
        assert_eq!(sol.amplitudes(1), None);
        let v = 2.0f64.sin();
        let s = 2.0 * 2.0f64.cos();
        for r in [1.0, 1.25, 1.9] {
            assert!(close(sol.chi(r).unwrap(), c(v + s * (r - 1.0), 0.0), 1e-14));
            assert!(close(sol.chi_derivative(r).unwrap(), c(s, 0.0), 1e-14));
        }
        // The limit is continuous in k.
        let near = solve_regular(&shell, PhysicalScale::default(), c(2.0 + 1e-7, 0.0)).unwrap();
        assert!(close(near.chi(3.0).unwrap(), sol.chi(3.0).unwrap(), 1e-6));
    }

    #[test]
    fn thick_barrier_is_rescaled_without_overflow() {
        let wall = make_shell(1e4, 1.0, 11.0).unwrap();
        let sol = solve_regular(&wall, PhysicalScale::default(), c(3.0, 0.0)).unwrap();
        // |q|·width = 1000: e^{1000} would overflow a plain f64.
        assert!(sol.layers[2].log_scale > 900.0);
        let (vl, sl) = sol.evaluate_in_layer(1, 6.0).unwrap();
        assert!(vl.norm().is_finite() && sl.norm().is_finite());
        let ratio = sol.exterior_ratio(11.0);
        assert!((ratio.norm() - 1.0).abs() < 1e-12);
    }
}
