//! Piecewise-constant radial potentials and the physical scale `κ = 2m/ħ²`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cmath::sqrt_branch;
use crate::error::{Error, Result};

/// The combination `κ = 2m/ħ²` relating energy and wavenumber, `k² = κE`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScale {
    kappa: f64,
}

impl PhysicalScale {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() && kappa > 0.0 {
            Ok(Self { kappa })
        } else {
            Err(Error::InvalidScale(kappa))
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `E = k²/κ`.
    pub fn energy(&self, k: Complex64) -> Complex64 {
        k * k / self.kappa
    }

    /// `k = √(κE)` on the principal branch.
    pub fn wavenumber(&self, energy: Complex64) -> Complex64 {
        sqrt_branch(energy * self.kappa)
    }
}

impl Default for PhysicalScale {
    fn default() -> Self {
        Self { kappa: 1.0 }
    }
}

/// Radial potential that is constant between consecutive breakpoints and
/// zero beyond the last one.
///
/// Layer 0 covers `[0, breakpoints[0])` with height `heights[0]`, layer `i`
/// covers `[breakpoints[i-1], breakpoints[i])`, and the exterior layer
/// (index `breakpoints.len()`) has height 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

impl Potential {
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidPotential("at least one breakpoint is required"));
        }
        if breakpoints.len() != heights.len() {
            return Err(Error::InvalidPotential(
                "breakpoints and heights must have the same length",
            ));
        }
        if breakpoints.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidPotential("breakpoints must be finite"));
        }
        if breakpoints[0] <= 0.0 {
            return Err(Error::InvalidPotential("breakpoints must be positive"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPotential("breakpoints not increasing"));
        }
        if heights.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("heights must be finite"));
        }
        Ok(Self {
            breakpoints,
            heights,
        })
    }

    /// The identically zero potential, written as a single empty shell.
    pub fn free(radius: f64) -> Result<Self> {
        Self::new(alloc::vec![radius], alloc::vec![0.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Number of layers including the exterior.
    pub fn layer_count(&self) -> usize {
        self.breakpoints.len() + 1
    }

    pub fn exterior_layer(&self) -> usize {
        self.breakpoints.len()
    }

    /// Outer radius `b` beyond which the potential vanishes.
    pub fn outer_radius(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn height(&self, layer: usize) -> Result<f64> {
        match layer {
            l if l < self.heights.len() => Ok(self.heights[l]),
            l if l == self.heights.len() => Ok(0.0),
            l => Err(Error::LayerOutOfRange {
                layer: l,
                layers: self.layer_count(),
            }),
        }
    }

    /// `[start, end)` of a layer; the exterior ends at `+∞`.
    pub fn layer_bounds(&self, layer: usize) -> Result<(f64, f64)> {
        let n = self.breakpoints.len();
        if layer > n {
            return Err(Error::LayerOutOfRange {
                layer,
                layers: self.layer_count(),
            });
        }
        let start = if layer == 0 { 0.0 } else { self.breakpoints[layer - 1] };
        let end = if layer == n { f64::INFINITY } else { self.breakpoints[layer] };
        Ok((start, end))
    }

    pub fn width(&self, layer: usize) -> Result<f64> {
        self.layer_bounds(layer).map(|(s, e)| e - s)
    }

    /// Layer containing `r`; a breakpoint belongs to the layer on its right.
    pub fn layer_of(&self, r: f64) -> usize {
        self.breakpoints.partition_point(|&bp| bp <= r)
    }

    /// `V(r)`.
    pub fn value(&self, r: f64) -> f64 {
        let l = self.layer_of(r);
        self.heights.get(l).copied().unwrap_or(0.0)
    }

    pub fn is_free(&self) -> bool {
        self.heights.iter().all(|&v| v == 0.0)
    }

    /// True when no layer is attractive (no bound states can appear).
    pub fn is_non_negative(&self) -> bool {
        self.heights.iter().all(|&v| v >= 0.0)
    }
}

/// Shell of height `v0` on `(a, b)`, zero inside and outside.
pub fn make_shell(v0: f64, a: f64, b: f64) -> Result<Potential> {
    if !v0.is_finite() {
        return Err(Error::InvalidPotential("heights must be finite"));
    }
    Potential::new(alloc::vec![a, b], alloc::vec![0.0, v0])
}

/// Local wavenumber `q = √(k² − κV)` in a layer, on the [`sqrt_branch`] branch.
///
/// Layers with `V = 0` return `k` itself so that the exterior keeps the
/// caller's sheet.
pub fn local_wavenumber(
    pot: &Potential,
    scale: PhysicalScale,
    k: Complex64,
    layer: usize,
) -> Result<Complex64> {
    let v = pot.height(layer)?;
    Ok(wavenumber_for_height(scale, k, v))
}

pub(crate) fn wavenumber_for_height(scale: PhysicalScale, k: Complex64, v: f64) -> Complex64 {
    if v == 0.0 {
        k
    } else {
        sqrt_branch(k * k - scale.kappa() * v)
    }
}
