//! Purely outgoing (Gamow) states: zeros of `𝒥₊` in the lower half k-plane.
//!
//! The search tiles the requested rectangle with cells, counts the zeros in
//! each cell with the argument principle, refines them with Newton's method
//! (numerically differentiated `𝒥₊`), and cross-checks the total against the
//! winding number of `𝒥₊` around the whole rectangle. Each zero is a pole of
//! `S`; its residue gives the normalization `N² = i·res S`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(test))]
use num_traits::Float;
use num_complex::Complex64;

use crate::cmath::{arg_step, sqrt_branch, I};
use crate::error::{Error, Result};
use crate::potential::{PhysicalScale, Potential};
use crate::solution::{solve_outgoing, solve_regular, LayerSolution};
use crate::spectral::jost;

/// Relative Newton step at which a root counts as refined.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Allowed relative disagreement between the two residue evaluations.
pub const RESIDUE_AGREEMENT: f64 = 1e-6;

const MAX_ARG_STEP: f64 = 0.4;
const MAX_BISECTIONS: u32 = 50;
const INITIAL_SEGMENT: f64 = 0.05;
const MAX_CELL_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GamowKind {
    /// Pole in the fourth quadrant, energy `E − iΓ/2`.
    Decaying,
    /// Reflected pole `−k*` in the third quadrant, energy `E + iΓ/2`.
    Growing,
}

impl GamowKind {
    pub fn label(self) -> &'static str {
        match self {
            GamowKind::Decaying => "decaying",
            GamowKind::Growing => "growing",
        }
    }
}

/// A resonance pole with its residue normalization and eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct GamowState {
    pub kind: GamowKind,
    pub k_pole: Complex64,
    /// `z = k²/κ`.
    pub z_pole: Complex64,
    /// `E_n = Re z`.
    pub energy: f64,
    /// `Γ_n = ∓2 Im z`, positive for both kinds.
    pub width: f64,
    /// `N_n²` (decaying) or `M_n²` (growing).
    pub norm_sq: Complex64,
    /// `N_n` or `M_n` on the principal branch.
    pub norm: Complex64,
    outer_radius: f64,
    solution: LayerSolution,
}

impl GamowState {
    fn build(
        kind: GamowKind,
        pot: &Potential,
        scale: PhysicalScale,
        k_pole: Complex64,
        norm_sq: Complex64,
    ) -> Result<Self> {
        let solution = solve_outgoing(pot, scale, k_pole)?;
        let z_pole = scale.energy(k_pole);
        let norm = sqrt_branch(norm_sq);
        let width = match kind {
            GamowKind::Decaying => -2.0 * z_pole.im,
            GamowKind::Growing => 2.0 * z_pole.im,
        };
        Ok(Self {
            kind,
            k_pole,
            z_pole,
            energy: z_pole.re,
            width,
            norm_sq,
            norm,
            outer_radius: pot.outer_radius(),
            solution,
        })
    }

    /// The outgoing solution `χ/𝒥₃` (exterior exactly `e^{ikr}`).
    pub fn solution(&self) -> &LayerSolution {
        &self.solution
    }

    /// `⟨r|z_n⁻⟩` or `⟨r|z_n*⁺⟩`.
    pub fn value(&self, r: f64) -> Result<Complex64> {
        if !(r >= 0.0) {
            return Err(Error::NegativeRadius(r));
        }
        if r >= self.outer_radius {
            Ok(self.norm * (I * self.k_pole * r).exp())
        } else {
            Ok(self.norm * self.solution.chi(r)?)
        }
    }

    pub fn derivative(&self, r: f64) -> Result<Complex64> {
        if !(r >= 0.0) {
            return Err(Error::NegativeRadius(r));
        }
        if r >= self.outer_radius {
            Ok(I * self.k_pole * self.norm * (I * self.k_pole * r).exp())
        } else {
            Ok(self.norm * self.solution.chi_derivative(r)?)
        }
    }

    /// Value and slope at `r` from a specific layer's formula, for continuity checks.
    pub fn evaluate_in_layer(&self, layer: usize, r: f64) -> Result<(Complex64, Complex64)> {
        if layer + 1 == self.solution.layer_count() {
            let e = self.norm * (I * self.k_pole * r).exp();
            Ok((e, I * self.k_pole * e))
        } else {
            let (v, s) = self.solution.evaluate_in_layer(layer, r)?;
            Ok((self.norm * v, self.norm * s))
        }
    }
}

/// Gamow eigenfunction at radius `r`.
pub fn gamow_eigenfunction(state: &GamowState, r: f64) -> Result<Complex64> {
    state.value(r)
}

/// The mirrored state at `−k*` with energy `z*`.
///
/// The partner's `M²` is computed from the residue of `S` at the mirrored
/// pole rather than copied, so `M² = (N²)*` remains a checkable identity.
pub fn growing_partner(state: &GamowState, pot: &Potential, scale: PhysicalScale) -> Result<GamowState> {
    let kind = match state.kind {
        GamowKind::Decaying => GamowKind::Growing,
        GamowKind::Growing => GamowKind::Decaying,
    };
    let k = -state.k_pole.conj();
    let norm_sq = contour_norm(pot, scale, k).unwrap_or(state.norm_sq.conj());
    GamowState::build(kind, pot, scale, k, norm_sq)
}

/// Rectangle `re_min < Re k ≤ re_max`, `im_min ≤ Im k < im_max` in the lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.re_min, self.re_max, self.im_min, self.im_max];
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidRegion("bounds must be finite"));
        }
        if self.re_min < 0.0 || self.im_max > 0.0 {
            return Err(Error::InvalidRegion("region must lie in the fourth quadrant"));
        }
        if !(self.re_max > self.re_min) || !(self.im_max > self.im_min) {
            return Err(Error::InvalidRegion("bounds are not ordered"));
        }
        Ok(())
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re > self.re_min && k.re <= self.re_max && k.im >= self.im_min && k.im < self.im_max
    }
}

/// Tuning knobs for [`find_resonances`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Approximate cell edge length for the argument-principle scan.
    pub cell_size: f64,
    pub max_states: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            cell_size: 0.25,
            max_states: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSearch {
    /// Decaying states sorted by ascending `Re k`.
    pub states: Vec<GamowState>,
    /// Winding number of `𝒥₊` around the search contour.
    pub winding: i64,
    /// Zeros that refined onto or above the real axis (numerical artefacts
    /// or bound-state leakage); counted for the winding check, not returned
    /// as states.
    pub axis_zeros: Vec<Complex64>,
    /// More than `max_states` poles were found; only the first are kept.
    pub truncated: bool,
}

/// Zeros of `𝒥₊` inside `region`, refined and cross-checked.
pub fn find_resonances(
    pot: &Potential,
    scale: PhysicalScale,
    region: SearchRegion,
    max_states: usize,
) -> Result<ResonanceSearch> {
    find_resonances_with(
        pot,
        scale,
        region,
        SearchOptions {
            max_states,
            ..SearchOptions::default()
        },
    )
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re0, self.im0),
            Complex64::new(self.re1, self.im0),
            Complex64::new(self.re1, self.im1),
            Complex64::new(self.re0, self.im1),
        ]
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    fn size(&self) -> f64 {
        (self.re1 - self.re0).max(self.im1 - self.im0)
    }

    fn contains(&self, k: Complex64, slack: f64) -> bool {
        k.re >= self.re0 - slack && k.re <= self.re1 + slack && k.im >= self.im0 - slack && k.im <= self.im1 + slack
    }

    fn quarters(&self) -> [Rect; 4] {
        let (rm, im) = (0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1));
        [
            Rect { re0: self.re0, re1: rm, im0: self.im0, im1: im },
            Rect { re0: rm, re1: self.re1, im0: self.im0, im1: im },
            Rect { re0: rm, re1: self.re1, im0: im, im1: self.im1 },
            Rect { re0: self.re0, re1: rm, im0: im, im1: self.im1 },
        ]
    }
}

struct JostPlus<'a> {
    pot: &'a Potential,
    scale: PhysicalScale,
}

impl JostPlus<'_> {
    fn eval(&self, k: Complex64) -> Result<Complex64> {
        let j = jost(self.pot, self.scale, k)?.j_plus;
        if j.re.is_finite() && j.im.is_finite() {
            Ok(j)
        } else {
            Err(Error::NonConvergent("Jost function overflowed"))
        }
    }

    /// Richardson-extrapolated central difference with `h = 1e−6·max(1, |k|)`.
    fn derivative(&self, k: Complex64) -> Result<Complex64> {
        let h = 1e-6 * k.norm().max(1.0);
        let d = |h: f64| -> Result<Complex64> { Ok((self.eval(k + h)? - self.eval(k - h)?) / (2.0 * h)) };
        let (d1, d2) = (d(h)?, d(0.5 * h)?);
        Ok((4.0 * d2 - d1) / 3.0)
    }

    /// First and second derivatives from five-point stencils, Richardson-extrapolated.
    fn taylor(&self, k: Complex64) -> Result<(Complex64, Complex64)> {
        let h0 = 1e-3 * k.norm().max(1.0);
        let f0 = self.eval(k)?;
        let stencil = |h: f64| -> Result<(Complex64, Complex64)> {
            let (m2, m1) = (self.eval(k - 2.0 * h)?, self.eval(k - h)?);
            let (p1, p2) = (self.eval(k + h)?, self.eval(k + 2.0 * h)?);
            let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            let d2 = (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h);
            Ok((d1, d2))
        };
        let (a1, a2) = stencil(h0)?;
        let (b1, b2) = stencil(0.5 * h0)?;
        Ok(((16.0 * b1 - a1) / 15.0, (16.0 * b2 - a2) / 15.0))
    }

    /// Phase change of `𝒥₊` along the segment, adaptively refined.
    fn phase_along(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let steps = (((b - a).norm() / INITIAL_SEGMENT).ceil() as usize).max(1);
        let mut total = 0.0;
        let mut za = a;
        let mut fa = self.eval(a)?;
        for i in 1..=steps {
            let zb = if i == steps { b } else { a + (b - a) * (i as f64 / steps as f64) };
            let fb = self.eval(zb)?;
            total += self.phase_segment(za, fa, zb, fb, 0)?;
            za = zb;
            fa = fb;
        }
        Ok(total)
    }

    fn phase_segment(&self, za: Complex64, fa: Complex64, zb: Complex64, fb: Complex64, depth: u32) -> Result<f64> {
        let step = arg_step(fa, fb);
        if step.abs() <= MAX_ARG_STEP {
            return Ok(step);
        }
        if depth >= MAX_BISECTIONS {
            return Err(Error::NonConvergent("argument principle contour passes through a zero"));
        }
        let zm = (za + zb) * 0.5;
        let fm = self.eval(zm)?;
        Ok(self.phase_segment(za, fa, zm, fm, depth + 1)? + self.phase_segment(zm, fm, zb, fb, depth + 1)?)
    }

    fn winding(&self, rect: &Rect) -> Result<i64> {
        let c = rect.corners();
        let mut total = 0.0;
        for i in 0..4 {
            total += self.phase_along(c[i], c[(i + 1) % 4])?;
        }
        Ok((total / (2.0 * PI)).round() as i64)
    }

    fn newton(&self, start: Complex64) -> Result<Complex64> {
        let mut k = start;
        let mut converged = 0;
        for _ in 0..60 {
            let f = self.eval(k)?;
            if f == Complex64::new(0.0, 0.0) {
                return Ok(k);
            }
            let step = f / self.derivative(k)?;
            if !(step.re.is_finite() && step.im.is_finite()) {
                return Err(Error::NonConvergent("Newton step is not finite"));
            }
            k -= step;
            if step.norm() < ROOT_TOLERANCE * k.norm() {
                converged += 1;
                if converged >= 2 {
                    return Ok(k);
                }
            }
        }
        Err(Error::NonConvergent("Newton refinement of a Jost zero"))
    }

    /// Roots inside `rect`, which encloses `winding` zeros.
    fn isolate(&self, rect: Rect, winding: i64, depth: u32, roots: &mut Vec<(Complex64, i64)>) -> Result<()> {
        match winding {
            0 => return Ok(()),
            w if w < 0 => return Err(Error::NonConvergent("negative winding number for an analytic function")),
            _ => {}
        }
        if winding == 1 {
            if let Ok(k) = self.newton(rect.center()) {
                if rect.contains(k, 1e-9 * k.norm().max(1.0)) {
                    roots.push((k, 1));
                    return Ok(());
                }
            }
        }
        if depth >= MAX_CELL_DEPTH || rect.size() < 1e-12 {
            // Multiple zero (or a cluster below resolution).
            let k = self.newton(rect.center()).unwrap_or(rect.center());
            roots.push((k, winding));
            return Ok(());
        }
        let mut found = 0;
        for q in rect.quarters() {
            let w = self.winding(&q)?;
            found += w;
            self.isolate(q, w, depth + 1, roots)?;
        }
        if found != winding {
            return Err(Error::NonConvergent("sub-cell windings do not add up"));
        }
        Ok(())
    }
}

/// [`find_resonances`] with explicit options.
pub fn find_resonances_with(
    pot: &Potential,
    scale: PhysicalScale,
    region: SearchRegion,
    options: SearchOptions,
) -> Result<ResonanceSearch> {
    region.validate()?;
    let f = JostPlus { pot, scale };
    let height = region.im_max - region.im_min;
    // 𝒥₊ has no zeros off the imaginary axis in the upper half-plane, so an
    // open top edge on the real axis can be lifted into it. The same holds
    // for an open left edge on the imaginary axis, moved just inside.
    let top = if region.im_max == 0.0 { (0.1 * height).min(0.1) } else { region.im_max };
    let left = if region.re_min == 0.0 { 1e-6 * (region.re_max - region.re_min) } else { region.re_min };
    let contour = Rect {
        re0: left,
        re1: region.re_max,
        im0: region.im_min,
        im1: top,
    };
    let winding = f.winding(&contour)?;

    let cell = options.cell_size.max(1e-3);
    let n_re = (((contour.re1 - contour.re0) / cell).ceil() as usize).max(1);
    let n_im = (((contour.im1 - contour.im0) / cell).ceil() as usize).max(1);
    let (dre, dim) = ((contour.re1 - contour.re0) / n_re as f64, (contour.im1 - contour.im0) / n_im as f64);
    let mut roots = Vec::new();
    for i in 0..n_re {
        for j in 0..n_im {
            let rect = Rect {
                re0: contour.re0 + dre * i as f64,
                re1: if i + 1 == n_re { contour.re1 } else { contour.re0 + dre * (i + 1) as f64 },
                im0: contour.im0 + dim * j as f64,
                im1: if j + 1 == n_im { contour.im1 } else { contour.im0 + dim * (j + 1) as f64 },
            };
            let w = f.winding(&rect)?;
            f.isolate(rect, w, 0, &mut roots)?;
        }
    }
    // Merge duplicates from roots sitting on shared cell edges.
    let mut merged: Vec<(Complex64, i64)> = Vec::new();
    for (k, m) in roots {
        match merged.iter().position(|(q, _)| (q - k).norm() <= 1e-9 * k.norm().max(1.0)) {
            Some(_) => {}
            None => merged.push((k, m)),
        }
    }
    let found: i64 = merged.iter().map(|(_, m)| m).sum();
    if found != winding {
        return Err(Error::MissedRoots {
            winding,
            found: found.max(0) as usize,
        });
    }
    merged.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let mut axis_zeros = Vec::new();
    let mut poles = Vec::new();
    for (k, _) in merged {
        if k.im < 0.0 {
            if region.contains(k) {
                poles.push(k);
            }
        } else {
            axis_zeros.push(k);
        }
    }
    let truncated = poles.len() > options.max_states;
    poles.truncate(options.max_states);
    let states = poles
        .into_iter()
        .map(|k| {
            let norm_sq = residue_norm(pot, scale, k)?;
            GamowState::build(GamowKind::Decaying, pot, scale, k, norm_sq)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResonanceSearch {
        states,
        winding,
        axis_zeros,
        truncated,
    })
}

/// Both evaluations of `N² = i·res[S]` at a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueEstimate {
    pub contour: Complex64,
    pub derivative: Complex64,
    pub radius: f64,
    pub relative_gap: f64,
}

/// Trapezoid rule for `(1/2πi)∮ g dk` on a circle, returned as `i·res`.
pub fn contour_residue(g: impl Fn(Complex64) -> Result<Complex64>, center: Complex64, radius: f64, points: usize) -> Result<Complex64> {
    let mut terms = Vec::with_capacity(points);
    for j in 0..points {
        let theta = 2.0 * PI * (j as f64 + 0.5) / points as f64;
        let w = Complex64::from_polar(radius, theta);
        terms.push(g(center + w)? * w);
    }
    Ok(crate::cmath::pairwise_sum(&terms) / points as f64)
}

fn residue_radius(f: &JostPlus<'_>, k: Complex64) -> Result<f64> {
    let scale = k.norm().max(1.0);
    let mut rho = 1e-3 * scale;
    while rho >= 1e-4 * scale * 0.999 {
        let probe = Rect {
            re0: k.re - 2.0 * rho,
            re1: k.re + 2.0 * rho,
            im0: k.im - 2.0 * rho,
            im1: k.im + 2.0 * rho,
        };
        if f.winding(&probe)? == 1 {
            return Ok(rho);
        }
        rho /= 3.0;
    }
    Err(Error::NonConvergent("no isolating circle around the pole"))
}

/// Poles closer to the real axis than this (relative to `|k|`) are treated
/// as narrow: `S` is unimodular to within rounding on any resolvable circle.
const NARROW_POLE: f64 = 5e-6;

fn is_narrow(k: Complex64) -> bool {
    k.im.abs() < NARROW_POLE * k.norm().max(1.0)
}

/// `𝒥₋(k_p) = 𝒥₊(−k_p)`.
///
/// For a narrow pole `−k_p` sits within `2|Im k_p|` of the mirrored zero
/// `−k_p*`, so direct evaluation loses everything to cancellation. Expand
/// about the mirrored zero instead.
fn j_minus_at_pole(f: &JostPlus<'_>, k_pole: Complex64) -> Result<Complex64> {
    if !is_narrow(k_pole) {
        return Ok(jost(f.pot, f.scale, k_pole)?.j_minus);
    }
    let m = -k_pole.conj();
    let delta = Complex64::new(0.0, -2.0 * k_pole.im);
    let (d1, d2) = f.taylor(m)?;
    Ok(d1 * delta + 0.5 * d2 * delta * delta)
}

fn contour_norm(pot: &Potential, scale: PhysicalScale, k_pole: Complex64) -> Result<Complex64> {
    let f = JostPlus { pot, scale };
    let rho = residue_radius(&f, k_pole)?;
    if is_narrow(k_pole) {
        // 𝒥₋ is analytic, so ∮S = 𝒥₋(k_p)∮1/𝒥₊.
        let inv = contour_residue(|k| Ok(1.0 / f.eval(k)?), k_pole, rho, 128)?;
        return Ok(I * j_minus_at_pole(&f, k_pole)? * inv);
    }
    let s = |k: Complex64| -> Result<Complex64> {
        let sol = solve_regular(pot, scale, k)?;
        Ok(-sol.exterior_ratio(pot.outer_radius()))
    };
    Ok(I * contour_residue(s, k_pole, rho, 128)?)
}

/// Contour-integral and derivative-formula values of `N² = i·res S` at a pole.
pub fn residue_estimate(pot: &Potential, scale: PhysicalScale, k_pole: Complex64) -> Result<ResidueEstimate> {
    let f = JostPlus { pot, scale };
    let radius = residue_radius(&f, k_pole)?;
    let contour = contour_norm(pot, scale, k_pole)?;
    let (dj, _) = f.taylor(k_pole)?;
    let derivative = I * j_minus_at_pole(&f, k_pole)? / dj;
    let relative_gap = (contour - derivative).norm() / contour.norm();
    Ok(ResidueEstimate {
        contour,
        derivative,
        radius,
        relative_gap,
    })
}

/// `N² = i·res[S(k)]` at a refined zero of `𝒥₊`, cross-checked between a
/// circular contour integral and `i𝒥₋/𝒥₊'`.
pub fn residue_norm(pot: &Potential, scale: PhysicalScale, k_pole: Complex64) -> Result<Complex64> {
    let est = residue_estimate(pot, scale, k_pole)?;
    if !(est.relative_gap <= RESIDUE_AGREEMENT) {
        return Err(Error::IllConditionedResidue {
            k: k_pole,
            contour: est.contour,
            derivative: est.derivative,
            relative_gap: est.relative_gap,
        });
    }
    Ok(est.contour)
}
