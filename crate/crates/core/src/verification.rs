//! Independent oracles and distributional checks.
//!
//! Nothing here is used by the production path. The initial-value
//! integrator and the grid scan share no code with the transfer solver or
//! the resonance finder beyond the Jost evaluation they are checking.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(test))]
use num_traits::Float;
use num_complex::Complex64;

use crate::cmath::{pairwise_sum, I};
use crate::error::{Error, Result};
use crate::potential::{PhysicalScale, Potential};
use crate::quadrature::{linspace, simpson, simpson_real, simpson_weights};
use crate::resonance::SearchRegion;
use crate::spectral::{energy_transform, jost, EigenfunctionFamily, FamilyKind, RadialSamples};

/// Output of [`rk_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSamples {
    pub radii: Vec<f64>,
    pub chi: Vec<Complex64>,
    pub chi_prime: Vec<Complex64>,
    /// Richardson estimate `max |χ_h − χ_2h| / 15`.
    pub error_estimate: f64,
    /// The estimate exceeded `1e−8 · max |χ|`.
    pub step_too_large: bool,
}

type State = [Complex64; 2];

fn rk4_step(s: State, h: f64, c: Complex64) -> State {
    // χ″ = c·χ with c = κV − k² constant on the step.
    let f = |s: State| [s[1], c * s[0]];
    let k1 = f(s);
    let k2 = f([s[0] + k1[0] * (0.5 * h), s[1] + k1[1] * (0.5 * h)]);
    let k3 = f([s[0] + k2[0] * (0.5 * h), s[1] + k2[1] * (0.5 * h)]);
    let k4 = f([s[0] + k3[0] * h, s[1] + k3[1] * h]);
    [
        s[0] + (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (h / 6.0),
        s[1] + (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (h / 6.0),
    ]
}

fn integrate(pot: &Potential, scale: PhysicalScale, k: Complex64, radii: &[f64], h: f64) -> Vec<State> {
    // Segment ends: breakpoints and sample radii, so V is constant on every step.
    let mut stops: Vec<f64> = pot.breakpoints().iter().copied().chain(radii.iter().copied()).collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut out = Vec::with_capacity(radii.len());
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let mut slots = alloc::vec![[Complex64::new(0.0, 0.0); 2]; radii.len()];
    let mut s: State = [Complex64::new(0.0, 0.0), k];
    let mut r = 0.0;
    let mut next = 0;
    while next < order.len() && radii[order[next]] == 0.0 {
        slots[order[next]] = s;
        next += 1;
    }
    for &stop in &stops {
        if next >= order.len() {
            break;
        }
        if stop <= r {
            continue;
        }
        let c = scale.kappa() * pot.value(0.5 * (r + stop)) - k * k;
        let n = ((stop - r) / h).ceil().max(1.0) as usize;
        let step = (stop - r) / n as f64;
        for _ in 0..n {
            s = rk4_step(s, step, c);
        }
        r = stop;
        while next < order.len() && radii[order[next]] == r {
            slots[order[next]] = s;
            next += 1;
        }
    }
    out.extend(slots);
    out
}

/// Fixed-step RK4 integration of `−χ″ + κVχ = k²χ` from `χ(0)=0, χ′(0)=k`.
///
/// Fourth order in `h`; the error is estimated by repeating with `2h`.
pub fn rk_oracle(pot: &Potential, scale: PhysicalScale, k: Complex64, radii: &[f64], h: f64) -> Result<OracleSamples> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidGrid("step must be positive"));
    }
    if let Some(&r) = radii.iter().find(|&&r| !(r >= 0.0) || !r.is_finite()) {
        return Err(Error::NegativeRadius(r));
    }
    let fine = integrate(pot, scale, k, radii, h);
    let coarse = integrate(pot, scale, k, radii, 2.0 * h);
    let mut err: f64 = 0.0;
    let mut scale_max: f64 = 0.0;
    for (a, b) in fine.iter().zip(&coarse) {
        err = err.max((a[0] - b[0]).norm() / 15.0);
        scale_max = scale_max.max(a[0].norm());
    }
    Ok(OracleSamples {
        radii: radii.to_vec(),
        chi: fine.iter().map(|s| s[0]).collect(),
        chi_prime: fine.iter().map(|s| s[1]).collect(),
        error_estimate: err,
        step_too_large: err > 1e-8 * scale_max.max(1e-300),
    })
}

/// Solve `χ(r) = 𝒥₃e^{ikr} + 𝒥₄e^{−ikr}` for `(𝒥₃, 𝒥₄)` from two exterior values.
pub fn fit_exterior(k: Complex64, r1: f64, chi1: Complex64, r2: f64, chi2: Complex64) -> Result<(Complex64, Complex64)> {
    let (a, b) = ((I * k * r1).exp(), (-I * k * r1).exp());
    let (c, d) = ((I * k * r2).exp(), (-I * k * r2).exp());
    let det = a * d - b * c;
    if det.norm() < 1e-12 {
        return Err(Error::InvalidGrid("exterior fit points are degenerate"));
    }
    Ok(((chi1 * d - b * chi2) / det, (a * chi2 - c * chi1) / det))
}

/// Brute-force zeros of `𝒥₊` in `region`: corner winding on an
/// `n_re × n_im` cell grid, then nested shrinking squares.
pub fn grid_scan_oracle(
    pot: &Potential,
    scale: PhysicalScale,
    region: SearchRegion,
    n_re: usize,
    n_im: usize,
) -> Result<Vec<Complex64>> {
    region.validate()?;
    if n_re == 0 || n_im == 0 {
        return Err(Error::InvalidGrid("scan grid needs at least one cell"));
    }
    let f = |k: Complex64| -> Result<Complex64> { Ok(jost(pot, scale, k)?.j_plus) };
    // k = 0 is excluded from the domain; nudge the left edge off it.
    let left = region.re_min.max(1e-6 * (region.re_max - region.re_min));
    let re = linspace(left, region.re_max, n_re + 1);
    let im = linspace(region.im_min, region.im_max, n_im + 1);
    // Phase of 𝒥₊ at the nodes, row by row.
    let node = |i: usize, j: usize| Complex64::new(re[i], im[j]);
    let mut prev: Vec<Complex64> = (0..=n_re).map(|i| f(node(i, 0))).collect::<Result<_>>()?;
    let mut roots: Vec<Complex64> = Vec::new();
    for j in 0..n_im {
        let row: Vec<Complex64> = (0..=n_re).map(|i| f(node(i, j + 1))).collect::<Result<_>>()?;
        for i in 0..n_re {
            let corners = [prev[i], prev[i + 1], row[i + 1], row[i]];
            let mut turn = 0.0;
            for m in 0..4 {
                turn += (corners[(m + 1) % 4] / corners[m]).arg();
            }
            if (turn / (2.0 * PI)).round() as i64 != 0 {
                let (lo, hi) = (node(i, j), node(i + 1, j + 1));
                let k = shrink(&f, lo, hi)?;
                if !roots.iter().any(|r| (r - k).norm() < 1e-9) {
                    roots.push(k);
                }
            }
        }
        prev = row;
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(roots)
}

fn square_winding(f: &impl Fn(Complex64) -> Result<Complex64>, lo: Complex64, hi: Complex64) -> Result<i64> {
    const PER_EDGE: usize = 16;
    let corners = [lo, Complex64::new(hi.re, lo.im), hi, Complex64::new(lo.re, hi.im)];
    let mut pts = Vec::with_capacity(4 * PER_EDGE);
    for m in 0..4 {
        let (a, b) = (corners[m], corners[(m + 1) % 4]);
        for s in 0..PER_EDGE {
            pts.push(a + (b - a) * (s as f64 / PER_EDGE as f64));
        }
    }
    let vals: Vec<Complex64> = pts.iter().map(|&z| f(z)).collect::<Result<_>>()?;
    let mut turn = 0.0;
    for m in 0..vals.len() {
        turn += (vals[(m + 1) % vals.len()] / vals[m]).arg();
    }
    Ok((turn / (2.0 * PI)).round() as i64)
}

/// Nested-square refinement: keep whichever of four overlapping
/// 0.6-scale children still encloses the zero.
fn shrink(f: &impl Fn(Complex64) -> Result<Complex64>, mut lo: Complex64, mut hi: Complex64) -> Result<Complex64> {
    for _ in 0..200 {
        let size = hi - lo;
        if size.re.max(size.im) < 1e-11 * lo.norm().max(1.0) {
            break;
        }
        let child = size * 0.6;
        let offsets = [
            Complex64::new(0.0, 0.0),
            Complex64::new(size.re - child.re, 0.0),
            Complex64::new(0.0, size.im - child.im),
            size - child,
        ];
        let mut next = None;
        for o in offsets {
            let (clo, chi) = (lo + o, lo + o + child);
            if square_winding(f, clo, chi)? != 0 {
                next = Some((clo, chi));
                break;
            }
        }
        match next {
            Some((a, b)) => {
                lo = a;
                hi = b;
            }
            None => return Err(Error::NonConvergent("grid-scan refinement lost the zero")),
        }
    }
    Ok((lo + hi) * 0.5)
}

/// Gaussian test function `g(E) = exp(−(E − center)²/(2 width²))`, cut at 6 widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTest {
    pub center: f64,
    pub width: f64,
}

impl GaussianTest {
    pub fn value(&self, e: f64) -> f64 {
        let x = (e - self.center) / self.width;
        (-0.5 * x * x).exp()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - 6.0 * self.width, self.center + 6.0 * self.width)
    }

    /// `∫ g² dE` over the whole line.
    pub fn norm_sqr(&self) -> f64 {
        self.width * PI.sqrt()
    }

    fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() || !self.center.is_finite() {
            return Err(Error::InvalidGrid("test function width must be positive"));
        }
        if !(self.support().0 > 0.0) {
            return Err(Error::NonPositiveEnergy(self.support().0));
        }
        Ok(())
    }
}

/// Sample counts for the double smearing integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Simpson points across the test function support (odd).
    pub n_energy: usize,
    /// Simpson points on `[0, R_max]` (odd).
    pub n_radius: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmearedDeltaReport {
    pub family: FamilyKind,
    pub test_function: GaussianTest,
    pub r_max: f64,
    pub quadrature: QuadratureSpec,
    /// `∬ dE dE′ g(E) g(E′) ∫₀^R dr ⟨E|r⟩⟨r|E′⟩`.
    pub lhs: f64,
    pub lhs_imag: f64,
    /// `∫ g² dE`.
    pub rhs: f64,
    pub relative_error: f64,
    /// Error after doubling `R_max` (with the radial spacing held fixed).
    pub error_doubled_radius: f64,
    /// Error after doubling both sample counts.
    pub error_doubled_grid: f64,
    /// Neither refinement increased the error by more than a factor 2.
    pub converged: bool,
}

fn smeared_lhs(
    family: EigenfunctionFamily,
    pot: &Potential,
    scale: PhysicalScale,
    g: GaussianTest,
    r_max: f64,
    quad: QuadratureSpec,
) -> Result<Complex64> {
    let (e0, e1) = g.support();
    let energies = linspace(e0, e1, quad.n_energy);
    let weights = simpson_weights(quad.n_energy, (e1 - e0) / (quad.n_energy - 1) as f64)?;
    let eigen = energies
        .iter()
        .map(|&e| family.at_energy(pot, scale, e))
        .collect::<Result<Vec<_>>>()?;
    let gw: Vec<f64> = energies.iter().zip(&weights).map(|(&e, w)| w * g.value(e)).collect();
    let radii = linspace(0.0, r_max, quad.n_radius);
    let mut density = Vec::with_capacity(radii.len());
    let mut terms = Vec::with_capacity(eigen.len());
    for &r in &radii {
        terms.clear();
        for (ef, &w) in eigen.iter().zip(&gw) {
            terms.push(ef.value(r)? * w);
        }
        let phi = pairwise_sum(&terms);
        density.push(phi.conj() * phi);
    }
    simpson(&density, r_max / (quad.n_radius - 1) as f64)
}

/// Check `∫₀^∞ dr ⟨E|r⟩⟨r|E′⟩ = δ(E − E′)` against a Gaussian test function.
pub fn smeared_delta_check(
    family: EigenfunctionFamily,
    pot: &Potential,
    scale: PhysicalScale,
    g: GaussianTest,
    r_max: f64,
    quad: QuadratureSpec,
) -> Result<SmearedDeltaReport> {
    g.validate()?;
    if !(r_max >= 10.0 * pot.outer_radius()) || !r_max.is_finite() {
        return Err(Error::InvalidGrid("R_max must be at least ten times the outer radius"));
    }
    for n in [quad.n_energy, quad.n_radius] {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidGrid("need an odd number (>= 3) of quadrature points"));
        }
    }
    let rhs = g.norm_sqr();
    let err = |lhs: Complex64| (lhs.re - rhs).abs() / rhs;
    let lhs = smeared_lhs(family, pot, scale, g, r_max, quad)?;
    let wide = QuadratureSpec {
        n_energy: quad.n_energy,
        n_radius: 2 * quad.n_radius - 1,
    };
    let fine = QuadratureSpec {
        n_energy: 2 * quad.n_energy - 1,
        n_radius: 2 * quad.n_radius - 1,
    };
    let error_doubled_radius = err(smeared_lhs(family, pot, scale, g, 2.0 * r_max, wide)?);
    let error_doubled_grid = err(smeared_lhs(family, pot, scale, g, r_max, fine)?);
    let relative_error = err(lhs);
    let bound = 2.0 * relative_error + 1e-9;
    Ok(SmearedDeltaReport {
        family: family.kind,
        test_function: g,
        r_max,
        quadrature: quad,
        lhs: lhs.re,
        lhs_imag: lhs.im,
        rhs,
        relative_error,
        error_doubled_radius,
        error_doubled_grid,
        converged: error_doubled_radius <= bound && error_doubled_grid <= bound,
    })
}

/// Free standing-wave smearing with the radial integral done analytically:
/// `∫₀^R sin(kr) sin(k′r) dr = ½[sin((k−k′)R)/(k−k′) − sin((k+k′)R)/(k+k′)]`.
pub fn free_delta_oracle(scale: PhysicalScale, g: GaussianTest, r_max: f64, n_energy: usize) -> Result<f64> {
    g.validate()?;
    let (e0, e1) = g.support();
    let energies = linspace(e0, e1, n_energy);
    let weights = simpson_weights(n_energy, (e1 - e0) / (n_energy - 1) as f64)?;
    let kappa = scale.kappa();
    let ks: Vec<f64> = energies.iter().map(|&e| (kappa * e).sqrt()).collect();
    // √ϱ g w with ϱ = κ/(πk) for the free potential.
    let a: Vec<f64> = (0..n_energy)
        .map(|j| weights[j] * g.value(energies[j]) * (kappa / (PI * ks[j])).sqrt())
        .collect();
    let sinc_r = |x: f64| if x.abs() < 1e-8 { r_max } else { (x * r_max).sin() / x };
    let mut rows = Vec::with_capacity(n_energy);
    let mut terms = Vec::with_capacity(n_energy);
    for i in 0..n_energy {
        terms.clear();
        for j in 0..n_energy {
            terms.push(a[j] * 0.5 * (sinc_r(ks[i] - ks[j]) - sinc_r(ks[i] + ks[j])));
        }
        rows.push(a[i] * crate::cmath::pairwise_sum_real(&terms));
    }
    Ok(crate::cmath::pairwise_sum_real(&rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalReport {
    pub family: FamilyKind,
    /// `∫ |ψ|² dr`.
    pub radial_norm: f64,
    /// `∫ |ψ̂(E)|² dE`.
    pub energy_norm: f64,
    pub relative_error: f64,
    /// Relative change of the transform under radial sample halving.
    pub refinement_change: Option<f64>,
}

/// Compare `∫|ψ|² dr` with `∫|ψ̂(E)|² dE` for a Gaussian bump
/// `ψ(r) = exp(−(r − center)²/(2 width²))` on `[0, r_max]`.
///
/// The energy integral is done in `k` on `[0, k_max]` with `n_k` Simpson
/// points, using `dE = 2k/κ dk`; the integrand vanishes at `k = 0`.
pub fn parseval_check(
    family: EigenfunctionFamily,
    pot: &Potential,
    scale: PhysicalScale,
    center: f64,
    width: f64,
    r_max: f64,
    n_r: usize,
    k_max: f64,
    n_k: usize,
) -> Result<ParsevalReport> {
    if !(width > 0.0) || !(k_max > 0.0) || n_k < 3 || n_k % 2 == 0 {
        return Err(Error::InvalidGrid("bad Parseval grid"));
    }
    let psi = RadialSamples::from_fn(r_max, n_r, |r| {
        let x = (r - center) / width;
        Complex64::new((-0.5 * x * x).exp(), 0.0)
    })?;
    let radial_norm = psi.norm_sqr();
    let ks = linspace(0.0, k_max, n_k);
    let kappa = scale.kappa();
    let energies: Vec<f64> = ks[1..].iter().map(|k| k * k / kappa).collect();
    let t = energy_transform(family, pot, scale, &psi, &energies)?;
    let mut integrand = Vec::with_capacity(n_k);
    integrand.push(0.0);
    for (k, c) in ks[1..].iter().zip(&t.coefficients) {
        integrand.push(c.norm_sqr() * 2.0 * k / kappa);
    }
    let energy_norm = simpson_real(&integrand, k_max / (n_k - 1) as f64)?;
    Ok(ParsevalReport {
        family: family.kind,
        radial_norm,
        energy_norm,
        relative_error: (energy_norm - radial_norm).abs() / radial_norm,
        refinement_change: t.refinement_change,
    })
}
