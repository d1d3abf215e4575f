//! Jost functions, the S-matrix, spectral measures and the three continuum
//! eigenfunction families (standing-wave, "in", "out").

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(test))]
use num_traits::Float;
use num_complex::Complex64;

pub use crate::cmath::sqrt_branch;
use crate::cmath::I;
use crate::error::{Error, Result};
use crate::potential::{PhysicalScale, Potential};
use crate::quadrature::simpson;
use crate::solution::{solve_regular, LayerSolution};

/// Relative size below which `𝒥₊` is treated as a zero.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// `𝒥₊(k) = −2i𝒥₄(k)` and `𝒥₋(k) = 2i𝒥₃(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostPair {
    pub k: Complex64,
    pub j_plus: Complex64,
    pub j_minus: Complex64,
}

impl JostPair {
    pub fn from_solution(sol: &LayerSolution) -> Self {
        let (j3, j4) = sol.exterior();
        Self {
            k: sol.k(),
            j_plus: -2.0 * I * j4,
            j_minus: 2.0 * I * j3,
        }
    }
}

/// `S(k) = 𝒥₋(k)/𝒥₊(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrixValue {
    pub k: Complex64,
    pub s: Complex64,
}

pub fn jost(pot: &Potential, scale: PhysicalScale, k: Complex64) -> Result<JostPair> {
    solve_regular(pot, scale, k).map(|sol| JostPair::from_solution(&sol))
}

/// Fails with [`Error::Pole`] when `|𝒥₊| ≤ 1e−14·|𝒥₋|`.
pub fn s_matrix(pot: &Potential, scale: PhysicalScale, k: Complex64) -> Result<SMatrixValue> {
    let sol = solve_regular(pot, scale, k)?;
    // S = −𝒥₃/𝒥₄, formed from the exterior mantissas so the common scale cancels.
    let ratio = sol.exterior_ratio(pot.outer_radius());
    if !(ratio.norm() < 1.0 / POLE_THRESHOLD) {
        return Err(Error::Pole { k });
    }
    Ok(SMatrixValue { k, s: -ratio })
}

/// Which boundary condition at infinity selects the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `⟨r|E⟩ = √ϱ χ`.
    StandingWave,
    /// `⟨r|E⁺⟩ = √ϱ⁺ χ/𝒥₊`.
    In,
    /// `⟨r|E⁻⟩ = √ϱ⁻ χ/𝒥₋`.
    Out,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [FamilyKind::StandingWave, FamilyKind::In, FamilyKind::Out];

    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::StandingWave => "standing_wave",
            FamilyKind::In => "in",
            FamilyKind::Out => "out",
        }
    }
}

impl core::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standing_wave" | "standing" => Ok(FamilyKind::StandingWave),
            "in" => Ok(FamilyKind::In),
            "out" => Ok(FamilyKind::Out),
            _ => Err(Error::InvalidGrid("unknown eigenfunction family")),
        }
    }
}

/// A δ-normalized eigenfunction family together with its spectral measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenfunctionFamily {
    pub kind: FamilyKind,
}

impl EigenfunctionFamily {
    pub fn new(kind: FamilyKind) -> Self {
        Self { kind }
    }

    /// Spectral measure as a function of `k`.
    ///
    /// Off the real axis `|𝒥₄(k)|²` is continued analytically as
    /// `𝒥₄(k)·[𝒥₄(k*)]*`, which agrees with the modulus for real `k`.
    pub fn measure(&self, pot: &Potential, scale: PhysicalScale, k: Complex64) -> Result<Complex64> {
        let kappa = scale.kappa();
        match self.kind {
            FamilyKind::StandingWave => {
                let (_, j4) = solve_regular(pot, scale, k)?.exterior();
                let (_, j4_conj) = solve_regular(pot, scale, k.conj())?.exterior();
                Ok(kappa / (4.0 * PI * k * j4 * j4_conj.conj()))
            }
            FamilyKind::In | FamilyKind::Out => Ok(kappa / (PI * k)),
        }
    }

    /// Prepare the eigenfunction at a physical energy `E > 0`.
    pub fn at_energy(&self, pot: &Potential, scale: PhysicalScale, energy: f64) -> Result<Eigenfunction> {
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::NonPositiveEnergy(energy));
        }
        let k = scale.wavenumber(Complex64::new(energy, 0.0));
        let sol = solve_regular(pot, scale, k)?;
        let jp = JostPair::from_solution(&sol);
        let kappa = scale.kappa();
        let factor = match self.kind {
            FamilyKind::StandingWave => {
                let rho = kappa / (4.0 * PI * k.re * (jp.j_plus.norm_sqr() / 4.0));
                Complex64::new(rho.sqrt(), 0.0)
            }
            FamilyKind::In | FamilyKind::Out => {
                let j = if self.kind == FamilyKind::In { jp.j_plus } else { jp.j_minus };
                if !(j.norm() > 0.0) || !j.norm().is_finite() {
                    return Err(Error::Pole { k });
                }
                Complex64::new((kappa / (PI * k.re)).sqrt(), 0.0) / j
            }
        };
        Ok(Eigenfunction {
            kind: self.kind,
            energy,
            factor,
            solution: sol,
        })
    }
}

/// `f(E)·χ(r;k)` at a fixed energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub kind: FamilyKind,
    pub energy: f64,
    /// Energy-dependent factor multiplying the regular solution.
    pub factor: Complex64,
    pub solution: LayerSolution,
}

impl Eigenfunction {
    pub fn value(&self, r: f64) -> Result<Complex64> {
        Ok(self.factor * self.solution.chi(r)?)
    }

    pub fn derivative(&self, r: f64) -> Result<Complex64> {
        Ok(self.factor * self.solution.chi_derivative(r)?)
    }
}

/// `⟨r|E⟩`, `⟨r|E⁺⟩` or `⟨r|E⁻⟩`.
pub fn eigenfunction(
    family: EigenfunctionFamily,
    pot: &Potential,
    scale: PhysicalScale,
    energy: f64,
    r: f64,
) -> Result<Complex64> {
    family.at_energy(pot, scale, energy)?.value(r)
}

/// Uniform samples `ψ(j·dr)`, `j = 0..n`, of a radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    dr: f64,
    values: Vec<Complex64>,
}

impl RadialSamples {
    /// `values.len()` must be odd and at least 3 (Simpson's rule).
    pub fn new(dr: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dr > 0.0) || !dr.is_finite() {
            return Err(Error::InvalidGrid("sample spacing must be positive"));
        }
        if values.len() < 3 || values.len() % 2 == 0 {
            return Err(Error::InvalidGrid("need an odd number (>= 3) of radial samples"));
        }
        Ok(Self { dr, values })
    }

    /// Sample `f` on `[0, r_max]` with `n` points.
    pub fn from_fn(r_max: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid("need an odd number (>= 3) of radial samples"));
        }
        let dr = r_max / (n - 1) as f64;
        Self::new(dr, (0..n).map(|j| f(dr * j as f64)).collect())
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn r_max(&self) -> f64 {
        self.dr * (self.values.len() - 1) as f64
    }

    pub fn radius(&self, j: usize) -> f64 {
        self.dr * j as f64
    }

    /// `∫ |ψ|² dr`.
    pub fn norm_sqr(&self) -> f64 {
        let v: Vec<Complex64> = self.values.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        simpson(&v, self.dr).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformWarning {
    /// Fewer than 8 samples per wavelength at the largest requested energy.
    Undersampled { k_max: f64, dr: f64 },
}

/// Coefficients `ψ̂(E) = ∫ dr ⟨E|r⟩ ψ(r)` on an energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub family: FamilyKind,
    pub energies: Vec<f64>,
    pub coefficients: Vec<Complex64>,
    /// `max_E |ψ̂_h − ψ̂_2h| / max_E |ψ̂_h|` from halving the radial samples;
    /// `None` when the sample count does not allow the coarse Simpson rule.
    pub refinement_change: Option<f64>,
    pub warnings: Vec<TransformWarning>,
}

impl Transform {
    /// The coarse-grid comparison changed results by less than `fraction·tolerance`.
    pub fn is_refined(&self, tolerance: f64, fraction: f64) -> bool {
        matches!(self.refinement_change, Some(c) if c < fraction * tolerance)
    }
}

/// Project radial samples onto a family's eigenfunctions with Simpson's rule.
pub fn energy_transform(
    family: EigenfunctionFamily,
    pot: &Potential,
    scale: PhysicalScale,
    psi: &RadialSamples,
    energies: &[f64],
) -> Result<Transform> {
    if energies.is_empty() {
        return Err(Error::InvalidGrid("energy grid is empty"));
    }
    if energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("energy grid must be strictly increasing"));
    }
    if let Some(&e) = energies.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::NonPositiveEnergy(e));
    }
    let mut warnings = Vec::new();
    let k_max = (scale.kappa() * energies[energies.len() - 1]).sqrt();
    if k_max * psi.dr > PI / 4.0 {
        warnings.push(TransformWarning::Undersampled { k_max, dr: psi.dr });
    }
    let n = psi.values.len();
    let coarse_ok = n % 4 == 1 && n >= 5;
    let mut coefficients = Vec::with_capacity(energies.len());
    let mut max_change: f64 = 0.0;
    let mut max_coef: f64 = 0.0;
    let mut integrand = Vec::with_capacity(n);
    let mut coarse = Vec::with_capacity(n / 2 + 1);
    for &e in energies {
        let ef = family.at_energy(pot, scale, e)?;
        integrand.clear();
        for (j, &v) in psi.values.iter().enumerate() {
            integrand.push(ef.value(psi.radius(j))?.conj() * v);
        }
        let c = simpson(&integrand, psi.dr)?;
        if coarse_ok {
            coarse.clear();
            coarse.extend(integrand.iter().step_by(2).copied());
            let c2 = simpson(&coarse, 2.0 * psi.dr)?;
            max_change = max_change.max((c - c2).norm());
        }
        max_coef = max_coef.max(c.norm());
        coefficients.push(c);
    }
    let refinement_change = if coarse_ok {
        Some(if max_coef > 0.0 { max_change / max_coef } else { 0.0 })
    } else {
        None
    };
    Ok(Transform {
        family: family.kind,
        energies: energies.to_vec(),
        coefficients,
        refinement_change,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_shell;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_jost_is_one() {
        let free = make_shell(0.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        for k in [c(0.3, 0.0), c(4.0, 0.0), c(1.0, -1.0), c(-2.0, 0.5)] {
            let jp = jost(&free, scale, k).unwrap();
            assert!((jp.j_plus - 1.0).norm() < 1e-14);
            assert!((jp.j_minus - 1.0).norm() < 1e-14);
            assert!((s_matrix(&free, scale, k).unwrap().s - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn jost_conjugate_on_real_axis() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        for i in 1..200 {
            let k = c(0.05 * i as f64, 0.0);
            let jp = jost(&shell, scale, k).unwrap();
            assert!((jp.j_plus.conj() - jp.j_minus).norm() <= 1e-12 * jp.j_plus.norm());
        }
    }

    #[test]
    fn pole_is_rejected() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        // Locate the first pole crudely with Newton on 𝒥₊ to get within round-off.
        let mut k = c(2.236, -0.0193);
        for _ in 0..30 {
            let h = 1e-7;
            let f = jost(&shell, scale, k).unwrap().j_plus;
            let df = (jost(&shell, scale, k + h).unwrap().j_plus - jost(&shell, scale, k - h).unwrap().j_plus) / (2.0 * h);
            k -= f / df;
        }
        assert!(matches!(s_matrix(&shell, scale, k), Err(Error::Pole { .. })));
    }

    #[test]
    fn measures_on_real_axis() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::new(2.0).unwrap();
        let sw = EigenfunctionFamily::new(FamilyKind::StandingWave);
        let inn = EigenfunctionFamily::new(FamilyKind::In);
        for i in 1..50 {
            let k = c(0.1 * i as f64, 0.0);
            let rho = sw.measure(&shell, scale, k).unwrap();
            let rho_plus = inn.measure(&shell, scale, k).unwrap();
            let (_, j4) = solve_regular(&shell, scale, k).unwrap().exterior();
            assert!(rho.re > 0.0 && rho.im.abs() < 1e-14 * rho.re);
            assert!(rho_plus.re > 0.0);
            assert!((4.0 * rho * j4.norm_sqr() - rho_plus).norm() <= 1e-12 * rho_plus.norm());
        }
    }

    #[test]
    fn eigenfunction_domain() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        let fam = EigenfunctionFamily::new(FamilyKind::StandingWave);
        assert_eq!(eigenfunction(fam, &shell, scale, 0.0, 1.0), Err(Error::NonPositiveEnergy(0.0)));
        assert!(eigenfunction(fam, &shell, scale, -1.0, 1.0).is_err());
        assert!(eigenfunction(fam, &shell, scale, 9.0, -1.0).is_err());
        for kind in FamilyKind::ALL {
            let v = eigenfunction(EigenfunctionFamily::new(kind), &shell, scale, 9.0, 0.0).unwrap();
            assert_eq!(v, c(0.0, 0.0));
        }
    }

    #[test]
    fn in_is_s_times_out() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        let inn = EigenfunctionFamily::new(FamilyKind::In);
        let out = EigenfunctionFamily::new(FamilyKind::Out);
        for e in [0.5, 5.0, 9.0, 30.0] {
            let s = s_matrix(&shell, scale, scale.wavenumber(c(e, 0.0))).unwrap().s;
            for r in [0.3, 1.4, 2.5, 7.0] {
                let p = eigenfunction(inn, &shell, scale, e, r).unwrap();
                let m = eigenfunction(out, &shell, scale, e, r).unwrap();
                assert!((p - s * m).norm() <= 1e-12 * (1.0 + p.norm()));
            }
        }
    }

    #[test]
    fn transform_rejects_bad_grids() {
        let shell = make_shell(8.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        let fam = EigenfunctionFamily::new(FamilyKind::In);
        let psi = RadialSamples::from_fn(10.0, 101, |_| c(0.0, 0.0)).unwrap();
        assert!(energy_transform(fam, &shell, scale, &psi, &[]).is_err());
        assert!(energy_transform(fam, &shell, scale, &psi, &[2.0, 1.0]).is_err());
        assert!(energy_transform(fam, &shell, scale, &psi, &[0.0, 1.0]).is_err());
        assert!(RadialSamples::new(0.1, alloc::vec![c(0.0, 0.0); 4]).is_err());
        let t = energy_transform(fam, &shell, scale, &psi, &[1.0, 2.0, 3.0]).unwrap();
        assert!(t.coefficients.iter().all(|z| z.norm() == 0.0));
        // 100 samples over 10 at E = 400 (k = 20) is below 8 points per wavelength.
        let t = energy_transform(fam, &shell, scale, &psi, &[400.0]).unwrap();
        assert_eq!(t.warnings.len(), 1);
    }
}
