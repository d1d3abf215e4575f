//! The conjugation test `[f(E*)]* = f(E)` separating a mere normalization of
//! the regular solution from a factor that changes its physical content.

use alloc::string::{String, ToString};
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::cmath::sqrt_branch;
use crate::error::{Error, Result};
use crate::potential::{PhysicalScale, Potential};
use crate::solution::solve_regular;
use crate::spectral::{jost, EigenfunctionFamily, FamilyKind};

/// Distance from `±π` that grid points must keep in `arg(E)`.
pub const BRANCH_MARGIN: f64 = 1e-6;
/// Relative deviation accepted as "normalization".
pub const CLASSIFICATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Normalization,
    PhysicallyDistinct,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Normalization => "normalization",
            Classification::PhysicallyDistinct => "physically_distinct",
        }
    }
}

/// Rectangle of complex energies sampled on a uniform `n_re × n_im` lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
    /// Drop points with `|Im E| < 1e−8`, for functions with a cut on the real axis.
    pub skip_real_axis: bool,
}

impl Default for EnergyGrid {
    fn default() -> Self {
        Self {
            re_min: 0.1,
            re_max: 20.0,
            im_min: -5.0,
            im_max: 5.0,
            n_re: 80,
            n_im: 80,
            skip_real_axis: false,
        }
    }
}

impl EnergyGrid {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.re_max < self.re_min || self.im_max < self.im_min {
            return Err(Error::InvalidGrid("energy rectangle bounds are not ordered"));
        }
        if self.n_re == 0 || self.n_im == 0 {
            return Err(Error::InvalidGrid("energy grid needs at least one point per axis"));
        }
        if self.points().any(|e| e.arg().abs() > PI - BRANCH_MARGIN || e == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidGrid("energy grid touches the branch cut"));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, n: usize) -> impl Iterator<Item = f64> {
        let h = if n > 1 { (max - min) / (n - 1) as f64 } else { 0.0 };
        (0..n).map(move |i| min + h * i as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        Self::axis(self.im_min, self.im_max, self.n_im)
            .flat_map(move |im| Self::axis(self.re_min, self.re_max, self.n_re).map(move |re| Complex64::new(re, im)))
            .filter(move |e| !(self.skip_real_axis && e.im.abs() < 1e-8))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub function_label: String,
    /// `max |[f(E*)]* − f(E)|` over finite samples.
    pub max_deviation: f64,
    /// `max |f(E)|` over finite samples.
    pub max_abs: f64,
    pub threshold: f64,
    pub classification: Classification,
    pub grid: EnergyGrid,
    pub evaluated: usize,
    /// Samples where `f(E)` or `f(E*)` was not finite; excluded from the max.
    pub non_finite: usize,
}

/// Evaluate the conjugation symmetry of `f` on `grid`.
pub fn check_symmetry(
    label: &str,
    mut f: impl FnMut(Complex64) -> Complex64,
    grid: &EnergyGrid,
) -> Result<CriterionReport> {
    grid.validate()?;
    let mut max_deviation: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut evaluated = 0;
    let mut non_finite = 0;
    for e in grid.points() {
        let a = f(e);
        let b = f(e.conj()).conj();
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            non_finite += 1;
            continue;
        }
        evaluated += 1;
        max_deviation = max_deviation.max((b - a).norm());
        max_abs = max_abs.max(a.norm());
    }
    let threshold = CLASSIFICATION_TOLERANCE * (1.0 + max_abs);
    let classification = if max_deviation <= threshold {
        Classification::Normalization
    } else {
        Classification::PhysicallyDistinct
    };
    Ok(CriterionReport {
        function_label: label.to_string(),
        max_deviation,
        max_abs,
        threshold,
        classification,
        grid: *grid,
        evaluated,
        non_finite,
    })
}

/// Energy functions the criterion can be applied to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionTarget {
    /// Standing-wave measure `ϱ`.
    Rho,
    /// `ϱ⁺ = ϱ⁻`.
    RhoPlus,
    JostPlus,
    JostMinus,
    /// The factor multiplying `χ` in a family: `√ϱ`, `√ϱ⁺/𝒥₊`, `√ϱ⁻/𝒥₋`.
    Factor(FamilyKind),
    Constant(f64),
}

impl CriterionTarget {
    pub fn label(&self) -> String {
        match self {
            CriterionTarget::Rho => "rho".to_string(),
            CriterionTarget::RhoPlus => "rho_plus".to_string(),
            CriterionTarget::JostPlus => "jost_plus".to_string(),
            CriterionTarget::JostMinus => "jost_minus".to_string(),
            CriterionTarget::Factor(kind) => kind.label().to_string(),
            CriterionTarget::Constant(c) => alloc::format!("constant({c})"),
        }
    }

    /// `f(E)`, with NaN where the underlying solve fails.
    pub fn evaluate(&self, pot: &Potential, scale: PhysicalScale, energy: Complex64) -> Complex64 {
        self.try_evaluate(pot, scale, energy)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    fn try_evaluate(&self, pot: &Potential, scale: PhysicalScale, energy: Complex64) -> Result<Complex64> {
        let k = scale.wavenumber(energy);
        let kappa = scale.kappa();
        match self {
            CriterionTarget::Rho => EigenfunctionFamily::new(FamilyKind::StandingWave).measure(pot, scale, k),
            CriterionTarget::RhoPlus => EigenfunctionFamily::new(FamilyKind::In).measure(pot, scale, k),
            CriterionTarget::JostPlus => jost(pot, scale, k).map(|j| j.j_plus),
            CriterionTarget::JostMinus => jost(pot, scale, k).map(|j| j.j_minus),
            CriterionTarget::Factor(FamilyKind::StandingWave) => {
                let (_, j4) = solve_regular(pot, scale, k)?.exterior();
                let (_, j4c) = solve_regular(pot, scale, k.conj())?.exterior();
                Ok(sqrt_branch(kappa / (4.0 * PI * k * j4 * j4c.conj())))
            }
            CriterionTarget::Factor(kind) => {
                let jp = jost(pot, scale, k)?;
                let j = if *kind == FamilyKind::In { jp.j_plus } else { jp.j_minus };
                Ok(sqrt_branch(kappa / (PI * k)) / j)
            }
            CriterionTarget::Constant(c) => Ok(Complex64::new(*c, 0.0)),
        }
    }
}

/// Apply the criterion to the factor that turns `χ` into the given family.
pub fn classify_eigensolution(
    kind: FamilyKind,
    pot: &Potential,
    scale: PhysicalScale,
    grid: &EnergyGrid,
) -> Result<CriterionReport> {
    let target = CriterionTarget::Factor(kind);
    check_symmetry(kind.label(), |e| target.evaluate(pot, scale, e), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_shell;

    fn small_grid() -> EnergyGrid {
        EnergyGrid {
            n_re: 20,
            n_im: 20,
            ..EnergyGrid::default()
        }
    }

    #[test]
    fn constant_has_zero_deviation() {
        let r = check_symmetry("seven", |_| Complex64::new(7.0, 0.0), &small_grid()).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert_eq!(r.classification, Classification::Normalization);
        assert_eq!(r.evaluated, 400);
    }

    #[test]
    fn non_finite_values_are_counted() {
        let r = check_symmetry("pole", |e| 1.0 / (e - Complex64::new(1.1, 0.0)), &EnergyGrid {
            re_min: 1.1,
            re_max: 1.1,
            im_min: 0.0,
            im_max: 0.0,
            n_re: 1,
            n_im: 1,
            skip_real_axis: false,
        })
        .unwrap();
        assert_eq!(r.non_finite, 1);
        assert_eq!(r.evaluated, 0);
    }

    #[test]
    fn grid_on_branch_cut_is_rejected() {
        let grid = EnergyGrid {
            re_min: -2.0,
            re_max: -1.0,
            im_min: 0.0,
            im_max: 0.0,
            n_re: 3,
            n_im: 1,
            skip_real_axis: false,
        };
        assert!(check_symmetry("x", |e| e, &grid).is_err());
        let skip = EnergyGrid { skip_real_axis: true, ..small_grid() };
        assert!(skip.points().all(|e| e.im.abs() >= 1e-8));
    }

    #[test]
    fn analytic_function_with_real_coefficients_is_symmetric() {
        let r = check_symmetry("poly", |e| e * e - 3.0 * e + 1.0, &small_grid()).unwrap();
        assert_eq!(r.classification, Classification::Normalization);
        let r = check_symmetry("ie", |e| Complex64::new(0.0, 1.0) * e, &small_grid()).unwrap();
        assert_eq!(r.classification, Classification::PhysicallyDistinct);
    }

    #[test]
    fn free_potential_factors_are_normalizations() {
        let free = make_shell(0.0, 1.0, 2.0).unwrap();
        let scale = PhysicalScale::default();
        for kind in FamilyKind::ALL {
            let r = classify_eigensolution(kind, &free, scale, &small_grid()).unwrap();
            assert_eq!(r.classification, Classification::Normalization, "{kind:?}");
        }
    }
}
