//! One function per subcommand: compute a [`Table`] from a loaded config.

use gamow_core::cmath::I;
use gamow_core::criterion::{Classification, CriterionTarget};
use gamow_core::quadrature::linspace;
use gamow_core::resonance::{find_resonances_with, residue_estimate, SearchOptions};
use gamow_core::spectral::{EigenfunctionFamily, FamilyKind, RadialSamples, TransformWarning};
use gamow_core::{
    check_symmetry, classify_eigensolution, energy_transform, growing_partner, jost, parseval_check, s_matrix,
    smeared_delta_check, Complex64, GaussianTest, QuadratureSpec, ResonanceSearch,
};

use crate::config::{Loaded, Tolerances};
use crate::error::CliError;
use crate::output::{Cell, Table};

fn family(name: &str) -> Result<FamilyKind, CliError> {
    name.parse()
        .map_err(|_| CliError::Config(format!("unknown family `{name}` (standing_wave, in, out)")))
}

fn grid(min: f64, max: f64, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if n == 0 || !(min.is_finite() && max.is_finite()) || (n > 1 && !(max > min)) {
        return Err(CliError::Config(format!("{what} grid needs min < max and at least one point")));
    }
    Ok(linspace(min, max, n))
}

pub fn smatrix(run: &Loaded) -> Result<Table, CliError> {
    let c = &run.config.smatrix;
    if !(c.k_min > 0.0) {
        return Err(CliError::Config("smatrix.k_min must be positive".into()));
    }
    let mut t = Table::new(&["k", "E", "re_S", "im_S", "abs_S", "arg_S"]);
    for k in grid(c.k_min, c.k_max, c.points, "smatrix")? {
        let kk = Complex64::new(k, 0.0);
        let s = s_matrix(&run.potential, run.scale, kk)?.s;
        t.push(vec![
            k.into(),
            run.scale.energy(kk).re.into(),
            s.re.into(),
            s.im.into(),
            s.norm().into(),
            s.arg().into(),
        ]);
    }
    Ok(t)
}

fn search(run: &Loaded, warnings: &mut Vec<String>) -> Result<ResonanceSearch, CliError> {
    let (region, clipped) = run.region()?;
    if clipped {
        warnings.push("search region reached into Im k > 0; clipped at the real axis".into());
    }
    let options = SearchOptions {
        cell_size: run.config.resonances.cell_size,
        max_states: run.config.resonances.max_states,
    };
    let found = find_resonances_with(&run.potential, run.scale, region, options)?;
    for k in &found.axis_zeros {
        warnings.push(format!("Jost zero on or above the real axis at k = {} {:+}i, not reported", k.re, k.im));
    }
    if found.truncated {
        warnings.push(format!("more than {} poles found; table truncated", options.max_states));
    }
    Ok(found)
}

pub fn resonances(run: &Loaded) -> Result<Table, CliError> {
    let mut t = Table::new(&["n", "re_k", "im_k", "E_n", "Gamma_n", "re_N2", "im_N2"]);
    let found = search(run, &mut t.warnings)?;
    for (n, s) in found.states.iter().enumerate() {
        t.push(vec![
            Cell::Int(n as i64 + 1),
            s.k_pole.re.into(),
            s.k_pole.im.into(),
            s.energy.into(),
            s.width.into(),
            s.norm_sq.re.into(),
            s.norm_sq.im.into(),
        ]);
    }
    Ok(t)
}

pub fn eigenfunction(run: &Loaded) -> Result<Table, CliError> {
    let c = &run.config.eigenfunction;
    let mut t = Table::new(&["r", "re_psi", "im_psi"]);
    let radii = grid(0.0, c.r_max, c.points, "eigenfunction radius")?;
    if c.family == "gamow" {
        let found = search(run, &mut t.warnings)?;
        let state = c
            .pole
            .checked_sub(1)
            .and_then(|i| found.states.get(i))
            .ok_or_else(|| {
                CliError::Config(format!("pole {} not found ({} poles in region)", c.pole, found.states.len()))
            })?;
        let state = if c.growing {
            growing_partner(state, &run.potential, run.scale)?
        } else {
            state.clone()
        };
        for r in radii {
            let v = state.value(r)?;
            t.push(vec![r.into(), v.re.into(), v.im.into()]);
        }
    } else {
        let ef = EigenfunctionFamily::new(family(&c.family)?).at_energy(&run.potential, run.scale, c.energy)?;
        for r in radii {
            let v = ef.value(r)?;
            t.push(vec![r.into(), v.re.into(), v.im.into()]);
        }
    }
    Ok(t)
}

fn criterion_target(name: &str) -> Result<CriterionTarget, CliError> {
    Ok(match name {
        "rho" => CriterionTarget::Rho,
        "rho_plus" => CriterionTarget::RhoPlus,
        "jost_plus" => CriterionTarget::JostPlus,
        "jost_minus" => CriterionTarget::JostMinus,
        other => CriterionTarget::Factor(family(other)?),
    })
}

pub fn criterion(run: &Loaded) -> Result<Table, CliError> {
    let c = &run.config.criterion;
    let g = c.grid();
    let mut t = Table::new(&[
        "target",
        "max_deviation",
        "threshold",
        "max_abs",
        "classification",
        "evaluated",
        "non_finite",
        "re_min",
        "re_max",
        "im_min",
        "im_max",
        "n_re",
        "n_im",
    ]);
    for name in &c.targets {
        let target = criterion_target(name)?;
        let report = check_symmetry(name, |e| target.evaluate(&run.potential, run.scale, e), &g)?;
        if report.non_finite > 0 {
            t.warnings
                .push(format!("{name}: {} non-finite samples excluded", report.non_finite));
        }
        t.push(vec![
            name.as_str().into(),
            report.max_deviation.into(),
            report.threshold.into(),
            report.max_abs.into(),
            report.classification.label().into(),
            Cell::Int(report.evaluated as i64),
            Cell::Int(report.non_finite as i64),
            g.re_min.into(),
            g.re_max.into(),
            g.im_min.into(),
            g.im_max.into(),
            Cell::Int(g.n_re as i64),
            Cell::Int(g.n_im as i64),
        ]);
    }
    Ok(t)
}

/// Rows of `verify`: (check, measured, tolerance, pass).
struct Checks {
    table: Table,
    failed: usize,
}

impl Checks {
    fn add(&mut self, name: String, measured: f64, tolerance: f64, pass: bool) {
        if !pass {
            self.failed += 1;
        }
        self.table.push(vec![
            name.into_cell(),
            measured.into(),
            tolerance.into(),
            if pass { "pass" } else { "fail" }.into(),
        ]);
    }

    fn at_most(&mut self, name: &str, measured: f64, tolerance: f64) {
        self.add(name.to_string(), measured, tolerance, measured <= tolerance);
    }
}

trait IntoCell {
    fn into_cell(self) -> Cell;
}

impl IntoCell for String {
    fn into_cell(self) -> Cell {
        Cell::Text(self)
    }
}

/// Run every check on the configured potential. Returns the table and the
/// number of failed rows.
pub fn verify(run: &Loaded, tol: &Tolerances) -> Result<(Table, usize), CliError> {
    let pot = &run.potential;
    let scale = run.scale;
    let v = &run.config.verify;
    let mut checks = Checks {
        table: Table::new(&["check", "measured", "tolerance", "status"]),
        failed: 0,
    };

    let k_top = run.config.smatrix.k_max;
    let unitarity = grid(k_top / v.samples.max(1) as f64, k_top, v.samples.max(1), "verify")?
        .into_iter()
        .map(|k| s_matrix(pot, scale, Complex64::new(k, 0.0)).map(|s| (s.s.norm() - 1.0).abs()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.at_most("unitarity", unitarity, tol.get("unitarity"));

    let (fin, fout) = (EigenfunctionFamily::new(FamilyKind::In), EigenfunctionFamily::new(FamilyKind::Out));
    let mut prop: f64 = 0.0;
    for e in linspace(0.2, 30.0, 50) {
        let s = s_matrix(pot, scale, scale.wavenumber(Complex64::new(e, 0.0)))?.s;
        let (a, b) = (fin.at_energy(pot, scale, e)?, fout.at_energy(pot, scale, e)?);
        for r in linspace(0.0, 5.0 * pot.outer_radius(), 50) {
            let (x, y) = (a.value(r)?, b.value(r)?);
            prop = prop.max((x - s * y).norm() / x.norm().max(1.0));
        }
    }
    checks.at_most("proportionality", prop, tol.get("proportionality"));

    let g = run.config.criterion.grid();
    for (target, expected) in [
        (CriterionTarget::Rho, Classification::Normalization),
        (CriterionTarget::RhoPlus, Classification::Normalization),
    ] {
        let r = check_symmetry(&target.label(), |e| target.evaluate(pot, scale, e), &g)?;
        checks.add(
            format!("criterion_{}", target.label()),
            r.max_deviation,
            r.threshold,
            r.classification == expected,
        );
    }
    for kind in FamilyKind::ALL {
        let expected = if kind == FamilyKind::StandingWave || pot.is_free() {
            Classification::Normalization
        } else {
            Classification::PhysicallyDistinct
        };
        let r = classify_eigensolution(kind, pot, scale, &g)?;
        checks.add(
            format!("criterion_{}_{}", kind.label(), expected.label()),
            r.max_deviation,
            r.threshold,
            r.classification == expected,
        );
    }

    let mut sink = Vec::new();
    let found = search(run, &mut sink)?;
    checks.table.warnings.extend(sink);
    if let Some(first) = found.states.first() {
        let mut gap: f64 = 0.0;
        let mut partner_gap: f64 = 0.0;
        let mut mirrored: f64 = 0.0;
        let mut tail: f64 = 0.0;
        let b = pot.outer_radius();
        for s in &found.states {
            gap = gap.max(residue_estimate(pot, scale, s.k_pole)?.relative_gap);
            let p = growing_partner(s, pot, scale)?;
            partner_gap = partner_gap.max((p.norm_sq - s.norm_sq.conj()).norm() / s.norm_sq.norm());
            let j = jost(pot, scale, -s.k_pole.conj())?;
            mirrored = mirrored.max(j.j_plus.norm() / j.j_minus.norm().max(1.0));
            for r in linspace(b, 5.0 * b, 41) {
                let ratio = s.value(r)? / (I * s.k_pole * r).exp();
                tail = tail.max((ratio - s.norm).norm() / s.norm.norm());
            }
        }
        checks.at_most("residue_methods_gap", gap, tol.get("residue"));
        checks.at_most("partner_norm_conjugate", partner_gap, tol.get("partner"));
        checks.at_most("mirrored_jost_zero", mirrored, tol.get("mirrored_zero"));
        checks.at_most("gamow_outgoing_tail", tail, tol.get("tail"));
        checks.table.warnings.push(format!(
            "{} poles checked; first at k = {} {:+}i",
            found.states.len(),
            first.k_pole.re,
            first.k_pole.im
        ));
    }

    let test_fn = GaussianTest {
        center: v.center,
        width: v.width,
    };
    let r_max = v.r_max.unwrap_or(30.0 * pot.outer_radius());
    let quad = QuadratureSpec {
        n_energy: v.n_energy,
        n_radius: v.n_radius,
    };
    for kind in FamilyKind::ALL {
        let r = smeared_delta_check(EigenfunctionFamily::new(kind), pot, scale, test_fn, r_max, quad)?;
        let limit = tol.get("smeared_delta");
        checks.add(
            format!("smeared_delta_{}", kind.label()),
            r.relative_error,
            limit,
            r.relative_error <= limit && r.converged,
        );
        if !r.converged {
            checks
                .table
                .warnings
                .push(format!("smeared_delta_{}: refinement did not converge", kind.label()));
        }
    }

    if pot.is_non_negative() {
        for kind in FamilyKind::ALL {
            let r = parseval_check(
                EigenfunctionFamily::new(kind),
                pot,
                scale,
                v.bump_center,
                v.bump_width,
                v.bump_r_max,
                v.bump_points,
                v.k_max,
                v.k_points,
            )?;
            checks.at_most(&format!("parseval_{}", kind.label()), r.relative_error, tol.get("parseval"));
        }
    } else {
        checks
            .table
            .warnings
            .push("parseval skipped: attractive layers admit bound states".into());
    }
    let failed = checks.failed;
    Ok((checks.table, failed))
}

pub fn transform(run: &Loaded) -> Result<Table, CliError> {
    let c = &run.config.transform;
    let fam = EigenfunctionFamily::new(family(&c.family)?);
    if !(c.width > 0.0) {
        return Err(CliError::Config("transform.width must be positive".into()));
    }
    let psi = RadialSamples::from_fn(c.r_max, c.r_points, |r| {
        let x = (r - c.center) / c.width;
        Complex64::new((-0.5 * x * x).exp(), 0.0)
    })?;
    let energies = grid(c.e_min, c.e_max, c.e_points, "transform energy")?;
    let out = energy_transform(fam, &run.potential, run.scale, &psi, &energies)?;
    let mut t = Table::new(&["E", "re_coefficient", "im_coefficient", "abs_coefficient"]);
    for w in &out.warnings {
        match w {
            TransformWarning::Undersampled { k_max, dr } => t
                .warnings
                .push(format!("radial samples undersampled: k_max*dr = {} > pi/4", k_max * dr)),
        }
    }
    if let Some(change) = out.refinement_change {
        t.warnings
            .push(format!("relative change under radial sample halving: {change:e}"));
    }
    for (e, z) in out.energies.iter().zip(&out.coefficients) {
        t.push(vec![(*e).into(), z.re.into(), z.im.into(), z.norm().into()]);
    }
    Ok(t)
}
