//! Scalar functionals of the state: mass, energy, entropy, negativity
//! measure, and the dissipation bookkeeping that enters the energy budget.

use crate::error::{Error, Result};
use crate::physics::{entropy_density, EntropySpec, Mobility, QuarticWell};
use crate::spectral::{to_grid, GridField, SpectralField, TWO_PI};

/// One per-sample ledger row. Serializes to a fixed-order CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    /// Regularized entropy for cutoff runs; for degenerate runs the classical
    /// entropy when the field is positive, NaN otherwise.
    pub entropy: f64,
    pub negativity: f64,
    pub visc_dissipation: f64,
    pub mob_dissipation: f64,
    pub min_u: f64,
    pub max_u: f64,
}

pub const CSV_HEADER: &str =
    "t,mass,energy,entropy,negativity,visc_dissipation,mob_dissipation,min_u,max_u";

impl DiagnosticsRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.t,
            self.mass,
            self.energy,
            self.entropy,
            self.negativity,
            self.visc_dissipation,
            self.mob_dissipation,
            self.min_u,
            self.max_u
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let fields: Vec<&str> = row.trim().split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Report(format!(
                "diagnostics row must have 9 columns, got {}",
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Report(format!("bad float {s:?}: {e}")))
        };
        Ok(Self {
            t: parse(fields[0])?,
            mass: parse(fields[1])?,
            energy: parse(fields[2])?,
            entropy: parse(fields[3])?,
            negativity: parse(fields[4])?,
            visc_dissipation: parse(fields[5])?,
            mob_dissipation: parse(fields[6])?,
            min_u: parse(fields[7])?,
            max_u: parse(fields[8])?,
        })
    }

    /// Computes every functional of the current coefficients.
    pub fn compute(
        c: &SpectralField,
        t: f64,
        kappa: f64,
        well: &QuarticWell,
        mobility: &Mobility,
        visc_dissipation: f64,
        mob_dissipation: f64,
    ) -> Self {
        let u = to_grid(c);
        let min_u = u.min();
        let max_u = u.max();
        let theta = mobility.lower_bound();
        let entropy = match mobility.theta() {
            Some(th) => entropy_total_grid(&u, th),
            None => {
                if min_u > 0.0 {
                    u.quadrature(|z| entropy_density(z).unwrap_or(f64::NAN))
                } else {
                    f64::NAN
                }
            }
        };
        Self {
            t,
            mass: mass(c),
            energy: energy_grid(c, &u, kappa, well),
            entropy,
            negativity: negativity_grid(&u, theta),
            visc_dissipation,
            mob_dissipation,
            min_u,
            max_u,
        }
    }
}

/// int u dx = (2pi)^{n/2} * constant-mode coefficient.
pub fn mass(c: &SpectralField) -> f64 {
    TWO_PI.powf(0.5 * c.basis().n() as f64) * c.coeffs()[0].re
}

/// E(u) = int kappa/2 |grad u|^2 + W(u) dx; the gradient term by Parseval,
/// the potential term by padded-grid quadrature.
pub fn energy(c: &SpectralField, kappa: f64, well: &QuarticWell) -> f64 {
    energy_grid(c, &to_grid(c), kappa, well)
}

fn energy_grid(c: &SpectralField, u: &GridField, kappa: f64, well: &QuarticWell) -> f64 {
    0.5 * kappa * c.h1_semi_norm_sq() + u.quadrature(|z| well.eval(z))
}

/// int Phi_theta(u) dx by grid quadrature.
pub fn entropy_total(c: &SpectralField, theta: f64) -> Result<f64> {
    let spec = EntropySpec::new(theta)?;
    Ok(to_grid(c).quadrature(|z| spec.eval(z)))
}

fn entropy_total_grid(u: &GridField, theta: f64) -> f64 {
    match EntropySpec::new(theta) {
        Ok(spec) => u.quadrature(|z| spec.eval(z)),
        Err(_) => f64::NAN,
    }
}

/// int Phi(u) dx of a positive grid field; errors where the density is
/// undefined (u <= 0 somewhere).
pub fn entropy_classical(u: &GridField) -> Result<f64> {
    let mut acc = 0.0;
    for &v in u.values() {
        acc += entropy_density(v)?;
    }
    Ok(u.basis().cell_volume() * acc)
}

/// int |min(u,0) + theta|^2 dx by grid quadrature.
pub fn negativity(c: &SpectralField, theta: f64) -> f64 {
    negativity_grid(&to_grid(c), theta)
}

fn negativity_grid(u: &GridField, theta: f64) -> f64 {
    u.quadrature(|z| {
        let d = z.min(0.0) + theta;
        d * d
    })
}

/// [E + visc + mob](t2) - [E + visc + mob](t1); nonpositive up to
/// discretization error along a trajectory.
pub fn energy_budget_residual(
    rec1: &DiagnosticsRecord,
    rec2: &DiagnosticsRecord,
) -> Result<f64> {
    if !(rec1.t <= rec2.t) {
        return Err(Error::DiagnosticsUsage(format!(
            "records out of order: t1 = {} > t2 = {}",
            rec1.t, rec2.t
        )));
    }
    let total = |r: &DiagnosticsRecord| r.energy + r.visc_dissipation + r.mob_dissipation;
    Ok(total(rec2) - total(rec1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{project_initial, BasisSpec};

    fn field_1d(f: impl Fn(f64) -> f64) -> SpectralField {
        let basis = BasisSpec::new(1, 64, 128).unwrap();
        project_initial(&GridField::from_fn(&basis, |x, _| f(x)))
    }

    #[test]
    fn mass_examples() {
        assert!((mass(&field_1d(|_| 1.0)) - TWO_PI).abs() < 1e-12);
        assert!(mass(&field_1d(|x| x.sin())).abs() < 1e-12);
        // int (1 + 0.5 sin x) dx = 2pi
        assert!((mass(&field_1d(|x| 1.0 + 0.5 * x.sin())) - TWO_PI).abs() < 1e-12);
    }

    #[test]
    fn energy_examples() {
        let well = QuarticWell::symmetric_unit();
        // pure phase: E = 0
        assert!(energy(&field_1d(|_| 1.0), 1.0, &well).abs() < 1e-12);
        // u = 0: E = W(0) |Omega| = 2pi
        assert!((energy(&field_1d(|_| 0.0), 1.0, &well) - TWO_PI).abs() < 1e-12);
        // u = eps sin x with W = 0: E = eps^2 pi / 2
        let zero_well = QuarticWell {
            gamma: 0.0,
            u_minus: -1.0,
            u_plus: 1.0,
        };
        let eps = 0.3;
        let e = energy(&field_1d(|x| eps * x.sin()), 1.0, &zero_well);
        assert!((e - 0.5 * eps * eps * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn initial_energy_of_acceptance_data_is_75_pi_over_64() {
        // E(1 + 0.5 sin x) = pi/8 + pi + (3/64) pi = 75 pi / 64 for the
        // symmetric unit well with kappa = 1
        let well = QuarticWell::symmetric_unit();
        let e = energy(&field_1d(|x| 1.0 + 0.5 * x.sin()), 1.0, &well);
        let exact = 75.0 * std::f64::consts::PI / 64.0;
        assert!((e - exact).abs() < 1e-11, "E = {e}, exact = {exact}");
    }

    #[test]
    fn entropy_examples() {
        // u = 1: Phi_theta(1) = 0
        assert!(entropy_total(&field_1d(|_| 1.0), 0.5).unwrap().abs() < 1e-12);
        // u = 0: (1 - theta/2) |Omega|
        let th = 0.3;
        let e = entropy_total(&field_1d(|_| 0.0), th).unwrap();
        assert!((e - (1.0 - 0.5 * th) * TWO_PI).abs() < 1e-12);
        // u = e: Phi(e) = e - e + 1 = 1, total 2pi
        let e = entropy_total(&field_1d(|_| std::f64::consts::E), 0.1).unwrap();
        assert!((e - TWO_PI).abs() < 1e-11);
    }

    #[test]
    fn classical_entropy_requires_positive_field() {
        let basis = BasisSpec::new(1, 8, 16).unwrap();
        let pos = GridField::from_fn(&basis, |_, _| 1.0);
        assert!(entropy_classical(&pos).unwrap().abs() < 1e-14);
        let mixed = GridField::from_fn(&basis, |x, _| x.sin());
        assert!(entropy_classical(&mixed).is_err());
    }

    #[test]
    fn negativity_examples() {
        // nonnegative field: theta^2 |Omega| exactly
        let th = 0.1;
        let n = negativity(&field_1d(|_| 2.0), th);
        assert!((n - th * th * TWO_PI).abs() < 1e-14);
        // u = -1: (theta - 1)^2 |Omega|
        let n = negativity(&field_1d(|_| -1.0), th);
        assert!((n - 0.81 * TWO_PI).abs() < 1e-12);
        // u = sin x, theta = 0: int_pi^2pi sin^2 = pi/2 (exact on even grids)
        let n = negativity(&field_1d(|x| x.sin()), 0.0);
        assert!((n - 0.5 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn budget_residual_usage() {
        let mut r1 = DiagnosticsRecord {
            t: 0.0,
            mass: 0.0,
            energy: 1.0,
            entropy: 0.0,
            negativity: 0.0,
            visc_dissipation: 0.0,
            mob_dissipation: 0.0,
            min_u: 0.0,
            max_u: 0.0,
        };
        let mut r2 = r1;
        r2.t = 1.0;
        r2.energy = 0.5;
        r2.visc_dissipation = 0.2;
        r2.mob_dissipation = 0.25;
        let res = energy_budget_residual(&r1, &r2).unwrap();
        assert!((res - (-0.05)).abs() < 1e-15);
        // identical records: zero
        assert_eq!(energy_budget_residual(&r1, &r1).unwrap(), 0.0);
        // out of order: usage error
        r1.t = 2.0;
        assert!(energy_budget_residual(&r1, &r2).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let rec = DiagnosticsRecord {
            t: 0.125,
            mass: TWO_PI,
            energy: 3.6815538897061885,
            entropy: 0.4061333567796246,
            negativity: 0.06283185307179587,
            visc_dissipation: 1e-9,
            mob_dissipation: 2.5e-4,
            min_u: 0.5,
            max_u: 1.5,
        };
        let row = rec.to_csv_row();
        let back = DiagnosticsRecord::from_csv_row(&row).unwrap();
        assert_eq!(rec, back);
        assert_eq!(CSV_HEADER.split(',').count(), 9);
    }
}
