//! Double-well potential, degenerate and cutoff mobilities, and the entropy
//! densities whose second derivative is the reciprocal mobility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quartic double-well W(u) = gamma (u - u_plus)^2 (u - u_minus)^2 with equal
/// minima at the pure phases. Growth exponent r = 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticWell {
    pub gamma: f64,
    pub u_minus: f64,
    pub u_plus: f64,
}

impl QuarticWell {
    pub fn new(gamma: f64, u_minus: f64, u_plus: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "well depth gamma must be positive, got {gamma}"
            )));
        }
        if !(u_minus < u_plus) {
            return Err(Error::InvalidConfig(format!(
                "well minima must satisfy u_minus < u_plus, got {u_minus} >= {u_plus}"
            )));
        }
        Ok(Self {
            gamma,
            u_minus,
            u_plus,
        })
    }

    /// The standard symmetric well gamma (u^2 - 1)^2 / gamma = 1.
    pub fn symmetric_unit() -> Self {
        Self {
            gamma: 1.0,
            u_minus: -1.0,
            u_plus: 1.0,
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let a = z - self.u_plus;
        let b = z - self.u_minus;
        self.gamma * a * a * b * b
    }

    pub fn prime(&self, z: f64) -> f64 {
        let a = z - self.u_plus;
        let b = z - self.u_minus;
        2.0 * self.gamma * (a * b * b + a * a * b)
    }

    pub fn double_prime(&self, z: f64) -> f64 {
        let a = z - self.u_plus;
        let b = z - self.u_minus;
        2.0 * self.gamma * (b * b + 4.0 * a * b + a * a)
    }

    /// Growth exponent r in the polynomial sandwich bounds.
    pub fn growth_exponent(&self) -> u32 {
        3
    }

    /// Explicit constants for the growth sandwich
    ///   C1 |z|^{r+1} - C2 <= W(z) <= C3 |z|^{r+1} + C4,
    ///   |W'(z)| <= C5 |z|^r + C6,
    ///   C7 |z|^{r-1} - C8 <= W''(z) <= C9 |z|^{r-1} + C10,
    /// valid for every real z. Test-suite machinery, not used by the solver.
    pub fn growth_constants(&self) -> GrowthConstants {
        let g = self.gamma;
        let symmetric = self.u_plus + self.u_minus == 0.0;

        let c1 = 0.5 * g;
        let c2 = residual_sup(|z| c1 * z.powi(4) - self.eval(z));
        let c3 = 2.0 * g;
        let c4 = residual_sup(|z| self.eval(z) - c3 * z.powi(4));
        let c5 = 5.0 * g;
        let c6 = residual_sup(|z| self.prime(z).abs() - c5 * z.abs().powi(3));
        // For symmetric wells W'' = 12 gamma z^2 + const, so the full leading
        // coefficient works on both sides; otherwise the linear term forces a
        // strictly smaller (resp. larger) quadratic envelope.
        let (c7, c9) = if symmetric {
            (12.0 * g, 12.0 * g)
        } else {
            (6.0 * g, 18.0 * g)
        };
        let c8 = residual_sup(|z| c7 * z * z - self.double_prime(z));
        let c10 = residual_sup(|z| self.double_prime(z) - c9 * z * z);

        GrowthConstants {
            r: 3,
            c1,
            c2,
            c3,
            c4,
            c5,
            c6,
            c7,
            c8,
            c9,
            c10,
        }
    }
}

/// Supremum over R of a residual that decays at infinity, evaluated on a dense
/// symmetric grid wide enough to contain every critical point, then floored at
/// a small positive value (the sandwich constants must be > 0) and padded
/// against sampling error.
fn residual_sup(f: impl Fn(f64) -> f64) -> f64 {
    // All residuals used here are dominated by a negative-definite quartic
    // (or cubic/quadratic) leading term with O(1) lower-order coefficients
    // derived from gamma and the well minima; their critical points are well
    // inside |z| <= 64 for any sane well. Sample densely and add margin.
    let r_max = 64.0;
    let samples = 1 << 18;
    let mut sup = f64::NEG_INFINITY;
    for i in 0..=samples {
        let z = -r_max + 2.0 * r_max * i as f64 / samples as f64;
        sup = sup.max(f(z));
    }
    let padded = sup.max(0.0) * 1.0001 + 1e-9;
    padded.max(1e-9)
}

/// Growth-condition constants, all strictly positive.
#[derive(Clone, Copy, Debug)]
pub struct GrowthConstants {
    pub r: u32,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
}

/// Phase-dependent mobility: either the degenerate max(u, 0) or its cutoff
/// regularization bounded below by theta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mobility {
    /// M(u) = u for u > 0, 0 otherwise.
    Degenerate,
    /// M_theta(u) = u for u > theta, theta otherwise, with 0 < theta < 1.
    Cutoff { theta: f64 },
}

impl Mobility {
    pub fn cutoff(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cutoff level must satisfy 0 < theta < 1, got {theta}"
            )));
        }
        Ok(Self::Cutoff { theta })
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            Mobility::Degenerate => z.max(0.0),
            Mobility::Cutoff { theta } => {
                if z > theta {
                    z
                } else {
                    theta
                }
            }
        }
    }

    /// The cutoff level, if any.
    pub fn theta(&self) -> Option<f64> {
        match *self {
            Mobility::Degenerate => None,
            Mobility::Cutoff { theta } => Some(theta),
        }
    }

    /// Uniform lower bound of the mobility (0 in the degenerate case).
    pub fn lower_bound(&self) -> f64 {
        self.theta().unwrap_or(0.0)
    }
}

/// Entropy density Phi(z) = z ln z - z + 1, defined for z > 0, with
/// Phi'' = 1/M and Phi(1) = Phi'(1) = 0.
pub fn entropy_density(z: f64) -> Result<f64> {
    if z <= 0.0 {
        return Err(Error::EntropyDomain(z));
    }
    Ok(z * z.ln() - z + 1.0)
}

/// Regularized C^2 entropy density with Phi_theta'' = 1/M_theta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropySpec {
    theta: f64,
}

impl EntropySpec {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "entropy cutoff must satisfy 0 < theta < 1, got {theta}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Phi_theta(z): the classical density above theta, its quadratic C^2
    /// continuation at and below theta (the branch point belongs to the lower
    /// branch; both branches agree there).
    pub fn eval(&self, z: f64) -> f64 {
        let th = self.theta;
        if z > th {
            z * z.ln() - z + 1.0
        } else {
            z * z / (2.0 * th) + (th.ln() - 1.0) * z + 1.0 - 0.5 * th
        }
    }

    pub fn prime(&self, z: f64) -> f64 {
        let th = self.theta;
        if z > th {
            z.ln()
        } else {
            z / th + th.ln() - 1.0
        }
    }

    pub fn double_prime(&self, z: f64) -> f64 {
        let th = self.theta;
        if z > th {
            1.0 / z
        } else {
            1.0 / th
        }
    }
}
