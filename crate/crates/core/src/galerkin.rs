//! The truncated dynamics: mobility-weighted stiffness applied matrix-free,
//! chemical-potential coefficients, elimination of the viscous coupling, and
//! implicit-midpoint time integration.
//!
//! Writing A(c) for the operator with entries int M(u) grad phi_k . grad
//! phi_j dx, Lam = diag(|k|^2) and w(c)_j = <W'(u), phi_j>, the coefficient
//! system is
//!
//!     (I + alpha A(c)) dc/dt = -A(c) (kappa Lam c + w(c)).
//!
//! A(c) is symmetric positive semidefinite, so the eliminated operator is
//! symmetric positive definite for alpha >= 0 and each evaluation is one
//! conjugate-gradient solve.

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::physics::{Mobility, QuarticWell};
use crate::spectral::{
    dealias_in_place, derivative_axis, to_grid, to_spectral, BasisSpec, GridField, SpectralField,
};

/// Potential and mobility, bundled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicsSpec {
    pub well: QuarticWell,
    pub mobility: Mobility,
}

/// Everything a single trajectory needs.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub kappa: f64,
    pub alpha: f64,
    pub physics: PhysicsSpec,
    pub basis: BasisSpec,
    pub dt: f64,
    pub t_end: f64,
    pub cg_tol: f64,
    pub cg_max: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub dealias: bool,
}

pub const DEFAULT_CG_TOL: f64 = 1e-10;
pub const DEFAULT_CG_MAX: usize = 2000;
pub const DEFAULT_PICARD_TOL: f64 = 1e-11;
pub const DEFAULT_PICARD_MAX: usize = 60;

impl SolverConfig {
    /// Validates the runtime invariants. `alpha = 0` is permitted here (the
    /// eliminated system degenerates to an explicit evaluation) so that the
    /// inviscid limit stays testable; the config-file schema is stricter.
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be nonnegative, got {}",
                self.alpha
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.cg_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cg_tol must be positive, got {}",
                self.cg_tol
            )));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "picard_tol must be positive, got {}",
                self.picard_tol
            )));
        }
        if self.dealias {
            let need = self.basis.n_modes().saturating_mul(3).div_ceil(2);
            if self.basis.grid_points() < need {
                return Err(Error::InvalidConfig(format!(
                    "dealiasing requires grid_points >= 3/2 n_modes ({} < {})",
                    self.basis.grid_points(),
                    need
                )));
            }
        }
        Ok(())
    }
}

/// Time, coefficients, and the two accumulated dissipation integrals of the
/// energy budget.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub t: f64,
    pub c: SpectralField,
    /// alpha int_0^t int |du/dt|^2 dx dtau
    pub visc_dissipation: f64,
    /// int_0^t int M(u) |grad mu|^2 dx dtau
    pub mob_dissipation: f64,
}

impl SolverState {
    pub fn new(c: SpectralField) -> Self {
        Self {
            t: 0.0,
            c,
            visc_dissipation: 0.0,
            mob_dissipation: 0.0,
        }
    }
}

/// One diagnostics sample along a trajectory, with the coefficients kept for
/// trajectory-distance computations.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub record: DiagnosticsRecord,
    pub field: SpectralField,
}

/// Sampled run output. `complete` is false when the run aborted (blow-up,
/// linear-solver failure, or too many step rejections).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub complete: bool,
    pub failure: Option<String>,
    pub dt_halvings: usize,
}

impl Trajectory {
    pub fn records(&self) -> impl Iterator<Item = &DiagnosticsRecord> {
        self.samples.iter().map(|s| &s.record)
    }
}

/// The solver: owns a validated config, applies the operators matrix-free.
#[derive(Clone, Debug)]
pub struct VchSystem {
    cfg: SolverConfig,
}

const MAX_DT_HALVINGS: usize = 20;

impl VchSystem {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn mobility_values(&self, u: &GridField) -> Vec<f64> {
        let m = self.cfg.physics.mobility;
        u.values().iter().map(|&z| m.eval(z)).collect()
    }

    fn grid_of(&self, c: &SpectralField, t: f64) -> Result<GridField> {
        let u = to_grid(c);
        if !u.is_finite() {
            return Err(Error::BlowUp { t });
        }
        Ok(u)
    }

    /// A(c) d: gradient of the d-field to the grid, pointwise mobility
    /// product, divergence back, negated and truncated. Symmetric positive
    /// semidefinite with zero constant-mode row.
    pub fn apply_mobility_stiffness(
        &self,
        d: &SpectralField,
        c: &SpectralField,
    ) -> Result<SpectralField> {
        assert_eq!(d.basis(), c.basis(), "basis mismatch");
        let u = self.grid_of(c, f64::NAN)?;
        let mob = self.mobility_values(&u);
        self.apply_stiffness_with(d, &mob, f64::NAN)
    }

    fn apply_stiffness_with(
        &self,
        d: &SpectralField,
        mob: &[f64],
        t: f64,
    ) -> Result<SpectralField> {
        let basis = d.basis().clone();
        let n = basis.n();
        let mut flux: Vec<SpectralField> = Vec::with_capacity(n);
        for axis in 0..n {
            let mut g = to_grid(&derivative_axis(d, axis));
            for (v, m) in g.values_mut().iter_mut().zip(mob) {
                *v *= m;
            }
            if !g.is_finite() {
                return Err(Error::BlowUp { t });
            }
            flux.push(to_spectral(&g));
        }
        let mut out = crate::spectral::divergence(&flux);
        out.scale(-1.0);
        if self.cfg.dealias {
            dealias_in_place(&mut out);
        }
        Ok(out)
    }

    /// <W'(u), phi_j> evaluated pseudo-spectrally on the padded grid.
    fn potential_projection(&self, u: &GridField, t: f64) -> Result<SpectralField> {
        let well = self.cfg.physics.well;
        let mut g = u.clone();
        for v in g.values_mut() {
            *v = well.prime(*v);
        }
        if !g.is_finite() {
            return Err(Error::BlowUp { t });
        }
        let mut w = to_spectral(&g);
        if self.cfg.dealias {
            dealias_in_place(&mut w);
        }
        Ok(w)
    }

    /// Chemical-potential coefficients d = kappa Lam c + <W'(u), phi> +
    /// alpha dc/dt.
    pub fn chemical_potential(
        &self,
        c: &SpectralField,
        c_dot: &SpectralField,
    ) -> Result<SpectralField> {
        assert_eq!(c.basis(), c_dot.basis(), "basis mismatch");
        let u = self.grid_of(c, f64::NAN)?;
        self.chemical_potential_with(c, c_dot, &u, f64::NAN)
    }

    fn chemical_potential_with(
        &self,
        c: &SpectralField,
        c_dot: &SpectralField,
        u: &GridField,
        t: f64,
    ) -> Result<SpectralField> {
        let mut d = self.potential_projection(u, t)?;
        for (idx, v) in d.coeffs_mut().iter_mut().enumerate() {
            let lam = c.basis().eigenvalue_at(idx);
            *v += self.cfg.kappa * lam * c.coeffs()[idx] + self.cfg.alpha * c_dot.coeffs()[idx];
        }
        Ok(d)
    }

    /// Solves (I + alpha A(c)) dc/dt = -A(c)(kappa Lam c + w(c)) by
    /// preconditioned conjugate gradients. The constant mode of the result is
    /// exactly zero, which is what conserves mass step by step.
    pub fn rhs_solve(&self, c: &SpectralField) -> Result<SpectralField> {
        self.rhs_solve_warm(c, None, f64::NAN)
    }

    fn rhs_solve_warm(
        &self,
        c: &SpectralField,
        warm: Option<&SpectralField>,
        t: f64,
    ) -> Result<SpectralField> {
        let u = self.grid_of(c, t)?;
        let mob = self.mobility_values(&u);
        let w = self.potential_projection(&u, t)?;
        let mut s = w;
        for (idx, v) in s.coeffs_mut().iter_mut().enumerate() {
            *v += self.cfg.kappa * c.basis().eigenvalue_at(idx) * c.coeffs()[idx];
        }
        let mut b = self.apply_stiffness_with(&s, &mob, t)?;
        b.scale(-1.0);
        self.cg_solve(&mob, &b, warm, t)
    }

    /// Jacobi-style diagonal preconditioner 1/(1 + alpha theta lambda_k);
    /// the identity in the degenerate case (theta = 0).
    fn precondition(&self, r: &SpectralField) -> SpectralField {
        let theta = self.cfg.physics.mobility.lower_bound();
        let scale = self.cfg.alpha * theta;
        if scale == 0.0 {
            return r.clone();
        }
        let mut z = r.clone();
        for (idx, v) in z.coeffs_mut().iter_mut().enumerate() {
            *v /= 1.0 + scale * r.basis().eigenvalue_at(idx);
        }
        z
    }

    fn cg_solve(
        &self,
        mob: &[f64],
        b: &SpectralField,
        warm: Option<&SpectralField>,
        t: f64,
    ) -> Result<SpectralField> {
        let apply = |x: &SpectralField| -> Result<SpectralField> {
            let mut ax = self.apply_stiffness_with(x, mob, t)?;
            ax.scale(self.cfg.alpha);
            ax.scaled_add(1.0, x);
            Ok(ax)
        };

        let b_norm = b.l2_norm();
        if b_norm == 0.0 {
            return Ok(SpectralField::zeros(b.basis()));
        }

        let mut x = match warm {
            Some(g) => g.clone(),
            None => SpectralField::zeros(b.basis()),
        };
        let mut r = b.clone();
        r.scaled_add(-1.0, &apply(&x)?);
        let mut residual = r.l2_norm();
        if residual <= self.cfg.cg_tol * b_norm {
            return Ok(x);
        }
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = r.dot(&z);
        for iteration in 0..self.cfg.cg_max {
            let ap = apply(&p)?;
            let pap = p.dot(&ap);
            if !(pap > 0.0) {
                return Err(Error::CgNoConvergence {
                    residual: residual / b_norm,
                    iterations: iteration,
                });
            }
            let step = rz / pap;
            x.scaled_add(step, &p);
            r.scaled_add(-step, &ap);
            residual = r.l2_norm();
            if residual <= self.cfg.cg_tol * b_norm {
                return Ok(x);
            }
            z = self.precondition(&r);
            let rz_next = r.dot(&z);
            p = SpectralField::linear_comb(1.0, &z, rz_next / rz, &p);
            rz = rz_next;
        }
        Err(Error::CgNoConvergence {
            residual: residual / b_norm,
            iterations: self.cfg.cg_max,
        })
    }

    /// One implicit-midpoint step of size `cfg.dt`, with both dissipation
    /// accumulators advanced by midpoint quadrature in time.
    pub fn step(&self, state: &SolverState) -> Result<SolverState> {
        self.step_sized(state, self.cfg.dt, None).map(|(s, _)| s)
    }

    /// Steps by `dt`, optionally seeded with the previous step's rate as the
    /// fixed-point predictor and linear-solve warm start. Returns the new
    /// state and the midpoint rate.
    fn step_sized(
        &self,
        state: &SolverState,
        dt: f64,
        rate_guess: Option<&SpectralField>,
    ) -> Result<(SolverState, SpectralField)> {
        let c = &state.c;
        let mut c_new = match rate_guess {
            Some(g) => SpectralField::linear_comb(1.0, c, dt, g),
            None => c.clone(),
        };
        let mut rate = rate_guess.cloned();
        let mut converged = false;
        for _ in 0..self.cfg.picard_max {
            let c_mid = SpectralField::linear_comb(0.5, c, 0.5, &c_new);
            let f = self.rhs_solve_warm(&c_mid, rate.as_ref(), state.t)?;
            let c_next = SpectralField::linear_comb(1.0, c, dt, &f);
            let delta = c_next.l2_distance(&c_new);
            c_new = c_next;
            rate = Some(f);
            if delta <= self.cfg.picard_tol * (1.0 + c_new.l2_norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::StepRejected {
                t: state.t,
                dt,
                iterations: self.cfg.picard_max,
            });
        }
        if !c_new.is_finite() {
            return Err(Error::BlowUp { t: state.t + dt });
        }

        // dissipation increments evaluated at the midpoint, consistent with
        // the integrator's order
        let rate = SpectralField::linear_comb(1.0 / dt, &c_new, -1.0 / dt, c);
        let c_mid = SpectralField::linear_comb(0.5, c, 0.5, &c_new);
        let visc_inc = dt * self.cfg.alpha * rate.l2_norm_sq();
        let u_mid = self.grid_of(&c_mid, state.t)?;
        let mu = self.chemical_potential_with(&c_mid, &rate, &u_mid, state.t)?;
        let mob = self.mobility_values(&u_mid);
        let mut mob_inc = 0.0;
        for axis in 0..c.basis().n() {
            let g = to_grid(&derivative_axis(&mu, axis));
            mob_inc += g
                .values()
                .iter()
                .zip(&mob)
                .map(|(&gv, &mv)| mv * gv * gv)
                .sum::<f64>();
        }
        mob_inc *= dt * c.basis().cell_volume();

        Ok((
            SolverState {
                t: state.t + dt,
                c: c_new,
                visc_dissipation: state.visc_dissipation + visc_inc,
                mob_dissipation: state.mob_dissipation + mob_inc,
            },
            rate,
        ))
    }

    fn sample(&self, state: &SolverState) -> TrajectorySample {
        TrajectorySample {
            record: DiagnosticsRecord::compute(
                &state.c,
                state.t,
                self.cfg.kappa,
                &self.cfg.physics.well,
                &self.cfg.physics.mobility,
                state.visc_dissipation,
                state.mob_dissipation,
            ),
            field: state.c.clone(),
        }
    }

    /// Projects the initial data, integrates to t_end, and samples the
    /// diagnostics at t = 0, every `sample_every` nominal steps, and at
    /// t_end. Rejected steps halve dt (at most 20 times); an unrecoverable
    /// failure returns the partial trajectory flagged incomplete.
    pub fn integrate(&self, u0: &GridField, sample_every: usize) -> Result<Trajectory> {
        assert!(sample_every >= 1, "sample_every must be at least 1");
        if u0.basis() != &self.cfg.basis {
            return Err(Error::InvalidConfig(
                "initial data is not sampled on the configured grid".into(),
            ));
        }
        let c0 = crate::spectral::project_initial(u0);
        if !c0.is_finite() {
            return Err(Error::BlowUp { t: 0.0 });
        }
        let mut state = SolverState::new(c0);
        let mut samples = vec![self.sample(&state)];
        let t_end = self.cfg.t_end;
        let sample_dt = sample_every as f64 * self.cfg.dt;
        let eps = 1e-9 * self.cfg.dt;
        let mut next_sample = sample_dt;
        let mut dt_cur = self.cfg.dt;
        let mut halvings = 0usize;
        let mut guess: Option<SpectralField> = None;

        while t_end - state.t > 1e-12 * t_end.max(1.0) {
            let dt_step = dt_cur.min(t_end - state.t);
            match self.step_sized(&state, dt_step, guess.as_ref()) {
                Ok((next, rate)) => {
                    state = next;
                    guess = Some(rate);
                    let at_end = t_end - state.t <= 1e-12 * t_end.max(1.0);
                    if state.t >= next_sample - eps || at_end {
                        samples.push(self.sample(&state));
                        while next_sample <= state.t + eps {
                            next_sample += sample_dt;
                        }
                    }
                }
                Err(Error::StepRejected { .. }) if halvings < MAX_DT_HALVINGS => {
                    halvings += 1;
                    dt_cur *= 0.5;
                    guess = None;
                }
                Err(e) => {
                    return Ok(Trajectory {
                        samples,
                        complete: false,
                        failure: Some(e.to_string()),
                        dt_halvings: halvings,
                    });
                }
            }
        }

        Ok(Trajectory {
            samples,
            complete: true,
            failure: None,
            dt_halvings: halvings,
        })
    }
}
