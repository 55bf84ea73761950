//! Fourier basis on the periodic box (0,2pi)^n, transforms and differential
//! operators.
//!
//! The basis functions are phi_k(x) = (2pi)^{-n/2} exp(i k.x) with integer
//! wavevectors k, so ||phi_k||_{L2} = 1 and -Lap phi_k = |k|^2 phi_k.
//! Coefficients follow coeff(k) = (2pi)^{-n/2} int u exp(-i k.x) dx, which
//! makes Parseval literal: ||u||_{L2}^2 = sum |coeff|^2.
//!
//! Real fields are stored as an explicit Hermitian half-spectrum: the last
//! axis keeps only k >= 0 and negative modes are implied by conjugation.
//! Modes with any |k_a| = N/2 (the Nyquist slots) are carried as exact zeros
//! so that derivative operators stay well defined.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Grid sizes with only 2, 3 and 5 as prime factors transform fastest.
pub fn transform_friendly(min: usize) -> usize {
    let mut g = min.max(2);
    loop {
        let mut m = g;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return g;
        }
        g += 1;
    }
}

/// Truncated Fourier basis: dimension, modes kept per axis, collocation grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSpec {
    n: usize,
    n_modes: usize,
    grid_points: usize,
}

impl BasisSpec {
    /// `n` is the spatial dimension (1 or 2), `n_modes` the truncation count
    /// per axis (even, >= 4), `grid_points` the collocation points per axis
    /// (>= n_modes).
    pub fn new(n: usize, n_modes: usize, grid_points: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidBasis(format!(
                "spatial dimension must be 1 or 2, got {n}"
            )));
        }
        if n_modes < 4 || n_modes % 2 != 0 {
            return Err(Error::InvalidBasis(format!(
                "n_modes must be even and >= 4, got {n_modes}"
            )));
        }
        if grid_points < n_modes {
            return Err(Error::InvalidBasis(format!(
                "grid_points ({grid_points}) must be >= n_modes ({n_modes})"
            )));
        }
        Ok(Self {
            n,
            n_modes,
            grid_points,
        })
    }

    /// Basis with the default 3/2-padded, transform-friendly grid.
    pub fn with_default_grid(n: usize, n_modes: usize) -> Result<Self> {
        let g = transform_friendly(n_modes.saturating_mul(3).div_ceil(2));
        Self::new(n, n_modes, g)
    }

    /// Basis with grid_points = transform_friendly(ceil(padding * n_modes)).
    pub fn with_padding(n: usize, n_modes: usize, padding: f64) -> Result<Self> {
        if !(padding >= 1.0 && padding.is_finite()) {
            return Err(Error::InvalidBasis(format!(
                "padding factor must be >= 1, got {padding}"
            )));
        }
        let g = transform_friendly((padding * n_modes as f64).ceil() as usize);
        Self::new(n, n_modes, g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    /// |Omega| = (2pi)^n.
    pub fn volume(&self) -> f64 {
        TWO_PI.powi(self.n as i32)
    }

    /// Quadrature weight of one collocation cell, (2pi/G)^n.
    pub fn cell_volume(&self) -> f64 {
        (TWO_PI / self.grid_points as f64).powi(self.n as i32)
    }

    /// Number of stored half-spectrum coefficients.
    pub fn spectral_len(&self) -> usize {
        let half = self.n_modes / 2 + 1;
        match self.n {
            1 => half,
            _ => self.n_modes * half,
        }
    }

    /// Number of collocation grid values, G^n.
    pub fn grid_len(&self) -> usize {
        self.grid_points.pow(self.n as u32)
    }

    fn half_len(&self) -> usize {
        self.n_modes / 2 + 1
    }

    /// Signed wavevector of a stored slot. The second component is 0 in 1D.
    pub fn mode_at(&self, flat: usize) -> [i64; 2] {
        let half = self.half_len();
        let nm = self.n_modes as i64;
        match self.n {
            1 => [flat as i64, 0],
            _ => {
                let i = (flat / half) as i64;
                let j = (flat % half) as i64;
                let kx = if i < nm / 2 { i } else { i - nm };
                [kx, j]
            }
        }
    }

    /// Multiplicity of a stored slot in full-spectrum sums: 1 where the
    /// conjugate mode is itself stored (the k_last = 0 and Nyquist lines),
    /// 2 elsewhere.
    pub fn weight_at(&self, flat: usize) -> f64 {
        let half = self.half_len();
        let j = match self.n {
            1 => flat,
            _ => flat % half,
        };
        if j == 0 || j == half - 1 {
            1.0
        } else {
            2.0
        }
    }

    /// True for slots pinned to zero (any |k_a| = N/2).
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let k = self.mode_at(flat);
        let ny = (self.n_modes / 2) as i64;
        k[0].abs() == ny || k[1].abs() == ny
    }

    /// -Laplacian eigenvalue |k|^2 of a stored slot.
    pub fn eigenvalue_at(&self, flat: usize) -> f64 {
        let k = self.mode_at(flat);
        (k[0] * k[0] + k[1] * k[1]) as f64
    }

    /// Collocation point coordinates of a flat grid index.
    pub fn grid_point(&self, flat: usize) -> [f64; 2] {
        let g = self.grid_points;
        let h = TWO_PI / g as f64;
        match self.n {
            1 => [flat as f64 * h, 0.0],
            _ => [(flat / g) as f64 * h, (flat % g) as f64 * h],
        }
    }
}

/// Coefficients of a real periodic field in the truncated basis.
#[derive(Clone, Debug)]
pub struct SpectralField {
    basis: BasisSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(basis: &BasisSpec) -> Self {
        Self {
            basis: basis.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); basis.spectral_len()],
        }
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn from_coeffs(basis: &BasisSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.spectral_len() {
            return Err(Error::InvalidBasis(format!(
                "coefficient count {} does not match basis ({})",
                coeffs.len(),
                basis.spectral_len()
            )));
        }
        Ok(Self {
            basis: basis.clone(),
            coeffs,
        })
    }

    fn stored_index(&self, k: [i64; 2]) -> Option<usize> {
        let nm = self.basis.n_modes as i64;
        match self.basis.n {
            1 => {
                if (0..=nm / 2).contains(&k[0]) && k[1] == 0 {
                    Some(k[0] as usize)
                } else {
                    None
                }
            }
            _ => {
                if (-nm / 2..nm / 2).contains(&k[0]) && (0..=nm / 2).contains(&k[1]) {
                    let i = if k[0] >= 0 { k[0] } else { k[0] + nm } as usize;
                    Some(i * self.basis.half_len() + k[1] as usize)
                } else {
                    None
                }
            }
        }
    }

    /// Coefficient of any signed mode; negative-half modes are returned by
    /// conjugation, modes outside the truncation band are zero.
    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        if let Some(idx) = self.stored_index(k) {
            return self.coeffs[idx];
        }
        let neg = [-k[0], -k[1]];
        if let Some(idx) = self.stored_index(neg) {
            return self.coeffs[idx].conj();
        }
        Complex64::new(0.0, 0.0)
    }

    /// Sets the coefficient of a mode, keeping Hermitian symmetry: the
    /// mirrored slot (when stored) receives the conjugate.
    ///
    /// Panics on Nyquist slots and on non-real values for self-conjugate
    /// modes.
    pub fn set_mode(&mut self, k: [i64; 2], v: Complex64) {
        let nm = self.basis.n_modes as i64;
        assert!(
            k[0].abs() < nm / 2 && k[1].abs() < nm / 2,
            "mode {k:?} outside the usable band"
        );
        let (k, v) = if self.stored_index(k).is_some() {
            (k, v)
        } else {
            ([-k[0], -k[1]], v.conj())
        };
        let idx = self.stored_index(k).expect("mode in band");
        if k[0] == 0 && k[1] == 0 {
            assert!(v.im == 0.0, "constant mode must be real");
        }
        self.coeffs[idx] = v;
        let mirror = [-k[0], -k[1]];
        if mirror != k {
            if let Some(m) = self.stored_index(mirror) {
                self.coeffs[m] = v.conj();
            }
        }
    }

    /// Weighted real inner product equal to int u v dx of the represented
    /// fields.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let mut acc = 0.0;
        for (idx, (a, b)) in self.coeffs.iter().zip(&other.coeffs).enumerate() {
            let w = self.basis.weight_at(idx);
            acc += w * (a.re * b.re + a.im * b.im);
        }
        acc
    }

    /// ||u||_{L2}^2 by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// int |grad u|^2 dx = sum lambda_k |c_k|^2.
    pub fn h1_semi_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let w = self.basis.weight_at(idx);
            acc += w * self.basis.eigenvalue_at(idx) * c.norm_sqr();
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Checks the storage invariants: Nyquist slots zero, self-conjugate line
    /// consistent, constant mode real, all values finite.
    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::SnapshotPayload("non-finite coefficient".into()));
        }
        let nm = self.basis.n_modes;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if self.basis.is_nyquist(idx) && (c.re != 0.0 || c.im != 0.0) {
                return Err(Error::SnapshotPayload(format!(
                    "Nyquist slot {:?} must be zero",
                    self.basis.mode_at(idx)
                )));
            }
        }
        if self.coeffs[0].im != 0.0 {
            return Err(Error::SnapshotPayload("constant mode must be real".into()));
        }
        if self.basis.n == 2 {
            let half = self.basis.half_len();
            for i in 1..nm {
                let a = self.coeffs[i * half];
                let b = self.coeffs[(nm - i) * half];
                if a.re != b.re || a.im != -b.im {
                    return Err(Error::SnapshotPayload(format!(
                        "Hermitian symmetry violated on the k2 = 0 line at row {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// self += s * other
    pub fn scaled_add(&mut self, s: f64, other: &Self) {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    pub fn linear_comb(a: f64, fa: &Self, b: f64, fb: &Self) -> Self {
        assert_eq!(fa.basis, fb.basis, "basis mismatch");
        let coeffs = fa
            .coeffs
            .iter()
            .zip(&fb.coeffs)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self {
            basis: fa.basis.clone(),
            coeffs,
        }
    }

    /// max_t-style L2 distance building block: ||self - other||_{L2}.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let mut acc = 0.0;
        for (idx, (a, b)) in self.coeffs.iter().zip(&other.coeffs).enumerate() {
            let d = a - b;
            acc += self.basis.weight_at(idx) * d.norm_sqr();
        }
        acc.sqrt()
    }

    /// Re-expresses the field in a finer basis of the same dimension by
    /// zero-padding the spectrum.
    pub fn embed(&self, fine: &BasisSpec) -> Result<Self> {
        if fine.n() != self.basis.n() || fine.n_modes() < self.basis.n_modes() {
            return Err(Error::InvalidBasis(
                "embed target must share the dimension and not truncate".into(),
            ));
        }
        let mut out = SpectralField::zeros(fine);
        for (idx, c) in self.coeffs.iter().enumerate() {
            if self.basis.is_nyquist(idx) {
                continue;
            }
            let k = self.basis.mode_at(idx);
            let t = out.stored_index(k).expect("coarse mode inside fine band");
            out.coeffs[t] = *c;
        }
        Ok(out)
    }
}

/// Real field values on the uniform collocation grid.
#[derive(Clone, Debug)]
pub struct GridField {
    basis: BasisSpec,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(basis: &BasisSpec) -> Self {
        Self {
            basis: basis.clone(),
            values: vec![0.0; basis.grid_len()],
        }
    }

    pub fn from_values(basis: &BasisSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.grid_len() {
            return Err(Error::InvalidBasis(format!(
                "value count {} does not match grid ({})",
                values.len(),
                basis.grid_len()
            )));
        }
        Ok(Self {
            basis: basis.clone(),
            values,
        })
    }

    /// Samples a function of the grid coordinates.
    pub fn from_fn(basis: &BasisSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..basis.grid_len())
            .map(|m| {
                let p = basis.grid_point(m);
                f(p[0], p[1])
            })
            .collect();
        Self {
            basis: basis.clone(),
            values,
        }
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Trapezoidal (= spectral) quadrature of f(u(x)) over the box.
    pub fn quadrature(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.basis.cell_volume() * self.values.iter().map(|&v| f(v)).sum::<f64>()
    }
}

// ---------------------------------------------------------------------------
// FFT plumbing

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, matches!(dir, FftDirection::Forward));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(len, dir))
        .clone()
}

/// In-place FFT along both axes of a row-major g x g complex array.
fn fft2(buf: &mut [Complex64], g: usize, dir: FftDirection) {
    let fft = plan(g, dir);
    for row in buf.chunks_exact_mut(g) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); g];
    for j in 0..g {
        for i in 0..g {
            col[i] = buf[i * g + j];
        }
        fft.process(&mut col);
        for i in 0..g {
            buf[i * g + j] = col[i];
        }
    }
}

fn wrap(k: i64, g: usize) -> usize {
    k.rem_euclid(g as i64) as usize
}

/// Evaluates the represented field at the collocation points.
pub fn to_grid(f: &SpectralField) -> GridField {
    let basis = f.basis();
    let g = basis.grid_points();
    let norm = TWO_PI.powf(-0.5 * basis.n() as f64);
    match basis.n() {
        1 => {
            let mut full = vec![Complex64::new(0.0, 0.0); g];
            for (idx, c) in f.coeffs().iter().enumerate() {
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let k = basis.mode_at(idx)[0];
                full[wrap(k, g)] = *c;
                full[wrap(-k, g)] = c.conj();
            }
            plan(g, FftDirection::Inverse).process(&mut full);
            let values = full.iter().map(|z| z.re * norm).collect();
            GridField {
                basis: basis.clone(),
                values,
            }
        }
        _ => {
            let mut full = vec![Complex64::new(0.0, 0.0); g * g];
            for (idx, c) in f.coeffs().iter().enumerate() {
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let k = basis.mode_at(idx);
                full[wrap(k[0], g) * g + wrap(k[1], g)] = *c;
                full[wrap(-k[0], g) * g + wrap(-k[1], g)] = c.conj();
            }
            fft2(&mut full, g, FftDirection::Inverse);
            let values = full.iter().map(|z| z.re * norm).collect();
            GridField {
                basis: basis.clone(),
                values,
            }
        }
    }
}

/// Projects grid values onto the truncated basis (quadrature realization of
/// the L2 inner products with each phi_k). Inverse of `to_grid` on
/// band-limited fields; Hermitian symmetry is enforced exactly.
pub fn to_spectral(u: &GridField) -> SpectralField {
    let basis = u.basis();
    let g = basis.grid_points();
    let scale = TWO_PI.powf(0.5 * basis.n() as f64) / basis.grid_len() as f64;
    let mut out = SpectralField::zeros(basis);
    match basis.n() {
        1 => {
            let mut full: Vec<Complex64> = u
                .values()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            plan(g, FftDirection::Forward).process(&mut full);
            for idx in 0..out.coeffs.len() {
                if basis.is_nyquist(idx) {
                    continue;
                }
                let k = basis.mode_at(idx)[0];
                let p = full[wrap(k, g)];
                let q = full[wrap(-k, g)];
                out.coeffs[idx] = 0.5 * scale * (p + q.conj());
            }
        }
        _ => {
            let mut full: Vec<Complex64> = u
                .values()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fft2(&mut full, g, FftDirection::Forward);
            for idx in 0..out.coeffs.len() {
                if basis.is_nyquist(idx) {
                    continue;
                }
                let k = basis.mode_at(idx);
                let p = full[wrap(k[0], g) * g + wrap(k[1], g)];
                let q = full[wrap(-k[0], g) * g + wrap(-k[1], g)];
                out.coeffs[idx] = 0.5 * scale * (p + q.conj());
            }
        }
    }
    out
}

/// Galerkin projection of initial data, coefficient_k = int u0 conj(phi_k) dx
/// by spectral quadrature with truncation to the basis band.
pub fn project_initial(u0: &GridField) -> SpectralField {
    to_spectral(u0)
}

/// coeff_out(k) = -|k|^2 coeff_in(k).
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        *c *= -f.basis.eigenvalue_at(idx);
    }
    out
}

/// Axis-a derivative: coeff_out(k) = i k_a coeff_in(k).
pub fn derivative_axis(f: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < f.basis.n(), "axis {axis} out of range");
    let mut out = f.clone();
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        let k = f.basis.mode_at(idx);
        *c *= Complex64::new(0.0, k[axis] as f64);
    }
    out
}

/// Gradient as one field per axis.
pub fn gradient(f: &SpectralField) -> Vec<SpectralField> {
    (0..f.basis.n()).map(|a| derivative_axis(f, a)).collect()
}

/// Divergence of an axis-indexed tuple of fields.
pub fn divergence(v: &[SpectralField]) -> SpectralField {
    let basis = v[0].basis();
    assert_eq!(v.len(), basis.n(), "component count must equal dimension");
    let mut out = SpectralField::zeros(basis);
    for (a, comp) in v.iter().enumerate() {
        assert_eq!(comp.basis(), basis, "basis mismatch");
        for (idx, c) in comp.coeffs().iter().enumerate() {
            let k = basis.mode_at(idx);
            out.coeffs[idx] += c * Complex64::new(0.0, k[a] as f64);
        }
    }
    out
}

/// Zeroes every mode with any |k_a| >= G/3 (the 2/3 rule scaled by the
/// padding factor G/N). A no-op on grids padded by 3/2 or more; idempotent.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let g = f.basis.grid_points() as i64;
    for idx in 0..f.coeffs.len() {
        let k = f.basis.mode_at(idx);
        if 3 * k[0].abs() >= g || 3 * k[1].abs() >= g {
            f.coeffs[idx] = Complex64::new(0.0, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_1d() -> BasisSpec {
        BasisSpec::new(1, 16, 32).unwrap()
    }

    fn basis_2d() -> BasisSpec {
        BasisSpec::new(2, 8, 16).unwrap()
    }

    /// Deterministic band-limited random field for round-trip checks.
    fn random_field(basis: &BasisSpec, seed: u64) -> SpectralField {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut f = SpectralField::zeros(basis);
        let nm = basis.n_modes() as i64;
        let lim = nm / 2 - 1;
        match basis.n() {
            1 => {
                f.set_mode([0, 0], Complex64::new(next(), 0.0));
                for k in 1..=lim {
                    f.set_mode([k, 0], Complex64::new(next(), next()));
                }
            }
            _ => {
                f.set_mode([0, 0], Complex64::new(next(), 0.0));
                for kx in -lim..=lim {
                    for ky in 0..=lim {
                        if ky == 0 && kx <= 0 {
                            continue;
                        }
                        f.set_mode([kx, ky], Complex64::new(next(), next()));
                    }
                }
            }
        }
        f
    }

    #[test]
    fn zero_coefficients_give_zero_grid() {
        let f = SpectralField::zeros(&basis_1d());
        let u = to_grid(&f);
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_mode_gives_constant_grid() {
        // phi_0 = (2pi)^{-n/2}, so a lone constant coefficient a yields
        // a * (2pi)^{-n/2} on the grid.
        for basis in [basis_1d(), basis_2d()] {
            let mut f = SpectralField::zeros(&basis);
            f.set_mode([0, 0], Complex64::new(3.25, 0.0));
            let u = to_grid(&f);
            let expect = 3.25 * TWO_PI.powf(-0.5 * basis.n() as f64);
            for &v in u.values() {
                assert!((v - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_grid_projects_to_constant_mode() {
        for basis in [basis_1d(), basis_2d()] {
            let u = GridField::from_fn(&basis, |_, _| -1.75);
            let f = to_spectral(&u);
            let expect = -1.75 * TWO_PI.powf(0.5 * basis.n() as f64);
            assert!((f.coeff([0, 0]).re - expect).abs() < 1e-12);
            for idx in 1..f.coeffs().len() {
                assert!(f.coeffs()[idx].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sine_projects_to_conjugate_pair() {
        let basis = basis_1d();
        let u = GridField::from_fn(&basis, |x, _| x.sin());
        let f = to_spectral(&u);
        // sin x = (e^{ix} - e^{-ix}) / 2i, so coeff(1) = -i/2 * sqrt(2pi)
        let expect = Complex64::new(0.0, -0.5 * TWO_PI.sqrt());
        assert!((f.coeff([1, 0]) - expect).norm() < 1e-12);
        assert!((f.coeff([-1, 0]) - expect.conj()).norm() < 1e-12);
        for idx in 0..f.coeffs().len() {
            if basis.mode_at(idx)[0] != 1 {
                assert!(f.coeffs()[idx].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_is_exact_on_band_limited_fields() {
        for (basis, seed) in [(basis_1d(), 7), (basis_2d(), 9)] {
            let f = random_field(&basis, seed);
            let back = to_spectral(&to_grid(&f));
            let scale = f.l2_norm().max(1.0);
            assert!(f.l2_distance(&back) / scale < 1e-12);
        }
    }

    #[test]
    fn parseval_matches_grid_quadrature() {
        for seed in 0..50 {
            let basis = basis_1d();
            let f = random_field(&basis, seed + 1);
            let u = to_grid(&f);
            let grid_norm = u.quadrature(|v| v * v);
            let rel = (f.l2_norm_sq() - grid_norm).abs() / grid_norm.max(1e-30);
            assert!(rel < 1e-12, "seed {seed}: rel err {rel:.3e}");
        }
        for seed in 0..50 {
            let basis = basis_2d();
            let f = random_field(&basis, seed + 1000);
            let u = to_grid(&f);
            let grid_norm = u.quadrature(|v| v * v);
            let rel = (f.l2_norm_sq() - grid_norm).abs() / grid_norm.max(1e-30);
            assert!(rel < 1e-12, "seed {seed}: rel err {rel:.3e}");
        }
    }

    #[test]
    fn laplacian_eigenvalues() {
        let basis = basis_1d();
        let mut f = SpectralField::zeros(&basis);
        f.set_mode([0, 0], Complex64::new(2.0, 0.0));
        f.set_mode([1, 0], Complex64::new(1.0, -1.0));
        let lap = laplacian(&f);
        // constant mode: lambda = 0
        assert_eq!(lap.coeff([0, 0]), Complex64::new(0.0, 0.0));
        // k = 1: multiplied by -1
        assert_eq!(lap.coeff([1, 0]), Complex64::new(-1.0, 1.0));

        let basis2 = basis_2d();
        let mut f2 = SpectralField::zeros(&basis2);
        f2.set_mode([2, 1], Complex64::new(1.0, 0.5));
        let lap2 = laplacian(&f2);
        // |k|^2 = 4 + 1 = 5
        assert_eq!(lap2.coeff([2, 1]), Complex64::new(-5.0, -2.5));
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let basis = basis_2d();
        let mut f = SpectralField::zeros(&basis);
        f.set_mode([0, 0], Complex64::new(4.0, 0.0));
        for comp in gradient(&f) {
            assert!(comp.l2_norm() == 0.0);
        }
    }

    #[test]
    fn gradient_of_sine_is_cosine() {
        let basis = basis_1d();
        let u = GridField::from_fn(&basis, |x, _| x.sin());
        let g = to_grid(&gradient(&to_spectral(&u))[0]);
        for (m, &v) in g.values().iter().enumerate() {
            let x = basis.grid_point(m)[0];
            assert!((v - x.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        for (basis, seed) in [(basis_1d(), 3), (basis_2d(), 4)] {
            let f = random_field(&basis, seed);
            let lhs = divergence(&gradient(&f));
            let rhs = laplacian(&f);
            assert!(lhs.l2_distance(&rhs) < 1e-12 * rhs.l2_norm().max(1.0));
        }
    }

    #[test]
    fn dealias_cutoff_and_idempotence() {
        // unpadded grid: G = N, cutoff |k| >= N/3
        let basis = BasisSpec::new(1, 16, 16).unwrap();
        let mut f = SpectralField::zeros(&basis);
        f.set_mode([2, 0], Complex64::new(1.0, 1.0));
        f.set_mode([7, 0], Complex64::new(1.0, 0.0)); // top usable mode
        let d = dealias(&f);
        assert_eq!(d.coeff([2, 0]), Complex64::new(1.0, 1.0));
        assert_eq!(d.coeff([7, 0]), Complex64::new(0.0, 0.0));
        let dd = dealias(&d);
        for (a, b) in d.coeffs().iter().zip(dd.coeffs()) {
            assert_eq!(a, b);
        }

        // 3/2-padded grid: already band-limited fields pass through unchanged
        let padded = basis_1d();
        let f = random_field(&padded, 11);
        let d = dealias(&f);
        for (a, b) in f.coeffs().iter().zip(d.coeffs()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn operators_commute_with_truncation() {
        // applying dealias before or after a diagonal operator is identical
        let basis = BasisSpec::new(1, 16, 16).unwrap();
        let f = random_field(&basis, 5);
        let a = dealias(&laplacian(&f));
        let b = laplacian(&dealias(&f));
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn project_constant_field() {
        let basis = basis_1d();
        let u = GridField::from_fn(&basis, |_, _| 1.0);
        let f = project_initial(&u);
        assert!((f.coeff([0, 0]).re - TWO_PI.sqrt()).abs() < 1e-13);
        for idx in 1..f.coeffs().len() {
            assert!(f.coeffs()[idx].norm() < 1e-13);
        }
    }

    #[test]
    fn project_normalized_eigenfunction() {
        // the normalized real eigenfunction cos(5x)/sqrt(pi) carries unit
        // L2 norm and lives on the +-5 conjugate pair alone
        let basis = basis_1d();
        let u = GridField::from_fn(&basis, |x, _| (5.0 * x).cos() / std::f64::consts::PI.sqrt());
        let f = project_initial(&u);
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
        for idx in 0..f.coeffs().len() {
            let k = basis.mode_at(idx)[0];
            if k != 5 {
                assert!(f.coeffs()[idx].norm() < 1e-12);
            }
        }
        let c5 = f.coeff([5, 0]);
        assert!((c5 - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn project_reproduces_fields_in_the_span() {
        for (basis, seed) in [(basis_1d(), 21), (basis_2d(), 22)] {
            let f = random_field(&basis, seed);
            let again = project_initial(&to_grid(&f));
            assert!(f.l2_distance(&again) < 1e-12 * f.l2_norm().max(1.0));
        }
    }

    #[test]
    fn project_three_mode_initial_condition() {
        // u0 = 1 + 0.5 sin x: modes {0, +-1}, mass 2pi
        let basis = BasisSpec::new(1, 64, 128).unwrap();
        let u = GridField::from_fn(&basis, |x, _| 1.0 + 0.5 * x.sin());
        let f = project_initial(&u);
        let mass = TWO_PI.sqrt() * f.coeff([0, 0]).re;
        assert!((mass - TWO_PI).abs() < 1e-12);
        let c1 = f.coeff([1, 0]);
        let expect = Complex64::new(0.0, -0.25 * TWO_PI.sqrt());
        assert!((c1 - expect).norm() < 1e-12);
        let nonzero = (0..f.coeffs().len())
            .filter(|&i| f.coeffs()[i].norm() > 1e-12)
            .count();
        assert_eq!(nonzero, 2); // stored half-spectrum: k = 0 and k = 1
    }

    #[test]
    fn hermitian_symmetry_maintained_by_transforms() {
        let basis = basis_2d();
        let f = random_field(&basis, 31);
        let g = to_spectral(&to_grid(&f));
        g.validate().unwrap();
        derivative_axis(&g, 0).validate().unwrap();
        laplacian(&g).validate().unwrap();
    }

    #[test]
    fn embed_preserves_modes_and_norm() {
        let coarse = BasisSpec::new(1, 8, 16).unwrap();
        let fine = BasisSpec::new(1, 16, 32).unwrap();
        let f = random_field(&coarse, 17);
        let e = f.embed(&fine).unwrap();
        assert!((e.l2_norm() - f.l2_norm()).abs() < 1e-14);
        for idx in 0..coarse.spectral_len() {
            let k = coarse.mode_at(idx);
            if coarse.is_nyquist(idx) {
                continue;
            }
            assert_eq!(e.coeff(k), f.coeffs()[idx]);
        }
    }

    #[test]
    fn transform_friendly_sizes() {
        assert_eq!(transform_friendly(96), 96);
        assert_eq!(transform_friendly(97), 100);
        assert_eq!(transform_friendly(24), 24);
        assert_eq!(transform_friendly(7), 8);
    }

    #[test]
    fn basis_validation() {
        assert!(BasisSpec::new(3, 8, 16).is_err());
        assert!(BasisSpec::new(1, 6, 8).is_ok());
        assert!(BasisSpec::new(1, 7, 16).is_err());
        assert!(BasisSpec::new(1, 2, 16).is_err());
        assert!(BasisSpec::new(1, 16, 8).is_err());
    }
}
