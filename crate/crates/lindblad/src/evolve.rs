//! Lab-frame Lindblad propagation without a rotating-wave approximation.
//!
//! The density matrix is evolved in the same rephased gauge basis the
//! spectrum is built in, where the static Hamiltonian and the drive
//! −ε₁(t) sin(ω₁ t)(a† + a) are both real symmetric. That keeps the
//! Hamiltonian in a single real sparse matrix whose values are refreshed
//! per stage; only the density matrix is complex. The lab-frame drive this
//! corresponds to is i ε₁(t) sin(ω₁ t)(a† − a).
//!
//! Internally everything is angular (rad/µs, i.e. 2π × MHz) with time in
//! microseconds. Callers hand over linear-MHz spectra; the conversion
//! happens here and in the drive profile the caller builds (see
//! [`crate::fullsim`]).
//!
//! The stepper is classical fourth-order Runge-Kutta with a fixed step
//! chosen from the drive period and a Gershgorin bound on the spectral
//! range, plus a step-halving error estimate collected along the way. No
//! symmetry between the two qubit branches is assumed anywhere; cavity
//! decay dresses the branches differently and the asymmetry is physical.

use nalgebra::DMatrix;
use num_complex::Complex64;
use readout_core::params::DriveProfile;

use crate::error::{LindbladError, Result};
use crate::spectrum::{static_hamiltonian, DressedSpectrum};

pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Trace deviation that aborts a run.
pub const TRACE_TOL: f64 = 1e-5;
/// Top-Fock population that aborts a run.
pub const TRUNCATION_TOL: f64 = 1e-4;

/// Fixed-step plan. `steps_per_period` refers to the drive period 2π/ω₁;
/// the actual step may be smaller if the spectral range demands it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepControl {
    pub steps_per_period: usize,
    /// Number of output samples, endpoints included.
    pub samples: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            steps_per_period: 96,
            samples: 301,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < 40 {
            return Err(LindbladError::domain(
                "steps_per_period",
                format!(
                    "need at least 40 steps per drive period, got {}",
                    self.steps_per_period
                ),
            ));
        }
        if self.samples < 2 {
            return Err(LindbladError::domain(
                "samples",
                format!("need at least 2 samples, got {}", self.samples),
            ));
        }
        Ok(())
    }
}

/// Sampled trajectory of one master-equation run.
#[derive(Debug, Clone)]
pub struct EvolveOutput {
    /// Sample times in microseconds, uniform, starting at 0.
    pub times: Vec<f64>,
    /// Demodulated cavity amplitude e^{iω₁t}⟨a⟩_lab at each sample.
    pub a_demod: Vec<Complex64>,
    /// ⟨a†a⟩ at each sample.
    pub photon: Vec<f64>,
    /// Bare transmon-level populations, `[sample][level]`.
    pub level_pops: Vec<Vec<f64>>,
    /// Population of the top Fock level at each sample.
    pub top_fock: Vec<f64>,
    /// |tr ρ − 1| at each sample.
    pub trace_dev: Vec<f64>,
    /// tr(O ρ) for each caller-supplied observable, `[sample][observable]`.
    pub observables: Vec<Vec<f64>>,
    /// Largest step-halving local error estimate seen (Frobenius, relative).
    pub max_step_halving_error: f64,
    /// Final density matrix in the gauge basis.
    pub final_rho: DMatrix<Complex64>,
    pub steps_taken: usize,
    pub dt: f64,
}

/// Real CSR matrix that is the union of the static pattern and the drive
/// pattern; per-stage values are v0 + c(t) v1.
struct UnionCsr {
    dim: usize,
    indptr: Vec<usize>,
    cols: Vec<usize>,
    v0: Vec<f64>,
    v1: Vec<f64>,
}

impl UnionCsr {
    /// `h0` is the static matrix; the drive pattern is I ⊗ (a† + a) with
    /// unit coefficient stored in v1.
    fn build(h0: &DMatrix<f64>, n_levels: usize, fock: usize) -> Self {
        let dim = n_levels * fock;
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut v0 = Vec::new();
        let mut v1 = Vec::new();
        indptr.push(0);
        for r in 0..dim {
            let n = r % fock;
            let (lo, hi) = (r.saturating_sub(1), (r + 1).min(dim - 1));
            for c in 0..dim {
                let stat = h0[(r, c)];
                let mut drv = 0.0;
                if c >= lo && c <= hi && c != r && c / fock == r / fock {
                    // Same transmon level, photon differs by one.
                    let nmin = n.min(c % fock);
                    drv = ((nmin + 1) as f64).sqrt();
                }
                if stat != 0.0 || drv != 0.0 {
                    cols.push(c);
                    v0.push(stat);
                    v1.push(drv);
                }
            }
            indptr.push(cols.len());
        }
        Self {
            dim,
            indptr,
            cols,
            v0,
            v1,
        }
    }

    fn refresh(&self, coeff: f64, vals: &mut [f64]) {
        for k in 0..self.v0.len() {
            vals[k] = self.v0[k] + coeff * self.v1[k];
        }
    }

    /// out = H · rho, both column-major slices of dim × dim.
    fn spmm(&self, vals: &[f64], rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for c in 0..d {
            let rc = &rho[c * d..(c + 1) * d];
            let oc = &mut out[c * d..(c + 1) * d];
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.indptr[r]..self.indptr[r + 1] {
                    acc += rc[self.cols[k]] * vals[k];
                }
                oc[r] = acc;
            }
        }
    }
}

/// Right-hand side −i[H, ρ] + κ(aρa† − ½{a†a, ρ}) into `out`.
/// `x` is scratch for H·ρ. κ and the Hamiltonian values are angular.
struct Engine {
    csr: UnionCsr,
    fock: usize,
    kappa: f64,
    sqrt1: Vec<f64>,
}

impl Engine {
    fn rhs(&self, vals: &[f64], rho: &[Complex64], x: &mut [Complex64], out: &mut [Complex64]) {
        let d = self.csr.dim;
        let f = self.fock;
        self.csr.spmm(vals, rho, x);
        for c in 0..d {
            let nc = c % f;
            for r in 0..d {
                let nr = r % f;
                // [H, ρ] from one product: Hρ − (Hρ)† since H is symmetric.
                let comm = x[c * d + r] - x[r * d + c].conj();
                let mut dis = rho[c * d + r] * (-0.5 * (nr + nc) as f64);
                if nr + 1 < f && nc + 1 < f {
                    dis += rho[(c + 1) * d + (r + 1)] * (self.sqrt1[nr] * self.sqrt1[nc]);
                }
                out[c * d + r] =
                    Complex64::new(comm.im, -comm.re) + dis * self.kappa;
            }
        }
    }

    /// One RK4 step from `rho` at time `t` into `rho` itself.
    /// Scratch: vals, x, k, acc, tmp.
    #[allow(clippy::too_many_arguments)]
    fn rk4_step(
        &self,
        t: f64,
        dt: f64,
        drive: &dyn Fn(f64) -> f64,
        rho: &mut [Complex64],
        vals: &mut [f64],
        x: &mut [Complex64],
        k: &mut [Complex64],
        acc: &mut [Complex64],
        tmp: &mut [Complex64],
    ) {
        let n = rho.len();
        // Stage 1.
        self.csr.refresh(drive(t), vals);
        self.rhs(vals, rho, x, acc);
        // Stage 2.
        for i in 0..n {
            tmp[i] = rho[i] + acc[i] * (0.5 * dt);
        }
        self.csr.refresh(drive(t + 0.5 * dt), vals);
        self.rhs(vals, tmp, x, k);
        for i in 0..n {
            acc[i] += k[i] * 2.0;
            tmp[i] = rho[i] + k[i] * (0.5 * dt);
        }
        // Stage 3 (same drive time as stage 2).
        self.rhs(vals, tmp, x, k);
        for i in 0..n {
            acc[i] += k[i] * 2.0;
            tmp[i] = rho[i] + k[i] * dt;
        }
        // Stage 4.
        self.csr.refresh(drive(t + dt), vals);
        self.rhs(vals, tmp, x, k);
        for i in 0..n {
            rho[i] += (acc[i] + k[i]) * (dt / 6.0);
        }
    }
}

fn frobenius(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Upper bound on the spectral range of H over the run, by Gershgorin discs
/// applied to |H0| + |c|_max |V|.
fn spectral_range_bound(csr: &UnionCsr, coeff_max: f64) -> f64 {
    let d = csr.dim;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..d {
        let mut center = 0.0;
        let mut radius = 0.0;
        for k in csr.indptr[r]..csr.indptr[r + 1] {
            let v = csr.v0[k].abs() + coeff_max * csr.v1[k].abs();
            if csr.cols[k] == r {
                center = csr.v0[k];
                radius += coeff_max * csr.v1[k].abs();
            } else {
                radius += v;
            }
        }
        lo = lo.min(center - radius);
        hi = hi.max(center + radius);
    }
    (hi - lo).max(1e-12)
}

/// Propagates ρ under the lab-frame master equation with the drive
/// i ε₁(t) sin(ω₁ t)(a† − a) and cavity decay κ.
///
/// * `drive` supplies the envelope ε₁(t) in angular units (rad/µs) with t in
///   microseconds.
/// * `omega_1` is the carrier and demodulation frequency in linear MHz.
/// * `rho0` must be the density matrix in the gauge basis used by
///   [`crate::spectrum::dressed_spectrum`].
/// * `observables` are real matrices O whose tr(O ρ) is sampled.
///
/// Aborts with [`LindbladError::TraceDriftError`] or
/// [`LindbladError::TruncationError`] when the respective monitor trips.
pub fn evolve_master_equation(
    spectrum: &DressedSpectrum,
    drive: &DriveProfile,
    omega_1: f64,
    rho0: &DMatrix<Complex64>,
    t_end: f64,
    ctrl: &StepControl,
    observables: &[DMatrix<f64>],
) -> Result<EvolveOutput> {
    ctrl.validate()?;
    drive
        .validate()
        .map_err(|e| LindbladError::domain("drive", e.to_string()))?;
    if !(omega_1 > 0.0 && omega_1.is_finite()) {
        return Err(LindbladError::domain(
            "omega_1",
            format!("carrier frequency must be positive, got {omega_1}"),
        ));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(LindbladError::domain(
            "t_end",
            format!("must be positive and finite, got {t_end}"),
        ));
    }
    let p = &spectrum.params;
    let dim = p.dim();
    if rho0.nrows() != dim || rho0.ncols() != dim {
        return Err(LindbladError::domain(
            "rho0",
            format!("expected {dim}x{dim}, got {}x{}", rho0.nrows(), rho0.ncols()),
        ));
    }

    let w1 = TWO_PI * omega_1;
    let kappa = TWO_PI * p.kappa;
    let mut h0 = static_hamiltonian(&spectrum.transmon, p);
    h0 *= TWO_PI;
    let csr = UnionCsr::build(&h0, p.n_transmon_levels, p.fock_cutoff);

    // Drive coefficient: H1(t) = c(t) (a† + a) with c = −ε₁(t) sin(ω₁ t).
    let coeff = move |t: f64| -> f64 { -drive.value(t) * (w1 * t).sin() };
    let mut eps_max: f64 = 0.0;
    for i in 0..=1000 {
        eps_max = eps_max.max(drive.value(t_end * i as f64 / 1000.0).abs());
    }

    let period = TWO_PI / w1;
    let dt_period = period / ctrl.steps_per_period as f64;
    let dt_spectral = 2.0 / spectral_range_bound(&csr, eps_max);
    let dt_raw = dt_period.min(dt_spectral);
    let intervals = ctrl.samples - 1;
    let per_interval = ((t_end / intervals as f64) / dt_raw).ceil().max(1.0) as usize;
    let n_steps = per_interval * intervals;
    let dt = t_end / n_steps as f64;

    let engine = Engine {
        csr,
        fock: p.fock_cutoff,
        kappa,
        sqrt1: (0..p.fock_cutoff).map(|n| ((n + 1) as f64).sqrt()).collect(),
    };

    let nnz = engine.csr.v0.len();
    let mut vals = vec![0.0f64; nnz];
    let n2 = dim * dim;
    let mut rho: Vec<Complex64> = rho0.as_slice().to_vec();
    let mut x = vec![Complex64::new(0.0, 0.0); n2];
    let mut k = vec![Complex64::new(0.0, 0.0); n2];
    let mut acc = vec![Complex64::new(0.0, 0.0); n2];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n2];
    let mut half = vec![Complex64::new(0.0, 0.0); n2];

    let mut out = EvolveOutput {
        times: Vec::with_capacity(ctrl.samples),
        a_demod: Vec::with_capacity(ctrl.samples),
        photon: Vec::with_capacity(ctrl.samples),
        level_pops: Vec::with_capacity(ctrl.samples),
        top_fock: Vec::with_capacity(ctrl.samples),
        trace_dev: Vec::with_capacity(ctrl.samples),
        observables: Vec::with_capacity(ctrl.samples),
        max_step_halving_error: 0.0,
        final_rho: DMatrix::zeros(dim, dim),
        steps_taken: n_steps,
        dt,
    };

    // Step-halving checks on at most 8 of the sample intervals.
    let halving_stride = (intervals / 8).max(1);

    let f = p.fock_cutoff;
    let nl = p.n_transmon_levels;
    let sample = |t: f64, rho: &[Complex64], out: &mut EvolveOutput| -> Result<()> {
        let mut trace = 0.0;
        let mut photon = 0.0;
        let mut top = 0.0;
        let mut pops = vec![0.0f64; nl];
        for r in 0..dim {
            let d = rho[r * dim + r].re;
            trace += d;
            photon += (r % f) as f64 * d;
            pops[r / f] += d;
            if r % f == f - 1 {
                top += d;
            }
        }
        // tr(aρ) = Σ_{j,n≥1} √n ρ[(j,n),(j,n−1)].
        let mut tr_a = Complex64::new(0.0, 0.0);
        for j in 0..nl {
            for n in 1..f {
                let row = j * f + n;
                let col = j * f + n - 1;
                tr_a += rho[col * dim + row] * (n as f64).sqrt();
            }
        }
        let phase = Complex64::new(0.0, w1 * t).exp();
        let demod = Complex64::new(0.0, -1.0) * phase * tr_a;

        let dev = (trace - 1.0).abs();
        if dev > TRACE_TOL {
            return Err(LindbladError::TraceDriftError(format!(
                "|tr ρ − 1| = {dev:.3e} at t = {t:.6} µs exceeds {TRACE_TOL:.0e}"
            )));
        }
        if top > TRUNCATION_TOL {
            return Err(LindbladError::TruncationError(format!(
                "top Fock population {top:.3e} at t = {t:.6} µs exceeds {TRUNCATION_TOL:.0e}; \
                 raise fock_cutoff"
            )));
        }
        let mut obs = Vec::with_capacity(observables.len());
        for o in observables {
            let mut s = 0.0;
            for c in 0..dim {
                for r in 0..dim {
                    s += o[(r, c)] * rho[r * dim + c].re;
                }
            }
            obs.push(s);
        }
        out.times.push(t);
        out.a_demod.push(demod);
        out.photon.push(photon);
        out.level_pops.push(pops);
        out.top_fock.push(top);
        out.trace_dev.push(dev);
        out.observables.push(obs);
        Ok(())
    };

    sample(0.0, &rho, &mut out)?;
    let mut step_idx = 0usize;
    for interval in 0..intervals {
        let check_halving = interval % halving_stride == 0;
        if check_halving {
            // One probe step of dt against two of dt/2, from the current
            // state; the trajectory itself continues with the full step.
            let t = step_idx as f64 * dt;
            half.copy_from_slice(&rho);
            engine.rk4_step(
                t,
                0.5 * dt,
                &coeff,
                &mut half,
                &mut vals,
                &mut x,
                &mut k,
                &mut acc,
                &mut tmp,
            );
            engine.rk4_step(
                t + 0.5 * dt,
                0.5 * dt,
                &coeff,
                &mut half,
                &mut vals,
                &mut x,
                &mut k,
                &mut acc,
                &mut tmp,
            );
            let mut probe = rho.clone();
            engine.rk4_step(
                t,
                dt,
                &coeff,
                &mut probe,
                &mut vals,
                &mut x,
                &mut k,
                &mut acc,
                &mut tmp,
            );
            for i in 0..n2 {
                half[i] -= probe[i];
            }
            let err = frobenius(&half) / frobenius(&probe).max(1.0);
            out.max_step_halving_error = out.max_step_halving_error.max(err);
            if err > 1e-3 {
                return Err(LindbladError::ConvergenceError(format!(
                    "step-halving error estimate {err:.3e} at t = {t:.6} µs; \
                     the fixed step is too coarse for this model"
                )));
            }
        }
        for _ in 0..per_interval {
            let t = step_idx as f64 * dt;
            engine.rk4_step(
                t,
                dt,
                &coeff,
                &mut rho,
                &mut vals,
                &mut x,
                &mut k,
                &mut acc,
                &mut tmp,
            );
            step_idx += 1;
        }
        sample(step_idx as f64 * dt, &rho, &mut out)?;
    }

    for c in 0..dim {
        for r in 0..dim {
            out.final_rho[(r, c)] = rho[c * dim + r];
        }
    }
    Ok(out)
}

/// exp(α(a − a†)) on a truncated Fock space: the gauge image of the lab
/// displacement D(iα). Real and orthogonal up to truncation effects.
pub fn displacement_real(fock: usize, alpha: f64) -> DMatrix<f64> {
    let mut b = DMatrix::<f64>::zeros(fock, fock);
    for n in 0..fock - 1 {
        let s = ((n + 1) as f64).sqrt() * alpha;
        b[(n, n + 1)] = s; // α a
        b[(n + 1, n)] = -s; // −α a†
    }
    // Scaling and squaring with a Taylor series.
    let norm = b.amax() * fock as f64;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let t = b / 2f64.powi(s as i32);
    let mut term = DMatrix::<f64>::identity(fock, fock);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = (&term * &t) / k as f64;
        sum += &term;
        if term.amax() < 1e-18 * sum.amax() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}
