//! Lindblad dynamics of the driven exciton.
//!
//! The master equation in the rotating frame of the laser is
//!
//! ```text
//! dρ/dt = −i[H(t), ρ] + γ D[σ−]ρ + 2γ_d D[P_e]ρ + Γ↓ D[|−⟩⟨+|]ρ + Γ↑ D[|+⟩⟨−|]ρ
//! H(t)  = −δ|e⟩⟨e| + (Ω(t)/2)(|e⟩⟨g| + |g⟩⟨e|)
//! ```
//!
//! with δ > 0 for a blue-detuned laser. The phonon channel relaxes the
//! instantaneous dressed states |±⟩ of the driven transition at the rates
//! returned by [`phonon_rates`]; the dressed basis is recomputed at every
//! evaluation (adiabatic approximation). For blue detuning the lower dressed
//! state connects to the exciton as the pulse switches off, which is what
//! turns phonon emission into population inversion.
//!
//! The dephasing dissipator `2γ_d D[P_e]` is algebraically identical to
//! `(γ_d/2) D[σ_z]` and gives the off-diagonals a pure-dephasing decay rate
//! of exactly γ_d.
//!
//! States are 2×2 (effective {|g⟩, |X⟩} system) or 3×3 ({|g⟩, |X⟩, |Y⟩}
//! with the fine-structure splitting on |Y⟩).

use std::io::Write;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::consts::{bose_occupation, uev_to_angular};
use crate::error::{Error, Result};
use crate::linalg::{dagger, hermiticity_defect, min_hermitian_eigenvalue, trace};
pub use crate::ode::SolverDiagnostics;
use crate::params::{PhononBathParams, QDParams};
use crate::pulse::{gaussian_amplitude, PulseEnvelope};

const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// Dressed-state phonon relaxation rates at one instant of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononRates {
    /// Downward (phonon emission) rate, 1/ps.
    pub gamma_down: f64,
    /// Upward (phonon absorption) rate, 1/ps.
    pub gamma_up: f64,
    /// Generalized Rabi frequency Λ = √(δ² + Ω²), rad/ps.
    pub lambda_gen: f64,
}

/// Weak-coupling relaxation rates between the instantaneous dressed states,
///
/// Γ↓ = (π/2)·(Ω/Λ)²·J(Λ)·(n̄(Λ)+1),  Γ↑ = (π/2)·(Ω/Λ)²·J(Λ)·n̄(Λ).
///
/// Both vanish when the drive is off (no dressing, no relaxation channel).
pub fn phonon_rates(omega: f64, delta: f64, bath: &PhononBathParams) -> PhononRates {
    let lambda = (delta * delta + omega * omega).sqrt();
    if lambda <= 0.0 || omega == 0.0 {
        return PhononRates {
            gamma_down: 0.0,
            gamma_up: 0.0,
            lambda_gen: lambda,
        };
    }
    let weight = FRAC_PI_2 * (omega / lambda).powi(2) * bath.spectral_density(lambda);
    let n = bose_occupation(lambda, bath.temperature_k);
    PhononRates {
        gamma_down: weight * (n + 1.0),
        gamma_up: weight * n,
        lambda_gen: lambda,
    }
}

/// Drive envelope shapes understood by the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum DriveShape {
    /// No drive.
    Zero,
    /// Analytic quasi-Gaussian pulse (smooth; preferred for solving).
    Gaussian {
        fwhm_ps: f64,
        area_rad: f64,
        center_ps: f64,
    },
    /// Sampled envelope, linearly interpolated (e.g. a top-hat-spectrum
    /// pulse).
    Sampled(PulseEnvelope),
    /// Piecewise-constant drive: `omegas[i]` on `[edges[i], edges[i+1])`.
    PiecewiseConstant { edges: Vec<f64>, omegas: Vec<f64> },
}

impl DriveShape {
    pub fn omega(&self, t: f64) -> f64 {
        match self {
            DriveShape::Zero => 0.0,
            DriveShape::Gaussian {
                fwhm_ps,
                area_rad,
                center_ps,
            } => {
                let peak = area_rad / (fwhm_ps * (std::f64::consts::PI / (4.0 * std::f64::consts::LN_2)).sqrt());
                peak * gaussian_amplitude(t - center_ps, *fwhm_ps)
            }
            DriveShape::Sampled(env) => env.omega_at(t),
            DriveShape::PiecewiseConstant { edges, omegas } => {
                if t < edges[0] || t >= edges[edges.len() - 1] {
                    return 0.0;
                }
                let i = match edges.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                omegas[i.min(omegas.len() - 1)]
            }
        }
    }

    /// Times where the drive is not smooth; the integrator restarts there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            DriveShape::PiecewiseConstant { edges, .. } => edges.clone(),
            _ => Vec::new(),
        }
    }

    /// End of the interval on which the drive is non-negligible.
    pub fn support_end(&self) -> f64 {
        match self {
            DriveShape::Zero => f64::NEG_INFINITY,
            DriveShape::Gaussian {
                fwhm_ps, center_ps, ..
            } => center_ps + 3.0 * fwhm_ps,
            DriveShape::Sampled(env) => env.times.last().copied().unwrap_or(f64::NEG_INFINITY),
            DriveShape::PiecewiseConstant { edges, .. } => {
                edges.last().copied().unwrap_or(f64::NEG_INFINITY)
            }
        }
    }
}

/// Rotating-frame drive: detuning δ (positive = blue) plus envelope Ω(t).
#[derive(Debug, Clone, PartialEq)]
pub struct DriveHamiltonian {
    pub delta_per_ps: f64,
    pub shape: DriveShape,
}

impl DriveHamiltonian {
    pub fn new(delta_per_ps: f64, shape: DriveShape) -> Self {
        Self { delta_per_ps, shape }
    }

    /// Centered Gaussian pulse on a `[0, 6·fwhm]` support.
    pub fn gaussian(delta_per_ps: f64, fwhm_ps: f64, area_rad: f64) -> Self {
        Self::new(
            delta_per_ps,
            DriveShape::Gaussian {
                fwhm_ps,
                area_rad,
                center_ps: 3.0 * fwhm_ps,
            },
        )
    }
}

/// Solver output grid and tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub t_start: f64,
    pub t_end: f64,
    /// Output step, ps.
    pub dt_out: f64,
    /// Optional coarser output after a switch time `(t_switch, dt_coarse)`,
    /// used for long decay tails.
    pub coarse_tail: Option<(f64, f64)>,
    /// Per-step absolute tolerance on density-matrix entries.
    pub abs_tol: f64,
}

impl SolveOptions {
    pub fn new(t_start: f64, t_end: f64) -> Self {
        SolveOptions {
            t_start,
            t_end,
            dt_out: 0.05,
            coarse_tail: None,
            abs_tol: 1e-10,
        }
    }

    /// Window covering just the pulse support `[0, 6·fwhm]`.
    pub fn pulse_window(fwhm_ps: f64) -> Self {
        Self::new(0.0, 6.0 * fwhm_ps)
    }

    /// Window covering the pulse plus `lifetimes` radiative lifetimes of
    /// decay, with a coarser output grid on the tail.
    pub fn emission_window(fwhm_ps: f64, gamma: f64, lifetimes: f64) -> Self {
        let pulse_end = 6.0 * fwhm_ps;
        let mut o = Self::new(0.0, pulse_end + lifetimes / gamma);
        o.coarse_tail = Some((pulse_end, 0.5));
        o
    }

    pub(crate) fn output_times(&self) -> Vec<f64> {
        let mut times = Vec::new();
        let (fine_end, dt_coarse) = match self.coarse_tail {
            Some((switch, dt)) => (switch.min(self.t_end), dt),
            None => (self.t_end, self.dt_out),
        };
        let n_fine = ((fine_end - self.t_start) / self.dt_out).round() as usize;
        for i in 0..=n_fine {
            times.push(self.t_start + i as f64 * self.dt_out);
        }
        if fine_end < self.t_end {
            let n_coarse = ((self.t_end - fine_end) / dt_coarse).ceil() as usize;
            let dt = (self.t_end - fine_end) / n_coarse as f64;
            for i in 1..=n_coarse {
                times.push(fine_end + i as f64 * dt);
            }
        }
        times
    }
}

/// Time-ordered density matrices of the driven system plus derived
/// populations.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    /// Output times, ps.
    pub times: Vec<f64>,
    /// Density matrices at the output times.
    pub states: Vec<Array2<C64>>,
    /// Excited-state occupation ⟨e|ρ|e⟩ (X plus Y population for 3-level).
    pub populations: Vec<f64>,
    pub diagnostics: SolverDiagnostics,
    /// End of drive support, for emission-window warnings.
    pub drive_support_end_ps: f64,
}

impl StateTrajectory {
    pub fn dim(&self) -> usize {
        self.states.first().map(|s| s.nrows()).unwrap_or(0)
    }

    /// Verify trace preservation, Hermiticity and positivity at every
    /// output time (|tr−1| < 1e-8, ‖ρ−ρ†‖ < 1e-10, min eig > −1e-9).
    pub fn validate(&self) -> Result<()> {
        for (t, rho) in self.times.iter().zip(&self.states) {
            let tr = trace(rho);
            if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
                return Err(Error::Integration(format!(
                    "trace {tr} deviates from 1 at t = {t} ps"
                )));
            }
            if hermiticity_defect(rho) > 1e-10 {
                return Err(Error::Integration(format!(
                    "state not Hermitian at t = {t} ps"
                )));
            }
            let min_eig = min_hermitian_eigenvalue(rho);
            if min_eig < -1e-9 {
                return Err(Error::Integration(format!(
                    "negative eigenvalue {min_eig:.3e} at t = {t} ps"
                )));
            }
        }
        Ok(())
    }

    /// State at the output time nearest to `t`.
    pub fn state_at(&self, t: f64) -> (&Array2<C64>, f64) {
        let mut best = 0usize;
        let mut dist = f64::INFINITY;
        for (i, &ti) in self.times.iter().enumerate() {
            let d = (ti - t).abs();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        (&self.states[best], self.times[best])
    }

    /// CSV export: time_ps, p_e, re_coh, im_coh.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time_ps,p_e,re_coh,im_coh")?;
        for ((t, p), rho) in self.times.iter().zip(&self.populations).zip(&self.states) {
            let coh = rho[(0, 1)];
            writeln!(w, "{t},{p},{},{}", coh.re, coh.im)?;
        }
        Ok(())
    }
}

/// Ground state |g⟩⟨g| of a `dim`-level system.
pub fn ground_state(dim: usize) -> Array2<C64> {
    let mut rho = Array2::zeros((dim, dim));
    rho[(0, 0)] = C64::new(1.0, 0.0);
    rho
}

/// Exciton state |X⟩⟨X|.
pub fn excited_state(dim: usize) -> Array2<C64> {
    let mut rho = Array2::zeros((dim, dim));
    rho[(1, 1)] = C64::new(1.0, 0.0);
    rho
}

fn excited_population(rho: &Array2<C64>) -> f64 {
    (1..rho.nrows()).map(|i| rho[(i, i)].re).sum()
}

/// Precomputed operators of the Lindblad generator.
///
/// The same object backs both the adaptive solver and
/// [`LindbladOps::instantaneous_generator`], so any independent propagation
/// of the latter (e.g. by matrix exponentials) checks the integrator, not a
/// second model.
pub struct LindbladOps {
    dim: usize,
    delta: f64,
    h0: Array2<C64>,
    drive_op: Array2<C64>,
    static_channels: Vec<(f64, Array2<C64>)>,
    phonon: Option<PhononBathParams>,
    lowering: Array2<C64>,
}

impl LindbladOps {
    /// Build the generator for a 2- or 3-level system. The phonon channel is
    /// active whenever the bath coupling is non-zero.
    pub fn new(
        h: &DriveHamiltonian,
        qd: &QDParams,
        bath: &PhononBathParams,
        dim: usize,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Domain(format!("unsupported dimension {dim}")));
        }
        qd.validate()?;
        bath.validate()?;
        let delta = h.delta_per_ps;
        let gamma = qd.radiative_rate_per_ps;
        let gamma_d = qd.pure_dephasing_rate_per_ps;

        let mut h0: Array2<C64> = Array2::zeros((dim, dim));
        h0[(1, 1)] = C64::new(-delta, 0.0);
        if dim == 3 {
            // |Y> sits one fine-structure splitting below |X>
            let fss = uev_to_angular(qd.fss_uev);
            h0[(2, 2)] = C64::new(-delta - fss, 0.0);
        }

        let mut drive_op: Array2<C64> = Array2::zeros((dim, dim));
        drive_op[(0, 1)] = C64::new(1.0, 0.0);
        drive_op[(1, 0)] = C64::new(1.0, 0.0);

        let mut lowering: Array2<C64> = Array2::zeros((dim, dim));
        lowering[(0, 1)] = C64::new(1.0, 0.0);

        let mut static_channels = Vec::new();
        if gamma > 0.0 {
            static_channels.push((gamma, lowering.clone()));
            if dim == 3 {
                let mut lower_y: Array2<C64> = Array2::zeros((dim, dim));
                lower_y[(0, 2)] = C64::new(1.0, 0.0);
                static_channels.push((gamma, lower_y));
            }
        }
        if gamma_d > 0.0 {
            for level in 1..dim {
                let mut proj: Array2<C64> = Array2::zeros((dim, dim));
                proj[(level, level)] = C64::new(1.0, 0.0);
                static_channels.push((2.0 * gamma_d, proj));
            }
        }

        let phonon = (bath.coupling_alpha_ps2 > 0.0).then_some(*bath);

        Ok(LindbladOps {
            dim,
            delta,
            h0,
            drive_op,
            static_channels,
            phonon,
            lowering,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lowering_op(&self) -> &Array2<C64> {
        &self.lowering
    }

    /// Phonon collapse operators at drive amplitude `omega`: the dressed
    /// lowering/raising operators of the driven {|g⟩, |X⟩} block.
    fn phonon_channels(&self, omega: f64) -> Option<[(f64, Array2<C64>); 2]> {
        let bath = self.phonon.as_ref()?;
        if omega.abs() < 1e-12 {
            return None;
        }
        let rates = phonon_rates(omega, self.delta, bath);
        if rates.gamma_down <= 0.0 && rates.gamma_up <= 0.0 {
            return None;
        }
        let (up, lo) = crate::linalg::dressed_basis(omega, self.delta);
        let mut l_down: Array2<C64> = Array2::zeros((self.dim, self.dim));
        let mut l_up: Array2<C64> = Array2::zeros((self.dim, self.dim));
        for i in 0..2 {
            for j in 0..2 {
                l_down[(i, j)] = C64::new(lo[i] * up[j], 0.0);
                l_up[(i, j)] = C64::new(up[i] * lo[j], 0.0);
            }
        }
        Some([(rates.gamma_down, l_down), (rates.gamma_up, l_up)])
    }

    /// The instantaneous Hamiltonian and complete list of collapse channels
    /// at drive amplitude `omega`.
    pub fn instantaneous_generator(&self, omega: f64) -> (Array2<C64>, Vec<(f64, Array2<C64>)>) {
        let mut h = self.h0.clone();
        h.zip_mut_with(&self.drive_op, |hv, dv| {
            *hv += dv * C64::new(omega / 2.0, 0.0)
        });
        let mut channels = self.static_channels.clone();
        if let Some(ph) = self.phonon_channels(omega) {
            channels.extend(ph);
        }
        (h, channels)
    }

    /// Lindblad right-hand side at time `t` for state (or general operator)
    /// `m`, given the drive shape.
    pub(crate) fn rhs(&self, omega: f64, m: &Array2<C64>) -> Array2<C64> {
        let mut h = self.h0.clone();
        if omega != 0.0 {
            h.zip_mut_with(&self.drive_op, |hv, dv| {
                *hv += dv * C64::new(omega / 2.0, 0.0)
            });
        }
        let minus_i = C64::new(0.0, -1.0);
        let mut dm = (&h.dot(m) - &m.dot(&h)) * minus_i;
        let mut apply = |rate: f64, l: &Array2<C64>| {
            let ld = dagger(l);
            let ldl = ld.dot(l);
            let half_rate = C64::new(0.5 * rate, 0.0);
            let jump = l.dot(m).dot(&ld) * C64::new(rate, 0.0);
            dm += &jump;
            dm -= &(&ldl.dot(m) * half_rate);
            dm -= &(&m.dot(&ldl) * half_rate);
        };
        for (rate, l) in &self.static_channels {
            apply(*rate, l);
        }
        if let Some(channels) = self.phonon_channels(omega) {
            for (rate, l) in &channels {
                apply(*rate, l);
            }
        }
        dm
    }
}

fn check_initial_state(rho0: &Array2<C64>) -> Result<()> {
    if rho0.nrows() != rho0.ncols() {
        return Err(Error::Domain("initial state must be square".into()));
    }
    let tr = trace(rho0);
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::Domain("initial state must have unit trace".into()));
    }
    if hermiticity_defect(rho0) > 1e-10 {
        return Err(Error::Domain("initial state must be Hermitian".into()));
    }
    if min_hermitian_eigenvalue(rho0) < -1e-9 {
        return Err(Error::Domain("initial state must be positive".into()));
    }
    Ok(())
}

/// Integrate the master equation and return the trajectory on the output
/// grid of `opts`.
pub fn evolve(
    h: &DriveHamiltonian,
    qd: &QDParams,
    bath: &PhononBathParams,
    rho0: &Array2<C64>,
    opts: &SolveOptions,
) -> Result<StateTrajectory> {
    check_initial_state(rho0)?;
    let ops = LindbladOps::new(h, qd, bath, rho0.nrows())?;
    let output_times = opts.output_times();
    let mut states: Vec<Array2<C64>> = Vec::with_capacity(output_times.len());
    let mut populations = Vec::with_capacity(output_times.len());
    let shape = &h.shape;
    let diagnostics = crate::ode::integrate_adaptive(
        |t, m| ops.rhs(shape.omega(t), m),
        rho0,
        &output_times,
        &shape.breakpoints(),
        opts.abs_tol,
        |_, _, y| {
            populations.push(excited_population(y));
            states.push(y.clone());
        },
    )?;
    let traj = StateTrajectory {
        times: output_times,
        states,
        populations,
        diagnostics,
        drive_support_end_ps: shape.support_end(),
    };
    // cheap guard; the full positivity check lives in validate()
    if let Some(rho) = traj.states.last() {
        let tr = trace(rho);
        if (tr.re - 1.0).abs() > 1e-7 {
            return Err(Error::Integration(format!(
                "trace drift {:.3e} at end of integration",
                tr.re - 1.0
            )));
        }
    }
    Ok(traj)
}

/// Propagate a general (not necessarily Hermitian) operator under the same
/// generator; used by the quantum-regression evaluation.
pub(crate) fn propagate_operator<G>(
    ops: &LindbladOps,
    shape: &DriveShape,
    m0: &Array2<C64>,
    output_times: &[f64],
    abs_tol: f64,
    on_output: G,
) -> Result<SolverDiagnostics>
where
    G: FnMut(usize, f64, &Array2<C64>),
{
    crate::ode::integrate_adaptive(
        |t, m| ops.rhs(shape.omega(t), m),
        m0,
        output_times,
        &shape.breakpoints(),
        abs_tol,
        on_output,
    )
}

/// Excited-state occupation at the final grid time.
pub fn occupation_at_end(traj: &StateTrajectory) -> f64 {
    *traj.populations.last().expect("non-empty trajectory")
}

/// Expected photon number with a truncation warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionEstimate {
    /// γ·∫⟨e|ρ|e⟩dt plus the analytic tail of the final occupation.
    pub expected_photons: f64,
    /// Set when the integration window ends before the drive does.
    pub window_warning: bool,
}

/// Expected photon number γ·∫p_e dt over the trajectory, completed with the
/// analytic exponential tail of the final occupation.
pub fn emission_probability(traj: &StateTrajectory, gamma: f64) -> EmissionEstimate {
    let mut integral = 0.0;
    for i in 1..traj.times.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        integral += 0.5 * (traj.populations[i] + traj.populations[i - 1]) * dt;
    }
    let tail = *traj.populations.last().unwrap_or(&0.0);
    EmissionEstimate {
        expected_photons: gamma * integral + tail,
        window_warning: traj.times.last().copied().unwrap_or(f64::INFINITY)
            < traj.drive_support_end_ps,
    }
}

/// Excitation scheme selector. `Resonant` is exactly the phonon-assisted
/// path at zero detuning, so the resonant limit is recovered through the
/// identical configuration path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExcitationScheme {
    Resonant,
    PhononAssisted { delta_per_ps: f64 },
}

impl ExcitationScheme {
    pub fn delta_per_ps(&self) -> f64 {
        match self {
            ExcitationScheme::Resonant => 0.0,
            ExcitationScheme::PhononAssisted { delta_per_ps } => *delta_per_ps,
        }
    }
}

/// One point of an excitation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationPoint {
    pub area_rad: f64,
    /// Occupation at the end of the pulse window.
    pub occupation: f64,
    pub emission: EmissionEstimate,
}

/// Occupation and emission versus pulse area for a Gaussian pulse of the
/// given FWHM, over a `[0, 6·fwhm]` window starting from the ground state.
pub fn excitation_scan(
    areas_rad: &[f64],
    scheme: ExcitationScheme,
    qd: &QDParams,
    bath: &PhononBathParams,
    fwhm_ps: f64,
) -> Result<Vec<ExcitationPoint>> {
    use rayon::prelude::*;
    if areas_rad.is_empty() {
        return Err(Error::Domain("area list must be non-empty".into()));
    }
    if areas_rad.iter().any(|&a| a < 0.0) {
        return Err(Error::Domain("areas must be non-negative".into()));
    }
    let delta = scheme.delta_per_ps();
    areas_rad
        .par_iter()
        .map(|&area| {
            let h = DriveHamiltonian::gaussian(delta, fwhm_ps, area);
            let opts = SolveOptions::pulse_window(fwhm_ps);
            let traj = evolve(&h, qd, bath, &ground_state(2), &opts)?;
            Ok(ExcitationPoint {
                area_rad: area,
                occupation: occupation_at_end(&traj),
                emission: emission_probability(&traj, qd.radiative_rate_per_ps),
            })
        })
        .collect()
}

/// Occupation versus pulse area, as (area, occupation) pairs.
pub fn excitation_curve(
    areas_rad: &[f64],
    scheme: ExcitationScheme,
    qd: &QDParams,
    bath: &PhononBathParams,
    fwhm_ps: f64,
) -> Result<Vec<(f64, f64)>> {
    Ok(excitation_scan(areas_rad, scheme, qd, bath, fwhm_ps)?
        .into_iter()
        .map(|p| (p.area_rad, p.occupation))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use std::f64::consts::PI;

    fn lossless_qd() -> QDParams {
        let mut qd = SystemParams::sample_a().qd;
        qd.radiative_rate_per_ps = 0.0;
        qd.pure_dephasing_rate_per_ps = 0.0;
        qd
    }

    fn no_bath() -> PhononBathParams {
        PhononBathParams {
            coupling_alpha_ps2: 0.0,
            cutoff_per_ps: 1.5,
            temperature_k: 7.0,
        }
    }

    #[test]
    fn phonon_rates_vanish_without_drive() {
        let bath = SystemParams::sample_a().bath;
        let r = phonon_rates(0.0, 1.3, &bath);
        assert_eq!(r.gamma_down, 0.0);
        assert_eq!(r.gamma_up, 0.0);
        let r = phonon_rates(0.0, 0.0, &bath);
        assert_eq!((r.gamma_down, r.gamma_up, r.lambda_gen), (0.0, 0.0, 0.0));
    }

    #[test]
    fn phonon_rates_zero_temperature_limit() {
        let mut bath = SystemParams::sample_a().bath;
        bath.temperature_k = 1e-6;
        let (omega, delta) = (1.0, 1.3);
        let r = phonon_rates(omega, delta, &bath);
        let lambda = (omega * omega + delta * delta) as f64;
        let lambda = lambda.sqrt();
        let expected = FRAC_PI_2 * (omega / lambda).powi(2) * bath.spectral_density(lambda);
        assert!(r.gamma_up < 1e-30);
        assert!((r.gamma_down - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn phonon_rates_detailed_balance() {
        let bath = SystemParams::sample_b().bath;
        for (omega, delta) in [(0.5, 1.3), (2.0, 0.0), (1.0, -0.8)] {
            let r = phonon_rates(omega, delta, &bath);
            let x = crate::consts::angular_to_mev(r.lambda_gen)
                / (crate::consts::KB_MEV_PER_K * bath.temperature_k);
            let ratio = r.gamma_up / r.gamma_down;
            assert!(
                (ratio - (-x).exp()).abs() < 1e-12,
                "detailed balance violated: {ratio} vs {}",
                (-x).exp()
            );
        }
    }

    #[test]
    fn free_decay_is_exponential() {
        let qd = SystemParams::sample_a().qd;
        let gamma = qd.radiative_rate_per_ps;
        let h = DriveHamiltonian::new(0.0, DriveShape::Zero);
        let t_end = 5.0 / gamma;
        let mut opts = SolveOptions::new(0.0, t_end);
        opts.dt_out = t_end / 200.0;
        let traj = evolve(&h, &qd, &no_bath(), &excited_state(2), &opts).unwrap();
        for (t, p) in traj.times.iter().zip(&traj.populations) {
            assert!((p - (-gamma * t).exp()).abs() < 1e-6, "t={t} p={p}");
        }
        // occupation at 5 lifetimes is e^-5
        assert!((occupation_at_end(&traj) - (-5.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn resonant_pi_pulse_inverts() {
        let qd = lossless_qd();
        let h = DriveHamiltonian::gaussian(0.0, 8.0, PI);
        let opts = SolveOptions::pulse_window(8.0);
        let traj = evolve(&h, &qd, &no_bath(), &ground_state(2), &opts).unwrap();
        assert!((occupation_at_end(&traj) - 1.0).abs() < 1e-6);
        traj.validate().unwrap();
    }

    #[test]
    fn rabi_curve_examples() {
        let qd = lossless_qd();
        let areas = [PI, 2.0 * PI, 3.0 * PI];
        let curve =
            excitation_curve(&areas, ExcitationScheme::Resonant, &qd, &no_bath(), 8.0).unwrap();
        assert!((curve[0].1 - 1.0).abs() < 1e-6);
        assert!(curve[1].1 < 1e-3);
        assert!((curve[2].1 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn emission_of_pi_pulse_is_one_photon() {
        let mut qd = SystemParams::sample_a().qd;
        qd.pure_dephasing_rate_per_ps = 0.0;
        let gamma = qd.radiative_rate_per_ps;
        let h = DriveHamiltonian::gaussian(0.0, 2.0, PI);
        let opts = SolveOptions::emission_window(2.0, gamma, 8.0);
        let traj = evolve(&h, &qd, &no_bath(), &ground_state(2), &opts).unwrap();
        let e = emission_probability(&traj, gamma);
        assert!(!e.window_warning);
        assert!((e.expected_photons - 1.0).abs() < 5e-3, "{}", e.expected_photons);
    }

    #[test]
    fn no_drive_no_emission() {
        let qd = SystemParams::sample_a().qd;
        let h = DriveHamiltonian::new(0.0, DriveShape::Zero);
        let opts = SolveOptions::new(0.0, 50.0);
        let traj = evolve(&h, &qd, &no_bath(), &ground_state(2), &opts).unwrap();
        let e = emission_probability(&traj, qd.radiative_rate_per_ps);
        assert!(e.expected_photons.abs() < 1e-12);
    }

    #[test]
    fn long_pulse_reexcitation_raises_emission() {
        let qd = SystemParams::sample_b().qd;
        let gamma = qd.radiative_rate_per_ps;
        let bath = no_bath();
        let short = {
            let h = DriveHamiltonian::gaussian(0.0, 2.0, PI);
            let traj = evolve(
                &h,
                &qd,
                &bath,
                &ground_state(2),
                &SolveOptions::emission_window(2.0, gamma, 8.0),
            )
            .unwrap();
            emission_probability(&traj, gamma).expected_photons
        };
        let long = {
            let h = DriveHamiltonian::gaussian(0.0, 25.0, PI);
            let traj = evolve(
                &h,
                &qd,
                &bath,
                &ground_state(2),
                &SolveOptions::emission_window(25.0, gamma, 8.0),
            )
            .unwrap();
            emission_probability(&traj, gamma).expected_photons
        };
        assert!(
            long > short,
            "re-excitation should raise emission: {long} vs {short}"
        );
    }

    #[test]
    fn window_warning_when_pulse_is_cut() {
        let qd = SystemParams::sample_a().qd;
        let h = DriveHamiltonian::gaussian(0.0, 16.0, PI);
        // window ends mid-pulse
        let opts = SolveOptions::new(0.0, 40.0);
        let traj = evolve(&h, &qd, &no_bath(), &ground_state(2), &opts).unwrap();
        assert!(emission_probability(&traj, qd.radiative_rate_per_ps).window_warning);
    }

    #[test]
    fn phonon_scheme_inverts_when_blue_detuned() {
        // cold bath, blue detuning: phonon emission pumps the exciton
        let mut qd = SystemParams::sample_b().qd;
        qd.pure_dephasing_rate_per_ps = 0.0;
        qd.radiative_rate_per_ps = 0.0;
        let mut bath = SystemParams::sample_b().bath;
        bath.temperature_k = 2.0;
        bath.coupling_alpha_ps2 = 0.10;
        let delta = crate::consts::mev_to_angular(0.87);
        let h = DriveHamiltonian::gaussian(delta, 16.0, 10.0 * PI);
        let opts = SolveOptions::pulse_window(16.0);
        let traj = evolve(&h, &qd, &bath, &ground_state(2), &opts).unwrap();
        let occ = occupation_at_end(&traj);
        assert!(occ > 0.7, "blue-detuned phonon-assisted occupation = {occ}");

        // red detuning must not invert at low temperature
        let h_red = DriveHamiltonian::gaussian(-delta, 16.0, 10.0 * PI);
        let traj_red = evolve(&h_red, &qd, &bath, &ground_state(2), &opts).unwrap();
        assert!(
            occupation_at_end(&traj_red) < 0.3,
            "red-detuned occupation = {}",
            occupation_at_end(&traj_red)
        );
    }

    #[test]
    fn resonant_limit_recovered_when_alpha_zero() {
        let qd = lossless_qd();
        let bath = no_bath();
        let areas: Vec<f64> = (0..8).map(|i| i as f64 * 0.5).collect();
        let resonant =
            excitation_curve(&areas, ExcitationScheme::Resonant, &qd, &bath, 10.0).unwrap();
        let phonon_zero = excitation_curve(
            &areas,
            ExcitationScheme::PhononAssisted { delta_per_ps: 0.0 },
            &qd,
            &bath,
            10.0,
        )
        .unwrap();
        // identical configuration path -> bitwise identical results
        for (a, b) in resonant.iter().zip(&phonon_zero) {
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
    }

    #[test]
    fn three_level_fss_beat_in_coherence() {
        // superposition of X and Y precesses at the fine-structure splitting
        let qd = lossless_qd();
        let bath = no_bath();
        let h = DriveHamiltonian::new(0.0, DriveShape::Zero);
        let mut rho0: Array2<C64> = Array2::zeros((3, 3));
        rho0[(1, 1)] = C64::new(0.5, 0.0);
        rho0[(2, 2)] = C64::new(0.5, 0.0);
        rho0[(1, 2)] = C64::new(0.5, 0.0);
        rho0[(2, 1)] = C64::new(0.5, 0.0);
        let mut opts = SolveOptions::new(0.0, 100.0);
        opts.dt_out = 0.5;
        let traj = evolve(&h, &qd, &bath, &rho0, &opts).unwrap();
        traj.validate().unwrap();
        let fss = uev_to_angular(qd.fss_uev);
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            // |Y> lies below |X>, so rho_XY rotates as exp(-i*fss*t)
            let expect = C64::new(0.0, -fss * t).exp() * 0.5;
            let got = rho[(1, 2)];
            assert!(
                (got - expect).norm() < 1e-7,
                "t={t}: got {got}, want {expect}"
            );
        }
    }

    #[test]
    fn rejects_bad_initial_state() {
        let qd = SystemParams::sample_a().qd;
        let bath = no_bath();
        let h = DriveHamiltonian::new(0.0, DriveShape::Zero);
        let opts = SolveOptions::new(0.0, 1.0);
        let mut bad = ground_state(2);
        bad[(0, 0)] = C64::new(2.0, 0.0);
        assert!(evolve(&h, &qd, &bath, &bad, &opts).is_err());
        let mut non_herm = ground_state(2);
        non_herm[(0, 1)] = C64::new(0.5, 0.0);
        assert!(evolve(&h, &qd, &bath, &non_herm, &opts).is_err());
    }

    #[test]
    fn piecewise_constant_drive_flips_like_rabi() {
        // constant resonant drive for exactly a pi rotation
        let qd = lossless_qd();
        let bath = no_bath();
        let omega = 0.5;
        let t_pi = PI / omega;
        let h = DriveHamiltonian::new(
            0.0,
            DriveShape::PiecewiseConstant {
                edges: vec![0.0, t_pi],
                omegas: vec![omega],
            },
        );
        let mut opts = SolveOptions::new(0.0, t_pi);
        opts.dt_out = t_pi / 64.0;
        let traj = evolve(&h, &qd, &bath, &ground_state(2), &opts).unwrap();
        assert!((occupation_at_end(&traj) - 1.0).abs() < 1e-8);
    }
}
