//! Drive envelopes Ω(t) and the mapping from incident power to intra-cavity
//! pulse area.
//!
//! Two pulse families are provided: quasi-Gaussian pulses and pulses whose
//! *spectrum* is a top hat (the output of a slit-based 4f shaping line),
//! which gives a sinc-like temporal profile with side lobes. Envelopes are
//! real and non-negative at the peak (chirp-free); the carrier detuning is
//! carried separately as metadata.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};

/// Default sampling step for pulse grids, ps.
pub const DEFAULT_DT_PS: f64 = 0.05;

/// Sampled drive envelope Ω(t).
///
/// Invariants: strictly increasing time grid, finite amplitudes, and
/// amplitude below 1e-6 of the peak at both grid ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    /// Sample times, ps.
    pub times: Vec<f64>,
    /// Drive amplitude Ω(t) at the sample times, rad/ps.
    pub amplitude: Vec<f64>,
    /// Laser detuning from the transition, rad/ps (positive = blue).
    pub detuning_per_ps: f64,
    /// Nominal FWHM of the temporal intensity profile, ps.
    pub fwhm_ps: f64,
}

impl PulseEnvelope {
    /// Pulse area ∫Ω(t)dt by trapezoidal quadrature, rad.
    pub fn area(&self) -> f64 {
        trapezoid(&self.times, &self.amplitude)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitude.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }

    /// Linear interpolation of the envelope; zero outside the grid.
    pub fn omega_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] {
            return 0.0;
        }
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => self.amplitude[i],
            Err(i) => {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let (a0, a1) = (self.amplitude[i - 1], self.amplitude[i]);
                a0 + (a1 - a0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// FWHM of the sampled amplitude, measured by half-maximum crossings.
    pub fn measured_fwhm(&self) -> f64 {
        let half = self.max_amplitude() / 2.0;
        if half == 0.0 {
            return 0.0;
        }
        let mut first = None;
        let mut last = None;
        for i in 1..self.times.len() {
            let (a0, a1) = (self.amplitude[i - 1], self.amplitude[i]);
            if (a0 < half) != (a1 < half) {
                let f = (half - a0) / (a1 - a0);
                let t = self.times[i - 1] + f * (self.times[i] - self.times[i - 1]);
                if first.is_none() {
                    first = Some(t);
                }
                last = Some(t);
            }
        }
        match (first, last) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Check the type invariants.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.amplitude.len() || self.times.len() < 2 {
            return Err(Error::Domain("envelope grid too short".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("time grid must be strictly increasing".into()));
        }
        if self.amplitude.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("amplitude values must be finite".into()));
        }
        let peak = self.max_amplitude();
        if peak > 0.0 {
            let (a, b) = (self.amplitude[0].abs(), self.amplitude[self.amplitude.len() - 1].abs());
            if a >= 1e-6 * peak || b >= 1e-6 * peak {
                return Err(Error::Domain(
                    "envelope does not vanish at the grid ends".into(),
                ));
            }
        }
        Ok(())
    }

    /// Two-column CSV export (time_ps, omega_per_ps).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time_ps,omega_per_ps")?;
        for (t, a) in self.times.iter().zip(&self.amplitude) {
            writeln!(w, "{t},{a}")?;
        }
        Ok(())
    }
}

/// Quasi-Gaussian pulse of the given FWHM and area, centered on the grid.
///
/// The sampled envelope is rescaled so that the trapezoidal area matches
/// `area_rad` exactly. `grid_span_ps` must cover at least 6 FWHM so the
/// truncated tails stay below the envelope-end invariant.
pub fn make_gaussian_pulse(
    fwhm_ps: f64,
    area_rad: f64,
    detuning_per_ps: f64,
    grid_span_ps: f64,
) -> Result<PulseEnvelope> {
    make_gaussian_pulse_with_dt(fwhm_ps, area_rad, detuning_per_ps, grid_span_ps, DEFAULT_DT_PS)
}

pub fn make_gaussian_pulse_with_dt(
    fwhm_ps: f64,
    area_rad: f64,
    detuning_per_ps: f64,
    grid_span_ps: f64,
    dt_ps: f64,
) -> Result<PulseEnvelope> {
    if fwhm_ps <= 0.0 {
        return Err(Error::Domain("pulse FWHM must be > 0".into()));
    }
    if grid_span_ps < 6.0 * fwhm_ps {
        return Err(Error::Domain(format!(
            "grid span {grid_span_ps} ps truncates a {fwhm_ps} ps pulse; need >= 6 FWHM"
        )));
    }
    if dt_ps <= 0.0 || dt_ps > fwhm_ps / 4.0 {
        return Err(Error::Domain("dt must resolve the pulse (dt <= FWHM/4)".into()));
    }
    let n = (grid_span_ps / dt_ps).round() as usize + 1;
    let t0 = grid_span_ps / 2.0;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * dt_ps).collect();
    let mut amplitude: Vec<f64> = times
        .iter()
        .map(|&t| gaussian_amplitude(t - t0, fwhm_ps))
        .collect();
    normalize_area(&times, &mut amplitude, area_rad);
    let env = PulseEnvelope {
        times,
        amplitude,
        detuning_per_ps,
        fwhm_ps,
    };
    env.validate()?;
    Ok(env)
}

/// Unit-peak Gaussian whose amplitude FWHM is `fwhm`.
pub(crate) fn gaussian_amplitude(t: f64, fwhm: f64) -> f64 {
    let x = t / fwhm;
    (-4.0 * std::f64::consts::LN_2 * x * x).exp()
}

/// Pulse whose spectrum is a top hat of full width `spectral_fwhm_per_ps`
/// (rad/ps), apodized with a 5% cosine edge roll-off; the temporal profile
/// is the transform of that spectrum (sinc-like main lobe with side lobes).
///
/// A cosine taper over the outer 10% of the time grid forces the slowly
/// decaying sinc tails to zero at the grid ends; the interior side-lobe
/// structure is untouched. The area is normalized to `area_rad`.
pub fn make_tophat_spectrum_pulse(
    spectral_fwhm_per_ps: f64,
    area_rad: f64,
    detuning_per_ps: f64,
    grid_span_ps: f64,
) -> Result<PulseEnvelope> {
    make_tophat_spectrum_pulse_with_dt(
        spectral_fwhm_per_ps,
        area_rad,
        detuning_per_ps,
        grid_span_ps,
        DEFAULT_DT_PS,
    )
}

pub fn make_tophat_spectrum_pulse_with_dt(
    spectral_fwhm_per_ps: f64,
    area_rad: f64,
    detuning_per_ps: f64,
    grid_span_ps: f64,
    dt_ps: f64,
) -> Result<PulseEnvelope> {
    if spectral_fwhm_per_ps <= 0.0 {
        return Err(Error::Domain("spectral FWHM must be > 0".into()));
    }
    if dt_ps <= 0.0 {
        return Err(Error::Domain("dt must be > 0".into()));
    }
    let w = spectral_fwhm_per_ps;
    // The grid must resolve at least the main lobe and first side lobes.
    if w * grid_span_ps < 8.0 * PI {
        return Err(Error::Domain(format!(
            "spectral FWHM {w} rad/ps is below the resolution of a {grid_span_ps} ps grid"
        )));
    }
    // Nyquist: the time step must resolve the spectral support.
    if dt_ps * w > 1.0 {
        return Err(Error::Domain("dt too coarse for the requested spectral width".into()));
    }
    let roll = 0.05 * w;
    let omega_max = w / 2.0 + roll / 2.0;
    let n_omega = 2001usize;
    let d_omega = omega_max / (n_omega - 1) as f64;

    let n = (grid_span_ps / dt_ps).round() as usize + 1;
    let t0 = grid_span_ps / 2.0;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * dt_ps).collect();
    let mut amplitude: Vec<f64> = times
        .iter()
        .map(|&t| {
            let tau = t - t0;
            // cosine transform of the even, real spectrum (trapezoid in omega)
            let mut acc = 0.0;
            for k in 0..n_omega {
                let om = k as f64 * d_omega;
                let s = tophat_spectrum(om, w, roll);
                let weight = if k == 0 || k == n_omega - 1 { 0.5 } else { 1.0 };
                acc += weight * s * (om * tau).cos();
            }
            acc * d_omega
        })
        .collect();

    // taper the outer 10% of the grid so the sinc tails reach zero
    let taper = 0.10 * grid_span_ps;
    for (t, a) in times.iter().zip(amplitude.iter_mut()) {
        let edge = t.min(grid_span_ps - t);
        if edge < taper {
            *a *= 0.5 * (1.0 - (PI * edge / taper).cos());
        }
    }
    normalize_area(&times, &mut amplitude, area_rad);

    let mut env = PulseEnvelope {
        times,
        amplitude,
        detuning_per_ps,
        fwhm_ps: 0.0,
    };
    env.fwhm_ps = env.measured_fwhm();
    env.validate()?;
    Ok(env)
}

/// Top-hat spectral density with a cosine roll-off of width `roll` centered
/// on the half-maximum edges, so the spectral FWHM equals `width` exactly.
fn tophat_spectrum(omega: f64, width: f64, roll: f64) -> f64 {
    let x = omega.abs();
    let inner = width / 2.0 - roll / 2.0;
    let outer = width / 2.0 + roll / 2.0;
    if x <= inner {
        1.0
    } else if x >= outer {
        0.0
    } else {
        0.5 * (1.0 + (PI * (x - inner) / roll).cos())
    }
}

/// Lorentzian cavity transmission T(δ) = 1 / (1 + (2δ/κ)²).
///
/// `detuning` and `kappa` must share units (for instance µeV).
pub fn cavity_transmission(detuning: f64, kappa: f64) -> Result<f64> {
    if kappa <= 0.0 {
        return Err(Error::Domain("cavity linewidth must be > 0".into()));
    }
    let x = 2.0 * detuning / kappa;
    Ok(1.0 / (1.0 + x * x))
}

/// Intra-cavity pulse area from the incident power: k·sqrt(P·T(δ)).
///
/// `k_calib` is the single power-to-area calibration constant shared across
/// detunings.
pub fn intracavity_area(
    input_power: f64,
    detuning: f64,
    kappa: f64,
    k_calib: f64,
) -> Result<f64> {
    if input_power < 0.0 {
        return Err(Error::Domain("input power must be >= 0".into()));
    }
    Ok(k_calib * (input_power * cavity_transmission(detuning, kappa)?).sqrt())
}

/// Incident power needed to reach a given intra-cavity area at a detuning.
pub fn input_power_for_area(area: f64, detuning: f64, kappa: f64, k_calib: f64) -> Result<f64> {
    if k_calib <= 0.0 {
        return Err(Error::Domain("calibration constant must be > 0".into()));
    }
    let t = cavity_transmission(detuning, kappa)?;
    Ok((area / k_calib).powi(2) / t)
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| 0.5 * (yw[0] + yw[1]) * (tw[1] - tw[0]))
        .sum()
}

fn normalize_area(times: &[f64], amplitude: &mut [f64], area: f64) {
    let raw = trapezoid(times, amplitude);
    if area == 0.0 || raw.abs() < 1e-300 {
        amplitude.iter_mut().for_each(|a| *a = 0.0);
        return;
    }
    let scale = area / raw;
    amplitude.iter_mut().for_each(|a| *a *= scale);
}
