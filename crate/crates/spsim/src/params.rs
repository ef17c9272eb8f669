//! Physical parameters of the source and the unit conversions shared by
//! every other module.
//!
//! Value types are immutable after construction and cheap to copy; they can
//! be shared freely across concurrent sweep tasks.

use crate::consts::{C_NM_PER_PS, HC_EV_NM};
use crate::error::{Error, Result};

/// Quantum-dot transition parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDParams {
    /// Transition wavelength λ0 in nm.
    pub transition_wavelength_nm: f64,
    /// Fine structure splitting between the X and Y exciton states, µeV.
    pub fss_uev: f64,
    /// Radiative decay rate γ in 1/ps (Purcell-enhanced).
    pub radiative_rate_per_ps: f64,
    /// Pure-dephasing contribution to the coherence decay rate, 1/ps.
    /// The total off-diagonal decay is γ/2 + γ_d, so the ideal two-level
    /// indistinguishability is γ/(γ + 2γ_d).
    pub pure_dephasing_rate_per_ps: f64,
    /// Angle of the X dipole axis relative to the lab frame, rad.
    pub dipole_angle_offset_rad: f64,
}

/// Micropillar cavity parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Cavity linewidth κ in µeV.
    pub linewidth_uev: f64,
    /// Splitting between the two linearly polarized cavity modes, µeV.
    pub mode_splitting_uev: f64,
    /// Probability that an emitted photon leaves through the top mirror.
    pub extraction_efficiency: f64,
}

/// Super-Ohmic phonon bath with Gaussian cutoff,
/// J(ω) = α ω³ exp(−ω²/ω_b²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononBathParams {
    /// Deformation-potential coupling α in ps².
    pub coupling_alpha_ps2: f64,
    /// Cutoff frequency ω_b in rad/ps.
    pub cutoff_per_ps: f64,
    /// Lattice temperature in K.
    pub temperature_k: f64,
}

/// Excitation laser parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserParams {
    /// Laser detuning from the transition in nm; positive = blue-detuned.
    pub detuning_nm: f64,
    /// Pulse FWHM duration in ps.
    pub pulse_fwhm_ps: f64,
    /// Repetition rate in MHz.
    pub repetition_rate_mhz: f64,
    /// Pulse area in units of π.
    pub pulse_area_pi: f64,
}

/// Everything the solver and the sweep runner need, bundled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub qd: QDParams,
    pub cavity: CavityParams,
    pub bath: PhononBathParams,
    pub laser: LaserParams,
}

impl QDParams {
    pub fn validate(&self) -> Result<()> {
        if self.transition_wavelength_nm <= 0.0 {
            return Err(Error::Domain("transition wavelength must be > 0".into()));
        }
        if self.fss_uev < 0.0 {
            return Err(Error::Domain("fss must be >= 0".into()));
        }
        if self.radiative_rate_per_ps < 0.0 || self.pure_dephasing_rate_per_ps < 0.0 {
            return Err(Error::Domain("rates must be >= 0".into()));
        }
        Ok(())
    }

    /// Radiative lifetime T1 = 1/γ in ps.
    pub fn lifetime_ps(&self) -> f64 {
        1.0 / self.radiative_rate_per_ps
    }
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if self.linewidth_uev <= 0.0 {
            return Err(Error::Domain("cavity linewidth must be > 0".into()));
        }
        if self.mode_splitting_uev < 0.0 {
            return Err(Error::Domain("mode splitting must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.extraction_efficiency) {
            return Err(Error::Domain("extraction efficiency must be in [0, 1]".into()));
        }
        Ok(())
    }
}

impl PhononBathParams {
    pub fn validate(&self) -> Result<()> {
        if self.coupling_alpha_ps2 < 0.0 {
            return Err(Error::Domain("phonon coupling alpha must be >= 0".into()));
        }
        if self.cutoff_per_ps <= 0.0 {
            return Err(Error::Domain("phonon cutoff must be > 0".into()));
        }
        if self.temperature_k <= 0.0 {
            return Err(Error::Domain("bath temperature must be > 0".into()));
        }
        Ok(())
    }

    /// Spectral density J(ω) = α ω³ exp(−ω²/ω_b²), in 1/ps for ω in rad/ps.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.coupling_alpha_ps2 * omega.powi(3) * (-(omega / self.cutoff_per_ps).powi(2)).exp()
    }
}

impl LaserParams {
    pub fn validate(&self) -> Result<()> {
        if self.pulse_fwhm_ps <= 0.0 {
            return Err(Error::Domain("pulse FWHM must be > 0".into()));
        }
        if self.repetition_rate_mhz <= 0.0 {
            return Err(Error::Domain("repetition rate must be > 0".into()));
        }
        Ok(())
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        self.qd.validate()?;
        self.cavity.validate()?;
        self.bath.validate()?;
        self.laser.validate()
    }

    /// Laser detuning from the transition as an angular frequency in rad/ps;
    /// positive for blue detuning.
    pub fn laser_detuning_per_ps(&self) -> Result<f64> {
        let e_mev = wavelength_detuning_to_energy_mev(
            self.laser.detuning_nm,
            self.qd.transition_wavelength_nm,
        )?;
        Ok(crate::consts::mev_to_angular(e_mev))
    }

    /// Sample-A profile: 5 pm emission bandwidth, κ = 300 µeV, 8 K.
    pub fn sample_a() -> Self {
        let lambda0 = 924.8;
        let gamma = gamma_from_linewidth(5e-3, lambda0).expect("preset");
        SystemParams {
            qd: QDParams {
                transition_wavelength_nm: lambda0,
                fss_uev: 10.0,
                radiative_rate_per_ps: gamma,
                pure_dephasing_rate_per_ps: dephasing_for_target_overlap(gamma, 0.92),
                dipole_angle_offset_rad: 0.0,
            },
            cavity: CavityParams {
                linewidth_uev: 300.0,
                mode_splitting_uev: 70.0,
                extraction_efficiency: 0.65,
            },
            bath: PhononBathParams {
                coupling_alpha_ps2: 0.03,
                cutoff_per_ps: crate::consts::mev_to_angular(1.0),
                temperature_k: 8.0,
            },
            laser: LaserParams {
                detuning_nm: 0.6,
                pulse_fwhm_ps: 16.0,
                repetition_rate_mhz: 81.0,
                pulse_area_pi: 10.0,
            },
        }
    }

    /// Sample-B profile: 10 pm emission bandwidth, κ = 150 µeV, 7 K.
    pub fn sample_b() -> Self {
        let lambda0 = 924.8;
        let gamma = gamma_from_linewidth(10e-3, lambda0).expect("preset");
        let mut p = Self::sample_a();
        p.qd.radiative_rate_per_ps = gamma;
        p.qd.pure_dephasing_rate_per_ps = dephasing_for_target_overlap(gamma, 0.92);
        p.cavity.linewidth_uev = 150.0;
        p.cavity.mode_splitting_uev = 30.0;
        p.bath.temperature_k = 7.0;
        p
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::sample_a()
    }
}

/// Convert a wavelength detuning Δλ around λ0 to an energy detuning,
/// E = hc·Δλ/λ0², in meV. Positive Δλ (blue detuning) gives positive energy.
pub fn wavelength_detuning_to_energy_mev(delta_lambda_nm: f64, lambda0_nm: f64) -> Result<f64> {
    if lambda0_nm <= 0.0 {
        return Err(Error::Domain("lambda0 must be > 0".into()));
    }
    Ok(HC_EV_NM * 1e3 * delta_lambda_nm / (lambda0_nm * lambda0_nm))
}

/// Inverse of [`wavelength_detuning_to_energy_mev`].
pub fn energy_to_wavelength_detuning_nm(e_mev: f64, lambda0_nm: f64) -> Result<f64> {
    if lambda0_nm <= 0.0 {
        return Err(Error::Domain("lambda0 must be > 0".into()));
    }
    Ok(e_mev * lambda0_nm * lambda0_nm / (HC_EV_NM * 1e3))
}

/// Radiative rate γ (rad/ps) of a lifetime-limited Lorentzian line of the
/// given wavelength bandwidth (FWHM), γ = 2π·c·Δλ/λ0².
pub fn gamma_from_linewidth(bandwidth_nm: f64, lambda0_nm: f64) -> Result<f64> {
    if bandwidth_nm <= 0.0 || lambda0_nm <= 0.0 {
        return Err(Error::Domain(
            "bandwidth and lambda0 must be > 0".into(),
        ));
    }
    Ok(2.0 * std::f64::consts::PI * C_NM_PER_PS * bandwidth_nm / (lambda0_nm * lambda0_nm))
}

/// Pure-dephasing rate that puts the ideal two-level mean wavepacket overlap
/// γ/(γ + 2γ_d) at `target`.
pub fn dephasing_for_target_overlap(gamma: f64, target: f64) -> f64 {
    assert!(target > 0.0 && target <= 1.0);
    gamma * (1.0 / target - 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn blue_detuning_energy_examples() {
        // 0.6 nm at 924.8 nm is just under 1 meV
        let e = wavelength_detuning_to_energy_mev(0.6, 924.8).unwrap();
        assert!((e - 0.8698).abs() < 2e-4, "got {e}");
        // zero detuning
        assert_eq!(wavelength_detuning_to_energy_mev(0.0, 924.8).unwrap(), 0.0);
        // 0.85 nm
        let e = wavelength_detuning_to_energy_mev(0.85, 924.8).unwrap();
        assert!((e - 1.2322).abs() < 2e-4, "got {e}");
    }

    #[test]
    fn detuning_requires_positive_wavelength() {
        assert!(wavelength_detuning_to_energy_mev(0.6, 0.0).is_err());
        assert!(wavelength_detuning_to_energy_mev(0.6, -1.0).is_err());
        assert!(energy_to_wavelength_detuning_nm(1.0, 0.0).is_err());
    }

    #[test]
    fn gamma_from_linewidth_examples() {
        // 5 pm at 924.8 nm: lifetime about 91 ps
        let g = gamma_from_linewidth(5e-3, 924.8).unwrap();
        assert!((1.0 / g - 90.81).abs() < 0.1, "T1 = {}", 1.0 / g);
        // 10 pm: about 45 ps
        let g = gamma_from_linewidth(10e-3, 924.8).unwrap();
        assert!((1.0 / g - 45.40).abs() < 0.1, "T1 = {}", 1.0 / g);
        // vanishing bandwidth limit
        let g = gamma_from_linewidth(1e-12, 924.8).unwrap();
        assert!(g < 1e-9);
        assert!(gamma_from_linewidth(0.0, 924.8).is_err());
        assert!(gamma_from_linewidth(5e-3, -2.0).is_err());
    }

    #[test]
    fn dephasing_calibration_hits_target() {
        let gamma = 0.011;
        let gd = dephasing_for_target_overlap(gamma, 0.92);
        assert!((gamma / (gamma + 2.0 * gd) - 0.92).abs() < 1e-12);
    }

    #[test]
    fn presets_validate() {
        SystemParams::sample_a().validate().unwrap();
        SystemParams::sample_b().validate().unwrap();
        let d = SystemParams::sample_a().laser_detuning_per_ps().unwrap();
        assert!(d > 0.0, "blue detuning must map to positive delta");
    }

    #[test]
    fn spectral_density_shape() {
        let bath = SystemParams::sample_a().bath;
        assert_eq!(bath.spectral_density(0.0), 0.0);
        assert_eq!(bath.spectral_density(-1.0), 0.0);
        // has a maximum near omega_b * sqrt(3/2)
        let peak = bath.cutoff_per_ps * (1.5f64).sqrt();
        assert!(bath.spectral_density(peak) > bath.spectral_density(peak * 0.5));
        assert!(bath.spectral_density(peak) > bath.spectral_density(peak * 2.0));
    }

    proptest! {
        #[test]
        fn detuning_conversion_is_linear(a in 1e-3f64..1e3, dl in -2.0f64..2.0) {
            let f1 = wavelength_detuning_to_energy_mev(a * dl, 924.8).unwrap();
            let f2 = a * wavelength_detuning_to_energy_mev(dl, 924.8).unwrap();
            prop_assert!((f1 - f2).abs() <= 1e-12 * f1.abs().max(1.0));
        }

        #[test]
        fn detuning_round_trip(dl in -2.0f64..2.0, l0 in 800.0f64..1000.0) {
            let e = wavelength_detuning_to_energy_mev(dl, l0).unwrap();
            let back = energy_to_wavelength_detuning_nm(e, l0).unwrap();
            prop_assert!((back - dl).abs() <= 1e-12 * dl.abs().max(1e-6));
        }
    }
}
