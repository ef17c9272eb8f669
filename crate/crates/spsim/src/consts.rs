//! Physical constants and unit conversions.
//!
//! Internal unit system: time in ps, angular frequency in rad/ps, ħ = 1.
//! Energies cross the API boundary in meV or µeV, wavelengths in nm.

/// ħ in meV·ps.
pub const HBAR_MEV_PS: f64 = 0.658_211_956_9;

/// hc in eV·nm.
pub const HC_EV_NM: f64 = 1_239.841_984_3;

/// Speed of light in nm/ps.
pub const C_NM_PER_PS: f64 = 299_792.458;

/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: f64 = 8.617_333_262e-2;

/// Energy in meV to angular frequency in rad/ps.
pub fn mev_to_angular(e_mev: f64) -> f64 {
    e_mev / HBAR_MEV_PS
}

/// Angular frequency in rad/ps to energy in meV.
pub fn angular_to_mev(omega: f64) -> f64 {
    omega * HBAR_MEV_PS
}

/// Energy in µeV to angular frequency in rad/ps.
pub fn uev_to_angular(e_uev: f64) -> f64 {
    mev_to_angular(e_uev * 1e-3)
}

/// Angular frequency in rad/ps to energy in µeV.
pub fn angular_to_uev(omega: f64) -> f64 {
    angular_to_mev(omega) * 1e3
}

/// Mean thermal occupation of a bosonic mode at `omega` (rad/ps) and
/// temperature `t_kelvin`.
pub fn bose_occupation(omega: f64, t_kelvin: f64) -> f64 {
    if omega <= 0.0 || t_kelvin <= 0.0 {
        return 0.0;
    }
    let x = angular_to_mev(omega) / (KB_MEV_PER_K * t_kelvin);
    1.0 / (x.exp() - 1.0)
}
