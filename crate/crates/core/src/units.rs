//! Unit conversions and physical constants.
//!
//! Everything inside the crate is SI and linear; dB and dBm only appear at
//! the edges (scenario files, CLI, CSV).

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reference wavelength for dispersion conversion and photon energy, m.
pub const REFERENCE_WAVELENGTH: f64 = 1550e-9;

/// `10·log10(x)`.
#[inline]
pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Inverse of [`db`].
#[inline]
pub fn from_db(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

#[inline]
pub fn dbm_to_watt(p_dbm: f64) -> f64 {
    1e-3 * from_db(p_dbm)
}

#[inline]
pub fn watt_to_dbm(p_w: f64) -> f64 {
    db(p_w * 1e3)
}

/// Carrier frequency at the reference wavelength, Hz.
pub fn reference_frequency() -> f64 {
    SPEED_OF_LIGHT / REFERENCE_WAVELENGTH
}

/// Photon energy at the reference wavelength, J.
pub fn photon_energy() -> f64 {
    PLANCK * reference_frequency()
}

/// Attenuation in dB/km to a power attenuation coefficient in 1/m.
#[inline]
pub fn alpha_db_km_to_linear(alpha_db_km: f64) -> f64 {
    alpha_db_km * std::f64::consts::LN_10 / 10.0 / 1e3
}

/// Dispersion parameter D in ps/(nm·km) to β2 in s²/m at the reference wavelength.
pub fn dispersion_to_beta2(d_ps_nm_km: f64) -> f64 {
    let d_si = d_ps_nm_km * 1e-6; // s/m²
    -d_si * REFERENCE_WAVELENGTH * REFERENCE_WAVELENGTH / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT)
}

/// ASE power per amplifier in `bandwidth_hz`, both polarizations, high-gain
/// approximation `n_sp = NF/2`: `2·n_sp·h·ν·(G−1)·B`.
pub fn ase_power(gain_db: f64, noise_figure_db: f64, bandwidth_hz: f64) -> f64 {
    let n_sp = from_db(noise_figure_db) / 2.0;
    2.0 * n_sp * photon_energy() * (from_db(gain_db) - 1.0) * bandwidth_hz
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn db_round_trip() {
        for x in [1e-9, 0.3, 1.0, 42.0, 1e7] {
            assert_relative_eq!(from_db(db(x)), x, max_relative = 1e-12);
        }
        assert_relative_eq!(dbm_to_watt(0.0), 1e-3);
        assert_relative_eq!(watt_to_dbm(1.0), 30.0);
    }

    #[test]
    fn reference_ase_power() {
        // 80 km at 0.2 dB/km, NF 4 dB, 32 GHz reference bandwidth.
        let p = ase_power(16.0, 4.0, 32e9);
        assert!((p - 4.0e-7).abs() < 0.05e-7, "{p}");
        assert!((watt_to_dbm(p) + 34.0).abs() < 0.1);
    }

    #[test]
    fn beta2_of_ssmf() {
        // D = 17 ps/nm/km gives about -21.7 ps²/km.
        let b2 = dispersion_to_beta2(17.0) * 1e24 * 1e3;
        assert!((b2 + 21.68).abs() < 0.01, "{b2}");
    }
}
