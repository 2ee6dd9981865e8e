//! Nanomagnet array description: per-magnet geometry and material, named
//! parameter sets, validation, and the precomputed dipolar coupling table
//! used by the field evaluation hot loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// mu0 / 4pi in T·m/A.
pub const MU0_OVER_4PI: f64 = 1e-7;
/// Vacuum permeability in T·m/A.
pub const MU0: f64 = 4.0 * std::f64::consts::PI * 1e-7;
/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnetRole {
    Input,
    Readout,
}

/// One cylindrical macrospin: position, geometry, material, role.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NanomagnetSpec {
    /// Center position in meters.
    pub position: Vec3,
    pub diameter_m: f64,
    pub thickness_m: f64,
    /// Saturation magnetization in A/m.
    pub ms_a_per_m: f64,
    /// Uniaxial anisotropy energy density in J/m^3.
    pub ku_j_per_m3: f64,
    /// Easy-axis direction; normalized on validation.
    pub easy_axis: Vec3,
    pub role: MagnetRole,
}

impl NanomagnetSpec {
    pub fn volume_m3(&self) -> f64 {
        std::f64::consts::PI * (self.diameter_m / 2.0).powi(2) * self.thickness_m
    }

    /// Magnetic moment magnitude Ms·V in A·m^2.
    pub fn moment_a_m2(&self) -> f64 {
        self.ms_a_per_m * self.volume_m3()
    }

    /// Anisotropy field magnitude 2Ku/Ms, stored in tesla.
    pub fn anisotropy_field_t(&self) -> f64 {
        2.0 * self.ku_j_per_m3 / self.ms_a_per_m
    }
}

/// Integrator and environment parameters shared by the whole array.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LlgParams {
    /// Gyromagnetic ratio in rad/(s·T).
    pub gamma_rad_per_s_t: f64,
    /// Gilbert damping, dimensionless.
    pub alpha: f64,
    /// Time step in seconds.
    pub dt_s: f64,
    /// Temperature in kelvin; 0 disables the stochastic field.
    pub temperature_k: f64,
}

impl LlgParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_rad_per_s_t > 0.0) {
            return Err(Error::invalid_field("gamma_rad_per_s_t", "must be > 0"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid_field("alpha", "must be >= 0"));
        }
        if !(self.dt_s > 0.0) {
            return Err(Error::invalid_field("dt_s", "must be > 0"));
        }
        if !(self.temperature_k >= 0.0) {
            return Err(Error::invalid_field("temperature_k", "must be >= 0"));
        }
        Ok(())
    }
}

/// A named, documented set of physical defaults. Layout builders take one of
/// these; every field can still be overridden through the config layer.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParameterSet {
    pub name: &'static str,
    pub ms_a_per_m: f64,
    pub ku_j_per_m3: f64,
    pub diameter_m: f64,
    pub thickness_m: f64,
    /// Center-to-center pitch used by grid builders, in meters.
    pub pitch_m: f64,
    pub alpha: f64,
    pub gamma_rad_per_s_t: f64,
    pub dt_s: f64,
    /// Bath temperature for the stochastic field; 0 runs deterministic.
    pub temperature_k: f64,
}

/// Thin perpendicular-anisotropy disc with a hard axis: the anisotropy field
/// (1.25 T) dwarfs the ~0.7 mT dipolar coupling at 70 nm pitch, so each
/// magnet is an isolated bistable bit. Useful for single-magnet physics
/// tests.
pub const DEFAULT_PMA: ParameterSet = ParameterSet {
    name: "default-pma",
    ms_a_per_m: 8.0e5,
    ku_j_per_m3: 5.0e5,
    diameter_m: 50.0e-9,
    thickness_m: 1.5e-9,
    pitch_m: 70.0e-9,
    alpha: 0.05,
    gamma_rad_per_s_t: 1.76e11,
    dt_s: 1.0e-12,
    temperature_k: 0.0,
};

/// Benchmark operating point: thicker discs and a weak effective
/// perpendicular anisotropy put the anisotropy field (~9.3 mT) at about
/// twice the nearest-neighbor dipolar field (~4.6 mT). In that window an
/// aligned side-by-side pair is dynamically unstable while the antiparallel
/// pair is the ground state, so damped relaxation funnels into frustrated
/// checkerboard-like patterns and single-magnet flips can cascade through
/// the array. Both properties are what make the array usable as a reservoir.
/// The damping is set high enough that a flip cascade settles without
/// ringing inside one drive period; at weaker damping the post-pulse
/// precession leaves the cascade outcome sensitive to its launch phase.
pub const COUPLED_PMA: ParameterSet = ParameterSet {
    name: "coupled-pma",
    ms_a_per_m: 8.0e5,
    ku_j_per_m3: 3.7e3,
    diameter_m: 50.0e-9,
    thickness_m: 10.0e-9,
    pitch_m: 70.0e-9,
    alpha: 0.3,
    gamma_rad_per_s_t: 1.76e11,
    dt_s: 5.0e-12,
    temperature_k: 0.0,
};

impl ParameterSet {
    pub fn by_name(name: &str) -> Option<ParameterSet> {
        match name {
            "default-pma" => Some(DEFAULT_PMA),
            "coupled-pma" => Some(COUPLED_PMA),
            _ => None,
        }
    }

    pub fn magnet_at(&self, position: Vec3, role: MagnetRole) -> NanomagnetSpec {
        NanomagnetSpec {
            position,
            diameter_m: self.diameter_m,
            thickness_m: self.thickness_m,
            ms_a_per_m: self.ms_a_per_m,
            ku_j_per_m3: self.ku_j_per_m3,
            easy_axis: Vec3::new(0.0, 0.0, 1.0),
            role,
        }
    }

    pub fn llg_params(&self) -> LlgParams {
        LlgParams {
            gamma_rad_per_s_t: self.gamma_rad_per_s_t,
            alpha: self.alpha,
            dt_s: self.dt_s,
            temperature_k: self.temperature_k,
        }
    }

    /// Nearest-neighbor dipolar field magnitude (mu0/4pi)·Ms·V/pitch^3 in
    /// tesla, for one magnet of this set acting on another at grid pitch.
    pub fn neighbor_dipole_field_t(&self) -> f64 {
        let volume = std::f64::consts::PI * (self.diameter_m / 2.0).powi(2) * self.thickness_m;
        MU0_OVER_4PI * self.ms_a_per_m * volume / self.pitch_m.powi(3)
    }
}

/// Validated array plus derived per-magnet quantities and the pairwise
/// coupling table. Immutable once built; all dynamic state lives in
/// [`SimState`](crate::llg::SimState).
#[derive(Debug, Clone)]
pub struct Array {
    magnets: Vec<NanomagnetSpec>,
    /// Ms·V per magnet, A·m^2.
    moments: Vec<f64>,
    /// 2Ku/Ms per magnet, tesla.
    anis_fields: Vec<f64>,
    easy_axes: Vec<Vec3>,
    /// For each ordered pair (i, j != i): unit vector from j to i and the
    /// scalar (mu0/4pi)·moment_j/r^3, flattened row-major with stride n-1.
    pair_units: Vec<Vec3>,
    pair_coeffs: Vec<f64>,
    pair_others: Vec<u32>,
}

impl Array {
    pub fn new(magnets: Vec<NanomagnetSpec>) -> Result<Array> {
        if magnets.is_empty() {
            return Err(Error::InvalidLayout("array has no magnets".into()));
        }
        for (i, m) in magnets.iter().enumerate() {
            if !m.position.is_finite() {
                return Err(Error::InvalidLayout(format!("magnet {i}: non-finite position")));
            }
            if !(m.diameter_m > 0.0) {
                return Err(Error::InvalidLayout(format!("magnet {i}: diameter must be > 0")));
            }
            if !(m.thickness_m > 0.0) {
                return Err(Error::InvalidLayout(format!("magnet {i}: thickness must be > 0")));
            }
            if !(m.ms_a_per_m > 0.0) {
                return Err(Error::InvalidLayout(format!("magnet {i}: Ms must be > 0")));
            }
            if !(m.ku_j_per_m3 >= 0.0) {
                return Err(Error::InvalidLayout(format!("magnet {i}: Ku must be >= 0")));
            }
            if m.easy_axis.norm() == 0.0 || !m.easy_axis.is_finite() {
                return Err(Error::InvalidLayout(format!("magnet {i}: easy axis must be non-zero")));
            }
        }
        for i in 0..magnets.len() {
            for j in (i + 1)..magnets.len() {
                let dist = (magnets[i].position - magnets[j].position).norm();
                let min_dist = (magnets[i].diameter_m + magnets[j].diameter_m) / 2.0;
                // Touching discs are allowed; interpenetrating ones are not.
                if dist < min_dist * (1.0 - 1e-12) {
                    return Err(Error::InvalidLayout(format!(
                        "magnets {i} and {j} overlap: center distance {dist:.3e} m < {min_dist:.3e} m"
                    )));
                }
            }
        }

        let n = magnets.len();
        let moments: Vec<f64> = magnets.iter().map(|m| m.moment_a_m2()).collect();
        let anis_fields: Vec<f64> = magnets.iter().map(|m| m.anisotropy_field_t()).collect();
        let easy_axes: Vec<Vec3> = magnets.iter().map(|m| m.easy_axis.normalized()).collect();

        let mut pair_units = Vec::with_capacity(n * (n - 1));
        let mut pair_coeffs = Vec::with_capacity(n * (n - 1));
        let mut pair_others = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let r = magnets[i].position - magnets[j].position;
                let dist = r.norm();
                pair_units.push(r / dist);
                pair_coeffs.push(MU0_OVER_4PI * moments[j] / dist.powi(3));
                pair_others.push(j as u32);
            }
        }

        Ok(Array { magnets, moments, anis_fields, easy_axes, pair_units, pair_coeffs, pair_others })
    }

    pub fn len(&self) -> usize {
        self.magnets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnets.is_empty()
    }

    pub fn magnets(&self) -> &[NanomagnetSpec] {
        &self.magnets
    }

    pub fn moment_a_m2(&self, i: usize) -> f64 {
        self.moments[i]
    }

    pub fn anisotropy_field_t(&self, i: usize) -> f64 {
        self.anis_fields[i]
    }

    pub fn easy_axis(&self, i: usize) -> Vec3 {
        self.easy_axes[i]
    }

    /// Ordered-pair coupling entries for magnet `i`: (source index, coeff,
    /// unit vector from source to `i`).
    pub(crate) fn pair_row(&self, i: usize) -> (&[u32], &[f64], &[Vec3]) {
        let n = self.magnets.len();
        let row = i * (n - 1)..(i + 1) * (n - 1);
        (&self.pair_others[row.clone()], &self.pair_coeffs[row.clone()], &self.pair_units[row])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(x_nm: f64, y_nm: f64) -> NanomagnetSpec {
        DEFAULT_PMA.magnet_at(Vec3::new(x_nm * 1e-9, y_nm * 1e-9, 0.0), MagnetRole::Readout)
    }

    #[test]
    fn volume_and_moment_of_default_disc() {
        let m = disc(0.0, 0.0);
        // pi * (25 nm)^2 * 1.5 nm
        let v = std::f64::consts::PI * 625e-18 * 1.5e-9;
        assert!((m.volume_m3() - v).abs() / v < 1e-15);
        assert!((m.moment_a_m2() - 8.0e5 * v).abs() / (8.0e5 * v) < 1e-15);
    }

    #[test]
    fn anisotropy_field_is_2ku_over_ms() {
        let m = disc(0.0, 0.0);
        assert!((m.anisotropy_field_t() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn overlapping_magnets_rejected() {
        let err = Array::new(vec![disc(0.0, 0.0), disc(30.0, 0.0)]).unwrap_err();
        match err {
            Error::InvalidLayout(msg) => assert!(msg.contains("overlap"), "{msg}"),
            other => panic!("expected InvalidLayout, got {other:?}"),
        }
    }

    #[test]
    fn touching_magnets_allowed() {
        assert!(Array::new(vec![disc(0.0, 0.0), disc(50.0, 0.0)]).is_ok());
    }

    #[test]
    fn empty_array_rejected() {
        assert!(Array::new(vec![]).is_err());
    }

    #[test]
    fn coupled_set_sits_in_the_frustration_window() {
        // Aligned-pair instability requires B_K < 3*B_dip; ground-state
        // antiparallel order requires B_K > B_dip.
        let b_dip = COUPLED_PMA.neighbor_dipole_field_t();
        let b_k = 2.0 * COUPLED_PMA.ku_j_per_m3 / COUPLED_PMA.ms_a_per_m;
        assert!(b_k > b_dip, "B_K = {b_k:.3e} must exceed B_dip = {b_dip:.3e}");
        assert!(b_k < 3.0 * b_dip, "B_K = {b_k:.3e} must stay below 3*B_dip = {:.3e}", 3.0 * b_dip);
    }
}
