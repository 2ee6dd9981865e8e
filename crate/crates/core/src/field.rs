//! Magnetostatics: point-dipole fields, the per-magnet effective field, and
//! the total array energy. Fields are stored in tesla (mu0·H); energies in
//! joules.

use crate::magnet::{Array, MU0_OVER_4PI};
use crate::vec3::Vec3;

/// Field in tesla at `displacement` (meters, pointing from the dipole to the
/// observation point) of a point dipole with moment vector `moment` (A·m^2):
/// B = (mu0/4pi)·(3(mu·r̂)r̂ − mu)/r^3.
pub fn dipole_field(moment: Vec3, displacement: Vec3) -> Vec3 {
    let r = displacement.norm();
    debug_assert!(r > 0.0, "dipole field evaluated at the dipole itself");
    let rhat = displacement / r;
    MU0_OVER_4PI * (3.0 * moment.dot(rhat) * rhat - moment) / r.powi(3)
}

/// Effective field on every magnet: uniaxial anisotropy (2Ku/Ms)(m·ê)ê plus
/// the dipolar sum over all other magnets plus the uniform external field.
/// Writes into `out` to keep the integrator allocation-free.
pub fn effective_field_into(array: &Array, m: &[Vec3], b_ext: Vec3, out: &mut [Vec3]) {
    debug_assert_eq!(m.len(), array.len());
    debug_assert_eq!(out.len(), array.len());
    for i in 0..array.len() {
        let e = array.easy_axis(i);
        let mut b = b_ext + array.anisotropy_field_t(i) * m[i].dot(e) * e;
        let (others, coeffs, units) = array.pair_row(i);
        for ((&j, &k), &u) in others.iter().zip(coeffs).zip(units) {
            let mj = m[j as usize];
            b += k * (3.0 * mj.dot(u) * u - mj);
        }
        out[i] = b;
    }
}

pub fn effective_field(array: &Array, m: &[Vec3], b_ext: Vec3) -> Vec<Vec3> {
    let mut out = vec![Vec3::ZERO; array.len()];
    effective_field_into(array, m, b_ext, &mut out);
    out
}

/// Interaction energy of the ordered pair (i, j) in joules:
/// E = −mu_i·B_j(r_i). Symmetric in (i, j) up to rounding.
pub fn pair_energy(array: &Array, m: &[Vec3], i: usize, j: usize) -> f64 {
    let mu_i = array.moment_a_m2(i) * m[i];
    let mu_j = array.moment_a_m2(j) * m[j];
    let r = array.magnets()[i].position - array.magnets()[j].position;
    -mu_i.dot(dipole_field(mu_j, r))
}

/// Total energy: anisotropy −KuV(m·ê)^2 per magnet, dipolar sum over
/// unordered pairs, Zeeman −mu·B_ext per magnet.
pub fn total_energy(array: &Array, m: &[Vec3], b_ext: Vec3) -> f64 {
    let mut energy = 0.0;
    for i in 0..array.len() {
        let spec = &array.magnets()[i];
        let align = m[i].dot(array.easy_axis(i));
        energy -= spec.ku_j_per_m3 * spec.volume_m3() * align * align;
        energy -= array.moment_a_m2(i) * m[i].dot(b_ext);
    }
    for i in 0..array.len() {
        for j in (i + 1)..array.len() {
            energy += pair_energy(array, m, i, j);
        }
    }
    energy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnet::{MagnetRole, NanomagnetSpec, DEFAULT_PMA};

    const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);

    fn close(a: Vec3, b: Vec3, tol: f64) {
        assert!((a - b).norm() <= tol, "{a:?} != {b:?}");
    }

    // Unit moment at unit distance makes the prefactor exactly mu0/4pi = 1e-7.

    #[test]
    fn side_by_side_dipole_field_opposes_the_moment() {
        close(dipole_field(Z, X), Vec3::new(0.0, 0.0, -1e-7), 1e-22);
    }

    #[test]
    fn stacked_dipole_field_reinforces_the_moment_twice_over() {
        close(dipole_field(Z, Z), Vec3::new(0.0, 0.0, 2e-7), 1e-22);
    }

    #[test]
    fn inline_dipole_field_reinforces_along_the_bond() {
        close(dipole_field(X, X), Vec3::new(2e-7, 0.0, 0.0), 1e-22);
    }

    #[test]
    fn dipole_field_falls_off_as_inverse_cube() {
        let b1 = dipole_field(Z, X).norm();
        let b2 = dipole_field(Z, 2.0 * X).norm();
        assert!((b1 / b2 - 8.0).abs() < 1e-12);
    }

    fn pair_array(pitch_nm: f64) -> Array {
        let mk = |x_nm: f64| {
            DEFAULT_PMA.magnet_at(Vec3::new(x_nm * 1e-9, 0.0, 0.0), MagnetRole::Readout)
        };
        Array::new(vec![mk(0.0), mk(pitch_nm)]).unwrap()
    }

    #[test]
    fn single_magnet_on_axis_sees_full_anisotropy_field() {
        let array =
            Array::new(vec![DEFAULT_PMA.magnet_at(Vec3::ZERO, MagnetRole::Readout)]).unwrap();
        let field = effective_field(&array, &[Z], Vec3::ZERO);
        // 2Ku/Ms = 1.25 T along the easy axis.
        close(field[0], Vec3::new(0.0, 0.0, 1.25), 1e-15);
    }

    #[test]
    fn anisotropy_field_scales_with_axis_projection() {
        let array =
            Array::new(vec![DEFAULT_PMA.magnet_at(Vec3::ZERO, MagnetRole::Readout)]).unwrap();
        let tilted = Vec3::new(0.6, 0.0, 0.8);
        let field = effective_field(&array, &[tilted], Vec3::ZERO);
        close(field[0], Vec3::new(0.0, 0.0, 1.25 * 0.8), 1e-15);
    }

    #[test]
    fn two_magnet_field_matches_explicit_pair_sum() {
        let array = pair_array(70.0);
        let m = [Vec3::new(0.6, 0.0, 0.8).normalized(), Vec3::new(0.0, -0.6, 0.8).normalized()];
        let b_ext = Vec3::new(0.0, 1e-3, 2e-3);
        let got = effective_field(&array, &m, b_ext);

        // Independent sum, straight from the definitions.
        for (i, j) in [(0usize, 1usize), (1, 0)] {
            let spec_i = &array.magnets()[i];
            let e = spec_i.easy_axis;
            let anis = spec_i.anisotropy_field_t() * m[i].dot(e) * e;
            let r = array.magnets()[i].position - array.magnets()[j].position;
            let dip = dipole_field(array.moment_a_m2(j) * m[j], r);
            close(got[i], b_ext + anis + dip, 1e-18);
        }
    }

    #[test]
    fn external_field_enters_unchanged() {
        let array = pair_array(70.0);
        let m = [Z, Z];
        let b0 = effective_field(&array, &m, Vec3::ZERO);
        let b1 = effective_field(&array, &m, Vec3::new(0.01, 0.02, -0.03));
        close(b1[0] - b0[0], Vec3::new(0.01, 0.02, -0.03), 1e-15);
    }

    #[test]
    fn pair_energy_is_reciprocal() {
        let array = pair_array(70.0);
        let m = [Vec3::new(0.6, 0.0, 0.8).normalized(), Vec3::new(0.3, -0.5, 0.8).normalized()];
        let e_ij = pair_energy(&array, &m, 0, 1);
        let e_ji = pair_energy(&array, &m, 1, 0);
        assert!((e_ij - e_ji).abs() <= 1e-12 * e_ij.abs());
    }

    #[test]
    fn side_by_side_pair_prefers_antiparallel() {
        let array = pair_array(70.0);
        let aligned = total_energy(&array, &[Z, Z], Vec3::ZERO);
        let anti = total_energy(&array, &[Z, -1.0 * Z], Vec3::ZERO);
        assert!(anti < aligned);
    }

    #[test]
    fn zeeman_term_lowers_energy_when_aligned_with_field() {
        let array =
            Array::new(vec![DEFAULT_PMA.magnet_at(Vec3::ZERO, MagnetRole::Readout)]).unwrap();
        let b = Vec3::new(0.0, 0.0, 0.1);
        let up = total_energy(&array, &[Z], b);
        let down = total_energy(&array, &[-1.0 * Z], b);
        let mu = array.moment_a_m2(0);
        assert!((down - up - 2.0 * mu * 0.1).abs() < 1e-12 * (2.0 * mu * 0.1));
    }

    #[test]
    fn anisotropy_energy_minimized_on_axis() {
        let spec = NanomagnetSpec { easy_axis: Z, ..DEFAULT_PMA.magnet_at(Vec3::ZERO, MagnetRole::Readout) };
        let array = Array::new(vec![spec]).unwrap();
        let on_axis = total_energy(&array, &[Z], Vec3::ZERO);
        let in_plane = total_energy(&array, &[X], Vec3::ZERO);
        let ku_v = 5.0e5 * array.magnets()[0].volume_m3();
        assert!((in_plane - on_axis - ku_v).abs() < 1e-12 * ku_v);
    }
}
