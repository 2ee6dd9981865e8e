//! Landau-Lifshitz-Gilbert dynamics in the explicit Gilbert-damping form,
//!
//!   dm/dt = -gamma/(1+alpha^2) [ m x B + alpha m x (m x B) ]
//!           - gamma a_J m x (m x p)
//!
//! with B the effective field in tesla and a_J a spin-transfer torque
//! strength expressed as an equivalent field in tesla (a_J > 0 pulls m
//! toward the polarization p). Time integration is Heun's predictor-
//! corrector with renormalization after the corrector, which keeps the
//! scheme second order and the magnetization on the unit sphere.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::field::effective_field_into;
use crate::magnet::{Array, LlgParams, K_B};
use crate::vec3::Vec3;

/// Dynamic state of an array: simulation time plus one unit vector per
/// magnet.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time_s: f64,
    pub m: Vec<Vec3>,
}

impl SimState {
    /// All magnets along +z at t = 0.
    pub fn uniform_up(n: usize) -> SimState {
        SimState { time_s: 0.0, m: vec![Vec3::new(0.0, 0.0, 1.0); n] }
    }

    pub fn from_directions(m: Vec<Vec3>) -> SimState {
        SimState { time_s: 0.0, m: m.into_iter().map(Vec3::normalized).collect() }
    }

    pub fn max_norm_error(&self) -> f64 {
        self.m.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// One spin-transfer torque drive acting on a single magnet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SttDrive {
    pub magnet: usize,
    /// Equivalent field strength a_J in tesla; 0 disables the term.
    pub strength_t: f64,
    /// Polarization direction, unit length.
    pub polarization: Vec3,
}

/// Single-magnet LLG right-hand side, dm/dt in 1/s.
pub fn llg_rhs(
    m: Vec3,
    b_eff: Vec3,
    gamma: f64,
    alpha: f64,
    stt_strength_t: f64,
    stt_polarization: Vec3,
) -> Vec3 {
    let mxb = m.cross(b_eff);
    let mut rhs = (-gamma / (1.0 + alpha * alpha)) * (mxb + alpha * m.cross(mxb));
    if stt_strength_t != 0.0 {
        rhs -= gamma * stt_strength_t * m.cross(m.cross(stt_polarization));
    }
    rhs
}

/// Heun integrator with reusable buffers. Owns the thermal-noise generator
/// so that a seeded run is reproducible bit for bit.
pub struct Integrator {
    params: LlgParams,
    rng: Option<ChaCha8Rng>,
    field: Vec<Vec3>,
    k1: Vec<Vec3>,
    predictor: Vec<Vec3>,
    stt: Vec<(f64, Vec3)>,
    thermal: Vec<Vec3>,
}

impl Integrator {
    /// Deterministic zero-temperature integrator. `params.temperature_k`
    /// must be 0; use [`Integrator::with_thermal_seed`] otherwise.
    pub fn new(params: LlgParams, n: usize) -> Result<Integrator> {
        params.validate()?;
        if params.temperature_k > 0.0 {
            return Err(Error::invalid_field(
                "temperature_k",
                "finite temperature requires a thermal seed",
            ));
        }
        Ok(Self::build(params, n, None))
    }

    /// Integrator with a seeded Langevin field for temperature > 0.
    pub fn with_thermal_seed(params: LlgParams, n: usize, seed: u64) -> Result<Integrator> {
        params.validate()?;
        let rng = (params.temperature_k > 0.0).then(|| ChaCha8Rng::seed_from_u64(seed));
        Ok(Self::build(params, n, rng))
    }

    fn build(params: LlgParams, n: usize, rng: Option<ChaCha8Rng>) -> Integrator {
        Integrator {
            params,
            rng,
            field: vec![Vec3::ZERO; n],
            k1: vec![Vec3::ZERO; n],
            predictor: vec![Vec3::ZERO; n],
            stt: vec![(0.0, Vec3::ZERO); n],
            thermal: vec![Vec3::ZERO; n],
        }
    }

    pub fn params(&self) -> &LlgParams {
        &self.params
    }

    pub fn set_dt(&mut self, dt_s: f64) {
        assert!(dt_s > 0.0);
        self.params.dt_s = dt_s;
    }

    /// One Heun step. The same thermal field realization enters predictor
    /// and corrector, as required for a Stratonovich-consistent scheme.
    pub fn step(
        &mut self,
        array: &Array,
        state: &mut SimState,
        drives: &[SttDrive],
        b_ext: Vec3,
    ) -> Result<()> {
        let n = array.len();
        debug_assert_eq!(state.m.len(), n);
        let dt = self.params.dt_s;
        let gamma = self.params.gamma_rad_per_s_t;
        let alpha = self.params.alpha;

        for s in self.stt.iter_mut() {
            *s = (0.0, Vec3::ZERO);
        }
        for d in drives {
            debug_assert!(d.magnet < n, "drive targets magnet {} of {}", d.magnet, n);
            self.stt[d.magnet] = (d.strength_t, d.polarization);
        }

        self.sample_thermal(array);

        effective_field_into(array, &state.m, b_ext, &mut self.field);
        for i in 0..n {
            let (aj, p) = self.stt[i];
            let b = self.field[i] + self.thermal[i];
            self.k1[i] = llg_rhs(state.m[i], b, gamma, alpha, aj, p);
            self.predictor[i] = state.m[i] + dt * self.k1[i];
        }

        effective_field_into(array, &self.predictor, b_ext, &mut self.field);
        for i in 0..n {
            let (aj, p) = self.stt[i];
            let b = self.field[i] + self.thermal[i];
            let k2 = llg_rhs(self.predictor[i], b, gamma, alpha, aj, p);
            let next = state.m[i] + (0.5 * dt) * (self.k1[i] + k2);
            let norm = next.norm();
            if !norm.is_finite() || norm < 0.5 || norm > 2.0 {
                return Err(Error::Diverged {
                    magnet: i,
                    time_s: state.time_s,
                    detail: format!("|m| = {norm:.3e} before renormalization"),
                });
            }
            state.m[i] = next / norm;
        }
        state.time_s += dt;
        Ok(())
    }

    /// Advances by `steps` steps under constant drives.
    pub fn run(
        &mut self,
        array: &Array,
        state: &mut SimState,
        steps: usize,
        drives: &[SttDrive],
        b_ext: Vec3,
    ) -> Result<()> {
        for _ in 0..steps {
            self.step(array, state, drives, b_ext)?;
        }
        Ok(())
    }

    /// Largest |dm/dt| over the array (1/s) with drives off, used as the
    /// relaxation convergence measure.
    pub fn max_rate(&mut self, array: &Array, state: &SimState, b_ext: Vec3) -> f64 {
        effective_field_into(array, &state.m, b_ext, &mut self.field);
        let gamma = self.params.gamma_rad_per_s_t;
        let alpha = self.params.alpha;
        state
            .m
            .iter()
            .zip(&self.field)
            .map(|(&m, &b)| llg_rhs(m, b, gamma, alpha, 0.0, Vec3::ZERO).norm())
            .fold(0.0, f64::max)
    }

    /// Integrates with drives off until max |dm/dt| < `torque_tol` (1/s).
    /// Requires zero temperature; fails if `max_steps` is exhausted first.
    pub fn relax(
        &mut self,
        array: &Array,
        state: &mut SimState,
        b_ext: Vec3,
        torque_tol: f64,
        max_steps: usize,
    ) -> Result<RelaxOutcome> {
        if self.params.temperature_k > 0.0 {
            return Err(Error::invalid_field("temperature_k", "relaxation requires T = 0"));
        }
        // Convergence is checked on a stride; the rate evaluation costs one
        // field assembly, the same as half a step.
        const CHECK_EVERY: usize = 25;
        let mut steps = 0;
        loop {
            let rate = self.max_rate(array, state, b_ext);
            if rate < torque_tol {
                return Ok(RelaxOutcome { steps, residual_rate_per_s: rate });
            }
            if steps >= max_steps {
                return Err(Error::Diverged {
                    magnet: 0,
                    time_s: state.time_s,
                    detail: format!(
                        "relaxation stalled: |dm/dt| = {rate:.3e} 1/s after {steps} steps \
                         (tolerance {torque_tol:.3e})"
                    ),
                });
            }
            for _ in 0..CHECK_EVERY.min(max_steps - steps) {
                self.step(array, state, &[], b_ext)?;
            }
            steps += CHECK_EVERY.min(max_steps - steps);
        }
    }

    fn sample_thermal(&mut self, array: &Array) {
        let Some(rng) = self.rng.as_mut() else {
            return;
        };
        if self.params.temperature_k == 0.0 {
            for t in self.thermal.iter_mut() {
                *t = Vec3::ZERO;
            }
            return;
        }
        let gamma = self.params.gamma_rad_per_s_t;
        let dt = self.params.dt_s;
        let alpha = self.params.alpha;
        let temp = self.params.temperature_k;
        for i in 0..array.len() {
            // Brown's fluctuation strength: per-component variance
            // 2 alpha k_B T / (gamma mu dt), in tesla^2.
            let sigma = (2.0 * alpha * K_B * temp / (gamma * array.moment_a_m2(i) * dt)).sqrt();
            let (g0, g1) = gauss_pair(rng);
            let (g2, _) = gauss_pair(rng);
            self.thermal[i] = sigma * Vec3::new(g0, g1, g2);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RelaxOutcome {
    pub steps: usize,
    pub residual_rate_per_s: f64,
}

fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    // 53-bit mantissa, strictly inside (0, 1).
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn gauss_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::total_energy;
    use crate::magnet::{MagnetRole, DEFAULT_PMA};

    const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);

    #[test]
    fn rhs_is_pure_precession_without_damping() {
        let got = llg_rhs(X, Z, 2.0, 0.0, 0.0, Vec3::ZERO);
        // -gamma m x B = (0, +gamma, 0)
        assert!((got - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rhs_vanishes_at_equilibrium() {
        let got = llg_rhs(Z, 1.25 * Z, 1.76e11, 0.05, 0.0, Vec3::ZERO);
        assert_eq!(got, Vec3::ZERO);
    }

    #[test]
    fn stt_pushes_toward_polarization() {
        // a_J = 1, p = +z, m in-plane: torque is +z with magnitude gamma.
        let got = llg_rhs(X, Vec3::ZERO, 2.0, 0.0, 1.0, Z);
        assert!((got - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn rhs_is_tangent_to_m() {
        let m = Vec3::new(0.3, -0.5, 0.9).normalized();
        let b = Vec3::new(0.02, -0.01, 0.7);
        let p = Vec3::new(0.1, 0.0, -1.0).normalized();
        let rhs = llg_rhs(m, b, 1.0, 0.2, 0.3, p);
        assert!(rhs.dot(m).abs() < 1e-12);
    }

    fn single_magnet() -> Array {
        Array::new(vec![DEFAULT_PMA.magnet_at(Vec3::ZERO, MagnetRole::Readout)]).unwrap()
    }

    fn zero_ku_params(dt: f64) -> (Array, LlgParams) {
        let mut spec = DEFAULT_PMA.magnet_at(Vec3::ZERO, MagnetRole::Readout);
        spec.ku_j_per_m3 = 0.0;
        let array = Array::new(vec![spec]).unwrap();
        let params = LlgParams {
            gamma_rad_per_s_t: 1.76e11,
            alpha: 0.0,
            dt_s: dt,
            temperature_k: 0.0,
        };
        (array, params)
    }

    /// Analytic precession about a +z external field with alpha = 0:
    /// phase advances as gamma*B*t and m_z is constant.
    fn precession_error_after_one_step(dt: f64) -> f64 {
        let (array, params) = zero_ku_params(dt);
        let theta: f64 = 0.5;
        let b = 0.1;
        let mut state = SimState::from_directions(vec![Vec3::new(theta.sin(), 0.0, theta.cos())]);
        let mut integ = Integrator::new(params, 1).unwrap();
        integ.step(&array, &mut state, &[], b * Z).unwrap();
        let phase = params.gamma_rad_per_s_t * b * dt;
        let exact =
            Vec3::new(theta.sin() * phase.cos(), theta.sin() * phase.sin(), theta.cos());
        (state.m[0] - exact).norm()
    }

    #[test]
    fn heun_is_second_order_on_analytic_precession() {
        let e1 = precession_error_after_one_step(1e-12);
        let e2 = precession_error_after_one_step(0.5e-12);
        assert!(e1 > 0.0 && e2 > 0.0);
        let ratio = e1 / e2;
        assert!(ratio >= 4.0, "one-step error ratio {ratio:.2} under dt halving");
    }

    #[test]
    fn norm_stays_on_unit_sphere_over_long_runs() {
        let array = single_magnet();
        let params = DEFAULT_PMA.llg_params();
        let mut state = SimState::from_directions(vec![Vec3::new(0.4, 0.2, 0.89)]);
        let mut integ = Integrator::new(params, 1).unwrap();
        integ.run(&array, &mut state, 20_000, &[], Vec3::ZERO).unwrap();
        assert!(state.max_norm_error() < 1e-9);
    }

    #[test]
    fn damping_aligns_magnetization_with_field() {
        let (array, mut params) = zero_ku_params(1e-12);
        params.alpha = 0.5;
        let mut state = SimState::from_directions(vec![Vec3::new(1.0, 0.0, 0.05)]);
        let mut integ = Integrator::new(params, 1).unwrap();
        integ.run(&array, &mut state, 200_000, &[], 0.1 * Z).unwrap();
        assert!(state.m[0].z > 0.9999, "m = {:?}", state.m[0]);
    }

    #[test]
    fn energy_descends_during_relaxation() {
        let array = single_magnet();
        let params = DEFAULT_PMA.llg_params();
        let mut state = SimState::from_directions(vec![Vec3::new(0.5, 0.0, 0.87)]);
        let mut integ = Integrator::new(params, 1).unwrap();
        let mut prev = total_energy(&array, &state.m, Vec3::ZERO);
        for _ in 0..5_000 {
            integ.step(&array, &mut state, &[], Vec3::ZERO).unwrap();
            let e = total_energy(&array, &state.m, Vec3::ZERO);
            assert!(e <= prev + 1e-9 * prev.abs(), "energy rose: {prev:.6e} -> {e:.6e}");
            prev = e;
        }
    }

    #[test]
    fn relax_reaches_torque_tolerance() {
        let array = single_magnet();
        let mut state = SimState::from_directions(vec![Vec3::new(0.3, 0.1, 0.95)]);
        let mut integ = Integrator::new(DEFAULT_PMA.llg_params(), 1).unwrap();
        let out = integ.relax(&array, &mut state, Vec3::ZERO, 1e3, 2_000_000).unwrap();
        assert!(out.residual_rate_per_s < 1e3);
        assert!(state.m[0].z > 0.999_999);
    }

    #[test]
    fn absurd_time_step_reports_divergence() {
        let array = single_magnet();
        let mut params = DEFAULT_PMA.llg_params();
        params.dt_s = 1.0; // gamma*B*dt ~ 1e11: hopeless
        let mut state = SimState::from_directions(vec![Vec3::new(0.5, 0.0, 0.87)]);
        let mut integ = Integrator::new(params, 1).unwrap();
        let err = integ.run(&array, &mut state, 10, &[], Vec3::ZERO).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{err:?}");
    }

    #[test]
    fn stt_drive_switches_a_magnet() {
        let array = single_magnet();
        let params = DEFAULT_PMA.llg_params();
        // Start near -z; drive toward +z well above threshold. The
        // polarization is canted a little off +z so torque does not vanish
        // at the antiparallel point.
        let mut state = SimState::from_directions(vec![Vec3::new(0.02, 0.0, -1.0)]);
        let p = Vec3::new(0.05, 0.0, 1.0).normalized();
        let drive = SttDrive { magnet: 0, strength_t: 0.2, polarization: p };
        let mut integ = Integrator::new(params, 1).unwrap();
        integ.run(&array, &mut state, 60_000, &[drive], Vec3::ZERO).unwrap();
        assert!(state.m[0].z > 0.9, "m_z = {}", state.m[0].z);
    }

    #[test]
    fn thermal_runs_reproduce_with_equal_seeds_and_differ_across_seeds() {
        let array = single_magnet();
        let mut params = DEFAULT_PMA.llg_params();
        params.temperature_k = 300.0;
        let start = SimState::from_directions(vec![Vec3::new(0.1, 0.0, 1.0)]);

        let run = |seed: u64| {
            let mut st = start.clone();
            let mut integ = Integrator::with_thermal_seed(params, 1, seed).unwrap();
            integ.run(&array, &mut st, 2_000, &[], Vec3::ZERO).unwrap();
            st.m[0]
        };
        let a = run(7);
        let b = run(7);
        let c = run(8);
        assert_eq!(a, b);
        assert!((a - c).norm() > 0.0);
    }

    #[test]
    fn zero_temperature_integrator_rejects_missing_seed_only_when_needed() {
        let mut params = DEFAULT_PMA.llg_params();
        assert!(Integrator::new(params, 1).is_ok());
        params.temperature_k = 10.0;
        assert!(Integrator::new(params, 1).is_err());
        assert!(Integrator::with_thermal_seed(params, 1, 1).is_ok());
    }
}
