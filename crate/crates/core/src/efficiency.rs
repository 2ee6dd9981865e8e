//! Area-energy-delay accounting for comparing a nanomagnet reservoir against
//! a CMOS implementation of the same role. The default parameter sets are
//! calibrated reference points that reproduce the published ratio structure;
//! they are not device measurements.

use crate::error::{Error, Result};

/// Per-platform cost model. One "node" is the unit that scales with
/// reservoir size: a nanomagnet on one side, a neuron circuit on the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformMetrics {
    pub name: &'static str,
    pub area_per_node_m2: f64,
    pub energy_per_update_j: f64,
    pub min_period_s: f64,
    pub node_count: usize,
}

impl PlatformMetrics {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("area_per_node_m2", self.area_per_node_m2),
            ("energy_per_update_j", self.energy_per_update_j),
            ("min_period_s", self.min_period_s),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid_field(name, "must be positive and finite"));
            }
        }
        if self.node_count == 0 {
            return Err(Error::invalid_field("node_count", "must be positive"));
        }
        Ok(())
    }

    pub fn total_area_m2(&self) -> f64 {
        self.area_per_node_m2 * self.node_count as f64
    }
}

/// Nanomagnet reservoir reference point: a 35-magnet array on a 70 nm pitch,
/// switched by nanosecond spin-torque pulses.
pub fn nanomagnet_reference() -> PlatformMetrics {
    PlatformMetrics {
        name: "nanomagnet",
        area_per_node_m2: 70e-9 * 70e-9,
        energy_per_update_j: 5e-14,
        min_period_s: 2e-9,
        node_count: 35,
    }
}

/// CMOS reservoir reference point: a 25-neuron recurrent network, one
/// digital neuron circuit per node.
pub fn cmos_reference() -> PlatformMetrics {
    PlatformMetrics {
        name: "cmos",
        area_per_node_m2: 2.058e-9,
        energy_per_update_j: 5e-13,
        min_period_s: 6e-9,
        node_count: 25,
    }
}

/// Area-energy-delay product: total area times per-update energy times
/// minimum update period.
pub fn aedp(metrics: &PlatformMetrics) -> Result<f64> {
    metrics.validate()?;
    Ok(metrics.total_area_m2() * metrics.energy_per_update_j * metrics.min_period_s)
}

/// Reference-over-candidate cost ratios; values above 1 favor the candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub area: f64,
    pub energy: f64,
    pub delay: f64,
    pub aedp: f64,
}

impl RatioReport {
    /// One `key: value` line per ratio, stable order.
    pub fn summary(&self) -> String {
        format!(
            "area_ratio: {:e}\nenergy_ratio: {:e}\ndelay_ratio: {:e}\naedp_ratio: {:e}\n",
            self.area, self.energy, self.delay, self.aedp
        )
    }

    pub fn to_csv(&self) -> String {
        format!(
            "quantity,ratio\narea,{:e}\nenergy,{:e}\ndelay,{:e}\naedp,{:e}\n",
            self.area, self.energy, self.delay, self.aedp
        )
    }
}

/// Per-dimension reference/candidate ratios. The product of the three parts
/// is the AEDP ratio by construction, so the identity holds exactly.
pub fn ratio_report(
    candidate: &PlatformMetrics,
    reference: &PlatformMetrics,
) -> Result<RatioReport> {
    candidate.validate()?;
    reference.validate()?;
    let area = reference.total_area_m2() / candidate.total_area_m2();
    let energy = reference.energy_per_update_j / candidate.energy_per_update_j;
    let delay = reference.min_period_s / candidate.min_period_s;
    Ok(RatioReport { area, energy, delay, aedp: area * energy * delay })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_metrics_have_unit_product() {
        let unit = PlatformMetrics {
            name: "unit",
            area_per_node_m2: 1.0,
            energy_per_update_j: 1.0,
            min_period_s: 1.0,
            node_count: 1,
        };
        assert_eq!(aedp(&unit).unwrap(), 1.0);
        let mut doubled = unit;
        doubled.node_count = 2;
        assert_eq!(aedp(&doubled).unwrap(), 2.0);
        let r = ratio_report(&unit, &unit).unwrap();
        assert_eq!((r.area, r.energy, r.delay, r.aedp), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn swapping_arguments_inverts_every_ratio() {
        let a = nanomagnet_reference();
        let b = cmos_reference();
        let fwd = ratio_report(&a, &b).unwrap();
        let rev = ratio_report(&b, &a).unwrap();
        assert!((fwd.area * rev.area - 1.0).abs() < 1e-12);
        assert!((fwd.energy * rev.energy - 1.0).abs() < 1e-12);
        assert!((fwd.delay * rev.delay - 1.0).abs() < 1e-12);
        assert!((fwd.aedp * rev.aedp - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_identity_holds_for_arbitrary_inputs() {
        let mk = |a: f64, e: f64, p: f64, n: usize| PlatformMetrics {
            name: "x",
            area_per_node_m2: a,
            energy_per_update_j: e,
            min_period_s: p,
            node_count: n,
        };
        let cases = [
            (mk(1e-15, 2e-14, 3e-9, 7), mk(4e-10, 5e-13, 6e-9, 11)),
            (mk(3.3e-12, 7.7e-15, 1.1e-10, 100), mk(9e-9, 2e-12, 8e-9, 1)),
        ];
        for (cand, refm) in cases {
            let r = ratio_report(&cand, &refm).unwrap();
            assert!((r.aedp - r.area * r.energy * r.delay).abs() <= 1e-12 * r.aedp.abs());
            // Cross-check against the products themselves.
            let direct = aedp(&refm).unwrap() / aedp(&cand).unwrap();
            assert!((r.aedp - direct).abs() <= 1e-9 * direct.abs());
        }
    }

    #[test]
    fn calibrated_references_land_in_the_published_ratio_bands() {
        let r = ratio_report(&nanomagnet_reference(), &cmos_reference()).unwrap();
        assert!((1e5..=1e6).contains(&r.area), "area ratio {}", r.area);
        assert!((5.0..=20.0).contains(&r.energy), "energy ratio {}", r.energy);
        assert!((2.0..=5.0).contains(&r.delay), "delay ratio {}", r.delay);
        assert!((5e6..=5e7).contains(&r.aedp), "aedp ratio {}", r.aedp);
        // The headline figures multiply out the same way.
        assert_eq!(3e5 * 10.0 * 3.0, 9e6);
    }

    #[test]
    fn invalid_metrics_are_rejected_by_field() {
        let mut m = nanomagnet_reference();
        m.min_period_s = 0.0;
        assert!(aedp(&m).is_err());
        m = nanomagnet_reference();
        m.node_count = 0;
        assert!(ratio_report(&m, &cmos_reference()).is_err());
    }
}
