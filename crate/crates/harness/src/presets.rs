//! Named experiment bundles. Each acceptance criterion belongs to exactly
//! one preset, except determinism, which reruns all of them.

use crate::checks::Criterion;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub criteria: &'static [Criterion],
}

pub const PRESETS: [Preset; 8] = [
    Preset {
        id: "lyapunov-sweep",
        description: "per-mode decay envelope and dissipation of the mode functional",
        criteria: &[Criterion::ModeEnvelope, Criterion::LyapunovDissipation],
    },
    Preset {
        id: "linear-decay",
        description: "closed-form mode propagator against RK4, and eigenvalue identities",
        criteria: &[Criterion::OracleEquivalence, Criterion::EigenIdentities],
    },
    Preset {
        id: "effective-velocity",
        description: "frame residuals of the diagonalizing change of unknowns",
        criteria: &[Criterion::EffectiveVelocity],
    },
    Preset {
        id: "kernels",
        description: "Poisson, radius-gap, heat-Gevrey and shell-decay kernel bounds",
        criteria: &[Criterion::KernelBounds],
    },
    Preset {
        id: "product-constants",
        description: "paraproduct splitting, weight inequality and product law constants",
        criteria: &[Criterion::BonyExactness, Criterion::ProductConstants],
    },
    Preset {
        id: "convergence-order",
        description: "linear limit, mass conservation, time order and small-data stability",
        criteria: &[Criterion::SolverCorrectness],
    },
    Preset {
        id: "decay-rates",
        description: "algebraic decay of low frequencies and stretched-exponential decay of high ones",
        criteria: &[Criterion::DecayRates],
    },
    Preset {
        id: "gevrey-radius",
        description: "growth of the fitted analyticity radius along a weighted run",
        criteria: &[Criterion::RadiusGrowth],
    },
];

pub fn find_preset(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_but_determinism_has_one_home() {
        for c in Criterion::ALL {
            let homes = PRESETS.iter().filter(|p| p.criteria.contains(&c)).count();
            let want = if c == Criterion::Determinism { 0 } else { 1 };
            assert_eq!(homes, want, "{c:?}");
        }
        assert!(find_preset("kernels").is_some());
        assert!(find_preset("nope").is_none());
    }
}
