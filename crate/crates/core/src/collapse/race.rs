use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::basis::LindbladBasis;
use super::coupling::CouplingSpec;
use super::integrator::{evolve, IntegratorConfig, TrajectoryRecord};
use crate::densemat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::states::StateSpec;

/// First time the l1 coherence drops to half its initial value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HalfTime {
    At(f64),
    Never,
}

impl HalfTime {
    pub fn is_finite(&self) -> bool {
        matches!(self, HalfTime::At(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            HalfTime::At(t) => Some(t),
            HalfTime::Never => None,
        }
    }

    /// Linear interpolation between the bracketing samples. A state with no
    /// initial coherence never reaches half of it.
    pub fn from_series(times: &[f64], coherence: &[f64]) -> Self {
        let Some(&c0) = coherence.first() else {
            return HalfTime::Never;
        };
        if !(c0 > 0.0) {
            return HalfTime::Never;
        }
        let target = 0.5 * c0;
        for i in 1..coherence.len() {
            let (a, b) = (coherence[i - 1], coherence[i]);
            if b <= target {
                let frac = if a == b { 0.0 } else { (a - target) / (a - b) };
                return HalfTime::At(times[i - 1] + frac * (times[i] - times[i - 1]));
            }
        }
        HalfTime::Never
    }
}

impl fmt::Display for HalfTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalfTime::At(t) => write!(f, "{t:.9}"),
            HalfTime::Never => f.write_str("inf"),
        }
    }
}

impl Serialize for HalfTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HalfTime::At(t) => serializer.serialize_f64(*t),
            HalfTime::Never => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for HalfTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(t) => Ok(HalfTime::At(t)),
            Raw::Text(s) if s == "inf" => Ok(HalfTime::Never),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RaceEntry {
    pub spec: StateSpec,
    pub record: TrajectoryRecord,
    pub half_coherence_time: HalfTime,
}

/// Evolves every state under the same Hamiltonian, basis, coupling and
/// integrator settings. Trajectories run concurrently; results keep the
/// input order. `seed` fills in for random specs without one.
pub fn race(
    specs: &[StateSpec],
    hamiltonian: &ComplexMatrix,
    basis: &LindbladBasis,
    coupling: &CouplingSpec,
    config: &IntegratorConfig,
    seed: u64,
) -> Result<Vec<RaceEntry>> {
    let states = specs
        .iter()
        .map(|s| s.resolve_with_seed(seed))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = states.first() {
        if let Some(odd) = states.iter().position(|s| s.space() != first.space()) {
            return Err(Error::arg(format!(
                "race states must share one space: state 0 is {:?}, state {odd} is {:?}",
                first.space().local_dims(),
                states[odd].space().local_dims()
            )));
        }
    }
    states
        .par_iter()
        .zip(specs.par_iter())
        .map(|(rho, spec)| {
            let record = evolve(rho, hamiltonian, basis, coupling, config)?;
            let half_coherence_time = HalfTime::from_series(&record.times, &record.coherence_series);
            Ok(RaceEntry {
                spec: spec.clone(),
                record,
                half_coherence_time,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_time_interpolates() {
        let t = [0.0, 1.0, 2.0];
        let c = [1.0, 0.8, 0.2];
        match HalfTime::from_series(&t, &c) {
            HalfTime::At(x) => assert!((x - 1.5).abs() < 1e-12),
            HalfTime::Never => panic!("expected a crossing"),
        }
        assert_eq!(HalfTime::from_series(&t, &[1.0, 0.9, 0.6]), HalfTime::Never);
        assert_eq!(HalfTime::from_series(&t, &[0.0, 0.0, 0.0]), HalfTime::Never);
        assert_eq!(HalfTime::from_series(&[], &[]), HalfTime::Never);
        assert_eq!(serde_json::to_string(&HalfTime::Never).unwrap(), "\"inf\"");
    }

    #[test]
    fn empty_race() {
        let basis = LindbladBasis::site_projectors(8).unwrap();
        let r = race(
            &[],
            &ComplexMatrix::zeros(8),
            &basis,
            &CouplingSpec::diagonal_linear(1.0),
            &IntegratorConfig::new(0.1, 1.0),
            0,
        )
        .unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let basis = LindbladBasis::site_projectors(8).unwrap();
        let r = race(
            &[StateSpec::ghz(3), StateSpec::ghz(2)],
            &ComplexMatrix::zeros(8),
            &basis,
            &CouplingSpec::diagonal_linear(1.0),
            &IntegratorConfig::new(0.1, 1.0),
            0,
        );
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn ghz_collapses_product_does_not() {
        let basis = LindbladBasis::site_projectors(8).unwrap();
        let mut config = IntegratorConfig::new(1e-2, 2.0);
        config.record_stride = 1;
        let r = race(
            &[StateSpec::ghz(3), StateSpec::product("+++"), StateSpec::basis("000")],
            &ComplexMatrix::zeros(8),
            &basis,
            &CouplingSpec::diagonal_linear(1.0),
            &config,
            0,
        )
        .unwrap();
        assert!(r[0].half_coherence_time.is_finite());
        assert_eq!(r[1].half_coherence_time, HalfTime::Never);
        assert_eq!(r[2].half_coherence_time, HalfTime::Never);
        let plus = &r[1].record.coherence_series;
        assert!(plus.iter().all(|&c| (c - plus[0]).abs() < 1e-12));
    }
}
