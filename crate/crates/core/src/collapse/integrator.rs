use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::basis::LindbladBasis;
use super::coupling::CouplingSpec;
use super::generator::{unitary_part, Dissipator};
use crate::densemat::{hermitian_eig, ComplexMatrix, DensityMatrix, SitedSpace, StateJson, C64};
use crate::error::{Error, Result};
use crate::qii::{QiiSearch, Strategy};

const POSITIVITY_FAILURE: f64 = -1e-6;
const TRACE_RENORMALIZE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// 1 evaluates Φ at every RK stage. k > 1 computes Φ at the start of
    /// every k-th step and holds it for those k steps.
    #[serde(default = "one")]
    pub phi_refresh_stride: usize,
    #[serde(default)]
    pub qii_strategy: Strategy,
    #[serde(default = "one")]
    pub record_stride: usize,
}

fn one() -> usize {
    1
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_end: 1.0,
            phi_refresh_stride: 1,
            qii_strategy: Strategy::AllPartitions,
            record_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        IntegratorConfig {
            dt,
            t_end,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::arg(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(Error::arg(format!("t_end ({}) must be at least dt ({})", self.t_end, self.dt)));
        }
        if self.phi_refresh_stride == 0 || self.record_stride == 0 {
            return Err(Error::arg("strides must be at least 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Worst-case numerical health observed over a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest |Tr ρ − 1| after a step, before any renormalization.
    pub max_trace_drift: f64,
    /// Largest max|ρ − ρ†| over recorded samples.
    pub max_hermiticity_error: f64,
    /// Smallest eigenvalue over all steps.
    pub min_eigenvalue: f64,
    pub renormalizations: usize,
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub phi_series: Vec<f64>,
    pub purity_series: Vec<f64>,
    pub coherence_series: Vec<f64>,
    pub fidelity_series: Option<Vec<f64>>,
    pub final_state: DensityMatrix,
    pub diagnostics: Diagnostics,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `time,phi_bits,purity,coherence_l1,fidelity`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "time,phi_bits,purity,coherence_l1,fidelity")?;
        for i in 0..self.times.len() {
            let fidelity = self
                .fidelity_series
                .as_ref()
                .map(|f| format!("{:.9}", f[i]))
                .unwrap_or_default();
            writeln!(
                out,
                "{:.9},{:.9},{:.9},{:.9},{}",
                self.times[i], self.phi_series[i], self.purity_series[i], self.coherence_series[i], fidelity
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> TrajectoryJson {
        TrajectoryJson {
            times: self.times.clone(),
            phi_series: self.phi_series.clone(),
            purity_series: self.purity_series.clone(),
            coherence_series: self.coherence_series.clone(),
            fidelity_series: self.fidelity_series.clone(),
            final_state: self.final_state.to_json(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Serialized form of a [`TrajectoryRecord`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub times: Vec<f64>,
    pub phi_series: Vec<f64>,
    pub purity_series: Vec<f64>,
    pub coherence_series: Vec<f64>,
    pub fidelity_series: Option<Vec<f64>>,
    pub final_state: StateJson,
    pub diagnostics: Diagnostics,
}

/// The Φ-dependent right-hand side: −i[H, ρ] + D_{h(Φ(ρ))}(ρ).
pub(crate) struct CollapseField {
    space: SitedSpace,
    hamiltonian: ComplexMatrix,
    coupling: CouplingSpec,
    // one dissipator per coupling node; h(Φ) is a weighted sum of nodes
    dissipators: Vec<Dissipator>,
    search: QiiSearch,
}

impl CollapseField {
    pub(crate) fn new(
        space: &SitedSpace,
        hamiltonian: &ComplexMatrix,
        basis: &LindbladBasis,
        coupling: &CouplingSpec,
        strategy: Strategy,
    ) -> Result<Self> {
        let dim = space.total_dim();
        if hamiltonian.dim() != dim {
            return Err(Error::arg(format!(
                "Hamiltonian dimension {} does not match state dimension {dim}",
                hamiltonian.dim()
            )));
        }
        if hamiltonian.hermiticity_error() > 1e-10 {
            return Err(Error::arg("Hamiltonian is not Hermitian"));
        }
        if basis.dim() != dim {
            return Err(Error::arg(format!(
                "basis operators have dimension {}, state has {dim}",
                basis.dim()
            )));
        }
        let dissipators = coupling
            .nodes(basis.len())?
            .iter()
            .map(|h| Dissipator::new(basis, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(CollapseField {
            space: space.clone(),
            hamiltonian: hamiltonian.clone(),
            coupling: coupling.clone(),
            dissipators,
            search: QiiSearch::new(space.n_sites(), strategy)?,
        })
    }

    pub(crate) fn phi(&self, rho: &ComplexMatrix) -> Result<f64> {
        Ok(self.search.evaluate_matrix(&self.space, rho)?.phi_bits)
    }

    pub(crate) fn rhs(&self, rho: &ComplexMatrix, phi: f64) -> ComplexMatrix {
        let mut out = unitary_part(&self.hamiltonian, rho);
        for (node, w) in self.coupling.weights(phi) {
            self.dissipators[node].accumulate(rho, w, &mut out);
        }
        out
    }
}

/// Integrates the Φ-coupled master equation from `rho0` with classical RK4.
pub fn evolve(
    rho0: &DensityMatrix,
    hamiltonian: &ComplexMatrix,
    basis: &LindbladBasis,
    coupling: &CouplingSpec,
    config: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    evolve_with_reference(rho0, hamiltonian, basis, coupling, config, None)
}

/// As [`evolve`], also recording the fidelity to `reference` at each sample.
pub fn evolve_with_reference(
    rho0: &DensityMatrix,
    hamiltonian: &ComplexMatrix,
    basis: &LindbladBasis,
    coupling: &CouplingSpec,
    config: &IntegratorConfig,
    reference: Option<&DensityMatrix>,
) -> Result<TrajectoryRecord> {
    config.validate()?;
    if let Some(r) = reference {
        if r.dim() != rho0.dim() {
            return Err(Error::arg("reference state has a different dimension"));
        }
    }
    let field = CollapseField::new(rho0.space(), hamiltonian, basis, coupling, config.qii_strategy)?;
    let space = rho0.space().clone();
    let dt = config.dt;
    let n_steps = config.n_steps();
    let per_stage = config.phi_refresh_stride == 1;

    let mut record = TrajectoryRecord {
        times: Vec::new(),
        phi_series: Vec::new(),
        purity_series: Vec::new(),
        coherence_series: Vec::new(),
        fidelity_series: reference.map(|_| Vec::new()),
        final_state: rho0.clone(),
        diagnostics: Diagnostics {
            min_eigenvalue: rho0.spectrum().eigenvalues[0],
            ..Default::default()
        },
    };

    let mut rho = rho0.matrix().clone();
    let mut phi_now = field.phi(&rho)?;
    sample(&mut record, &space, &rho, 0.0, phi_now, reference)?;

    let mut held_phi = phi_now;
    for step in 0..n_steps {
        if !per_stage && step % config.phi_refresh_stride == 0 {
            held_phi = phi_now;
        }
        let eval = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
            let phi = if per_stage { field.phi(m)? } else { held_phi };
            Ok(field.rhs(m, phi))
        };
        let k1 = eval(&rho)?;
        let k2 = eval(&axpy(&rho, 0.5 * dt, &k1))?;
        let k3 = eval(&axpy(&rho, 0.5 * dt, &k2))?;
        let k4 = eval(&axpy(&rho, dt, &k3))?;
        let mut next = rho.clone();
        next.add_scaled(C64::new(dt / 6.0, 0.0), &k1);
        next.add_scaled(C64::new(dt / 3.0, 0.0), &k2);
        next.add_scaled(C64::new(dt / 3.0, 0.0), &k3);
        next.add_scaled(C64::new(dt / 6.0, 0.0), &k4);
        rho = next;

        let t = (step + 1) as f64 * dt;
        let drift = (rho.trace().re - 1.0).abs();
        record.diagnostics.max_trace_drift = record.diagnostics.max_trace_drift.max(drift);
        if drift > TRACE_RENORMALIZE {
            rho = rho.scaled_real(1.0 / rho.trace().re);
            record.diagnostics.renormalizations += 1;
        }

        let min_eig = hermitian_eig(&rho.hermitian_part())?.eigenvalues[0];
        record.diagnostics.min_eigenvalue = record.diagnostics.min_eigenvalue.min(min_eig);
        if min_eig < POSITIVITY_FAILURE {
            return Err(Error::Integration {
                time: t,
                min_eigenvalue: min_eig,
            });
        }

        let last = step + 1 == n_steps;
        let due = (step + 1) % config.record_stride == 0 || last;
        if due || !per_stage {
            phi_now = field.phi(&rho)?;
        }
        if due {
            sample(&mut record, &space, &rho, t, phi_now, reference)?;
        }
    }

    record.final_state = DensityMatrix::from_parts_unchecked(space, rho);
    Ok(record)
}

fn axpy(x: &ComplexMatrix, a: f64, y: &ComplexMatrix) -> ComplexMatrix {
    let mut out = x.clone();
    out.add_scaled(C64::new(a, 0.0), y);
    out
}

fn sample(
    record: &mut TrajectoryRecord,
    space: &SitedSpace,
    rho: &ComplexMatrix,
    t: f64,
    phi: f64,
    reference: Option<&DensityMatrix>,
) -> Result<()> {
    record.times.push(t);
    record.phi_series.push(phi);
    record.purity_series.push(rho.inner(rho).re);
    record.coherence_series.push(rho.l1_off_diagonal());
    record.diagnostics.max_hermiticity_error =
        record.diagnostics.max_hermiticity_error.max(rho.hermiticity_error());
    if let (Some(series), Some(r)) = (record.fidelity_series.as_mut(), reference) {
        let state = DensityMatrix::from_parts_unchecked(space.clone(), rho.hermitian_part());
        series.push(state.fidelity(r)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemat::unitary_propagator;
    use crate::states::{basis, ghz, random_hermitian, random_pure};

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0).validate().is_err());
        assert!(IntegratorConfig::new(0.1, 0.01).validate().is_err());
        let mut c = IntegratorConfig::new(0.1, 1.0);
        c.record_stride = 0;
        assert!(c.validate().is_err());
        assert_eq!(IntegratorConfig::new(1e-3, 5.0).n_steps(), 5000);
        let parsed: IntegratorConfig = serde_json::from_str(r#"{"dt":0.01,"t_end":1}"#).unwrap();
        assert_eq!(parsed.phi_refresh_stride, 1);
        assert_eq!(parsed.qii_strategy, Strategy::AllPartitions);
    }

    #[test]
    fn unitary_limit_matches_propagator() {
        let rho0 = random_pure(2, 2, 4).unwrap();
        let h = random_hermitian(4, 8);
        let basis = LindbladBasis::site_projectors(4).unwrap();
        let config = IntegratorConfig::new(1e-3, 1.0);
        let u = unitary_propagator(&h, 1.0).unwrap();
        let exact = DensityMatrix::new(
            rho0.space().clone(),
            u.matmul(rho0.matrix()).matmul_adjoint(&u),
        )
        .unwrap();
        let rec = evolve_with_reference(
            &rho0,
            &h,
            &basis,
            &CouplingSpec::diagonal_linear(0.0),
            &config,
            Some(&exact),
        )
        .unwrap();
        assert!(rec.final_state.fidelity(&exact).unwrap() >= 1.0 - 1e-8);
        assert!(*rec.fidelity_series.as_ref().unwrap().last().unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn product_state_is_a_fixed_point() {
        let rho0 = basis("000", 2).unwrap();
        let b = LindbladBasis::site_projectors(8).unwrap();
        let config = IntegratorConfig::new(1e-2, 1.0);
        let rec = evolve(&rho0, &ComplexMatrix::zeros(8), &b, &CouplingSpec::diagonal_linear(1.0), &config).unwrap();
        assert!(rec.phi_series.iter().all(|&p| p == 0.0));
        assert!(rec.final_state.matrix().max_abs_diff(rho0.matrix()) == 0.0);
    }

    #[test]
    fn ghz_initial_decay_rate() {
        let rho0 = ghz(3).unwrap();
        let b = LindbladBasis::site_projectors(8).unwrap();
        let mut config = IntegratorConfig::new(1e-4, 1e-3);
        config.record_stride = 1;
        let rec = evolve(&rho0, &ComplexMatrix::zeros(8), &b, &CouplingSpec::diagonal_linear(1.0), &config).unwrap();
        let c = &rec.coherence_series;
        let rate = (c[5].ln() - c[0].ln()) / (rec.times[5] - rec.times[0]);
        assert!((rate + 2.0).abs() < 0.1, "rate {rate}");
        assert_eq!(rec.len(), 11);
    }

    #[test]
    fn held_phi_run_and_csv() {
        let rho0 = ghz(3).unwrap();
        let b = LindbladBasis::site_projectors(8).unwrap();
        let mut config = IntegratorConfig::new(1e-2, 0.5);
        config.phi_refresh_stride = 5;
        config.record_stride = 10;
        let rec = evolve_with_reference(
            &rho0,
            &ComplexMatrix::zeros(8),
            &b,
            &CouplingSpec::diagonal_linear(1.0),
            &config,
            Some(&rho0),
        )
        .unwrap();
        assert_eq!(rec.times.len(), 6);
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "time,phi_bits,purity,coherence_l1,fidelity");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("0.000000000,2.000000000,1.000000000,1.000000000,1.000000000"));
    }

    #[test]
    fn oversized_step_reports_integration_failure() {
        let rho0 = ghz(3).unwrap();
        let b = LindbladBasis::site_projectors(8).unwrap();
        let config = IntegratorConfig::new(2.0, 10.0);
        let err = evolve(&rho0, &ComplexMatrix::zeros(8), &b, &CouplingSpec::diagonal_linear(5.0), &config)
            .unwrap_err();
        match err {
            Error::Integration { time, .. } => assert!(time > 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
