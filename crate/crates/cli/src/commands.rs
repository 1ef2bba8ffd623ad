use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qii_core::collapse::{evolve_with_reference, race, HalfTime, TrajectoryRecord};
use qii_core::densemat::DensityMatrix;
use qii_core::qii::profile_of;
use qii_core::{compute_qii, StateSpec, Strategy};

use crate::config::{Command, ExperimentConfig, OutputFormat};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub blocks: usize,
    pub phi_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileJson {
    pub state: StateSpec,
    pub profile: Vec<ProfilePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaceSummaryEntry {
    pub index: usize,
    pub state: StateSpec,
    pub initial_phi_bits: f64,
    pub final_phi_bits: f64,
    pub half_coherence_time: HalfTime,
    pub trajectory: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaceSummary {
    pub entries: Vec<RaceSummaryEntry>,
}

/// Files are only written once every state has been processed, so a failing
/// run leaves the output directory untouched.
struct Pending {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Pending {
    fn new() -> Self {
        Pending { files: Vec::new() }
    }

    fn push(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    fn write_all(self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in self.files {
            fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("result types serialize");
    out.push(b'\n');
    out
}

fn trajectory_bytes(record: &TrajectoryRecord, format: OutputFormat) -> Result<Vec<u8>, CliError> {
    Ok(match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            record.write_csv(&mut buf)?;
            buf
        }
        OutputFormat::Json => json_bytes(&record.to_json()),
    })
}

fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn resolve_states(config: &ExperimentConfig) -> Result<Vec<(StateSpec, DensityMatrix)>, CliError> {
    let specs = config.all_states();
    if specs.is_empty() {
        return Err(CliError::Config("config lists no states".into()));
    }
    specs
        .into_iter()
        .map(|s| {
            let rho = s.resolve_with_seed(config.seed)?;
            Ok((s, rho))
        })
        .collect()
}

pub fn run(command: Command, config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    match command {
        Command::Qii => cmd_qii(config, out_dir),
        Command::Profile => cmd_profile(config, out_dir),
        Command::Evolve => cmd_evolve(config, out_dir),
        Command::Race => cmd_race(config, out_dir),
    }
}

fn cmd_qii(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let states = resolve_states(config)?;
    let mut pending = Pending::new();
    let mut lines = Vec::new();
    for (i, (spec, rho)) in states.iter().enumerate() {
        let result = compute_qii(rho, config.strategy)?;
        lines.push(format!(
            "state={i} kind={} phi_bits={:.9} mip={}",
            spec.kind.as_str(),
            result.phi_bits,
            result.mip
        ));
        pending.push(format!("qii_{i}.json").into(), json_bytes(&result));
    }
    pending.write_all(out_dir)?;
    lines.iter().for_each(|l| println!("{l}"));
    Ok(())
}

fn cmd_profile(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let states = resolve_states(config)?;
    let mut pending = Pending::new();
    let mut lines = Vec::new();
    for (i, (spec, rho)) in states.iter().enumerate() {
        let result = compute_qii(rho, Strategy::AllPartitions)?;
        let profile: Vec<ProfilePoint> = profile_of(&result)
            .into_iter()
            .map(|(blocks, phi_bits)| ProfilePoint { blocks, phi_bits })
            .collect();
        for p in &profile {
            lines.push(format!(
                "state={i} kind={} blocks={} phi_bits={:.9}",
                spec.kind.as_str(),
                p.blocks,
                p.phi_bits
            ));
        }
        let doc = ProfileJson {
            state: spec.clone(),
            profile,
        };
        pending.push(format!("profile_{i}.json").into(), json_bytes(&doc));
    }
    pending.write_all(out_dir)?;
    lines.iter().for_each(|l| println!("{l}"));
    Ok(())
}

fn cmd_evolve(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let states = resolve_states(config)?;
    let reference = config
        .reference
        .as_ref()
        .map(|r| r.resolve_with_seed(config.seed))
        .transpose()?;
    let format = config.output.format;
    let mut pending = Pending::new();
    let mut lines = Vec::new();
    for (i, (spec, rho)) in states.iter().enumerate() {
        let h = config.hamiltonian.build(rho.space())?;
        let basis = config.basis.build(rho.dim())?;
        let record = evolve_with_reference(rho, &h, &basis, &config.coupling, &config.integrator, reference.as_ref())?;
        let last = record.len() - 1;
        lines.push(format!(
            "state={i} kind={} t={:.9} phi_bits={:.9} purity={:.9} coherence_l1={:.9}",
            spec.kind.as_str(),
            record.times[last],
            record.phi_series[last],
            record.purity_series[last],
            record.coherence_series[last]
        ));
        pending.push(
            format!("trajectory_{i}.{}", extension(format)).into(),
            trajectory_bytes(&record, format)?,
        );
    }
    pending.write_all(out_dir)?;
    lines.iter().for_each(|l| println!("{l}"));
    Ok(())
}

fn cmd_race(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let states = resolve_states(config)?;
    let specs: Vec<StateSpec> = states.iter().map(|(s, _)| s.clone()).collect();
    let space = states[0].1.space().clone();
    let h = config.hamiltonian.build(&space)?;
    let basis = config.basis.build(space.total_dim())?;
    let entries = race(&specs, &h, &basis, &config.coupling, &config.integrator, config.seed)?;

    let format = config.output.format;
    let mut pending = Pending::new();
    let mut summary = RaceSummary { entries: Vec::new() };
    let mut lines = Vec::new();
    for (i, entry) in entries.iter().enumerate() {
        let name = format!("race_{i}.{}", extension(format));
        pending.push(name.clone().into(), trajectory_bytes(&entry.record, format)?);
        let phi = &entry.record.phi_series;
        lines.push(format!(
            "state={i} kind={} initial_phi_bits={:.9} half_coherence_time={}",
            entry.spec.kind.as_str(),
            phi[0],
            entry.half_coherence_time
        ));
        summary.entries.push(RaceSummaryEntry {
            index: i,
            state: entry.spec.clone(),
            initial_phi_bits: phi[0],
            final_phi_bits: phi[phi.len() - 1],
            half_coherence_time: entry.half_coherence_time,
            trajectory: name,
        });
    }
    pending.push("race_summary.json".into(), json_bytes(&summary));
    pending.write_all(out_dir)?;
    lines.iter().for_each(|l| println!("{l}"));
    Ok(())
}
