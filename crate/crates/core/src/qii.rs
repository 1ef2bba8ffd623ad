//! Quantum integrated information Φ(ρ): the smallest relative entropy
//! between ρ and the product of its block marginals, over site partitions.
//!
//! Values come from the identity S(ρ‖⊗ρᵢ) = Σᵢ S(ρᵢ) − S(ρ). Every distinct
//! block is traced and diagonalised once per state, then shared by all
//! partitions containing it.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densemat::{ComplexMatrix, DensityMatrix, SitedSpace};
use crate::entropy::{block_entropy, matrix_entropy, NEGATIVE_CLAMP};
use crate::error::{Error, Result};
use crate::partitions::{bipartitions_only, enumerate_partitions, Partition, DEFAULT_MAX_SITES};

/// Below this many blocks the entropies are computed on the calling thread.
const PARALLEL_THRESHOLD: usize = 64;

/// Which partitions the infimum ranges over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    AllPartitions,
    Bipartitions,
    /// Greedy hill climbing from the finest partition by merging blocks and
    /// moving single sites. Usable beyond the exhaustive site limit.
    Heuristic,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::AllPartitions => "all_partitions",
            Strategy::Bipartitions => "bipartitions",
            Strategy::Heuristic => "heuristic",
        }
    }
}

/// One row of the per-partition table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub partition: Partition,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiiResult {
    pub phi_bits: f64,
    pub mip: Partition,
    pub strategy: Strategy,
    pub table: Vec<TableEntry>,
}

/// A reusable search over a fixed site count and strategy.
///
/// Building the partition list once lets the integrator evaluate Φ at every
/// stage without re-enumerating.
#[derive(Clone, Debug)]
pub struct QiiSearch {
    n_sites: usize,
    strategy: Strategy,
    partitions: Vec<Partition>,
    // per partition, indices into `blocks`
    layout: Vec<Vec<usize>>,
    blocks: Vec<Vec<usize>>,
}

impl QiiSearch {
    pub fn new(n_sites: usize, strategy: Strategy) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::arg(
                "integrated information needs at least two sites to partition",
            ));
        }
        let partitions: Vec<Partition> = match strategy {
            Strategy::AllPartitions => enumerate_partitions(n_sites)?.collect(),
            Strategy::Bipartitions => bipartitions_only(n_sites)?.collect(),
            Strategy::Heuristic => {
                if n_sites >= 64 {
                    return Err(Error::capacity("heuristic search supports fewer than 64 sites"));
                }
                Vec::new()
            }
        };
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut blocks = Vec::new();
        let layout = partitions
            .iter()
            .map(|p| {
                p.blocks()
                    .iter()
                    .map(|b| {
                        *index.entry(b.clone()).or_insert_with(|| {
                            blocks.push(b.clone());
                            blocks.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(QiiSearch {
            n_sites,
            strategy,
            partitions,
            layout,
            blocks,
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<QiiResult> {
        self.evaluate_matrix(rho.space(), rho.matrix())
    }

    /// Same as [`evaluate`](Self::evaluate) on a raw Hermitian matrix.
    pub(crate) fn evaluate_matrix(&self, space: &SitedSpace, mat: &ComplexMatrix) -> Result<QiiResult> {
        if space.n_sites() != self.n_sites {
            return Err(Error::arg(format!(
                "search built for {} sites, state has {}",
                self.n_sites,
                space.n_sites()
            )));
        }
        let whole = matrix_entropy(mat);
        let table = match self.strategy {
            Strategy::Heuristic => heuristic(space, mat, whole)?,
            _ => {
                let entropies = self.block_entropies(space, mat)?;
                self.partitions
                    .iter()
                    .zip(&self.layout)
                    .map(|(p, ids)| TableEntry {
                        partition: p.clone(),
                        value: clamp(ids.iter().map(|&b| entropies[b]).sum::<f64>() - whole),
                    })
                    .collect()
            }
        };
        let (best, _) = table
            .iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |(bi, bv), (i, e)| {
                // strict: earlier entries win ties
                if e.value < bv {
                    (i, e.value)
                } else {
                    (bi, bv)
                }
            });
        Ok(QiiResult {
            phi_bits: table[best].value.max(0.0),
            mip: table[best].partition.clone(),
            strategy: self.strategy,
            table,
        })
    }

    fn block_entropies(&self, space: &SitedSpace, mat: &ComplexMatrix) -> Result<Vec<f64>> {
        if self.blocks.len() < PARALLEL_THRESHOLD {
            self.blocks.iter().map(|b| block_entropy(space, mat, b)).collect()
        } else {
            self.blocks
                .par_iter()
                .map(|b| block_entropy(space, mat, b))
                .collect()
        }
    }
}

fn clamp(v: f64) -> f64 {
    if v < 0.0 && v >= -NEGATIVE_CLAMP {
        0.0
    } else {
        v
    }
}

/// Hill climbing over partitions. Every evaluated partition lands in the
/// returned table, in evaluation order, without repeats.
fn heuristic(space: &SitedSpace, mat: &ComplexMatrix, whole: f64) -> Result<Vec<TableEntry>> {
    let n = space.n_sites();
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut table: Vec<TableEntry> = Vec::new();
    let mut seen: HashMap<Partition, f64> = HashMap::new();

    let mut score = |p: &Partition,
                     cache: &mut HashMap<Vec<usize>, f64>,
                     table: &mut Vec<TableEntry>|
     -> Result<f64> {
        if let Some(&v) = seen.get(p) {
            return Ok(v);
        }
        let mut total = 0.0;
        for block in p.blocks() {
            let s = match cache.get(block) {
                Some(&s) => s,
                None => {
                    let s = block_entropy(space, mat, block)?;
                    cache.insert(block.clone(), s);
                    s
                }
            };
            total += s;
        }
        let v = clamp(total - whole);
        seen.insert(p.clone(), v);
        table.push(TableEntry {
            partition: p.clone(),
            value: v,
        });
        Ok(v)
    };

    let mut current = Partition::finest(n)?;
    let mut current_value = score(&current, &mut cache, &mut table)?;
    loop {
        let mut best: Option<(Partition, f64)> = None;
        for candidate in neighbours(&current) {
            let v = score(&candidate, &mut cache, &mut table)?;
            if v < current_value - 1e-12 && best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                best = Some((candidate, v));
            }
        }
        match best {
            Some((p, v)) => {
                current = p;
                current_value = v;
            }
            None => break,
        }
    }
    Ok(table)
}

/// Merges of two blocks, single-site moves between blocks and single-site
/// splits, keeping at least two blocks.
fn neighbours(p: &Partition) -> Vec<Partition> {
    let blocks = p.blocks();
    let k = blocks.len();
    let mut out = Vec::new();
    if k > 2 {
        for i in 0..k {
            for j in i + 1..k {
                let mut next: Vec<Vec<usize>> = Vec::with_capacity(k - 1);
                for (b, block) in blocks.iter().enumerate() {
                    if b == j {
                        continue;
                    }
                    let mut block = block.clone();
                    if b == i {
                        block.extend_from_slice(&blocks[j]);
                    }
                    next.push(block);
                }
                out.extend(Partition::new(next).ok());
            }
        }
    }
    for (from, block) in blocks.iter().enumerate() {
        for &site in block {
            let rest: Vec<usize> = block.iter().copied().filter(|&s| s != site).collect();
            if rest.is_empty() {
                if k <= 2 {
                    continue;
                }
            }
            for to in 0..k {
                if to == from {
                    continue;
                }
                let mut next: Vec<Vec<usize>> = blocks.to_vec();
                next[from] = rest.clone();
                next[to].push(site);
                next.retain(|b| !b.is_empty());
                out.extend(Partition::new(next).ok());
            }
            if !rest.is_empty() {
                let mut next: Vec<Vec<usize>> = blocks.to_vec();
                next[from] = rest.clone();
                next.push(vec![site]);
                out.extend(Partition::new(next).ok());
            }
        }
    }
    out
}

/// Φ(ρ) with the minimising partition and the full table.
pub fn compute_qii(rho: &DensityMatrix, strategy: Strategy) -> Result<QiiResult> {
    if rho.n_sites() < 2 {
        return Err(Error::arg(
            "integrated information is undefined for a single-site state",
        ));
    }
    if strategy != Strategy::Heuristic && rho.n_sites() > DEFAULT_MAX_SITES {
        return Err(Error::capacity(format!(
            "exhaustive search is limited to {DEFAULT_MAX_SITES} sites; use the heuristic strategy"
        )));
    }
    QiiSearch::new(rho.n_sites(), strategy)?.evaluate(rho)
}

/// Minimum table value per block count, ascending in block count, over all
/// partitions.
pub fn qii_profile(rho: &DensityMatrix) -> Result<Vec<(usize, f64)>> {
    let result = compute_qii(rho, Strategy::AllPartitions)?;
    Ok(profile_of(&result))
}

pub fn profile_of(result: &QiiResult) -> Vec<(usize, f64)> {
    let mut by_count: std::collections::BTreeMap<usize, f64> = Default::default();
    for entry in &result.table {
        let slot = by_count
            .entry(entry.partition.block_count())
            .or_insert(f64::INFINITY);
        *slot = slot.min(entry.value);
    }
    by_count.into_iter().collect()
}
