//! Set partitions of site indices.
//!
//! Enumeration follows restricted-growth strings in lexicographic order,
//! with the string written from the last site to the first. For three
//! sites that yields `0|1,2`, `0,2|1`, `0,1|2`, `0|1|2`, so partitions that
//! split off low-numbered sites come first and win ties downstream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest site count accepted by the exhaustive enumerators by default.
pub const DEFAULT_MAX_SITES: usize = 12;

/// A division of `0..n_sites` into at least two disjoint non-empty blocks.
///
/// Blocks are sorted internally and ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        if blocks.len() < 2 {
            return Err(Error::arg("a partition needs at least two blocks"));
        }
        if blocks.iter().any(Vec::is_empty) {
            return Err(Error::arg("partition blocks must be non-empty"));
        }
        blocks.sort_by_key(|b| b[0]);
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for &s in blocks.iter().flatten() {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(Error::arg(format!(
                    "blocks {blocks:?} do not partition 0..{n} exactly"
                )));
            }
        }
        Ok(Partition { blocks })
    }

    /// From a block label per site. Labels need not be restricted-growth.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
        for (site, &label) in labels.iter().enumerate() {
            match blocks.iter_mut().find(|(l, _)| *l == label) {
                Some((_, b)) => b.push(site),
                None => blocks.push((label, vec![site])),
            }
        }
        Self::new(blocks.into_iter().map(|(_, b)| b).collect())
    }

    /// Every site in its own block.
    pub fn finest(n_sites: usize) -> Result<Self> {
        Self::new((0..n_sites).map(|s| vec![s]).collect())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_sites(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_bipartition(&self) -> bool {
        self.blocks.len() == 2
    }

    /// Block membership as bit masks; requires fewer than 64 sites.
    pub fn block_masks(&self) -> Vec<u64> {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &s| m | (1u64 << s)))
            .collect()
    }

    /// Sites listed block by block.
    pub fn site_order(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, s) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|idx| {
                        idx.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::arg(format!("bad site index {idx:?} in {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(blocks)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_sites(n_sites: usize, max_sites: usize) -> Result<()> {
    if n_sites < 2 || n_sites > max_sites {
        return Err(Error::capacity(format!(
            "partition enumeration supports 2..={max_sites} sites, got {n_sites}"
        )));
    }
    Ok(())
}

/// Restricted-growth-string generator over all set partitions of `n` sites
/// with at least two blocks.
#[derive(Clone, Debug)]
pub struct PartitionIter {
    // growth[k] labels site n-1-k
    growth: Vec<usize>,
    // running maximum of growth[..=k]
    prefix_max: Vec<usize>,
    done: bool,
}

impl PartitionIter {
    fn new(n: usize) -> Self {
        PartitionIter {
            growth: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        }
    }

    /// Advances to the lexicographic successor; false once exhausted.
    fn advance(&mut self) -> bool {
        let n = self.growth.len();
        for k in (1..n).rev() {
            if self.growth[k] <= self.prefix_max[k - 1] {
                self.growth[k] += 1;
                self.prefix_max[k] = self.prefix_max[k - 1].max(self.growth[k]);
                for j in k + 1..n {
                    self.growth[j] = 0;
                    self.prefix_max[j] = self.prefix_max[k];
                }
                return true;
            }
        }
        false
    }

    fn current(&self) -> Partition {
        let n = self.growth.len();
        let labels: Vec<usize> = (0..n).map(|site| self.growth[n - 1 - site]).collect();
        Partition::from_labels(&labels).expect("growth string has at least two blocks")
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done || !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

/// All partitions of `n_sites` sites into two or more blocks
/// (Bell(n) − 1 of them), in enumeration order.
pub fn enumerate_partitions(n_sites: usize) -> Result<PartitionIter> {
    enumerate_partitions_with_limit(n_sites, DEFAULT_MAX_SITES)
}

pub fn enumerate_partitions_with_limit(n_sites: usize, max_sites: usize) -> Result<PartitionIter> {
    check_sites(n_sites, max_sites)?;
    Ok(PartitionIter::new(n_sites))
}

/// The 2^(n−1) − 1 two-block partitions, in the same relative order as
/// [`enumerate_partitions`].
pub fn bipartitions_only(n_sites: usize) -> Result<impl Iterator<Item = Partition>> {
    bipartitions_only_with_limit(n_sites, DEFAULT_MAX_SITES)
}

pub fn bipartitions_only_with_limit(
    n_sites: usize,
    max_sites: usize,
) -> Result<impl Iterator<Item = Partition>> {
    check_sites(n_sites, max_sites)?;
    let n = n_sites;
    // A binary growth string is the bit pattern of `code` over positions 1..n.
    Ok((1u64..(1u64 << (n - 1))).map(move |code| {
        let labels: Vec<usize> = (0..n)
            .map(|site| {
                let k = n - 1 - site;
                if k == 0 {
                    0
                } else {
                    ((code >> (n - 1 - k)) & 1) as usize
                }
            })
            .collect();
        Partition::from_labels(&labels).expect("two blocks")
    }))
}

/// Bell numbers by the Bell triangle.
pub fn bell_number(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    row[0]
}
