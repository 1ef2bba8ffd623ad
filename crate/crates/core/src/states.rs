//! Benchmark states and seeded random ensembles.
//!
//! Basis labels put site 0 in the most significant digit, so `|100⟩` is
//! index 4 on three qubits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::densemat::{ComplexMatrix, DensityMatrix, SitedSpace, StateJson, C64};
use crate::error::{Error, Result};

fn require_sites(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!("need at least 2 sites, got {n}")));
    }
    Ok(())
}

/// (|0…0⟩ + |1…1⟩)/√2 on `n` qubits.
pub fn ghz(n: usize) -> Result<DensityMatrix> {
    require_sites(n)?;
    let space = SitedSpace::qubits(n)?;
    let mut amp = vec![C64::new(0.0, 0.0); space.total_dim()];
    amp[0] = C64::new(1.0, 0.0);
    amp[space.total_dim() - 1] = C64::new(1.0, 0.0);
    DensityMatrix::pure(space, &amp)
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w(n: usize) -> Result<DensityMatrix> {
    require_sites(n)?;
    dicke(n, 1)
}

/// Symmetric state with `k` excitations on `n` qubits.
pub fn dicke(n: usize, k: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::arg("dicke state needs at least one site"));
    }
    if k > n {
        return Err(Error::arg(format!("excitation count {k} exceeds {n} sites")));
    }
    let space = SitedSpace::qubits(n)?;
    let amp: Vec<C64> = (0..space.total_dim())
        .map(|i| {
            if (i as u64).count_ones() as usize == k {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    DensityMatrix::pure(space, &amp)
}

/// Computational basis state from one digit per site (`0-9a-z`).
pub fn basis(label: &str, local_dim: usize) -> Result<DensityMatrix> {
    let digits = label
        .chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as usize)
                .filter(|&d| d < local_dim)
                .ok_or_else(|| Error::arg(format!("'{c}' is not a level of a {local_dim}-level site")))
        })
        .collect::<Result<Vec<_>>>()?;
    let space = SitedSpace::new(vec![local_dim; digits.len()])?;
    let index = digits.iter().fold(0, |acc, &d| acc * local_dim + d);
    let mut amp = vec![C64::new(0.0, 0.0); space.total_dim()];
    amp[index] = C64::new(1.0, 0.0);
    DensityMatrix::pure(space, &amp)
}

/// Product of single-site pure states. Each character is a basis level,
/// `+` (uniform superposition) or `-` (qubits only: (|0⟩ − |1⟩)/√2).
pub fn product(label: &str, local_dim: usize) -> Result<DensityMatrix> {
    let factors = label
        .chars()
        .map(|c| site_vector(c, local_dim))
        .collect::<Result<Vec<_>>>()?;
    let space = SitedSpace::new(vec![local_dim; factors.len()])?;
    let mut amp = vec![C64::new(1.0, 0.0)];
    for f in &factors {
        amp = amp
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    DensityMatrix::pure(space, &amp)
}

fn site_vector(c: char, d: usize) -> Result<Vec<C64>> {
    let norm = 1.0 / (d as f64).sqrt();
    match c {
        '+' => Ok(vec![C64::new(norm, 0.0); d]),
        '-' if d == 2 => Ok(vec![C64::new(norm, 0.0), C64::new(-norm, 0.0)]),
        _ => {
            let level = c
                .to_digit(36)
                .map(|l| l as usize)
                .filter(|&l| l < d)
                .ok_or_else(|| Error::arg(format!("'{c}' is not a valid site label for dimension {d}")))?;
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[level] = C64::new(1.0, 0.0);
            Ok(v)
        }
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Projector onto a Haar-random unit vector.
pub fn random_pure(n: usize, local_dim: usize, seed: u64) -> Result<DensityMatrix> {
    let space = SitedSpace::new(vec![local_dim; n])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp: Vec<C64> = (0..space.total_dim()).map(|_| complex_normal(&mut rng)).collect();
    DensityMatrix::pure(space, &amp)
}

/// G G† / Tr(G G†) with G a dim × rank complex Gaussian matrix.
pub fn random_mixed(n: usize, local_dim: usize, seed: u64, rank: usize) -> Result<DensityMatrix> {
    let space = SitedSpace::new(vec![local_dim; n])?;
    let dim = space.total_dim();
    if rank == 0 || rank > dim {
        return Err(Error::arg(format!("rank {rank} outside 1..={dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<C64> = (0..dim * rank).map(|_| complex_normal(&mut rng)).collect();
    let m = ComplexMatrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    });
    DensityMatrix::normalized(space, m)
}

/// GUE-style random Hermitian matrix (G + G†)/2, entries standard normal.
pub fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(dim, |_, _| complex_normal(&mut rng)).hermitian_part()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ghz,
    W,
    Dicke,
    Basis,
    Product,
    RandomPure,
    RandomMixed,
    Custom,
}

impl StateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateKind::Ghz => "ghz",
            StateKind::W => "w",
            StateKind::Dicke => "dicke",
            StateKind::Basis => "basis",
            StateKind::Product => "product",
            StateKind::RandomPure => "random_pure",
            StateKind::RandomMixed => "random_mixed",
            StateKind::Custom => "custom",
        }
    }
}

/// Kind-specific parameters; unused ones are left out.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<StateJson>,
}

/// Declarative description of a state, resolved with [`StateSpec::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: StateKind,
    #[serde(default)]
    pub n_sites: usize,
    #[serde(default = "default_local_dim")]
    pub local_dim: usize,
    #[serde(default)]
    pub params: StateParams,
}

fn default_local_dim() -> usize {
    2
}

impl StateSpec {
    pub fn new(kind: StateKind, n_sites: usize) -> Self {
        StateSpec {
            kind,
            n_sites,
            local_dim: 2,
            params: StateParams::default(),
        }
    }

    pub fn ghz(n: usize) -> Self {
        Self::new(StateKind::Ghz, n)
    }

    pub fn w(n: usize) -> Self {
        Self::new(StateKind::W, n)
    }

    pub fn basis(label: &str) -> Self {
        let mut s = Self::new(StateKind::Basis, label.chars().count());
        s.params.basis = Some(label.to_string());
        s
    }

    pub fn product(label: &str) -> Self {
        let mut s = Self::new(StateKind::Product, label.chars().count());
        s.params.basis = Some(label.to_string());
        s
    }

    /// Resolves with `fallback_seed` for random kinds that carry no seed.
    pub fn resolve_with_seed(&self, fallback_seed: u64) -> Result<DensityMatrix> {
        let qubits_only = |what: &str| -> Result<()> {
            if self.local_dim != 2 {
                return Err(Error::arg(format!("{what} states are defined on qubits only")));
            }
            Ok(())
        };
        let label = || {
            self.params
                .basis
                .as_deref()
                .ok_or_else(|| Error::arg(format!("{} state needs params.basis", self.kind.as_str())))
        };
        let check_len = |label: &str| -> Result<()> {
            let len = label.chars().count();
            if self.n_sites != 0 && len != self.n_sites {
                return Err(Error::arg(format!(
                    "label {label:?} has {len} sites, n_sites is {}",
                    self.n_sites
                )));
            }
            Ok(())
        };
        let seed = self.params.seed.unwrap_or(fallback_seed);
        match self.kind {
            StateKind::Ghz => {
                qubits_only("ghz")?;
                ghz(self.n_sites)
            }
            StateKind::W => {
                qubits_only("w")?;
                w(self.n_sites)
            }
            StateKind::Dicke => {
                qubits_only("dicke")?;
                let k = self
                    .params
                    .k
                    .ok_or_else(|| Error::arg("dicke state needs params.k"))?;
                dicke(self.n_sites, k)
            }
            StateKind::Basis => {
                let l = label()?;
                check_len(l)?;
                basis(l, self.local_dim)
            }
            StateKind::Product => {
                let l = label()?;
                check_len(l)?;
                product(l, self.local_dim)
            }
            StateKind::RandomPure => random_pure(self.n_sites, self.local_dim, seed),
            StateKind::RandomMixed => {
                let rank = self.params.rank.unwrap_or(usize::pow(self.local_dim, self.n_sites as u32));
                random_mixed(self.n_sites, self.local_dim, seed, rank)
            }
            StateKind::Custom => {
                let json = self
                    .params
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::arg("custom state needs params.matrix"))?;
                DensityMatrix::from_json(json)
            }
        }
    }

    pub fn resolve(&self) -> Result<DensityMatrix> {
        self.resolve_with_seed(0)
    }
}
