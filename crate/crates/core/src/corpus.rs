//! Seeded model generators.

use std::path::{Path, PathBuf};

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{derive_constants, Interaction, Lattice};
use crate::linalg::{self, C64};
use crate::model_file::Model;

/// Nearest-neighbour corpus. Model `i` has seed `seed + i` and
/// `sites[i % sites.len()]` sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub sites: Vec<usize>,
    /// Target `𝔧_Φ`; drawn uniformly from `[1, 4]` when absent.
    #[serde(default)]
    pub coupling: Option<f64>,
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sites.is_empty() && self.count > 0 {
            return Err(Error::Config("corpus.sites must be nonempty".into()));
        }
        if let Some(&n) = self.sites.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("corpus.sites: {n} is below 2")));
        }
        let last = self.seed.checked_add(self.count as u64);
        if last.is_none_or(|l| l > i64::MAX as u64) {
            return Err(Error::Config(format!("corpus seeds {}.. exceed the TOML integer range", self.seed)));
        }
        if let Some(j) = self.coupling {
            if !(j > 0.0 && j.is_finite()) {
                return Err(Error::Config(format!("corpus.coupling must be positive, got {j}")));
            }
        }
        Ok(())
    }

    pub fn models(&self) -> Result<Vec<Model>> {
        self.validate()?;
        (0..self.count)
            .map(|i| random_nearest_neighbour(self.sites[i % self.sites.len()], self.seed + i as u64, self.coupling))
            .collect()
    }
}

/// Open chain of `n` qubits with one random two-site Hermitian term per bond
/// (standard complex normal entries, Hermitian part), rescaled so that
/// `𝔧_Φ` equals `coupling` or a seeded draw from `[1, 4]`.
pub fn random_nearest_neighbour(n: usize, seed: u64, coupling: Option<f64>) -> Result<Model> {
    let lattice = Lattice::chain(n, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = match coupling {
        Some(j) => j,
        None => rng.random_range(1.0..=4.0),
    };
    let raw: Vec<(Vec<usize>, Mat<C64>)> = (0..n - 1).map(|i| (vec![i, i + 1], linalg::random_hermitian(&mut rng, 4))).collect();
    let j = derive_constants(&Interaction::new(&lattice, raw.clone())?, &lattice)?.strength_j;
    let terms = raw.into_iter().map(|(s, m)| (s, linalg::scaled(m.as_ref(), target / j))).collect();
    let interaction = Interaction::new(&lattice, terms)?;
    Ok(Model::new(format!("nn{n}-s{seed}"), Some(seed), lattice, interaction))
}

/// Transverse-field chain `-Σ Z_i Z_{i+1} - g Σ X_i` with a seeded
/// disorder of ±10% on each coupling; gapped for `g` away from 1.
pub fn transverse_field_chain(n: usize, field: f64, seed: u64) -> Result<Model> {
    let lattice = Lattice::chain(n, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = linalg::pauli_z();
    let zz = linalg::kron(z.as_ref(), z.as_ref());
    let x = linalg::pauli_x();
    let mut terms = Vec::with_capacity(2 * n);
    for i in 0..n - 1 {
        let c: f64 = rng.random_range(0.9..=1.1);
        terms.push((vec![i, i + 1], linalg::scaled(zz.as_ref(), -c)));
    }
    for i in 0..n {
        let c: f64 = rng.random_range(0.9..=1.1);
        terms.push((vec![i], linalg::scaled(x.as_ref(), -field * c)));
    }
    let interaction = Interaction::new(&lattice, terms)?;
    Ok(Model::new(format!("tfi{n}-g{field}-s{seed}"), Some(seed), lattice, interaction))
}

/// Writes one file per model into `dir` and returns the paths in model order.
pub fn generate_corpus(spec: &CorpusSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    let models = spec.models()?;
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(models.len());
    for m in models {
        let path = dir.join(format!("{}.toml", m.id));
        m.write(&path)?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_lands_in_range() {
        let spec = CorpusSpec { seed: 100, count: 12, sites: vec![3, 5, 8], coupling: None };
        for m in spec.models().unwrap() {
            let j = m.constants().unwrap().strength_j;
            assert!((1.0 - 1e-12..=4.0 + 1e-12).contains(&j), "{j}");
            assert_eq!(m.constants().unwrap().range_r, 1);
        }
        let fixed = random_nearest_neighbour(6, 3, Some(2.5)).unwrap();
        assert!((fixed.constants().unwrap().strength_j - 2.5).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = CorpusSpec { seed: 7, count: 3, sites: vec![4], coupling: None };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let pa = generate_corpus(&spec, a.path()).unwrap();
        let pb = generate_corpus(&spec, b.path()).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
        let empty = CorpusSpec { count: 0, ..spec };
        assert!(empty.models().unwrap().is_empty());
    }

    #[test]
    fn stored_constants_match_parsed_file() {
        let m = random_nearest_neighbour(5, 11, None).unwrap();
        let f = m.to_file(true).unwrap();
        let stored = f.constants.unwrap();
        let parsed = Model::parse(&m.to_toml().unwrap()).unwrap();
        assert_eq!(parsed.constants().unwrap(), stored);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(CorpusSpec { seed: 0, count: 2, sites: vec![], coupling: None }.models().is_err());
        assert!(CorpusSpec { seed: 0, count: 2, sites: vec![1], coupling: None }.models().is_err());
        assert!(CorpusSpec { seed: 0, count: 2, sites: vec![3], coupling: Some(-1.0) }.models().is_err());
    }
}
