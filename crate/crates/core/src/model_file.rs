//! TOML interaction files.
//!
//! ```toml
//! format = "effham-interaction/1"
//! id = "corpus-0003"
//! seed = 3                       # optional
//! dimension = 1                  # lattice dimension ν
//! local_dim = 2
//! sites = [[1], [2], [3]]        # coordinates, one tuple per site
//!
//! [constants]                    # optional, recomputed on load when present
//! range_r = 1
//! strength_j = 2.5
//! locality_n = 3
//!
//! [[terms]]
//! support = [0, 1]               # indices into `sites`, first = most significant
//! entries = [[1.0, 0.0], ...]    # row-major (re, im) pairs, d^|X| squared of them
//! ```
//!
//! Floats are written in shortest round-trip form, so write → read is bit-exact.

use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{derive_constants, Interaction, InteractionConstants, Lattice};
use crate::linalg::C64;

pub const FORMAT: &str = "effham-interaction/1";

/// A lattice with an explicit term map and its provenance.
#[derive(Clone, Debug)]
pub struct Model {
    pub id: String,
    pub seed: Option<u64>,
    pub lattice: Lattice,
    pub interaction: Interaction,
}

impl Model {
    pub fn new(id: impl Into<String>, seed: Option<u64>, lattice: Lattice, interaction: Interaction) -> Self {
        Self { id: id.into(), seed, lattice, interaction }
    }

    pub fn constants(&self) -> Result<InteractionConstants> {
        derive_constants(&self.interaction, &self.lattice)
    }

    pub fn to_file(&self, store_constants: bool) -> Result<ModelFile> {
        check_seed(self.seed)?;
        let constants = if store_constants { Some(self.constants()?) } else { None };
        Ok(ModelFile {
            format: FORMAT.into(),
            id: self.id.clone(),
            seed: self.seed,
            dimension: self.lattice.dimension(),
            local_dim: self.lattice.local_dim(),
            sites: self.lattice.sites().to_vec(),
            constants,
            terms: self
                .interaction
                .terms()
                .iter()
                .map(|t| {
                    let m = t.matrix();
                    TermRecord {
                        support: t.support().to_vec(),
                        entries: (0..m.nrows())
                            .flat_map(|i| (0..m.ncols()).map(move |j| [m[(i, j)].re, m[(i, j)].im]))
                            .collect(),
                    }
                })
                .collect(),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        self.to_file(true)?.to_toml()
    }

    pub fn parse(text: &str) -> Result<Self> {
        ModelFile::parse(text)?.into_model()
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }
}

/// TOML integers are signed, so seeds must stay below `2^63`.
pub fn check_seed(seed: Option<u64>) -> Result<()> {
    match seed {
        Some(s) if s > i64::MAX as u64 => Err(Error::ModelFile(format!("seed {s} exceeds the TOML integer range"))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub support: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub dimension: usize,
    pub local_dim: usize,
    pub sites: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<InteractionConstants>,
    pub terms: Vec<TermRecord>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: ModelFile = toml::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
        if f.format != FORMAT {
            return Err(Error::ModelFile(format!("unknown format {:?}, expected {FORMAT:?}", f.format)));
        }
        Ok(f)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ModelFile(e.to_string()))
    }

    /// Builds the model; stored constants must agree with the recomputed ones.
    pub fn into_model(self) -> Result<Model> {
        if let Some(bad) = self.sites.iter().position(|s| s.len() != self.dimension) {
            return Err(Error::ModelFile(format!("site {bad} has {} coordinates, dimension is {}", self.sites[bad].len(), self.dimension)));
        }
        let lattice = Lattice::new(self.sites, self.local_dim)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (idx, t) in self.terms.into_iter().enumerate() {
            let dim = u32::try_from(t.support.len())
                .ok()
                .and_then(|k| self.local_dim.checked_pow(k))
                .ok_or_else(|| Error::ModelFile(format!("term {idx}: support too large")))?;
            if t.entries.len() != dim * dim {
                return Err(Error::ModelFile(format!("term {idx}: {} entries, expected {}", t.entries.len(), dim * dim)));
            }
            let m = Mat::from_fn(dim, dim, |i, j| {
                let [re, im] = t.entries[i * dim + j];
                C64::new(re, im)
            });
            terms.push((t.support, m));
        }
        let interaction = Interaction::new(&lattice, terms)?;
        if let Some(stored) = self.constants {
            let fresh = derive_constants(&interaction, &lattice)?;
            if fresh != stored {
                return Err(Error::ModelFile(format!("stored constants {stored:?} differ from recomputed {fresh:?}")));
            }
        }
        Ok(Model { id: self.id, seed: self.seed, lattice, interaction })
    }
}
