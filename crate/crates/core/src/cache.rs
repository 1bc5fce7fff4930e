//! Binary cache for operators and spectral decompositions.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 8     | magic `EFHMCACH` |
//! | 4     | version (1) |
//! | 4     | endian tag `0x01020304` |
//! | 1     | kind: 1 operator, 2 spectral data |
//! | 8     | dimension `n` |
//! | ...   | payload: operator entries (column-major re, im), or `n` eigenvalues then eigenvectors (column-major re, im) |
//! | 32    | SHA-256 of everything above |

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use faer::Mat;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::operator::HermitianOperator;
use crate::spectral::{self, SpectralData};

const MAGIC: &[u8; 8] = b"EFHMCACH";
const VERSION: u32 = 1;
const ENDIAN_TAG: u32 = 0x0102_0304;
const HEADER_LEN: usize = 8 + 4 + 4 + 1 + 8;
const DIGEST_LEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Operator = 1,
    Spectral = 2,
}

fn push_matrix(buf: &mut Vec<u8>, m: faer::MatRef<'_, C64>) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            buf.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            buf.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
}

fn seal(kind: Kind, dim: usize, payload: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * dim * (dim + 1) + DIGEST_LEN);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&ENDIAN_TAG.to_le_bytes());
    buf.push(kind as u8);
    buf.extend_from_slice(&(dim as u64).to_le_bytes());
    payload(&mut buf);
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

/// Header checks and checksum; returns `(dim, payload)`.
fn open(bytes: &[u8], expect: Kind) -> Result<(usize, &[u8])> {
    if bytes.len() < HEADER_LEN + DIGEST_LEN {
        return Err(Error::Cache(format!("truncated container ({} bytes)", bytes.len())));
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    if &body[..8] != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(body[o..o + 4].try_into().unwrap());
    if u32_at(8) != VERSION {
        return Err(Error::Cache(format!("unsupported version {}", u32_at(8))));
    }
    if u32_at(12) != ENDIAN_TAG {
        return Err(Error::Cache("endian tag mismatch".into()));
    }
    if body[16] != expect as u8 {
        return Err(Error::Cache(format!("kind {} where {} was expected", body[16], expect as u8)));
    }
    let dim = u64::from_le_bytes(body[17..25].try_into().unwrap()) as usize;
    Ok((dim, &body[HEADER_LEN..]))
}

fn f64s(payload: &[u8]) -> impl Iterator<Item = f64> + '_ {
    payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()))
}

fn read_matrix(vals: &[f64], n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| {
        let k = 2 * (j * n + i);
        C64::new(vals[k], vals[k + 1])
    })
}

pub fn encode_operator(op: &HermitianOperator) -> Vec<u8> {
    seal(Kind::Operator, op.dim(), |buf| push_matrix(buf, op.matrix()))
}

pub fn decode_operator(bytes: &[u8]) -> Result<HermitianOperator> {
    let (n, payload) = open(bytes, Kind::Operator)?;
    if payload.len() != 16 * n * n {
        return Err(Error::Cache(format!("operator payload of {} bytes for dimension {n}", payload.len())));
    }
    let vals: Vec<f64> = f64s(payload).collect();
    HermitianOperator::new(read_matrix(&vals, n))
}

pub fn encode_spectral(s: &SpectralData) -> Vec<u8> {
    seal(Kind::Spectral, s.dim(), |buf| {
        for &e in s.eigenvalues() {
            buf.extend_from_slice(&e.to_le_bytes());
        }
        push_matrix(buf, s.eigenvectors());
    })
}

pub fn decode_spectral(bytes: &[u8]) -> Result<SpectralData> {
    let (n, payload) = open(bytes, Kind::Spectral)?;
    if payload.len() != 8 * n + 16 * n * n {
        return Err(Error::Cache(format!("spectral payload of {} bytes for dimension {n}", payload.len())));
    }
    let vals: Vec<f64> = f64s(payload).collect();
    let eigenvalues = vals[..n].to_vec();
    if !eigenvalues.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::Cache("eigenvalues not ascending".into()));
    }
    Ok(SpectralData::from_parts(eigenvalues, read_matrix(&vals[n..], n)))
}

/// Hex SHA-256 of the operator's entry bytes.
pub fn content_key(op: &HermitianOperator) -> String {
    let mut buf = Vec::with_capacity(16 * op.dim() * op.dim() + 8);
    buf.extend_from_slice(&(op.dim() as u64).to_le_bytes());
    push_matrix(&mut buf, op.matrix());
    hex::encode(Sha256::digest(&buf))
}

/// Spectral decompositions keyed by operator content, in memory and
/// optionally mirrored to a directory.
#[derive(Debug, Default)]
pub struct SpectralCache {
    dir: Option<PathBuf>,
    entries: HashMap<String, Arc<SpectralData>>,
    hits: usize,
    misses: usize,
}

impl SpectralCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir: Some(dir), ..Self::default() })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.spec")))
    }

    /// Cached decomposition of `op`, computing it on a miss. A corrupt file
    /// is an error rather than a silent recompute.
    pub fn get_or_compute(&mut self, op: &HermitianOperator) -> Result<Arc<SpectralData>> {
        let key = content_key(op);
        if let Some(s) = self.entries.get(&key) {
            self.hits += 1;
            return Ok(Arc::clone(s));
        }
        if let Some(path) = self.path(&key).filter(|p| p.exists()) {
            let s = Arc::new(decode_spectral(&std::fs::read(&path)?)?);
            if s.dim() != op.dim() {
                return Err(Error::Cache(format!("{} holds dimension {}", path.display(), s.dim())));
            }
            self.hits += 1;
            self.entries.insert(key, Arc::clone(&s));
            return Ok(s);
        }
        self.misses += 1;
        let s = Arc::new(spectral::eig(op)?);
        if let Some(path) = self.path(&key) {
            write_atomic(&path, &encode_spectral(&s))?;
        }
        self.entries.insert(key, Arc::clone(&s));
        Ok(s)
    }

    pub fn hits(&self) -> usize {
        self.hits
    }

    pub fn misses(&self) -> usize {
        self.misses
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn op(seed: u64, n: usize) -> HermitianOperator {
        HermitianOperator::new(random_hermitian(&mut ChaCha8Rng::seed_from_u64(seed), n)).unwrap()
    }

    #[test]
    fn round_trips_are_bit_exact() {
        let h = op(1, 6);
        let back = decode_operator(&encode_operator(&h)).unwrap();
        assert_eq!(back.max_abs_diff(&h), 0.0);
        let s = spectral::eig(&h).unwrap();
        let bytes = encode_spectral(&s);
        assert_eq!(&bytes[..8], MAGIC);
        let t = decode_spectral(&bytes).unwrap();
        assert_eq!(t.eigenvalues(), s.eigenvalues());
        assert_eq!(encode_spectral(&t), bytes);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = encode_spectral(&spectral::eig(&op(2, 4)).unwrap());
        for pos in [0, 9, 17, 40, bytes.len() - 1] {
            let mut bad = bytes.clone();
            bad[pos] ^= 0x10;
            assert!(matches!(decode_spectral(&bad), Err(Error::Cache(_))), "byte {pos}");
        }
        assert!(matches!(decode_spectral(&bytes[..10]), Err(Error::Cache(_))));
        assert!(matches!(decode_operator(&bytes), Err(Error::Cache(_))));
    }

    #[test]
    fn cache_hits_by_content() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = SpectralCache::on_disk(dir.path()).unwrap();
        let h = op(3, 5);
        let a = c.get_or_compute(&h).unwrap();
        let b = c.get_or_compute(&h.clone()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        c.get_or_compute(&h.shifted(1.0)).unwrap();
        assert_eq!((c.hits(), c.misses(), c.len()), (1, 2, 2));

        let mut fresh = SpectralCache::on_disk(dir.path()).unwrap();
        let d = fresh.get_or_compute(&h).unwrap();
        assert_eq!(d.eigenvalues(), a.eigenvalues());
        assert_eq!(fresh.misses(), 0);

        let file = dir.path().join(format!("{}.spec", content_key(&h)));
        let mut bytes = std::fs::read(&file).unwrap();
        bytes[30] ^= 1;
        std::fs::write(&file, bytes).unwrap();
        let mut again = SpectralCache::on_disk(dir.path()).unwrap();
        assert!(matches!(again.get_or_compute(&h), Err(Error::Cache(_))));
    }
}
