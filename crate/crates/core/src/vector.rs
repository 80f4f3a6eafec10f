//! Sparse coefficient sequences over the basis `(e_i)`, `i >= 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{is_finite, NeumaierSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VectorError {
    #[error("entry {0} is zero")]
    ZeroEntry(usize),
    #[error("entry {0} is not finite")]
    NonFinite(usize),
    #[error("index {0} appears twice")]
    DuplicateIndex(usize),
    #[error("index 0 is not a basis index")]
    ZeroIndex,
    #[error("stored norm {stored} disagrees with entries ({computed})")]
    NormMismatch { stored: f64, computed: f64 },
}

/// Finite prefix of a vector in `l^2`, stored as sorted `(index, value)`
/// pairs with nonzero values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector", into = "RawVector")]
pub struct WeightedVector {
    entries: Vec<(usize, Complex64)>,
    norm_sq: f64,
}

#[derive(Serialize, Deserialize)]
struct RawVector {
    entries: Vec<(usize, f64, f64)>,
    norm_sq: f64,
}

impl From<WeightedVector> for RawVector {
    fn from(v: WeightedVector) -> Self {
        RawVector {
            entries: v.entries.iter().map(|&(i, z)| (i, z.re, z.im)).collect(),
            norm_sq: v.norm_sq,
        }
    }
}

impl TryFrom<RawVector> for WeightedVector {
    type Error = VectorError;

    fn try_from(raw: RawVector) -> Result<Self, Self::Error> {
        let v = WeightedVector::new(raw.entries.into_iter().map(|(i, re, im)| (i, Complex64::new(re, im))).collect())?;
        let tol = 1e-12 * v.norm_sq.max(f64::MIN_POSITIVE);
        if (v.norm_sq - raw.norm_sq).abs() > tol {
            return Err(VectorError::NormMismatch {
                stored: raw.norm_sq,
                computed: v.norm_sq,
            });
        }
        Ok(v)
    }
}

impl WeightedVector {
    /// Build from arbitrary-order entries; rejects zeros, repeats and index 0.
    pub fn new(mut entries: Vec<(usize, Complex64)>) -> Result<Self, VectorError> {
        entries.sort_by_key(|e| e.0);
        for (k, &(i, z)) in entries.iter().enumerate() {
            if i == 0 {
                return Err(VectorError::ZeroIndex);
            }
            if k > 0 && entries[k - 1].0 == i {
                return Err(VectorError::DuplicateIndex(i));
            }
            if !is_finite(z) {
                return Err(VectorError::NonFinite(i));
            }
            if z == Complex64::new(0.0, 0.0) {
                return Err(VectorError::ZeroEntry(i));
            }
        }
        let norm_sq = squared_norm(&entries);
        Ok(Self { entries, norm_sq })
    }

    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            norm_sq: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at basis index `i` (zero when absent).
    pub fn get(&self, i: usize) -> Complex64 {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .map_or(Complex64::new(0.0, 0.0), |k| self.entries[k].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    /// Largest stored index.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    /// Restriction to indices `<= n`.
    pub fn prefix(&self, n: usize) -> WeightedVector {
        let end = self.entries.partition_point(|e| e.0 <= n);
        let entries = self.entries[..end].to_vec();
        let norm_sq = squared_norm(&entries);
        Self { entries, norm_sq }
    }

    /// Dense copy of entries `1..=n` (zeros where absent).
    pub fn to_dense(&self, n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for &(i, z) in self.entries.iter().take_while(|e| e.0 <= n) {
            out[i - 1] = z;
        }
        out
    }
}

fn squared_norm(entries: &[(usize, Complex64)]) -> f64 {
    let mut s = NeumaierSum::new();
    for &(_, z) in entries {
        s += z.norm_sqr();
    }
    s.sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn construction_and_lookup() {
        let v = WeightedVector::new(vec![(3, c(0.5)), (1, c(2.0))]).unwrap();
        assert_eq!(v.get(1), c(2.0));
        assert_eq!(v.get(2), c(0.0));
        assert_eq!(v.norm_sq(), 4.25);
        assert_eq!(v.to_dense(3), vec![c(2.0), c(0.0), c(0.5)]);
        assert_eq!(v.prefix(2).norm_sq(), 4.0);
    }

    #[test]
    fn rejects_bad_entries() {
        assert_eq!(WeightedVector::new(vec![(1, c(0.0))]), Err(VectorError::ZeroEntry(1)));
        assert_eq!(
            WeightedVector::new(vec![(2, c(1.0)), (2, c(1.0))]),
            Err(VectorError::DuplicateIndex(2))
        );
        assert_eq!(WeightedVector::new(vec![(0, c(1.0))]), Err(VectorError::ZeroIndex));
    }

    #[test]
    fn json_round_trip() {
        let v = WeightedVector::new(vec![(1, Complex64::new(0.1, -0.2)), (4, c(3.0))]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.starts_with("{\"entries\":[[1,0.1,-0.2]"));
        let back: WeightedVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let bad = s.replace("\"norm_sq\":", "\"norm_sq\":1");
        assert!(serde_json::from_str::<WeightedVector>(&bad).is_err());
    }
}
