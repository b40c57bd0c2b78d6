use crate::bbox::BoundingBox;
use crate::error::{Error, Result};

pub const EMBED_DIM: usize = 64;

/// Unit-norm appearance vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Embedding([f64; EMBED_DIM]);

impl Embedding {
    /// Normalizes `raw` to unit Euclidean length.
    pub fn new(raw: [f64; EMBED_DIM]) -> Result<Self> {
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-12) || !norm.is_finite() {
            return Err(Error::DegenerateEmbedding);
        }
        let mut out = raw;
        for v in &mut out {
            *v /= norm;
        }
        Ok(Self(out))
    }

    pub fn as_array(&self) -> &[f64; EMBED_DIM] {
        &self.0
    }

    /// Euclidean distance; unit-norm operands keep this in [0, 2].
    pub fn distance(&self, other: &Embedding) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Renormalized arithmetic mean. Fails when the summands cancel.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a Embedding>) -> Result<Embedding> {
        let mut acc = [0.0; EMBED_DIM];
        let mut n = 0usize;
        for e in items {
            for (a, v) in acc.iter_mut().zip(e.0.iter()) {
                *a += v;
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::DegenerateEmbedding);
        }
        Embedding::new(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub frame: u32,
    pub bbox: BoundingBox,
    pub confidence: f64,
    pub embedding: Option<Embedding>,
}
