use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Per-rank counts of matched edges, `⟨x_1, …, x_r⟩`. The derived order is
/// lexicographic, so between equal-length signatures larger is better.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Signature(Vec<usize>);

impl Signature {
    pub fn new(counts: Vec<usize>) -> Self {
        Signature(counts)
    }

    pub fn zeros(max_rank: usize) -> Self {
        Signature(vec![0; max_rank])
    }

    /// Count at `rank` (1-based).
    pub fn at(&self, rank: usize) -> usize {
        self.0[rank - 1]
    }

    pub fn add(&mut self, rank: usize, count: usize) {
        self.0[rank - 1] += count;
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_rank(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for Signature {
    fn from(v: Vec<usize>) -> Self {
        Signature(v)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(">")
    }
}

/// Lexicographic comparison of two signatures.
///
/// `Greater` means `a` is strictly better: the first differing rank has more
/// matched edges in `a`.
pub fn lex_compare(a: &Signature, b: &Signature) -> Result<Ordering> {
    if a.0.len() != b.0.len() {
        return Err(Error::SignatureLength {
            left: a.0.len(),
            right: b.0.len(),
        });
    }
    Ok(a.0.cmp(&b.0))
}
