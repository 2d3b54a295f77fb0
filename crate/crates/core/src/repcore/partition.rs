//! Young diagrams and type vectors.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A Young diagram: weakly decreasing box counts per row.
///
/// Trailing zero rows are kept, so a diagram can carry the ambient row
/// bound `d` as its length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{:?}", self.parts)
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "row lengths must be weakly decreasing, got {:?}",
                parts
            )));
        }
        Ok(Self { parts })
    }

    /// Total number of boxes.
    pub fn n(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Length including zero-padding rows.
    pub fn width(&self) -> usize {
        self.parts.len()
    }

    /// Number of nonzero rows.
    pub fn rows(&self) -> usize {
        self.parts.iter().filter(|&&p| p > 0).count()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Same diagram zero-padded or trimmed to length `d`.
    pub fn to_width(&self, d: usize) -> Result<Self> {
        if self.rows() > d {
            return Err(Error::InvalidArgument(format!(
                "{:?} has more than {} nonzero rows",
                self, d
            )));
        }
        let mut parts = self.parts.clone();
        parts.resize(d, 0);
        Partition::new(parts)
    }

    /// Row lengths normalized by the box count, padded to `d` entries.
    pub fn normalized(&self, d: usize) -> Result<Vec<f64>> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "cannot normalize the empty diagram".into(),
            ));
        }
        let padded = self.to_width(d)?;
        Ok(padded
            .parts
            .iter()
            .map(|&p| p as f64 / n as f64)
            .collect())
    }

    /// Column lengths of the diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0) as usize;
        let parts = (1..=cols)
            .map(|j| self.parts.iter().filter(|&&p| p as usize >= j).count() as u32)
            .collect();
        Partition { parts }
    }
}

/// A type vector: nonnegative outcome counts of fixed length `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    counts: Vec<u32>,
}

impl Composition {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Empirical frequency vector `counts / n`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// All type vectors of `n` outcomes over `k` symbols, lexicographically
    /// descending.
    pub fn enumerate(n: u64, k: usize) -> Result<Vec<Composition>> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(k);
        fill(n, k, &mut prefix, &mut out);
        return Ok(out);

        fn fill(rem: u64, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Composition>) {
            if slots == 1 {
                let mut counts = prefix.clone();
                counts.push(rem as u32);
                out.push(Composition::new(counts));
                return;
            }
            for c in (0..=rem).rev() {
                prefix.push(c as u32);
                fill(rem - c, slots - 1, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// All Young diagrams with `n` boxes and at most `d` rows, zero-padded to
/// length `d`, in lexicographically descending order.
pub fn enumerate_partitions(n: u64, d: usize) -> Result<Vec<Partition>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(d);
    descend(n, d, n, &mut rows, &mut out);
    return Ok(out);

    fn descend(rem: u64, slots: usize, max_row: u64, rows: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if slots == 0 {
            if rem == 0 {
                out.push(Partition { parts: rows.clone() });
            }
            return;
        }
        // A row cannot be shorter than rem/slots rounded up, or the rest
        // cannot fit under the weakly-decreasing constraint.
        let lo = rem.div_ceil(slots as u64);
        let hi = rem.min(max_row);
        for r in (lo..=hi).rev() {
            rows.push(r as u32);
            descend(rem - r, slots - 1, r, rows, out);
            rows.pop();
        }
    }
}

/// Hook length of every cell, keyed by 1-based `(row, column)`.
pub fn hook_lengths(p: &Partition) -> BTreeMap<(usize, usize), u32> {
    let conj = p.conjugate();
    let mut out = BTreeMap::new();
    for (i0, &row) in p.parts().iter().enumerate() {
        for j0 in 0..row as usize {
            let arm = row as usize - 1 - j0;
            let leg = conj.parts()[j0] as usize - 1 - i0;
            out.insert((i0 + 1, j0 + 1), (arm + leg + 1) as u32);
        }
    }
    out
}
