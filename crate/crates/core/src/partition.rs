//! Partitions of the mode set {1..N} into disjoint blocks, canonical
//! encoding, refinement, and enumeration of bipartitions and full partition
//! lattices.
//!
//! Canonical form: each block sorted ascending, blocks ordered by their
//! smallest element. The `Display` encoding ("1,2|3") is used as the
//! partition key in every JSON report.

use std::fmt;

use crate::Error;

/// A partition of {1..n_modes} into disjoint nonempty blocks, stored in
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModePartition {
    n_modes: usize,
    blocks: Vec<Vec<usize>>,
}

impl ModePartition {
    /// Build from blocks of 1-based mode indices; validates disjointness and
    /// coverage, then canonicalizes.
    pub fn new(n_modes: usize, blocks: Vec<Vec<usize>>) -> Result<Self, Error> {
        let mut seen = vec![false; n_modes + 1];
        let mut count = 0;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &m in block {
                if m == 0 || m > n_modes {
                    return Err(Error::ModeOutOfRange { mode: m, n_modes });
                }
                if seen[m] {
                    return Err(Error::InvalidPartition(format!("mode {m} appears twice")));
                }
                seen[m] = true;
                count += 1;
            }
        }
        if count != n_modes {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {count} of {n_modes} modes"
            )));
        }
        let mut blocks = blocks;
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(ModePartition { n_modes, blocks })
    }

    /// The two-block partition {block, complement}.
    pub fn bipartition(n_modes: usize, block: &[usize]) -> Result<Self, Error> {
        let mut in_block = vec![false; n_modes + 1];
        for &m in block {
            if m == 0 || m > n_modes {
                return Err(Error::ModeOutOfRange { mode: m, n_modes });
            }
            in_block[m] = true;
        }
        let a: Vec<usize> = (1..=n_modes).filter(|&m| in_block[m]).collect();
        let b: Vec<usize> = (1..=n_modes).filter(|&m| !in_block[m]).collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidPartition(
                "a bipartition needs a proper nonempty subset".into(),
            ));
        }
        ModePartition::new(n_modes, vec![a, b])
    }

    /// Every mode in its own block.
    pub fn singletons(n_modes: usize) -> Self {
        ModePartition {
            n_modes,
            blocks: (1..=n_modes).map(|m| vec![m]).collect(),
        }
    }

    /// All modes in one block.
    pub fn single_block(n_modes: usize) -> Self {
        ModePartition {
            n_modes,
            blocks: vec![(1..=n_modes).collect()],
        }
    }

    pub(crate) fn from_mask(n_modes: usize, mask: u64) -> Self {
        let a: Vec<usize> = (1..=n_modes)
            .filter(|&m| mask & (1 << (m - 1)) != 0)
            .collect();
        let b: Vec<usize> = (1..=n_modes)
            .filter(|&m| mask & (1 << (m - 1)) == 0)
            .collect();
        debug_assert!(!a.is_empty() && !b.is_empty());
        // mode 1 is always in the mask, so [a, b] is already canonical
        ModePartition {
            n_modes,
            blocks: vec![a, b],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_bipartition(&self) -> bool {
        self.blocks.len() == 2
    }

    /// True iff every block of `self` is contained in a block of `other`.
    pub fn refines(&self, other: &ModePartition) -> bool {
        if self.n_modes != other.n_modes {
            return false;
        }
        let mut block_of = vec![0usize; self.n_modes + 1];
        for (idx, block) in other.blocks.iter().enumerate() {
            for &m in block {
                block_of[m] = idx;
            }
        }
        self.blocks
            .iter()
            .all(|block| block.iter().all(|&m| block_of[m] == block_of[block[0]]))
    }
}

impl fmt::Display for ModePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, m) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

/// Bitmasks over modes (bit m−1 set ⇔ mode m in the first block) for the
/// 2^{n−1} − 1 bipartitions of {1..n}. Mode 1 is always in the first block,
/// which makes the encoding canonical.
pub(crate) fn bipartition_masks(n_modes: usize) -> impl Iterator<Item = u64> {
    debug_assert!((2..=63).contains(&n_modes));
    let half = 1u64 << (n_modes - 1);
    // raw enumerates subsets of {2..n} joined to mode 1; raw = half−1 would
    // put every mode in one block and is skipped.
    (0..half - 1).map(|raw| (raw << 1) | 1)
}

/// All bipartitions of {1..n_modes}, in canonical mask order.
pub fn bipartitions(n_modes: usize) -> impl Iterator<Item = ModePartition> {
    bipartition_masks(n_modes).map(move |mask| ModePartition::from_mask(n_modes, mask))
}

/// Number of bipartitions: 2^{n−1} − 1.
pub fn bipartition_count(n_modes: usize) -> usize {
    (1usize << (n_modes - 1)) - 1
}

/// All partitions of {1..n_modes}, enumerated through restricted-growth
/// strings. Intended for small n (the count is the Bell number).
pub fn partitions(n_modes: usize) -> Partitions {
    Partitions {
        rgs: vec![0; n_modes],
        done: false,
        fresh: true,
    }
}

pub struct Partitions {
    rgs: Vec<usize>,
    done: bool,
    fresh: bool,
}

impl Iterator for Partitions {
    type Item = ModePartition;

    fn next(&mut self) -> Option<ModePartition> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.current());
        }
        // advance the restricted-growth string: rgs[i] may rise to
        // 1 + max(rgs[..i])
        let n = self.rgs.len();
        let mut i = n;
        loop {
            if i == 1 {
                self.done = true;
                return None;
            }
            i -= 1;
            let max_prefix = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= max_prefix {
                self.rgs[i] += 1;
                for j in i + 1..n {
                    self.rgs[j] = 0;
                }
                return Some(self.current());
            }
        }
    }
}

impl Partitions {
    fn current(&self) -> ModePartition {
        let n = self.rgs.len();
        let n_blocks = self.rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut blocks = vec![Vec::new(); n_blocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        ModePartition { n_modes: n, blocks }
    }
}
