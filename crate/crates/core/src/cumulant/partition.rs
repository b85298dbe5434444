//! Set partitions of `{1, ..., m}` and the split test used by the
//! separability criteria.

use std::fmt;
use std::str::FromStr;

use crate::algebra::MultiIndex;
use crate::error::{Error, Result};

/// Largest ground-set size accepted by [`enumerate_partitions`].
pub const MAX_PARTITION_SIZE: usize = 12;

/// A partition of `{0, ..., m-1}` into non-empty disjoint blocks.
///
/// Elements are zero-based internally and one-based in `Display`/`FromStr`.
/// Blocks are sorted and ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates that `blocks` partition `{0, ..., m-1}` and normalises order.
    pub fn new(mut blocks: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let mut seen = vec![false; m];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x >= m {
                    return Err(Error::InvalidPartition(format!(
                        "site {} outside 1..={m}",
                        x + 1
                    )));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPartition(format!("site {} repeated", x + 1)));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "site {} not covered",
                missing + 1
            )));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { blocks })
    }

    /// Builds the partition from a restricted-growth string.
    fn from_growth(rgs: &[usize]) -> Self {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (x, &b) in rgs.iter().enumerate() {
            blocks[b].push(x);
        }
        Self { blocks }
    }

    /// The single-block partition of `{0, ..., m-1}`.
    pub fn whole(m: usize) -> Self {
        Self {
            blocks: vec![(0..m).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the ground set.
    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block number containing `site`.
    pub fn block_of(&self, site: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&site))
    }
}

impl fmt::Display for SetPartition {
    /// `1,2|3` style, one-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", x + 1)?;
            }
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses `1,2|3`; the ground set size is the largest site mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let block = part
                .split(',')
                .map(|t| {
                    let t = t.trim();
                    match t.parse::<usize>() {
                        Ok(x) if x >= 1 => Ok(x - 1),
                        _ => Err(Error::InvalidPartition(format!("bad site '{t}' in '{s}'"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        let m = blocks.iter().flatten().max().map_or(0, |x| x + 1);
        Self::new(blocks, m)
    }
}

/// All partitions of `{0, ..., m-1}` in lexicographic restricted-growth-string order.
pub fn enumerate_partitions(m: usize) -> Result<Vec<SetPartition>> {
    if m == 0 || m > MAX_PARTITION_SIZE {
        return Err(Error::Size(format!(
            "partition ground set size {m} outside 1..={MAX_PARTITION_SIZE}"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; m];
    // prefix_max[i] = max(rgs[0..i])
    let mut prefix_max = vec![0usize; m];
    loop {
        out.push(SetPartition::from_growth(&rgs));
        // find the rightmost position that can be incremented
        let mut i = m - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= prefix_max[i] {
                break;
            }
            i -= 1;
        }
        rgs[i] += 1;
        for j in i + 1..m {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[j - 1].max(rgs[j - 1]);
        }
    }
}

/// Whether the non-zero positions of `index` meet two or more blocks of `pi`.
pub fn splits_partition(index: &MultiIndex, pi: &SetPartition) -> bool {
    let mut hit = None;
    for (site, &digit) in index.digits().iter().enumerate() {
        if digit == 0 {
            continue;
        }
        let block = pi.block_of(site);
        match hit {
            None => hit = Some(block),
            Some(b) if b != block => return true,
            Some(_) => {}
        }
    }
    false
}

/// Parameter count of pi-separable states against the number of splitting
/// cumulant equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionCount {
    /// Real dimension of normalised pi-separable states, `sum (2 d^{|pi_i|} - 2)`.
    pub separable_dim: i128,
    /// Number of index sets that split `pi`.
    pub splitting_count: i128,
    /// `separable_dim == (2 d^n - 2) - 2 splitting_count`.
    pub identity_holds: bool,
}

pub fn separability_dimension_counts(n: usize, d: usize, pi: &SetPartition) -> DimensionCount {
    let d = d as i128;
    let pow = |k: usize| d.pow(k as u32);
    let separable_dim = pi.blocks().iter().map(|b| 2 * pow(b.len()) - 2).sum();
    let splitting_count = (pow(n) - 1) - pi.blocks().iter().map(|b| pow(b.len()) - 1).sum::<i128>();
    let identity_holds = separable_dim == (2 * pow(n) - 2) - 2 * splitting_count;
    DimensionCount {
        separable_dim,
        splitting_count,
        identity_holds,
    }
}
