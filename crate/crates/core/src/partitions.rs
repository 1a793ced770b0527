//! Integer partitions of N, their realization as qubit blocks, and the
//! entanglement index `E = N - p`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statecore::QubitSet;

/// Largest `n` accepted by the partition enumerator and counter.
pub const PARTITION_CAP: usize = 40;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > PARTITION_CAP {
        return Err(Error::OutOfRange {
            value: n,
            min: 1,
            max: PARTITION_CAP,
        });
    }
    Ok(())
}

/// Non-increasing sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IntegerPartition(Vec<usize>);

impl IntegerPartition {
    /// Accepts parts that are already non-increasing and positive.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a zero part"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not non-increasing"
            )));
        }
        Ok(Self(parts))
    }

    /// Sorts arbitrary positive parts into canonical order.
    pub fn from_parts(mut parts: Vec<usize>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// N, the integer being partitioned.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// p, the number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<usize>> for IntegerPartition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<IntegerPartition> for Vec<usize> {
    fn from(p: IntegerPartition) -> Self {
        p.0
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, part) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{part}")?;
        }
        f.write_str("]")
    }
}

/// Disjoint qubit blocks covering `0..N`, kept sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n_qubits: usize,
    blocks: Vec<QubitSet>,
}

impl SetPartition {
    pub fn new(n_qubits: usize, mut blocks: Vec<QubitSet>) -> Result<Self> {
        let mut seen = vec![false; n_qubits];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            b.check_within(n_qubits)?;
            for &q in b.members() {
                if std::mem::replace(&mut seen[q], true) {
                    return Err(Error::InvalidPartition(format!(
                        "qubit {q} is in two blocks"
                    )));
                }
            }
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("qubit {q} is not covered")));
        }
        blocks.sort();
        Ok(Self { n_qubits, blocks })
    }

    /// Blocks laid out left to right in the order of `shape`'s parts.
    pub fn contiguous(shape: &IntegerPartition) -> Self {
        let mut start = 0;
        let blocks = shape
            .parts()
            .iter()
            .map(|&w| {
                let b = QubitSet::from_sorted((start..start + w).collect());
                start += w;
                b
            })
            .collect();
        Self {
            n_qubits: shape.total(),
            blocks,
        }
    }

    pub fn singletons(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            blocks: (0..n_qubits)
                .map(|q| QubitSet::from_sorted(vec![q]))
                .collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn blocks(&self) -> &[QubitSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, qubit: usize) -> Option<&QubitSet> {
        self.blocks.iter().find(|b| b.contains(qubit))
    }

    /// Relabels every qubit `q -> perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        crate::statecore::check_permutation(perm, self.n_qubits)?;
        Self::new(
            self.n_qubits,
            self.blocks.iter().map(|b| b.map(perm)).collect(),
        )
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.members().to_vec()).collect()
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_vecs().serialize(serializer)
    }
}

/// The entanglement index E.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexValue(pub usize);

impl IndexValue {
    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Iterator over the partitions of `n` in reverse-lexicographic order.
#[derive(Debug, Clone)]
pub struct Partitions {
    next: Option<Vec<usize>>,
}

impl Partitions {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            next: Some(vec![n]),
        })
    }
}

impl Iterator for Partitions {
    type Item = IntegerPartition;

    fn next(&mut self) -> Option<IntegerPartition> {
        let current = self.next.take()?;
        // Successor: decrement the rightmost part > 1 and refill the freed
        // amount (that part's unit plus all trailing ones) greedily.
        if let Some(k) = current.iter().rposition(|&x| x > 1) {
            let mut succ = current[..=k].to_vec();
            succ[k] -= 1;
            let cap = succ[k];
            let mut rest = current.len() - k;
            while rest > 0 {
                let take = rest.min(cap);
                succ.push(take);
                rest -= take;
            }
            self.next = Some(succ);
        }
        Some(IntegerPartition(current))
    }
}

/// All partitions of `n`, from `[n]` down to `[1, 1, ..., 1]`.
pub fn enumerate_partitions(n: usize) -> Result<Vec<IntegerPartition>> {
    Ok(Partitions::new(n)?.collect())
}

/// p(n) by Euler's pentagonal-number recurrence.
pub fn partition_count(n: usize) -> Result<u64> {
    check_n(n)?;
    let mut table = vec![0i64; n + 1];
    table[0] = 1;
    for i in 1..=n {
        let mut sum = 0i64;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            sum += sign * table[i - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= i {
                sum += sign * table[i - g2];
            }
        }
        table[i] = sum;
    }
    Ok(table[n] as u64)
}

/// Block sizes of `sp`, non-increasing.
pub fn shape_of(sp: &SetPartition) -> IntegerPartition {
    let mut sizes: Vec<usize> = sp.blocks().iter().map(QubitSet::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    IntegerPartition(sizes)
}

/// `E = sum_j (n_j - 1) = N - p`.
pub fn index_of(partition: &IntegerPartition) -> IndexValue {
    let per_block: usize = partition.parts().iter().map(|n_j| n_j - 1).sum();
    let global = partition.total() - partition.len();
    assert_eq!(per_block, global, "index formulas disagree for {partition}");
    IndexValue(global)
}

/// `{ index_of(l) : l partitions n }`.
pub fn class_spectrum(n: usize) -> Result<BTreeSet<IndexValue>> {
    Ok(Partitions::new(n)?.map(|p| index_of(&p)).collect())
}
