//! Dense bit-packed vectors and matrices over the two-element field.

/// A bit vector of fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// Rank of a list of row vectors, by Gaussian elimination.
pub fn rank(rows: Vec<BitVec>) -> usize {
    // Pivot rows keyed by their leading column; each new row is reduced against them.
    let mut pivots: Vec<(usize, BitVec)> = Vec::new();
    let mut by_col: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for mut row in rows {
        while let Some(lead) = row.first_one() {
            match by_col.get(&lead) {
                Some(&p) => row.xor_assign(&pivots[p].1),
                None => {
                    by_col.insert(lead, pivots.len());
                    pivots.push((lead, row));
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Dimension of the homology of a chain complex given the chain ranks and
/// the ranks of the boundary maps. `boundary_ranks[i]` is the rank of
/// `d_i : C_i -> C_{i-1}` (with `boundary_ranks[0]` the rank into `C_{-1}` if any).
pub fn homology_dims(chain_dims: &[usize], boundary_ranks: &[usize]) -> Vec<usize> {
    (0..chain_dims.len())
        .map(|i| {
            let out = boundary_ranks.get(i).copied().unwrap_or(0);
            let inc = boundary_ranks.get(i + 1).copied().unwrap_or(0);
            chain_dims[i] - out - inc
        })
        .collect()
}
