//! Ranking and unranking of the combinatorial objects that index shift sets:
//! k-subsets, permutations and subspaces of 𝔽_q^n.

use crate::field::{rref, PrimeField};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Lexicographic rank of a sorted k-subset of `0..m`.
pub fn subset_rank(subset: &[usize], m: usize) -> BigUint {
    let k = subset.len();
    let mut rank = BigUint::zero();
    let mut next = 0;
    let mut chosen = 0;
    for i in 0..m {
        if chosen == k {
            break;
        }
        if next < k && subset[next] == i {
            next += 1;
            chosen += 1;
        } else {
            // All subsets that take `i` here come first.
            rank += binomial((m - i - 1) as u64, (k - chosen - 1) as u64);
        }
    }
    rank
}

/// Inverse of `subset_rank`.
pub fn subset_unrank(rank: &BigUint, m: usize, k: usize) -> Vec<usize> {
    let mut rank = rank.clone();
    let mut out = Vec::with_capacity(k);
    if k == 0 {
        return out;
    }
    // c = C(n−1, r−1): subsets of the remaining n positions that take the first one.
    let mut n = m as u64;
    let mut r = k as u64;
    let mut c = binomial(n - 1, r - 1);
    for i in 0..m {
        if r == 0 {
            break;
        }
        if rank < c {
            out.push(i);
            if r == 1 {
                break;
            }
            c = c * (r - 1) / (n - 1);
            r -= 1;
        } else {
            rank -= &c;
            c = c * (n - r) / (n - 1);
        }
        n -= 1;
    }
    debug_assert_eq!(out.len(), k);
    out
}

/// Lehmer rank of a permutation of `0..L` given as its image list.
pub fn perm_rank(perm: &[usize]) -> BigUint {
    let l = perm.len();
    let mut rank = BigUint::zero();
    let mut used = vec![false; l];
    for (i, &p) in perm.iter().enumerate() {
        let smaller = (0..p).filter(|&x| !used[x]).count();
        used[p] = true;
        rank = rank * (l - i) as u64 + smaller as u64;
    }
    rank
}

/// Inverse of `perm_rank`.
pub fn perm_unrank(rank: &BigUint, l: usize) -> Vec<usize> {
    let mut digits = vec![0usize; l];
    let mut rank = rank.clone();
    for j in 0..l {
        let (q, r) = rank.div_rem(&BigUint::from(j as u64 + 1));
        digits[l - 1 - j] = r.to_usize().expect("digit fits");
        rank = q;
    }
    let mut remaining: Vec<usize> = (0..l).collect();
    digits.into_iter().map(|d| remaining.remove(d)).collect()
}

/// Number of `k`-dimensional subspaces of 𝔽_q^n, for all `n ≤ max_n`.
#[derive(Debug, Clone)]
pub struct GaussianTable {
    q: u64,
    table: Vec<Vec<BigUint>>,
}

impl GaussianTable {
    pub fn new(q: u64, max_n: usize) -> Self {
        let mut table: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for n in 1..=max_n {
            let mut row = vec![BigUint::zero(); n + 1];
            for (k, slot) in row.iter_mut().enumerate() {
                let without = if k < n { table[n - 1][k].clone() } else { BigUint::zero() };
                let with = if k > 0 {
                    BigUint::from(q).pow((n - k) as u32) * &table[n - 1][k - 1]
                } else {
                    BigUint::zero()
                };
                *slot = without + with;
            }
            table.push(row);
        }
        GaussianTable { q, table }
    }

    pub fn count(&self, n: usize, k: usize) -> BigUint {
        if k > n {
            BigUint::zero()
        } else {
            self.table[n][k].clone()
        }
    }

    /// Reduced row echelon basis of the subspace of rank `rank` among
    /// `k`-dimensional subspaces of 𝔽_q^n. Subspaces without a pivot on the
    /// first coordinate come first; otherwise the first row's free entries form
    /// the high digits.
    pub fn unrank(&self, rank: &BigUint, n: usize, k: usize) -> Vec<Vec<u32>> {
        self.unrank_from(rank.clone(), n, k)
            .into_iter()
            .map(|r| r.into_iter().collect())
            .collect()
    }

    fn unrank_from(&self, rank: BigUint, n: usize, k: usize) -> Vec<Vec<u32>> {
        if k == 0 {
            return Vec::new();
        }
        let without = self.count(n - 1, k);
        if rank < without {
            return self
                .unrank_from(rank, n - 1, k)
                .into_iter()
                .map(|row| std::iter::once(0).chain(row).collect())
                .collect();
        }
        let rest = rank - without;
        let sub = self.count(n - 1, k - 1);
        let (free_index, sub_rank) = rest.div_rem(&sub);
        let tail = self.unrank_from(sub_rank, n - 1, k - 1);
        let tail_pivots: Vec<usize> = tail
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero row"))
            .collect();
        let mut first = vec![0u32; n];
        first[0] = 1;
        let digits = to_digits(&free_index, self.q, n - k);
        let mut d = digits.into_iter();
        for c in 0..n - 1 {
            if !tail_pivots.contains(&c) {
                first[c + 1] = d.next().expect("enough free digits");
            }
        }
        let mut out = vec![first];
        out.extend(tail.into_iter().map(|row| std::iter::once(0).chain(row).collect()));
        out
    }

    /// Rank of the span of `vectors` (which must be `k` independent vectors of length `n`).
    pub fn rank_of(&self, vectors: &[Vec<u32>], field: &PrimeField) -> BigUint {
        let basis = rref(vectors, field);
        let n = vectors.first().map_or(0, |v| v.len());
        self.rank_rref(&basis, n)
    }

    fn rank_rref(&self, basis: &[Vec<u32>], n: usize) -> BigUint {
        let k = basis.len();
        if k == 0 {
            return BigUint::zero();
        }
        let strip = |rows: &[Vec<u32>]| -> Vec<Vec<u32>> { rows.iter().map(|r| r[1..].to_vec()).collect() };
        if basis[0][0] == 0 {
            return self.rank_rref(&strip(basis), n - 1);
        }
        let tail = strip(&basis[1..]);
        let sub_rank = self.rank_rref(&tail, n - 1);
        let tail_pivots: Vec<usize> = tail
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero row"))
            .collect();
        let digits: Vec<u32> = (0..n - 1)
            .filter(|c| !tail_pivots.contains(c))
            .map(|c| basis[0][c + 1])
            .collect();
        let free_index = from_digits(&digits, self.q);
        self.count(n - 1, k) + free_index * self.count(n - 1, k - 1) + sub_rank
    }
}

/// Little-endian base-`q` digits of `x`, exactly `len` of them.
pub fn to_digits(x: &BigUint, q: u64, len: usize) -> Vec<u32> {
    let mut x = x.clone();
    let qb = BigUint::from(q);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let (a, r) = x.div_rem(&qb);
        out.push(r.to_u32().expect("digit"));
        x = a;
    }
    debug_assert!(x.is_zero(), "value does not fit in {len} digits");
    out
}

/// Inverse of `to_digits`.
pub fn from_digits(digits: &[u32], q: u64) -> BigUint {
    digits
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * q + d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn subsets_round_trip() {
        let m = 7;
        let k = 3;
        let total = binomial(m as u64, k as u64).to_usize().unwrap();
        let mut seen = BTreeSet::new();
        let mut prev: Option<Vec<usize>> = None;
        for r in 0..total {
            let s = subset_unrank(&BigUint::from(r), m, k);
            assert_eq!(subset_rank(&s, m), BigUint::from(r));
            if let Some(p) = &prev {
                assert!(p < &s, "lexicographic order");
            }
            prev = Some(s.clone());
            seen.insert(s);
        }
        assert_eq!(seen.len(), total);
    }

    #[test]
    fn perms_round_trip() {
        for r in 0..120u32 {
            let p = perm_unrank(&BigUint::from(r), 5);
            assert_eq!(perm_rank(&p), BigUint::from(r));
        }
        assert_eq!(perm_unrank(&BigUint::zero(), 4), vec![0, 1, 2, 3]);
    }

    #[test]
    fn subspaces_round_trip() {
        let f = PrimeField::new(2).unwrap();
        let t = GaussianTable::new(2, 5);
        assert_eq!(t.count(4, 2), BigUint::from(35u32));
        let mut seen = BTreeSet::new();
        for r in 0..35u32 {
            let basis = t.unrank(&BigUint::from(r), 4, 2);
            assert_eq!(rref(&basis, &f), basis, "unranked bases are reduced");
            assert_eq!(t.rank_of(&basis, &f), BigUint::from(r));
            seen.insert(basis);
        }
        assert_eq!(seen.len(), 35);
    }
}
