//! The abstract group interface, the free abelian base ℤ^d and finite lamp groups.

use crate::error::{HaloError, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::hash::Hash;

/// A finitely generated group with a fixed symmetric generating set.
pub trait Group: Clone + Debug + Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Ordered, symmetric generating set.
    fn generators(&self) -> Vec<Self::Elem>;

    fn is_abelian(&self) -> bool {
        false
    }

    /// Section of the quotient by the last `kernel_rank` coordinates. Only free
    /// abelian groups support a nonzero kernel rank.
    fn project(&self, a: &Self::Elem, kernel_rank: usize) -> Self::Elem {
        assert_eq!(kernel_rank, 0, "quotients are only defined for free abelian groups");
        a.clone()
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn eval_word(&self, gens: &[Self::Elem], word: &[usize]) -> Self::Elem {
        word.iter()
            .fold(self.identity(), |acc, &i| self.mul(&acc, &gens[i]))
    }

    fn pow(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        let base = if n < 0 { self.inv(a) } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }
}

/// ℤ^d with generators ±e_1, …, ±e_d (ordered e_1, −e_1, e_2, −e_2, …).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zd {
    pub d: usize,
}

impl Zd {
    pub fn new(d: usize) -> Self {
        Zd { d }
    }

    pub fn unit(&self, k: usize, sign: i64) -> Vec<i64> {
        let mut v = vec![0; self.d];
        v[k] = sign;
        v
    }
}

pub fn l1_norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).sum()
}

impl Group for Zd {
    type Elem = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.d]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn generators(&self) -> Vec<Vec<i64>> {
        (0..self.d)
            .flat_map(|k| [self.unit(k, 1), self.unit(k, -1)])
            .collect()
    }

    fn is_abelian(&self) -> bool {
        true
    }

    fn project(&self, a: &Vec<i64>, kernel_rank: usize) -> Vec<i64> {
        assert!(kernel_rank <= self.d);
        let mut out = a.clone();
        for x in out.iter_mut().skip(self.d - kernel_rank) {
            *x = 0;
        }
        out
    }
}

/// A finite group given by its multiplication table on `0..order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupTable", into = "GroupTable")]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

/// Serialized form of a finite group: just its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub table: Vec<Vec<usize>>,
}

impl TryFrom<GroupTable> for FiniteGroup {
    type Error = HaloError;
    fn try_from(t: GroupTable) -> Result<Self> {
        FiniteGroup::from_table(t.table)
    }
}

impl From<FiniteGroup> for GroupTable {
    fn from(g: FiniteGroup) -> Self {
        GroupTable { table: g.table }
    }
}

impl FiniteGroup {
    /// Validates the table (closure, associativity, identity, inverses).
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(HaloError::InvalidInput("empty group table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(HaloError::InvalidInput("group table is not closed".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| HaloError::InvalidInput("group table has no identity".into()))?;
        let mut inverses = vec![0; n];
        for a in 0..n {
            inverses[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| HaloError::InvalidInput(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(HaloError::InvalidInput("group table is not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity, inverses })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(table).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn non_identity(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&a| a != self.identity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zd_generators_symmetric() {
        let z = Zd::new(2);
        let gens = z.generators();
        assert_eq!(gens.len(), 4);
        for g in &gens {
            assert!(gens.contains(&z.inv(g)));
        }
        assert_eq!(z.project(&vec![3, 4], 1), vec![3, 0]);
    }

    #[test]
    fn finite_group_validation() {
        let c3 = FiniteGroup::cyclic(3);
        assert_eq!(c3.inv(1), 2);
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
    }
}
