//! Finitely supported lamp configurations: permutations, invertible matrices
//! and Γ-valued functions over an ordered point set.

use crate::field::{DenseMatrix, PrimeField};
use crate::group::FiniteGroup;
use std::collections::{BTreeMap, BTreeSet};

/// Finitely supported bijection. Fixed points are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparsePerm<P: Ord> {
    map: BTreeMap<P, P>,
}

impl<P: Ord + Clone> Default for SparsePerm<P> {
    fn default() -> Self {
        SparsePerm { map: BTreeMap::new() }
    }
}

impl<P: Ord + Clone> SparsePerm<P> {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from an arbitrary finite map, dropping fixed points. Panics unless
    /// the map is a bijection of its key set.
    pub fn from_map(map: BTreeMap<P, P>) -> Self {
        let keys: BTreeSet<&P> = map.keys().collect();
        let vals: BTreeSet<&P> = map.values().collect();
        assert!(keys == vals, "not a permutation of its support");
        let map = map.into_iter().filter(|(k, v)| k != v).collect();
        SparsePerm { map }
    }

    pub fn transposition(a: P, b: P) -> Self {
        if a == b {
            return Self::identity();
        }
        let mut map = BTreeMap::new();
        map.insert(a.clone(), b.clone());
        map.insert(b, a);
        SparsePerm { map }
    }

    /// Cycle a → b → c → … → a.
    pub fn cycle(points: &[P]) -> Self {
        let mut map = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            map.insert(p.clone(), points[(i + 1) % points.len()].clone());
        }
        Self::from_map(map)
    }

    pub fn apply(&self, p: &P) -> P {
        self.map.get(p).cloned().unwrap_or_else(|| p.clone())
    }

    pub fn support(&self) -> impl Iterator<Item = &P> {
        self.map.keys()
    }

    /// Relabels points through an injective map.
    pub fn map_points<Q: Ord + Clone>(&self, f: impl Fn(&P) -> Q) -> SparsePerm<Q> {
        SparsePerm { map: self.map.iter().map(|(a, b)| (f(a), f(b))).collect() }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&P, &P)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut map = BTreeMap::new();
        for p in other.map.keys().chain(self.map.keys()) {
            if map.contains_key(p) {
                continue;
            }
            let img = self.apply(&other.apply(p));
            if img != *p {
                map.insert(p.clone(), img);
            }
        }
        SparsePerm { map }
    }

    pub fn inverse(&self) -> Self {
        SparsePerm {
            map: self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        }
    }

    /// Conjugate by a bijection `t` of the point set: `t ∘ self ∘ t⁻¹`.
    pub fn conjugate_by(&self, t: impl Fn(&P) -> P) -> Self {
        SparsePerm {
            map: self.map.iter().map(|(k, v)| (t(k), t(v))).collect(),
        }
    }

    /// Cycles of length ≥ 2, each starting at its minimal point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<P>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.map.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut cyc = vec![start.clone()];
            seen.insert(start.clone());
            let mut cur = self.apply(start);
            while cur != *start {
                seen.insert(cur.clone());
                cyc.push(cur.clone());
                cur = self.apply(&cur);
            }
            out.push(cyc);
        }
        out
    }
}

/// Finitely supported sparse vector over a prime field.
pub type SparseVec<P> = BTreeMap<P, u32>;

/// An automorphism of the free vector space on the point set that fixes every
/// basis vector outside `support`. Column `j` of `matrix` is the image of
/// `e_{support[j]}`. The support is kept minimal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseMatrix<P: Ord> {
    support: Vec<P>,
    matrix: DenseMatrix,
}

impl<P: Ord + Clone> Default for SparseMatrix<P> {
    fn default() -> Self {
        SparseMatrix { support: Vec::new(), matrix: DenseMatrix::identity(0) }
    }
}

impl<P: Ord + Clone> SparseMatrix<P> {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from a support (any order, no repeats) and a matrix in that order.
    /// Returns `None` when the matrix is singular.
    pub fn new(support: Vec<P>, matrix: DenseMatrix, f: &PrimeField) -> Option<Self> {
        assert_eq!(support.len(), matrix.dim());
        matrix.inverse(f)?;
        Some(Self::sorted(support, matrix).normalized())
    }

    fn sorted(support: Vec<P>, matrix: DenseMatrix) -> Self {
        let n = support.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| support[a].cmp(&support[b]));
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return SparseMatrix { support, matrix };
        }
        let mut m = DenseMatrix::zero(n);
        for (i_new, &i_old) in order.iter().enumerate() {
            for (j_new, &j_old) in order.iter().enumerate() {
                m.set(i_new, j_new, matrix.get(i_old, j_old));
            }
        }
        let support = order.iter().map(|&i| support[i].clone()).collect();
        SparseMatrix { support, matrix: m }
    }

    /// `e_q ↦ e_q + λ e_p`, identity elsewhere.
    pub fn transvection(p: P, q: P, lambda: u32, f: &PrimeField) -> Self {
        assert!(p != q, "transvection needs distinct points");
        let mut m = DenseMatrix::identity(2);
        m.set(0, 1, lambda % f.order());
        Self::new(vec![p, q], m, f).expect("transvections are invertible")
    }

    /// `e_p ↦ λ e_p`.
    pub fn dilatation(p: P, lambda: u32, f: &PrimeField) -> Self {
        let mut m = DenseMatrix::identity(1);
        m.set(0, 0, lambda % f.order());
        Self::new(vec![p], m, f).expect("dilatation needs λ ≠ 0")
    }

    pub fn support(&self) -> &[P] {
        &self.support
    }

    /// Relabels points through an injective map.
    pub fn map_points<Q: Ord + Clone>(&self, f: impl Fn(&P) -> Q) -> SparseMatrix<Q> {
        SparseMatrix::sorted(self.support.iter().map(f).collect(), self.matrix.clone())
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    fn normalized(self) -> Self {
        let n = self.support.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| {
                let col_trivial = (0..n).all(|r| self.matrix.get(r, i) == u32::from(r == i));
                let row_trivial = (0..n).all(|c| self.matrix.get(i, c) == u32::from(c == i));
                !(col_trivial && row_trivial)
            })
            .collect();
        if keep.len() == n {
            return self;
        }
        let mut m = DenseMatrix::zero(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.set(a, b, self.matrix.get(i, j));
            }
        }
        SparseMatrix {
            support: keep.iter().map(|&i| self.support[i].clone()).collect(),
            matrix: m,
        }
    }

    /// The matrix on an ordered superset `window` of the support.
    pub fn embed(&self, window: &[P]) -> DenseMatrix {
        let n = window.len();
        let mut m = DenseMatrix::identity(n);
        let idx: Vec<usize> = self
            .support
            .iter()
            .map(|p| window.iter().position(|w| w == p).expect("window must contain the support"))
            .collect();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(i, j, self.matrix.get(a, b));
            }
        }
        m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self, f: &PrimeField) -> Self {
        if other.is_identity() {
            return self.clone();
        }
        if self.is_identity() {
            return other.clone();
        }
        let window: Vec<P> = self
            .support
            .iter()
            .chain(other.support.iter())
            .cloned()
            .collect::<BTreeSet<P>>()
            .into_iter()
            .collect();
        let m = self.embed(&window).mul(&other.embed(&window), f);
        SparseMatrix { support: window, matrix: m }.normalized()
    }

    pub fn inverse(&self, f: &PrimeField) -> Self {
        let inv = self
            .matrix
            .inverse(f)
            .expect("stored lamp matrices are invertible");
        SparseMatrix { support: self.support.clone(), matrix: inv }
    }

    /// `t ∘ self ∘ t⁻¹` for a bijection `t` of the point set (relabelling).
    pub fn conjugate_by(&self, t: impl Fn(&P) -> P) -> Self {
        let support = self.support.iter().map(t).collect();
        Self::sorted(support, self.matrix.clone())
    }

    pub fn apply(&self, v: &SparseVec<P>, f: &PrimeField) -> SparseVec<P> {
        let mut out: SparseVec<P> = v
            .iter()
            .filter(|(p, _)| self.support.binary_search(p).is_err())
            .map(|(p, c)| (p.clone(), *c))
            .collect();
        let local: Vec<u32> = self.support.iter().map(|p| v.get(p).copied().unwrap_or(0)).collect();
        let img = self.matrix.apply(&local, f);
        for (p, c) in self.support.iter().zip(img) {
            if c != 0 {
                out.insert(p.clone(), c);
            }
        }
        out
    }

    /// Nonzero entries `(row point, column point, value)`.
    pub fn entries(&self) -> Vec<(&P, &P, u32)> {
        let n = self.support.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix.get(i, j);
                if v != 0 {
                    out.push((&self.support[i], &self.support[j], v));
                }
            }
        }
        out
    }
}

/// Finitely supported function to a finite group Γ (elements as table indices).
/// Identity values are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseFunction<P: Ord> {
    values: BTreeMap<P, usize>,
}

impl<P: Ord + Clone> Default for SparseFunction<P> {
    fn default() -> Self {
        SparseFunction { values: BTreeMap::new() }
    }
}

impl<P: Ord + Clone> SparseFunction<P> {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_map(values: BTreeMap<P, usize>, gamma: &FiniteGroup) -> Self {
        SparseFunction {
            values: values.into_iter().filter(|(_, v)| *v != gamma.identity()).collect(),
        }
    }

    pub fn delta(p: P, value: usize, gamma: &FiniteGroup) -> Self {
        let mut m = BTreeMap::new();
        m.insert(p, value);
        Self::from_map(m, gamma)
    }

    pub fn get(&self, p: &P, gamma: &FiniteGroup) -> usize {
        self.values.get(p).copied().unwrap_or(gamma.identity())
    }

    pub fn support(&self) -> impl Iterator<Item = &P> {
        self.values.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&P, &usize)> {
        self.values.iter()
    }

    /// Relabels points through an injective map.
    pub fn map_points<Q: Ord + Clone>(&self, f: impl Fn(&P) -> Q) -> SparseFunction<Q> {
        SparseFunction { values: self.values.iter().map(|(p, v)| (f(p), *v)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise product `self(p)·other(p)`.
    pub fn pointwise(&self, other: &Self, gamma: &FiniteGroup) -> Self {
        let mut values = BTreeMap::new();
        for p in self.values.keys().chain(other.values.keys()) {
            let v = gamma.mul(self.get(p, gamma), other.get(p, gamma));
            if v != gamma.identity() {
                values.insert(p.clone(), v);
            } else {
                values.remove(p);
            }
        }
        SparseFunction { values }
    }

    pub fn inverse(&self, gamma: &FiniteGroup) -> Self {
        SparseFunction {
            values: self.values.iter().map(|(p, v)| (p.clone(), gamma.inv(*v))).collect(),
        }
    }

    /// `p ↦ self(t⁻¹ p)` for a bijection `t`.
    pub fn push_forward(&self, t: impl Fn(&P) -> P) -> Self {
        SparseFunction {
            values: self.values.iter().map(|(p, v)| (t(p), *v)).collect(),
        }
    }

    pub fn restrict(&self, keep: impl Fn(&P) -> bool) -> Self {
        SparseFunction {
            values: self.values.iter().filter(|(p, _)| keep(p)).map(|(p, v)| (p.clone(), *v)).collect(),
        }
    }
}
