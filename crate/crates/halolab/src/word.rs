//! Word metrics: exact lengths on Cayley balls by breadth-first search, and the
//! constructive decompositions of juggler and cloner lamps into generator words
//! together with their proved length bounds.

use crate::error::{HaloError, Result};
use crate::field::PrimeField;
use crate::group::{l1_norm, Group, Zd};
use crate::halo::{Family, Halo, HaloElem, Lamp};
use crate::lamp::{SparseMatrix, SparsePerm};
use rayon::prelude::*;
use std::collections::HashMap;

/// Default cap on the number of states a BFS ball may hold.
pub const DEFAULT_BALL_CAP: usize = 10_000_000;

/// The ball of a given radius in a Cayley graph, with exact word lengths.
#[derive(Debug, Clone)]
pub struct BfsBall<G: Group> {
    pub radius: usize,
    pub table: HashMap<G::Elem, u32>,
    /// `sphere_sizes[k]` is the number of elements at distance exactly `k`.
    pub sphere_sizes: Vec<usize>,
}

impl<G: Group> BfsBall<G> {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn length(&self, a: &G::Elem) -> Option<u32> {
        self.table.get(a).copied()
    }

    /// `(radius, ball size)` for every radius up to the ball's radius.
    pub fn growth(&self) -> Vec<(usize, usize)> {
        let mut acc = 0;
        self.sphere_sizes
            .iter()
            .enumerate()
            .map(|(k, s)| {
                acc += s;
                (k, acc)
            })
            .collect()
    }
}

/// Breadth-first search of the ball of radius `radius` around the identity.
pub fn bfs_ball<G: Group>(g: &G, radius: usize, cap: usize) -> Result<BfsBall<G>> {
    let gens = g.generators();
    let mut table = HashMap::new();
    let id = g.identity();
    table.insert(id.clone(), 0u32);
    let mut frontier = vec![id];
    let mut sphere_sizes = vec![1];
    for k in 1..=radius {
        let candidates: Vec<G::Elem> = frontier
            .par_iter()
            .flat_map_iter(|a| gens.iter().map(move |s| g.mul(a, s)))
            .collect();
        let mut next = Vec::new();
        for c in candidates {
            if !table.contains_key(&c) {
                table.insert(c.clone(), k as u32);
                next.push(c);
                if table.len() > cap {
                    return Err(HaloError::Resource(format!(
                        "ball cap {cap} exceeded at radius {k}; achieved radius {}",
                        k - 1
                    )));
                }
            }
        }
        sphere_sizes.push(next.len());
        frontier = next;
    }
    Ok(BfsBall { radius, table, sphere_sizes })
}

/// A word in generator indices together with the bound it is claimed to satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorWord {
    pub indices: Vec<usize>,
    pub claimed_bound: u64,
}

impl GeneratorWord {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn evaluate<G: Group>(&self, g: &G, gens: &[G::Elem]) -> G::Elem {
        g.eval_word(gens, &self.indices)
    }
}

/// A halo product over ℤ^d with its generator list indexed for word building.
#[derive(Debug, Clone)]
pub struct WordBuilder {
    pub group: Halo<Zd>,
    pub gens: Vec<HaloElem<Vec<i64>>>,
    index: HashMap<HaloElem<Vec<i64>>, usize>,
}

impl WordBuilder {
    pub fn new(group: Halo<Zd>) -> Self {
        let gens = group.generators();
        let index = gens.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        WordBuilder { group, gens, index }
    }

    fn d(&self) -> usize {
        self.group.base_group().d
    }

    fn gen_index(&self, a: &HaloElem<Vec<i64>>) -> usize {
        *self
            .index
            .get(a)
            .unwrap_or_else(|| panic!("not a generator: {a:?}"))
    }

    fn lamp_gen(&self, lamp: Lamp<Vec<i64>>) -> usize {
        self.gen_index(&self.group.lamp_only(lamp))
    }

    /// Index of the base generator `±e_k`.
    pub fn step_index(k: usize, sign: i64) -> usize {
        2 * k + usize::from(sign < 0)
    }

    /// Unit steps of a monotone ℓ¹ geodesic from 0 to `g`, coordinate by coordinate.
    pub fn geodesic(g: &[i64]) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for (k, &x) in g.iter().enumerate() {
            for _ in 0..x.unsigned_abs() {
                out.push((k, x.signum()));
            }
        }
        out
    }

    fn push_path(&self, word: &mut Vec<usize>, from: &[i64], to: &[i64]) {
        let delta: Vec<i64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
        for (k, s) in Self::geodesic(&delta) {
            word.push(Self::step_index(k, s));
        }
    }

    /// Word for the base element `(id, g)`.
    pub fn base_word(&self, g: &[i64]) -> GeneratorWord {
        let mut w = Vec::new();
        self.push_path(&mut w, &vec![0; self.d()], g);
        GeneratorWord { claimed_bound: l1_norm(g), indices: w }
    }

    fn arity(&self) -> u32 {
        match self.group.family() {
            Family::Juggler { r } => *r,
            _ => panic!("juggler words need a juggler group"),
        }
    }

    fn field(&self) -> PrimeField {
        *self.group.field().expect("cloner words need a cloner group")
    }

    /// Word for `(τ_{(0,i),(g,j)}, 0)` built by peeling one unit step at a time:
    /// `τ^(ℓ) = σ^(ℓ) · (id,h_ℓ) · τ^(ℓ+1) · (id,h_ℓ⁻¹) · σ^(ℓ)`.
    pub fn transposition_word(&self, g: &[i64], i: u32, j: u32) -> Result<GeneratorWord> {
        let r = self.arity();
        if !(1..=r).contains(&i) || !(1..=r).contains(&j) {
            return Err(HaloError::InvalidInput(format!("slots must lie in 1..={r}")));
        }
        let n = l1_norm(g);
        let zero = vec![0; self.d()];
        if n == 0 {
            if i == j {
                return Err(HaloError::InvalidInput("τ_{(0,i),(0,i)} is the identity".into()));
            }
            // Conjugate τ_{(0,i),(s,j)} by τ_{(0,j),(s,j)} for a unit step s.
            let s = Zd::new(self.d()).unit(0, 1);
            let outer = self.lamp_gen(self.group.transposition(&zero, j, &s, j));
            let inner = self.lamp_gen(self.group.transposition(&zero, i, &s, j));
            return Ok(GeneratorWord { indices: vec![outer, inner, outer], claimed_bound: 3 });
        }
        check_word_size(n)?;
        let steps = Self::geodesic(g);
        let mut word = Vec::with_capacity(4 * steps.len());
        self.transposition_rec(&steps, i, j, &mut word);
        Ok(GeneratorWord { indices: word, claimed_bound: 4 * n })
    }

    /// Conjugates the final single-step move by the earlier steps, as a loop.
    fn transposition_rec(&self, steps: &[(usize, i64)], i: u32, j: u32, out: &mut Vec<usize>) {
        let zd = Zd::new(self.d());
        let zero = vec![0; self.d()];
        let (last, prefix) = steps.split_last().expect("nonempty geodesic");
        let sigmas: Vec<usize> = prefix
            .iter()
            .map(|&(k, s)| self.lamp_gen(self.group.transposition(&zero, i, &zd.unit(k, s), i)))
            .collect();
        for (&(k, s), &sigma) in prefix.iter().zip(&sigmas) {
            out.extend([sigma, Self::step_index(k, s)]);
        }
        let (k, s) = *last;
        out.push(self.lamp_gen(self.group.transposition(&zero, i, &zd.unit(k, s), j)));
        for (&(k, s), &sigma) in prefix.iter().zip(&sigmas).rev() {
            out.extend([Self::step_index(k, -s), sigma]);
        }
    }

    /// Word for the swap of `e_0` and `e_h` (h a unit step):
    /// `δ_0(−1) τ_{0,h}(−1) [(id,h) τ_{0,−h}(1) (id,−h)] τ_{0,h}(−1)`.
    fn swap_word(&self, k: usize, s: i64) -> Vec<usize> {
        let f = self.field();
        let zd = Zd::new(self.d());
        let zero = vec![0; self.d()];
        let h = zd.unit(k, s);
        let minus_one = f.neg(1);
        let t_minus = self.lamp_gen(self.group.transvection(&zero, &h, minus_one));
        let t_back = self.lamp_gen(self.group.transvection(&zero, &zd.inv(&h), 1));
        let mut w = Vec::with_capacity(6);
        if minus_one != 1 {
            w.push(self.lamp_gen(self.group.dilatation(&zero, minus_one)));
        }
        w.extend([t_minus, Self::step_index(k, s), t_back, Self::step_index(k, -s), t_minus]);
        w
    }

    /// Word for `(τ_{0,g}(λ), 0)` by the same peeling with the swap word as σ^(ℓ).
    pub fn transvection_word(&self, g: &[i64], lambda: u32) -> Result<GeneratorWord> {
        let f = self.field();
        let lambda = lambda % f.order();
        if lambda == 0 {
            return Err(HaloError::InvalidInput("transvection needs λ ≠ 0".into()));
        }
        let n = l1_norm(g);
        if n == 0 {
            return Err(HaloError::InvalidInput("transvection needs g ≠ 0".into()));
        }
        check_word_size(n)?;
        let steps = Self::geodesic(g);
        let mut word = Vec::new();
        self.transvection_rec(&steps, lambda, &mut word);
        Ok(GeneratorWord { indices: word, claimed_bound: 14 * n })
    }

    fn transvection_rec(&self, steps: &[(usize, i64)], lambda: u32, out: &mut Vec<usize>) {
        let zd = Zd::new(self.d());
        let zero = vec![0; self.d()];
        let (last, prefix) = steps.split_last().expect("nonempty geodesic");
        let sigmas: Vec<Vec<usize>> = prefix.iter().map(|&(k, s)| self.swap_word(k, s)).collect();
        for (&(k, s), sigma) in prefix.iter().zip(&sigmas) {
            out.extend(sigma);
            out.push(Self::step_index(k, s));
        }
        let (k, s) = *last;
        out.push(self.lamp_gen(self.group.transvection(&zero, &zd.unit(k, s), lambda)));
        for (&(k, s), sigma) in prefix.iter().zip(&sigmas).rev() {
            out.push(Self::step_index(k, -s));
            out.extend(sigma);
        }
    }

    /// Word for `(σ, 0)` with σ supported in `window × {1..r}`: cycles in order
    /// of their minimal point, each as a chain of relocated transpositions.
    /// The bound is `2K + (5r|F| − 6)·max(diam F, 1)`.
    pub fn permutation_word(&self, sigma: &SparsePerm<(Vec<i64>, u32)>, window: &[Vec<i64>]) -> Result<GeneratorWord> {
        let r = self.arity();
        for (p, i) in sigma.support() {
            if !window.contains(p) || !(1..=r).contains(i) {
                return Err(HaloError::InvalidInput("permutation is not supported in the window".into()));
            }
        }
        let zero = vec![0; self.d()];
        let mut pos = zero.clone();
        let mut word = Vec::new();
        for cyc in sigma.cycles() {
            for m in 0..cyc.len() - 1 {
                let (ha, ja) = &cyc[m];
                let (hb, jb) = &cyc[m + 1];
                self.push_path(&mut word, &pos, ha);
                pos = ha.clone();
                let rel: Vec<i64> = hb.iter().zip(ha).map(|(a, b)| a - b).collect();
                word.extend(self.transposition_word(&rel, *ja, *jb)?.indices);
            }
        }
        self.push_path(&mut word, &pos, &zero);
        let bound = permutation_bound(window, r);
        Ok(GeneratorWord { indices: word, claimed_bound: if sigma.is_identity() { 0 } else { bound } })
    }

    /// Gaussian elimination of `φ` into elementary operations, returned in the
    /// order whose product is `φ`. Pivot: first nonzero entry in canonical order.
    pub fn elementary_factors(&self, phi: &SparseMatrix<Vec<i64>>) -> Vec<Elementary> {
        let f = self.field();
        let support = phi.support().to_vec();
        let n = support.len();
        let mut m = phi.matrix().clone();
        // Row operations E_N ⋯ E_1 φ = I; φ = E_1⁻¹ ⋯ E_N⁻¹.
        let mut ops: Vec<Elementary> = Vec::new();
        for c in 0..n {
            let p = (c..n).find(|&r| m.get(r, c) != 0).expect("invertible matrix has a pivot");
            if p != c {
                m.add_row_multiple(c, p, 1, &f);
                ops.push(Elementary::Transvection { p: support[c].clone(), q: support[p].clone(), lambda: 1 });
            }
            let pivot = m.get(c, c);
            if pivot != 1 {
                let s = f.inv(pivot).expect("nonzero pivot");
                m.scale_row(c, s, &f);
                ops.push(Elementary::Dilatation { p: support[c].clone(), lambda: s });
            }
            for r in 0..n {
                let v = m.get(r, c);
                if r != c && v != 0 {
                    let lambda = f.neg(v);
                    m.add_row_multiple(r, c, lambda, &f);
                    ops.push(Elementary::Transvection { p: support[r].clone(), q: support[c].clone(), lambda });
                }
            }
        }
        ops.into_iter().map(|e| e.inverse(&f)).collect()
    }

    /// Word for `(φ, 0)` with `φ ∈ FGL(window)`. Also returns the number of
    /// elementary operations `N`. Bound: `2K + 15·N·max(diam F, 1)`.
    pub fn matrix_word(&self, phi: &SparseMatrix<Vec<i64>>, window: &[Vec<i64>]) -> Result<(GeneratorWord, usize)> {
        let f = self.field();
        if phi.support().iter().any(|p| !window.contains(p)) {
            return Err(HaloError::InvalidInput("matrix is not supported in the window".into()));
        }
        if phi.matrix().inverse(&f).is_none() {
            return Err(HaloError::InvalidInput("matrix is singular on its window".into()));
        }
        let ops = self.elementary_factors(phi);
        let zero = vec![0; self.d()];
        let mut pos = zero.clone();
        let mut word = Vec::new();
        for op in &ops {
            match op {
                Elementary::Transvection { p, q, lambda } => {
                    self.push_path(&mut word, &pos, p);
                    pos = p.clone();
                    let rel: Vec<i64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
                    word.extend(self.transvection_word(&rel, *lambda)?.indices);
                }
                Elementary::Dilatation { p, lambda } => {
                    self.push_path(&mut word, &pos, p);
                    pos = p.clone();
                    word.push(self.lamp_gen(self.group.dilatation(&zero, *lambda)));
                }
            }
        }
        self.push_path(&mut word, &pos, &zero);
        let nops = ops.len();
        let bound = if nops == 0 { 0 } else { matrix_bound(window, nops) };
        Ok((GeneratorWord { indices: word, claimed_bound: bound }, nops))
    }

    /// Constructive word for an arbitrary juggler or cloner element `(lamp, h)`:
    /// the lamp word over its own support, then a geodesic to `h`.
    pub fn element_word(&self, a: &HaloElem<Vec<i64>>) -> Result<GeneratorWord> {
        let mut w = match &a.lamp {
            Lamp::None => GeneratorWord { indices: vec![], claimed_bound: 0 },
            Lamp::Perm(s) => {
                let mut window: Vec<Vec<i64>> = s.support().map(|(p, _)| p.clone()).collect();
                window.dedup();
                self.permutation_word(s, &window)?
            }
            Lamp::Matrix(m) => self.matrix_word(m, m.support())?.0,
            Lamp::Func(_) => {
                return Err(HaloError::DescriptorMismatch("no constructive words for wreath lamps".into()))
            }
        };
        let tail = self.base_word(&a.base);
        w.indices.extend(tail.indices);
        w.claimed_bound += tail.claimed_bound;
        Ok(w)
    }
}

/// An elementary matrix: transvection `τ_{pq}(λ)` or dilatation `δ_p(λ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elementary {
    Transvection { p: Vec<i64>, q: Vec<i64>, lambda: u32 },
    Dilatation { p: Vec<i64>, lambda: u32 },
}

impl Elementary {
    pub fn inverse(&self, f: &PrimeField) -> Self {
        match self {
            Elementary::Transvection { p, q, lambda } => {
                Elementary::Transvection { p: p.clone(), q: q.clone(), lambda: f.neg(*lambda) }
            }
            Elementary::Dilatation { p, lambda } => {
                Elementary::Dilatation { p: p.clone(), lambda: f.inv(*lambda).expect("nonzero") }
            }
        }
    }

    pub fn to_matrix(&self, f: &PrimeField) -> SparseMatrix<Vec<i64>> {
        match self {
            Elementary::Transvection { p, q, lambda } => SparseMatrix::transvection(p.clone(), q.clone(), *lambda, f),
            Elementary::Dilatation { p, lambda } => SparseMatrix::dilatation(p.clone(), *lambda, f),
        }
    }
}

/// Exact ℓ¹ diameter of a finite subset of ℤ^d, via the 2^d sign functionals.
pub fn diameter(s: &[Vec<i64>]) -> u64 {
    let Some(first) = s.first() else { return 0 };
    let d = first.len();
    let mut best = 0i64;
    for mask in 0..(1u32 << d) {
        let vals = s.iter().map(|v| {
            v.iter()
                .enumerate()
                .map(|(k, &x)| if mask >> k & 1 == 1 { -x } else { x })
                .sum::<i64>()
        });
        let (lo, hi) = vals.fold((i64::MAX, i64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)));
        best = best.max(hi - lo);
    }
    best as u64
}

/// `K = max_{h∈F} |h|`.
pub fn max_norm(s: &[Vec<i64>]) -> u64 {
    s.iter().map(|v| l1_norm(v)).max().unwrap_or(0)
}

/// `2K + (5r|F| − 6)·max(diam F, 1)`, clamped at zero.
pub fn permutation_bound(window: &[Vec<i64>], r: u32) -> u64 {
    let k = max_norm(window) as i128;
    let diam = diameter(window).max(1) as i128;
    let size = (r as i128) * window.len() as i128;
    (2 * k + (5 * size - 6) * diam).max(0) as u64
}

/// `2K + 15·N·max(diam F, 1)`.
pub fn matrix_bound(window: &[Vec<i64>], nops: usize) -> u64 {
    2 * max_norm(window) + 15 * nops as u64 * diameter(window).max(1)
}

/// Closed-form length of `transposition_word` for `|g| = n`.
pub fn transposition_word_len(n: u64, same_slot: bool) -> u64 {
    match (n, same_slot) {
        (0, true) => 0,
        (0, false) => 3,
        _ => 4 * n - 3,
    }
}

/// Closed-form length of `transvection_word` for `|g| = n ≥ 1` over 𝔽_q.
pub fn transvection_word_len(n: u64, q: u32) -> u64 {
    let per_step = if q == 2 { 12 } else { 14 };
    per_step * (n - 1) + 1
}

/// Longest geodesic, in unit steps, that explicit words are built for.
pub const MAX_WORD_STEPS: u64 = 10_000_000;

fn check_word_size(n: u64) -> Result<()> {
    if n > MAX_WORD_STEPS {
        return Err(HaloError::Resource(format!("explicit word over {n} steps exceeds {MAX_WORD_STEPS}")));
    }
    Ok(())
}
