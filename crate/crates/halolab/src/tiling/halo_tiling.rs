//! Halo tiles `L_n = L(F_n) × F_n` over a box tiling of ℤ^d, with shift sets
//! `Σ_n = ⋃_{h∈Σ^base_n} Σ_{h,n} × {h}`.
//!
//! `Σ_{h,n}` holds one representative `τ^{A,x}` per coset `τ·L(hF_n)` of
//! `L(F_{n+1})`. For jugglers `A` is the image of `hF_n × [r]` and `x` the
//! images of the other window points; `τ^{A,x}` maps `hF_n × [r]` onto `A`
//! in increasing order. For cloners `A` is the image subspace of `V_{hF_n}`,
//! the columns over `hF_n` are the reduced echelon rows of `A` from last to
//! first, and `x` are the columns over the other window points. For wreath
//! products the representative is the function on the window outside `hF_n`.

use super::rank::{from_digits, perm_rank, perm_unrank, subset_rank, subset_unrank, to_digits, GaussianTable};
use super::{big_from_ln, BoxTiling, Tiling, TilingLevel, WordLength};
use crate::bignum::{factorial, gl_order, BigQuantity, GrowthLaw};
use crate::error::{HaloError, Result};
use crate::field::{pivots, reduce, rref, DenseMatrix, PrimeField};
use crate::group::{FiniteGroup, Group, Zd};
use crate::halo::{canonical_text, Halo, HaloElem, Lamp};
use crate::lamp::{SparseFunction, SparseMatrix, SparsePerm};
use crate::word::WordBuilder;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

type Point = Vec<i64>;
type Elem = HaloElem<Point>;

/// Lamp family of a halo tiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LampSpec {
    Juggler { r: u32 },
    Cloner { q: u32 },
    Wreath { gamma: FiniteGroup },
}

#[derive(Debug)]
struct Window {
    points: Vec<Point>,
    index: HashMap<Point, usize>,
}

#[derive(Debug)]
pub struct HaloTiling {
    group: Halo<Zd>,
    base: BoxTiling,
    lamp: LampSpec,
    words: WordBuilder,
    windows: RwLock<HashMap<usize, Arc<Window>>>,
    gauss: RwLock<HashMap<usize, Arc<GaussianTable>>>,
    counts: RwLock<HashMap<(u8, usize), Arc<BigUint>>>,
}

impl Clone for HaloTiling {
    fn clone(&self) -> Self {
        HaloTiling::new(self.base.clone(), self.lamp.clone()).expect("already validated")
    }
}

impl HaloTiling {
    pub fn new(base: BoxTiling, lamp: LampSpec) -> Result<Self> {
        let zd = Zd::new(base.dim());
        let group = match &lamp {
            LampSpec::Juggler { r } => {
                if *r == 0 {
                    return Err(HaloError::InvalidInput("juggler arity must be positive".into()));
                }
                Halo::juggler(zd, *r)
            }
            LampSpec::Cloner { q } => Halo::cloner(zd, PrimeField::new(*q)?),
            LampSpec::Wreath { gamma } => Halo::wreath(zd, gamma.clone()),
        };
        let words = WordBuilder::new(group.clone());
        Ok(HaloTiling {
            group,
            base,
            lamp,
            words,
            windows: RwLock::new(HashMap::new()),
            gauss: RwLock::new(HashMap::new()),
            counts: RwLock::new(HashMap::new()),
        })
    }

    /// `juggler_tiling(zd_tiling(d, m), r)`.
    pub fn juggler(d: usize, m: u64, r: u32) -> Result<Self> {
        Self::new(BoxTiling::adic(d, m)?, LampSpec::Juggler { r })
    }

    pub fn cloner(d: usize, m: u64, q: u32) -> Result<Self> {
        Self::new(BoxTiling::adic(d, m)?, LampSpec::Cloner { q })
    }

    /// The lamplighter tiling over the dyadic tiling of ℤ.
    pub fn lamplighter(gamma: FiniteGroup) -> Result<Self> {
        Self::new(BoxTiling::adic(1, 2)?, LampSpec::Wreath { gamma })
    }

    pub fn group(&self) -> &Halo<Zd> {
        &self.group
    }

    pub fn base(&self) -> &BoxTiling {
        &self.base
    }

    pub fn lamp_spec(&self) -> &LampSpec {
        &self.lamp
    }

    pub fn law(&self) -> GrowthLaw {
        match &self.lamp {
            LampSpec::Juggler { r } => GrowthLaw::Factorial { r: *r as u64 },
            LampSpec::Cloner { q } => GrowthLaw::GeneralLinear { q: *q as u64 },
            LampSpec::Wreath { gamma } => GrowthLaw::Power { base: gamma.order() as u64 },
        }
    }

    pub fn word_builder(&self) -> &WordBuilder {
        &self.words
    }

    fn window(&self, n: usize) -> Arc<Window> {
        if let Some(w) = self.windows.read().expect("window lock").get(&n) {
            return w.clone();
        }
        let points = self.base.points_i64(n).expect("base level is enumerable");
        let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let w = Arc::new(Window { points, index });
        self.windows.write().expect("window lock").insert(n, w.clone());
        w
    }

    /// Base points of `F_n`, in lexicographic order.
    pub fn base_points(&self, n: usize) -> Vec<Point> {
        self.window(n).points.clone()
    }

    fn gauss(&self, m: usize) -> Arc<GaussianTable> {
        if let Some(g) = self.gauss.read().expect("gauss lock").get(&m) {
            return g.clone();
        }
        let LampSpec::Cloner { q } = self.lamp else { unreachable!("only cloners use subspaces") };
        let g = Arc::new(GaussianTable::new(q as u64, m));
        self.gauss.write().expect("gauss lock").insert(m, g.clone());
        g
    }

    fn field(&self) -> &PrimeField {
        self.group.field().expect("cloner tiling")
    }

    /// Window indices (in `F_{n+1}`) of the translate `hF_n`, in increasing order.
    fn tile_indices(&self, n: usize, h: &Point) -> Vec<usize> {
        let big = self.window(n + 1);
        let small = self.window(n);
        let mut idx: Vec<usize> = small
            .points
            .iter()
            .map(|f| big.index[&add(h, f)])
            .collect();
        idx.sort_unstable();
        idx
    }

    fn complement(total: usize, taken: &[usize]) -> Vec<usize> {
        let mut mark = vec![false; total];
        for &i in taken {
            mark[i] = true;
        }
        (0..total).filter(|&i| !mark[i]).collect()
    }

    fn memo(&self, key: (u8, usize), f: impl FnOnce() -> BigUint) -> Arc<BigUint> {
        if let Some(v) = self.counts.read().expect("count lock").get(&key) {
            return v.clone();
        }
        let v = Arc::new(f());
        self.counts.write().expect("count lock").insert(key, v.clone());
        v
    }

    fn factorial_memo(&self, k: usize) -> Arc<BigUint> {
        self.memo((1, k), || factorial(k as u64))
    }

    /// `|Σ_{h,n}| = |L(F_{n+1})| / |L(F_n)|`.
    pub fn lamp_count(&self, n: usize) -> BigUint {
        (*self.memo((0, n), || self.lamp_count_uncached(n))).clone()
    }

    fn lamp_count_uncached(&self, n: usize) -> BigUint {
        let k = self.window(n).points.len() as u64;
        let m = self.window(n + 1).points.len() as u64;
        match &self.lamp {
            LampSpec::Juggler { r } => factorial(*r as u64 * m) / factorial(*r as u64 * k),
            LampSpec::Cloner { q } => gl_order(m, *q as u64) / gl_order(k, *q as u64),
            LampSpec::Wreath { gamma } => BigUint::from(gamma.order()).pow((m - k) as u32),
        }
    }

    /// Number of admissible `x` for a fixed subspace `A` (cloners).
    fn cloner_x_count(&self, m: usize, k: usize) -> Arc<BigUint> {
        self.memo((2, m * 65536 + k), || {
            let q = BigUint::from(self.field().order());
            let qm = q.pow(m as u32);
            (k..m).map(|i| &qm - q.pow(i as u32)).product()
        })
    }

    /// The representative `τ^{A,x} ∈ Σ_{h,n}` of the given rank.
    pub fn lamp_shift(&self, n: usize, h: &Point, rank: &BigUint) -> Lamp<Point> {
        let big = self.window(n + 1);
        let tile = self.tile_indices(n, h);
        let src_rest = Self::complement(big.points.len(), &tile);
        match &self.lamp {
            LampSpec::Juggler { r } => {
                let r = *r as usize;
                let slots = |idx: &[usize]| -> Vec<usize> {
                    idx.iter().flat_map(|&i| (0..r).map(move |s| i * r + s)).collect()
                };
                let total = big.points.len() * r;
                let src_tile = slots(&tile);
                let src_out = slots(&src_rest);
                let x_count = self.factorial_memo(src_out.len());
                let (a_rank, x_rank) = rank.div_rem(&*x_count);
                let a = subset_unrank(&a_rank, total, src_tile.len());
                let dst_out = Self::complement(total, &a);
                let x = perm_unrank(&x_rank, src_out.len());
                let point = |i: usize| (big.points[i / r].clone(), (i % r) as u32 + 1);
                let mut map = BTreeMap::new();
                for (s, d) in src_tile.iter().zip(&a) {
                    map.insert(point(*s), point(*d));
                }
                for (t, s) in src_out.iter().enumerate() {
                    map.insert(point(*s), point(dst_out[x[t]]));
                }
                Lamp::Perm(SparsePerm::from_map(map))
            }
            LampSpec::Cloner { .. } => {
                let f = self.field();
                let q = f.order() as u64;
                let m = big.points.len();
                let k = tile.len();
                let (a_rank, mut x_rank) = rank.div_rem(&*self.cloner_x_count(m, k));
                let a = self.gauss(m).unrank(&a_rank, m, k);
                let mut cols: Vec<Option<Vec<u32>>> = vec![None; m];
                for (t, &i) in tile.iter().enumerate() {
                    cols[i] = Some(a[k - 1 - t].clone());
                }
                // x-digits are mixed radix with the first complement point most significant.
                let qb = BigUint::from(q);
                let mut digits = vec![BigUint::zero(); src_rest.len()];
                for t in (0..src_rest.len()).rev() {
                    let radix = qb.pow(m as u32) - qb.pow((k + t) as u32);
                    let (rest, d) = x_rank.div_rem(&radix);
                    digits[t] = d;
                    x_rank = rest;
                }
                let mut span = a.clone();
                for (t, &i) in src_rest.iter().enumerate() {
                    let w = rref(&span, f);
                    let dim = w.len();
                    let (u_index, w_index) = digits[t].div_rem(&qb.pow(dim as u32));
                    let piv = pivots(&w);
                    let free: Vec<usize> = (0..m).filter(|c| !piv.contains(c)).collect();
                    let mut y = vec![0u32; m];
                    for (c, dgt) in free.iter().zip(to_digits(&(u_index + 1u32), q, free.len())) {
                        y[*c] = dgt;
                    }
                    for (row, c) in w.iter().zip(to_digits(&w_index, q, dim)) {
                        for (yi, &ri) in y.iter_mut().zip(row) {
                            *yi = f.add(*yi, f.mul(c, ri));
                        }
                    }
                    cols[i] = Some(y.clone());
                    span.push(y);
                }
                let cols: Vec<Vec<u32>> = cols.into_iter().map(|c| c.expect("every column set")).collect();
                let mat = DenseMatrix::from_columns(&cols);
                Lamp::Matrix(SparseMatrix::new(big.points.clone(), mat, f).expect("τ^{A,x} is invertible"))
            }
            LampSpec::Wreath { gamma } => {
                let digits = to_digits(rank, gamma.order() as u64, src_rest.len());
                let values = src_rest
                    .iter()
                    .zip(digits)
                    .map(|(&i, v)| (big.points[i].clone(), v as usize))
                    .collect();
                Lamp::Func(SparseFunction::from_map(values, gamma))
            }
        }
    }

    /// Rank in `Σ_{h,n}` of the coset of a lamp supported in `F_{n+1}`.
    pub fn lamp_rank(&self, n: usize, h: &Point, lamp: &Lamp<Point>) -> BigUint {
        let big = self.window(n + 1);
        let tile = self.tile_indices(n, h);
        let src_rest = Self::complement(big.points.len(), &tile);
        match (&self.lamp, lamp) {
            (LampSpec::Juggler { r }, Lamp::Perm(sigma)) => {
                let r = *r as usize;
                let slot = |i: usize| (big.points[i / r].clone(), (i % r) as u32 + 1);
                let index = |p: &(Point, u32)| big.index[&p.0] * r + (p.1 as usize - 1);
                let total = big.points.len() * r;
                let mut a: Vec<usize> = tile
                    .iter()
                    .flat_map(|&i| (0..r).map(move |s| i * r + s))
                    .map(|i| index(&sigma.apply(&slot(i))))
                    .collect();
                a.sort_unstable();
                let dst_out = Self::complement(total, &a);
                let x: Vec<usize> = src_rest
                    .iter()
                    .flat_map(|&i| (0..r).map(move |s| i * r + s))
                    .map(|i| {
                        let img = index(&sigma.apply(&slot(i)));
                        dst_out.binary_search(&img).expect("σ is a bijection")
                    })
                    .collect();
                subset_rank(&a, total) * &*self.factorial_memo(x.len()) + perm_rank(&x)
            }
            (LampSpec::Cloner { .. }, Lamp::Matrix(phi)) => {
                let f = self.field();
                let q = f.order() as u64;
                let m = big.points.len();
                let k = tile.len();
                let mat = phi.embed(&big.points);
                let a: Vec<Vec<u32>> = tile.iter().map(|&i| mat.column(i)).collect();
                let a_rank = self.gauss(m).rank_of(&a, f);
                let qb = BigUint::from(q);
                let mut x_rank = BigUint::zero();
                let mut span = a;
                for (t, &i) in src_rest.iter().enumerate() {
                    let y = mat.column(i);
                    let w = rref(&span, f);
                    let dim = w.len();
                    let piv = pivots(&w);
                    let u = reduce(&y, &w, f);
                    let free: Vec<u32> = (0..m).filter(|c| !piv.contains(c)).map(|c| u[c]).collect();
                    let u_index = from_digits(&free, q);
                    let w_digits: Vec<u32> = piv.iter().map(|&p| y[p]).collect();
                    let w_index = from_digits(&w_digits, q);
                    let j = (u_index - 1u32) * qb.pow(dim as u32) + w_index;
                    let radix = qb.pow(m as u32) - qb.pow((k + t) as u32);
                    x_rank = x_rank * radix + j;
                    span.push(y);
                }
                a_rank * &*self.cloner_x_count(m, k) + x_rank
            }
            (LampSpec::Wreath { gamma }, Lamp::Func(func)) => {
                let digits: Vec<u32> = src_rest
                    .iter()
                    .map(|&i| func.get(&big.points[i], gamma) as u32)
                    .collect();
                from_digits(&digits, gamma.order() as u64)
            }
            _ => panic!("lamp kind does not match the tiling"),
        }
    }

    fn lamp_inside(&self, n: usize, lamp: &Lamp<Point>) -> bool {
        let inside = |p: &Point| self.base.contains_i64(n, p);
        match lamp {
            Lamp::None => true,
            Lamp::Perm(s) => s.support().all(|(p, _)| inside(p)),
            Lamp::Matrix(m) => m.support().iter().all(inside),
            Lamp::Func(f) => f.support().all(inside),
        }
    }

    /// All lamps supported in `F_n`.
    fn enumerate_lamps(&self, n: usize) -> Vec<Lamp<Point>> {
        let w = self.window(n);
        match &self.lamp {
            LampSpec::Juggler { r } => {
                let pts: Vec<(Point, u32)> = w
                    .points
                    .iter()
                    .flat_map(|p| (1..=*r).map(move |i| (p.clone(), i)))
                    .collect();
                let mut out = Vec::new();
                heap_permutations(pts.len(), |perm| {
                    let map = pts.iter().cloned().zip(perm.iter().map(|&i| pts[i].clone())).collect();
                    out.push(Lamp::Perm(SparsePerm::from_map(map)));
                });
                out
            }
            LampSpec::Cloner { .. } => {
                let f = self.field();
                invertible_matrices(w.points.len(), f)
                    .into_iter()
                    .map(|m| Lamp::Matrix(SparseMatrix::new(w.points.clone(), m, f).expect("invertible")))
                    .collect()
            }
            LampSpec::Wreath { gamma } => {
                let k = w.points.len();
                let total = gamma.order().pow(k as u32);
                (0..total)
                    .map(|code| {
                        let digits = to_digits(&BigUint::from(code), gamma.order() as u64, k);
                        let values = w.points.iter().cloned().zip(digits.into_iter().map(|d| d as usize)).collect();
                        Lamp::Func(SparseFunction::from_map(values, gamma))
                    })
                    .collect()
            }
        }
    }

    /// `R_n`: the family's diameter bound in terms of `|F_n|` and `diam F_n`.
    fn diam_bound(&self, card: &BigQuantity, diam: &BigQuantity) -> BigQuantity {
        match (card, diam) {
            (BigQuantity::Exact(c), BigQuantity::Exact(d)) => BigQuantity::Exact(match self.lamp {
                LampSpec::Juggler { r } => BigUint::from(5u32) * r * c * d,
                LampSpec::Cloner { .. } => (BigUint::from(15u32) * (c * c + c) + 3u32) * d,
                LampSpec::Wreath { .. } => BigUint::from(3u32) * d + c,
            }),
            _ => {
                let (lc, ld) = (card.ln(), diam.ln());
                BigQuantity::Log(match self.lamp {
                    LampSpec::Juggler { r } => (5.0 * r as f64).ln() + lc + ld,
                    LampSpec::Cloner { .. } => 15f64.ln() + 2.0 * lc + ld,
                    LampSpec::Wreath { .. } => crate::bignum::log_sum_exp(&[3f64.ln() + ld, lc]),
                })
            }
        }
    }
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
fn heap_permutations(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// All invertible `n×n` matrices over `f`, built column by column.
pub(crate) fn invertible_matrices(n: usize, f: &PrimeField) -> Vec<DenseMatrix> {
    let q = f.order() as u64;
    let vectors: Vec<Vec<u32>> = (0..q.pow(n as u32))
        .map(|c| to_digits(&BigUint::from(c), q, n))
        .collect();
    let mut out = Vec::new();
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    fn rec(n: usize, f: &PrimeField, vectors: &[Vec<u32>], cols: &mut Vec<Vec<u32>>, out: &mut Vec<DenseMatrix>) {
        if cols.len() == n {
            out.push(DenseMatrix::from_columns(cols));
            return;
        }
        let basis = rref(cols, f);
        for v in vectors {
            if reduce(v, &basis, f).iter().any(|&x| x != 0) {
                cols.push(v.clone());
                rec(n, f, vectors, cols, out);
                cols.pop();
            }
        }
    }
    rec(n, f, &vectors, &mut cols, &mut out);
    out
}

impl Tiling for HaloTiling {
    type Elem = Elem;

    fn identity(&self) -> Elem {
        self.group.identity()
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.group.mul(a, b)
    }

    fn inv(&self, a: &Elem) -> Elem {
        self.group.inv(a)
    }

    fn generators(&self) -> Vec<Elem> {
        self.group.generators()
    }

    fn shift_count(&self, n: usize) -> Result<BigUint> {
        Ok(self.base.shift_count(n)? * self.lamp_count(n))
    }

    fn shift(&self, n: usize, rank: &BigUint) -> Elem {
        let (base_rank, lamp_rank) = rank.div_rem(&self.lamp_count(n));
        let h = self.base.shift_i64(n, &base_rank);
        let lamp = self.lamp_shift(n, &h, &lamp_rank);
        HaloElem { lamp, base: h }
    }

    fn contains(&self, n: usize, e: &Elem) -> bool {
        self.base.contains_i64(n, &e.base) && self.lamp_inside(n, &e.lamp)
    }

    fn split(&self, n: usize, e: &Elem) -> (BigUint, Elem) {
        let (base_rank, rest) = self.base.split_i64(n, &e.base);
        let h = sub(&e.base, &rest);
        let lamp_rank = self.lamp_rank(n, &h, &e.lamp);
        let tau = self.lamp_shift(n, &h, &lamp_rank);
        // e = (τ, h)(ρ, rest) gives ρ = (−h)·(τ⁻¹ ∘ σ).
        let local = self.group.lamp_compose(&self.group.lamp_inverse(&tau), &e.lamp);
        let rho = self.group.translate_lamp(&sub(&rest, &e.base), &local);
        let rank = base_rank * self.lamp_count(n) + lamp_rank;
        (rank, HaloElem { lamp: rho, base: rest })
    }

    fn enumerate_tile(&self, n: usize, cap: usize) -> Result<Vec<Elem>> {
        let card = self.level(n).cardinality;
        let fits = card.exact().and_then(|c| c.to_usize()).is_some_and(|c| c <= cap);
        if !fits {
            return Err(HaloError::Resource(format!("level {n} has {card} elements, cap {cap}")));
        }
        let lamps = self.enumerate_lamps(n);
        let points = self.window(n).points.clone();
        Ok(points
            .iter()
            .flat_map(|h| lamps.iter().map(move |l| HaloElem { lamp: l.clone(), base: h.clone() }))
            .collect())
    }

    fn level(&self, n: usize) -> TilingLevel {
        let base = self.base.level(n);
        let next_base = self.base.level(n + 1);
        let law = self.law();
        let lamps = |b: &BigQuantity| law.quantity(b.exact().and_then(|x| x.to_f64()).unwrap_or_else(|| b.ln().exp()));
        let card = lamps(&base.cardinality).mul(&base.cardinality);
        let next = lamps(&next_base.cardinality).mul(&next_base.cardinality);
        let shift_count = match (&card, &next) {
            (BigQuantity::Exact(a), BigQuantity::Exact(b)) => BigQuantity::Exact(b / a),
            _ => big_from_ln(next.ln() - card.ln(), || None),
        };
        TilingLevel {
            n,
            diam_bound: self.diam_bound(&base.cardinality, &base.diam_bound),
            cardinality: card,
            shift_count,
            eps_inverse: base.eps_inverse,
        }
    }

    fn word_length(&self, e: &Elem) -> Result<WordLength> {
        let w = self.words.element_word(e)?;
        Ok(WordLength { value: BigUint::from(w.len()), exact: false })
    }

    fn describe(&self, e: &Elem) -> String {
        canonical_text(e).replace('\n', "; ")
    }
}

/// Count of lamps `|L(F)|` for a window of the given size, for callers that
/// only need the number.
pub fn lamp_group_order(spec: &LampSpec, size: u64) -> BigUint {
    match spec {
        LampSpec::Juggler { r } => factorial(*r as u64 * size),
        LampSpec::Cloner { q } => gl_order(size, *q as u64),
        LampSpec::Wreath { gamma } => BigUint::from(gamma.order()).pow(size as u32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{boundary_ratio, verify_tiling_level};

    #[test]
    fn juggler_counts() {
        let t = HaloTiling::juggler(1, 2, 1).unwrap();
        assert_eq!(t.level(1).cardinality, BigQuantity::from_u64(4));
        assert_eq!(t.level(2).cardinality, BigQuantity::from_u64(96));
        assert_eq!(t.level(3).cardinality, BigQuantity::from_u64(322560));
        assert_eq!(t.shift_count(1).unwrap(), BigUint::from(24u32));
        let rep = verify_tiling_level(&t, 1, 1000).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!((rep.shift_count, rep.tile_size, rep.next_size), (24, 4, 96));
    }

    #[test]
    fn juggler_arity_two_partitions() {
        let t = HaloTiling::juggler(1, 2, 2).unwrap();
        let rep = verify_tiling_level(&t, 0, 1000).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn cloner_counts_and_partition() {
        let t = HaloTiling::cloner(1, 2, 2).unwrap();
        assert_eq!(t.level(1).cardinality, BigQuantity::from_u64(12));
        assert_eq!(t.level(2).cardinality, BigQuantity::from_u64(80640));
        let rep = verify_tiling_level(&t, 0, 1000).unwrap();
        assert!(rep.passed, "{rep:?}");
        let t3 = HaloTiling::cloner(1, 2, 3).unwrap();
        let rep = verify_tiling_level(&t3, 0, 1000).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn lamplighter_counts_and_partition() {
        let t = HaloTiling::lamplighter(FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(t.level(1).cardinality, BigQuantity::from_u64(8));
        assert_eq!(t.shift_count(0).unwrap(), BigUint::from(4u32));
        assert!(verify_tiling_level(&t, 0, 1000).unwrap().passed);
        assert!(verify_tiling_level(&t, 1, 1000).unwrap().passed);
        let t3 = HaloTiling::lamplighter(FiniteGroup::cyclic(3)).unwrap();
        assert_eq!(t3.level(2).cardinality, BigQuantity::from_u64(324));
    }

    #[test]
    fn split_inverts_shift_products() {
        let t = HaloTiling::cloner(1, 2, 2).unwrap();
        let tile = t.enumerate_tile(1, 100).unwrap();
        let count = t.shift_count(1).unwrap().to_usize().unwrap();
        for r in (0..count).step_by(97) {
            let s = t.shift(1, &BigUint::from(r));
            for f in &tile {
                let (rank, rest) = t.split(1, &t.mul(&s, f));
                assert_eq!(rank, BigUint::from(r));
                assert_eq!(&rest, f);
            }
        }
    }

    #[test]
    fn cloner_representative_is_lexicographically_minimal() {
        // Brute force over GL_2(𝔽_2) on the level-1 window with h = 0: among the
        // lamps in each coset τ·L(hF_0), the representative has the smallest
        // column sequence.
        let t = HaloTiling::cloner(1, 2, 2).unwrap();
        let f = PrimeField::new(2).unwrap();
        let window = t.base_points(1);
        let mut best: HashMap<BigUint, Vec<Vec<u32>>> = HashMap::new();
        for m in invertible_matrices(2, &f) {
            let lamp = Lamp::Matrix(SparseMatrix::new(window.clone(), m.clone(), &f).unwrap());
            let rank = t.lamp_rank(0, &vec![0], &lamp);
            let cols: Vec<Vec<u32>> = (0..2).map(|j| m.column(j)).collect();
            let e = best.entry(rank).or_insert_with(|| cols.clone());
            if cols < *e {
                *e = cols;
            }
        }
        for (rank, cols) in best {
            let Lamp::Matrix(rep) = t.lamp_shift(0, &vec![0], &rank) else { unreachable!() };
            let m = rep.embed(&window);
            let got: Vec<Vec<u32>> = (0..2).map(|j| m.column(j)).collect();
            assert_eq!(got, cols);
        }
    }

    #[test]
    fn base_generator_ratio_matches_base() {
        let t = HaloTiling::juggler(1, 2, 1).unwrap();
        let gens = t.generators();
        let r = boundary_ratio(&t, 1, &gens[0], 1000).unwrap();
        assert_eq!(r, num_rational::BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn lamp_generator_ratios_do_not_exceed_base() {
        for t in [HaloTiling::juggler(1, 2, 1).unwrap(), HaloTiling::cloner(1, 2, 2).unwrap()] {
            for n in 0..=1 {
                let rows = crate::tiling::generator_ratios(&t, n, 10_000).unwrap();
                assert!(rows.iter().all(|r| r.ok), "{rows:?}");
            }
        }
    }

    #[test]
    fn lamp_order_helper() {
        assert_eq!(lamp_group_order(&LampSpec::Cloner { q: 2 }, 4), BigUint::from(20160u32));
        assert!(lamp_group_order(&LampSpec::Juggler { r: 1 }, 0) == BigUint::from(1u32));
    }
}
