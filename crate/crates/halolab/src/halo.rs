//! Halo products `L(H/M) ⋊ H` for the wreath, juggler and cloner families.
//!
//! The core is generic over the base group so that halo products can be
//! iterated. Lamp points live in the quotient `H/M`, represented by the section
//! `Group::project`; for ℤ^d the kernel `M` is spanned by the last
//! `kernel_rank` coordinates.

use crate::error::{HaloError, Result};
use crate::field::{DenseMatrix, PrimeField};
use crate::group::{FiniteGroup, GroupTable, Group, Zd};
use crate::lamp::{SparseFunction, SparseMatrix, SparsePerm, SparseVec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Which lamp groups sit over the base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    FreeAbelian,
    Wreath { gamma: FiniteGroup },
    Juggler { r: u32 },
    Cloner { field: PrimeField },
}

/// A juggler point `(h, slot)` with slots in `1..=r`.
pub type JugglerPoint<E> = (E, u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lamp<E: Ord> {
    None,
    Perm(SparsePerm<JugglerPoint<E>>),
    Matrix(SparseMatrix<E>),
    Func(SparseFunction<E>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HaloElem<E: Ord> {
    pub lamp: Lamp<E>,
    pub base: E,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Halo<B: Group> {
    base: B,
    family: Family,
    kernel_rank: usize,
}

impl<B: Group> Halo<B> {
    pub fn new(base: B, family: Family) -> Self {
        Halo { base, family, kernel_rank: 0 }
    }

    /// Permutational version over `H/M`, `M` spanned by the last `k` coordinates.
    pub fn with_kernel(base: B, family: Family, kernel_rank: usize) -> Self {
        if kernel_rank > 0 {
            assert!(base.is_abelian(), "kernels are only supported over ℤ^d");
        }
        Halo { base, family, kernel_rank }
    }

    pub fn juggler(base: B, r: u32) -> Self {
        assert!(r >= 1, "juggler arity must be positive");
        Self::new(base, Family::Juggler { r })
    }

    pub fn shuffler(base: B) -> Self {
        Self::juggler(base, 1)
    }

    pub fn cloner(base: B, field: PrimeField) -> Self {
        Self::new(base, Family::Cloner { field })
    }

    pub fn wreath(base: B, gamma: FiniteGroup) -> Self {
        Self::new(base, Family::Wreath { gamma })
    }

    pub fn base_group(&self) -> &B {
        &self.base
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel_rank
    }

    pub fn arity(&self) -> u32 {
        match self.family {
            Family::Juggler { r } => r,
            _ => 1,
        }
    }

    pub fn field(&self) -> Option<&PrimeField> {
        match &self.family {
            Family::Cloner { field } => Some(field),
            _ => None,
        }
    }

    pub fn lamp_group(&self) -> Option<&FiniteGroup> {
        match &self.family {
            Family::Wreath { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Class of `h` in `H/M`.
    pub fn point(&self, h: &B::Elem) -> B::Elem {
        self.base.project(h, self.kernel_rank)
    }

    fn translate_point(&self, h: &B::Elem, p: &B::Elem) -> B::Elem {
        self.point(&self.base.mul(h, p))
    }

    /// The identity lamp of this family.
    pub fn lamp_identity(&self) -> Lamp<B::Elem> {
        match &self.family {
            Family::FreeAbelian => Lamp::None,
            Family::Wreath { .. } => Lamp::Func(SparseFunction::identity()),
            Family::Juggler { .. } => Lamp::Perm(SparsePerm::identity()),
            Family::Cloner { .. } => Lamp::Matrix(SparseMatrix::identity()),
        }
    }

    pub fn lamp_only(&self, lamp: Lamp<B::Elem>) -> HaloElem<B::Elem> {
        HaloElem { lamp, base: self.base.identity() }
    }

    pub fn base_only(&self, h: B::Elem) -> HaloElem<B::Elem> {
        HaloElem { lamp: self.lamp_identity(), base: h }
    }

    /// `h·σ`, the translated lamp.
    pub fn translate_lamp(&self, h: &B::Elem, lamp: &Lamp<B::Elem>) -> Lamp<B::Elem> {
        if self.base.is_identity(h) {
            return lamp.clone();
        }
        let h = self.point(h);
        match lamp {
            Lamp::None => Lamp::None,
            Lamp::Perm(s) => Lamp::Perm(s.conjugate_by(|(p, i)| (self.translate_point(&h, p), *i))),
            Lamp::Matrix(m) => Lamp::Matrix(m.conjugate_by(|p| self.translate_point(&h, p))),
            Lamp::Func(f) => Lamp::Func(f.push_forward(|p| self.translate_point(&h, p))),
        }
    }

    pub fn lamp_compose(&self, a: &Lamp<B::Elem>, b: &Lamp<B::Elem>) -> Lamp<B::Elem> {
        match (a, b, &self.family) {
            (Lamp::None, Lamp::None, _) => Lamp::None,
            (Lamp::Perm(x), Lamp::Perm(y), _) => Lamp::Perm(x.compose(y)),
            (Lamp::Matrix(x), Lamp::Matrix(y), Family::Cloner { field }) => {
                Lamp::Matrix(x.compose(y, field))
            }
            (Lamp::Func(x), Lamp::Func(y), Family::Wreath { gamma }) => {
                Lamp::Func(x.pointwise(y, gamma))
            }
            _ => panic!("lamp kinds do not match the family"),
        }
    }

    pub fn lamp_inverse(&self, a: &Lamp<B::Elem>) -> Lamp<B::Elem> {
        match (a, &self.family) {
            (Lamp::None, _) => Lamp::None,
            (Lamp::Perm(x), _) => Lamp::Perm(x.inverse()),
            (Lamp::Matrix(x), Family::Cloner { field }) => Lamp::Matrix(x.inverse(field)),
            (Lamp::Func(x), Family::Wreath { gamma }) => Lamp::Func(x.inverse(gamma)),
            _ => panic!("lamp kind does not match the family"),
        }
    }

    /// Checks that an element has the lamp kind of this family and sane contents.
    pub fn validate(&self, a: &HaloElem<B::Elem>) -> Result<()> {
        let ok = match (&a.lamp, &self.family) {
            (Lamp::None, Family::FreeAbelian) => true,
            (Lamp::Perm(s), Family::Juggler { r }) => s
                .support()
                .all(|(p, i)| (1..=*r).contains(i) && *p == self.point(p)),
            (Lamp::Matrix(m), Family::Cloner { .. }) => m.support().iter().all(|p| *p == self.point(p)),
            (Lamp::Func(f), Family::Wreath { gamma }) => f
                .entries()
                .all(|(p, v)| *v < gamma.order() && *p == self.point(p)),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(HaloError::DescriptorMismatch(format!(
                "element lamp does not belong to {:?}",
                self.family
            )))
        }
    }

    /// Checked product.
    pub fn compose(&self, a: &HaloElem<B::Elem>, b: &HaloElem<B::Elem>) -> Result<HaloElem<B::Elem>> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.mul(a, b))
    }

    /// Checked inverse.
    pub fn invert(&self, a: &HaloElem<B::Elem>) -> Result<HaloElem<B::Elem>> {
        self.validate(a)?;
        if let (Lamp::Matrix(m), Some(f)) = (&a.lamp, self.field()) {
            if m.matrix().inverse(f).is_none() {
                return Err(HaloError::Invariant("stored lamp matrix is singular".into()));
            }
        }
        Ok(self.inv(a))
    }

    /// Juggler transposition `τ_{(p,i),(q,j)}`.
    pub fn transposition(&self, p: &B::Elem, i: u32, q: &B::Elem, j: u32) -> Lamp<B::Elem> {
        Lamp::Perm(SparsePerm::transposition((self.point(p), i), (self.point(q), j)))
    }

    /// Cloner transvection `τ_{pq}(λ)`: `e_q ↦ e_q + λ e_p`.
    pub fn transvection(&self, p: &B::Elem, q: &B::Elem, lambda: u32) -> Lamp<B::Elem> {
        let f = self.field().expect("transvections need a cloner");
        Lamp::Matrix(SparseMatrix::transvection(self.point(p), self.point(q), lambda, f))
    }

    /// Cloner dilatation `δ_p(λ)`.
    pub fn dilatation(&self, p: &B::Elem, lambda: u32) -> Lamp<B::Elem> {
        let f = self.field().expect("dilatations need a cloner");
        Lamp::Matrix(SparseMatrix::dilatation(self.point(p), lambda, f))
    }

    /// Wreath lamp `δ_p^γ`.
    pub fn lamp_delta(&self, p: &B::Elem, gamma_elem: usize) -> Lamp<B::Elem> {
        let g = self.lamp_group().expect("lamp deltas need a wreath product");
        Lamp::Func(SparseFunction::delta(self.point(p), gamma_elem, g))
    }

    /// Number of base generators; they come first in `generators()`.
    pub fn base_generator_count(&self) -> usize {
        self.base.generators().len()
    }

    /// Point action `(σ,h)·(p,i) = σ(hp, i)` on `H/M × {1..r}`.
    pub fn act_on_point(&self, a: &HaloElem<B::Elem>, p: &JugglerPoint<B::Elem>) -> Result<JugglerPoint<B::Elem>> {
        self.validate(a)?;
        let moved = (self.translate_point(&a.base, &p.0), p.1);
        match &a.lamp {
            Lamp::Perm(s) => Ok(s.apply(&moved)),
            _ => Err(HaloError::DescriptorMismatch("point action needs a juggler element".into())),
        }
    }

    /// Linear action `(φ,h)⋆v = φ(T_h v)` on `V_{H/M}`.
    pub fn act_on_vector(&self, a: &HaloElem<B::Elem>, v: &SparseVec<B::Elem>) -> Result<SparseVec<B::Elem>> {
        self.validate(a)?;
        let f = self
            .field()
            .ok_or_else(|| HaloError::DescriptorMismatch("vector action needs a cloner element".into()))?;
        let moved: SparseVec<B::Elem> = v
            .iter()
            .map(|(p, c)| (self.translate_point(&a.base, p), *c))
            .collect();
        match &a.lamp {
            Lamp::Matrix(m) => Ok(m.apply(&moved, f)),
            _ => Err(HaloError::DescriptorMismatch("vector action needs a cloner element".into())),
        }
    }

    /// Random element with lamp supported in `window` and the given base part.
    pub fn random_element<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        window: &[B::Elem],
        base: B::Elem,
    ) -> HaloElem<B::Elem> {
        let window: Vec<B::Elem> = {
            let mut w: Vec<B::Elem> = window.iter().map(|p| self.point(p)).collect();
            w.sort();
            w.dedup();
            w
        };
        let lamp = match &self.family {
            Family::FreeAbelian => Lamp::None,
            Family::Juggler { r } => {
                let mut pts: Vec<JugglerPoint<B::Elem>> = window
                    .iter()
                    .flat_map(|p| (1..=*r).map(move |i| (p.clone(), i)))
                    .collect();
                let src = pts.clone();
                for i in (1..pts.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    pts.swap(i, j);
                }
                Lamp::Perm(SparsePerm::from_map(src.into_iter().zip(pts).collect()))
            }
            Family::Cloner { field } => {
                let n = window.len();
                loop {
                    let mut m = DenseMatrix::zero(n);
                    for i in 0..n {
                        for j in 0..n {
                            m.set(i, j, rng.gen_range(0..field.order()));
                        }
                    }
                    if let Some(s) = SparseMatrix::new(window.clone(), m, field) {
                        break Lamp::Matrix(s);
                    }
                }
            }
            Family::Wreath { gamma } => {
                let values: BTreeMap<B::Elem, usize> = window
                    .iter()
                    .map(|p| (p.clone(), rng.gen_range(0..gamma.order())))
                    .collect();
                Lamp::Func(SparseFunction::from_map(values, gamma))
            }
        };
        HaloElem { lamp, base }
    }
}

impl<B: Group> Group for Halo<B> {
    type Elem = HaloElem<B::Elem>;

    fn identity(&self) -> Self::Elem {
        self.base_only(self.base.identity())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let moved = self.translate_lamp(&a.base, &b.lamp);
        HaloElem {
            lamp: self.lamp_compose(&a.lamp, &moved),
            base: self.base.mul(&a.base, &b.base),
        }
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        let h_inv = self.base.inv(&a.base);
        HaloElem {
            lamp: self.translate_lamp(&h_inv, &self.lamp_inverse(&a.lamp)),
            base: h_inv,
        }
    }

    /// Base generators `(id, s)` first, then the lamp generators at the identity.
    fn generators(&self) -> Vec<Self::Elem> {
        let e = self.base.identity();
        let base_gens = self.base.generators();
        let mut out: Vec<Self::Elem> = base_gens.iter().map(|s| self.base_only(s.clone())).collect();
        let push = |out: &mut Vec<Self::Elem>, lamp: Lamp<B::Elem>| {
            let g = self.lamp_only(lamp);
            if !self.is_identity(&g) && !out.contains(&g) {
                out.push(g);
            }
        };
        match &self.family {
            Family::FreeAbelian => {}
            Family::Juggler { r } => {
                for s in &base_gens {
                    for i in 1..=*r {
                        for j in 1..=*r {
                            if self.point(s) == self.point(&e) && i == j {
                                continue;
                            }
                            push(&mut out, self.transposition(&e, i, s, j));
                        }
                    }
                }
            }
            Family::Cloner { field } => {
                for lambda in field.nonzero().filter(|&l| l != 1) {
                    push(&mut out, self.dilatation(&e, lambda));
                }
                for s in &base_gens {
                    if self.point(s) == self.point(&e) {
                        continue;
                    }
                    for lambda in field.nonzero() {
                        push(&mut out, self.transvection(&e, s, lambda));
                    }
                }
            }
            Family::Wreath { gamma } => {
                for g in gamma.non_identity() {
                    push(&mut out, self.lamp_delta(&e, g));
                }
            }
        }
        out
    }
}

/// Text form of group elements, used for canonical serialization.
pub trait ElemText {
    fn text(&self) -> String;
}

impl ElemText for Vec<i64> {
    fn text(&self) -> String {
        let parts: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl<E: ElemText + Ord + Clone> ElemText for HaloElem<E> {
    /// Single-line bracketed form, used when halo elements are lamp points.
    fn text(&self) -> String {
        format!("[{}]", canonical_lines(self).join("; "))
    }
}

fn canonical_lines<E: ElemText + Ord + Clone>(a: &HaloElem<E>) -> Vec<String> {
    let mut lines = vec![format!("base: {}", a.base.text())];
    match &a.lamp {
        Lamp::None => {}
        Lamp::Perm(s) => {
            for ((p, i), (q, j)) in s.entries() {
                lines.push(format!("{}:{} -> {}:{}", p.text(), i, q.text(), j));
            }
        }
        Lamp::Matrix(m) => {
            for (row, col, v) in m.entries() {
                lines.push(format!("m {} {} {}", row.text(), col.text(), v));
            }
        }
        Lamp::Func(f) => {
            for (p, v) in f.entries() {
                lines.push(format!("f {} {}", p.text(), v));
            }
        }
    }
    lines
}

/// Deterministic multi-line serialization: the base line, then one line per
/// support entry in canonical point order.
pub fn canonical_text<E: ElemText + Ord + Clone>(a: &HaloElem<E>) -> String {
    let mut out = String::new();
    for line in canonical_lines(a) {
        let _ = writeln!(out, "{line}");
    }
    out
}

/// Serializable identity of a group over ℤ^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    FreeAbelian,
    Wreath,
    Shuffler,
    Juggler,
    Cloner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub family: FamilyKind,
    pub d: usize,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default)]
    pub q: Option<u32>,
    #[serde(default)]
    pub lamp_group: Option<GroupTable>,
    #[serde(default)]
    pub kernel_rank: usize,
}

fn one() -> u32 {
    1
}

impl GroupDescriptor {
    pub fn free_abelian(d: usize) -> Self {
        GroupDescriptor { family: FamilyKind::FreeAbelian, d, r: 1, q: None, lamp_group: None, kernel_rank: 0 }
    }

    pub fn shuffler(d: usize) -> Self {
        GroupDescriptor { family: FamilyKind::Shuffler, ..Self::free_abelian(d) }
    }

    pub fn juggler(d: usize, r: u32) -> Self {
        GroupDescriptor { family: FamilyKind::Juggler, r, ..Self::free_abelian(d) }
    }

    pub fn cloner(d: usize, q: u32) -> Self {
        GroupDescriptor { family: FamilyKind::Cloner, q: Some(q), ..Self::free_abelian(d) }
    }

    pub fn wreath(d: usize, gamma: &FiniteGroup) -> Self {
        GroupDescriptor {
            family: FamilyKind::Wreath,
            lamp_group: Some(GroupTable::from(gamma.clone())),
            ..Self::free_abelian(d)
        }
    }

    /// Validates the parameters and builds the group.
    pub fn build(&self) -> Result<Halo<Zd>> {
        if self.d == 0 {
            return Err(HaloError::InvalidInput("base rank must be positive".into()));
        }
        if self.kernel_rank > self.d {
            return Err(HaloError::InvalidInput("kernel rank exceeds base rank".into()));
        }
        let family = match self.family {
            FamilyKind::FreeAbelian => Family::FreeAbelian,
            FamilyKind::Shuffler => {
                if self.r != 1 {
                    return Err(HaloError::InvalidInput("a shuffler has arity 1".into()));
                }
                Family::Juggler { r: 1 }
            }
            FamilyKind::Juggler => {
                if self.r == 0 {
                    return Err(HaloError::InvalidInput("juggler arity must be positive".into()));
                }
                Family::Juggler { r: self.r }
            }
            FamilyKind::Cloner => {
                let q = self
                    .q
                    .ok_or_else(|| HaloError::InvalidInput("cloner needs a field order q".into()))?;
                Family::Cloner { field: PrimeField::new(q)? }
            }
            FamilyKind::Wreath => {
                let t = self
                    .lamp_group
                    .clone()
                    .ok_or_else(|| HaloError::InvalidInput("wreath product needs a lamp group".into()))?;
                Family::Wreath { gamma: FiniteGroup::try_from(t)? }
            }
        };
        Ok(Halo::with_kernel(Zd::new(self.d), family, self.kernel_rank))
    }

    pub fn generators(&self) -> Result<Vec<HaloElem<Vec<i64>>>> {
        Ok(self.build()?.generators())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shuffler() -> Halo<Zd> {
        Halo::shuffler(Zd::new(1))
    }

    #[test]
    fn translation_moves_lamps() {
        let g = shuffler();
        let t = g.lamp_only(g.transposition(&vec![0], 1, &vec![1], 1));
        let shift = g.base_only(vec![1]);
        let prod = g.mul(&shift, &t);
        assert_eq!(prod.lamp, g.transposition(&vec![1], 1, &vec![2], 1));
        assert_eq!(prod.base, vec![1]);
        assert!(g.is_identity(&g.mul(&t, &t)));
    }

    #[test]
    fn inverse_of_translated_transposition() {
        let g = shuffler();
        let a = HaloElem { lamp: g.transposition(&vec![0], 1, &vec![1], 1), base: vec![1] };
        let inv = g.inv(&a);
        assert_eq!(inv.lamp, g.transposition(&vec![-1], 1, &vec![0], 1));
        assert_eq!(inv.base, vec![-1]);
        assert!(g.is_identity(&g.mul(&a, &inv)));
    }

    #[test]
    fn generator_sets_are_symmetric() {
        let f2 = PrimeField::new(3).unwrap();
        for h in [
            Halo::juggler(Zd::new(2), 2),
            Halo::cloner(Zd::new(1), f2),
            Halo::wreath(Zd::new(1), FiniteGroup::cyclic(3)),
        ] {
            let gens = h.generators();
            for s in &gens {
                assert!(gens.contains(&h.inv(s)), "{s:?}");
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let d = GroupDescriptor::wreath(1, &FiniteGroup::cyclic(2));
        let json = serde_json::to_string(&d).unwrap();
        let back: GroupDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.generators().unwrap().len(), 3);
    }

    #[test]
    fn mismatched_families_are_rejected() {
        let s = shuffler();
        let c = Halo::cloner(Zd::new(1), PrimeField::new(2).unwrap());
        let x = c.generators().pop().unwrap();
        assert!(matches!(s.compose(&x, &x), Err(HaloError::DescriptorMismatch(_))));
    }
}
