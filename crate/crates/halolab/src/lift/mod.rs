//! Cocycle lifting: from a coupling of base groups (or of pairs `(H,M)`,
//! `(K,N)`) to couplings of the wreath, juggler and cloner products over them.
//!
//! Lifted cocycles are given on generators and extended to words by the cocycle
//! identity. On generators they depend only on the base point `x`, so a lifted
//! point is a base point; the lamp coordinates are realized lazily by the
//! direct-simulation oracle in [`simulate`].

mod dyn_group;
pub mod simulate;

pub use dyn_group::{dyn_from_halo, dyn_length, halo_from_dyn, DynElem, DynGroup};

use crate::coupling::{Couple, CouplingPoint, LengthMode};
use crate::error::{HaloError, Result};
use crate::field::PrimeField;
use crate::group::{FiniteGroup, Group, GroupTable};
use crate::halo::{Family, Halo, HaloElem, Lamp};
use crate::tiling::{matched_zd_tiling, BoxTiling, HaloTiling, Tiling, TilingSpec};
use crate::word::WordBuilder;
use dyn_group::{single_transposition_target, single_transvection_target};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Base points: one odometer point per factor couple.
pub type BasePoint = Vec<CouplingPoint>;

/// Which group of a coupling acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    H,
    K,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::H => Side::K,
            Side::K => Side::H,
        }
    }
}

/// An orbit-equivalence coupling of `H` and `K` with left actions and cocycles
/// satisfying `c(g′g, x) = c(g′, g·x)·c(g, x)`.
pub trait Coupling: Send + Sync {
    fn group(&self, side: Side) -> &DynGroup;
    /// Rank of the normal subgroup on each side (pairs); zero for plain couplings.
    fn kernel(&self, _side: Side) -> usize {
        0
    }
    fn point(&self, seed: u64, sample: u64) -> BasePoint;
    fn act(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<BasePoint>;
    /// The element `k` of the other group with `g·x = k·x`.
    fn cocycle(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<DynElem>;
    fn same_point(&self, x: &BasePoint, y: &BasePoint) -> Result<bool>;
    fn describe(&self) -> String;

    /// Pseudo-cocycle: the cocycle reduced modulo the other side's subgroup.
    fn pseudo_cocycle(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<DynElem> {
        let other = side.other();
        let c = self.cocycle(side, g, x)?;
        Ok(self.group(other).project(&c, self.kernel(other)))
    }
}

/// Conversion between a tiling's elements and runtime group elements.
pub trait DynTiling: Tiling + Clone + 'static {
    fn dyn_group(&self) -> DynGroup;
    fn to_dyn(&self, e: &Self::Elem) -> Result<DynElem>;
    fn from_dyn(&self, e: &DynElem) -> Result<Self::Elem>;
}

impl DynTiling for BoxTiling {
    fn dyn_group(&self) -> DynGroup {
        DynGroup::zd(self.dim())
    }

    fn to_dyn(&self, e: &Vec<BigInt>) -> Result<DynElem> {
        e.iter()
            .map(|x| x.to_i64().ok_or_else(|| HaloError::Resource(format!("coordinate {x} exceeds i64"))))
            .collect::<Result<Vec<i64>>>()
            .map(DynElem::Z)
    }

    fn from_dyn(&self, e: &DynElem) -> Result<Vec<BigInt>> {
        match e {
            DynElem::Z(v) if v.len() == self.dim() => Ok(v.iter().map(|&x| BigInt::from(x)).collect()),
            _ => Err(HaloError::DescriptorMismatch(format!("expected an element of Z^{}", self.dim()))),
        }
    }
}

impl DynTiling for HaloTiling {
    fn dyn_group(&self) -> DynGroup {
        DynGroup::from_halo(self.group())
    }

    fn to_dyn(&self, e: &HaloElem<Vec<i64>>) -> Result<DynElem> {
        Ok(dyn_from_halo(e))
    }

    fn from_dyn(&self, e: &DynElem) -> Result<HaloElem<Vec<i64>>> {
        halo_from_dyn(e).ok_or_else(|| HaloError::DescriptorMismatch("expected a halo element over Z^d".into()))
    }
}

/// The coupling of two tilings through equal ranks, in left-action form.
pub struct TilingCouple<A: DynTiling, B: DynTiling> {
    fwd: Couple<A, B>,
    rev: Couple<B, A>,
    groups: (DynGroup, DynGroup),
}

impl<A: DynTiling, B: DynTiling> TilingCouple<A, B> {
    pub fn new(a: A, b: B, max_depth: usize) -> Result<Self> {
        let groups = (a.dyn_group(), b.dyn_group());
        let fwd = Couple::new(a, b, max_depth)?;
        let rev = fwd.reversed()?;
        Ok(TilingCouple { fwd, rev, groups })
    }

    pub fn inner(&self) -> &Couple<A, B> {
        &self.fwd
    }
}

impl<A: DynTiling, B: DynTiling> Coupling for TilingCouple<A, B> {
    fn group(&self, side: Side) -> &DynGroup {
        match side {
            Side::H => &self.groups.0,
            Side::K => &self.groups.1,
        }
    }

    fn point(&self, seed: u64, sample: u64) -> BasePoint {
        vec![CouplingPoint::new(seed, sample)]
    }

    fn act(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<BasePoint> {
        let y = match side {
            Side::H => self.fwd.act_left(&self.fwd.a.from_dyn(g)?, &x[0])?.0,
            Side::K => self.rev.act_left(&self.rev.a.from_dyn(g)?, &x[0])?.0,
        };
        Ok(vec![y])
    }

    fn cocycle(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<DynElem> {
        match side {
            Side::H => self.fwd.b.to_dyn(&self.fwd.cocycle_left(&self.fwd.a.from_dyn(g)?, &x[0])?.0),
            Side::K => self.rev.b.to_dyn(&self.rev.cocycle_left(&self.rev.a.from_dyn(g)?, &x[0])?.0),
        }
    }

    fn same_point(&self, x: &BasePoint, y: &BasePoint) -> Result<bool> {
        same_odometer_point(&self.fwd.a, &x[0], &y[0])
    }

    fn describe(&self) -> String {
        format!("{} <-> {}", self.groups.0.name(), self.groups.1.name())
    }
}

/// Equality of two odometer points on their explicit prefixes plus eight levels.
fn same_odometer_point<T: Tiling>(t: &T, x: &CouplingPoint, y: &CouplingPoint) -> Result<bool> {
    if (x.seed, x.sample) != (y.seed, y.sample) {
        return Ok(false);
    }
    for n in 0..x.depth().max(y.depth()) + 8 {
        if x.coord(t, n)? != y.coord(t, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Box tilings of ℤ^{d1} and ℤ^{d2} with equal tile sizes, `|F_1| = m^{d1}`.
pub fn zd_couple(d1: usize, d2: usize, m: u64, max_depth: usize) -> Result<TilingCouple<BoxTiling, BoxTiling>> {
    let a = BoxTiling::adic(d1, m)?;
    let b = matched_zd_tiling(&TilingSpec::Zd { d: d1, m }, d2)?;
    TilingCouple::new(a, b, max_depth)
}

const PAIR_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Coupling of the pairs `(ℤ^{d1}, ℤ^{k1})` and `(ℤ^{d2}, ℤ^{k2})` as a product
/// of a quotient couple `ℤ^{d1−k1}↔ℤ^{d2−k2}` (first coordinates) and a
/// subgroup couple `ℤ^{k1}↔ℤ^{k2}` (last coordinates), so subgroup orbits match.
pub struct PairCouple {
    quotient: TilingCouple<BoxTiling, BoxTiling>,
    subgroup: Option<TilingCouple<BoxTiling, BoxTiling>>,
    dims: (usize, usize),
    kernels: (usize, usize),
    groups: (DynGroup, DynGroup),
}

impl PairCouple {
    pub fn new(d1: usize, k1: usize, d2: usize, k2: usize, m: u64, max_depth: usize) -> Result<Self> {
        let proper = 0 < k1 && k1 < d1 && 0 < k2 && k2 < d2;
        if !(proper || (k1 == 0 && k2 == 0)) {
            return Err(HaloError::InvalidInput(format!(
                "pair ranks need 0<k1<d1 and 0<k2<d2, or k1=k2=0 (got k1={k1}, d1={d1}, k2={k2}, d2={d2})"
            )));
        }
        let quotient = zd_couple(d1 - k1, d2 - k2, m, max_depth)?;
        let subgroup = if proper { Some(zd_couple(k1, k2, m, max_depth)?) } else { None };
        Ok(PairCouple {
            quotient,
            subgroup,
            dims: (d1, d2),
            kernels: (k1, k2),
            groups: (DynGroup::zd(d1), DynGroup::zd(d2)),
        })
    }

    fn split(&self, side: Side, g: &DynElem) -> Result<(DynElem, DynElem)> {
        let (d, k) = match side {
            Side::H => (self.dims.0, self.kernels.0),
            Side::K => (self.dims.1, self.kernels.1),
        };
        match g {
            DynElem::Z(v) if v.len() == d => Ok((DynElem::Z(v[..d - k].to_vec()), DynElem::Z(v[d - k..].to_vec()))),
            _ => Err(HaloError::DescriptorMismatch(format!("expected an element of Z^{d}"))),
        }
    }
}

impl Coupling for PairCouple {
    fn group(&self, side: Side) -> &DynGroup {
        match side {
            Side::H => &self.groups.0,
            Side::K => &self.groups.1,
        }
    }

    fn kernel(&self, side: Side) -> usize {
        match side {
            Side::H => self.kernels.0,
            Side::K => self.kernels.1,
        }
    }

    fn point(&self, seed: u64, sample: u64) -> BasePoint {
        let mut p = vec![CouplingPoint::new(seed, sample)];
        if self.subgroup.is_some() {
            p.push(CouplingPoint::new(seed ^ PAIR_SALT, sample));
        }
        p
    }

    fn act(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<BasePoint> {
        let (q, s) = self.split(side, g)?;
        let mut out = self.quotient.act(side, &q, &x[..1].to_vec())?;
        if let Some(sub) = &self.subgroup {
            out.extend(sub.act(side, &s, &x[1..].to_vec())?);
        }
        Ok(out)
    }

    fn cocycle(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<DynElem> {
        let (q, s) = self.split(side, g)?;
        let DynElem::Z(mut out) = self.quotient.cocycle(side, &q, &x[..1].to_vec())? else { unreachable!() };
        if let Some(sub) = &self.subgroup {
            let DynElem::Z(tail) = sub.cocycle(side, &s, &x[1..].to_vec())? else { unreachable!() };
            out.extend(tail);
        }
        Ok(DynElem::Z(out))
    }

    fn same_point(&self, x: &BasePoint, y: &BasePoint) -> Result<bool> {
        let mut same = self.quotient.same_point(&x[..1].to_vec(), &y[..1].to_vec())?;
        if let Some(sub) = &self.subgroup {
            same &= sub.same_point(&x[1..].to_vec(), &y[1..].to_vec())?;
        }
        Ok(same)
    }

    fn describe(&self) -> String {
        format!(
            "(Z^{}, Z^{}) <-> (Z^{}, Z^{})",
            self.dims.0, self.kernels.0, self.dims.1, self.kernels.1
        )
    }
}

/// Lamp family of a lift stage; the same family is used on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LiftFamily {
    /// Lamp group Γ = Λ with the identity lamp coupling.
    Wreath { lamp_group: GroupTable },
    Juggler {
        #[serde(default = "one_u32")]
        r: u32,
    },
    Cloner { q: u32 },
}

fn one_u32() -> u32 {
    1
}

impl LiftFamily {
    pub fn family(&self) -> Result<Family> {
        Ok(match self {
            LiftFamily::Wreath { lamp_group } => Family::Wreath { gamma: FiniteGroup::try_from(lamp_group.clone())? },
            LiftFamily::Juggler { r } => {
                if *r == 0 {
                    return Err(HaloError::InvalidInput("juggler arity must be positive".into()));
                }
                Family::Juggler { r: *r }
            }
            LiftFamily::Cloner { q } => Family::Cloner { field: PrimeField::new(*q)? },
        })
    }
}

/// The lifted coupling `ℒ_{H/M}H ↔ ℒ_{K/N}K` of a base coupling.
pub struct Lifted {
    base: Arc<dyn Coupling>,
    family: LiftFamily,
    groups: (DynGroup, DynGroup),
    words: (Option<WordBuilder>, Option<WordBuilder>),
}

/// How a generator of a lifted group is treated by the lift formulas.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    /// `(id, s)`.
    Base(DynElem),
    /// `(τ_{(e,i),(s̄,j)}, e)`.
    Transposition { target: DynElem, i: u32, j: u32 },
    /// `(τ_{e,s̄}(λ), e)`.
    Transvection { target: DynElem, lambda: u32 },
    /// `(δ_e(λ), e)`.
    Dilatation { lambda: u32 },
    /// `(ι(t), e)`.
    Lamp { value: usize },
}

impl Lifted {
    pub fn new(base: Arc<dyn Coupling>, family: LiftFamily) -> Result<Self> {
        let fam = family.family()?;
        let mut groups = Vec::new();
        for side in [Side::H, Side::K] {
            let k = base.kernel(side);
            let g = base.group(side);
            if k > 0 && !g.is_abelian() {
                return Err(HaloError::InvalidInput("subgroup pairs need a free abelian base".into()));
            }
            groups.push(g.halo_over(fam.clone(), k));
        }
        let k = groups.pop().expect("two sides");
        let h = groups.pop().expect("two sides");
        let words = (h.to_halo_zd().map(WordBuilder::new), k.to_halo_zd().map(WordBuilder::new));
        Ok(Lifted { base, family, groups: (h, k), words })
    }

    pub fn base(&self) -> &Arc<dyn Coupling> {
        &self.base
    }

    pub fn family(&self) -> &LiftFamily {
        &self.family
    }

    fn halo(&self, side: Side) -> &Halo<DynGroup> {
        self.group(side).as_halo().expect("lifted groups are halo products")
    }

    fn words(&self, side: Side) -> Option<&WordBuilder> {
        match side {
            Side::H => self.words.0.as_ref(),
            Side::K => self.words.1.as_ref(),
        }
    }

    /// Classifies a generator of the acting group.
    pub fn classify(&self, side: Side, s: &DynElem) -> Result<GeneratorKind> {
        let h = self.halo(side);
        let x = s
            .as_halo()
            .ok_or_else(|| HaloError::DescriptorMismatch("expected a halo element".into()))?;
        let not_gen = || HaloError::InvalidInput(format!("{s:?} is not a generator"));
        if x.lamp == h.lamp_identity() {
            return Ok(GeneratorKind::Base(x.base.clone()));
        }
        if !h.base_group().is_identity(&x.base) {
            return Err(not_gen());
        }
        let e = h.point(&h.base_group().identity());
        match &x.lamp {
            Lamp::Perm(p) => {
                let (target, _) = single_transposition_target(h, &x.lamp).ok_or_else(not_gen)?;
                let pts: Vec<&(DynElem, u32)> = p.support().collect();
                // Slot i at the identity point, slot j at the target.
                let (i, j) = if target == e {
                    (pts[0].1, pts[1].1)
                } else {
                    let at_e = pts.iter().find(|(q, _)| *q == e).ok_or_else(not_gen)?;
                    let other = pts.iter().find(|(q, _)| *q != e).ok_or_else(not_gen)?;
                    (at_e.1, other.1)
                };
                Ok(GeneratorKind::Transposition { target, i, j })
            }
            Lamp::Matrix(m) => {
                if m.support().len() == 1 && m.support()[0] == e {
                    return Ok(GeneratorKind::Dilatation { lambda: m.matrix().get(0, 0) });
                }
                let target = single_transvection_target(h, &x.lamp).ok_or_else(not_gen)?;
                let ie = m.support().iter().position(|p| *p == e).ok_or_else(not_gen)?;
                Ok(GeneratorKind::Transvection { target, lambda: m.matrix().get(ie, 1 - ie) })
            }
            Lamp::Func(f) => {
                let entries: Vec<(&DynElem, &usize)> = f.entries().collect();
                match entries.as_slice() {
                    [(p, v)] if **p == e => Ok(GeneratorKind::Lamp { value: **v }),
                    _ => Err(not_gen()),
                }
            }
            Lamp::None => Err(not_gen()),
        }
    }

    /// `κ(s̄⁻¹, x)⁻¹` in the other side's quotient.
    fn relocated(&self, side: Side, target: &DynElem, x: &BasePoint) -> Result<DynElem> {
        let src = self.base.group(side);
        let dst = self.base.group(side.other());
        let kappa = self.base.pseudo_cocycle(side, &src.inv(target), x)?;
        Ok(dst.project(&dst.inv(&kappa), self.base.kernel(side.other())))
    }

    /// The lifted cocycle on a generator.
    pub fn generator_cocycle(&self, side: Side, s: &DynElem, x: &BasePoint) -> Result<DynElem> {
        let dst = self.halo(side.other());
        let e = dst.base_group().identity();
        let out = match self.classify(side, s)? {
            GeneratorKind::Base(h) => dst.base_only(self.base.cocycle(side, &h, x)?),
            GeneratorKind::Transposition { target, i, j } => {
                let g = self.relocated(side, &target, x)?;
                dst.lamp_only(dst.transposition(&e, i, &g, j))
            }
            GeneratorKind::Transvection { target, lambda } => {
                let g = self.relocated(side, &target, x)?;
                dst.lamp_only(dst.transvection(&e, &g, lambda))
            }
            GeneratorKind::Dilatation { lambda } => dst.lamp_only(dst.dilatation(&e, lambda)),
            GeneratorKind::Lamp { value } => dst.lamp_only(dst.lamp_delta(&e, value)),
        };
        Ok(DynElem::H(Box::new(out)))
    }

    /// A generator word (indices into `group(side).generators()`) for `g`.
    pub fn word_for(&self, side: Side, g: &DynElem) -> Result<Vec<usize>> {
        let group = self.group(side);
        let gens = group.generators();
        if let Some(i) = gens.iter().position(|s| s == g) {
            return Ok(vec![i]);
        }
        let wb = self.words(side).ok_or_else(|| {
            HaloError::InvalidInput(format!("words for arbitrary elements of {} are not available", group.name()))
        })?;
        let a = halo_from_dyn(g).expect("halo over Z^d");
        match &a.lamp {
            Lamp::Func(f) => {
                // Visit each lamp, set it, return; then walk to the base.
                let zero = vec![0; a.base.len()];
                let mut word = Vec::new();
                let mut pos = zero.clone();
                for (p, v) in f.entries() {
                    word.extend(wb.base_word(&diff(p, &pos)).indices);
                    let delta = wb.group.lamp_only(wb.group.lamp_delta(&zero, *v));
                    word.push(wb.gens.iter().position(|s| *s == delta).expect("lamp generator"));
                    pos = p.clone();
                }
                word.extend(wb.base_word(&diff(&a.base, &pos)).indices);
                Ok(word)
            }
            _ => Ok(wb.element_word(&a)?.indices),
        }
    }

    /// Lifted cocycle along a word: `c(s₀s₁⋯, x) = c(s₀, s₁⋯·x)·⋯·c(s_{k−1}, x)`.
    pub fn word_cocycle(&self, side: Side, word: &[usize], x: &BasePoint) -> Result<DynElem> {
        let gens = self.group(side).generators();
        let dst = self.group(side.other());
        let mut acc = dst.identity();
        let mut y = x.clone();
        for &i in word.iter().rev() {
            let s = &gens[i];
            acc = dst.mul(&self.generator_cocycle(side, s, &y)?, &acc);
            y = self.act(side, s, &y)?;
        }
        Ok(acc)
    }
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl Coupling for Lifted {
    fn group(&self, side: Side) -> &DynGroup {
        match side {
            Side::H => &self.groups.0,
            Side::K => &self.groups.1,
        }
    }

    fn point(&self, seed: u64, sample: u64) -> BasePoint {
        self.base.point(seed, sample)
    }

    fn act(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<BasePoint> {
        let h = self.halo(side);
        let g = g
            .as_halo()
            .ok_or_else(|| HaloError::DescriptorMismatch("expected a halo element".into()))?;
        if h.base_group().is_identity(&g.base) {
            return Ok(x.clone());
        }
        self.base.act(side, &g.base, x)
    }

    fn cocycle(&self, side: Side, g: &DynElem, x: &BasePoint) -> Result<DynElem> {
        let word = self.word_for(side, g)?;
        self.word_cocycle(side, &word, x)
    }

    fn same_point(&self, x: &BasePoint, y: &BasePoint) -> Result<bool> {
        self.base.same_point(x, y)
    }

    fn describe(&self) -> String {
        format!("{} <-> {}", self.groups.0.name(), self.groups.1.name())
    }
}

/// One step of an iterated construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum LiftStage {
    /// Stability lift with the given lamp family.
    Lift(LiftFamily),
    /// Composition with the identity coupling.
    Identity,
}

/// A chain of couplings, base first.
#[derive(Clone)]
pub struct LiftChain {
    pub stages: Vec<Arc<dyn Coupling>>,
}

/// Applies the stages in order on top of `base`.
pub fn iterate_lift(stages: &[LiftStage], base: Arc<dyn Coupling>) -> Result<LiftChain> {
    let mut chain = vec![base];
    for stage in stages {
        let prev = chain.last().expect("nonempty").clone();
        let next: Arc<dyn Coupling> = match stage {
            LiftStage::Identity => prev,
            LiftStage::Lift(f) => Arc::new(Lifted::new(prev, f.clone())?),
        };
        chain.push(next);
    }
    Ok(LiftChain { stages: chain })
}

/// Lengths at one stage of the ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageLength {
    pub stage: usize,
    pub group: String,
    pub generator: String,
    pub length: Option<u64>,
    pub mode: Option<LengthMode>,
}

impl LiftChain {
    pub fn top(&self) -> &Arc<dyn Coupling> {
        self.stages.last().expect("nonempty")
    }

    /// Follows a top-level generator down the chain, recording the cocycle
    /// length at each stage: base generators consume `c(s, x)` and lamp
    /// generators consume `c(s̄⁻¹, x)` one stage below.
    pub fn ledger(&self, gen: usize, x: &BasePoint) -> Result<Vec<StageLength>> {
        let top = self.top();
        let mut s = top
            .group(Side::H)
            .generators()
            .get(gen)
            .cloned()
            .ok_or_else(|| HaloError::InvalidInput(format!("no generator {gen}")))?;
        let mut out = Vec::new();
        for (i, stage) in self.stages.iter().enumerate().rev() {
            let c = stage.cocycle(Side::H, &s, x).map_err(|e| e.at_stage(i))?;
            let k = stage.group(Side::K);
            let (length, mode) = match dyn_length(k, &c) {
                Ok((l, m)) => (Some(l), Some(m)),
                Err(_) => (None, None),
            };
            out.push(StageLength {
                stage: i,
                group: stage.group(Side::H).name(),
                generator: crate::halo::ElemText::text(&s),
                length,
                mode,
            });
            if i == 0 {
                break;
            }
            let below = &self.stages[i - 1];
            if Arc::ptr_eq(below, stage) {
                continue;
            }
            let h = stage.group(Side::H).as_halo().expect("lift stage");
            let lifted = s.as_halo().expect("halo element");
            s = if lifted.lamp == h.lamp_identity() {
                lifted.base.clone()
            } else {
                let g = h.base_group();
                let target = match &lifted.lamp {
                    Lamp::Perm(_) => single_transposition_target(h, &lifted.lamp).map(|t| t.0),
                    Lamp::Matrix(_) => single_transvection_target(h, &lifted.lamp),
                    _ => None,
                };
                match target {
                    Some(t) => g.inv(&t),
                    None => break,
                }
            };
        }
        out.reverse();
        Ok(out)
    }
}

/// One sampled lamp- or base-generator cocycle and its length bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftSample {
    pub sample: u64,
    pub generator: usize,
    pub kind: String,
    /// `|c(s, x)|` for base generators, `|c(s̄⁻¹, x)|` for lamp generators.
    pub base_length: Option<u64>,
    pub lifted_length: Option<u64>,
    pub mode: Option<LengthMode>,
    /// Allowed length: equal to the base length, or factor × base length.
    pub bound: Option<u64>,
    pub ok: bool,
    pub truncated: bool,
}

/// Summary of a lift bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub schema: String,
    pub couple: String,
    pub samples: usize,
    pub checked: usize,
    pub truncated: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

impl Lifted {
    /// Word-length factor for lamp generators of this family.
    pub fn lamp_factor(&self) -> u64 {
        match self.family {
            LiftFamily::Juggler { .. } => 4,
            LiftFamily::Cloner { .. } => 14,
            LiftFamily::Wreath { .. } => 1,
        }
    }

    /// Length of a lifted lamp-generator output, measured by the constructive
    /// transposition or transvection word when the target base is ℤ^d.
    fn lamp_output_length(&self, side: Side, c: &DynElem) -> Result<(u64, LengthMode)> {
        let dst = self.group(side.other());
        let h = self.halo(side.other());
        let lamp = &c.as_halo().expect("halo").lamp;
        if let Some(wb) = self.words(side.other()) {
            if let Some((g, _)) = single_transposition_target(h, lamp) {
                let Lamp::Perm(p) = lamp else { unreachable!() };
                let e = h.point(&h.base_group().identity());
                let pts: Vec<&(DynElem, u32)> = p.support().collect();
                let (i, j) = if g == e {
                    (pts[0].1, pts[1].1)
                } else {
                    let a = pts.iter().find(|(q, _)| *q == e).expect("identity point");
                    let b = pts.iter().find(|(q, _)| *q != e).expect("target point");
                    (a.1, b.1)
                };
                let w = wb.transposition_word(g.as_z().expect("Z^d point"), i, j)?;
                return Ok((w.len() as u64, LengthMode::ConstructiveBound));
            }
            if let Some(g) = single_transvection_target(h, lamp) {
                let Lamp::Matrix(m) = lamp else { unreachable!() };
                let e = h.point(&h.base_group().identity());
                let ie = m.support().iter().position(|p| *p == e).expect("identity point");
                let w = wb.transvection_word(g.as_z().expect("Z^d point"), m.matrix().get(ie, 1 - ie))?;
                return Ok((w.len() as u64, LengthMode::ConstructiveBound));
            }
        }
        dyn_length(dst, c)
    }

    /// Evaluates one generator at one point with its length accounting.
    pub fn sample_generator(&self, side: Side, gen: usize, seed: u64, sample: u64) -> Result<LiftSample> {
        let gens = self.group(side).generators();
        let s = gens
            .get(gen)
            .ok_or_else(|| HaloError::InvalidInput(format!("no generator {gen}")))?;
        let x = self.point(seed, sample);
        let kind = self.classify(side, s)?;
        let src = self.base.group(side);
        let dst = self.base.group(side.other());
        let truncated = |kind: &str| LiftSample {
            sample,
            generator: gen,
            kind: kind.to_string(),
            base_length: None,
            lifted_length: None,
            mode: None,
            bound: None,
            ok: true,
            truncated: true,
        };
        let (label, base_elem) = match &kind {
            GeneratorKind::Base(h) => ("base", Some(h.clone())),
            GeneratorKind::Transposition { target, .. } | GeneratorKind::Transvection { target, .. } => {
                ("lamp", Some(src.inv(target)))
            }
            GeneratorKind::Dilatation { .. } | GeneratorKind::Lamp { .. } => ("lamp", None),
        };
        let base_c = match &base_elem {
            Some(h) => match self.base.cocycle(side, h, &x) {
                Ok(c) => Some(c),
                Err(e) if e.is_truncation() => return Ok(truncated(label)),
                Err(e) => return Err(e),
            },
            None => None,
        };
        let c = match self.generator_cocycle(side, s, &x) {
            Ok(c) => c,
            Err(e) if e.is_truncation() => return Ok(truncated(label)),
            Err(e) => return Err(e),
        };
        let base_length = base_c.as_ref().map(|c| dyn_length(dst, c)).transpose()?.map(|l| l.0);
        let (lifted_length, mode, bound) = match &kind {
            GeneratorKind::Base(_) => {
                let (l, m) = dyn_length(self.group(side.other()), &c)?;
                (l, m, base_length)
            }
            GeneratorKind::Transposition { .. } | GeneratorKind::Transvection { .. } => {
                let (l, m) = self.lamp_output_length(side, &c)?;
                (l, m, base_length.map(|b| self.lamp_factor() * b))
            }
            GeneratorKind::Dilatation { .. } | GeneratorKind::Lamp { .. } => (1, LengthMode::Exact, Some(1)),
        };
        let ok = match (&kind, bound) {
            (GeneratorKind::Base(_), Some(b)) => lifted_length == b,
            (_, Some(b)) => lifted_length <= b,
            (_, None) => true,
        };
        Ok(LiftSample {
            sample,
            generator: gen,
            kind: label.to_string(),
            base_length,
            lifted_length: Some(lifted_length),
            mode: Some(mode),
            bound,
            ok,
            truncated: false,
        })
    }

    /// Samples generators `gens` (cycled) at `samples` points.
    pub fn bound_check(&self, side: Side, gens: &[usize], samples: usize, seed: u64) -> Result<(LiftReport, Vec<LiftSample>)> {
        if gens.is_empty() {
            return Err(HaloError::InvalidInput("no generators to sample".into()));
        }
        let rows: Vec<LiftSample> = (0..samples as u64)
            .into_par_iter()
            .map(|i| self.sample_generator(side, gens[i as usize % gens.len()], seed, i))
            .collect::<Result<_>>()?;
        let checked: Vec<&LiftSample> = rows.iter().filter(|r| !r.truncated).collect();
        let max_ratio = checked
            .iter()
            .filter_map(|r| match (r.lifted_length, r.base_length) {
                (Some(l), Some(b)) if b > 0 => Some(l as f64 / b as f64),
                _ => None,
            })
            .fold(0.0, f64::max);
        let report = LiftReport {
            schema: crate::SCHEMA.to_string(),
            couple: self.describe(),
            samples,
            checked: checked.len(),
            truncated: rows.len() - checked.len(),
            violations: checked.iter().filter(|r| !r.ok).count(),
            max_ratio,
        };
        Ok((report, rows))
    }

    /// Indices of the lamp generators of one side.
    pub fn lamp_generators(&self, side: Side) -> Vec<usize> {
        let n = self.halo(side).base_generator_count();
        (n..self.group(side).generators().len()).collect()
    }
}

/// Juggler(ℤ^d)-side tiling couple with a matched box tiling of ℤ^{d2}.
pub fn halo_zd_couple(spec: &TilingSpec, d2: usize, max_depth: usize) -> Result<TilingCouple<HaloTiling, BoxTiling>> {
    let a = match spec.build()? {
        crate::tiling::AnyTiling::Halo(h) => h,
        crate::tiling::AnyTiling::Box(_) => {
            return Err(HaloError::InvalidInput("expected a halo tiling spec".into()))
        }
    };
    let b = matched_zd_tiling(spec, d2)?;
    TilingCouple::new(a, b, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zd_base_generator_lifts_to_base_cocycle() {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(2, 1, 2, 24).unwrap());
        let lift = Lifted::new(base.clone(), LiftFamily::Juggler { r: 1 }).unwrap();
        let gens = lift.group(Side::H).generators();
        let x = lift.point(3, 7);
        let c = lift.cocycle(Side::H, &gens[0], &x).unwrap();
        let b = base.cocycle(Side::H, &DynElem::Z(vec![1, 0]), &x).unwrap();
        assert_eq!(c.as_halo().unwrap().base, b);
    }

    #[test]
    fn identity_lamp_coupling_keeps_wreath_lamps() {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(1, 1, 2, 24).unwrap());
        let lift = Lifted::new(base, LiftFamily::Wreath { lamp_group: FiniteGroup::cyclic(2).into() }).unwrap();
        let gens = lift.group(Side::H).generators();
        let t = gens.last().unwrap();
        let c = lift.cocycle(Side::H, t, &lift.point(0, 0)).unwrap();
        assert_eq!(&c, lift.group(Side::K).generators().last().unwrap());
    }

    #[test]
    fn empty_chain_is_the_base() {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(2, 1, 2, 24).unwrap());
        let chain = iterate_lift(&[], base.clone()).unwrap();
        assert!(Arc::ptr_eq(chain.top(), &base));
    }

    #[test]
    fn identity_stages_keep_the_base_cocycle() {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(2, 1, 2, 24).unwrap());
        let chain = iterate_lift(&[LiftStage::Identity, LiftStage::Identity], base.clone()).unwrap();
        let x = base.point(9, 2);
        let g = DynElem::Z(vec![3, -1]);
        assert_eq!(chain.top().cocycle(Side::H, &g, &x).unwrap(), base.cocycle(Side::H, &g, &x).unwrap());
    }

    #[test]
    fn pair_cocycle_respects_subgroups() {
        let pair = PairCouple::new(3, 1, 2, 1, 2, 20).unwrap();
        let z = |v: Vec<i64>| DynElem::Z(v);
        for s in 0..50 {
            let x = pair.point(4, s);
            let c = pair.cocycle(Side::H, &z(vec![0, 0, 5]), &x).unwrap();
            assert_eq!(c.as_z().unwrap()[0], 0, "subgroup element left the subgroup");
            let id = pair.pseudo_cocycle(Side::H, &z(vec![0, 0, -2]), &x).unwrap();
            assert_eq!(id, z(vec![0, 0]));
            let (g, h) = (z(vec![1, -1, 2]), z(vec![0, 2, 1]));
            let hx = pair.act(Side::H, &h, &x).unwrap();
            let gh = pair.group(Side::H).mul(&g, &h);
            let lhs = pair.pseudo_cocycle(Side::H, &gh, &x).unwrap();
            let k = pair.group(Side::K);
            let rhs = k.mul(
                &pair.pseudo_cocycle(Side::H, &g, &hx).unwrap(),
                &pair.pseudo_cocycle(Side::H, &h, &x).unwrap(),
            );
            assert_eq!(lhs, rhs);
        }
        assert!(PairCouple::new(2, 2, 2, 1, 2, 20).is_err());
        assert!(PairCouple::new(2, 0, 1, 0, 2, 20).is_ok());
    }

    #[test]
    fn lamp_lifts_obey_word_bounds() {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(2, 1, 2, 24).unwrap());
        for family in [LiftFamily::Juggler { r: 1 }, LiftFamily::Cloner { q: 2 }] {
            let lift = Lifted::new(base.clone(), family).unwrap();
            let (report, rows) = lift.bound_check(Side::H, &lift.lamp_generators(Side::H), 60, 2026).unwrap();
            assert_eq!(report.violations, 0, "{rows:?}");
            assert_eq!(report.checked + report.truncated, 60);
            let all: Vec<usize> = (0..lift.group(Side::H).generators().len()).collect();
            let (report, _) = lift.bound_check(Side::H, &all, 60, 7).unwrap();
            assert_eq!(report.violations, 0);
        }
    }

    #[test]
    fn unit_base_cocycle_lifts_to_a_generator() {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(1, 1, 2, 24).unwrap());
        let lift = Lifted::new(base, LiftFamily::Juggler { r: 1 }).unwrap();
        let gens = lift.group(Side::H).generators();
        let kgens = lift.group(Side::K).generators();
        let mut seen = 0;
        for s in 0..40 {
            let row = lift.sample_generator(Side::H, gens.len() - 1, 1, s).unwrap();
            if row.base_length == Some(1) {
                let c = lift.cocycle(Side::H, &gens[gens.len() - 1], &lift.point(1, s)).unwrap();
                assert!(kgens.contains(&c));
                assert_eq!(row.lifted_length, Some(1));
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn iterated_juggler_matches_simulation() {
        let spec = TilingSpec::Juggler { d: 1, m: 2, r: 1 };
        let base: Arc<dyn Coupling> = Arc::new(halo_zd_couple(&spec, 1, 3).unwrap());
        let chain = iterate_lift(&[LiftStage::Lift(LiftFamily::Juggler { r: 1 })], base).unwrap();
        let top = chain.top().clone();
        assert_eq!(top.describe(), "Juggler_1(Juggler_1(Z^1)) <-> Juggler_1(Z^1)");
        let lifted = Lifted::new(chain.stages[0].clone(), LiftFamily::Juggler { r: 1 }).unwrap();
        let n = lifted.group(Side::H).generators().len();
        let mut checked = 0;
        for s in 0..6 {
            for word in [vec![n - 1], vec![0, n - 1, 2, n - 2]] {
                match simulate::simulate_word(&lifted, Side::H, &word, 3, s, 1) {
                    Ok(r) => {
                        assert!(r.ok(), "{word:?} at {s}: {r:?}");
                        checked += 1;
                    }
                    Err(e) if e.is_truncation() => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(checked >= 8, "only {checked} words resolved");
        let ledger = chain.ledger(n - 1, &top.point(3, 0)).unwrap();
        assert_eq!(ledger.len(), 2);
        assert!(ledger.iter().all(|l| l.length.is_some()));
    }
}
