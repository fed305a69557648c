//! Runtime-nested groups: ℤ^d and halo products over them, to any depth.

use crate::coupling::LengthMode;
use crate::error::{HaloError, Result};
use crate::group::{l1_norm, Group, Zd};
use crate::halo::{ElemText, Family, Halo, HaloElem, Lamp};
use crate::word::{transposition_word_len, transvection_word_len, WordBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DynGroup {
    Zd(Zd),
    Halo(Box<Halo<DynGroup>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynElem {
    Z(Vec<i64>),
    H(Box<HaloElem<DynElem>>),
}

impl DynElem {
    pub fn as_z(&self) -> Option<&[i64]> {
        match self {
            DynElem::Z(v) => Some(v),
            DynElem::H(_) => None,
        }
    }

    pub fn as_halo(&self) -> Option<&HaloElem<DynElem>> {
        match self {
            DynElem::H(h) => Some(h),
            DynElem::Z(_) => None,
        }
    }
}

impl ElemText for DynElem {
    fn text(&self) -> String {
        match self {
            DynElem::Z(v) => v.text(),
            DynElem::H(h) => h.text(),
        }
    }
}

fn map_lamp<P: Ord + Clone, Q: Ord + Clone>(lamp: &Lamp<P>, f: impl Fn(&P) -> Q) -> Lamp<Q> {
    match lamp {
        Lamp::None => Lamp::None,
        Lamp::Perm(s) => Lamp::Perm(s.map_points(|(p, i)| (f(p), *i))),
        Lamp::Matrix(m) => Lamp::Matrix(m.map_points(f)),
        Lamp::Func(g) => Lamp::Func(g.map_points(f)),
    }
}

/// Embeds an element of a halo product over ℤ^d.
pub fn dyn_from_halo(a: &HaloElem<Vec<i64>>) -> DynElem {
    DynElem::H(Box::new(HaloElem {
        lamp: map_lamp(&a.lamp, |p| DynElem::Z(p.clone())),
        base: DynElem::Z(a.base.clone()),
    }))
}

/// Inverse of [`dyn_from_halo`]; `None` when the element is nested deeper.
pub fn halo_from_dyn(a: &DynElem) -> Option<HaloElem<Vec<i64>>> {
    let h = a.as_halo()?;
    let base = h.base.as_z()?.to_vec();
    let ok = match &h.lamp {
        Lamp::None => true,
        Lamp::Perm(s) => s.support().all(|(p, _)| p.as_z().is_some()),
        Lamp::Matrix(m) => m.support().iter().all(|p| p.as_z().is_some()),
        Lamp::Func(f) => f.support().all(|p| p.as_z().is_some()),
    };
    ok.then(|| HaloElem {
        lamp: map_lamp(&h.lamp, |p| p.as_z().expect("checked").to_vec()),
        base,
    })
}

impl DynGroup {
    pub fn zd(d: usize) -> Self {
        DynGroup::Zd(Zd::new(d))
    }

    /// The same halo product with a runtime base.
    pub fn from_halo(h: &Halo<Zd>) -> Self {
        DynGroup::Halo(Box::new(Halo::with_kernel(
            DynGroup::Zd(*h.base_group()),
            h.family().clone(),
            h.kernel_rank(),
        )))
    }

    /// A halo product over this group.
    pub fn halo_over(&self, family: Family, kernel_rank: usize) -> Self {
        DynGroup::Halo(Box::new(Halo::with_kernel(self.clone(), family, kernel_rank)))
    }

    /// The static halo product, when the base is ℤ^d.
    pub fn to_halo_zd(&self) -> Option<Halo<Zd>> {
        match self {
            DynGroup::Halo(h) => match h.base_group() {
                DynGroup::Zd(z) => Some(Halo::with_kernel(*z, h.family().clone(), h.kernel_rank())),
                DynGroup::Halo(_) => None,
            },
            DynGroup::Zd(_) => None,
        }
    }

    pub fn as_halo(&self) -> Option<&Halo<DynGroup>> {
        match self {
            DynGroup::Halo(h) => Some(h),
            DynGroup::Zd(_) => None,
        }
    }

    /// Short name such as `Juggler_1(Z^2)`.
    pub fn name(&self) -> String {
        match self {
            DynGroup::Zd(z) => format!("Z^{}", z.d),
            DynGroup::Halo(h) => {
                let inner = h.base_group().name();
                let k = h.kernel_rank();
                let over = if k > 0 { format!("{inner}, Z^{k}") } else { inner };
                match h.family() {
                    Family::FreeAbelian => over,
                    Family::Juggler { r } => format!("Juggler_{r}({over})"),
                    Family::Cloner { field } => format!("Cloner({over}, F_{})", field.order()),
                    Family::Wreath { gamma } => format!("C_{} wr ({over})", gamma.order()),
                }
            }
        }
    }

    fn wrap(h: HaloElem<DynElem>) -> DynElem {
        DynElem::H(Box::new(h))
    }

    fn halo_args<'a>(&self, a: &'a DynElem) -> (&Halo<DynGroup>, &'a HaloElem<DynElem>) {
        match (self, a) {
            (DynGroup::Halo(g), DynElem::H(x)) => (g, x),
            _ => panic!("element {a:?} does not belong to {}", self.name()),
        }
    }
}

impl Group for DynGroup {
    type Elem = DynElem;

    fn identity(&self) -> DynElem {
        match self {
            DynGroup::Zd(z) => DynElem::Z(z.identity()),
            DynGroup::Halo(h) => Self::wrap(h.identity()),
        }
    }

    fn mul(&self, a: &DynElem, b: &DynElem) -> DynElem {
        match (self, a, b) {
            (DynGroup::Zd(z), DynElem::Z(x), DynElem::Z(y)) => DynElem::Z(z.mul(x, y)),
            (DynGroup::Halo(h), DynElem::H(x), DynElem::H(y)) => Self::wrap(h.mul(x, y)),
            _ => panic!("elements do not belong to {}", self.name()),
        }
    }

    fn inv(&self, a: &DynElem) -> DynElem {
        match (self, a) {
            (DynGroup::Zd(z), DynElem::Z(x)) => DynElem::Z(z.inv(x)),
            _ => {
                let (h, x) = self.halo_args(a);
                Self::wrap(h.inv(x))
            }
        }
    }

    fn generators(&self) -> Vec<DynElem> {
        match self {
            DynGroup::Zd(z) => z.generators().into_iter().map(DynElem::Z).collect(),
            DynGroup::Halo(h) => h.generators().into_iter().map(Self::wrap).collect(),
        }
    }

    fn is_abelian(&self) -> bool {
        matches!(self, DynGroup::Zd(_))
    }

    fn project(&self, a: &DynElem, kernel_rank: usize) -> DynElem {
        match (self, a) {
            (DynGroup::Zd(z), DynElem::Z(x)) => DynElem::Z(z.project(x, kernel_rank)),
            _ => {
                assert_eq!(kernel_rank, 0, "quotients are only defined for free abelian groups");
                a.clone()
            }
        }
    }
}

/// Word length of an element with the mode it was obtained in. ℤ^d lengths are
/// exact ℓ¹ norms; generators have length 1; halo products over ℤ^d use
/// constructive words; deeper nestings use the transposition and transvection
/// bounds for single lamp moves at the identity.
pub fn dyn_length(g: &DynGroup, e: &DynElem) -> Result<(u64, LengthMode)> {
    if let DynElem::Z(v) = e {
        return Ok((l1_norm(v), LengthMode::Exact));
    }
    if g.is_identity(e) {
        return Ok((0, LengthMode::Exact));
    }
    if g.generators().contains(e) {
        return Ok((1, LengthMode::Exact));
    }
    let (h, x) = g.halo_args(e);
    if h.lamp_identity() == x.lamp {
        return dyn_length(h.base_group(), &x.base);
    }
    if let Some(zh) = g.to_halo_zd() {
        let a = halo_from_dyn(e).expect("halo over Z^d");
        let w = WordBuilder::new(zh).element_word(&a)?;
        return Ok((w.len() as u64, LengthMode::ConstructiveBound));
    }
    if h.base_group().is_identity(&x.base) {
        if let Some((p, same_slot)) = single_transposition_target(h, &x.lamp) {
            let (n, _) = dyn_length(h.base_group(), &p)?;
            return Ok((transposition_word_len(n, same_slot), LengthMode::ConstructiveBound));
        }
        if let Some(p) = single_transvection_target(h, &x.lamp) {
            let (n, _) = dyn_length(h.base_group(), &p)?;
            let q = h.field().expect("cloner").order();
            return Ok((transvection_word_len(n.max(1), q), LengthMode::ConstructiveBound));
        }
    }
    Err(HaloError::InvalidInput(format!("no word lengths for this element of {}", g.name())))
}

/// `(g, i = j)` when the lamp is `τ_{(e,i),(g,j)}`.
pub(crate) fn single_transposition_target(h: &Halo<DynGroup>, lamp: &Lamp<DynElem>) -> Option<(DynElem, bool)> {
    let Lamp::Perm(s) = lamp else { return None };
    let pts: Vec<&(DynElem, u32)> = s.support().collect();
    if pts.len() != 2 {
        return None;
    }
    let e = h.point(&h.base_group().identity());
    let (a, b) = (pts[0], pts[1]);
    let (at_e, other) = if a.0 == e { (a, b) } else if b.0 == e { (b, a) } else { return None };
    Some((other.0.clone(), at_e.1 == other.1))
}

/// `g` when the lamp is `τ_{e,g}(λ)`.
pub(crate) fn single_transvection_target(h: &Halo<DynGroup>, lamp: &Lamp<DynElem>) -> Option<DynElem> {
    let Lamp::Matrix(m) = lamp else { return None };
    if m.support().len() != 2 {
        return None;
    }
    let e = h.point(&h.base_group().identity());
    let ie = m.support().iter().position(|p| *p == e)?;
    let ig = 1 - ie;
    let mat = m.matrix();
    let transvection = mat.get(ie, ie) == 1 && mat.get(ig, ie) == 0 && mat.get(ig, ig) == 1 && mat.get(ie, ig) != 0;
    transvection.then(|| m.support()[ig].clone())
}
