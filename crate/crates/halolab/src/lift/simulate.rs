//! Direct simulation of lifted couplings on lamp configurations.
//!
//! A lifted point is a base point `x` with a lamp field over the quotient: labels
//! on juggler points, a function on finitely supported vectors for cloners, or
//! Γ-values for wreaths. Group elements act on fields by pullback, and `θ` reads
//! a field through the orbit bijection `ψ_x(k) = κ(k⁻¹, x)⁻¹`. Both sides of
//! `θ(w·z) = c(w, z)·θ(z)` are compared as pullbacks into the source field,
//! which is agreement for every field at once. On vectors both sides are linear,
//! so unit vectors suffice.

use super::{BasePoint, Coupling, DynElem, DynGroup, Lifted, Side};
use crate::error::{HaloError, Result};
use crate::group::Group;
use crate::halo::{Halo, HaloElem, Lamp};
use crate::lamp::SparseVec;
use crate::word::bfs_ball;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A coordinate of a lamp field, possibly with a pending Γ-multiplier.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Probe {
    Slot(DynElem, u32),
    Vector(SparseVec<DynElem>),
    Value(usize, DynElem),
}

/// Outcome of one simulated cocycle check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub probes: usize,
    pub base_agrees: bool,
    pub lamps_agree: bool,
    pub mismatch: Option<String>,
}

impl OracleCheck {
    pub fn ok(&self) -> bool {
        self.base_agrees && self.lamps_agree
    }
}

fn halo_elem(a: &DynElem) -> Result<&HaloElem<DynElem>> {
    a.as_halo()
        .ok_or_else(|| HaloError::DescriptorMismatch("expected a halo element".into()))
}

/// The coordinate of the original field that `a` moves to `p`.
fn pull(h: &Halo<DynGroup>, a: &HaloElem<DynElem>, p: &Probe) -> Probe {
    let g = h.base_group();
    let back = g.inv(&a.base);
    let shift = |q: &DynElem| h.point(&g.mul(&back, q));
    match (&a.lamp, p) {
        (Lamp::Perm(s), Probe::Slot(q, i)) => {
            let (q, i) = s.inverse().apply(&(q.clone(), *i));
            Probe::Slot(shift(&q), i)
        }
        (Lamp::Matrix(m), Probe::Vector(v)) => {
            let f = h.field().expect("cloner");
            let w = m.inverse(f).apply(v, f);
            Probe::Vector(w.iter().map(|(q, c)| (shift(q), *c)).collect())
        }
        (Lamp::Func(f), Probe::Value(gamma, q)) => {
            let lamps = h.lamp_group().expect("wreath");
            Probe::Value(lamps.mul(*gamma, f.get(q, lamps)), shift(q))
        }
        _ => panic!("probe does not match the lamp family"),
    }
}

/// `ψ_x`: quotient points of `from` to quotient points of the other side.
fn psi(base: &dyn Coupling, from: Side, k: &DynElem, x: &BasePoint) -> Result<DynElem> {
    let to = from.other();
    let src = base.group(from);
    let dst = base.group(to);
    let c = base.cocycle(from, &src.inv(k), x)?;
    Ok(dst.project(&dst.inv(&c), base.kernel(to)))
}

fn transport(base: &dyn Coupling, from: Side, p: &Probe, x: &BasePoint) -> Result<Probe> {
    Ok(match p {
        Probe::Slot(k, i) => Probe::Slot(psi(base, from, k, x)?, *i),
        Probe::Vector(v) => Probe::Vector(
            v.iter()
                .map(|(k, c)| Ok((psi(base, from, k, x)?, *c)))
                .collect::<Result<_>>()?,
        ),
        Probe::Value(gamma, k) => Probe::Value(*gamma, psi(base, from, k, x)?),
    })
}

fn lamp_points(lamp: &Lamp<DynElem>) -> Vec<DynElem> {
    match lamp {
        Lamp::None => vec![],
        Lamp::Perm(s) => s.support().map(|(p, _)| p.clone()).collect(),
        Lamp::Matrix(m) => m.support().to_vec(),
        Lamp::Func(f) => f.support().cloned().collect(),
    }
}

fn probes(h: &Halo<DynGroup>, points: &BTreeSet<DynElem>) -> Vec<Probe> {
    let mut out = Vec::new();
    for p in points {
        if h.field().is_some() {
            out.push(Probe::Vector([(p.clone(), 1)].into_iter().collect()));
        } else if let Some(g) = h.lamp_group() {
            out.push(Probe::Value(g.identity(), p.clone()));
        } else {
            out.extend((1..=h.arity()).map(|i| Probe::Slot(p.clone(), i)));
        }
    }
    out
}

/// Checks `θ(w·z) = c(w, z)·θ(z)` for `w` in `side` at the point `(seed, sample)`
/// on the probes of the ball of `radius` in the target quotient, together with
/// the supports moved by `w` and `c`.
pub fn simulate_cocycle(lift: &Lifted, side: Side, w: &DynElem, seed: u64, sample: u64, radius: usize) -> Result<OracleCheck> {
    let x = lift.point(seed, sample);
    let c = lift.cocycle(side, w, &x)?;
    compare(lift, side, w, &c, &x, radius)
}

/// [`simulate_cocycle`] for a generator word, with the cocycle extended along
/// the word; works for nested groups where arbitrary elements have no words.
pub fn simulate_word(lift: &Lifted, side: Side, word: &[usize], seed: u64, sample: u64, radius: usize) -> Result<OracleCheck> {
    let g = lift.group(side);
    let w = g.eval_word(&g.generators(), word);
    let x = lift.point(seed, sample);
    let c = lift.word_cocycle(side, word, &x)?;
    compare(lift, side, &w, &c, &x, radius)
}

/// Compares `θ(w·z)` with `c·θ(z)` for a proposed cocycle value `c`.
fn compare(lift: &Lifted, side: Side, w: &DynElem, c: &DynElem, x: &BasePoint, radius: usize) -> Result<OracleCheck> {
    let base = lift.base().as_ref();
    let other = side.other();
    let src = lift.group(side).as_halo().expect("halo");
    let dst = lift.group(other).as_halo().expect("halo");
    let x = x.clone();
    let wx = lift.act(side, w, &x)?;
    let cx = lift.act(other, c, &x)?;
    let base_agrees = lift.same_point(&wx, &cx)?;
    let (wh, ch) = (halo_elem(w)?, halo_elem(c)?);

    let mut points: BTreeSet<DynElem> = BTreeSet::new();
    let ball = bfs_ball(dst.base_group(), radius, 100_000)?;
    points.extend(ball.table.keys().map(|k| dst.point(k)));
    points.extend(lamp_points(&ch.lamp));
    for p in lamp_points(&wh.lamp) {
        points.insert(psi(base, side, &p, &x)?);
        points.insert(psi(base, side, &p, &wx)?);
    }

    let probes = probes(dst, &points);
    for p in &probes {
        let lhs = pull(src, wh, &transport(base, other, p, &wx)?);
        let rhs = transport(base, other, &pull(dst, ch, p), &x)?;
        if lhs != rhs {
            return Ok(OracleCheck {
                probes: probes.len(),
                base_agrees,
                lamps_agree: false,
                mismatch: Some(format!("{p:?}: {lhs:?} vs {rhs:?}")),
            });
        }
    }
    Ok(OracleCheck { probes: probes.len(), base_agrees, lamps_agree: true, mismatch: None })
}
