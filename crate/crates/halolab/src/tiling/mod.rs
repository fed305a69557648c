//! Følner tiling sequences `F_{n+1} = Σ_n F_n`: m-adic boxes in ℤ^d, halo
//! tiles `L(F_n) × F_n` with explicit shift representatives, and boxes whose
//! cardinalities match a halo tiling exactly.
//!
//! Shift sets are indexed by ranks `0..|Σ_n|`, so astronomically large shift
//! sets are sampled and decoded without being materialized.

mod boxes;
pub mod convergence;
mod halo_tiling;
pub mod rank;

pub use boxes::{box_generator_ratio, BoxSides, BoxTiling};
pub use halo_tiling::{lamp_group_order, HaloTiling, LampSpec};

use crate::bignum::{BigQuantity, GrowthLaw, EXACT_DIGIT_LIMIT};
use crate::error::{HaloError, Result};
use crate::group::{FiniteGroup, GroupTable};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

/// Default cap on explicitly enumerated level-(n+1) elements.
pub const DEFAULT_ENUM_CAP: usize = 500_000;

/// A word length, exact or a constructive upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLength {
    pub value: BigUint,
    pub exact: bool,
}

/// Symbolic data of one level: `|F_n|`, `|Σ_n|`, `R_n ≥ diam F_n` and `ε_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TilingLevel {
    pub n: usize,
    pub cardinality: BigQuantity,
    /// Number of shifts from level `n` to level `n+1`.
    pub shift_count: BigQuantity,
    pub diam_bound: BigQuantity,
    /// `ε_n = 1 / eps_inverse`.
    pub eps_inverse: BigQuantity,
}

impl TilingLevel {
    pub fn ln_eps(&self) -> f64 {
        -self.eps_inverse.ln()
    }
}

/// Exact value when `exact` can produce it and the size is reasonable, log-space otherwise.
pub(crate) fn big_from_ln(ln: f64, exact: impl FnOnce() -> Option<BigUint>) -> BigQuantity {
    if ln / std::f64::consts::LN_10 <= EXACT_DIGIT_LIMIT {
        if let Some(x) = exact() {
            return BigQuantity::Exact(x);
        }
    }
    BigQuantity::Log(ln)
}

/// A group together with a right Følner tiling sequence of it.
pub trait Tiling: Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Symmetric generating set.
    fn generators(&self) -> Vec<Self::Elem>;
    fn is_abelian(&self) -> bool {
        false
    }

    /// `|Σ_n|`.
    fn shift_count(&self, n: usize) -> Result<BigUint>;
    /// The shift of the given rank in `Σ_n`.
    fn shift(&self, n: usize, rank: &BigUint) -> Self::Elem;
    /// Membership in `F_n`.
    fn contains(&self, n: usize, e: &Self::Elem) -> bool;
    /// For `e ∈ F_{n+1}`, the unique `(rank of s, f)` with `s ∈ Σ_n`, `f ∈ F_n`, `e = s·f`.
    fn split(&self, n: usize, e: &Self::Elem) -> (BigUint, Self::Elem);
    /// All elements of `F_n`, built independently of the shift sets.
    fn enumerate_tile(&self, n: usize, cap: usize) -> Result<Vec<Self::Elem>>;
    fn level(&self, n: usize) -> TilingLevel;
    fn word_length(&self, e: &Self::Elem) -> Result<WordLength>;
    fn describe(&self, e: &Self::Elem) -> String;
}

/// Outcome of checking `F_{n+1} = ⊔_{s∈Σ_n} s·F_n` by enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    pub n: usize,
    pub shift_count: usize,
    pub tile_size: usize,
    pub next_size: usize,
    pub products: usize,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Verifies the level-`n` partition using the tiling's own shift set.
pub fn verify_tiling_level<T: Tiling>(t: &T, n: usize, cap: usize) -> Result<PartitionReport> {
    let count = t.shift_count(n)?;
    let count = count
        .to_usize()
        .filter(|&c| c <= cap)
        .ok_or_else(|| HaloError::Resource(format!("level {n} has {count} shifts, cap {cap}")))?;
    let shifts: Vec<T::Elem> = (0..count)
        .into_par_iter()
        .map(|r| t.shift(n, &BigUint::from(r)))
        .collect();
    verify_partition_with(t, n, &shifts, cap)
}

/// Verifies that the given shifts tile level `n+1` with copies of level `n`.
pub fn verify_partition_with<T: Tiling>(t: &T, n: usize, shifts: &[T::Elem], cap: usize) -> Result<PartitionReport> {
    let tile = t.enumerate_tile(n, cap)?;
    let next = t.enumerate_tile(n + 1, cap)?;
    if shifts.len().saturating_mul(tile.len()) > cap.saturating_mul(2) {
        return Err(HaloError::Resource(format!("{} products exceed cap {cap}", shifts.len() * tile.len())));
    }
    let blocks: Vec<Vec<T::Elem>> = shifts
        .par_iter()
        .map(|s| tile.iter().map(|f| t.mul(s, f)).collect())
        .collect();
    let next_set: HashSet<&T::Elem> = next.iter().collect();
    let mut seen: HashMap<&T::Elem, usize> = HashMap::with_capacity(next.len());
    let mut witness = None;
    for (i, block) in blocks.iter().enumerate() {
        for e in block {
            if let Some(&j) = seen.get(e) {
                witness.get_or_insert_with(|| format!("{} lies in the translates by shifts {j} and {i}", t.describe(e)));
            } else {
                if !next_set.contains(e) {
                    witness.get_or_insert_with(|| format!("{} from shift {i} lies outside level {}", t.describe(e), n + 1));
                }
                seen.insert(e, i);
            }
        }
    }
    if witness.is_none() {
        if let Some(missing) = next.iter().find(|e| !seen.contains_key(e)) {
            witness = Some(format!("{} of level {} is not covered", t.describe(missing), n + 1));
        }
    }
    Ok(PartitionReport {
        n,
        shift_count: shifts.len(),
        tile_size: tile.len(),
        next_size: next.len(),
        products: blocks.iter().map(Vec::len).sum(),
        passed: witness.is_none(),
        witness,
    })
}

/// Exact `|F_n·s ∖ F_n| / |F_n|` by enumeration.
pub fn boundary_ratio<T: Tiling>(t: &T, n: usize, s: &T::Elem, cap: usize) -> Result<BigRational> {
    let tile = t.enumerate_tile(n, cap)?;
    let outside = tile
        .par_iter()
        .filter(|e| !t.contains(n, &t.mul(e, s)))
        .count();
    Ok(BigRational::new(BigInt::from(outside), BigInt::from(tile.len())))
}

/// Serializable description of a tiling sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TilingSpec {
    Zd { d: usize, m: u64 },
    Lamplighter {
        #[serde(default = "one")]
        d: usize,
        #[serde(default = "two")]
        m: u64,
        lamp_group: GroupTable,
    },
    Juggler {
        d: usize,
        m: u64,
        #[serde(default = "one_u32")]
        r: u32,
    },
    Cloner { d: usize, m: u64, q: u32 },
    Matched { target: Box<TilingSpec>, d2: usize },
}

fn one() -> usize {
    1
}
fn two() -> u64 {
    2
}
fn one_u32() -> u32 {
    1
}

/// A built tiling: either a box tiling of ℤ^d or a halo tiling.
#[derive(Debug, Clone)]
pub enum AnyTiling {
    Box(BoxTiling),
    Halo(HaloTiling),
}

impl AnyTiling {
    pub fn level(&self, n: usize) -> TilingLevel {
        match self {
            AnyTiling::Box(b) => b.level(n),
            AnyTiling::Halo(h) => h.level(n),
        }
    }
}

impl TilingSpec {
    /// Base ℤ^d box parameters `(d, m)` of a halo or box spec.
    pub fn base(&self) -> Option<(usize, u64)> {
        match self {
            TilingSpec::Zd { d, m }
            | TilingSpec::Lamplighter { d, m, .. }
            | TilingSpec::Juggler { d, m, .. }
            | TilingSpec::Cloner { d, m, .. } => Some((*d, *m)),
            TilingSpec::Matched { .. } => None,
        }
    }

    /// Lamp growth law of the family (`None` for ℤ^d).
    pub fn law(&self) -> Option<GrowthLaw> {
        match self {
            TilingSpec::Zd { .. } | TilingSpec::Matched { .. } => None,
            TilingSpec::Lamplighter { lamp_group, .. } => Some(GrowthLaw::Power { base: lamp_group.table.len() as u64 }),
            TilingSpec::Juggler { r, .. } => Some(GrowthLaw::Factorial { r: *r as u64 }),
            TilingSpec::Cloner { q, .. } => Some(GrowthLaw::GeneralLinear { q: *q as u64 }),
        }
    }

    pub fn build(&self) -> Result<AnyTiling> {
        match self {
            TilingSpec::Zd { d, m } => Ok(AnyTiling::Box(BoxTiling::adic(*d, *m)?)),
            TilingSpec::Lamplighter { d, m, lamp_group } => {
                let gamma = FiniteGroup::try_from(lamp_group.clone())?;
                if gamma.order() < 2 {
                    return Err(HaloError::InvalidInput("lamp group must be nontrivial".into()));
                }
                Ok(AnyTiling::Halo(HaloTiling::new(BoxTiling::adic(*d, *m)?, LampSpec::Wreath { gamma })?))
            }
            TilingSpec::Juggler { d, m, r } => Ok(AnyTiling::Halo(HaloTiling::new(
                BoxTiling::adic(*d, *m)?,
                LampSpec::Juggler { r: *r },
            )?)),
            TilingSpec::Cloner { d, m, q } => Ok(AnyTiling::Halo(HaloTiling::new(
                BoxTiling::adic(*d, *m)?,
                LampSpec::Cloner { q: *q },
            )?)),
            TilingSpec::Matched { target, d2 } => Ok(AnyTiling::Box(matched_zd_tiling(target, *d2)?)),
        }
    }
}

/// Integer `k`-th root of `x`, if exact.
fn exact_root(x: u64, k: u32) -> Option<u64> {
    let guess = (x as f64).powf(1.0 / k as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|g| g.checked_pow(k) == Some(x))
}

/// Box tiling of ℤ^{d2} with `|G_n| = |L_n|` at every level, sides
/// `tⁿ·ℓ_i(·)` where `t^{d2} = m^{d1}`.
pub fn matched_zd_tiling(target: &TilingSpec, d2: usize) -> Result<BoxTiling> {
    let (d1, m) = target
        .base()
        .ok_or_else(|| HaloError::Construction("matching needs a target over an m-adic base".into()))?;
    if d2 == 0 {
        return Err(HaloError::InvalidInput("d2 must be positive".into()));
    }
    let c = m
        .checked_pow(d1 as u32)
        .ok_or_else(|| HaloError::Construction("base tile growth overflows".into()))?;
    let t = exact_root(c, d2 as u32).ok_or_else(|| {
        HaloError::Construction(format!("|F_1| = {c} is not a {d2}-th power, so no box matching exists"))
    })?;
    let boxes = BoxTiling::new(BoxSides::Matched { d2, t, tile_base: c, law: target.law() });
    let built = target.build()?;
    for n in 0..3 {
        let want = built.level(n).cardinality;
        let got = boxes.level(n).cardinality;
        if want != got {
            return Err(HaloError::Construction(format!(
                "matched cardinality {got} differs from target {want} at level {n}"
            )));
        }
    }
    Ok(boxes)
}

/// Level data as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub cardinality: String,
    pub shift_count: String,
    pub diam_bound: String,
    /// `ε_n` written as `1/<denominator>`.
    pub eps: String,
}

impl From<&TilingLevel> for LevelRecord {
    fn from(l: &TilingLevel) -> Self {
        LevelRecord {
            n: l.n,
            cardinality: l.cardinality.to_decimal_string(),
            shift_count: l.shift_count.to_decimal_string(),
            diam_bound: l.diam_bound.to_decimal_string(),
            eps: format!("1/{}", l.eps_inverse.to_decimal_string()),
        }
    }
}

impl LevelRecord {
    pub fn to_level(&self) -> Result<TilingLevel> {
        let parse = |s: &str| {
            BigQuantity::parse(s).ok_or_else(|| HaloError::InvalidInput(format!("not a big quantity: {s}")))
        };
        let eps = self
            .eps
            .strip_prefix("1/")
            .ok_or_else(|| HaloError::InvalidInput(format!("ε must be 1/<n>, got {}", self.eps)))?;
        Ok(TilingLevel {
            n: self.n,
            cardinality: parse(&self.cardinality)?,
            shift_count: parse(&self.shift_count)?,
            diam_bound: parse(&self.diam_bound)?,
            eps_inverse: parse(eps)?,
        })
    }
}

/// JSON export of a tiling: its spec and the first levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingExport {
    pub schema: String,
    pub spec: TilingSpec,
    pub levels: Vec<LevelRecord>,
}

pub fn export_tiling(spec: &TilingSpec, levels: usize) -> Result<TilingExport> {
    let t = spec.build()?;
    Ok(TilingExport {
        schema: crate::SCHEMA.to_string(),
        spec: spec.clone(),
        levels: (0..levels).map(|n| LevelRecord::from(&t.level(n))).collect(),
    })
}

/// Parses an export and checks that its levels match a rebuild of the spec.
pub fn import_tiling(json: &str) -> Result<(TilingSpec, Vec<TilingLevel>)> {
    let e: TilingExport =
        serde_json::from_str(json).map_err(|err| HaloError::InvalidInput(format!("tiling JSON: {err}")))?;
    let t = e.spec.build()?;
    let mut levels = Vec::with_capacity(e.levels.len());
    for rec in &e.levels {
        let fresh = LevelRecord::from(&t.level(rec.n));
        if &fresh != rec {
            return Err(HaloError::InvalidInput(format!("level {} does not match its spec", rec.n)));
        }
        levels.push(rec.to_level()?);
    }
    Ok((e.spec, levels))
}

/// Exact boundary ratio of one generator of a halo tiling against its base ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRatio {
    pub generator: usize,
    /// `base` or `lamp`.
    pub kind: String,
    /// `|L_n·s ∖ L_n| / |L_n|` by enumeration, as `a/b`.
    pub ratio: String,
    /// Ratio of the base direction `s̄` in `F_n`; the largest base ratio for
    /// lamp generators supported at the identity only.
    pub base_ratio: String,
    /// Equality for base generators, `≤` for lamp generators.
    pub ok: bool,
}

/// Compares every generator's exact boundary ratio at level `n` with the base box.
pub fn generator_ratios(t: &HaloTiling, n: usize, cap: usize) -> Result<Vec<GeneratorRatio>> {
    use crate::halo::Lamp;
    let sides = t.base().sides(n)?;
    let d = t.base().dim();
    let base_ratio = |v: &[i64]| -> Option<BigRational> {
        let k = v.iter().position(|&x| x != 0)?;
        (v.iter().map(|x| x.abs()).sum::<i64>() == 1).then(|| box_generator_ratio(&sides, k))
    };
    let max_base = (0..d).map(|k| box_generator_ratio(&sides, k)).max().expect("d > 0");
    let group = t.group();
    t.generators()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let ratio = boundary_ratio(t, n, s, cap)?;
            let (kind, base, ok) = if s.lamp == group.lamp_identity() {
                let b = base_ratio(&s.base)
                    .ok_or_else(|| HaloError::Invariant(format!("base generator {i} is not a unit vector")))?;
                ("base", b.clone(), ratio == b)
            } else {
                let target: Vec<Vec<i64>> = match &s.lamp {
                    Lamp::Perm(p) => p.support().map(|(q, _)| q.clone()).collect(),
                    Lamp::Matrix(m) => m.support().to_vec(),
                    Lamp::Func(f) => f.support().cloned().collect(),
                    Lamp::None => vec![],
                };
                let b = target
                    .iter()
                    .find_map(|q| base_ratio(q))
                    .unwrap_or_else(|| max_base.clone());
                ("lamp", b.clone(), ratio <= b)
            };
            Ok(GeneratorRatio {
                generator: i,
                kind: kind.to_string(),
                ratio: ratio.to_string(),
                base_ratio: base.to_string(),
                ok,
            })
        })
        .collect()
}
