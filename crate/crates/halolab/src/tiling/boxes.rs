//! Box tilings of ℤ^d: the m-adic cubes and the cardinality-matched boxes.
//!
//! Coordinates are big integers because matched boxes have astronomically
//! long sides.

use super::{big_from_ln, Tiling, TilingLevel, WordLength};
use crate::bignum::{ell_factorial, ell_gl, ln_ell_factorial, ln_ell_gl, log_sum_exp, BigQuantity, GrowthLaw};
use crate::error::{HaloError, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// How the side lengths of level `n` are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoxSides {
    /// `F_n = {0,…,mⁿ−1}^d`.
    Adic { d: usize, m: u64 },
    /// `G_n = ∏_i {0,…,tⁿ·ℓ_i − 1}` in ℤ^{d2}, where the `ℓ_i` split the lamp
    /// growth `Λ(|F_n|)` of a target whose base tiles have `|F_n| = cⁿ`.
    Matched {
        d2: usize,
        t: u64,
        tile_base: u64,
        law: Option<GrowthLaw>,
    },
}

/// Exponent `e_i` of the power-law split: the `e_1, …, e_d` sum to `total`.
fn power_share(i: u64, d: u64, total: u64) -> u64 {
    (total + d - i) / d
}

impl BoxSides {
    pub fn dim(&self) -> usize {
        match self {
            BoxSides::Adic { d, .. } => *d,
            BoxSides::Matched { d2, .. } => *d2,
        }
    }

    /// Exact side lengths at level `n`.
    pub fn exact(&self, n: usize) -> Result<Vec<BigUint>> {
        match *self {
            BoxSides::Adic { d, m } => Ok(vec![BigUint::from(m).pow(n as u32); d]),
            BoxSides::Matched { d2, t, tile_base, law } => {
                let points = tile_base
                    .checked_pow(n as u32)
                    .ok_or_else(|| HaloError::Resource(format!("matched level {n} is too large to be exact")))?;
                let tn = BigUint::from(t).pow(n as u32);
                let d = d2 as u64;
                Ok((1..=d)
                    .map(|i| {
                        let ell = match law {
                            None => BigUint::one(),
                            Some(GrowthLaw::Factorial { r }) => ell_factorial(i, d, r * points),
                            Some(GrowthLaw::GeneralLinear { q }) => ell_gl(i, d, points, q),
                            Some(GrowthLaw::Power { base }) => BigUint::from(base).pow(power_share(i, d, points) as u32),
                        };
                        &tn * ell
                    })
                    .collect())
            }
        }
    }

    /// Natural logarithms of the side lengths at level `n`.
    pub fn ln(&self, n: usize) -> Vec<f64> {
        match *self {
            BoxSides::Adic { d, m } => vec![n as f64 * (m as f64).ln(); d],
            BoxSides::Matched { d2, t, tile_base, law } => {
                let points = (tile_base as f64).powi(n as i32);
                let d = d2 as u64;
                (1..=d)
                    .map(|i| {
                        let ell = match law {
                            None => 0.0,
                            Some(GrowthLaw::Factorial { r }) => ln_ell_factorial(i, d, r as f64 * points),
                            Some(GrowthLaw::GeneralLinear { q }) => ln_ell_gl(i, d, points, q),
                            Some(GrowthLaw::Power { base }) => {
                                ((points + (d - i) as f64) / d as f64).floor() * (base as f64).ln()
                            }
                        };
                        n as f64 * (t as f64).ln() + ell
                    })
                    .collect()
            }
        }
    }
}

/// A box tiling `F_{n+1} = Σ_n + F_n` of ℤ^d by nested boxes anchored at 0.
#[derive(Debug)]
pub struct BoxTiling {
    sides: BoxSides,
    cache: RwLock<HashMap<usize, Arc<Vec<BigUint>>>>,
}

impl Clone for BoxTiling {
    fn clone(&self) -> Self {
        BoxTiling::new(self.sides.clone())
    }
}

impl BoxTiling {
    pub fn new(sides: BoxSides) -> Self {
        BoxTiling { sides, cache: RwLock::new(HashMap::new()) }
    }

    /// The m-adic tiling `F_n = {0,…,mⁿ−1}^d`.
    pub fn adic(d: usize, m: u64) -> Result<Self> {
        if d == 0 || m < 2 {
            return Err(HaloError::InvalidInput(format!("m-adic tiling needs d ≥ 1 and m ≥ 2, got d={d}, m={m}")));
        }
        Ok(Self::new(BoxSides::Adic { d, m }))
    }

    pub fn spec(&self) -> &BoxSides {
        &self.sides
    }

    pub fn dim(&self) -> usize {
        self.sides.dim()
    }

    /// Side lengths of `F_n`, cached.
    pub fn sides(&self, n: usize) -> Result<Arc<Vec<BigUint>>> {
        if let Some(s) = self.cache.read().expect("cache lock").get(&n) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.sides.exact(n)?);
        self.cache.write().expect("cache lock").insert(n, s.clone());
        Ok(s)
    }

    fn sides_ok(&self, n: usize) -> Arc<Vec<BigUint>> {
        self.sides(n).expect("level too large for exact box arithmetic")
    }

    /// Per-coordinate number of shifts from level `n` to `n+1`.
    pub fn multipliers(&self, n: usize) -> Result<Vec<BigUint>> {
        let a = self.sides(n)?;
        let b = self.sides(n + 1)?;
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| {
                let (k, rem) = y.div_rem(x);
                if rem.is_zero() {
                    Ok(k)
                } else {
                    Err(HaloError::Construction(format!("side {x} at level {n} does not divide side {y} at level {}", n + 1)))
                }
            })
            .collect()
    }

    /// Points of `F_n` as machine integers, in lexicographic order.
    pub fn points_i64(&self, n: usize) -> Result<Vec<Vec<i64>>> {
        let sides: Vec<i64> = self
            .sides(n)?
            .iter()
            .map(|s| s.to_i64())
            .collect::<Option<_>>()
            .ok_or_else(|| HaloError::Resource(format!("level {n} sides exceed machine integers")))?;
        let total: i64 = sides.iter().try_fold(1i64, |a, &s| a.checked_mul(s)).unwrap_or(i64::MAX);
        if total > 1 << 24 {
            return Err(HaloError::Resource(format!("level {n} has {total} points")));
        }
        let mut out = vec![Vec::new()];
        for s in sides {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (0..s).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Rank of the shift anchoring `e ∈ F_{n+1}` and the remainder in `F_n`.
    /// Ranks are mixed radix with coordinate 0 least significant.
    pub fn split_big(&self, n: usize, e: &[BigInt]) -> (BigUint, Vec<BigInt>) {
        let sides = self.sides_ok(n);
        let mult = self.multipliers(n).expect("nested boxes");
        let mut rank = BigUint::zero();
        let mut rest = Vec::with_capacity(e.len());
        for i in (0..e.len()).rev() {
            let side = BigInt::from(sides[i].clone());
            let (digit, r) = e[i].div_mod_floor(&side);
            rank = rank * &mult[i] + digit.to_biguint().expect("e lies in F_{n+1}");
            rest.push(r);
        }
        rest.reverse();
        (rank, rest)
    }

    pub fn split_i64(&self, n: usize, e: &[i64]) -> (BigUint, Vec<i64>) {
        let big: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
        let (rank, rest) = self.split_big(n, &big);
        (rank, rest.iter().map(|x| x.to_i64().expect("small")).collect())
    }

    pub fn shift_big(&self, n: usize, rank: &BigUint) -> Vec<BigInt> {
        let sides = self.sides_ok(n);
        let mult = self.multipliers(n).expect("nested boxes");
        let mut rank = rank.clone();
        let mut out = Vec::with_capacity(sides.len());
        for (side, k) in sides.iter().zip(mult.iter()) {
            let (q, digit) = rank.div_rem(k);
            out.push(BigInt::from(digit * side));
            rank = q;
        }
        out
    }

    pub fn shift_i64(&self, n: usize, rank: &BigUint) -> Vec<i64> {
        self.shift_big(n, rank)
            .iter()
            .map(|x| x.to_i64().expect("small"))
            .collect()
    }

    pub fn contains_i64(&self, n: usize, e: &[i64]) -> bool {
        let sides = self.sides_ok(n);
        e.iter()
            .zip(sides.iter())
            .all(|(&x, s)| x >= 0 && BigUint::from(x as u64) < *s)
    }

    /// Symbolic level data; exact where the quantities stay small.
    pub fn level_info(&self, n: usize) -> TilingLevel {
        let ln_sides = self.sides.ln(n);
        let ln_card: f64 = ln_sides.iter().sum();
        let exact = if ln_card / std::f64::consts::LN_10 < 1e5 { self.sides(n).ok() } else { None };
        let shift_ln = self.sides.ln(n + 1).iter().sum::<f64>() - ln_card;
        let min_ln = ln_sides.iter().cloned().fold(f64::INFINITY, f64::min);
        match exact {
            Some(s) => {
                let card: BigUint = s.iter().product();
                let diam: BigUint = s.iter().map(|x| x - BigUint::one()).sum();
                let next: Option<BigUint> = self.sides(n + 1).ok().map(|t| t.iter().product());
                TilingLevel {
                    n,
                    cardinality: BigQuantity::Exact(card.clone()),
                    shift_count: match next {
                        Some(x) => BigQuantity::Exact(x / &card),
                        None => BigQuantity::Log(shift_ln),
                    },
                    diam_bound: BigQuantity::Exact(diam),
                    eps_inverse: BigQuantity::Exact(s.iter().min().cloned().unwrap_or_default()),
                }
            }
            None => {
                // Σ(side_i − 1) ≈ Σ side_i at this scale.
                TilingLevel {
                    n,
                    cardinality: BigQuantity::Log(ln_card),
                    shift_count: big_from_ln(shift_ln, || None),
                    diam_bound: BigQuantity::Log(log_sum_exp(&ln_sides)),
                    eps_inverse: BigQuantity::Log(min_ln),
                }
            }
        }
    }
}

fn l1_big(e: &[BigInt]) -> BigUint {
    e.iter().map(|x| x.magnitude().clone()).sum()
}

impl Tiling for BoxTiling {
    type Elem = Vec<BigInt>;

    fn identity(&self) -> Self::Elem {
        vec![BigInt::zero(); self.dim()]
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| -x).collect()
    }

    fn generators(&self) -> Vec<Self::Elem> {
        (0..self.dim())
            .flat_map(|k| {
                [1, -1].map(|s| {
                    let mut v = vec![BigInt::zero(); self.dim()];
                    v[k] = BigInt::from(s);
                    v
                })
            })
            .collect()
    }

    fn is_abelian(&self) -> bool {
        true
    }

    fn shift_count(&self, n: usize) -> Result<BigUint> {
        Ok(self.multipliers(n)?.iter().product())
    }

    fn shift(&self, n: usize, rank: &BigUint) -> Self::Elem {
        self.shift_big(n, rank)
    }

    fn contains(&self, n: usize, e: &Self::Elem) -> bool {
        let sides = self.sides_ok(n);
        e.iter().zip(sides.iter()).all(|(x, s)| {
            x.sign() != Sign::Minus && x.magnitude() < s
        })
    }

    fn split(&self, n: usize, e: &Self::Elem) -> (BigUint, Self::Elem) {
        self.split_big(n, e)
    }

    fn enumerate_tile(&self, n: usize, cap: usize) -> Result<Vec<Self::Elem>> {
        let card: BigUint = self.sides(n)?.iter().product();
        if card > BigUint::from(cap) {
            return Err(HaloError::Resource(format!("level {n} has {card} elements, cap {cap}")));
        }
        Ok(self
            .points_i64(n)?
            .into_iter()
            .map(|p| p.into_iter().map(BigInt::from).collect())
            .collect())
    }

    fn level(&self, n: usize) -> TilingLevel {
        self.level_info(n)
    }

    fn word_length(&self, e: &Self::Elem) -> Result<WordLength> {
        Ok(WordLength { value: l1_big(e), exact: true })
    }

    fn describe(&self, e: &Self::Elem) -> String {
        let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Ratio `|F_n + s ∖ F_n| / |F_n|` for a box and a standard generator, in closed form.
pub fn box_generator_ratio(sides: &[BigUint], k: usize) -> num_rational::BigRational {
    let num: BigUint = sides.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, s)| s.clone()).product();
    let den: BigUint = sides.iter().product();
    num_rational::BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bignum::ln_biguint;

    #[test]
    fn adic_shifts_and_split() {
        let t = BoxTiling::adic(1, 3).unwrap();
        let shifts: Vec<i64> = (0..3u32).map(|r| t.shift_i64(1, &BigUint::from(r))[0]).collect();
        assert_eq!(shifts, vec![0, 3, 6]);
        assert_eq!(t.points_i64(2).unwrap().len(), 9);
        assert_eq!(t.split_i64(1, &[7]), (BigUint::from(2u32), vec![1]));
    }

    #[test]
    fn two_dimensional_ranks_are_mixed_radix() {
        let t = BoxTiling::adic(2, 2).unwrap();
        assert_eq!(t.shift_i64(0, &BigUint::from(1u32)), vec![1, 0]);
        assert_eq!(t.shift_i64(0, &BigUint::from(2u32)), vec![0, 1]);
        let (r, rest) = t.split_i64(1, &[3, 2]);
        assert_eq!(r, BigUint::from(3u32));
        assert_eq!(rest, vec![1, 0]);
        assert_eq!(t.level(1).diam_bound, BigQuantity::from_u64(2));
    }

    #[test]
    fn matched_boxes_have_nested_sides() {
        let m = BoxTiling::new(BoxSides::Matched {
            d2: 2,
            t: 2,
            tile_base: 4,
            law: Some(GrowthLaw::Factorial { r: 1 }),
        });
        for n in 0..4 {
            let s = m.sides(n).unwrap();
            let card: BigUint = s.iter().product();
            let expect = crate::bignum::factorial(4u64.pow(n as u32)) * BigUint::from(4u64.pow(n as u32));
            assert_eq!(card, expect);
            assert!(m.multipliers(n).is_ok());
            assert!((s.iter().map(ln_biguint).sum::<f64>() - m.spec().ln(n).iter().sum::<f64>()).abs() < 1e-6 * (1.0 + s.iter().map(ln_biguint).sum::<f64>()));
        }
    }
}
