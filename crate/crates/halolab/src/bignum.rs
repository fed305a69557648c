//! Exact and log-space big quantities: factorials, general linear group orders,
//! lamp growth functions and the balanced factorizations `ℓ_i`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Quantities with more decimal digits than this are carried in log-space.
pub const EXACT_DIGIT_LIMIT: f64 = 1e6;

/// An exact big integer, or its natural logarithm once it grows too large.
#[derive(Debug, Clone, PartialEq)]
pub enum BigQuantity {
    Exact(BigUint),
    Log(f64),
}

impl BigQuantity {
    pub fn from_u64(x: u64) -> Self {
        BigQuantity::Exact(BigUint::from(x))
    }

    /// Natural logarithm (`-inf` for zero).
    pub fn ln(&self) -> f64 {
        match self {
            BigQuantity::Exact(x) => ln_biguint(x),
            BigQuantity::Log(l) => *l,
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            BigQuantity::Exact(x) => Some(x),
            BigQuantity::Log(_) => None,
        }
    }

    pub fn mul(&self, other: &BigQuantity) -> BigQuantity {
        match (self, other) {
            (BigQuantity::Exact(a), BigQuantity::Exact(b)) => BigQuantity::Exact(a * b),
            _ => BigQuantity::Log(self.ln() + other.ln()),
        }
    }

    /// Decimal string when exact, `exp(<ln>)` otherwise.
    pub fn to_decimal_string(&self) -> String {
        match self {
            BigQuantity::Exact(x) => x.to_str_radix(10),
            BigQuantity::Log(l) => format!("exp({l:e})"),
        }
    }

    /// Inverse of `to_decimal_string`.
    pub fn parse(s: &str) -> Option<BigQuantity> {
        if let Some(inner) = s.strip_prefix("exp(").and_then(|t| t.strip_suffix(')')) {
            inner.parse().ok().map(BigQuantity::Log)
        } else {
            BigUint::parse_bytes(s.as_bytes(), 10).map(BigQuantity::Exact)
        }
    }
}

impl fmt::Display for BigQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Natural logarithm of a big integer, accurate to f64 precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn product_range(lo: u64, hi: u64, step: u64) -> BigUint {
    // Product of lo, lo+step, …, up to and including hi, by binary splitting.
    if lo > hi {
        return BigUint::one();
    }
    let count = (hi - lo) / step + 1;
    if count <= 16 {
        let mut acc = BigUint::one();
        let mut k = lo;
        for _ in 0..count {
            acc *= k;
            k += step;
        }
        return acc;
    }
    let mid = lo + (count / 2) * step;
    product_range(lo, mid - step, step) * product_range(mid, hi, step)
}

pub fn factorial(n: u64) -> BigUint {
    product_range(1, n, 1)
}

pub fn ln_factorial(n: f64) -> f64 {
    libm::lgamma(n + 1.0)
}

/// `|GL_n(𝔽_q)| = ∏_{i=0}^{n-1} (qⁿ − qⁱ)`.
pub fn gl_order(n: u64, q: u64) -> BigUint {
    let qn = BigUint::from(q).pow(n as u32);
    (0..n)
        .map(|i| &qn - BigUint::from(q).pow(i as u32))
        .fold(BigUint::one(), |a, b| a * b)
}

/// `ln |GL_n(𝔽_q)| = n² ln q + Σ_{k=1}^{n} ln(1 − q^{−k})`.
pub fn ln_gl_order(n: f64, q: u64) -> f64 {
    let lq = (q as f64).ln();
    n * n * lq + ln_partial_euler(n, q)
}

/// `Σ_{k=1}^{n} ln(1 − q^{−k})`, truncated once terms vanish in f64.
fn ln_partial_euler(n: f64, q: u64) -> f64 {
    let mut acc = 0.0;
    let mut k = 1.0;
    while k <= n {
        let t = (-(k * (q as f64).ln())).exp();
        if t < 1e-18 {
            break;
        }
        acc += (-t).ln_1p();
        k += 1.0;
    }
    acc
}

/// The lamp growth function `Λ(n) = |L(S)|` for `|S| = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthLaw {
    /// `(rn)!`; `r = 1` is the shuffler.
    Factorial { r: u64 },
    /// `∏ (qⁿ − qⁱ)`.
    GeneralLinear { q: u64 },
    /// `|Γ|ⁿ`.
    Power { base: u64 },
}

impl GrowthLaw {
    pub fn exact(&self, n: u64) -> BigUint {
        match *self {
            GrowthLaw::Factorial { r } => factorial(r * n),
            GrowthLaw::GeneralLinear { q } => gl_order(n, q),
            GrowthLaw::Power { base } => BigUint::from(base).pow(n as u32),
        }
    }

    pub fn ln(&self, n: f64) -> f64 {
        match *self {
            GrowthLaw::Factorial { r } => ln_factorial(r as f64 * n),
            GrowthLaw::GeneralLinear { q } => ln_gl_order(n, q),
            GrowthLaw::Power { base } => n * (base as f64).ln(),
        }
    }

    /// Exact below the digit limit, log-space above.
    pub fn quantity(&self, n: f64) -> BigQuantity {
        let l = self.ln(n);
        if l / std::f64::consts::LN_10 <= EXACT_DIGIT_LIMIT && n < u64::MAX as f64 {
            BigQuantity::Exact(self.exact(n as u64))
        } else {
            BigQuantity::Log(l)
        }
    }
}

/// `ℓ_i(N) = ∏_{j ≥ 0, d·j + i ≤ N} (d·j + i)`; the `ℓ_1, …, ℓ_d` multiply to `N!`.
pub fn ell_factorial(i: u64, d: u64, n: u64) -> BigUint {
    assert!((1..=d).contains(&i));
    if i > n {
        return BigUint::one();
    }
    let last = i + (n - i) / d * d;
    product_range(i, last, d)
}

/// `ln ℓ_i(N) = (J+1) ln d + ln Γ(J+1+i/d) − ln Γ(i/d)` with `J = ⌊(N−i)/d⌋`.
pub fn ln_ell_factorial(i: u64, d: u64, n: f64) -> f64 {
    if (i as f64) > n {
        return 0.0;
    }
    let j = ((n - i as f64) / d as f64).floor();
    let a = i as f64 / d as f64;
    (j + 1.0) * (d as f64).ln() + libm::lgamma(j + 1.0 + a) - libm::lgamma(a)
}

/// Cloner analogue: `ℓ_i(n) = ∏_{j ≥ 0, d·j + i ≤ n} (qⁿ − q^{n−(d·j+i)})`;
/// the `ℓ_1, …, ℓ_d` multiply to `|GL_n(𝔽_q)|`.
pub fn ell_gl(i: u64, d: u64, n: u64, q: u64) -> BigUint {
    assert!((1..=d).contains(&i));
    let qn = BigUint::from(q).pow(n as u32);
    let mut acc = BigUint::one();
    let mut k = i;
    while k <= n {
        acc *= &qn - BigUint::from(q).pow((n - k) as u32);
        k += d;
    }
    acc
}

/// `ln ℓ_i(n)` for the cloner split: `Σ_k [n ln q + ln(1 − q^{−k})]` over
/// `k = i, i+d, … ≤ n`.
pub fn ln_ell_gl(i: u64, d: u64, n: f64, q: u64) -> f64 {
    if (i as f64) > n {
        return 0.0;
    }
    let count = ((n - i as f64) / d as f64).floor() + 1.0;
    let lq = (q as f64).ln();
    let mut corr = 0.0;
    let mut k = i as f64;
    while k <= n {
        let t = (-(k * lq)).exp();
        if t < 1e-18 {
            break;
        }
        corr += (-t).ln_1p();
        k += d as f64;
    }
    count * n * lq + corr
}

/// Numerically stable `ln(Σ exp(x_i))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(gl_order(2, 2), BigUint::from(6u32));
        assert_eq!(gl_order(1, 3), BigUint::from(2u32));
        assert_eq!(gl_order(4, 2), BigUint::from(20160u32));
        assert_eq!(GrowthLaw::Factorial { r: 2 }.exact(2), BigUint::from(24u32));
    }

    #[test]
    fn ell_split_multiplies_to_factorial() {
        assert_eq!(ell_factorial(1, 2, 4), BigUint::from(3u32));
        assert_eq!(ell_factorial(2, 2, 4), BigUint::from(8u32));
        assert_eq!(ell_factorial(2, 2, 6), BigUint::from(48u32));
        for d in 1..4 {
            for n in 0..20 {
                let prod = (1..=d).map(|i| ell_factorial(i, d, n)).fold(BigUint::one(), |a, b| a * b);
                assert_eq!(prod, factorial(n));
                for i in 1..=d {
                    let exact = ln_biguint(&ell_factorial(i, d, n));
                    assert!((exact - ln_ell_factorial(i, d, n as f64)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn ell_gl_split_multiplies_to_gl_order() {
        for q in [2, 3] {
            for d in 1..4 {
                for n in 0..8 {
                    let prod = (1..=d).map(|i| ell_gl(i, d, n, q)).fold(BigUint::one(), |a, b| a * b);
                    assert_eq!(prod, gl_order(n, q));
                    for i in 1..=d {
                        let exact = ln_biguint(&ell_gl(i, d, n, q));
                        assert!((exact - ln_ell_gl(i, d, n as f64, q)).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn logs_agree_with_exact() {
        let f = factorial(3000);
        assert!((ln_biguint(&f) - ln_factorial(3000.0)).abs() < 1e-6);
        assert!((ln_biguint(&gl_order(30, 3)) - ln_gl_order(30.0, 3)).abs() < 1e-9);
        let q = BigQuantity::parse("exp(1.5e300)").unwrap();
        assert_eq!(q, BigQuantity::Log(1.5e300));
    }
}
