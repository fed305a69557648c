//! The odometer action of a tiled group on `X = ∏_n Σ_n`, orbit-equivalence
//! couplings between two tilings with `|Σ_n| = |Σ′_n|`, their cocycles and
//! Monte Carlo moment estimates.
//!
//! Points are rank sequences. The action is on the right: `x·g` rewrites the
//! least prefix `x_N ⋯ x_0` with `x_N ⋯ x_0 g ∈ F_{N+1}`. The level
//! bijections `Σ_n → Σ′_n` match equal ranks, so a rank sequence is a point of
//! both spaces and the coupling map `θ` is the identity on ranks. The native
//! cocycle satisfies `c(gg′, x) = c(g, x)·c(g′, x·g)`; the left-action form
//! `c(g′g, x) = c(g′, g⋆x)·c(g, x)` is available through [`Couple::cocycle_left`].

use crate::error::{HaloError, Result};
use crate::tiling::{convergence::IntegrabilityFn, Tiling};
use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

/// Deterministic uniform rank below `bound`, keyed by `(seed, sample, level)`.
pub fn draw_rank(seed: u64, sample: u64, level: usize, bound: &BigUint) -> BigUint {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sample.to_le_bytes());
    key[16..24].copy_from_slice(&(level as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.gen_biguint_below(bound)
}

/// A point of `∏ Σ_n`: explicit ranks on a prefix, seeded uniform draws above it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CouplingPoint {
    pub seed: u64,
    pub sample: u64,
    coords: Vec<BigUint>,
}

impl CouplingPoint {
    pub fn new(seed: u64, sample: u64) -> Self {
        CouplingPoint { seed, sample, coords: Vec::new() }
    }

    /// A point with an explicit prefix; higher levels come from the seed.
    pub fn from_prefix(coords: Vec<BigUint>, seed: u64, sample: u64) -> Self {
        CouplingPoint { seed, sample, coords }
    }

    /// Number of explicitly resolved levels.
    pub fn depth(&self) -> usize {
        self.coords.len()
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.coords
    }

    pub fn coord<T: Tiling>(&self, t: &T, n: usize) -> Result<BigUint> {
        match self.coords.get(n) {
            Some(c) => Ok(c.clone()),
            None => Ok(draw_rank(self.seed, self.sample, n, &t.shift_count(n)?)),
        }
    }

    /// Makes levels `0..=n` explicit.
    pub fn materialize<T: Tiling>(&mut self, t: &T, n: usize) -> Result<()> {
        while self.coords.len() <= n {
            let k = self.coords.len();
            let c = self.coord(t, k)?;
            self.coords.push(c);
        }
        Ok(())
    }

    /// Overwrites one coordinate (used by negative controls).
    pub fn set_coord<T: Tiling>(&mut self, t: &T, n: usize, rank: BigUint) -> Result<()> {
        self.materialize(t, n)?;
        self.coords[n] = rank;
        Ok(())
    }
}

/// `x_n ⋯ x_0` in the tiled group.
pub fn prefix_product<T: Tiling>(t: &T, x: &CouplingPoint, n: usize) -> Result<T::Elem> {
    let mut p = t.identity();
    for k in 0..=n {
        p = t.mul(&t.shift(k, &x.coord(t, k)?), &p);
    }
    Ok(p)
}

/// `x·g` together with the resolution level `N`.
pub fn act<T: Tiling>(t: &T, g: &T::Elem, x: &CouplingPoint, max_depth: usize) -> Result<(CouplingPoint, usize)> {
    let mut x = x.clone();
    let mut p = t.identity();
    for n in 0..=max_depth {
        x.materialize(t, n)?;
        p = t.mul(&t.shift(n, &x.coords[n]), &p);
        let q = t.mul(&p, g);
        if t.contains(n + 1, &q) {
            let mut rest = q;
            for k in (0..=n).rev() {
                let (rank, f) = t.split(k, &rest);
                x.coords[k] = rank;
                rest = f;
            }
            if rest != t.identity() {
                return Err(HaloError::Invariant(format!("split left {} in F_0", t.describe(&rest))));
            }
            return Ok((x, n));
        }
    }
    Err(HaloError::Truncated { max_depth, stage: None })
}

/// True iff `x` and `y` agree on every level above `n` up to `n + probe`.
pub fn agree_above<T: Tiling>(t: &T, x: &CouplingPoint, y: &CouplingPoint, n: usize, probe: usize) -> Result<bool> {
    for k in n + 1..=n + probe {
        if x.coord(t, k)? != y.coord(t, k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How a word length was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthMode {
    /// Closed-form exact length (ℓ¹ in ℤ^d).
    Exact,
    /// Exact length read from a BFS ball.
    ExactBfs,
    /// Length of a constructive word, an upper bound.
    ConstructiveBound,
}

/// One cocycle evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleSample {
    pub sample: u64,
    pub generator: usize,
    /// Resolution level `N`; `None` when truncated.
    pub depth: Option<usize>,
    pub output: Option<String>,
    /// Decimal word length of the output.
    pub length: Option<String>,
    pub ln_length: Option<f64>,
    pub mode: Option<LengthMode>,
    pub truncated: bool,
}

/// Two tilings with equal shift counts, coupled through equal ranks.
pub struct Couple<A: Tiling, B: Tiling> {
    pub a: A,
    pub b: B,
    pub max_depth: usize,
    ball: Option<Arc<HashMap<B::Elem, u32>>>,
}

impl<A: Tiling, B: Tiling> Couple<A, B> {
    /// Checks `|Σ_n| = |Σ′_n|` for every level up to `max_depth`.
    pub fn new(a: A, b: B, max_depth: usize) -> Result<Self> {
        for n in 0..=max_depth {
            let (sa, sb) = (a.shift_count(n)?, b.shift_count(n)?);
            if sa != sb {
                return Err(HaloError::Construction(format!("shift counts differ at level {n}: {sa} vs {sb}")));
            }
        }
        Ok(Couple { a, b, max_depth, ball: None })
    }

    /// Exact lengths for outputs found in a BFS ball of B.
    pub fn with_ball(mut self, ball: HashMap<B::Elem, u32>) -> Self {
        self.ball = Some(Arc::new(ball));
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Result<Self> {
        for n in self.max_depth + 1..=max_depth {
            if self.a.shift_count(n)? != self.b.shift_count(n)? {
                return Err(HaloError::Construction(format!("shift counts differ at level {n}")));
            }
        }
        self.max_depth = max_depth;
        Ok(self)
    }

    /// `x·g` in A.
    pub fn act(&self, g: &A::Elem, x: &CouplingPoint) -> Result<(CouplingPoint, usize)> {
        act(&self.a, g, x, self.max_depth)
    }

    /// The `k ∈ B` with `θ(x)·k = θ(x·g)`, and the resolution level.
    pub fn cocycle(&self, g: &A::Elem, x: &CouplingPoint) -> Result<(B::Elem, usize)> {
        let (y, n) = self.act(g, x)?;
        let before = prefix_product(&self.b, x, n)?;
        let after = prefix_product(&self.b, &y, n)?;
        Ok((self.b.mul(&self.b.inv(&before), &after), n))
    }

    /// Left action `g⋆x = x·g⁻¹`.
    pub fn act_left(&self, g: &A::Elem, x: &CouplingPoint) -> Result<(CouplingPoint, usize)> {
        self.act(&self.a.inv(g), x)
    }

    /// Left-action cocycle `c(g⁻¹, x)⁻¹`.
    pub fn cocycle_left(&self, g: &A::Elem, x: &CouplingPoint) -> Result<(B::Elem, usize)> {
        let (k, n) = self.cocycle(&self.a.inv(g), x)?;
        Ok((self.b.inv(&k), n))
    }

    /// Word length of a B element, with its mode.
    pub fn length(&self, k: &B::Elem) -> Result<(BigUint, LengthMode)> {
        if let Some(l) = self.ball.as_ref().and_then(|b| b.get(k)) {
            return Ok((BigUint::from(*l), LengthMode::ExactBfs));
        }
        let w = self.b.word_length(k)?;
        Ok((w.value, if w.exact { LengthMode::Exact } else { LengthMode::ConstructiveBound }))
    }

    /// True iff `x` and `g·x` agree above the resolution level.
    pub fn cofinality_check(&self, g: &A::Elem, x: &CouplingPoint) -> Result<bool> {
        let (y, n) = self.act(g, x)?;
        agree_above(&self.a, x, &y, n, 8)
    }

    /// The reversed couple, B acting and A receiving cocycles.
    pub fn reversed(&self) -> Result<Couple<B, A>>
    where
        A: Clone,
        B: Clone,
    {
        Couple::new(self.b.clone(), self.a.clone(), self.max_depth)
    }

    /// Cocycle sample for generator `gen` of A at the point `(seed, sample)`.
    pub fn sample(&self, gen: usize, seed: u64, sample: u64) -> Result<CocycleSample> {
        let g = self
            .a
            .generators()
            .get(gen)
            .cloned()
            .ok_or_else(|| HaloError::InvalidInput(format!("no generator {gen}")))?;
        let x = CouplingPoint::new(seed, sample);
        match self.cocycle(&g, &x) {
            Ok((k, n)) => {
                let (len, mode) = self.length(&k)?;
                Ok(CocycleSample {
                    sample,
                    generator: gen,
                    depth: Some(n),
                    output: Some(self.b.describe(&k)),
                    ln_length: Some(crate::bignum::ln_biguint(&len)),
                    length: Some(len.to_string()),
                    mode: Some(mode),
                    truncated: false,
                })
            }
            Err(e) if e.is_truncation() => Ok(CocycleSample {
                sample,
                generator: gen,
                depth: None,
                output: None,
                length: None,
                ln_length: None,
                mode: None,
                truncated: true,
            }),
            Err(e) => Err(e),
        }
    }
}

/// Moment estimates for one maximal depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthEstimate {
    pub depth: usize,
    pub resolved: usize,
    pub truncated_fraction: f64,
    /// `(p, mean of |c|^p over resolved samples)`.
    pub means: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub schema: String,
    pub generator: usize,
    pub samples: usize,
    pub seed: u64,
    pub estimates: Vec<DepthEstimate>,
    /// Number of samples resolved at each level `N`.
    pub depth_histogram: Vec<usize>,
    pub modes: Vec<(LengthMode, usize)>,
    /// Truncated fraction at the largest depth exceeds the threshold.
    pub unreliable: bool,
}

impl MomentReport {
    /// Mean for the given `p` at every depth, in schedule order.
    pub fn series(&self, p: f64) -> Vec<f64> {
        self.estimates
            .iter()
            .map(|e| e.means.iter().find(|(q, _)| *q == p).map_or(f64::NAN, |m| m.1))
            .collect()
    }
}

/// Samples `c(g, x)` once per point up to the couple's maximal depth,
/// then reports `E|c|^p` over points resolved within each depth. Truncated
/// samples are excluded and counted.
pub fn estimate_moment<A: Tiling, B: Tiling>(
    couple: &Couple<A, B>,
    gen: usize,
    ps: &[f64],
    samples: usize,
    depths: &[usize],
    seed: u64,
    truncation_threshold: f64,
) -> Result<(MomentReport, Vec<CocycleSample>)> {
    let max = *depths.iter().max().ok_or_else(|| HaloError::InvalidInput("empty depth schedule".into()))?;
    if max > couple.max_depth {
        return Err(HaloError::InvalidInput(format!("depth {max} exceeds the couple's max depth {}", couple.max_depth)));
    }
    let rows: Vec<CocycleSample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| couple.sample(gen, seed, i))
        .collect::<Result<_>>()?;
    let estimates = depths
        .iter()
        .map(|&d| {
            let resolved: Vec<f64> = rows
                .iter()
                .filter(|r| r.depth.is_some_and(|n| n <= d))
                .map(|r| r.ln_length.unwrap_or(f64::NEG_INFINITY))
                .collect();
            let means = ps
                .iter()
                .map(|&p| {
                    let phi = IntegrabilityFn::Power { p };
                    let sum: f64 = resolved.iter().map(|&l| phi.eval(l.exp())).sum();
                    (p, sum / resolved.len().max(1) as f64)
                })
                .collect();
            DepthEstimate {
                depth: d,
                resolved: resolved.len(),
                truncated_fraction: 1.0 - resolved.len() as f64 / samples.max(1) as f64,
                means,
            }
        })
        .collect::<Vec<_>>();
    let mut hist = vec![0usize; couple.max_depth + 1];
    let mut modes: HashMap<LengthMode, usize> = HashMap::new();
    for r in &rows {
        if let Some(n) = r.depth {
            hist[n] += 1;
        }
        if let Some(m) = r.mode {
            *modes.entry(m).or_default() += 1;
        }
    }
    let mut modes: Vec<(LengthMode, usize)> = modes.into_iter().collect();
    modes.sort_by_key(|(m, _)| *m as u8);
    let unreliable = estimates.last().is_some_and(|e| e.truncated_fraction > truncation_threshold);
    Ok((
        MomentReport {
            schema: crate::SCHEMA.to_string(),
            generator: gen,
            samples,
            seed,
            estimates,
            depth_histogram: hist,
            modes,
            unreliable,
        },
        rows,
    ))
}

/// CSV with columns `sample,generator,N,length,mode,truncated`.
pub fn write_samples_csv<W: Write>(rows: &[CocycleSample], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample", "generator", "N", "length", "mode", "truncated"])?;
    for r in rows {
        let mode = r.mode.map(|m| serde_json::to_value(m).ok().and_then(|v| v.as_str().map(str::to_string)));
        w.write_record([
            r.sample.to_string(),
            r.generator.to_string(),
            r.depth.map(|n| n.to_string()).unwrap_or_default(),
            r.length.clone().unwrap_or_default(),
            mode.flatten().unwrap_or_default(),
            r.truncated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A random element of the tiling's group: a word of `1..=max_len` generators.
pub fn random_word_element<T: Tiling, R: Rng>(t: &T, rng: &mut R, max_len: usize) -> T::Elem {
    let gens = t.generators();
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len).fold(t.identity(), |acc, _| t.mul(&acc, &gens[rng.gen_range(0..gens.len())]))
}

/// One sampled triple `(g, g′, x)` of a cocycle-identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleRow {
    pub sample: u64,
    pub g: String,
    pub g_prime: String,
    /// Resolution level of `c(g′g, x)`.
    pub depth: Option<usize>,
    pub identity_ok: bool,
    pub cofinal: bool,
    pub truncated: bool,
}

/// Summary of a cocycle-identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub schema: String,
    pub triples: usize,
    pub checked: usize,
    pub truncated: usize,
    pub violations: usize,
    pub cofinality_failures: usize,
    pub truncated_fraction: f64,
}

/// Checks `c(g′g, x) = c(g′, g⋆x)·c(g, x)` and cofinality on random triples;
/// `g`, `g′` are words of up to `word_len` generators drawn from a stream keyed
/// by `(seed, sample)`, and `x` is the point `(seed, sample)`.
pub fn check_cocycle_identity<A: Tiling, B: Tiling>(
    couple: &Couple<A, B>,
    triples: usize,
    word_len: usize,
    seed: u64,
) -> Result<(IdentityReport, Vec<TripleRow>)> {
    let rows: Vec<TripleRow> = (0..triples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let g = random_word_element(&couple.a, &mut rng, word_len);
            let g2 = random_word_element(&couple.a, &mut rng, word_len);
            let x = CouplingPoint::new(seed, i);
            let mut row = TripleRow {
                sample: i,
                g: couple.a.describe(&g),
                g_prime: couple.a.describe(&g2),
                depth: None,
                identity_ok: false,
                cofinal: false,
                truncated: false,
            };
            let outcome = (|| -> Result<()> {
                let (whole, n) = couple.cocycle_left(&couple.a.mul(&g2, &g), &x)?;
                let (first, _) = couple.cocycle_left(&g, &x)?;
                let (gx, _) = couple.act_left(&g, &x)?;
                let (second, _) = couple.cocycle_left(&g2, &gx)?;
                row.depth = Some(n);
                row.identity_ok = whole == couple.b.mul(&second, &first);
                row.cofinal = couple.cofinality_check(&g, &x)?;
                Ok(())
            })();
            match outcome {
                Ok(()) => Ok(row),
                Err(e) if e.is_truncation() => {
                    row.truncated = true;
                    Ok(row)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let checked: Vec<&TripleRow> = rows.iter().filter(|r| !r.truncated).collect();
    let report = IdentityReport {
        schema: crate::SCHEMA.to_string(),
        triples,
        checked: checked.len(),
        truncated: triples - checked.len(),
        violations: checked.iter().filter(|r| !r.identity_ok).count(),
        cofinality_failures: checked.iter().filter(|r| !r.cofinal).count(),
        truncated_fraction: (triples - checked.len()) as f64 / triples.max(1) as f64,
    };
    Ok((report, rows))
}

/// CSV with columns `sample,g,g_prime,N,identity_ok,cofinal,truncated`.
pub fn write_triples_csv<W: Write>(rows: &[TripleRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample", "g", "g_prime", "N", "identity_ok", "cofinal", "truncated"])?;
    for r in rows {
        w.write_record([
            r.sample.to_string(),
            r.g.clone(),
            r.g_prime.clone(),
            r.depth.map(|n| n.to_string()).unwrap_or_default(),
            r.identity_ok.to_string(),
            r.cofinal.to_string(),
            r.truncated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with columns `depth,p,resolved,truncated_fraction,mean`.
pub fn write_series_csv<W: Write>(report: &MomentReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["depth", "p", "resolved", "truncated_fraction", "mean"])?;
    for e in &report.estimates {
        for (p, m) in &e.means {
            w.write_record([
                e.depth.to_string(),
                p.to_string(),
                e.resolved.to_string(),
                format!("{:.6}", e.truncated_fraction),
                format!("{m:.9}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::BoxTiling;
    use num_bigint::BigInt;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn binary_odometer_carries() {
        let t = BoxTiling::adic(1, 2).unwrap();
        let x = CouplingPoint::from_prefix(vec![1u32.into(), 1u32.into(), 0u32.into()], 0, 0);
        let (y, n) = act(&t, &big(&[1]), &x, 10).unwrap();
        assert_eq!(n, 2);
        assert_eq!(y.prefix(), &[BigUint::from(0u32), 0u32.into(), 1u32.into()]);
        let zero = CouplingPoint::from_prefix(vec![0u32.into()], 0, 0);
        let (y, n) = act(&t, &big(&[1]), &zero, 10).unwrap();
        assert_eq!((n, y.prefix()[0].clone()), (0, BigUint::from(1u32)));
    }

    #[test]
    fn identity_resolves_at_level_zero() {
        let t = BoxTiling::adic(2, 2).unwrap();
        let x = CouplingPoint::new(7, 3);
        let (y, n) = act(&t, &big(&[0, 0]), &x, 5).unwrap();
        assert_eq!(n, 0);
        assert_eq!(y.coord(&t, 0).unwrap(), x.coord(&t, 0).unwrap());
    }

    #[test]
    fn z2_to_z_first_cocycle() {
        let a = BoxTiling::adic(2, 2).unwrap();
        let b = BoxTiling::adic(1, 4).unwrap();
        let c = Couple::new(a, b, 24).unwrap();
        let zero = CouplingPoint::from_prefix(vec![BigUint::from(0u32); 3], 0, 0);
        let (k, n) = c.cocycle(&big(&[1, 0]), &zero).unwrap();
        assert_eq!((k, n), (big(&[1]), 0));
    }

    #[test]
    fn draws_are_reproducible_and_in_range() {
        let bound = BigUint::from(24u32);
        let a = draw_rank(1, 2, 3, &bound);
        assert_eq!(a, draw_rank(1, 2, 3, &bound));
        assert!(a < bound);
    }
}
