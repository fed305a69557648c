//! Lamp growth, boundaries, brute-force isoperimetric profiles at small scale,
//! tiling-based profile lower bounds and a numeric domination heuristic.

use crate::bignum::GrowthLaw;
use crate::error::{HaloError, Result};
use crate::group::Group;
use crate::tiling::Tiling;
use crate::word::bfs_ball;
use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Write;

/// `Λ(n)`: the number of lamp configurations over an `n`-point set.
pub fn lamp_growth(law: &GrowthLaw, n: u64) -> BigUint {
    law.exact(n)
}

/// `|Sym(n)|` by enumerating permutations.
pub fn enumerate_sym(n: usize) -> u64 {
    fn rec(n: usize, used: u32) -> u64 {
        if used.count_ones() as usize == n {
            return 1;
        }
        (0..n).filter(|i| used & (1 << i) == 0).map(|i| rec(n, used | (1 << i))).sum()
    }
    rec(n, 0)
}

/// `|GL_n(𝔽_q)|` by enumerating ordered bases column by column; each span is
/// listed explicitly as the set of all linear combinations.
pub fn enumerate_gl(n: usize, q: u32) -> u64 {
    let size = (q as usize).pow(n as u32);
    let add = |a: usize, b: usize| {
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..n {
            out += ((a % q as usize + b % q as usize) % q as usize) * place;
            a /= q as usize;
            b /= q as usize;
            place *= q as usize;
        }
        out
    };
    fn rec(n: usize, q: u32, size: usize, span: &[bool], depth: usize, add: &dyn Fn(usize, usize) -> usize) -> u64 {
        let free: Vec<usize> = (0..size).filter(|&v| !span[v]).collect();
        if depth + 1 == n {
            return free.len() as u64;
        }
        free.iter()
            .map(|&v| {
                // span + {λv}: translate the old span by every multiple of v.
                let mut next = span.to_vec();
                let mut mult = 0;
                for _ in 1..q {
                    mult = add(mult, v);
                    for (w, &inside) in span.iter().enumerate() {
                        if inside {
                            next[add(w, mult)] = true;
                        }
                    }
                }
                rec(n, q, size, &next, depth + 1, add)
            })
            .sum()
    }
    if n == 0 {
        return 1;
    }
    let mut span = vec![false; size];
    span[0] = true;
    rec(n, q, size, &span, 0, &add)
}

/// `∂A = {a·s ∉ A : a ∈ A, s ∈ S}`.
pub fn boundary<G: Group>(g: &G, a: &BTreeSet<G::Elem>) -> BTreeSet<G::Elem> {
    let gens = g.generators();
    a.iter()
        .flat_map(|h| gens.iter().map(move |s| g.mul(h, s)))
        .filter(|x| !a.contains(x))
        .collect()
}

/// `|A| / |∂A|` as an exact ratio; `None` for an empty boundary.
pub fn iso_ratio(size: usize, boundary: usize) -> Option<Ratio<u64>> {
    (boundary > 0).then(|| Ratio::new(size as u64, boundary as u64))
}

/// One row of a brute-force profile table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    /// Best `|A|/|∂A|` over enumerated sets with `|A| = n`.
    pub best_exact: Option<(u64, u64)>,
    /// Running maximum over `|A| ≤ n`: the lower bound on `I(n)`.
    pub profile: Option<(u64, u64)>,
    /// Size of a set attaining `profile`.
    pub optimizing_size: usize,
    /// Indices of a set attaining `best_exact`, in BFS-ball order.
    pub witness: Vec<String>,
    pub sets: usize,
}

/// Brute-force profile lower bounds from connected sets containing the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    pub schema: String,
    pub group: String,
    pub radius: usize,
    pub rows: Vec<ProfileRow>,
    /// Set when the enumeration stopped early at the cap.
    pub coverage_note: Option<String>,
}

fn ratio_pair(r: Ratio<u64>) -> (u64, u64) {
    (*r.numer(), *r.denom())
}

impl ProfileTable {
    pub fn profile(&self, n: usize) -> Option<Ratio<u64>> {
        self.rows.get(n.checked_sub(1)?)?.profile.map(|(a, b)| Ratio::new(a, b))
    }

    /// `Føl(k) = min{|A| : |A|/|∂A| ≥ k}` from the per-size optima.
    pub fn folner(&self, k: Ratio<u64>) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.best_exact.is_some_and(|(a, b)| Ratio::new(a, b) >= k))
            .map(|r| r.n)
    }

    /// Generalized inverse of the profile: `min{n : I(n) ≥ k}`.
    pub fn profile_inverse(&self, k: Ratio<u64>) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.profile.is_some_and(|(a, b)| Ratio::new(a, b) >= k))
            .map(|r| r.n)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "profile_lower_bound", "optimizing_set_size", "sets"])?;
        for r in &self.rows {
            let p = r.profile.map_or(String::new(), |(a, b)| format!("{a}/{b}"));
            w.write_record([r.n.to_string(), p, r.optimizing_size.to_string(), r.sets.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Enumerates connected subsets containing the identity inside the ball of
/// `radius`, up to size `n_max`, keeping at most `cap` sets per size.
pub fn iso_profile_bruteforce<G: Group>(
    g: &G,
    name: &str,
    n_max: usize,
    radius: usize,
    cap: usize,
) -> Result<ProfileTable> {
    if n_max == 0 || n_max > 12 {
        return Err(HaloError::InvalidInput(format!("n_max must be in 1..=12 (got {n_max})")));
    }
    let ball = bfs_ball(g, radius, cap.max(1_000))?;
    let mut elems: Vec<(G::Elem, u32)> = ball.table.into_iter().collect();
    elems.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    let index: HashMap<G::Elem, u32> = elems.iter().enumerate().map(|(i, (e, _))| (e.clone(), i as u32)).collect();
    let gens = g.generators();
    let neighbours: Vec<Vec<u32>> = elems
        .iter()
        .map(|(e, _)| gens.iter().filter_map(|s| index.get(&g.mul(e, s)).copied()).collect())
        .collect();

    let score = |set: &[u32]| -> Option<Ratio<u64>> {
        let a: BTreeSet<G::Elem> = set.iter().map(|&i| elems[i as usize].0.clone()).collect();
        iso_ratio(a.len(), boundary(g, &a).len())
    };

    let mut rows = Vec::new();
    let mut coverage_note = None;
    let mut layer: Vec<Vec<u32>> = vec![vec![0]];
    let mut running: Option<Ratio<u64>> = None;
    let mut running_size = 0;
    for n in 1..=n_max {
        if n > 1 {
            let next: HashSet<Vec<u32>> = layer
                .par_iter()
                .flat_map_iter(|set| {
                    let mut out = Vec::new();
                    for &i in set {
                        for &j in &neighbours[i as usize] {
                            if set.binary_search(&j).is_err() {
                                let mut s = set.clone();
                                let at = s.binary_search(&j).unwrap_err();
                                s.insert(at, j);
                                out.push(s);
                            }
                        }
                    }
                    out
                })
                .collect();
            let mut next: Vec<Vec<u32>> = next.into_iter().collect();
            next.sort();
            if next.len() > cap {
                coverage_note = Some(format!(
                    "stopped at size {n}: {} connected sets exceed the cap of {cap}",
                    next.len()
                ));
                break;
            }
            layer = next;
        }
        if layer.is_empty() {
            coverage_note = Some(format!("no connected set of size {n} inside radius {radius}"));
            break;
        }
        let best = layer
            .par_iter()
            .filter_map(|s| score(s).map(|r| (r, s)))
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)));
        if let Some((r, _)) = best {
            if running.is_none_or(|p| r > p) {
                running = Some(r);
                running_size = n;
            }
        }
        rows.push(ProfileRow {
            n,
            best_exact: best.map(|(r, _)| ratio_pair(r)),
            profile: running.map(ratio_pair),
            optimizing_size: running_size,
            witness: best
                .map(|(_, s)| s.iter().map(|&i| format!("{:?}", elems[i as usize].0)).collect())
                .unwrap_or_default(),
            sets: layer.len(),
        });
    }
    Ok(ProfileTable {
        schema: crate::SCHEMA.to_string(),
        group: name.to_string(),
        radius,
        rows,
        coverage_note,
    })
}

/// A point on a profile lower-bound curve from one tiling level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePoint {
    pub n: usize,
    /// `|L_n|` as a decimal string, or `e^…` in log-space.
    pub size: String,
    /// `ln |L_n|`.
    pub ln_size: f64,
    /// `ln (1 / (|S|·ε_n))`, the symbolic lower bound on `ln I(|L_n|)`.
    pub ln_symbolic_bound: f64,
    /// `|L_n| / |∂L_n|` by enumeration, when the tile fits the cap.
    pub exact_ratio: Option<(u64, u64)>,
}

/// `I(|L_n|) ≥ 1/(|S| ε_n)`, plus the exact ratio when `L_n` can be enumerated.
pub fn candidate_lower_bound<T: Tiling>(t: &T, n: usize, cap: usize) -> Result<CandidatePoint>
where
    T::Elem: Ord,
{
    let level = t.level(n);
    let gens = t.generators();
    let ln_symbolic_bound = -(level.ln_eps() + (gens.len() as f64).ln());
    let fits = level.cardinality.exact().and_then(|c| c.to_usize()).is_some_and(|c| c <= cap);
    let exact_ratio = if fits {
        let tile: HashSet<T::Elem> = t.enumerate_tile(n, cap)?.into_iter().collect();
        let boundary: HashSet<T::Elem> = tile
            .iter()
            .flat_map(|e| gens.iter().map(move |s| t.mul(e, s)))
            .filter(|x| !tile.contains(x))
            .collect();
        iso_ratio(tile.len(), boundary.len()).map(ratio_pair)
    } else {
        None
    };
    Ok(CandidatePoint {
        n,
        ln_size: level.cardinality.ln(),
        size: level.cardinality.to_decimal_string(),
        ln_symbolic_bound,
        exact_ratio,
    })
}

/// Profile curves, evaluated as `ln f` from `ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileCurve {
    /// `x^a`.
    Power { a: f64 },
    /// `(ln x / ln ln x)^{1/k}`.
    LogOverLogLog { k: f64 },
    /// `(ln^{∘n} x)^a`.
    IterLog { n: u32, a: f64 },
}

impl ProfileCurve {
    /// `ln f(x)` from `ln x`; `None` outside the domain of the formula.
    pub fn ln_eval(&self, lnx: f64) -> Option<f64> {
        let v = match *self {
            ProfileCurve::Power { a } => a * lnx,
            ProfileCurve::LogOverLogLog { k } => {
                if lnx <= 1.0 {
                    return None;
                }
                let llx = lnx.ln();
                if llx <= 0.0 || lnx / llx <= 0.0 {
                    return None;
                }
                (lnx / llx).ln() / k
            }
            ProfileCurve::IterLog { n, a } => {
                if n == 0 {
                    return Some(a * lnx);
                }
                let mut l = lnx;
                for _ in 1..n {
                    if l <= 0.0 {
                        return None;
                    }
                    l = l.ln();
                }
                if l <= 0.0 {
                    return None;
                }
                a * l.ln()
            }
        };
        v.is_finite().then_some(v)
    }

    pub fn label(&self) -> String {
        match *self {
            ProfileCurve::Power { a } => format!("x^{a}"),
            ProfileCurve::LogOverLogLog { k } => format!("(ln x / ln ln x)^(1/{k})"),
            ProfileCurve::IterLog { n, a } => format!("(ln^{n} x)^{a}"),
        }
    }
}

/// The `(C, K)` grid of the domination heuristic.
pub const DOMINATION_C: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
pub const DOMINATION_K: [f64; 3] = [1.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationCell {
    pub c: f64,
    pub k: f64,
    pub holds: bool,
    /// `max (ln f(x) − ln K − ln g(Cx))` over the grid.
    pub worst_excess: f64,
}

/// Per-pair outcome of testing `f(x) ≤ K·g(Cx)` on a finite grid. Heuristic:
/// finitely many points say nothing about asymptotics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub schema: String,
    pub f: String,
    pub g: String,
    pub ln_range: (f64, f64),
    pub points: usize,
    pub skipped: usize,
    pub cells: Vec<DominationCell>,
    /// The first `(C, K)` for which the inequality held on the grid.
    pub witness: Option<(f64, f64)>,
    pub note: String,
}

/// Tests `f ≼ g` numerically on `points` log-spaced values of `x` in
/// `[e^{ln_lo}, e^{ln_hi}]`.
pub fn asymptotic_compare(f: &ProfileCurve, g: &ProfileCurve, ln_lo: f64, ln_hi: f64, points: usize) -> Result<DominationReport> {
    if !(ln_lo < ln_hi) || points < 2 {
        return Err(HaloError::InvalidInput("need ln_lo < ln_hi and at least two points".into()));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64)
        .collect();
    let mut cells = Vec::new();
    let mut skipped = 0;
    for &c in &DOMINATION_C {
        let pairs: Vec<(f64, f64)> = grid
            .iter()
            .filter_map(|&lx| Some((f.ln_eval(lx)?, g.ln_eval(lx + c.ln())?)))
            .collect();
        if c == 1.0 {
            skipped = points - pairs.len();
        }
        for &k in &DOMINATION_K {
            let worst = pairs
                .iter()
                .map(|(lf, lg)| lf - k.ln() - lg)
                .fold(f64::NEG_INFINITY, f64::max);
            cells.push(DominationCell { c, k, holds: !pairs.is_empty() && worst <= 1e-12, worst_excess: worst });
        }
    }
    let witness = cells.iter().find(|c| c.holds).map(|c| (c.c, c.k));
    Ok(DominationReport {
        schema: crate::SCHEMA.to_string(),
        f: f.label(),
        g: g.label(),
        ln_range: (ln_lo, ln_hi),
        points,
        skipped,
        cells,
        witness,
        note: "numeric heuristic on a finite grid; not a statement about asymptotics".into(),
    })
}

/// CSV of curve values `(ln x, ln f_1, ln f_2, …)` for plotting.
pub fn write_curves_csv<W: Write>(curves: &[ProfileCurve], ln_lo: f64, ln_hi: f64, points: usize, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["ln_x".to_string()];
    header.extend(curves.iter().map(|c| c.label()));
    w.write_record(&header)?;
    for i in 0..points {
        let lx = ln_lo + (ln_hi - ln_lo) * i as f64 / (points.max(2) - 1) as f64;
        let mut row = vec![format!("{lx:.6}")];
        row.extend(curves.iter().map(|c| c.ln_eval(lx).map_or(String::new(), |v| format!("{v:.9}"))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
