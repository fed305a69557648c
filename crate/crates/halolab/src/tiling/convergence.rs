//! Integrability functions and the tiling series `Σ φ(R′_{n+1}/C)·ε_n`,
//! `Σ ψ(R_{n+1}/C′)·ε′_n`, evaluated in log-space.

use super::TilingLevel;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Non-decreasing integrability functions, evaluated through `ln φ(x)` as a
/// function of `ln x` so that astronomically large arguments stay finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrabilityFn {
    /// `x^p`.
    Power { p: f64 },
    /// `ln(x)^p`.
    LogPower { p: f64 },
    /// `exp(a·x)`.
    Exp { a: f64 },
    /// `x^{x^α}`.
    PowerTower { alpha: f64 },
    /// `(ln^{∘k} x)^a / (ln^{∘(k+1)} x)^b`.
    IterLogRatio { k: u32, a: f64, b: f64 },
}

impl IntegrabilityFn {
    /// `ln φ(x)` from `ln x`; `None` outside the domain where the formula is meaningful.
    pub fn ln_eval(&self, lnx: f64) -> Option<f64> {
        let v = match *self {
            IntegrabilityFn::Power { p } => p * lnx,
            IntegrabilityFn::LogPower { p } => {
                if lnx <= 0.0 {
                    return None;
                }
                p * lnx.ln()
            }
            IntegrabilityFn::Exp { a } => a * lnx.exp(),
            IntegrabilityFn::PowerTower { alpha } => (alpha * lnx).exp() * lnx,
            IntegrabilityFn::IterLogRatio { k, a, b } => {
                // l = ln^{∘k} x, then ln φ = a·ln l − b·ln ln l.
                let mut l = lnx;
                for _ in 1..k {
                    if l <= 0.0 {
                        return None;
                    }
                    l = l.ln();
                }
                if l <= 1.0 {
                    return None;
                }
                let ll = l.ln();
                a * ll - b * ll.ln()
            }
        };
        v.is_finite().then_some(v)
    }

    /// `φ(x)` for a plain length; `x^0 = 1` and `x^p = 0` at zero.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            IntegrabilityFn::Power { p } => x.powf(p),
            IntegrabilityFn::Exp { a } => (a * x).exp(),
            _ => {
                if x <= 0.0 {
                    return 0.0;
                }
                self.ln_eval(x.ln()).map_or(0.0, f64::exp)
            }
        }
    }
}

/// Convergence verdict from the ratio and Raabe tests on the last terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

/// One series: per-level log-terms, terms and partial sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub ln_terms: Vec<Option<f64>>,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Last consecutive-term ratio `t_N / t_{N−1}`.
    pub last_ratio: f64,
    /// Raabe statistic `N·(1 − t_N/t_{N−1})`.
    pub raabe: f64,
    pub verdict: Verdict,
}

impl SeriesReport {
    fn from_ln_terms(ln_terms: Vec<Option<f64>>) -> Self {
        let terms: Vec<f64> = ln_terms.iter().map(|t| t.map_or(0.0, f64::exp)).collect();
        let mut partial_sums = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for t in &terms {
            acc += t;
            partial_sums.push(acc);
        }
        let n = ln_terms.len();
        let (last_ratio, raabe) = match (n >= 2).then(|| (ln_terms[n - 2], ln_terms[n - 1])) {
            Some((Some(a), Some(b))) => {
                let lr = b - a;
                let r = lr.exp();
                // 1 − r computed as −expm1(ln r) to keep precision near r = 1.
                (r, (n - 1) as f64 * -lr.exp_m1())
            }
            _ => (f64::NAN, f64::NAN),
        };
        let verdict = if last_ratio.is_nan() {
            Verdict::Inconclusive
        } else if last_ratio < 0.9 {
            Verdict::Converging
        } else if last_ratio > 1.0 {
            Verdict::Diverging
        } else if raabe > 1.05 {
            Verdict::Converging
        } else if raabe < 0.95 {
            Verdict::Diverging
        } else {
            Verdict::Inconclusive
        };
        SeriesReport { ln_terms, terms, partial_sums, last_ratio, raabe, verdict }
    }

    /// Ratio `t_n / t_{n−1}` for every `n ≥ 1` where both terms are defined.
    pub fn ratios(&self) -> Vec<Option<f64>> {
        (1..self.ln_terms.len())
            .map(|n| match (self.ln_terms[n - 1], self.ln_terms[n]) {
                (Some(a), Some(b)) => Some((b - a).exp()),
                _ => None,
            })
            .collect()
    }
}

/// Both series of the tiling criterion for a pair of tilings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub phi: SeriesReport,
    pub psi: SeriesReport,
}

/// Scale constants: `φ` is evaluated at `R′/c_phi` and `ψ` at `R/c_psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub c_phi: f64,
    pub c_psi: f64,
}

impl Default for Scales {
    fn default() -> Self {
        Scales { c_phi: 1.0, c_psi: 1.0 }
    }
}

/// Terms `φ(R′_{n+1}/C)·ε_n` and `ψ(R_{n+1}/C′)·ε′_n` for `n < levels`, where
/// unprimed data come from tiling A and primed data from tiling B.
pub fn convergence_check(
    phi: &IntegrabilityFn,
    psi: &IntegrabilityFn,
    seq_a: impl Fn(usize) -> TilingLevel,
    seq_b: impl Fn(usize) -> TilingLevel,
    levels: usize,
    scales: Scales,
) -> ConvergenceReport {
    let term = |f: &IntegrabilityFn, ln_r: f64, c: f64, ln_eps: f64| f.ln_eval(ln_r - c.ln()).map(|v| v + ln_eps);
    let mut phi_terms = Vec::with_capacity(levels);
    let mut psi_terms = Vec::with_capacity(levels);
    let mut a_next = seq_a(0);
    let mut b_next = seq_b(0);
    for n in 0..levels {
        let (a, b) = (a_next, b_next);
        a_next = seq_a(n + 1);
        b_next = seq_b(n + 1);
        phi_terms.push(term(phi, b_next.diam_bound.ln(), scales.c_phi, a.ln_eps()));
        psi_terms.push(term(psi, a_next.diam_bound.ln(), scales.c_psi, b.ln_eps()));
    }
    ConvergenceReport {
        phi: SeriesReport::from_ln_terms(phi_terms),
        psi: SeriesReport::from_ln_terms(psi_terms),
    }
}

/// CSV with columns `series,n,term,partial_sum`.
pub fn write_convergence_csv<W: Write>(report: &ConvergenceReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["series", "n", "term", "partial_sum"])?;
    for (name, s) in [("phi", &report.phi), ("psi", &report.psi)] {
        for (n, (t, p)) in s.terms.iter().zip(&s.partial_sums).enumerate() {
            w.write_record([name.to_string(), n.to_string(), format!("{t:e}"), format!("{p:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{BoxTiling, Tiling};

    #[test]
    fn functions_in_log_space() {
        let f = IntegrabilityFn::Power { p: 2.0 };
        assert!((f.eval(3.0) - 9.0).abs() < 1e-12);
        assert_eq!(f.ln_eval(1e300), Some(2e300));
        assert_eq!(IntegrabilityFn::Power { p: 0.0 }.eval(0.0), 1.0);
        let t = IntegrabilityFn::PowerTower { alpha: 0.5 };
        assert!((t.eval(4.0) - 16.0).abs() < 1e-9);
        let r = IntegrabilityFn::IterLogRatio { k: 1, a: 1.0, b: 1.0 };
        let x: f64 = 1e10;
        assert!((r.eval(x) - x.ln() / x.ln().ln()).abs() < 1e-9);
        assert_eq!(r.ln_eval(0.5), None);
    }

    #[test]
    fn zd_power_series_verdicts() {
        // ℤ²↔ℤ with dyadic tiles: φ(x)=x^p against ε_n = 2^{−n} converges iff 4^p < 2.
        let a = BoxTiling::adic(2, 2).unwrap();
        let b = BoxTiling::adic(1, 4).unwrap();
        let psi = IntegrabilityFn::Power { p: 0.0 };
        let conv = convergence_check(&IntegrabilityFn::Power { p: 0.4 }, &psi, |n| a.level(n), |n| b.level(n), 30, Scales::default());
        assert_eq!(conv.phi.verdict, Verdict::Converging);
        // Closed-form ratio 4^p / 2 in the limit.
        assert!((conv.phi.last_ratio - 4f64.powf(0.4) / 2.0).abs() < 1e-6);
        let div = convergence_check(&IntegrabilityFn::Power { p: 1.0 }, &psi, |n| a.level(n), |n| b.level(n), 30, Scales::default());
        assert_eq!(div.phi.verdict, Verdict::Diverging);
    }
}
