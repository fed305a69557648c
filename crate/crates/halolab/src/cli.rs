//! Command-line experiments. Each command reads an optional JSON spec (field
//! `"schema": "halolab/1"`), writes CSV/JSON into `--out` and returns whether
//! every checked invariant held.

use crate::coupling::{
    check_cocycle_identity, estimate_moment, write_samples_csv, write_series_csv, write_triples_csv, Couple,
};
use crate::error::{HaloError, Result};
use crate::halo::GroupDescriptor;
use crate::lift::{iterate_lift, Coupling, LiftFamily, LiftStage, Lifted, PairCouple, Side, TilingCouple};
use crate::profile::{
    asymptotic_compare, candidate_lower_bound, iso_profile_bruteforce, write_curves_csv, ProfileCurve,
};
use crate::tiling::convergence::{convergence_check, write_convergence_csv, IntegrabilityFn, Scales};
use crate::tiling::{generator_ratios, verify_tiling_level, AnyTiling, TilingSpec, DEFAULT_ENUM_CAP};
use clap::{Parser, Subcommand};
use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Parser)]
#[command(name = "halolab", version, about = "Halo product tilings, couplings, lifts and profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment spec; defaults apply to omitted fields.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Seed for randomized commands (overrides the spec).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Maximal odometer depth for couplings (overrides the spec).
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Cap on explicitly enumerated elements.
    #[arg(long, global = true)]
    pub enum_cap: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true, env = "HALOLAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Verify tiling partitions `F_{n+1} = ⊔ s·F_n` by enumeration.
    VerifyTiling,
    /// Exact boundary ratios of every generator against the base box.
    Boundary,
    /// Cocycle identity and cofinality on random triples.
    Couple,
    /// Monte Carlo moments `E|c(s, x)|^p` over a depth schedule.
    Moments,
    /// Word-length bounds of lifted cocycles.
    Lift,
    /// Brute-force profiles, tiling lower bounds and curve comparisons.
    Profile,
    /// Terms and partial sums of the tiling integrability series.
    Convergence,
}

/// Outcome of a command: `ok` is false when an invariant was falsified.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub ok: bool,
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.ok => EXIT_OK,
        Ok(_) => EXIT_FALSIFIED,
        Err(HaloError::Resource(_)) | Err(HaloError::Truncated { .. }) => EXIT_RESOURCE,
        Err(HaloError::Invariant(_)) => EXIT_FALSIFIED,
        Err(_) => EXIT_USAGE,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTilingSpec {
    pub schema: Option<String>,
    #[serde(default = "default_halo_tiling")]
    pub tiling: TilingSpec,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub schema: Option<String>,
    #[serde(default = "default_halo_tiling")]
    pub tiling: TilingSpec,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
}

/// Two tilings coupled through equal ranks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupleDef {
    pub a: TilingSpec,
    pub b: TilingSpec,
    /// Defaults to 24 for two boxes and 4 otherwise.
    pub max_depth: Option<usize>,
}

impl Default for CoupleDef {
    fn default() -> Self {
        let a = TilingSpec::Zd { d: 2, m: 2 };
        CoupleDef { b: TilingSpec::Matched { target: Box::new(a.clone()), d2: 1 }, a, max_depth: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupleSpec {
    pub schema: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub couple: CoupleDef,
    #[serde(default = "default_triples")]
    pub triples: usize,
    /// Random elements are words of up to this many generators.
    #[serde(default = "default_word_len")]
    pub word_len: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSpec {
    pub schema: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub couple: CoupleDef,
    #[serde(default)]
    pub generator: usize,
    #[serde(default = "default_ps")]
    pub ps: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_depths")]
    pub depths: Vec<usize>,
    #[serde(default = "default_threshold")]
    pub truncation_threshold: f64,
}

/// Base coupling of a lift.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseDef {
    Tilings { a: TilingSpec, b: TilingSpec, max_depth: Option<usize> },
    Pair { d1: usize, k1: usize, d2: usize, k2: usize, m: u64, max_depth: Option<usize> },
}

impl Default for BaseDef {
    fn default() -> Self {
        let c = CoupleDef::default();
        BaseDef::Tilings { a: c.a, b: c.b, max_depth: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSpec {
    pub schema: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub base: BaseDef,
    #[serde(default = "default_stages")]
    pub stages: Vec<LiftStage>,
    #[serde(default = "default_lift_samples")]
    pub samples: usize,
    /// Generator indices to sample; the lamp generators when omitted.
    pub generators: Option<Vec<usize>>,
    #[serde(default = "default_side")]
    pub side: Side,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareDef {
    pub f: ProfileCurve,
    pub g: ProfileCurve,
    pub ln_lo: f64,
    pub ln_hi: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub schema: Option<String>,
    #[serde(default = "default_profile_group")]
    pub group: GroupDescriptor,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_radius")]
    pub radius: usize,
    /// Tiling whose levels give candidate lower-bound points.
    pub tiling: Option<TilingSpec>,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_curves")]
    pub curves: Vec<ProfileCurve>,
    #[serde(default)]
    pub compare: Vec<CompareDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub schema: Option<String>,
    pub a: TilingSpec,
    pub b: TilingSpec,
    pub phi: IntegrabilityFn,
    pub psi: IntegrabilityFn,
    #[serde(default = "default_series_levels")]
    pub levels: usize,
    #[serde(default = "one_f64")]
    pub c_phi: f64,
    #[serde(default = "one_f64")]
    pub c_psi: f64,
}

fn default_halo_tiling() -> TilingSpec {
    TilingSpec::Juggler { d: 1, m: 2, r: 1 }
}
fn default_levels() -> Vec<usize> {
    vec![0, 1]
}
fn default_triples() -> usize {
    1000
}
fn default_word_len() -> usize {
    3
}
fn default_ps() -> Vec<f64> {
    vec![0.4, 0.6]
}
fn default_samples() -> usize {
    100_000
}
fn default_depths() -> Vec<usize> {
    (5..=20).collect()
}
fn default_threshold() -> f64 {
    0.01
}
fn default_stages() -> Vec<LiftStage> {
    vec![LiftStage::Lift(LiftFamily::Juggler { r: 1 })]
}
fn default_lift_samples() -> usize {
    1000
}
fn default_side() -> Side {
    Side::H
}
fn default_points() -> usize {
    200
}
fn default_profile_group() -> GroupDescriptor {
    GroupDescriptor::shuffler(1)
}
fn default_n_max() -> usize {
    6
}
fn default_radius() -> usize {
    4
}
fn default_curves() -> Vec<ProfileCurve> {
    vec![
        ProfileCurve::Power { a: 1.0 },
        ProfileCurve::LogOverLogLog { k: 1.0 },
        ProfileCurve::IterLog { n: 1, a: 0.5 },
        ProfileCurve::IterLog { n: 1, a: 1.0 },
    ]
}
fn default_series_levels() -> usize {
    200
}
fn one_f64() -> f64 {
    1.0
}

/// Reads a spec file, checking the schema tag; `{}` when no file is given.
pub fn load_spec<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let value: serde_json::Value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| HaloError::Usage(format!("cannot read {}: {e}", p.display())))?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| HaloError::Usage(format!("malformed spec: {e}")))?;
            match v.get("schema").and_then(|s| s.as_str()) {
                Some(crate::SCHEMA) => v,
                Some(other) => return Err(HaloError::Usage(format!("unsupported schema {other:?}"))),
                None => return Err(HaloError::Usage(format!("spec lacks \"schema\": \"{}\"", crate::SCHEMA))),
            }
        }
        None => serde_json::json!({}),
    };
    serde_json::from_value(value).map_err(|e| HaloError::Usage(format!("invalid spec: {e}")))
}

fn seed_of(flag: Option<u64>, spec: Option<u64>) -> Result<u64> {
    flag.or(spec)
        .ok_or_else(|| HaloError::Usage("this command is randomized: pass --seed or set \"seed\" in the spec".into()))
}

struct Out {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Out {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| HaloError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Out { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| HaloError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(BufWriter::new(f))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let w = self.file(name)?;
        serde_json::to_writer_pretty(w, value).map_err(|e| HaloError::Resource(format!("writing {name}: {e}")))
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<()> {
        let w = self.file(name)?;
        write(w).map_err(|e| HaloError::Resource(format!("writing {name}: {e}")))
    }
}

macro_rules! with_tilings {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (AnyTiling::Box($x), AnyTiling::Box($y)) => $body,
            (AnyTiling::Box($x), AnyTiling::Halo($y)) => $body,
            (AnyTiling::Halo($x), AnyTiling::Box($y)) => $body,
            (AnyTiling::Halo($x), AnyTiling::Halo($y)) => $body,
        }
    };
}

fn default_depth(a: &AnyTiling, b: &AnyTiling) -> usize {
    match (a, b) {
        (AnyTiling::Box(_), AnyTiling::Box(_)) => 24,
        _ => 4,
    }
}

fn build_pair(def: &CoupleDef, flag: Option<usize>) -> Result<(AnyTiling, AnyTiling, usize)> {
    let a = def.a.build()?;
    let b = def.b.build()?;
    let depth = flag.or(def.max_depth).unwrap_or_else(|| default_depth(&a, &b));
    Ok((a, b, depth))
}

/// Runs one command.
pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let spec = cli.spec.as_deref();
    let cap = cli.enum_cap.unwrap_or(DEFAULT_ENUM_CAP);
    let mut out = Out::new(&cli.out)?;
    let mut lines = Vec::new();
    let ok = match cli.command {
        Command::VerifyTiling => {
            let s: VerifyTilingSpec = load_spec(spec)?;
            let t = s.tiling.build()?;
            let mut rows = Vec::new();
            for &n in &s.levels {
                let r = match &t {
                    AnyTiling::Box(b) => verify_tiling_level(b, n, cap)?,
                    AnyTiling::Halo(h) => verify_tiling_level(h, n, cap)?,
                };
                lines.push(format!(
                    "level {n}: {} = {}×{} {}",
                    r.next_size,
                    r.shift_count,
                    r.tile_size,
                    if r.passed { "ok" } else { "FAILED" }
                ));
                rows.push(serde_json::json!({
                    "n": r.n, "shift_count": r.shift_count, "tile_size": r.tile_size,
                    "next_size": r.next_size, "passed": r.passed, "witness": r.witness,
                }));
            }
            let ok = rows.iter().all(|r| r["passed"] == true);
            out.json("verify_tiling.json", &serde_json::json!({ "schema": crate::SCHEMA, "levels": rows }))?;
            ok
        }
        Command::Boundary => {
            let s: BoundarySpec = load_spec(spec)?;
            let AnyTiling::Halo(t) = s.tiling.build()? else {
                return Err(HaloError::Usage("boundary needs a halo tiling".into()));
            };
            let mut rows = Vec::new();
            for &n in &s.levels {
                for r in generator_ratios(&t, n, cap)? {
                    rows.push((n, r));
                }
            }
            out.csv("boundary.csv", |w| {
                let mut w = csv::Writer::from_writer(w);
                w.write_record(["level", "generator", "kind", "ratio", "base_ratio", "ok"])?;
                for (n, r) in &rows {
                    w.write_record([
                        n.to_string(),
                        r.generator.to_string(),
                        r.kind.clone(),
                        r.ratio.clone(),
                        r.base_ratio.clone(),
                        r.ok.to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?;
            let bad = rows.iter().filter(|(_, r)| !r.ok).count();
            lines.push(format!("{} generator ratios checked, {bad} violations", rows.len()));
            bad == 0
        }
        Command::Couple => {
            let s: CoupleSpec = load_spec(spec)?;
            let seed = seed_of(cli.seed, s.seed)?;
            let (a, b, depth) = build_pair(&s.couple, cli.max_depth)?;
            let (report, rows) = with_tilings!(a, b, |x, y| {
                let couple = Couple::new(x, y, depth)?;
                check_cocycle_identity(&couple, s.triples, s.word_len, seed)?
            });
            out.csv("couple.csv", |w| write_triples_csv(&rows, w))?;
            out.json("couple.json", &report)?;
            lines.push(format!(
                "{} triples: {} checked, {} truncated ({:.2}%), {} identity violations, {} cofinality failures",
                report.triples,
                report.checked,
                report.truncated,
                100.0 * report.truncated_fraction,
                report.violations,
                report.cofinality_failures
            ));
            report.violations == 0 && report.cofinality_failures == 0
        }
        Command::Moments => {
            let s: MomentsSpec = load_spec(spec)?;
            let seed = seed_of(cli.seed, s.seed)?;
            let (a, b, depth) = build_pair(&s.couple, cli.max_depth)?;
            let (report, rows) = with_tilings!(a, b, |x, y| {
                let couple = Couple::new(x, y, depth)?;
                estimate_moment(&couple, s.generator, &s.ps, s.samples, &s.depths, seed, s.truncation_threshold)?
            });
            out.csv("moments_samples.csv", |w| write_samples_csv(&rows, w))?;
            out.csv("moments_series.csv", |w| write_series_csv(&report, w))?;
            out.json("moments.json", &report)?;
            for &p in &s.ps {
                let series = report.series(p);
                if let (Some(first), Some(last)) = (series.first(), series.last()) {
                    lines.push(format!("p={p}: first {first:.4}, last {last:.4}, ratio {:.3}", last / first));
                }
            }
            if report.unreliable {
                lines.push("truncated fraction above threshold: estimates unreliable".into());
            }
            true
        }
        Command::Lift => {
            let s: LiftSpec = load_spec(spec)?;
            let seed = seed_of(cli.seed, s.seed)?;
            let base = build_base(&s.base, cli.max_depth)?;
            let Some((LiftStage::Lift(family), below)) = s.stages.split_last() else {
                return Err(HaloError::Usage("the last stage must be a lift".into()));
            };
            let chain = iterate_lift(below, base)?;
            let lift = Lifted::new(chain.top().clone(), family.clone())?;
            let gens = s.generators.clone().unwrap_or_else(|| lift.lamp_generators(s.side));
            let (report, rows) = lift.bound_check(s.side, &gens, s.samples, seed)?;
            out.csv("lift.csv", |w| {
                let mut w = csv::Writer::from_writer(w);
                w.write_record([
                    "sample", "generator", "kind", "base_length", "lifted_length", "bound", "mode", "ok", "truncated",
                ])?;
                let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
                for r in &rows {
                    let mode = r.mode.and_then(|m| serde_json::to_value(m).ok()).and_then(|v| v.as_str().map(str::to_string));
                    w.write_record([
                        r.sample.to_string(),
                        r.generator.to_string(),
                        r.kind.clone(),
                        opt(r.base_length),
                        opt(r.lifted_length),
                        opt(r.bound),
                        mode.unwrap_or_default(),
                        r.ok.to_string(),
                        r.truncated.to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?;
            out.json("lift.json", &report)?;
            lines.push(format!(
                "{}: {} samples, {} checked, {} truncated, {} violations, max ratio {:.3}",
                report.couple, report.samples, report.checked, report.truncated, report.violations, report.max_ratio
            ));
            report.violations == 0
        }
        Command::Profile => {
            let s: ProfileSpec = load_spec(spec)?;
            let group = s.group.build()?;
            let name = crate::lift::DynGroup::from_halo(&group).name();
            let name = if group.lamp_identity() == crate::halo::Lamp::None {
                format!("Z^{}", s.group.d)
            } else {
                name
            };
            let table = iso_profile_bruteforce(&group, &name, s.n_max, s.radius, cap)?;
            out.csv("profile.csv", |w| table.write_csv(w))?;
            let mut ok = true;
            let mut candidates = Vec::new();
            if let Some(spec) = &s.tiling {
                let t = spec.build()?;
                for &n in &s.levels {
                    let p = match &t {
                        AnyTiling::Box(b) => candidate_lower_bound(b, n, cap)?,
                        AnyTiling::Halo(h) => candidate_lower_bound(h, n, cap)?,
                    };
                    let size: Option<usize> = p.size.parse().ok();
                    if let (Some((a, b)), Some(size)) = (p.exact_ratio, size) {
                        if let Some(best) = table.profile(size) {
                            if Ratio::new(a, b) > best {
                                ok = false;
                                lines.push(format!("level {n}: tile ratio {a}/{b} exceeds brute-force {best}"));
                            }
                        }
                    }
                    lines.push(format!(
                        "tile level {n}: |F| = {}, boundary ratio {}",
                        p.size,
                        p.exact_ratio.map_or("-".into(), |(a, b)| format!("{a}/{b}"))
                    ));
                    candidates.push(p);
                }
                out.csv("candidates.csv", |w| {
                    let mut w = csv::Writer::from_writer(w);
                    w.write_record(["n", "size", "ln_size", "ln_symbolic_bound", "exact_ratio"])?;
                    for p in &candidates {
                        w.write_record([
                            p.n.to_string(),
                            p.size.clone(),
                            format!("{:.9}", p.ln_size),
                            format!("{:.9}", p.ln_symbolic_bound + 0.0),
                            p.exact_ratio.map(|(a, b)| format!("{a}/{b}")).unwrap_or_default(),
                        ])?;
                    }
                    w.flush()?;
                    Ok(())
                })?;
            }
            let (lo, hi) = candidates
                .iter()
                .map(|p| p.ln_size)
                .filter(|l| *l > 1.0)
                .fold((2.0f64, 40.0f64), |(lo, hi), l| (lo.min(l), hi.max(l)));
            out.csv("curves.csv", |w| write_curves_csv(&s.curves, lo, hi, 100, w))?;
            let compares = s
                .compare
                .iter()
                .map(|c| asymptotic_compare(&c.f, &c.g, c.ln_lo, c.ln_hi, c.points))
                .collect::<Result<Vec<_>>>()?;
            for c in &compares {
                lines.push(format!(
                    "{} vs {}: {}",
                    c.f,
                    c.g,
                    c.witness.map_or("no (C, K) on the grid".into(), |(cc, k)| format!("holds with C={cc}, K={k}"))
                ));
            }
            out.json(
                "profile.json",
                &serde_json::json!({ "schema": crate::SCHEMA, "table": table, "candidates": candidates, "compare": compares }),
            )?;
            for r in &table.rows {
                lines.push(format!(
                    "n={}: I(n) >= {} over {} sets",
                    r.n,
                    r.profile.map_or("-".into(), |(a, b)| format!("{a}/{b}")),
                    r.sets
                ));
            }
            if let Some(note) = &table.coverage_note {
                lines.push(format!("partial table: {note}"));
            }
            ok
        }
        Command::Convergence => {
            let s: ConvergenceSpec = load_spec(spec)?;
            let a = s.a.build()?;
            let b = s.b.build()?;
            let report = convergence_check(
                &s.phi,
                &s.psi,
                |n| a.level(n),
                |n| b.level(n),
                s.levels,
                Scales { c_phi: s.c_phi, c_psi: s.c_psi },
            );
            out.csv("convergence.csv", |w| write_convergence_csv(&report, w))?;
            out.json("convergence.json", &report)?;
            lines.push(format!(
                "phi series: {:?} (last ratio {:.6}); psi series: {:?} (last ratio {:.3e})",
                report.phi.verdict, report.phi.last_ratio, report.psi.verdict, report.psi.last_ratio
            ));
            true
        }
    };
    Ok(Outcome { ok, lines, files: out.files })
}

fn build_base(def: &BaseDef, flag: Option<usize>) -> Result<Arc<dyn Coupling>> {
    Ok(match def {
        BaseDef::Tilings { a, b, max_depth } => {
            let def = CoupleDef { a: a.clone(), b: b.clone(), max_depth: *max_depth };
            let (a, b, depth) = build_pair(&def, flag)?;
            with_tilings!(a, b, |x, y| Arc::new(TilingCouple::new(x, y, depth)?) as Arc<dyn Coupling>)
        }
        BaseDef::Pair { d1, k1, d2, k2, m, max_depth } => {
            Arc::new(PairCouple::new(*d1, *k1, *d2, *k2, *m, flag.or(*max_depth).unwrap_or(24))?)
        }
    })
}

/// Parses arguments, runs, prints the summary and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = run(&cli);
    match &result {
        Ok(o) => {
            for l in &o.lines {
                println!("{l}");
            }
            for f in &o.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}
