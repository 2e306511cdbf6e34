use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use entpoly_core::entpoly::{analyze, factorize};
use entpoly_core::poly::{self, parse_int_poly};
use entpoly_core::size::{operator_size_with, size_operator};
use entpoly_core::symmetry::{all_permutations, slocc_trial, SloccTrial};
use entpoly_core::{
    permute_sites, Analysis, EntanglementPolynomial, Factorization, Method, PureState,
    RankEstimate, RankPolicy,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::atlas::{Atlas, AtlasEntry};
use crate::error::{CliError, Result};
use crate::operator_spec::parse_operator;
use crate::state_spec::{parse_state, PresetOptions};

#[derive(Debug, Parser)]
#[command(
    name = "entpoly",
    version,
    about = "Entanglement polynomials of pure multi-qudit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Route used to compute |W_k|.
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Local dimension for preset states.
    #[arg(long, global = true, default_value_t = 2)]
    pub d: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// SLOCC trials for `fuzz`.
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: usize,
    /// Relative rank tolerance: singular values below tol·σ_max count as zero.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value = "entpoly-atlas.json")]
    pub store: PathBuf,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rank,
    Oracle,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rank => Method::Rank,
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement polynomial, factorization and rank diagnostics.
    Poly {
        #[arg(required = true)]
        specs: Vec<String>,
    },
    /// Factor a polynomial over the integers, or the polynomial of a state.
    Factor { input: String },
    /// Size operator of a state, optionally the size of an operator or of another state.
    Size {
        spec: String,
        /// Operator such as `X:0*Z:2`.
        #[arg(long)]
        op: Option<String>,
        /// State whose size distribution relative to `spec` is reported.
        #[arg(long)]
        relative: Option<String>,
    },
    /// Random SLOCC operators and site permutations must leave the polynomial unchanged.
    Fuzz { spec: String },
    /// Compare the rank route with the span oracle.
    Oracle {
        #[arg(required = true)]
        specs: Vec<String>,
    },
    /// Persistent catalogue of polynomials.
    Atlas {
        #[command(subcommand)]
        action: AtlasAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum AtlasAction {
    Add {
        #[arg(required = true)]
        specs: Vec<String>,
    },
    /// Look up a polynomial, given directly or as a state.
    Query {
        polynomial: String,
    },
    List,
}

/// Text to print plus an optional failure that sets the exit code.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub failure: Option<CliError>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

impl Options {
    fn policy(&self) -> Result<RankPolicy> {
        match self.tol {
            None => Ok(RankPolicy::default()),
            Some(t) if t > 0.0 && t < 1.0 => Ok(RankPolicy::with_rel_tol(t)),
            Some(t) => Err(CliError::validation(format!(
                "--tol must lie in (0, 1), got {t}"
            ))),
        }
    }

    fn presets(&self) -> PresetOptions {
        PresetOptions {
            d: self.d,
            seed: self.seed,
        }
    }

    fn state(&self, spec: &str) -> Result<PureState> {
        parse_state(spec, self.presets())
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let o = &cli.options;
    if o.d < 2 {
        return Err(CliError::validation("--d must be at least 2"));
    }
    match &cli.command {
        Command::Poly { specs } => cmd_poly(specs, o),
        Command::Factor { input } => cmd_factor(input, o),
        Command::Size { spec, op, relative } => {
            cmd_size(spec, op.as_deref(), relative.as_deref(), o)
        }
        Command::Fuzz { spec } => cmd_fuzz(spec, o),
        Command::Oracle { specs } => cmd_oracle(specs, o),
        Command::Atlas { action } => match action {
            AtlasAction::Add { specs } => cmd_atlas_add(specs, o),
            AtlasAction::Query { polynomial } => cmd_atlas_query(polynomial, o),
            AtlasAction::List => cmd_atlas_list(o),
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("results serialize")
}

/// `irreducible` or the product form such as `(1+x)(1+3x)`.
pub fn factorization_text(f: &Factorization) -> String {
    if f.is_irreducible() {
        "irreducible".into()
    } else {
        f.to_string()
    }
}

fn gap_text(gap: f64) -> String {
    if gap.is_infinite() {
        "inf".into()
    } else {
        format!("{gap:.1e}")
    }
}

fn finite(gap: f64) -> Option<f64> {
    gap.is_finite().then_some(gap)
}

/// Parse every spec first so that validation errors win over numerical ones.
fn parse_all(specs: &[String], o: &Options) -> Result<Vec<PureState>> {
    specs.iter().map(|s| o.state(s)).collect()
}

fn analyze_all(states: &[PureState], method: Method, policy: &RankPolicy) -> Result<Vec<Analysis>> {
    states
        .par_iter()
        .map(|psi| analyze(psi, method, policy))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

#[derive(Debug, Serialize)]
struct LayerReport {
    k: usize,
    wk: usize,
    gap_rank: Option<f64>,
    gap_oracle: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PolyReport {
    label: String,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    polynomial: String,
    coefficients: Vec<usize>,
    factorization: String,
    f_at_one: usize,
    n_psi: usize,
    layers: Vec<LayerReport>,
}

fn poly_report(label: &str, a: &Analysis) -> PolyReport {
    let wk = a.wk_dims();
    let gaps = |path: &Option<Vec<RankEstimate>>, k: usize| {
        path.as_ref().and_then(|p| finite(p[k].gap_ratio))
    };
    let coefficients: Vec<usize> = wk
        .iter()
        .enumerate()
        .map(|(k, &w)| if k == 0 { w } else { w - wk[k - 1] })
        .collect();
    let degree = a.polynomial.degree();
    PolyReport {
        label: label.into(),
        d: a.local_dim,
        n: a.num_sites,
        polynomial: a.polynomial.canonical_string(),
        coefficients: coefficients[..=degree].to_vec(),
        factorization: factorization_text(&factorize(&a.polynomial)),
        f_at_one: *wk.last().expect("W_N"),
        n_psi: degree,
        layers: (0..wk.len())
            .map(|k| LayerReport {
                k,
                wk: wk[k],
                gap_rank: gaps(&a.rank_path, k),
                gap_oracle: gaps(&a.oracle_path, k),
            })
            .collect(),
    }
}

fn render_poly(r: &PolyReport, a: &Analysis, out: &mut String) {
    let gap = |path: &Option<Vec<RankEstimate>>, k: usize| {
        path.as_ref()
            .map_or("-".into(), |p| gap_text(p[k].gap_ratio))
    };
    writeln!(out, "{}: {} | {}", r.label, r.polynomial, r.factorization).unwrap();
    writeln!(
        out,
        "  f(1) = {} = {}^{} ok, N_psi = {}",
        r.f_at_one, r.d, r.n, r.n_psi
    )
    .unwrap();
    writeln!(
        out,
        "  {:>3}  {:>6}  {:>10}  {:>10}",
        "k", "|W_k|", "gap rank", "gap oracle"
    )
    .unwrap();
    for layer in &r.layers {
        writeln!(
            out,
            "  {:>3}  {:>6}  {:>10}  {:>10}",
            layer.k,
            layer.wk,
            gap(&a.rank_path, layer.k),
            gap(&a.oracle_path, layer.k)
        )
        .unwrap();
    }
}

fn cmd_poly(specs: &[String], o: &Options) -> Result<Output> {
    let states = parse_all(specs, o)?;
    let analyses = analyze_all(&states, o.method.into(), &o.policy()?)?;
    let reports: Vec<PolyReport> = specs
        .iter()
        .zip(&analyses)
        .map(|(s, a)| poly_report(s, a))
        .collect();
    if o.json {
        return Ok(Output::ok(to_json(&reports)));
    }
    let mut out = String::new();
    for (i, (r, a)) in reports.iter().zip(&analyses).enumerate() {
        if i > 0 {
            out.push('\n');
        }
        render_poly(r, a, &mut out);
    }
    if reports.len() > 1 {
        let w_label = reports
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(0)
            .max("state".len());
        let w_poly = reports
            .iter()
            .map(|r| r.polynomial.len())
            .max()
            .unwrap_or(0)
            .max("f(x)".len());
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<w_label$}  {:<w_poly$}  factorization",
            "state", "f(x)"
        )
        .unwrap();
        for r in &reports {
            writeln!(
                out,
                "{:<w_label$}  {:<w_poly$}  {}",
                r.label, r.polynomial, r.factorization
            )
            .unwrap();
        }
    }
    Ok(Output::ok(out))
}

#[derive(Debug, Serialize)]
struct FactorReport {
    input: String,
    polynomial: String,
    factorization: String,
    factors: Vec<(String, usize)>,
}

fn cmd_factor(input: &str, o: &Options) -> Result<Output> {
    let (poly, fac) = match parse_int_poly(input) {
        Ok(p) => {
            let fac = poly::factorize(&p)?;
            (p, fac)
        }
        Err(_) => {
            let psi = o.state(input)?;
            let f = analyze(&psi, o.method.into(), &o.policy()?)?.polynomial;
            (f.to_int_poly(), factorize(&f))
        }
    };
    let report = FactorReport {
        input: input.into(),
        polynomial: poly.to_string(),
        factorization: factorization_text(&fac),
        factors: fac
            .factors
            .iter()
            .map(|(p, e)| (p.compact_string(), *e))
            .collect(),
    };
    if o.json {
        return Ok(Output::ok(to_json(&report)));
    }
    Ok(Output::ok(format!(
        "{} | {}\n",
        report.polynomial, report.factorization
    )))
}

#[derive(Debug, Serialize)]
struct RelativeReport {
    state: String,
    mean: f64,
    probabilities: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SizeReport {
    label: String,
    n_psi: usize,
    layer_dims: Vec<usize>,
    reference_size: f64,
    operator: Option<(String, f64)>,
    relative: Option<RelativeReport>,
}

fn cmd_size(spec: &str, op: Option<&str>, relative: Option<&str>, o: &Options) -> Result<Output> {
    let psi = o.state(spec)?;
    let other = relative.map(|r| o.state(r)).transpose()?;
    let operator = op
        .map(|text| parse_operator(text, psi.local_dim(), psi.num_sites()))
        .transpose()?;
    let spectrum = size_operator(&psi)?;
    let n = spectrum.size_operator();
    let v = spectrum.source.amplitudes();
    let report = SizeReport {
        label: spec.into(),
        n_psi: spectrum.projectors.len() - 1,
        layer_dims: spectrum.multiplicities(),
        reference_size: v.dotc(&(&n * v)).norm(),
        operator: match (op, &operator) {
            (Some(text), Some(g)) => Some((text.into(), operator_size_with(&spectrum, g)?)),
            _ => None,
        },
        relative: match (relative, &other) {
            (Some(text), Some(phi)) => {
                let dist = spectrum.distribution(phi)?;
                Some(RelativeReport {
                    state: text.into(),
                    mean: dist.mean(),
                    probabilities: dist.probabilities,
                })
            }
            _ => None,
        },
    };
    if o.json {
        return Ok(Output::ok(to_json(&report)));
    }
    let mut out = String::new();
    writeln!(
        out,
        "{}: N_psi = {}, |dW_k| = {:?}",
        report.label, report.n_psi, report.layer_dims
    )
    .unwrap();
    writeln!(out, "  <psi|n|psi> = {:.3e}", report.reference_size).unwrap();
    if let Some((text, size)) = &report.operator {
        writeln!(out, "  size({text}) = {size:.6}").unwrap();
    }
    if let Some(rel) = &report.relative {
        let probs: Vec<String> = rel
            .probabilities
            .iter()
            .map(|p| format!("{p:.6}"))
            .collect();
        writeln!(
            out,
            "  size of {} = {:.6}, Pr(k) = [{}]",
            rel.state,
            rel.mean,
            probs.join(", ")
        )
        .unwrap();
    }
    Ok(Output::ok(out))
}

/// All permutations for up to five sites, otherwise adjacent swaps and the cyclic shift.
fn fuzz_permutations(n: usize) -> Vec<Vec<usize>> {
    if n <= 5 {
        return all_permutations(n);
    }
    let mut perms = Vec::new();
    for i in 0..n - 1 {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(i, i + 1);
        perms.push(p);
    }
    perms.push((0..n).map(|s| (s + 1) % n).collect());
    perms
}

#[derive(Debug, Serialize)]
struct Mismatch {
    kind: &'static str,
    detail: String,
    outcome: String,
}

#[derive(Debug, Serialize)]
struct FuzzReport {
    label: String,
    reference: String,
    seed: u64,
    slocc_trials: usize,
    permutations: usize,
    mismatches: Vec<Mismatch>,
}

fn outcome_text(r: &entpoly_core::Result<EntanglementPolynomial>) -> String {
    match r {
        Ok(p) => p.canonical_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn cmd_fuzz(spec: &str, o: &Options) -> Result<Output> {
    let psi = o.state(spec)?;
    let method: Method = o.method.into();
    let policy = o.policy()?;
    let reference = analyze(&psi, method, &policy)?.polynomial;
    let trials: Vec<SloccTrial> = (0..o.trials)
        .into_par_iter()
        .map(|i| slocc_trial(&psi, i, o.seed, method, &policy))
        .collect();
    let perms = fuzz_permutations(psi.num_sites());
    let permuted: Vec<_> = perms
        .par_iter()
        .map(|p| {
            permute_sites(&psi, p)
                .and_then(|moved| analyze(&moved, method, &policy).map(|a| a.polynomial))
        })
        .collect();

    let mut mismatches = Vec::new();
    for t in trials.iter().filter(|t| !t.matches(&reference)) {
        mismatches.push(Mismatch {
            kind: "slocc",
            detail: format!("trial {} seed {}", t.index, t.seed),
            outcome: outcome_text(&t.outcome),
        });
    }
    for (p, r) in perms.iter().zip(&permuted) {
        if r.as_ref().map_or(true, |f| *f != reference) {
            mismatches.push(Mismatch {
                kind: "permutation",
                detail: format!("{p:?}"),
                outcome: outcome_text(r),
            });
        }
    }
    let report = FuzzReport {
        label: spec.into(),
        reference: reference.canonical_string(),
        seed: o.seed,
        slocc_trials: trials.len(),
        permutations: perms.len(),
        mismatches,
    };
    let failure = (!report.mismatches.is_empty())
        .then(|| CliError::Numerical(format!("{} invariance mismatches", report.mismatches.len())));
    if o.json {
        return Ok(Output {
            text: to_json(&report),
            failure,
        });
    }
    let slocc_bad = report
        .mismatches
        .iter()
        .filter(|m| m.kind == "slocc")
        .count();
    let perm_bad = report.mismatches.len() - slocc_bad;
    let mut out = String::new();
    writeln!(out, "{}: reference {}", report.label, report.reference).unwrap();
    writeln!(
        out,
        "  slocc: {} trials (seed {}), {} mismatches",
        report.slocc_trials, report.seed, slocc_bad
    )
    .unwrap();
    writeln!(
        out,
        "  permutations: {} checked, {} mismatches",
        report.permutations, perm_bad
    )
    .unwrap();
    for m in &report.mismatches {
        writeln!(out, "  mismatch {} {}: {}", m.kind, m.detail, m.outcome).unwrap();
    }
    writeln!(out, "  {}", if failure.is_none() { "PASS" } else { "FAIL" }).unwrap();
    Ok(Output { text: out, failure })
}

#[derive(Debug, Serialize)]
struct OracleReport {
    label: String,
    pass: bool,
    rank: Vec<usize>,
    oracle: Vec<usize>,
    polynomial: Option<String>,
}

fn cmd_oracle(specs: &[String], o: &Options) -> Result<Output> {
    let states = parse_all(specs, o)?;
    let policy = o.policy()?;
    let rank = analyze_all(&states, Method::Rank, &policy)?;
    let oracle = analyze_all(&states, Method::Oracle, &policy)?;
    let reports: Vec<OracleReport> = specs
        .iter()
        .zip(rank.iter().zip(&oracle))
        .map(|(s, (r, q))| {
            let pass = r.wk_dims() == q.wk_dims();
            OracleReport {
                label: s.clone(),
                pass,
                rank: r.wk_dims(),
                oracle: q.wk_dims(),
                polynomial: pass.then(|| r.polynomial.canonical_string()),
            }
        })
        .collect();
    let failed = reports.iter().filter(|r| !r.pass).count();
    let failure = (failed > 0)
        .then(|| CliError::Numerical(format!("{failed} states disagree between methods")));
    if o.json {
        return Ok(Output {
            text: to_json(&reports),
            failure,
        });
    }
    let mut out = String::new();
    for r in &reports {
        writeln!(
            out,
            "{} {}: |W_k| rank {:?}, oracle {:?}{}",
            if r.pass { "PASS" } else { "FAIL" },
            r.label,
            r.rank,
            r.oracle,
            r.polynomial
                .as_ref()
                .map_or(String::new(), |p| format!(" -> {p}"))
        )
        .unwrap();
    }
    Ok(Output { text: out, failure })
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn render_entry(e: &AtlasEntry, out: &mut String) {
    writeln!(
        out,
        "{} | {} | d = {}, N = {} | {}",
        e.polynomial,
        e.factorization,
        e.d,
        e.n,
        e.labels.join("; ")
    )
    .unwrap();
}

fn cmd_atlas_add(specs: &[String], o: &Options) -> Result<Output> {
    let states = parse_all(specs, o)?;
    let analyses = analyze_all(&states, o.method.into(), &o.policy()?)?;
    let mut atlas = Atlas::load(&o.store)?;
    let mut added = Vec::new();
    for (spec, a) in specs.iter().zip(&analyses) {
        let entry = AtlasEntry {
            polynomial: a.polynomial.canonical_string(),
            factorization: factorization_text(&factorize(&a.polynomial)),
            labels: vec![spec.clone()],
            d: a.local_dim,
            n: a.num_sites,
            timestamp: now(),
        };
        added.push(atlas.upsert(entry).clone());
        atlas.save(&o.store)?;
    }
    if o.json {
        return Ok(Output::ok(to_json(&added)));
    }
    let mut out = String::new();
    for e in &added {
        out.push_str("added ");
        render_entry(e, &mut out);
    }
    Ok(Output::ok(out))
}

/// Canonical key for a query given as a polynomial or as a state.
fn query_key(text: &str, o: &Options) -> Result<String> {
    if let Ok(f) = text.parse::<EntanglementPolynomial>() {
        return Ok(f.canonical_string());
    }
    let psi = o.state(text)?;
    Ok(analyze(&psi, o.method.into(), &o.policy()?)?
        .polynomial
        .canonical_string())
}

fn cmd_atlas_query(text: &str, o: &Options) -> Result<Output> {
    let key = query_key(text, o)?;
    let atlas = Atlas::load(&o.store)?;
    let hits = atlas.query(&key);
    if o.json {
        return Ok(Output::ok(to_json(&hits)));
    }
    let mut out = String::new();
    if hits.is_empty() {
        writeln!(out, "no entries for {key}").unwrap();
    }
    for e in hits {
        render_entry(e, &mut out);
    }
    Ok(Output::ok(out))
}

fn cmd_atlas_list(o: &Options) -> Result<Output> {
    let atlas = Atlas::load(&o.store)?;
    if o.json {
        return Ok(Output::ok(to_json(&atlas.entries)));
    }
    let mut out = String::new();
    for e in &atlas.entries {
        render_entry(e, &mut out);
    }
    writeln!(out, "{} entries", atlas.entries.len()).unwrap();
    Ok(Output::ok(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Output> {
        let cli =
            Cli::try_parse_from(std::iter::once("entpoly").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn oracle_ghz_passes_with_full_first_layer() {
        let out = run_args(&["oracle", "ghz"]).unwrap();
        assert!(out.failure.is_none());
        assert_eq!(
            out.text,
            "PASS ghz: |W_k| rank [1, 8, 8, 8], oracle [1, 8, 8, 8] -> 1 + 7x\n"
        );
    }

    #[test]
    fn factor_accepts_polynomials_and_states() {
        assert_eq!(
            run_args(&["factor", "1+4x+3x^2"]).unwrap().text,
            "1 + 4x + 3x^2 | (1+x)(1+3x)\n"
        );
        assert_eq!(
            run_args(&["factor", "w"]).unwrap().text,
            "1 + 6x + x^2 | irreducible\n"
        );
        assert_eq!(
            run_args(&["factor", "2+2x"]).unwrap().text,
            "2 + 2x | 2(1+x)\n"
        );
    }

    #[test]
    fn bad_tolerance_is_validation_error() {
        assert_eq!(
            run_args(&["poly", "bell", "--tol", "2"])
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn size_of_pauli_on_ghz() {
        let out = run_args(&["size", "ghz", "--op", "X:0", "--relative", "zero(3)"]).unwrap();
        assert!(out.text.contains("|dW_k| = [1, 7]"));
        assert!(out.text.contains("size(X:0) = 1.000000"));
    }

    #[test]
    fn large_fuzz_uses_sparse_permutations() {
        assert_eq!(fuzz_permutations(3).len(), 6);
        assert_eq!(fuzz_permutations(6).len(), 6);
    }
}
