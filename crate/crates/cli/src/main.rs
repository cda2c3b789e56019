//! `clonetrade` — compute cloning fidelity trade-offs from the command line:
//! closed-form symmetric fidelities, Gram-matrix dumps, dense-oracle
//! eigenvalues, feasibility verdicts for target files, CSV region sweeps,
//! and the acceptance suite.
//!
//! Every command is deterministic: floats are printed with 15 significant
//! digits, exact rationals are printed alongside whenever available, and
//! enumeration order is fixed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use clonetrade::bitstrings::BitString;
use clonetrade::gram::{build_g_ml, build_g_y, g0_inverse, g0_spectrum};
use clonetrade::hilbert::{build_r, max_eig};
use clonetrade::tradeoff::{
    feasibility_1_to_n, feasibility_1ln, rank1_classification, solve_nminus1, symmetric_fidelity,
    tradeoff_1_to_n, wang_formula, FidelityVector, TradeoffResult, Verdict,
};
use clonetrade::two_to_four::{reference_feasibility, region_membership, PairFidelities};
use clonetrade::verify::{run_all, run_fast};
use clonetrade::Rat;

#[derive(Parser)]
#[command(
    name = "clonetrade",
    version,
    about = "Fidelity trade-offs for universal quantum cloning",
    after_help = "Set CLONETRADE_MAX_DIM to override the dense oracle's \
                  Hilbert-dimension budget."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form symmetric fidelity for (M, L, N, d), with the
    /// alternative-summation cross-check.
    Symfid {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        d: usize,
    },
    /// Dump a Gram matrix as JSON (exact rational entries).
    Gram {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Label y as a bit string of length N; defaults to all zeros (G_0).
        #[arg(long)]
        y: Option<String>,
        /// Aggregate over weight-L labels x with maximal overlap with y.
        #[arg(long = "L")]
        l: Option<usize>,
        /// Include the closed-form spectrum (G_0 only).
        #[arg(long)]
        spectrum: bool,
        /// Include the closed-form inverse (G_0 only).
        #[arg(long)]
        inverse: bool,
    },
    /// Dominant eigenvalue of the Choi operator with uniform weights over
    /// weight-L labels, against the closed form.
    Oracle {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "L")]
        l: usize,
    },
    /// Feasibility verdict for a JSON target file. Exit code: 0 Feasible,
    /// 1 Infeasible, 2 Undetermined, 3 unsupported parameter combination.
    Check {
        /// JSON file: {"M":…, "L":…, "N":…, "d":…, "targets": {label: value}}
        /// where values are numbers or exact "p/q" strings.
        targets: PathBuf,
    },
    /// Sweep a fidelity region to CSV (deterministic row order).
    Region {
        /// one-to-n (surface of F_N over the other sites) or 2to4
        /// (pair-fidelity membership grid).
        #[arg(long)]
        mode: String,
        /// Samples per axis.
        #[arg(long)]
        grid: usize,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance checks. Exit 0 iff all pass.
    Verify {
        /// fast (small oracle cross-checks) or full (all twelve criteria).
        #[arg(long)]
        scope: String,
    },
}

/// Fixed 15-significant-digit float formatting for reproducible output.
fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (14i32 - mag).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn rat_str(r: &Rat) -> String {
    format!("{r}")
}

fn parse_label(s: &str, n: usize) -> Result<BitString> {
    let y: BitString = s.parse().map_err(|e| anyhow!("bad label {s:?}: {e}"))?;
    if y.len() != n {
        bail!("label {s:?} has length {}, expected N = {n}", y.len());
    }
    Ok(y)
}

/// Die quietly when the consumer closes the pipe (e.g. `region … | head`)
/// instead of panicking on the failed write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    let out = match cli.cmd {
        Cmd::Symfid { m, n, l, d } => cmd_symfid(m, l, n, d),
        Cmd::Gram {
            m,
            n,
            d,
            y,
            l,
            spectrum,
            inverse,
        } => cmd_gram(m, n, d, y.as_deref(), l, spectrum, inverse),
        Cmd::Oracle { m, n, d, l } => cmd_oracle(m, l, n, d),
        Cmd::Check { targets } => return cmd_check(&targets),
        Cmd::Region {
            mode,
            grid,
            n,
            d,
            output,
        } => cmd_region(&mode, grid, n, d, output.as_deref()),
        Cmd::Verify { scope } => return cmd_verify(&scope),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_symfid(m: usize, l: usize, n: usize, d: usize) -> Result<()> {
    let f = symmetric_fidelity(m, l, n, d).map_err(|e| anyhow!("{e}"))?;
    let w = wang_formula(m, l, n, d).map_err(|e| anyhow!("{e}"))?;
    println!("symmetric fidelity (M={m}, L={l}, N={n}, d={d})");
    println!("  exact:   {}", rat_str(&f));
    println!("  decimal: {}", fmt_sig(f.to_f64().unwrap()));
    if w == f {
        println!("  alternative summation: agrees ({})", rat_str(&w));
    } else {
        println!(
            "  alternative summation: DIVERGES ({} vs {})",
            rat_str(&w),
            rat_str(&f)
        );
    }
    if (m, l, n, d) == (2, 2, 4, 2) {
        println!(
            "  note: the published value for this case is 61/69; the oracle-backed \
             optimum is 23/30 (run `verify --scope full` for the evidence)"
        );
    }
    Ok(())
}

fn cmd_gram(
    m: usize,
    n: usize,
    d: usize,
    y: Option<&str>,
    l: Option<usize>,
    spectrum: bool,
    inverse: bool,
) -> Result<()> {
    let label = match y {
        Some(s) => parse_label(s, n)?,
        None => BitString::zeros(n),
    };
    let g = match l {
        Some(l) => build_g_ml(m, n, d, l, &label).map_err(|e| anyhow!("{e}"))?,
        None => build_g_y(m, n, d, &label).map_err(|e| anyhow!("{e}"))?,
    };
    let size = g.size();
    let entries: Vec<Vec<String>> = (0..size)
        .map(|i| (0..size).map(|j| rat_str(&g.entries[(i, j)])).collect())
        .collect();
    let mut doc = json!({
        "M": m,
        "N": n,
        "d": d,
        "label": label.to_string(),
        "index": g.index.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "entries": entries,
    });
    if let Some(l) = l {
        doc["L"] = json!(l);
    }
    if spectrum || inverse {
        if label.weight() != 0 || l.is_some() {
            bail!("--spectrum/--inverse apply to the single-label G_0 only");
        }
        if spectrum {
            let s = g0_spectrum(m, n, d).map_err(|e| anyhow!("{e}"))?;
            doc["spectrum"] = json!({
                "eigenvalues": s.eigenvalues.iter().map(rat_str).collect::<Vec<_>>(),
                "degeneracies": s.degeneracies,
            });
        }
        if inverse {
            let inv = g0_inverse(m, n, d).map_err(|e| anyhow!("{e}"))?;
            let rows: Vec<Vec<String>> = (0..size)
                .map(|i| (0..size).map(|j| rat_str(&inv.entries[(i, j)])).collect())
                .collect();
            doc["inverse"] = json!(rows);
        }
    }
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn cmd_oracle(m: usize, l: usize, n: usize, d: usize) -> Result<()> {
    let labels = BitString::enumerate_weight(n, l).map_err(|e| anyhow!("{e}"))?;
    let a = 1.0 / labels.len() as f64;
    let weights: BTreeMap<BitString, f64> = labels.into_iter().map(|y| (y, a)).collect();
    let r = build_r(m, n, d, &weights).map_err(|e| anyhow!("{e}"))?;
    let (lambda, _) = max_eig(&r.op).map_err(|e| anyhow!("{e}"))?;
    let sym = symmetric_fidelity(m, l, n, d).map_err(|e| anyhow!("{e}"))?;
    let doc = json!({
        "M": m,
        "N": n,
        "d": d,
        "L": l,
        "lambda_max": fmt_sig(lambda),
        "symmetric_fidelity": rat_str(&sym),
        "deviation": fmt_sig((lambda - sym.to_f64().unwrap()).abs()),
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct TargetSpec {
    m: usize,
    l: usize,
    n: usize,
    d: usize,
    labels: Vec<BitString>,
    approx: BTreeMap<BitString, f64>,
    exact: BTreeMap<BitString, Option<Rat>>,
}

fn parse_rat(s: &str) -> Option<Rat> {
    let (num, den) = s.split_once('/')?;
    let n: i64 = num.trim().parse().ok()?;
    let d: i64 = den.trim().parse().ok()?;
    if d == 0 {
        return None;
    }
    Some(Rat::new(n.into(), d.into()))
}

fn parse_targets(path: &std::path::Path) -> Result<TargetSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading targets file {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).context("targets file is not valid JSON")?;
    let get_usize = |key: &str| -> Result<usize> {
        doc.get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| anyhow!("targets file needs an integer {key:?} field"))
    };
    let m = get_usize("M")?;
    let n = get_usize("N")?;
    let d = get_usize("d")?;
    let raw = doc
        .get("targets")
        .and_then(Value::as_object)
        .ok_or_else(|| anyhow!("targets file needs a \"targets\" object"))?;
    if raw.is_empty() {
        bail!("targets object is empty");
    }
    let mut labels = Vec::new();
    let mut approx = BTreeMap::new();
    let mut exact = BTreeMap::new();
    for (key, val) in raw {
        let y = parse_label(key, n)?;
        let (f, r) = match val {
            Value::Number(x) => (
                x.as_f64().ok_or_else(|| anyhow!("bad number for {key}"))?,
                None,
            ),
            Value::String(s) => {
                let r = parse_rat(s).ok_or_else(|| anyhow!("bad rational {s:?} for {key}"))?;
                (r.to_f64().unwrap(), Some(r))
            }
            _ => bail!("target for {key} must be a number or a \"p/q\" string"),
        };
        if !(0.0..=1.0 + 1e-12).contains(&f) {
            bail!("target for {key} out of [0,1]: {f}");
        }
        labels.push(y);
        approx.insert(y, f);
        exact.insert(y, r);
    }
    labels.sort();
    let l = match doc.get("L").and_then(Value::as_u64) {
        Some(l) => l as usize,
        None => labels[0].weight(),
    };
    Ok(TargetSpec {
        m,
        l,
        n,
        d,
        labels,
        approx,
        exact,
    })
}

fn result_json(spec_verdict: Verdict, out: &TradeoffResult) -> Value {
    let witness = out.witness_beta.as_ref().map(|w| {
        w.iter()
            .map(|(y, v)| (y.to_string(), json!(fmt_sig(*v))))
            .collect::<serde_json::Map<_, _>>()
    });
    let achieved = out.achieved.as_ref().map(|a| {
        a.iter()
            .map(|(y, v)| (y.to_string(), json!(fmt_sig(*v))))
            .collect::<serde_json::Map<_, _>>()
    });
    let residuals: serde_json::Map<_, _> = out
        .residuals
        .iter()
        .map(|(k, v)| (k.clone(), json!(fmt_sig(*v))))
        .collect();
    let mut doc = json!({
        "verdict": spec_verdict.to_string(),
        "residuals": residuals,
    });
    if let Some(w) = witness {
        doc["witness"] = Value::Object(w);
    }
    if let Some(a) = achieved {
        doc["achieved"] = Value::Object(a);
    }
    doc
}

fn verdict_exit(v: Verdict) -> ExitCode {
    match v {
        Verdict::Feasible => ExitCode::from(0),
        Verdict::Infeasible => ExitCode::from(1),
        Verdict::Undetermined => ExitCode::from(2),
    }
}

fn cmd_check(path: &std::path::Path) -> ExitCode {
    match run_check(path) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run_check(path: &std::path::Path) -> Result<ExitCode> {
    let spec = parse_targets(path)?;
    let TargetSpec { m, l, n, d, .. } = spec;

    // N−1 → N: closed-form solver, any label set.
    if m + 1 == n {
        let mut map = BTreeMap::new();
        for y in &spec.labels {
            match &spec.exact[y] {
                Some(r) => {
                    map.insert(*y, clonetrade::tradeoff::Target::Exact(r.clone()));
                }
                None => {
                    map.insert(*y, clonetrade::tradeoff::Target::Approx(spec.approx[y]));
                }
            }
        }
        let targets = FidelityVector { targets: map };
        let out = solve_nminus1(n, d, &spec.labels, &targets).map_err(|e| anyhow!("{e}"))?;
        println!(
            "{}",
            serde_json::to_string_pretty(&result_json(out.verdict, &out))?
        );
        return Ok(verdict_exit(out.verdict));
    }

    // 1 → N single-site targets: closed-form surface test.
    if m == 1 && l == 1 {
        let mut sites = Vec::with_capacity(n);
        for k in 0..n {
            let y = BitString::from_sites(n, &[k]).map_err(|e| anyhow!("{e}"))?;
            let v = spec
                .approx
                .get(&y)
                .copied()
                .ok_or_else(|| anyhow!("missing single-site target for {y}"))?;
            sites.push(v);
        }
        let out = feasibility_1_to_n(n, d, &sites).map_err(|e| anyhow!("{e}"))?;
        println!(
            "{}",
            serde_json::to_string_pretty(&result_json(out.verdict, &out))?
        );
        return Ok(verdict_exit(out.verdict));
    }

    // 1 → N subset targets in the kernel window.
    if m == 1 && 1 < l && l < n - 1 {
        let out = feasibility_1ln(n, d, l, &spec.approx).map_err(|e| anyhow!("{e}"))?;
        println!(
            "{}",
            serde_json::to_string_pretty(&result_json(out.verdict, &out))?
        );
        return Ok(verdict_exit(out.verdict));
    }

    // 2 → 4 pair targets with conjugation symmetry: case-study solver.
    if (m, n, d, l) == (2, 4, 2, 2) {
        if let Some(pairs) = conjugate_symmetric_pairs(&spec) {
            let out = reference_feasibility(&pairs).map_err(|e| anyhow!("{e}"))?;
            println!(
                "{}",
                serde_json::to_string_pretty(&result_json(out.verdict, &out))?
            );
            return Ok(verdict_exit(out.verdict));
        }
        eprintln!(
            "unsupported: (M=2, N=4, L=2) targets must satisfy F_y = F_conj(y) \
             for the case-study solver"
        );
        return Ok(ExitCode::from(3));
    }

    let class = rank1_classification(m, l, n);
    eprintln!(
        "unsupported (M={m}, L={l}, N={n}): no closed-form route; per-site rank-1 \
         elimination for this shape is classified as {class} \
         (Exists for M = 1 or N = M+1; Excluded for N ≤ 2M or even M)"
    );
    Ok(ExitCode::from(3))
}

/// Extract the three pair fidelities when all six weight-2 targets are
/// present and conjugation-symmetric (F_y = F_conj(y) within 1e-9).
fn conjugate_symmetric_pairs(spec: &TargetSpec) -> Option<PairFidelities> {
    let get = |s: &str| -> Option<f64> { spec.approx.get(&s.parse().ok()?).copied() };
    let pairs = [("1100", "0011"), ("1010", "0101"), ("0110", "1001")];
    let mut vals = [0.0f64; 3];
    for (k, (a, b)) in pairs.iter().enumerate() {
        let (fa, fb) = (get(a)?, get(b)?);
        if (fa - fb).abs() > 1e-9 {
            return None;
        }
        vals[k] = fa;
    }
    PairFidelities::new(vals[0], vals[1], vals[2]).ok()
}

// ---------------------------------------------------------------------------
// region
// ---------------------------------------------------------------------------

fn cmd_region(
    mode: &str,
    grid: usize,
    n: Option<usize>,
    d: Option<usize>,
    output: Option<&std::path::Path>,
) -> Result<()> {
    if grid < 2 {
        bail!("need --grid >= 2");
    }
    let mut buf = String::new();
    match mode {
        "one-to-n" => {
            let n = n.ok_or_else(|| anyhow!("--mode one-to-n needs --N"))?;
            let d = d.ok_or_else(|| anyhow!("--mode one-to-n needs --d"))?;
            if n < 2 {
                bail!("need N >= 2");
            }
            region_one_to_n(&mut buf, n, d, grid)?;
        }
        "2to4" => region_2to4(&mut buf, grid),
        other => bail!("unknown mode {other:?}; use one-to-n or 2to4"),
    }
    match output {
        Some(path) => {
            fs::write(path, buf).with_context(|| format!("writing CSV to {}", path.display()))?
        }
        None => std::io::stdout()
            .write_all(buf.as_bytes())
            .context("writing CSV to stdout")?,
    }
    Ok(())
}

/// `F_N` completing the trade-off surface over a grid of the other sites'
/// fidelities; rows with no admissible completion leave the last field empty.
fn region_one_to_n(buf: &mut String, n: usize, d: usize, grid: usize) -> Result<()> {
    let header: Vec<String> = (1..=n).map(|k| format!("F_{k}")).collect();
    buf.push_str(&header.join(","));
    buf.push('\n');
    let floor = 1.0 / (d + 1) as f64;
    let axis: Vec<f64> = (0..grid)
        .map(|i| floor + (1.0 - floor) * i as f64 / (grid - 1) as f64)
        .collect();
    let mut idx = vec![0usize; n - 1];
    loop {
        let known: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        for v in &known {
            buf.push_str(&fmt_sig(*v));
            buf.push(',');
        }
        if let Ok(f_n) = tradeoff_1_to_n(n, d, &known) {
            buf.push_str(&fmt_sig(f_n))
        }
        buf.push('\n');
        // odometer over the (N−1)-dimensional grid, last axis fastest
        let mut k = n - 1;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grid {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Membership grid over the three pair fidelities in [1/2, 1]^3.
fn region_2to4(buf: &mut String, grid: usize) {
    buf.push_str("F_1100,F_1010,F_0110,member,class\n");
    let axis: Vec<f64> = (0..grid)
        .map(|i| 0.5 + 0.5 * i as f64 / (grid - 1) as f64)
        .collect();
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                let (member, class) = match PairFidelities::new(a, b, c) {
                    Ok(p) => region_membership(&p, 1e-6),
                    Err(_) => (false, 0),
                };
                buf.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_sig(a),
                    fmt_sig(b),
                    fmt_sig(c),
                    u8::from(member),
                    class
                ));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(scope: &str) -> ExitCode {
    let reports = match scope {
        "fast" => run_fast().map(|r| vec![r]),
        "full" => run_all(),
        other => {
            eprintln!("error: unknown scope {other:?}; use fast or full");
            return ExitCode::FAILURE;
        }
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut failing = Vec::new();
    for rep in &reports {
        println!("{}", rep.summary_line());
        for line in &rep.details {
            println!("    {line}");
        }
        if !rep.passed {
            failing.push(format!("criterion {} ({})", rep.number, rep.name));
        }
    }
    if failing.is_empty() {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failing: {}", failing.join(", "));
        ExitCode::FAILURE
    }
}
