use std::io::{self, IsTerminal, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use serde_json::{json, Value};
use thiserror::Error;

use psl2::bhc::{check_sh, compare, estimate_e, hl_constant, BhcError, PolynomialFamily};
use psl2::heathbrown::{derive_upper_bounds, scan_hb, within_bounds, HbError, CSV_HEADER};
use psl2::invariants::{
    census as formula_census, counts, profile, verify_golden, verify_golden_with, ClassCensus,
    Counts, GoldenError, InvariantError, GOLDEN_COLUMNS,
};
use psl2::oracle::{run_oracle, OracleError, OracleOptions};
use psl2::search::{case_spec, scan, CaseId, ScanOptions, SearchError};

use crate::output::{print_csv, print_json, print_table, real, Format};
use crate::{BhcArgs, CensusArgs, HbArgs, SearchArgs, VerifyArgs};

pub enum Outcome {
    Ok,
    Mismatch,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Failure(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// A closed standard output, as in `psl2 hb | head`.
    pub fn is_broken_pipe(&self) -> bool {
        match self {
            CliError::Io(e) => e.kind() == io::ErrorKind::BrokenPipe,
            CliError::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(e) if e.kind() == io::ErrorKind::BrokenPipe),
            _ => false,
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Failure(_) | CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::NotPrime(_) | InvariantError::TooSmall(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::OutOfRange(_) => CliError::Usage(e.to_string()),
            OracleError::NeedsOptIn(_) => CliError::Usage(format!("{e}; pass --allow-large")),
            OracleError::TooManySubgroups { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<GoldenError> for CliError {
    fn from(e: GoldenError) -> Self {
        match e {
            GoldenError::Invariant(e) => e.into(),
            GoldenError::Oracle(e) => e.into(),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::ThreadPool(_) => CliError::Resource(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BhcError> for CliError {
    fn from(e: BhcError) -> Self {
        match e {
            BhcError::NotConverged { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<HbError> for CliError {
    fn from(e: HbError) -> Self {
        match e {
            HbError::Invariant(e) => e.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type Res = Result<Outcome, CliError>;

fn counts_row(c: &Counts) -> Vec<String> {
    c.as_array().iter().map(u64::to_string).collect()
}

pub fn invariants(p: u64, format: Option<Format>) -> Res {
    if p == 3 {
        eprintln!("note: the formulas need p >= 5; p = 3 comes from the brute-force census");
        let c = run_oracle(3, &OracleOptions::default())?.census()?.counts();
        let header = ["p", "i", "c", "s", "n"];
        let mut row = vec![p.to_string()];
        row.extend(counts_row(&c));
        match format.unwrap_or(Format::Table) {
            Format::Json => print_json(json!({"p": p, "source": "oracle", "i": c.i, "c": c.c, "s": c.s, "n": c.n}))?,
            Format::Csv => print_csv(&header, &[row])?,
            Format::Table => print_table(&header, &[row])?,
        }
        return Ok(Outcome::Ok);
    }
    let pr = profile(p)?;
    let c = counts(&pr)?;
    let mut row: Vec<String> = vec![
        pr.p.to_string(),
        pr.delta.to_string(),
        pr.epsilon.to_string(),
        pr.k.to_string(),
        pr.l.to_string(),
        pr.sigma.to_string(),
        pr.alpha.to_string(),
    ];
    row.extend(counts_row(&c));
    match format.unwrap_or(Format::Table) {
        Format::Json => {
            let mut v = serde_json::to_value(pr).expect("profile serializes");
            let obj = v.as_object_mut().expect("object");
            for (k, x) in [("i", c.i), ("c", c.c), ("s", c.s), ("n", c.n)] {
                obj.insert(k.into(), x.into());
            }
            print_json(v)?
        }
        Format::Csv => print_csv(&GOLDEN_COLUMNS, &[row])?,
        Format::Table => print_table(&GOLDEN_COLUMNS, &[row])?,
    }
    Ok(Outcome::Ok)
}

const CENSUS_HEADER: [&str; 4] = ["label", "order", "classes", "self_normalising"];

fn census_rows(c: &ClassCensus) -> Vec<Vec<String>> {
    c.entries
        .iter()
        .map(|e| {
            vec![
                e.label(),
                e.order().to_string(),
                e.num_classes.to_string(),
                e.self_normalising.to_string(),
            ]
        })
        .collect()
}

fn print_census_table(title: &str, c: &ClassCensus) -> io::Result<()> {
    println!("{title} census, p = {}", c.p);
    print_table(&CENSUS_HEADER, &census_rows(c))?;
    let k = c.counts();
    println!("i = {}  c = {}  s = {}  n = {}", k.i, k.c, k.s, k.n);
    println!("self-normalising: {}", c.self_normalising_labels().join(", "));
    Ok(())
}

fn diff_rows(only: &[(String, u8, bool)], side: &str) -> Vec<Vec<String>> {
    only.iter()
        .map(|(l, n, sn)| vec![side.to_string(), l.clone(), n.to_string(), sn.to_string()])
        .collect()
}

pub fn census(a: &CensusArgs, format: Option<Format>) -> Res {
    let format = format.unwrap_or(Format::Table);
    if !a.oracle {
        if a.lattice {
            return Err(CliError::Usage("--lattice needs --oracle".into()));
        }
        let c = formula_census(a.p)?;
        match format {
            Format::Json => print_json(c.to_json())?,
            Format::Csv => print_csv(&CENSUS_HEADER, &census_rows(&c))?,
            Format::Table => print_census_table("formula", &c)?,
        }
        return Ok(Outcome::Ok);
    }
    let formula = if a.p == 3 { None } else { Some(formula_census(a.p)?) };
    let opts = OracleOptions {
        allow_large: a.allow_large,
        subgroup_cap: a.subgroup_cap,
    };
    let run = run_oracle(a.p, &opts)?;
    let oracle = run.census()?;
    let diff = formula.as_ref().map(|f| f.diff(&oracle));
    let mismatch = diff.as_ref().is_some_and(|d| !d.is_empty());
    match format {
        Format::Json => {
            let mut v = json!({
                "p": a.p,
                "formula": formula.as_ref().map(ClassCensus::to_json),
                "oracle": oracle.to_json(),
                "diff": diff.as_ref().map(|d| json!({
                    "only_formula": d.only_left,
                    "only_oracle": d.only_right,
                })),
            });
            if a.lattice {
                v["lattice"] = run.lattice_json();
            }
            print_json(v)?
        }
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = Vec::new();
            for (source, c) in [("formula", formula.as_ref()), ("oracle", Some(&oracle))] {
                if let Some(c) = c {
                    rows.extend(census_rows(c).into_iter().map(|mut r| {
                        r.insert(0, source.to_string());
                        r
                    }));
                }
            }
            print_csv(&["source", "label", "order", "classes", "self_normalising"], &rows)?
        }
        Format::Table => {
            if let Some(f) = &formula {
                print_census_table("formula", f)?;
                println!();
            }
            print_census_table("brute-force", &oracle)?;
            if let Some(d) = &diff {
                println!();
                if d.is_empty() {
                    println!("diff: none");
                } else {
                    println!("diff:");
                    let mut rows = diff_rows(&d.only_left, "formula only");
                    rows.extend(diff_rows(&d.only_right, "oracle only"));
                    print_table(&["side", "label", "classes", "self_normalising"], &rows)?;
                }
            }
        }
    }
    Ok(if mismatch { Outcome::Mismatch } else { Outcome::Ok })
}

pub fn verify_table(a: &VerifyArgs, format: Option<Format>) -> Res {
    let report = if a.oracle_rows {
        verify_golden_with(&[3, 5, 7, 11, 13])?
    } else {
        verify_golden()?
    };
    let mismatches = report.mismatches().len();
    let known = report.known_issues().len();
    let cell = |c: &psl2::invariants::CellCheck| {
        vec![
            c.p.to_string(),
            c.column.to_string(),
            c.printed.to_string(),
            c.computed.to_string(),
            json_str(&c.source),
            json_str(&c.status),
        ]
    };
    match format.unwrap_or(Format::Table) {
        Format::Json => print_json(json!({
            "formula_rows": report.formula_rows(),
            "oracle_rows": report.oracle_rows(),
            "known_issues": report.known_issues(),
            "mismatches": report.mismatches(),
            "cells": report.cells,
        }))?,
        Format::Csv => print_csv(
            &["p", "column", "printed", "computed", "source", "status"],
            &report.cells.iter().map(cell).collect::<Vec<_>>(),
        )?,
        Format::Table => {
            let mut rows = Vec::new();
            for source in ["formula", "oracle"] {
                let ps = if source == "formula" { report.formula_rows() } else { report.oracle_rows() };
                for p in ps {
                    let cells: Vec<_> = report
                        .cells
                        .iter()
                        .filter(|c| c.p == p && json_str(&c.source) == source)
                        .collect();
                    let notes: Vec<String> = cells
                        .iter()
                        .filter(|c| c.printed != c.computed)
                        .map(|c| {
                            format!("{} {}: printed {}, computed {}", json_str(&c.status), c.column, c.printed, c.computed)
                        })
                        .collect();
                    let status = if notes.is_empty() { "match".to_string() } else { notes.join("; ") };
                    rows.push(vec![p.to_string(), source.to_string(), cells.len().to_string(), status]);
                }
            }
            print_table(&["p", "source", "cells", "status"], &rows)?;
            println!(
                "{} formula rows, {} brute-force rows, {} known issue(s), {} mismatch(es)",
                report.formula_rows().len(),
                report.oracle_rows().len(),
                known,
                mismatches
            );
        }
    }
    let bad = mismatches > 0 || (a.strict && known > 0);
    Ok(if bad { Outcome::Mismatch } else { Outcome::Ok })
}

fn json_str<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v).expect("serializes") {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn parse_case(s: &str) -> Result<CaseId, CliError> {
    Ok(s.parse::<CaseId>()?)
}

pub fn search(a: &SearchArgs, format: Option<Format>) -> Res {
    let spec = case_spec(parse_case(&a.case)?);
    let opts = ScanOptions {
        block_size: a.block_size,
        hit_cap: a.hit_cap,
        ..ScanOptions::default()
    };
    let tty = io::stderr().is_terminal();
    let step = if tty { 1 } else { 10 };
    let last = AtomicU64::new(0);
    let progress = |done: u64, total: u64| {
        let pct = done * 100 / total / step * step;
        if last.fetch_max(pct, Ordering::Relaxed) < pct {
            if tty {
                eprint!("\rcase {}: {pct}%", spec.case.as_str());
                if pct == 100 {
                    eprintln!();
                }
            } else {
                eprintln!("case {}: {pct}%", spec.case.as_str());
            }
        }
    };
    let cb: Option<&(dyn Fn(u64, u64) + Sync)> = if a.quiet { None } else { Some(&progress) };
    let summary = scan(&spec, a.t_max, &opts, cb)?;
    let hit_row = |h: &psl2::search::TripleHit| {
        let mut r = vec![h.t.to_string(), h.p.to_string(), h.s.to_string(), h.r.to_string()];
        r.extend(h.attains.iter().map(bool::to_string));
        r
    };
    let hit_header = ["t", "p", "s", "r", "attains_i", "attains_c", "attains_s", "attains_n"];
    match format.unwrap_or(Format::Table) {
        Format::Json => print_json(summary.to_json())?,
        Format::Csv => print_csv(&hit_header, &summary.hits.iter().map(hit_row).collect::<Vec<_>>())?,
        Format::Table => {
            println!("case {}: {}", spec.case.as_str(), spec.family);
            print_table(
                &["t_max", "q_count", "hits", "sigma_alpha_zero", "attaining"],
                &[vec![
                    summary.t_max.to_string(),
                    summary.q_count.to_string(),
                    summary.hit_count.to_string(),
                    summary.sigma_alpha_zero_count.to_string(),
                    summary.attaining_count.to_string(),
                ]],
            )?;
            if !summary.small_hits.is_empty() {
                println!();
                println!("triples with p <= {}:", spec.p_floor);
                let rows: Vec<Vec<String>> = summary
                    .small_hits
                    .iter()
                    .map(|&(t, p, s, r)| vec![t.to_string(), p.to_string(), s.to_string(), r.to_string()])
                    .collect();
                print_table(&hit_header[..4], &rows)?;
            }
            if !summary.hits.is_empty() && a.show > 0 {
                println!();
                println!("first hits:");
                let rows: Vec<Vec<String>> = summary.hits.iter().take(a.show).map(hit_row).collect();
                print_table(&hit_header, &rows)?;
            }
        }
    }
    Ok(Outcome::Ok)
}

fn parse_real(name: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--{name}: expected a number, got {s:?}")))
}

pub fn bhc(a: &BhcArgs, format: Option<Format>) -> Res {
    let family: PolynomialFamily = match (&a.case, &a.family) {
        (Some(c), None) => case_spec(parse_case(c)?).family,
        (None, Some(f)) => f.parse()?,
        _ => return Err(CliError::Usage("give a case or --family".into())),
    };
    let x = parse_real("x", &a.x)?;
    let trunc = parse_real("trunc", &a.trunc)?;
    if trunc < 0.0 || trunc.fract() != 0.0 || trunc > u64::MAX as f64 {
        return Err(CliError::Usage(format!("--trunc must be a whole number, got {}", a.trunc)));
    }
    let report = check_sh(&family)?;
    if !report.passes() {
        return Err(BhcError::ConditionsFail(report).into());
    }
    let q = match &a.q_file {
        Some(path) => Some(read_q_file(path, &family, x)?),
        None => None,
    };
    let constant = hl_constant(&family, trunc as u64)?;
    let est = estimate_e(&family, x, &constant)?;
    let rel = q.map(|q| compare(q, est.e_value)).transpose()?;
    let mut v = serde_json::to_value(&est).expect("estimate serializes");
    if let (Some(q), Some(rel)) = (q, rel) {
        v["q_count"] = q.into();
        v["relative_error"] = rel.into();
    }
    match format.unwrap_or(Format::Table) {
        Format::Json => print_json(v)?,
        Format::Csv | Format::Table => {
            let mut keys = vec!["family", "x", "a", "P", "C", "integral", "E", "tail_bound"];
            if q.is_some() {
                keys.extend(["q_count", "relative_error"]);
            }
            let cell = |k: &str| match k {
                "family" => family.to_string(),
                _ => match &v[k] {
                    Value::Number(n) if n.is_f64() => real(n.as_f64().expect("f64")),
                    other => other.to_string(),
                },
            };
            if format == Some(Format::Csv) {
                print_csv(&keys, &[keys.iter().map(|k| cell(k)).collect()])?;
            } else {
                let rows: Vec<Vec<String>> = keys.iter().map(|k| vec![k.to_string(), cell(k)]).collect();
                print_table(&["key", "value"], &rows)?;
            }
        }
    }
    Ok(Outcome::Ok)
}

/// Reads `q_count` from a `search --format json` file after checking it
/// belongs to the same family and x.
fn read_q_file(path: &std::path::Path, family: &PolynomialFamily, x: f64) -> Result<u64, CliError> {
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let case = v["case"].as_str().ok_or_else(|| bad("no case".into()))?;
    let t_max = v["t_max"].as_u64().ok_or_else(|| bad("no t_max".into()))?;
    let q = v["q_count"].as_u64().ok_or_else(|| bad("no q_count".into()))?;
    if case_spec(parse_case(case)?).family != *family {
        return Err(bad(format!("case {case} does not match the family {family}")));
    }
    if t_max as f64 != x {
        return Err(bad(format!("t_max = {t_max} does not match x = {}", real(x))));
    }
    Ok(q)
}

pub fn hb(a: &HbArgs, format: Option<Format>) -> Res {
    let bounds = derive_upper_bounds();
    let found = scan_hb(a.limit)?;
    let over: Vec<u64> = found
        .iter()
        .filter(|c| !within_bounds(&c.counts().expect("qualifying primes have counts"), &bounds))
        .map(|c| c.p)
        .collect();
    match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            // rows come preformatted from the library, all fields numeric
            let mut out = io::stdout().lock();
            writeln!(out, "{CSV_HEADER}")?;
            for c in &found {
                writeln!(out, "{}", c.csv_row())?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = found
                .iter()
                .map(|c| {
                    let k = c.counts().expect("qualifying primes have counts");
                    json!({
                        "p": c.p,
                        "omega_minus": c.omega_minus,
                        "omega_plus": c.omega_plus,
                        "i": k.i, "c": k.c, "s": k.s, "n": k.n,
                    })
                })
                .collect();
            print_json(json!({
                "limit": a.limit,
                "bounds": bounds,
                "count": found.len(),
                "exceeding": over,
                "candidates": rows,
            }))?
        }
        Format::Table => {
            let header: Vec<&str> = CSV_HEADER.split(',').collect();
            let rows: Vec<Vec<String>> = found
                .iter()
                .map(|c| c.csv_row().split(',').map(str::to_string).collect())
                .collect();
            print_table(&header, &rows)?;
            println!(
                "{} qualifying primes up to {}; bounds (i, c, s, n) <= ({}, {}, {}, {}); {} exceed them",
                found.len(),
                a.limit,
                bounds.i,
                bounds.c,
                bounds.s,
                bounds.n,
                over.len()
            );
        }
    }
    if !over.is_empty() {
        eprintln!("primes exceeding the bounds: {over:?}");
        return Ok(Outcome::Mismatch);
    }
    Ok(Outcome::Ok)
}
