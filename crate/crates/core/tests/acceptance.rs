//! Acceptance checks, one line each. Run the long scans with
//! `cargo test --test acceptance -- --include-ignored` or `PSL2_EXTENDED=1`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use psl2::arith::{big_omega, is_prime, primes_in_range, primes_upto, tau};
use psl2::bhc::{compare, estimate_e, hl_constant, omega_brute, omega_formula};
use psl2::heathbrown::{derive_upper_bounds, scan_hb, within_bounds};
use psl2::invariants::{census, counts, golden_table, profile, verify_golden};
use psl2::oracle::{oracle_census, OracleOptions};
use psl2::search::{case_spec, scan, CaseId, ScanOptions};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn golden() -> Check {
    let report = verify_golden().map_err(|e| e.to_string())?;
    let bad = report.mismatches();
    ensure(bad.is_empty(), format!("mismatched cells: {bad:?}"))?;
    let rows: Vec<u64> = report.formula_rows();
    let expected: Vec<u64> = golden_table().iter().map(|r| r.p).filter(|&p| p >= 5).collect();
    ensure(rows == expected, format!("formula rows {rows:?}"))?;
    let issues = report.known_issues();
    ensure(
        issues.len() == 1
            && (issues[0].p, issues[0].column, issues[0].printed, issues[0].computed)
                == (7, "c", 14, 13),
        format!("known issues {issues:?}"),
    )?;
    Ok(format!("{} cells, only (7, c) flagged: printed 14, computed 13", report.cells.len()))
}

fn example_37() -> Check {
    let c = census(37).map_err(|e| e.to_string())?;
    let got = c.counts().as_array();
    ensure(got == [19, 21, 5, 16], format!("counts {got:?}"))?;
    let formula = counts(&profile(37).unwrap()).unwrap().as_array();
    ensure(formula == got, format!("formula counts {formula:?}"))?;
    let sn: BTreeSet<String> = c.self_normalising_labels().into_iter().collect();
    let want: BTreeSet<String> = ["D19", "D6", "D18", "E37:C18", "A4"].map(String::from).into();
    ensure(sn == want, format!("self-normalising {sn:?}"))?;
    Ok("(19, 21, 5, 16), self-normalising {D19, D6, D18, E37:C18, A4}".into())
}

fn oracle() -> Check {
    for p in [3u64, 5, 7, 11, 13] {
        let brute = oracle_census(p, &OracleOptions::default()).map_err(|e| e.to_string())?;
        let row = golden_table().iter().find(|r| r.p == p).unwrap();
        let c = if p == 7 { 13 } else { row.c };
        let got = brute.counts().as_array();
        ensure(got == [row.i, c, row.s, row.n], format!("p = {p}: {got:?}"))?;
        if p >= 5 {
            let diff = brute.diff(&census(p).unwrap());
            ensure(diff.is_empty(), format!("p = {p}: {diff:?}"))?;
        }
    }
    Ok("aggregates for 3, 5, 7, 11, 13; censuses equal for 5, 7, 11, 13".into())
}

fn sweep() -> Check {
    let primes = primes_in_range(5, 100_000).map_err(|e| e.to_string())?;
    for &p in &primes {
        let c = counts(&profile(p).unwrap()).map_err(|e| format!("p = {p}: {e}"))?;
        ensure(c.c == c.s + c.n, format!("p = {p}: c != s + n"))?;
        ensure(p < 29 || c.i >= 17, format!("p = {p}: i = {}", c.i))?;
        ensure(p < 23 || c.c >= 18, format!("p = {p}: c = {}", c.c))?;
        ensure(p < 41 || c.s >= 6, format!("p = {p}: s = {}", c.s))?;
        ensure(p < 23 || c.n >= 12, format!("p = {p}: n = {}", c.n))?;
    }
    Ok(format!("{} primes up to 1e5", primes.len()))
}

fn search() -> Check {
    let opts = ScanOptions {
        hit_cap: usize::MAX,
        ..ScanOptions::default()
    };
    let b = scan(&case_spec(CaseId::B), 10_000, &opts, None).map_err(|e| e.to_string())?;
    let first = b.hits.first().ok_or("no case b hits")?;
    ensure(
        (first.t, first.p, first.s, first.r) == (3, 43, 11, 7),
        format!("first case b hit {first:?}"),
    )?;
    let a = scan(&case_spec(CaseId::A), 10_000, &opts, None).map_err(|e| e.to_string())?;
    let h173 = a.hits.iter().find(|h| h.p == 173).ok_or("no p = 173")?;
    ensure((h173.r, h173.s) == (43, 29), format!("p = 173 hit {h173:?}"))?;
    let small29 = a.small_hits.iter().find(|h| h.1 == 29).ok_or("no p = 29")?;
    let prof29 = profile(small29.1).unwrap();
    ensure(prof29.alpha == 1, "p = 29 should have alpha = 1")?;
    let att29 = counts(&prof29).unwrap().as_array() == [17, 18, 6, 12];
    ensure(!att29, "p = 29 should not attain")?;
    for s in [&a, &b] {
        for h in &s.hits {
            ensure(h.p > 37 && h.attains_all(), format!("case {} p = {} fails", s.case, h.p))?;
        }
    }
    Ok(format!(
        "b first hit (3, 43, 11, 7); a has 173 and non-attaining 29; {} + {} hits attain",
        a.hits.len(),
        b.hits.len()
    ))
}

fn bhc_numeric() -> Check {
    let mut out = Vec::new();
    for (case, printed) in [(CaseId::A, 615_580.7), (CaseId::B, 615_580.6)] {
        let f = case_spec(case).family;
        let c = hl_constant(&f, 10_000_000).map_err(|e| e.to_string())?;
        let e = estimate_e(&f, 1e9, &c).map_err(|e| e.to_string())?;
        let rel = (e.e_value - printed) / printed;
        ensure(rel.abs() < 5e-4, format!("case {case}: E = {} vs {printed}", e.e_value))?;
        out.push(format!("E_{case} = {:.1}", e.e_value));
    }
    Ok(out.join(", "))
}

fn bhc_fallback() -> Check {
    // committed from a separate trial-division loop
    let mut out = Vec::new();
    for (case, q) in [(CaseId::A, 2064u64), (CaseId::B, 2051)] {
        let spec = case_spec(case);
        let s = scan(&spec, 1_000_000, &ScanOptions::default(), None).map_err(|e| e.to_string())?;
        ensure(s.q_count == q, format!("case {case}: Q = {} vs {q}", s.q_count))?;
        let c = hl_constant(&spec.family, 10_000_000).map_err(|e| e.to_string())?;
        let e = estimate_e(&spec.family, 1e6, &c).map_err(|e| e.to_string())?;
        let rel = compare(q, e.e_value).unwrap();
        ensure(rel.abs() < 0.05, format!("case {case}: E/Q - 1 = {rel}"))?;
        out.push(format!("Q_{case}(1e6) = {q}, E/Q - 1 = {:+.3}%", 100.0 * rel));
    }
    Ok(out.join(", "))
}

fn bhc_extended() -> Check {
    let mut out = Vec::new();
    for (case, q, printed_pct) in [(CaseId::A, 614_423u64, 0.188), (CaseId::B, 615_369, 0.034)] {
        let spec = case_spec(case);
        let s = scan(&spec, 1_000_000_000, &ScanOptions::default(), None)
            .map_err(|e| e.to_string())?;
        ensure(s.q_count == q, format!("case {case}: Q = {} vs {q}", s.q_count))?;
        let c = hl_constant(&spec.family, 10_000_000).map_err(|e| e.to_string())?;
        let e = estimate_e(&spec.family, 1e9, &c).map_err(|e| e.to_string())?;
        let pct = 100.0 * compare(q, e.e_value).unwrap();
        ensure(
            (pct - printed_pct).abs() <= 0.002,
            format!("case {case}: {pct:+.4}% vs {printed_pct:+}%"),
        )?;
        out.push(format!("Q_{case}(1e9) = {q}, {pct:+.4}%"));
    }
    Ok(out.join(", "))
}

fn heath_brown() -> Check {
    let bounds = derive_upper_bounds();
    ensure(
        bounds.as_array() == [390, 454, 132, 384],
        format!("bounds {:?}", bounds.as_array()),
    )?;
    let v = scan_hb(1_000_000).map_err(|e| e.to_string())?;
    for c in &v {
        let pr = c.profile.ok_or("missing profile")?;
        ensure((pr.sigma, pr.k, pr.l) == (0, 0, 1), format!("p = {}", c.p))?;
        ensure(within_bounds(&c.counts().unwrap(), &bounds), format!("p = {} exceeds", c.p))?;
    }
    Ok(format!("(390, 454, 132, 384); {} qualifying primes up to 1e6 within", v.len()))
}

fn properties() -> Check {
    let mut sieve = vec![false; 100_001];
    for p in primes_upto(100_000) {
        sieve[p as usize] = true;
    }
    for n in 1..=100_000u64 {
        ensure(is_prime(n) == sieve[n as usize], format!("primality at {n}"))?;
        let divisors = (1..=n.isqrt()).filter(|d| n % d == 0).count() as u64;
        let naive_tau = 2 * divisors - u64::from(n.isqrt() * n.isqrt() == n);
        ensure(tau(n).unwrap() == naive_tau, format!("tau({n})"))?;
        let (mut m, mut k, mut d) = (n, 0u32, 2u64);
        while d * d <= m {
            while m % d == 0 {
                m /= d;
                k += 1;
            }
            d += 1;
        }
        k += u32::from(m > 1);
        ensure(big_omega(n).unwrap() == k, format!("Omega({n})"))?;
    }
    for case in CaseId::ALL {
        let f = case_spec(case).family;
        for p in primes_upto(97) {
            ensure(
                omega_formula(&f, p).unwrap() == omega_brute(&f, p),
                format!("omega case {case} p = {p}"),
            )?;
        }
    }
    for case in [CaseId::A, CaseId::B] {
        let f = case_spec(case).family;
        for p in [10_000u64, 100_000, 1_000_000] {
            let c1 = hl_constant(&f, p).unwrap();
            let c2 = hl_constant(&f, 2 * p).unwrap();
            ensure(
                (c2.value - c1.value).abs() < c1.tail_bound_estimate,
                format!("constant at P = {p} moved by {}", (c2.value - c1.value).abs()),
            )?;
        }
    }
    let spec = case_spec(CaseId::A);
    let base = scan(&spec, 100_000, &ScanOptions::default(), None).unwrap();
    for threads in [1, 2, 4] {
        let opts = ScanOptions {
            threads: Some(threads),
            block_size: 3_001,
            ..ScanOptions::default()
        };
        ensure(
            scan(&spec, 100_000, &opts, None).unwrap() == base,
            format!("scan differs with {threads} threads"),
        )?;
    }
    Ok("arith to 1e5, omega to 97, constant at 1e4..1e6, scan over 1/2/4 threads".into())
}

/// id, name, time budget, check
type Criterion = (&'static str, &'static str, Duration, fn() -> Check);

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let extended = args.iter().any(|a| a == "--include-ignored" || a == "--ignored")
        || std::env::var("PSL2_EXTENDED").is_ok_and(|v| v == "1");

    let secs = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        ("1", "golden table", secs(1), golden),
        ("2", "p = 37 census", secs(1), example_37),
        ("3", "oracle equivalence", secs(120), oracle),
        ("4", "lower-bound sweep", secs(10), sweep),
        ("5", "triple search", secs(5), search),
        ("6", "E(1e9) estimates", secs(300), bhc_numeric),
        ("7", "Q(1e6) fallback", secs(300), bhc_fallback),
        ("7x", "Q(1e9) extended", secs(3600), bhc_extended),
        ("8", "Heath-Brown bounds", secs(60), heath_brown),
        ("9", "property suites", secs(600), properties),
    ];

    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        if id == "7x" && !extended {
            println!("criterion {id:<3} {name:<20} SKIP  opt-in: --include-ignored or PSL2_EXTENDED=1");
            continue;
        }
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            if took <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.2?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(msg) => println!("criterion {id:<3} {name:<20} PASS  {took:>9.2?}  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:<3} {name:<20} FAIL  {took:>9.2?}  {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
