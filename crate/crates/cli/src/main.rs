//! `ppb`: exact analysis of preperiodic points of polynomial maps
//! over Q.
//!
//! Subcommands: `analyze`, `bound`, `enumerate`, `scan`, `verify`.
//! Every command prints text by default; `--json` switches to a
//! stable, key-sorted schema whose output is byte-identical across
//! runs for identical inputs. The environment variable `PPB_PRECISION`
//! sets the fractional bits carried by real-valued enclosures
//! (default 128); all rational quantities are exact regardless.
//!
//! Exit codes: 0 success, 1 usage or invalid argument, 2 parse error,
//! 3 size guard exceeded, 4 internal invariant violation.

mod parse;
mod report;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};

use ppb_core::arith::is_prime;
use ppb_core::bound::{case1_threshold, theorem_bound, BoundInput, BoundReport};
use ppb_core::capacity::check_capbd;
use ppb_core::preperiodic::{enumerate_preperiodic, scan_quadratic, PreperiodicSet};
use ppb_core::reduction::{arch_radius_exact_quadratic, bad_census, minrad_holds, Census};
use ppb_core::{verify_product_formula, Error, LogAbs, Place, Polynomial, Prime, Rat};

use report::Verification;

#[derive(Parser)]
#[command(
    name = "ppb",
    version,
    about = "Exact preperiodic-point analysis for polynomial maps over Q"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Census of bad places, count bound, enumeration, verification.
    Analyze {
        /// Polynomial in z, e.g. "z^2 - 29/16".
        poly: String,
        /// Emit the stable JSON schema instead of text.
        #[arg(long)]
        json: bool,
        /// Also report which proof case (0-3) the instance lands in.
        #[arg(long)]
        case: bool,
    },
    /// Evaluate the count bound from a polynomial or raw parameters.
    Bound {
        /// Polynomial in z (omit when giving raw parameters).
        poly: Option<String>,
        /// Map degree (raw mode).
        #[arg(long = "d")]
        d: Option<u64>,
        /// Field degree over Q (raw number-field mode).
        #[arg(long = "D")]
        degree: Option<u64>,
        /// Bad places including archimedean ones (raw mode).
        #[arg(long = "s")]
        s: Option<u64>,
        /// Archimedean places (raw number-field mode).
        #[arg(long = "s-inf")]
        s_inf: Option<u64>,
        /// Residue field size; switches to the function-field row.
        #[arg(long = "q")]
        q: Option<u64>,
        /// Emit the stable JSON schema instead of text.
        #[arg(long)]
        json: bool,
    },
    /// List every rational preperiodic point with tail and period.
    Enumerate {
        /// Polynomial in z, e.g. "z^2 - 29/16".
        poly: String,
        /// Emit the stable JSON schema instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Enumerate z^2 + j/den^2 for every integer j with min <= j/den^2 <= max.
    Scan {
        /// Denominator parameter: c runs over j/den^2.
        #[arg(long)]
        den: u64,
        /// Lower endpoint for c (rational, inclusive).
        #[arg(long, allow_hyphen_values = true)]
        min: String,
        /// Upper endpoint for c (rational, inclusive).
        #[arg(long, allow_hyphen_values = true)]
        max: String,
        /// Worker threads; the output does not depend on the value.
        #[arg(long)]
        jobs: Option<usize>,
        /// Emit the stable JSON schema instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run the independent cross-checks on one map.
    Verify {
        /// Polynomial in z, e.g. "z^2 - 29/16".
        poly: String,
        /// Emit the stable JSON schema instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else
            // is a usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Argument(_)) | None => 1,
        Some(Error::Parse { .. }) => 2,
        Some(Error::SizeGuard(_)) => 3,
        Some(Error::Internal(_)) => 4,
    }
}

/// Write a complete report to stdout. A closed pipe (e.g. `| head`)
/// ends the process quietly instead of panicking.
fn emit(s: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(s.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(e.into()),
    }
}

fn precision_bits() -> ppb_core::Result<u32> {
    match std::env::var("PPB_PRECISION") {
        Ok(s) => {
            let v: u32 = s.trim().parse().map_err(|_| {
                Error::arg(format!(
                    "PPB_PRECISION must be a positive integer, got {s:?}"
                ))
            })?;
            if !(16..=65536).contains(&v) {
                return Err(Error::arg(format!(
                    "PPB_PRECISION out of range 16..=65536, got {v}"
                )));
            }
            Ok(v)
        }
        Err(std::env::VarError::NotPresent) => Ok(ppb_core::DEFAULT_PRECISION_BITS),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Error::arg("PPB_PRECISION must be valid unicode"))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let bits = precision_bits()?;
    match cli.cmd {
        Cmd::Analyze { poly, json, case } => cmd_analyze(&poly, json, case, bits),
        Cmd::Bound {
            poly,
            d,
            degree,
            s,
            s_inf,
            q,
            json,
        } => cmd_bound(poly.as_deref(), d, degree, s, s_inf, q, json, bits),
        Cmd::Enumerate { poly, json } => cmd_enumerate(&poly, json, bits),
        Cmd::Scan {
            den,
            min,
            max,
            jobs,
            json,
        } => cmd_scan(den, &min, &max, jobs, json, bits),
        Cmd::Verify { poly, json } => cmd_verify(&poly, json, bits),
    }
}

// ---------------------------------------------------------------------------
// command bodies
// ---------------------------------------------------------------------------

struct Analysis {
    census: Census,
    input: BoundInput,
    bound: BoundReport,
    set: PreperiodicSet,
    verification: Verification,
}

fn analyze_core(phi: &Polynomial, bits: u32) -> ppb_core::Result<Analysis> {
    let census = bad_census(phi)?;
    let input = BoundInput::number_field(phi.degree() as u64, 1, census.s, census.s_inf)?;
    let bound = theorem_bound(&input, bits)?;
    let set = enumerate_preperiodic(phi, bits)?;
    let verification = build_verification(phi, &census, &set, &bound, bits)?;
    Ok(Analysis {
        census,
        input,
        bound,
        set,
        verification,
    })
}

fn build_verification(
    phi: &Polynomial,
    census: &Census,
    set: &PreperiodicSet,
    bound: &BoundReport,
    bits: u32,
) -> ppb_core::Result<Verification> {
    let points: Vec<Rat> = set
        .finite_points
        .iter()
        .map(|(x, _, _)| x.clone())
        .collect();

    // Finite preperiodic points map to finite preperiodic points (the
    // stored list is sorted, so membership is a binary search).
    let forward_invariant = points.iter().all(|x| {
        let y = phi.eval(x);
        points.binary_search(&y).is_ok()
    });

    let count_within_bound = BigUint::from(set.total) <= bound.count_bound;

    // Product formula over the squared product of all differences (a
    // nonzero rational whose factorization stays smooth).
    let product_formula = if points.len() >= 2 {
        let mut delta = Rat::one();
        for (i, x) in points.iter().enumerate() {
            for y in &points[..i] {
                delta *= x - y;
            }
        }
        Some(verify_product_formula(&(&delta * &delta))?)
    } else {
        None
    };

    // The minimal-radius bound needs a rational preperiodic point.
    let mut minimal_radius = Vec::new();
    if !points.is_empty() {
        for r in &census.reports {
            if let (true, Place::Finite(p)) = (r.bad, r.place) {
                minimal_radius.push((p.get(), minrad_holds(phi, r)?));
            }
        }
    }

    // Pairwise-product bound at the archimedean place, every bad
    // prime, and the smallest prime of good reduction.
    let mut pairwise = Vec::new();
    if points.len() >= 2 {
        let mut places = vec![Place::Archimedean];
        for r in &census.reports {
            if let (true, Place::Finite(p)) = (r.bad, r.place) {
                places.push(Place::Finite(p));
            }
        }
        places.push(Place::Finite(first_good_prime(census)?));
        for v in places {
            pairwise.push((v, check_capbd(phi, &points, v, bits)?.holds()));
        }
    }

    Ok(Verification {
        total: set.total,
        count_bound: bound.count_bound.clone(),
        count_within_bound,
        forward_invariant,
        product_formula,
        minimal_radius,
        pairwise,
    })
}

fn first_good_prime(census: &Census) -> ppb_core::Result<Prime> {
    let bad: BTreeSet<u64> = census
        .reports
        .iter()
        .filter(|r| r.bad)
        .filter_map(|r| match r.place {
            Place::Finite(p) => Some(p.get()),
            Place::Archimedean => None,
        })
        .collect();
    let mut p = 2u64;
    loop {
        if is_prime(p) && !bad.contains(&p) {
            return Prime::new(p);
        }
        p += 1;
    }
}

/// Which proof case the instance lands in: 0 when only archimedean
/// places are bad; 1 when some bad place certifiably has radius at or
/// past the case-1 threshold (4 for d = 2, (4 + sqrt 3)/C_d above);
/// otherwise 2 for quadratic maps and 3 for higher degree. At the
/// archimedean place only the exactly-solved family z^2 + c with
/// c <= 0 is ever certified; elsewhere the answer falls through to
/// 2/3, which is always sound to report. Informational only.
fn proof_case(phi: &Polynomial, census: &Census, bits: u32) -> ppb_core::Result<u8> {
    if census.s == census.s_inf {
        return Ok(0);
    }
    let d = phi.degree() as u64;
    let threshold = case1_threshold(d, bits)?;
    for r in &census.reports {
        if !r.bad {
            continue;
        }
        match r.place {
            Place::Finite(p) => {
                let radius = LogAbs::new(p, r.rho.clone().expect("finite report has rho"));
                if radius.cmp_rat(threshold.hi()) != Ordering::Less {
                    return Ok(1);
                }
            }
            Place::Archimedean => {
                if let Some(exact) = arch_radius_exact_quadratic(phi, bits) {
                    if exact.lo() >= threshold.hi() {
                        return Ok(1);
                    }
                }
            }
        }
    }
    Ok(if d == 2 { 2 } else { 3 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    poly: Option<&str>,
    d: Option<u64>,
    degree: Option<u64>,
    s: Option<u64>,
    s_inf: Option<u64>,
    q: Option<u64>,
    json: bool,
    bits: u32,
) -> anyhow::Result<()> {
    let raw_given =
        d.is_some() || degree.is_some() || s.is_some() || s_inf.is_some() || q.is_some();
    let input = match (poly, raw_given) {
        (Some(_), true) => {
            return Err(Error::arg(
                "give either a polynomial or raw --d/--D/--s/--s-inf parameters, not both",
            )
            .into());
        }
        (Some(text), false) => {
            let phi = parse::parse_poly(text)?;
            let census = bad_census(&phi)?;
            BoundInput::number_field(phi.degree() as u64, 1, census.s, census.s_inf)?
        }
        (None, _) => {
            let d = d.ok_or_else(|| Error::arg("raw mode needs --d"))?;
            let s = s.ok_or_else(|| Error::arg("raw mode needs --s"))?;
            match q {
                Some(q) => {
                    if degree.is_some() || s_inf.is_some() {
                        return Err(
                            Error::arg("function-field input takes --d --s --q only").into()
                        );
                    }
                    BoundInput::function_field(d, s, q)?
                }
                None => {
                    let degree = degree.ok_or_else(|| Error::arg("number-field mode needs --D"))?;
                    let s_inf =
                        s_inf.ok_or_else(|| Error::arg("number-field mode needs --s-inf"))?;
                    BoundInput::number_field(d, degree, s, s_inf)?
                }
            }
        }
    };
    let rep = theorem_bound(&input, bits)?;
    if json {
        emit(&report::render_json(&report::bound_doc(&input, &rep, bits)))
    } else {
        emit(&report::text_bound(&input, &rep))
    }
}

fn cmd_analyze(text: &str, json: bool, case: bool, bits: u32) -> anyhow::Result<()> {
    let phi = parse::parse_poly(text)?;
    let a = analyze_core(&phi, bits)?;
    let case = if case {
        Some(proof_case(&phi, &a.census, bits)?)
    } else {
        None
    };
    let parts = report::AnalyzeParts {
        polynomial: phi.to_string(),
        degree: phi.degree(),
        census: &a.census,
        input: &a.input,
        bound: &a.bound,
        set: &a.set,
        verification: &a.verification,
        case,
    };
    if json {
        emit(&report::render_json(&report::analyze_doc(&parts, bits)))
    } else {
        let mut out = format!("polynomial: {} (degree {})\n", phi, phi.degree());
        out.push_str(&report::text_census(&a.census));
        out.push_str(&report::text_bound(&a.input, &a.bound));
        out.push_str(&report::text_enumeration(&a.set));
        out.push_str(&report::text_verification(&a.verification));
        if let Some(c) = case {
            out.push_str(&format!("case: {c}\n"));
        }
        emit(&out)
    }
}

fn cmd_enumerate(text: &str, json: bool, bits: u32) -> anyhow::Result<()> {
    let phi = parse::parse_poly(text)?;
    let set = enumerate_preperiodic(&phi, bits)?;
    if json {
        emit(&report::render_json(&report::enumerate_doc(
            &phi.to_string(),
            &set,
            bits,
        )))
    } else {
        let mut out = format!("polynomial: {} (degree {})\n", phi, phi.degree());
        out.push_str(&report::text_enumeration(&set));
        emit(&out)
    }
}

/// Largest window of j values a scan will materialize.
const MAX_SCAN_RANGE: i64 = 1_000_000;

fn cmd_scan(
    den: u64,
    min: &str,
    max: &str,
    jobs: Option<usize>,
    json: bool,
    bits: u32,
) -> anyhow::Result<()> {
    if den == 0 {
        return Err(Error::arg("--den must be positive").into());
    }
    let min = parse::parse_rat_arg(min)?;
    let max = parse::parse_rat_arg(max)?;
    if min > max {
        return Err(Error::arg("--min exceeds --max").into());
    }
    let m2 = Rat::from_integer(BigInt::from(den) * BigInt::from(den));
    let j_lo = (&min * &m2).ceil().to_integer();
    let j_hi = (&max * &m2).floor().to_integer();
    if (&j_hi - &j_lo).abs() > BigInt::from(MAX_SCAN_RANGE) {
        return Err(
            Error::SizeGuard(format!("scan window holds more than {MAX_SCAN_RANGE} maps")).into(),
        );
    }
    let (j_lo, j_hi) = (
        j_lo.to_i64().expect("clamped above"),
        j_hi.to_i64().expect("clamped above"),
    );
    if j_lo > j_hi {
        return Err(Error::arg(format!(
            "no integer j satisfies {min} <= j/{den}^2 <= {max}"
        ))
        .into());
    }
    let jobs = jobs.unwrap_or(1).max(1);
    let rows = scan_quadratic(j_lo, j_hi, den, bits, jobs)?;
    let max_finite = rows
        .iter()
        .map(|r| r.finite_count)
        .max()
        .expect("nonempty scan");
    let argmax: Vec<Rat> = rows
        .iter()
        .filter(|r| r.finite_count == max_finite)
        .map(|r| r.c.clone())
        .collect();
    let summary = report::ScanSummary {
        den,
        min,
        max,
        jobs,
        rows,
        max_finite,
        argmax,
    };
    if json {
        emit(&report::render_json(&report::scan_doc(&summary, bits)))
    } else {
        emit(&report::text_scan(&summary))
    }
}

fn cmd_verify(text: &str, json: bool, bits: u32) -> anyhow::Result<()> {
    let phi = parse::parse_poly(text)?;
    let a = analyze_core(&phi, bits)?;
    if json {
        emit(&report::render_json(&report::verify_doc(
            &phi.to_string(),
            &a.verification,
            bits,
        )))
    } else {
        let mut out = format!("polynomial: {} (degree {})\n", phi, phi.degree());
        out.push_str(&report::text_verification(&a.verification));
        emit(&out)
    }
}
