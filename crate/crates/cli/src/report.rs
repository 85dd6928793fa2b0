//! Report rendering: a stable, key-sorted JSON schema and a compact
//! text form for each subcommand.
//!
//! JSON conventions: exact rationals appear as `"a/b"` strings (bare
//! `"n"` when integral), radius exponents as `"p^(a/b)"`, real-valued
//! enclosures as `{lo, hi, decimal_hi}` where `decimal_hi` is the
//! upper endpoint rounded up to [`DECIMAL_DIGITS`] places. Keys are
//! emitted sorted, so output for identical inputs is byte-identical.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use ppb_core::bound::{BoundInput, BoundReport, BoundRow, FieldKind};
use ppb_core::interval::decimal_ceil_string;
use ppb_core::preperiodic::{PreperiodicSet, ScanRecord};
use ppb_core::reduction::Census;
use ppb_core::{Interval, Place, Prime, Rat};

/// Fractional digits in decimal renderings of interval endpoints.
pub const DECIMAL_DIGITS: u32 = 6;

pub fn rat_str(q: &Rat) -> String {
    q.to_string()
}

/// Radius-style quantity as a power of p with rational exponent.
pub fn pow_str(p: Prime, e: &Rat) -> String {
    format!("{}^({})", p.get(), e)
}

fn interval_value(iv: &Interval) -> Value {
    json!({
        "lo": rat_str(iv.lo()),
        "hi": rat_str(iv.hi()),
        "decimal_hi": decimal_ceil_string(iv.hi(), DECIMAL_DIGITS),
    })
}

fn row_name(row: BoundRow) -> &'static str {
    match row {
        BoundRow::FunctionFieldS0 => "function_field_s0",
        BoundRow::ArchOnly => "arch_only",
        BoundRow::SmallT => "small_t",
        BoundRow::General => "general",
    }
}

fn input_value(input: &BoundInput) -> Value {
    match input.field() {
        FieldKind::NumberField { degree } => json!({
            "kind": "number_field",
            "d": input.d(),
            "degree": degree,
            "s": input.s(),
            "s_inf": input.s_inf(),
        }),
        FieldKind::FunctionField { q } => json!({
            "kind": "function_field",
            "d": input.d(),
            "s": input.s(),
            "q": q,
        }),
    }
}

fn bound_fragment(input: &BoundInput, rep: &BoundReport) -> Value {
    json!({
        "input": input_value(input),
        "row": row_name(rep.row),
        "sigma": rat_str(&rep.sigma),
        "beta": rep.beta,
        "t": interval_value(&rep.t),
        "m": interval_value(&rep.m),
        "count_bound": rep.count_bound.to_string(),
        "flagged": rep.flagged,
    })
}

fn census_value(census: &Census) -> Value {
    let places: Vec<Value> = census
        .reports
        .iter()
        .map(|r| {
            let mut v = Map::new();
            v.insert("place".into(), json!(r.place.to_string()));
            v.insert("bad".into(), json!(r.bad));
            if let (Place::Finite(p), Some(rho)) = (r.place, &r.rho) {
                v.insert("rho".into(), json!(pow_str(p, rho)));
                let rp = r.r_prime_rho.as_ref().expect("finite radius pair");
                v.insert("r_prime_rho".into(), json!(pow_str(p, rp)));
            }
            Value::Object(v)
        })
        .collect();
    json!({
        "s": census.s,
        "s_inf": census.s_inf,
        "places": places,
    })
}

fn enumeration_value(set: &PreperiodicSet) -> Value {
    let pts: Vec<Value> = set
        .finite_points
        .iter()
        .map(|(x, tail, period)| {
            json!({
                "point": rat_str(x),
                "tail": tail,
                "period": period,
            })
        })
        .collect();
    json!({
        "finite_points": pts,
        "finite_count": set.finite_points.len(),
        "includes_infinity": true,
        "total": set.total,
    })
}

/// Outcome of the verify subcommand (also embedded in analyze).
pub struct Verification {
    pub total: u64,
    pub count_bound: BigUint,
    pub count_within_bound: bool,
    pub forward_invariant: bool,
    /// Product formula over the squared difference product; absent
    /// when the map has fewer than two finite preperiodic points.
    pub product_formula: Option<bool>,
    /// One entry per bad finite place, checked only when the map has a
    /// rational preperiodic point.
    pub minimal_radius: Vec<(u64, bool)>,
    pub pairwise: Vec<(Place, bool)>,
}

impl Verification {
    pub fn all_hold(&self) -> bool {
        self.count_within_bound
            && self.forward_invariant
            && self.product_formula.unwrap_or(true)
            && self.minimal_radius.iter().all(|(_, h)| *h)
            && self.pairwise.iter().all(|(_, h)| *h)
    }
}

fn verification_value(v: &Verification) -> Value {
    let minrad: Vec<Value> = v
        .minimal_radius
        .iter()
        .map(|(p, h)| json!({"place": p.to_string(), "holds": h}))
        .collect();
    let pairwise: Vec<Value> = v
        .pairwise
        .iter()
        .map(|(pl, h)| json!({"place": pl.to_string(), "holds": h}))
        .collect();
    json!({
        "count_within_bound": {
            "total": v.total,
            "count_bound": v.count_bound.to_string(),
            "holds": v.count_within_bound,
        },
        "forward_invariance": v.forward_invariant,
        "product_formula": {
            "applicable": v.product_formula.is_some(),
            "holds": v.product_formula.unwrap_or(true),
        },
        "minimal_radius": minrad,
        "pairwise_bound": pairwise,
    })
}

fn doc(schema: &str, bits: u32, fields: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    doc_from_map(schema, bits, m)
}

fn doc_from_map(schema: &str, bits: u32, mut m: Map<String, Value>) -> Value {
    m.insert("schema".into(), json!(schema));
    m.insert("precision_bits".into(), json!(bits));
    Value::Object(m)
}

fn into_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("fragment renderers emit objects"),
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// per-command documents
// ---------------------------------------------------------------------------

pub struct AnalyzeParts<'a> {
    pub polynomial: String,
    pub degree: usize,
    pub census: &'a Census,
    pub input: &'a BoundInput,
    pub bound: &'a BoundReport,
    pub set: &'a PreperiodicSet,
    pub verification: &'a Verification,
    pub case: Option<u8>,
}

pub fn analyze_doc(parts: &AnalyzeParts, bits: u32) -> Value {
    let mut fields = vec![
        ("polynomial", json!(parts.polynomial)),
        ("degree", json!(parts.degree)),
        ("census", census_value(parts.census)),
        ("bound", bound_fragment(parts.input, parts.bound)),
        ("enumeration", enumeration_value(parts.set)),
        ("verification", verification_value(parts.verification)),
    ];
    if let Some(c) = parts.case {
        fields.push(("case", json!(c)));
    }
    doc("ppb.analyze/1", bits, fields)
}

pub fn bound_doc(input: &BoundInput, rep: &BoundReport, bits: u32) -> Value {
    doc_from_map("ppb.bound/1", bits, into_map(bound_fragment(input, rep)))
}

pub fn enumerate_doc(polynomial: &str, set: &PreperiodicSet, bits: u32) -> Value {
    let mut m = into_map(enumeration_value(set));
    m.insert("polynomial".into(), json!(polynomial));
    doc_from_map("ppb.enumerate/1", bits, m)
}

pub struct ScanSummary {
    pub den: u64,
    pub min: Rat,
    pub max: Rat,
    pub jobs: usize,
    pub rows: Vec<ScanRecord>,
    pub max_finite: u64,
    pub argmax: Vec<Rat>,
}

pub fn scan_doc(s: &ScanSummary, bits: u32) -> Value {
    let rows: Vec<Value> = s
        .rows
        .iter()
        .map(|r| {
            json!({
                "j": r.j,
                "c": rat_str(&r.c),
                "finite": r.finite_count,
                "total": r.total_count,
            })
        })
        .collect();
    doc(
        "ppb.scan/1",
        bits,
        vec![
            ("den", json!(s.den)),
            ("min", json!(rat_str(&s.min))),
            ("max", json!(rat_str(&s.max))),
            ("jobs", json!(s.jobs)),
            ("rows", json!(rows)),
            ("max_finite", json!(s.max_finite)),
            (
                "argmax",
                json!(s.argmax.iter().map(rat_str).collect::<Vec<_>>()),
            ),
        ],
    )
}

pub fn verify_doc(polynomial: &str, v: &Verification, bits: u32) -> Value {
    doc(
        "ppb.verify/1",
        bits,
        vec![
            ("polynomial", json!(polynomial)),
            ("checks", verification_value(v)),
            ("all_hold", json!(v.all_hold())),
        ],
    )
}

// ---------------------------------------------------------------------------
// text forms
// ---------------------------------------------------------------------------

pub fn text_census(census: &Census) -> String {
    let bad: Vec<String> = census
        .reports
        .iter()
        .filter(|r| r.bad)
        .map(|r| r.place.to_string())
        .collect();
    let mut out = format!(
        "bad places: {} (s = {}, s_inf = {})\n",
        bad.join(", "),
        census.s,
        census.s_inf
    );
    for r in &census.reports {
        if let (Place::Finite(p), Some(rho)) = (r.place, &r.rho) {
            let rp = r.r_prime_rho.as_ref().expect("finite radius pair");
            let verdict = if r.bad { "bad" } else { "potentially good" };
            let _ = writeln!(
                out,
                "  {}: {}, r = {}, r' = {}",
                p.get(),
                verdict,
                pow_str(p, rho),
                pow_str(p, rp)
            );
        }
    }
    out
}

pub fn text_bound(input: &BoundInput, rep: &BoundReport) -> String {
    let input_desc = match input.field() {
        FieldKind::NumberField { degree } => format!(
            "d = {}, degree = {}, s = {}, s_inf = {}",
            input.d(),
            degree,
            input.s(),
            input.s_inf()
        ),
        FieldKind::FunctionField { q } => {
            format!(
                "function field, d = {}, s = {}, q = {}",
                input.d(),
                input.s(),
                q
            )
        }
    };
    let mut out = format!("input: {input_desc}\n");
    let _ = writeln!(
        out,
        "row {}, sigma = {}, beta = {}, t in [{}, {}]",
        row_name(rep.row),
        rep.sigma,
        rep.beta,
        rep.t.lo(),
        rep.t.hi()
    );
    let _ = writeln!(
        out,
        "M in [{}, {}] (<= {}), count bound {}{}",
        rep.m.lo(),
        rep.m.hi(),
        decimal_ceil_string(rep.m.hi(), DECIMAL_DIGITS),
        rep.count_bound,
        if rep.flagged { ", flagged" } else { "" }
    );
    out
}

pub fn text_enumeration(set: &PreperiodicSet) -> String {
    let mut out = format!(
        "preperiodic points: {} finite, {} total with infinity\n",
        set.finite_points.len(),
        set.total
    );
    for (x, tail, period) in &set.finite_points {
        let _ = writeln!(out, "  {x}  tail {tail}  period {period}");
    }
    out
}

pub fn text_verification(v: &Verification) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "count within bound: {} ({} <= {})",
        v.count_within_bound, v.total, v.count_bound
    );
    let _ = writeln!(out, "forward invariance: {}", v.forward_invariant);
    match v.product_formula {
        Some(h) => {
            let _ = writeln!(out, "product formula on difference product: {h}");
        }
        None => {
            let _ = writeln!(out, "product formula: not applicable (< 2 finite points)");
        }
    }
    for (p, h) in &v.minimal_radius {
        let _ = writeln!(out, "minimal radius at {p}: {h}");
    }
    for (pl, h) in &v.pairwise {
        let _ = writeln!(out, "pairwise bound at {pl}: {h}");
    }
    let _ = writeln!(out, "all checks hold: {}", v.all_hold());
    out
}

pub fn text_scan(s: &ScanSummary) -> String {
    let mut out = String::new();
    for r in &s.rows {
        let _ = writeln!(
            out,
            "j = {}  c = {}  finite = {}  total = {}",
            r.j, r.c, r.finite_count, r.total_count
        );
    }
    let _ = writeln!(
        out,
        "max finite count {} attained at c in {{{}}}",
        s.max_finite,
        s.argmax.iter().map(rat_str).collect::<Vec<_>>().join(", ")
    );
    out
}
