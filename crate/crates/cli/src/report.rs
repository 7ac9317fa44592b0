//! JSON and plain-text rendering of analysis results. JSON objects are
//! emitted with sorted keys so identical inputs produce byte-identical
//! output; every document carries "schema": 1.

use serde_json::{json, Value};

use plateau_core::sss::{AccessStructure, CoverageReport, SchemeCtx};
use plateau_core::theory::DualDistance;
use plateau_core::walsh::{FunctionType, PlateauProfile};

use crate::pipeline::{regularity_string, ConstructionOutcome, PredictionStatus};

pub const SCHEMA: u32 = 1;

pub fn function_json(p: u32, n: u32, poly: Option<&str>, source: &str) -> Value {
    json!({
        "p": p,
        "n": n,
        "poly": poly,
        "source": source,
    })
}

fn type_string(t: FunctionType) -> &'static str {
    match t {
        FunctionType::Plus => "plus",
        FunctionType::Minus => "minus",
        FunctionType::Balanced => "balanced",
    }
}

pub fn profile_json(profile: &PlateauProfile) -> Value {
    let dual = profile.dual.as_ref();
    json!({
        "s": profile.s(),
        "support_size": profile.support().len(),
        "k": profile.k(),
        "type": type_string(profile.type_of_f()),
        "eps0": profile.eps0(),
        "regularity": regularity_string(profile.regularity()),
        "nwr_witness": profile.non_weakly_regular_witness().map(|(a, b)| json!([a, b])),
        "nwrf_t": profile.nwrf_t,
        "dual_h": profile.dual_h,
        "dual_bent": dual.is_some(),
        "dual_side_of_zero": profile.dual_side_of_zero(),
        "dual_type": dual.map(|d| type_string(d.type_of_fstar)),
        "dual_involution_ok": dual.map(|d| d.involution_ok),
        "degenerate_regime": profile.n() == 1,
    })
}

fn dual_distance_json(d: DualDistance) -> Value {
    match d {
        DualDistance::Exact(v) => json!(v),
        DualDistance::AtLeastFive => json!(">=5"),
    }
}

pub fn construction_json(outcome: &ConstructionOutcome) -> Value {
    let wd = &outcome.actual;
    let d = wd.min_distance().unwrap_or(0);
    let dual_d = dual_distance_json(outcome.dual.d_dual);
    let prediction = match &outcome.prediction {
        PredictionStatus::Match => json!({"verdict": "match"}),
        PredictionStatus::Mismatch(report) => json!({
            "verdict": "mismatch",
            "weight_deltas": report
                .weight_deltas
                .iter()
                .map(|&(w, a, b)| json!({"weight": w, "actual": a, "predicted": b}))
                .collect::<Vec<_>>(),
        }),
        PredictionStatus::NotApplicable(reason) => json!({
            "verdict": "not-applicable",
            "reason": reason,
        }),
    };
    json!({
        "construction": outcome.kind_name,
        "punctured": outcome.punctured,
        "parameters": [wd.length(), wd.dimension(), d],
        "enumerator": wd.enumerator_string(),
        "distribution": wd.to_json(),
        "prediction": prediction,
        "dual": {
            "parameters": [wd.length(), wd.length() - wd.dimension() as u64, dual_d],
            "low_weights": {
                "a1": outcome.dual.a[0].to_string(),
                "a2": outcome.dual.a[1].to_string(),
                "a3": outcome.dual.a[2].to_string(),
                "a4": outcome.dual.a[3].to_string(),
            },
        },
        "minimality": {
            "minimal": outcome.minimality.minimal,
            "wt_min": outcome.minimality.wt_min,
            "wt_max": outcome.minimality.wt_max,
        },
        "bounds": {
            "singleton_defect": outcome.bounds.singleton_defect,
            "mds": outcome.bounds.mds,
            "amds": outcome.bounds.amds,
            "sphere_packing_ok": outcome.bounds.sphere_packing_ok,
            "packing_optimal": outcome.packing_optimal,
            "packing_almost_optimal": outcome.packing_almost_optimal,
        },
    })
}

pub fn analysis_json(function: Value, profile: Value, construction: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "function": function,
        "profile": profile,
        "construction": construction,
    })
}

pub fn sss_json(
    function: Value,
    construction: &ConstructionOutcome,
    ctx: &SchemeCtx,
    access: &AccessStructure,
    coverage: &CoverageReport,
    list_sets: bool,
) -> Value {
    let mut coverage_rows: Vec<Value> = Vec::new();
    for pc in &coverage.per_participant {
        coverage_rows.push(json!({
            "participant": pc.participant,
            "in_sets": pc.in_sets,
            "parallel_to_secret": pc.parallel_to_secret,
        }));
    }
    let wd = &construction.actual;
    let mut doc = json!({
        "schema": SCHEMA,
        "function": function,
        "construction": {
            "construction": construction.kind_name,
            "punctured": construction.punctured,
            "parameters": [wd.length(), wd.dimension(), wd.min_distance().unwrap_or(0)],
            "d_dual": dual_distance_json(construction.dual.d_dual),
        },
        "participants": access.participants,
        "minimal_access_sets": access.count(),
        "raw_codewords": access.raw_count,
        "filtering_noop": access.filtering_was_noop(),
        "non_minimal_filtered": access.filtered_non_minimal,
        "coverage": coverage_rows,
        "coverage_summary": {
            "total_sets": coverage.total_sets,
            "expect_nonparallel": coverage.expect_nonparallel,
            "d2_consistent": coverage.d2_consistent,
            "t_checks": coverage
                .t_checks
                .iter()
                .map(|t| json!({"t": t.t, "expected": t.expected.to_string(), "ok": t.ok}))
                .collect::<Vec<_>>(),
        },
        "scheme_dimension": ctx.dimension(),
    });
    if list_sets {
        let sets: Vec<Value> = (0..access.count())
            .map(|i| json!(access.set_members(i)))
            .collect();
        doc["sets"] = json!(sets);
    }
    doc
}

pub fn render(value: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        serde_json::to_string(value).expect("serializable")
    }
}

/// Plain-text table for --format text.
pub fn analysis_text(function: &Value, profile: &Value, construction: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "function: p={} n={} {}\n",
        function["p"],
        function["n"],
        function["poly"].as_str().unwrap_or("(table input)")
    ));
    out.push_str(&format!(
        "profile:  s={} k={} type={} regularity={}\n",
        profile["s"], profile["k"], profile["type"], profile["regularity"]
    ));
    out.push_str(&format!(
        "          nwrf_t={} dual_bent={} dual_side_of_zero={}\n",
        profile["nwrf_t"], profile["dual_bent"], profile["dual_side_of_zero"]
    ));
    out.push_str(&format!(
        "code:     {} punctured={} parameters={}\n",
        construction["construction"], construction["punctured"], construction["parameters"]
    ));
    out.push_str(&format!("enumerator: {}\n", construction["enumerator"].as_str().unwrap_or("")));
    out.push_str(&format!(
        "dual:     parameters={} a1..a4=[{} {} {} {}]\n",
        construction["dual"]["parameters"],
        construction["dual"]["low_weights"]["a1"].as_str().unwrap_or("?"),
        construction["dual"]["low_weights"]["a2"].as_str().unwrap_or("?"),
        construction["dual"]["low_weights"]["a3"].as_str().unwrap_or("?"),
        construction["dual"]["low_weights"]["a4"].as_str().unwrap_or("?"),
    ));
    out.push_str(&format!(
        "verdicts: prediction={} minimal={} mds={} amds={} sphere_packing_ok={}\n",
        construction["prediction"]["verdict"],
        construction["minimality"]["minimal"],
        construction["bounds"]["mds"],
        construction["bounds"]["amds"],
        construction["bounds"]["sphere_packing_ok"],
    ));
    out
}
