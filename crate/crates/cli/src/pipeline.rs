//! Shared analysis driver behind the CLI subcommands and the verification
//! suite: build a function table, classify it, materialize a construction,
//! enumerate, predict, and compare.

use std::fmt;

use plateau_core::codes::{
    self, defining_set, first_gen_code, puncture_representatives, verify_prediction, CodeSpec,
    CodesError, MatchReport, OpBudget, Selector,
};
use plateau_core::funcspace::{parse_poly, FunctionTable, ParseError, TableError};
use plateau_core::theory::{
    bound_checks, minimality_check, pless_dual_low_weights, predict_weights, BoundReport,
    ConstructionKind, DualLowWeights, MinimalityReport, PredictionInput, TheoryError,
    WeightDistribution,
};
use plateau_core::walsh::{self, PlateauProfile, Regularity, WalshError};

#[derive(Debug)]
pub enum PipelineError {
    Parse(ParseError),
    Table(TableError),
    Walsh(WalshError),
    Codes(CodesError),
    Theory(TheoryError),
    Sss(plateau_core::sss::SssError),
    Input(String),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Parse(e) => write!(f, "polynomial: {e}"),
            PipelineError::Table(e) => write!(f, "table: {e}"),
            PipelineError::Walsh(e) => write!(f, "classification: {e}"),
            PipelineError::Codes(e) => write!(f, "code construction: {e}"),
            PipelineError::Theory(e) => write!(f, "prediction: {e}"),
            PipelineError::Sss(e) => write!(f, "secret sharing: {e}"),
            PipelineError::Input(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<ParseError> for PipelineError {
    fn from(e: ParseError) -> Self {
        PipelineError::Parse(e)
    }
}

impl From<TableError> for PipelineError {
    fn from(e: TableError) -> Self {
        PipelineError::Table(e)
    }
}

impl From<WalshError> for PipelineError {
    fn from(e: WalshError) -> Self {
        PipelineError::Walsh(e)
    }
}

impl From<CodesError> for PipelineError {
    fn from(e: CodesError) -> Self {
        PipelineError::Codes(e)
    }
}

impl From<TheoryError> for PipelineError {
    fn from(e: TheoryError) -> Self {
        PipelineError::Theory(e)
    }
}

impl From<plateau_core::sss::SssError> for PipelineError {
    fn from(e: plateau_core::sss::SssError) -> Self {
        PipelineError::Sss(e)
    }
}

/// Function source: polynomial text or a pre-baked table.
pub fn build_table(
    p: u32,
    n: u32,
    poly: Option<&str>,
    table_text: Option<&str>,
) -> Result<(FunctionTable, Option<String>), PipelineError> {
    match (poly, table_text) {
        (Some(src), None) => {
            let expr = parse_poly(src, p, n)?;
            Ok((expr.eval_to_table(), Some(expr.to_string())))
        }
        (None, Some(text)) => {
            let table = FunctionTable::parse(text)?;
            if table.p() != p || table.n() != n {
                return Err(PipelineError::Input(format!(
                    "table header {} {} does not match --p {} --n {}",
                    table.p(),
                    table.n(),
                    p,
                    n
                )));
            }
            Ok((table, None))
        }
        _ => Err(PipelineError::Input("exactly one of --poly or --table is required".into())),
    }
}

/// Classified function: spectrum-backed profile with dual and scaling data.
pub fn classify(f: &FunctionTable) -> Result<PlateauProfile, PipelineError> {
    Ok(walsh::analyze(f)?)
}

pub fn regularity_string(r: Regularity) -> &'static str {
    match r {
        Regularity::Regular => "regular",
        Regularity::WeaklyRegular => "weakly-regular",
        Regularity::NonWeaklyRegular => "non-weakly-regular",
    }
}

/// Construction selector as accepted on the command line.
pub fn parse_construction(name: &str) -> Result<ConstructionKind, PipelineError> {
    match name {
        "first-gen" => Ok(ConstructionKind::FirstGen),
        "defset-zero" => Ok(ConstructionKind::DefSetZero),
        "defset-sq" => Ok(ConstructionKind::DefSetSq),
        "defset-nsq" => Ok(ConstructionKind::DefSetNsq),
        other => Err(PipelineError::Input(format!(
            "unknown construction '{other}' (expected first-gen, defset-zero, defset-sq, defset-nsq)"
        ))),
    }
}

/// Outcome of the prediction-vs-enumeration comparison.
#[derive(Debug, Clone)]
pub enum PredictionStatus {
    Match,
    Mismatch(MatchReport),
    NotApplicable(String),
}

impl PredictionStatus {
    pub fn verdict(&self) -> String {
        match self {
            PredictionStatus::Match => "match".into(),
            PredictionStatus::Mismatch(_) => "mismatch".into(),
            PredictionStatus::NotApplicable(reason) => format!("not-applicable: {reason}"),
        }
    }
}

/// Everything the report needs about one constructed code.
#[derive(Debug, Clone)]
pub struct ConstructionOutcome {
    pub kind: ConstructionKind,
    pub kind_name: &'static str,
    pub punctured: bool,
    pub spec: CodeSpec,
    pub actual: WeightDistribution,
    pub predicted: Option<WeightDistribution>,
    pub prediction: PredictionStatus,
    pub dual: DualLowWeights,
    pub minimality: MinimalityReport,
    pub bounds: BoundReport,
    /// Sphere-packing holds at d+1 but fails at d+2: the distance is within
    /// one of what packing allows.
    pub packing_almost_optimal: bool,
    /// Sphere-packing fails already at d+1: d is extremal under packing.
    pub packing_optimal: bool,
}

pub fn kind_name(kind: ConstructionKind) -> &'static str {
    match kind {
        ConstructionKind::FirstGen => "first-gen",
        ConstructionKind::DefSetZero => "defset-zero",
        ConstructionKind::DefSetSq => "defset-sq",
        ConstructionKind::DefSetNsq => "defset-nsq",
    }
}

/// Build the code, enumerate it exhaustively, attach the closed-form
/// prediction (when its hypotheses hold), and run the dual/minimality/bound
/// analyses on the enumerated distribution.
pub fn run_construction(
    f: &FunctionTable,
    profile: &PlateauProfile,
    kind: ConstructionKind,
    punctured: bool,
    budget: OpBudget,
) -> Result<ConstructionOutcome, PipelineError> {
    let mut spec = match kind {
        ConstructionKind::FirstGen => {
            if punctured {
                return Err(PipelineError::Theory(TheoryError::PuncturedNotSupported));
            }
            first_gen_code(f)
        }
        ConstructionKind::DefSetZero => defining_set(f, Selector::Zero)?,
        ConstructionKind::DefSetSq => defining_set(f, Selector::Sq)?,
        ConstructionKind::DefSetNsq => defining_set(f, Selector::Nsq)?,
    };
    if punctured {
        spec = puncture_representatives(&spec)?;
    }
    let actual = codes::weight_distribution_exhaustive(&spec, f, budget)?;

    let (predicted, prediction) = match prediction_input(f, profile, kind, punctured) {
        Err(reason) => (None, PredictionStatus::NotApplicable(reason)),
        Ok(input) => match predict_weights(&input) {
            Err(err) => (None, PredictionStatus::NotApplicable(err.to_string())),
            Ok(wd) => {
                let report = verify_prediction(&actual, &wd);
                let status = if report.matched {
                    PredictionStatus::Match
                } else {
                    PredictionStatus::Mismatch(report)
                };
                (Some(wd), status)
            }
        },
    };

    let dual = pless_dual_low_weights(&actual, f.p())?;
    let minimality = minimality_check(&actual, f.p())?;
    let d = actual.min_distance().ok_or(TheoryError::ZeroCode)?;
    let length = actual.length();
    let dim = actual.dimension();
    let bounds = bound_checks(length, dim, d, f.p());
    let next = if d < length { Some(bound_checks(length, dim, d + 1, f.p())) } else { None };
    let next2 = if d + 1 < length { Some(bound_checks(length, dim, d + 2, f.p())) } else { None };
    let ok_at = |b: &Option<BoundReport>| b.as_ref().map(|r| r.sphere_packing_ok).unwrap_or(false);
    let packing_optimal = bounds.sphere_packing_ok && !ok_at(&next);
    let packing_almost_optimal = bounds.sphere_packing_ok && ok_at(&next) && !ok_at(&next2);

    Ok(ConstructionOutcome {
        kind,
        kind_name: kind_name(kind),
        punctured,
        spec,
        actual,
        predicted,
        prediction,
        dual,
        minimality,
        bounds,
        packing_almost_optimal,
        packing_optimal,
    })
}

/// Assemble the prediction inputs from a profile, naming the first failed
/// hypothesis instead when the closed forms do not apply.
fn prediction_input(
    f: &FunctionTable,
    profile: &PlateauProfile,
    kind: ConstructionKind,
    punctured: bool,
) -> Result<PredictionInput, String> {
    let dual_side = match profile.dual_side_of_zero() {
        Some(side) => side,
        None => return Err("dual is not bent relative to the support".into()),
    };
    match kind {
        ConstructionKind::FirstGen => {
            if f.value(0) != 0 {
                return Err("f(0) != 0".into());
            }
        }
        _ => {
            if profile.nwrf_t.is_none() {
                return Err("no even scaling exponent (function outside the homogeneous class)".into());
            }
        }
    }
    Ok(PredictionInput {
        p: f.p(),
        n: f.n(),
        s: profile.s(),
        k: profile.k(),
        eps0_f: profile.eps0(),
        eps0_fstar: dual_side,
        kind,
        punctured,
    })
}

/// One fixture verified end to end.
#[derive(Debug, Clone)]
pub struct FixtureResult {
    pub id: u32,
    pub name: String,
    pub failures: Vec<String>,
}

impl FixtureResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run the full pipeline for one fixture and compare against its pins.
pub fn verify_fixture(fx: &crate::fixtures::Fixture, budget: OpBudget) -> FixtureResult {
    let mut failures = Vec::new();
    let mut fail = |msg: String| failures.push(msg);

    let (f, _) = match build_table(fx.p, fx.n, Some(&fx.poly), None) {
        Ok(v) => v,
        Err(e) => {
            return FixtureResult { id: fx.id, name: fx.name.clone(), failures: vec![e.to_string()] }
        }
    };
    let profile = match classify(&f) {
        Ok(p) => p,
        Err(e) => {
            return FixtureResult { id: fx.id, name: fx.name.clone(), failures: vec![e.to_string()] }
        }
    };

    let pins = &fx.profile;
    if profile.s() != pins.s {
        fail(format!("s = {} expected {}", profile.s(), pins.s));
    }
    if regularity_string(profile.regularity()) != pins.regularity {
        fail(format!(
            "regularity {} expected {}",
            regularity_string(profile.regularity()),
            pins.regularity
        ));
    }
    if let Some(k) = pins.k {
        if profile.k() != k {
            fail(format!("k = {} expected {k}", profile.k()));
        }
    }
    if let Some(side) = pins.side_zero {
        if profile.eps0() != Some(side) {
            fail(format!("side of 0: {:?} expected {side}", profile.eps0()));
        }
    }
    if let Some(side) = pins.dual_side_zero {
        if profile.dual_side_of_zero() != Some(side) {
            fail(format!("dual side of 0: {:?} expected {side}", profile.dual_side_of_zero()));
        }
    }
    if pins.dual_bent != profile.dual.is_some() {
        fail(format!("dual bent relative: {} expected {}", profile.dual.is_some(), pins.dual_bent));
    }
    if let Some(nwrf) = pins.nwrf {
        if nwrf != profile.nwrf_t.is_some() {
            fail(format!("scaling-homogeneous: {} expected {nwrf}", profile.nwrf_t.is_some()));
        }
    }
    if let Some(d) = &profile.dual {
        if !d.involution_ok {
            fail("f**(x) = f(-x) failed".into());
        }
    }

    for pin in &fx.codes {
        let label = format!(
            "{}{}",
            pin.construction,
            if pin.punctured { " punctured" } else { "" }
        );
        let kind = match parse_construction(&pin.construction) {
            Ok(k) => k,
            Err(e) => {
                fail(format!("{label}: {e}"));
                continue;
            }
        };
        let outcome = match run_construction(&f, &profile, kind, pin.punctured, budget) {
            Ok(o) => o,
            Err(e) => {
                fail(format!("{label}: {e}"));
                continue;
            }
        };
        let wd = &outcome.actual;
        let params = [
            wd.length(),
            wd.dimension() as u64,
            wd.min_distance().unwrap_or(0),
        ];
        if params != pin.parameters {
            fail(format!("{label}: parameters {params:?} expected {:?}", pin.parameters));
        }
        let actual_pairs: Vec<(u64, i64)> = wd.pairs().filter(|&(w, _)| w > 0).collect();
        if actual_pairs != pin.enumerator {
            fail(format!("{label}: enumerator {}", wd.enumerator_string()));
        }
        if !matches!(outcome.prediction, PredictionStatus::Match) {
            fail(format!("{label}: prediction {}", outcome.prediction.verdict()));
        }
        let dual_params = [
            wd.length(),
            wd.length() - wd.dimension() as u64,
            match outcome.dual.d_dual {
                plateau_core::theory::DualDistance::Exact(d) => d as u64,
                plateau_core::theory::DualDistance::AtLeastFive => 5,
            },
        ];
        if dual_params != pin.dual {
            fail(format!("{label}: dual {dual_params:?} expected {:?}", pin.dual));
        }
        if outcome.minimality.minimal != pin.ab_minimal {
            fail(format!(
                "{label}: minimality {} expected {}",
                outcome.minimality.minimal, pin.ab_minimal
            ));
        }
        if pin.minimal_guaranteed && !outcome.minimality.minimal {
            fail(format!("{label}: guaranteed minimal but criterion failed"));
        }
    }

    FixtureResult { id: fx.id, name: fx.name.clone(), failures }
}
