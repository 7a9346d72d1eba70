//! Command-line entry point and the library functions behind each command.
//!
//! Exit codes: 0 pass, 1 claim or comparison failure, 2 usage or config
//! error, 3 internal invariant violation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cache::{Cache, KeyMaterial};
use crate::chart::{chart_compare, DiffReport, ExtChart, Window};
use crate::cpl::{cpl_dims, cpl_module, cpl_module_with_unit, v_dims, CPL_MAX_DEGREE};
use crate::ext::{ext_chart, minimal_resolution, mpl8_chart, Naming, MPL8_MAX_STEM};
use crate::module::FPModule;
use crate::render::{render_ascii, render_svg};
use crate::specseq::{
    adams_run, ahss_e2, thom_homology, AbelianGroupExpr, AdamsRun, CoefficientTable,
    DeductionScript, GradedGroups, SSError, ThomShift,
};
use crate::steenrod::SubalgebraId;

/// Largest internal degree a resolution may reach.
pub const MAX_T: u32 = 40;

pub const CLAIMS_TOML: &str = include_str!("../data/claims_paper.toml");
pub const A2_UNIT_CHART_JSON: &str = include_str!("../data/fig1_reference_chart.json");
pub const CPL_COKERNEL_JSON: &str = include_str!("../data/lemma36_cokernel_table.json");
pub const MPL8_SCRIPT_TOML: &str = include_str!("../data/lemma37.toml");
pub const PI_MPL8_JSON: &str = include_str!("../data/pi_mpl8_table.json");
pub const PI_MO8_JSON: &str = include_str!("../data/pi_mo8_table.json");
pub const PI_SPHERE_JSON: &str = include_str!("../data/pi_sphere_table.json");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error(transparent)]
    Script(SSError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::File { .. } | CliError::Script(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<SSError> for CliError {
    fn from(e: SSError) -> Self {
        match e {
            SSError::Inconsistent { .. } | SSError::NotAComplex { .. } => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Script(other),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Svg,
    Ascii,
}

/// Settings from a TOML file; command-line flags override each field.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub max_stem: Option<u32>,
    pub max_s: Option<u32>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub aliases: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        RunConfig::from_toml(&read(path)?).map_err(|e| file_error(path, e))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn merged(&self, flags: &RunConfig) -> RunConfig {
        RunConfig {
            max_stem: flags.max_stem.or(self.max_stem),
            max_s: flags.max_s.or(self.max_s),
            cache_dir: flags.cache_dir.clone().or_else(|| self.cache_dir.clone()),
            format: flags.format.or(self.format),
            aliases: flags.aliases.clone().or_else(|| self.aliases.clone()),
        }
    }
}

// ---------------------------------------------------------------------------
// Chart sources

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    F2A2,
    F2A1,
    Cpl,
    Mpl8,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::F2A2, Builtin::F2A1, Builtin::Cpl, Builtin::Mpl8];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::F2A2 => "F2@A2",
            Builtin::F2A1 => "F2@A1",
            Builtin::Cpl => "cpl",
            Builtin::Mpl8 => "mpl8",
        }
    }

    pub fn parse(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Default `(max_stem, max_s)`.
    pub fn default_bounds(self) -> (u32, u32) {
        match self {
            Builtin::F2A2 | Builtin::F2A1 => (17, 8),
            Builtin::Cpl | Builtin::Mpl8 => (MPL8_MAX_STEM, 8),
        }
    }
}

/// What a chart is computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChartSource {
    Builtin(Builtin),
    /// A module presentation in TOML or JSON.
    Module(PathBuf),
}

impl ChartSource {
    pub fn parse(s: &str) -> ChartSource {
        Builtin::parse(s).map_or_else(
            || ChartSource::Module(PathBuf::from(s)),
            ChartSource::Builtin,
        )
    }

    /// Chart id used to select aliases.
    pub fn id(&self) -> String {
        match self {
            ChartSource::Builtin(b) => b.name().to_string(),
            ChartSource::Module(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        }
    }

    pub fn default_bounds(&self) -> (u32, u32) {
        match self {
            ChartSource::Builtin(b) => b.default_bounds(),
            ChartSource::Module(_) => (17, 8),
        }
    }
}

fn load_module(path: &Path) -> Result<FPModule, CliError> {
    let text = read(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        FPModule::from_json(&text)
    } else {
        FPModule::from_toml(&text)
    };
    parsed.map_err(|e| file_error(path, e))
}

/// Request for one chart.
#[derive(Debug, Clone)]
pub struct ChartRequest {
    pub source: ChartSource,
    pub max_stem: u32,
    pub max_s: u32,
    /// Alias file; the bundled aliases when absent.
    pub aliases: Option<PathBuf>,
}

impl ChartRequest {
    pub fn builtin(b: Builtin) -> ChartRequest {
        let (max_stem, max_s) = b.default_bounds();
        ChartRequest {
            source: ChartSource::Builtin(b),
            max_stem,
            max_s,
            aliases: None,
        }
    }
}

fn naming_for(req: &ChartRequest) -> Result<Naming, CliError> {
    let id = req.source.id();
    match &req.aliases {
        Some(path) => Ok(Naming::from_toml(&read(path)?)
            .map_err(|e| file_error(path, e))?
            .for_chart(&id)),
        None => Ok(Naming::bundled(&id)),
    }
}

fn check_bounds(req: &ChartRequest, top: u32) -> Result<u32, CliError> {
    let max_t = req.max_stem + req.max_s + top;
    if max_t > MAX_T {
        return Err(CliError::Usage(format!(
            "bounds reach internal degree {max_t}; resolutions stop at t = {MAX_T}"
        )));
    }
    Ok(max_t)
}

fn resolve_module(
    module: &FPModule,
    req: &ChartRequest,
    naming: &Naming,
) -> Result<ExtChart, CliError> {
    let top = module.max_degree().unwrap_or(0);
    let max_t = check_bounds(req, top.min(req.max_stem + req.max_s))?;
    let r =
        minimal_resolution(module, req.max_s, max_t).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(ext_chart(&r, req.max_stem, naming))
}

/// Computes a chart, consulting and filling the cache when one is given.
/// Returns the chart and whether it was a cache hit.
pub fn compute_chart(
    req: &ChartRequest,
    cache: Option<&Cache>,
) -> Result<(ExtChart, bool), CliError> {
    let naming = naming_for(req)?;
    let cpl = |e: crate::cpl::CplError| CliError::Usage(e.to_string());
    let module =
        match &req.source {
            ChartSource::Builtin(Builtin::F2A2) => FPModule::trivial(SubalgebraId::Level(2))
                .map_err(|e| CliError::Usage(e.to_string()))?,
            ChartSource::Builtin(Builtin::F2A1) => FPModule::trivial(SubalgebraId::Level(1))
                .map_err(|e| CliError::Usage(e.to_string()))?,
            ChartSource::Builtin(Builtin::Cpl) => cpl_module(CPL_MAX_DEGREE).map_err(cpl)?,
            ChartSource::Builtin(Builtin::Mpl8) => {
                if req.max_stem > MPL8_MAX_STEM {
                    return Err(CliError::Usage(format!(
                        "mpl8 is defined through stem {MPL8_MAX_STEM}"
                    )));
                }
                check_bounds(req, req.max_stem)?;
                cpl_module_with_unit().map_err(cpl)?
            }
            ChartSource::Module(path) => load_module(path)?,
        };
    let naming_json = serde_json::to_string(&naming).expect("naming serializes");
    let key = KeyMaterial::new(
        &req.source.id(),
        &module.to_json(),
        req.max_stem,
        req.max_s,
        &naming_json,
    );
    let compute = || -> Result<ExtChart, CliError> {
        match req.source {
            ChartSource::Builtin(Builtin::Mpl8) => {
                mpl8_chart(req.max_s, req.max_stem).map_err(|e| CliError::Usage(e.to_string()))
            }
            _ => resolve_module(&module, req, &naming),
        }
    };
    match cache {
        Some(c) => c.get_or_insert(&key, compute),
        None => Ok((compute()?, false)),
    }
}

/// Loads a chart from a builtin name or a chart JSON file.
pub fn load_chart(
    source: &str,
    max_s: Option<u32>,
    cache: Option<&Cache>,
) -> Result<ExtChart, CliError> {
    if let Some(b) = Builtin::parse(source) {
        let mut req = ChartRequest::builtin(b);
        if let Some(s) = max_s {
            req.max_s = s;
        }
        return Ok(compute_chart(&req, cache)?.0);
    }
    let path = Path::new(source);
    ExtChart::from_json(&read(path)?).map_err(|e| file_error(path, e))
}

/// The bundled reference chart with the given id.
pub fn reference_chart(id: &str) -> Result<ExtChart, CliError> {
    let text = match id {
        "a2-unit" => A2_UNIT_CHART_JSON.to_string(),
        "cpl-cokernel" => CPL_COKERNEL_JSON.to_string(),
        path => read(Path::new(path))?,
    };
    ExtChart::from_json(&text).map_err(|e| file_error(Path::new(id), e))
}

/// The bundled coefficient table with the given id.
pub fn coefficient_table(id: &str) -> Result<CoefficientTable, CliError> {
    let text = match id {
        "mpl8" => PI_MPL8_JSON.to_string(),
        "mo8" => PI_MO8_JSON.to_string(),
        "sphere" => PI_SPHERE_JSON.to_string(),
        path => read(Path::new(path))?,
    };
    CoefficientTable::from_json(&text).map_err(|e| file_error(Path::new(id), e))
}

// ---------------------------------------------------------------------------
// Claims

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnMismatch {
    #[default]
    Fail,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub id: String,
    pub citation: String,
    pub expected: String,
    pub recipe: String,
    #[serde(default)]
    pub args: toml::Table,
    #[serde(default)]
    pub on_mismatch: OnMismatch,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimsFile {
    #[serde(default, rename = "claim")]
    pub claims: Vec<Claim>,
}

pub const RECIPES: [&str; 9] = [
    "cpl_dims",
    "cpl_dim",
    "v_dim",
    "gamma_dim",
    "h_k1_dim",
    "e_r2_dim",
    "ext_compare",
    "mpl8_group",
    "ahss_line",
];

impl ClaimsFile {
    pub fn bundled() -> ClaimsFile {
        ClaimsFile::from_toml(CLAIMS_TOML).expect("bundled claims parse")
    }

    /// Parses and checks that every claim has a citation and a known recipe.
    pub fn from_toml(text: &str) -> Result<ClaimsFile, CliError> {
        let file: ClaimsFile = toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
        for c in &file.claims {
            if c.citation.trim().is_empty() {
                return Err(CliError::Usage(format!("claim {}: empty citation", c.id)));
            }
            if !RECIPES.contains(&c.recipe.as_str()) {
                return Err(CliError::Usage(format!(
                    "claim {}: unknown recipe {:?}",
                    c.id, c.recipe
                )));
            }
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// Passed with warnings attached, or a tolerated mismatch.
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub status: Status,
    pub expected: String,
    pub computed: String,
    pub citation: String,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub results: Vec<ClaimResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.results.iter().filter(|r| r.status == status).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Warn => "WARN",
                Status::Fail => "FAIL",
            };
            let _ = writeln!(
                out,
                "{tag} {}: computed {} (stated {})",
                r.id, r.computed, r.expected
            );
            for w in &r.warnings {
                let _ = writeln!(out, "     warning: {w}");
            }
            if r.status != Status::Pass {
                if let Some(n) = &r.note {
                    let _ = writeln!(out, "     note: {n}");
                }
                let _ = writeln!(out, "     source: {}", r.citation);
            }
        }
        let _ = writeln!(
            out,
            "{} claims: {} pass, {} warn, {} fail",
            self.results.len(),
            self.count(Status::Pass),
            self.count(Status::Warn),
            self.count(Status::Fail)
        );
        out
    }
}

/// A recipe's result: whether it matches the stated value, its display form
/// and any warnings.
struct Outcome {
    matches: bool,
    computed: String,
    warnings: Vec<String>,
}

fn arg_u32(claim: &Claim, name: &str) -> Result<u32, CliError> {
    claim
        .args
        .get(name)
        .and_then(toml::Value::as_integer)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "claim {}: missing integer argument {name:?}",
                claim.id
            ))
        })
}

fn arg_str<'a>(claim: &'a Claim, name: &str) -> Result<&'a str, CliError> {
    claim
        .args
        .get(name)
        .and_then(toml::Value::as_str)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "claim {}: missing string argument {name:?}",
                claim.id
            ))
        })
}

fn expected_count(claim: &Claim) -> Result<u64, CliError> {
    claim.expected.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "claim {}: expected value {:?} is not a count",
            claim.id, claim.expected
        ))
    })
}

fn expected_group(claim: &Claim) -> Result<AbelianGroupExpr, CliError> {
    claim
        .expected
        .parse()
        .map_err(|e| CliError::Usage(format!("claim {}: {e}", claim.id)))
}

fn count_outcome(claim: &Claim, value: u64) -> Result<Outcome, CliError> {
    Ok(Outcome {
        matches: value == expected_count(claim)?,
        computed: value.to_string(),
        warnings: Vec::new(),
    })
}

/// Charts and runs shared between claims of one verification.
#[derive(Default)]
struct Session {
    charts: Vec<(String, ExtChart)>,
    mpl8: Option<AdamsRun>,
}

impl Session {
    fn chart(&mut self, b: Builtin, window: Window) -> Result<&ExtChart, CliError> {
        let id = format!("{}:{}:{}", b.name(), window.max_stem, window.max_s);
        if !self.charts.iter().any(|(k, _)| *k == id) {
            let req = ChartRequest {
                source: ChartSource::Builtin(b),
                max_stem: window.max_stem,
                max_s: window.max_s,
                aliases: None,
            };
            let chart = compute_chart(&req, None)?.0;
            self.charts.push((id.clone(), chart));
        }
        Ok(&self
            .charts
            .iter()
            .find(|(k, _)| *k == id)
            .expect("inserted")
            .1)
    }

    fn mpl8(&mut self) -> Result<&AdamsRun, CliError> {
        if self.mpl8.is_none() {
            let chart = mpl8_chart(8, MPL8_MAX_STEM).map_err(|e| CliError::Usage(e.to_string()))?;
            let script = DeductionScript::from_toml(MPL8_SCRIPT_TOML)?;
            self.mpl8 = Some(adams_run(&chart, &script)?);
        }
        Ok(self.mpl8.as_ref().expect("computed"))
    }
}

fn compare_outcome(report: &DiffReport) -> Outcome {
    let warnings = report
        .warnings
        .iter()
        .map(|w| format!("flagged cell ({}, {}): {}", w.stem, w.s, w.detail))
        .collect();
    if report.passed() {
        Outcome {
            matches: true,
            computed: "match".into(),
            warnings,
        }
    } else {
        let detail: Vec<String> = report
            .failures
            .iter()
            .map(|f| format!("({}, {}) {}", f.stem, f.s, f.detail))
            .collect();
        Outcome {
            matches: false,
            computed: format!(
                "{} mismatches: {}",
                report.failures.len(),
                detail.join("; ")
            ),
            warnings,
        }
    }
}

fn evaluate(claim: &Claim, session: &mut Session) -> Result<Outcome, CliError> {
    let usage = |e: crate::cpl::CplError| CliError::Usage(e.to_string());
    match claim.recipe.as_str() {
        "cpl_dims" => {
            let (from, to) = (arg_u32(claim, "from")?, arg_u32(claim, "to")?);
            let dims = cpl_dims(to).map_err(usage)?;
            let computed: Vec<String> = (from..=to).map(|d| dims.get(d).to_string()).collect();
            let computed = computed.join(",");
            let stated: String = claim
                .expected
                .chars()
                .filter(|c| !c.is_whitespace())
                .collect();
            Ok(Outcome {
                matches: computed == stated,
                computed,
                warnings: Vec::new(),
            })
        }
        "cpl_dim" => {
            let d = arg_u32(claim, "degree")?;
            count_outcome(claim, cpl_dims(d).map_err(usage)?.get(d))
        }
        "v_dim" => {
            let d = arg_u32(claim, "degree")?;
            count_outcome(claim, v_dims(d).map_err(usage)?.v.get(d))
        }
        "h_k1_dim" => {
            let d = arg_u32(claim, "degree")?;
            count_outcome(claim, v_dims(d).map_err(usage)?.h_k1.get(d))
        }
        "e_r2_dim" => {
            let d = arg_u32(claim, "degree")?;
            count_outcome(claim, v_dims(d).map_err(usage)?.e_r2.get(d))
        }
        "gamma_dim" => {
            let d = arg_u32(claim, "degree")?;
            let dec = v_dims(d).map_err(usage)?;
            let mut out = count_outcome(claim, dec.gamma.get(d))?;
            for (name, dims) in [("h_k1", &dec.h_k1), ("e_r2", &dec.e_r2)] {
                if let Ok(stated) = arg_u32(claim, name) {
                    if u64::from(stated) != dims.get(d) {
                        out.warnings.push(format!(
                            "intermediate {name} in degree {d}: stated {stated}, computed {}",
                            dims.get(d)
                        ));
                    }
                }
            }
            Ok(out)
        }
        "ext_compare" => {
            let reference = reference_chart(arg_str(claim, "reference")?)?;
            let window = reference.window.ok_or_else(|| {
                CliError::Usage(format!("claim {}: reference chart has no window", claim.id))
            })?;
            let chart = arg_str(claim, "chart")?;
            let builtin = Builtin::parse(chart).ok_or_else(|| {
                CliError::Usage(format!("claim {}: unknown chart {chart:?}", claim.id))
            })?;
            let computed = session.chart(builtin, window)?;
            Ok(compare_outcome(&chart_compare(
                computed, &reference, window,
            )))
        }
        "mpl8_group" => {
            let stem = arg_u32(claim, "stem")?;
            let expected = expected_group(claim)?;
            let run = session.mpl8()?;
            let g = run.stems.iter().find(|g| g.stem == stem).ok_or_else(|| {
                CliError::Usage(format!("claim {}: stem {stem} outside the chart", claim.id))
            })?;
            let mut warnings = Vec::new();
            if g.flagged {
                warnings.push(format!("stem {stem} is truncation-sensitive"));
            }
            let qualifier = if g.up_to_extension {
                " (up to extension)"
            } else {
                ""
            };
            Ok(Outcome {
                matches: g.group == expected,
                computed: format!("{}{qualifier}", g.group),
                warnings,
            })
        }
        "ahss_line" => {
            let total = arg_u32(claim, "total")?;
            let table = coefficient_table(arg_str(claim, "table")?)?;
            let degrees: Vec<u32> = claim
                .args
                .get("free_degrees")
                .and_then(toml::Value::as_array)
                .map(|a| {
                    a.iter()
                        .filter_map(|v| v.as_integer())
                        .map(|v| v as u32)
                        .collect()
                })
                .ok_or_else(|| {
                    CliError::Usage(format!("claim {}: missing free_degrees", claim.id))
                })?;
            let homology = thom_homology(&GradedGroups::free_in(&degrees), ThomShift::Normalized);
            let expected = expected_group(claim)?;
            match ahss_e2(&homology, &table, total) {
                Ok(cells) => {
                    let sum = cells
                        .iter()
                        .fold(AbelianGroupExpr::zero(), |acc, c| acc.direct_sum(&c.group));
                    Ok(Outcome {
                        matches: sum == expected,
                        computed: sum.to_string(),
                        warnings: Vec::new(),
                    })
                }
                Err(e) => Ok(Outcome {
                    matches: false,
                    computed: e.to_string(),
                    warnings: Vec::new(),
                }),
            }
        }
        other => Err(CliError::Usage(format!(
            "claim {}: unknown recipe {other:?}",
            claim.id
        ))),
    }
}

/// Evaluates every claim; the report passes iff no claim fails.
pub fn cmd_verify(claims: &ClaimsFile) -> Result<VerifyReport, CliError> {
    let mut session = Session::default();
    let mut report = VerifyReport::default();
    for claim in &claims.claims {
        let outcome = evaluate(claim, &mut session)?;
        let status = match (outcome.matches, claim.on_mismatch) {
            (true, _) if outcome.warnings.is_empty() => Status::Pass,
            (true, _) | (false, OnMismatch::Warn) => Status::Warn,
            (false, OnMismatch::Fail) => Status::Fail,
        };
        report.results.push(ClaimResult {
            id: claim.id.clone(),
            status,
            expected: claim.expected.clone(),
            computed: outcome.computed,
            citation: claim.citation.clone(),
            warnings: outcome.warnings,
            note: claim.note.clone(),
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Other commands

/// Renders a chart in the requested format.
pub fn cmd_render(chart: &ExtChart, format: Format) -> String {
    match format {
        Format::Json => chart.to_json(),
        Format::Svg => render_svg(chart),
        Format::Ascii => render_ascii(chart),
    }
}

pub struct ResolveOutput {
    pub chart: ExtChart,
    pub rendered: String,
    pub cache_hit: bool,
}

pub fn cmd_resolve(
    req: &ChartRequest,
    format: Format,
    cache: Option<&Cache>,
) -> Result<ResolveOutput, CliError> {
    let (chart, cache_hit) = compute_chart(req, cache)?;
    let rendered = cmd_render(&chart, format);
    Ok(ResolveOutput {
        chart,
        rendered,
        cache_hit,
    })
}

pub struct SsOutput {
    pub run: AdamsRun,
    pub report: String,
}

/// Runs a deduction script on a chart and prints the log and groups.
pub fn cmd_ss(script: &DeductionScript, chart: &ExtChart) -> Result<SsOutput, CliError> {
    let run = adams_run(chart, script)?;
    let mut out = String::new();
    for entry in run.e_infinity.log() {
        let _ = writeln!(out, "E{}: {}", entry.page, entry.message);
    }
    let _ = writeln!(out, "groups read off E{}:", run.e_infinity.page());
    for e in &run.groups.entries {
        let q = e
            .qualifier
            .as_deref()
            .map(|q| format!(" ({q})"))
            .unwrap_or_default();
        let _ = writeln!(out, "  {:2}: {}{q}  [{}]", e.degree, e.group, e.provenance);
    }
    Ok(SsOutput { run, report: out })
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "plcob",
    version,
    about = "Exact Ext charts and spectral-sequence bookkeeping for PL string cobordism"
)]
pub struct Cli {
    /// Run configuration in TOML; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cache directory (else PLCOB_CACHE_DIR, else .plcob-cache).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Re-computes every claim of a claims file.
    Verify {
        /// Claims file; the bundled claims when absent.
        claims: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Resolves a module and prints its chart.
    Resolve(ResolveArgs),
    /// Runs a deduction script on a chart.
    Ss {
        /// Deduction script in TOML.
        script: PathBuf,
        /// Builtin name or chart JSON file.
        #[arg(long, default_value = "mpl8")]
        chart: String,
        #[arg(long)]
        max_s: Option<u32>,
        /// Print the groups table as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Renders a chart JSON file.
    Render {
        chart: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Manages the resolution cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    /// F2@A2, F2@A1, cpl, mpl8, or a module file (.toml or .json).
    pub source: String,
    #[arg(long)]
    pub max_stem: Option<u32>,
    #[arg(long)]
    pub max_s: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Alias file naming generators.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Skip the cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Compare against a2-unit, cpl-cokernel or a chart JSON file.
    #[arg(long)]
    pub compare: Option<String>,
    /// Write the output here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Removes temporary, corrupt and outdated entries.
    Gc,
    /// Removes every entry.
    Clear,
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| file_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    let file_config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let global = file_config.merged(&RunConfig {
        cache_dir: cli.cache_dir.clone(),
        ..RunConfig::default()
    });
    let cache = || Cache::new(Cache::resolve_dir(global.cache_dir.as_deref()));
    match cli.command {
        Command::Verify { claims, json } => {
            let file = match claims {
                Some(path) => {
                    ClaimsFile::from_toml(&read(&path)?).map_err(|e| file_error(&path, e))?
                }
                None => ClaimsFile::bundled(),
            };
            let report = cmd_verify(&file)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                print!("{}", report.render());
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Resolve(args) => {
            let config = global.merged(&RunConfig {
                max_stem: args.max_stem,
                max_s: args.max_s,
                format: args.format,
                aliases: args.aliases.clone(),
                cache_dir: None,
            });
            let source = ChartSource::parse(&args.source);
            let (stem, s) = source.default_bounds();
            let req = ChartRequest {
                source,
                max_stem: config.max_stem.unwrap_or(stem),
                max_s: config.max_s.unwrap_or(s),
                aliases: config.aliases.clone(),
            };
            let cache = (!args.no_cache).then(cache);
            let out = cmd_resolve(&req, config.format.unwrap_or_default(), cache.as_ref())?;
            emit(&out.rendered, args.output.as_deref())?;
            if let Some(reference) = &args.compare {
                let reference = reference_chart(reference)?;
                let window = reference.window.unwrap_or(Window {
                    max_stem: req.max_stem,
                    max_s: req.max_s,
                });
                let report = chart_compare(&out.chart, &reference, window);
                for f in &report.failures {
                    eprintln!("mismatch ({}, {}): {}", f.stem, f.s, f.detail);
                }
                for w in &report.warnings {
                    eprintln!("warning ({}, {}): {}", w.stem, w.s, w.detail);
                }
                return Ok(if report.passed() { 0 } else { 1 });
            }
            Ok(0)
        }
        Command::Ss {
            script,
            chart,
            max_s,
            json,
        } => {
            let script =
                DeductionScript::from_toml(&read(&script)?).map_err(|e| file_error(&script, e))?;
            let max_s = max_s.or(global.max_s);
            let chart = load_chart(&chart, max_s, Some(&cache()))?;
            let out = cmd_ss(&script, &chart)?;
            if json {
                print!("{}", out.run.groups.to_json());
            } else {
                print!("{}", out.report);
            }
            Ok(0)
        }
        Command::Render { chart, format } => {
            let parsed = ExtChart::from_json(&read(&chart)?).map_err(|e| file_error(&chart, e))?;
            let format = format.or(global.format).unwrap_or(Format::Svg);
            print!("{}", cmd_render(&parsed, format));
            Ok(0)
        }
        Command::Cache { action } => {
            let cache = cache();
            match action {
                CacheAction::Gc => {
                    let r = cache.gc().map_err(|e| file_error(cache.dir(), e))?;
                    println!(
                        "kept {}, removed {} ({} temporary, {} corrupt, {} outdated)",
                        r.kept,
                        r.removed(),
                        r.temp_files,
                        r.corrupt,
                        r.stale_version
                    );
                }
                CacheAction::Clear => {
                    let n = cache.clear().map_err(|e| file_error(cache.dir(), e))?;
                    println!("removed {n} entries");
                }
            }
            Ok(0)
        }
    }
}

/// Entry point of the `plcob` binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
