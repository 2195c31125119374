//! Experiment configuration, presets, and the `run` driver that turns a
//! configuration into one JSON report.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::constants::SetPairOptions;
use crate::error::{Error, Result};
use crate::norms::{effective_window, EngineRegistry};
use crate::sampler::SamplerSpec;
use crate::scalar::ArithmeticMode;
use crate::studies::{
    democracy_study, left_property_study, sigma_oracle_study, tga_study, DemocracyStudy, LeftPropertyStudy,
    SigmaOracleSpec, SigmaOracleStudy, TgaStudy, TgaStudySpec,
};
use crate::verify::{filter_claims, reproduce_examples, run_claim_in_cached, CheckReport, Claim, ClaimOptions, ConstantCache, ExamplesReport};
use crate::weights::WeightSequence;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Experiments that are not claim checks, selectable next to claim ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Study {
    Examples,
    LeftPropertyA,
    Democracy,
    SigmaOracle,
    Tga,
}

impl Study {
    pub const ALL: [Study; 5] = [Study::Examples, Study::LeftPropertyA, Study::Democracy, Study::SigmaOracle, Study::Tga];

    pub fn as_str(self) -> &'static str {
        match self {
            Study::Examples => "examples",
            Study::LeftPropertyA => "left-property-A",
            Study::Democracy => "democracy",
            Study::SigmaOracle => "sigma-oracle",
            Study::Tga => "tga",
        }
    }

    pub fn parse(s: &str) -> Option<Study> {
        Study::ALL.into_iter().find(|x| x.as_str().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyParams {
    /// Largest partial-sum window for the interleaved family; the run window when absent.
    pub left_property_window: Option<usize>,
    /// Budget for the left-Property-(A) searches, relative to `sampler`.
    pub left_property_scale: f64,
    pub democracy_n: u32,
    pub sigma_oracle: SigmaOracleSpec,
    pub tga: TgaStudySpec,
    pub modular_samples: usize,
}

impl Default for StudyParams {
    fn default() -> Self {
        StudyParams {
            left_property_window: None,
            left_property_scale: 0.1,
            democracy_n: 3,
            sigma_oracle: SigmaOracleSpec::default(),
            tga: TgaStudySpec::default(),
            modular_samples: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Space short forms, e.g. `lp:2`, `spreading:3`, `partial_sum@12`.
    pub spaces: Vec<String>,
    /// Weight for every claim; each claim's own default when absent.
    pub weight: Option<String>,
    pub window: Option<usize>,
    pub mode: ArithmeticMode,
    pub seed: u64,
    /// Instances per claim and space.
    pub samples: usize,
    /// Search budget for constants; its own seed is replaced by `seed`.
    pub sampler: SamplerSpec,
    pub set_pairs: SetPairOptions,
    /// Claim ids, aliases or groups, `all`, or study names.
    pub claims: Vec<String>,
    pub studies: StudyParams,
    /// Worker threads; the output does not depend on it.
    pub threads: Option<usize>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            spaces: Vec::new(),
            weight: None,
            window: None,
            mode: ArithmeticMode::Exact,
            seed: 0,
            samples: 1000,
            sampler: SamplerSpec::default(),
            set_pairs: SetPairOptions::default(),
            claims: Vec::new(),
            studies: StudyParams::default(),
            threads: None,
            report: None,
            csv: None,
        }
    }
}

pub const PRESETS: [&str; 3] = ["paper-examples", "acceptance", "left-property-A"];

/// Claims covered by the acceptance suite.
pub const ACCEPTANCE_CLAIMS: [&str; 13] = [
    "L1", "L2", "L38", "P36", "T39b", "T310b", "L311", "P313", "T314", "T317", "P41a", "P43", "T47",
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = ExperimentConfig::default();
    match name {
        "paper-examples" => Ok(ExperimentConfig {
            claims: vec![Study::Examples.as_str().into()],
            ..base
        }),
        "acceptance" => Ok(ExperimentConfig {
            spaces: vec!["lp:2".into(), "spreading:3".into(), "partial_sum@12".into()],
            window: Some(12),
            seed: 7,
            claims: Study::ALL
                .iter()
                .map(|s| s.as_str().to_string())
                .chain(ACCEPTANCE_CLAIMS.iter().map(|c| c.to_string()))
                .collect(),
            studies: StudyParams {
                left_property_window: Some(24),
                ..StudyParams::default()
            },
            ..base
        }),
        "left-property-A" => Ok(ExperimentConfig {
            spaces: vec!["partial_sum".into()],
            window: Some(32),
            claims: vec![Study::LeftPropertyA.as_str().into()],
            ..base
        }),
        _ => Err(Error::InvalidConfig {
            field: "preset".into(),
            reason: format!("unknown preset `{}`; expected one of {}", name, PRESETS.join(", ")),
        }),
    }
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

/// A configuration with its claim selection resolved.
#[derive(Debug)]
pub struct Plan {
    pub claims: Vec<&'static Claim>,
    pub studies: BTreeSet<Study>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<Plan> {
        let mut claims: Vec<&'static Claim> = Vec::new();
        let mut studies = BTreeSet::new();
        if self.claims.is_empty() {
            return Err(invalid("claims", "select at least one claim, group or study"));
        }
        for (i, sel) in self.claims.iter().enumerate() {
            if let Some(s) = Study::parse(sel) {
                studies.insert(s);
                continue;
            }
            let found = if sel == "all" { filter_claims(None) } else { filter_claims(Some(sel)) };
            if found.is_empty() {
                return Err(invalid(format!("claims[{}]", i), format!("`{}` names no claim, group or study", sel)));
            }
            for c in found {
                if !claims.iter().any(|k| k.id == c.id) {
                    claims.push(c);
                }
            }
        }
        if let Some(w) = self.window {
            if w < 2 {
                return Err(invalid("window", "must be at least 2"));
            }
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads", "must be positive"));
        }
        if let Some(w) = &self.weight {
            WeightSequence::parse(w).map_err(|e| invalid("weight", e.to_string()))?;
        }
        if self.studies.left_property_scale.is_nan() || self.studies.left_property_scale <= 0.0 {
            return Err(invalid("studies.left_property_scale", "must be positive"));
        }
        let registry = EngineRegistry::with_builtins();
        for (i, s) in self.spaces.iter().enumerate() {
            let engine = registry.parse(s).map_err(|e| invalid(format!("spaces[{}]", i), e.to_string()))?;
            if effective_window(engine.as_ref(), self.window).is_none() {
                return Err(invalid("window", format!("space `{}` has no window of its own, so one must be given", s)));
            }
        }
        if !claims.is_empty() && self.spaces.is_empty() {
            return Err(invalid("spaces", "claim checks need at least one space"));
        }
        if studies.contains(&Study::LeftPropertyA) {
            if !self.spaces.is_empty() && !self.spaces.iter().any(|s| s.starts_with("partial_sum")) {
                return Err(invalid("spaces", "the left-property-A family lives on partial_sum"));
            }
            let w = self.studies.left_property_window.or(self.window).unwrap_or(0);
            if w < 8 {
                return Err(invalid("window", "the left-property-A family needs a window of at least 8"));
            }
        }
        Ok(Plan { claims, studies })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedClaim {
    pub claim: String,
    pub space: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    /// The configuration that produced the report, output paths and thread count removed.
    pub config: ExperimentConfig,
    pub claims: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedClaim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub examples: Option<ExamplesReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_property_a: Option<LeftPropertyStudy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub democracy: Option<DemocracyStudy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_oracle: Option<SigmaOracleStudy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tga: Option<TgaStudy>,
    pub passed: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `claim,space,instance,slack` for every checked instance; degenerate instances have an empty slack.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("claim,space,instance,slack\n");
        for r in &self.claims {
            append_slacks(&mut out, r);
        }
        out
    }
}

pub fn append_slacks(out: &mut String, r: &CheckReport) {
    for (i, s) in r.slacks.iter().enumerate() {
        let slack = s.map(|v| format!("{:e}", v)).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.claim, r.engine, i, slack));
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let plan = config.validate()?;
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| invalid("threads", e.to_string()))?
            .install(|| execute(config, &plan)),
        None => execute(config, &plan),
    }
}

fn execute(config: &ExperimentConfig, plan: &Plan) -> Result<RunReport> {
    let registry = EngineRegistry::with_builtins();
    let sampler = SamplerSpec {
        seed: config.seed,
        ..config.sampler.clone()
    };
    let mut claims = Vec::new();
    let mut skipped = Vec::new();
    for space in &config.spaces {
        if plan.claims.is_empty() {
            break;
        }
        let engine = registry.parse(space)?;
        let cache = ConstantCache::new();
        for claim in &plan.claims {
            let w = WeightSequence::parse(config.weight.as_deref().unwrap_or(claim.default_weight))?;
            let opts = ClaimOptions {
                window: config.window,
                samples: config.samples,
                seed: config.seed,
                sampler: sampler.clone(),
                set_pairs: config.set_pairs.clone(),
            };
            match run_claim_in_cached(config.mode, claim, engine.as_ref(), &w, &opts, &cache) {
                Ok(r) => claims.push(r),
                Err(Error::NotApplicable { reason, .. }) => skipped.push(SkippedClaim {
                    claim: claim.id.into(),
                    space: space.clone(),
                    reason,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    let s = &config.studies;
    let examples = match plan.studies.contains(&Study::Examples) {
        true => Some(reproduce_examples(config.seed, s.modular_samples)?),
        false => None,
    };
    let left_property_a = match plan.studies.contains(&Study::LeftPropertyA) {
        true => {
            let window = s.left_property_window.or(config.window).expect("validated");
            Some(left_property_study(window, &sampler.scaled(s.left_property_scale))?)
        }
        false => None,
    };
    let democracy = match plan.studies.contains(&Study::Democracy) {
        true => Some(democracy_study(s.democracy_n)?),
        false => None,
    };
    let sigma_oracle = match plan.studies.contains(&Study::SigmaOracle) {
        true => Some(sigma_oracle_study(&SigmaOracleSpec {
            seed: config.seed,
            ..s.sigma_oracle.clone()
        })?),
        false => None,
    };
    let tga = match plan.studies.contains(&Study::Tga) {
        true => Some(tga_study(&TgaStudySpec {
            seed: config.seed,
            ..s.tga.clone()
        })?),
        false => None,
    };
    let passed = claims.iter().all(|r| r.passed)
        && examples.as_ref().is_none_or(|r| r.passed)
        && left_property_a.as_ref().is_none_or(|r| r.passed)
        && democracy.as_ref().is_none_or(|r| r.passed)
        && sigma_oracle.as_ref().is_none_or(|r| r.passed)
        && tga.as_ref().is_none_or(|r| r.passed);
    Ok(RunReport {
        version: VERSION.into(),
        config: ExperimentConfig {
            report: None,
            csv: None,
            threads: None,
            ..config.clone()
        },
        claims,
        skipped,
        examples,
        left_property_a,
        democracy,
        sigma_oracle,
        tga,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in PRESETS {
            preset(p).unwrap().validate().unwrap();
        }
        let plan = preset("acceptance").unwrap().validate().unwrap();
        assert_eq!(plan.claims.len(), ACCEPTANCE_CLAIMS.len());
        assert_eq!(plan.studies.len(), Study::ALL.len());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let field = |c: ExperimentConfig| match c.validate() {
            Err(Error::InvalidConfig { field, .. }) => field,
            other => panic!("expected an invalid config, got {:?}", other.map(|p| p.claims.len())),
        };
        let base = ExperimentConfig {
            spaces: vec!["lp:2".into()],
            window: Some(8),
            claims: vec!["L38".into()],
            ..Default::default()
        };
        base.validate().unwrap();
        assert_eq!(field(ExperimentConfig { weight: Some("explicit:1,-1".into()), ..base.clone() }), "weight");
        assert_eq!(field(ExperimentConfig { window: Some(1), ..base.clone() }), "window");
        assert_eq!(field(ExperimentConfig { claims: vec!["L38".into(), "Z9".into()], ..base.clone() }), "claims[1]");
        assert_eq!(field(ExperimentConfig { spaces: vec!["lp:2".into(), "nope".into()], ..base.clone() }), "spaces[1]");
        assert_eq!(field(ExperimentConfig { spaces: vec!["partial_sum".into()], window: None, ..base.clone() }), "window");
        assert_eq!(field(ExperimentConfig { spaces: vec![], ..base.clone() }), "spaces");
        assert_eq!(field(ExperimentConfig { samples: 0, ..base }), "samples");
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = preset("acceptance").unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert!(ExperimentConfig::from_json(r#"{"spaces": ["lp:2"], "colour": 1}"#).is_err());
    }
}
