//! Constant estimates and the witnesses that certify them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{PropertyTuple, Side};
use crate::error::{parse_err, Error, Result};
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::vector::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstantName {
    #[serde(rename = "C_q")]
    QuasiGreedy,
    #[serde(rename = "C_p")]
    PartiallyGreedy,
    #[serde(rename = "C_rp")]
    ReversePartiallyGreedy,
    #[serde(rename = "C_a")]
    PropertyA,
    #[serde(rename = "C_la")]
    LeftPropertyA,
    #[serde(rename = "C_ra")]
    RightPropertyA,
    #[serde(rename = "democracy")]
    Democracy,
    #[serde(rename = "w-democracy")]
    WDemocracy,
    #[serde(rename = "conservative")]
    Conservative,
    #[serde(rename = "w-conservative")]
    WConservative,
    #[serde(rename = "reverse-conservative")]
    ReverseConservative,
    #[serde(rename = "w-reverse-conservative")]
    WReverseConservative,
    #[serde(rename = "K_b")]
    Basis,
}

impl ConstantName {
    pub const ALL: [ConstantName; 13] = [
        ConstantName::QuasiGreedy,
        ConstantName::PartiallyGreedy,
        ConstantName::ReversePartiallyGreedy,
        ConstantName::PropertyA,
        ConstantName::LeftPropertyA,
        ConstantName::RightPropertyA,
        ConstantName::Democracy,
        ConstantName::WDemocracy,
        ConstantName::Conservative,
        ConstantName::WConservative,
        ConstantName::ReverseConservative,
        ConstantName::WReverseConservative,
        ConstantName::Basis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstantName::QuasiGreedy => "C_q",
            ConstantName::PartiallyGreedy => "C_p",
            ConstantName::ReversePartiallyGreedy => "C_rp",
            ConstantName::PropertyA => "C_a",
            ConstantName::LeftPropertyA => "C_la",
            ConstantName::RightPropertyA => "C_ra",
            ConstantName::Democracy => "democracy",
            ConstantName::WDemocracy => "w-democracy",
            ConstantName::Conservative => "conservative",
            ConstantName::WConservative => "w-conservative",
            ConstantName::ReverseConservative => "reverse-conservative",
            ConstantName::WReverseConservative => "w-reverse-conservative",
            ConstantName::Basis => "K_b",
        }
    }

    /// Whether the definition involves the weight sequence at all.
    pub fn uses_weight(self) -> bool {
        matches!(
            self,
            ConstantName::PartiallyGreedy
                | ConstantName::ReversePartiallyGreedy
                | ConstantName::PropertyA
                | ConstantName::LeftPropertyA
                | ConstantName::RightPropertyA
                | ConstantName::WDemocracy
                | ConstantName::WConservative
                | ConstantName::WReverseConservative
        )
    }

    /// Defined by a supremum over pairs of sets only, so a finite window can be exhausted.
    pub fn is_set_pair(self) -> bool {
        matches!(
            self,
            ConstantName::Democracy
                | ConstantName::WDemocracy
                | ConstantName::Conservative
                | ConstantName::WConservative
                | ConstantName::ReverseConservative
                | ConstantName::WReverseConservative
        )
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstantName::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| parse_err("constant", s, "unknown constant name"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// The supremum over every admissible configuration inside the window.
    WindowExact,
    /// The largest ratio among the configurations that were evaluated.
    WitnessLowerBound,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::WindowExact => "window-exact",
            BoundKind::WitnessLowerBound => "witness-lower-bound",
        }
    }
}

/// A configuration whose ratio equals the reported value.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<S> {
    /// `‖1_A‖ / ‖1_B‖`
    SetPair { a: IndexSet, b: IndexSet },
    /// `‖x + t1_{εA}‖ / ‖x + t1_{ηB}‖`
    Tuple(PropertyTuple<S>),
    /// `‖P_Λ x‖ / ‖x‖` with `Λ` a greedy set of `x`
    Greedy { x: SparseVector<S>, lambda: IndexSet },
    /// `‖x − P_Λ x‖ / σ̃(x)` on the given side of `Λ`
    PartiallyGreedy {
        x: SparseVector<S>,
        lambda: IndexSet,
        side: Side,
    },
    /// `‖P_{[1,m]} x‖ / ‖x‖`
    Prefix { x: SparseVector<S>, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct WitnessRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
}

impl<S: Scalar> Witness<S> {
    pub fn record(&self) -> WitnessRecord {
        let s = |v: &dyn fmt::Display| Some(v.to_string());
        match self {
            Witness::SetPair { a, b } => WitnessRecord {
                kind: "set-pair".into(),
                a: s(a),
                b: s(b),
                ..Default::default()
            },
            Witness::Tuple(t) => WitnessRecord {
                kind: "tuple".into(),
                a: s(&t.a),
                b: s(&t.b),
                x: Some(t.x.encode()),
                t: Some(t.t.encode()),
                eps: Some(t.eps.render_on(&t.a)),
                eta: Some(t.eta.render_on(&t.b)),
                ..Default::default()
            },
            Witness::Greedy { x, lambda } => WitnessRecord {
                kind: "greedy".into(),
                x: Some(x.encode()),
                lambda: s(lambda),
                m: Some(lambda.len()),
                ..Default::default()
            },
            Witness::PartiallyGreedy { x, lambda, side } => WitnessRecord {
                kind: "partially-greedy".into(),
                x: Some(x.encode()),
                lambda: s(lambda),
                m: Some(lambda.len()),
                side: Some(*side),
                ..Default::default()
            },
            Witness::Prefix { x, m } => WitnessRecord {
                kind: "prefix".into(),
                x: Some(x.encode()),
                m: Some(*m),
                ..Default::default()
            },
        }
    }
}

impl WitnessRecord {
    pub fn to_witness<S: Scalar>(&self) -> Result<Witness<S>> {
        let need = |o: &Option<String>, f: &'static str| {
            o.clone().ok_or_else(|| parse_err("witness", &self.kind, format!("missing field `{}`", f)))
        };
        Ok(match self.kind.as_str() {
            "set-pair" => Witness::SetPair {
                a: need(&self.a, "a")?.parse()?,
                b: need(&self.b, "b")?.parse()?,
            },
            "tuple" => {
                let a: IndexSet = need(&self.a, "a")?.parse()?;
                let b: IndexSet = need(&self.b, "b")?.parse()?;
                Witness::Tuple(PropertyTuple {
                    x: need(&self.x, "x")?.parse()?,
                    t: S::decode(&need(&self.t, "t")?)?,
                    eps: crate::sets::SignPattern::parse_on(&a, &need(&self.eps, "eps")?)?,
                    eta: crate::sets::SignPattern::parse_on(&b, &need(&self.eta, "eta")?)?,
                    a,
                    b,
                })
            }
            "greedy" => Witness::Greedy {
                x: need(&self.x, "x")?.parse()?,
                lambda: need(&self.lambda, "lambda")?.parse()?,
            },
            "partially-greedy" => Witness::PartiallyGreedy {
                x: need(&self.x, "x")?.parse()?,
                lambda: need(&self.lambda, "lambda")?.parse()?,
                side: self
                    .side
                    .ok_or_else(|| parse_err("witness", &self.kind, "missing field `side`"))?,
            },
            "prefix" => Witness::Prefix {
                x: need(&self.x, "x")?.parse()?,
                m: self.m.ok_or_else(|| parse_err("witness", &self.kind, "missing field `m`"))?,
            },
            other => return Err(parse_err("witness", other, "unknown witness kind")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ConstantEstimate<S> {
    pub name: ConstantName,
    /// Weight sequence the constant was measured with, in short form.
    pub weight: String,
    pub engine: String,
    pub value: S,
    pub kind: BoundKind,
    pub witness: Witness<S>,
    pub window: usize,
    /// Configurations whose ratio was computed.
    pub evaluated: usize,
    /// Candidates rejected by a side condition or with a vanishing denominator.
    pub skipped: usize,
    pub seed: Option<u64>,
    pub budget_exhausted: bool,
    /// At the witness, the ratio under the most favourable tie-breaking choice
    /// (the reported value always uses the least favourable one).
    pub best_choice_value: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub name: ConstantName,
    pub weight: String,
    pub engine: String,
    pub value: String,
    pub value_f64: f64,
    pub kind: BoundKind,
    pub window: usize,
    pub evaluated: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub budget_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_choice_value: Option<String>,
    pub witness: WitnessRecord,
}

impl<S: Scalar> ConstantEstimate<S> {
    pub fn record(&self) -> EstimateRecord {
        EstimateRecord {
            name: self.name,
            weight: self.weight.clone(),
            engine: self.engine.clone(),
            value: self.value.encode(),
            value_f64: self.value.to_f64(),
            kind: self.kind,
            window: self.window,
            evaluated: self.evaluated,
            skipped: self.skipped,
            seed: self.seed,
            budget_exhausted: self.budget_exhausted,
            best_choice_value: self.best_choice_value.as_ref().map(Scalar::encode),
            witness: self.witness.record(),
        }
    }
}

impl EstimateRecord {
    pub fn to_estimate<S: Scalar>(&self) -> Result<ConstantEstimate<S>> {
        Ok(ConstantEstimate {
            name: self.name,
            weight: self.weight.clone(),
            engine: self.engine.clone(),
            value: S::decode(&self.value)?,
            kind: self.kind,
            witness: self.witness.to_witness()?,
            window: self.window,
            evaluated: self.evaluated,
            skipped: self.skipped,
            seed: self.seed,
            budget_exhausted: self.budget_exhausted,
            best_choice_value: self.best_choice_value.as_deref().map(S::decode).transpose()?,
        })
    }
}
