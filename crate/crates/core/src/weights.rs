//! Positive weight sequences `w = (w_n)` and the set weight `w(A) = Σ_{i∈A} w_i`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::scalar::{parse_rational, rational_from_i64, rational_string, Rational, Scalar};
use crate::sets::IndexSet;

/// Closed-form weight families that do not fit the parametrised kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFormula {
    /// `1 + 1/n`
    OnePlusHarmonic,
    /// `1/n^2`
    InverseSquare,
    /// `n`
    Linear,
    /// `1` at odd `n`, `1/2` at even `n`
    AlternatingHalf,
}

impl WeightFormula {
    pub const ALL: [WeightFormula; 4] = [
        WeightFormula::OnePlusHarmonic,
        WeightFormula::InverseSquare,
        WeightFormula::Linear,
        WeightFormula::AlternatingHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightFormula::OnePlusHarmonic => "one_plus_harmonic",
            WeightFormula::InverseSquare => "inverse_square",
            WeightFormula::Linear => "linear",
            WeightFormula::AlternatingHalf => "alternating_half",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Constant {
        #[serde(with = "rational_string")]
        value: Rational,
    },
    /// `values[n-1]` for `n <= values.len()`, then `tail` forever.
    Explicit {
        #[serde(with = "rational_string::vec")]
        values: Vec<Rational>,
        #[serde(with = "rational_string")]
        tail: Rational,
    },
    /// `w_n = ratio^n`
    Geometric {
        #[serde(with = "rational_string")]
        ratio: Rational,
    },
    /// `w_n = 1/n`
    Harmonic,
    Formula { formula: WeightFormula },
}

/// Asymptotic facts about a weight sequence. `None` stands for `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    pub inf: Rational,
    pub sup: Option<Rational>,
    pub limsup: Option<Rational>,
    pub summable: bool,
}

impl WeightProfile {
    pub fn bounded_away(&self) -> bool {
        self.inf.is_positive() && self.sup.is_some()
    }

    /// `inf w / sup w`, the ratio that drives the bounded-weight transfer constants.
    pub fn alpha(&self) -> Option<Rational> {
        match &self.sup {
            Some(sup) if self.inf.is_positive() => Some(self.inf.clone() / sup.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSequence {
    spec: WeightSpec,
}

impl WeightSequence {
    pub fn new(spec: WeightSpec) -> Result<Self> {
        let positive = |r: &Rational| r.is_positive();
        let ok = match &spec {
            WeightSpec::Constant { value } => positive(value),
            WeightSpec::Explicit { values, tail } => values.iter().all(positive) && positive(tail),
            WeightSpec::Geometric { ratio } => positive(ratio),
            WeightSpec::Harmonic | WeightSpec::Formula { .. } => true,
        };
        if !ok {
            return Err(Error::InvalidConfig {
                field: "weight".into(),
                reason: "every weight w_n must be strictly positive".into(),
            });
        }
        Ok(WeightSequence { spec })
    }

    pub fn ones() -> Self {
        WeightSequence {
            spec: WeightSpec::Constant {
                value: Rational::one(),
            },
        }
    }

    pub fn harmonic() -> Self {
        WeightSequence {
            spec: WeightSpec::Harmonic,
        }
    }

    pub fn formula(formula: WeightFormula) -> Self {
        WeightSequence {
            spec: WeightSpec::Formula { formula },
        }
    }

    pub fn geometric(ratio: Rational) -> Result<Self> {
        Self::new(WeightSpec::Geometric { ratio })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn is_unit(&self) -> bool {
        matches!(&self.spec, WeightSpec::Constant { value } if value.is_one())
    }

    /// `w_n` as an exact rational. `n` is 1-based.
    pub fn exact(&self, n: usize) -> Rational {
        assert!(n >= 1, "weights are indexed from 1");
        let nn = rational_from_i64(n as i64);
        match &self.spec {
            WeightSpec::Constant { value } => value.clone(),
            WeightSpec::Explicit { values, tail } => values.get(n - 1).unwrap_or(tail).clone(),
            WeightSpec::Geometric { ratio } => num_traits::pow(ratio.clone(), n),
            WeightSpec::Harmonic => nn.recip(),
            WeightSpec::Formula { formula } => match formula {
                WeightFormula::OnePlusHarmonic => Rational::one() + nn.recip(),
                WeightFormula::InverseSquare => (nn.clone() * nn).recip(),
                WeightFormula::Linear => nn,
                WeightFormula::AlternatingHalf => {
                    if n % 2 == 1 {
                        Rational::one()
                    } else {
                        Rational::new(1.into(), 2.into())
                    }
                }
            },
        }
    }

    pub fn get<S: Scalar>(&self, n: usize) -> S {
        S::from_rational(&self.exact(n))
    }

    /// `w_1, …, w_N` converted once, for enumeration loops.
    pub fn table<S: Scalar>(&self, window: usize) -> WeightTable<S> {
        WeightTable {
            values: (1..=window).map(|n| self.get(n)).collect(),
        }
    }

    pub fn profile(&self) -> WeightProfile {
        let half = Rational::new(1.into(), 2.into());
        match &self.spec {
            WeightSpec::Constant { value } => WeightProfile {
                inf: value.clone(),
                sup: Some(value.clone()),
                limsup: Some(value.clone()),
                summable: false,
            },
            WeightSpec::Explicit { values, tail } => {
                let mut inf = tail.clone();
                let mut sup = tail.clone();
                for v in values {
                    if *v < inf {
                        inf = v.clone();
                    }
                    if *v > sup {
                        sup = v.clone();
                    }
                }
                WeightProfile {
                    inf,
                    sup: Some(sup),
                    limsup: Some(tail.clone()),
                    summable: false,
                }
            }
            WeightSpec::Geometric { ratio } => {
                if ratio < &Rational::one() {
                    WeightProfile {
                        inf: Rational::zero(),
                        sup: Some(ratio.clone()),
                        limsup: Some(Rational::zero()),
                        summable: true,
                    }
                } else if ratio.is_one() {
                    WeightProfile {
                        inf: Rational::one(),
                        sup: Some(Rational::one()),
                        limsup: Some(Rational::one()),
                        summable: false,
                    }
                } else {
                    WeightProfile {
                        inf: ratio.clone(),
                        sup: None,
                        limsup: None,
                        summable: false,
                    }
                }
            }
            WeightSpec::Harmonic => WeightProfile {
                inf: Rational::zero(),
                sup: Some(Rational::one()),
                limsup: Some(Rational::zero()),
                summable: false,
            },
            WeightSpec::Formula { formula } => match formula {
                WeightFormula::OnePlusHarmonic => WeightProfile {
                    inf: Rational::one(),
                    sup: Some(rational_from_i64(2)),
                    limsup: Some(Rational::one()),
                    summable: false,
                },
                WeightFormula::InverseSquare => WeightProfile {
                    inf: Rational::zero(),
                    sup: Some(Rational::one()),
                    limsup: Some(Rational::zero()),
                    summable: true,
                },
                WeightFormula::Linear => WeightProfile {
                    inf: Rational::one(),
                    sup: None,
                    limsup: None,
                    summable: false,
                },
                WeightFormula::AlternatingHalf => WeightProfile {
                    inf: half,
                    sup: Some(Rational::one()),
                    limsup: Some(Rational::one()),
                    summable: false,
                },
            },
        }
    }

    /// An upper bound for `Σ_{i>n} w_i`, when the tail is finite.
    pub fn tail_bound(&self, n: usize) -> Option<Rational> {
        match &self.spec {
            WeightSpec::Geometric { ratio } if ratio < &Rational::one() => {
                Some(num_traits::pow(ratio.clone(), n + 1) / (Rational::one() - ratio.clone()))
            }
            // Σ_{i>n} 1/i² ≤ ∫_n^∞ dt/t² = 1/n
            WeightSpec::Formula {
                formula: WeightFormula::InverseSquare,
            } if n >= 1 => Some(rational_from_i64(n as i64).recip()),
            _ => None,
        }
    }

    /// Short textual form accepted by the CLI; see [`WeightSequence::parse`].
    pub fn describe(&self) -> String {
        match &self.spec {
            WeightSpec::Constant { value } => format!("constant:{}", value),
            WeightSpec::Explicit { values, tail } => format!(
                "explicit:{};tail={}",
                values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
                tail
            ),
            WeightSpec::Geometric { ratio } => format!("geometric:{}", ratio),
            WeightSpec::Harmonic => "harmonic".into(),
            WeightSpec::Formula { formula } => formula.name().into(),
        }
    }

    /// `constant:c`, `ones`, `harmonic`, `geometric:r`, `explicit:v1,v2,…;tail=t`,
    /// a formula name such as `alternating_half`, or a JSON object.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            let spec: WeightSpec = serde_json::from_str(t)?;
            return Self::new(spec);
        }
        let (head, arg) = t.split_once(':').map_or((t, None), |(h, a)| (h, Some(a)));
        let spec = match (head, arg) {
            ("ones" | "unit", None) => WeightSpec::Constant {
                value: Rational::one(),
            },
            ("constant" | "const", Some(a)) => WeightSpec::Constant {
                value: parse_rational(a)?,
            },
            ("harmonic", None) => WeightSpec::Harmonic,
            ("geometric", Some(a)) => WeightSpec::Geometric {
                ratio: parse_rational(a)?,
            },
            ("explicit", Some(a)) => {
                let (vals, tail) = a
                    .split_once(";tail=")
                    .ok_or_else(|| parse_err("weight", s, "explicit weights need `;tail=<value>`"))?;
                let values = vals
                    .split(',')
                    .filter(|v| !v.trim().is_empty())
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                WeightSpec::Explicit {
                    values,
                    tail: parse_rational(tail)?,
                }
            }
            ("formula", Some(name)) | (name, None) => {
                let formula = WeightFormula::ALL
                    .into_iter()
                    .find(|f| f.name() == name)
                    .ok_or_else(|| Error::Unknown {
                        what: "weight",
                        name: s.to_string(),
                    })?;
                WeightSpec::Formula { formula }
            }
            _ => {
                return Err(Error::Unknown {
                    what: "weight",
                    name: s.to_string(),
                })
            }
        };
        Self::new(spec)
    }
}

/// Cached `w_1..w_N` in the working scalar type.
#[derive(Debug, Clone)]
pub struct WeightTable<S> {
    values: Vec<S>,
}

impl<S: Scalar> WeightTable<S> {
    pub fn window(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, n: usize) -> &S {
        &self.values[n - 1]
    }

    pub fn of(&self, set: &IndexSet) -> S {
        set.iter().map(|i| self.get(i).clone()).fold(S::zero(), |a, b| a + b)
    }

    pub fn of_mask(&self, mask: u64) -> S {
        let mut m = mask;
        let mut acc = S::zero();
        while m != 0 {
            let k = m.trailing_zeros() as usize;
            acc = acc + self.values[k].clone();
            m &= m - 1;
        }
        acc
    }
}

/// `w(A) = Σ_{i∈A} w_i`, exact in exact mode.
pub fn weight_of<S: Scalar>(w: &WeightSequence, set: &IndexSet) -> S {
    set.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_of_examples() {
        let a = IndexSet::new([3, 5, 9]).unwrap();
        assert_eq!(weight_of::<Rational>(&WeightSequence::ones(), &a), rational_from_i64(3));

        let w = WeightSequence::geometric(Rational::new(1.into(), 2.into())).unwrap();
        let b = IndexSet::new([1, 2]).unwrap();
        assert_eq!(weight_of::<Rational>(&w, &b), Rational::new(3.into(), 4.into()));

        assert_eq!(weight_of::<Rational>(&w, &IndexSet::empty()), Rational::zero());
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(WeightSequence::parse("constant:0").is_err());
        assert!(WeightSequence::parse("explicit:1,-1;tail=1").is_err());
        assert!(WeightSequence::parse("geometric:-1/2").is_err());
    }

    #[test]
    fn parses_short_forms() {
        assert!(WeightSequence::parse("ones").unwrap().is_unit());
        let w = WeightSequence::parse("explicit:1/2,1/2;tail=2").unwrap();
        assert_eq!(w.exact(2), Rational::new(1.into(), 2.into()));
        assert_eq!(w.exact(10), rational_from_i64(2));
        assert_eq!(w.profile().limsup, Some(rational_from_i64(2)));
        let f = WeightSequence::parse("alternating_half").unwrap();
        assert_eq!(f.profile().alpha(), Some(Rational::new(1.into(), 2.into())));
        let j = WeightSequence::parse(r#"{"kind":"geometric","ratio":"1/3"}"#).unwrap();
        assert_eq!(j.exact(2), Rational::new(1.into(), 9.into()));
        assert!(WeightSequence::parse("nonsense").is_err());
    }

    #[test]
    fn geometric_tail_bound_is_exact_sum() {
        let w = WeightSequence::geometric(Rational::new(1.into(), 2.into())).unwrap();
        // Σ_{i>3} 2^{-i} = 1/8
        assert_eq!(w.tail_bound(3), Some(Rational::new(1.into(), 8.into())));
        assert_eq!(WeightSequence::harmonic().tail_bound(3), None);
    }

    #[test]
    fn description_round_trips() {
        for s in ["constant:3/2", "harmonic", "geometric:1/2", "explicit:1,1/2;tail=2", "linear"] {
            let w = WeightSequence::parse(s).unwrap();
            assert_eq!(WeightSequence::parse(&w.describe()).unwrap(), w);
        }
    }
}
