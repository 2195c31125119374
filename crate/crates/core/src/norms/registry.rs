use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{LpExponent, LpSpace, ModularSpace, NormEngine, Normalized, PartialSumSpace, SpreadingFamily, DEFAULT_TOL_MOD};
use crate::error::{parse_err, Error, Result};

/// Declarative description of a built-in space, as it appears in JSON configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum SpaceSpec {
    Lp {
        p: LpP,
    },
    Modular {
        p: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Spreading {
        n_max: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<usize>,
    },
    PartialSum {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<usize>,
    },
    /// The same space with its basis rescaled to unit norm.
    Normalized {
        inner: Box<SpaceSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LpP {
    Number(f64),
    Text(String),
}

impl SpaceSpec {
    pub fn build(&self) -> Result<Box<dyn NormEngine>> {
        Ok(match self {
            SpaceSpec::Lp { p } => {
                let p = match p {
                    LpP::Number(v) => *v,
                    LpP::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => f64::INFINITY,
                    LpP::Text(t) => t.parse::<f64>().map_err(|e| parse_err("ℓ_p exponent", t, e.to_string()))?,
                };
                Box::new(LpSpace::new(LpExponent::new(p)?))
            }
            SpaceSpec::Modular { p, tol } => Box::new(ModularSpace::new(p.clone(), tol.unwrap_or(DEFAULT_TOL_MOD))?),
            SpaceSpec::Spreading { n_max, window } => Box::new(match window {
                Some(w) => SpreadingFamily::with_window(*n_max, *w)?,
                None => SpreadingFamily::new(*n_max)?,
            }),
            SpaceSpec::PartialSum { window } => Box::new(match window {
                Some(w) => PartialSumSpace::checked(*w)?,
                None => PartialSumSpace::new(None),
            }),
            SpaceSpec::Normalized { inner } => Box::new(Normalized::owning(inner.build()?)),
        })
    }

    /// `lp:2`, `lp:inf`, `spreading:3`, `spreading:3@24`, `partial_sum`, `partial_sum@32`,
    /// `modular:1,2,3,4`, `modular@8` (exponents `1..=8`), and `normalized:<any of these>`.
    pub fn parse_short(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("normalized:") {
            return Ok(SpaceSpec::Normalized {
                inner: Box::new(Self::parse_short(inner)?),
            });
        }
        let (head, window) = match t.rsplit_once('@') {
            Some((h, w)) => (h, Some(w.parse::<usize>().map_err(|e| parse_err("space", s, e.to_string()))?)),
            None => (t, None),
        };
        let (name, arg) = head.split_once(':').map_or((head, None), |(n, a)| (n, Some(a)));
        let bad = |why: &str| parse_err("space", s, why.to_string());
        Ok(match (name, arg) {
            ("lp", Some(p)) if window.is_none() => SpaceSpec::Lp { p: LpP::Text(p.into()) },
            ("spreading", Some(n)) => SpaceSpec::Spreading {
                n_max: n.parse().map_err(|_| bad("spreading needs an integer n_max"))?,
                window,
            },
            ("partial_sum", None) => SpaceSpec::PartialSum { window },
            ("modular", Some(list)) if window.is_none() => SpaceSpec::Modular {
                p: list
                    .split(',')
                    .map(|v| v.trim().parse::<u32>().map_err(|_| bad("modular exponents are positive integers")))
                    .collect::<Result<_>>()?,
                tol: None,
            },
            ("modular", None) => SpaceSpec::Modular {
                p: (1..=window.ok_or_else(|| bad("modular needs exponents or @window"))? as u32).collect(),
                tol: None,
            },
            _ => return Err(bad("unrecognized space")),
        })
    }
}

pub type EngineFactory = Arc<dyn Fn(&Value) -> Result<Box<dyn NormEngine>> + Send + Sync>;

/// Name → constructor table. Built-ins are pre-registered; callers add their own
/// engines with [`EngineRegistry::register`] and select them by `{"space": name, ...}`.
#[derive(Clone)]
pub struct EngineRegistry {
    factories: BTreeMap<String, EngineFactory>,
}

impl std::fmt::Debug for EngineRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for EngineRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        for name in ["lp", "modular", "spreading", "partial_sum", "normalized"] {
            r.register(name, |v: &Value| serde_json::from_value::<SpaceSpec>(v.clone())?.build());
        }
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&Value) -> Result<Box<dyn NormEngine>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Arc::new(factory));
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn build(&self, spec: &Value) -> Result<Box<dyn NormEngine>> {
        let name = spec
            .get("space")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err("space", &spec.to_string(), "missing `space` field"))?;
        let factory = self.factories.get(name).ok_or_else(|| Error::Unknown {
            what: "space",
            name: name.to_string(),
        })?;
        factory(spec)
    }

    /// JSON object, a built-in short form, or the bare name of a registered engine.
    pub fn parse(&self, s: &str) -> Result<Box<dyn NormEngine>> {
        let t = s.trim();
        if t.starts_with('{') {
            return self.build(&serde_json::from_str(t)?);
        }
        match SpaceSpec::parse_short(t) {
            Ok(spec) => self.build(&serde_json::to_value(spec)?),
            Err(_) if self.factories.contains_key(t) => self.build(&serde_json::json!({ "space": t })),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};
    use crate::vector::SparseVector;

    #[test]
    fn short_forms_round_trip_through_names() {
        let reg = EngineRegistry::with_builtins();
        for s in ["lp:1", "lp:inf", "lp:2", "spreading:3", "spreading:2@10", "partial_sum", "partial_sum@32", "modular:1,2,3,4", "normalized:partial_sum@8"] {
            let e = reg.parse(s).unwrap();
            assert_eq!(e.name(), s);
        }
        assert_eq!(reg.parse("modular@3").unwrap().name(), "modular:1,2,3");
    }

    #[test]
    fn json_specs() {
        let reg = EngineRegistry::with_builtins();
        let e = reg.parse(r#"{"space":"lp","p":"inf"}"#).unwrap();
        assert_eq!(e.name(), "lp:inf");
        let e = reg.parse(r#"{"space":"spreading","n_max":2}"#).unwrap();
        assert_eq!(e.window(), Some(4));
        assert!(matches!(reg.parse(r#"{"space":"hilbert"}"#), Err(Error::Unknown { .. })));
        assert!(reg.parse("lp:0.5").is_err());
        assert!(reg.parse("nonsense").is_err());
    }

    #[test]
    fn custom_engines_plug_in() {
        #[derive(Debug)]
        struct Doubled;
        impl NormEngine for Doubled {
            fn name(&self) -> String {
                "doubled".into()
            }
            fn window(&self) -> Option<usize> {
                None
            }
            fn supports_exact(&self) -> bool {
                true
            }
            fn norm_exact(&self, x: &SparseVector<Rational>) -> Result<Rational> {
                Ok(x.max_abs() * Rational::from_i64(2))
            }
            fn norm_float(&self, x: &SparseVector<f64>) -> Result<f64> {
                Ok(2.0 * x.max_abs())
            }
            fn is_one_unconditional(&self) -> bool {
                true
            }
        }
        let mut reg = EngineRegistry::with_builtins();
        reg.register("doubled", |_| Ok(Box::new(Doubled)));
        let e = reg.parse("doubled").unwrap();
        let x: SparseVector<Rational> = "3:5".parse().unwrap();
        assert_eq!(crate::norms::norm(e.as_ref(), &x).unwrap(), Rational::from_i64(10));
    }
}
