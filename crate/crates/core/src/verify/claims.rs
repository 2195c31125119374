//! The claim table. Each entry is an inequality `left <= coefficient · right`
//! with side conditions; [`super::check`] evaluates it on instances.

use serde::Serialize;

use super::coefficient::{Coef, ConstantRef};
use crate::constants::{PropertyVariant, Side};
use crate::estimate::ConstantName as N;
use crate::weights::WeightProfile;

/// Which sets may play `A` and `B` in a Property (A) comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Budget {
    /// `w(A) <= w(B)` for the claim's weight.
    Weighted,
    /// `|A| <= |B|`
    Cardinality,
    /// `|A| = |B|`
    EqualCardinality,
}

/// What `‖1_{εA}‖` is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    /// Right side 1; needs `n_1 > n_0 > A` with `w(A) < w_{n_0} + w_{n_1}` and `w(A) <= limsup w`.
    PairAbove,
    /// Right side `‖e_n‖` for some `n > A` with `w(A) <= w_n`.
    HeavierAbove,
    /// Right side `‖e_1‖` with `A > 1` and `w(A) <= w_1`.
    LighterBelow,
    /// Right side 1; needs `D > A` with `|D| >= |A|` and `w(D) <= w_1`.
    SparseTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Template {
    /// `‖x‖ <= c · max|x_i| · ‖1_{supp x}‖`
    CoefficientSpread,
    /// `min_{i∈Λ}|x_i| · ‖1_Λ‖ <= c‖x‖` for a greedy set `Λ`
    GreedyThreshold,
    /// `‖x − P_Λ x‖ <= c‖x − P_A x‖` for `A` beyond `Λ` on `side` within the budget `w(Λ)`
    ResidualVsProjection { side: Side },
    /// `‖x‖ <= c‖x − P_A x + 1_{ηB}‖` with `sup|x| <= 1`, `A < B`, `w(A) <= w(B)`, `supp x ∩ B = ∅`
    Reformulation,
    /// `‖T_λ x‖ <= c‖x‖`
    Truncation,
    /// `‖x − P_Λ x‖ <= c · σ̃(x)` on `side`
    ResidualVsSigma { side: Side },
    /// `‖x + t1_{εA}‖ <= c‖x + t1_{ηB}‖`
    PropertyA { order: PropertyVariant, budget: Budget },
    /// `‖1_{εA}‖ <= c · anchor`
    SignedIndicator { anchor: Anchor },
    /// `‖1_A‖ <= c‖1_B‖` whenever `w(A) <= w(B)`
    SetPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightCondition {
    Any,
    /// `0 < inf w <= sup w < ∞`
    BoundedAway,
    /// `Σ w_n = ∞`, `sup w < ∞`
    DivergentBounded,
    /// `sup w = ∞`
    Unbounded,
    /// `Σ w_n < ∞`
    Summable,
    /// `w_n → 0`
    Vanishing,
}

impl WeightCondition {
    pub fn holds(self, p: &WeightProfile) -> bool {
        match self {
            WeightCondition::Any => true,
            WeightCondition::BoundedAway => p.bounded_away(),
            WeightCondition::DivergentBounded => !p.summable && p.sup.is_some(),
            WeightCondition::Unbounded => p.sup.is_none(),
            WeightCondition::Summable => p.summable,
            WeightCondition::Vanishing => p.limsup.as_ref().is_some_and(num_traits::Zero::is_zero),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            WeightCondition::Any => "any w",
            WeightCondition::BoundedAway => "0 < inf w <= sup w < ∞",
            WeightCondition::DivergentBounded => "Σ w_n = ∞ and sup w < ∞",
            WeightCondition::Unbounded => "sup w = ∞",
            WeightCondition::Summable => "Σ w_n < ∞",
            WeightCondition::Vanishing => "w_n → 0",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClaimCase {
    pub label: &'static str,
    pub weights: WeightCondition,
    pub template: Template,
    pub coefficient: Coef,
    /// The bound uses `‖e_n‖ = 1`; on other engines the check runs on the rescaled basis.
    pub normalized: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Claim {
    pub id: &'static str,
    pub aliases: &'static [&'static str],
    pub group: &'static str,
    pub statement: &'static str,
    /// Tried in order; the first whose weight condition holds is checked.
    pub cases: &'static [ClaimCase],
    /// Weight used when the caller gives none.
    pub default_weight: &'static str,
    pub note: Option<&'static str>,
}

impl Claim {
    pub fn case_for(&self, profile: &WeightProfile) -> Option<&'static ClaimCase> {
        self.cases.iter().find(|c| c.weights.holds(profile))
    }

    pub fn matches(&self, name: &str) -> bool {
        self.id.eq_ignore_ascii_case(name) || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
    }
}

const CQ: Coef = Coef::K(ConstantRef::unit(N::QuasiGreedy));
const KB: Coef = Coef::K(ConstantRef::unit(N::Basis));
const CLA: Coef = Coef::K(ConstantRef::given(N::LeftPropertyA));
const CRA: Coef = Coef::K(ConstantRef::given(N::RightPropertyA));
const CLA1: Coef = Coef::K(ConstantRef::unit(N::LeftPropertyA));
const CRA1: Coef = Coef::K(ConstantRef::unit(N::RightPropertyA));
const CA1: Coef = Coef::K(ConstantRef::unit(N::PropertyA));
const WCONS: Coef = Coef::K(ConstantRef::given(N::WConservative));
const WREV: Coef = Coef::K(ConstantRef::given(N::WReverseConservative));
const CONS: Coef = Coef::K(ConstantRef::unit(N::Conservative));
const DEM: Coef = Coef::K(ConstantRef::unit(N::Democracy));
const CQ_PLUS_1: Coef = Coef::Add(&[CQ, Coef::Num(1)]);
const ONE_PLUS_INV_ALPHA: Coef = Coef::Add(&[Coef::Num(1), Coef::Div(&Coef::Num(1), &Coef::Alpha)]);
const C_SIDES: Coef = Coef::Max(&[CLA, CRA]);
const C_SIDES1: Coef = Coef::Max(&[CLA1, CRA1]);

const fn case(template: Template, coefficient: Coef) -> ClaimCase {
    ClaimCase {
        label: "",
        weights: WeightCondition::Any,
        template,
        coefficient,
        normalized: false,
    }
}

pub static CLAIMS: &[Claim] = &[
    Claim {
        id: "L1",
        aliases: &[],
        group: "quasi-greedy",
        statement: "‖Σ_{j∈A} a_j e_j‖ <= 2C_q · max|a_j| · ‖1_A‖",
        cases: &[case(Template::CoefficientSpread, Coef::Mul(&[Coef::Num(2), CQ]))],
        default_weight: "constant:1",
        note: None,
    },
    Claim {
        id: "L2",
        aliases: &[],
        group: "quasi-greedy",
        statement: "|e_{ρ(m)}^*(x)| · ‖1_{Λ_m(x)}‖ <= 4C_q^2 ‖x‖",
        cases: &[case(Template::GreedyThreshold, Coef::Mul(&[Coef::Num(4), Coef::Pow(&CQ, 2)]))],
        default_weight: "constant:1",
        note: None,
    },
    Claim {
        id: "T21",
        aliases: &[],
        group: "partially-greedy",
        statement: "‖x − G_m x‖ <= (1 + C_q + 8C_q^4·C) ‖x − P_A x‖ for A < α_m(x), w(A) <= w(Λ_m(x)); C = w-conservative",
        cases: &[case(
            Template::ResidualVsProjection { side: Side::Left },
            Coef::Add(&[Coef::Num(1), CQ, Coef::Mul(&[Coef::Num(8), Coef::Pow(&CQ, 4), WCONS])]),
        )],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "T24",
        aliases: &[],
        group: "partially-greedy",
        statement: "‖x − G_m x‖ <= (1 + C_q + 8C_q^4·C) ‖x − P_A x‖ for A > β_m(x), w(A) <= w(Λ_m(x)); C = w-reverse-conservative",
        cases: &[case(
            Template::ResidualVsProjection { side: Side::Right },
            Coef::Add(&[Coef::Num(1), CQ, Coef::Mul(&[Coef::Num(8), Coef::Pow(&CQ, 4), WREV])]),
        )],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "P36",
        aliases: &[],
        group: "property-a",
        statement: "‖x‖ <= C_la ‖x − P_A x + 1_{ηB}‖ for sup|x| <= 1, A < B, w(A) <= w(B), supp x ∩ B = ∅",
        cases: &[case(Template::Reformulation, CLA)],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "L38",
        aliases: &[],
        group: "quasi-greedy",
        statement: "‖T_λ x‖ <= (C_q + 1) ‖x‖",
        cases: &[case(Template::Truncation, CQ_PLUS_1)],
        default_weight: "constant:1",
        note: None,
    },
    Claim {
        id: "T39b",
        aliases: &["T39"],
        group: "partially-greedy",
        statement: "‖x − G_m x‖ <= (C_q + 1)·C_la · σ̃^L(x)",
        cases: &[case(Template::ResidualVsSigma { side: Side::Left }, Coef::Mul(&[CQ_PLUS_1, CLA]))],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "T310b",
        aliases: &["T310"],
        group: "partially-greedy",
        statement: "‖x − G_m x‖ <= (C_q + 1)·C_ra · σ̃^R(x)",
        cases: &[case(Template::ResidualVsSigma { side: Side::Right }, Coef::Mul(&[CQ_PLUS_1, CRA]))],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "L311",
        aliases: &[],
        group: "property-a",
        statement: "‖x + t1_{εA}‖ <= C(2K_b + 1) ‖x + t1_{ηB}‖ for disjoint A, B with |A| = |B|; C = max(C_la, C_ra) at w = 1",
        cases: &[case(
            Template::PropertyA {
                order: PropertyVariant::Full,
                budget: Budget::EqualCardinality,
            },
            Coef::Mul(&[C_SIDES1, Coef::Add(&[Coef::Mul(&[Coef::Num(2), KB]), Coef::Num(1)])]),
        )],
        default_weight: "constant:1",
        note: None,
    },
    Claim {
        id: "P313",
        aliases: &[],
        group: "property-a",
        statement: "w-left Property (A) with C_la gives left Property (A) with max(C_la, 1 + 8K_b/α^2, 4C_la^2/α)",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::BoundedAway,
            template: Template::PropertyA {
                order: PropertyVariant::Left,
                budget: Budget::Cardinality,
            },
            coefficient: Coef::Max(&[
                CLA,
                Coef::Add(&[Coef::Num(1), Coef::Div(&Coef::Mul(&[Coef::Num(8), KB]), &Coef::Pow(&Coef::Alpha, 2))]),
                Coef::Div(&Coef::Mul(&[Coef::Num(4), Coef::Pow(&CLA, 2)]), &Coef::Alpha),
            ]),
            normalized: true,
        }],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "P313r",
        aliases: &["P315"],
        group: "property-a",
        statement: "left Property (A) with C gives w-left Property (A) with 2C^2(1 + 1/α); C = C_la at w = 1",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::BoundedAway,
            template: Template::PropertyA {
                order: PropertyVariant::Left,
                budget: Budget::Weighted,
            },
            coefficient: Coef::Mul(&[Coef::Num(2), Coef::Pow(&CLA1, 2), ONE_PLUS_INV_ALPHA]),
            normalized: false,
        }],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "T314",
        aliases: &[],
        group: "property-a",
        statement: "‖x + t1_{εA}‖ <= 2C^2(1 + 1/α) ‖x + t1_{ηB}‖ for disjoint A, B with w(A) <= w(B); C = C_a at w = 1",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::BoundedAway,
            template: Template::PropertyA {
                order: PropertyVariant::Full,
                budget: Budget::Weighted,
            },
            coefficient: Coef::Mul(&[Coef::Num(2), Coef::Pow(&CA1, 2), ONE_PLUS_INV_ALPHA]),
            normalized: false,
        }],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "T317",
        aliases: &["T312"],
        group: "property-a",
        statement: "‖x + t1_{εA}‖ <= max(1 + 16CK_b, C^2 + 2CK_b) ‖x + t1_{ηB}‖ for disjoint A, B with w(A) <= w(B); C = max(C_la, C_ra)",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::DivergentBounded,
            template: Template::PropertyA {
                order: PropertyVariant::Full,
                budget: Budget::Weighted,
            },
            coefficient: Coef::Max(&[
                Coef::Add(&[Coef::Num(1), Coef::Mul(&[Coef::Num(16), C_SIDES, KB])]),
                Coef::Add(&[Coef::Pow(&C_SIDES, 2), Coef::Mul(&[Coef::Num(2), C_SIDES, KB])]),
            ]),
            normalized: true,
        }],
        default_weight: "alternating_half",
        note: None,
    },
    Claim {
        id: "P41a",
        aliases: &[],
        group: "conservative",
        statement: "max_ε ‖1_{εA}‖ <= 4C when w(A) <= limsup w_n; C = w-conservative",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::Any,
            template: Template::SignedIndicator { anchor: Anchor::PairAbove },
            coefficient: Coef::Mul(&[Coef::Num(4), WCONS]),
            normalized: true,
        }],
        default_weight: "linear",
        note: None,
    },
    Claim {
        id: "P41bc",
        aliases: &["P41b", "P41c", "P41d"],
        group: "conservative",
        statement: "‖1_{εA}‖ <= 2C‖e_n‖: n > A with w(A) <= w_n when sup w = ∞ (C = w-conservative); n = 1 < A with w(A) <= w_1 when Σ w_n < ∞ (C = w-reverse-conservative)",
        cases: &[
            ClaimCase {
                label: "b",
                weights: WeightCondition::Unbounded,
                template: Template::SignedIndicator { anchor: Anchor::HeavierAbove },
                coefficient: Coef::Mul(&[Coef::Num(2), WCONS]),
                normalized: false,
            },
            ClaimCase {
                label: "c",
                weights: WeightCondition::Summable,
                template: Template::SignedIndicator { anchor: Anchor::LighterBelow },
                coefficient: Coef::Mul(&[Coef::Num(2), WREV]),
                normalized: false,
            },
        ],
        default_weight: "linear",
        note: Some(
            "the subsequence statement for inf w = 0 is an existence claim; only the uniform bound along a summable \
             subsequence (case c restricted to that subsequence) is finitely checkable",
        ),
    },
    Claim {
        id: "P43",
        aliases: &[],
        group: "conservative",
        statement: "‖1_{εA}‖ <= 2C_1C_2 for w → 0; C_1 = w-reverse-conservative, C_2 = conservative",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::Vanishing,
            template: Template::SignedIndicator { anchor: Anchor::SparseTail },
            coefficient: Coef::Mul(&[Coef::Num(2), WREV, CONS]),
            normalized: true,
        }],
        default_weight: "harmonic",
        note: None,
    },
    Claim {
        id: "T47",
        aliases: &[],
        group: "conservative",
        statement: "‖1_A‖ <= C(1 + 1/α) ‖1_B‖ whenever w(A) <= w(B); C = democracy",
        cases: &[ClaimCase {
            label: "",
            weights: WeightCondition::BoundedAway,
            template: Template::SetPair,
            coefficient: Coef::Mul(&[DEM, ONE_PLUS_INV_ALPHA]),
            normalized: false,
        }],
        default_weight: "alternating_half",
        note: None,
    },
];

/// A constant-bearing statement that is deliberately not in [`CLAIMS`].
#[derive(Debug, Clone, Copy)]
pub struct OutOfScope {
    pub id: &'static str,
    pub statement: &'static str,
    pub reason: &'static str,
}

pub const OUT_OF_SCOPE: &[OutOfScope] = &[
    OutOfScope {
        id: "T39a",
        statement: "C_p-w-partially greedy implies (C_p + 1)-quasi-greedy and C_p-w-left Property (A)",
        reason: "compares two suprema; windowed estimates of both are lower bounds, so neither side can be fixed",
    },
    OutOfScope {
        id: "T310a",
        statement: "C_rp-w-reverse partially greedy implies (C_rp + 1)-quasi-greedy",
        reason: "compares two suprema, as for T39a",
    },
    OutOfScope {
        id: "C42",
        statement: "for w → 0, w-reverse conservative bases are weakly null",
        reason: "weak nullity is not decidable on a finite window; the uniform bound of P41bc stands in for it",
    },
    OutOfScope {
        id: "democracy-divergent",
        statement: "for Σ w_n = ∞ and sup w_n < ∞, w-conservative and w-reverse conservative imply w-democratic",
        reason: "no explicit constant is given",
    },
    OutOfScope {
        id: "bounded-equivalences",
        statement: "for 0 < inf w <= sup w < ∞, the w- and unweighted left/right Property (A) and conservative notions coincide",
        reason: "qualitative equivalences; the quantitative transfers are P313, P313r and T314",
    },
];

pub fn find_claim(name: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.matches(name))
}

/// Claims whose group or id contains `filter` (case-insensitive). An empty filter keeps everything.
pub fn filter_claims(filter: Option<&str>) -> Vec<&'static Claim> {
    let f = filter.map(str::to_ascii_lowercase);
    CLAIMS
        .iter()
        .filter(|c| match &f {
            None => true,
            Some(f) => c.group == f.as_str() || c.matches(f),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    #[test]
    fn ids_are_unique_and_resolvable() {
        for (i, c) in CLAIMS.iter().enumerate() {
            assert!(!c.cases.is_empty());
            for other in &CLAIMS[i + 1..] {
                assert!(!other.matches(c.id), "{} shadows {}", other.id, c.id);
                assert!(c.aliases.iter().all(|a| !other.matches(a)));
            }
            assert_eq!(find_claim(c.id).unwrap().id, c.id);
            let w = WeightSequence::parse(c.default_weight).unwrap();
            assert!(c.case_for(&w.profile()).is_some(), "{} rejects its own default weight", c.id);
        }
        assert_eq!(find_claim("t312").unwrap().id, "T317");
        for o in OUT_OF_SCOPE {
            assert!(find_claim(o.id).is_none(), "{} is both checked and out of scope", o.id);
        }
    }

    #[test]
    fn coefficients_render() {
        let t21 = find_claim("T21").unwrap();
        assert_eq!(t21.cases[0].coefficient.to_string(), "1 + C_q + 8·C_q^4·w-conservative");
        let p313 = find_claim("P313").unwrap();
        assert_eq!(p313.cases[0].coefficient.to_string(), "max(C_la, 1 + (8·K_b)/α^2, (4·C_la^2)/α)");
        let t317 = find_claim("T317").unwrap();
        assert_eq!(
            t317.cases[0].coefficient.to_string(),
            "max(1 + 16·max(C_la, C_ra)·K_b, max(C_la, C_ra)^2 + 2·max(C_la, C_ra)·K_b)"
        );
    }

    #[test]
    fn filters() {
        assert_eq!(filter_claims(None).len(), CLAIMS.len());
        assert_eq!(filter_claims(Some("conservative")).len(), 4);
        assert_eq!(filter_claims(Some("L38")).len(), 1);
        assert!(filter_claims(Some("no-such-module")).is_empty());
    }
}
