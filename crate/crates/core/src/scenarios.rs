//! Named parameter sets: the Selkov and Lotka families, the three-cycle
//! family and a gallery with one small-integer instance per case label.

use serde::{Deserialize, Serialize};

use crate::classifier::{CaseLabel, RobustCase, Verdict};
use crate::dynamics::three_cycle_scenario;
use crate::error::{Error, Result};
use crate::params::ExpParams;
use crate::scalar::{Deadband, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub verdict: Verdict,
    pub case: Option<CaseLabel>,
    /// Case certifying robust permanence, when one is expected.
    pub robust: Option<RobustCase>,
}

impl Expected {
    fn new(verdict: Verdict, case: Option<CaseLabel>) -> Self {
        Expected {
            verdict,
            case,
            robust: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: ExpParams,
    pub expected: Expected,
    pub provenance: String,
}

fn check_rate(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRate("k"))
    }
}

/// Selkov's glycolysis model `x' = 1 - x y^γ`, `y' = k (x y^γ - y)`.
pub fn selkov(k: f64, gamma: f64) -> Result<Scenario> {
    check_rate(k)?;
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    let params = ExpParams::from_arrays([-1.0, 0.0, 1.0, 0.0], [0.0, k * gamma, k * (gamma - 1.0), 0.0]);
    let expected = if gamma < 1.0 {
        Expected::new(Verdict::Permanent, Some(CaseLabel::A))
    } else if gamma == 1.0 {
        Expected::new(Verdict::Permanent, Some(CaseLabel::B2))
    } else {
        Expected::new(Verdict::NotPermanent, None)
    };
    Ok(Scenario {
        name: format!("selkov(k={k}, gamma={gamma})"),
        params,
        expected,
        provenance: "Selkov glycolytic oscillator; permanent iff gamma <= 1".into(),
    })
}

/// `k > β (1 - β)^((1 - β) / β)`, the rate condition on the line `β = α - 1`.
pub fn lotka_rate_threshold(beta: f64) -> f64 {
    beta * (1.0 - beta).powf((1.0 - beta) / beta)
}

/// Permanence predicate of the generalized Lotka reactions.
pub fn lotka_permanent(k: f64, alpha: f64, beta: f64) -> bool {
    let first = alpha <= 1.0 && beta <= 1.0 && (alpha, beta) != (1.0, 1.0) && alpha * beta > alpha - 1.0;
    let strip = alpha > 1.0 && alpha < 2.0;
    let second = strip && alpha - 1.0 < beta && beta < 1.0;
    let third = strip && beta == alpha - 1.0 && k > lotka_rate_threshold(beta);
    first || second || third
}

/// Lotka reactions `x' = x^α - x y^β`, `y' = k (x y^β - y)`.
pub fn lotka(k: f64, alpha: f64, beta: f64) -> Result<Scenario> {
    check_rate(k)?;
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::NonFinite("alpha or beta"));
    }
    let params = ExpParams::from_arrays([alpha - 1.0, 0.0, 1.0, 0.0], [0.0, k * beta, k * (beta - 1.0), 0.0]);
    let permanent = lotka_permanent(k, alpha, beta);
    let det = k * (alpha * beta - alpha + 1.0);
    let expected = match params.deadband().sign(&det, 2) {
        Sign::Zero => Expected::new(Verdict::Degenerate, None),
        Sign::Neg => Expected::new(Verdict::NotPermanent, None),
        Sign::Pos if !permanent => Expected::new(Verdict::NotPermanent, None),
        Sign::Pos => {
            let case = if alpha < 1.0 && beta < 1.0 {
                CaseLabel::A
            } else if alpha == 1.0 {
                CaseLabel::B1
            } else if beta == 1.0 {
                CaseLabel::B2
            } else if beta == alpha - 1.0 {
                CaseLabel::C1b
            } else {
                CaseLabel::C1a
            };
            Expected::new(Verdict::Permanent, Some(case))
        }
    };
    Ok(Scenario {
        name: format!("lotka(k={k}, alpha={alpha}, beta={beta})"),
        params,
        expected,
        provenance: "generalized mass-action Lotka reactions".into(),
    })
}

/// `L∞` of the three-cycle family in closed form: `3840 ε - 7000 μ + 680 ε μ`.
pub fn three_cycle_l_infinity(epsilon: f64, mu: f64) -> f64 {
    3840.0 * epsilon - 7000.0 * mu + 680.0 * epsilon * mu
}

/// Three-cycle family; see [`three_cycle_scenario`].
pub fn three_cycle(epsilon: f64, mu: f64) -> Result<Scenario> {
    let params = three_cycle_scenario(epsilon, mu)?;
    let l = three_cycle_l_infinity(epsilon, mu);
    let db = Deadband::new(35.0);
    let verdict = match db.sign(&l, 4) {
        Sign::Pos => Verdict::Permanent,
        Sign::Neg => Verdict::NotPermanent,
        Sign::Zero => Verdict::Undetermined,
    };
    Ok(Scenario {
        name: format!("three-cycle(eps={epsilon}, mu={mu})"),
        params,
        expected: Expected::new(verdict, Some(CaseLabel::HetA)),
        provenance: "weak focus with a heteroclinic cycle at infinity; b2 = 35 - eps, a2 = -8 - mu".into(),
    })
}

struct Entry {
    name: &'static str,
    a: [i32; 4],
    b: [i32; 4],
    verdict: Verdict,
    case: CaseLabel,
    robust: Option<RobustCase>,
    note: &'static str,
}

const fn entry(
    name: &'static str,
    a: [i32; 4],
    b: [i32; 4],
    verdict: Verdict,
    case: CaseLabel,
    robust: Option<RobustCase>,
    note: &'static str,
) -> Entry {
    Entry {
        name,
        a,
        b,
        verdict,
        case,
        robust,
        note,
    }
}

use CaseLabel as L;
use Verdict::{NotPermanent as NP, Permanent as P};

const GALLERY: &[Entry] = &[
    entry("a", [-1, 0, 0, 0], [0, 0, -1, 0], P, L::A, Some(RobustCase::A), "both diagonal entries of J negative"),
    entry("b1", [0, 0, -1, 0], [0, -1, -1, 0], P, L::B1, None, "J11 = 0"),
    entry("b2", [-1, 0, -1, 0], [0, -1, 0, 0], P, L::B2, None, "J22 = 0"),
    entry("b1-robust", [0, 0, 1, -1], [-1, 0, -1, 0], P, L::B1, Some(RobustCase::B1), "J11 = 0, a4 < a2 = a1 < a3"),
    entry("b2-robust", [0, 0, -1, 1], [0, -1, -1, 0], P, L::B1, Some(RobustCase::B2), "J11 = 0, a3 < a2 = a1 < a4"),
    entry("b3-robust", [-1, 0, -1, 0], [1, -1, 0, 0], P, L::B2, Some(RobustCase::B3), "J22 = 0, b2 < b4 = b3 < b1"),
    entry("b4-robust", [-1, 0, 0, -1], [-1, 1, 0, 0], P, L::B2, Some(RobustCase::B4), "J22 = 0, b1 < b4 = b3 < b2"),
    entry("het-a-repelling", [-1, 0, 0, -1], [-2, 1, 0, -1], P, L::HetA, Some(RobustCase::C3), "heteroclinic cycle, L∞ > 0"),
    entry("het-a-attracting", [-1, 0, 1, -2], [-1, 0, 0, -1], NP, L::HetA, None, "heteroclinic cycle, L∞ < 0"),
    entry("het-b-repelling", [-1, 0, -1, 0], [1, -2, 0, -1], P, L::HetB, Some(RobustCase::C4), "heteroclinic cycle, L∞ > 0"),
    entry("het-b-attracting", [-1, 0, -2, 1], [0, -1, 0, -1], NP, L::HetB, None, "heteroclinic cycle, L∞ < 0"),
    entry("c1a", [0, -1, 2, -1], [-1, 1, -2, 0], P, L::C1a, None, "quadrangle, sgn c = (+,+,-,-)"),
    entry("c1b", [0, -1, 1, -1], [0, 1, -1, 0], P, L::C1b, None, "ratio bound satisfied"),
    entry("c1c", [1, 0, 1, -2], [-1, 0, -1, 1], P, L::C1c, None, "P1 = P3"),
    entry("c2a", [1, 0, -2, 1], [1, 0, -1, 0], P, L::C2a, None, "c3, c4 < 0"),
    entry("c2b", [0, -1, -2, 0], [1, 0, -1, 0], P, L::C2b, None, "ratio bound satisfied"),
    entry("c2c", [1, 0, -2, 1], [0, -1, -2, 0], P, L::C2c, None, "slope condition with tr J < 0"),
    entry("c3a", [-1, 0, 2, 0], [-2, 0, 0, -1], P, L::C3a, None, "c1, c2 > 0"),
    entry("c3b", [-1, 0, 1, 0], [-2, 0, 0, -1], P, L::C3b, None, "ratio bound satisfied"),
    entry("c3c", [-1, 1, 0, -1], [-1, 2, 0, -1], P, L::C3c, None, "slope condition with tr J < 0"),
    entry("c4a", [0, 1, -2, 0], [0, -2, 0, -1], P, L::C4a, None, "c1, c2 > 0"),
    entry("c4b", [0, 1, -1, 0], [0, -2, 0, -1], P, L::C4b, None, "ratio bound satisfied"),
    entry("c4c", [-2, 0, -1, 0], [2, -1, 0, -1], P, L::C4c, None, "slope condition with tr J < 0"),
];

/// One small-integer instance per case label, plus attracting heteroclinic
/// variants and the robust-only cases.
pub fn case_gallery() -> Vec<Scenario> {
    GALLERY
        .iter()
        .map(|e| Scenario {
            name: e.name.to_string(),
            params: ExpParams::from_arrays(e.a.map(f64::from), e.b.map(f64::from)),
            expected: Expected {
                verdict: e.verdict,
                case: Some(e.case),
                robust: e.robust,
            },
            provenance: format!("constructed: {}", e.note),
        })
        .chain(std::iter::once(Scenario {
            name: "het-a-outward-spiral".into(),
            params: ExpParams::from_arrays([0.0, -8.0, 10.0, -20.0], [0.0, 35.1, 20.0, 28.0]),
            expected: Expected::new(Verdict::NotPermanent, Some(CaseLabel::HetA)),
            provenance: "three-cycle baseline with b2 = 35.1; large orbits spiral outwards".into(),
        }))
        .collect()
}

/// Free parameters accepted by [`named`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioArgs {
    pub k: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eps: Option<f64>,
    pub mu: Option<f64>,
}

fn required(v: Option<f64>, name: &str, scenario: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidArgument(format!("scenario {scenario} needs {name}")))
}

/// Names accepted by [`named`] besides the gallery entries.
pub const FAMILIES: [&str; 3] = ["selkov", "lotka", "three-cycle"];

/// Scenario by name: `selkov`, `lotka`, `three-cycle` or a gallery entry.
pub fn named(name: &str, args: &ScenarioArgs) -> Result<Scenario> {
    match name {
        "selkov" => selkov(args.k.unwrap_or(1.0), required(args.gamma, "gamma", name)?),
        "lotka" => lotka(
            args.k.unwrap_or(1.0),
            required(args.alpha, "alpha", name)?,
            required(args.beta, "beta", name)?,
        ),
        "three-cycle" => three_cycle(args.eps.unwrap_or(0.0), args.mu.unwrap_or(0.0)),
        other => case_gallery()
            .into_iter()
            .find(|s| s.name == other)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::classify;

    #[test]
    fn selkov_examples() {
        assert_eq!(selkov(1.0, 0.5).unwrap().expected.case, Some(CaseLabel::A));
        assert_eq!(selkov(1.0, 1.0).unwrap().expected.case, Some(CaseLabel::B2));
        assert_eq!(selkov(1.0, 2.0).unwrap().expected.verdict, Verdict::NotPermanent);
        assert!(matches!(selkov(0.0, 1.0), Err(Error::NonPositiveRate(_))));
        assert!(lotka(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lotka_examples() {
        assert!(lotka_permanent(1.0, 1.5, 0.75));
        assert!(!lotka_permanent(1.0, 0.5, 2.0));
        assert!(!lotka_permanent(0.2, 1.5, 0.5));
        assert!((lotka_rate_threshold(0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn three_cycle_closed_form_matches_classifier() {
        for (e, m) in [(0.1, 0.0), (0.2, 1e-3), (0.0, 0.01), (0.05, 0.5)] {
            let s = three_cycle(e, m).unwrap();
            let c = classify(&s.params.to_exact().unwrap()).unwrap();
            assert_eq!((c.verdict, c.case), (s.expected.verdict, s.expected.case), "{e} {m}");
            assert!((c.l_infinity.unwrap() - three_cycle_l_infinity(e, m)).abs() < 1e-9);
        }
    }

    #[test]
    fn named_lookup() {
        let args = ScenarioArgs {
            gamma: Some(0.5),
            ..Default::default()
        };
        assert_eq!(named("selkov", &args).unwrap().expected.case, Some(CaseLabel::A));
        assert_eq!(named("c2b", &args).unwrap().expected.case, Some(CaseLabel::C2b));
        assert!(named("lotka", &args).is_err());
        assert!(named("nope", &args).is_err());
    }
}
