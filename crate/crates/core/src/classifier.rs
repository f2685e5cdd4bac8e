//! Exact permanence decision for the exponential normal form.
//!
//! The decision tree is total and its branches are mutually exclusive:
//!
//! 1. `det J <= 0`: not permanent (`det J = 0` is reported as degenerate).
//! 2. `J11 J22 >= 0`: the diagonal criterion (cases A, B1, B2). Permanence
//!    here coincides with global asymptotic stability of the origin.
//! 3. `J11 J22 < 0` with both interval orderings: a heteroclinic cycle at
//!    infinity whose character is the sign of `L∞`.
//! 4. Otherwise: the four opposite-sign cases C1..C4 with sub-cases a, b, c.
//!
//! Every `= 0` and equality branch is decided by the deadband of
//! [`Deadband`] for `f64` input, and exactly for rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    c_vector, find_positive_equilibrium, jacobian, to_exponential, CVector, EquilibriumSet,
    JacobianSummary, Params, SSystemSpec,
};
use crate::scalar::{Deadband, Scalar, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Permanent,
    NotPermanent,
    Undetermined,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Permanent => "Permanent",
            Verdict::NotPermanent => "NotPermanent",
            Verdict::Undetermined => "Undetermined",
            Verdict::Degenerate => "Degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    A,
    B1,
    B2,
    B3,
    B4,
    #[serde(rename = "Het-A")]
    HetA,
    #[serde(rename = "Het-B")]
    HetB,
    C1a,
    C1b,
    C1c,
    C2a,
    C2b,
    C2c,
    C3a,
    C3b,
    C3c,
    C4a,
    C4b,
    C4c,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 19] = [
        CaseLabel::A,
        CaseLabel::B1,
        CaseLabel::B2,
        CaseLabel::B3,
        CaseLabel::B4,
        CaseLabel::HetA,
        CaseLabel::HetB,
        CaseLabel::C1a,
        CaseLabel::C1b,
        CaseLabel::C1c,
        CaseLabel::C2a,
        CaseLabel::C2b,
        CaseLabel::C2c,
        CaseLabel::C3a,
        CaseLabel::C3b,
        CaseLabel::C3c,
        CaseLabel::C4a,
        CaseLabel::C4b,
        CaseLabel::C4c,
    ];

    /// Labels the classifier itself can emit (B3 and B4 are robust-only).
    pub const CLASSIFIER: [CaseLabel; 17] = [
        CaseLabel::A,
        CaseLabel::B1,
        CaseLabel::B2,
        CaseLabel::HetA,
        CaseLabel::HetB,
        CaseLabel::C1a,
        CaseLabel::C1b,
        CaseLabel::C1c,
        CaseLabel::C2a,
        CaseLabel::C2b,
        CaseLabel::C2c,
        CaseLabel::C3a,
        CaseLabel::C3b,
        CaseLabel::C3c,
        CaseLabel::C4a,
        CaseLabel::C4b,
        CaseLabel::C4c,
    ];

    pub fn name(self) -> &'static str {
        use CaseLabel::*;
        match self {
            A => "A",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            B4 => "B4",
            HetA => "Het-A",
            HetB => "Het-B",
            C1a => "C1a",
            C1b => "C1b",
            C1c => "C1c",
            C2a => "C2a",
            C2b => "C2b",
            C2c => "C2c",
            C3a => "C3a",
            C3b => "C3b",
            C3c => "C3c",
            C4a => "C4a",
            C4b => "C4b",
            C4c => "C4c",
        }
    }

    /// Sub-case letter of an opposite-sign label.
    pub fn subcase(self) -> Option<char> {
        let n = self.name();
        if n.starts_with('C') {
            n.chars().last()
        } else {
            None
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Machine-readable reason for a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    DetZero,
    AllCZero,
    NoEquilibrium,
    DetNegative,
    DiagonalCriterionHolds,
    DiagonalCriterionFails,
    HeteroclinicRepelling,
    HeteroclinicAttracting,
    HeteroclinicMarginal,
    SubcaseHolds,
    NoSubcaseHolds,
    NoCaseMatches,
}

impl Reason {
    pub fn code(self) -> &'static str {
        use Reason::*;
        match self {
            DetZero => "det-zero",
            AllCZero => "all-c-zero",
            NoEquilibrium => "no-equilibrium",
            DetNegative => "det-negative",
            DiagonalCriterionHolds => "diagonal-criterion-holds",
            DiagonalCriterionFails => "diagonal-criterion-fails",
            HeteroclinicRepelling => "heteroclinic-repelling",
            HeteroclinicAttracting => "heteroclinic-attracting",
            HeteroclinicMarginal => "heteroclinic-marginal",
            SubcaseHolds => "subcase-holds",
            NoSubcaseHolds => "no-subcase-holds",
            NoCaseMatches => "no-case-matches",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub case: Option<CaseLabel>,
    pub reason: Reason,
    /// Absent only when the S-system has no positive equilibrium.
    pub jacobian: Option<JacobianSummary<f64>>,
    pub c: Option<CVector<f64>>,
    pub l_infinity: Option<f64>,
    pub l: Option<f64>,
    pub gas: Option<bool>,
}

impl Classification {
    pub fn is_permanent(&self) -> bool {
        self.verdict == Verdict::Permanent
    }

    fn new<S: Scalar>(j: &JacobianSummary<S>, c: &CVector<S>, verdict: Verdict, reason: Reason) -> Self {
        Classification {
            verdict,
            case: None,
            reason,
            jacobian: Some(j.to_f64()),
            c: Some(c.to_f64()),
            l_infinity: None,
            l: None,
            gas: None,
        }
    }

    fn with_case(mut self, case: CaseLabel) -> Self {
        self.case = Some(case);
        self
    }
}

/// Which of the two heteroclinic configurations applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeteroclinicCase {
    A,
    B,
}

/// The four-factor expression defining `L∞`, without configuration checks.
pub fn l_infinity_expr<S: Scalar>(p: &Params<S>, case: HeteroclinicCase) -> S {
    let [a1, a2, a3, a4] = p.a.clone();
    let [b1, b2, b3, b4] = p.b.clone();
    let first = (a3.clone() - a1.clone())
        * (b2.clone() - b3.clone())
        * (a2.clone() - a4.clone())
        * (b4.clone() - b1.clone());
    let second = (b1 - b3) * (a2 - a3) * (b4 - b2) * (a4 - a1);
    match case {
        HeteroclinicCase::A => first - second,
        HeteroclinicCase::B => second - first,
    }
}

fn min_max<S: Scalar>(x: &S, y: &S) -> (S, S) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

/// Both interval nestings: `[a1,a2]` inside `[a3,a4]` and `[b3,b4]` inside `[b1,b2]`.
fn heteroclinic_orderings<S: Scalar>(p: &Params<S>, db: &Deadband) -> bool {
    let (a12lo, a12hi) = min_max(&p.a[0], &p.a[1]);
    let (a34lo, a34hi) = min_max(&p.a[2], &p.a[3]);
    let (b12lo, b12hi) = min_max(&p.b[0], &p.b[1]);
    let (b34lo, b34hi) = min_max(&p.b[2], &p.b[3]);
    db.le(&a34lo, &a12lo) && db.le(&a12hi, &a34hi) && db.le(&b12lo, &b34lo) && db.le(&b34hi, &b12hi)
}

fn heteroclinic_case(j: &JacobianSummary<impl Scalar>) -> HeteroclinicCase {
    let [[_, s12], [s21, _]] = j.sign_pattern;
    if s12 == Sign::Neg || s21 == Sign::Pos {
        HeteroclinicCase::A
    } else {
        HeteroclinicCase::B
    }
}

/// `L∞` of the heteroclinic cycle at infinity.
///
/// Fails when the off-diagonal signs and interval orderings do not match
/// either configuration.
pub fn l_infinity<S: Scalar>(params: &Params<S>) -> Result<S> {
    params.check_finite()?;
    let db = params.deadband();
    let j = jacobian(params);
    let [[_, s12], [s21, _]] = j.sign_pattern;
    let case = match (s12, s21) {
        (Sign::Neg, Sign::Pos) => HeteroclinicCase::A,
        (Sign::Pos, Sign::Neg) => HeteroclinicCase::B,
        _ => {
            return Err(Error::Configuration(format!(
                "off-diagonal signs ({s12},{s21}) match neither heteroclinic case"
            )))
        }
    };
    if !heteroclinic_orderings(params, &db) {
        return Err(Error::Configuration(
            "interval orderings of the heteroclinic configuration fail".into(),
        ));
    }
    Ok(l_infinity_expr(params, case))
}

/// `(L+1)^(L+1) / L^L`, evaluated in log space.
pub fn ratio_bound(l: f64) -> f64 {
    log_ratio_bound(l).exp()
}

fn log_ratio_bound(l: f64) -> f64 {
    let tail = if l > 0.0 { l * l.ln() } else { 0.0 };
    (l + 1.0) * l.ln_1p() - tail
}

const EXACT_EXPONENT_LIMIT: u64 = 4096;
const EXACT_BIT_LIMIT: u64 = 1 << 22;

/// Decides `m/n < ((p+q)/q)^((p+q)/q) / (p/q)^(p/q)` exactly by raising both
/// sides to the power `q`. Returns `None` when the integers are too large.
fn exact_below_bound(m: &BigInt, n: &BigInt, p: &BigInt, q: &BigInt) -> Option<bool> {
    if !(m.is_positive() && n.is_positive() && p.is_positive() && q.is_positive()) {
        return None;
    }
    let (pu, qu) = (p.to_u64()?, q.to_u64()?);
    if pu + qu > EXACT_EXPONENT_LIMIT {
        return None;
    }
    let bits = m.bits().max(n.bits());
    if qu.saturating_mul(bits) > EXACT_BIT_LIMIT {
        return None;
    }
    let (pe, qe) = (pu as u32, qu as u32);
    let lhs = num_traits::pow(m.clone(), qe as usize)
        * num_traits::pow(p.clone(), pe as usize)
        * num_traits::pow(q.clone(), qe as usize);
    let rhs = num_traits::pow(n.clone(), qe as usize) * num_traits::pow(p.clone() + q.clone(), (pe + qe) as usize);
    Some(lhs < rhs)
}

/// Strict comparison `slope < (L+1)^(L+1)/L^L` for positive `slope` and `L`.
///
/// Rational input is compared exactly when the integers stay small; otherwise
/// the comparison is made in log space and near-equality counts as not less.
pub fn slope_below_bound<S: Scalar>(slope: &S, l: &S) -> bool {
    if let (Some((m, n)), Some((p, q))) = (slope.as_ratio(), l.as_ratio()) {
        if let Some(ans) = exact_below_bound(&m, &n, &p, &q) {
            return ans;
        }
    }
    let (s, l) = (slope.to_f64(), l.to_f64());
    if !(s > 0.0) {
        return true;
    }
    let lhs = s.ln();
    let rhs = log_ratio_bound(l);
    lhs < rhs - 1e-12 * rhs.abs().max(1.0)
}

/// Outcome of a ratio-bound sub-case test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBound {
    pub holds: bool,
    pub l: f64,
    pub slope: f64,
    pub bound: f64,
}

/// Which opposite-sign case shape `sgn J` and the strict ordering select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    C1,
    C2,
    C3,
    C4,
}

impl Shape {
    fn label(self, sub: char) -> CaseLabel {
        use CaseLabel::*;
        match (self, sub) {
            (Shape::C1, 'a') => C1a,
            (Shape::C1, 'b') => C1b,
            (Shape::C1, _) => C1c,
            (Shape::C2, 'a') => C2a,
            (Shape::C2, 'b') => C2b,
            (Shape::C2, _) => C2c,
            (Shape::C3, 'a') => C3a,
            (Shape::C3, 'b') => C3b,
            (Shape::C3, _) => C3c,
            (Shape::C4, 'a') => C4a,
            (Shape::C4, 'b') => C4b,
            (Shape::C4, _) => C4c,
        }
    }

    fn of_label(case: CaseLabel) -> Option<Shape> {
        use CaseLabel::*;
        match case {
            C1a | C1b | C1c => Some(Shape::C1),
            C2a | C2b | C2c => Some(Shape::C2),
            C3a | C3b | C3c => Some(Shape::C3),
            C4a | C4b | C4c => Some(Shape::C4),
            _ => None,
        }
    }

    /// Positive slope `num/den` compared against the bound and against one.
    fn slope<S: Scalar>(self, p: &Params<S>) -> (S, S) {
        let [a1, a2, a3, a4] = p.a.clone();
        let [b1, b2, b3, b4] = p.b.clone();
        match self {
            Shape::C1 => (a1 - a2, b2 - b1),
            Shape::C2 => (a1 - a2, b1 - b2),
            Shape::C3 => (b3 - b4, a3 - a4),
            Shape::C4 => (b3 - b4, a4 - a3),
        }
    }

    /// Sign patterns of (b) with the indices `(i, j)` of `L = c_i / c_j`.
    fn b_patterns(self) -> [([Sign; 4], (usize, usize)); 2] {
        use Sign::*;
        match self {
            Shape::C1 => [([Pos, Neg, Neg, Zero], (1, 2)), ([Neg, Pos, Zero, Neg], (0, 3))],
            Shape::C2 => [([Neg, Pos, Neg, Zero], (0, 2)), ([Pos, Neg, Zero, Neg], (1, 3))],
            Shape::C3 => [([Zero, Pos, Neg, Pos], (3, 1)), ([Pos, Zero, Pos, Neg], (2, 0))],
            Shape::C4 => [([Zero, Pos, Pos, Neg], (2, 1)), ([Pos, Zero, Neg, Pos], (3, 0))],
        }
    }

    fn c_patterns(self) -> [[Sign; 4]; 2] {
        use Sign::*;
        match self {
            Shape::C1 => [[Pos, Zero, Neg, Zero], [Zero, Pos, Zero, Neg]],
            Shape::C2 | Shape::C3 => [[Zero, Pos, Neg, Zero], [Pos, Zero, Zero, Neg]],
            Shape::C4 => [[Zero, Pos, Zero, Neg], [Pos, Zero, Neg, Zero]],
        }
    }

    fn a_holds(self, cs: [Sign; 4]) -> bool {
        match self {
            Shape::C1 | Shape::C2 => cs[2] == Sign::Neg && cs[3] == Sign::Neg,
            Shape::C3 | Shape::C4 => cs[0] == Sign::Pos && cs[1] == Sign::Pos,
        }
    }
}

fn match_shape<S: Scalar>(p: &Params<S>, j: &JacobianSummary<S>, db: &Deadband) -> Option<Shape> {
    use Sign::*;
    let [a1, a2, a3, a4] = &p.a;
    let [b1, b2, b3, b4] = &p.b;
    match j.sign_pattern {
        [[Pos, Neg], [Pos, Neg]] if db.le(a4, a2) && db.lt(a2, a1) && db.le(a1, a3) => Some(Shape::C1),
        [[Pos, Pos], [Neg, Neg]] if db.le(a3, a2) && db.lt(a2, a1) && db.le(a1, a4) => Some(Shape::C2),
        [[Neg, Neg], [Pos, Pos]] if db.le(b1, b4) && db.lt(b4, b3) && db.le(b3, b2) => Some(Shape::C3),
        [[Neg, Pos], [Neg, Pos]] if db.le(b2, b4) && db.lt(b4, b3) && db.le(b3, b1) => Some(Shape::C4),
        _ => None,
    }
}

fn b_subcase<S: Scalar>(shape: Shape, p: &Params<S>, c: &CVector<S>, cs: [Sign; 4]) -> Option<RatioBound> {
    let (_, (i, j)) = shape.b_patterns().into_iter().find(|(pat, _)| *pat == cs)?;
    let l = c.c[i].clone() / c.c[j].clone();
    let (num, den) = shape.slope(p);
    let slope = num / den;
    let holds = slope_below_bound(&slope, &l);
    let lf = l.to_f64();
    Some(RatioBound {
        holds,
        l: lf,
        slope: slope.to_f64(),
        bound: ratio_bound(lf),
    })
}

/// The ratio-bound sub-case (b) for the case shape of `case`.
pub fn ratio_bound_check<S: Scalar>(params: &Params<S>, c: &CVector<S>, case: CaseLabel) -> Result<RatioBound> {
    let shape = Shape::of_label(case)
        .ok_or_else(|| Error::Configuration(format!("{case} is not an opposite-sign case")))?;
    let db = params.deadband();
    b_subcase(shape, params, c, c.signs(&db)).ok_or_else(|| {
        Error::Configuration(format!(
            "sign pattern of c does not match the ratio-bound patterns of {case}"
        ))
    })
}

/// Permanence verdict with the governing case and diagnostics.
pub fn classify<S: Scalar>(params: &Params<S>) -> Result<Classification> {
    params.check_finite()?;
    let db = params.deadband();
    let j = jacobian(params);
    let c = c_vector(params);
    let cs = c.signs(&db);

    match db.sign(&j.det, 2) {
        Sign::Zero => {
            let reason = if c.is_zero(&db) { Reason::AllCZero } else { Reason::DetZero };
            return Ok(Classification::new(&j, &c, Verdict::Degenerate, reason));
        }
        Sign::Neg => return Ok(Classification::new(&j, &c, Verdict::NotPermanent, Reason::DetNegative)),
        Sign::Pos => {}
    }

    let [[s11, _], [_, s22]] = j.sign_pattern;
    if s11 * s22 != Sign::Neg {
        return Ok(diagonal_criterion(params, &j, &c, &db));
    }

    if heteroclinic_orderings(params, &db) {
        let case = heteroclinic_case(&j);
        let l_inf = l_infinity_expr(params, case);
        let (verdict, reason) = match db.sign(&l_inf, 4) {
            Sign::Pos => (Verdict::Permanent, Reason::HeteroclinicRepelling),
            Sign::Neg => (Verdict::NotPermanent, Reason::HeteroclinicAttracting),
            Sign::Zero => (Verdict::Undetermined, Reason::HeteroclinicMarginal),
        };
        let label = match case {
            HeteroclinicCase::A => CaseLabel::HetA,
            HeteroclinicCase::B => CaseLabel::HetB,
        };
        let mut out = Classification::new(&j, &c, verdict, reason).with_case(label);
        out.l_infinity = Some(l_inf.to_f64());
        return Ok(out);
    }

    let Some(shape) = match_shape(params, &j, &db) else {
        return Ok(Classification::new(&j, &c, Verdict::NotPermanent, Reason::NoCaseMatches));
    };

    if shape.a_holds(cs) {
        return Ok(Classification::new(&j, &c, Verdict::Permanent, Reason::SubcaseHolds).with_case(shape.label('a')));
    }
    if let Some(rb) = b_subcase(shape, params, &c, cs) {
        let mut out = if rb.holds {
            Classification::new(&j, &c, Verdict::Permanent, Reason::SubcaseHolds).with_case(shape.label('b'))
        } else {
            Classification::new(&j, &c, Verdict::NotPermanent, Reason::NoSubcaseHolds)
        };
        out.l = Some(rb.l);
        return Ok(out);
    }
    if shape.c_patterns().contains(&cs) {
        let (num, den) = shape.slope(params);
        if db.le(&num, &den) && db.sign(&j.trace, 1) == Sign::Neg {
            return Ok(Classification::new(&j, &c, Verdict::Permanent, Reason::SubcaseHolds).with_case(shape.label('c')));
        }
    }
    Ok(Classification::new(&j, &c, Verdict::NotPermanent, Reason::NoSubcaseHolds))
}

fn diagonal_criterion<S: Scalar>(
    p: &Params<S>,
    j: &JacobianSummary<S>,
    c: &CVector<S>,
    db: &Deadband,
) -> Classification {
    use Sign::*;
    let [[s11, _], [_, s22]] = j.sign_pattern;
    let between = |x: &S, y: &S, lo: &S, hi: &S| {
        let (lo, hi) = min_max(lo, hi);
        db.le(&lo, x) && db.le(x, &hi) && db.le(&lo, y) && db.le(y, &hi)
    };
    let case = match (s11, s22) {
        (Neg, Neg) => Some(CaseLabel::A),
        (Zero, Neg) if between(&p.a[0], &p.a[1], &p.a[2], &p.a[3]) => Some(CaseLabel::B1),
        (Neg, Zero) if between(&p.b[2], &p.b[3], &p.b[0], &p.b[1]) => Some(CaseLabel::B2),
        _ => None,
    };
    let mut out = match case {
        Some(label) => Classification::new(j, c, Verdict::Permanent, Reason::DiagonalCriterionHolds).with_case(label),
        None => Classification::new(j, c, Verdict::NotPermanent, Reason::DiagonalCriterionFails),
    };
    out.gas = Some(case.is_some());
    out
}

/// Cases of robust permanence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RobustCase {
    A,
    B1,
    B2,
    B3,
    B4,
    C1,
    C2,
    C3,
    C4,
}

impl fmt::Display for RobustCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Whether permanence survives every small perturbation of the eight
/// coordinates, and the case that guarantees it.
pub fn robust_permanence<S: Scalar>(params: &Params<S>) -> Result<Option<RobustCase>> {
    use Sign::*;
    params.check_finite()?;
    let db = params.deadband();
    let j = jacobian(params);
    if db.sign(&j.det, 2) != Pos {
        return Ok(None);
    }
    let cs = c_vector(params).signs(&db);
    let [a1, a2, a3, a4] = &params.a;
    let [b1, b2, b3, b4] = &params.b;
    let lt = |x: &S, y: &S| db.lt(x, y);
    let chain = |xs: [&S; 4]| lt(xs[0], xs[1]) && lt(xs[1], xs[2]) && lt(xs[2], xs[3]);
    let l_pos = |case: HeteroclinicCase| db.sign(&l_infinity_expr(params, case), 4) == Pos;

    let out = match j.sign_pattern {
        [[Neg, _], [_, Neg]] => Some(RobustCase::A),
        [[Zero, Neg], [Pos, Neg]] if lt(a4, a2) && db.eq(a2, a1) && lt(a1, a3) => Some(RobustCase::B1),
        [[Zero, Pos], [Neg, Neg]] if lt(a3, a2) && db.eq(a2, a1) && lt(a1, a4) => Some(RobustCase::B2),
        [[Neg, Pos], [Neg, Zero]] if lt(b2, b4) && db.eq(b4, b3) && lt(b3, b1) => Some(RobustCase::B3),
        [[Neg, Neg], [Pos, Zero]] if lt(b1, b4) && db.eq(b4, b3) && lt(b3, b2) => Some(RobustCase::B4),
        [[Pos, Neg], [Pos, Neg]]
            if chain([a4, a2, a1, a3])
                && (cs[2], cs[3]) == (Neg, Neg)
                && (!chain([b1, b3, b4, b2]) || l_pos(HeteroclinicCase::A)) =>
        {
            Some(RobustCase::C1)
        }
        [[Pos, Pos], [Neg, Neg]]
            if chain([a3, a2, a1, a4])
                && (cs[2], cs[3]) == (Neg, Neg)
                && (!chain([b2, b3, b4, b1]) || l_pos(HeteroclinicCase::B)) =>
        {
            Some(RobustCase::C2)
        }
        [[Neg, Neg], [Pos, Pos]]
            if chain([b1, b4, b3, b2])
                && (cs[0], cs[1]) == (Pos, Pos)
                && (!chain([a4, a1, a2, a3]) || l_pos(HeteroclinicCase::A)) =>
        {
            Some(RobustCase::C3)
        }
        [[Neg, Pos], [Neg, Pos]]
            if chain([b2, b4, b3, b1])
                && (cs[0], cs[1]) == (Pos, Pos)
                && (!chain([a3, a1, a2, a4]) || l_pos(HeteroclinicCase::B)) =>
        {
            Some(RobustCase::C4)
        }
        _ => None,
    };
    Ok(out)
}

/// Classify an S-system through its positive equilibrium.
pub fn classify_s_system(spec: &SSystemSpec) -> Result<Classification> {
    spec.validate()?;
    let eq = match find_positive_equilibrium(spec) {
        EquilibriumSet::None => {
            return Ok(Classification {
                verdict: Verdict::Degenerate,
                case: None,
                reason: Reason::NoEquilibrium,
                jacobian: None,
                c: None,
                l_infinity: None,
                l: None,
                gas: None,
            })
        }
        EquilibriumSet::Unique(e) | EquilibriumSet::Line(e) => e,
    };
    let params = to_exponential(spec, &eq)?;
    classify(&params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ExactParams, ExpParams};
    use crate::scalar::ratio;

    fn selkov(k: f64, g: f64) -> ExpParams {
        ExpParams::from_arrays([-1.0, 0.0, 1.0, 0.0], [0.0, k * g, k * (g - 1.0), 0.0])
    }

    fn lotka(k: f64, al: f64, be: f64) -> ExpParams {
        ExpParams::from_arrays([al - 1.0, 0.0, 1.0, 0.0], [0.0, k * be, k * (be - 1.0), 0.0])
    }

    fn section7(b2: f64) -> ExpParams {
        ExpParams::from_arrays([0.0, -8.0, 10.0, -20.0], [0.0, b2, 20.0, 28.0])
    }

    #[test]
    fn selkov_cases() {
        let c = classify(&selkov(1.0, 0.5)).unwrap();
        assert_eq!((c.verdict, c.case), (Verdict::Permanent, Some(CaseLabel::A)));
        assert_eq!(c.gas, Some(true));
        let c = classify(&selkov(1.0, 1.0)).unwrap();
        assert_eq!((c.verdict, c.case), (Verdict::Permanent, Some(CaseLabel::B2)));
        let c = classify(&selkov(1.0, 2.0)).unwrap();
        assert_eq!(c.verdict, Verdict::NotPermanent);
        assert_eq!(c.reason, Reason::NoSubcaseHolds);
    }

    #[test]
    fn lotka_boundary_clause() {
        let c = classify(&lotka(1.0, 1.5, 0.5)).unwrap();
        assert_eq!((c.verdict, c.case), (Verdict::Permanent, Some(CaseLabel::C1b)));
        assert_eq!(c.l, Some(1.0));
        let c = classify(&lotka(0.2, 1.5, 0.5)).unwrap();
        assert_eq!(c.verdict, Verdict::NotPermanent);
        let c = classify(&lotka(0.25, 1.5, 0.5)).unwrap();
        assert_eq!(c.verdict, Verdict::NotPermanent);
    }

    #[test]
    fn section7_baseline_and_perturbations() {
        let c = classify(&section7(35.0)).unwrap();
        assert_eq!((c.verdict, c.case), (Verdict::Undetermined, Some(CaseLabel::HetA)));
        assert_eq!(c.l_infinity, Some(0.0));
        let c = classify(&section7(35.0 - 0.01)).unwrap();
        assert_eq!(c.verdict, Verdict::Permanent);
        assert!((c.l_infinity.unwrap() - 38.4).abs() < 1e-9);
        let c = classify(&section7(35.1)).unwrap();
        assert_eq!(c.verdict, Verdict::NotPermanent);
    }

    #[test]
    fn l_infinity_misuse_is_an_error() {
        assert!(matches!(l_infinity(&selkov(1.0, 0.5)), Err(Error::Configuration(_))));
        let p = ExactParams::new(
            [ratio(0, 1), ratio(-8, 1), ratio(10, 1), ratio(-20, 1)],
            [ratio(0, 1), ratio(35, 1), ratio(20, 1), ratio(28, 1)],
        );
        assert_eq!(l_infinity(&p).unwrap(), ratio(0, 1));
    }

    #[test]
    fn ratio_bound_values() {
        assert!((ratio_bound(1.0) - 4.0).abs() < 1e-14);
        let mut last = 0.0;
        for i in 1..50 {
            let b = ratio_bound(i as f64 * 0.37);
            assert!(b > last);
            last = b;
        }
        // exact equality at L = 1, slope 4
        assert!(!slope_below_bound(&ratio(4, 1), &ratio(1, 1)));
        assert!(slope_below_bound(&ratio(399_999, 100_000), &ratio(1, 1)));
        // L = 1/2: bound = 1.5^1.5 / 0.5^0.5 = 27^(1/2)/2 ... squared: 27/4
        assert!(slope_below_bound(&ratio(2598, 1000), &ratio(1, 2)));
        assert!(!slope_below_bound(&ratio(2599, 1000), &ratio(1, 2)));
        assert!(!slope_below_bound(&4.0, &1.0));
    }

    #[test]
    fn degenerate_reasons() {
        let c = classify(&ExpParams::from_arrays([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 2.0, 3.0])).unwrap();
        assert_eq!((c.verdict, c.reason), (Verdict::Degenerate, Reason::AllCZero));
        let c = classify(&ExpParams::from_arrays([1.0, 1.0, 0.0, 0.0], [0.0, 1.0, 0.0, 5.0])).unwrap();
        assert_eq!((c.verdict, c.reason), (Verdict::Degenerate, Reason::DetZero));
        assert!(classify(&ExpParams::from_arrays([f64::NAN, 0.0, 0.0, 0.0], [0.0; 4])).is_err());
    }

    #[test]
    fn robust_examples() {
        assert_eq!(robust_permanence(&selkov(1.0, 0.5)).unwrap(), Some(RobustCase::A));
        assert_eq!(robust_permanence(&selkov(1.0, 1.0)).unwrap(), None);
        assert_eq!(robust_permanence(&section7(34.99)).unwrap(), Some(RobustCase::C1));
        assert_eq!(robust_permanence(&section7(35.0)).unwrap(), None);
    }

    #[test]
    fn s_system_entry_point() {
        let c = classify_s_system(&SSystemSpec::selkov(1.0, 0.5)).unwrap();
        assert_eq!(c.verdict, Verdict::Permanent);
        let c = classify_s_system(&SSystemSpec::lotka(1.0, 0.5, 2.0)).unwrap();
        assert_eq!(c.verdict, Verdict::NotPermanent);
        let mut none = SSystemSpec::selkov(1.0, 0.5);
        none.g11 = none.h11;
        none.g12 = none.h12;
        none.beta1 = 2.0;
        let c = classify_s_system(&none).unwrap();
        assert_eq!((c.verdict, c.reason), (Verdict::Degenerate, Reason::NoEquilibrium));
        assert!(!c.is_permanent());
    }
}
