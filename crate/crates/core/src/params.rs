//! Parameter representations of planar S-systems.
//!
//! An S-system
//!
//! ```text
//! x1' = alpha1 x1^g11 x2^g12 - beta1 x1^h11 x2^h12
//! x2' = alpha2 x1^g21 x2^g22 - beta2 x1^h21 x2^h22
//! ```
//!
//! with a positive equilibrium is conjugate (after a logarithmic change of
//! coordinates and a per-axis scaling) to the exponential normal form
//!
//! ```text
//! u' = exp(a1 u + b1 v) - exp(a2 u + b2 v)
//! v' = exp(a3 u + b3 v) - exp(a4 u + b4 v)
//! ```
//!
//! on the whole plane. Everything downstream is phrased in terms of the four
//! exponent points `P_i = (a_i, b_i)`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rational_from_f64, Deadband, Scalar, Sign};

/// Relative residual accepted when checking a user-supplied equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SSystemSpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
}

impl SSystemSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
            if v <= 0.0 {
                return Err(Error::NonPositiveRate(name));
            }
        }
        for (name, v) in [
            ("g11", self.g11),
            ("g12", self.g12),
            ("g21", self.g21),
            ("g22", self.g22),
            ("h11", self.h11),
            ("h12", self.h12),
            ("h21", self.h21),
            ("h22", self.h22),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(())
    }

    /// Selkov's glycolysis model `x' = 1 - x y^gamma`, `y' = k (x y^gamma - y)`.
    pub fn selkov(k: f64, gamma: f64) -> Self {
        SSystemSpec {
            alpha1: 1.0,
            beta1: 1.0,
            g11: 0.0,
            g12: 0.0,
            h11: 1.0,
            h12: gamma,
            alpha2: k,
            beta2: k,
            g21: 1.0,
            g22: gamma,
            h21: 0.0,
            h22: 1.0,
        }
    }

    /// Lotka reactions `x' = x^alpha - x y^beta`, `y' = k (x y^beta - y)`.
    pub fn lotka(k: f64, alpha: f64, beta: f64) -> Self {
        SSystemSpec {
            alpha1: 1.0,
            beta1: 1.0,
            g11: alpha,
            g12: 0.0,
            h11: 1.0,
            h12: beta,
            alpha2: k,
            beta2: k,
            g21: 1.0,
            g22: beta,
            h21: 0.0,
            h22: 1.0,
        }
    }

    /// Right-hand side of the S-system.
    pub fn rhs(&self, x1: f64, x2: f64) -> [f64; 2] {
        [
            self.alpha1 * x1.powf(self.g11) * x2.powf(self.g12)
                - self.beta1 * x1.powf(self.h11) * x2.powf(self.h12),
            self.alpha2 * x1.powf(self.g21) * x2.powf(self.g22)
                - self.beta2 * x1.powf(self.h21) * x2.powf(self.h22),
        ]
    }

    /// Largest relative residual of the two equations at `(x1, x2)`,
    /// evaluated in log space.
    pub fn relative_residual(&self, x1: f64, x2: f64) -> f64 {
        let (l1, l2) = (x1.ln(), x2.ln());
        let row = |alpha: f64, g: (f64, f64), beta: f64, h: (f64, f64)| {
            let lp = alpha.ln() + g.0 * l1 + g.1 * l2;
            let lm = beta.ln() + h.0 * l1 + h.1 * l2;
            // |p - m| / max(p, m) = 1 - exp(-|lp - lm|)
            -(-(lp - lm).abs()).exp_m1()
        };
        row(self.alpha1, (self.g11, self.g12), self.beta1, (self.h11, self.h12)).max(row(
            self.alpha2,
            (self.g21, self.g22),
            self.beta2,
            (self.h21, self.h22),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositiveEquilibrium {
    pub x1_star: f64,
    pub x2_star: f64,
}

impl PositiveEquilibrium {
    pub fn new(x1_star: f64, x2_star: f64) -> Result<Self> {
        if !(x1_star > 0.0 && x2_star > 0.0) || !x1_star.is_finite() || !x2_star.is_finite() {
            return Err(Error::NonPositiveEquilibrium(x1_star, x2_star));
        }
        Ok(PositiveEquilibrium { x1_star, x2_star })
    }
}

/// Solution set of the positive-equilibrium equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "point", rename_all = "snake_case")]
pub enum EquilibriumSet {
    None,
    Unique(PositiveEquilibrium),
    /// A line (or the whole quadrant) of equilibria; carries one representative.
    Line(PositiveEquilibrium),
}

/// Exponent points `P_i = (a_i, b_i)` of the exponential normal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params<S = f64> {
    pub a: [S; 4],
    pub b: [S; 4],
}

pub type ExpParams = Params<f64>;
pub type ExactParams = Params<BigRational>;

impl<S: Scalar> Params<S> {
    pub fn new(a: [S; 4], b: [S; 4]) -> Self {
        Params { a, b }
    }

    pub fn from_points(p: [(S, S); 4]) -> Self {
        let [p1, p2, p3, p4] = p;
        Params {
            a: [p1.0, p2.0, p3.0, p4.0],
            b: [p1.1, p2.1, p3.1, p4.1],
        }
    }

    /// `P_i` with a zero-based index.
    pub fn point(&self, i: usize) -> (S, S) {
        (self.a[i].clone(), self.b[i].clone())
    }

    pub fn points(&self) -> [(S, S); 4] {
        [self.point(0), self.point(1), self.point(2), self.point(3)]
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(Scalar::is_finite)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("exponent point coordinate"))
        }
    }

    /// Largest absolute coordinate; sets the sign deadband.
    pub fn scale(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(Scalar::abs_f64)
            .fold(0.0, f64::max)
    }

    pub fn deadband(&self) -> Deadband {
        Deadband::new(self.scale())
    }

    pub fn to_f64(&self) -> ExpParams {
        Params {
            a: [0, 1, 2, 3].map(|i| self.a[i].to_f64()),
            b: [0, 1, 2, 3].map(|i| self.b[i].to_f64()),
        }
    }
}

impl ExpParams {
    /// Build from `a` and `b` arrays of plain numbers.
    pub fn from_arrays(a: [f64; 4], b: [f64; 4]) -> Self {
        Params { a, b }
    }

    /// The exact rational value of every coordinate.
    pub fn to_exact(&self) -> Result<ExactParams> {
        let conv = |x: f64| rational_from_f64(x).ok_or(Error::NonFinite("exponent point coordinate"));
        Ok(Params {
            a: [conv(self.a[0])?, conv(self.a[1])?, conv(self.a[2])?, conv(self.a[3])?],
            b: [conv(self.b[0])?, conv(self.b[1])?, conv(self.b[2])?, conv(self.b[3])?],
        })
    }
}

impl ExactParams {
    pub fn from_ints(a: [i64; 4], b: [i64; 4]) -> Self {
        Params {
            a: a.map(<BigRational as Scalar>::from_i64),
            b: b.map(<BigRational as Scalar>::from_i64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianSummary<S = f64> {
    pub j11: S,
    pub j12: S,
    pub j21: S,
    pub j22: S,
    pub det: S,
    pub trace: S,
    pub sign_pattern: [[Sign; 2]; 2],
}

impl<S: Scalar> JacobianSummary<S> {
    pub fn to_f64(&self) -> JacobianSummary<f64> {
        JacobianSummary {
            j11: self.j11.to_f64(),
            j12: self.j12.to_f64(),
            j21: self.j21.to_f64(),
            j22: self.j22.to_f64(),
            det: self.det.to_f64(),
            trace: self.trace.to_f64(),
            sign_pattern: self.sign_pattern,
        }
    }
}

/// Jacobian of the exponential normal form at the origin.
pub fn jacobian<S: Scalar>(params: &Params<S>) -> JacobianSummary<S> {
    let [a1, a2, a3, a4] = params.a.clone();
    let [b1, b2, b3, b4] = params.b.clone();
    let j11 = a1 - a2;
    let j12 = b1 - b2;
    let j21 = a3 - a4;
    let j22 = b3 - b4;
    let det = j11.clone() * j22.clone() - j12.clone() * j21.clone();
    let trace = j11.clone() + j22.clone();
    let db = params.deadband();
    let sign_pattern = [
        [db.sign(&j11, 1), db.sign(&j12, 1)],
        [db.sign(&j21, 1), db.sign(&j22, 1)],
    ];
    JacobianSummary {
        j11,
        j12,
        j21,
        j22,
        det,
        trace,
        sign_pattern,
    }
}

/// `det(P_j - P_i, P_k - P_i)`, twice the signed area of the triangle.
pub fn signed_area<S: Scalar>(pi: &(S, S), pj: &(S, S), pk: &(S, S)) -> S {
    let (ux, uy) = (pj.0.clone() - pi.0.clone(), pj.1.clone() - pi.1.clone());
    let (vx, vy) = (pk.0.clone() - pi.0.clone(), pk.1.clone() - pi.1.clone());
    ux * vy - uy * vx
}

/// Signed areas `c = (D(243), D(134), D(142), D(123))`.
///
/// `c` is orthogonal to `a`, `b` and `(1,1,1,1)`, and
/// `c1 + c2 = det J = -(c3 + c4)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVector<S = f64> {
    pub c: [S; 4],
}

impl<S: Scalar> CVector<S> {
    pub fn signs(&self, db: &Deadband) -> [Sign; 4] {
        [0, 1, 2, 3].map(|i| db.sign(&self.c[i], 2))
    }

    pub fn is_zero(&self, db: &Deadband) -> bool {
        self.signs(db).iter().all(|s| *s == Sign::Zero)
    }

    pub fn to_f64(&self) -> CVector<f64> {
        CVector {
            c: [0, 1, 2, 3].map(|i| self.c[i].to_f64()),
        }
    }

    pub fn sum(&self) -> S {
        self.c[0].clone() + self.c[1].clone() + self.c[2].clone() + self.c[3].clone()
    }

    pub fn dot(&self, v: &[S; 4]) -> S {
        (0..4)
            .map(|i| self.c[i].clone() * v[i].clone())
            .fold(S::zero(), |acc, x| acc + x)
    }
}

pub fn c_vector<S: Scalar>(params: &Params<S>) -> CVector<S> {
    let [p1, p2, p3, p4] = params.points();
    let c = CVector {
        c: [
            signed_area(&p2, &p4, &p3),
            signed_area(&p1, &p3, &p4),
            signed_area(&p1, &p4, &p2),
            signed_area(&p1, &p2, &p3),
        ],
    };
    debug_assert!({
        let db = params.deadband();
        db.is_zero(&c.sum(), 2)
    });
    c
}

/// Relative position of the four exponent points, read off the signs of `c`.
/// Indices are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointGeometry {
    /// Convex quadrangle; the points with equal sign of `c_i` form a diagonal.
    Quadrangle {
        diagonal1: (usize, usize),
        diagonal2: (usize, usize),
    },
    /// `inner` lies strictly inside the triangle of the other three.
    TriangleInterior { inner: usize },
    /// `point` lies inside the edge `edge` of the triangle formed with `apex`.
    TriangleEdge {
        point: usize,
        edge: (usize, usize),
        apex: usize,
    },
    /// Two points coincide; the remaining two complete a triangle.
    CoincidentVertex { pair: (usize, usize) },
}

pub fn sign_pattern_geometry(signs: [Sign; 4]) -> Result<PointGeometry> {
    let idx = |s: Sign| -> Vec<usize> { (0..4).filter(|&i| signs[i] == s).map(|i| i + 1).collect() };
    let (pos, neg, zero) = (idx(Sign::Pos), idx(Sign::Neg), idx(Sign::Zero));
    match (pos.len(), neg.len(), zero.len()) {
        (0, 0, 4) => Err(Error::CollinearPoints),
        (2, 2, 0) => Ok(PointGeometry::Quadrangle {
            diagonal1: (pos[0], pos[1]),
            diagonal2: (neg[0], neg[1]),
        }),
        (1, 3, 0) => Ok(PointGeometry::TriangleInterior { inner: pos[0] }),
        (3, 1, 0) => Ok(PointGeometry::TriangleInterior { inner: neg[0] }),
        (1, 2, 1) => Ok(PointGeometry::TriangleEdge {
            point: pos[0],
            edge: (neg[0], neg[1]),
            apex: zero[0],
        }),
        (2, 1, 1) => Ok(PointGeometry::TriangleEdge {
            point: neg[0],
            edge: (pos[0], pos[1]),
            apex: zero[0],
        }),
        (1, 1, 2) => Ok(PointGeometry::CoincidentVertex {
            pair: (pos[0], neg[0]),
        }),
        _ => Err(Error::Configuration(format!(
            "sign pattern {:?} cannot sum to zero",
            signs
        ))),
    }
}

/// Exponential normal form of `spec` around the positive equilibrium `eq`.
pub fn to_exponential(spec: &SSystemSpec, eq: &PositiveEquilibrium) -> Result<ExpParams> {
    spec.validate()?;
    let eq = PositiveEquilibrium::new(eq.x1_star, eq.x2_star)?;
    let residual = spec.relative_residual(eq.x1_star, eq.x2_star);
    if !(residual <= EQUILIBRIUM_TOLERANCE) {
        return Err(Error::NotAnEquilibrium {
            residual,
            tolerance: EQUILIBRIUM_TOLERANCE,
        });
    }
    let (l1, l2) = (eq.x1_star.ln(), eq.x2_star.ln());
    let gamma1 = (spec.alpha1.ln() + (spec.g11 - 1.0) * l1 + spec.g12 * l2).exp();
    let gamma2 = (spec.alpha2.ln() + spec.g21 * l1 + (spec.g22 - 1.0) * l2).exp();
    let params = Params {
        a: [
            gamma1 * (spec.g11 - 1.0),
            gamma1 * (spec.h11 - 1.0),
            gamma1 * spec.g21,
            gamma1 * spec.h21,
        ],
        b: [
            gamma2 * spec.g12,
            gamma2 * spec.h12,
            gamma2 * (spec.g22 - 1.0),
            gamma2 * (spec.h22 - 1.0),
        ],
    };
    params.check_finite()?;
    Ok(params)
}

/// Positive equilibria of the S-system.
///
/// Equating the two monomials of each row gives a linear system in
/// `(ln x1, ln x2)` with matrix `G - H` and right-hand side
/// `(ln(beta1/alpha1), ln(beta2/alpha2))`.
pub fn find_positive_equilibrium(spec: &SSystemSpec) -> EquilibriumSet {
    let m = [
        [spec.g11 - spec.h11, spec.g12 - spec.h12],
        [spec.g21 - spec.h21, spec.g22 - spec.h22],
    ];
    let rhs = [
        (spec.beta1 / spec.alpha1).ln(),
        (spec.beta2 / spec.alpha2).ln(),
    ];
    let scale = m
        .iter()
        .flatten()
        .chain(rhs.iter())
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let db = Deadband::new(scale);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];

    // equilibria outside the representable range count as absent
    let point = |l1: f64, l2: f64| PositiveEquilibrium::new(l1.exp(), l2.exp()).ok();

    if !db.is_zero(&det, 2) {
        let l1 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
        let l2 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
        if !(l1.is_finite() && l2.is_finite()) {
            return EquilibriumSet::None;
        }
        return point(l1, l2).map_or(EquilibriumSet::None, EquilibriumSet::Unique);
    }

    let row_zero = |r: usize| db.is_zero(&m[r][0], 1) && db.is_zero(&m[r][1], 1);
    match (row_zero(0), row_zero(1)) {
        (true, true) => {
            if db.is_zero(&rhs[0], 1) && db.is_zero(&rhs[1], 1) {
                point(0.0, 0.0).map_or(EquilibriumSet::None, EquilibriumSet::Line)
            } else {
                EquilibriumSet::None
            }
        }
        (z0, z1) => {
            // rank one: every nonzero row is a multiple of the pivot row
            let p = if z0 { 1 } else { 0 };
            let o = 1 - p;
            if z0 || z1 {
                if !db.is_zero(&rhs[o], 1) {
                    return EquilibriumSet::None;
                }
            } else {
                // consistency: rhs lies in the column space
                let k = if m[p][0].abs() >= m[p][1].abs() {
                    m[o][0] / m[p][0]
                } else {
                    m[o][1] / m[p][1]
                };
                if !db.is_zero(&(rhs[o] - k * rhs[p]), 1) {
                    return EquilibriumSet::None;
                }
            }
            // representative: ln x1 = 0 if the line allows it, else ln x2 = 0
            if !db.is_zero(&m[p][1], 1) {
                point(0.0, rhs[p] / m[p][1]).map_or(EquilibriumSet::None, EquilibriumSet::Line)
            } else {
                point(rhs[p] / m[p][0], 0.0).map_or(EquilibriumSet::None, EquilibriumSet::Line)
            }
        }
    }
}
