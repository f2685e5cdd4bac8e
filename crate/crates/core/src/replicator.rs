//! Replicator embedding on the 3-simplex.
//!
//! With `z_i = exp(a_i u + b_i v)` and `x = z / sum(z)` the exponential normal
//! form becomes the replicator equation `x_i' = x_i [(Ax)_i - x.Ax]` restricted
//! to the surface `S = {Q = 1}`, where `Q = prod x_i^{c_i}` is a constant of
//! motion. Corners, edges and facets carry 1-based labels (`E_1`, `F_13`, ...)
//! in reports; arrays are indexed from zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{c_vector, jacobian, CVector, ExpParams};
use crate::scalar::{Deadband, Sign};

pub type Matrix4 = [[f64; 4]; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicatorSystem {
    pub matrix: Matrix4,
    pub c: CVector<f64>,
    pub source: ExpParams,
}

impl ReplicatorSystem {
    /// Payoff `A[i][j]` with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i - 1][j - 1]
    }

    pub fn deadband(&self) -> Deadband {
        self.source.deadband()
    }
}

/// Reduced payoff matrix: `A[i][0] = a_i - a_1`, `A[i][1] = a_2 - a_i`,
/// `A[i][2] = b_i - b_3`, `A[i][3] = b_4 - b_i`.
pub fn embed(params: &ExpParams) -> ReplicatorSystem {
    let (a, b) = (&params.a, &params.b);
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        m[i] = [a[i] - a[0], a[1] - a[i], b[i] - b[2], b[3] - b[i]];
        m[i][i] = 0.0;
    }
    ReplicatorSystem {
        matrix: m,
        c: c_vector(params),
        source: params.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexState {
    pub x: [f64; 4],
}

impl SimplexState {
    /// Normalizes a non-negative vector with positive sum.
    pub fn new(x: [f64; 4]) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::OutOfDomain);
        }
        let s: f64 = x.iter().sum();
        if !(s > 0.0) {
            return Err(Error::OutOfDomain);
        }
        Ok(SimplexState { x: x.map(|v| v / s) })
    }

    pub fn barycenter() -> Self {
        SimplexState { x: [0.25; 4] }
    }

    /// Corner `E_k`, 1-based.
    pub fn corner(k: usize) -> Self {
        let mut x = [0.0; 4];
        x[k - 1] = 1.0;
        SimplexState { x }
    }

    pub fn is_interior(&self) -> bool {
        self.x.iter().all(|v| *v > 0.0)
    }

    /// 1-based indices with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..4).filter(|&i| self.x[i] > 0.0).map(|i| i + 1).collect()
    }
}

fn mat_vec(m: &Matrix4, x: &[f64; 4]) -> [f64; 4] {
    [0, 1, 2, 3].map(|i| (0..4).map(|j| m[i][j] * x[j]).sum())
}

/// Replicator field at an arbitrary point of `R^4` (not only the simplex).
pub fn replicator_field(m: &Matrix4, x: &[f64; 4]) -> [f64; 4] {
    let ax = mat_vec(m, x);
    let mean: f64 = (0..4).map(|i| x[i] * ax[i]).sum();
    [0, 1, 2, 3].map(|i| x[i] * (ax[i] - mean))
}

pub fn vector_field(sys: &ReplicatorSystem, x: &SimplexState) -> [f64; 4] {
    replicator_field(&sys.matrix, &x.x)
}

/// `ln Q(x) = sum c_i ln x_i`.
pub fn log_invariant_q(sys: &ReplicatorSystem, x: &SimplexState) -> Result<f64> {
    if !x.is_interior() {
        return Err(Error::OutOfDomain);
    }
    Ok((0..4).map(|i| sys.c.c[i] * x.x[i].ln()).sum())
}

/// `Q(x) = prod x_i^{c_i}`, evaluated in log space.
pub fn invariant_q(sys: &ReplicatorSystem, x: &SimplexState) -> Result<f64> {
    log_invariant_q(sys, x).map(f64::exp)
}

/// Softmax of `a_i u + b_i v`; the image of the plane is the surface `S`.
pub fn chart_to_simplex(params: &ExpParams, u: f64, v: f64) -> SimplexState {
    let e = [0, 1, 2, 3].map(|i| params.a[i] * u + params.b[i] * v);
    softmax(&e)
}

pub(crate) fn softmax(e: &[f64; 4]) -> SimplexState {
    let m = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z = e.map(|v| (v - m).exp());
    let s: f64 = z.iter().sum();
    SimplexState { x: z.map(|v| v / s) }
}

/// Eigenvalues at the corner `E_k` toward every other corner `E_l`: `A[l][k]`.
pub fn corner_eigenvalues(sys: &ReplicatorSystem, k: usize) -> Vec<(usize, f64)> {
    (1..=4).filter(|&l| l != k).map(|l| (l, sys.entry(l, k))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEquilibrium {
    pub edge: (usize, usize),
    pub coords: SimplexState,
    pub internal_eigenvalue: f64,
    pub external_eigenvalues: Vec<(usize, f64)>,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeInventory {
    pub equilibria: Vec<EdgeEquilibrium>,
    /// Edges made entirely of equilibria (`A_ij = A_ji = 0`).
    pub continuum_edges: Vec<(usize, usize)>,
    /// The segment from `E_12` to `E_34` consists of equilibria.
    pub segment_e12_e34: bool,
}

impl EdgeInventory {
    pub fn get(&self, i: usize, j: usize) -> Option<&EdgeEquilibrium> {
        self.equilibria.iter().find(|e| e.edge == (i.min(j), i.max(j)))
    }
}

pub const EDGES: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

/// External eigenvalue at `E_ij` toward `E_k`.
pub fn external_eigenvalue(sys: &ReplicatorSystem, i: usize, j: usize, k: usize) -> f64 {
    let (aij, aji) = (sys.entry(i, j), sys.entry(j, i));
    (sys.entry(k, i) * aij + sys.entry(k, j) * aji - aij * aji) / (aij + aji)
}

pub fn edge_equilibria(sys: &ReplicatorSystem) -> EdgeInventory {
    let db = sys.deadband();
    let mut equilibria = Vec::new();
    let mut continuum_edges = Vec::new();
    for (i, j) in EDGES {
        let (aij, aji) = (sys.entry(i, j), sys.entry(j, i));
        let (si, sj) = (db.sign(&aij, 1), db.sign(&aji, 1));
        if si == Sign::Zero && sj == Sign::Zero {
            continuum_edges.push((i, j));
            continue;
        }
        if si != sj || si == Sign::Zero {
            continue;
        }
        let xi = aij / (aij + aji);
        let mut x = [0.0; 4];
        x[i - 1] = xi;
        x[j - 1] = 1.0 - xi;
        let external: Vec<(usize, f64)> = (1..=4)
            .filter(|&k| k != i && k != j)
            .map(|k| (k, external_eigenvalue(sys, i, j, k)))
            .collect();
        let saturated = external.iter().all(|(_, g)| db.sign(g, 2) != Sign::Pos);
        equilibria.push(EdgeEquilibrium {
            edge: (i, j),
            coords: SimplexState { x },
            internal_eigenvalue: -aij * aji / (aij + aji),
            external_eigenvalues: external,
            saturated,
        });
    }
    EdgeInventory {
        equilibria,
        continuum_edges,
        segment_e12_e34: true,
    }
}

/// Closed-form external eigenvalues of the four edges joining `{1,2}` to `{3,4}`,
/// expressed through `c`. Entries are `((i, j), k, value)`; `None` when the
/// denominator vanishes.
pub fn gamma_closed_forms(params: &ExpParams) -> Vec<((usize, usize), usize, Option<f64>)> {
    let c = c_vector(params).c;
    let (a, b) = (&params.a, &params.b);
    let d13 = (b[0] - b[2]) + (a[2] - a[0]);
    let d23 = (b[1] - b[2]) + (a[1] - a[2]);
    let d24 = (b[3] - b[1]) + (a[1] - a[3]);
    let d14 = (b[3] - b[0]) + (a[3] - a[0]);
    let q = |num: f64, den: f64| if den != 0.0 { Some(num / den) } else { None };
    vec![
        ((1, 3), 2, q(-c[3], d13)),
        ((1, 3), 4, q(c[1], d13)),
        ((2, 3), 1, q(-c[3], d23)),
        ((2, 3), 4, q(c[0], d23)),
        ((2, 4), 1, q(-c[2], d24)),
        ((2, 4), 3, q(c[0], d24)),
        ((1, 4), 2, q(-c[2], d14)),
        ((1, 4), 3, q(c[1], d14)),
    ]
}

/// Predicted external-eigenvalue signs under `a4 <= a2 < a1 <= a3`, as
/// `((i, j), k, sign)`.
pub fn gamma_special_signs(c: &CVector<f64>, db: &Deadband) -> [((usize, usize), usize, Sign); 8] {
    let s = c.signs(db);
    [
        ((1, 3), 2, s[3].flip()),
        ((1, 3), 4, s[1]),
        ((2, 3), 1, s[3]),
        ((2, 3), 4, s[0].flip()),
        ((2, 4), 1, s[2].flip()),
        ((2, 4), 3, s[0]),
        ((1, 4), 2, s[2]),
        ((1, 4), 3, s[1].flip()),
    ]
}

/// Direction of the flow along the edge `F_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFlow {
    /// From the first to the second corner.
    Forward,
    Backward,
    /// An isolated interior equilibrium splits the edge.
    Split,
    /// Every point is an equilibrium.
    Stationary,
}

/// On `F_ij`, `x_j' = x_i x_j (A_ji x_i - A_ij x_j)`.
pub fn edge_flow(sys: &ReplicatorSystem, i: usize, j: usize) -> EdgeFlow {
    let db = sys.deadband();
    let (sij, sji) = (db.sign(&sys.entry(i, j), 1), db.sign(&sys.entry(j, i), 1));
    match (sji, sij) {
        (Sign::Zero, Sign::Zero) => EdgeFlow::Stationary,
        (Sign::Pos | Sign::Zero, Sign::Neg | Sign::Zero) => EdgeFlow::Forward,
        (Sign::Neg | Sign::Zero, Sign::Pos | Sign::Zero) => EdgeFlow::Backward,
        _ => EdgeFlow::Split,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryPiece {
    /// The whole edge `F_ij` lies in the closure of `S`.
    Edge { edge: (usize, usize), flow: EdgeFlow },
    /// The level curve `prod_{i in facet} x_i^{c_i} = 1` inside a face.
    Curve { face: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HeteroclinicStatus {
    /// Corners visited in flow order, first corner repeated at the end.
    Cycle { corners: Vec<usize> },
    Absent,
    /// The boundary contains curves whose flow is not decided here.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    pub corner: usize,
    pub in_boundary: bool,
    pub eigenvalues: Vec<(usize, f64)>,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub c_signs: [Sign; 4],
    pub pieces: Vec<BoundaryPiece>,
    /// When `c` has exactly two nonzero entries `c_i = -c_j`, `S` is the
    /// planar triangle `x_i = x_j`; its vertices are listed as points.
    pub triangle: Option<[SimplexState; 3]>,
    pub heteroclinic: HeteroclinicStatus,
    pub corners: Vec<CornerReport>,
    pub edges: EdgeInventory,
}

fn subsets() -> impl Iterator<Item = Vec<usize>> {
    // nonempty proper supports, 1-based
    (1u8..15).map(|mask| (0..4).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect())
}

/// Composition of the boundary of `S` and the invariant sets on it.
pub fn boundary_report(sys: &ReplicatorSystem) -> Result<BoundaryReport> {
    let db = sys.deadband();
    let signs = sys.c.signs(&db);
    if signs.iter().all(|s| *s == Sign::Zero) {
        return Err(Error::CollinearPoints);
    }
    if db.sign(&jacobian(&sys.source).det, 2) == Sign::Zero {
        return Err(Error::Configuration(
            "det J = 0: a continuum of interior equilibria".into(),
        ));
    }
    let sg = |i: usize| signs[i - 1];
    let complement = |t: &[usize]| -> Vec<usize> { (1..=4).filter(|i| !t.contains(i)).collect() };
    let whole = |t: &[usize]| {
        let tc = complement(t);
        tc.iter().any(|&i| sg(i) == Sign::Pos) && tc.iter().any(|&i| sg(i) == Sign::Neg)
    };
    let level = |t: &[usize]| complement(t).iter().all(|&i| sg(i) == Sign::Zero);

    // candidate faces, then keep the maximal ones
    let whole_faces: Vec<Vec<usize>> = subsets().filter(|t| whole(t)).collect();
    let curve_faces: Vec<Vec<usize>> = subsets().filter(|t| level(t) && t.len() >= 2).collect();
    let contained = |small: &Vec<usize>, big: &Vec<usize>| small.len() < big.len() && small.iter().all(|i| big.contains(i));

    let mut pieces = Vec::new();
    let mut maximal_whole: Vec<Vec<usize>> = whole_faces
        .iter()
        .filter(|t| !whole_faces.iter().any(|u| contained(t, u)))
        .cloned()
        .collect();
    maximal_whole.sort_by_key(|t| (t.len(), t.clone()));
    for t in &maximal_whole {
        match t.len() {
            2 => pieces.push(BoundaryPiece::Edge {
                edge: (t[0], t[1]),
                flow: edge_flow(sys, t[0], t[1]),
            }),
            _ => pieces.push(BoundaryPiece::Curve { face: t.clone() }),
        }
    }
    let mut maximal_curves: Vec<Vec<usize>> = curve_faces
        .iter()
        .filter(|t| !curve_faces.iter().any(|u| contained(t, u)))
        .cloned()
        .collect();
    maximal_curves.sort();
    for t in maximal_curves {
        pieces.push(BoundaryPiece::Curve { face: t });
    }

    let nonzero: Vec<usize> = (1..=4).filter(|&i| sg(i) != Sign::Zero).collect();
    let triangle = if nonzero.len() == 2 {
        let (i, j) = (nonzero[0], nonzero[1]);
        let others: Vec<usize> = (1..=4).filter(|k| *k != i && *k != j).collect();
        let mut mid = [0.0; 4];
        mid[i - 1] = 0.5;
        mid[j - 1] = 0.5;
        Some([
            SimplexState::corner(others[0]),
            SimplexState::corner(others[1]),
            SimplexState { x: mid },
        ])
    } else {
        None
    };

    let edges = edge_equilibria(sys);
    let heteroclinic = heteroclinic_status(&pieces, &edges);

    let corners = (1..=4)
        .map(|k| {
            let ev = corner_eigenvalues(sys, k);
            let others: Vec<Sign> = (1..=4).filter(|&i| i != k).map(sg).collect();
            CornerReport {
                corner: k,
                in_boundary: others.contains(&Sign::Pos) && others.contains(&Sign::Neg),
                saturated: ev.iter().all(|(_, e)| db.sign(e, 1) != Sign::Pos),
                eigenvalues: ev,
            }
        })
        .collect();

    Ok(BoundaryReport {
        c_signs: signs,
        pieces,
        triangle,
        heteroclinic,
        corners,
        edges,
    })
}

fn heteroclinic_status(pieces: &[BoundaryPiece], edges: &EdgeInventory) -> HeteroclinicStatus {
    if pieces.iter().any(|p| matches!(p, BoundaryPiece::Curve { .. })) {
        return HeteroclinicStatus::Undecided;
    }
    // directed edges; any equilibrium inside an edge breaks the cycle
    let mut next = [0usize; 5];
    let mut count = 0;
    for p in pieces {
        if let BoundaryPiece::Edge { edge: (i, j), flow } = p {
            if edges.get(*i, *j).is_some() {
                return HeteroclinicStatus::Absent;
            }
            let (from, to) = match flow {
                EdgeFlow::Forward => (*i, *j),
                EdgeFlow::Backward => (*j, *i),
                _ => return HeteroclinicStatus::Absent,
            };
            if next[from] != 0 {
                return HeteroclinicStatus::Absent;
            }
            next[from] = to;
            count += 1;
        }
    }
    if count < 3 {
        return HeteroclinicStatus::Absent;
    }
    let start = (1..=4).find(|&k| next[k] != 0).expect("at least one edge");
    let mut corners = vec![start];
    let mut k = start;
    for _ in 0..count {
        k = next[k];
        if k == 0 {
            return HeteroclinicStatus::Absent;
        }
        corners.push(k);
        if k == start {
            break;
        }
    }
    if k == start && corners.len() == count + 1 {
        HeteroclinicStatus::Cycle { corners }
    } else {
        HeteroclinicStatus::Absent
    }
}

/// Replicator system on a facet: the principal submatrix of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetSystem {
    /// 1-based corner labels, ascending.
    pub facet: [usize; 3],
    pub matrix: [[f64; 3]; 3],
}

impl FacetSystem {
    pub fn field(&self, y: &[f64; 3]) -> [f64; 3] {
        let m = &self.matrix;
        let by: [f64; 3] = [0, 1, 2].map(|i| (0..3).map(|j| m[i][j] * y[j]).sum());
        let mean: f64 = (0..3).map(|i| y[i] * by[i]).sum();
        [0, 1, 2].map(|i| y[i] * (by[i] - mean))
    }
}

fn normalize_facet(facet: [usize; 3]) -> Result<[usize; 3]> {
    let mut f = facet;
    f.sort_unstable();
    if f[0] < 1 || f[2] > 4 || f[0] == f[1] || f[1] == f[2] {
        return Err(Error::InvalidArgument(format!("{facet:?} is not a facet")));
    }
    Ok(f)
}

pub fn facet_system(sys: &ReplicatorSystem, facet: [usize; 3]) -> Result<FacetSystem> {
    let f = normalize_facet(facet)?;
    let matrix = [0, 1, 2].map(|r| [0, 1, 2].map(|s| sys.entry(f[r], f[s])));
    Ok(FacetSystem { facet: f, matrix })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FacetMonotonicity {
    /// The relevant entry of `c` vanishes.
    Inapplicable,
    /// Near the edge equilibrium `near`, `x_coordinate'` has sign `sign`.
    Monotone {
        coordinate: usize,
        near: (usize, usize),
        sign: Sign,
    },
}

/// Monotone coordinate of a facet near `E_34` (facets 234, 134) or `E_12`
/// (facets 124, 123). On the open facet the function
/// `V = sum_i w_i log x_i` built from the facet matrix has derivative
/// `-c_m x_m` (resp. `+c_m x_m`), where `m` is the opposite corner.
pub fn facet_monotonicity(sys: &ReplicatorSystem, facet: [usize; 3]) -> Result<FacetMonotonicity> {
    let f = normalize_facet(facet)?;
    let missing = (1..=4).find(|k| !f.contains(k)).expect("facet misses one corner");
    let db = sys.deadband();
    let c = sys.c.signs(&db)[missing - 1];
    if c == Sign::Zero {
        return Ok(FacetMonotonicity::Inapplicable);
    }
    let (a, b) = (&sys.source.a, &sys.source.b);
    let out = match missing {
        1 => FacetMonotonicity::Monotone {
            coordinate: 2,
            near: (3, 4),
            sign: c.flip() * db.sign(&(b[3] - b[2]), 1),
        },
        2 => FacetMonotonicity::Monotone {
            coordinate: 1,
            near: (3, 4),
            sign: c.flip() * db.sign(&(b[3] - b[2]), 1),
        },
        3 => FacetMonotonicity::Monotone {
            coordinate: 4,
            near: (1, 2),
            sign: c * db.sign(&(a[1] - a[0]), 1),
        },
        _ => FacetMonotonicity::Monotone {
            coordinate: 3,
            near: (1, 2),
            sign: c * db.sign(&(a[1] - a[0]), 1),
        },
    };
    Ok(out)
}
