//! Symmetries of the exponential normal form under the dihedral group of the square.
//!
//! A group element is a signed permutation matrix `M` acting on the plane by
//! `w' = M w`. Substituting into the normal form permutes the two equations,
//! negates those picked up with a minus sign (which swaps the order of their
//! two monomials) and maps every exponent point by `P' = M^{-T} P = M P`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::params::{CVector, Params};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DihedralElement {
    R0,
    R1,
    R2,
    R3,
    S0,
    S1,
    S2,
    S3,
}

impl DihedralElement {
    pub const ALL: [DihedralElement; 8] = [
        DihedralElement::R0,
        DihedralElement::R1,
        DihedralElement::R2,
        DihedralElement::R3,
        DihedralElement::S0,
        DihedralElement::S1,
        DihedralElement::S2,
        DihedralElement::S3,
    ];

    /// Integer matrix of the plane transformation.
    pub fn matrix(self) -> [[i8; 2]; 2] {
        use DihedralElement::*;
        match self {
            R0 => [[1, 0], [0, 1]],
            R1 => [[0, -1], [1, 0]],
            R2 => [[-1, 0], [0, -1]],
            R3 => [[0, 1], [-1, 0]],
            S0 => [[1, 0], [0, -1]],
            S1 => [[0, 1], [1, 0]],
            S2 => [[-1, 0], [0, 1]],
            S3 => [[0, -1], [-1, 0]],
        }
    }

    pub fn from_matrix(m: [[i8; 2]; 2]) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.matrix() == m)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: DihedralElement) -> DihedralElement {
        let (a, b) = (self.matrix(), other.matrix());
        let mut m = [[0i8; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::from_matrix(m).expect("signed permutation matrices are closed under products")
    }

    pub fn inverse(self) -> DihedralElement {
        let m = self.matrix();
        Self::from_matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
            .expect("transpose of a signed permutation is one")
    }

    /// Induced action on `c`: entry `k` of the new vector is
    /// `sign * c[index]` for the returned `(sign, index)`.
    pub fn c_map(self) -> [(i8, usize); 4] {
        use DihedralElement::*;
        match self {
            R0 => [(1, 0), (1, 1), (1, 2), (1, 3)],
            R1 => [(-1, 3), (-1, 2), (-1, 0), (-1, 1)],
            R2 => [(1, 1), (1, 0), (1, 3), (1, 2)],
            R3 => [(-1, 2), (-1, 3), (-1, 1), (-1, 0)],
            S0 => [(1, 0), (1, 1), (1, 3), (1, 2)],
            S1 => [(-1, 2), (-1, 3), (-1, 0), (-1, 1)],
            S2 => [(1, 1), (1, 0), (1, 2), (1, 3)],
            S3 => [(-1, 3), (-1, 2), (-1, 1), (-1, 0)],
        }
    }

    pub fn name(self) -> &'static str {
        use DihedralElement::*;
        match self {
            R0 => "r0",
            R1 => "r1",
            R2 => "r2",
            R3 => "r3",
            S0 => "s0",
            S1 => "s1",
            S2 => "s2",
            S3 => "s3",
        }
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DihedralElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown group element {s:?}")))
    }
}

fn scaled<S: Scalar>(s: i8, x: &S) -> S {
    match s {
        1 => x.clone(),
        -1 => -x.clone(),
        _ => S::zero(),
    }
}

fn map_point<S: Scalar>(m: &[[i8; 2]; 2], p: &(S, S)) -> (S, S) {
    let row = |r: &[i8; 2]| {
        if r[0] != 0 {
            scaled(r[0], &p.0)
        } else {
            scaled(r[1], &p.1)
        }
    };
    (row(&m[0]), row(&m[1]))
}

/// Exponent points of the system rewritten in the coordinates `w' = M w`.
pub fn apply_dihedral<S: Scalar>(g: DihedralElement, params: &Params<S>) -> Params<S> {
    let m = g.matrix();
    let pts = params.points();
    let mut out: Vec<(S, S)> = Vec::with_capacity(4);
    for row in &m {
        let (j, s) = if row[0] != 0 { (0, row[0]) } else { (1, row[1]) };
        let (first, second) = if s > 0 { (2 * j, 2 * j + 1) } else { (2 * j + 1, 2 * j) };
        out.push(map_point(&m, &pts[first]));
        out.push(map_point(&m, &pts[second]));
    }
    let [p1, p2, p3, p4]: [(S, S); 4] = out.try_into().expect("four points");
    Params::from_points([p1, p2, p3, p4])
}

/// `c` transformed by the induced signed permutation of `g`.
pub fn induced_c_map<S: Scalar>(g: DihedralElement, c: &CVector<S>) -> CVector<S> {
    let map = g.c_map();
    CVector {
        c: [0, 1, 2, 3].map(|k| scaled(map[k].0, &c.c[map[k].1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{c_vector, jacobian, ExactParams, ExpParams};
    use DihedralElement::*;

    #[test]
    fn composition_table() {
        assert_eq!(R1.compose(R1), R2);
        assert_eq!(R1.compose(R2), R3);
        assert_eq!(R3.compose(R1), R0);
        for g in DihedralElement::ALL {
            assert_eq!(g.compose(R0), g);
            assert_eq!(g.compose(g.inverse()), R0);
        }
        for s in [S0, S1, S2, S3] {
            assert_eq!(s.compose(s), R0);
        }
        // associativity
        for g in DihedralElement::ALL {
            for h in DihedralElement::ALL {
                for k in DihedralElement::ALL {
                    assert_eq!(g.compose(h).compose(k), g.compose(h.compose(k)));
                }
            }
        }
    }

    #[test]
    fn r2_on_baseline() {
        let p = ExpParams::from_arrays([0.0, -8.0, 10.0, -20.0], [0.0, 35.0, 20.0, 28.0]);
        let q = apply_dihedral(R2, &p);
        assert_eq!(q.a, [8.0, 0.0, 20.0, -10.0]);
        assert_eq!(q.b, [-35.0, 0.0, -28.0, -20.0]);
    }

    #[test]
    fn r1_swaps_jacobian_entries() {
        let p = ExactParams::from_ints([1, -4, 7, 2], [3, 5, -6, 0]);
        let j = jacobian(&p);
        let jr = jacobian(&apply_dihedral(R1, &p));
        assert_eq!(jr.j11, j.j22);
        assert_eq!(jr.j22, j.j11);
        assert_eq!(jr.j12, -j.j21.clone());
        assert_eq!(jr.j21, -j.j12.clone());
        assert_eq!(jr.det, j.det);
    }

    #[test]
    fn c_map_matches_derivation() {
        let p = ExactParams::from_ints([1, -4, 7, 2], [3, 5, -6, 0]);
        let c = c_vector(&p);
        for g in DihedralElement::ALL {
            assert_eq!(c_vector(&apply_dihedral(g, &p)), induced_c_map(g, &c), "{g}");
        }
    }

    #[test]
    fn parse_names() {
        for g in DihedralElement::ALL {
            assert_eq!(g.name().parse::<DihedralElement>().unwrap(), g);
        }
        assert!("q9".parse::<DihedralElement>().is_err());
    }
}
