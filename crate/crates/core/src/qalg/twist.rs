use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer bilinear form `B` governing monomial products,
/// `m(a) m(b) = q^{B(a,b)} m(a+b)`.
///
/// Two conventions are in common use and both are instances:
///
/// * [`TwistForm::skew_simply_laced`]: the skew form with `B(e_i, e_j) = 1`
///   for `i < j`, the lattice basis picture `e(a) e(b) = q^{phi(a,b)} e(a+b)`;
/// * [`TwistForm::ordered`]: `B(e_j, e_i) = -1` for `j > i`, under which
///   `m(a)` is the ordered monomial `T_1^{a_1} ... T_d^{a_d}` with
///   `T_i T_j = q T_j T_i` for `i < j`.
///
/// Only the commutation form `B(a,b) - B(b,a)` is intrinsic; it is twice as
/// large for the skew convention as for the ordered one. [`rebase`] converts
/// between forms with equal commutation forms.
///
/// [`rebase`]: crate::qalg::TwistedElement::rebase
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct TwistForm {
    matrix: Vec<Vec<i64>>,
}

impl TwistForm {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let d = matrix.len();
        if let Some(row) = matrix.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension { expected: d, got: row.len() });
        }
        Ok(TwistForm { matrix })
    }

    /// The commutative form of dimension `d`.
    pub fn zero(d: usize) -> Self {
        TwistForm { matrix: vec![vec![0; d]; d] }
    }

    pub fn skew_simply_laced(d: usize) -> Self {
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => 1,
                        std::cmp::Ordering::Greater => -1,
                        std::cmp::Ordering::Equal => 0,
                    })
                    .collect()
            })
            .collect();
        TwistForm { matrix }
    }

    pub fn ordered(d: usize) -> Self {
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i > j { -1 } else { 0 }).collect())
            .collect();
        TwistForm { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn eval(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                s += ai * self.matrix[i][j] * bj;
            }
        }
        s
    }

    /// `B(a,b) - B(b,a)`: `m(a) m(b) = q^{this} m(b) m(a)`.
    pub fn commutation(&self, a: &[i64], b: &[i64]) -> i64 {
        self.eval(a, b) - self.eval(b, a)
    }

    pub fn same_commutation(&self, other: &TwistForm) -> bool {
        let d = self.dim();
        other.dim() == d
            && (0..d).all(|i| {
                (0..d).all(|j| {
                    self.matrix[i][j] - self.matrix[j][i] == other.matrix[i][j] - other.matrix[j][i]
                })
            })
    }

    /// Exponent `c(a)` such that `m_B(a) -> q^{c(a)} m_{B'}(a)` is an algebra
    /// isomorphism from the `self` algebra to the `target` algebra.
    ///
    /// With `E = B' - B` (symmetric once the commutation forms agree),
    /// `c(a) = sum_i E_ii (a_i^2 - a_i)/2 + sum_{i<j} E_ij a_i a_j`, which
    /// satisfies `c(a+b) - c(a) - c(b) = E(a,b)` and vanishes on every basis
    /// vector. No halving of odd entries is ever needed.
    pub fn rebase_exponent(&self, target: &TwistForm, a: &[i64]) -> i64 {
        let d = self.dim();
        let mut c = 0;
        for i in 0..d {
            let eii = target.matrix[i][i] - self.matrix[i][i];
            c += eii * (a[i] * a[i] - a[i]) / 2;
            for j in (i + 1)..d {
                let eij = target.matrix[i][j] - self.matrix[i][j];
                c += eij * a[i] * a[j];
            }
        }
        c
    }

    /// The form `(B o (A^{-1} x A^{-1}))`, i.e. `B'(A a, A b) = B(a, b)`, for
    /// an integer matrix `A` with integer inverse `a_inv`.
    pub fn pushforward(&self, a_inv: &[Vec<i64>]) -> TwistForm {
        let d = self.dim();
        let mut m = vec![vec![0; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let ci: Vec<i64> = (0..d).map(|k| a_inv[k][i]).collect();
                let cj: Vec<i64> = (0..d).map(|k| a_inv[k][j]).collect();
                *slot = self.eval(&ci, &cj);
            }
        }
        TwistForm { matrix: m }
    }
}

impl TryFrom<Vec<Vec<i64>>> for TwistForm {
    type Error = Error;
    fn try_from(m: Vec<Vec<i64>>) -> Result<Self> {
        TwistForm::new(m)
    }
}

impl From<TwistForm> for Vec<Vec<i64>> {
    fn from(t: TwistForm) -> Self {
        t.matrix
    }
}
