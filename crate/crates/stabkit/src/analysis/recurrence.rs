//! The golden-ratio recurrence behind the per-window constants: integer
//! sequences `A` and `B` driven by Fibonacci-style updates, their closed
//! forms over the field extension by √5, the level weights they induce, and
//! the window constant `γ*(k) = α₃(k) + 3/2`.

use super::AnalysisError;
use crate::rational::{rat, rat_to_f64, Rat};
use num::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element `a + b·√5` of the quadratic field extension, with exact
/// rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q5 {
    pub a: Rat,
    pub b: Rat,
}

impl Q5 {
    pub fn new(a: Rat, b: Rat) -> Q5 {
        Q5 { a, b }
    }

    pub fn from_rat(a: Rat) -> Q5 {
        Q5 {
            a,
            b: Rat::zero(),
        }
    }

    /// The generator √5 itself.
    pub fn sqrt5() -> Q5 {
        Q5 {
            a: Rat::zero(),
            b: Rat::one(),
        }
    }

    /// Whether the element lies in the rational subfield.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * 5f64.sqrt()
    }
}

impl fmt::Display for Q5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt(5)", self.a, self.b)
    }
}

impl Add for Q5 {
    type Output = Q5;
    fn add(self, rhs: Q5) -> Q5 {
        Q5 {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl Sub for Q5 {
    type Output = Q5;
    fn sub(self, rhs: Q5) -> Q5 {
        Q5 {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl Mul for Q5 {
    type Output = Q5;
    fn mul(self, rhs: Q5) -> Q5 {
        // (a + b√5)(c + d√5) = ac + 5bd + (ad + bc)√5
        Q5 {
            a: &self.a * &rhs.a + rat(5, 1) * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for Q5 {
    type Output = Q5;
    fn neg(self) -> Q5 {
        Q5 {
            a: -self.a,
            b: -self.b,
        }
    }
}

/// Exact data for one window size `k`: the sequences, their closed-form
/// coefficients, the level weights, and the window constant.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub k: usize,
    /// `(1 ± √5)/2`.
    pub psi1: Q5,
    pub psi2: Q5,
    /// Closed-form coefficients: `A_ℓ = c1·ψ1^ℓ + c2·ψ2^ℓ − 1`.
    pub c1: Q5,
    pub c2: Q5,
    /// Closed-form coefficients: `B_ℓ = d1·ψ1^ℓ + d2·ψ2^ℓ − 1/2`.
    pub d1: Q5,
    pub d2: Q5,
    /// `A_0..A_{k-3}` from `A_ℓ = A_{ℓ-1} + A_{ℓ-2} + 1`, `A_0 = 3, A_1 = 6`.
    pub a_seq: Vec<Rat>,
    /// `B_0..B_{k-3}` from `B_ℓ = B_{ℓ-1} + B_{ℓ-2} + 1/2`, `B_0 = 0, B_1 = 1/2`.
    pub b_seq: Vec<Rat>,
    /// `α₃(k) = B_{k-3} / A_{k-3}`.
    pub alpha3: Rat,
    /// `α_ℓ(k) = A_{ℓ-4}·α₃(k) − B_{ℓ-4}` for `ℓ = 4..=k` (empty for k < 4... k ≥ 4 always).
    pub alpha_levels: Vec<Rat>,
    /// Level weights: level 1 = [1]; level 2 = [1/2, 1/2]; level 3 =
    /// [α₃, α₃, 1−2α₃]; level ℓ ≥ 4 = (ℓ−2) zeros then [α_ℓ, 1−α_ℓ].
    pub beta_levels: Vec<Vec<Rat>>,
    /// `γ*(k) = α₃(k) + 3/2`.
    pub gamma_star: Rat,
}

/// Recurrence values `A_0..A_n` and `B_0..B_n`.
fn sequences(n: usize) -> (Vec<Rat>, Vec<Rat>) {
    let mut a = vec![rat(3, 1), rat(6, 1)];
    let mut b = vec![Rat::zero(), rat(1, 2)];
    while a.len() <= n {
        let la = a.len();
        a.push(&a[la - 1] + &a[la - 2] + Rat::one());
        b.push(&b[la - 1] + &b[la - 2] + rat(1, 2));
    }
    a.truncate(n + 1);
    b.truncate(n + 1);
    (a, b)
}

/// Closed-form value of `A_ℓ` (exact; always lands in the rationals).
pub fn a_closed(ell: usize, c1: &Q5, c2: &Q5, psi1: &Q5, psi2: &Q5) -> Q5 {
    let mut p1 = Q5::from_rat(Rat::one());
    let mut p2 = Q5::from_rat(Rat::one());
    for _ in 0..ell {
        p1 = p1 * psi1.clone();
        p2 = p2 * psi2.clone();
    }
    c1.clone() * p1 + c2.clone() * p2 - Q5::from_rat(Rat::one())
}

/// Closed-form value of `B_ℓ` (exact; always lands in the rationals).
pub fn b_closed(ell: usize, d1: &Q5, d2: &Q5, psi1: &Q5, psi2: &Q5) -> Q5 {
    let mut p1 = Q5::from_rat(Rat::one());
    let mut p2 = Q5::from_rat(Rat::one());
    for _ in 0..ell {
        p1 = p1 * psi1.clone();
        p2 = p2 * psi2.clone();
    }
    d1.clone() * p1 + d2.clone() * p2 - Q5::from_rat(rat(1, 2))
}

/// Build the full exact table for window size `k ≥ 4`.
pub fn recurrence_table(k: usize) -> Result<RecurrenceTable, AnalysisError> {
    if k < 4 {
        return Err(AnalysisError::BadParameter {
            detail: format!("window size must be at least 4, got {k}"),
        });
    }
    let half = rat(1, 2);
    let psi1 = Q5::new(half.clone(), half.clone());
    let psi2 = Q5::new(half.clone(), -half.clone());
    let c1 = Q5::new(rat(2, 1), Rat::one());
    let c2 = Q5::new(rat(2, 1), -Rat::one());
    let d1 = Q5::new(rat(1, 4), rat(3, 20));
    let d2 = Q5::new(rat(1, 4), -rat(3, 20));
    let (a_seq, b_seq) = sequences(k - 3);
    let alpha3 = &b_seq[k - 3] / &a_seq[k - 3];
    let mut alpha_levels = Vec::new();
    for ell in 4..=k {
        alpha_levels.push(&a_seq[ell - 4] * &alpha3 - &b_seq[ell - 4]);
    }
    let mut beta_levels: Vec<Vec<Rat>> = Vec::with_capacity(k);
    beta_levels.push(vec![Rat::one()]);
    beta_levels.push(vec![half.clone(), half.clone()]);
    beta_levels.push(vec![
        alpha3.clone(),
        alpha3.clone(),
        Rat::one() - rat(2, 1) * &alpha3,
    ]);
    for (i, ell) in (4..=k).enumerate() {
        let mut level = vec![Rat::zero(); ell - 2];
        level.push(alpha_levels[i].clone());
        level.push(Rat::one() - &alpha_levels[i]);
        beta_levels.push(level);
    }
    let gamma_star = &alpha3 + rat(3, 2);
    Ok(RecurrenceTable {
        k,
        psi1,
        psi2,
        c1,
        c2,
        d1,
        d2,
        a_seq,
        b_seq,
        alpha3,
        alpha_levels,
        beta_levels,
        gamma_star,
    })
}

/// Limit of `γ*(k)` as the window grows: `(35 − √5)/20`.
pub fn gamma_star_limit() -> Q5 {
    Q5::new(rat(35, 20), -rat(1, 20))
}
