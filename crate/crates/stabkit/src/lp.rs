//! Dense two-phase simplex over a generic scalar (exact rationals or f64),
//! the covering-relaxation builder, solution verification, and LP-format
//! export.
//!
//! Pivoting is Bland's rule throughout (entering: lowest-index column with
//! negative reduced cost; leaving: minimum ratio, ties by lowest basic
//! variable index), so solves are deterministic and cycle-free in both
//! arithmetic modes.

use crate::model::Instance;
use crate::rational::{rat_from_f64, rat_to_f64, Rat};
use num::{One, Signed, Zero};
use std::error::Error;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One dense constraint row `coeffs · x  rel  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

/// A dense LP with per-variable lower bounds (default 0) and optional upper
/// bounds. All data exact rational.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rat>,
    pub rows: Vec<Row>,
    pub lower: Vec<Rat>,
    pub upper: Vec<Option<Rat>>,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpStatus::Optimal => write!(f, "optimal"),
            LpStatus::Infeasible => write!(f, "infeasible"),
            LpStatus::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Solver output. For non-optimal statuses `x` is empty and `objective` is 0.
/// `x` is always exact rational: in float mode it holds the exact binary
/// images of the float solution, `objective` is the exact dot product of the
/// original costs with those images, and `max_violation` is likewise
/// recomputed exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Rat>,
    pub objective: Rat,
    pub max_violation: Rat,
}

/// Arithmetic backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    ExactRational,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    DimensionMismatch { detail: String },
    NonFiniteNumeric,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch { detail } => write!(f, "dimension mismatch: {detail}"),
            LpError::NonFiniteNumeric => {
                write!(f, "float-mode arithmetic produced a non-finite value")
            }
        }
    }
}

impl Error for LpError {}

impl LinearProgram {
    /// A minimization problem over `n` variables with bounds `[0, +inf)` and
    /// default names `x0..`.
    pub fn minimize(objective: Vec<Rat>) -> LinearProgram {
        let n = objective.len();
        LinearProgram {
            sense: Sense::Min,
            objective,
            rows: Vec::new(),
            lower: vec![Rat::zero(); n],
            upper: vec![None; n],
            names: (0..n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) {
        self.rows.push(Row { coeffs, rel, rhs });
    }

    fn check_dims(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        let mismatch = |detail: String| LpError::DimensionMismatch { detail };
        if self.lower.len() != n || self.upper.len() != n || self.names.len() != n {
            return Err(mismatch(format!("bounds/names length != {n} variables")));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(mismatch(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

/// Scalar abstraction letting one simplex implementation run exactly over
/// rationals or approximately over f64.
pub trait Scalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn from_rat(r: &Rat) -> Self;
    fn to_rat(&self) -> Option<Rat>;
    /// Magnitudes at or below the tolerance are treated as zero.
    fn tol() -> Self;
    fn abs_val(&self) -> Self;
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Rat {
        r.clone()
    }
    fn to_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn tol() -> Rat {
        Rat::zero()
    }
    fn abs_val(&self) -> Rat {
        self.abs()
    }
}

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> f64 {
        rat_to_f64(r)
    }
    fn to_rat(&self) -> Option<Rat> {
        rat_from_f64(*self)
    }
    fn tol() -> f64 {
        1e-9
    }
    fn abs_val(&self) -> f64 {
        self.abs()
    }
}

enum CoreOutcome<T> {
    Optimal(Vec<T>),
    Infeasible,
    Unbounded,
}

/// Dense tableau with the two objective rows stored as the last two matrix
/// rows so a single pivot routine updates everything.
struct Tableau<T> {
    /// `m` constraint rows, then the phase-2 cost row, then the phase-1 cost
    /// row. Each row has `n_total + 1` entries, the last being the rhs.
    mat: Vec<Vec<T>>,
    m: usize,
    n_total: usize,
    basis: Vec<usize>,
    /// Constraint rows knocked out as redundant after phase 1.
    active: Vec<bool>,
}

impl<T: Scalar> Tableau<T> {
    fn rhs_col(&self) -> usize {
        self.n_total
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.mat[r][c].clone();
        for j in 0..=self.n_total {
            self.mat[r][j] = self.mat[r][j].clone() / p.clone();
        }
        for i in 0..self.mat.len() {
            if i == r || (i < self.m && !self.active[i]) {
                continue;
            }
            if self.mat[i][c].abs_val() <= T::tol() {
                // Clamp stray float dust so eliminated columns stay clean.
                self.mat[i][c] = T::zero();
                continue;
            }
            let f = self.mat[i][c].clone();
            for j in 0..=self.n_total {
                let delta = f.clone() * self.mat[r][j].clone();
                self.mat[i][j] = self.mat[i][j].clone() - delta;
            }
            self.mat[i][c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Bland iterations driven by cost row `obj_row` with entering columns
    /// restricted to `0..ban_from`. Returns false on unboundedness.
    fn run(&mut self, obj_row: usize, ban_from: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..ban_from {
                if self.mat[obj_row][j].clone() < -T::tol() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let rhs = self.rhs_col();
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                if !self.active[i] {
                    continue;
                }
                if self.mat[i][c].clone() <= T::tol() {
                    continue;
                }
                let ratio = self.mat[i][rhs].clone() / self.mat[i][c].clone();
                leave = match leave.take() {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (!(ratio > br) && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

/// Two-phase simplex on `A x' rel b, x' >= 0` with minimization costs
/// `costs` on the structural columns. The caller has already shifted lower
/// bounds out and appended upper bounds as rows.
fn simplex_core<T: Scalar>(
    n_struct: usize,
    costs: &[T],
    rows: Vec<(Vec<T>, Relation, T)>,
) -> CoreOutcome<T> {
    let m = rows.len();
    let n_slack = rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    // Count artificials after rhs normalization.
    let effective_rel = |rel: Relation, flipped: bool| match (rel, flipped) {
        (Relation::Eq, _) => Relation::Eq,
        (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
        (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
    };
    let mut n_art = 0usize;
    for (_, rel, b) in &rows {
        if effective_rel(*rel, *b < T::zero()) != Relation::Le {
            n_art += 1;
        }
    }
    let n_total = n_struct + n_slack + n_art;
    let art_start = n_struct + n_slack;

    let mut mat: Vec<Vec<T>> = Vec::with_capacity(m + 2);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut slack_at = n_struct;
    let mut art_at = art_start;
    for (coeffs, rel, b) in rows {
        let mut row: Vec<T> = vec![T::zero(); n_total + 1];
        let flip = b < T::zero();
        for (j, cval) in coeffs.into_iter().enumerate() {
            row[j] = if flip { -cval } else { cval };
        }
        row[n_total] = if flip { -b } else { b };
        match effective_rel(rel, flip) {
            Relation::Le => {
                row[slack_at] = T::one();
                basis.push(slack_at);
                slack_at += 1;
            }
            Relation::Ge => {
                row[slack_at] = -T::one();
                slack_at += 1;
                row[art_at] = T::one();
                basis.push(art_at);
                art_at += 1;
            }
            Relation::Eq => {
                row[art_at] = T::one();
                basis.push(art_at);
                art_at += 1;
            }
        }
        mat.push(row);
    }
    debug_assert_eq!(art_at, n_total);
    debug_assert_eq!(slack_at, art_start);

    // Phase-2 cost row: reduced costs start as the raw costs (the initial
    // basis holds only zero-cost slack/artificial columns).
    let mut p2: Vec<T> = vec![T::zero(); n_total + 1];
    for j in 0..n_struct {
        p2[j] = costs[j].clone();
    }
    // Phase-1 cost row: unit costs on artificials, eliminated for the basic ones.
    let mut p1: Vec<T> = vec![T::zero(); n_total + 1];
    for j in art_start..n_total {
        p1[j] = T::one();
    }
    for (i, &bv) in basis.iter().enumerate() {
        if bv >= art_start {
            for j in 0..=n_total {
                let delta = mat[i][j].clone();
                p1[j] = p1[j].clone() - delta;
            }
        }
    }

    let p2_row = m;
    let p1_row = m + 1;
    mat.push(p2);
    mat.push(p1);
    let mut tab = Tableau {
        mat,
        m,
        n_total,
        basis,
        active: vec![true; m],
    };

    if n_art > 0 {
        // Phase-1 objective is bounded below by 0, so `run` always returns true.
        let bounded = tab.run(p1_row, n_total);
        debug_assert!(bounded);
        // Residual infeasibility = -rhs of the phase-1 row.
        let resid = -tab.mat[p1_row][n_total].clone();
        if resid.abs_val() > T::tol() {
            return CoreOutcome::Infeasible;
        }
        // Drive basic artificials out or deactivate redundant rows.
        for i in 0..tab.m {
            if !tab.active[i] || tab.basis[i] < art_start {
                continue;
            }
            let mut pivot_col = None;
            for j in 0..art_start {
                if tab.mat[i][j].abs_val() > T::tol() {
                    pivot_col = Some(j);
                    break;
                }
            }
            match pivot_col {
                Some(j) => tab.pivot(i, j),
                None => tab.active[i] = false,
            }
        }
    }

    if !tab.run(p2_row, art_start) {
        return CoreOutcome::Unbounded;
    }

    let rhs = tab.rhs_col();
    let mut x = vec![T::zero(); n_struct];
    for i in 0..tab.m {
        if tab.active[i] && tab.basis[i] < n_struct {
            x[tab.basis[i]] = tab.mat[i][rhs].clone();
        }
    }
    CoreOutcome::Optimal(x)
}

fn solve_generic<T: Scalar>(lp: &LinearProgram) -> CoreOutcome<T> {
    let n = lp.n_vars();
    // Shift x = lower + x'. Upper bounds become appended rows x' <= up - lo.
    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::with_capacity(lp.rows.len() + n);
    for row in &lp.rows {
        let coeffs: Vec<T> = row.coeffs.iter().map(|c| T::from_rat(c)).collect();
        let mut b = T::from_rat(&row.rhs);
        for (j, c) in coeffs.iter().enumerate() {
            let shift = T::from_rat(&lp.lower[j]);
            b = b - c.clone() * shift;
        }
        rows.push((coeffs, row.rel, b));
    }
    for j in 0..n {
        if let Some(up) = &lp.upper[j] {
            let mut coeffs = vec![T::zero(); n];
            coeffs[j] = T::one();
            let b = T::from_rat(up) - T::from_rat(&lp.lower[j]);
            rows.push((coeffs, Relation::Le, b));
        }
    }
    let costs: Vec<T> = match lp.sense {
        Sense::Min => lp.objective.iter().map(|c| T::from_rat(c)).collect(),
        Sense::Max => lp.objective.iter().map(|c| -T::from_rat(c)).collect(),
    };
    match simplex_core(n, &costs, rows) {
        CoreOutcome::Optimal(xs) => {
            let shifted: Vec<T> = xs
                .into_iter()
                .enumerate()
                .map(|(j, v)| v + T::from_rat(&lp.lower[j]))
                .collect();
            CoreOutcome::Optimal(shifted)
        }
        other => other,
    }
}

/// Solve `lp` with the selected arithmetic backend.
///
/// The reported objective and violation are always exact rationals computed
/// from the (exact image of the) solution vector, regardless of mode.
pub fn solve(lp: &LinearProgram, mode: SolveMode) -> Result<LpSolution, LpError> {
    lp.check_dims()?;
    // Convert the float outcome to exact rational images immediately so both
    // arms share one result shape.
    let outcome: CoreOutcome<Rat> = match mode {
        SolveMode::ExactRational => solve_generic::<Rat>(lp),
        SolveMode::Float => match solve_generic::<f64>(lp) {
            CoreOutcome::Infeasible => CoreOutcome::Infeasible,
            CoreOutcome::Unbounded => CoreOutcome::Unbounded,
            CoreOutcome::Optimal(xs) => {
                let mut exact = Vec::with_capacity(xs.len());
                for v in xs {
                    match Scalar::to_rat(&v) {
                        Some(r) => exact.push(r),
                        None => return Err(LpError::NonFiniteNumeric),
                    }
                }
                CoreOutcome::Optimal(exact)
            }
        },
    };
    match outcome {
        CoreOutcome::Infeasible => Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: Rat::zero(),
            max_violation: Rat::zero(),
        }),
        CoreOutcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: Rat::zero(),
            max_violation: Rat::zero(),
        }),
        CoreOutcome::Optimal(x) => {
            let objective: Rat = lp
                .objective
                .iter()
                .zip(&x)
                .map(|(c, v)| c * v)
                .fold(Rat::zero(), |a, b| a + b);
            let report = verify_solution(lp, &x)?;
            Ok(LpSolution {
                status: LpStatus::Optimal,
                x,
                objective,
                max_violation: report.max_violation,
            })
        }
    }
}

/// Per-row account of `coeffs·x - rhs` (signed slack) and how far the row is
/// from being satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSlack {
    pub row: usize,
    pub slack: Rat,
    pub violation: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub slacks: Vec<RowSlack>,
    /// Worst violation across rows and variable bounds.
    pub max_violation: Rat,
    /// Rows violated by any positive amount.
    pub violated_rows: Vec<usize>,
}

/// Exact feasibility audit of `x` against every row and bound of `lp`.
pub fn verify_solution(lp: &LinearProgram, x: &[Rat]) -> Result<VerifyReport, LpError> {
    lp.check_dims()?;
    if x.len() != lp.n_vars() {
        return Err(LpError::DimensionMismatch {
            detail: format!("solution has {} entries, expected {}", x.len(), lp.n_vars()),
        });
    }
    let mut slacks = Vec::with_capacity(lp.rows.len());
    let mut max_violation = Rat::zero();
    let mut violated_rows = Vec::new();
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs: Rat = row
            .coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .fold(Rat::zero(), |a, b| a + b);
        let slack = &lhs - &row.rhs;
        let violation = match row.rel {
            Relation::Ge => {
                if slack < Rat::zero() {
                    -slack.clone()
                } else {
                    Rat::zero()
                }
            }
            Relation::Le => {
                if slack > Rat::zero() {
                    slack.clone()
                } else {
                    Rat::zero()
                }
            }
            Relation::Eq => slack.abs(),
        };
        if violation > Rat::zero() {
            violated_rows.push(i);
        }
        if violation > max_violation {
            max_violation = violation.clone();
        }
        slacks.push(RowSlack {
            row: i,
            slack,
            violation,
        });
    }
    for (j, v) in x.iter().enumerate() {
        if v < &lp.lower[j] {
            let d = &lp.lower[j] - v;
            if d > max_violation {
                max_violation = d;
            }
        }
        if let Some(up) = &lp.upper[j] {
            if v > up {
                let d = v - up;
                if d > max_violation {
                    max_violation = d;
                }
            }
        }
    }
    Ok(VerifyReport {
        slacks,
        max_violation,
        violated_rows,
    })
}

/// The covering relaxation of a stabbing instance: one `[0,1]` variable per
/// line (vertical lines first, then horizontal, in instance order), one
/// `>= 1` row per rectangle over the lines that stab it, minimizing total
/// selected weight.
pub fn build_relaxation(inst: &Instance) -> LinearProgram {
    let n = inst.n_lines();
    let mut lp = LinearProgram::minimize((0..n).map(|i| inst.line_weight(i).clone()).collect());
    lp.upper = vec![Some(Rat::one()); n];
    lp.names = (0..n)
        .map(|i| {
            if i < inst.n_vlines() {
                format!("v{i}")
            } else {
                format!("h{}", i - inst.n_vlines())
            }
        })
        .collect();
    for rect in &inst.rects {
        let mut coeffs = vec![Rat::zero(); n];
        for idx in inst.stabbers(rect) {
            coeffs[idx] = Rat::one();
        }
        lp.push_row(coeffs, Relation::Ge, Rat::one());
    }
    lp
}

/// `value` rendered as a plain decimal with 15 significant digits (integers
/// print without a decimal point).
fn fmt_coeff(value: &Rat) -> String {
    crate::rational::format_f64_sig(rat_to_f64(value), 15)
}

/// Serialize to the plain-text LP file format understood by common solvers
/// (objective, `Subject To`, `Bounds`, `End`). Coefficients are printed with
/// 15 significant digits.
pub fn export_lp_format(lp: &LinearProgram) -> String {
    let mut out = String::new();
    out.push_str(match lp.sense {
        Sense::Min => "Minimize\n",
        Sense::Max => "Maximize\n",
    });
    out.push_str(" obj:");
    let mut first = true;
    for (j, c) in lp.objective.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = fmt_coeff(&c.abs());
        let sign = if c.is_negative() {
            "-"
        } else if first {
            ""
        } else {
            "+"
        };
        if sign.is_empty() {
            out.push_str(&format!(" {mag} {}", lp.names[j]));
        } else {
            out.push_str(&format!(" {sign} {mag} {}", lp.names[j]));
        }
        first = false;
    }
    if first {
        out.push_str(" 0 ");
        out.push_str(lp.names.first().map(String::as_str).unwrap_or("x0"));
    }
    out.push('\n');
    out.push_str("Subject To\n");
    for (i, row) in lp.rows.iter().enumerate() {
        out.push_str(&format!(" c{i}:"));
        let mut any = false;
        for (j, c) in row.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = fmt_coeff(&c.abs());
            let sign = if c.is_negative() {
                "-"
            } else if !any {
                ""
            } else {
                "+"
            };
            if sign.is_empty() {
                out.push_str(&format!(" {mag} {}", lp.names[j]));
            } else {
                out.push_str(&format!(" {sign} {mag} {}", lp.names[j]));
            }
            any = true;
        }
        if !any {
            out.push_str(" 0 ");
            out.push_str(lp.names.first().map(String::as_str).unwrap_or("x0"));
        }
        let rel = match row.rel {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        out.push_str(&format!(" {rel} {}\n", fmt_coeff(&row.rhs)));
    }
    out.push_str("Bounds\n");
    for j in 0..lp.n_vars() {
        match &lp.upper[j] {
            Some(up) => out.push_str(&format!(
                " {} <= {} <= {}\n",
                fmt_coeff(&lp.lower[j]),
                lp.names[j],
                fmt_coeff(up)
            )),
            None => out.push_str(&format!(
                " {} <= {}\n",
                fmt_coeff(&lp.lower[j]),
                lp.names[j]
            )),
        }
    }
    out.push_str("End\n");
    out
}
