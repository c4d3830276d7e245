//! The four LP-rounding schemes: the half-split (orientation partition), the
//! sorted-suffix threshold scheme for horizontal segments, the dual-threshold
//! scheme for mixed segments, and the complementary-threshold net scheme for
//! unit squares — each with a randomized and a deterministic variant.

use crate::exact::{min_weight_hitting, optimal_net, ExactError};
use crate::model::{stabs, Instance, Interval, IntervalSystem, Kind, Orientation, SysPoint};
use crate::rational::{rat, rat_from_f64, Rat};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::error::Error;
use std::fmt;

/// A feasible stabbing set produced by a rounding scheme. `chosen` holds
/// global line indices sorted ascending; `witness[r]` is a chosen line that
/// stabs rectangle `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedSolution {
    pub chosen: Vec<usize>,
    pub weight: Rat,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RoundError {
    WrongKind { expected: Kind, got: Kind },
    WeightedUnsupported,
    SolutionShape { detail: String },
    DuplicateLineCoords { orientation: Orientation },
    Uncovered { rect: usize },
    BadSchedule { detail: String },
    Exact(ExactError),
}

impl fmt::Display for RoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundError::WrongKind { expected, got } => {
                write!(f, "instance kind is {got}, scheme needs {expected}")
            }
            RoundError::WeightedUnsupported => {
                write!(f, "scheme supports unweighted instances only")
            }
            RoundError::SolutionShape { detail } => write!(f, "bad LP solution: {detail}"),
            RoundError::DuplicateLineCoords { orientation } => {
                write!(f, "{orientation} lines must have distinct coordinates")
            }
            RoundError::Uncovered { rect } => {
                write!(f, "rounded set fails to stab rectangle {rect}")
            }
            RoundError::BadSchedule { detail } => write!(f, "bad threshold schedule: {detail}"),
            RoundError::Exact(e) => write!(f, "{e}"),
        }
    }
}

impl Error for RoundError {}

impl From<ExactError> for RoundError {
    fn from(e: ExactError) -> RoundError {
        RoundError::Exact(e)
    }
}

impl RoundedSolution {
    /// Assemble a solution from a line set, deriving per-rect witnesses and
    /// the exact total weight; fails if some rectangle is left unstabbed.
    pub fn from_lines(inst: &Instance, lines: BTreeSet<usize>) -> Result<RoundedSolution, RoundError> {
        let chosen: Vec<usize> = lines.into_iter().collect();
        let mut witness = Vec::with_capacity(inst.rects.len());
        for (r, rect) in inst.rects.iter().enumerate() {
            let hit = chosen.iter().copied().find(|&idx| {
                let (orientation, line) = inst.line(idx);
                stabs(orientation, &line.coord, rect)
            });
            match hit {
                Some(idx) => witness.push(idx),
                None => return Err(RoundError::Uncovered { rect: r }),
            }
        }
        let weight = chosen
            .iter()
            .map(|&i| inst.line_weight(i).clone())
            .fold(Rat::zero(), |a, b| a + b);
        Ok(RoundedSolution {
            chosen,
            weight,
            witness,
        })
    }
}

/// Threshold distribution for the dual-threshold scheme: a linear density
/// `rho(τ) = 2(τ-alpha)/(beta-alpha)^2` on `[alpha, beta]`, paired with the
/// conjugation map `h(τ) = 1 - (1-beta)^2/(1-τ)`, a decreasing involution
/// fixing `beta`. `gamma_thr = h(alpha)` caps the image of the map.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSchedule {
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma_thr: Rat,
}

impl ThresholdSchedule {
    /// The shipped schedule: `alpha = 1/4`, `beta = 9/20`.
    pub fn standard() -> ThresholdSchedule {
        ThresholdSchedule::new(rat(1, 4), rat(9, 20)).expect("standard parameters are valid")
    }

    pub fn new(alpha: Rat, beta: Rat) -> Result<ThresholdSchedule, RoundError> {
        if !(Rat::zero() < alpha && alpha < beta && beta < Rat::one()) {
            return Err(RoundError::BadSchedule {
                detail: "need 0 < alpha < beta < 1".into(),
            });
        }
        let mut s = ThresholdSchedule {
            alpha,
            beta,
            gamma_thr: Rat::zero(),
        };
        s.gamma_thr = s.h(&s.alpha);
        Ok(s)
    }

    /// Conjugate threshold: `1 - (1-beta)^2 / (1-τ)` for `τ < 1`.
    pub fn h(&self, tau: &Rat) -> Rat {
        assert!(tau < &Rat::one(), "threshold map needs tau < 1");
        let one = Rat::one();
        let d = &one - &self.beta;
        &one - &d * &d / (&one - tau)
    }

    /// Density value at `tau` (zero outside `[alpha, beta]`).
    pub fn rho(&self, tau: &Rat) -> Rat {
        if tau < &self.alpha || tau > &self.beta {
            return Rat::zero();
        }
        let span = &self.beta - &self.alpha;
        rat(2, 1) * (tau - &self.alpha) / (&span * &span)
    }

    /// Draw a threshold from the density by inverting its CDF:
    /// `τ = alpha + (beta-alpha)·sqrt(u)`.
    pub fn sample_threshold(&self, rng: &mut ChaCha8Rng) -> Rat {
        let u: f64 = rng.gen();
        let root = rat_from_f64(u.sqrt()).expect("sqrt of a unit uniform is finite");
        &self.alpha + (&self.beta - &self.alpha) * root
    }
}

/// Split the LP vector into per-orientation slices (vertical first).
fn split_values<'a>(inst: &Instance, x: &'a [Rat]) -> Result<(&'a [Rat], &'a [Rat]), RoundError> {
    if x.len() != inst.n_lines() {
        return Err(RoundError::SolutionShape {
            detail: format!("{} values for {} lines", x.len(), inst.n_lines()),
        });
    }
    Ok(x.split_at(inst.n_vlines()))
}

fn require_kind(inst: &Instance, expected: Kind) -> Result<(), RoundError> {
    if inst.kind != expected {
        return Err(RoundError::WrongKind {
            expected,
            got: inst.kind,
        });
    }
    Ok(())
}

fn require_distinct_coords(inst: &Instance, orientation: Orientation) -> Result<(), RoundError> {
    let coords: Vec<&Rat> = match orientation {
        Orientation::Vertical => inst.vlines.iter().map(|l| &l.coord).collect(),
        Orientation::Horizontal => inst.hlines.iter().map(|l| &l.coord).collect(),
    };
    let mut sorted = coords.clone();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(RoundError::DuplicateLineCoords { orientation });
    }
    Ok(())
}

/// One-axis interval system over a line subset. `lines` entries are
/// `(global index, coord, weight, value)`; coincident coordinates merge into
/// one point carrying the summed value, the cheapest weight, and that
/// cheapest line as representative. Returns the system, the representative
/// global line per point, and the rect index per interval.
fn axis_subsystem(
    mut lines: Vec<(usize, Rat, Rat, Rat)>,
    ranges: &[(usize, Rat, Rat)],
) -> (IntervalSystem, Vec<usize>, Vec<usize>) {
    lines.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut points: Vec<SysPoint> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    for (idx, coord, weight, value) in lines {
        match points.last_mut() {
            Some(last) if last.position == coord => {
                last.value = &last.value + &value;
                if weight < last.weight {
                    last.weight = weight;
                    *reps.last_mut().expect("rep tracks point") = idx;
                }
            }
            _ => {
                points.push(SysPoint {
                    position: coord,
                    value,
                    weight,
                });
                reps.push(idx);
            }
        }
    }
    let intervals: Vec<Interval> = ranges
        .iter()
        .map(|(_, lo, hi)| Interval::new(lo.clone(), hi.clone()))
        .collect();
    let rect_of: Vec<usize> = ranges.iter().map(|&(r, _, _)| r).collect();
    let system = IntervalSystem::new(points, intervals)
        .expect("merged coordinates are strictly increasing");
    (system, reps, rect_of)
}

/// All lines of one orientation as `(global index, coord, weight, value)`.
fn oriented_lines(inst: &Instance, values: &[Rat], orientation: Orientation) -> Vec<(usize, Rat, Rat, Rat)> {
    match orientation {
        Orientation::Vertical => inst
            .vlines
            .iter()
            .enumerate()
            .map(|(i, l)| (i, l.coord.clone(), l.weight.clone(), values[i].clone()))
            .collect(),
        Orientation::Horizontal => inst
            .hlines
            .iter()
            .enumerate()
            .map(|(j, l)| {
                (
                    inst.n_vlines() + j,
                    l.coord.clone(),
                    l.weight.clone(),
                    values[j].clone(),
                )
            })
            .collect(),
    }
}

/// Half-split rounding: send each rectangle to the orientation carrying at
/// least half of its LP mass, then solve both one-orientation instances
/// exactly. The result is feasible and at most twice the LP optimum.
pub fn gaur_round(inst: &Instance, lp_x: &[Rat]) -> Result<RoundedSolution, RoundError> {
    let (xv, yv) = split_values(inst, lp_x)?;
    let half = rat(1, 2);
    let mut vertical_ranges: Vec<(usize, Rat, Rat)> = Vec::new();
    let mut horizontal_ranges: Vec<(usize, Rat, Rat)> = Vec::new();
    for (r, rect) in inst.rects.iter().enumerate() {
        let mut vmass = Rat::zero();
        for (i, l) in inst.vlines.iter().enumerate() {
            if l.coord >= rect.x1 && l.coord <= rect.x2 {
                vmass = vmass + &xv[i];
            }
        }
        if vmass >= half {
            vertical_ranges.push((r, rect.x1.clone(), rect.x2.clone()));
        } else {
            horizontal_ranges.push((r, rect.y1.clone(), rect.y2.clone()));
        }
    }
    let mut lines: BTreeSet<usize> = BTreeSet::new();
    if !vertical_ranges.is_empty() {
        let (sys, reps, _) = axis_subsystem(
            oriented_lines(inst, xv, Orientation::Vertical),
            &vertical_ranges,
        );
        let sol = min_weight_hitting(&sys)?;
        lines.extend(sol.chosen.iter().map(|&p| reps[p]));
    }
    if !horizontal_ranges.is_empty() {
        let (sys, reps, _) = axis_subsystem(
            oriented_lines(inst, yv, Orientation::Horizontal),
            &horizontal_ranges,
        );
        let sol = min_weight_hitting(&sys)?;
        lines.extend(sol.chosen.iter().map(|&p| reps[p]));
    }
    RoundedSolution::from_lines(inst, lines)
}

/// Mode selector for the sorted-suffix scheme on horizontal segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMode {
    /// Evaluate every suffix cutoff and return the cheapest actual solution.
    BestSuffix,
    /// Draw the threshold uniformly from `[0, 1 - 1/e]`.
    Random { seed: u64 },
}

/// Horizontal-line indices sorted ascending by LP value (ties by index).
fn sorted_hlines(inst: &Instance, yv: &[Rat]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.hlines.len()).collect();
    order.sort_by(|&a, &b| yv[a].cmp(&yv[b]).then(a.cmp(&b)));
    order
}

/// Build the solution that keeps the sorted suffix `order[from..]` of
/// horizontal lines and hits the remaining segments with an exact vertical
/// cover. Returns None when some leftover segment has no vertical candidate.
fn ks_suffix_solution(
    inst: &Instance,
    xv: &[Rat],
    order: &[usize],
    from: usize,
) -> Result<Option<RoundedSolution>, RoundError> {
    let nv = inst.n_vlines();
    let rounded: BTreeSet<usize> = order[from..].iter().map(|&j| nv + j).collect();
    let mut leftover: Vec<(usize, Rat, Rat)> = Vec::new();
    for (r, rect) in inst.rects.iter().enumerate() {
        let stabbed = inst
            .stabbers(rect)
            .into_iter()
            .any(|idx| rounded.contains(&idx));
        if !stabbed {
            leftover.push((r, rect.x1.clone(), rect.x2.clone()));
        }
    }
    let mut lines = rounded;
    if !leftover.is_empty() {
        let (sys, reps, _) = axis_subsystem(
            oriented_lines(inst, xv, Orientation::Vertical),
            &leftover,
        );
        match min_weight_hitting(&sys) {
            Ok(sol) => lines.extend(sol.chosen.iter().map(|&p| reps[p])),
            Err(ExactError::UncoverableInterval { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some(RoundedSolution::from_lines(inst, lines)?))
}

/// Sorted-suffix threshold rounding for horizontal-segment instances: keep
/// the horizontal lines whose LP value clears the threshold, cover the rest
/// with an exact vertical solve.
pub fn ks_round(inst: &Instance, lp_x: &[Rat], mode: KsMode) -> Result<RoundedSolution, RoundError> {
    require_kind(inst, Kind::HorizSegStab)?;
    require_distinct_coords(inst, Orientation::Horizontal)?;
    let (xv, yv) = split_values(inst, lp_x)?;
    let order = sorted_hlines(inst, yv);
    let m = order.len();
    match mode {
        KsMode::BestSuffix => {
            let mut best: Option<RoundedSolution> = None;
            for from in 0..=m {
                let Some(cand) = ks_suffix_solution(inst, xv, &order, from)? else {
                    continue;
                };
                best = Some(match best {
                    None => cand,
                    Some(b) => {
                        if cand.weight < b.weight
                            || (cand.weight == b.weight && cand.chosen < b.chosen)
                        {
                            cand
                        } else {
                            b
                        }
                    }
                });
            }
            best.ok_or_else(|| RoundError::SolutionShape {
                detail: "no feasible suffix; instance lacks stabbing lines".into(),
            })
        }
        KsMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: f64 = rng.gen();
            let hi = 1.0 - (-1.0f64).exp();
            let tau = rat_from_f64(u * hi).expect("threshold draw is finite");
            // First sorted position whose value reaches tau.
            let from = order.partition_point(|&j| yv[j] < tau);
            ks_suffix_solution(inst, xv, &order, from)?.ok_or_else(|| RoundError::SolutionShape {
                detail: "threshold draw produced an uncoverable leftover".into(),
            })
        }
    }
}

/// Analytic per-suffix cost bounds: for each cutoff position `k` (1-based,
/// over horizontal lines sorted by LP value), the suffix weight plus
/// `w(x*) / (1 - y*_(k))`. `None` marks an unbounded entry (threshold value
/// 1). The realized best-suffix weight never exceeds any finite entry.
pub fn ks_suffix_bounds(inst: &Instance, lp_x: &[Rat]) -> Result<Vec<Option<Rat>>, RoundError> {
    require_kind(inst, Kind::HorizSegStab)?;
    let (xv, yv) = split_values(inst, lp_x)?;
    let order = sorted_hlines(inst, yv);
    let wx: Rat = inst
        .vlines
        .iter()
        .zip(xv)
        .map(|(l, v)| &l.weight * v)
        .fold(Rat::zero(), |a, b| a + b);
    let mut suffix = Rat::zero();
    let mut suffixes: Vec<Rat> = vec![Rat::zero(); order.len() + 1];
    for k in (0..order.len()).rev() {
        suffix = suffix + &inst.hlines[order[k]].weight;
        suffixes[k] = suffix.clone();
    }
    let mut out = Vec::with_capacity(order.len());
    for k in 0..order.len() {
        let yk = &yv[order[k]];
        if yk >= &Rat::one() {
            out.push(None);
        } else {
            out.push(Some(&suffixes[k] + &wx / (Rat::one() - yk)));
        }
    }
    Ok(out)
}

/// Mode selector for the dual-threshold segment scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegMode {
    /// Evaluate all candidate threshold pairs and return the cheapest.
    Derandomized,
    /// Draw `τ` from the schedule density, pair it with `h(τ)`, and assign
    /// the pair to the axes in a random order.
    Random { seed: u64 },
}

/// The rounding construction for one threshold pair: round both axes at
/// their thresholds, then hit the leftover segments of each orientation with
/// an exact cover over the other orientation's unrounded lines.
fn segstab_solution_at(
    inst: &Instance,
    xv: &[Rat],
    yv: &[Rat],
    tau_x: &Rat,
    tau_y: &Rat,
) -> Result<RoundedSolution, RoundError> {
    let nv = inst.n_vlines();
    let mut rounded: BTreeSet<usize> = BTreeSet::new();
    for (i, v) in xv.iter().enumerate() {
        if v >= tau_x {
            rounded.insert(i);
        }
    }
    for (j, v) in yv.iter().enumerate() {
        if v >= tau_y {
            rounded.insert(nv + j);
        }
    }
    let mut left_h: Vec<(usize, Rat, Rat)> = Vec::new();
    let mut left_v: Vec<(usize, Rat, Rat)> = Vec::new();
    for (r, rect) in inst.rects.iter().enumerate() {
        let stabbed = inst
            .stabbers(rect)
            .into_iter()
            .any(|idx| rounded.contains(&idx));
        if stabbed {
            continue;
        }
        if rect.is_horizontal_segment() {
            left_h.push((r, rect.x1.clone(), rect.x2.clone()));
        } else {
            left_v.push((r, rect.y1.clone(), rect.y2.clone()));
        }
    }
    let mut lines = rounded.clone();
    if !left_h.is_empty() {
        let avail: Vec<(usize, Rat, Rat, Rat)> =
            oriented_lines(inst, xv, Orientation::Vertical)
                .into_iter()
                .filter(|(idx, _, _, _)| !rounded.contains(idx))
                .collect();
        let (sys, reps, _) = axis_subsystem(avail, &left_h);
        let sol = min_weight_hitting(&sys)?;
        lines.extend(sol.chosen.iter().map(|&p| reps[p]));
    }
    if !left_v.is_empty() {
        let avail: Vec<(usize, Rat, Rat, Rat)> =
            oriented_lines(inst, yv, Orientation::Horizontal)
                .into_iter()
                .filter(|(idx, _, _, _)| !rounded.contains(idx))
                .collect();
        let (sys, reps, _) = axis_subsystem(avail, &left_v);
        let sol = min_weight_hitting(&sys)?;
        lines.extend(sol.chosen.iter().map(|&p| reps[p]));
    }
    RoundedSolution::from_lines(inst, lines)
}

/// Analytic cost bound for one threshold pair: rounded weight on both axes
/// plus each axis's unrounded LP mass amplified by the other threshold's
/// slack. `None` when a slack is zero against positive mass (unbounded).
pub fn segstab_pair_bound(
    inst: &Instance,
    lp_x: &[Rat],
    tau_x: &Rat,
    tau_y: &Rat,
) -> Result<Option<Rat>, RoundError> {
    let (xv, yv) = split_values(inst, lp_x)?;
    let mut total = Rat::zero();
    let mut x_rest = Rat::zero();
    let mut y_rest = Rat::zero();
    for (i, l) in inst.vlines.iter().enumerate() {
        if &xv[i] >= tau_x {
            total = total + &l.weight;
        } else {
            x_rest = x_rest + &l.weight * &xv[i];
        }
    }
    for (j, l) in inst.hlines.iter().enumerate() {
        if &yv[j] >= tau_y {
            total = total + &l.weight;
        } else {
            y_rest = y_rest + &l.weight * &yv[j];
        }
    }
    let one = Rat::one();
    if !x_rest.is_zero() {
        if tau_y >= &one {
            return Ok(None);
        }
        total = total + &x_rest / (&one - tau_y);
    }
    if !y_rest.is_zero() {
        if tau_x >= &one {
            return Ok(None);
        }
        total = total + &y_rest / (&one - tau_x);
    }
    Ok(Some(total))
}

/// Dual-threshold rounding for mixed segment instances.
pub fn segstab_round(
    inst: &Instance,
    lp_x: &[Rat],
    mode: SegMode,
) -> Result<RoundedSolution, RoundError> {
    segstab_round_with(inst, lp_x, mode, &ThresholdSchedule::standard())
}

/// Same as [`segstab_round`] with an explicit threshold schedule.
pub fn segstab_round_with(
    inst: &Instance,
    lp_x: &[Rat],
    mode: SegMode,
    schedule: &ThresholdSchedule,
) -> Result<RoundedSolution, RoundError> {
    require_kind(inst, Kind::SegStab)?;
    require_distinct_coords(inst, Orientation::Vertical)?;
    require_distinct_coords(inst, Orientation::Horizontal)?;
    let (xv, yv) = split_values(inst, lp_x)?;
    match mode {
        SegMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau = schedule.sample_threshold(&mut rng);
            let conj = schedule.h(&tau);
            let (tau_x, tau_y) = if rng.gen::<bool>() {
                (tau, conj)
            } else {
                (conj, tau)
            };
            segstab_solution_at(inst, xv, yv, &tau_x, &tau_y)
        }
        SegMode::Derandomized => {
            let mut cands: Vec<Rat> = xv.iter().chain(yv.iter()).cloned().collect();
            cands.push(schedule.alpha.clone());
            cands.push(schedule.beta.clone());
            cands.push(schedule.gamma_thr.clone());
            cands.sort();
            cands.dedup();
            let mut best: Option<RoundedSolution> = None;
            for tx in &cands {
                for ty in &cands {
                    let cand = segstab_solution_at(inst, xv, yv, tx, ty)?;
                    best = Some(match best {
                        None => cand,
                        Some(b) => {
                            if cand.weight < b.weight
                                || (cand.weight == b.weight && cand.chosen < b.chosen)
                            {
                                cand
                            } else {
                                b
                            }
                        }
                    });
                }
            }
            best.ok_or_else(|| RoundError::SolutionShape {
                detail: "empty candidate set".into(),
            })
        }
    }
}

/// Mode selector for the complementary-threshold net scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSqMode {
    /// Evaluate all threshold breakpoints (and cell midpoints) and return
    /// the cheapest.
    Derandomized,
    /// Draw `τx` uniformly from `[0, 1)` and use `τy = 1 - τx`.
    Random { seed: u64 },
}

/// Net construction at one complementary threshold pair.
fn unitsq_solution_at(
    inst: &Instance,
    xv: &[Rat],
    yv: &[Rat],
    tau_x: &Rat,
) -> Result<RoundedSolution, RoundError> {
    let tau_y = Rat::one() - tau_x;
    let x_ranges: Vec<(usize, Rat, Rat)> = inst
        .rects
        .iter()
        .enumerate()
        .map(|(r, rect)| (r, rect.x1.clone(), rect.x2.clone()))
        .collect();
    let y_ranges: Vec<(usize, Rat, Rat)> = inst
        .rects
        .iter()
        .enumerate()
        .map(|(r, rect)| (r, rect.y1.clone(), rect.y2.clone()))
        .collect();
    let (xsys, xreps, _) = axis_subsystem(oriented_lines(inst, xv, Orientation::Vertical), &x_ranges);
    let (ysys, yreps, _) =
        axis_subsystem(oriented_lines(inst, yv, Orientation::Horizontal), &y_ranges);
    let xnet = optimal_net(&xsys, tau_x)?;
    let ynet = optimal_net(&ysys, &tau_y)?;
    let mut lines: BTreeSet<usize> = BTreeSet::new();
    lines.extend(xnet.chosen.iter().map(|&p| xreps[p]));
    lines.extend(ynet.chosen.iter().map(|&p| yreps[p]));
    RoundedSolution::from_lines(inst, lines)
}

/// Complementary-threshold net rounding for unweighted unit-square
/// instances: an optimal `τx`-net on the x-projection joined with an optimal
/// `(1-τx)`-net on the y-projection.
pub fn unitsq_round(
    inst: &Instance,
    lp_x: &[Rat],
    mode: UnitSqMode,
) -> Result<RoundedSolution, RoundError> {
    require_kind(inst, Kind::UnitSqrStab)?;
    if inst.weighted {
        return Err(RoundError::WeightedUnsupported);
    }
    let (xv, yv) = split_values(inst, lp_x)?;
    match mode {
        UnitSqMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau_x = rat_from_f64(rng.gen::<f64>()).expect("uniform draw is finite");
            unitsq_solution_at(inst, xv, yv, &tau_x)
        }
        UnitSqMode::Derandomized => {
            // Breakpoints of the two step costs as functions of tau_x, plus
            // midpoints so every open cell between breakpoints is sampled.
            let mut brk: Vec<Rat> = vec![Rat::zero(), Rat::one()];
            for rect in &inst.rects {
                let xmass: Rat = inst
                    .vlines
                    .iter()
                    .zip(xv)
                    .filter(|(l, _)| l.coord >= rect.x1 && l.coord <= rect.x2)
                    .map(|(_, v)| v.clone())
                    .fold(Rat::zero(), |a, b| a + b);
                let ymass: Rat = inst
                    .hlines
                    .iter()
                    .zip(yv)
                    .filter(|(l, _)| l.coord >= rect.y1 && l.coord <= rect.y2)
                    .map(|(_, v)| v.clone())
                    .fold(Rat::zero(), |a, b| a + b);
                if xmass > Rat::zero() && xmass < Rat::one() {
                    brk.push(xmass);
                }
                let flip = Rat::one() - ymass;
                if flip > Rat::zero() && flip < Rat::one() {
                    brk.push(flip);
                }
            }
            brk.sort();
            brk.dedup();
            let mut cands = brk.clone();
            for w in brk.windows(2) {
                cands.push((&w[0] + &w[1]) / rat(2, 1));
            }
            cands.sort();
            cands.dedup();
            let mut best: Option<RoundedSolution> = None;
            for tau_x in &cands {
                let cand = unitsq_solution_at(inst, xv, yv, tau_x)?;
                best = Some(match best {
                    None => cand,
                    Some(b) => {
                        if cand.weight < b.weight
                            || (cand.weight == b.weight && cand.chosen < b.chosen)
                        {
                            cand
                        } else {
                            b
                        }
                    }
                });
            }
            best.ok_or_else(|| RoundError::SolutionShape {
                detail: "empty candidate set".into(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_opt, psi_profile};
    use crate::lp::{build_relaxation, solve, SolveMode};
    use crate::model::{Line, Rect};
    use crate::rational::int;
    use proptest::prelude::*;

    fn unit_line(coord: Rat) -> Line {
        Line {
            coord,
            weight: Rat::one(),
        }
    }

    fn wline(coord: Rat, weight: Rat) -> Line {
        Line { coord, weight }
    }

    fn cross_instance(kind: Kind) -> Instance {
        let inst = Instance {
            hlines: vec![unit_line(int(0)), unit_line(rat(1, 2))],
            kind,
            rects: vec![
                Rect::new(rat(-1, 4), rat(3, 4), int(10), int(11)),
                Rect::new(int(10), int(11), rat(-1, 4), rat(3, 4)),
                Rect::new(int(-1), int(0), int(-1), int(0)),
                Rect::new(int(-1), int(0), rat(1, 2), rat(3, 2)),
                Rect::new(rat(1, 2), rat(3, 2), int(-1), int(0)),
                Rect::new(rat(1, 2), rat(3, 2), rat(1, 2), rat(3, 2)),
            ],
            vlines: vec![unit_line(int(0)), unit_line(rat(1, 2))],
            weighted: false,
        };
        inst.validate().unwrap();
        inst
    }

    #[test]
    fn schedule_density_integrates_to_one() {
        let s = ThresholdSchedule::standard();
        // Antiderivative of the linear density is (τ-α)²/(β-α)².
        let span = &s.beta - &s.alpha;
        let integral = (&span * &span) / (&span * &span);
        assert_eq!(integral, Rat::one());
        // Midpoint value matches the closed form 2(τ-α)/(β-α)².
        let mid = (&s.alpha + &s.beta) / rat(2, 1);
        assert_eq!(s.rho(&mid), rat(2, 1) * (&mid - &s.alpha) / (&span * &span));
        assert!(s.rho(&rat(1, 10)).is_zero());
        assert!(s.rho(&rat(9, 10)).is_zero());
    }

    #[test]
    fn schedule_map_fixes_beta_and_caps_at_gamma() {
        let s = ThresholdSchedule::standard();
        assert_eq!(s.h(&s.beta), s.beta);
        assert_eq!(s.gamma_thr, rat(179, 300));
        assert_eq!(s.h(&s.alpha), rat(179, 300));
        // Involution and monotonicity.
        let tau = rat(3, 10);
        assert_eq!(s.h(&s.h(&tau)), tau);
        let lo = s.h(&rat(27, 100));
        let hi = s.h(&rat(33, 100));
        assert!(lo > hi, "map must decrease");
        // h(τ) ≥ τ on [alpha, beta].
        for num in [25i64, 30, 35, 40, 45] {
            let t = rat(num, 100);
            assert!(s.h(&t) >= t);
        }
    }

    #[test]
    fn schedule_samples_stay_in_range() {
        let s = ThresholdSchedule::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = s.sample_threshold(&mut rng);
            assert!(t >= s.alpha && t <= s.beta);
        }
    }

    #[test]
    fn schedule_rejects_bad_parameters() {
        assert!(ThresholdSchedule::new(rat(1, 2), rat(1, 4)).is_err());
        assert!(ThresholdSchedule::new(Rat::zero(), rat(1, 4)).is_err());
        assert!(ThresholdSchedule::new(rat(1, 4), Rat::one()).is_err());
    }

    #[test]
    fn gaur_on_cross_instance_costs_three() {
        let inst = cross_instance(Kind::RectStab);
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        assert_eq!(sol.objective, int(2));
        let rounded = gaur_round(&inst, &sol.x).unwrap();
        assert_eq!(rounded.weight, int(3));
        // Within the guarantee: weight <= 2 z*.
        assert!(rounded.weight <= rat(2, 1) * &sol.objective);
        // Witnesses all point at chosen lines that really stab.
        for (r, &w) in rounded.witness.iter().enumerate() {
            assert!(rounded.chosen.contains(&w));
            let (o, l) = inst.line(w);
            assert!(stabs(o, &l.coord, &inst.rects[r]));
        }
    }

    #[test]
    fn gaur_is_exact_on_one_orientation_instances() {
        // Only vertical lines exist, so every rect lands in the vertical
        // half and the split solve is the exact optimum.
        let inst = Instance {
            hlines: vec![],
            kind: Kind::RectStab,
            rects: vec![
                Rect::new(int(0), int(2), int(0), int(1)),
                Rect::new(int(3), int(5), int(0), int(1)),
                Rect::new(int(1), int(4), int(2), int(3)),
            ],
            vlines: vec![
                wline(int(1), int(2)),
                wline(int(2), int(1)),
                wline(int(4), int(1)),
            ],
            weighted: true,
        };
        inst.validate().unwrap();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let rounded = gaur_round(&inst, &sol.x).unwrap();
        let opt = brute_force_opt(&inst, 26).unwrap();
        assert_eq!(rounded.weight, opt.weight);
        assert_eq!(rounded.weight, sol.objective);
    }

    #[test]
    fn ks_rejects_wrong_kind() {
        let inst = cross_instance(Kind::RectStab);
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let err = ks_round(&inst, &sol.x, KsMode::BestSuffix).unwrap_err();
        assert!(matches!(err, RoundError::WrongKind { .. }));
    }

    /// Two far-apart horizontal segments, expensive shared horizontal line,
    /// cheap verticals: the LP puts everything on the verticals.
    fn ks_vertical_instance() -> Instance {
        let inst = Instance {
            hlines: vec![wline(int(0), int(10))],
            kind: Kind::HorizSegStab,
            rects: vec![
                Rect::new(int(0), int(1), int(0), int(0)),
                Rect::new(int(3), int(4), int(0), int(0)),
            ],
            vlines: vec![wline(rat(1, 2), int(1)), wline(rat(7, 2), int(1))],
            weighted: true,
        };
        inst.validate().unwrap();
        inst
    }

    #[test]
    fn ks_goes_vertical_when_lp_does() {
        let inst = ks_vertical_instance();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        assert_eq!(sol.objective, int(2));
        let rounded = ks_round(&inst, &sol.x, KsMode::BestSuffix).unwrap();
        assert_eq!(rounded.weight, int(2));
        assert_eq!(rounded.chosen, vec![0, 1]);
    }

    #[test]
    fn ks_keeps_all_lines_when_lp_is_fully_horizontal() {
        // Segments reachable only by their own horizontal line.
        let inst = Instance {
            hlines: vec![unit_line(int(0)), unit_line(int(1))],
            kind: Kind::HorizSegStab,
            rects: vec![
                Rect::new(int(0), int(5), int(0), int(0)),
                Rect::new(int(0), int(5), int(1), int(1)),
            ],
            vlines: vec![],
            weighted: false,
        };
        inst.validate().unwrap();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        assert_eq!(sol.objective, int(2));
        let rounded = ks_round(&inst, &sol.x, KsMode::BestSuffix).unwrap();
        assert_eq!(rounded.weight, int(2));
        assert_eq!(rounded.chosen, vec![0, 1]);
    }

    #[test]
    fn ks_best_suffix_beats_every_finite_bound() {
        let inst = ks_vertical_instance();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let rounded = ks_round(&inst, &sol.x, KsMode::BestSuffix).unwrap();
        for bound in ks_suffix_bounds(&inst, &sol.x).unwrap().into_iter().flatten() {
            assert!(rounded.weight <= bound);
        }
    }

    #[test]
    fn ks_random_mode_is_feasible_and_bounded() {
        let inst = ks_vertical_instance();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let ratio_cap = rat(16, 10) * &sol.objective; // e/(e-1) ≈ 1.582 < 1.6
        for seed in 0..100 {
            let r = ks_round(&inst, &sol.x, KsMode::Random { seed }).unwrap();
            assert_eq!(r.witness.len(), inst.rects.len());
            assert!(r.weight <= ratio_cap, "seed {seed} weight {}", r.weight);
        }
    }

    /// Vertical segment at x=0, horizontal segment at y=5 needing either an
    /// expensive vertical or a cheap horizontal: integral LP.
    fn segstab_integral_instance() -> Instance {
        let inst = Instance {
            hlines: vec![unit_line(int(5))],
            kind: Kind::SegStab,
            rects: vec![
                Rect::new(int(0), int(0), int(0), int(1)),
                Rect::new(int(2), int(3), int(5), int(5)),
            ],
            vlines: vec![wline(int(0), int(1)), wline(rat(5, 2), int(3))],
            weighted: true,
        };
        inst.validate().unwrap();
        inst
    }

    #[test]
    fn segstab_returns_support_on_integral_lp() {
        let inst = segstab_integral_instance();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        assert_eq!(sol.objective, int(2));
        let derand = segstab_round(&inst, &sol.x, SegMode::Derandomized).unwrap();
        assert_eq!(derand.weight, int(2));
        assert_eq!(derand.chosen, vec![0, 2]);
        for seed in 0..20 {
            let r = segstab_round(&inst, &sol.x, SegMode::Random { seed }).unwrap();
            assert_eq!(r.weight, int(2));
        }
    }

    /// A mixed segment instance with a genuinely fractional LP optimum:
    /// three vertical and three horizontal segments arranged so crossing
    /// lines are shared.
    fn segstab_fractional_instance() -> Instance {
        let inst = Instance {
            hlines: vec![unit_line(int(0)), unit_line(int(2)), unit_line(int(4))],
            kind: Kind::SegStab,
            rects: vec![
                // Vertical segments spanning all three horizontal lines.
                Rect::new(int(1), int(1), int(0), int(4)),
                Rect::new(int(3), int(3), int(0), int(4)),
                // Horizontal segments spanning all three vertical lines.
                Rect::new(int(0), int(4), int(1), int(1)),
                Rect::new(int(0), int(4), int(3), int(3)),
            ],
            vlines: vec![unit_line(int(0)), unit_line(int(2)), unit_line(int(4))],
            weighted: false,
        };
        inst.validate().unwrap();
        inst
    }

    #[test]
    fn segstab_derand_beats_random_draws() {
        let inst = segstab_fractional_instance();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let derand = segstab_round(&inst, &sol.x, SegMode::Derandomized).unwrap();
        for seed in 0..60 {
            let r = segstab_round(&inst, &sol.x, SegMode::Random { seed }).unwrap();
            assert!(derand.weight <= r.weight, "seed {seed}");
            assert_eq!(r.witness.len(), inst.rects.len());
        }
        // Guarantee check at the analysis constant.
        assert!(&derand.weight * rat(1000, 1) <= rat(1935, 1) * &sol.objective);
    }

    #[test]
    fn segstab_derand_respects_every_pair_bound() {
        let inst = segstab_fractional_instance();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let derand = segstab_round(&inst, &sol.x, SegMode::Derandomized).unwrap();
        let (xv, yv) = split_values(&inst, &sol.x).unwrap();
        let s = ThresholdSchedule::standard();
        let mut cands: Vec<Rat> = xv.iter().chain(yv.iter()).cloned().collect();
        cands.push(s.alpha.clone());
        cands.push(s.beta.clone());
        cands.push(s.gamma_thr.clone());
        cands.sort();
        cands.dedup();
        for tx in &cands {
            for ty in &cands {
                if let Some(bound) = segstab_pair_bound(&inst, &sol.x, tx, ty).unwrap() {
                    assert!(
                        derand.weight <= bound,
                        "pair ({tx}, {ty}) bound {bound} beaten by {}",
                        derand.weight
                    );
                }
            }
        }
    }

    #[test]
    fn segstab_rejects_duplicate_coordinates() {
        let mut inst = segstab_integral_instance();
        inst.vlines.push(wline(int(0), int(9)));
        let values = vec![Rat::zero(); inst.n_lines()];
        let err = segstab_round(&inst, &values, SegMode::Derandomized).unwrap_err();
        assert!(matches!(err, RoundError::DuplicateLineCoords { .. }));
    }

    #[test]
    fn unitsq_single_square_uses_one_line() {
        let inst = Instance {
            hlines: vec![unit_line(rat(1, 2))],
            kind: Kind::UnitSqrStab,
            rects: vec![Rect::new(int(0), int(1), int(0), int(1))],
            vlines: vec![unit_line(rat(1, 2))],
            weighted: false,
        };
        inst.validate().unwrap();
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let rounded = unitsq_round(&inst, &sol.x, UnitSqMode::Derandomized).unwrap();
        assert_eq!(rounded.weight, Rat::one());
    }

    #[test]
    fn unitsq_on_cross_instance_realizes_three_halves() {
        let inst = cross_instance(Kind::UnitSqrStab);
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        assert_eq!(sol.objective, int(2));
        let rounded = unitsq_round(&inst, &sol.x, UnitSqMode::Derandomized).unwrap();
        assert_eq!(rounded.weight, int(3));
    }

    #[test]
    fn unitsq_derand_is_bounded_by_profile_integrals() {
        let inst = cross_instance(Kind::UnitSqrStab);
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        let (xv, yv) = split_values(&inst, &sol.x).unwrap();
        let x_ranges: Vec<(usize, Rat, Rat)> = inst
            .rects
            .iter()
            .enumerate()
            .map(|(r, rect)| (r, rect.x1.clone(), rect.x2.clone()))
            .collect();
        let y_ranges: Vec<(usize, Rat, Rat)> = inst
            .rects
            .iter()
            .enumerate()
            .map(|(r, rect)| (r, rect.y1.clone(), rect.y2.clone()))
            .collect();
        let (xsys, _, _) =
            axis_subsystem(oriented_lines(&inst, xv, Orientation::Vertical), &x_ranges);
        let (ysys, _, _) =
            axis_subsystem(oriented_lines(&inst, yv, Orientation::Horizontal), &y_ranges);
        let px = psi_profile(&xsys).unwrap();
        let py = psi_profile(&ysys).unwrap();
        assert_eq!(&px.psi_bar + &py.psi_bar, int(3));
        let rounded = unitsq_round(&inst, &sol.x, UnitSqMode::Derandomized).unwrap();
        assert!(rounded.weight <= &px.psi_bar + &py.psi_bar);
    }

    #[test]
    fn unitsq_random_mode_is_always_feasible() {
        let inst = cross_instance(Kind::UnitSqrStab);
        let lp = build_relaxation(&inst);
        let sol = solve(&lp, SolveMode::ExactRational).unwrap();
        for seed in 0..120 {
            let r = unitsq_round(&inst, &sol.x, UnitSqMode::Random { seed }).unwrap();
            assert_eq!(r.witness.len(), inst.rects.len());
            assert!(r.weight <= int(4));
        }
    }

    #[test]
    fn unitsq_rejects_weighted_instances() {
        let mut inst = cross_instance(Kind::UnitSqrStab);
        inst.weighted = true;
        inst.vlines[0].weight = int(2);
        let values = vec![rat(1, 2); 4];
        let err = unitsq_round(&inst, &values, UnitSqMode::Derandomized).unwrap_err();
        assert_eq!(err, RoundError::WeightedUnsupported);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gaur_feasible_and_within_factor_two(
            vcoords in proptest::collection::vec(0i64..10, 2..5usize),
            hcoords in proptest::collection::vec(0i64..10, 2..5usize),
            boxes in proptest::collection::vec((0i64..9, 1i64..4, 0i64..9, 1i64..4), 1..6usize),
        ) {
            let vlines: Vec<Line> = vcoords.iter().map(|&c| unit_line(int(c))).collect();
            let hlines: Vec<Line> = hcoords.iter().map(|&c| unit_line(int(c))).collect();
            let rects: Vec<Rect> = boxes
                .iter()
                .map(|&(x, dx, y, dy)| Rect::new(int(x), int(x + dx), int(y), int(y + dy)))
                .collect();
            let inst = Instance {
                hlines,
                kind: Kind::RectStab,
                rects,
                vlines,
                weighted: false,
            };
            prop_assume!(inst.validate().is_ok());
            let lp = build_relaxation(&inst);
            let sol = solve(&lp, SolveMode::ExactRational).unwrap();
            let rounded = gaur_round(&inst, &sol.x).unwrap();
            prop_assert_eq!(rounded.witness.len(), inst.rects.len());
            prop_assert!(rounded.weight <= rat(2, 1) * &sol.objective);
        }
    }
}
