//! Exact polynomial machinery on one-dimensional interval systems: the
//! minimum-weight hitting DP, optimal and randomized ε-nets over stacked
//! fractional values, net-weight profiles ψ with their exact integral ψ̄,
//! shifted partitions of a host segment, and a small branch-and-bound oracle
//! for whole stabbing instances.

use crate::model::{clique_range, maximal_interval_cliques, Instance, Interval, IntervalSystem};
use crate::rational::Rat;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::error::Error;
use std::fmt;

/// A selected subset with its total weight. `chosen` holds point indices for
/// the interval-system solvers and global line indices for
/// [`brute_force_opt`]; it is always sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct StabSolution {
    pub chosen: Vec<usize>,
    pub weight: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactError {
    /// An interval contains no candidate point at all.
    UncoverableInterval { index: usize },
    /// A rectangle is stabbed by no line of the instance.
    UnstabbableRect { index: usize },
    /// The instance has more candidate lines than the enumeration cap.
    CapExceeded { lines: usize, cap: usize },
    /// Shifted-partition parameters out of range.
    BadPartition { detail: String },
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::UncoverableInterval { index } => {
                write!(f, "interval {index} contains no candidate point")
            }
            ExactError::UnstabbableRect { index } => {
                write!(f, "rectangle {index} is stabbed by no line")
            }
            ExactError::CapExceeded { lines, cap } => write!(
                f,
                "instance has {lines} lines, above the enumeration cap {cap}; shrink the instance or raise the cap"
            ),
            ExactError::BadPartition { detail } => write!(f, "bad shifted partition: {detail}"),
        }
    }
}

impl Error for ExactError {}

/// Minimum-weight subset of the system's points hitting every interval,
/// by dynamic programming over points in position order.
///
/// A gap between consecutive chosen points is legal only when no interval's
/// point range falls entirely inside it; scanning chosen points left to
/// right under that rule hits every interval. Ties between equal-weight
/// predecessors break toward the smaller point index, so the witness set is
/// deterministic.
pub fn min_weight_hitting(system: &IntervalSystem) -> Result<StabSolution, ExactError> {
    let n = system.points.len();
    // 1-based point ranges per interval; fail on point-free intervals.
    let mut ranges: Vec<(usize, usize)> = Vec::with_capacity(system.intervals.len());
    for (idx, _) in system.intervals.iter().enumerate() {
        match system.point_range(idx) {
            Some((first, last)) => ranges.push((first + 1, last + 1)),
            None => return Err(ExactError::UncoverableInterval { index: idx }),
        }
    }
    if ranges.is_empty() {
        return Ok(StabSolution {
            chosen: Vec::new(),
            weight: Rat::zero(),
        });
    }
    // m[i] = least `last` over intervals whose range starts strictly after
    // point i (1-based); the next chosen point must be <= m[i].
    let inf = n + 1;
    let mut m = vec![inf; n + 1];
    for &(first, last) in &ranges {
        // This interval constrains every state i < first.
        if last < m[first - 1] {
            m[first - 1] = last;
        }
    }
    for i in (0..n).rev() {
        if m[i + 1] < m[i] {
            m[i] = m[i + 1];
        }
    }
    let max_first = ranges.iter().map(|&(f, _)| f).max().unwrap_or(0);

    // dp[j] = best weight of a hitting prefix whose last chosen point is j
    // (1-based); dp[0] is the empty start sentinel.
    let mut dp: Vec<Option<Rat>> = vec![None; n + 1];
    let mut parent: Vec<usize> = vec![0; n + 1];
    dp[0] = Some(Rat::zero());
    for j in 1..=n {
        let w = &system.points[j - 1].weight;
        let mut best: Option<(Rat, usize)> = None;
        for i in 0..j {
            let Some(di) = &dp[i] else { continue };
            if m[i] < j {
                continue; // some interval sits wholly inside the gap (i, j)
            }
            let cand = di + w;
            best = match best {
                None => Some((cand, i)),
                Some((bw, bi)) => {
                    if cand < bw {
                        Some((cand, i))
                    } else {
                        Some((bw, bi))
                    }
                }
            };
        }
        if let Some((bw, bi)) = best {
            dp[j] = Some(bw);
            parent[j] = bi;
        }
    }

    // Closing gap: the final chosen point must satisfy m[j] = inf restricted
    // to intervals starting after j, i.e. j >= max_first.
    let mut best_end: Option<(Rat, usize)> = None;
    for j in max_first..=n {
        let Some(dj) = &dp[j] else { continue };
        // j = 0 only occurs when there are no intervals (handled above).
        if j == 0 {
            continue;
        }
        best_end = match best_end {
            None => Some((dj.clone(), j)),
            Some((bw, bj)) => {
                if *dj < bw {
                    Some((dj.clone(), j))
                } else {
                    Some((bw, bj))
                }
            }
        };
    }
    let (weight, mut at) = best_end.expect("every interval holds a point, so a hitting set exists");
    let mut chosen = Vec::new();
    while at != 0 {
        chosen.push(at - 1);
        at = parent[at];
    }
    chosen.reverse();
    Ok(StabSolution { chosen, weight })
}

/// Intervals demanded at threshold `eps`: mass at least `eps` when
/// `eps > 0`, strictly positive mass when `eps = 0`.
fn demanded_intervals(system: &IntervalSystem, eps: &Rat) -> Vec<usize> {
    let strict = eps.is_zero();
    (0..system.intervals.len())
        .filter(|&i| {
            let mass = system.x_of(i);
            if strict {
                mass > Rat::zero()
            } else {
                mass >= *eps
            }
        })
        .collect()
}

/// Minimum-weight point set hitting every interval of mass at least `eps`
/// (strictly positive mass when `eps = 0`). The returned weight never
/// exceeds `Σ w_v x_v / eps`, which is asserted.
pub fn optimal_net(system: &IntervalSystem, eps: &Rat) -> Result<StabSolution, ExactError> {
    let demanded = demanded_intervals(system, eps);
    if demanded.is_empty() {
        return Ok(StabSolution {
            chosen: Vec::new(),
            weight: Rat::zero(),
        });
    }
    let sub = IntervalSystem {
        points: system.points.clone(),
        intervals: demanded
            .iter()
            .map(|&i| system.intervals[i].clone())
            .collect(),
    };
    let sol = match min_weight_hitting(&sub) {
        Ok(s) => s,
        // Remap the failing interval back to its index in the full system.
        Err(ExactError::UncoverableInterval { index }) => {
            return Err(ExactError::UncoverableInterval {
                index: demanded[index],
            })
        }
        Err(e) => return Err(e),
    };
    if eps > &Rat::zero() {
        let mass_weight: Rat = system
            .points
            .iter()
            .map(|p| &p.weight * &p.value)
            .fold(Rat::zero(), |a, b| a + b);
        assert!(
            &sol.weight * eps <= mass_weight,
            "net weight guarantee violated"
        );
    }
    Ok(sol)
}

/// An (`period`, `shift`)-shifted partition of the host segment
/// `[0, host_len]`: cut positions are `shift + m*period` for integer
/// `m >= 0` that land inside the host.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedPartition {
    pub period: Rat,
    pub shift: Rat,
    pub host_len: Rat,
}

impl ShiftedPartition {
    pub fn new(period: Rat, shift: Rat, host_len: Rat) -> Result<ShiftedPartition, ExactError> {
        if period <= Rat::zero() {
            return Err(ExactError::BadPartition {
                detail: "period must be positive".into(),
            });
        }
        if shift < Rat::zero() || shift >= period {
            return Err(ExactError::BadPartition {
                detail: "shift must lie in [0, period)".into(),
            });
        }
        if host_len < Rat::zero() {
            return Err(ExactError::BadPartition {
                detail: "host length must be nonnegative".into(),
            });
        }
        Ok(ShiftedPartition {
            period,
            shift,
            host_len,
        })
    }

    /// All cut positions inside the host segment, ascending.
    pub fn cut_positions(&self) -> Vec<Rat> {
        let mut cuts = Vec::new();
        let mut cut = self.shift.clone();
        while cut <= self.host_len {
            cuts.push(cut.clone());
            cut = cut + &self.period;
        }
        cuts
    }

    /// Smallest cut strictly greater than `pos`.
    fn next_cut_after(&self, pos: &Rat) -> Rat {
        let q = ((pos - &self.shift) / &self.period).floor();
        &self.shift + (q + Rat::one()) * &self.period
    }

    /// Smallest cut at or above `pos` (with `m >= 0`).
    fn next_cut_at_or_after(&self, pos: &Rat) -> Rat {
        let mut q = ((pos - &self.shift) / &self.period).ceil();
        if q < Rat::zero() {
            q = Rat::zero();
        }
        &self.shift + q * &self.period
    }
}

/// True iff some cut of the partition lies in the open interior of the
/// interval.
pub fn crossings(partition: &ShiftedPartition, interval: &Interval) -> bool {
    debug_assert!(interval.lo >= Rat::zero() && interval.hi <= partition.host_len);
    if interval.lo >= interval.hi {
        return false;
    }
    partition.next_cut_after(&interval.lo) < interval.hi
}

/// Randomized ε-net: stack the point values into consecutive segments, draw
/// a uniform shift `δ ∈ [0, eps)` from the seeded generator, and select
/// every positive-value point whose stacked segment contains a cut (touching
/// an endpoint counts). Every interval of mass at least `eps` is then hit
/// with certainty, and each point is selected with probability `x_v /
/// eps` (capped at 1).
pub fn random_net(system: &IntervalSystem, eps: &Rat, seed: u64) -> Result<StabSolution, ExactError> {
    assert!(eps > &Rat::zero(), "random net needs a positive threshold");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.gen::<f64>();
    let u_exact = crate::rational::rat_from_f64(u).expect("uniform draw is finite");
    let delta = u_exact * eps;
    let partition = ShiftedPartition::new(eps.clone(), delta, system.total_value())?;

    let mut chosen = Vec::new();
    let mut weight = Rat::zero();
    let mut stacked_lo = Rat::zero();
    for (v, p) in system.points.iter().enumerate() {
        if p.value.is_zero() {
            continue;
        }
        let stacked_hi = &stacked_lo + &p.value;
        // Selected if the first cut at or after the segment start is still
        // inside the closed segment.
        if partition.next_cut_at_or_after(&stacked_lo) <= stacked_hi {
            chosen.push(v);
            weight = weight + &p.weight;
        }
        stacked_lo = stacked_hi;
    }
    Ok(StabSolution { chosen, weight })
}

/// The step function τ ↦ optimal net weight, tabulated exactly.
///
/// `values[i]` is the net weight on the threshold segment
/// `(breakpoints[i], breakpoints[i+1]]`; `psi_bar` is the exact integral of
/// the step function over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetProfile {
    pub breakpoints: Vec<Rat>,
    pub values: Vec<Rat>,
    pub psi_bar: Rat,
}

impl NetProfile {
    /// Net weight at threshold `tau` in `(0, 1]`.
    pub fn value_at(&self, tau: &Rat) -> Rat {
        for i in 0..self.values.len() {
            if *tau <= self.breakpoints[i + 1] {
                return self.values[i].clone();
            }
        }
        self.values.last().cloned().unwrap_or_else(Rat::zero)
    }

    /// For integer-valued profiles (unit weights): the thresholds where the
    /// profile drops below each level `1..=max`, whose sum re-derives the
    /// integral by horizontal slabs. Returns None when some value is not an
    /// integer.
    pub fn level_thresholds(&self) -> Option<Vec<Rat>> {
        if self.values.iter().any(|v| !v.is_integer()) {
            return None;
        }
        let max = self
            .values
            .first()
            .cloned()
            .unwrap_or_else(Rat::zero)
            .to_integer();
        let mut out = Vec::new();
        let mut level = num::BigInt::from(1);
        while level <= max {
            let lrat = Rat::from_integer(level.clone());
            let mut tau = Rat::one();
            for i in 0..self.values.len() {
                if self.values[i] < lrat {
                    tau = self.breakpoints[i].clone();
                    break;
                }
            }
            out.push(tau);
            level += 1;
        }
        Some(out)
    }
}

/// Exact net-weight profile of the system: one hitting solve per distinct
/// positive interval mass below 1 (the only places the demanded set can
/// change), then the integral as a finite sum.
pub fn psi_profile(system: &IntervalSystem) -> Result<NetProfile, ExactError> {
    let mut breakpoints: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for i in 0..system.intervals.len() {
        let mass = system.x_of(i);
        if mass > Rat::zero() && mass < Rat::one() {
            breakpoints.push(mass);
        }
    }
    breakpoints.sort();
    breakpoints.dedup();

    let mut values = Vec::with_capacity(breakpoints.len() - 1);
    let mut psi_bar = Rat::zero();
    for i in 0..breakpoints.len() - 1 {
        let hi = breakpoints[i + 1].clone();
        let sol = optimal_net(system, &hi)?;
        let len = &breakpoints[i + 1] - &breakpoints[i];
        psi_bar = psi_bar + len * &sol.weight;
        values.push(sol.weight);
    }
    debug_assert!(
        values.windows(2).all(|w| w[0] >= w[1]),
        "net weight must not increase with the threshold"
    );
    Ok(NetProfile {
        breakpoints,
        values,
        psi_bar,
    })
}

/// True iff every maximal clique of the system's intervals contains at least
/// one candidate point in its common range.
pub fn continuity_check(system: &IntervalSystem) -> bool {
    let cliques = maximal_interval_cliques(&system.intervals);
    for clique in cliques {
        let (lo, hi) = clique_range(&clique, &system.intervals);
        let first = system
            .points
            .partition_point(|p| p.position < lo);
        let has_point = first < system.points.len() && system.points[first].position <= hi;
        if !has_point {
            return false;
        }
    }
    true
}

/// Exact minimum-weight stabbing set by branch and bound over line subsets:
/// branch on the uncovered rectangle with the fewest stabbing lines, prune
/// by current weight, and break weight ties toward the lexicographically
/// smaller sorted line list.
pub fn brute_force_opt(inst: &Instance, cap: usize) -> Result<StabSolution, ExactError> {
    let n = inst.n_lines();
    let hard_cap = cap.min(63);
    if n > hard_cap {
        return Err(ExactError::CapExceeded {
            lines: n,
            cap: hard_cap,
        });
    }
    let mut stab_masks: Vec<u64> = Vec::with_capacity(inst.rects.len());
    for (i, r) in inst.rects.iter().enumerate() {
        let mut mask = 0u64;
        for idx in inst.stabbers(r) {
            mask |= 1 << idx;
        }
        if mask == 0 {
            return Err(ExactError::UnstabbableRect { index: i });
        }
        stab_masks.push(mask);
    }
    let weights: Vec<Rat> = (0..n).map(|i| inst.line_weight(i).clone()).collect();

    struct Search<'a> {
        stab_masks: &'a [u64],
        weights: &'a [Rat],
        best_weight: Rat,
        best_set: Vec<usize>,
    }

    impl Search<'_> {
        fn consider(&mut self, chosen: &[usize], weight: &Rat) {
            let mut sorted = chosen.to_vec();
            sorted.sort_unstable();
            if *weight < self.best_weight
                || (*weight == self.best_weight && sorted < self.best_set)
            {
                self.best_weight = weight.clone();
                self.best_set = sorted;
            }
        }

        fn dfs(&mut self, chosen_mask: u64, chosen: &mut Vec<usize>, weight: &Rat) {
            if *weight > self.best_weight {
                return;
            }
            // Most-constrained uncovered rectangle.
            let mut branch: Option<u64> = None;
            let mut branch_count = u32::MAX;
            for &mask in self.stab_masks {
                if mask & chosen_mask != 0 {
                    continue;
                }
                let c = mask.count_ones();
                if c < branch_count {
                    branch_count = c;
                    branch = Some(mask);
                }
            }
            let Some(mask) = branch else {
                self.consider(chosen, weight);
                return;
            };
            let mut rest = mask;
            while rest != 0 {
                let line = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                chosen.push(line);
                let w = weight + &self.weights[line];
                self.dfs(chosen_mask | (1 << line), chosen, &w);
                chosen.pop();
            }
        }
    }

    let all_weight: Rat = weights.iter().fold(Rat::zero(), |a, b| a + b);
    let mut search = Search {
        stab_masks: &stab_masks,
        weights: &weights,
        best_weight: all_weight,
        best_set: (0..n).collect(),
    };
    search.dfs(0, &mut Vec::new(), &Rat::zero());
    let weight = search.best_weight.clone();
    Ok(StabSolution {
        chosen: search.best_set,
        weight,
    })
}
