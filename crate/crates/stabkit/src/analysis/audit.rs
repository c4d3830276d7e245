//! Randomized stress audits of the certified window bounds: sampled leveled
//! configurations whose best-case value is found by an exact LP, and sampled
//! unit-interval systems whose net-profile integral is compared against the
//! window constants.

use super::AnalysisError;
use crate::exact::{continuity_check, psi_profile};
use crate::lp::{LinearProgram, Relation, Sense, SolveMode, solve};
use crate::model::{Interval, IntervalSystem, SysPoint};
use crate::rational::{rat, rat_from_f64, Rat};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Outcome of a sampled audit: the extreme observed ratio, the bound it was
/// held against, and how many trials broke it.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub trials: u32,
    pub bound: Rat,
    pub max_ratio: Rat,
    pub worst_trial: u32,
    pub violations: u32,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

pub(crate) fn mix_seed(seed: u64, trial: u32) -> u64 {
    seed ^ (u64::from(trial).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Draw `count` pairwise-disjoint unit intervals inside `[0, span]` via the
/// sorted-gaps trick; retries on the measure-zero event of touching
/// endpoints.
fn disjoint_unit_intervals(rng: &mut ChaCha8Rng, count: usize, span: u32) -> Vec<Interval> {
    let slack = f64::from(span) - count as f64;
    debug_assert!(slack >= 0.0, "level must fit in the window");
    loop {
        let mut offsets: Vec<f64> = (0..count).map(|_| rng.gen::<f64>() * slack).collect();
        offsets.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if offsets.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return offsets
            .iter()
            .enumerate()
            .map(|(i, &off)| {
                let lo = rat_from_f64(off).expect("finite draw") + rat(i as i64, 1);
                let hi = &lo + Rat::one();
                Interval::new(lo, hi)
            })
            .collect();
    }
}

/// Cell representatives of an interval arrangement: every endpoint and the
/// midpoint of each gap between consecutive endpoints, keeping one point per
/// distinct nonempty containment signature.
fn cell_representatives(intervals: &[Interval]) -> Vec<(Rat, Vec<usize>)> {
    let mut cuts: Vec<Rat> = Vec::new();
    for iv in intervals {
        cuts.push(iv.lo.clone());
        cuts.push(iv.hi.clone());
    }
    cuts.sort();
    cuts.dedup();
    let mut candidates = cuts.clone();
    for w in cuts.windows(2) {
        candidates.push((&w[0] + &w[1]) / rat(2, 1));
    }
    candidates.sort();
    let mut out: Vec<(Rat, Vec<usize>)> = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for p in candidates {
        let sig: Vec<usize> = intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv.lo <= p && p <= iv.hi)
            .map(|(i, _)| i)
            .collect();
        if sig.is_empty() || seen.contains(&sig) {
            continue;
        }
        seen.push(sig.clone());
        out.push((p, sig));
    }
    out
}

/// Best-case value of one leveled configuration: maximize the sum of
/// per-level guaranteed masses over unit total point mass, exactly.
fn config_value(levels: &[Vec<Interval>]) -> Rat {
    let flat: Vec<Interval> = levels.iter().flatten().cloned().collect();
    let cells = cell_representatives(&flat);
    let n_pts = cells.len();
    let k = levels.len();
    // Variables: point masses, then one guaranteed-mass variable per level.
    let mut costs = vec![Rat::zero(); n_pts];
    costs.extend(std::iter::repeat(Rat::one()).take(k));
    let mut lp = LinearProgram::minimize(costs);
    lp.sense = Sense::Max;
    // Level value is at most the mass of each of its intervals.
    let mut flat_idx = 0usize;
    for (ell, level) in levels.iter().enumerate() {
        for _ in level {
            let mut row = vec![Rat::zero(); n_pts + k];
            row[n_pts + ell] = Rat::one();
            for (p, (_, sig)) in cells.iter().enumerate() {
                if sig.contains(&flat_idx) {
                    row[p] = -Rat::one();
                }
            }
            lp.push_row(row, Relation::Le, Rat::zero());
            flat_idx += 1;
        }
    }
    // Unit total mass.
    let mut norm = vec![Rat::one(); n_pts];
    norm.extend(std::iter::repeat(Rat::zero()).take(k));
    lp.push_row(norm, Relation::Eq, Rat::one());
    let sol = solve(&lp, SolveMode::ExactRational).expect("audit LP is well-formed");
    sol.objective
}

/// Sample leveled configurations (level `ℓ` holds `ℓ` disjoint unit
/// intervals in `[0, window]`) and maximize each one's value exactly; the
/// observed maximum must stay at or under the certified window constant.
pub fn random_config_audit(
    k: usize,
    window: u32,
    trials: u32,
    seed: u64,
) -> Result<AuditReport, AnalysisError> {
    let bound = match (k, window) {
        (1, w) if w >= 1 => Rat::one(),
        (4, 5) => rat(19, 12),
        (5, 6) => rat(8, 5),
        _ => {
            return Err(AnalysisError::BadParameter {
                detail: format!("no certified bound for k={k} in a window of {window}"),
            })
        }
    };
    let results: Vec<(Rat, u32)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, trial));
            let levels: Vec<Vec<Interval>> = (1..=k)
                .map(|ell| disjoint_unit_intervals(&mut rng, ell, window))
                .collect();
            (config_value(&levels), trial)
        })
        .collect();
    let mut max_ratio = Rat::zero();
    let mut worst_trial = 0u32;
    let mut violations = 0u32;
    for (value, trial) in results {
        if value > bound {
            violations += 1;
        }
        if value > max_ratio {
            max_ratio = value;
            worst_trial = trial;
        }
    }
    Ok(AuditReport {
        trials,
        bound,
        max_ratio,
        worst_trial,
        violations,
    })
}

/// The certified profile bound for a window span (`None` = unrestricted).
pub fn profile_bound_for_window(window: Option<u32>) -> Result<Rat, AnalysisError> {
    match window {
        Some(2) => Ok(Rat::one()),
        Some(5) => Ok(rat(19, 12)),
        Some(6) => Ok(rat(8, 5)),
        None => Ok(rat(119, 60)),
        Some(w) => Err(AnalysisError::BadParameter {
            detail: format!("no certified profile bound for a window of {w}"),
        }),
    }
}

/// One random unit-interval system over a span, with unit-weight candidate
/// points at every maximal-clique cell (continuity holds by construction)
/// and random rational point values.
fn random_profile_system(rng: &mut ChaCha8Rng, span: u32) -> IntervalSystem {
    let n_iv = rng.gen_range(2..=7usize);
    let max_lo = f64::from(span) - 1.0;
    let intervals: Vec<Interval> = (0..n_iv)
        .map(|_| {
            let lo = rat_from_f64(rng.gen::<f64>() * max_lo).expect("finite draw");
            let hi = &lo + Rat::one();
            Interval::new(lo, hi)
        })
        .collect();
    let cells = cell_representatives(&intervals);
    // Keep cells whose containment signature is maximal (the cliques), plus
    // occasionally every other cell for variety.
    let keep_all = rng.gen_bool(0.3);
    let mut points: Vec<SysPoint> = Vec::new();
    for (i, (pos, sig)) in cells.iter().enumerate() {
        let maximal = !cells
            .iter()
            .enumerate()
            .any(|(j, (_, other))| j != i && sig.iter().all(|v| other.contains(v)) && other.len() > sig.len());
        if maximal || keep_all {
            let value = rat(rng.gen_range(0..=6), rng.gen_range(1..=6));
            points.push(SysPoint {
                position: pos.clone(),
                value,
                weight: Rat::one(),
            });
        }
    }
    IntervalSystem::new(points, intervals).expect("cell positions are sorted and distinct")
}

/// Sample random unit-interval systems with the continuity property and
/// check the profile integral against `bound · x(V)`.
pub fn random_profile_audit(
    window: Option<u32>,
    trials: u32,
    seed: u64,
) -> Result<AuditReport, AnalysisError> {
    let bound = profile_bound_for_window(window)?;
    let span = window.unwrap_or(12);
    let results: Vec<(Rat, u32)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, trial));
            let system = random_profile_system(&mut rng, span);
            debug_assert!(continuity_check(&system));
            let total = system.total_value();
            if total.is_zero() {
                return (Rat::zero(), trial);
            }
            let profile = psi_profile(&system).expect("profile over a valid system");
            (profile.psi_bar / total, trial)
        })
        .collect();
    let mut max_ratio = Rat::zero();
    let mut worst_trial = 0u32;
    let mut violations = 0u32;
    for (ratio, trial) in results {
        if ratio > bound {
            violations += 1;
        }
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_trial = trial;
        }
    }
    Ok(AuditReport {
        trials,
        bound,
        max_ratio,
        worst_trial,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_level_configs_value_exactly_one() {
        let report = random_config_audit(1, 5, 40, 11).unwrap();
        assert!(report.pass());
        assert_eq!(report.max_ratio, Rat::one());
    }

    #[test]
    fn window5_config_audit_respects_nineteen_twelfths() {
        let report = random_config_audit(4, 5, 60, 23).unwrap();
        assert!(report.pass(), "worst {} at trial {}", report.max_ratio, report.worst_trial);
        assert!(report.max_ratio <= rat(19, 12));
        assert!(report.max_ratio > Rat::one(), "audit should exercise multi-level depth");
    }

    #[test]
    fn window6_config_audit_respects_eight_fifths() {
        let report = random_config_audit(5, 6, 40, 31).unwrap();
        assert!(report.pass());
        assert!(report.max_ratio <= rat(8, 5));
    }

    #[test]
    fn unknown_pairs_are_rejected() {
        assert!(random_config_audit(3, 5, 1, 0).is_err());
        assert!(profile_bound_for_window(Some(9)).is_err());
    }

    #[test]
    fn profile_audit_windows_hold_on_samples() {
        for (window, trials) in [(Some(2), 150u32), (Some(5), 80), (Some(6), 80), (None, 60)] {
            let report = random_profile_audit(window, trials, 5).unwrap();
            assert!(
                report.pass(),
                "window {window:?}: worst ratio {} at trial {}",
                report.max_ratio,
                report.worst_trial
            );
        }
    }

    #[test]
    fn disjoint_sampler_produces_disjoint_sorted_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let ivs = disjoint_unit_intervals(&mut rng, 4, 5);
            for w in ivs.windows(2) {
                assert!(w[1].lo > w[0].hi);
            }
            assert!(ivs[0].lo >= Rat::zero());
            assert!(ivs[3].hi <= rat(5, 1));
        }
    }

    #[test]
    fn cell_representatives_cover_every_signature() {
        let ivs = vec![
            Interval::new(rat(0, 1), rat(1, 1)),
            Interval::new(rat(1, 2), rat(3, 2)),
        ];
        let cells = cell_representatives(&ivs);
        let sigs: Vec<Vec<usize>> = cells.iter().map(|(_, s)| s.clone()).collect();
        assert!(sigs.contains(&vec![0]));
        assert!(sigs.contains(&vec![0, 1]));
        assert!(sigs.contains(&vec![1]));
    }
}
