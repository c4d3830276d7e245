//! Dual certificates for the window-restricted profile bounds: leveled
//! families of disjoint unit intervals carrying nonnegative weights that sum
//! to one per level, whose maximum point depth certifies an upper bound on
//! every primal configuration value. The two shipped certificates cover the
//! window-5 (four-level) and window-6 (five-level) constants 19/12 and 8/5.

use super::{AnalysisError, CertificateReport, CheckRow};
use crate::model::Interval;
use crate::rational::{rat, Rat};
use num::{One, Zero};

/// A leveled family of weighted intervals: `levels[ℓ]` holds the intervals
/// of level `ℓ+1` with their dual weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFamily {
    pub levels: Vec<Vec<(Interval, Rat)>>,
}

impl DualFamily {
    /// Validate disjointness per level, nonnegativity, and unit level sums.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let mut index = 0usize;
        for (ell, level) in self.levels.iter().enumerate() {
            let mut sum = Rat::zero();
            for (_, beta) in level {
                if beta < &Rat::zero() {
                    return Err(AnalysisError::NegativeWeight { index });
                }
                sum = sum + beta;
                index += 1;
            }
            if sum != Rat::one() {
                return Err(AnalysisError::LevelSumNotOne { level: ell + 1 });
            }
            let mut sorted: Vec<&Interval> = level.iter().map(|(i, _)| i).collect();
            sorted.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
            for pair in sorted.windows(2) {
                if pair[1].lo <= pair[0].hi {
                    return Err(AnalysisError::OverlappingLevelIntervals { level: ell + 1 });
                }
            }
        }
        Ok(())
    }
}

/// Maximum total weight over any point of the line: candidate points are
/// every interval endpoint plus a representative inside each cell between
/// consecutive endpoints. Exact rational.
pub fn dual_value(family: &DualFamily) -> Result<Rat, AnalysisError> {
    family.validate()?;
    let mut cuts: Vec<Rat> = Vec::new();
    for level in &family.levels {
        for (iv, _) in level {
            cuts.push(iv.lo.clone());
            cuts.push(iv.hi.clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    let mut candidates = cuts.clone();
    for pair in cuts.windows(2) {
        candidates.push((&pair[0] + &pair[1]) / rat(2, 1));
    }
    let mut best = Rat::zero();
    for p in &candidates {
        let mut depth = Rat::zero();
        for level in &family.levels {
            for (iv, beta) in level {
                if &iv.lo <= p && p <= &iv.hi {
                    depth = depth + beta;
                }
            }
        }
        if depth > best {
            best = depth;
        }
    }
    Ok(best)
}

/// Maximum weight of any clique when the overlap structure is given
/// combinatorially: each clique lists member indices into `beta`.
pub fn clique_depth_value(cliques: &[Vec<usize>], beta: &[Rat]) -> Result<Rat, AnalysisError> {
    let mut best = Rat::zero();
    for (c, clique) in cliques.iter().enumerate() {
        let mut depth = Rat::zero();
        for &j in clique {
            if j >= beta.len() {
                return Err(AnalysisError::IndexOutOfRange { clique: c, index: j });
            }
            depth = depth + &beta[j];
        }
        if depth > best {
            best = depth;
        }
    }
    Ok(best)
}

/// All maximal independent sets of a conflict graph on `n` vertices, by
/// direct enumeration (intended for n ≤ 15). Sets and the outer list are
/// sorted ascending.
pub fn maximal_independent_sets(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    assert!(n <= 20, "enumeration is exponential; keep n small");
    let mut adj = vec![0u32; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let independent = |set: u32| -> bool { (0..n).all(|v| set & (1 << v) == 0 || set & adj[v] == 0) };
    let mut out: Vec<Vec<usize>> = Vec::new();
    for set in 0u32..(1 << n) {
        if !independent(set) {
            continue;
        }
        let maximal = (0..n).all(|v| set & (1 << v) != 0 || !independent(set | (1 << v)));
        if maximal {
            out.push((0..n).filter(|&v| set & (1 << v) != 0).collect());
        }
    }
    out.sort();
    out
}

/// Conflict edges common to leveled families: all within-level pairs.
fn within_level_edges(level_sizes: &[usize]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut base = 0usize;
    for &size in level_sizes {
        for a in 0..size {
            for b in (a + 1)..size {
                edges.push((base + a, base + b));
            }
        }
        base += size;
    }
    edges
}

/// The window-5 certificate: four levels of 1+2+3+4 intervals, the full
/// cross-level conflict list, the main weight assignment reaching 19/12,
/// and the two degenerate-case assignments staying at or under it.
pub fn window5_certificate() -> CertificateReport {
    let mut report = CertificateReport::new("window-5 dual certificate");
    let bound = rat(19, 12);
    let sizes = [1usize, 2, 3, 4];

    // Cross-level conflicts for the main configuration (0-indexed).
    let cross: Vec<(usize, usize)> = vec![
        (0, 5),
        (0, 8),
        (0, 9),
        (1, 5),
        (1, 8),
        (1, 9),
        (2, 9),
        (3, 8),
        (3, 9),
        (4, 9),
        (5, 6),
        (5, 7),
    ];
    let mut edges = within_level_edges(&sizes);
    edges.extend(cross.iter().copied());
    let sets = maximal_independent_sets(10, &edges);
    let expected: Vec<Vec<usize>> = vec![
        vec![0, 1, 3, 6],
        vec![0, 1, 3, 7],
        vec![0, 1, 4, 6],
        vec![0, 1, 4, 7],
        vec![0, 2, 3, 6],
        vec![0, 2, 3, 7],
        vec![0, 2, 4, 6],
        vec![0, 2, 4, 7],
        vec![2, 4, 8],
        vec![2, 5, 8],
        vec![5, 9],
    ];
    report.rows.push(CheckRow {
        bound: "11 known sets".into(),
        check: "window5-maximal-sets-reconstructed".into(),
        pass: sets == expected,
        value: format!("{} sets", sets.len()),
    });

    let beta = [
        Rat::one(),
        rat(1, 2),
        rat(1, 2),
        rat(1, 12),
        rat(1, 12),
        rat(5, 6),
        Rat::zero(),
        Rat::zero(),
        rat(1, 4),
        rat(3, 4),
    ];
    push_level_sum_rows(&mut report, "window5-main", &sizes, &beta);
    let depth = clique_depth_value(&sets, &beta).expect("indices in range");
    report
        .rows
        .push(CheckRow::rat_eq("window5-main-depth", &depth, &bound));

    // Degenerate case: only the level-1/level-2 conflict survives.
    let beta_case1 = [
        Rat::one(),
        Rat::one(),
        Rat::zero(),
        rat(1, 3),
        rat(1, 3),
        rat(1, 3),
        rat(1, 4),
        rat(1, 4),
        rat(1, 4),
        rat(1, 4),
    ];
    let mut edges1 = within_level_edges(&sizes);
    edges1.push((0, 1));
    let sets1 = maximal_independent_sets(10, &edges1);
    let depth1 = clique_depth_value(&sets1, &beta_case1).expect("indices in range");
    push_level_sum_rows(&mut report, "window5-case1", &sizes, &beta_case1);
    report
        .rows
        .push(CheckRow::rat_le("window5-case1-depth", &depth1, &bound));
    report.rows.push(CheckRow::rat_eq(
        "window5-case1-depth-exact",
        &depth1,
        &rat(19, 12),
    ));

    // Degenerate case: the heavy third-level interval conflicts with both
    // the level-1 interval and the heavy fourth-level interval.
    let beta_case2 = [
        Rat::one(),
        rat(1, 2),
        rat(1, 2),
        Rat::zero(),
        Rat::zero(),
        Rat::one(),
        Rat::one(),
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
    ];
    let mut edges2 = within_level_edges(&sizes);
    edges2.extend([(0, 5), (0, 6), (5, 6)]);
    let sets2 = maximal_independent_sets(10, &edges2);
    let depth2 = clique_depth_value(&sets2, &beta_case2).expect("indices in range");
    push_level_sum_rows(&mut report, "window5-case2", &sizes, &beta_case2);
    report
        .rows
        .push(CheckRow::rat_le("window5-case2-depth", &depth2, &bound));
    report.rows.push(CheckRow::rat_eq(
        "window5-case2-depth-exact",
        &depth2,
        &rat(3, 2),
    ));

    report
}

fn push_level_sum_rows(report: &mut CertificateReport, tag: &str, sizes: &[usize], beta: &[Rat]) {
    let mut base = 0usize;
    for (ell, &size) in sizes.iter().enumerate() {
        let sum: Rat = beta[base..base + size]
            .iter()
            .fold(Rat::zero(), |a, b| a + b);
        report.rows.push(CheckRow::rat_eq(
            &format!("{tag}-level{}-sum", ell + 1),
            &sum,
            &Rat::one(),
        ));
        base += size;
    }
}

/// The window-6 certificate: the three-level prefix assignment reaching
/// 8/5, the four capped-depth completion cases, and the degenerate
/// five-level case staying at 19/12.
pub fn window6_certificate() -> CertificateReport {
    let mut report = CertificateReport::new("window-6 dual certificate");
    let bound = rat(8, 5);
    let prefix_sizes = [1usize, 2, 3];
    let prefix_beta = [
        Rat::one(),
        rat(1, 2),
        rat(1, 2),
        rat(1, 10),
        rat(1, 10),
        rat(4, 5),
    ];
    let mut prefix_edges = within_level_edges(&prefix_sizes);
    prefix_edges.push((0, 5));
    let prefix_sets = maximal_independent_sets(6, &prefix_edges);
    let prefix_depth =
        clique_depth_value(&prefix_sets, &prefix_beta).expect("indices in range");
    push_level_sum_rows(&mut report, "window6-prefix", &prefix_sizes, &prefix_beta);
    report
        .rows
        .push(CheckRow::rat_eq("window6-prefix-depth", &prefix_depth, &bound));

    // Completion cases: five open intervals (two on level 4, three on level
    // 5) with certified depth caps for the region each one governs; the
    // reachable depth there is cap + own weight, encoded as singleton
    // cliques over virtual members.
    let cases: [(&str, [(i64, i64); 5], [(i64, i64); 5], Rat); 4] = [
        (
            "window6-case2.1",
            [(13, 10), (8, 10), (13, 10), (7, 10), (15, 10)],
            [(3, 10), (7, 10), (0, 10), (9, 10), (1, 10)],
            rat(8, 5),
        ),
        (
            "window6-case2.2",
            [(6, 10), (8, 10), (13, 10), (6, 10), (8, 10)],
            [(5, 10), (5, 10), (3, 10), (4, 10), (3, 10)],
            rat(8, 5),
        ),
        (
            "window6-case3.1",
            [(8, 10), (8, 10), (8, 10), (8, 10), (6, 10)],
            [(5, 10), (5, 10), (2, 10), (5, 10), (3, 10)],
            rat(13, 10),
        ),
        (
            "window6-case3.2",
            [(8, 10), (8, 10), (6, 10), (8, 10), (8, 10)],
            [(4, 10), (6, 10), (6, 10), (2, 10), (2, 10)],
            rat(7, 5),
        ),
    ];
    for (tag, caps, betas, expected_max) in &cases {
        let weights: Vec<Rat> = caps
            .iter()
            .zip(betas.iter())
            .map(|(&(cn, cd), &(bn, bd))| rat(cn, cd) + rat(bn, bd))
            .collect();
        let singletons: Vec<Vec<usize>> = (0..5).map(|i| vec![i]).collect();
        let depth = clique_depth_value(&singletons, &weights).expect("indices in range");
        report
            .rows
            .push(CheckRow::rat_eq(&format!("{tag}-depth"), &depth, expected_max));
        report
            .rows
            .push(CheckRow::rat_le(&format!("{tag}-bound"), &depth, &bound));
        let level4: Rat = betas[..2].iter().map(|&(n, d)| rat(n, d)).fold(Rat::zero(), |a, b| a + b);
        let level5: Rat = betas[2..].iter().map(|&(n, d)| rat(n, d)).fold(Rat::zero(), |a, b| a + b);
        report.rows.push(CheckRow::rat_eq(
            &format!("{tag}-level4-sum"),
            &level4,
            &Rat::one(),
        ));
        report.rows.push(CheckRow::rat_eq(
            &format!("{tag}-level5-sum"),
            &level5,
            &Rat::one(),
        ));
    }

    // Degenerate case: five full levels, conflicts tying the two unit-weight
    // prefix intervals to the heavy fifth-level interval.
    let sizes5 = [1usize, 2, 3, 4, 5];
    let beta_case1 = [
        Rat::one(),
        Rat::one(),
        Rat::zero(),
        rat(1, 3),
        rat(1, 3),
        rat(1, 3),
        rat(1, 4),
        rat(1, 4),
        rat(1, 4),
        rat(1, 4),
        Rat::one(),
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
    ];
    let mut edges1 = within_level_edges(&sizes5);
    edges1.extend([(0, 1), (0, 10), (1, 10)]);
    let sets1 = maximal_independent_sets(15, &edges1);
    let depth1 = clique_depth_value(&sets1, &beta_case1).expect("indices in range");
    push_level_sum_rows(&mut report, "window6-case1", &sizes5, &beta_case1);
    report
        .rows
        .push(CheckRow::rat_le("window6-case1-depth", &depth1, &bound));
    report.rows.push(CheckRow::rat_eq(
        "window6-case1-depth-exact",
        &depth1,
        &rat(19, 12),
    ));

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn unit(lo: Rat) -> Interval {
        let hi = &lo + Rat::one();
        Interval::new(lo, hi)
    }

    #[test]
    fn dual_value_finds_the_deepest_point() {
        // Two levels: one interval [0,1]; two intervals [0,1]-ish split.
        let family = DualFamily {
            levels: vec![
                vec![(unit(int(0)), Rat::one())],
                vec![
                    (unit(rat(1, 2)), rat(3, 4)),
                    (unit(int(2)), rat(1, 4)),
                ],
            ],
        };
        // Depth on [1/2, 1] is 1 + 3/4.
        assert_eq!(dual_value(&family).unwrap(), rat(7, 4));
    }

    #[test]
    fn dual_value_with_common_point_reaches_level_count() {
        let family = DualFamily {
            levels: vec![
                vec![(unit(int(0)), Rat::one())],
                vec![(unit(rat(1, 4)), Rat::one()), (unit(int(4)), Rat::zero())],
            ],
        };
        assert_eq!(dual_value(&family).unwrap(), int(2));
    }

    #[test]
    fn family_validation_rejects_bad_inputs() {
        let overlapping = DualFamily {
            levels: vec![vec![
                (unit(int(0)), rat(1, 2)),
                (unit(rat(1, 2)), rat(1, 2)),
            ]],
        };
        assert!(matches!(
            overlapping.validate(),
            Err(AnalysisError::OverlappingLevelIntervals { level: 1 })
        ));
        let bad_sum = DualFamily {
            levels: vec![vec![(unit(int(0)), rat(1, 2))]],
        };
        assert!(matches!(
            bad_sum.validate(),
            Err(AnalysisError::LevelSumNotOne { level: 1 })
        ));
        let negative = DualFamily {
            levels: vec![vec![
                (unit(int(0)), rat(3, 2)),
                (unit(int(2)), -rat(1, 2)),
            ]],
        };
        assert!(matches!(
            negative.validate(),
            Err(AnalysisError::NegativeWeight { index: 1 })
        ));
        // Touching endpoints are not disjoint.
        let touching = DualFamily {
            levels: vec![vec![
                (unit(int(0)), rat(1, 2)),
                (unit(int(1)), rat(1, 2)),
            ]],
        };
        assert!(touching.validate().is_err());
    }

    #[test]
    fn clique_depth_handles_edge_cases() {
        assert_eq!(clique_depth_value(&[], &[]).unwrap(), int(0));
        let beta = [rat(1, 2), rat(1, 3)];
        let err = clique_depth_value(&[vec![0, 5]], &beta).unwrap_err();
        assert!(matches!(err, AnalysisError::IndexOutOfRange { index: 5, .. }));
        assert_eq!(
            clique_depth_value(&[vec![0], vec![0, 1]], &beta).unwrap(),
            rat(5, 6)
        );
    }

    #[test]
    fn maximal_sets_of_a_triangle_are_singletons() {
        let sets = maximal_independent_sets(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(sets, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn window5_certificate_passes_with_value_nineteen_twelfths() {
        let report = window5_certificate();
        assert!(report.pass(), "failing rows: {:?}", report.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());
        let depth = report
            .rows
            .iter()
            .find(|r| r.check == "window5-main-depth")
            .unwrap();
        assert_eq!(depth.value, depth.bound);
    }

    #[test]
    fn window6_certificate_passes_with_value_eight_fifths() {
        let report = window6_certificate();
        assert!(report.pass(), "failing rows: {:?}", report.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());
    }

    #[test]
    fn geometric_and_combinatorial_depths_agree_on_cell_cliques() {
        // Three unit intervals on one level-free family: compare dual_value
        // against clique_depth_value over the maximal overlap cells.
        let ivs = [unit(int(0)), unit(rat(1, 2)), unit(int(3))];
        let family = DualFamily {
            levels: vec![
                vec![(ivs[0].clone(), Rat::one())],
                vec![(ivs[1].clone(), rat(1, 3)), (ivs[2].clone(), rat(2, 3))],
            ],
        };
        let geometric = dual_value(&family).unwrap();
        // Maximal cells: {0,1} on [1/2,1], {1} alone past 1, {2}.
        let cliques = vec![vec![0, 1], vec![1], vec![2]];
        let flat = [Rat::one(), rat(1, 3), rat(2, 3)];
        let combinatorial = clique_depth_value(&cliques, &flat).unwrap();
        assert_eq!(geometric, combinatorial);
    }
}
