//! Instance generators, the discrete hardness profile, and the LP-gap
//! experiment driver.
//!
//! [`run_gap_experiment`] emits one CSV/JSON row per generated instance with
//! the relaxation value, the exact optimum when the line count is within the
//! enumeration cap, and the weight of every rounding mode that applies to
//! the instance kind; the per-mode guarantee factors and the
//! `z* ≤ OPT ≤ weight` sandwich are asserted on every row.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;
use std::fs;

use num::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::audit::mix_seed;
use crate::analysis::limitation::density_f;
use crate::exact::{brute_force_opt, ExactError};
use crate::lp::{build_relaxation, solve, LpError, LpStatus, SolveMode};
use crate::model::{discretize, Instance, Kind, Line, ModelError, Rect};
use crate::rational::{format_decimal, format_rat, int, rat, rat_to_f64, Rat};
use crate::rounding::{
    gaur_round, ks_round, segstab_round, unitsq_round, KsMode, RoundError, SegMode, UnitSqMode,
};

/// Generator and experiment failures; filesystem problems carry the path
/// they happened on.
#[derive(Debug)]
pub enum HarnessError {
    Model(ModelError),
    Lp(LpError),
    Exact(ExactError),
    Round(RoundError),
    Io { path: String, detail: String },
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Model(e) => write!(f, "instance error: {e}"),
            HarnessError::Lp(e) => write!(f, "lp error: {e}"),
            HarnessError::Exact(e) => write!(f, "exact solver error: {e}"),
            HarnessError::Round(e) => write!(f, "rounding error: {e}"),
            HarnessError::Io { path, detail } => write!(f, "io error on {path}: {detail}"),
        }
    }
}

impl Error for HarnessError {}

impl From<ModelError> for HarnessError {
    fn from(e: ModelError) -> Self {
        HarnessError::Model(e)
    }
}

impl From<LpError> for HarnessError {
    fn from(e: LpError) -> Self {
        HarnessError::Lp(e)
    }
}

impl From<ExactError> for HarnessError {
    fn from(e: ExactError) -> Self {
        HarnessError::Exact(e)
    }
}

impl From<RoundError> for HarnessError {
    fn from(e: RoundError) -> Self {
        HarnessError::Round(e)
    }
}

fn io_error(path: &str, e: impl fmt::Display) -> HarnessError {
    HarnessError::Io { path: path.to_string(), detail: e.to_string() }
}

/// Four unit-weight lines (x ∈ {0, 1/2} and y ∈ {0, 1/2}) and six unit
/// squares, one per pair of lines, each stabbed by exactly its pair. The
/// relaxation puts 1/2 on every line for value 2, while any hitting set
/// needs three lines, so every rounding scheme pays factor ≥ 3/2 here.
pub fn gen_three_halves_lb() -> Instance {
    let rects = vec![
        Rect::new(rat(-1, 4), rat(3, 4), int(10), int(11)), // both vertical lines
        Rect::new(int(10), int(11), rat(-1, 4), rat(3, 4)), // both horizontal lines
        Rect::new(int(-1), int(0), int(-1), int(0)),        // x = 0 with y = 0
        Rect::new(int(-1), int(0), rat(1, 2), rat(3, 2)),   // x = 0 with y = 1/2
        Rect::new(rat(1, 2), rat(3, 2), int(-1), int(0)),   // x = 1/2 with y = 0
        Rect::new(rat(1, 2), rat(3, 2), rat(1, 2), rat(3, 2)), // x = 1/2 with y = 1/2
    ];
    let inst = Instance {
        hlines: vec![Line::new(int(0), Rat::one()), Line::new(rat(1, 2), Rat::one())],
        kind: Kind::UnitSqrStab,
        rects,
        vlines: vec![Line::new(int(0), Rat::one()), Line::new(rat(1, 2), Rat::one())],
        weighted: false,
    };
    inst.validate().expect("lower-bound instance is well formed");
    for (i, r) in inst.rects.iter().enumerate() {
        assert_eq!(inst.stabbers(r).len(), 2, "square {i} must be stabbed by exactly its pair");
    }
    inst
}

fn kind_salt(kind: Kind) -> u64 {
    match kind {
        Kind::RectStab => 1,
        Kind::SegStab => 2,
        Kind::HorizSegStab => 3,
        Kind::UnitSqrStab => 4,
    }
}

/// Quarter-integer lattice coordinate in `[lo/4, hi/4]`.
fn quarter(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rat {
    rat(rng.gen_range(lo..=hi), 4)
}

/// `count` distinct quarter-integer coordinates in `[0, 10]`, ascending.
fn distinct_quarter_coords(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rat> {
    let pool: Vec<i64> = (0..=40).collect();
    let mut picks: Vec<i64> = pool.choose_multiple(rng, count).copied().collect();
    picks.sort_unstable();
    picks.into_iter().map(|k| rat(k, 4)).collect()
}

fn sample_lines(rng: &mut ChaCha8Rng, count: usize, weighted: bool) -> Vec<Line> {
    let coords = distinct_quarter_coords(rng, count);
    coords
        .into_iter()
        .map(|c| {
            let w = if weighted { rat(rng.gen_range(1..=6), 2) } else { Rat::one() };
            Line::new(c, w)
        })
        .collect()
}

/// Horizontal segment anchored either at an exact horizontal-line height or
/// across a vertical line, so the anchor always stabs it.
fn anchored_horizontal_segment(rng: &mut ChaCha8Rng, vlines: &[Line], hlines: &[Line]) -> Rect {
    let use_hline = !hlines.is_empty() && (vlines.is_empty() || rng.gen_bool(0.5));
    if use_hline {
        let y = hlines[rng.gen_range(0..hlines.len())].coord.clone();
        let a = quarter(rng, 0, 40);
        let len = quarter(rng, 1, 8);
        Rect::new(a.clone(), &a + &len, y.clone(), y)
    } else {
        let c = vlines[rng.gen_range(0..vlines.len())].coord.clone();
        let s1 = quarter(rng, 0, 4);
        let s2 = quarter(rng, 0, 4);
        let y = quarter(rng, 0, 40);
        Rect::new(&c - &s1, &c + &s2, y.clone(), y)
    }
}

/// Mirror image of [`anchored_horizontal_segment`].
fn anchored_vertical_segment(rng: &mut ChaCha8Rng, vlines: &[Line], hlines: &[Line]) -> Rect {
    let use_vline = !vlines.is_empty() && (hlines.is_empty() || rng.gen_bool(0.5));
    if use_vline {
        let x = vlines[rng.gen_range(0..vlines.len())].coord.clone();
        let a = quarter(rng, 0, 40);
        let len = quarter(rng, 1, 8);
        Rect::new(x.clone(), x, a.clone(), &a + &len)
    } else {
        let c = hlines[rng.gen_range(0..hlines.len())].coord.clone();
        let s1 = quarter(rng, 0, 4);
        let s2 = quarter(rng, 0, 4);
        let x = quarter(rng, 0, 40);
        Rect::new(x.clone(), x, &c - &s1, &c + &s2)
    }
}

/// Box anchored on a random line of either orientation.
fn anchored_box(rng: &mut ChaCha8Rng, vlines: &[Line], hlines: &[Line]) -> Rect {
    let pick = rng.gen_range(0..vlines.len() + hlines.len());
    let s1 = quarter(rng, 0, 6);
    let s2 = quarter(rng, 0, 6);
    let a = quarter(rng, 0, 40);
    let len = quarter(rng, 1, 8);
    if pick < vlines.len() {
        let c = &vlines[pick].coord;
        Rect::new(c - &s1, c + &s2, a.clone(), &a + &len)
    } else {
        let c = &hlines[pick - vlines.len()].coord;
        Rect::new(a.clone(), &a + &len, c - &s1, c + &s2)
    }
}

/// Reproducible random instance of the given kind: the seed fully determines
/// every coordinate and weight, and every rectangle is anchored on at least
/// one candidate line so the instance always validates.
///
/// Lines live on the quarter-integer lattice in `[0, 10]` with distinct
/// coordinates per orientation (`n_lines` split across orientations, at most
/// 40). The unit-square kind ignores `n_lines`: its squares get non-integer
/// sevenths offsets and its unit-weight lines come from clique
/// discretization, one per maximal projection clique (so at most `n_rects`
/// lines per axis).
pub fn gen_random(kind: Kind, n_rects: usize, n_lines: usize, seed: u64) -> Instance {
    assert!(n_rects >= 1, "need at least one rectangle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match kind {
        Kind::UnitSqrStab => {
            let mut rects = Vec::with_capacity(n_rects);
            for _ in 0..n_rects {
                let ax = int(rng.gen_range(0..=8)) + rat(rng.gen_range(1..=6), 7);
                let ay = int(rng.gen_range(0..=8)) + rat(rng.gen_range(1..=6), 7);
                rects.push(Rect::new(ax.clone(), &ax + Rat::one(), ay.clone(), &ay + Rat::one()));
            }
            discretize(&rects, Kind::UnitSqrStab).expect("discretized squares validate")
        }
        Kind::RectStab | Kind::SegStab | Kind::HorizSegStab => {
            assert!((1..=40).contains(&n_lines), "line count must be in 1..=40");
            if kind == Kind::SegStab {
                assert!(n_lines >= 2, "mixed segments need lines of both orientations");
            }
            // Horizontal segments leave horizontal lines the scarcer anchor,
            // so that kind gets the rounding-up half.
            let (nv, nh) = match kind {
                Kind::HorizSegStab => (n_lines / 2, n_lines - n_lines / 2),
                _ => (n_lines - n_lines / 2, n_lines / 2),
            };
            let vlines = sample_lines(&mut rng, nv, true);
            let hlines = sample_lines(&mut rng, nh, true);
            let mut rects = Vec::with_capacity(n_rects);
            for _ in 0..n_rects {
                let r = match kind {
                    Kind::RectStab => anchored_box(&mut rng, &vlines, &hlines),
                    Kind::HorizSegStab => anchored_horizontal_segment(&mut rng, &vlines, &hlines),
                    _ => {
                        if rng.gen_bool(0.5) {
                            anchored_horizontal_segment(&mut rng, &vlines, &hlines)
                        } else {
                            anchored_vertical_segment(&mut rng, &vlines, &hlines)
                        }
                    }
                };
                rects.push(r);
            }
            Instance { hlines, kind, rects, vlines, weighted: true }
        }
    };
    inst.validate().expect("generated instance validates by construction");
    inst
}

/// Synthetic LP-value multiset at lattice resolution `n`: value `i/n`
/// appears `⌊n·f(i/n)⌋` times for every lattice point `0 < i/n < 1/2` of the
/// hardness density `f`. Placing the same multiset on both axes of a
/// segment-stabbing configuration with unit line weights forces every
/// threshold pair to pay close to 1.89 times the LP mass, with the shortfall
/// vanishing as `n` grows.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitationProfile {
    /// Lattice resolution.
    pub n: u64,
    /// `(value, multiplicity)`, strictly increasing values, multiplicities
    /// all positive.
    pub buckets: Vec<(Rat, u64)>,
}

impl LimitationProfile {
    /// Number of values counted with multiplicity (per axis).
    pub fn value_count(&self) -> u64 {
        self.buckets.iter().map(|(_, m)| m).sum()
    }

    /// Sum of the values on one axis.
    pub fn axis_total(&self) -> Rat {
        self.buckets
            .iter()
            .map(|(v, m)| v * int(*m as i64))
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// LP mass of the two-axis configuration: twice the per-axis total.
    pub fn lp_value(&self) -> Rat {
        self.axis_total() * int(2)
    }

    /// The multiset, materialized in increasing order.
    pub fn values(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.value_count() as usize);
        for (v, m) in &self.buckets {
            for _ in 0..*m {
                out.push(v.clone());
            }
        }
        out
    }

    /// Infimum over every threshold pair of the dual-threshold objective —
    /// rounded count on each axis plus leftover mass over the crossing
    /// slack — divided by the LP mass.
    ///
    /// Thresholds inducing the same rounded pair form half-open cells
    /// `(v_{j-1}, v_j]`, and within a cell the objective increases with the
    /// threshold, so each cell's infimum is taken with the slack at its left
    /// edge; scanning all cell pairs therefore bounds every threshold pair
    /// from below.
    pub fn best_threshold_ratio(&self) -> Rat {
        let b = self.buckets.len();
        let mut suffix_count = vec![Rat::zero(); b + 1];
        for j in (0..b).rev() {
            suffix_count[j] = &suffix_count[j + 1] + int(self.buckets[j].1 as i64);
        }
        let mut prefix_mass = vec![Rat::zero(); b + 1];
        for j in 0..b {
            prefix_mass[j + 1] = &prefix_mass[j] + &self.buckets[j].0 * int(self.buckets[j].1 as i64);
        }
        let inv_slack: Vec<Rat> = (0..=b)
            .map(|j| {
                let left = if j == 0 { Rat::zero() } else { self.buckets[j - 1].0.clone() };
                Rat::one() / (Rat::one() - left)
            })
            .collect();
        let lp = self.lp_value();
        assert!(lp > Rat::zero(), "profile must carry positive mass");
        let mut best: Option<Rat> = None;
        for jx in 0..=b {
            for jy in 0..=b {
                let bound = &suffix_count[jx]
                    + &suffix_count[jy]
                    + &prefix_mass[jx] * &inv_slack[jy]
                    + &prefix_mass[jy] * &inv_slack[jx];
                let r = bound / &lp;
                if best.as_ref().map_or(true, |cur| r < *cur) {
                    best = Some(r);
                }
            }
        }
        best.expect("at least one threshold cell")
    }
}

/// Builds the discrete hardness profile at resolution `n ≥ 100`.
pub fn gen_limitation_profile(n: u64) -> LimitationProfile {
    assert!(n >= 100, "profile resolution must be at least 100");
    assert!(n <= 100_000, "profile resolution is capped at 100000");
    let nn = n as i64;
    let half = rat(1, 2);
    let mut buckets = Vec::new();
    for i in 1..nn {
        let v = rat(i, nn);
        if v >= half {
            break;
        }
        let m = (int(nn) * density_f(&v))
            .floor()
            .to_integer()
            .to_u64()
            .expect("multiplicity fits in u64");
        if m > 0 {
            buckets.push((v, m));
        }
    }
    LimitationProfile { n, buckets }
}

/// Declarative description of one gap experiment: which generators run, at
/// what sizes, how many trials, and where the reports go. The seed fully
/// determines the instance stream, so identical configs reproduce identical
/// reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// OPT cells stay empty on rows whose line count exceeds this cap.
    pub brute_cap: usize,
    pub csv_path: Option<String>,
    /// Also evaluate the four-line lower-bound instance as its own row.
    pub include_lower_bound_row: bool,
    pub json_path: Option<String>,
    pub kinds: Vec<Kind>,
    pub n_lines: usize,
    pub n_rects: usize,
    pub seed: u64,
    /// Random-threshold draws averaged into `segstab_rand_mean` (0 skips
    /// that column).
    pub segstab_rand_samples: u32,
    /// Instances per kind.
    pub trials: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            brute_cap: 14,
            csv_path: None,
            include_lower_bound_row: true,
            json_path: None,
            kinds: vec![Kind::RectStab, Kind::HorizSegStab, Kind::SegStab, Kind::UnitSqrStab],
            n_lines: 8,
            n_rects: 6,
            seed: 7,
            segstab_rand_samples: 5,
            trials: 20,
        }
    }
}

/// Fixed CSV column order of the gap report.
pub const GAP_CSV_COLUMNS: [&str; 12] = [
    "instance_id",
    "kind",
    "n_rects",
    "n_lines",
    "lp_value",
    "opt",
    "gaur",
    "ks",
    "segstab_rand_mean",
    "segstab_derand",
    "unitsq_derand",
    "ratios",
];

/// One experiment row with exact values. `None` marks a cell intentionally
/// left empty: the method does not apply to the instance kind, or OPT sits
/// above the enumeration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    pub instance_id: String,
    pub kind: Kind,
    pub n_rects: usize,
    pub n_lines: usize,
    pub lp_value: Rat,
    pub opt: Option<Rat>,
    pub gaur: Option<Rat>,
    pub ks: Option<Rat>,
    pub segstab_rand_mean: Option<Rat>,
    pub segstab_derand: Option<Rat>,
    pub unitsq_derand: Option<Rat>,
}

impl GapRecord {
    fn method_cells(&self) -> [(&'static str, &Option<Rat>); 5] {
        [
            ("gaur", &self.gaur),
            ("ks", &self.ks),
            ("segstab_rand_mean", &self.segstab_rand_mean),
            ("segstab_derand", &self.segstab_derand),
            ("unitsq_derand", &self.unitsq_derand),
        ]
    }

    /// `(column, weight / lp_value)` for every populated method cell, in
    /// column order.
    pub fn ratios(&self) -> Vec<(&'static str, Rat)> {
        self.method_cells()
            .into_iter()
            .filter_map(|(name, cell)| cell.as_ref().map(|w| (name, w / &self.lp_value)))
            .collect()
    }
}

/// Per-method ratio aggregate over the rows where the method ran.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub rows: usize,
    pub max_ratio: Rat,
    pub mean_ratio: Rat,
}

/// Sorted rows plus the per-method aggregate.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub aggregate: BTreeMap<&'static str, MethodStats>,
    pub rows: Vec<GapRecord>,
}

fn assert_row_guarantees(rec: &GapRecord) {
    let z = &rec.lp_value;
    if let Some(opt) = &rec.opt {
        assert!(z <= opt, "row {}: relaxation above OPT", rec.instance_id);
    }
    for (name, cell) in rec.method_cells() {
        if let Some(w) = cell {
            assert!(w >= z, "row {}: {name} beats the relaxation", rec.instance_id);
            if let Some(opt) = &rec.opt {
                assert!(w >= opt, "row {}: {name} beats OPT", rec.instance_id);
            }
        }
    }
    if let Some(w) = &rec.gaur {
        assert!(*w <= int(2) * z, "row {}: half-split factor above 2", rec.instance_id);
    }
    if let Some(w) = &rec.ks {
        let factor = std::f64::consts::E / (std::f64::consts::E - 1.0);
        assert!(
            rat_to_f64(w) <= factor * rat_to_f64(z) + 1e-9,
            "row {}: sorted-threshold factor above e/(e-1)",
            rec.instance_id
        );
    }
    if let Some(w) = &rec.segstab_derand {
        assert!(
            *w <= rat(1935, 1000) * z,
            "row {}: dual-threshold factor above 1.935",
            rec.instance_id
        );
    }
    if let Some(w) = &rec.unitsq_derand {
        assert!(
            *w <= rat(119, 60) * z,
            "row {}: net-rounding factor above 119/60",
            rec.instance_id
        );
    }
}

/// Solves the relaxation, runs every rounding mode that applies to the
/// instance kind, computes OPT when the line count is within `brute_cap`,
/// and asserts the per-mode guarantees before returning the row.
pub fn evaluate_instance(
    inst: &Instance,
    instance_id: &str,
    brute_cap: usize,
    segstab_rand_samples: u32,
    rand_seed: u64,
) -> Result<GapRecord, HarnessError> {
    let lp = build_relaxation(inst);
    let sol = solve(&lp, SolveMode::ExactRational)?;
    debug_assert!(matches!(sol.status, LpStatus::Optimal));
    let z = sol.objective.clone();
    assert!(z > Rat::zero(), "covering LP value must be positive");
    let x = sol.x.as_slice();

    let opt = if inst.n_lines() <= brute_cap {
        Some(brute_force_opt(inst, brute_cap)?.weight)
    } else {
        None
    };
    let gaur = Some(gaur_round(inst, x)?.weight);
    let ks = match inst.kind {
        Kind::HorizSegStab => Some(ks_round(inst, x, KsMode::BestSuffix)?.weight),
        _ => None,
    };
    let (segstab_derand, segstab_rand_mean) = if inst.kind == Kind::SegStab {
        let derand = segstab_round(inst, x, SegMode::Derandomized)?.weight;
        let mean = if segstab_rand_samples > 0 {
            let mut total = Rat::zero();
            for s in 0..segstab_rand_samples {
                let seed = mix_seed(rand_seed, s);
                let w = segstab_round(inst, x, SegMode::Random { seed })?.weight;
                assert!(w >= z, "random draw beats the relaxation");
                total = total + w;
            }
            Some(total / int(i64::from(segstab_rand_samples)))
        } else {
            None
        };
        (Some(derand), mean)
    } else {
        (None, None)
    };
    let unitsq_derand = match inst.kind {
        Kind::UnitSqrStab => Some(unitsq_round(inst, x, UnitSqMode::Derandomized)?.weight),
        _ => None,
    };

    let record = GapRecord {
        instance_id: instance_id.to_string(),
        kind: inst.kind,
        n_rects: inst.rects.len(),
        n_lines: inst.n_lines(),
        lp_value: z,
        opt,
        gaur,
        ks,
        segstab_rand_mean,
        segstab_derand,
        unitsq_derand,
    };
    assert_row_guarantees(&record);
    Ok(record)
}

fn per_trial_seed(seed: u64, kind: Kind, trial: u32) -> u64 {
    mix_seed(seed ^ kind_salt(kind).wrapping_mul(0xD1B5_4A32_D192_ED03), trial)
}

fn dec(r: &Rat) -> String {
    format_decimal(r, 12)
}

fn opt_dec(cell: &Option<Rat>) -> String {
    cell.as_ref().map(dec).unwrap_or_default()
}

fn ratios_cell(rec: &GapRecord) -> String {
    rec.ratios()
        .iter()
        .map(|(name, r)| format!("{name}={}", dec(r)))
        .collect::<Vec<_>>()
        .join(";")
}

fn write_csv(path: &str, rows: &[GapRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(GAP_CSV_COLUMNS).map_err(|e| io_error(path, e))?;
    for r in rows {
        w.write_record(&[
            r.instance_id.clone(),
            r.kind.token().to_string(),
            r.n_rects.to_string(),
            r.n_lines.to_string(),
            dec(&r.lp_value),
            opt_dec(&r.opt),
            opt_dec(&r.gaur),
            opt_dec(&r.ks),
            opt_dec(&r.segstab_rand_mean),
            opt_dec(&r.segstab_derand),
            opt_dec(&r.unitsq_derand),
            ratios_cell(r),
        ])
        .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))?;
    Ok(())
}

fn json_cell(cell: &Option<Rat>) -> serde_json::Value {
    match cell {
        Some(r) => json!(format_rat(r)),
        None => serde_json::Value::Null,
    }
}

fn write_json(
    path: &str,
    config: &ExperimentConfig,
    rows: &[GapRecord],
    aggregate: &BTreeMap<&'static str, MethodStats>,
) -> Result<(), HarnessError> {
    let rows_json: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            let ratios: serde_json::Map<String, serde_json::Value> = r
                .ratios()
                .into_iter()
                .map(|(name, ratio)| {
                    (name.to_string(), json!({ "dec": dec(&ratio), "rat": format_rat(&ratio) }))
                })
                .collect();
            json!({
                "instance_id": r.instance_id,
                "kind": r.kind.token(),
                "n_rects": r.n_rects,
                "n_lines": r.n_lines,
                "lp_value": format_rat(&r.lp_value),
                "opt": json_cell(&r.opt),
                "gaur": json_cell(&r.gaur),
                "ks": json_cell(&r.ks),
                "segstab_rand_mean": json_cell(&r.segstab_rand_mean),
                "segstab_derand": json_cell(&r.segstab_derand),
                "unitsq_derand": json_cell(&r.unitsq_derand),
                "ratios": ratios,
            })
        })
        .collect();
    let agg_json: serde_json::Map<String, serde_json::Value> = aggregate
        .iter()
        .map(|(name, s)| {
            (
                (*name).to_string(),
                json!({
                    "max_ratio": format_rat(&s.max_ratio),
                    "max_ratio_dec": dec(&s.max_ratio),
                    "mean_ratio": format_rat(&s.mean_ratio),
                    "mean_ratio_dec": dec(&s.mean_ratio),
                    "rows": s.rows,
                }),
            )
        })
        .collect();
    let doc = json!({ "aggregate": agg_json, "config": config, "rows": rows_json });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io_error(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
    Ok(())
}

/// Runs the configured trials concurrently (one row per instance, rows
/// sorted by id), aggregates per-method ratios, and writes the CSV and JSON
/// reports when paths are configured.
pub fn run_gap_experiment(config: &ExperimentConfig) -> Result<GapReport, HarnessError> {
    let mut tasks: Vec<(Kind, u32)> = Vec::new();
    for &kind in &config.kinds {
        for trial in 0..config.trials {
            tasks.push((kind, trial));
        }
    }
    let mut rows: Vec<GapRecord> = tasks
        .into_par_iter()
        .map(|(kind, trial)| {
            let seed = per_trial_seed(config.seed, kind, trial);
            let inst = gen_random(kind, config.n_rects, config.n_lines, seed);
            let id = format!("{}-{:05}", kind.token(), trial);
            evaluate_instance(&inst, &id, config.brute_cap, config.segstab_rand_samples, seed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if config.include_lower_bound_row {
        let inst = gen_three_halves_lb();
        rows.push(evaluate_instance(
            &inst,
            "three-halves-lb",
            config.brute_cap.max(4),
            config.segstab_rand_samples,
            config.seed,
        )?);
    }
    rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));

    let mut aggregate: BTreeMap<&'static str, MethodStats> = BTreeMap::new();
    for row in &rows {
        for (name, ratio) in row.ratios() {
            match aggregate.entry(name) {
                Entry::Occupied(mut e) => {
                    let s = e.get_mut();
                    s.rows += 1;
                    if ratio > s.max_ratio {
                        s.max_ratio = ratio.clone();
                    }
                    s.mean_ratio = &s.mean_ratio + &ratio;
                }
                Entry::Vacant(v) => {
                    v.insert(MethodStats { rows: 1, max_ratio: ratio.clone(), mean_ratio: ratio });
                }
            }
        }
    }
    for stats in aggregate.values_mut() {
        stats.mean_ratio = &stats.mean_ratio / int(stats.rows as i64);
    }

    if let Some(path) = &config.csv_path {
        write_csv(path, &rows)?;
    }
    if let Some(path) = &config.json_path {
        write_json(path, config, &rows, &aggregate)?;
    }
    Ok(GapReport { aggregate, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp_of(inst: &Instance) -> (Rat, Vec<Rat>) {
        let sol = solve(&build_relaxation(inst), SolveMode::ExactRational).expect("solvable");
        (sol.objective, sol.x)
    }

    #[test]
    fn three_halves_instance_has_gap_exactly_three_halves() {
        let inst = gen_three_halves_lb();
        assert_eq!(inst.rects.len(), 6);
        assert_eq!(inst.n_lines(), 4);
        for r in &inst.rects {
            assert!(r.is_unit_square());
            assert_eq!(inst.stabbers(r).len(), 2);
        }
        let (z, x) = lp_of(&inst);
        assert_eq!(z, int(2));
        assert_eq!(brute_force_opt(&inst, 8).expect("within cap").weight, int(3));
        let rounded = unitsq_round(&inst, &x, UnitSqMode::Derandomized).expect("rounds");
        assert_eq!(rounded.weight, int(3));
    }

    #[test]
    fn random_instances_are_deterministic_and_well_formed() {
        for kind in [Kind::RectStab, Kind::HorizSegStab, Kind::SegStab, Kind::UnitSqrStab] {
            let a = gen_random(kind, 6, 7, 99);
            let b = gen_random(kind, 6, 7, 99);
            assert_eq!(a.to_json_string(), b.to_json_string(), "seed must pin the bytes");
            assert_eq!(a.rects.len(), 6);
            match kind {
                Kind::UnitSqrStab => {
                    assert!(a.rects.iter().all(Rect::is_unit_square));
                    assert!(!a.weighted);
                    assert!(a.n_lines() <= 12, "clique lines stay within twice the squares");
                }
                _ => assert_eq!(a.n_lines(), 7),
            }
            if kind == Kind::HorizSegStab {
                assert!(a.rects.iter().all(Rect::is_horizontal_segment));
            }
            if kind == Kind::SegStab {
                assert!(a.rects.iter().all(Rect::is_segment));
            }
        }
    }

    #[test]
    fn limitation_profile_frozen_values_at_100() {
        let p = gen_limitation_profile(100);
        assert_eq!(p.buckets.len(), 49);
        assert_eq!(p.value_count(), 9755);
        assert_eq!(p.axis_total(), rat(69093, 20));
        let values = p.values();
        assert_eq!(values.len(), 9755);
        assert!(values.iter().all(|v| *v > Rat::zero() && *v < rat(1, 2)));
        assert_eq!(p.best_threshold_ratio(), rat(403_772_050, 214_948_323));
    }

    #[test]
    fn limitation_profile_certifies_factor_at_400() {
        let p = gen_limitation_profile(400);
        assert_eq!(p.value_count(), 159_020);
        assert!((p.value_count() as i64 - 400 * 400).unsigned_abs() <= 3 * 400);
        let r = p.best_threshold_ratio();
        assert_eq!(r, rat(35_351_791_100, 18_722_429_817));
        assert!(r >= rat(47, 25), "every threshold pair pays at least 1.88");
        assert!(r < rat(19, 10), "the profile is not a magic amplifier");
    }

    #[test]
    fn gap_experiment_writes_sorted_reproducible_reports() {
        let dir = std::env::temp_dir();
        let tag = std::process::id();
        let paths: Vec<(String, String)> = (0..2)
            .map(|i| {
                (
                    dir.join(format!("stabkit-gap-{tag}-{i}.csv")).to_string_lossy().into_owned(),
                    dir.join(format!("stabkit-gap-{tag}-{i}.json")).to_string_lossy().into_owned(),
                )
            })
            .collect();
        let mut reports = Vec::new();
        for (csv_path, json_path) in &paths {
            let config = ExperimentConfig {
                brute_cap: 12,
                csv_path: Some(csv_path.clone()),
                include_lower_bound_row: true,
                json_path: Some(json_path.clone()),
                kinds: vec![Kind::RectStab, Kind::HorizSegStab, Kind::SegStab, Kind::UnitSqrStab],
                n_lines: 6,
                n_rects: 4,
                seed: 11,
                segstab_rand_samples: 2,
                trials: 3,
            };
            reports.push(run_gap_experiment(&config).expect("experiment runs"));
        }
        let report = &reports[0];
        assert_eq!(report.rows.len(), 13);
        assert!(report.rows.windows(2).all(|w| w[0].instance_id < w[1].instance_id));
        let lb = report.rows.iter().find(|r| r.instance_id == "three-halves-lb").expect("lb row");
        assert_eq!(lb.opt, Some(int(3)));
        assert!(lb.ratios().contains(&("unitsq_derand", rat(3, 2))));
        for row in &report.rows {
            if let Some(opt) = &row.opt {
                assert!(row.lp_value <= *opt);
            }
        }
        let gaur_stats = &report.aggregate["gaur"];
        assert_eq!(gaur_stats.rows, 13);
        assert!(gaur_stats.max_ratio <= int(2));
        assert!(gaur_stats.mean_ratio <= gaur_stats.max_ratio);

        let csv_a = fs::read_to_string(&paths[0].0).expect("csv written");
        let csv_b = fs::read_to_string(&paths[1].0).expect("csv written");
        assert_eq!(csv_a, csv_b, "identical configs must reproduce identical csv bytes");
        assert!(csv_a.starts_with(&(GAP_CSV_COLUMNS.join(",") + "\n")));
        assert_eq!(csv_a.lines().count(), 14);

        let json_a: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&paths[0].1).expect("json written"))
                .expect("json parses");
        let json_b: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&paths[1].1).expect("json written"))
                .expect("json parses");
        assert_eq!(json_a["rows"], json_b["rows"]);
        assert_eq!(json_a["rows"].as_array().expect("rows array").len(), 13);
        assert_eq!(json_a["rows"][0]["instance_id"], "horizsegstab-00000");
        for (csv_path, json_path) in &paths {
            let _ = fs::remove_file(csv_path);
            let _ = fs::remove_file(json_path);
        }
    }

    #[test]
    fn io_failures_carry_the_path() {
        let config = ExperimentConfig {
            csv_path: Some("/nonexistent-dir/report.csv".to_string()),
            kinds: vec![Kind::RectStab],
            trials: 1,
            include_lower_bound_row: false,
            ..ExperimentConfig::default()
        };
        let err = run_gap_experiment(&config).expect_err("unwritable path must fail");
        match err {
            HarnessError::Io { path, .. } => assert_eq!(path, "/nonexistent-dir/report.csv"),
            other => panic!("expected io error, got {other}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

        #[test]
        fn generated_instances_validate_for_all_kinds(
            kind_ix in 0usize..4,
            n_rects in 1usize..=5,
            n_lines in 2usize..=9,
            seed in any::<u64>(),
        ) {
            let kind = [Kind::RectStab, Kind::HorizSegStab, Kind::SegStab, Kind::UnitSqrStab][kind_ix];
            let inst = gen_random(kind, n_rects, n_lines, seed);
            prop_assert!(inst.validate().is_ok());
            prop_assert_eq!(inst.rects.len(), n_rects);
            for r in &inst.rects {
                prop_assert!(!inst.stabbers(r).is_empty());
            }
        }
    }
}
