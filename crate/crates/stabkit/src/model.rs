//! Geometric data model: rectangles, candidate stabbing lines, validated
//! problem instances, interval systems on a line, axis projections, and the
//! continuous→discrete clique reduction.
//!
//! Everything here is exact-rational and immutable after construction; all
//! operations are pure.

use crate::rational::{rat_serde, Rat};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

/// Line orientation. Vertical lines have an x-coordinate, horizontal a y-coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Vertical => write!(f, "vertical"),
            Orientation::Horizontal => write!(f, "horizontal"),
        }
    }
}

/// Projection axis: `X` projects onto the x-axis (vertical lines become
/// points), `Y` onto the y-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Instance family tag; validation enforces the matching rectangle shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "rectstab")]
    RectStab,
    #[serde(rename = "segstab")]
    SegStab,
    #[serde(rename = "horizsegstab")]
    HorizSegStab,
    #[serde(rename = "unitsqrstab")]
    UnitSqrStab,
}

impl Kind {
    pub fn token(self) -> &'static str {
        match self {
            Kind::RectStab => "rectstab",
            Kind::SegStab => "segstab",
            Kind::HorizSegStab => "horizsegstab",
            Kind::UnitSqrStab => "unitsqrstab",
        }
    }

    pub fn from_token(s: &str) -> Option<Kind> {
        match s {
            "rectstab" => Some(Kind::RectStab),
            "segstab" => Some(Kind::SegStab),
            "horizsegstab" => Some(Kind::HorizSegStab),
            "unitsqrstab" => Some(Kind::UnitSqrStab),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Axis-parallel rectangle `[x1,x2] × [y1,y2]`; degenerate cases (segments,
/// points) are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    #[serde(with = "rat_serde")]
    pub x1: Rat,
    #[serde(with = "rat_serde")]
    pub x2: Rat,
    #[serde(with = "rat_serde")]
    pub y1: Rat,
    #[serde(with = "rat_serde")]
    pub y2: Rat,
}

impl Rect {
    pub fn new(x1: Rat, x2: Rat, y1: Rat, y2: Rat) -> Rect {
        Rect { x1, x2, y1, y2 }
    }

    pub fn width(&self) -> Rat {
        &self.x2 - &self.x1
    }

    pub fn height(&self) -> Rat {
        &self.y2 - &self.y1
    }

    /// Degenerate in y (a horizontal segment; points count as well).
    pub fn is_horizontal_segment(&self) -> bool {
        self.y1 == self.y2
    }

    /// Degenerate in x (a vertical segment; points count as well).
    pub fn is_vertical_segment(&self) -> bool {
        self.x1 == self.x2
    }

    pub fn is_segment(&self) -> bool {
        self.is_horizontal_segment() || self.is_vertical_segment()
    }

    pub fn is_unit_square(&self) -> bool {
        self.width().is_one() && self.height().is_one()
    }
}

/// A candidate stabbing line: a coordinate plus a nonnegative weight. Its
/// orientation is carried by which instance list it lives in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    #[serde(with = "rat_serde")]
    pub coord: Rat,
    #[serde(rename = "w", with = "rat_serde")]
    pub weight: Rat,
}

impl Line {
    pub fn new(coord: Rat, weight: Rat) -> Line {
        Line { coord, weight }
    }
}

/// True iff a line of the given orientation at `coord` intersects the closed
/// rectangle (boundary contact counts).
pub fn stabs(orientation: Orientation, coord: &Rat, r: &Rect) -> bool {
    match orientation {
        Orientation::Vertical => &r.x1 <= coord && coord <= &r.x2,
        Orientation::Horizontal => &r.y1 <= coord && coord <= &r.y2,
    }
}

/// A validated stabbing instance. Global line indices enumerate vertical
/// lines first (`0..n_vlines`), then horizontal ones.
///
/// Field order is the canonical JSON key order; serialization is canonical
/// (compact, lowest-terms rationals) so parse→serialize round-trips are
/// byte-identical on canonical input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub hlines: Vec<Line>,
    pub kind: Kind,
    pub rects: Vec<Rect>,
    pub vlines: Vec<Line>,
    pub weighted: bool,
}

/// Validation and parsing errors for the data model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    EmptyInput,
    InvalidRect {
        index: usize,
    },
    NegativeWeight {
        orientation: Orientation,
        index: usize,
    },
    /// Rect indices no candidate line stabs.
    UnstabbedRects {
        indices: Vec<usize>,
    },
    KindMismatch {
        kind: Kind,
        index: usize,
    },
    /// `weighted: false` requires every line weight to equal 1.
    WeightedFlagMismatch {
        orientation: Orientation,
        index: usize,
    },
    NonIncreasingPoints {
        index: usize,
    },
    InvalidInterval {
        index: usize,
    },
    Json(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyInput => write!(f, "input must contain at least one rectangle"),
            ModelError::InvalidRect { index } => {
                write!(f, "rect {index} violates x1 <= x2 and y1 <= y2")
            }
            ModelError::NegativeWeight { orientation, index } => {
                write!(f, "{orientation} line {index} has negative weight")
            }
            ModelError::UnstabbedRects { indices } => {
                write!(f, "rects not stabbed by any candidate line: {indices:?}")
            }
            ModelError::KindMismatch { kind, index } => {
                write!(f, "rect {index} is inconsistent with instance kind {kind}")
            }
            ModelError::WeightedFlagMismatch { orientation, index } => write!(
                f,
                "instance is flagged unweighted but {orientation} line {index} has weight != 1"
            ),
            ModelError::NonIncreasingPoints { index } => {
                write!(f, "system points must be strictly increasing (violated at {index})")
            }
            ModelError::InvalidInterval { index } => {
                write!(f, "interval {index} violates lo <= hi")
            }
            ModelError::Json(msg) => write!(f, "malformed instance JSON: {msg}"),
        }
    }
}

impl Error for ModelError {}

impl Instance {
    pub fn n_vlines(&self) -> usize {
        self.vlines.len()
    }

    pub fn n_hlines(&self) -> usize {
        self.hlines.len()
    }

    pub fn n_lines(&self) -> usize {
        self.vlines.len() + self.hlines.len()
    }

    /// Resolves a global line index to its orientation and line data.
    pub fn line(&self, idx: usize) -> (Orientation, &Line) {
        if idx < self.vlines.len() {
            (Orientation::Vertical, &self.vlines[idx])
        } else {
            (Orientation::Horizontal, &self.hlines[idx - self.vlines.len()])
        }
    }

    pub fn line_weight(&self, idx: usize) -> &Rat {
        &self.line(idx).1.weight
    }

    /// Global indices of all lines stabbing rect `r`.
    pub fn stabbers(&self, r: &Rect) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, l) in self.vlines.iter().enumerate() {
            if stabs(Orientation::Vertical, &l.coord, r) {
                out.push(i);
            }
        }
        for (j, l) in self.hlines.iter().enumerate() {
            if stabs(Orientation::Horizontal, &l.coord, r) {
                out.push(self.vlines.len() + j);
            }
        }
        out
    }

    /// Total weight of a set of global line indices.
    pub fn weight_of(&self, lines: &[usize]) -> Rat {
        lines.iter().map(|&i| self.line_weight(i).clone()).fold(Rat::zero(), |a, b| a + b)
    }

    /// Full structural validation; every constructor path should call this.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (i, r) in self.rects.iter().enumerate() {
            if r.x1 > r.x2 || r.y1 > r.y2 {
                return Err(ModelError::InvalidRect { index: i });
            }
        }
        for (orientation, lines) in [
            (Orientation::Vertical, &self.vlines),
            (Orientation::Horizontal, &self.hlines),
        ] {
            for (i, l) in lines.iter().enumerate() {
                if l.weight.is_negative() {
                    return Err(ModelError::NegativeWeight { orientation, index: i });
                }
                if !self.weighted && !l.weight.is_one() {
                    return Err(ModelError::WeightedFlagMismatch { orientation, index: i });
                }
            }
        }
        let unstabbed: Vec<usize> = (0..self.rects.len())
            .filter(|&i| self.stabbers(&self.rects[i]).is_empty())
            .collect();
        if !unstabbed.is_empty() {
            return Err(ModelError::UnstabbedRects { indices: unstabbed });
        }
        for (i, r) in self.rects.iter().enumerate() {
            let ok = match self.kind {
                Kind::RectStab => true,
                Kind::SegStab => r.is_segment(),
                Kind::HorizSegStab => r.is_horizontal_segment(),
                Kind::UnitSqrStab => r.is_unit_square(),
            };
            if !ok {
                return Err(ModelError::KindMismatch { kind: self.kind, index: i });
            }
        }
        Ok(())
    }

    /// Parses and validates canonical instance JSON.
    pub fn from_json_str(s: &str) -> Result<Instance, ModelError> {
        let inst: Instance =
            serde_json::from_str(s).map_err(|e| ModelError::Json(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    /// Canonical compact JSON (sorted keys by declaration, lowest-terms rationals).
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }
}

/// A weighted point with an LP value, sitting on a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SysPoint {
    pub position: Rat,
    pub value: Rat,
    pub weight: Rat,
}

/// Closed interval `[lo, hi]` over point positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Interval {
        Interval { lo, hi }
    }

    pub fn contains(&self, p: &Rat) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Points on a line (strictly increasing positions, each with a value and a
/// weight) plus closed intervals over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSystem {
    pub points: Vec<SysPoint>,
    pub intervals: Vec<Interval>,
}

impl IntervalSystem {
    pub fn new(points: Vec<SysPoint>, intervals: Vec<Interval>) -> Result<IntervalSystem, ModelError> {
        for i in 1..points.len() {
            if points[i - 1].position >= points[i].position {
                return Err(ModelError::NonIncreasingPoints { index: i });
            }
        }
        for (i, iv) in intervals.iter().enumerate() {
            if iv.lo > iv.hi {
                return Err(ModelError::InvalidInterval { index: i });
            }
        }
        Ok(IntervalSystem { points, intervals })
    }

    /// Index range `[first, last]` of the points inside interval `i`, or
    /// `None` when it contains no point.
    pub fn point_range(&self, i: usize) -> Option<(usize, usize)> {
        let iv = &self.intervals[i];
        let first = self.points.partition_point(|p| p.position < iv.lo);
        let last = self.points.partition_point(|p| p.position <= iv.hi);
        if first < last {
            Some((first, last - 1))
        } else {
            None
        }
    }

    /// Total value of the points inside interval `i` (its LP mass).
    pub fn x_of(&self, i: usize) -> Rat {
        match self.point_range(i) {
            None => Rat::zero(),
            Some((a, b)) => self.points[a..=b]
                .iter()
                .map(|p| p.value.clone())
                .fold(Rat::zero(), |s, v| s + v),
        }
    }

    /// Total value over all points, `x(V)`.
    pub fn total_value(&self) -> Rat {
        self.points.iter().map(|p| p.value.clone()).fold(Rat::zero(), |s, v| s + v)
    }
}

/// All maximal cliques of a family of closed intervals, each clique as a
/// sorted list of interval indices. For intervals, every clique has a common
/// point (Helly), so each maximal clique is the set of intervals containing
/// some position; candidates are the left endpoints.
pub fn maximal_interval_cliques(intervals: &[Interval]) -> Vec<Vec<usize>> {
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for seed in intervals {
        let p = &seed.lo;
        let members: Vec<usize> = (0..intervals.len())
            .filter(|&j| intervals[j].contains(p))
            .collect();
        if !members.is_empty() && !cliques.contains(&members) {
            cliques.push(members);
        }
    }
    let maximal: Vec<Vec<usize>> = cliques
        .iter()
        .filter(|c| {
            !cliques.iter().any(|d| {
                d.len() > c.len() && c.iter().all(|x| d.binary_search(x).is_ok())
            })
        })
        .cloned()
        .collect();
    maximal
}

/// Common range `[max lo, min hi]` of a clique of intervals (nonempty for a
/// genuine clique).
pub fn clique_range(clique: &[usize], intervals: &[Interval]) -> (Rat, Rat) {
    let lo = clique.iter().map(|&i| intervals[i].lo.clone()).max().expect("nonempty clique");
    let hi = clique.iter().map(|&i| intervals[i].hi.clone()).min().expect("nonempty clique");
    (lo, hi)
}

/// Builds a discrete instance from bare rectangles: one unit-weight vertical
/// line per maximal clique of x-projections (placed at the clique's maximum
/// left endpoint) and likewise horizontally. The produced set is the smallest
/// set of lines containing a representative of every maximal projection
/// clique, and distinct produced lines stab distinct rect subsets.
pub fn discretize(rects: &[Rect], kind: Kind) -> Result<Instance, ModelError> {
    if rects.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let coords = |ivs: &[Interval]| -> Vec<Rat> {
        let mut cs: Vec<Rat> = maximal_interval_cliques(ivs)
            .iter()
            .map(|c| clique_range(c, ivs).0)
            .collect();
        cs.sort();
        cs
    };
    let x_ivs: Vec<Interval> =
        rects.iter().map(|r| Interval::new(r.x1.clone(), r.x2.clone())).collect();
    let y_ivs: Vec<Interval> =
        rects.iter().map(|r| Interval::new(r.y1.clone(), r.y2.clone())).collect();
    let inst = Instance {
        hlines: coords(&y_ivs).into_iter().map(|c| Line::new(c, Rat::one())).collect(),
        kind,
        rects: rects.to_vec(),
        vlines: coords(&x_ivs).into_iter().map(|c| Line::new(c, Rat::one())).collect(),
        weighted: false,
    };
    inst.validate()?;
    Ok(inst)
}

/// Result of projecting an instance onto one axis: the interval system plus
/// index maps back to the instance (lines merged per coordinate, one interval
/// per rect in order).
#[derive(Debug, Clone)]
pub struct Projection {
    pub system: IntervalSystem,
    /// Global line indices merged into each point (same coordinate).
    pub lines_at_point: Vec<Vec<usize>>,
    /// Representative global line per point: minimum weight, lowest index.
    pub rep_line: Vec<usize>,
    /// Rect index behind each interval (identity unless the caller filters).
    pub rect_of_interval: Vec<usize>,
}

/// Projects onto an axis with all point values 0.
pub fn project(inst: &Instance, axis: Axis) -> Projection {
    project_with_values(inst, axis, None)
}

/// Projects onto an axis, filling point values from a global LP vector
/// (length `n_lines`; vertical lines first). Lines sharing a coordinate merge
/// into one point whose value is the sum of their LP values and whose weight
/// is the minimum of their weights.
pub fn project_with_values(inst: &Instance, axis: Axis, values: Option<&[Rat]>) -> Projection {
    let (offset, lines) = match axis {
        Axis::X => (0usize, &inst.vlines),
        Axis::Y => (inst.vlines.len(), &inst.hlines),
    };
    let mut grouped: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for (i, l) in lines.iter().enumerate() {
        grouped.entry(l.coord.clone()).or_default().push(offset + i);
    }
    let mut points = Vec::with_capacity(grouped.len());
    let mut lines_at_point = Vec::with_capacity(grouped.len());
    let mut rep_line = Vec::with_capacity(grouped.len());
    for (coord, ids) in grouped {
        let value = match values {
            None => Rat::zero(),
            Some(v) => ids.iter().map(|&i| v[i].clone()).fold(Rat::zero(), |a, b| a + b),
        };
        let rep = ids
            .iter()
            .copied()
            .min_by(|&a, &b| {
                inst.line_weight(a).cmp(inst.line_weight(b)).then(a.cmp(&b))
            })
            .expect("nonempty group");
        points.push(SysPoint {
            position: coord,
            value,
            weight: inst.line_weight(rep).clone(),
        });
        lines_at_point.push(ids);
        rep_line.push(rep);
    }
    let intervals: Vec<Interval> = inst
        .rects
        .iter()
        .map(|r| match axis {
            Axis::X => Interval::new(r.x1.clone(), r.x2.clone()),
            Axis::Y => Interval::new(r.y1.clone(), r.y2.clone()),
        })
        .collect();
    let rect_of_interval = (0..inst.rects.len()).collect();
    let system = IntervalSystem { points, intervals };
    Projection { system, lines_at_point, rep_line, rect_of_interval }
}
