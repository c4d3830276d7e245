//! The lower-bound density construction: a piecewise-linear probability
//! density on (0, 1/2) whose induced two-threshold cost functional stays
//! above 1.89 for every threshold pair, certifying that no threshold pair
//! beats that constant on the matching instance family.

use crate::rational::{rat, Rat};
use num::{One, Zero};
use rayon::prelude::*;

/// The density: 1/2 on (0, 1/5); 75t/4 − 13/4 on [1/5, 2/5); 17/4 on
/// [2/5, 1/2); zero elsewhere.
pub fn density_f(t: &Rat) -> Rat {
    if t <= &Rat::zero() || t >= &rat(1, 2) {
        return Rat::zero();
    }
    if t < &rat(1, 5) {
        rat(1, 2)
    } else if t < &rat(2, 5) {
        rat(75, 4) * t - rat(13, 4)
    } else {
        rat(17, 4)
    }
}

/// Exact cumulative `F(t) = ∫₀ᵗ f`.
pub fn cumulative_f(t: &Rat) -> Rat {
    if t <= &Rat::zero() {
        Rat::zero()
    } else if t <= &rat(1, 5) {
        t / rat(2, 1)
    } else if t <= &rat(2, 5) {
        rat(75, 8) * t * t - rat(13, 4) * t + rat(3, 8)
    } else if t <= &rat(1, 2) {
        rat(17, 4) * t - rat(9, 8)
    } else {
        Rat::one()
    }
}

/// Exact first-moment cumulative `G(t) = ∫₀ᵗ s·f(s) ds`.
pub fn cumulative_tf(t: &Rat) -> Rat {
    if t <= &Rat::zero() {
        Rat::zero()
    } else if t <= &rat(1, 5) {
        t * t / rat(4, 1)
    } else if t <= &rat(2, 5) {
        rat(25, 4) * t * t * t - rat(13, 8) * t * t + rat(1, 40)
    } else if t <= &rat(1, 2) {
        rat(17, 8) * t * t - rat(7, 40)
    } else {
        rat(57, 160)
    }
}

/// The two-threshold cost functional induced by the density: rounded tails
/// plus amplified unrounded first moments, normalized by twice the total
/// first moment. `None` encodes the +infinity sentinel (a zero amplification
/// slack against positive mass); a zero-mass numerator contributes nothing
/// even at zero slack.
pub fn limitation_gamma(tx: &Rat, ty: &Rat) -> Option<Rat> {
    assert!(
        tx >= &Rat::zero() && tx <= &Rat::one() && ty >= &Rat::zero() && ty <= &Rat::one(),
        "thresholds must lie in [0,1]"
    );
    let one = Rat::one();
    let mut num = (&one - cumulative_f(tx)) + (&one - cumulative_f(ty));
    let gx = cumulative_tf(tx);
    let gy = cumulative_tf(ty);
    if !gy.is_zero() {
        if tx >= &one {
            return None;
        }
        num = num + &gy / (&one - tx);
    }
    if !gx.is_zero() {
        if ty >= &one {
            return None;
        }
        num = num + &gx / (&one - ty);
    }
    Some(num / (rat(2, 1) * rat(57, 160)))
}

fn cumulative_f_f64(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t <= 0.2 {
        0.5 * t
    } else if t <= 0.4 {
        9.375 * t * t - 3.25 * t + 0.375
    } else if t <= 0.5 {
        4.25 * t - 1.125
    } else {
        1.0
    }
}

fn cumulative_tf_f64(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t <= 0.2 {
        0.25 * t * t
    } else if t <= 0.4 {
        6.25 * t * t * t - 1.625 * t * t + 0.025
    } else if t <= 0.5 {
        2.125 * t * t - 0.175
    } else {
        0.356_25
    }
}

/// Float mirror of [`limitation_gamma`]; the sentinel becomes `INFINITY`.
pub fn limitation_gamma_f64(tx: f64, ty: f64) -> f64 {
    let mut num = (1.0 - cumulative_f_f64(tx)) + (1.0 - cumulative_f_f64(ty));
    let gx = cumulative_tf_f64(tx);
    let gy = cumulative_tf_f64(ty);
    if gy > 0.0 {
        if tx >= 1.0 {
            return f64::INFINITY;
        }
        num += gy / (1.0 - tx);
    }
    if gx > 0.0 {
        if ty >= 1.0 {
            return f64::INFINITY;
        }
        num += gx / (1.0 - ty);
    }
    num / (2.0 * 0.356_25)
}

/// Minimum of the cost functional over an `(n+1) × (n+1)` threshold grid on
/// `[0,1]²`. Returns `(min, tx, ty)`; rows scan in parallel with a
/// deterministic index-ordered reduction.
pub fn limitation_grid_min(n: usize) -> (f64, f64, f64) {
    let rows: Vec<(f64, usize, usize)> = (0..=n)
        .into_par_iter()
        .map(|ix| {
            let tx = ix as f64 / n as f64;
            let mut best = (f64::INFINITY, ix, 0usize);
            for iy in 0..=n {
                let ty = iy as f64 / n as f64;
                let g = limitation_gamma_f64(tx, ty);
                if g < best.0 {
                    best = (g, ix, iy);
                }
            }
            best
        })
        .collect();
    let (val, ix, iy) = rows
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
        .expect("grid is nonempty");
    (val, ix as f64 / n as f64, iy as f64 / n as f64)
}
