//! The averaged rounding-cost curve: the per-threshold cost `μ(z, τ)`, its
//! density-weighted average `μ̄(z)` in closed form and by adaptive
//! quadrature, and the certified maximum just under 1.935.

use crate::rational::{rat, rat_to_f64, Rat};
use crate::rounding::ThresholdSchedule;
use num::{One, Zero};

/// Exact parameters of the averaged-cost computation: the threshold
/// schedule, the constant-branch integrand coefficients, and the interior
/// stationary point of the middle case.
#[derive(Debug, Clone, PartialEq)]
pub struct MuParams {
    pub schedule: ThresholdSchedule,
    /// Cap of the conjugate map: `h(alpha)`.
    pub gamma: Rat,
    /// Low-`z` branch integrand `a1·τ² + b1·τ + c1 + d1/(1−τ)`:
    /// `a1 = −1/((1−β)²(β−α)²)`.
    pub a1: Rat,
    /// `b1 = (1+α)/((1−β)²(β−α)²)`.
    pub b1: Rat,
    /// `c1 = −1/(β−α)² − α/((1−β)²(β−α)²)`.
    pub c1: Rat,
    /// `d1 = (1−α)/(β−α)²`.
    pub d1: Rat,
    /// Root of the stationarity condition inside `[α, β]`.
    pub z0: f64,
}

impl MuParams {
    pub fn standard() -> MuParams {
        MuParams::from_schedule(ThresholdSchedule::standard())
    }

    pub fn from_schedule(schedule: ThresholdSchedule) -> MuParams {
        let one = Rat::one();
        let alpha = schedule.alpha.clone();
        let beta = schedule.beta.clone();
        let gamma = schedule.gamma_thr.clone();
        let span = &beta - &alpha;
        let span2 = &span * &span;
        let q = (&one - &beta) * (&one - &beta);
        let a1 = -&one / (&q * &span2);
        let b1 = (&one + &alpha) / (&q * &span2);
        let c1 = -&one / &span2 - &alpha / (&q * &span2);
        let d1 = (&one - &alpha) / &span2;
        let mut params = MuParams {
            schedule,
            gamma,
            a1,
            b1,
            c1,
            d1,
            z0: 0.0,
        };
        params.z0 = stationary_point(&params);
        params
    }

    fn span2(&self) -> Rat {
        let span = &self.schedule.beta - &self.schedule.alpha;
        &span * &span
    }

    /// Middle-branch integrand coefficients at a given `z`:
    /// `a2·τ + b2 + c2/(1−τ)`.
    pub fn case2_coeffs(&self, z: &Rat) -> (Rat, Rat, Rat) {
        let span2 = self.span2();
        let a2 = Rat::one() / (z * &span2);
        let b2 = -&self.schedule.alpha / (z * &span2) - Rat::one() / &span2;
        let c2 = self.d1.clone();
        (a2, b2, c2)
    }
}

/// Per-threshold rounding cost at LP mass `z` and threshold `τ` (with
/// conjugate `τ' = h(τ)`): below the threshold both nets pay; between the
/// pair one net pays plus the rounded line; above the conjugate only the
/// rounding term remains. Returns +infinity where a branch divides by zero.
pub fn mu(z: &Rat, tau: &Rat, p: &MuParams) -> f64 {
    assert!(z >= &Rat::zero() && z <= &Rat::one(), "z must lie in [0,1]");
    assert!(
        tau >= &p.schedule.alpha && tau <= &p.schedule.beta,
        "tau must lie in [alpha, beta]"
    );
    let one = Rat::one();
    let conj = p.schedule.h(tau);
    if z < tau {
        let a = &one / (&one - tau);
        let b = &one / (&one - &conj);
        0.5 * (rat_to_f64(&a) + rat_to_f64(&b))
    } else if z < &conj {
        if z.is_zero() {
            return f64::INFINITY;
        }
        0.5 * (rat_to_f64(&(&one / z)) + rat_to_f64(&(&one / (&one - tau))))
    } else {
        if z.is_zero() {
            return f64::INFINITY;
        }
        rat_to_f64(&(&one / z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuBarMethod {
    ClosedForm,
    Quadrature,
}

/// Antiderivative of the low-`z` branch integrand.
fn f1(t: f64, p: &MuParams) -> f64 {
    let a1 = rat_to_f64(&p.a1);
    let b1 = rat_to_f64(&p.b1);
    let c1 = rat_to_f64(&p.c1);
    let d1 = rat_to_f64(&p.d1);
    a1 * t * t * t / 3.0 + b1 * t * t / 2.0 + c1 * t - d1 * (1.0 - t).ln()
}

/// Antiderivative of the middle-branch integrand at a given `z`.
fn f2(t: f64, z: &Rat, p: &MuParams) -> f64 {
    let (a2, b2, c2) = p.case2_coeffs(z);
    let a2 = rat_to_f64(&a2);
    let b2 = rat_to_f64(&b2);
    let c2 = rat_to_f64(&c2);
    a2 * t * t / 2.0 + b2 * t - c2 * (1.0 - t).ln()
}

fn mu_bar_closed(z: &Rat, p: &MuParams) -> f64 {
    let alpha = &p.schedule.alpha;
    let beta = &p.schedule.beta;
    let af = rat_to_f64(alpha);
    let bf = rat_to_f64(beta);
    if z < alpha {
        f1(bf, p) - f1(af, p)
    } else if z <= beta {
        let zf = rat_to_f64(z);
        f2(zf, z, p) - f2(af, z, p) + f1(bf, p) - f1(zf, p)
    } else if z <= &p.gamma {
        let hz = p.schedule.h(z);
        let hzf = rat_to_f64(&hz);
        let span2 = p.span2();
        let covered = (&hz - alpha) * (&hz - alpha) / span2;
        f2(hzf, z, p) - f2(af, z, p) + rat_to_f64(&(Rat::one() / z)) * (1.0 - rat_to_f64(&covered))
    } else {
        rat_to_f64(&(Rat::one() / z))
    }
}

/// Adaptive Simpson refinement with an absolute tolerance.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, lm, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + recurse(f, m, rm, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, m, b, fa, fm, fb, whole, eps, 48)
}

fn mu_bar_quadrature(z: &Rat, p: &MuParams) -> f64 {
    let af = rat_to_f64(&p.schedule.alpha);
    let bf = rat_to_f64(&p.schedule.beta);
    let qf = {
        let b = rat_to_f64(&p.schedule.beta);
        (1.0 - b) * (1.0 - b)
    };
    let span = bf - af;
    let zf = rat_to_f64(z);
    let integrand = move |t: f64| -> f64 {
        let conj = 1.0 - qf / (1.0 - t);
        let m = if zf < t {
            0.5 * (1.0 / (1.0 - t) + (1.0 - t) / qf)
        } else if zf < conj {
            0.5 * (1.0 / zf + 1.0 / (1.0 - t))
        } else {
            1.0 / zf
        };
        m * 2.0 * (t - af) / (span * span)
    };
    // Split at the interior branch points: τ = z and τ = h(z).
    let mut cuts = vec![af, bf];
    if z > &p.schedule.alpha && z < &p.schedule.beta {
        cuts.push(zf);
    }
    if z > &p.schedule.beta && z < &p.gamma {
        cuts.push(rat_to_f64(&p.schedule.h(z)));
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(&integrand, w[0], w[1], 1e-12);
    }
    total
}

/// The density-averaged cost `∫ μ(z,τ)ρ(τ) dτ`.
pub fn mu_bar(z: &Rat, p: &MuParams, method: MuBarMethod) -> f64 {
    assert!(z >= &Rat::zero() && z <= &Rat::one(), "z must lie in [0,1]");
    match method {
        MuBarMethod::ClosedForm => mu_bar_closed(z, p),
        MuBarMethod::Quadrature => mu_bar_quadrature(z, p),
    }
}

/// Pure-float closed form, for refinement sweeps.
fn mu_bar_f64(zf: f64, p: &MuParams) -> f64 {
    let af = rat_to_f64(&p.schedule.alpha);
    let bf = rat_to_f64(&p.schedule.beta);
    let gf = rat_to_f64(&p.gamma);
    let qf = (1.0 - bf) * (1.0 - bf);
    let span2 = (bf - af) * (bf - af);
    let f1f = |t: f64| -> f64 { f1(t, p) };
    let f2f = |t: f64, z: f64| -> f64 {
        let a2 = 1.0 / (z * span2);
        let b2 = -af / (z * span2) - 1.0 / span2;
        let c2 = rat_to_f64(&p.d1);
        a2 * t * t / 2.0 + b2 * t - c2 * (1.0 - t).ln()
    };
    if zf < af {
        f1f(bf) - f1f(af)
    } else if zf <= bf {
        f2f(zf, zf) - f2f(af, zf) + f1f(bf) - f1f(zf)
    } else if zf <= gf {
        let hz = 1.0 - qf / (1.0 - zf);
        f2f(hz, zf) - f2f(af, zf) + (1.0 / zf) * (1.0 - (hz - af) * (hz - af) / span2)
    } else {
        1.0 / zf
    }
}

/// Sign factor of the middle-case derivative:
/// `1/z − (1−z)/(1−β)² − (z−α)/(2z²)`, exact.
pub fn stationarity_factor(z: &Rat, p: &MuParams) -> Rat {
    let one = Rat::one();
    let q = (&one - &p.schedule.beta) * (&one - &p.schedule.beta);
    &one / z - (&one - z) / q - (z - &p.schedule.alpha) / (rat(2, 1) * z * z)
}

/// Root of the stationarity factor inside `(α, β)`, by exact bisection.
pub fn stationary_point(p: &MuParams) -> f64 {
    let mut lo = p.schedule.alpha.clone();
    let mut hi = p.schedule.beta.clone();
    debug_assert!(stationarity_factor(&lo, p) > Rat::zero());
    debug_assert!(stationarity_factor(&hi, p) < Rat::zero());
    for _ in 0..64 {
        let mid = (&lo + &hi) / rat(2, 1);
        if stationarity_factor(&mid, p) > Rat::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    rat_to_f64(&lo)
}

/// Grid sweep plus golden-section refinement of `max_z μ̄(z)`. Returns
/// `(argmax, max)`; the max is asserted to stay under 1.935.
pub fn mu_bar_max(p: &MuParams, grid_step: f64) -> (f64, f64) {
    assert!(grid_step <= 1e-3 + 1e-12, "grid step must be at most 1e-3");
    let n = (1.0 / grid_step).round() as i64;
    let mut best_i = 0i64;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n {
        let z = rat(i, n);
        let v = mu_bar_closed(&z, p);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement on the bracketing cells.
    let mut a = ((best_i - 1).max(0)) as f64 / n as f64;
    let mut b = ((best_i + 1).min(n)) as f64 / n as f64;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = mu_bar_f64(c, p);
    let mut fd = mu_bar_f64(d, p);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = mu_bar_f64(c, p);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = mu_bar_f64(d, p);
        }
    }
    let (z_ref, v_ref) = if fc > fd { (c, fc) } else { (d, fd) };
    let (z_max, v_max) = if v_ref > best {
        (z_ref, v_ref)
    } else {
        (best_i as f64 / n as f64, best)
    };
    assert!(v_max < 1.935, "averaged cost exceeded the certified constant");
    (z_max, v_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn coefficient_fields_match_their_definitions() {
        let p = MuParams::standard();
        assert_eq!(p.a1, -rat(10000, 121));
        assert_eq!(p.b1, rat(12500, 121));
        assert_eq!(p.c1, -rat(5525, 121));
        assert_eq!(p.d1, rat(75, 4));
        // d1 recomputed from its defining formula.
        let span = &p.schedule.beta - &p.schedule.alpha;
        assert_eq!(p.d1, (Rat::one() - &p.schedule.alpha) / (&span * &span));
        assert_eq!(p.gamma, rat(179, 300));
        let (a2, b2, c2) = p.case2_coeffs(&rat(1, 2));
        assert_eq!(a2, int(50));
        assert_eq!(b2, -rat(25, 2) - int(25));
        assert_eq!(c2, rat(75, 4));
    }

    #[test]
    fn mu_branches_evaluate_correctly() {
        let p = MuParams::standard();
        // Below the threshold: both net terms.
        let v = mu(&rat(1, 10), &rat(3, 10), &p);
        let expected = 0.5 * (10.0 / 7.0 + 280.0 / 121.0);
        assert!((v - expected).abs() < 1e-12);
        // At z = 1 the tail branch gives exactly 1.
        assert_eq!(mu(&int(1), &rat(3, 10), &p), 1.0);
        // Middle branch at z between τ and h(τ).
        let v2 = mu(&rat(2, 5), &rat(3, 10), &p);
        assert!((v2 - 0.5 * (2.5 + 10.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn mu_bar_plateau_is_constant_below_alpha() {
        let p = MuParams::standard();
        let v0 = mu_bar(&Rat::zero(), &p, MuBarMethod::ClosedForm);
        let v1 = mu_bar(&rat(1, 10), &p, MuBarMethod::ClosedForm);
        let v2 = mu_bar(&rat(24, 100), &p, MuBarMethod::ClosedForm);
        assert_eq!(v0, v1);
        assert_eq!(v0, v2);
        assert!((v0 - 1.834_688_652_25).abs() < 1e-9, "plateau {v0}");
    }

    #[test]
    fn mu_bar_known_values_hold() {
        let p = MuParams::standard();
        let at_beta = mu_bar(&rat(9, 20), &p, MuBarMethod::ClosedForm);
        assert!((at_beta - 1.926_516_016_808_10).abs() < 1e-9, "{at_beta}");
        let at_gamma = mu_bar(&rat(179, 300), &p, MuBarMethod::ClosedForm);
        assert!((at_gamma - 300.0 / 179.0).abs() < 1e-12);
        let case2 = mu_bar(&rat(3, 10), &p, MuBarMethod::ClosedForm);
        assert!((case2 - 1.864_819_50).abs() < 1e-7, "{case2}");
        let case3 = mu_bar(&rat(1, 2), &p, MuBarMethod::ClosedForm);
        assert!((case3 - 1.877_714_03).abs() < 1e-7, "{case3}");
    }

    #[test]
    fn closed_form_matches_quadrature_on_a_grid() {
        let p = MuParams::standard();
        for i in 0..=100 {
            let z = rat(i, 100);
            let cf = mu_bar(&z, &p, MuBarMethod::ClosedForm);
            let q = mu_bar(&z, &p, MuBarMethod::Quadrature);
            assert!((cf - q).abs() <= 1e-8, "z = {i}/100: {cf} vs {q}");
        }
    }

    #[test]
    fn stationarity_brackets_and_locates_the_root() {
        let p = MuParams::standard();
        let f_alpha = stationarity_factor(&rat(1, 4), &p);
        let f_beta = stationarity_factor(&rat(9, 20), &p);
        assert_eq!(f_alpha, rat(184, 121));
        assert_eq!(f_beta, -rat(80, 891));
        assert!((p.z0 - 0.413_950_447_177).abs() < 1e-9, "z0 = {}", p.z0);
    }

    #[test]
    fn maximum_sits_just_under_the_constant() {
        let p = MuParams::standard();
        let (z_max, v_max) = mu_bar_max(&p, 1e-3);
        assert!((z_max - 0.414).abs() <= 2e-3, "argmax {z_max}");
        assert!((1.9340..1.9350).contains(&v_max), "max {v_max}");
        assert!((v_max - 1.934_725_852_53).abs() < 1e-6);
    }

    #[test]
    fn tail_is_monotone_decreasing() {
        let p = MuParams::standard();
        let mut prev = f64::INFINITY;
        for i in 60..=100 {
            let v = mu_bar(&rat(i, 100), &p, MuBarMethod::ClosedForm);
            assert!(v <= prev);
            prev = v;
        }
    }
}
