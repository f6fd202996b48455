//! Special functions backing the rank-one Dunkl kernel.
//!
//! The kernel on the imaginary axis is a combination of normalized Bessel
//! functions `j_nu(s) = Gamma(nu + 1) (2 / s)^nu J_nu(s)`, and on the real
//! axis a combination of modified Bessel functions. Three regimes are used
//! for `j_nu`: the Taylor series for small arguments, Miller's backward
//! recurrence in the middle range and Hankel's asymptotic expansion for large
//! arguments.

use statrs::function::gamma::{gamma, ln_gamma};

/// Largest argument evaluated by the Taylor series of `j_nu`.
const SERIES_LIMIT: f64 = 8.0;
/// Smallest argument evaluated by the Hankel expansion (raised for large orders).
const HANKEL_LIMIT: f64 = 25.0;

/// Normalized Bessel functions `(j_nu(s), j_{nu+1}(s))` for `nu >= -1/2`.
///
/// `j_nu(0) = 1` and `j_nu` is even, so negative `s` is folded onto `|s|`.
pub fn normalized_bessel_j_pair(nu: f64, s: f64) -> (f64, f64) {
    debug_assert!(nu >= -0.5, "order below -1/2 is not supported");
    let s = s.abs();
    if s == 0.0 {
        return (1.0, 1.0);
    }
    if s <= SERIES_LIMIT {
        (j_series(nu, s), j_series(nu + 1.0, s))
    } else if s >= HANKEL_LIMIT.max(2.0 * (nu + 1.0) * (nu + 1.0)) {
        let scale = |order: f64| (ln_gamma(order + 1.0) + order * (2.0 / s).ln()).exp();
        (scale(nu) * hankel_j(nu, s), scale(nu + 1.0) * hankel_j(nu + 1.0, s))
    } else {
        miller_pair(nu, s)
    }
}

fn j_series(nu: f64, s: f64) -> f64 {
    let x = -0.25 * s * s;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= x / (kf * (nu + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel's expansion of the unnormalized `J_nu(s)` for large `s`.
fn hankel_j(nu: f64, s: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..120 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (8.0 * kf * s);
        if a == 0.0 {
            break;
        }
        let mag = a.abs();
        if mag > prev {
            // asymptotic series started to diverge
            break;
        }
        prev = mag;
        // a_k / s^k contributes to P (even k) or Q (odd k) with sign (-1)^(k/2)
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if mag < 1e-17 {
            break;
        }
    }
    let omega = s - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * s)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// Miller's backward recurrence, normalized by the Neumann series
/// `(s/2)^nu = sum_k (nu + 2k) Gamma(nu + k) / k! J_{nu + 2k}(s)`.
fn miller_pair(nu: f64, s: f64) -> (f64, f64) {
    let start = (s + 30.0 + 4.0 * s.sqrt()).ceil() as usize;
    let m = start + start % 2;

    // weights c_j = (nu + 2j) Gamma(nu + j) / j!  (c_0 = Gamma(nu + 1))
    let mut weights = Vec::with_capacity(m / 2 + 1);
    weights.push(gamma(nu + 1.0));
    let mut g = gamma(nu + 1.0); // Gamma(nu + j) / j! at j = 1
    for j in 1..=m / 2 {
        let jf = j as f64;
        weights.push((nu + 2.0 * jf) * g);
        g *= (nu + jf) / (jf + 1.0);
    }

    let mut f_next = 0.0; // order nu + k + 1
    let mut f_cur = 1e-30; // order nu + k
    let mut sum = if m.is_multiple_of(2) { weights[m / 2] * f_cur } else { 0.0 };
    let mut f1 = 0.0;
    for k in (1..=m).rev() {
        let f_prev = 2.0 * (nu + k as f64) / s * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        let order = k - 1;
        if order == 1 {
            f1 = f_cur;
        }
        if order % 2 == 0 {
            sum += weights[order / 2] * f_cur;
        }
        if f_cur.abs() > 1e200 {
            f_cur *= 1e-200;
            f_next *= 1e-200;
            sum *= 1e-200;
            f1 *= 1e-200;
        }
    }
    let j0 = gamma(nu + 1.0) * f_cur / sum;
    let j1 = gamma(nu + 2.0) * (2.0 / s) * f1 / sum;
    (j0, j1)
}

/// Riemann zeta for real `s > 1` by Euler-Maclaurin summation.
pub fn riemann_zeta(s: f64) -> f64 {
    assert!(s > 1.0, "riemann_zeta needs s > 1");
    const N: usize = 12;
    // B_{2k} / (2k)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // sigma(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * power;
        let kf = k as f64;
        rising *= (s + 2.0 * kf + 1.0) * (s + 2.0 * kf + 2.0);
        power /= n * n;
    }
    sum
}

/// Hurwitz zeta `zeta(-beta, 1/2) = (2^{-beta} - 1) zeta(-beta)` for `beta >= 0`.
///
/// This is the leading coefficient of the midpoint rule's error for
/// integrands `y^beta phi(y)` on `[0, L]`:
/// `int = h sum_j y_j^beta phi(y_j) - zeta(-beta, 1/2) h^{beta + 1} phi(0) + ...`.
pub fn hurwitz_zeta_half_negative(beta: f64) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    // reflection: zeta(-b) = 2^{-b} pi^{-b-1} sin(-pi b / 2) Gamma(1 + b) zeta(1 + b)
    let zeta_neg = 2f64.powf(-beta)
        * std::f64::consts::PI.powf(-beta - 1.0)
        * (-0.5 * std::f64::consts::PI * beta).sin()
        * gamma(1.0 + beta)
        * riemann_zeta(1.0 + beta);
    (2f64.powf(-beta) - 1.0) * zeta_neg
}

/// Coefficients of Hankel's expansion for the exponentially scaled modified
/// Bessel function: `I_nu(z) e^{-z} ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k`.
///
/// Returns `sum_k (-1)^k [a_k(nu) + sign * a_k(nu + 1)] / z^k` evaluated
/// termwise so that the `sign = -1` difference does not cancel.
pub(crate) fn scaled_i_pair_series(nu: f64, z: f64, sign: f64) -> f64 {
    let mu0 = 4.0 * nu * nu;
    let mu1 = 4.0 * (nu + 1.0) * (nu + 1.0);
    let mut a0 = 1.0;
    let mut a1 = 1.0;
    let mut sum = 1.0 + sign;
    let mut prev = f64::INFINITY;
    for k in 1..160 {
        let kf = k as f64;
        let odd = (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        a0 *= (mu0 - odd) / (8.0 * kf * z);
        a1 *= (mu1 - odd) / (8.0 * kf * z);
        let term = if k % 2 == 0 { 1.0 } else { -1.0 } * (a0 + sign * a1);
        let mag = a0.abs().max(a1.abs());
        if mag > prev {
            break;
        }
        prev = mag;
        sum += term;
        if mag < 1e-18 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j0(s: f64) -> f64 {
        normalized_bessel_j_pair(0.0, s).0
    }

    #[test]
    fn half_integer_orders_are_elementary() {
        // j_{-1/2}(s) = cos s, j_{1/2}(s) = sin s / s, j_{3/2}(s) = 3 (sin s - s cos s) / s^3
        for &s in &[0.3, 3.0, 7.9, 8.1, 12.0, 19.5, 24.9, 25.1, 60.0, 399.0] {
            let (a, b) = normalized_bessel_j_pair(-0.5, s);
            assert!((a - s.cos()).abs() < 1e-12, "s={s}: {a} vs {}", s.cos());
            assert!((b - s.sin() / s).abs() < 1e-12, "s={s}");
            let (c, d) = normalized_bessel_j_pair(0.5, s);
            assert!((c - s.sin() / s).abs() < 1e-12, "s={s}");
            let exact = 3.0 * (s.sin() - s * s.cos()) / (s * s * s);
            assert!((d - exact).abs() < 1e-12, "s={s}: {d} vs {exact}");
        }
    }

    #[test]
    fn integer_orders_match_reference_values() {
        // J_0 and J_1 reference values (Abramowitz & Stegun tables)
        assert!((j0(10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-12);
        assert!((j0(30.0) - (-0.086_367_983_581_040_2)).abs() < 1e-12);
        assert!((j0(2.5) - (-0.048_383_776_468_197_8)).abs() < 1e-12);
        let (_, j1) = normalized_bessel_j_pair(0.0, 10.0);
        // j_1(s) = 2 J_1(s) / s
        assert!((j1 - 2.0 * 0.043_472_746_168_861_44 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn regimes_agree_at_the_seams() {
        for &nu in &[-0.5, 0.0, 0.25, 1.0, 2.3] {
            for &s in &[SERIES_LIMIT, HANKEL_LIMIT.max(2.0 * (nu + 1.0) * (nu + 1.0))] {
                let (a, b) = normalized_bessel_j_pair(nu, s * (1.0 - 1e-15));
                let (c, d) = normalized_bessel_j_pair(nu, s * (1.0 + 1e-15));
                assert!((a - c).abs() < 1e-11, "nu={nu} s={s}: {a} vs {c}");
                assert!((b - d).abs() < 1e-11, "nu={nu} s={s}: {b} vs {d}");
            }
        }
    }

    #[test]
    fn zeta_values() {
        assert!((riemann_zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-13);
        // zeta(-1, 1/2) = 1/24, zeta(-2, 1/2) = 0, zeta(-3, 1/2) = -7/960
        assert!((hurwitz_zeta_half_negative(1.0) - 1.0 / 24.0).abs() < 1e-14);
        assert!(hurwitz_zeta_half_negative(2.0).abs() < 1e-14);
        assert!((hurwitz_zeta_half_negative(3.0) + 7.0 / 960.0).abs() < 1e-14);
    }

    #[test]
    fn scaled_pair_leading_terms() {
        // a_1(nu) - a_1(nu + 1) = -(2 nu + 1) / 2
        let nu = 0.5;
        let z = 1e6;
        let diff = scaled_i_pair_series(nu, z, -1.0);
        assert!((diff - (2.0 * nu + 1.0) / (2.0 * z)).abs() < 1e-12 / z);
    }
}
