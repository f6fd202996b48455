//! Rank-one Dunkl kernel and its tensor product over `Z_2^d`.
//!
//! For the weight `|x|^{2 kappa}` the kernel depends only on `z = x y` and has
//! the power series `E(z) = sum_k c_k z^k` with `c_0 = 1`,
//! `c_{2n+1} = c_{2n} / (2n + 1 + 2 kappa)` and `c_{2n+2} = c_{2n+1} / (2n + 2)`.
//! The raw series is only usable for moderate `|z|`; the evaluator switches to
//! stable representations on the two axes that the transform and the heat
//! kernel need:
//!
//! * real `z`: `E(z) = e^{z} M(kappa, 2 kappa + 1, -2z)` turns negative
//!   arguments into a positive series, and Hankel's expansion of the modified
//!   Bessel pair takes over for `|z| > 40`;
//! * imaginary `z = i s`: `E(i s) = j_{kappa - 1/2}(s) + i s / (2 kappa + 1) j_{kappa + 1/2}(s)`.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::special::{normalized_bessel_j_pair, scaled_i_pair_series};

/// Largest `|z|` for which the real axis is summed as a series.
const REAL_SERIES_LIMIT: f64 = 40.0;
/// `e^{|z|}` overflows past this point.
const OVERFLOW_LIMIT: f64 = 700.0;

pub const DEFAULT_TOL_SERIES: f64 = 1e-16;
pub const DEFAULT_MAX_TERMS: usize = 2000;

/// Evaluates `E_kappa(x, y)` for the rank-one root system `{+e_1, -e_1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DunklKernel {
    kappa: f64,
    tol_series: f64,
    max_terms: usize,
}

impl DunklKernel {
    pub fn new(kappa: f64) -> Result<Self> {
        Self::with_tolerance(kappa, DEFAULT_TOL_SERIES, DEFAULT_MAX_TERMS)
    }

    pub fn with_tolerance(kappa: f64, tol_series: f64, max_terms: usize) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid("kappa", format!("{kappa} is not a nonnegative number")));
        }
        if !(tol_series > 0.0) || max_terms == 0 {
            return Err(invalid("tol_series", "tolerance and term cap must be positive"));
        }
        Ok(Self {
            kappa,
            tol_series,
            max_terms,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Direct power series in `z = x y`, truncated once the terms have peaked
    /// and `|term| < tol_series |partial sum|`.
    pub fn power_series(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("dunkl kernel argument"));
        }
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        let peak = z.norm();
        for k in 1..=self.max_terms {
            let denom = if k % 2 == 1 {
                k as f64 + 2.0 * self.kappa
            } else {
                k as f64
            };
            term *= z / denom;
            sum += term;
            if (k as f64) > peak && term.norm() <= self.tol_series * sum.norm() {
                return Ok(sum);
            }
            if term.norm() == 0.0 {
                return Ok(sum);
            }
        }
        Err(Error::SeriesCap {
            argument: z.norm(),
            max_terms: self.max_terms,
        })
    }

    /// `E(x, y)` for real `x` and a real or purely imaginary `y`; other complex
    /// arguments fall back to the power series.
    pub fn eval(&self, x: f64, y: Complex64) -> Result<Complex64> {
        if !x.is_finite() || !y.re.is_finite() || !y.im.is_finite() {
            return Err(Error::NonFinite("dunkl kernel argument"));
        }
        if x == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if y.im == 0.0 {
            let z = x * y.re;
            if z.abs() > OVERFLOW_LIMIT {
                return Err(Error::KernelOverflow(z));
            }
            Ok(Complex64::new(self.scaled_real(z) * z.abs().exp(), 0.0))
        } else if y.re == 0.0 {
            Ok(self.imaginary(x * y.im))
        } else {
            self.power_series(y * x)
        }
    }

    /// `e^{-|z|} E(z)` for real `z`. Finite for every finite `z`.
    pub fn scaled_real(&self, z: f64) -> f64 {
        let a = z.abs();
        if a == 0.0 {
            return 1.0;
        }
        let kappa = self.kappa;
        if kappa == 0.0 {
            return if z > 0.0 { 1.0 } else { (2.0 * z).exp() };
        }
        if a <= REAL_SERIES_LIMIT {
            if z > 0.0 {
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 1..self.max_terms {
                    let denom = if k % 2 == 1 { k as f64 + 2.0 * kappa } else { k as f64 };
                    term *= z / denom;
                    sum += term;
                    if (k as f64) > z && term < 1e-17 * sum {
                        break;
                    }
                }
                sum * (-z).exp()
            } else {
                // E(z) = e^{z} M(kappa, 2 kappa + 1, 2|z|), all terms positive
                let w = 2.0 * a;
                let mut term = 1.0;
                let mut sum = 1.0;
                for n in 0..self.max_terms {
                    let nf = n as f64;
                    term *= (kappa + nf) / (2.0 * kappa + 1.0 + nf) * w / (nf + 1.0);
                    sum += term;
                    if nf > w && term < 1e-17 * sum {
                        break;
                    }
                }
                sum * (2.0 * z).exp()
            }
        } else {
            let nu = kappa - 0.5;
            let sign = if z > 0.0 { 1.0 } else { -1.0 };
            let log_prefactor =
                ln_gamma(kappa + 0.5) + (0.5 - kappa) * (0.5 * a).ln() - 0.5 * (2.0 * std::f64::consts::PI * a).ln();
            log_prefactor.exp() * scaled_i_pair_series(nu, a, sign)
        }
    }

    /// `E(i s)` for real `s`.
    pub fn imaginary(&self, s: f64) -> Complex64 {
        let (even, odd) = normalized_bessel_j_pair(self.kappa - 0.5, s);
        Complex64::new(even, s / (2.0 * self.kappa + 1.0) * odd)
    }
}

/// `E_kappa(x, y)` for the rank-one root system.
pub fn dunkl_kernel_rank1(kappa: f64, x: f64, y: Complex64) -> Result<Complex64> {
    DunklKernel::new(kappa)?.eval(x, y)
}

/// Kernel for `Z_2^d`: the product of rank-one kernels over the axes.
pub fn dunkl_kernel_product(kappas: &[f64], x: &[f64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != kappas.len() {
        return Err(Error::DimensionMismatch {
            expected: kappas.len(),
            got: x.len(),
        });
    }
    if y.len() != kappas.len() {
        return Err(Error::DimensionMismatch {
            expected: kappas.len(),
            got: y.len(),
        });
    }
    kappas
        .iter()
        .zip(x)
        .zip(y)
        .try_fold(Complex64::new(1.0, 0.0), |acc, ((&k, &xi), &yi)| {
            Ok(acc * dunkl_kernel_rank1(k, xi, yi)?)
        })
}
