use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::quadrature::integrate;
use crate::{Error, Result};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Regularized upper incomplete gamma function `Q(a, x) = Γ(a, x) / Γ(a)`.
///
/// Series for `P` below `x = a + 1`, Lentz continued fraction for `Q`
/// above it.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) || !(x >= 0.0) || x.is_nan() {
        return Err(Error::domain(format!(
            "Q(a, x) needs a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..MAX_ITER {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                return Ok((1.0 - sum * log_prefactor.exp()).clamp(0.0, 1.0));
            }
        }
        Err(Error::domain("incomplete gamma series did not converge"))
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                return Ok((log_prefactor.exp() * h).clamp(0.0, 1.0));
            }
        }
        Err(Error::domain(
            "incomplete gamma continued fraction did not converge",
        ))
    }
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: f64) -> Result<f64> {
    if !(x >= 0.0) || !(df >= 1.0 && df.is_finite()) {
        return Err(Error::domain(format!(
            "chi-square tail needs x >= 0 and df >= 1, got x={x}, df={df}"
        )));
    }
    regularized_gamma_q(df / 2.0, x / 2.0)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `Φ(hi) - Φ(lo)`, taken from whichever tail avoids cancellation.
fn normal_interval(lo: f64, hi: f64) -> f64 {
    if lo + hi > 0.0 {
        normal_sf(lo) - normal_sf(hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

/// Upper tail of the studentized range of `k` standard normals (infinite
/// error degrees of freedom):
///
/// `P(R > q) = 1 - k ∫ φ(z) [Φ(z) - Φ(z - q)]^(k-1) dz`.
///
/// The integrand is rewritten as `k φ(z) (Φ(z)^(k-1) - [Φ(z) - Φ(z-q)]^(k-1))`
/// and the difference of powers expanded, so small tails keep their
/// relative accuracy.
pub fn studentized_range_sf(q: f64, k: usize) -> Result<f64> {
    if !(q >= 0.0) || k < 2 {
        return Err(Error::domain(format!(
            "studentized range tail needs q >= 0 and k >= 2, got q={q}, k={k}"
        )));
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    if q.is_infinite() {
        return Ok(0.0);
    }
    let m = k - 1;
    let kf = k as f64;
    let integrand = |z: f64| {
        let upper = normal_cdf(z);
        let below = normal_cdf(z - q);
        let inside = normal_interval(z - q, z);
        let mut geometric = 0.0;
        let mut up_pow = 1.0;
        for i in 0..m {
            geometric += up_pow * inside.powi((m - 1 - i) as i32);
            up_pow *= upper;
        }
        kf * normal_pdf(z) * below * geometric
    };
    let r = integrate(integrand, -12.0, q + 12.0, 1e-15, 1e-11, 4000)?;
    Ok(r.value.clamp(0.0, 1.0))
}
