//! Error-controlled evaluation of the exponential sums: S(x), the geometric
//! inner sums, the Type I and Type II sums, and the decomposition residual.
//!
//! Phases are carried in 256-bit fixed point, so stepping n -> n+1 is exact
//! wrapping integer arithmetic and the only floating-point error is the final
//! rounding into f64 plus sin/cos evaluation. Every sum is accumulated with
//! compensated summation and carries an explicit rounding-error budget.

use rayon::prelude::*;

use crate::arith::{divisor_count, gamma_coeff, tau_coeff, CoeffQuery, GammaVariant, SieveTables};
use crate::diophantine::FixedPointAlpha;
use crate::error::{Error, Result};
use crate::kahan::ComplexAcc;

/// A finished complex sum with its term count and rounding-error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSum {
    pub re: f64,
    pub im: f64,
    pub terms: u64,
    /// Upper bound on the accumulated absolute floating-point error.
    pub err_bound: f64,
}

impl ComplexSum {
    pub fn zero() -> Self {
        ComplexSum {
            re: 0.0,
            im: 0.0,
            terms: 0,
            err_bound: 0.0,
        }
    }

    #[inline]
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// e(phi) = (cos 2*pi*phi, sin 2*pi*phi).
#[inline]
pub(crate) fn unit(phi: f64) -> (f64, f64) {
    let (s, c) = (std::f64::consts::TAU * phi).sin_cos();
    (c, s)
}

#[inline]
fn guard(alpha: &FixedPointAlpha, n: u64) -> Result<()> {
    let fb = alpha.frac_bits();
    if fb >= 128 || n >> (fb - 64) == 0 {
        Ok(())
    } else {
        Err(Error::PrecisionExceeded {
            n,
            frac_bits: fb,
        })
    }
}

/// {alpha * n}: the phase of e(alpha n), computed in fixed point.
///
/// The fixed-point value is exact modulo the 2^-frac_bits quantization of
/// alpha, so the error is below n * 2^-frac_bits; the guard insists that
/// stays under 2^-64. Rounding into f64 adds at most 2^-54.
pub fn phase(alpha: &FixedPointAlpha, n: u64) -> Result<f64> {
    guard(alpha, n)?;
    Ok(alpha.engine().wrapping_mul_u64(n).to_unit_f64())
}

/// Distance from {alpha * m} to the nearest integer.
pub fn norm_distance(alpha: &FixedPointAlpha, m: u64) -> Result<f64> {
    let phi = phase(alpha, m)?;
    Ok(phi.min(1.0 - phi))
}

const MOBIUS_CHUNK: u64 = 1 << 16;

/// S(x) = sum_{n<=x} mu(n) e(alpha n), compensated and chunk-parallel.
///
/// The range is cut into fixed chunks of 2^16; chunks are summed
/// independently (possibly across worker threads) and merged in index
/// order, so the result is bit-identical for any worker count.
pub fn mobius_sum(x: u64, alpha: &FixedPointAlpha, tables: &SieveTables) -> Result<ComplexSum> {
    tables.check_range("mobius_sum x", x)?;
    if x == 0 {
        return Ok(ComplexSum::zero());
    }
    guard(alpha, x)?;
    let engine = alpha.engine();
    let mu = tables.mobius.values();

    let n_chunks = (x - 1) / MOBIUS_CHUNK + 1;
    let partials: Vec<ComplexSum> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * MOBIUS_CHUNK + 1;
            let end = (start + MOBIUS_CHUNK - 1).min(x);
            let mut acc = ComplexAcc::new();
            let mut cur = engine.wrapping_mul_u64(start);
            for &m in &mu[start as usize..=end as usize] {
                if m != 0 {
                    let (c, s) = unit(cur.to_unit_f64());
                    acc.add_unit(m as f64, c, s);
                } else {
                    acc.skip_zero_terms(1);
                }
                cur = cur.wrapping_add(engine);
            }
            acc.finish()
        })
        .collect();

    let mut total = ComplexAcc::new();
    for p in &partials {
        total.add_scaled_sum(1.0, p);
    }
    Ok(total.finish())
}

/// Below this distance to the nearest integer the closed-form geometric
/// evaluation is ill-conditioned and direct summation takes over.
pub const GEOMETRIC_NORM_THRESHOLD: f64 = 1.0 / (1 << 20) as f64;

/// sum_{1<=l<=L} e(alpha m l) by direct compensated summation.
pub(crate) fn linear_sum_direct(alpha: &FixedPointAlpha, m: u64, l: u64) -> ComplexSum {
    let step = alpha.engine().wrapping_mul_u64(m);
    let mut cur = step;
    let mut acc = ComplexAcc::new();
    for _ in 0..l {
        let (c, s) = unit(cur.to_unit_f64());
        acc.add_unit(1.0, c, s);
        cur = cur.wrapping_add(step);
    }
    acc.finish()
}

/// Closed-form geometric evaluation z (z^L - 1)/(z - 1) with z = e(alpha m);
/// z^L comes from the exact fixed-point phase of m*L, not repeated powering.
pub(crate) fn linear_sum_closed(alpha: &FixedPointAlpha, m: u64, l: u64) -> ComplexSum {
    let (zc, zs) = unit(alpha.engine().wrapping_mul_u64(m).to_unit_f64());
    let (lc, ls) = unit(alpha.engine().wrapping_mul_u64(m.wrapping_mul(l)).to_unit_f64());
    let (nr, ni) = (lc - 1.0, ls);
    let (dr, di) = (zc - 1.0, zs);
    let den_norm = dr * dr + di * di;
    // (num / den) * z
    let qr = (nr * dr + ni * di) / den_norm;
    let qi = (ni * dr - nr * di) / den_norm;
    let re = qr * zc - qi * zs;
    let im = qr * zs + qi * zc;
    let g_abs = re.hypot(im);
    let den_abs = den_norm.sqrt();
    // Dominant error: the relative uncertainty of den (a few eps/|den|)
    // scaled by |G|, plus the numerator uncertainty divided by |den|.
    let err_bound = f64::EPSILON * (12.0 * (1.0 + g_abs) / den_abs + 8.0 * g_abs + 4.0);
    ComplexSum {
        re,
        im,
        terms: l,
        err_bound,
    }
}

/// The inner geometric sum sum_{1<=l<=L} e(alpha m l).
///
/// Uses the closed form when the phase is at least 2^-20 away from an
/// integer, direct compensated summation otherwise; both paths agree within
/// their error bounds.
pub fn linear_sum(alpha: &FixedPointAlpha, m: u64, l: u64) -> Result<ComplexSum> {
    if l == 0 {
        return Ok(ComplexSum::zero());
    }
    guard(alpha, m.checked_mul(l).ok_or(Error::PrecisionExceeded {
        n: u64::MAX,
        frac_bits: alpha.frac_bits(),
    })?)?;
    let dist = norm_distance(alpha, m)?;
    if dist >= GEOMETRIC_NORM_THRESHOLD {
        Ok(linear_sum_closed(alpha, m, l))
    } else {
        Ok(linear_sum_direct(alpha, m, l))
    }
}

/// Type I sum: sum over k <= min(MN, x) of gamma(k) * sum_{l<=x/k} e(alpha l k).
pub fn type1_sum(
    x: u64,
    m: u64,
    n: u64,
    alpha: &FixedPointAlpha,
    tables: &SieveTables,
    variant: GammaVariant,
) -> Result<ComplexSum> {
    let mn = m.checked_mul(n).ok_or(Error::OutOfRange {
        what: "type1_sum M*N",
        value: u64::MAX,
        limit: tables.limit(),
    })?;
    tables.check_range("type1_sum M*N", mn)?;
    let k_max = mn.min(x);
    let mut acc = ComplexAcc::new();
    for k in 1..=k_max {
        let coeff = gamma_coeff(CoeffQuery { k, m, n }, tables, variant)?;
        assert!(
            coeff.unsigned_abs() <= divisor_count(k, &tables.spf)?,
            "gamma({k}) exceeded the divisor bound"
        );
        if coeff != 0 {
            let inner = linear_sum(alpha, k, x / k)?;
            acc.add_scaled_sum(coeff as f64, &inner);
        }
    }
    Ok(acc.finish())
}

/// Cache width for tau coefficients in the Type II sum.
pub const TAU_BLOCK_WIDTH: u64 = 1 << 16;

/// Type II sum: sum over kn <= x, k > M, n > N of mu(n) tau(k) e(alpha k n).
///
/// k is processed in blocks of `block` so each tau(k) is computed once per
/// block; within a block the n loop steps phases incrementally. Summation
/// order is fixed by (block, n, k), independent of anything else.
pub fn type2_sum_with_block(
    x: u64,
    m: u64,
    n: u64,
    alpha: &FixedPointAlpha,
    tables: &SieveTables,
    block: u64,
) -> Result<ComplexSum> {
    tables.check_range("type2_sum x", x)?;
    let mut acc = ComplexAcc::new();
    if n >= x || x == 0 {
        return Ok(acc.finish());
    }
    let k_hi = x / (n + 1);
    if k_hi <= m {
        return Ok(acc.finish());
    }
    guard(alpha, x)?;
    let engine = alpha.engine();
    let mu = tables.mobius.values();

    let mut tau_block: Vec<i64> = Vec::with_capacity(block as usize);
    let mut k0 = m + 1;
    while k0 <= k_hi {
        let k1 = (k0 + block - 1).min(k_hi);
        tau_block.clear();
        for k in k0..=k1 {
            tau_block.push(tau_coeff(CoeffQuery { k, m, n }, tables)?);
        }
        let nn_hi = x / k0;
        for nn in (n + 1)..=nn_hi {
            let mu_n = mu[nn as usize];
            if mu_n == 0 {
                continue;
            }
            let kk_hi = (x / nn).min(k1);
            if kk_hi < k0 {
                continue;
            }
            let step = engine.wrapping_mul_u64(nn);
            let mut cur = engine.wrapping_mul_u64(nn * k0);
            for kk in k0..=kk_hi {
                let tau = tau_block[(kk - k0) as usize];
                if tau != 0 {
                    let (c, s) = unit(cur.to_unit_f64());
                    acc.add_unit((mu_n as i64 * tau) as f64, c, s);
                } else {
                    acc.skip_zero_terms(1);
                }
                cur = cur.wrapping_add(step);
            }
        }
        k0 = k1 + 1;
    }
    Ok(acc.finish())
}

pub fn type2_sum(
    x: u64,
    m: u64,
    n: u64,
    alpha: &FixedPointAlpha,
    tables: &SieveTables,
) -> Result<ComplexSum> {
    type2_sum_with_block(x, m, n, alpha, tables, TAU_BLOCK_WIDTH)
}

/// The full decomposition of S(x) for given thresholds M, N.
///
/// With the exact Type-I coefficients the identity
/// S(x) + T_I - T_II - S(min(M,x)) - S(min(N,x)) = 0 holds in exact
/// arithmetic, so the residual is pure floating-point noise, bounded by
/// `err_budget`. The boundary sums are truncated at x, which is what makes
/// the identity exact for every input; in the usual regime M, N <= x this
/// is simply S(M) + S(N).
#[derive(Debug, Clone)]
pub struct VaughanDecomposition {
    pub x: u64,
    pub m: u64,
    pub n: u64,
    pub variant: GammaVariant,
    pub t1: ComplexSum,
    pub t2: ComplexSum,
    pub s_m: ComplexSum,
    pub s_n: ComplexSum,
    pub s_total: ComplexSum,
    /// |S(x) + T_I - T_II - S_M - S_N|.
    pub residual: f64,
    /// Combined error budget of the five constituents.
    pub err_budget: f64,
}

pub fn vaughan_decompose(
    x: u64,
    m: u64,
    n: u64,
    alpha: &FixedPointAlpha,
    tables: &SieveTables,
    variant: GammaVariant,
) -> Result<VaughanDecomposition> {
    if x < 1 || m < 1 || n < 1 {
        return Err(Error::InvalidSpec(
            "vaughan_decompose requires x, M, N >= 1".into(),
        ));
    }
    tables.check_range("vaughan_decompose x", x)?;

    let s_total = mobius_sum(x, alpha, tables)?;
    let t1 = type1_sum(x, m, n, alpha, tables, variant)?;
    let t2 = type2_sum(x, m, n, alpha, tables)?;
    let s_m = mobius_sum(m.min(x), alpha, tables)?;
    let s_n = mobius_sum(n.min(x), alpha, tables)?;

    let re = s_total.re + t1.re - t2.re - s_m.re - s_n.re;
    let im = s_total.im + t1.im - t2.im - s_m.im - s_n.im;
    let residual = re.hypot(im);

    let parts = [&s_total, &t1, &t2, &s_m, &s_n];
    let err_budget = parts.iter().map(|p| p.err_bound).sum::<f64>()
        + 4.0 * f64::EPSILON * parts.iter().map(|p| p.abs()).sum::<f64>();

    Ok(VaughanDecomposition {
        x,
        m,
        n,
        variant,
        t1,
        t2,
        s_m,
        s_n,
        s_total,
        residual,
        err_budget,
    })
}
