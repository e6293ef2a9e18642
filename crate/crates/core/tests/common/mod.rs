//! Shared helpers for the integration suites: independent high-precision
//! phase oracles built from integer square roots and frozen deep
//! convergents, bypassing the library's fixed-point pipeline.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Which alpha the oracle evaluates.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum OracleAlpha {
    Sqrt2,
    Golden,
    /// The eta = 3 prescribed-exponent number, via a deep convergent.
    Liouville3,
}

const SCALE: usize = 192;

/// {alpha * n} to ~2^-140 accuracy, computed with exact integer arithmetic.
pub fn oracle_phase(alpha: OracleAlpha, n: u64) -> f64 {
    let n_big = BigUint::from(n);
    match alpha {
        OracleAlpha::Sqrt2 => {
            // frac(sqrt(2 n^2)) at 2^SCALE
            let t = ((BigUint::from(2u8) * &n_big * &n_big) << (2 * SCALE)).sqrt();
            frac_of_scaled(t, SCALE)
        }
        OracleAlpha::Golden => {
            // frac((n + sqrt(5 n^2)) / 2) at 2^SCALE
            let root = ((BigUint::from(5u8) * &n_big * &n_big) << (2 * SCALE)).sqrt();
            let t = (&n_big << SCALE) + root;
            frac_of_scaled(t, SCALE + 1)
        }
        OracleAlpha::Liouville3 => {
            // frac(n p9 / q9); |alpha - p9/q9| < 1/(q9 q10) ~ 1e-91 makes
            // the convergent a faithful stand-in for any n in the suites.
            let p9 = BigUint::parse_bytes(
                b"4208276556952368399586823489093599720744815113",
                10,
            )
            .unwrap();
            let q9 = BigUint::parse_bytes(
                b"7100862082718357559748563880517486086728702367",
                10,
            )
            .unwrap();
            let r = (n_big * p9) % &q9;
            ((r << 64usize) / q9).to_f64().unwrap() / 18446744073709551616.0
        }
    }
}

fn frac_of_scaled(t: BigUint, bits: usize) -> f64 {
    let mask = (BigUint::from(1u8) << bits) - 1u8;
    let frac = t & mask;
    ((frac << 64usize) >> bits).to_f64().unwrap() / 18446744073709551616.0
}

/// e({alpha n}) via the oracle phase.
pub fn oracle_unit(alpha: OracleAlpha, n: u64) -> (f64, f64) {
    let (s, c) = (std::f64::consts::TAU * oracle_phase(alpha, n)).sin_cos();
    (c, s)
}

/// Plain compensated scalar sum for oracle-side accumulation.
#[derive(Default)]
pub struct OracleSum {
    sum: f64,
    comp: f64,
}

impl OracleSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
