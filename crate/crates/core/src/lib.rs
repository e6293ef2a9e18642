//! Möbius-twisted exponential sums by Diophantine type.
//!
//! This crate evaluates S(x) = Σ_{n≤x} μ(n) e(αn) for irrational α and makes
//! the classical machinery around it executable and checkable:
//!
//! - [`arith`]: a linear sieve for μ and smallest prime factors, plus the
//!   divisor-restricted coefficient sums bounded by d(k).
//! - [`diophantine`]: continued fractions over exact big integers,
//!   fixed-point reduction of α, irrationality-exponent estimation, and the
//!   convergent-denominator selection with every inequality decided by exact
//!   integer power comparison.
//! - [`expsum`]: error-controlled evaluation of S(x), the geometric inner
//!   sums, the Type I / Type II sums, and the decomposition
//!   S(x) = -T_I + T_II + S(M) + S(N), whose residual is pure rounding noise
//!   when the exact Type-I coefficients are used.
//! - [`analysis`]: ratio harnesses for the two mean-value lemmas, combined
//!   bound evaluation, and the exponent sweep comparing log|S(x)|/log x with
//!   max(4/5, (2η-1)/(2η)) + ε.
//!
//! Sums are deterministic: fixed chunking, compensated accumulation, and
//! order-independent parallel reduction make results bit-identical across
//! worker counts.

// Divisibility tests in sieve code stay in the classical `n % p == 0` form.
#![allow(clippy::manual_is_multiple_of)]

pub mod analysis;
pub mod arith;
pub mod diophantine;
mod error;
pub mod expsum;
mod kahan;
mod u256;

pub use error::{Error, Result};

pub use analysis::{
    ceil_x_pow_2_5, lemma1_check, lemma2_check, predicted_exponent, proposition_bounds,
    theorem_branches, theorem_exponent, theorem_sweep, LemmaRatio, SequenceChoice, SweepRecord,
};
pub use arith::{
    build_tables, build_tables_with_budget, divisor_count, gamma_coeff, tau_coeff, CoeffQuery,
    GammaVariant, MobiusTable, SieveTables, SpfTable, DEFAULT_MEMORY_BUDGET,
};
pub use diophantine::{
    alpha_fixed_point, cf_terms, check_qgrowth, check_xq_bounds, convergent_quality, convergents,
    estimate_eta, parse_rational, select_q, BigRational, Convergent, ConvergentGen,
    FixedPointAlpha, IntervalVerdict, IrrationalSpec, QSelection, Rational, DEFAULT_FRAC_BITS,
};
pub use expsum::{
    linear_sum, mobius_sum, norm_distance, phase, type1_sum, type2_sum, type2_sum_with_block,
    vaughan_decompose, ComplexSum, VaughanDecomposition, GEOMETRIC_NORM_THRESHOLD,
    TAU_BLOCK_WIDTH,
};
