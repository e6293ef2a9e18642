//! Continued-fraction engine over exact integers: convergents, fixed-point
//! reductions of α, irrationality-exponent estimation, and the convergent
//! denominator selection used by the sweep harnesses.
//!
//! Every inequality that matters here (the x-range condition, the growth
//! condition, approximation quality) is decided by exact big-integer power
//! comparison; floating point only enters in the η estimate, which is a
//! log-scale diagnostic by nature.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::u256::U256;

/// Exact rational parameter (τ, η, ε in the harnesses).
pub type Rational = Ratio<u64>;

/// Exact rational with big-integer parts, used for interval endpoints.
pub type BigRational = Ratio<BigInt>;

/// Parse "21/10" or "3" into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidSpec(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.parse().map_err(|_| bad())?;
            let d: u64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::InvalidSpec(format!("zero denominator: {s:?}")));
            }
            Ok(Ratio::new(n, d))
        }
        None => Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A source of continued-fraction partial quotients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrrationalSpec {
    /// (P + √D)/Q with D positive and not a perfect square, Q nonzero.
    QuadraticSurd { p: i64, d: u64, q: i64 },
    /// A finite, explicitly given expansion [a0; a1, a2, ...].
    ExplicitCF { terms: Vec<i64> },
    /// Partial quotients chosen as a_{i+1} = max(1, ceil(q_i^(eta-2))),
    /// which realizes irrationality exponent `eta` (> 2).
    PrescribedExponent { eta: Rational, seed: Vec<i64> },
}

impl IrrationalSpec {
    pub fn sqrt2() -> Self {
        IrrationalSpec::QuadraticSurd { p: 0, d: 2, q: 1 }
    }

    pub fn golden_ratio() -> Self {
        IrrationalSpec::QuadraticSurd { p: 1, d: 5, q: 2 }
    }

    pub fn prescribed(eta: Rational) -> Self {
        IrrationalSpec::PrescribedExponent { eta, seed: vec![0] }
    }

    /// Parse the CLI grammar: `quad:D`, `quad:P,D,Q`, `cf:a0,a1,...`,
    /// `liouville:ETA` (ETA rational like `5/2`), plus the alias `golden`.
    /// Parsing is strict decimal with no whitespace.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "golden" {
            return Ok(Self::golden_ratio());
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("unknown alpha spec {s:?}")))?;
        let int = |t: &str| -> Result<i64> {
            t.parse()
                .map_err(|_| Error::InvalidSpec(format!("not a decimal integer: {t:?}")))
        };
        let nat = |t: &str| -> Result<u64> {
            let v = int(t)?;
            u64::try_from(v).map_err(|_| Error::InvalidSpec(format!("quad: D must be positive, got {v}")))
        };
        let spec = match kind {
            "quad" => {
                let parts: Vec<&str> = rest.split(',').collect();
                match parts.as_slice() {
                    [d] => IrrationalSpec::QuadraticSurd {
                        p: 0,
                        d: nat(d)?,
                        q: 1,
                    },
                    [p, d, q] => IrrationalSpec::QuadraticSurd {
                        p: int(p)?,
                        d: nat(d)?,
                        q: int(q)?,
                    },
                    _ => {
                        return Err(Error::InvalidSpec(
                            "quad takes D or P,D,Q".into(),
                        ))
                    }
                }
            }
            "cf" => IrrationalSpec::ExplicitCF {
                terms: rest.split(',').map(int).collect::<Result<_>>()?,
            },
            "liouville" => IrrationalSpec::PrescribedExponent {
                eta: parse_rational(rest)?,
                seed: vec![0],
            },
            _ => return Err(Error::InvalidSpec(format!("unknown alpha spec {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IrrationalSpec::QuadraticSurd { d, q, .. } => {
                if *q == 0 {
                    return Err(Error::InvalidSpec("quad: Q must be nonzero".into()));
                }
                if *d == 0 {
                    return Err(Error::InvalidSpec("quad: D must be positive".into()));
                }
                let root = d.sqrt();
                if root * root == *d {
                    return Err(Error::InvalidSpec(format!(
                        "quad: D = {d} is a perfect square, so (P+sqrt(D))/Q is rational"
                    )));
                }
            }
            IrrationalSpec::ExplicitCF { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("cf: needs at least a0".into()));
                }
                if terms.iter().skip(1).any(|&a| a < 1) {
                    return Err(Error::InvalidSpec(
                        "cf: partial quotients after a0 must be >= 1".into(),
                    ));
                }
            }
            IrrationalSpec::PrescribedExponent { eta, seed } => {
                if *eta <= Ratio::from_integer(2) {
                    return Err(Error::InvalidSpec(
                        "liouville: eta must be > 2 (use quad:D for eta = 2)".into(),
                    ));
                }
                if seed.is_empty() {
                    return Err(Error::InvalidSpec("liouville: empty seed".into()));
                }
                if seed.iter().skip(1).any(|&a| a < 1) {
                    return Err(Error::InvalidSpec(
                        "liouville: seed terms after a0 must be >= 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The irrationality exponent when it is known from the construction:
    /// 2 for quadratic surds, the prescribed η otherwise.
    pub fn eta_hint(&self) -> Option<Rational> {
        match self {
            IrrationalSpec::QuadraticSurd { .. } => Some(Ratio::from_integer(2)),
            IrrationalSpec::PrescribedExponent { eta, .. } => Some(*eta),
            IrrationalSpec::ExplicitCF { .. } => None,
        }
    }
}

/// One principal convergent p/q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

/// Exact integer state for the surd recurrence a = floor((P + √D)/Q),
/// P' = aQ - P, Q' = (D - P'^2)/Q.
#[derive(Debug, Clone)]
struct SurdState {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    sqrt_d: BigInt,
}

impl SurdState {
    fn new(p0: i64, d0: u64, q0: i64) -> Self {
        let mut p = BigInt::from(p0);
        let mut d = BigInt::from(d0);
        let mut q = BigInt::from(q0);
        // Normalize so Q divides D - P^2 and the recurrence stays integral.
        if (&d - &p * &p).mod_floor(&q) != BigInt::zero() {
            let qa = q.abs();
            p *= &qa;
            d *= &q * &q;
            q *= qa;
        }
        let sqrt_d = d.sqrt();
        SurdState { p, q, d, sqrt_d }
    }

    fn next_term(&mut self) -> BigInt {
        // floor((P + √D)/Q); √D is irrational, so floor((P + floor(√D))/Q)
        // works for Q > 0, and the Q < 0 case flips via floor(-w) = -floor(w)-1.
        let num = &self.p + &self.sqrt_d;
        let a = if self.q.is_positive() {
            num.div_floor(&self.q)
        } else {
            -(num.div_floor(&(-&self.q)) + BigInt::one())
        };
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.d - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

/// Incremental generator of partial quotients and convergents.
pub struct ConvergentGen {
    source: Source,
    index: usize,
    pm2: BigInt,
    pm1: BigInt,
    qm2: BigInt,
    qm1: BigInt,
}

enum Source {
    Surd(SurdState),
    Explicit(Vec<i64>),
    Prescribed { eta: Rational, seed: Vec<i64> },
}

impl ConvergentGen {
    pub fn new(spec: &IrrationalSpec) -> Result<Self> {
        spec.validate()?;
        let source = match spec {
            IrrationalSpec::QuadraticSurd { p, d, q } => Source::Surd(SurdState::new(*p, *d, *q)),
            IrrationalSpec::ExplicitCF { terms } => Source::Explicit(terms.clone()),
            IrrationalSpec::PrescribedExponent { eta, seed } => Source::Prescribed {
                eta: *eta,
                seed: seed.clone(),
            },
        };
        Ok(ConvergentGen {
            source,
            index: 0,
            pm2: BigInt::zero(),
            pm1: BigInt::one(),
            qm2: BigInt::one(),
            qm1: BigInt::zero(),
        })
    }

    fn next_term(&mut self) -> Result<BigInt> {
        match &mut self.source {
            Source::Surd(state) => Ok(state.next_term()),
            Source::Explicit(terms) => terms.get(self.index).map(|&a| BigInt::from(a)).ok_or(
                Error::InsufficientTerms {
                    needed: self.index + 1,
                    available: terms.len(),
                },
            ),
            Source::Prescribed { eta, seed } => {
                if let Some(&a) = seed.get(self.index) {
                    return Ok(BigInt::from(a));
                }
                // a_{i+1} = max(1, ceil(q_i^(eta-2))), all exact.
                let exp = eta.numer() - 2 * eta.denom();
                let root = *eta.denom() as u32;
                let q = self.qm1.magnitude().clone();
                let power = q.pow(exp as u32);
                let mut r = power.nth_root(root);
                if r.pow(root) < power {
                    r += 1u32;
                }
                Ok(BigInt::from(r.max(BigUint::one())))
            }
        }
    }

    /// Consume the next partial quotient and produce its convergent.
    pub fn step(&mut self) -> Result<(BigInt, Convergent)> {
        let a = self.next_term()?;
        let p = &a * &self.pm1 + &self.pm2;
        let q = &a * &self.qm1 + &self.qm2;
        self.pm2 = std::mem::replace(&mut self.pm1, p.clone());
        self.qm2 = std::mem::replace(&mut self.qm1, q.clone());
        let c = Convergent {
            index: self.index,
            p,
            q,
        };
        self.index += 1;
        Ok((a, c))
    }

    /// Produce the next convergent p_i/q_i.
    pub fn advance(&mut self) -> Result<Convergent> {
        Ok(self.step()?.1)
    }
}

/// First `count` partial quotients [a0; a1, ...].
pub fn cf_terms(spec: &IrrationalSpec, count: usize) -> Result<Vec<BigInt>> {
    if count < 1 {
        return Err(Error::InvalidSpec("cf_terms: count must be >= 1".into()));
    }
    let mut gen = ConvergentGen::new(spec)?;
    (0..count).map(|_| Ok(gen.step()?.0)).collect()
}

/// First `count` convergents (count >= 2).
pub fn convergents(spec: &IrrationalSpec, count: usize) -> Result<Vec<Convergent>> {
    if count < 2 {
        return Err(Error::InvalidSpec(
            "convergents: count must be >= 2".into(),
        ));
    }
    let mut gen = ConvergentGen::new(spec)?;
    (0..count).map(|_| gen.advance()).collect()
}

/// The fractional part of α in fixed point: `value / 2^frac_bits`
/// approximates {α} to better than 2^-frac_bits.
///
/// Internally the value is kept left-aligned in 256 bits so phase stepping
/// is plain wrapping arithmetic regardless of the nominal precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointAlpha {
    frac_bits: u32,
    value: BigUint,
    engine: U256,
    a0: BigInt,
}

pub const DEFAULT_FRAC_BITS: u32 = 256;
pub const MAX_FRAC_BITS: u32 = 256;

impl FixedPointAlpha {
    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// floor/round of {α}·2^frac_bits as an integer.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Integer part of α.
    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    #[inline]
    pub(crate) fn engine(&self) -> U256 {
        self.engine
    }

    /// Exact interval that contains {α}: ((value-1)/2^fb, (value+1)/2^fb).
    pub fn frac_interval(&self) -> (BigRational, BigRational) {
        let denom = BigInt::one() << self.frac_bits;
        let v = BigInt::from(self.value.clone());
        (
            Ratio::new(&v - 1, denom.clone()),
            Ratio::new(&v + 1, denom),
        )
    }

    /// Exact interval containing α itself.
    pub fn alpha_interval(&self) -> (BigRational, BigRational) {
        let (lo, hi) = self.frac_interval();
        let a0 = BigRational::from_integer(self.a0.clone());
        (&a0 + lo, a0 + hi)
    }

    fn from_parts(frac_bits: u32, mut value: BigUint, a0: BigInt) -> Result<Self> {
        if !(64..=MAX_FRAC_BITS).contains(&frac_bits) {
            return Err(Error::InvalidSpec(format!(
                "frac_bits must lie in 64..=256, got {frac_bits}"
            )));
        }
        // A value that rounded up to exactly 1.0 wraps to 0: same point mod 1.
        if value.bits() > frac_bits as u64 {
            value = BigUint::zero();
        }
        let engine = U256::from_biguint(&(&value << (256 - frac_bits) as usize));
        Ok(FixedPointAlpha {
            frac_bits,
            value,
            engine,
            a0,
        })
    }

    /// Fixed point of an exact rational num/den (den > 0). Intended for
    /// periodic-phase fixtures and cross-checks.
    pub fn from_rational(num: i64, den: u64, frac_bits: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidSpec("from_rational: zero denominator".into()));
        }
        let den = BigInt::from(den);
        let num = BigInt::from(num);
        let a0 = num.div_floor(&den);
        let r = (&num - &a0 * &den).to_biguint().unwrap();
        let d = den.to_biguint().unwrap();
        let v = ((r << (frac_bits + 1) as usize) + &d) / (&d << 1);
        Self::from_parts(frac_bits, v, a0)
    }
}

/// Round α to fixed point using convergents until q_i^2 > 2^(frac_bits+2),
/// which caps the total error below 2^-frac_bits.
pub fn alpha_fixed_point(spec: &IrrationalSpec, frac_bits: u32) -> Result<FixedPointAlpha> {
    if !(64..=MAX_FRAC_BITS).contains(&frac_bits) {
        return Err(Error::InvalidSpec(format!(
            "frac_bits must lie in 64..=256, got {frac_bits}"
        )));
    }
    let mut gen = ConvergentGen::new(spec)?;
    let threshold = BigUint::one() << (frac_bits + 2) as usize;
    let mut conv = gen.advance()?;
    let mut steps = 1usize;
    while (conv.q.magnitude() * conv.q.magnitude()) <= threshold {
        conv = gen.advance().map_err(|e| match e {
            Error::InsufficientTerms { .. } => Error::InvalidSpec(format!(
                "alpha spec is rational (finite continued fraction): cannot reach \
                 2^-{frac_bits} precision; {steps} convergents available"
            )),
            other => other,
        })?;
        steps += 1;
    }
    let q = conv.q.magnitude().clone();
    let a0 = conv.p.div_floor(&conv.q);
    let r = (&conv.p - &a0 * &conv.q).to_biguint().unwrap();
    // round to nearest: (r * 2^(fb+1) + q) / (2q)
    let v = ((r << (frac_bits + 1) as usize) + &q) / (&q << 1);
    FixedPointAlpha::from_parts(frac_bits, v, a0)
}

/// Natural log of a big integer, usable far beyond f64 range.
pub fn ln_biguint(q: &BigUint) -> f64 {
    let bits = q.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 900 {
        return q.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let mant = (q >> shift).to_f64().unwrap();
    mant.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Estimate the irrationality exponent from convergent denominators.
///
/// The local growth exponent of log q — the ratio of consecutive increments
/// (ln q_{i+1} - ln q_i)/(ln q_i - ln q_{i-1}) — tends to η - 1 when
/// q_{i+1} ≈ q_i^(η-1), and to 1 for bounded partial quotients. The estimate
/// is 1 + the maximum of that ratio over the trailing half of the sequence,
/// a desk-scale stand-in for the limsup characterization of η.
pub fn estimate_eta(convs: &[Convergent]) -> Result<f64> {
    if convs.len() < 4 {
        return Err(Error::InvalidSpec(
            "estimate_eta: need at least 4 convergents".into(),
        ));
    }
    let lnq: Vec<f64> = convs
        .iter()
        .map(|c| ln_biguint(c.q.magnitude()))
        .collect();
    let mut ratios = Vec::new();
    for i in 2..convs.len() - 1 {
        let den = lnq[i] - lnq[i - 1];
        let num = lnq[i + 1] - lnq[i];
        if den > 0.0 {
            ratios.push(num / den);
        }
    }
    if ratios.is_empty() {
        return Err(Error::InvalidSpec(
            "estimate_eta: degenerate denominator sequence".into(),
        ));
    }
    let tail = &ratios[ratios.len() / 2..];
    let max = tail.iter().cloned().fold(f64::MIN, f64::max);
    Ok(1.0 + max)
}

/// Result of the convergent-denominator selection for a given (x, τ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSelection {
    pub tau: Rational,
    pub index: usize,
    pub q: BigUint,
    /// Exact verification of q^(τ/(τ-1)) < x < q^τ.
    pub xrange_ok: bool,
    /// Exact interval confirmation of |α - p_{i-1}/q_{i-1}| > q_{i-1}^(-τ).
    pub approx_ok: bool,
}

fn validate_tau(tau: Rational) -> Result<(u32, u32)> {
    let (n, d) = (*tau.numer(), *tau.denom());
    if n <= 2 * d {
        return Err(Error::InvalidSpec(format!("tau = {tau} must exceed 2")));
    }
    if n > 256 || d > 64 {
        return Err(Error::InvalidSpec(format!(
            "tau = {tau} too fine-grained for exact power comparison (numerator <= 256, denominator <= 64)"
        )));
    }
    Ok((n as u32, d as u32))
}

/// Exact checks of q < x^(1-1/τ) and x/q < x^(1-1/τ).
///
/// Equivalently q^n < x^(n-d) and x^d < q^n for τ = n/d; both are decided
/// in integers.
pub fn check_xq_bounds(q: &BigUint, x: u64, tau: Rational) -> Result<(bool, bool)> {
    let (n, d) = validate_tau(tau)?;
    let qn = q.pow(n);
    let x = BigUint::from(x);
    Ok((qn < x.pow(n - d), x.pow(d) < qn))
}

/// Choose the minimal convergent index i with q_{i-1} ≤ x^(1/τ) < q_i and
/// return q = q_i, with the x-range and approximation-quality conditions
/// verified exactly.
pub fn select_q(spec: &IrrationalSpec, x: u64, tau: Rational) -> Result<QSelection> {
    let (n, d) = validate_tau(tau)?;
    if x < 2 {
        return Err(Error::SelectionFailed(format!(
            "x = {x} is too small to straddle a convergent pair"
        )));
    }
    let x_pow_d = BigUint::from(x).pow(d);

    let mut gen = ConvergentGen::new(spec)?;
    let mut prev = gen.advance()?;
    if prev.q.magnitude().pow(n) > x_pow_d {
        // q_0 = 1, so this cannot happen for x >= 2.
        return Err(Error::SelectionFailed(format!(
            "first convergent denominator already exceeds x^(1/tau) for x = {x}"
        )));
    }
    let selected = loop {
        let cur = gen.advance().map_err(|e| match e {
            Error::InsufficientTerms { available, .. } => Error::SelectionFailed(format!(
                "continued fraction exhausted after {available} terms before \
                 straddling x^(1/tau) for x = {x}"
            )),
            other => other,
        })?;
        if cur.q.magnitude().pow(n) > x_pow_d {
            break cur;
        }
        prev = cur;
    };

    let q = selected.q.magnitude().clone();
    let qn = q.pow(n);
    let x_big = BigUint::from(x);
    let xrange_ok = qn < x_big.pow(n - d) && x_pow_d < qn;

    // |alpha - p_{i-1}/q_{i-1}| > q_{i-1}^(-tau), confirmed only if the
    // whole alpha interval stays outside the q^(-tau) ball.
    let alpha = alpha_fixed_point(spec, DEFAULT_FRAC_BITS)?;
    let (lo, hi) = alpha.alpha_interval();
    let r = BigRational::new(prev.p.clone(), prev.q.clone());
    let gap = if r < lo {
        Some(lo - &r)
    } else if r > hi {
        Some(&r - hi)
    } else {
        None
    };
    let approx_ok = match gap {
        None => false,
        Some(e) => {
            // e > q^(-n/d)  <=>  e_num^d * q^n > e_den^d
            let q_prev = prev.q.magnitude();
            e.numer().magnitude().pow(d) * q_prev.pow(n) > e.denom().magnitude().pow(d)
        }
    };

    Ok(QSelection {
        tau,
        index: selected.index,
        q,
        xrange_ok,
        approx_ok,
    })
}

/// For each i ≥ 1, whether q_i < q_{i-1}^(τ-1), decided exactly.
pub fn check_qgrowth(convs: &[Convergent], tau: Rational) -> Result<Vec<bool>> {
    let (n, d) = validate_tau(tau)?;
    if convs.len() < 3 {
        return Err(Error::InvalidSpec(
            "check_qgrowth: need at least 3 convergents".into(),
        ));
    }
    Ok(convs
        .windows(2)
        .map(|w| {
            // q_i < q_{i-1}^((n-d)/d)  <=>  q_i^d < q_{i-1}^(n-d)
            w[1].q.magnitude().pow(d) < w[0].q.magnitude().pow(n - d)
        })
        .collect())
}

/// Outcome of an interval-arithmetic comparison at fixed precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalVerdict {
    /// The inequality holds for every α in the interval.
    Confirmed,
    /// The inequality fails for every α in the interval.
    Refuted,
    /// The interval is too wide to decide at this precision.
    Undecided,
}

/// Check |α - p_i/q_i| < 1/(q_i q_{i+1}) for each consecutive pair, using
/// the exact rational interval around α at the fixed-point precision.
pub fn convergent_quality(
    alpha: &FixedPointAlpha,
    convs: &[Convergent],
) -> Vec<IntervalVerdict> {
    let (lo, hi) = alpha.alpha_interval();
    convs
        .windows(2)
        .map(|w| {
            let r = BigRational::new(w[0].p.clone(), w[0].q.clone());
            let rhs = BigRational::new(
                BigInt::one(),
                BigInt::from_biguint(Sign::Plus, w[0].q.magnitude() * w[1].q.magnitude()),
            );
            let e_hi = std::cmp::max(&hi - &r, &r - &lo);
            let e_lo = if r < lo {
                &lo - &r
            } else if r > hi {
                &r - &hi
            } else {
                BigRational::zero()
            };
            if e_hi < rhs {
                IntervalVerdict::Confirmed
            } else if e_lo >= rhs {
                IntervalVerdict::Refuted
            } else {
                IntervalVerdict::Undecided
            }
        })
        .collect()
}
