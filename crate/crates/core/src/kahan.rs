//! Neumaier-compensated accumulation for real and complex sums.

/// Scalar compensated accumulator (Kahan with Neumaier's correction).
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator with an explicit rounding-error budget.
///
/// `abs_acc` tracks the sum of term magnitudes; the accumulated rounding
/// error of the compensated sum plus the per-term evaluation error of
/// e(phase) is bounded by `ERR_PER_UNIT * abs_acc`. Errors imported from
/// sub-sums (scaled inner sums, closed-form evaluations) are added to
/// `extra_err` verbatim.
#[derive(Debug, Clone, Default)]
pub struct ComplexAcc {
    re: Kahan,
    im: Kahan,
    pub terms: u64,
    pub abs_acc: f64,
    pub extra_err: f64,
}

/// Error model constant: 2 eps compensated summation + ~1.6 eps phase
/// quantization to f64 + ~2 eps sin/cos rounding, rounded up.
pub const ERR_PER_UNIT: f64 = 6.0 * f64::EPSILON;

impl ComplexAcc {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a unit-modulus term scaled by an integer-like coefficient.
    #[inline]
    pub fn add_unit(&mut self, coeff: f64, re: f64, im: f64) {
        self.re.add(coeff * re);
        self.im.add(coeff * im);
        self.terms += 1;
        self.abs_acc += coeff.abs();
    }

    /// Count a summand that is identically zero (keeps `terms` honest).
    #[inline]
    pub fn skip_zero_terms(&mut self, n: u64) {
        self.terms += n;
    }

    /// Fold in an already-evaluated sub-sum scaled by `coeff`.
    pub fn add_scaled_sum(&mut self, coeff: f64, sub: &super::expsum::ComplexSum) {
        self.re.add(coeff * sub.re);
        self.im.add(coeff * sub.im);
        self.terms += sub.terms;
        self.abs_acc += coeff.abs() * sub.abs();
        self.extra_err += coeff.abs() * sub.err_bound;
    }

    pub fn finish(&self) -> super::expsum::ComplexSum {
        super::expsum::ComplexSum {
            re: self.re.value(),
            im: self.im.value(),
            terms: self.terms,
            err_bound: ERR_PER_UNIT * self.abs_acc + self.extra_err,
        }
    }
}
