//! Sieve-backed arithmetic kernel: Möbius values, smallest-prime-factor
//! factorization, and the divisor-restricted coefficient sums that appear in
//! the Type I / Type II decomposition.

use crate::error::{Error, Result};

/// Memory budget applied by [`build_tables`]: 2 GiB, sized so that a sieve to
/// 10^8 (5 bytes/entry plus the prime list) fits with room to spare.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Sieved Möbius values for 1..=limit, stored as signed bytes.
#[derive(Debug, Clone)]
pub struct MobiusTable {
    limit: u64,
    values: Vec<i8>,
}

impl MobiusTable {
    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// μ(n). Panics if `n` is 0 or beyond the sieve limit.
    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.values[n as usize]
    }

    #[inline]
    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

/// Smallest prime factor of every n in 2..=limit.
///
/// Primes are stored as 0 internally; [`SpfTable::spf`] resolves them back
/// to n itself.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of n ≥ 2.
    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        let e = self.spf[n as usize];
        if e == 0 {
            n
        } else {
            e as u64
        }
    }

    /// Prime factorization of n ≤ limit as (prime, exponent) pairs in
    /// increasing prime order. n = 1 yields an empty list.
    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        let mut factors = Vec::new();
        let mut x = n;
        while x > 1 {
            let p = self.spf(x);
            let mut exp = 0;
            while x % p == 0 {
                exp += 1;
                x /= p;
            }
            factors.push((p, exp));
        }
        factors
    }

    /// Visit every positive divisor of n (in no particular order).
    pub fn for_each_divisor(&self, n: u64, mut visitor: impl FnMut(u64)) {
        let factors = self.factorize(n);
        let mut stack = vec![(1u64, 0usize)];
        while let Some((mut d, i)) = stack.pop() {
            if i == factors.len() {
                visitor(d);
            } else {
                let (p, exp) = factors[i];
                for _ in 0..=exp {
                    stack.push((d, i + 1));
                    d *= p;
                }
            }
        }
    }
}

/// The Möbius and smallest-prime-factor tables built by one sieve pass.
#[derive(Debug, Clone)]
pub struct SieveTables {
    pub mobius: MobiusTable,
    pub spf: SpfTable,
}

impl SieveTables {
    #[inline]
    pub fn limit(&self) -> u64 {
        self.mobius.limit
    }

    pub(crate) fn check_range(&self, what: &'static str, value: u64) -> Result<()> {
        if value > self.limit() {
            return Err(Error::OutOfRange {
                what,
                value,
                limit: self.limit(),
            });
        }
        Ok(())
    }
}

fn estimated_bytes(limit: u64) -> u64 {
    // 1 byte of μ + 4 bytes of spf per entry, plus the prime list
    // (π(limit) u32 entries, over-estimated by 20%).
    let per_entry = 5 * (limit + 1);
    let primes = if limit >= 3 {
        (limit as f64 / (limit as f64).ln() * 1.2) as u64 * 4
    } else {
        16
    };
    per_entry + primes
}

/// Build both tables with a linear sieve, O(limit) time.
///
/// Fails with [`Error::CapacityExceeded`] before allocating anything if the
/// estimated footprint exceeds the budget; no partial tables are returned.
pub fn build_tables_with_budget(limit: u64, budget_bytes: u64) -> Result<SieveTables> {
    if limit < 1 {
        return Err(Error::InvalidSpec("sieve limit must be >= 1".into()));
    }
    let required = estimated_bytes(limit);
    if required > budget_bytes || limit >= u32::MAX as u64 {
        return Err(Error::CapacityExceeded {
            limit,
            required,
            budget: budget_bytes,
        });
    }

    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut mu = vec![0i8; n + 1];
    if n >= 1 {
        mu[1] = 1;
    }
    let mut primes: Vec<u32> = Vec::with_capacity((estimated_bytes(limit) / 4) as usize / 5);

    for i in 2..=n {
        if spf[i] == 0 {
            primes.push(i as u32);
            mu[i] = -1;
        } else {
            let p = spf[i] as usize;
            let m = i / p;
            mu[i] = if m % p == 0 { 0 } else { -mu[m] };
        }
        let i_u64 = i as u64;
        for &p in &primes {
            let p = p as u64;
            if p > spf_or_self(&spf, i) || i_u64 * p > limit {
                break;
            }
            spf[(i_u64 * p) as usize] = p as u32;
        }
    }

    Ok(SieveTables {
        mobius: MobiusTable {
            limit,
            values: mu,
        },
        spf: SpfTable { limit, spf },
    })
}

#[inline]
fn spf_or_self(spf: &[u32], i: usize) -> u64 {
    if spf[i] == 0 {
        i as u64
    } else {
        spf[i] as u64
    }
}

/// [`build_tables_with_budget`] with the default 2 GiB budget.
pub fn build_tables(limit: u64) -> Result<SieveTables> {
    build_tables_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

/// Number of positive divisors d(k).
pub fn divisor_count(k: u64, spf: &SpfTable) -> Result<u64> {
    if k < 1 || k > spf.limit() {
        return Err(Error::OutOfRange {
            what: "divisor_count k",
            value: k,
            limit: spf.limit(),
        });
    }
    Ok(spf
        .factorize(k)
        .iter()
        .map(|&(_, e)| e as u64 + 1)
        .product())
}

/// Thresholds for the coefficient sums: γ(k) over divisors n ≤ `n` of k with
/// the cofactor bounded by `m`, and τ(k) over divisors exceeding `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffQuery {
    pub k: u64,
    pub m: u64,
    pub n: u64,
}

/// Which Type-I coefficient to use.
///
/// `Exact` applies both region constraints (divisor ≤ N and cofactor ≤ M),
/// which is what makes the decomposition residual vanish identically.
/// `Literal` keeps only the divisor ≤ N constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaVariant {
    #[default]
    Exact,
    Literal,
}

/// γ(k): Σ μ(n)μ(k/n) over divisors n of k with n ≤ query.n, and
/// (in the exact variant) k/n ≤ query.m. Bounded by d(k) in magnitude.
pub fn gamma_coeff(query: CoeffQuery, tables: &SieveTables, variant: GammaVariant) -> Result<i64> {
    tables.check_range("gamma_coeff k", query.k)?;
    if query.k < 1 {
        return Err(Error::InvalidSpec("gamma_coeff requires k >= 1".into()));
    }
    let mut acc = 0i64;
    let mob = &tables.mobius;
    tables.spf.for_each_divisor(query.k, |n| {
        if n <= query.n {
            let cof = query.k / n;
            if matches!(variant, GammaVariant::Literal) || cof <= query.m {
                acc += mob.mu(n) as i64 * mob.mu(cof) as i64;
            }
        }
    });
    Ok(acc)
}

/// τ(k): Σ μ(m) over divisors m of k with m > query.m.
/// Only squarefree divisors contribute, so the subsets of k's distinct
/// primes are enumerated directly. Bounded by d(k) in magnitude.
pub fn tau_coeff(query: CoeffQuery, tables: &SieveTables) -> Result<i64> {
    tables.check_range("tau_coeff k", query.k)?;
    if query.k < 1 {
        return Err(Error::InvalidSpec("tau_coeff requires k >= 1".into()));
    }
    let primes: Vec<u64> = tables
        .spf
        .factorize(query.k)
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let mut acc = 0i64;
    // (divisor, sign, next prime index) over squarefree divisors.
    let mut stack = vec![(1u64, 1i64, 0usize)];
    while let Some((d, sign, i)) = stack.pop() {
        if i == primes.len() {
            if d > query.m {
                acc += sign;
            }
        } else {
            stack.push((d, sign, i + 1));
            stack.push((d * primes[i], -sign, i + 1));
        }
    }
    Ok(acc)
}
