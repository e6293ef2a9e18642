#!/usr/bin/env python3
"""Generate high-precision reference values frozen into the Rust test suite.

Everything here is computed with exact integer arithmetic (python ints /
fractions) or mpmath at 40 significant digits, independently of the Rust
implementation. Run from the repository root:

    python3 scripts/gen_reference.py
"""

from fractions import Fraction
from math import isqrt

import mpmath as mp

mp.mp.dps = 40


def mobius_sieve(limit):
    spf = [0] * (limit + 1)
    primes = []
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes.append(i)
        for p in primes:
            if p > spf[i] or i * p > limit:
                break
            spf[i * p] = p
    mu = [0] * (limit + 1)
    mu[1] = 1
    for i in range(2, limit + 1):
        m = i // spf[i]
        mu[i] = 0 if m % spf[i] == 0 else -mu[m]
    return mu


def expsum(alpha, x, mu):
    """S(x) = sum_{n<=x} mu(n) e(alpha n), term by term at 40 digits."""
    acc = mp.mpc(0)
    for n in range(1, x + 1):
        if mu[n]:
            acc += mu[n] * mp.e ** (2j * mp.pi * mp.frac(alpha * n))
    return acc


def cf_prescribed(eta, count, seed=(0,)):
    """Partial quotients a_{i+1} = max(1, ceil(q_i^(eta-2))), exact integers."""
    num, den = eta
    terms = list(seed)
    p_prev, p = 1, terms[0]
    q_prev, q = 0, 1
    convs = [(p, q)]
    while len(terms) < count:
        m = num - 2 * den
        power = q**m
        r = integer_nth_root(power, den)
        if r**den < power:
            r += 1
        a = max(1, r)
        terms.append(a)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        convs.append((p, q))
    return terms, convs


def integer_nth_root(n, k):
    if k == 1:
        return n
    if n == 0:
        return 0
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def main():
    mu = mobius_sieve(10**4)

    sqrt2 = mp.sqrt(2)
    golden = (1 + mp.sqrt(5)) / 2

    print("frac(2*sqrt(2)) =", mp.nstr(mp.frac(2 * sqrt2), 30))

    s = expsum(sqrt2, 10**4, mu)
    print("S(1e4, sqrt2)  re =", mp.nstr(s.real, 30))
    print("               im =", mp.nstr(s.imag, 30))

    s = expsum(golden, 10**4, mu)
    print("S(1e4, golden) re =", mp.nstr(s.real, 30))
    print("               im =", mp.nstr(s.imag, 30))

    # Prescribed-exponent continued fractions, exact integer recurrences.
    for eta, count in (((5, 2), 12), ((3, 1), 10), ((4, 1), 8)):
        terms, convs = cf_prescribed(eta, count)
        qs = [q for (_, q) in convs]
        print(f"liouville {eta[0]}/{eta[1]} q prefix:", qs)

    # A deep convergent of liouville:3 for use as a rational stand-in.
    _, convs = cf_prescribed((3, 1), 10)
    p9, q9 = convs[9]
    print("liouville 3 p9 =", p9)
    print("liouville 3 q9 =", q9)
    print("check |alpha - p9/q9| < 1/q9^2, q9 bits =", q9.bit_length())

    # floor({sqrt 2} * 2^64) via pure integer square root.
    v = isqrt(2 << 128) - (1 << 64)
    print("floor(frac(sqrt2)*2^64) =", v)
    w = (isqrt(5 << 128) - (1 << 64)) // 2
    print("floor(frac(golden)*2^64) =", w)


if __name__ == "__main__":
    main()
