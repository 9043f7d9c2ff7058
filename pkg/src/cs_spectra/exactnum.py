"""Exact integer number theory and quadratic Gauss sums.

Closed forms here are checked against :func:`gauss_sum_bruteforce`, which
sums the exponentials term by term with exact integer phase reduction.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import BadShape, NotCoprime, NotInvertible, NotOddPrime

RESIDUE_SCALE = "2pi/p"
BRIESKORN_SCALE = "pi/2p"

# Deterministic for every n < 3.3e24, in particular for n < 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed witness set (deterministic below 2**64)."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; meant for desk-scale n."""
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def bezout_complement(p: int, q: int) -> tuple[int, int]:
    """Return (r, s) with p*s - r*q = 1.

    Canonical choice: 0 <= r < |p| when p != 0; for p = 0 (so q = +-1) the
    pair is (-q, 0).
    """
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1", p=p, q=q)
    if p == 0:
        return -q, 0
    m = abs(p)
    r = (-pow(q, -1, m)) % m if m > 1 else 0
    s, rem = divmod(1 + r * q, p)
    assert rem == 0
    return r, s


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible mod {m}", a=a, m=m) from None


def _require_odd_prime(p: int) -> None:
    if p % 2 == 0 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime", p=p)


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a|p) by Euler's criterion."""
    _require_odd_prime(p)
    e = pow(a % p, (p - 1) // 2, p)
    return -1 if e == p - 1 else e


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def epsilon(n: int) -> complex:
    """1 if n = 1 mod 4, i if n = 3 mod 4."""
    if n % 2 == 0:
        raise ValueError(f"epsilon factor undefined for even argument {n}")
    return 1 + 0j if n % 4 == 1 else 1j


def _phase_residues(ell: int, count: int, modulus: int) -> np.ndarray:
    """ell*k^2 mod modulus for k = 0..count-1, exactly."""
    if modulus < 2**31:
        k = np.arange(count, dtype=np.int64)
        return (k * k % modulus) * (ell % modulus) % modulus
    return np.array([ell * k * k % modulus for k in range(count)], dtype=np.float64)


def exp_sum(residues: np.ndarray, modulus: int) -> complex:
    """Compensated sum of exp(2 pi i r / modulus) over the given residues."""
    ang = (2.0 * math.pi / modulus) * np.asarray(residues, dtype=np.float64)
    return complex(math.fsum(np.cos(ang).tolist()), math.fsum(np.sin(ang).tolist()))


def gauss_sum_bruteforce(ell: int, p: int, scale: str = RESIDUE_SCALE) -> complex:
    """sum_{k=0}^{p-1} exp(i * scale * ell * k^2), term by term.

    ``scale`` is ``"2pi/p"`` (quadratic residues) or ``"pi/2p"`` (the
    Brieskorn normalization).  The integer ``ell*k^2`` is reduced exactly
    before the exponential is taken.
    """
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    if scale == RESIDUE_SCALE:
        modulus = p
    elif scale == BRIESKORN_SCALE:
        modulus = 4 * p
    else:
        raise ValueError(f"unknown scale {scale!r}")
    return exp_sum(_phase_residues(ell, p, modulus), modulus)


def gauss_moment_closed_form(ell: int, p: int) -> complex:
    """(1/p) sum_k exp(2 pi i ell k^2 / p) for an odd prime p.

    Includes the classical phase epsilon_p, so the result is the full complex
    value and not only its modulus.
    """
    _require_odd_prime(p)
    if ell % p == 0:
        return 1 + 0j
    return legendre_symbol(ell, p) * epsilon(p) / math.sqrt(p)


def is_three_prime_product(p: int) -> bool:
    f = factorize(p)
    return len(f) == 3 and all(e == 1 for e in f.values()) and 2 not in f


def brieskorn_moment_closed_form(ell: int, p: int) -> complex:
    """Three-case evaluation for p a product of three distinct odd primes.

    This is exactly the average of exp(i pi ell n^2 / 2p) over a full period
    n = 0..4p-1.  The truncated average over n = 0..p-1 differs from it by
    :func:`brieskorn_truncation_gap`.
    """
    if ell <= 0:
        raise ValueError(f"ell must be positive, got {ell}")
    if not is_three_prime_product(p):
        raise BadShape(f"{p} is not a product of three distinct odd primes", p=p)
    if math.gcd(ell, p) != 1:
        raise NotCoprime(f"gcd({ell}, {p}) != 1", ell=ell, p=p)
    sp = math.sqrt(p)
    if ell % 4 == 0:
        return epsilon(p) * jacobi_symbol(ell // 4, p) / sp
    if ell % 4 == 2:
        return 0j
    return (1 + 1j) * jacobi_symbol(p, ell) / (2 * sp * epsilon(ell))


def brieskorn_truncation_gap(ell: int, p: int) -> complex:
    """(1/p) sum_{n<p} minus the full-period average, in closed form.

    Folding n -> 2p - n and the period 2p give
    sum_{n<4p} = 4 sum_{n<p} - 2 + 2 exp(i pi ell p / 2).
    """
    return (1 - cmath.exp(1j * math.pi * ((ell * p) % 4) / 2)) / (2 * p)
