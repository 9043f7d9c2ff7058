import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cs_spectra.errors import BadShape, NotCoprime, NotInvertible, NotOddPrime
from cs_spectra.exactnum import (BRIESKORN_SCALE, RESIDUE_SCALE, bezout_complement,
                                 brieskorn_moment_closed_form, brieskorn_truncation_gap, epsilon,
                                 factorize, gauss_moment_closed_form, gauss_sum_bruteforce,
                                 is_prime, is_three_prime_product, jacobi_symbol, legendre_symbol,
                                 mod_inverse)


def sieve(n):
    flags = [True] * (n + 1)
    flags[0:2] = [False, False]
    for i in range(2, int(n ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = [False] * len(flags[i * i::i])
    return [i for i, f in enumerate(flags) if f]


def test_is_prime_matches_sieve():
    ps = set(sieve(20000))
    assert all(is_prime(n) == (n in ps) for n in range(-5, 20001))


def test_is_prime_large_and_carmichael():
    assert is_prime(2**61 - 1)
    assert not is_prime(561) and not is_prime(3215031751)
    assert is_prime(18446744073709551557)  # largest prime below 2^64


@pytest.mark.parametrize("p,q,want", [((3, 1), None, (2, 1)), ((1, 0), None, (0, 1)),
                                      ((5, 2), None, (2, 1))])
def test_bezout_examples(p, q, want):
    assert bezout_complement(*p) == want


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_bezout_property(p, q):
    if math.gcd(p, q) != 1:
        with pytest.raises(NotCoprime):
            bezout_complement(p, q)
        return
    r, s = bezout_complement(p, q)
    assert p * s - r * q == 1
    if p != 0:
        assert 0 <= r < abs(p)


@pytest.mark.parametrize("a,m,want", [(2, 5, 3), (1, 7, 1), (3, 10, 7)])
def test_mod_inverse_examples(a, m, want):
    assert mod_inverse(a, m) == want


@given(st.integers(1, 10**6), st.integers(2, 10**6))
def test_mod_inverse_involution(a, m):
    if math.gcd(a, m) != 1:
        with pytest.raises(NotInvertible):
            mod_inverse(a, m)
        return
    inv = mod_inverse(a, m)
    assert a * inv % m == 1
    assert mod_inverse(inv, m) == a % m


def test_mod_inverse_bad_modulus():
    with pytest.raises(ValueError):
        mod_inverse(3, 0)


@pytest.mark.parametrize("a,p,want", [(2, 5, -1), (0, 7, 0), (4, 7, 1)])
def test_legendre_examples(a, p, want):
    assert legendre_symbol(a, p) == want


def test_legendre_matches_residue_set():
    for p in sieve(300)[1:]:
        squares = {k * k % p for k in range(1, p)}
        for a in range(p):
            want = 0 if a == 0 else (1 if a in squares else -1)
            assert legendre_symbol(a, p) == want


def test_legendre_multiplicative():
    rng = random.Random(7)
    primes = sieve(5000)[1:]
    for _ in range(1000):
        p = rng.choice(primes)
        a, b = rng.randrange(-10**6, 10**6), rng.randrange(-10**6, 10**6)
        assert legendre_symbol(a * b, p) == legendre_symbol(a, p) * legendre_symbol(b, p)


@pytest.mark.parametrize("p", [2, 9, 1, 15])
def test_legendre_rejects_non_odd_prime(p):
    with pytest.raises(NotOddPrime):
        legendre_symbol(1, p)


def test_jacobi_is_product_of_legendre():
    rng = random.Random(3)
    for _ in range(500):
        n = rng.randrange(3, 5000, 2)
        a = rng.randrange(-5000, 5000)
        want = 1
        for q, e in factorize(n).items():
            want *= legendre_symbol(a, q) ** e
        assert jacobi_symbol(a, n) == want


def test_jacobi_rejects_even():
    with pytest.raises(ValueError):
        jacobi_symbol(1, 4)


def test_epsilon():
    assert epsilon(5) == 1 and epsilon(7) == 1j and epsilon(1) == 1 and epsilon(-1) == 1j
    with pytest.raises(ValueError):
        epsilon(4)


@pytest.mark.parametrize("ell,p,want", [(1, 5, math.sqrt(5)), (1, 7, 1j * math.sqrt(7)), (0, 9, 9)])
def test_bruteforce_examples(ell, p, want):
    assert abs(gauss_sum_bruteforce(ell, p) - want) < 1e-12


def test_bruteforce_large_modulus_path():
    # modulus 4p >= 2^31 uses exact Python integers
    p = 2**29 + 11
    assert abs(gauss_sum_bruteforce(0, 5, RESIDUE_SCALE) - 5) < 1e-12
    from cs_spectra.exactnum import _phase_residues
    r = _phase_residues(3, 50, 4 * p)
    assert all(int(r[k]) == 3 * k * k % (4 * p) for k in range(50))


def test_bruteforce_errors():
    with pytest.raises(ValueError):
        gauss_sum_bruteforce(1, 0)
    with pytest.raises(ValueError):
        gauss_sum_bruteforce(1, 5, "pi/p")


@pytest.mark.parametrize("ell,p,want", [(1, 5, 1 / math.sqrt(5)), (5, 5, 1), (2, 5, -1 / math.sqrt(5))])
def test_gauss_closed_form_examples(ell, p, want):
    assert abs(gauss_moment_closed_form(ell, p) - want) < 1e-15


def test_gauss_closed_form_vs_oracle_up_to_1e4():
    # every odd prime up to 10^4 with ell in [0, 3p] would be ~10^9 terms; a
    # stratified sample keeps every prime and samples ell, plus all ell for p < 200
    rng = random.Random(11)
    for p in sieve(10**4)[1:]:
        ells = range(3 * p + 1) if p < 200 else [0, p, 2 * p, 3 * p] + rng.sample(range(3 * p + 1), 6)
        for ell in ells:
            assert abs(gauss_moment_closed_form(ell, p) - gauss_sum_bruteforce(ell, p) / p) < 1e-10


def test_gauss_modulus_matches_unphased_statement():
    for p in (101, 103):
        for ell in range(1, p):
            assert abs(abs(gauss_moment_closed_form(ell, p)) - p ** -0.5) < 1e-15


def test_three_prime_product():
    assert is_three_prime_product(105) and is_three_prime_product(1001)
    assert not is_three_prime_product(30) and not is_three_prime_product(1155)
    assert not is_three_prime_product(45)


@pytest.mark.parametrize("ell,p,want", [(2, 105, 0), (4, 105, 1 / math.sqrt(105)),
                                        (1, 105, (1 + 1j) / (2 * math.sqrt(105)))])
def test_brieskorn_closed_form_examples(ell, p, want):
    assert abs(brieskorn_moment_closed_form(ell, p) - want) < 1e-15


def test_brieskorn_closed_form_errors():
    with pytest.raises(NotCoprime):
        brieskorn_moment_closed_form(3, 105)
    with pytest.raises(BadShape):
        brieskorn_moment_closed_form(1, 1155)
    with pytest.raises(ValueError):
        brieskorn_moment_closed_form(0, 105)


TRIPLE_PRODUCTS = [105, 231, 385, 1001, 3 * 7 * 11, 5 * 7 * 13, 3 * 17 * 19, 11 * 13 * 17]


@pytest.mark.parametrize("p", TRIPLE_PRODUCTS)
def test_brieskorn_closed_form_is_exact_full_period_average(p):
    """The three-case value equals the average over a full period 4p exactly."""
    for ell in range(1, 60):
        if math.gcd(ell, p) != 1:
            continue
        n = np.arange(4 * p, dtype=np.int64)
        terms = np.exp(1j * np.pi * ((ell * n * n) % (4 * p)) / (2 * p)).sum()
        assert abs(terms / (4 * p) - brieskorn_moment_closed_form(ell, p)) < 1e-10


@pytest.mark.parametrize("p", TRIPLE_PRODUCTS)
def test_brieskorn_truncation_identity(p):
    for ell in range(1, 60):
        if math.gcd(ell, p) != 1:
            continue
        trunc = gauss_sum_bruteforce(ell, p, BRIESKORN_SCALE) / p
        assert abs(trunc - brieskorn_moment_closed_form(ell, p)
                   - brieskorn_truncation_gap(ell, p)) < 1e-10
        mod = {0: 1.0, 2: 0.0}.get(ell % 4, 2 ** -0.5)
        assert abs(abs(brieskorn_moment_closed_form(ell, p)) * math.sqrt(p) - mod) < 1e-12


@settings(max_examples=50)
@given(st.integers(1, 400))
def test_brieskorn_modulus_relative(ell):
    p = 1001
    if math.gcd(ell, p) != 1:
        return
    closed = abs(brieskorn_moment_closed_form(ell, p))
    gap = abs(brieskorn_truncation_gap(ell, p))
    brute = abs(gauss_sum_bruteforce(ell, p, BRIESKORN_SCALE)) / p
    # truncated sum = closed form + explicit gap, so the modulus differs by at most the gap
    assert abs(brute - closed) <= gap + 1e-12
