"""Chern-Simons measures of lens spaces, Brieskorn spheres and torus bundles.

Every phase is kept as an exact rational number of turns (a ``Fraction`` in
[0, 1)) and multiplied by 2 pi only when the ``CircleMeasure`` is built, so
coinciding values merge exactly.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotCoprime, NotFixedPoint, NotUnimodular, ParabolicMonodromy, ValidationError
from .exactnum import bezout_complement, is_prime, mod_inverse
from .measure import TWO_PI, CircleMeasure

Vec = tuple[Fraction, Fraction]
Mat = tuple[tuple[int, int], tuple[int, int]]


def measure_from_turns(turns: Counter, label: str = "") -> CircleMeasure:
    """Probability measure with an atom at 2 pi * t for each key t (mass by multiplicity)."""
    total = sum(turns.values())
    return CircleMeasure(tuple((TWO_PI * float(t), c / total) for t, c in sorted(turns.items())),
                         label)



def turns_moment(turns: Counter, ell: int) -> complex:
    """ell-th moment of :func:`measure_from_turns`, reducing ell * t mod 1 exactly.

    Atoms with ell * t in Z contribute exactly 1, so e.g. p | ell gives exactly 1 on mu_p.
    """
    total = sum(turns.values())
    whole = Fraction(sum(c for t, c in turns.items() if (ell * t).denominator == 1), total)
    rest = [(float((ell * t) % 1), c / total) for t, c in turns.items() if (ell * t).denominator != 1]
    re = math.fsum([float(whole)] + [w * math.cos(TWO_PI * u) for u, w in rest])
    im = math.fsum([w * math.sin(TWO_PI * u) for u, w in rest])
    return complex(re, im)

# -- lens spaces -----------------------------------------------------------


@dataclass(frozen=True)
class LensSpace:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1:
            raise ValidationError(f"lens space needs p >= 1, got {self.p}")
        if math.gcd(self.p, self.q) != 1:
            raise NotCoprime(f"gcd({self.p}, {self.q}) != 1", p=self.p, q=self.q)
        object.__setattr__(self, "q", self.q % self.p)


def lens_turns(L: LensSpace) -> Counter:
    """CS(rho_n) / 2pi = q* n^2 / p mod 1 for n = 0..p-1."""
    qs = mod_inverse(L.q, L.p)
    return Counter(Fraction(qs * n * n % L.p, L.p) for n in range(L.p))


def lens_measure(L: LensSpace) -> CircleMeasure:
    return measure_from_turns(lens_turns(L), f"L({L.p},{L.q})")


# -- Brieskorn spheres -----------------------------------------------------


@dataclass(frozen=True)
class BrieskornSphere:
    p1: int
    p2: int
    p3: int

    def __post_init__(self):
        ps = (self.p1, self.p2, self.p3)
        if len(set(ps)) != 3 or not all(is_prime(p) for p in ps):
            raise ValidationError(f"need three pairwise distinct primes, got {ps}")

    @property
    def primes(self) -> tuple[int, int, int]:
        return self.p1, self.p2, self.p3

    @property
    def order(self) -> int:
        return self.p1 * self.p2 * self.p3


def brieskorn_labels(B: BrieskornSphere) -> list[int]:
    """n = n1 p2 p3 + p1 n2 p3 + p1 p2 n3 over all triples 0 < n_i < p_i."""
    p1, p2, p3 = B.primes
    return [n1 * p2 * p3 + p1 * n2 * p3 + p1 * p2 * n3
            for n1, n2, n3 in itertools.product(range(1, p1), range(1, p2), range(1, p3))]


def brieskorn_turns(B: BrieskornSphere) -> Counter:
    """n^2 / 4p mod 1 per triple; the counter keeps the pre-merge multiplicity."""
    m = 4 * B.order
    return Counter(Fraction(n * n % m, m) for n in brieskorn_labels(B))


def brieskorn_measure(B: BrieskornSphere) -> CircleMeasure:
    return measure_from_turns(brieskorn_turns(B), f"Sigma({B.p1},{B.p2},{B.p3})")


# -- integer Smith normal form ----------------------------------------------


def smith_normal_form(M) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U M V = D diagonal, d_i | d_{i+1}, U and V unimodular.

    Plain elementary row/column operations on a copy of M, mirrored on
    identity trackers.
    """
    D = [list(map(int, row)) for row in M]
    m, n = len(D), len(D[0])
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for X in (D, V):
            for row in X:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        for X in (D, U):
            X[dst] = [a + c * b for a, b in zip(X[dst], X[src])]

    def add_col(src, dst, c):
        for X in (D, V):
            for row in X:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not nz:
                return U, D, V
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            piv = D[t][t]
            done = True
            for i in range(t + 1, m):
                c = D[i][t] // piv
                if c:
                    add_row(t, i, -c)
                if D[i][t]:
                    done = False
            for j in range(t + 1, n):
                c = D[t][j] // piv
                if c:
                    add_col(t, j, -c)
                if D[t][j]:
                    done = False
            if not done:
                continue
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv]
            if bad:
                add_row(bad[0][0], t, 1)
                continue
            break
        if D[t][t] < 0:
            U[t] = [-a for a in U[t]]
            D[t] = [-a for a in D[t]]
    return U, D, V


# -- torus bundles ---------------------------------------------------------


def _det2(v, w):
    return v[0] * w[1] - v[1] * w[0]


def _apply(A, v):
    return (A[0][0] * v[0] + A[0][1] * v[1], A[1][0] * v[0] + A[1][1] * v[1])


def _frac01(x: Fraction) -> Fraction:
    return x - math.floor(x)


def reduce_vec(v) -> Vec:
    return (_frac01(Fraction(v[0])), _frac01(Fraction(v[1])))


@dataclass(frozen=True)
class TorusBundle:
    """Mapping torus of A in SL_2(Z) acting on R^2/Z^2 (trace != 2)."""

    A: Mat

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.A)
        if len(A) != 2 or any(len(r) != 2 for r in A):
            raise ValidationError(f"monodromy must be 2x2, got {self.A}")
        object.__setattr__(self, "A", A)
        if _det2(A[0], A[1]) != 1:
            raise NotUnimodular(f"det(A) != 1 for A={A}", A=A)
        if self.trace == 2:
            raise ParabolicMonodromy(f"trace(A) = 2 for A={A}", A=A)

    @classmethod
    def from_flat(cls, a, b, c, d) -> "TorusBundle":
        return cls(((a, b), (c, d)))

    @property
    def trace(self) -> int:
        return self.A[0][0] + self.A[1][1]

    @property
    def order(self) -> int:
        """|det(A - I)| = |2 - trace(A)|."""
        return abs(2 - self.trace)

    def shifted(self) -> list[list[int]]:
        A = self.A
        return [[A[0][0] - 1, A[0][1]], [A[1][0], A[1][1] - 1]]


def torus_bundle_group(T: TorusBundle) -> list[Vec]:
    """All v in Q^2/Z^2 with A v = v, enumerated through the SNF of A - I."""
    U, D, V = smith_normal_form(T.shifted())
    d1, d2 = abs(D[0][0]), abs(D[1][1])
    out = set()
    for a in range(d1):
        for b in range(d2):
            w = (Fraction(a, d1), Fraction(b, d2))
            out.add(reduce_vec(_apply(V, w)))
    return sorted(out)


def torus_bundle_group_bruteforce(T: TorusBundle) -> list[Vec]:
    """Oracle: scan (a/N, b/N) for N = |det(A - I)|; adj(A - I) forces that denominator."""
    N = T.order
    S = T.shifted()
    out = []
    for a in range(N):
        for b in range(N):
            v = (Fraction(a, N), Fraction(b, N))
            w = _apply(S, v)
            if w[0].denominator == 1 and w[1].denominator == 1:
                out.append(v)
    return out


def is_fixed_point(T: TorusBundle, v) -> bool:
    w = _apply(T.shifted(), (Fraction(v[0]), Fraction(v[1])))
    return w[0].denominator == 1 and w[1].denominator == 1


def torus_bundle_phase(T: TorusBundle, v) -> Fraction:
    """f(v) = det(v, A v) mod 1."""
    v = (Fraction(v[0]), Fraction(v[1]))
    return _frac01(_det2(v, _apply(T.A, v)))


def torus_bundle_bilinear(T: TorusBundle, v, w) -> Fraction:
    """b(v, w) = det(v, A w) + det(w, A v) mod 1, for v, w in G_A."""
    for u in (v, w):
        if not is_fixed_point(T, u):
            raise NotFixedPoint(f"{u} is not fixed by A mod Z^2", v=str(u))
    v = (Fraction(v[0]), Fraction(v[1]))
    w = (Fraction(w[0]), Fraction(w[1]))
    return _frac01(_det2(v, _apply(T.A, w)) + _det2(w, _apply(T.A, v)))


def torus_bundle_turns(T: TorusBundle) -> Counter:
    return Counter(torus_bundle_phase(T, v) for v in torus_bundle_group(T))


def torus_bundle_measure(T: TorusBundle) -> CircleMeasure:
    (a, b), (c, d) = T.A
    return measure_from_turns(torus_bundle_turns(T), f"T([[{a},{b}],[{c},{d}]])")


def multiplication_is_bijective(G: list[Vec], k: int) -> bool:
    """True if v -> k v is a bijection of the finite group G."""
    return len({reduce_vec((k * v[0], k * v[1])) for v in G}) == len(G)


def random_monodromy(rng: random.Random, max_order: int = 100) -> TorusBundle:
    """Random A in SL_2(Z) with trace != 2 and |det(A - I)| <= max_order."""
    while True:
        a, c = rng.randint(-40, 40), rng.randint(-12, 12)
        if math.gcd(a, c) != 1:
            continue
        b, d = bezout_complement(a, c)
        t = rng.randint(-6, 6)
        A = ((a, b + t * a), (c, d + t * c))
        tr = a + A[1][1]
        if tr != 2 and abs(2 - tr) <= max_order:
            return TorusBundle(A)


def residue_turns(p: int) -> Counter:
    """k^2 / p mod 1 for k = 0..p-1."""
    if p < 1:
        raise ValidationError(f"p must be positive, got {p}")
    return Counter(Fraction(k * k % p, p) for k in range(p))


def residue_measure(p: int) -> CircleMeasure:
    """Quadratic-residue measure: atoms 2 pi k^2 / p, k = 0..p-1, weight 1/p."""
    return measure_from_turns(residue_turns(p), f"mu_{p}")
