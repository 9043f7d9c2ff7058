"""Trigonometric polynomials with a linear drift, and lattice root finding.

A :class:`TrigPoly` is ``c*t + sum_j (a_j cos(w_j t) + b_j sin(w_j t))``; a
constant is the ``w = 0`` cosine coefficient.  Derivatives, antiderivatives
and products stay in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EndpointHit, NonTransverse

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrigPoly:
    linear: float = 0.0
    harmonics: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        merged: dict[float, list[float]] = {}
        for w, a, b in self.harmonics:
            w, a, b = float(w), float(a), float(b)
            if w < 0:
                w, b = -w, -b
            if w == 0:
                b = 0.0
            acc = merged.setdefault(w, [0.0, 0.0])
            acc[0] += a
            acc[1] += b
        h = tuple((w, a, b) for w, (a, b) in sorted(merged.items()) if a or b)
        object.__setattr__(self, "linear", float(self.linear))
        object.__setattr__(self, "harmonics", h)

    @classmethod
    def const(cls, c: float) -> "TrigPoly":
        return cls(0.0, ((0.0, c, 0.0),))

    def _arrays(self):
        h = np.array(self.harmonics, dtype=float).reshape(-1, 3)
        return h[:, 0], h[:, 1], h[:, 2]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w, a, b = self._arrays()
        wt = np.multiply.outer(t, w)
        return self.linear * t + np.cos(wt) @ a + np.sin(wt) @ b

    def deriv(self, t, order: int = 1):
        t = np.asarray(t, dtype=float)
        w, a, b = self._arrays()
        wt = np.multiply.outer(t, w)
        if order == 1:
            return self.linear + np.cos(wt) @ (b * w) - np.sin(wt) @ (a * w)
        if order == 2:
            return -(np.cos(wt) @ (a * w * w) + np.sin(wt) @ (b * w * w))
        raise ValueError("only first and second derivatives are supported")

    def derivative(self) -> "TrigPoly":
        h = [(w, b * w, -a * w) for w, a, b in self.harmonics]
        return TrigPoly(0.0, ((0.0, self.linear, 0.0),) + tuple(h))

    def periodic_part(self) -> "TrigPoly":
        return TrigPoly(0.0, self.harmonics)

    def mean(self) -> float:
        """Constant term (the average of the periodic part when frequencies are nonzero)."""
        return sum(a for w, a, _ in self.harmonics if w == 0)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(self.linear + other.linear, self.harmonics + other.harmonics)

    def scale(self, c: float) -> "TrigPoly":
        return TrigPoly(c * self.linear, tuple((w, c * a, c * b) for w, a, b in self.harmonics))

    def reparametrize(self, alpha: float, beta: float) -> "TrigPoly":
        """The polynomial s -> P(alpha * s + beta)."""
        h = [(0.0, self.linear * beta, 0.0)]
        for w, a, b in self.harmonics:
            cb, sb = math.cos(w * beta), math.sin(w * beta)
            h.append((w * alpha, a * cb + b * sb, b * cb - a * sb))
        return TrigPoly(self.linear * alpha, tuple(h))

    def to_dict(self) -> dict:
        return {"linear": self.linear, "harmonics": [list(h) for h in self.harmonics]}

    @classmethod
    def from_dict(cls, d: dict) -> "TrigPoly":
        unknown = set(d) - {"linear", "harmonics"}
        if unknown:
            raise ValueError(f"unknown trig polynomial fields {sorted(unknown)}")
        return cls(float(d.get("linear", 0.0)),
                   tuple(tuple(map(float, h)) for h in d.get("harmonics", [])))


def combine(alpha: float, P: TrigPoly, beta: float, Q: TrigPoly) -> TrigPoly:
    return P.scale(alpha) + Q.scale(beta)


def _terms_product(P: TrigPoly, Q: TrigPoly) -> list[tuple[float, float, float]]:
    """Periodic part of P times periodic part of Q, as a list of harmonics."""
    out = []
    for w1, a1, b1 in P.harmonics:
        for w2, a2, b2 in Q.harmonics:
            d, s = w1 - w2, w1 + w2
            out.append((d, 0.5 * (a1 * a2 + b1 * b2), 0.5 * (b1 * a2 - a1 * b2)))
            out.append((s, 0.5 * (a1 * a2 - b1 * b2), 0.5 * (a1 * b2 + b1 * a2)))
    return out


def periodic_product(P: TrigPoly, Q: TrigPoly) -> TrigPoly:
    return TrigPoly(0.0, tuple(_terms_product(P, Q)))


def antiderivative(P: TrigPoly, t):
    """A primitive of P evaluated at t (the one vanishing at t = 0)."""
    t = np.asarray(t, dtype=float)
    out = 0.5 * P.linear * t * t
    for w, a, b in P.harmonics:
        if w == 0:
            out = out + a * t
        else:
            out = out + (a * np.sin(w * t) + b * (1.0 - np.cos(w * t))) / w
    return out


# -- roots of g(t) in 2 pi Z -------------------------------------------------

LATTICE_HIT_TOL = 1e-10
TANGENT_TOL = 1e-8


def lattice_distance(g):
    g = np.asarray(g, dtype=float)
    return np.abs(g - TWO_PI * np.round(g / TWO_PI))


def lattice_roots(P: TrigPoly, a: float, b: float, grid: int, closed: bool = False):
    """All t in [a, b] with P(t) in 2 pi Z, as arrays (t, m) with P(t) = 2 pi m.

    Sign changes of P - 2 pi m are bracketed on a uniform grid, bisected to
    float resolution and polished by a safeguarded Newton step.  ``closed``
    treats the domain as one period [a, b): a lattice hit at a counts once
    and one at b is dropped.  For an arc, lattice hits at either end raise
    :class:`EndpointHit`.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    ts = np.linspace(a, b, grid + 1)
    g = P(ts)
    dg = P.deriv(ts)
    touch = (lattice_distance(g) < TANGENT_TOL) & (np.abs(dg) < TANGENT_TOL)
    if touch.any():
        i = int(np.argmax(touch))
        raise NonTransverse("tangential lattice intersection", t=float(ts[i]))
    _tangencies_between(P, ts, dg)
    end_hit = lattice_distance([g[0], g[-1]]) < LATTICE_HIT_TOL
    if not closed and end_hit.any():
        raise EndpointHit("curve meets the lattice at a domain endpoint",
                          t=float(a if end_hit[0] else b))
    h = np.floor(g / TWO_PI).astype(np.int64)
    lo_i, m_list = [], []
    step = np.diff(h)
    for i in np.nonzero(step)[0]:
        s = int(step[i])
        ms = range(h[i] + 1, h[i + 1] + 1) if s > 0 else range(h[i + 1] + 1, h[i] + 1)
        for m in ms:
            lo_i.append(i)
            m_list.append(m)
    lo_i = np.array(lo_i, dtype=np.int64)
    m = np.array(m_list, dtype=np.int64)
    if m.size:
        t = _refine(P, ts[lo_i], ts[lo_i + 1], m)
    else:
        t = np.empty(0)
    if closed:
        # a single point of the closed curve: keep it at a, drop it near b
        if end_hit[0]:
            ma = int(np.round(g[0] / TWO_PI))
            drop = (m == ma) & (t <= ts[1])
            t = np.concatenate([[a], t[~drop]])
            m = np.concatenate([[ma], m[~drop]])
        if end_hit[1]:
            mb = int(np.round(g[-1] / TWO_PI))
            drop = (m == mb) & (t >= ts[-2])
            t, m = t[~drop], m[~drop]
    order = np.lexsort((m, t))
    t, m = t[order], m[order]
    keep = np.ones(t.size, dtype=bool)
    keep[1:] = ~((np.diff(t) < 1e-10) & (np.diff(m) == 0))
    return t[keep], m[keep]


def _tangencies_between(P: TrigPoly, ts, dg) -> None:
    """Raise NonTransverse if a critical point of P between grid points lies on 2 pi Z."""
    idx = np.nonzero(np.sign(dg[:-1]) * np.sign(dg[1:]) < 0)[0]
    if idx.size == 0:
        return
    lo, hi = ts[idx].copy(), ts[idx + 1].copy()
    slo = np.sign(dg[idx])
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        left = np.sign(P.deriv(mid)) == slo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    tc = 0.5 * (lo + hi)
    bad = lattice_distance(P(tc)) < TANGENT_TOL
    if bad.any():
        raise NonTransverse("tangential lattice intersection", t=float(tc[np.argmax(bad)]))


def _refine(P: TrigPoly, lo, hi, m):
    lo, hi = lo.copy(), hi.copy()
    target = TWO_PI * m
    flo = P(lo) - target
    fhi = P(hi) - target
    # floor(P / 2pi) and P - 2pi m can round differently when a root sits on
    # a grid point; then there is no sign change and the root is that endpoint
    snap = np.sign(flo) * np.sign(fhi) > 0
    at = np.where(np.abs(flo) <= np.abs(fhi), lo, hi)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fm = P(mid) - target
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(lo))):
            break
    t = np.where(snap, at, 0.5 * (lo + hi))
    for _ in range(2):
        d = P.deriv(t)
        nt = t - (P(t) - target) / np.where(d == 0, 1.0, d)
        t = np.where((nt >= lo) & (nt <= hi), nt, t)
    slope = np.abs(P.deriv(t))
    if (slope < TANGENT_TOL).any():
        i = int(np.argmin(slope))
        raise NonTransverse("tangential lattice intersection", t=float(t[i]))
    return t
