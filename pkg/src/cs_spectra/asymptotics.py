"""Poisson-summation checks, the stationary-phase moment predictor and decay fits."""
from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (DegenerateFit, EndpointHit, NonMonotonicUndetected, NonTransverse,
                     NonTransverseToLine, ValidationError)
from .measure import TWO_PI, fmt_float
from .prequantum import BohrSommerfeldSection, LegendrianCurve, bs_phase, exact_moment
from .trig import TrigPoly, lattice_distance, lattice_roots

# The unit factor of a nondegenerate one-dimensional stationary point, and
# the power of ell it comes with (the phase there has second derivative
# proportional to ell).  Calibrated once by scripts/calibrate_predictor.py.
STATIONARY_PHASE_UNIT = cmath.exp(1j * math.pi / 4)
CORRECTION_ELL_POWER = -0.5

CROSSING_GRID = 2**14
FIT_FLOOR = 1e-13


def predictor_correction(ell: int) -> complex:
    return STATIONARY_PHASE_UNIT * ell ** CORRECTION_ELL_POWER


# -- Poisson formula -----------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True)
class PoissonResult:
    lhs: float
    rhs: complex
    gap: float
    K: int
    corrected_rhs: complex | None = None

    @property
    def corrected_gap(self) -> float | None:
        return None if self.corrected_rhs is None else abs(self.lhs - self.corrected_rhs)


def monotone_segments(f: TrigPoly, a: float, b: float, grid: int = 2**14) -> list[float]:
    """Breakpoints a = s_0 < ... < s_r = b with f monotone on each piece.

    Interior breakpoints are the sign changes of f'.  A grid point where
    |f'| nearly vanishes without a sign change nearby would be a missed
    turning point and raises :class:`NonMonotonicUndetected`.
    """
    ts = np.linspace(a, b, grid + 1)
    d = f.deriv(ts)
    sgn = np.sign(d)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    brk = [a]
    for i in flips:
        brk.append(optimize.brentq(lambda s: float(f.deriv(s)), ts[i], ts[i + 1], xtol=1e-15))
    brk.append(b)
    near = np.abs(d) < 1e-9
    if near.any():
        covered = np.zeros_like(near)
        for i in flips:
            covered[max(i - 1, 0):i + 3] = True
        if (near & ~covered).any():
            i = int(np.argmax(near & ~covered))
            raise NonMonotonicUndetected("f' vanishes without changing sign", t=float(ts[i]))
    return brk


def _segment_integrals(f: TrigPoly, g: TrigPoly, lo: float, hi: float, K: int,
                       panels: int) -> np.ndarray:
    """I_k = int_lo^hi e^{-ikf} |f'| g dt for k = 0..K by composite Gauss-Legendre."""
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    t = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half[:, None] * _GL_NODES[None, :]
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    t = t.ravel()
    amp = w * np.abs(f.deriv(t)) * g(t)
    ft = f(t)
    out = np.empty(K + 1, dtype=complex)
    for k0 in range(0, K + 1, 32):
        ks = np.arange(k0, min(k0 + 32, K + 1))
        out[ks] = np.exp(-1j * np.multiply.outer(ks, ft)) @ amp
    return out


def _bernoulli(j: int, x):
    if j == 1:
        return x - 0.5
    if j == 2:
        return x * x - x + 1 / 6
    if j == 3:
        return x ** 3 - 1.5 * x * x + 0.5 * x
    raise ValueError(j)


def _tail(phi: float, K: int, j: int) -> complex:
    """sum_{|k| > K} e^{-ik phi} / (-ik)^j, from the Bernoulli Fourier series."""
    x = (-phi / TWO_PI) % 1.0
    full = -((-TWO_PI) ** j) * _bernoulli(j, x) / math.factorial(j)
    ks = np.arange(1, K + 1)
    part = np.sum(np.exp(-1j * ks * phi) / (-1j * ks) ** j + np.exp(1j * ks * phi) / (1j * ks) ** j)
    return full - part


def _endpoint_tail(f: TrigPoly, g: TrigPoly, a: float, b: float, K: int) -> complex:
    """Leading terms of sum_{|k|>K} I_k from repeated integration by parts (f' != 0 on [a, b])."""
    total = 0j
    sigma = 1.0 if float(f.deriv(0.5 * (a + b))) > 0 else -1.0
    for end, sign in ((b, 1.0), (a, -1.0)):
        d1, d2 = float(f.deriv(end)), float(f.deriv(end, 2))
        g0, g1, g2 = float(g(end)), float(g.deriv(end)), float(g.deriv(end, 2))
        h = [g0, g1 / d1, (g2 / d1 - g1 * d2 / d1 ** 2) / d1]
        phi = float(f(end))
        for j in (1, 2, 3):
            total += sign * (-1) ** (j - 1) * h[j - 1] * _tail(phi, K, j)
    return sigma * total


def poisson_check(f: TrigPoly, g: TrigPoly, a: float, b: float, K: int,
                  grid: int = 2**14, endpoint_tail: bool = False) -> PoissonResult:
    """Compare sum_{f(t) in 2piZ} g(t) with (1/2pi) sum_{|k|<=K} int e^{-ikf} |f'| g.

    Each monotone piece is integrated by composite 32-point Gauss-Legendre,
    doubling the panel count until the k-integrals settle to 1e-12 relative.  With
    ``endpoint_tail`` the analytic endpoint contribution of the omitted
    |k| > K terms is also reported (only for f' without zeros).
    """
    if K < 0:
        raise ValidationError("K must be nonnegative")
    fa, fb = float(f(a)), float(f(b))
    if (lattice_distance([fa, fb]) < 1e-10).any():
        raise EndpointHit("f(a) or f(b) lies in 2 pi Z", a=a, b=b)
    t, _ = lattice_roots(f, a, b, grid)
    lhs = math.fsum(g(t).tolist())
    brk = monotone_segments(f, a, b, grid)
    Ik = np.zeros(K + 1, dtype=complex)
    for lo, hi in zip(brk[:-1], brk[1:]):
        span = float(np.max(np.abs(f.deriv(np.linspace(lo, hi, 257))))) * (hi - lo)
        # about four oscillations of the top frequency per 32-point panel
        panels = max(4, int(math.ceil((K + 1) * span / (8 * math.pi))))
        prev = _segment_integrals(f, g, lo, hi, K, panels)
        for _ in range(4):
            panels *= 2
            cur = _segment_integrals(f, g, lo, hi, K, panels)
            done = np.max(np.abs(cur - prev)) < 1e-12 * max(1.0, float(np.max(np.abs(cur))))
            prev = cur
            if done:
                break
        Ik += prev
    rhs = complex((Ik[0] + 2 * np.sum(Ik[1:].real)) / TWO_PI)
    corrected = None
    if endpoint_tail:
        if len(brk) > 2:
            raise ValidationError("endpoint tail needs f' without zeros on [a, b]")
        corrected = rhs + _endpoint_tail(f, g, a, b, K) / TWO_PI
    return PoissonResult(lhs, rhs, abs(lhs - rhs), K, corrected)


POISSON_EXAMPLES = {
    1: (TrigPoly(1.0), TrigPoly.const(1.0), 0.1, TWO_PI + 0.1),
    2: (TrigPoly(2.0), TrigPoly.const(1.0), 0.1, TWO_PI + 0.05),
    3: (TrigPoly(1.0, ((1.0, 0.0, 0.3),)), TrigPoly(0.0, ((1.0, 1.0, 0.0),)), 0.1, 6.0),
}


# -- stationary-phase predictor ------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    t: float
    k: int
    contribution: complex


def line_crossings(c: LegendrianCurve, ell: int, grid: int = CROSSING_GRID):
    """Parameters t with y(t) = pi k / ell, as arrays (t, k)."""
    try:
        t, k = lattice_roots(c.y.scale(2 * ell), c.a, c.b, grid, closed=c.closed)
    except NonTransverse as exc:
        raise NonTransverseToLine("curve is tangent to a line y = pi k / ell",
                                  ell=ell, **exc.context) from None
    if t.size and np.min(np.abs(c.y.deriv(t))) < 1e-8:
        i = int(np.argmin(np.abs(c.y.deriv(t))))
        raise NonTransverseToLine("curve is tangent to a line y = pi k / ell",
                                  ell=ell, t=float(t[i]))
    return t, k


def predicted_moment(c: LegendrianCurve, n: int, ell: int,
                     correction: complex | None = None) -> tuple[complex, list[Crossing]]:
    """(1/sqrt(2n)) sum over crossings of correction * exp(-i n pi k^2 / 2 ell + i bs_phase).

    The integer n k^2 is reduced mod 4 ell before exponentiating, which is
    the same as reducing k mod 2 ell.
    """
    if ell < 1:
        raise ValidationError(f"ell must be positive, got {ell}")
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    corr = predictor_correction(ell) if correction is None else correction
    t, k = line_crossings(c, ell)
    pref = corr / math.sqrt(2 * n)
    out = []
    for tt, kk in zip(t.tolist(), k.tolist()):
        ph = -TWO_PI * ((n * kk * kk) % (4 * ell)) / (4 * ell)
        ph += bs_phase(c, tt, BohrSommerfeldSection(kk, ell))
        out.append(Crossing(tt, kk, pref * cmath.exp(1j * ph)))
    re = math.fsum(x.contribution.real for x in out)
    im = math.fsum(x.contribution.imag for x in out)
    return complex(re, im), out


def predicted_moment_zero(c: LegendrianCurve) -> float:
    """(1/2pi) int_a^b |y'| dt, summed exactly between the zeros of y'."""
    ts = np.linspace(c.a, c.b, CROSSING_GRID + 1)
    d = c.y.deriv(ts)
    if np.max(np.abs(d)) == 0.0:
        return 0.0
    pts = [c.a]
    for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
        pts.append(optimize.brentq(lambda s: float(c.y.deriv(s)), ts[i], ts[i + 1], xtol=1e-15))
    pts.append(c.b)
    ys = c.y(np.array(pts))
    return math.fsum(np.abs(np.diff(ys)).tolist()) / TWO_PI


def folded_contributions(crossings: list[Crossing], ell: int) -> dict[int, complex]:
    """Contributions grouped by kbar = min(k mod 2l, 2l - k mod 2l) in 0..ell."""
    out: dict[int, complex] = {}
    for x in crossings:
        r = x.k % (2 * ell)
        kbar = min(r, 2 * ell - r)
        out[kbar] = out.get(kbar, 0j) + x.contribution
    return dict(sorted(out.items()))


# -- Dehn filling families -------------------------------------------------------


@dataclass(frozen=True)
class DehnFamily:
    """Base slope p/q with Bezout complement r/s; member n has slope (pn - r)/(qn - s)."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise ValidationError(f"p s - q r != 1 for {(self.p, self.q, self.r, self.s)}")

    def slope(self, n: int) -> tuple[int, int]:
        return self.p * n - self.r, self.q * n - self.s

    def matrix(self, n: int):
        """A_n = [[p_n, p], [q_n, q]]."""
        pn, qn = self.slope(n)
        return ((pn, self.p), (qn, self.q))

    @property
    def normalizer(self):
        """Inverse of [[p, r], [q, s]], which sends the family to x + n y in 2 pi Z."""
        return ((self.s, -self.r), (-self.q, self.p))


@dataclass
class PredictionReport:
    n: int
    ell: int
    exact: complex
    predicted: complex
    crossings: list[Crossing] = field(default_factory=list)

    @property
    def residual(self) -> float:
        return abs(self.exact - self.predicted)

    def to_dict(self) -> dict:
        return {"n": self.n, "ell": self.ell,
                "exact": [self.exact.real, self.exact.imag],
                "predicted": [self.predicted.real, self.predicted.imag],
                "residual": self.residual,
                "crossings": [{"t": x.t, "k": x.k, "re": x.contribution.real,
                               "im": x.contribution.imag} for x in self.crossings]}


def _one_report(c: LegendrianCurve, n: int, ell: int, grid: int | None) -> PredictionReport:
    exact = exact_moment(c, n, ell, grid)
    if ell == 0:
        return PredictionReport(n, 0, exact, complex(predicted_moment_zero(c)))
    value, crossings = predicted_moment(c, n, ell)
    return PredictionReport(n, ell, exact, value, crossings)


def theorem_main_run(c: LegendrianCurve, fam: DehnFamily, ell: int, ladder,
                     grid: int | None = None, threads: int = 1) -> list[PredictionReport]:
    """Exact versus predicted moments over an n-ladder, in normalized coordinates."""
    if ell < 0:
        raise ValidationError(f"ell must be nonnegative, got {ell}")
    ladder = [int(n) for n in ladder]
    cn = c.transported(fam.normalizer)
    if threads <= 1:
        return [_one_report(cn, n, ell, grid) for n in ladder]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda n: _one_report(cn, n, ell, grid), ladder))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    r2: float


def decay_fit(reports) -> DecayFit:
    """Least-squares slope of log(residual) against log(n)."""
    ns = np.array([r.n for r in reports], dtype=float)
    res = np.array([r.residual for r in reports], dtype=float)
    if len(set(ns.tolist())) < 4:
        raise ValidationError("decay fit needs at least four distinct n")
    if np.min(res) < FIT_FLOOR:
        raise DegenerateFit("residuals at the numerical floor", floor=FIT_FLOOR,
                            min_residual=float(np.min(res)))
    x, y = np.log(ns), np.log(res)
    slope, icpt = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + icpt)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return DecayFit(float(slope), 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0)


REPORT_CSV_HEADER = "n,ell,exact_re,exact_im,pred_re,pred_im,residual"


def reports_csv(reports) -> str:
    rows = [REPORT_CSV_HEADER]
    for r in reports:
        rows.append(",".join([str(r.n), str(r.ell), fmt_float(r.exact.real), fmt_float(r.exact.imag),
                              fmt_float(r.predicted.real), fmt_float(r.predicted.imag),
                              fmt_float(r.residual)]))
    return "\n".join(rows) + "\n"


def reports_json(reports, fit: DecayFit | None = None) -> str:
    out = []
    for r in reports:
        d = r.to_dict()
        if r.ell > 0:
            d["folded"] = [{"kbar": kb, "re": v.real, "im": v.imag}
                           for kb, v in folded_contributions(r.crossings, r.ell).items()]
        out.append(d)
    doc = {"reports": out}
    if fit is not None:
        doc["fit"] = {"slope": fit.slope, "r2": fit.r2}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
