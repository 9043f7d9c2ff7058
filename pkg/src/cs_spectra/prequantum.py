"""The prequantum circle bundle over the torus and its Legendrian curves.

The bundle is R^2 x R/2piZ with connection form
``dtheta + (x dy - y dx) / 2pi`` divided by the Z^2 action
``(m, n).(x, y, theta) = (x + 2pi m, y + 2pi n, theta + m y - n x)``.
Curves are stored upstairs on R^2 and carry their lifted phase theta(t).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import NotCoprime, NotImmersed, NotUnimodular, OffLine, ValidationError
from .exactnum import bezout_complement
from .measure import TWO_PI, CircleMeasure, fmt_float, wrap_angle
from .trig import TrigPoly, antiderivative, combine, lattice_distance, lattice_roots, periodic_product

IMMERSION_GRID = 2**14
MIN_GRID = 2**10
BASE_GRID = 2**14


@dataclass(frozen=True)
class BundlePoint:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


def deck_action(m: int, n: int, pt: BundlePoint) -> BundlePoint:
    return BundlePoint(pt.x + TWO_PI * m, pt.y + TWO_PI * n, pt.theta + m * pt.y - n * pt.x)


def _check_unimodular(B) -> tuple[tuple[int, int], tuple[int, int]]:
    B = tuple(tuple(int(v) for v in row) for row in B)
    if B[0][0] * B[1][1] - B[0][1] * B[1][0] != 1:
        raise NotUnimodular(f"det != 1 for {B}", B=B)
    return B


def sl2_transport(B, pt: BundlePoint) -> BundlePoint:
    """(x, y) -> B (x, y) with theta unchanged."""
    B = _check_unimodular(B)
    return BundlePoint(B[0][0] * pt.x + B[0][1] * pt.y, B[1][0] * pt.x + B[1][1] * pt.y, pt.theta)


@dataclass(frozen=True)
class SlopeMatrix:
    """A = [[p, r], [q, s]] with p s - q r = 1: slope p/q and a Bezout complement r/s."""

    p: int
    r: int
    q: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise NotUnimodular(f"p s - q r != 1 for {self.matrix}", A=self.matrix)

    @classmethod
    def for_slope(cls, p: int, q: int) -> "SlopeMatrix":
        r, s = bezout_complement(p, q)
        return cls(p, r, q, s)

    @property
    def matrix(self):
        return ((self.p, self.r), (self.q, self.s))

    @property
    def inverse(self):
        return ((self.s, -self.r), (-self.q, self.p))


def f_correction(A: SlopeMatrix, x, y):
    """F_A(x, y) = (s x - r y)(q x - p y) / 2pi."""
    return (A.s * x - A.r * y) * (A.q * x - A.p * y) / TWO_PI


@dataclass(frozen=True)
class BohrSommerfeldSection:
    """Flat section t -> (t, pi k / ell, k t / 2) of the ell-th power over y = pi k / ell.

    ``k`` is kept as the integer of the upstairs line; ``residue`` is its
    class mod 2 ell.
    """

    k: int
    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise ValidationError(f"ell must be positive, got {self.ell}")

    @property
    def residue(self) -> int:
        return self.k % (2 * self.ell)

    @property
    def height(self) -> float:
        return math.pi * self.k / self.ell

    def point(self, t):
        return t, self.height, self.k * t / 2

    def connection_defect(self, t):
        """Level-ell connection form evaluated on the section's tangent vector (zero)."""
        x, y, _ = self.point(t)
        return self.k / 2 + self.ell / TWO_PI * (x * 0.0 - y * 1.0)


# -- Legendrian curves -------------------------------------------------------


@dataclass(frozen=True)
class LegendrianCurve:
    """Curve t -> (x(t), y(t), theta(t)) on [a, b] with theta' = -(x y' - y x') / 2pi.

    ``closed`` marks a loop on the torus parametrized over one period [a, b).
    ``method`` selects the exact primitive (``"closed-form"``) or adaptive
    quadrature (``"quadrature"``) for theta.
    """

    x: TrigPoly
    y: TrigPoly
    domain: tuple[float, float]
    theta0: float = 0.0
    closed: bool = False
    method: str = "closed-form"
    _area: TrigPoly = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = map(float, self.domain)
        if not b > a:
            raise ValidationError(f"empty domain {self.domain}")
        object.__setattr__(self, "domain", (a, b))
        if self.method not in ("closed-form", "quadrature"):
            raise ValidationError(f"unknown lift method {self.method!r}")
        X, Y = self.x.periodic_part(), self.y.periodic_part()
        object.__setattr__(self, "_area", periodic_product(X, Y.derivative())
                           + periodic_product(Y, X.derivative()).scale(-1.0))
        if self.closed:
            dx = float(self.x(b) - self.x(a))
            dy = float(self.y(b) - self.y(a))
            if max(lattice_distance([dx, dy])) > 1e-9:
                raise ValidationError("closed curve must return to its start on the torus",
                                      dx=dx, dy=dy)

    @property
    def a(self) -> float:
        return self.domain[0]

    @property
    def b(self) -> float:
        return self.domain[1]

    def symplectic_integrand(self, t):
        """x y' - y x'."""
        return self.x(t) * self.y.deriv(t) - self.y(t) * self.x.deriv(t)

    def _primitive(self, t):
        cx, cy = self.x.linear, self.y.linear
        X, Y = self.x.periodic_part(), self.y.periodic_part()
        return (cx * t * Y(t) - cy * t * X(t) - 2 * cx * antiderivative(Y, t)
                + 2 * cy * antiderivative(X, t) + antiderivative(self._area, t))

    def theta(self, t, method: str | None = None):
        method = method or self.method
        t = np.asarray(t, dtype=float)
        if method == "closed-form":
            integral = self._primitive(t) - self._primitive(np.float64(self.a))
        elif method == "quadrature":
            f = lambda s: float(self.symplectic_integrand(s))
            vals = [integrate.quad(f, self.a, float(u), epsabs=1e-12, epsrel=1e-13, limit=500)[0]
                    for u in np.atleast_1d(t)]
            integral = np.array(vals).reshape(t.shape)
        else:
            raise ValidationError(f"unknown lift method {method!r}")
        return self.theta0 - integral / TWO_PI

    def __call__(self, t):
        return self.x(t), self.y(t), self.theta(t)

    def point(self, t: float) -> BundlePoint:
        return BundlePoint(float(self.x(t)), float(self.y(t)), float(self.theta(t)))

    def transported(self, B) -> "LegendrianCurve":
        """Image under (x, y) -> B (x, y); the lifted phase is unchanged since det B = 1."""
        B = _check_unimodular(B)
        return LegendrianCurve(combine(B[0][0], self.x, B[0][1], self.y),
                               combine(B[1][0], self.x, B[1][1], self.y),
                               self.domain, self.theta0, self.closed, self.method)

    def reparametrized(self, alpha: float, beta: float) -> "LegendrianCurve":
        """Same image traced as s -> c(alpha s + beta), alpha > 0."""
        if alpha <= 0:
            raise ValidationError("reparametrization must preserve orientation")
        a, b = ((u - beta) / alpha for u in self.domain)
        theta0 = float(self.theta(self.a))
        return LegendrianCurve(self.x.reparametrize(alpha, beta), self.y.reparametrize(alpha, beta),
                               (a, b), theta0, self.closed, self.method)

    def to_dict(self) -> dict:
        return {"domain": list(self.domain), "x": self.x.to_dict(), "y": self.y.to_dict(),
                "theta0": self.theta0, "closed": self.closed}


def lift_theta(x: TrigPoly, y: TrigPoly, domain, theta0: float = 0.0, closed: bool = False,
               method: str = "closed-form") -> LegendrianCurve:
    """Legendrian lift of the planar curve (x, y), after checking it is immersed."""
    ts = np.linspace(domain[0], domain[1], IMMERSION_GRID)
    speed2 = x.deriv(ts) ** 2 + y.deriv(ts) ** 2
    if speed2.min() < 1e-18:
        raise NotImmersed("x' and y' vanish together", t=float(ts[np.argmin(speed2)]))
    return LegendrianCurve(x, y, tuple(domain), theta0, closed, method)


def standard_curve(p: int, q: int) -> LegendrianCurve:
    """t -> (p t, q t, 0) on one period [0, 2pi)."""
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1", p=p, q=q)
    return LegendrianCurve(TrigPoly(p), TrigPoly(q), (0.0, TWO_PI), 0.0, closed=True)


def lift_agreement(c: LegendrianCurve, ts) -> float:
    """Max |closed-form theta - quadrature theta| over the given times."""
    return float(np.max(np.abs(c.theta(ts, "closed-form") - c.theta(ts, "quadrature"))))


def curve_to_json(c: LegendrianCurve) -> str:
    def poly(P: TrigPoly) -> str:
        hs = ",".join("[" + ",".join(fmt_float(v) for v in h) + "]" for h in P.harmonics)
        return f'{{"linear":{fmt_float(P.linear)},"harmonics":[{hs}]}}'
    return (f'{{"domain":[{fmt_float(c.a)},{fmt_float(c.b)}],"x":{poly(c.x)},"y":{poly(c.y)},'
            f'"theta0":{fmt_float(c.theta0)},"closed":{json.dumps(c.closed)}}}\n')


def curve_from_json(text: str | dict) -> LegendrianCurve:
    d = json.loads(text) if isinstance(text, str) else text
    unknown = set(d) - {"domain", "x", "y", "theta0", "closed"}
    if unknown:
        raise ValidationError(f"unknown curve fields {sorted(unknown)}")
    try:
        x, y = TrigPoly.from_dict(d["x"]), TrigPoly.from_dict(d["y"])
        domain = tuple(float(v) for v in d["domain"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed curve data: {exc}") from None
    if len(domain) != 2:
        raise ValidationError("domain must be [a, b]")
    return lift_theta(x, y, domain, float(d.get("theta0", 0.0)), bool(d.get("closed", False)))


# -- intersections and phase measures ------------------------------------------


def default_grid(frequency: float) -> int:
    """Bracketing grid: 2^14 points, scaled up once the lattice condition oscillates faster."""
    return int(BASE_GRID * max(1.0, abs(frequency) / 64))


def _roots(c: LegendrianCurve, alpha: float, beta: float, grid: int | None, freq: float):
    grid = default_grid(freq) if grid is None else grid
    if grid < MIN_GRID:
        raise ValidationError(f"grid must be at least {MIN_GRID}, got {grid}")
    g = combine(alpha, c.x, beta, c.y)
    return lattice_roots(g, c.a, c.b, grid, closed=c.closed)


def intersect(c: LegendrianCurve, p: int, q: int, grid: int | None = None) -> list[tuple[float, int]]:
    """Parameters t with q x(t) - p y(t) = 2 pi m, as (t, m) pairs."""
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1", p=p, q=q)
    t, m = _roots(c, q, -p, grid, abs(p) + abs(q))
    return [(float(u), int(k)) for u, k in zip(t, m)]


def phase_measure(c: LegendrianCurve, A: SlopeMatrix, grid: int | None = None,
                  convention: str = "literal") -> CircleMeasure:
    """Unit atoms at the phase offsets between c and the curve of slope p/q.

    ``"literal"`` places them at theta - F_A(x, y); ``"flat"`` at
    theta + F_A(x, y), the sign compatible with the connection form (it is
    the one the normalized moment formula of :func:`exact_moment` uses).
    At a root q x - p y = 2 pi m, so F_A is evaluated as (s x - r y) m.
    """
    if convention not in ("literal", "flat"):
        raise ValidationError(f"unknown convention {convention!r}")
    t, m = _roots(c, A.q, -A.p, grid, abs(A.p) + abs(A.q))
    if t.size == 0:
        return CircleMeasure((), "phase")
    F = (A.s * c.x(t) - A.r * c.y(t)) * m
    th = c.theta(t)
    phase = th - F if convention == "literal" else th + F
    return CircleMeasure(tuple((float(v), 1.0) for v in phase), f"phase[{A.p}/{A.q}]")


def _fsum_exp(phase) -> complex:
    phase = np.asarray(phase, dtype=float)
    return complex(math.fsum(np.cos(phase).tolist()), math.fsum(np.sin(phase).tolist()))


def exact_moment(c: LegendrianCurve, n: int, ell: int, grid: int | None = None) -> complex:
    """(1/n) sum over x + n y in 2 pi Z of exp(i ell (theta + y (x + n y) / 2pi)).

    The curve must already be in normalized coordinates (filling family
    x + n y).  At a root (x + n y) / 2pi is the integer m, which is used
    directly.
    """
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    t, m = _roots(c, 1.0, float(n), grid, n)
    if ell == 0:
        return complex(t.size / n, 0.0)
    return _fsum_exp(ell * (c.theta(t) + m * c.y(t))) / n


def bs_phase(c: LegendrianCurve, t: float, bs: BohrSommerfeldSection) -> float:
    """ell theta(t) - k x(t) / 2 mod 2pi, the phase of c against the section at a crossing."""
    y = float(c.y(t))
    if abs(y - bs.height) >= 1e-9:
        raise OffLine(f"y(t) = {y!r} is not on the line y = pi {bs.k}/{bs.ell}", t=t)
    return wrap_angle(bs.ell * float(c.theta(t)) - bs.k * float(c.x(t)) / 2)


def holonomy_defect(c: LegendrianCurve) -> float:
    """Failure of a closed curve's lift to close up, in (-pi, pi].

    The translation by (2 pi m, 2 pi n) that preserves the connection form
    shifts theta by n x - m y (the opposite sign to :func:`deck_action`);
    the defect compares theta(b) with the translate of theta(a).
    """
    if not c.closed:
        raise ValidationError("holonomy defect is defined for closed curves only")
    m = round(float(c.x(c.b) - c.x(c.a)) / TWO_PI)
    n = round(float(c.y(c.b) - c.y(c.a)) / TWO_PI)
    xa, ya = float(c.x(c.a)), float(c.y(c.a))
    d = float(c.theta(c.b)) - (float(c.theta(c.a)) + n * xa - m * ya)
    return math.pi - wrap_angle(math.pi - d)
