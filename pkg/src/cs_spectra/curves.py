"""Named Legendrian test curves used by the asymptotic experiments."""
from __future__ import annotations

from .measure import TWO_PI
from .prequantum import LegendrianCurve, lift_theta, standard_curve
from .trig import TrigPoly


def tilted_line() -> LegendrianCurve:
    """t -> (t, t): its filling sums are complete quadratic Gauss sums mod n + 1."""
    return standard_curve(1, 1)


def trig_loop() -> LegendrianCurve:
    """Closed Legendrian loop of class (0, 1); y has two horizontal tangents."""
    x = TrigPoly(0.0, ((2.0, 0.7, 0.0), (1.0, 0.0, 0.3)))
    y = TrigPoly(1.0, ((1.0, 0.0, 1.5),))
    return lift_theta(x, y, (0.0, TWO_PI), closed=True)


def avoiding_loop() -> LegendrianCurve:
    """Closed Legendrian loop of class (1, 0) with 0.1 <= y <= 0.9.

    No line y = pi k / ell with ell <= 3 is met.  The lift closes because
    the cosine amplitude of x times the sine amplitude of y is twice the
    mean of y.
    """
    x = TrigPoly(1.0, ((1.0, 2.5, 0.0),))
    y = TrigPoly(0.0, ((0.0, 0.5, 0.0), (1.0, 0.0, 0.4)))
    return lift_theta(x, y, (0.0, TWO_PI), closed=True)


NAMED = {"tilted-line": tilted_line, "trig-loop": trig_loop, "avoiding-loop": avoiding_loop}
