"""Chern-Simons phase distributions on the circle and their large-n asymptotics.

Modules: :mod:`exactnum` (number theory, Gauss sums), :mod:`measure`
(atomic circle measures), :mod:`families` (lens spaces, Brieskorn spheres,
torus bundles), :mod:`prequantum` (Legendrian curves in the prequantum
bundle over the torus), :mod:`asymptotics` (Poisson check, stationary-phase
predictor, decay fits) and :mod:`cli`.
"""
from .measure import CircleMeasure, MomentTable, moment

__all__ = ["CircleMeasure", "MomentTable", "moment"]
