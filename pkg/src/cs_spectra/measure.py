"""Finite weighted atomic measures on the circle R/2piZ and their moments."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import NotProbability

TWO_PI = 2.0 * math.pi
TAU_MERGE = 1e-9
HIST_BINS = 64

PROVENANCES = ("exact-sum", "closed-form", "stationary-phase-prediction")


def wrap_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2 pi
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class CircleMeasure:
    """Atoms ``(theta, weight)`` with theta in [0, 2pi) and weight > 0.

    The atom tuple is canonicalized on construction (angles wrapped, sorted
    by angle then weight), so equal measures compare equal.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    label: str = ""

    def __post_init__(self):
        canon = []
        for theta, w in self.atoms:
            w = float(w)
            if not w > 0 or not math.isfinite(w):
                raise ValueError(f"atom weight must be positive and finite, got {w}")
            canon.append((wrap_angle(float(theta)), w))
        canon.sort()
        object.__setattr__(self, "atoms", tuple(canon))

    @classmethod
    def from_arrays(cls, thetas, weights, label: str = "") -> "CircleMeasure":
        return cls(tuple(zip(np.asarray(thetas, float).tolist(),
                             np.asarray(weights, float).tolist())), label)

    @classmethod
    def uniform_atoms(cls, thetas, label: str = "") -> "CircleMeasure":
        thetas = list(thetas)
        if not thetas:
            return cls((), label)
        w = 1.0 / len(thetas)
        return cls(tuple((t, w) for t in thetas), label)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms], dtype=float)

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass
class MomentTable:
    """Complex moments indexed by ell, each tagged with where it came from."""

    entries: dict[int, tuple[complex, str]] = field(default_factory=dict)
    label: str = ""

    def __setitem__(self, ell: int, item: tuple[complex, str]) -> None:
        value, prov = item
        if prov not in PROVENANCES:
            raise ValueError(f"unknown provenance {prov!r}")
        self.entries[int(ell)] = (complex(value), prov)

    def __getitem__(self, ell: int) -> complex:
        return self.entries[ell][0]

    def __contains__(self, ell: int) -> bool:
        return ell in self.entries

    def ells(self) -> list[int]:
        return sorted(self.entries)

    @classmethod
    def of_measure(cls, m: CircleMeasure, ells: Iterable[int]) -> "MomentTable":
        table = cls(label=m.label)
        for ell in ells:
            table[ell] = (moment(m, ell), "exact-sum")
        return table


def moment(m: CircleMeasure, ell: int) -> complex:
    """sum_j w_j exp(i ell theta_j), compensated, in canonical atom order."""
    if not m.atoms:
        return 0j
    th = m.thetas
    w = m.weights
    if ell == 0:
        return complex(math.fsum(w.tolist()), 0.0)
    ang = ell * th
    return complex(math.fsum((w * np.cos(ang)).tolist()),
                   math.fsum((w * np.sin(ang)).tolist()))


def fluctuation_moment(m: CircleMeasure, ell: int, scale: float) -> complex:
    """ell-th moment of scale * (m - uniform); the uniform part drops for ell >= 1."""
    if ell < 1:
        raise ValueError(f"fluctuation moments need ell >= 1, got {ell}")
    mass = m.total_mass
    if abs(mass - 1.0) > 1e-12:
        raise NotProbability(f"total mass {mass!r} != 1", mass=mass)
    return scale * moment(m, ell)


def reflect(m: CircleMeasure) -> CircleMeasure:
    """Pushforward by theta -> -theta."""
    return CircleMeasure(tuple((-t, w) for t, w in m.atoms), m.label)


def symmetrize(m: CircleMeasure) -> CircleMeasure:
    """Average of m and its reflection, merged exactly at coinciding atoms."""
    half = [(t, w / 2) for t, w in m.atoms] + [(-t, w / 2) for t, w in m.atoms]
    return merge_atoms(CircleMeasure(tuple(half), m.label), 0.0)


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def merge_atoms(m: CircleMeasure, tau: float = TAU_MERGE) -> CircleMeasure:
    """Merge chains of atoms within circular distance tau of each other.

    Each cluster collapses to its mass-weighted circular mean; the mean is
    taken on offsets from the cluster's first atom, which keeps full
    precision for the tiny clusters produced by root-finding noise.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    atoms = list(m.atoms)
    if len(atoms) < 2:
        return m
    clusters: list[list[tuple[float, float]]] = [[atoms[0]]]
    for a in atoms[1:]:
        if a[0] - clusters[-1][-1][0] <= tau:
            clusters[-1].append(a)
        else:
            clusters.append([a])
    if len(clusters) > 1 and _circ_dist(clusters[-1][-1][0], clusters[0][0][0]) <= tau:
        clusters[0] = clusters.pop() + clusters[0]
    out = []
    for cl in clusters:
        if len(cl) == 1:
            out.append(cl[0])
            continue
        ref = cl[0][0]
        mass = math.fsum(w for _, w in cl)
        offs = [((t - ref + math.pi) % TWO_PI) - math.pi for t, _ in cl]
        mean = ref + math.fsum(o * w for o, (_, w) in zip(offs, cl)) / mass
        out.append((mean, mass))
    return CircleMeasure(tuple(out), m.label)


def histogram(m: CircleMeasure, bins: int = HIST_BINS) -> np.ndarray:
    """Masses in ``bins`` equal left-closed bins over [0, 2pi)."""
    idx = np.minimum((m.thetas / TWO_PI * bins).astype(int), bins - 1)
    return np.bincount(idx, weights=m.weights, minlength=bins)


# -- serialization -------------------------------------------------------


def fmt_float(x: float) -> str:
    """17 significant digits, always with a decimal point or exponent."""
    s = f"{x:.17g}"
    if s in ("nan", "inf", "-inf"):
        raise ValueError(f"cannot serialize {s}")
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _measure_json(m: CircleMeasure) -> str:
    atoms = ",".join(f'{{"theta":{fmt_float(t)},"weight":{fmt_float(w)}}}'
                     for t, w in m.atoms)
    return f'{{"label":{json.dumps(m.label)},"atoms":[{atoms}]}}\n'


def _table_rows(t: MomentTable):
    for ell in t.ells():
        v, prov = t.entries[ell]
        yield ell, v, prov


def serialize(obj: CircleMeasure | MomentTable, fmt: str = "json") -> str:
    """Canonical byte-stable text; inverse of :func:`parse_measure` / :func:`parse_moment_table`."""
    if isinstance(obj, CircleMeasure):
        if fmt == "json":
            return _measure_json(obj)
        if fmt == "csv":
            lines = ["theta,weight"] + [f"{fmt_float(t)},{fmt_float(w)}" for t, w in obj.atoms]
            return "\n".join(lines) + "\n"
    elif isinstance(obj, MomentTable):
        if fmt == "json":
            rows = ",".join(
                f'{{"ell":{ell},"re":{fmt_float(v.real)},"im":{fmt_float(v.imag)},'
                f'"provenance":{json.dumps(prov)}}}' for ell, v, prov in _table_rows(obj))
            return f'{{"label":{json.dumps(obj.label)},"moments":[{rows}]}}\n'
        if fmt == "csv":
            lines = ["ell,re,im,provenance"] + [
                f"{ell},{fmt_float(v.real)},{fmt_float(v.imag)},{prov}"
                for ell, v, prov in _table_rows(obj)]
            return "\n".join(lines) + "\n"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    raise ValueError(f"unknown format {fmt!r}")


def parse_measure(text: str, fmt: str = "json", label: str = "") -> CircleMeasure:
    if fmt == "json":
        d = json.loads(text)
        return CircleMeasure(tuple((float(a["theta"]), float(a["weight"])) for a in d["atoms"]),
                             d.get("label", ""))
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        return CircleMeasure(tuple((float(r["theta"]), float(r["weight"])) for r in rows), label)
    raise ValueError(f"unknown format {fmt!r}")


def parse_moment_table(text: str, fmt: str = "csv", label: str = "") -> MomentTable:
    if fmt == "json":
        d = json.loads(text)
        rows: Iterable[Mapping] = d["moments"]
        label = d.get("label", label)
    elif fmt == "csv":
        rows = csv.DictReader(io.StringIO(text))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    t = MomentTable(label=label)
    for r in rows:
        t[int(r["ell"])] = (complex(float(r["re"]), float(r["im"])), r["provenance"])
    return t
