"""Command-line front end.

Every subcommand writes canonical files into ``--out`` (when given) and a
one-line JSON summary to stdout.  Errors are one JSON line on stderr with
exit status 2 (invalid input) or 3 (numerical hypothesis violated).
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import asymptotics as asy
from .errors import CSError, NumericalError, ValidationError
from .exactnum import (BRIESKORN_SCALE, brieskorn_moment_closed_form, gauss_moment_closed_form,
                       gauss_sum_bruteforce, is_prime)
from .families import (BrieskornSphere, LensSpace, TorusBundle, brieskorn_measure, brieskorn_turns,
                       lens_measure, random_monodromy, residue_measure, torus_bundle_measure)
from .measure import CircleMeasure, MomentTable, merge_atoms, serialize, symmetrize
from .prequantum import curve_from_json
from .svg import measure_svg

SUBCOMMANDS = ("lens", "brieskorn", "torus-bundle", "residue", "dehn", "poisson")


@dataclass
class RunConfig:
    subcommand: str
    p: int | None = None
    q: int | None = None
    primes: str | None = None
    matrix: str | None = None
    random: bool = False
    seed: int = 0
    moments: str = "0..10"
    curve: str | None = None
    family: str = "1,0,0,1"
    ell: int = 1
    ladder: str = "64:4096:x2"
    grid: int | None = None
    example: int | None = None
    K: int = 200
    endpoint_tail: bool = False
    out: str | None = None
    format: str = "json"
    svg: bool = False
    symmetrize: bool = False
    threads: int | None = None

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ValidationError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"unknown format {self.format!r}")
        need = {"lens": ("p", "q"), "residue": ("p",), "brieskorn": ("primes",),
                "dehn": ("curve",), "poisson": ("example",)}
        for name in need.get(self.subcommand, ()):
            if getattr(self, name) is None:
                raise ValidationError(f"{self.subcommand} needs --{name}")
        if self.subcommand == "torus-bundle" and (self.matrix is None) == (not self.random):
            raise ValidationError("torus-bundle needs exactly one of --matrix and --random")
        if self.threads is not None and self.threads < 1:
            raise ValidationError("--threads must be positive")
        if self.grid is not None and self.grid < 2**10:
            raise ValidationError("--grid must be at least 1024")


FIELD_NAMES = {f.name for f in fields(RunConfig)}


def parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"{what} must be comma-separated integers, got {text!r}") from None


def parse_range(text: str) -> list[int]:
    """``"a..b"`` inclusive, or a comma list."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ValidationError(f"bad range {text!r}") from None
        if hi < lo:
            raise ValidationError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return parse_int_list(text, "moments")


def parse_ladder(text: str) -> list[int]:
    """``"lo:hi:xF"`` (geometric), ``"lo:hi:+D"`` (arithmetic) or a comma list."""
    if ":" not in text:
        out = parse_int_list(text, "ladder")
    else:
        try:
            lo, hi, step = text.split(":")
            lo, hi = int(lo), int(hi)
            mult = step.startswith("x")
            inc = int(step[1:])
        except ValueError:
            raise ValidationError(f"bad ladder {text!r}") from None
        if lo < 1 or hi < lo or inc < (2 if mult else 1) or step[0] not in "x+":
            raise ValidationError(f"bad ladder {text!r}")
        out, n = [], lo
        while n <= hi:
            out.append(n)
            n = n * inc if mult else n + inc
    if any(n < 1 for n in out):
        raise ValidationError("ladder entries must be positive")
    return out


def resolve_threads(cfg: RunConfig) -> int:
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get("CS_SPECTRA_THREADS")
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ValidationError(f"CS_SPECTRA_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise ValidationError("CS_SPECTRA_THREADS must be positive")
    return n


# -- subcommand bodies: each returns (files, summary) -------------------------


def _measure_outputs(cfg: RunConfig, m: CircleMeasure, extra: dict | None = None):
    m = merge_atoms(m)
    if cfg.symmetrize:
        m = symmetrize(m)
    table = MomentTable.of_measure(m, parse_range(cfg.moments))
    files = {f"measure.{cfg.format}": serialize(m, cfg.format),
             "moments.csv": serialize(table, "csv")}
    if cfg.svg:
        files["histogram.svg"] = measure_svg(m)
    summary = {"label": m.label, "atoms": len(m), "mass": m.total_mass}
    summary.update(extra or {})
    return files, summary


def run_lens(cfg):
    return _measure_outputs(cfg, lens_measure(LensSpace(cfg.p, cfg.q)))


def run_residue(cfg):
    files, summary = _measure_outputs(cfg, residue_measure(cfg.p))
    if cfg.p > 2 and is_prime(cfg.p):
        t = MomentTable(label=f"mu_{cfg.p}")
        for ell in parse_range(cfg.moments):
            t[ell] = (gauss_moment_closed_form(ell, cfg.p), "closed-form")
        files["closed_form.csv"] = serialize(t, "csv")
    return files, summary


def run_brieskorn(cfg):
    ps = parse_int_list(cfg.primes, "primes")
    if len(ps) != 3:
        raise ValidationError("--primes needs three values")
    B = BrieskornSphere(*ps)
    files, summary = _measure_outputs(cfg, brieskorn_measure(B),
                                      {"triples": sum(brieskorn_turns(B).values())})
    p = B.order
    full = MomentTable(label=f"gauss[{p}]")
    closed = MomentTable(label=f"gauss[{p}]")
    for ell in parse_range(cfg.moments):
        full[ell] = (gauss_sum_bruteforce(ell, p, BRIESKORN_SCALE) / p, "exact-sum")
        if ell > 0 and 2 not in ps and all(ell % q for q in ps):
            closed[ell] = (brieskorn_moment_closed_form(ell, p), "closed-form")
    files["gauss.csv"] = serialize(full, "csv")
    if closed.ells():
        files["closed_form.csv"] = serialize(closed, "csv")
    return files, summary


def run_torus_bundle(cfg):
    if cfg.random:
        T = random_monodromy(random.Random(cfg.seed))
    else:
        vals = parse_int_list(cfg.matrix, "matrix")
        if len(vals) != 4:
            raise ValidationError("--matrix needs four entries a,b,c,d")
        T = TorusBundle.from_flat(*vals)
    return _measure_outputs(cfg, torus_bundle_measure(T), {"order": T.order})


def run_dehn(cfg):
    try:
        text = Path(cfg.curve).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read curve file: {exc.strerror}", path=cfg.curve) from None
    try:
        c = curve_from_json(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"curve file is not JSON: {exc.msg}", path=cfg.curve) from None
    fam_vals = parse_int_list(cfg.family, "family")
    if len(fam_vals) != 4:
        raise ValidationError("--family needs p,q,r,s")
    fam = asy.DehnFamily(*fam_vals)
    if cfg.ell < 0:
        raise ValidationError("--ell must be nonnegative")
    reports = asy.theorem_main_run(c, fam, cfg.ell, parse_ladder(cfg.ladder), cfg.grid,
                                   resolve_threads(cfg))
    fit, note = None, None
    if len(reports) >= 4:
        try:
            fit = asy.decay_fit(reports)
        except asy.DegenerateFit:
            note = "residuals at numerical floor"
    files = {"reports.csv": asy.reports_csv(reports), "reports.json": asy.reports_json(reports, fit)}
    summary = {"ell": cfg.ell, "ladder": [r.n for r in reports],
               "slope": None if fit is None else fit.slope,
               "r2": None if fit is None else fit.r2}
    if note:
        summary["note"] = note
    return files, summary


def run_poisson(cfg):
    if cfg.example not in asy.POISSON_EXAMPLES:
        raise ValidationError(f"unknown example {cfg.example}; choose from 1, 2, 3")
    f, g, a, b = asy.POISSON_EXAMPLES[cfg.example]
    r = asy.poisson_check(f, g, a, b, cfg.K, endpoint_tail=cfg.endpoint_tail)
    doc = {"example": cfg.example, "K": r.K, "lhs": r.lhs, "rhs": [r.rhs.real, r.rhs.imag],
           "gap": r.gap}
    if r.corrected_rhs is not None:
        doc["corrected_gap"] = r.corrected_gap
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    return {"poisson.json": text}, doc


RUNNERS = {"lens": run_lens, "residue": run_residue, "brieskorn": run_brieskorn,
           "torus-bundle": run_torus_bundle, "dehn": run_dehn, "poisson": run_poisson}


# -- argument handling ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cs-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    # defaults are None so a --config file can fill what the flags leave unset
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--out", help="directory for output files")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--svg", action="store_const", const=True)
    common.add_argument("--symmetrize", action="store_const", const=True)
    common.add_argument("--moments", help='"0..10" or a comma list')
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("lens", "residue"):
            sp.add_argument("--p", type=int)
        if name == "lens":
            sp.add_argument("--q", type=int)
        if name == "brieskorn":
            sp.add_argument("--primes", help="p1,p2,p3")
        if name == "torus-bundle":
            sp.add_argument("--matrix", help="a,b,c,d")
            sp.add_argument("--random", action="store_const", const=True)
        if name == "dehn":
            sp.add_argument("--curve", help="curve JSON file")
            sp.add_argument("--family", help="p,q,r,s")
            sp.add_argument("--ell", type=int)
            sp.add_argument("--ladder", help='"64:4096:x2" or a comma list')
            sp.add_argument("--grid", type=int)
        if name == "poisson":
            sp.add_argument("--example", type=int)
            sp.add_argument("--K", type=int)
            sp.add_argument("--endpoint-tail", dest="endpoint_tail", action="store_const",
                            const=True)
    return parser


def make_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    merged = {}
    if ns.get("config"):
        try:
            data = json.loads(Path(ns["config"]).read_text())
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc.strerror}", path=ns["config"]) from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not JSON: {exc.msg}", path=ns["config"]) from None
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        unknown = sorted(set(data) - FIELD_NAMES)
        if unknown:
            raise ValidationError(f"unknown config fields {unknown}", fields=unknown)
        if data.get("subcommand", ns["subcommand"]) != ns["subcommand"]:
            raise ValidationError("config subcommand does not match the command line")
        merged.update(data)
    merged.update({k: v for k, v in ns.items() if v is not None and k != "config"})
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


def run(cfg: RunConfig) -> dict:
    files, summary = RUNNERS[cfg.subcommand](cfg)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(files.items()):
            (out / name).write_text(text)
    summary = {"subcommand": cfg.subcommand, **summary, "files": sorted(files)}
    return summary


def main(argv=None) -> int:
    try:
        cfg = make_config(sys.argv[1:] if argv is None else argv)
        summary = run(cfg)
    except CSError as exc:
        status = 3 if isinstance(exc, NumericalError) else 2
        err = {"code": exc.code, "message": str(exc), "context": exc.context}
        print(json.dumps(err, sort_keys=True, default=str), file=sys.stderr)
        return status
    except ValueError as exc:
        err = {"code": "validation", "message": str(exc), "context": {}}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    print(json.dumps(summary, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
