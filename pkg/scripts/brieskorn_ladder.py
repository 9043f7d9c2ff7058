"""Brieskorn moments along a ladder of prime triples.

For each triple prints, per ell coprime to p = p1 p2 p3: sqrt(p) times the
full Gauss average over n < p, the three-case modulus, the exact truncation
identity check, and sqrt(p) times the moment of the measure over X(M).

    python3 scripts/brieskorn_ladder.py [--triples 3,5,7 7,11,13 13,31,37]
"""
import argparse
import math

from cs_spectra.exactnum import (BRIESKORN_SCALE, brieskorn_moment_closed_form,
                                 brieskorn_truncation_gap, gauss_sum_bruteforce)
from cs_spectra.families import BrieskornSphere, brieskorn_measure
from cs_spectra.measure import moment

DEFAULT = ["3,5,7", "7,11,13", "13,31,37", "31,41,43"]


def modulus_case(ell):
    return {0: 1.0, 2: 0.0}.get(ell % 4, 1 / math.sqrt(2))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--triples", nargs="+", default=DEFAULT)
    ap.add_argument("--ells", default="1,2,3,4,5")
    args = ap.parse_args()
    print("triple,p,ell,sqrt_p_full,casework,full_minus_closed_minus_gap,sqrt_p_xm")
    for triple in args.triples:
        ps = [int(v) for v in triple.split(",")]
        B = BrieskornSphere(*ps)
        p = B.order
        m = brieskorn_measure(B)
        for ell in (int(v) for v in args.ells.split(",")):
            if math.gcd(ell, p) != 1:
                continue
            full = gauss_sum_bruteforce(ell, p, BRIESKORN_SCALE) / p
            ident = abs(full - brieskorn_moment_closed_form(ell, p) - brieskorn_truncation_gap(ell, p))
            xm = moment(m, ell)
            print(f"{triple.replace(',', 'x')},{p},{ell},{math.sqrt(p) * abs(full):.6f},"
                  f"{modulus_case(ell):.6f},{ident:.2e},{math.sqrt(p) * abs(xm):.6f}")


if __name__ == "__main__":
    main()
