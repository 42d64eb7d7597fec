"""Brute-force reference implementations used to check the optimized code.

Nothing here imports from ``alice``: the oracles work on plain paths, pin
counts and resource numbers so that a shared bug cannot hide on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

# Hand-counted resources of the toy GCD fixture, one row per instance:
# module, pins (sum of port widths), LUTs, FFs, affects `result`.
#
#   gcd_ctrl   11 pins  22 LUT  2 FF   two 3-way cases (2 state bits, 5 output bits),
#                                      two 2-bit ifs, a 2-bit ternary, a 2-bit compare
#   mux3       34       16      0      two 8-bit 2:1 muxes
#   mux2       25       8       0      8-bit 2:1 mux
#   dff_en_rst 19       16      8      sync reset + enable: two 8-bit muxes
#   sub8       25       9       0      9-bit subtract
#   lt8        17       8       0      8-bit compare
#   zero8       9       3       0      8-input NOR reduction, ceil(7/3)
#   busy_led    5       2       1      two 1-bit muxes (async reset is free)
#   gcd_dp     33       76      16     sum of its seven children
TOY_GCD = {
    "gcd_top.u_ctrl": ("gcd_ctrl", 11, 22, 2, True),
    "gcd_top.u_dp": ("gcd_dp", 33, 76, 16, True),
    "gcd_top.u_dp.u_mux_a": ("mux3", 34, 16, 0, True),
    "gcd_top.u_dp.u_mux_b": ("mux2", 25, 8, 0, True),
    "gcd_top.u_dp.u_reg_a": ("dff_en_rst", 19, 16, 8, True),
    "gcd_top.u_dp.u_reg_b": ("dff_en_rst", 19, 16, 8, True),
    "gcd_top.u_dp.u_sub": ("sub8", 25, 9, 0, True),
    "gcd_top.u_dp.u_cmp": ("lt8", 17, 8, 0, True),
    "gcd_top.u_dp.u_zero": ("zero8", 9, 3, 0, True),
    "gcd_top.u_status": ("busy_led", 5, 2, 1, False),
}


def related(a: str, b: str) -> bool:
    return a == b or a.startswith(b + ".") or b.startswith(a + ".")


def brute_clusters(pins: dict[str, int], max_io: int) -> set[frozenset[str]]:
    """Every non-empty subset of ``pins`` that is hierarchy-independent and fits ``max_io``."""
    paths = sorted(pins)
    out = set()
    for size in range(1, len(paths) + 1):
        for group in combinations(paths, size):
            if sum(pins[p] for p in group) > max_io:
                continue
            if any(related(a, b) for a, b in combinations(group, 2)):
                continue
            out.add(frozenset(group))
    return out


def scan_width(io: int, luts: int, ffs: int, w_min: int, w_max: int, per_side: int = 16) -> int | None:
    """Smallest width by trying every candidate in turn."""
    for w in range(w_min, w_max + 1):
        if per_side * w >= io and 4 * w * w >= max(luts, ffs):
            return w
    return None


@dataclass(frozen=True)
class OFabric:
    members: frozenset[str]
    w: int
    io_used: int
    clb_used: int

    @property
    def key(self) -> str:
        return "+".join(sorted(self.members))

    @property
    def io_util(self) -> Fraction:
        return Fraction(self.io_used, 16 * self.w)

    @property
    def clb_util(self) -> Fraction:
        return Fraction(self.clb_used, self.w * self.w)


def oracle_scores(fabrics: list[OFabric], alpha=1, beta=1) -> dict[str, Fraction]:
    io_max = max(f.io_util for f in fabrics)
    clb_max = max(f.clb_util for f in fabrics)
    a, b = Fraction(alpha), Fraction(beta)
    return {
        f.key: a * (io_max - f.io_util) / io_max + b * (clb_max - f.clb_util) / clb_max
        for f in fabrics
    }


def naive_solutions(fabrics: list[OFabric], max_efpgas: int) -> list[tuple[OFabric, ...]]:
    out = []
    for size in range(1, max_efpgas + 1):
        for combo in combinations(fabrics, size):
            members = [m for f in combo for m in f.members]
            if any(related(a, b) for a, b in combinations(members, 2)):
                continue
            out.append(combo)
    return out


def argbest(solutions, scores: dict[str, Fraction], order: str):
    """Best solution by score, then most redacted instances, fewest fabrics, smallest keys."""
    def key(sol):
        total = sum((scores[f.key] for f in sol), Fraction(0))
        redacted = sum(len(f.members) for f in sol)
        return (-total if order == "max" else total, -redacted, len(sol), tuple(sorted(f.key for f in sol)))

    return min(solutions, key=key)


def toy_gcd_pipeline(max_io: int, max_efpgas: int, w_min: int, w_max: int, order: str):
    """Oracle run of the whole flow on the toy GCD design, from the hand-counted table."""
    cands = {p: row[1] for p, row in TOY_GCD.items() if row[4] and row[1] <= max_io}
    clusters = brute_clusters(cands, max_io)
    fabrics = []
    for group in sorted(clusters, key=lambda g: (len(g), sorted(g))):
        io = sum(TOY_GCD[p][1] for p in group)
        luts = sum(TOY_GCD[p][2] for p in group)
        ffs = sum(TOY_GCD[p][3] for p in group)
        w = scan_width(io, luts, ffs, w_min, w_max)
        if w is not None:
            fabrics.append(OFabric(group, w, io, max(1, math.ceil(max(luts, ffs) / 4))))
    solutions = naive_solutions(fabrics, max_efpgas)
    scores = oracle_scores(fabrics)
    best = argbest(solutions, scores, order)
    return {
        "R": len(cands),
        "C": len(clusters),
        "F": len(fabrics),
        "S": len(solutions),
        "widths": sorted(f.w for f in best),
        "members": sorted(m for f in best for m in f.members),
        "redacted": sum(len(f.members) for f in best),
    }
