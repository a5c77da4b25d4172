"""Randomized and hand-built charts shared by several test modules."""

from __future__ import annotations

import random
from dataclasses import dataclass

import sympy

from oracles import FiniteChartOracle, OracleInvalid
from slicestrat.chart import Chart, Differential, FgaGroup, Window
from slicestrat.comparison import ChartMap
from slicestrat.geometry import Line, offset, recovery_region
from slicestrat.reps import builtin_table

C4 = builtin_table("C4")
C2 = builtin_table("C2")


def _target(c, r):
    return (c[0] - 1, c[1] + r, c[2])


def _positions(rng, k, window, levels):
    """Random cells, about half of them placed where a d_2 or d_3 from an earlier cell lands."""
    out = []
    while len(out) < k:
        if out and rng.random() < 0.5:
            c = _target(rng.choice(out), rng.choice([2, 3]))
            if (c[0], c[1]) not in window:
                continue
        else:
            c = (rng.randint(window.x_min, window.x_max), rng.randint(window.y_min, window.y_max),
                 rng.choice(levels))
        if c not in out:
            out.append(c)
    return out


def _rand_matrix(rng, rows, cols, lo=-3, hi=3):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


# ------------------------------------------------------------------ free charts


def random_free_chart(rng: random.Random, max_cells: int = 20):
    """Free cells with d_2 only; returns (chart, {cell: (M_in, M_out)})."""
    window = Window(-3, 4, 0, 9)
    levels = ["C2", "C1"]
    positions = _positions(rng, rng.randint(1, max_cells), window, levels)
    cells = {c: rng.randint(1, 3) for c in positions}
    incoming, outgoing = {}, {}
    diffs = []
    for c in sorted(cells, key=lambda c: (-c[0], c[1], c[2])):
        tgt = _target(c, 2)
        if rng.random() > 0.7:
            continue
        if (tgt[0], tgt[1]) not in window:
            # truncated differential: source is marked indeterminate, groups untouched
            diffs.append(Differential(2, c, tgt, _rand_matrix(rng, 1, cells[c])))
            continue
        if tgt not in cells:
            continue
        M_in = incoming.get(c)
        for _ in range(40):
            M = _rand_matrix(rng, cells[tgt], cells[c], -2, 2)
            if M_in is None or all(v == 0 for row in _matmul(M, M_in) for v in row):
                break
        else:
            continue
        if all(v == 0 for row in M for v in row):
            continue
        diffs.append(Differential(2, c, tgt, M))
        incoming[tgt] = M
        outgoing[c] = M
    chart = Chart(C2.group, C2.zero(), window, {c: FgaGroup(n) for c, n in cells.items()}, diffs, id="free")
    info = {c: (incoming.get(c), outgoing.get(c)) for c in cells}
    return chart, info


# ------------------------------------------------------------------ finite charts

TWO_FAMILY = [(2,), (4,), (2, 2), (4, 4)]
THREE_FAMILY = [(3,), (3, 3)]


def grow_differentials(rng, cells, window, pages=(2, 3), p_diff=0.7, forbid=lambda c: False):
    """Random valid differentials for finite cells, by rejection against the oracle."""
    in_window = lambda xy: xy in window  # noqa: E731
    oracle = FiniteChartOracle(cells, {}, in_window)
    page = oracle.e2()
    diffs = {}
    for r in pages:
        ds = {}
        for c in sorted(cells, key=lambda c: (-c[0], c[1], c[2])):
            tgt = _target(c, r)
            if tgt not in cells or forbid(c) or rng.random() > p_diff:
                continue
            for _ in range(25):
                M = _rand_matrix(rng, len(cells[tgt]), len(cells[c]))
                trial = dict(ds)
                trial[c] = (tgt, M)
                try:
                    oracle.check(page, r, trial)
                except OracleInvalid:
                    continue
                G = oracle.groups[tgt]
                if all(all(v % t == 0 for v, t in zip(col, G.t)) for col in zip(*M)):
                    continue
                ds = trial
                break
        if ds:
            diffs[r] = ds
        page = oracle.turn(page, r, ds)
    return diffs


def random_finite_chart(rng: random.Random, max_cells: int = 20):
    window = Window(-2, 4, 0, 8)
    family = TWO_FAMILY if rng.random() < 0.75 else THREE_FAMILY
    positions = _positions(rng, rng.randint(1, max_cells), window, ["C4", "C2"])
    cells = {c: rng.choice(family) for c in positions}
    diffs = grow_differentials(rng, cells, window)
    chart = Chart(C4.group, C4.zero(), window, {c: FgaGroup(0, t) for c, t in cells.items()},
                  [Differential(r, s, t, M) for r, ds in diffs.items() for s, (t, M) in ds.items()],
                  id="finite")
    return chart, cells, diffs


# ------------------------------------------------------------------ transport pairs


def _random_automorphism(rng, t, k):
    while True:
        A = [[rng.randrange(t) for _ in range(k)] for _ in range(k)]
        det = int(sympy.Matrix(A).det())
        if sympy.gcd(det, t) == 1:
            inv = sympy.Matrix(A).inv_mod(t)
            return A, [[int(v) for v in row] for row in inv.tolist()]


@dataclass
class TransportFixture:
    source_e2: Chart
    target: Chart
    truth: Chart  # the source with every differential, including the extra on-line summands
    phi: ChartMap
    L: object
    r_max: int
    src_cells: dict
    src_diffs: dict
    tgt_cells: dict
    tgt_diffs: dict
    phi_mats: dict

    def delta(self, cell):
        return offset(self.L, cell[0], cell[1])


def transport_fixture(rng: random.Random, max_cells: int = 14) -> TransportFixture:
    """A chart S, a conjugate copy T, and phi = the conjugating automorphisms.

    On-line cells of the source may carry an extra Z/2 that phi kills; cells
    strictly below the line may exist on one side only.  Neither carries
    differentials, so condition 1 holds by construction and the exact source
    differentials are known.
    """
    G = C4.group
    V = C4.zero()
    window = Window(-2, 4, 0, 8)
    if rng.random() < 0.3:
        L = recovery_region(G, rng.choice([1, 2, 4]), V)
    else:
        L = Line(rng.choice([0, 0, 1, 1, 3]), rng.randint(-2, 2))
    delta = lambda c: offset(L, c[0], c[1])  # noqa: E731

    family = TWO_FAMILY if rng.random() < 0.8 else THREE_FAMILY
    positions = _positions(rng, rng.randint(3, max_cells), window, ["C4", "C4", "C2"])
    S = {c: rng.choice(family) for c in positions}
    S_diffs = grow_differentials(rng, S, window)

    # extra summands
    extra_K = {c for c in S if delta(c) == 0 and S[c][0] % 2 == 0 and rng.random() < 0.5}
    free_spots = [(x, y, lev) for x in range(-2, 5) for y in range(0, 9) for lev in ("C4", "C2")
                  if (x, y, lev) not in S and delta((x, y, lev)) < 0]
    rng.shuffle(free_spots)
    s_only = {c: rng.choice(family) for c in free_spots[:rng.randint(0, 2)]}
    t_only = {c: rng.choice(family) for c in free_spots[2:2 + rng.randint(0, 2)]}

    src_cells = {c: S[c] + ((2,) if c in extra_K else ()) for c in S}
    src_cells.update(s_only)

    def pad(c, tgt, M):
        rows = [list(row) + ([0] if c in extra_K else []) for row in M]
        if tgt in extra_K:
            rows.append([0] * (len(S[c]) + (1 if c in extra_K else 0)))
        return rows

    truth_diffs = {r: {c: (tgt, pad(c, tgt, M)) for c, (tgt, M) in ds.items()} for r, ds in S_diffs.items()}
    below_diffs = {r: {c: v for c, v in ds.items() if delta(c) < 0} for r, ds in truth_diffs.items()}
    below_diffs = {r: ds for r, ds in below_diffs.items() if ds}

    # conjugate into the target
    alpha, beta = {}, {}
    for c, t in S.items():
        alpha[c], beta[c] = _random_automorphism(rng, t[0], len(t))
    tgt_cells = dict(S)
    tgt_cells.update(t_only)
    tgt_diffs = {}
    for r, ds in S_diffs.items():
        tgt_diffs[r] = {}
        for c, (tgt, M) in ds.items():
            Mp = _matmul(_matmul(alpha[tgt], M), beta[c])
            mod = S[tgt][0]
            tgt_diffs[r][c] = (tgt, [[v % mod for v in row] for row in Mp])
    phi_mats = {}
    for c in S:
        phi_mats[c] = [list(row) + ([0] if c in extra_K else []) for row in alpha[c]]

    def chart(cells, diffs, cid):
        return Chart(G, V, window, {c: FgaGroup(0, t) for c, t in cells.items()},
                     [Differential(r, s, t, M) for r, ds in sorted(diffs.items())
                      for s, (t, M) in sorted(ds.items())], id=cid)

    source_e2 = chart(src_cells, below_diffs, "source")
    target = chart(tgt_cells, tgt_diffs, "target")
    truth = chart(src_cells, truth_diffs, "truth")
    phi = ChartMap(source_e2, target, phi_mats)
    return TransportFixture(source_e2, target, truth, phi, L, 4, src_cells, below_diffs,
                            tgt_cells, tgt_diffs, phi_mats)


# ------------------------------------------------------------------ golden charts


def golden_charts():
    """Three small fixed charts used by the rendering golden files."""
    empty_c4 = Chart(C4.group, C4.zero(), Window(-1, 4, 0, 8), {}, (), id="c4-strata")
    single = Chart(C2.group, C2.zero(), Window(-1, 2, 0, 2), {(0, 0, "C2"): FgaGroup(1)}, (), id="single")
    cells = {
        (1, 0, "C4"): FgaGroup(1, (), ("a",)),
        (0, 2, "C4"): FgaGroup(1, (), ("b",)),
        (2, 0, "C4"): FgaGroup(0, (2, 4), ("u", "v")),
        (1, 3, "C4"): FgaGroup(0, (4,), ("w",)),
        (3, 1, "C2"): FgaGroup(2, (), ("p", "q")),
        (2, 4, "C2"): FgaGroup(1, (), ("s",)),
    }
    diffs = [
        Differential(2, (1, 0, "C4"), (0, 2, "C4"), [[2]]),
        Differential(3, (2, 0, "C4"), (1, 3, "C4"), [[2, 1]]),
        Differential(3, (3, 1, "C2"), (2, 4, "C2"), [[1, 1]]),
    ]
    mixed = Chart(C4.group, C4.zero(), Window(-1, 4, 0, 6), cells, diffs, id="mixed")
    return empty_c4, single, mixed
