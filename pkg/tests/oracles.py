"""Independent oracles used by the test-suite.

None of these import the package's lattice or page engine.  They are
deliberately naive: characters are averaged over explicit matrices, free
chain complexes go through sympy, and finite charts are handled by listing
every element.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce

import numpy as np
import sympy
from sympy.matrices.normalforms import invariant_factors


# ------------------------------------------------------------------ characters


def rotation(theta: float) -> np.ndarray:
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def cyclic_irrep_matrix(irr_id: str, N: int, g: int) -> np.ndarray:
    """Matrix of the generator power g^k acting on irreducible ``irr_id`` of C_N."""
    if irr_id == "1":
        return np.eye(1)
    if irr_id == "sigma":
        return np.array([[(-1.0) ** g]])
    m = int(irr_id[3:])
    return rotation(2 * math.pi * m * g / N)


def averaged_fixed_dim(irr_id: str, N: int, sub_order: int) -> int:
    """dim of the fixed subspace = average trace over the subgroup of order sub_order."""
    step = N // sub_order
    total = sum(np.trace(cyclic_irrep_matrix(irr_id, N, step * j)) for j in range(sub_order))
    val = total / sub_order
    assert abs(val - round(val)) < 1e-9
    return int(round(val))


def regular_fixed_dim(N: int, sub_order: int) -> int:
    """Fixed vectors of the permutation action of a subgroup on C_N = number of orbits."""
    step = N // sub_order
    seen, orbits = set(), 0
    for a in range(N):
        if a in seen:
            continue
        orbits += 1
        for j in range(sub_order):
            seen.add((a + step * j) % N)
    return orbits


# ------------------------------------------------------------------ free complexes


def free_homology(n: int, M_in, M_out):
    """ker(M_out)/im(M_in) on Z^n for integer matrices with M_out·M_in = 0.

    Returns (free_rank, sorted prime-power torsion).  The kernel of an integer
    matrix is saturated, so the torsion is that of Z^n / im(M_in).
    """
    r_out = sympy.Matrix(M_out).rank() if M_out is not None and len(M_out) and n else 0
    if M_in is not None and len(M_in) and len(M_in[0]):
        A = sympy.Matrix(M_in)
        r_in = A.rank()
        facs = [abs(int(f)) for f in invariant_factors(A) if f != 0]
    else:
        r_in, facs = 0, []
    tors = []
    for f in facs:
        if f > 1:
            tors += [p ** e for p, e in sympy.factorint(f).items()]
    return n - r_out - r_in, tuple(sorted(tors))


# ------------------------------------------------------------------ finite charts


class FiniteCell:
    """The group (Z/t_1) + ... + (Z/t_k) with elements as residue tuples."""

    def __init__(self, torsion):
        self.t = tuple(torsion)
        self.elements = [tuple(e) for e in itertools.product(*[range(t) for t in self.t])]

    def norm(self, v):
        return tuple(int(a) % t for a, t in zip(v, self.t))

    def add(self, a, b):
        return tuple((x + y) % t for x, y, t in zip(a, b, self.t))

    def scale(self, k, a):
        return tuple((k * x) % t for x, t in zip(a, self.t))

    @property
    def zero(self):
        return tuple(0 for _ in self.t)

    def span(self, gens):
        out = {self.zero}
        frontier = [self.zero]
        gens = [self.norm(g) for g in gens]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.add(a, g)
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(out)


def apply(M, a, tgt: FiniteCell):
    """Integer matrix on a residue representative, reduced in the target."""
    v = []
    for row in M:
        s = sum(x * y for x, y in zip(row, a))
        if isinstance(s, float) or getattr(s, "denominator", 1) != 1:
            raise ValueError("non-integral value")
        v.append(int(s))
    return tgt.norm(v)


def quotient_invariants(Z: frozenset, B: frozenset, cell: FiniteCell):
    """Prime-power decomposition of Z/B by counting m-torsion for prime powers m."""
    order = len(Z) // len(B)
    if order == 1:
        return 0, ()
    out = []
    for p, e in sympy.factorint(order).items():
        counts = [1]
        for k in range(1, e + 1):
            m = p ** k
            killed = sum(1 for z in Z if cell.scale(m, z) in B) // len(B)
            counts.append(killed)
        logs = [round(math.log(c, p)) for c in counts]
        # number of cyclic factors of order >= p^k is logs[k] - logs[k-1]
        ge = [logs[k] - logs[k - 1] for k in range(1, e + 1)] + [0]
        for k in range(1, e + 1):
            out += [p ** k] * (ge[k - 1] - ge[k])
    return 0, tuple(sorted(out))


class OracleInvalid(Exception):
    pass


class FiniteChartOracle:
    """Brute-force pages for charts whose cells are all finite.

    ``cells``: {(x, y, level): torsion tuple}; ``diffs``: {r: {src: (tgt, M)}}
    with integer matrices; ``in_window``: predicate on (x, y).
    """

    def __init__(self, cells, diffs, in_window):
        self.groups = {c: FiniteCell(t) for c, t in cells.items()}
        self.diffs = diffs
        self.in_window = in_window

    def e2(self):
        return {c: (frozenset(g.elements), frozenset({g.zero})) for c, g in self.groups.items()}

    def check(self, page, r, ds=None):
        """Raise OracleInvalid unless d_r is well defined on ``page`` and squares to zero."""
        ds = self.diffs.get(r, {}) if ds is None else ds
        for src, (tgt, M) in ds.items():
            if tgt not in self.groups or not self.in_window(tgt[:2]):
                continue
            G, H = self.groups[src], self.groups[tgt]
            Z, B = page[src]
            Zt, Bt = page[tgt]
            for j, t in enumerate(G.t):
                e = [t if i == j else 0 for i in range(len(G.t))]
                if apply(M, e, H) != H.zero:
                    raise OracleInvalid("not well defined on residues")
            for z in Z:
                if apply(M, z, H) not in Zt:
                    raise OracleInvalid("image leaves cycles")
            for b in B:
                if apply(M, b, H) not in Bt:
                    raise OracleInvalid("boundaries not sent to boundaries")
            if tgt in ds:
                tgt2, M2 = ds[tgt]
                if tgt2 in self.groups and self.in_window(tgt2[:2]):
                    K = self.groups[tgt2]
                    for z in Z:
                        if apply(M2, apply(M, z, H), K) not in page[tgt2][1]:
                            raise OracleInvalid("d squared")

    def turn(self, page, r, ds=None):
        ds = self.diffs.get(r, {}) if ds is None else ds
        new = dict(page)
        for src, (tgt, M) in ds.items():
            if tgt not in self.groups or not self.in_window(tgt[:2]):
                continue
            G, H = self.groups[src], self.groups[tgt]
            Z, B = new[src]
            Zt, Bt = page[tgt]
            Zs_old = page[src][0]
            kept = frozenset(z for z in Z if apply(M, z, H) in Bt)
            new[src] = (kept, new[src][1])
            Zt_new, Bt_new = new[tgt]
            grown = H.span(list(Bt_new) + [apply(M, z, H) for z in Zs_old])
            new[tgt] = (Zt_new, frozenset(grown))
        return new

    def pages(self, r_max):
        page = self.e2()
        out = [page]
        for r in range(2, r_max):
            self.check(page, r)
            page = self.turn(page, r)
            out.append(page)
        return out

    def canonical(self, page):
        return {c: quotient_invariants(Z, B, self.groups[c]) for c, (Z, B) in page.items()}


def _homs(Zs, Bs, G: FiniteCell, Zt, Bt, H: FiniteCell):
    """All homomorphisms Zs/Bs -> Zt/Bt, as dicts z -> representative in Zt."""
    # greedy generating set of Zs modulo Bs
    gens, span = [], frozenset(Bs)
    for z in sorted(Zs):
        if z not in span:
            gens.append(z)
            span = G.span(list(span) + [z])
    reps, covered = [], set()
    for z in sorted(Zt):
        if z not in covered:
            reps.append(z)
            covered |= {H.add(z, b) for b in Bt}
    for images in itertools.product(reps, repeat=len(gens)):
        f = {b: H.zero for b in Bs}
        ok = True
        frontier = list(f)
        # closure: f(a + g_i) = f(a) + image_i, checked modulo Bt
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g, im in zip(gens, images):
                    b = G.add(a, g)
                    val = H.add(f[a], im)
                    if b in f:
                        diff = H.add(val, H.scale(-1, f[b]))
                        if diff not in Bt:
                            ok = False
                            break
                    else:
                        f[b] = val
                        nxt.append(b)
                if not ok:
                    break
            frontier = nxt
        if ok and set(f) == set(Zs):
            yield f


def oracle_transport(src_cells, src_diffs, tgt_cells, tgt_diffs, phi, delta, in_window, r_max):
    """Pull target differentials back by exhaustive search over homomorphisms.

    ``delta(cell)`` is the signed offset from the line (None = not covered).
    Returns (installed, flagged, source pages) where installed maps
    (r, src) -> (tgt, function on Z_r(src)) and flagged is a set of (r, src).
    """
    S = FiniteChartOracle(src_cells, {r: dict(d) for r, d in src_diffs.items()}, in_window)
    T = FiniteChartOracle(tgt_cells, tgt_diffs, in_window)
    tpages = T.pages(r_max)
    spage = S.e2()
    spages = [spage]
    installed, flagged = {}, set()

    def phi_apply(c, a):
        M = phi.get(c)
        H = T.groups.get(c)
        if H is None:
            return ()
        if M is None:
            return H.zero
        return apply(M, a, H)

    for i, tpage in enumerate(tpages):
        r = i + 2
        own = dict(S.diffs.get(r, {}))
        new = {}
        for c, (cp, Mt) in sorted(tgt_diffs.get(r, {}).items()):
            d = delta(c)
            if c not in S.groups or d is None or d < 0 or c in own:
                continue
            if cp not in S.groups or not in_window(cp[:2]):
                continue
            Zs, Bs = spage[c]
            if len(Zs) == len(Bs):
                continue
            Zt, Bt = tpage[c]
            Ztp, Btp = tpage[cp]
            H, Hp = T.groups[c], T.groups[cp]
            if all(apply(Mt, z, Hp) in Btp for z in Zt):
                continue
            Zsp, Bsp = spage[cp]
            natural = []
            for f in _homs(Zs, Bs, S.groups[c], Zsp, Bsp, S.groups[cp]):
                good = True
                for z in Zs:
                    lhs = phi_apply(cp, f[z])
                    rhs = apply(Mt, phi_apply(c, z), Hp)
                    if Hp.add(lhs, Hp.scale(-1, rhs)) not in Btp:
                        good = False
                        break
                if good:
                    natural.append(f)
                    if len(natural) > 1:
                        break
            if len(natural) != 1:
                flagged.add((r, c))
                continue
            f = natural[0]
            if all(f[z] in Bsp for z in Zs):
                continue
            installed[(r, c)] = (cp, f)
            new[c] = (cp, f)
        # turn the source page with its own d_r plus the pulled-back ones
        page = dict(spage)
        for c, (cp, M) in own.items():
            if cp not in S.groups or not in_window(cp[:2]):
                continue
            G, H = S.groups[c], S.groups[cp]
            Z, _ = page[c]
            page[c] = (frozenset(z for z in Z if apply(M, z, H) in spage[cp][1]), page[c][1])
            page[cp] = (page[cp][0], H.span(list(page[cp][1]) + [apply(M, z, H) for z in spage[c][0]]))
        for c, (cp, f) in new.items():
            H = S.groups[cp]
            Z, _ = page[c]
            page[c] = (frozenset(z for z in Z if f[z] in spage[cp][1]), page[c][1])
            page[cp] = (page[cp][0], H.span(list(page[cp][1]) + [f[z] for z in spage[c][0]]))
        spage = page
        spages.append(spage)
    return installed, flagged, spages, S


def lcm(*xs):
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)
