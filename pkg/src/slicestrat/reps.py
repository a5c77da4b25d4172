"""Real representation ring data: irreducible tables and virtual representations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from sympy import isprime

from .diagnostics import Diagnostic, RepError
from .groups import GroupDescriptor, builtin_cyclic, builtin_quaternion8, builtin_group


@dataclass(frozen=True)
class Irreducible:
    id: str
    dim: int
    fixed_dim: Mapping[str, int]
    mult_in_regular: int = 1

    def __hash__(self):
        return hash((self.id, self.dim, tuple(sorted(self.fixed_dim.items())), self.mult_in_regular))


@dataclass(frozen=True)
class IrreducibleTable:
    group: GroupDescriptor
    irreducibles: tuple[Irreducible, ...]
    # named shorthands, e.g. lambda0 -> {"sigma": 2}
    aliases: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    def irr(self, irr_id: str) -> Irreducible:
        for w in self.irreducibles:
            if w.id == irr_id:
                return w
        raise RepError(f"{self.group.name}: unknown irreducible {irr_id!r}")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.irreducibles)

    def rep(self, **mult: int) -> "VirtualRep":
        """Keyword shortcut; ids that are not identifiers go through ``vrep``."""
        return vrep(self, mult)

    def zero(self) -> "VirtualRep":
        return VirtualRep(self, {})


@dataclass(frozen=True)
class VirtualRep:
    table: IrreducibleTable
    mult: Mapping[str, int]

    def __post_init__(self):
        clean = {k: int(v) for k, v in self.mult.items() if v}
        for k in clean:
            self.table.irr(k)
        object.__setattr__(self, "mult", dict(sorted(clean.items())))

    def __add__(self, other: "VirtualRep") -> "VirtualRep":
        self._same_table(other)
        out = dict(self.mult)
        for k, v in other.mult.items():
            out[k] = out.get(k, 0) + v
        return VirtualRep(self.table, out)

    def __neg__(self) -> "VirtualRep":
        return VirtualRep(self.table, {k: -v for k, v in self.mult.items()})

    def __sub__(self, other: "VirtualRep") -> "VirtualRep":
        return self + (-other)

    def __mul__(self, k: int) -> "VirtualRep":
        return VirtualRep(self.table, {w: k * v for w, v in self.mult.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, VirtualRep) and self.table.group.name == other.table.group.name
                and self.mult == other.mult)

    def __hash__(self):
        return hash((self.table.group.name, tuple(self.mult.items())))

    def _same_table(self, other):
        if self.table.group.name != other.table.group.name:
            raise RepError("virtual representations live over different groups")

    def is_actual(self) -> bool:
        return all(v >= 0 for v in self.mult.values())

    def __str__(self) -> str:
        return format_rep(self)


def vrep(table: IrreducibleTable, mult: Mapping[str, int]) -> VirtualRep:
    """Build a VirtualRep, expanding any table aliases."""
    out: dict[str, int] = {}
    for k, v in mult.items():
        if k in table.aliases:
            for w, m in table.aliases[k].items():
                out[w] = out.get(w, 0) + v * m
        else:
            table.irr(k)
            out[k] = out.get(k, 0) + v
    return VirtualRep(table, out)


_TERM = re.compile(r"^\s*([A-Za-z0-9_()+\-]+?)\s*(?::\s*([+-]?\d+))?\s*$")


def parse_rep(table: IrreducibleTable, text: str) -> VirtualRep:
    """Parse ``"sigma:1,lambda1:-2"``; ``"0"`` or ``""`` is the zero representation.

    A bare id means multiplicity 1.  Integers only.
    """
    text = text.strip()
    if text in ("", "0"):
        return table.zero()
    mult: dict[str, int] = {}
    for term in text.split(","):
        if ":" in term:
            key, _, val = term.rpartition(":")
            key = key.strip()
            try:
                n = int(val.strip())
            except ValueError:
                raise RepError(f"bad multiplicity in {term!r}") from None
        else:
            key, n = term.strip(), 1
        if not key:
            raise RepError(f"empty irreducible id in {text!r}")
        mult[key] = mult.get(key, 0) + n
    return vrep(table, mult)


def format_rep(V: VirtualRep) -> str:
    if not V.mult:
        return "0"
    return ",".join(f"{k}:{v}" for k, v in V.mult.items())


def total_dim(V: VirtualRep) -> int:
    return sum(m * V.table.irr(w).dim for w, m in V.mult.items())


def fixed_dim(V: VirtualRep, H) -> int:
    """Dimension of the H-fixed points, extended linearly to virtual V."""
    hid = getattr(H, "id", H)
    if hid not in V.table.group:
        raise RepError(f"{V.table.group.name}: unknown subgroup class {hid!r}")
    return sum(m * V.table.irr(w).fixed_dim[hid] for w, m in V.mult.items())


def regular_rep(T: IrreducibleTable) -> VirtualRep:
    return VirtualRep(T, {w.id: w.mult_in_regular for w in T.irreducibles})


def k_of(V: VirtualRep) -> int:
    """Least k >= 0 such that k copies of the regular representation plus V is actual."""
    k = 0
    for w, m in V.mult.items():
        r = V.table.irr(w).mult_in_regular
        if m < 0:
            k = max(k, -(m // r))  # ceil(-m / r)
    return k


def max_fixed_dim(V: VirtualRep) -> int:
    return max(fixed_dim(V, c.id) for c in V.table.group.subgroup_classes)


def validate_table(T: IrreducibleTable) -> list[Diagnostic]:
    G = T.group
    diags: list[Diagnostic] = []
    triv = G.trivial.id
    for w in T.irreducibles:
        missing = [c.id for c in G.subgroup_classes if c.id not in w.fixed_dim]
        if missing:
            diags.append(Diagnostic("missing-fixed-dim", f"{w.id} lacks fixed_dim for {missing}", w.id))
            continue
        if w.dim < 1:
            diags.append(Diagnostic("bad-dim", f"{w.id} has dimension {w.dim}", w.id))
        if w.fixed_dim[triv] != w.dim:
            diags.append(Diagnostic("trivial-fixed-dim", f"{w.id}: fixed_dim at trivial class != dim", w.id))
        for c in G.subgroup_classes:
            fd = w.fixed_dim[c.id]
            if not 0 <= fd <= w.dim:
                diags.append(Diagnostic("fixed-dim-range", f"{w.id}: fixed_dim[{c.id}]={fd}", (w.id, c.id)))
        for a, b in sorted(G.subconjugacy):
            if w.fixed_dim[b] > w.fixed_dim[a]:
                diags.append(Diagnostic("fixed-dim-monotone",
                                        f"{w.id}: fixed_dim grows from {a} to {b}", (w.id, a, b)))
        if w.mult_in_regular < 1:
            diags.append(Diagnostic("regular-multiplicity", f"{w.id} has mult_in_regular < 1", w.id))
    if sum(w.mult_in_regular * w.dim for w in T.irreducibles) != G.order:
        diags.append(Diagnostic("regular-dimension", "regular representation dimension != |G|"))
    return diags


def builtin_cyclic_table(p: int, n: int) -> IrreducibleTable:
    """All real irreducibles of the cyclic group of order p**n.

    ``rot{m}`` is the plane rotated by 2*pi*m/p**n; the subgroup of order p**k
    fixes it exactly when p**k divides m.  ``lambda{i}`` aliases rotation by
    2*pi/p**(i+1), which is ``rot{p**(n-i-1)}`` except that for p = 2 the
    i = 0 case is twice the sign representation.
    """
    if not isprime(p):
        raise RepError(f"p={p} is not prime")
    G = builtin_cyclic(p, n)
    N = p ** n
    ks = range(n + 1)
    cid = {k: f"C{p ** k}" for k in ks}
    irrs = [Irreducible("1", 1, {cid[k]: 1 for k in ks})]
    if p == 2 and n >= 1:
        irrs.append(Irreducible("sigma", 1, {cid[k]: (1 if k < n else 0) for k in ks}))
    top = (N - 2) // 2 if p == 2 else (N - 1) // 2
    for m in range(1, top + 1):
        irrs.append(Irreducible(f"rot{m}", 2, {cid[k]: (2 if m % p ** k == 0 else 0) for k in ks}))
    aliases = {}
    for i in range(n):
        m = p ** (n - i - 1)
        aliases[f"lambda{i}"] = {"sigma": 2} if (p == 2 and i == 0) else {f"rot{m}": 1}
    return IrreducibleTable(G, tuple(irrs), aliases)


def builtin_quaternion8_table() -> IrreducibleTable:
    """Real irreducibles of Q8: three sign characters and the 4-dim quaternion rep."""
    G = builtin_quaternion8()
    irrs = [Irreducible("1", 1, {c: 1 for c in G.ids})]
    for q in "ijk":
        # sign character with kernel <q>; -1 = q^2 lies in the kernel
        fd = {"1": 1, "-1": 1, "Q8": 0}
        fd.update({r: (1 if r == q else 0) for r in "ijk"})
        irrs.append(Irreducible(f"sigma_{q}", 1, fd))
    irrs.append(Irreducible("H", 4, {"1": 4, "-1": 0, "i": 0, "j": 0, "k": 0, "Q8": 0}))
    return IrreducibleTable(G, tuple(irrs))


_CYCLIC = {"C1": (2, 0), "C2": (2, 1), "C4": (2, 2), "C8": (2, 3), "C3": (3, 1), "C9": (3, 2)}


def builtin_table(name: str) -> IrreducibleTable:
    if name == "Q8":
        return builtin_quaternion8_table()
    if name in _CYCLIC:
        return builtin_cyclic_table(*_CYCLIC[name])
    builtin_group(name)  # raises the right error
    raise RepError(f"no built-in table for {name!r}")
