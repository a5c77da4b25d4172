"""Finite groups as abstract subgroup-conjugacy lattices.

Everything downstream only needs the orders of subgroup classes, the
subconjugacy order between classes, and which classes are normal, so a group
is described by exactly that data and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

from sympy import isprime

from .diagnostics import Diagnostic, GroupError


@dataclass(frozen=True)
class SubgroupClass:
    id: str
    order: int
    class_size: int = 1
    normal: bool = True


@dataclass(frozen=True)
class GroupDescriptor:
    name: str
    order: int
    subgroup_classes: tuple[SubgroupClass, ...]
    # pairs (lower, upper): lower is subconjugate to upper
    subconjugacy: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "subgroup_classes", tuple(self.subgroup_classes))
        object.__setattr__(self, "subconjugacy", frozenset(self.subconjugacy))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.subgroup_classes)

    def cls(self, class_id: str) -> SubgroupClass:
        for c in self.subgroup_classes:
            if c.id == class_id:
                return c
        raise GroupError(f"{self.name}: unknown subgroup class {class_id!r}")

    def __contains__(self, class_id) -> bool:
        return any(c.id == class_id for c in self.subgroup_classes)

    def leq(self, lower: str, upper: str) -> bool:
        """True if ``lower`` is subconjugate to ``upper``."""
        return (lower, upper) in self.subconjugacy

    @property
    def trivial(self) -> SubgroupClass:
        return next(c for c in self.subgroup_classes if c.order == 1)

    @property
    def top(self) -> SubgroupClass:
        return next(c for c in self.subgroup_classes if c.order == self.order)

    def orders(self) -> list[int]:
        """Distinct subgroup orders, ascending."""
        return sorted({c.order for c in self.subgroup_classes})


def transitive_closure(ids: Iterable[str], pairs: Iterable[tuple[str, str]]) -> frozenset:
    ids = list(ids)
    rel = set(pairs) | {(i, i) for i in ids}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return frozenset(rel)


def make_group(name: str, order: int, classes: Iterable[SubgroupClass],
               covers: Iterable[tuple[str, str]]) -> GroupDescriptor:
    """Build a descriptor from covering pairs, closing the relation."""
    classes = tuple(classes)
    return GroupDescriptor(name, order, classes,
                           transitive_closure((c.id for c in classes), covers))


def builtin_cyclic(p: int, n: int) -> GroupDescriptor:
    """The cyclic group of order ``p**n``; its subgroups form a chain."""
    if not isprime(p):
        raise GroupError(f"p={p} is not prime")
    if n < 0:
        raise GroupError(f"n={n} must be non-negative")
    ids = [f"C{p ** k}" for k in range(n + 1)]
    classes = [SubgroupClass(ids[k], p ** k) for k in range(n + 1)]
    covers = [(ids[k], ids[k + 1]) for k in range(n)]
    name = "C1" if n == 0 else f"C{p ** n}"
    return make_group(name, p ** n, classes, covers)


def builtin_quaternion8() -> GroupDescriptor:
    classes = [
        SubgroupClass("1", 1),
        SubgroupClass("-1", 2),
        SubgroupClass("i", 4),
        SubgroupClass("j", 4),
        SubgroupClass("k", 4),
        SubgroupClass("Q8", 8),
    ]
    covers = [("1", "-1")] + [("-1", q) for q in "ijk"] + [(q, "Q8") for q in "ijk"]
    return make_group("Q8", 8, classes, covers)


BUILTIN_GROUPS = {
    "C1": lambda: builtin_cyclic(2, 0),
    "C2": lambda: builtin_cyclic(2, 1),
    "C4": lambda: builtin_cyclic(2, 2),
    "C8": lambda: builtin_cyclic(2, 3),
    "C3": lambda: builtin_cyclic(3, 1),
    "C9": lambda: builtin_cyclic(3, 2),
    "Q8": builtin_quaternion8,
}


def builtin_group(name: str) -> GroupDescriptor:
    try:
        return BUILTIN_GROUPS[name]()
    except KeyError:
        raise GroupError(f"no built-in group named {name!r}") from None


def cyclic_parameters(G: GroupDescriptor) -> tuple[int, int] | None:
    """Return (p, n) if G's lattice is that of a cyclic p-group, else None.

    Detection is structural: a chain of classes whose orders are 1, p, ..., p^n.
    """
    orders = sorted(c.order for c in G.subgroup_classes)
    if len(orders) != len(set(orders)):
        return None
    if orders == [1]:
        return (2, 0) if G.order == 1 else None
    p = orders[1]
    if not isprime(p) or orders != [p ** k for k in range(len(orders))]:
        return None
    by_order = sorted(G.subgroup_classes, key=lambda c: c.order)
    if not all(G.leq(a.id, b.id) for a, b in zip(by_order, by_order[1:])):
        return None
    return p, len(orders) - 1


def validate_group(desc: GroupDescriptor) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    ids = [c.id for c in desc.subgroup_classes]
    known = set(ids)
    if len(known) != len(ids):
        diags.append(Diagnostic("duplicate-id", "subgroup class ids are not unique"))
    if desc.order < 1:
        diags.append(Diagnostic("bad-order", f"group order {desc.order} is not positive"))
        return diags

    trivial = [c for c in desc.subgroup_classes if c.order == 1]
    tops = [c for c in desc.subgroup_classes if c.order == desc.order]
    if not trivial:
        diags.append(Diagnostic("missing-trivial", "no class of order 1"))
    elif len(trivial) > 1:
        diags.append(Diagnostic("duplicate-trivial", "more than one class of order 1"))
    if not tops:
        diags.append(Diagnostic("missing-top", f"no class of order {desc.order}"))
    elif len(tops) > 1:
        diags.append(Diagnostic("duplicate-top", f"more than one class of order {desc.order}"))

    for c in desc.subgroup_classes:
        if c.order < 1 or desc.order % c.order:
            diags.append(Diagnostic("lagrange-violation",
                                    f"class {c.id} has order {c.order} not dividing {desc.order}", c.id))
        if c.class_size < 1 or desc.order % c.class_size:
            diags.append(Diagnostic("class-size",
                                    f"class {c.id} has {c.class_size} conjugates, not dividing {desc.order}",
                                    c.id))
        if c.normal != (c.class_size == 1):
            diags.append(Diagnostic("normal-mismatch",
                                    f"class {c.id}: normal={c.normal} but class_size={c.class_size}", c.id))

    rel = desc.subconjugacy
    for a, b in sorted(rel):
        if a not in known or b not in known:
            diags.append(Diagnostic("unknown-class", f"relation ({a}, {b}) names an unknown class", (a, b)))
    rel = {(a, b) for a, b in rel if a in known and b in known}
    for i in ids:
        if (i, i) not in rel:
            diags.append(Diagnostic("not-reflexive", f"{i} is not related to itself", i))
    for (a, b) in sorted(rel):
        if a != b and (b, a) in rel and a < b:
            diags.append(Diagnostic("not-antisymmetric", f"{a} and {b} are mutually subconjugate", (a, b)))
        for (c, d) in sorted(rel):
            if b == c and (a, d) not in rel:
                diags.append(Diagnostic("not-transitive", f"({a},{b}) and ({c},{d}) without ({a},{d})",
                                        (a, b, d)))
    orders = {c.id: c.order for c in desc.subgroup_classes}
    for a, b in sorted(rel):
        if orders[a] < 1 or orders[b] % max(orders[a], 1):
            diags.append(Diagnostic("order-mismatch",
                                    f"{a} below {b} but |{a}| does not divide |{b}|", (a, b)))
    if len(trivial) == 1:
        for i in ids:
            if (trivial[0].id, i) not in rel:
                diags.append(Diagnostic("trivial-not-bottom", f"trivial class not below {i}", i))
    if len(tops) == 1:
        for i in ids:
            if (i, tops[0].id) not in rel:
                diags.append(Diagnostic("top-not-top", f"{i} not below the whole group", i))
    return diags


def subgroup_classes_of_order(G: GroupDescriptor, h: int) -> frozenset[SubgroupClass]:
    if h < 0:
        raise GroupError(f"order {h} is negative")
    return frozenset(c for c in G.subgroup_classes if c.order == h)
