"""Families of subgroups and the constants attached to their differences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .diagnostics import FamilyError
from .groups import GroupDescriptor, SubgroupClass
from .reps import VirtualRep, fixed_dim, total_dim


@dataclass(frozen=True)
class Family:
    """A subconjugacy-closed set of subgroup classes of ``group``.

    The universal space attached to a family is represented only through its
    fixed-point support: it is S^0 at classes outside the family and
    contractible at classes inside it.
    """

    group: GroupDescriptor
    members: frozenset[str]

    def __contains__(self, class_id) -> bool:
        return getattr(class_id, "id", class_id) in self.members

    def classes(self) -> list[SubgroupClass]:
        return [c for c in self.group.subgroup_classes if c.id in self.members]

    def support(self) -> frozenset[str]:
        """Classes at which the universal space has S^0 fixed points."""
        return frozenset(self.group.ids) - self.members

    def __le__(self, other: "Family") -> bool:
        return self.members <= other.members

    def __lt__(self, other: "Family") -> bool:
        return self.members < other.members

    def sorted_members(self) -> list[str]:
        return [c.id for c in sorted(self.classes(), key=lambda c: (c.order, c.id))]


def _closure_witness(G: GroupDescriptor, ids: frozenset[str]):
    for lo, hi in sorted(G.subconjugacy):
        if hi in ids and lo not in ids:
            return lo, hi
    return None


def family_from_members(G: GroupDescriptor, ids: Iterable[str]) -> Family:
    ids = frozenset(getattr(i, "id", i) for i in ids)
    unknown = ids - set(G.ids)
    if unknown:
        raise FamilyError(f"unknown subgroup classes {sorted(unknown)}", sorted(unknown))
    w = _closure_witness(G, ids)
    if w is not None:
        raise FamilyError(f"not closed under subconjugacy: {w[0]} is below {w[1]} but missing", w)
    return Family(G, ids)


def order_family(G: GroupDescriptor, h: int) -> Family:
    """All subgroup classes of order at most h."""
    if not 0 <= h <= G.order:
        raise FamilyError(f"h={h} outside [0, {G.order}]")
    return Family(G, frozenset(c.id for c in G.subgroup_classes if c.order <= h))


def non_containing_family(G: GroupDescriptor, H) -> Family:
    """Classes K such that no conjugate of H lies in K."""
    hid = getattr(H, "id", H)
    G.cls(hid)
    return Family(G, frozenset(c.id for c in G.subgroup_classes if not G.leq(hid, c.id)))


def _check_nested(F: Family, F2: Family):
    if F.group.name != F2.group.name:
        raise FamilyError("families over different groups")
    if not F.members <= F2.members:
        extra = sorted(F.members - F2.members)
        raise FamilyError(f"families are not nested: {extra} not in the larger family", extra)


def family_difference(F: Family, F2: Family) -> frozenset[SubgroupClass]:
    _check_nested(F, F2)
    return frozenset(c for c in F2.group.subgroup_classes if c.id in F2.members - F.members)


def fiber_support(F: Family, F2: Family) -> frozenset[SubgroupClass]:
    """Geometric fixed point support of the fiber of the map between universal spaces.

    The fiber has S^0 geometric fixed points exactly at classes in F2 but not F.
    """
    return family_difference(F, F2)


def tau(V: VirtualRep, S: Iterable) -> int:
    """max over H in S of |V^H|*|H| - |V|."""
    S = list(S)
    if not S:
        raise FamilyError("tau is undefined on an empty set of subgroups")
    G = V.table.group
    n = total_dim(V)
    best = None
    for H in S:
        c = H if isinstance(H, SubgroupClass) else G.cls(H)
        val = fixed_dim(V, c.id) * c.order - n
        best = val if best is None else max(best, val)
    return best


def extremal_orders(S: Iterable[SubgroupClass]) -> tuple[int, int]:
    orders = [c.order for c in S]
    if not orders:
        raise FamilyError("extremal orders of an empty set")
    return min(orders), max(orders)


def order_family_chain(G: GroupDescriptor) -> list[tuple[int, Family]]:
    """The distinct order families, keyed by the subgroup order where each first appears.

    The empty family F_{<=0} is implicit; the last entry is h = |G| (all classes).
    """
    return [(h, order_family(G, h)) for h in G.orders()]
