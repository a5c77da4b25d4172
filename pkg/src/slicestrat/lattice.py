"""Integer linear algebra: Hermite and Smith normal forms, sublattices of Z^n.

Vectors are tuples of Python ints and matrices are lists of rows.  Lattices
are row-spans.  Everything is exact; sizes here are desk-scale so no attempt
is made at coefficient-growth control beyond reducing above pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vector = tuple
Matrix = list


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_vec(M: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    if not A:
        return []
    cols = list(zip(*B)) if B else []
    if not cols:
        return [[] for _ in A]
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def transpose(M: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*M)]


def as_integral(v: Iterable) -> Optional[tuple]:
    out = []
    for a in v:
        if isinstance(a, Fraction):
            if a.denominator != 1:
                return None
            a = a.numerator
        out.append(int(a))
    return tuple(out)


def hnf(A: Sequence[Sequence[int]], ncols: int) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.  Returns (H, U) with U unimodular and U·A = H.

    Nonzero rows of H come first, pivots strictly increase to the right, are
    positive, and entries above each pivot are reduced into [0, pivot).
    """
    H = [list(map(int, r)) for r in A]
    m = len(H)
    U = identity(m)
    r = 0
    for j in range(ncols):
        if r == m:
            break
        # fold every row below r into row r at column j
        for i in range(r + 1, m):
            if H[i][j] == 0:
                continue
            a, b = H[r][j], H[i][j]
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            Hr, Hi = H[r], H[i]
            H[r] = [s * x + t * y for x, y in zip(Hr, Hi)]
            H[i] = [-bg * x + ag * y for x, y in zip(Hr, Hi)]
            Ur, Ui = U[r], U[i]
            U[r] = [s * x + t * y for x, y in zip(Ur, Ui)]
            U[i] = [-bg * x + ag * y for x, y in zip(Ur, Ui)]
        if H[r][j] == 0:
            continue
        if H[r][j] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        p = H[r][j]
        for i in range(r):
            q = H[i][j] // p
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


def row_basis(A: Sequence[Sequence[int]], ncols: int) -> list[tuple]:
    H, _ = hnf(A, ncols)
    return [tuple(r) for r in H if any(r)]


def left_kernel(A: Sequence[Sequence[int]], ncols: int) -> list[tuple]:
    """Basis of {u : u·A = 0} (integer row vectors)."""
    H, U = hnf(A, ncols)
    return [tuple(U[i]) for i in range(len(H)) if not any(H[i])]


def solve_left(A: Sequence[Sequence[int]], ncols: int, v: Sequence[int]) -> Optional[tuple]:
    """An integer u with u·A = v, or None."""
    H, U = hnf(A, ncols)
    m = len(H)
    rem = list(map(int, v))
    coeff = [0] * m
    for i in range(m):
        row = H[i]
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            break
        if rem[piv] % row[piv]:
            return None
        q = rem[piv] // row[piv]
        coeff[i] = q
        if q:
            rem = [a - q * b for a, b in zip(rem, row)]
    if any(rem):
        return None
    return tuple(sum(coeff[i] * U[i][k] for i in range(m)) for k in range(m))


def smith(A: Sequence[Sequence[int]], nrows: int, ncols: int):
    """Smith normal form with transforms.

    Returns (D, S, T, Tinv): S·A·T = D diagonal with d1 | d2 | ... and d_i >= 0,
    S and T unimodular and Tinv the inverse of T.
    """
    D = [list(map(int, r)) for r in A] if nrows else []
    S = identity(nrows)
    T = identity(ncols)
    Ti = identity(ncols)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        S[i], S[j] = S[j], S[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in T:
            row[i], row[j] = row[j], row[i]
        Ti[i], Ti[j] = Ti[j], Ti[i]

    def combine_rows(i, j, k):
        # rows i, j with pivot column k -> gcd at row i, zero at row j
        a, b = D[i][k], D[j][k]
        if b % a == 0:
            q = b // a
            D[j] = [y - q * x for x, y in zip(D[i], D[j])]
            S[j] = [y - q * x for x, y in zip(S[i], S[j])]
            return
        g, s, t = xgcd(a, b)
        ag, bg = a // g, b // g
        for M in (D, S):
            ri, rj = M[i], M[j]
            M[i] = [s * x + t * y for x, y in zip(ri, rj)]
            M[j] = [-bg * x + ag * y for x, y in zip(ri, rj)]

    def combine_cols(i, j, k):
        # columns i, j with pivot row k -> gcd at column i, zero at column j
        a, b = D[k][i], D[k][j]
        if b % a == 0:
            q = b // a
            for M in (D, T):
                for row in M:
                    row[j] -= q * row[i]
            Ti[i] = [x + q * y for x, y in zip(Ti[i], Ti[j])]
            return
        g, s, t = xgcd(a, b)
        ag, bg = a // g, b // g
        for M in (D, T):
            for row in M:
                x, y = row[i], row[j]
                row[i], row[j] = s * x + t * y, -bg * x + ag * y
        ri, rj = Ti[i], Ti[j]
        Ti[i] = [ag * x + bg * y for x, y in zip(ri, rj)]
        Ti[j] = [-t * x + s * y for x, y in zip(ri, rj)]

    k = 0
    while k < min(nrows, ncols):
        entries = [(abs(D[i][j]), i, j) for i in range(k, nrows) for j in range(k, ncols) if D[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(k, i0)
        swap_cols(k, j0)
        while True:
            for i in range(k + 1, nrows):
                if D[i][k]:
                    combine_rows(k, i, k)
            for j in range(k + 1, ncols):
                if D[k][j]:
                    combine_cols(k, j, k)
            if any(D[i][k] for i in range(k + 1, nrows)):
                continue
            p = D[k][k]
            bad = next(((i, j) for i in range(k + 1, nrows) for j in range(k + 1, ncols)
                        if D[i][j] % p), None)
            if bad is None:
                break
            # pull the offending row into row k and clear again
            i = bad[0]
            D[k] = [x + y for x, y in zip(D[k], D[i])]
            S[k] = [x + y for x, y in zip(S[k], S[i])]
        if D[k][k] < 0:
            D[k] = [-x for x in D[k]]
            S[k] = [-x for x in S[k]]
        k += 1
    return D, S, T, Ti


def invariant_factors(A: Sequence[Sequence[int]], nrows: int, ncols: int) -> list[int]:
    D, *_ = smith(A, nrows, ncols)
    return [D[i][i] for i in range(min(nrows, ncols)) if D[i][i]]


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^dim, stored as its row HNF basis."""

    dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, dim: int, vectors: Iterable[Sequence[int]]) -> "Lattice":
        vs = [tuple(int(a) for a in v) for v in vectors]
        for v in vs:
            if len(v) != dim:
                raise ValueError(f"vector of length {len(v)} in Z^{dim}")
        return cls(dim, tuple(row_basis(vs, dim)) if vs else ())

    @classmethod
    def full(cls, dim: int) -> "Lattice":
        return cls(dim, tuple(tuple(r) for r in identity(dim)))

    @classmethod
    def zero(cls, dim: int) -> "Lattice":
        return cls(dim, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.span(self.dim, self.basis + other.basis)

    def contains(self, v: Sequence[int]) -> bool:
        if not any(v):
            return True
        if not self.basis:
            return False
        return solve_left(self.basis, self.dim, v) is not None

    def coords(self, v: Sequence[int]) -> Optional[tuple]:
        """Coordinates of v in this lattice's basis, or None if v is outside."""
        if not self.basis:
            return () if not any(v) else None
        return solve_left(self.basis, self.dim, v)

    def __le__(self, other: "Lattice") -> bool:
        return all(other.contains(b) for b in self.basis)

    def image(self, M: Sequence[Sequence], target_dim: int) -> "Lattice":
        """M·L for a (possibly rational) matrix integral on L; raises if not integral."""
        return Lattice.span(target_dim, self.images(M, target_dim))

    def images(self, M: Sequence[Sequence], target_dim: int) -> list[tuple]:
        out = []
        for b in self.basis:
            w = as_integral(mat_vec(M, b)) if target_dim else ()
            if w is None:
                raise NonIntegralError(b)
            out.append(w)
        return out

    def preimage(self, M: Sequence[Sequence], target: "Lattice") -> "Lattice":
        """{z in self : M z in target}."""
        k = self.rank
        if k == 0:
            return self
        W = self.images(M, target.dim)
        if target.dim == 0:
            return self
        stacked = [list(w) for w in W] + [list(t) for t in target.basis]
        kern = left_kernel(stacked, target.dim)
        coeffs = [u[:k] for u in kern]
        return Lattice.span(self.dim, (
            tuple(sum(c[i] * self.basis[i][j] for i in range(k)) for j in range(self.dim))
            for c in coeffs))

    def intersect(self, other: "Lattice") -> "Lattice":
        return self.preimage(identity(self.dim), other)

    def scaled(self, a: int) -> "Lattice":
        return Lattice.span(self.dim, (tuple(a * x for x in b) for b in self.basis))


class NonIntegralError(ArithmeticError):
    def __init__(self, vector):
        super().__init__(f"map is not integral on lattice vector {vector}")
        self.vector = vector


@dataclass(frozen=True)
class Quotient:
    """Cyclic decomposition of cycles/boundaries.

    ``generators[i]`` is an ambient vector of order ``orders[i]`` (0 = infinite).
    Order-1 generators lie in B; they are kept apart in ``trivial`` so that
    generators plus trivial is a basis of Z.
    """

    orders: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]
    trivial: tuple[tuple[int, ...], ...] = ()

    @property
    def free_rank(self) -> int:
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(o for o in self.orders if o)


def quotient(Z: Lattice, B: Lattice) -> Quotient:
    """Decompose Z/B (B must lie in Z) into cyclic summands."""
    k = Z.rank
    if k == 0:
        return Quotient((), ())
    C = []
    for b in B.basis:
        c = Z.coords(b)
        if c is None:
            raise ValueError("boundary lattice is not contained in the cycle lattice")
        C.append(list(c))
    m = len(C)
    if m:
        D, _, _, Ti = smith(C, m, k)
        diag = [D[i][i] if i < m else 0 for i in range(k)]
    else:
        Ti = identity(k)
        diag = [0] * k
    orders, gens, triv = [], [], []
    for i in range(k):
        vec = tuple(sum(Ti[i][a] * Z.basis[a][j] for a in range(k)) for j in range(Z.dim))
        if diag[i] == 1:
            triv.append(vec)
            continue
        orders.append(diag[i])
        gens.append(vec)
    # torsion first (ascending by divisibility), free afterwards
    pairs = sorted(zip(orders, gens), key=lambda p: (p[0] == 0,))
    return Quotient(tuple(o for o, _ in pairs), tuple(g for _, g in pairs), tuple(triv))


def rational_extension(domain: Sequence[Sequence[int]], values: Sequence[Sequence[int]],
                       src_dim: int, tgt_dim: int) -> list[list[Fraction]]:
    """A rational tgt_dim x src_dim matrix sending domain[i] to values[i].

    ``domain`` must be linearly independent; it is completed to a basis of
    Q^src_dim by unit vectors, which are sent to zero.
    """
    cols = [list(map(Fraction, v)) for v in domain]
    basis = list(cols)
    for j in range(src_dim):
        if len(basis) == src_dim:
            break
        e = [Fraction(int(i == j)) for i in range(src_dim)]
        if _rank_q(basis + [e]) > len(basis):
            basis.append(e)
    images = [list(map(Fraction, v)) for v in values] + [[Fraction(0)] * tgt_dim] * (src_dim - len(cols))
    # M · Bmat = Imat  with columns as vectors, so M = Imat · Bmat^{-1}
    Binv = _inverse_q([[basis[c][r] for c in range(src_dim)] for r in range(src_dim)])
    Imat = [[images[c][r] for c in range(src_dim)] for r in range(tgt_dim)]
    return [[sum(Imat[r][k] * Binv[k][c] for k in range(src_dim)) for c in range(src_dim)]
            for r in range(tgt_dim)]


def _rank_q(vectors: list[list[Fraction]]) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for j in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][j] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][j] != 0:
                f = rows[i][j] / rows[rank][j]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _inverse_q(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for j in range(n):
        piv = next(i for i in range(j, n) if A[i][j] != 0)
        A[j], A[piv] = A[piv], A[j]
        p = A[j][j]
        A[j] = [a / p for a in A[j]]
        for i in range(n):
            if i != j and A[i][j] != 0:
                f = A[i][j]
                A[i] = [a - f * b for a, b in zip(A[i], A[j])]
    return [row[n:] for row in A]
