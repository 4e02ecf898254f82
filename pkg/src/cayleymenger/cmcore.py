"""Symbolic Cayley-Menger matrices and exact determinants.

Two independent determinant routines are provided: memoized cofactor
expansion (:func:`det_laplace`) and fraction-free elimination
(:func:`det_bareiss`).  ``gamma``/``delta``/``lambda_`` use the former and are
cached per argument.
"""

from __future__ import annotations

import threading
from itertools import combinations
from typing import Sequence

from .errors import CapExceeded, InvalidDimension
from .polyring import (
    Polynomial,
    PolyLike,
    as_polynomial,
    dist,
    exact_divide,
    substitute,
    tau,
    var,
)

DEFAULT_CAP = 6

_cap = DEFAULT_CAP
_cache: dict[tuple, Polynomial] = {}
_cache_lock = threading.Lock()


def symbolic_cap() -> int:
    return _cap


def set_symbolic_cap(n: int) -> None:
    """Change the largest ``n`` accepted by :func:`gamma`.

    The cap bounds the matrix order at ``n + 2``; ``delta`` and ``x_det``
    accept any argument whose matrix fits in that order.
    """
    global _cap
    if n < 1:
        raise InvalidDimension(f"cap must be >= 1, got {n}")
    _cap = n


class SymbolicMatrix:
    """Square matrix of polynomials, stored as a tuple of row tuples."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[PolyLike]]):
        m = len(rows)
        if m < 1:
            raise InvalidDimension("matrix must have order >= 1")
        for r in rows:
            if len(r) != m:
                raise InvalidDimension("matrix must be square")
        self.rows = tuple(tuple(as_polynomial(x) for x in r) for r in rows)

    @property
    def order(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, SymbolicMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"SymbolicMatrix([{body}])"

    def minor(self, i: int, j: int) -> "SymbolicMatrix":
        """Delete row ``i`` and column ``j``."""
        return SymbolicMatrix(
            [[x for c, x in enumerate(r) if c != j] for rr, r in enumerate(self.rows) if rr != i]
        )

    def is_symmetric(self) -> bool:
        m = self.order
        return all(self.rows[i][j] == self.rows[j][i] for i in range(m) for j in range(i + 1, m))


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise InvalidDimension(f"dimension must be an integer >= 1, got {n!r}")


def _sq(i: int, j: int) -> Polynomial:
    if i > j:
        i, j = j, i
    return var(dist(i, j)) ** 2


def cm_matrix(n: int) -> SymbolicMatrix:
    """The bordered (n+2)x(n+2) Cayley-Menger matrix on points 0..n."""
    _check_n(n)
    m = n + 2
    rows = []
    for r in range(m):
        row = []
        for c in range(m):
            if r == c:
                row.append(0)
            elif r == 0 or c == 0:
                row.append(1)
            else:
                row.append(_sq(r - 1, c - 1))
        rows.append(row)
    return SymbolicMatrix(rows)


def delta_matrix(n: int) -> SymbolicMatrix:
    """Squared-distance matrix on points 0..n (CM matrix without its border)."""
    _check_n(n)
    return SymbolicMatrix(
        [[0 if r == c else _sq(r, c) for c in range(n + 1)] for r in range(n + 1)]
    )


def x_matrix(n: int) -> SymbolicMatrix:
    """General symmetric n x n matrix with zero diagonal.

    Entry ``(i, j)`` for ``i < j`` is the variable ``d_{i+1}_{j+1}``, i.e. the
    1-based ``x_ij`` reuses the distance variable kind.
    """
    _check_n(n)
    return SymbolicMatrix(
        [
            [0 if r == c else var(dist(min(r, c) + 1, max(r, c) + 1)) for c in range(n)]
            for r in range(n)
        ]
    )


def antisymmetric_matrix(n: int) -> SymbolicMatrix:
    """``x_matrix(n)`` with the strictly lower triangle negated."""
    _check_n(n)
    x = x_matrix(n)
    return SymbolicMatrix(
        [[-x[r, c] if r > c else x[r, c] for c in range(n)] for r in range(n)]
    )


def det_laplace(M: SymbolicMatrix) -> Polynomial:
    """Determinant by cofactor expansion along rows, memoized on column subsets.

    Rows are consumed top to bottom, so a subproblem is identified by the
    bitmask of columns still available; its first row is fixed by the mask's
    popcount.  The table is filled bottom-up, one popcount level at a time.
    """
    m = M.order
    rows = M.rows
    full = (1 << m) - 1
    prev: dict[int, Polynomial] = {0: Polynomial.constant(1)}
    for size in range(1, m + 1):
        row = rows[m - size]
        cur: dict[int, Polynomial] = {}
        for mask in _masks_of_size(m, size):
            acc = Polynomial()
            pos = 0
            for c in range(m):
                bit = 1 << c
                if not mask & bit:
                    continue
                entry = row[c]
                if entry:
                    sub = prev[mask ^ bit]
                    if sub:
                        t = entry * sub
                        acc = acc - t if pos & 1 else acc + t
                pos += 1
            cur[mask] = acc
        prev = cur
    return prev[full]


def _masks_of_size(m: int, size: int):
    for cols in combinations(range(m), size):
        mask = 0
        for c in cols:
            mask |= 1 << c
        yield mask


def det_bareiss(M: SymbolicMatrix) -> Polynomial:
    """Determinant by fraction-free (Bareiss) elimination.

    The pivot is the first nonzero entry at or below the diagonal in the
    current column; a column with no nonzero candidate means the
    determinant is zero.  Every division is exact in the integral domain, so
    a NotDivisible from :func:`exact_divide` here signals a bug.
    """
    a = [list(r) for r in M.rows]
    m = len(a)
    sign = 1
    prev = Polynomial.constant(1)
    for k in range(m - 1):
        piv = next((r for r in range(k, m) if a[r][k]), None)
        if piv is None:
            return Polynomial()
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, m):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, m):
                num = akk * row_i[j]
                if aik and row_k[j]:
                    num = num - aik * row_k[j]
                row_i[j] = exact_divide(num, prev) if num else num
            row_i[k] = Polynomial()
        prev = akk
    d = a[m - 1][m - 1]
    return -d if sign < 0 else d


def _cached(key, compute):
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    value = compute()
    with _cache_lock:
        return _cache.setdefault(key, value)


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def _check_order(order: int, what: str) -> None:
    if order > _cap + 2:
        raise CapExceeded(
            f"{what} needs a matrix of order {order}, above the symbolic cap "
            f"(n = {_cap}, order {_cap + 2})"
        )


def gamma(n: int) -> Polynomial:
    """The Cayley-Menger determinant on points 0..n, homogeneous of degree 2n."""
    _check_n(n)
    _check_order(n + 2, f"gamma({n})")
    return _cached(("gamma", n), lambda: det_laplace(cm_matrix(n)))


def delta(n: int) -> Polynomial:
    """Determinant of the squared-distance matrix on points 0..n (degree 2n+2)."""
    _check_n(n)
    _check_order(n + 1, f"delta({n})")
    return _cached(("delta", n), lambda: det_laplace(delta_matrix(n)))


def x_det(n: int) -> Polynomial:
    """det(x_matrix(n))."""
    _check_n(n)
    _check_order(n, f"x_det({n})")
    return _cached(("x", n), lambda: det_laplace(x_matrix(n)))


def tower_map(n: int, p: int) -> dict:
    """The substitution d_i_l -> t_l for p+1 <= l <= n, 0 <= i < l."""
    return {dist(i, l): var(tau(l)) for l in range(p + 1, n + 1) for i in range(l)}


def lambda_(n: int, p: int) -> Polynomial:
    """Gamma_n with every distance to a vertex beyond ``p`` collapsed to t_l.

    Lives in the variables d_i_j (j <= p) and t_{p+1}..t_n;
    ``lambda_(n, n) == gamma(n)``.
    """
    _check_n(n)
    if not isinstance(p, int) or not 1 <= p <= n:
        raise InvalidDimension(f"lambda needs 1 <= p <= n, got n={n}, p={p}")
    if p == n:
        return gamma(n)
    return _cached(("lambda", n, p), lambda: substitute(gamma(n), tower_map(n, p)))


def _halve(p: Polynomial) -> Polynomial:
    return exact_divide(p, Polynomial.constant(2))


def normalized_gamma(n: int) -> Polynomial:
    """gamma(n) for even n, gamma(n)/2 for odd n."""
    g = gamma(n)
    return _halve(g) if n % 2 else g


def normalized_delta(n: int) -> Polynomial:
    """delta(n)/2 for even n, delta(n) for odd n."""
    d = delta(n)
    return d if n % 2 else _halve(d)


def normalized_x(n: int) -> Polynomial:
    """det(x_matrix(n)) for even n, half of it for odd n."""
    x = x_det(n)
    return _halve(x) if n % 2 else x


def relabel(p: Polynomial, perm: Sequence[int]) -> Polynomial:
    """Apply the point permutation ``k -> perm[k]`` to every d_i_j in ``p``."""
    mapping = {}
    for v in p.variables():
        if v.kind == 0:
            i, j = perm[v.a], perm[v.b]
            mapping[v] = var(dist(min(i, j), max(i, j)))
    return substitute(p, mapping)


__all__ = [
    "DEFAULT_CAP",
    "SymbolicMatrix",
    "antisymmetric_matrix",
    "clear_cache",
    "cm_matrix",
    "delta",
    "delta_matrix",
    "det_bareiss",
    "det_laplace",
    "gamma",
    "lambda_",
    "normalized_delta",
    "normalized_gamma",
    "normalized_x",
    "relabel",
    "set_symbolic_cap",
    "symbolic_cap",
    "tower_map",
    "x_det",
    "x_matrix",
]
