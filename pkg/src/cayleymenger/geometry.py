"""Exact distance-geometry predicates over rational edge lengths.

Every quantity comes from an integer determinant: squared distances are
scaled by the lcm of their denominators, the determinant is taken by
fraction-free elimination, and the scale is divided back out.  Nothing here
touches floating point.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    CayleyMengerError,
    DegenerateSimplex,
    InvalidDistance,
    NonPositiveTau,
    TooFewPoints,
)

RationalLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"\s*[+-]?(?:\d+(?:/\d+)?|\d*\.\d+|\d+\.)\s*")


def parse_rational(value: RationalLike) -> Fraction:
    """Exact rational from an int, Fraction, or text ``"3"``, ``"0.25"``, ``"1/4"``.

    Floats are refused since they are already rounded.
    """
    if isinstance(value, bool):
        raise InvalidDistance(f"not a rational number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL_RE.fullmatch(value):
            raise InvalidDistance(f"not an integer, decimal or p/q: {value!r}")
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise InvalidDistance(f"zero denominator in {value!r}") from None
    raise InvalidDistance(f"not a rational number: {value!r}")


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise distances between ``m`` labelled points.

    ``d`` is the upper triangle in row-major order:
    (0,1), (0,2), ..., (0,m-1), (1,2), ..., (m-2,m-1).
    """

    m: int
    d: tuple[Fraction, ...]

    def __post_init__(self):
        if self.m < 1:
            raise TooFewPoints(f"need at least one point, got {self.m}")
        d = tuple(parse_rational(x) for x in self.d)
        if len(d) != self.m * (self.m - 1) // 2:
            raise InvalidDistance(
                f"{self.m} points need {self.m * (self.m - 1) // 2} distances, got {len(d)}"
            )
        for x in d:
            if x <= 0:
                raise InvalidDistance(f"distances between distinct points must be positive, got {x}")
        object.__setattr__(self, "d", d)

    @classmethod
    def from_upper(cls, values: Iterable[RationalLike]) -> "DistanceMatrix":
        values = list(values)
        m = (1 + math.isqrt(1 + 8 * len(values))) // 2
        if m * (m - 1) // 2 != len(values):
            raise InvalidDistance(f"{len(values)} is not a triangular number of distances")
        return cls(m, tuple(values))

    @classmethod
    def from_function(cls, m: int, f) -> "DistanceMatrix":
        return cls(m, tuple(f(i, j) for i in range(m) for j in range(i + 1, m)))

    def _pos(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        if i == j or not 0 <= i or j >= self.m:
            raise IndexError(f"no distance stored for ({i}, {j})")
        return i * (2 * self.m - i - 1) // 2 + (j - i - 1)

    def dist(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        return self.d[self._pos(i, j)]

    def sq(self, i: int, j: int) -> Fraction:
        x = self.dist(i, j)
        return x * x

    def subset(self, points: Sequence[int]) -> "DistanceMatrix":
        k = len(points)
        return DistanceMatrix.from_function(k, lambda i, j: self.dist(points[i], points[j]))

    def relabel(self, perm: Sequence[int]) -> "DistanceMatrix":
        """Point ``k`` of the result is point ``perm[k]`` of ``self``."""
        return self.subset(perm)

    def scaled(self, s: RationalLike) -> "DistanceMatrix":
        s = parse_rational(s)
        return DistanceMatrix(self.m, tuple(x * s for x in self.d))

    def to_json(self) -> dict:
        return {"points": self.m, "d": [_format_rational(x) for x in self.d]}

    @classmethod
    def from_json(cls, doc: dict) -> "DistanceMatrix":
        if not isinstance(doc, dict) or set(doc) != {"points", "d"}:
            raise InvalidDistance("distance-matrix document needs exactly the fields 'points' and 'd'")
        m = doc["points"]
        if not isinstance(m, int) or isinstance(m, bool):
            raise InvalidDistance("'points' must be an integer")
        if not isinstance(doc["d"], list):
            raise InvalidDistance("'d' must be an array")
        return cls(m, tuple(doc["d"]))


def load_distance_matrix(path) -> DistanceMatrix:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidDistance(f"{path}: not valid JSON ({exc})") from None
    return DistanceMatrix.from_json(doc)


def dump_distance_matrix(dm: DistanceMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dm.to_json(), fh)
        fh.write("\n")


# -- integer determinants ----------------------------------------------------


def int_det(a: list[list[int]]) -> int:
    """Determinant of an integer matrix by Bareiss elimination with row swaps."""
    a = [list(r) for r in a]
    m = len(a)
    if m == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(m - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, m) if a[r][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, m):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, m):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[m - 1][m - 1]


def leading_minors(a: list[list[int]]) -> list[int]:
    """Leading principal minors of an integer matrix, in order of size.

    Bareiss without pivoting leaves the k-th leading minor on the diagonal
    after k-1 steps.  Stops early, returning the minors so far plus a
    trailing zero, at the first vanishing minor.
    """
    a = [list(r) for r in a]
    m = len(a)
    out = []
    prev = 1
    for k in range(m):
        akk = a[k][k]
        out.append(akk)
        if akk == 0:
            break
        rk = a[k]
        for i in range(k + 1, m):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, m):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
        prev = akk
    return out


def _scaled_squares(dm: DistanceMatrix) -> tuple[int, list[list[int]]]:
    # Integer matrix L * delta_ij^2 and the scale L.
    sq = [[dm.sq(i, j) for j in range(dm.m)] for i in range(dm.m)]
    scale = math.lcm(*(x.denominator for row in sq for x in row))
    return scale, [[int(x * scale) for x in row] for row in sq]


def gamma_value(dm: DistanceMatrix) -> Fraction:
    """Exact Cayley-Menger determinant of ``m = n + 1`` points."""
    if dm.m < 2:
        raise TooFewPoints("the Cayley-Menger determinant needs at least 2 points")
    n = dm.m - 1
    scale, sq = _scaled_squares(dm)
    cm = [[0] + [1] * dm.m] + [[1] + row for row in sq]
    return Fraction(int_det(cm), scale ** n)


def delta_value(dm: DistanceMatrix) -> Fraction:
    """Exact determinant of the squared-distance matrix of ``dm``."""
    if dm.m < 2:
        raise TooFewPoints("needs at least 2 points")
    scale, sq = _scaled_squares(dm)
    return Fraction(int_det(sq), scale ** dm.m)


def _volume_factor(n: int) -> int:
    return 2 ** n * math.factorial(n) ** 2


def volume_squared(dm: DistanceMatrix) -> Fraction:
    """Squared n-volume of the simplex on ``m = n + 1`` points.

    Negative values mean the distances are not Euclidean.
    """
    n = dm.m - 1
    g = gamma_value(dm)
    return (-1) ** (n + 1) * g / _volume_factor(n)


def is_degenerate(dm: DistanceMatrix) -> bool:
    return gamma_value(dm) == 0


def sign_criterion(dm: DistanceMatrix) -> bool:
    """The single-determinant test ``(-1)^(n+1) * gamma > 0``.

    Necessary for realizability; sufficient only together with the same
    test on the nested faces (see :func:`is_realizable`).
    """
    n = dm.m - 1
    return (-1) ** (n + 1) * gamma_value(dm) > 0


def nested_gamma_values(dm: DistanceMatrix) -> list[Fraction]:
    """gamma of the nested faces {0,1}, {0,1,2}, ..., {0..n}."""
    if dm.m < 2:
        raise TooFewPoints("needs at least 2 points")
    return [gamma_value(dm.subset(range(k + 1))) for k in range(1, dm.m)]


def is_realizable(dm: DistanceMatrix) -> bool:
    """True iff ``dm`` are the edge lengths of a nondegenerate n-simplex.

    Applies the sign test ``(-1)^(k+1) gamma_k > 0`` to every face in the
    chain {0,1} < {0,1,2} < ... < {0..n}.  The top-dimensional test alone
    also accepts some non-Euclidean tables, e.g. a tetrahedron with a
    face violating the triangle inequality; see :func:`sign_criterion`.
    """
    return all((-1) ** (k + 1) * g > 0 for k, g in enumerate(nested_gamma_values(dm), start=1))


def circumradius_squared(dm: DistanceMatrix) -> Fraction:
    """Squared radius of the sphere through all vertices: -delta / (2 gamma)."""
    g = gamma_value(dm)
    if g == 0:
        raise DegenerateSimplex("points lie in a proper affine subspace; no circumsphere")
    return -delta_value(dm) / (2 * g)


def is_cospherical(dm: DistanceMatrix) -> bool:
    """True iff the n+2 points lie on a common sphere or hyperplane of R^n.

    The two cases are not distinguished.
    """
    if dm.m < 3:
        raise TooFewPoints("cosphericity needs n + 2 >= 3 points")
    return delta_value(dm) == 0


# -- isosceles towers ------------------------------------------------------------


def tower_matrix(base: DistanceMatrix, taus: Sequence[RationalLike]) -> DistanceMatrix:
    """Extend ``base`` by vertices equidistant (``taus[k]``) from all previous ones."""
    taus = [parse_rational(t) for t in taus]
    for t in taus:
        if t <= 0:
            raise NonPositiveTau(f"tower heights must be positive, got {t}")
    p = base.m - 1
    m = base.m + len(taus)

    def f(i, j):
        return base.dist(i, j) if j <= p else taus[j - p - 1]

    return DistanceMatrix.from_function(m, f)


def tower_lambda_value(base: DistanceMatrix, taus: Sequence[RationalLike]) -> Fraction:
    """Lambda_{n,p} at (base distances, taus), by direct determinant evaluation."""
    if base.m < 2:
        raise TooFewPoints("the base needs at least 2 points")
    return gamma_value(tower_matrix(base, taus))


def tower_lambda_recurrence(base: DistanceMatrix, taus: Sequence[RationalLike]) -> Fraction:
    """Lambda_{n,p} via the two-term recurrence seeded from the base."""
    if base.m < 2:
        raise TooFewPoints("the base needs at least 2 points")
    taus = [parse_rational(t) for t in taus]
    for t in taus:
        if t <= 0:
            raise NonPositiveTau(f"tower heights must be positive, got {t}")
    g = gamma_value(base)
    if not taus:
        return g
    prev2, prev1 = g, -2 * g * taus[0] ** 2 - delta_value(base)
    for k in range(1, len(taus)):
        prev2, prev1 = prev1, -2 * prev1 * taus[k] ** 2 - prev2 * taus[k - 1] ** 4
    return prev1


def isosceles_volume_squared(
    base: DistanceMatrix, taus: Sequence[RationalLike], audit: bool = False
) -> Fraction:
    """Squared volume of the tower simplex built on ``base``.

    With ``audit=True`` the value is recomputed through the recurrence and a
    mismatch raises :class:`CayleyMengerError`.
    """
    lam = tower_lambda_value(base, taus)
    if audit:
        again = tower_lambda_recurrence(base, taus)
        if again != lam:
            raise CayleyMengerError(f"recurrence audit failed: {lam} != {again}")
    n = base.m - 1 + len(taus)
    return (-1) ** (n + 1) * lam / _volume_factor(n)


# -- Gram oracle ----------------------------------------------------------------


@dataclass(frozen=True)
class GramResult:
    realizable: bool
    volume_squared: Fraction | None
    minors: tuple[Fraction, ...] = ()


def gram_oracle(dm: DistanceMatrix) -> GramResult:
    """Independent check from the Gram matrix of edge vectors at vertex 0.

    G_ij = (d_0i^2 + d_0j^2 - d_ij^2) / 2.  Realizable iff G is positive
    definite (all leading minors > 0); then Vol^2 = det(G) / (n!)^2.
    """
    if dm.m < 2:
        raise TooFewPoints("needs at least 2 points")
    n = dm.m - 1
    scale, sq = _scaled_squares(dm)
    # 2 * scale * G, all integers
    g2 = [[sq[0][i] + sq[0][j] - sq[i][j] for j in range(1, n + 1)] for i in range(1, n + 1)]
    minors = leading_minors(g2)
    unit = 2 * scale
    exact = tuple(Fraction(x, unit ** (k + 1)) for k, x in enumerate(minors))
    if len(minors) == n and all(x > 0 for x in minors):
        return GramResult(True, exact[-1] / math.factorial(n) ** 2, exact)
    return GramResult(False, None, exact)


# -- auditable results ------------------------------------------------------------


@dataclass(frozen=True)
class GeometryResult:
    """A value plus the exact determinant values that decided it."""

    value: Union[Fraction, bool]
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        v = self.value
        return {
            "value": v if isinstance(v, bool) else _format_rational(v),
            "certificate": {k: _format_rational(x) for k, x in sorted(self.certificate.items())},
        }


def explain(op: str, dm: DistanceMatrix, taus: Sequence[RationalLike] = ()) -> GeometryResult:
    """Evaluate a named predicate and attach its certificate."""
    if op == "volume":
        return GeometryResult(volume_squared(dm), {"gamma": gamma_value(dm)})
    if op == "degenerate":
        g = gamma_value(dm)
        return GeometryResult(g == 0, {"gamma": g})
    if op == "realizable":
        cert = {f"gamma_{k}": g for k, g in enumerate(nested_gamma_values(dm), start=1)}
        return GeometryResult(is_realizable(dm), cert)
    if op == "circumradius":
        return GeometryResult(
            circumradius_squared(dm), {"gamma": gamma_value(dm), "delta": delta_value(dm)}
        )
    if op == "cospherical":
        return GeometryResult(is_cospherical(dm), {"delta": delta_value(dm)})
    if op == "isosceles":
        return GeometryResult(
            isosceles_volume_squared(dm, taus, audit=True),
            {"lambda": tower_lambda_value(dm, taus)},
        )
    raise ValueError(f"unknown geometry operation {op!r}")
