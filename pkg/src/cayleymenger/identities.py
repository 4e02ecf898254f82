"""Symbolic verification of the Cayley-Menger identities.

Each ``check_*`` function returns a :class:`VerificationReport`.  A check
passes iff a difference polynomial (or, for spot checks, a difference of
rationals) is exactly zero; failures record the nonzero difference as the
witness instead of raising.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import cmcore
from .cmcore import delta, gamma, lambda_, normalized_delta, normalized_gamma, x_det
from .errors import CayleyMengerError, InvalidDimension, NotDivisible
from .polyring import (
    Polynomial,
    canonical_string,
    content,
    dist,
    evaluate,
    exact_divide,
    homogenize_group,
    in_squares,
    partial_degree,
    substitute,
    tau,
    var,
)


class Status(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    parameters: tuple[int, ...]
    status: Status
    witness: str

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_json(self) -> dict:
        return {
            "check_id": self.check_id,
            "parameters": list(self.parameters),
            "status": self.status.value,
            "witness": self.witness,
        }

    @classmethod
    def from_json(cls, rec: dict) -> "CheckResult":
        return cls(rec["check_id"], tuple(rec["parameters"]), Status(rec["status"]), rec["witness"])


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    def __len__(self):
        return len(self.checks)

    def __iter__(self):
        return iter(self.checks)

    def to_json(self) -> dict:
        return {
            "status": (Status.PASS if self.passed else Status.FAIL).value,
            "total": len(self.checks),
            "failed": len(self.failures),
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def dumps_lines(self) -> str:
        return "".join(json.dumps(c.to_json(), sort_keys=True) + "\n" for c in self.checks)

    @classmethod
    def loads(cls, text: str) -> "VerificationReport":
        doc = json.loads(text)
        return cls([CheckResult.from_json(r) for r in doc["checks"]])

    @classmethod
    def loads_lines(cls, text: str) -> "VerificationReport":
        return cls([CheckResult.from_json(json.loads(line)) for line in text.splitlines() if line.strip()])


def _zero(check_id: str, params: Sequence[int], diff) -> CheckResult:
    if isinstance(diff, Polynomial):
        witness = canonical_string(diff)
    else:
        q = Fraction(diff)
        witness = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    status = Status.FAIL if diff else Status.PASS
    return CheckResult(check_id, tuple(params), status, witness)


def _equal(check_id: str, params: Sequence[int], actual: int, expected: int) -> CheckResult:
    status = Status.PASS if actual == expected else Status.FAIL
    return CheckResult(check_id, tuple(params), status, f"{actual} (expected {expected})")


def _guarded(check_id: str, params: Sequence[int], compute: Callable[[], CheckResult]) -> CheckResult:
    # A computation error is a failed check, not a crash.
    try:
        return compute()
    except (NotDivisible, ArithmeticError, CayleyMengerError) as exc:
        if isinstance(exc, InvalidDimension):
            raise
        witness = f"{type(exc).__name__}: {exc}"
        rem = getattr(exc, "remainder", None)
        if rem is not None:
            witness += f"; remainder {canonical_string(rem)}"
        return CheckResult(check_id, tuple(params), Status.FAIL, witness)


def _d(i: int, j: int) -> Polynomial:
    return var(dist(i, j))


def _t(k: int) -> Polynomial:
    return var(tau(k))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InvalidDimension(message)


def heron_product(a: Polynomial, b: Polynomial, c: Polynomial) -> Polynomial:
    return (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)


def ptolemy_product() -> Polynomial:
    """The four-factor product equal to delta(3), pairing opposite edges."""
    x = _d(0, 1) * _d(2, 3)
    y = _d(0, 2) * _d(1, 3)
    z = _d(0, 3) * _d(1, 2)
    return -(x + y + z) * (x + y - z) * (x - y + z) * (-x + y + z)


# -- individual checks -----------------------------------------------------------


def check_closed_forms() -> VerificationReport:
    d01, d02, d12 = _d(0, 1), _d(0, 2), _d(1, 2)
    return VerificationReport(
        [
            _zero("closed_gamma", (1,), gamma(1) - 2 * d01 ** 2),
            _zero("closed_delta", (1,), delta(1) + d01 ** 4),
            _zero("closed_delta", (2,), delta(2) - 2 * d01 ** 2 * d02 ** 2 * d12 ** 2),
        ]
    )


def check_heron() -> VerificationReport:
    a, b, c = _d(0, 1), _d(1, 2), _d(0, 2)
    product = heron_product(a, b, c)
    out = [_zero("heron", (), product + gamma(2))]
    # 16 * area^2 at integer triangles: (3,4,5) has area 6, (1,1,1) area^2 3/16.
    for sides, area_sq in (((3, 4, 5), Fraction(36)), ((1, 1, 1), Fraction(3, 16))):
        point = dict(zip((dist(0, 1), dist(1, 2), dist(0, 2)), sides))
        lhs = -evaluate(gamma(2), point)
        rhs = evaluate(product, point)
        ok = lhs == rhs == 16 * area_sq
        out.append(
            CheckResult(
                "heron_numeric", sides, Status.PASS if ok else Status.FAIL, f"-gamma={lhs} product={rhs}"
            )
        )
    return VerificationReport(out)


def check_ptolemy() -> VerificationReport:
    d3 = delta(3)
    out = [_zero("ptolemy", (), d3 - ptolemy_product())]
    sq = in_squares(d3)
    edges = [dist(i, j) for i in range(4) for j in range(i + 1, 4)]
    # Unit square (diagonals 0-2 and 1-3 of squared length 2) is concyclic.
    square = {v: 1 for v in edges}
    square[dist(0, 2)] = square[dist(1, 3)] = 2
    out.append(_zero("ptolemy_square", (), evaluate(sq, square)))
    ones = {v: 1 for v in edges}
    out.append(_zero("ptolemy_regular", (), evaluate(sq, ones) + 3))
    return VerificationReport(out)


def check_lambda_base(n: int) -> VerificationReport:
    _require(2 <= n, f"base identity needs n >= 2, got {n}")
    diff = lambda_(n, n - 1) + 2 * gamma(n - 1) * _t(n) ** 2 + delta(n - 1)
    out = [_zero("lambda_base", (n,), diff)]
    if n == 3:
        a, b, c = _d(0, 1), _d(1, 2), _d(0, 2)
        halved = heron_product(a, b, c) * _t(3) ** 2 - a ** 2 * b ** 2 * c ** 2
        out.append(
            _guarded(
                "lambda_base_heron",
                (3,),
                lambda: _zero("lambda_base_heron", (3,), exact_divide(lambda_(3, 2), Polynomial.constant(2)) - halved),
            )
        )
    return VerificationReport(out)


def check_delta_collapse(n: int) -> VerificationReport:
    _require(n >= 3, f"collapse identity needs n >= 3, got {n}")
    k = n - 1
    collapsed = substitute(delta(k), {dist(i, k): _t(k) for i in range(k)})
    return VerificationReport([_zero("delta_collapse", (n,), collapsed - _t(k) ** 4 * gamma(n - 2))])


def check_recurrence(n: int, p: int) -> VerificationReport:
    _require(p >= 1 and n >= p + 2, f"recurrence needs p >= 1 and n >= p + 2, got n={n}, p={p}")
    diff = lambda_(n, p) + 2 * lambda_(n - 1, p) * _t(n) ** 2 + lambda_(n - 2, p) * _t(n - 1) ** 4
    return VerificationReport([_zero("recurrence", (n, p), diff)])


def homogenization_group(n: int) -> set:
    return {dist(0, i) for i in range(1, n)}


def check_homogenization(n: int) -> VerificationReport:
    """Delta_n with d_i_n -> 1 (1 <= i < n) is gamma(n-1) homogenized in d_0_n.

    The group {d_0_i : 1 <= i < n} has partial degree 4 in gamma(n-1) for
    n >= 3; gamma(1) = 2 d_0_1^2 only reaches 2, so for n = 2 the entry
    checks that the homogenization target 4 is admissible instead.
    """
    _require(n >= 2, f"homogenization identity needs n >= 2, got {n}")
    group = homogenization_group(n)
    g = gamma(n - 1)
    primed = substitute(delta(n), {dist(i, n): 1 for i in range(1, n)})
    pd = partial_degree(g, group)
    out = [_equal("homog_partial_degree", (n,), pd, 4 if n >= 3 else 2)]
    out.append(
        _guarded(
            "homogenization",
            (n,),
            lambda: _zero("homogenization", (n,), homogenize_group(g, group, 4, dist(0, n)) - primed),
        )
    )
    out.append(_zero("dehomogenization", (n,), substitute(primed, {dist(0, n): 1}) - g))
    return VerificationReport(out)


def _parity_content(n: int) -> int:
    return 2 if n % 2 else 1


def check_content(n: int) -> VerificationReport:
    """content(gamma(n)) and content(delta(n+1)) are 2 for odd n, 1 for even n."""
    _require(n >= 1, f"content check needs n >= 1, got {n}")
    want = _parity_content(n)
    out = [
        _equal("content_gamma", (n,), content(gamma(n)), want),
        _equal("content_delta", (n + 1,), content(delta(n + 1)), want),
        _guarded("normalized_gamma", (n,), lambda: _equal("normalized_gamma", (n,), content(normalized_gamma(n)), 1)),
        _guarded(
            "normalized_delta", (n + 1,), lambda: _equal("normalized_delta", (n + 1,), content(normalized_delta(n + 1)), 1)
        ),
    ]
    return VerificationReport(out)


def check_mod2(n: int) -> VerificationReport:
    """For odd n: det(X_n) has even content and det(A_n) vanishes."""
    _require(n >= 1 and n % 2 == 1, f"mod-2 lemma concerns odd n, got {n}")
    c = content(x_det(n))
    parity = CheckResult("mod2_content", (n,), Status.PASS if c % 2 == 0 else Status.FAIL, str(c))
    anti = cmcore.det_laplace(cmcore.antisymmetric_matrix(n))
    return VerificationReport([parity, _zero("antisymmetric_det", (n,), anti)])


def check_lambda_p1(n: int) -> VerificationReport:
    _require(n >= 2, f"d_0_1 | lambda(n, 1) needs n >= 2, got {n}")
    lam = lambda_(n, 1)
    vanish = _zero("lambda_p1_vanish", (n,), substitute(lam, {dist(0, 1): 0}))

    def divide():
        q = exact_divide(lam, _d(0, 1))
        return _zero("lambda_p1_divide", (n,), q * _d(0, 1) - lam)

    return VerificationReport([vanish, _guarded("lambda_p1_divide", (n,), divide)])


# -- suite ------------------------------------------------------------------------

SUITES = ("closed", "heron", "ptolemy", "base", "collapse", "recurrence", "homog", "content", "mod2", "p1")


def _suite_plan(max_n: int) -> dict[str, list[tuple[int, ...]]]:
    return {
        "closed": [()],
        "heron": [()],
        "ptolemy": [()],
        "base": [(n,) for n in range(2, max_n + 1)],
        "collapse": [(n,) for n in range(3, max_n + 1)],
        "recurrence": [(n, p) for n in range(3, max_n + 1) for p in range(1, n - 1)],
        "homog": [(n,) for n in range(2, max_n + 1)],
        "content": [(n,) for n in range(1, max_n + 1)],
        "mod2": [(n,) for n in range(1, max_n + 3, 2)],
        "p1": [(n,) for n in range(2, max_n + 1)],
    }


_RUNNERS = {
    "closed": check_closed_forms,
    "heron": check_heron,
    "ptolemy": check_ptolemy,
    "base": check_lambda_base,
    "collapse": check_delta_collapse,
    "recurrence": check_recurrence,
    "homog": check_homogenization,
    "content": check_content,
    "mod2": check_mod2,
    "p1": check_lambda_p1,
}

# Entries produced per invocation of each check.
_ENTRIES_PER_CALL = {
    "closed": 3,
    "heron": 3,
    "ptolemy": 3,
    "base": 1,
    "collapse": 1,
    "recurrence": 1,
    "homog": 3,
    "content": 4,
    "mod2": 2,
    "p1": 2,
}


def _normalize_suites(suites: Iterable[str] | None) -> list[str]:
    if suites is None:
        return list(SUITES)
    chosen = set(suites)
    unknown = chosen - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    return [s for s in SUITES if s in chosen]


def expected_entry_count(max_n: int, suites: Iterable[str] | None = None) -> int:
    plan = _suite_plan(max_n)
    total = 0
    for s in _normalize_suites(suites):
        total += len(plan[s]) * _ENTRIES_PER_CALL[s]
        if s == "base" and max_n >= 3:
            total += 1  # extra halved Heron form at n = 3
    return total


def run_suite(max_n: int, suites: Iterable[str] | None = None) -> VerificationReport:
    """Run every selected check for all admissible parameters up to ``max_n``."""
    if not 1 <= max_n <= cmcore.symbolic_cap():
        raise InvalidDimension(f"max_n must lie in 1..{cmcore.symbolic_cap()}, got {max_n}")
    plan = _suite_plan(max_n)
    report = VerificationReport()
    for s in _normalize_suites(suites):
        for params in plan[s]:
            report.extend(_RUNNERS[s](*params))
    return report
