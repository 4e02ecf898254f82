"""Sparse multivariate polynomials with arbitrary-precision integer coefficients.

Variables are :class:`VarId` values: distances ``d_i_j`` (``i < j``) and
tower variables ``t_k`` (``k >= 2``).  A polynomial stores a dict from a
packed monomial key to a nonzero ``int`` coefficient.  Each variable owns a
16-bit field of the key (15 exponent bits plus a guard bit), so monomial
multiplication is integer addition and divisibility is a single borrow test.
The field layout is an internal detail; everything public speaks in terms of
``{VarId: exponent}`` maps.
"""

from __future__ import annotations

import heapq
import math
import re
import threading
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from .errors import MissingVariable, NotDivisible, ParseError, TargetTooSmall

Rational = Fraction

MINUS_INFINITY = float("-inf")
"""Degree reported for the zero polynomial."""

_FIELD = 16
_FIELD_MASK = (1 << _FIELD) - 1
_MAX_EXP = (1 << (_FIELD - 1)) - 1

DIST = 0
TAU = 1


class VarId(NamedTuple):
    """A variable: ``VarId(DIST, i, j)`` is d_i_j, ``VarId(TAU, k, 0)`` is t_k.

    Tuple ordering gives the required total order: every distance variable
    precedes every tower variable, distances compare by ``(i, j)`` and tower
    variables by ``k``.
    """

    kind: int
    a: int
    b: int

    def __str__(self):
        if self.kind == DIST:
            return f"d_{self.a}_{self.b}"
        return f"t_{self.a}"

    @classmethod
    def parse(cls, text: str) -> "VarId":
        m = _VAR_RE.fullmatch(text)
        if m is None:
            raise ParseError(f"not a variable name: {text!r}")
        try:
            if m.group(1) is not None:
                return dist(int(m.group(1)), int(m.group(2)))
            return tau(int(m.group(3)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None


_VAR_RE = re.compile(r"d_(\d+)_(\d+)|t_(\d+)")


def dist(i: int, j: int) -> VarId:
    """The distance variable d_i_j; requires ``0 <= i < j``."""
    if not 0 <= i < j:
        raise ValueError(f"distance variable needs 0 <= i < j, got ({i}, {j})")
    return VarId(DIST, i, j)


def tau(k: int) -> VarId:
    if k < 2:
        raise ValueError(f"tower variable needs k >= 2, got {k}")
    return VarId(TAU, k, 0)


# Variable registry: maps each VarId to the index of its field in packed keys.
_registry_lock = threading.Lock()
_var_index: dict[VarId, int] = {}
_index_var: list[VarId] = []
_guard = 0


def _index(v: VarId) -> int:
    try:
        return _var_index[v]
    except KeyError:
        pass
    global _guard
    with _registry_lock:
        if v not in _var_index:
            idx = len(_index_var)
            _index_var.append(v)
            _var_index[v] = idx
            _guard |= 1 << (idx * _FIELD + _FIELD - 1)
        return _var_index[v]


def _pack(exponents: Mapping[VarId, int]) -> int:
    key = 0
    for v, e in exponents.items():
        if not isinstance(v, VarId):
            raise TypeError(f"expected VarId, got {v!r}")
        if e < 0 or e > _MAX_EXP:
            raise ValueError(f"exponent {e} out of range for {v}")
        if e:
            key += e << (_index(v) * _FIELD)
    return key


def _unpack(key: int) -> list[tuple[VarId, int]]:
    out = []
    idx = 0
    while key:
        e = key & _FIELD_MASK
        if e:
            out.append((_index_var[idx], e))
        key >>= _FIELD
        idx += 1
    out.sort()
    return out


def _field(key: int, idx: int) -> int:
    return (key >> (idx * _FIELD)) & _FIELD_MASK


def _max_field(key: int) -> int:
    m = 0
    while key:
        m = max(m, key & _FIELD_MASK)
        key >>= _FIELD
    return m


def _check_overflow(terms: dict[int, int]) -> None:
    g = _guard
    for k in terms:
        if k & g:
            raise OverflowError(f"monomial exponent exceeds {_MAX_EXP}")


class Polynomial:
    """Immutable sparse polynomial over the integers.

    Build with :meth:`constant`, :meth:`variable`, :meth:`from_terms` or
    :func:`parse_polynomial`; combine with ``+``, ``-``, ``*`` and ``**``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self):
        self._terms: dict[int, int] = {}
        self._hash = None

    @classmethod
    def _make(cls, terms: dict[int, int]) -> "Polynomial":
        # Caller guarantees no zero coefficients and hands over ownership.
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: int) -> "Polynomial":
        c = int(c)
        return cls._make({0: c} if c else {})

    @classmethod
    def variable(cls, v: VarId) -> "Polynomial":
        return cls._make({_pack({v: 1}): 1})

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Mapping[VarId, int], int]]) -> "Polynomial":
        out: dict[int, int] = {}
        for exps, c in terms:
            k = _pack(exps)
            out[k] = out.get(k, 0) + int(c)
        return cls._make({k: c for k, c in out.items() if c})

    # -- inspection -------------------------------------------------------

    def terms(self) -> Iterator[tuple[dict[VarId, int], int]]:
        """Yield ``(monomial, coefficient)`` pairs in no particular order."""
        for k, c in self._terms.items():
            yield dict(_unpack(k)), c

    def coefficients(self) -> list[int]:
        return list(self._terms.values())

    def variables(self) -> set[VarId]:
        acc = 0
        for k in self._terms:
            acc |= k
        out = set()
        idx = 0
        while acc:
            if acc & _FIELD_MASK:
                out.add(_index_var[idx])
            acc >>= _FIELD
            idx += 1
        return out

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get(0, 0)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"Polynomial({canonical_string(self)!r})"

    def __str__(self):
        return canonical_string(self)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return Polynomial._make({k: -c for k, c in self._terms.items()})

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if len(self._terms) < len(other._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                del out[k]
        return Polynomial._make(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((kb, cb),) = b.items()
            out = {ka + kb: ca * cb for ka, ca in a.items()}
        else:
            out = {}
            get = out.get
            for kb, cb in b.items():
                for ka, ca in a.items():
                    k = ka + kb
                    out[k] = get(k, 0) + ca * cb
            out = {k: c for k, c in out.items() if c}
        _check_overflow(out)
        return Polynomial._make(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = Polynomial.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result


PolyLike = Union[Polynomial, int]


def _coerce(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, int):
        return Polynomial.constant(x)
    return NotImplemented


def as_polynomial(x: PolyLike) -> Polynomial:
    p = _coerce(x)
    if p is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to Polynomial")
    return p


def var(v: VarId) -> Polynomial:
    return Polynomial.variable(v)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def substitute(p: Polynomial, mapping: Mapping[VarId, PolyLike]) -> Polynomial:
    """Simultaneously replace variables by polynomials.

    Unmapped variables are left alone, and variables occurring in the
    replacement polynomials are never substituted again.
    """
    present = p.variables()
    images = {v: as_polynomial(img) for v, img in mapping.items() if v in present}
    if not images:
        return p
    if all(len(img) <= 1 for img in images.values()):
        return _substitute_monomial(p, images)

    mapped = [(_var_index[v], img) for v, img in images.items()]
    powers: dict[tuple[int, int], Polynomial] = {}
    out: dict[int, int] = {}
    for key, c in p._terms.items():
        rest = key
        factor = Polynomial.constant(c)
        for idx, img in mapped:
            e = _field(key, idx)
            if not e:
                continue
            rest -= e << (idx * _FIELD)
            pw = powers.get((idx, e))
            if pw is None:
                pw = powers[(idx, e)] = img ** e
            factor = factor * pw
            if not factor:
                break
        for k, fc in factor._terms.items():
            nk = k + rest
            out[nk] = out.get(nk, 0) + fc
    out = {k: c for k, c in out.items() if c}
    _check_overflow(out)
    return Polynomial._make(out)


def _substitute_monomial(p: Polynomial, images: dict[VarId, Polynomial]) -> Polynomial:
    # Every image is zero or a single term: rewrite keys directly.
    mapped = []
    for v, img in images.items():
        if img.is_zero():
            mapped.append((_var_index[v], None, 0, 0))
        else:
            ((ik, ic),) = img._terms.items()
            mapped.append((_var_index[v], ik, ic, _max_field(ik)))
    out: dict[int, int] = {}
    for key, c in p._terms.items():
        nk, nc = key, c
        for idx, ik, ic, mf in mapped:
            e = _field(key, idx)
            if not e:
                continue
            if ik is None:
                nc = 0
                break
            if e * mf > _MAX_EXP:
                raise OverflowError(f"monomial exponent exceeds {_MAX_EXP}")
            nk += e * ik - (e << (idx * _FIELD))
            if ic != 1:
                nc *= ic ** e
        if nc:
            out[nk] = out.get(nk, 0) + nc
    out = {k: c for k, c in out.items() if c}
    _check_overflow(out)
    return Polynomial._make(out)


def evaluate(p: Polynomial, values: Mapping[VarId, Union[Fraction, int]]) -> Fraction:
    """Exact value of ``p`` at a rational point.

    Raises :class:`MissingVariable` if a variable of ``p`` has no value.
    """
    for v in sorted(p.variables()):
        if v not in values:
            raise MissingVariable(v)
    vals = {_var_index[v]: Fraction(x) for v, x in values.items() if v in _var_index}
    powers: dict[tuple[int, int], Fraction] = {}
    total = Fraction(0)
    for key, c in p._terms.items():
        term = Fraction(c)
        idx = 0
        while key:
            e = key & _FIELD_MASK
            if e:
                pw = powers.get((idx, e))
                if pw is None:
                    pw = powers[(idx, e)] = vals[idx] ** e
                term *= pw
            key >>= _FIELD
            idx += 1
        total += term
    return total


def content(p: Polynomial) -> int:
    """gcd of the absolute values of the coefficients; ``content(0) == 0``."""
    return math.gcd(*p._terms.values()) if p._terms else 0


def _key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _FIELD_MASK
        key >>= _FIELD
    return d


def _group_degree(key: int, idxs: list[int]) -> int:
    return sum(_field(key, i) for i in idxs)


def _group_indices(vars: Iterable[VarId]) -> list[int]:
    return [_var_index[v] for v in set(vars) if v in _var_index]


def total_degree(p: Polynomial):
    if not p._terms:
        return MINUS_INFINITY
    return max(_key_degree(k) for k in p._terms)


def partial_degree(p: Polynomial, vars: Iterable[VarId]):
    """Maximum degree of a term in the given group of variables."""
    if not p._terms:
        return MINUS_INFINITY
    idxs = _group_indices(vars)
    return max(_group_degree(k, idxs) for k in p._terms)


def is_homogeneous(p: Polynomial) -> tuple[bool, int | None]:
    """``(True, degree)`` if all terms share one degree; zero gives ``(True, None)``."""
    degrees = {_key_degree(k) for k in p._terms}
    if not degrees:
        return True, None
    if len(degrees) == 1:
        return True, degrees.pop()
    return False, None


def is_group_homogeneous(p: Polynomial, vars: Iterable[VarId]) -> tuple[bool, int | None]:
    idxs = _group_indices(vars)
    degrees = {_group_degree(k, idxs) for k in p._terms}
    if not degrees:
        return True, None
    if len(degrees) == 1:
        return True, degrees.pop()
    return False, None


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    """Return ``r`` with ``q * r == p``.

    Runs multivariate division by leading terms; when ``q`` divides ``p``
    every leading term of the running remainder is divisible by the leading
    term of ``q``, so the first step where that fails proves non-divisibility.
    """
    if not q._terms:
        raise ZeroDivisionError("exact_divide by the zero polynomial")
    if not p._terms:
        return Polynomial()
    g = _guard
    lead = max(q._terms)
    lead_c = q._terms[lead]
    tail = [(k, c) for k, c in q._terms.items() if k != lead]

    rem = dict(p._terms)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quot: dict[int, int] = {}
    while heap:
        k = -heapq.heappop(heap)
        c = rem.get(k)
        if c is None:
            continue
        shifted = (k | g) - lead
        if shifted & g != g or c % lead_c:
            raise NotDivisible(
                "divisor does not divide dividend", Polynomial._make(dict(rem))
            )
        del rem[k]
        qk = shifted - g
        qc = c // lead_c
        quot[qk] = qc
        for tk, tc in tail:
            nk = qk + tk
            old = rem.get(nk)
            if old is None:
                rem[nk] = -qc * tc
                heapq.heappush(heap, -nk)
            else:
                s = old - qc * tc
                if s:
                    rem[nk] = s
                else:
                    del rem[nk]
    return Polynomial._make(quot)


def divides(q: Polynomial, p: Polynomial) -> bool:
    try:
        exact_divide(p, q)
    except NotDivisible:
        return False
    return True


def homogenize_group(p: Polynomial, vars: Iterable[VarId], target: int, h: VarId) -> Polynomial:
    """Pad each term with powers of ``h`` so its degree in ``vars`` becomes ``target``."""
    vars = set(vars)
    if h in vars:
        raise ValueError(f"homogenizing variable {h} belongs to the group")
    if h in p.variables():
        raise ValueError(f"homogenizing variable {h} already occurs in the polynomial")
    if p._terms and target < partial_degree(p, vars):
        raise TargetTooSmall(
            f"target {target} below partial degree {partial_degree(p, vars)}"
        )
    if target > _MAX_EXP:
        raise OverflowError(f"monomial exponent exceeds {_MAX_EXP}")
    idxs = _group_indices(vars)
    shift = _index(h) * _FIELD
    out = {k + ((target - _group_degree(k, idxs)) << shift): c for k, c in p._terms.items()}
    return Polynomial._make(out)


# -- text form -------------------------------------------------------------


def _sorted_items(p: Polynomial) -> list[tuple[int, int]]:
    idxs = [_var_index[v] for v in sorted(p.variables())]
    return sorted(
        p._terms.items(),
        key=lambda kc: tuple(_field(kc[0], i) for i in idxs),
        reverse=True,
    )


def _format_term(key: int, c: int) -> str:
    factors = [str(v) if e == 1 else f"{v}^{e}" for v, e in _unpack(key)]
    mag = abs(c)
    if not factors:
        return str(mag)
    if mag == 1:
        return "*".join(factors)
    return f"{mag}*" + "*".join(factors)


def iter_canonical_terms(p: Polynomial) -> Iterator[str]:
    """Yield the canonical rendering in chunks, one term at a time."""
    if not p._terms:
        yield "0"
        return
    for n, (k, c) in enumerate(_sorted_items(p)):
        body = _format_term(k, c)
        if n == 0:
            yield f"-{body}" if c < 0 else body
        else:
            yield f" - {body}" if c < 0 else f" + {body}"


def canonical_string(p: Polynomial) -> str:
    """Deterministic text form, terms in descending lexicographic order.

    >>> canonical_string(Polynomial.constant(2) * var(dist(0, 1)) ** 2)
    '2*d_0_1^2'
    """
    return "".join(iter_canonical_terms(p))


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(d_\d+_\d+|t_\d+)|([*^+\-]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        if m.group(1) is not None:
            tokens.append(("int", m.group(1)))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
        pos = m.end()
    return tokens


def parse_polynomial(text: str) -> Polynomial:
    """Parse the grammar produced by :func:`canonical_string`.

    Terms are an optional integer coefficient followed by ``*``-joined
    factors ``var`` or ``var^e``, joined by ``+``/``-``; only the first term
    may carry a leading ``-``.
    """
    tokens = _tokenize(text)
    if tokens == [("int", "0")]:
        return Polynomial()
    if not tokens:
        raise ParseError("empty polynomial text")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take(kind, value=None):
        nonlocal pos
        tk, tv = peek()
        if tk != kind or (value is not None and tv != value):
            want = value or kind
            raise ParseError(f"expected {want} at token {pos}, got {tv!r}")
        pos += 1
        return tv

    def factor():
        v = VarId.parse(take("var"))
        e = 1
        if peek() == ("op", "^"):
            take("op", "^")
            e = int(take("int"))
            if e < 1:
                raise ParseError("exponents must be positive")
        return v, e

    def term():
        coeff = 1
        exps: dict[VarId, int] = {}
        if peek()[0] == "int":
            coeff = int(take("int"))
            if coeff == 0:
                raise ParseError("zero coefficient in term")
            if peek() != ("op", "*"):
                return {}, coeff
            take("op", "*")
        while True:
            v, e = factor()
            exps[v] = exps.get(v, 0) + e
            if peek() != ("op", "*"):
                return exps, coeff
            take("op", "*")

    terms = []
    sign = 1
    if peek() == ("op", "-"):
        take("op", "-")
        sign = -1
    while True:
        exps, c = term()
        terms.append((exps, sign * c))
        tk, tv = peek()
        if tk is None:
            break
        if tk != "op" or tv not in "+-":
            raise ParseError(f"expected + or - at token {pos}, got {tv!r}")
        take("op")
        sign = 1 if tv == "+" else -1
    return Polynomial.from_terms(terms)


def in_squares(p: Polynomial) -> Polynomial:
    """Return ``q`` with ``p(x) == q(x^2)``; every exponent of ``p`` must be even.

    Lets a polynomial in distances be evaluated from squared distances,
    which stay rational when the distances themselves do not.
    """
    out = {}
    for key, c in p._terms.items():
        half = 0
        idx = 0
        k = key
        while k:
            e = k & _FIELD_MASK
            if e & 1:
                raise ValueError("polynomial has an odd exponent")
            half += (e >> 1) << (idx * _FIELD)
            k >>= _FIELD
            idx += 1
        out[half] = c
    return Polynomial._make(out)
