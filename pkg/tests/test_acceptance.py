"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

from __future__ import annotations

import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from cayleymenger import cmcore, identities
from cayleymenger.cmcore import (
    antisymmetric_matrix,
    cm_matrix,
    delta,
    delta_matrix,
    det_bareiss,
    det_laplace,
    gamma,
    x_det,
    x_matrix,
)
from cayleymenger.geometry import (
    DistanceMatrix,
    circumradius_squared,
    gamma_value,
    gram_oracle,
    is_realizable,
    volume_squared,
)
from cayleymenger.polyring import content, dist, is_homogeneous, partial_degree, var

F = Fraction


@pytest.fixture
def cold():
    cmcore.clear_cache()
    start = time.perf_counter()
    yield lambda: time.perf_counter() - start


def d(i, j):
    return var(dist(i, j))


def test_01_closed_forms(record_criterion, cold):
    record_criterion("1. closed forms gamma(1), delta(1), delta(2) (< 1 s)")
    assert gamma(1) == 2 * d(0, 1) ** 2
    assert delta(1) == -d(0, 1) ** 4
    assert delta(2) == 2 * d(0, 1) ** 2 * d(0, 2) ** 2 * d(1, 2) ** 2
    assert cold() < 1.0


def test_02_heron(record_criterion, cold):
    record_criterion("2. Heron factorization of -gamma(2); (3,4,5) area^2 = 36 (< 1 s)")
    a, b, c = d(0, 1), d(1, 2), d(0, 2)
    assert -gamma(2) == (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)
    assert volume_squared(DistanceMatrix.from_upper([3, 4, 5])) == 36
    assert cold() < 1.0


def test_03_ptolemy(record_criterion, cold):
    record_criterion("3. Ptolemy factorization of delta(3) (< 5 s)")
    assert delta(3) == identities.ptolemy_product()
    assert cold() < 5.0


def test_04_homogeneity(record_criterion, cold):
    record_criterion("4. gamma(n) of degree 2n, delta(n) of degree 2n+2, n <= 5 (< 60 s)")
    for n in range(1, 6):
        assert is_homogeneous(gamma(n)) == (True, 2 * n)
        assert is_homogeneous(delta(n)) == (True, 2 * n + 2)
    assert cold() < 60.0


def test_05_content(record_criterion):
    record_criterion("5. content of gamma(n), delta(n+1) is 1 (n even) / 2 (n odd), n <= 5")
    for n in range(1, 6):
        want = 2 if n % 2 else 1
        assert content(gamma(n)) == want
        assert content(delta(n + 1)) == want


def test_06_base_collapse_recurrence(record_criterion):
    record_criterion("6. base identity 2<=n<=5, collapse 3<=n<=5, recurrence p+2<=n<=5")
    report = identities.VerificationReport()
    for n in range(2, 6):
        report.extend(identities.check_lambda_base(n))
    for n in range(3, 6):
        report.extend(identities.check_delta_collapse(n))
    pairs = [(n, p) for n in range(3, 6) for p in range(1, n - 1)]
    assert pairs == [(3, 1), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3)]
    for n, p in pairs:
        report.extend(identities.check_recurrence(n, p))
    assert report.passed, [c for c in report.failures]
    assert len(report) == 4 + 1 + 3 + 6


def test_07_homogenization(record_criterion):
    record_criterion("7. homogenization identity 2<=n<=5; partial degree 4 for n>=3 (2 at n=2)")
    for n in range(2, 6):
        report = identities.check_homogenization(n)
        assert report.passed, report.failures
        pd = partial_degree(gamma(n - 1), identities.homogenization_group(n))
        # gamma(1) = 2 d_0_1^2 only has degree 2 in its group
        assert pd == (4 if n >= 3 else 2)


def test_08_mod2(record_criterion):
    record_criterion("8. content(det X_n) even and det A_n = 0 for odd n <= 7")
    for n in (1, 3, 5, 7):
        assert content(x_det(n)) % 2 == 0
        assert det_laplace(antisymmetric_matrix(n)) == 0


def test_09_algorithm_cross_check(record_criterion):
    record_criterion("9. det_laplace == det_bareiss on builders up to order 7 and 100 random integer matrices")
    from cayleymenger.cmcore import SymbolicMatrix

    builders = [(cm_matrix, 5), (delta_matrix, 6), (x_matrix, 7), (antisymmetric_matrix, 7)]
    for build, top in builders:
        for n in range(1, top + 1):
            M = build(n)
            assert det_laplace(M) == det_bareiss(M)
    rng = random.Random(909)
    for k in range(100):
        m = 1 + k % 6
        M = SymbolicMatrix([[rng.randint(-20, 20) for _ in range(m)] for _ in range(m)])
        assert det_laplace(M) == det_bareiss(M)


def test_10_geometry_oracle(record_criterion):
    record_criterion("10. realizability/volume match the Gram oracle on 200+ random tables; regular simplices n <= 8 (< 30 s)")
    start = time.perf_counter()
    rng = random.Random(10)
    agreed = realizable = 0
    for k in range(240):
        m = 3 + k % 4
        # entries in [1/4, 4]; every third table near-regular so that
        # realizable cases are well represented
        if k % 3:
            values = [F(rng.randint(4, 64), 16) for _ in range(m * (m - 1) // 2)]
        else:
            values = [F(rng.randint(14, 18), 16) for _ in range(m * (m - 1) // 2)]
        dm = DistanceMatrix.from_upper(values)
        g = gram_oracle(dm)
        assert is_realizable(dm) == g.realizable
        if g.realizable:
            realizable += 1
            assert volume_squared(dm) == g.volume_squared
        agreed += 1
    assert agreed >= 200 and realizable >= 50
    for n in range(1, 9):
        dm = DistanceMatrix.from_upper([1] * (n * (n + 1) // 2))
        assert gamma_value(dm) == (-1) ** (n + 1) * (n + 1)
        assert volume_squared(dm) == F(n + 1, 2 ** n * math.factorial(n) ** 2)
        assert gram_oracle(dm).volume_squared == volume_squared(dm)
    assert time.perf_counter() - start < 30.0


def test_11_circumradius(record_criterion):
    record_criterion("11. circumradius^2: (3,4,5) 25/4, equilateral 1/3, regular tetrahedron 3/8")
    assert circumradius_squared(DistanceMatrix.from_upper([3, 4, 5])) == F(25, 4)
    assert circumradius_squared(DistanceMatrix.from_upper([1, 1, 1])) == F(1, 3)
    assert circumradius_squared(DistanceMatrix.from_upper([1] * 6)) == F(3, 8)


def test_12_proof_skeleton(record_criterion):
    record_criterion("12. every identity the irreducibility proofs rest on verifies (criteria 5-8 via the suite)")
    report = identities.run_suite(5, ["base", "collapse", "recurrence", "homog", "content", "mod2", "p1"])
    assert report.passed
    assert len(report) == identities.expected_entry_count(
        5, ["base", "collapse", "recurrence", "homog", "content", "mod2", "p1"]
    )


def test_13_end_to_end(record_criterion, tmp_path):
    record_criterion("13. `verify --max-n 5` exits 0 in < 120 s with a byte-reproducible report")
    outputs = []
    for k in range(2):
        doc = tmp_path / f"report{k}.json"
        start = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "cayleymenger", "verify", "--max-n", "5", "--json", str(doc)],
            capture_output=True,
            text=True,
        )
        elapsed = time.perf_counter() - start
        assert proc.returncode == 0, proc.stderr
        assert elapsed < 120.0
        outputs.append((proc.stdout, doc.read_bytes()))
    assert outputs[0] == outputs[1]
    assert outputs[0][0].splitlines()[-1] == "PASS: 71 checks, 0 failed"
