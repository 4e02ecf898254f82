"""Exact Cayley-Menger determinants, their identities, and distance-geometry predicates."""

from .cmcore import (
    SymbolicMatrix,
    cm_matrix,
    delta,
    delta_matrix,
    det_bareiss,
    det_laplace,
    gamma,
    lambda_,
    normalized_delta,
    normalized_gamma,
    normalized_x,
    set_symbolic_cap,
    symbolic_cap,
    x_matrix,
)
from .geometry import (
    DistanceMatrix,
    circumradius_squared,
    gamma_value,
    gram_oracle,
    is_cospherical,
    is_degenerate,
    is_realizable,
    isosceles_volume_squared,
    volume_squared,
)
from .identities import VerificationReport, run_suite
from .polyring import (
    Polynomial,
    VarId,
    canonical_string,
    content,
    dist,
    evaluate,
    exact_divide,
    parse_polynomial,
    substitute,
    tau,
    var,
)

__version__ = "0.1.0"
