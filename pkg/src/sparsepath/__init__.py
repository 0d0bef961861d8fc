"""Regularization paths for the lasso, elastic net and group lasso with
hybrid safe-strong feature screening.

Typical use::

    from sparsepath import standardize, compute_lambda_max, make_lambda_path, solve_path

    design = standardize(X, y)
    path = make_lambda_path(compute_lambda_max(design))
    solution, diagnostics = solve_path(design, path, strategy="ssr-bedpp")
"""

from ._kernels import available_backends, backend_name, set_backend, use_backend
from .design import (
    GroupedDesign,
    LambdaPath,
    SafePrecompute,
    StandardizedDesign,
    compute_lambda_max,
    group_standardize,
    make_lambda_path,
    safe_precompute,
    standardize,
)
from .errors import *  # noqa: F401,F403
from .path import (
    PathDiagnostics,
    PathSolution,
    Strategy,
    count_violations,
    rejection_profile,
    solve_path,
)
from .screening import (
    GroupSafePrecompute,
    ScreeningState,
    SeqPrecompute,
    bedpp_enet_filter,
    bedpp_filter,
    bedpp_group_filter,
    group_safe_precompute,
    hssr_combine,
    sedpp_filter,
    seq_precompute,
    ssr_filter,
    ssr_group_filter,
)
from .solver import (
    Problem,
    ResidualState,
    SolveConfig,
    cd_sweep_enet,
    cd_sweep_lasso,
    gd_sweep_group,
    kkt_certify,
    kkt_check,
    objective,
    solve_working_set,
)

__version__ = "0.1.0"
