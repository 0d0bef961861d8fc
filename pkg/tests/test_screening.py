import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_design, random_grouped
from sparsepath import (
    ResidualState,
    SolveConfig,
    bedpp_enet_filter,
    bedpp_filter,
    bedpp_group_filter,
    compute_lambda_max,
    group_safe_precompute,
    group_standardize,
    hssr_combine,
    safe_precompute,
    sedpp_filter,
    seq_precompute,
    solve_working_set,
    ssr_filter,
    ssr_group_filter,
    standardize,
)
from sparsepath.errors import InvalidAlpha, LambdaOutOfRange, NonDecreasingLambda
from sparsepath.screening import hssr_rejected
from sparsepath.synth import SynthSpec, check_safety, generate, ista_solve


# Term-by-term evaluations of the rules from fresh dense products, sharing
# nothing with the cached implementations.

def bedpp_direct(X, y, lam, alpha=1.0):
    n = X.shape[0]
    xty = X.T @ y
    star = int(np.argmax(np.abs(xty)))
    lm = np.abs(xty[star]) / (alpha * n)
    xs = X[:, star]
    ridge = 1.0 + lam * (1.0 - alpha)
    coef = np.sign(xty[star]) * alpha * lm / ridge
    lhs = np.abs((lm + lam) * (X.T @ y) - (lm - lam) * coef * (X.T @ xs))
    rad = n * (y @ y) * ridge - n * n * alpha * alpha * lm * lm
    rhs = 2 * n * alpha * lam * lm - (lm - lam) * np.sqrt(max(rad, 0.0))
    keep = ~(lhs < rhs)
    keep[star] = True
    if rhs <= 0:
        keep[:] = True
    return keep


def sedpp_direct(X, y, beta, lam_k, lam_next):
    n = X.shape[0]
    fit = X @ beta
    r = y - fit
    a = y @ fit
    c = (lam_k - lam_next) / (lam_k * lam_next)
    lhs = np.abs((X.T @ r) / lam_k + 0.5 * c * (X.T @ y - a * (X.T @ fit) / (fit @ fit)))
    rhs = n - 0.5 * c * np.sqrt(max(n * (y @ y) - n * a * a / (fit @ fit), 0.0))
    return ~(lhs < rhs)


def group_bedpp_direct(d, lam):
    X, y, n = d.values, d.y, d.n
    blocks = [X[:, d.block(g)] for g in range(d.G)]
    norms = np.array([np.linalg.norm(B.T @ y) / (n * np.sqrt(B.shape[1])) for B in blocks])
    star = int(np.argmax(norms))
    lm = norms[star]
    Xs = blocks[star]
    v = Xs @ (Xs.T @ y)
    slack = np.sqrt(max(n * (y @ y) - n * n * lm * lm * Xs.shape[1], 0.0))
    keep = np.ones(d.G, dtype=bool)
    for g, B in enumerate(blocks):
        u = (lam + lm) * (B.T @ y) - (lm - lam) * (B.T @ v) / n
        rhs = 2 * n * lam * lm * np.sqrt(B.shape[1]) - (lm - lam) * slack
        keep[g] = not (np.linalg.norm(u) < rhs)
    keep[star] = True
    return keep


def test_ssr_examples():
    z = np.array([1.0, 0.0, 0.0])
    np.testing.assert_array_equal(ssr_filter(z, None, 1.0, 0.9), [False, True, True])
    # equal lambdas: threshold lam_k, strict
    z = np.array([0.5, 0.49, 0.51])
    np.testing.assert_array_equal(ssr_filter(z, None, 0.5, 0.5), [False, True, False])
    # vacuous threshold
    assert not ssr_filter(np.zeros(4), None, 1.0, 0.5).any()
    assert not ssr_filter(np.zeros(4), [0, 1], 1.0, 0.4).any()
    # candidates restrict the output
    np.testing.assert_array_equal(ssr_filter(np.zeros(3), [1], 1.0, 0.9), [False, True, False])


def test_ssr_group_examples(fixture_a_grouped):
    d = fixture_a_grouped
    lm = compute_lambda_max(d)
    # at r = y the group norms are ||X_g^T y|| / n = (1, 0)
    gz = np.array([np.linalg.norm(d.values[:, d.block(g)].T @ d.y) / d.n for g in range(d.G)])
    np.testing.assert_allclose(gz, [1.0, 0.0], atol=1e-15)
    rej = ssr_group_filter(gz, None, d.sizes, lm, 0.9 * lm)
    np.testing.assert_array_equal(rej, [False, True])
    assert not ssr_group_filter(np.zeros(3), None, np.ones(3), 1.0, 0.5).any()


def test_ssr_group_unit_sizes_match_lasso():
    rng = np.random.default_rng(0)
    z = rng.normal(size=50) * 0.5
    np.testing.assert_array_equal(
        ssr_group_filter(np.abs(z), None, np.ones(50, dtype=int), 1.0, 0.8),
        ssr_filter(z, None, 1.0, 0.8),
    )


@pytest.mark.parametrize("lam", [1.0, 0.9, 0.5, 0.1, 1e-6])
def test_bedpp_fixture_a(fixture_a, lam):
    keep = bedpp_filter(safe_precompute(fixture_a), lam)
    np.testing.assert_array_equal(keep, [True, False, False])


def test_bedpp_range_errors(fixture_a):
    pre = safe_precompute(fixture_a)
    with pytest.raises(LambdaOutOfRange):
        bedpp_filter(pre, 1.5)
    with pytest.raises(LambdaOutOfRange):
        bedpp_filter(pre, 0.0)


def test_bedpp_at_lambda_max_keeps_only_max_correlated():
    d = random_design(n=100, p=50, seed=1)
    pre = safe_precompute(d)
    keep = bedpp_filter(pre, pre.lambda_max)
    expected = ~(np.abs(pre.xty) < d.n * pre.lambda_max)
    expected[pre.star_index] = True
    np.testing.assert_array_equal(keep, expected)


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("frac", [0.95, 0.8, 0.5])
def test_bedpp_matches_direct_evaluation(seed, frac):
    X, y, _ = generate(SynthSpec(n=100, p=50, seed=seed))
    d = standardize(X, y)
    pre = safe_precompute(d)
    lam = frac * pre.lambda_max
    np.testing.assert_array_equal(bedpp_filter(pre, lam),
                                  bedpp_direct(np.asarray(d.values), d.y, lam))


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_bedpp_enet_matches_direct_evaluation(alpha):
    d = random_design(n=100, p=80, seed=4)
    pre = safe_precompute(d)
    lm = pre.lambda_max / alpha
    for frac in (0.9, 0.5):
        np.testing.assert_array_equal(
            bedpp_enet_filter(pre, frac * lm, alpha),
            bedpp_direct(np.asarray(d.values), d.y, frac * lm, alpha),
        )


def test_bedpp_enet_fixture_a(fixture_a):
    pre = safe_precompute(fixture_a)
    np.testing.assert_array_equal(bedpp_enet_filter(pre, 2.0, 0.5), [True, False, False])
    with pytest.raises(InvalidAlpha):
        bedpp_enet_filter(pre, 0.5, 1.5)
    with pytest.raises(LambdaOutOfRange):
        bedpp_enet_filter(pre, 2.5, 0.5)


@pytest.mark.parametrize("seed", range(5))
def test_bedpp_enet_alpha_one_is_lasso_rule(seed):
    d = random_design(n=80, p=200, seed=seed)
    pre = safe_precompute(d)
    for lam in np.linspace(pre.lambda_max, 0.1 * pre.lambda_max, 25):
        np.testing.assert_array_equal(bedpp_enet_filter(pre, lam, 1.0), bedpp_filter(pre, lam))


@pytest.mark.parametrize("lam_frac", [1.0, 0.7, 0.3, 1e-3])
def test_group_bedpp_fixture_a(fixture_a_grouped, lam_frac):
    gpre = group_safe_precompute(fixture_a_grouped)
    assert gpre.star_group == 0 and gpre.W_star == 2
    assert abs(gpre.slack) < 1e-14
    keep = bedpp_group_filter(gpre, lam_frac * gpre.lambda_max)
    np.testing.assert_array_equal(keep, [True, False])


@pytest.mark.parametrize("frac", [0.9, 0.7, 0.4])
def test_group_bedpp_matches_direct_evaluation(frac):
    d = random_grouped(n=150, G=50, W=4, seed=3, nonzero=5)
    gpre = group_safe_precompute(d)
    lam = frac * gpre.lambda_max
    np.testing.assert_array_equal(bedpp_group_filter(gpre, lam), group_bedpp_direct(d, lam))


@pytest.mark.parametrize("seed", range(5))
def test_group_rules_with_unit_groups_match_lasso(seed):
    X, y, _ = generate(SynthSpec(n=60, p=120, seed=seed))
    s = standardize(X, y)
    g = group_standardize(X, y, np.arange(120))
    pre, gpre = safe_precompute(s), group_safe_precompute(g)
    assert gpre.star_group == pre.star_index
    for lam in np.linspace(pre.lambda_max, 0.1 * pre.lambda_max, 20)[1:]:
        np.testing.assert_array_equal(bedpp_group_filter(gpre, lam), bedpp_filter(pre, lam))


@pytest.mark.parametrize("seed", range(5))
def test_sedpp_at_null_fit_is_bedpp(seed):
    d = random_design(n=80, p=300, seed=seed)
    pre = safe_precompute(d)
    lm = pre.lambda_max
    for lam in (0.99 * lm, 0.9 * lm, 0.5 * lm):
        seq = seq_precompute(d, d.y.copy(), lm, lam)
        z = pre.xty / d.n
        np.testing.assert_array_equal(sedpp_filter(pre, seq, z, lm, lam), bedpp_filter(pre, lam))


def test_sedpp_matches_direct_evaluation():
    d = random_design(n=100, p=150, seed=7)
    pre = safe_precompute(d)
    lam_k, lam_next = 0.5 * pre.lambda_max, 0.45 * pre.lambda_max
    st_ = ResidualState.zeros(d)
    solve_working_set(st_, d, None, lam_k, SolveConfig(tol=1e-12))
    z = d.values.T @ st_.r / d.n
    seq = seq_precompute(d, st_.r, lam_k, lam_next)
    np.testing.assert_array_equal(
        sedpp_filter(pre, seq, z, lam_k, lam_next),
        sedpp_direct(np.asarray(d.values), d.y, st_.beta, lam_k, lam_next),
    )


def test_sedpp_small_step_approaches_kkt_condition():
    d = random_design(n=100, p=150, seed=8)
    pre = safe_precompute(d)
    lam_k = 0.5 * pre.lambda_max
    st_ = ResidualState.zeros(d)
    solve_working_set(st_, d, None, lam_k, SolveConfig(tol=1e-13))
    z = d.values.T @ st_.r / d.n
    seq = seq_precompute(d, st_.r, lam_k, lam_k * (1 - 1e-9))
    keep = sedpp_filter(pre, seq, z, lam_k, lam_k * (1 - 1e-9))
    clear = np.abs(np.abs(z) - lam_k) > 1e-6
    np.testing.assert_array_equal(keep[clear], (np.abs(z) >= lam_k)[clear])


@pytest.mark.parametrize("lam_k", [0.9, 0.5, 0.3, 0.11])
def test_sedpp_keeps_active_feature_on_exact_fit(fixture_a, lam_k):
    # y lies in the span of the fit, so x_1 sits exactly on the rule boundary
    pre = safe_precompute(fixture_a)
    st_ = ResidualState.zeros(fixture_a)
    solve_working_set(st_, fixture_a, None, lam_k)
    z = fixture_a.values.T @ st_.r / fixture_a.n
    seq = seq_precompute(fixture_a, st_.r, lam_k, lam_k - 0.1)
    assert seq.root < 1e-14
    np.testing.assert_array_equal(sedpp_filter(pre, seq, z, lam_k, lam_k - 0.1),
                                  [True, False, False])


def test_sedpp_rejects_non_decreasing(fixture_a):
    pre = safe_precompute(fixture_a)
    with pytest.raises(NonDecreasingLambda):
        seq_precompute(fixture_a, fixture_a.y, 0.5, 0.5)
    seq = seq_precompute(fixture_a, fixture_a.y, 0.5, 0.4)
    with pytest.raises(NonDecreasingLambda):
        sedpp_filter(pre, seq, np.zeros(3), 0.4, 0.5)


def test_hssr_combinator():
    safe = np.array([True, True, False, True])
    ssr_rej = np.array([False, True, True, False])
    np.testing.assert_array_equal(hssr_combine(safe, ssr_rej), [True, False, False, True])
    np.testing.assert_array_equal(hssr_rejected(safe, ssr_rej), [False, True, True, False])
    everything = np.ones(4, dtype=bool)
    np.testing.assert_array_equal(hssr_combine(everything, ssr_rej), ~ssr_rej)


def test_hssr_fixture_a(fixture_a):
    pre = safe_precompute(fixture_a)
    safe = bedpp_filter(pre, 0.9)
    z = pre.xty / fixture_a.n
    H = hssr_combine(safe, ssr_filter(z, safe, 1.0, 0.9))
    np.testing.assert_array_equal(H, [True, False, False])
    assert set(np.flatnonzero(~H)) >= set(np.flatnonzero(ssr_filter(z, None, 1.0, 0.9)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), frac=st.floats(1e-3, 1.0), alpha=st.floats(0.05, 1.0))
def test_star_always_survives(seed, frac, alpha):
    d = random_design(n=20, p=30, seed=seed, support=3)
    pre = safe_precompute(d)
    assert bedpp_filter(pre, frac * pre.lambda_max)[pre.star_index]
    assert bedpp_enet_filter(pre, frac * pre.lambda_max / alpha, alpha)[pre.star_index]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), frac=st.floats(0.05, 0.99))
def test_safe_rules_never_reject_active_features(seed, frac):
    d = random_design(n=20, p=40, seed=seed, support=4)
    pre = safe_precompute(d)
    lam = frac * pre.lambda_max
    oracle = ista_solve(d, lam, tol=1e-12)
    assert check_safety(~bedpp_filter(pre, lam), oracle.beta).passed
    lam_prev = min(lam * 1.1, pre.lambda_max)
    if lam_prev > lam:
        prev = ista_solve(d, lam_prev, tol=1e-12)
        r = d.y - d.values @ prev.beta
        seq = seq_precompute(d, r, lam_prev, lam)
        keep = sedpp_filter(pre, seq, d.values.T @ r / d.n, lam_prev, lam)
        # the previous solution is only accurate to the oracle tolerance
        assert check_safety(~keep, oracle.beta, active_tol=1e-6).passed
