import numpy as np
import pytest

from conftest import random_design, random_grouped
from sparsepath import (
    Problem,
    SolveConfig,
    Strategy,
    compute_lambda_max,
    count_violations,
    make_lambda_path,
    rejection_profile,
    solve_path,
)
from sparsepath import path as path_mod
from sparsepath import screening
from sparsepath.errors import PathAborted
from sparsepath.synth import ista_path

ALL = [s.value for s in Strategy]
GROUP = [s.value for s in path_mod.GROUP_STRATEGIES]


def _path(design, K=20, ratio=0.1, alpha=1.0):
    return make_lambda_path(compute_lambda_max(design, alpha), K, ratio)


@pytest.mark.parametrize("strategy", ALL)
def test_single_point_path_is_zero(fixture_a, strategy):
    sol, diag = solve_path(fixture_a, [1.0], strategy)
    assert sol.coefs.shape == (1, 3)
    assert not sol.coefs.any()
    assert count_violations(sol) == 0


def test_fixture_a_closed_form_path(fixture_a):
    path = make_lambda_path(1.0, K=9)
    seen = []

    def monitor(k, state, res):
        seen.append(state.strong_set.copy())

    sol, diag = solve_path(fixture_a, path, "ssr-bedpp", monitor=monitor)
    np.testing.assert_allclose(sol.coefs[:, 0], 1.0 - path.values, atol=1e-15)
    assert not sol.coefs[:, 1:].any()
    assert not sol.violations.any()
    assert (sol.strong_size[1:] == 1).all()
    prof = rejection_profile(diag)
    np.testing.assert_allclose(prof["safe"][1:], 2.0 / 3.0)
    assert prof["safe"][0] == 0.0


def test_strategy_none_profile_is_zero():
    d = random_design(seed=1)
    _, diag = solve_path(d, _path(d), "none")
    prof = rejection_profile(diag)
    for v in prof.values():
        assert not v.any()


@pytest.mark.parametrize("seed", range(2))
def test_strategies_agree_and_match_oracle(seed):
    d = random_design(n=60, p=150, seed=seed, support=8)
    path = _path(d, K=15)
    cfg = SolveConfig(tol=1e-9)
    ref = solve_path(d, path, "none", cfg)[0].coefs
    for s in ALL[1:]:
        np.testing.assert_allclose(solve_path(d, path, s, cfg)[0].coefs, ref, atol=1e-6)
    oracle = ista_path(d, path)
    np.testing.assert_allclose(oracle.coefs, ref, atol=1e-6)


@pytest.mark.parametrize("alpha", [0.3, 0.7])
def test_enet_strategies_agree(alpha):
    d = random_design(n=60, p=120, seed=3, support=8)
    prob = Problem.enet(alpha)
    path = _path(d, K=12, alpha=alpha)
    cfg = SolveConfig(tol=1e-9)
    ref = solve_path(d, path, "none", cfg, prob)[0].coefs
    for s in ALL[1:]:
        np.testing.assert_allclose(solve_path(d, path, s, cfg, prob)[0].coefs, ref, atol=1e-6)
    np.testing.assert_allclose(ista_path(d, path, prob).coefs, ref, atol=1e-6)


def test_group_strategies_agree():
    d = random_grouped(n=80, G=30, W=3, seed=2, nonzero=4)
    path = _path(d, K=12)
    cfg = SolveConfig(tol=1e-9)
    ref = solve_path(d, path, "none", cfg)[0].coefs
    for s in GROUP[1:]:
        np.testing.assert_allclose(solve_path(d, path, s, cfg)[0].coefs, ref, atol=1e-6)
    np.testing.assert_allclose(ista_path(d, path).coefs, ref, atol=1e-6)
    with pytest.raises(ValueError):
        solve_path(d, path, "sedpp")


def test_path_validation(fixture_a):
    with pytest.raises(ValueError):
        solve_path(fixture_a, [0.9, 0.5], "ssr")
    with pytest.raises(ValueError):
        solve_path(fixture_a, [1.0, 1.0], "ssr")
    with pytest.raises(ValueError):
        solve_path(fixture_a, [1.0, 0.5], "ssr", problem=Problem.group())


@pytest.mark.parametrize("strategy", ["ssr", "ssr-bedpp"])
def test_correlation_cache_is_current_at_strong_step(strategy):
    d = random_design(n=80, p=300, seed=5, support=10)
    X = np.asarray(d.values)
    checked = []

    def monitor(k, state, res):
        S = np.flatnonzero(state.safe_set)
        fresh = X[:, S].T @ res.r / d.n
        np.testing.assert_allclose(state.z[S], fresh, atol=1e-10, rtol=0)
        checked.append(k)

    solve_path(d, _path(d, K=30), strategy, monitor=monitor)
    assert checked == list(range(1, 31))


def test_group_cache_is_current_at_strong_step():
    d = random_grouped(n=80, G=40, W=3, seed=5, nonzero=4)

    def monitor(k, state, res):
        for g in np.flatnonzero(state.safe_set):
            B = d.values[:, d.block(g)]
            assert abs(state.z[g] - np.linalg.norm(B.T @ res.r) / d.n) < 1e-10

    solve_path(d, _path(d, K=20), "ssr-bedpp", monitor=monitor)


def test_safe_flag_never_reenables_and_counts_add_up():
    d = random_design(n=100, p=400, seed=6, support=10)
    sol, diag = solve_path(d, _path(d, K=60), "ssr-bedpp")
    on = diag.safe_active[1:]
    off_at = np.flatnonzero(~on)
    assert off_at.size, "expected the safe rule to switch off on this path"
    assert not on[off_at[0]:].any()
    total = diag.safe_rejected + diag.strong_rejected + diag.strong_size
    assert (total == diag.units).all()
    assert (diag.safe_rejected[1:][off_at[0]:] == 0).all()


def test_runs_are_bitwise_reproducible():
    d = random_design(n=80, p=200, seed=7)
    path = _path(d, K=25)
    a = solve_path(d, path, "ssr-bedpp")[0]
    b = solve_path(d, path, "ssr-bedpp")[0]
    np.testing.assert_array_equal(a.coefs, b.coefs)
    np.testing.assert_array_equal(a.sweeps, b.sweeps)


def test_pure_safe_strategies_have_no_violations():
    d = random_design(n=80, p=200, seed=8)
    for s in ("bedpp", "sedpp"):
        sol, _ = solve_path(d, _path(d), s)
        assert count_violations(sol) == 0
        assert not sol.kkt_rounds.any()


def test_kkt_loop_repairs_an_overeager_strong_rule(monkeypatch):
    d = random_design(n=60, p=100, seed=9, support=8)
    path = _path(d, K=10)
    cfg = SolveConfig(tol=1e-9)
    ref = solve_path(d, path, "none", cfg)[0].coefs

    def reject_all(z, candidates, lam_k, lam_next, alpha=1.0):
        return np.asarray(candidates, dtype=bool).copy()

    monkeypatch.setattr(screening, "ssr_filter", reject_all)
    for s in ("ssr", "ssr-bedpp"):
        sol, diag = solve_path(d, path, s, cfg)
        np.testing.assert_allclose(sol.coefs, ref, atol=1e-6)
        assert count_violations(sol) > 0
        assert (sol.kkt_rounds[1:] >= 1).all()
        assert (diag.strong_size[1:] == 0).all()


def test_kkt_round_cap_aborts_with_partial_result(monkeypatch):
    d = random_design(n=60, p=100, seed=9, support=8)
    monkeypatch.setattr(screening, "ssr_filter",
                        lambda z, c, a, b, alpha=1.0: np.asarray(c, dtype=bool).copy())
    monkeypatch.setattr(path_mod, "MAX_KKT_ROUNDS", 0)
    with pytest.raises(PathAborted) as exc:
        solve_path(d, _path(d, K=10), "ssr")
    partial, diag = exc.value.partial
    assert partial.coefs.shape[0] == 1


def test_active_cycling_reports_violations():
    d = random_design(n=60, p=100, seed=4, support=8)
    sol, _ = solve_path(d, _path(d, K=10), "ac")
    # cycling on the support cannot find entering features without the check
    assert count_violations(sol) > 0


def test_max_iter_is_a_diagnostic():
    d = random_design(n=60, p=100, seed=4, support=8)
    sol, _ = solve_path(d, _path(d, K=5), "ssr-bedpp", SolveConfig(tol=1e-14, max_iter=1))
    assert not sol.converged[1:].all()


def test_standardized_coefs_for_groups():
    d = random_grouped(n=60, G=10, W=3, seed=1)
    sol, _ = solve_path(d, _path(d, K=5), "ssr-bedpp")
    std = sol.standardized_coefs(d)
    assert std.shape == sol.coefs.shape
    np.testing.assert_allclose(std[-1], d.to_standardized_basis(sol.coefs[-1]))
