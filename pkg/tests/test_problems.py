import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _frozen as fz
from localdual.errors import ConfigError, ValidationError
from localdual.problems import (ProblemSpec, QuadraticClient, client_grads,
                                evaluate, evaluate_global, load_problem,
                                make_logistic, make_nonconvex, make_quadratic,
                                noise_draw, problem_from_dict, problem_to_dict,
                                reference_solution, save_problem, stoch_grad,
                                validate_problem)
from localdual.rng import client_stream


def test_quadratic_spectrum_inside_window():
    p = make_quadratic(0, 4, 5, 0.1, 1.0)
    for c in p.clients:
        eigs = np.linalg.eigvalsh(c.A)
        assert eigs.min() >= 0.1 - 1e-12
        assert eigs.max() <= 1.0 + 1e-12
        # both extremes are pinned exactly for n >= 2
        assert abs(eigs.min() - 0.1) < 1e-12
        assert abs(eigs.max() - 1.0) < 1e-12
    validate_problem(p)


def test_quadratic_n1_extremes_across_clients():
    p = make_quadratic(3, 4, 1, 0.25, 4.0)
    vals = [c.A[0, 0] for c in p.clients]
    assert abs(vals[0] - 4.0) < 1e-12
    assert abs(vals[1] - 0.25) < 1e-12
    assert all(0.25 - 1e-12 <= v <= 4.0 + 1e-12 for v in vals)


def test_quadratic_determinism_and_seed_sensitivity():
    p1 = make_quadratic(7, 3, 4, 0.5, 2.0)
    p2 = make_quadratic(7, 3, 4, 0.5, 2.0)
    p3 = make_quadratic(8, 3, 4, 0.5, 2.0)
    for a, b in zip(p1.clients, p2.clients):
        assert np.array_equal(a.A, b.A) and np.array_equal(a.b, b.b)
    assert any(not np.array_equal(a.A, b.A) for a, b in zip(p1.clients, p3.clients))


def test_heterogeneity_scales_linear_terms_only():
    base = make_quadratic(1, 3, 4, 0.5, 2.0, heterogeneity=0.0)
    spread = make_quadratic(1, 3, 4, 0.5, 2.0, heterogeneity=2.0)
    for a, b in zip(base.clients, spread.clients):
        assert np.array_equal(a.A, b.A)
    # het = 0 means all clients share the same center
    assert all(np.allclose(base.clients[0].b, c.b) for c in base.clients)
    devs = [np.linalg.norm(c.b - base.clients[i].b) for i, c in enumerate(spread.clients)]
    assert all(abs(d - 2.0) < 1e-12 for d in devs)  # unit directions scaled by het


def test_evaluate_matches_quadratic_formula(oracle_p):
    x = np.array([0.3, -1.2])
    v, g = evaluate(oracle_p, 1, x)
    A, b = np.array(fz.ORACLE_A[1]), np.array(fz.ORACLE_B[1])
    assert abs(v - (0.5 * x @ A @ x - b @ x)) < 1e-14
    assert np.allclose(g, A @ x - b, atol=1e-14)


def test_evaluate_global_is_mean(oracle_p):
    x = np.array([0.4, 0.9])
    v, g = evaluate_global(oracle_p, x)
    vals = [evaluate(oracle_p, m, x) for m in range(3)]
    assert abs(v - np.mean([t[0] for t in vals])) < 1e-14
    assert np.allclose(g, np.mean([t[1] for t in vals], axis=0), atol=1e-14)


def test_reference_solution_matches_elimination_oracle(oracle_p):
    ref = reference_solution(oracle_p)
    assert np.allclose(ref.x_star, fz.REF_XSTAR, atol=1e-12)
    assert abs(ref.f_star - fz.REF_FSTAR) < 1e-12
    assert ref.residual <= 1e-10 * oracle_p.L * (1 + np.linalg.norm(ref.x_star))


def test_reference_solution_agd_on_logistic():
    p = make_logistic(2, 3, 4, reg=0.2)
    ref = reference_solution(p)
    _, g = evaluate_global(p, ref.x_star)
    assert np.linalg.norm(g) <= 1e-10 * p.L * (1 + np.linalg.norm(ref.x_star))
    assert ref.method == "agd"


def test_reference_solution_refuses_nonconvex():
    p = make_nonconvex(2, 3, 4)
    with pytest.raises(ValidationError):
        reference_solution(p)


def test_stoch_grad_exact_when_noiseless(oracle_p):
    x = np.array([1.0, -1.0])
    s = client_stream(0, 1)
    g = stoch_grad(oracle_p, 1, x, s)
    assert np.array_equal(g, evaluate(oracle_p, 1, x)[1])
    # no randomness consumed at sigma = 0
    assert s.standard_normal() == client_stream(0, 1).standard_normal()


def test_noise_moments():
    p = make_quadratic(0, 2, 5, 0.5, 2.0, sigma=1.5)
    s = client_stream(9, 0)
    draws = np.stack([noise_draw(p, s) for _ in range(40_000)])
    assert np.abs(draws.mean(axis=0)).max() < 5e-2 * p.sigma
    second = np.mean(np.sum(draws ** 2, axis=1))
    assert abs(second - p.sigma ** 2) < 0.05 * p.sigma ** 2


def test_client_grads_matches_per_client_oracle_with_noise():
    p = make_quadratic(4, 3, 2, 0.5, 2.0, sigma=0.7)
    X = np.arange(6, dtype=float).reshape(3, 2)
    g_batch = client_grads(p, X, [client_stream(5, m) for m in range(3)])
    g_loop = np.stack([stoch_grad(p, m, X[m], client_stream(5, m)) for m in range(3)])
    assert np.allclose(g_batch, g_loop, atol=1e-15)


def test_logistic_certified_constants():
    p = make_logistic(1, 4, 3, reg=0.3)
    assert p.mu == 0.3 and p.convexity_class == "strongly_convex"
    for c in p.clients:
        assert c.smoothness_bound() <= p.L + 1e-12
    # finite differences agree with the analytic gradient
    x = np.array([0.2, -0.4, 0.1])
    v, g = evaluate(p, 2, x)
    h = 1e-6
    for i in range(3):
        e = np.zeros(3); e[i] = h
        fd = (evaluate(p, 2, x + e)[0] - evaluate(p, 2, x - e)[0]) / (2 * h)
        assert abs(fd - g[i]) < 1e-6


def test_nonconvex_curvature_window():
    p = make_nonconvex(1, 3, 4, reg=0.05, penalty=0.5)
    assert p.convexity_class == "nonconvex"
    assert abs(p.curvature_lb - (0.05 - 0.25)) < 1e-12
    # hessian eigenvalues along a coordinate probe stay inside the window
    x = np.linspace(-2, 2, 9)
    for xv in x:
        pt = np.full(4, xv)
        h = 1e-5
        for i in range(4):
            e = np.zeros(4); e[i] = h
            gp = evaluate(p, 0, pt + e)[1][i]
            gm = evaluate(p, 0, pt - e)[1][i]
            curv = (gp - gm) / (2 * h)
            assert p.curvature_lb - 1e-6 <= curv <= p.L + 1e-6


def test_serialization_roundtrip_bitwise(tmp_path):
    for p in (make_quadratic(3, 3, 4, 0.5, 2.0, sigma=0.2),
              make_logistic(3, 2, 3),
              make_nonconvex(3, 2, 3)):
        path = tmp_path / (p.family + ".json")
        save_problem(p, path)
        q = load_problem(path)
        assert (q.M, q.n, q.mu, q.L, q.sigma) == (p.M, p.n, p.mu, p.L, p.sigma)
        assert q.convexity_class == p.convexity_class
        x = np.array([0.37, -0.81, 0.12, 0.05][: p.n])
        v1, g1 = evaluate_global(p, x)
        v2, g2 = evaluate_global(q, x)
        assert v1 == v2 and np.array_equal(g1, g2)


def test_load_rejects_wrong_format(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": "something-else", "version": 1}))
    with pytest.raises(ConfigError):
        load_problem(path)
    d = problem_to_dict(make_quadratic(0, 2, 2, 0.5, 1.0))
    d["version"] = 99
    with pytest.raises(ConfigError):
        problem_from_dict(d)
    d2 = problem_to_dict(make_quadratic(0, 2, 2, 0.5, 1.0))
    d2["clients"][0]["kind"] = "mystery"
    with pytest.raises(ConfigError) as e:
        problem_from_dict(d2)
    assert "clients[0]" in str(e.value)


def test_constructor_invariants():
    c = (QuadraticClient(np.eye(2), np.zeros(2)),)
    with pytest.raises(ValidationError):
        ProblemSpec(M=2, n=2, clients=c, mu=0.5, L=1.0, sigma=0.0,
                    convexity_class="strongly_convex", curvature_lb=0.5)
    with pytest.raises(ValidationError):
        ProblemSpec(M=1, n=2, clients=c, mu=2.0, L=1.0, sigma=0.0,
                    convexity_class="strongly_convex", curvature_lb=2.0)
    with pytest.raises(ValidationError):
        ProblemSpec(M=1, n=2, clients=c, mu=0.5, L=1.0, sigma=-1.0,
                    convexity_class="strongly_convex", curvature_lb=0.5)
    with pytest.raises(ConfigError):
        make_quadratic(0, 1, 1, 0.5, 1.0)  # cannot realize mu != L at 1x1


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(1, 6), n=st.integers(1, 6))
def test_quadratic_generator_always_valid(seed, m, n):
    if n == 1 and m == 1:
        p = make_quadratic(seed, m, n, 1.0, 1.0)
    else:
        p = make_quadratic(seed, m, n, 0.3, 3.0)
    validate_problem(p)
    ref = reference_solution(p)
    assert np.isfinite(ref.f_star)
