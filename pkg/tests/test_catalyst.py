import numpy as np
import pytest

import _frozen as fz
from localdual.catalyst import (CatalystParams, InnerResult, SubproblemSpec,
                                acc_inner, alpha_recursion_residual,
                                certified_primal_gap, epsilon_schedule,
                                exact_inner, ga_msgd_inner, make_subproblem,
                                momentum_schedule, run_catalyst)
from localdual.errors import BudgetExceededError, ValidationError
from localdual.problems import (ProblemSpec, QuadraticClient, evaluate_global,
                                make_logistic, make_nonconvex, make_quadratic,
                                reference_solution)
from localdual.topology import build_topology


def test_momentum_fixed_point_q_quarter():
    alphas, betas = momentum_schedule("sc", 0.25, 8)
    assert np.allclose(alphas, 0.5, atol=1e-15)
    assert np.allclose(betas, fz.BETA_FIXED_POINT_Q_QUARTER, atol=1e-15)


def test_momentum_chain_q0_matches_decimal_oracle():
    alphas, betas = momentum_schedule("convex", 0.0, 5)
    assert np.allclose(alphas, fz.ALPHAS_Q0, atol=1e-14)
    assert np.allclose(betas, fz.BETAS_Q0, atol=1e-14)
    assert abs(alphas[1] - fz.ALPHA1_Q0_GOLDEN) < 1e-15


def test_nonconvex_momentum_is_flat_zero():
    alphas, betas = momentum_schedule("nonconvex", 0.0, 5)
    assert np.allclose(alphas, fz.ALPHAS_Q0, atol=1e-14)  # same alpha recursion
    assert np.all(betas == 0.0)


def test_alpha_recursion_residual_along_chains():
    for mode, q in (("sc", 0.3), ("convex", 0.0)):
        alphas, _ = momentum_schedule(mode, q, 20)
        for a0, a1 in zip(alphas, alphas[1:]):
            assert alpha_recursion_residual(a0, a1, q) < 1e-12
    with pytest.raises(ValidationError):
        momentum_schedule("other", 0.0, 3)


def test_epsilon_schedule_hand_values():
    assert abs(epsilon_schedule("sc", 2, 9.0, q=0.25) - fz.EPS_SC_Q_QUARTER_S2_DELTA9) < 1e-14
    assert abs(epsilon_schedule("convex", 1, 9.0, gamma=1.0) - fz.EPS_CONVEX_S1_DELTA9_GAMMA1) < 1e-16
    assert abs(epsilon_schedule("nonconvex", 3, 5.0, S=50) - fz.EPS_FLAT_DELTA5_S50) < 1e-16
    with pytest.raises(ValidationError):
        epsilon_schedule("convex", 1, 1.0, gamma=0.0)
    with pytest.raises(ValidationError):
        epsilon_schedule("nonconvex", 1, 1.0)
    with pytest.raises(ValidationError):
        epsilon_schedule("other", 1, 1.0)


def unit_quadratic():
    c = (QuadraticClient(np.eye(2), np.zeros(2)),)
    return ProblemSpec(M=1, n=2, clients=c, mu=1.0, L=1.0, sigma=0.0,
                       convexity_class="strongly_convex", curvature_lb=1.0)


def test_subproblem_hand_value():
    p = unit_quadratic()
    sub = make_subproblem(p, np.array([[1.0, 0.0]]), reg_weight=1.0)
    q = sub.problem
    assert np.allclose(q.clients[0].A, 3.0 * np.eye(2), atol=1e-15)
    assert np.allclose(q.clients[0].b, [2.0, 0.0], atol=1e-15)
    assert q.mu == 3.0 and q.L == 3.0
    res = exact_inner()(sub, 1e-12, np.zeros((1, 2)), seed=0)
    assert np.allclose(res.X, [fz.PROX_MIN_X], atol=1e-15)
    assert res.rounds == 1 and res.samples == 0 and res.achieved_gap == 0.0
    assert abs(certified_primal_gap(sub, np.array(fz.PROX_MIN_X))) < 1e-15
    gap_at_zero = certified_primal_gap(sub, np.zeros(2))
    assert abs(gap_at_zero - 2.0 / 3.0) < 1e-12  # 1.5 ||x - 2/3 e1||^2 at 0


def test_subproblem_shapes_and_weights():
    p = make_quadratic(0, 3, 2, 0.5, 2.0)
    sub = make_subproblem(p, np.zeros((3, 2)))
    assert sub.reg_weight == p.L
    assert sub.problem.L == 3.0 * p.L and sub.problem.mu == p.mu + 2.0 * p.L
    with pytest.raises(ValidationError):
        make_subproblem(p, np.zeros((2, 2)))


def test_prox_clients_wrap_non_quadratic_bases():
    p = make_logistic(1, 2, 3, samples_per_client=6, reg=0.2)
    centers = np.random.default_rng(0).standard_normal((2, 3))
    sub = make_subproblem(p, centers, reg_weight=1.0)
    q = sub.problem
    assert q.mu == p.curvature_lb + 2.0 and q.L == p.L + 2.0
    x = np.array([0.3, -0.1, 0.2])
    v, g = q.clients[0].value_grad(x)
    vb, gb = p.clients[0].value_grad(x)
    d = x - centers[0]
    assert abs(v - (vb + d @ d)) < 1e-14
    assert np.allclose(g, gb + 2.0 * d, atol=1e-14)
    assert q.clients[0].smoothness_bound() == p.clients[0].smoothness_bound() + 2.0
    # surrogate certificate dominates the true gap
    ref = reference_solution(q)
    xprobe = centers[0] + 0.5
    true_gap = evaluate_global(q, xprobe)[0] - ref.f_star
    assert certified_primal_gap(sub, xprobe) >= true_gap - 1e-10


def test_nonconvexifiable_weight_rejected():
    p = make_nonconvex(0, 2, 2, penalty=0.5)
    with pytest.raises(ValidationError):
        make_subproblem(p, np.zeros((2, 2)), reg_weight=0.05)  # 2w < -curvature_lb


def test_certified_inner_solvers_respect_eps():
    p = make_quadratic(1, 3, 2, 0.5, 2.0)
    sub = make_subproblem(p, np.zeros((3, 2)))
    for solver in (ga_msgd_inner(K=5, check_every=5),
                   acc_inner(K=5, check_every=5),
                   acc_inner(topology=build_topology("ring", 3), K=5, check_every=5)):
        res = solver(sub, 1e-6, np.zeros((3, 2)), seed=0)
        assert res.achieved_gap <= 1e-6
        assert res.rounds % 5 == 0 and res.rounds > 0
        assert res.samples == 5 * res.rounds


def test_inner_budget_exhaustion_raises():
    p = make_quadratic(1, 3, 2, 0.5, 2.0)
    sub = make_subproblem(p, np.ones((3, 2)))
    solver = acc_inner(K=1, check_every=1, max_rounds=3)
    with pytest.raises(BudgetExceededError) as e:
        solver(sub, 1e-14, np.zeros((3, 2)), seed=0)
    assert e.value.rounds_used == 3
    assert e.value.achieved_gap > 1e-14


def test_sc_envelope_and_alpha_residuals():
    p = make_quadratic(2, 4, 3, 0.2, 2.0)
    ref = reference_solution(p)
    params = CatalystParams(S=20, trace=True)
    rec = run_catalyst(p, exact_inner(), "sc", params, master_seed=0)
    q = rec.meta["q"]
    delta = rec.meta["delta"]
    f0 = evaluate_global(p, np.zeros(3))[0]
    assert abs(delta - (f0 - ref.f_star)) < 1e-12
    assert abs(q - p.mu / (p.mu + 2.0 * p.L)) < 1e-15
    for row in rec.rows[1:]:
        envelope = 800.0 * (1.0 - 0.9 * np.sqrt(q)) ** (row.round + 1) * delta / q
        assert row.gap <= envelope
        assert row.extra["alpha_residual"] <= 1e-12
        assert row.extra["inner_gap"] <= row.extra["eps"]
    # accelerated proximal point contracts roughly like (1 - sqrt(q))^s
    assert rec.rows[-1].gap < 0.05 * delta
    assert len(rec.trace) == 21


def test_centralized_coupling_charges_broadcast_round():
    p = make_quadratic(2, 4, 2, 0.5, 2.0)
    rec = run_catalyst(p, exact_inner(), "sc", CatalystParams(S=4), master_seed=0)
    assert [r.cum_rounds for r in rec.rows] == [0, 2, 4, 6, 8]  # 1 solve + 1 broadcast
    rec_d = run_catalyst(p, exact_inner(), "sc",
                         CatalystParams(S=4, coupling="decentralized"), master_seed=0)
    assert [r.cum_rounds for r in rec_d.rows] == [0, 1, 2, 3, 4]


def test_decentralized_coupling_matches_centralized_with_consensual_inner():
    # exact inner returns consensual stacks, so both couplings walk the
    # same averaged trajectory
    p = make_quadratic(3, 4, 2, 0.5, 2.0)
    a = run_catalyst(p, exact_inner(), "sc", CatalystParams(S=10), master_seed=0)
    b = run_catalyst(p, exact_inner(), "sc",
                     CatalystParams(S=10, coupling="decentralized"), master_seed=0)
    for ra, rb in zip(a.rows, b.rows):
        assert abs(ra.gap - rb.gap) < 1e-12
        assert ra.extra.get("alpha") == rb.extra.get("alpha")
    for row in a.rows[1:]:
        assert row.extra["avg_equiv_residual"] <= 1e-12


def test_convex_mode_decays():
    p = make_quadratic(5, 3, 2, 0.3, 2.0)
    rec = run_catalyst(p, exact_inner(), "convex", CatalystParams(S=15), master_seed=0)
    gaps = rec.series("gap")
    assert gaps[-1] < 0.05 * gaps[0]
    alphas = [r.extra["alpha"] for r in rec.rows[1:]]
    assert all(a2 < a1 for a1, a2 in zip(alphas, alphas[1:]))


def test_nonconvex_mode_runs_and_logs_gradients():
    p = make_nonconvex(1, 2, 2, samples_per_client=6)
    params = CatalystParams(S=6)
    rec = run_catalyst(p, acc_inner(K=5, check_every=10), "nonconvex", params,
                       master_seed=0)
    assert rec.meta["mode"] == "nonconvex"
    assert all(r.gap is None for r in rec.rows)
    assert all(r.extra["grad_sq"] >= 0 for r in rec.rows)
    assert all(r.extra.get("beta", 0.0) == 0.0 for r in rec.rows[1:])
    grads = [r.extra["grad_sq"] for r in rec.rows]
    assert min(grads[1:]) < grads[0]
    assert rec.meta["delta"] > 0


def test_mode_and_coupling_validation():
    p = make_quadratic(0, 3, 2, 0.5, 2.0)
    nc = make_nonconvex(0, 2, 2)
    with pytest.raises(ValidationError):
        run_catalyst(p, exact_inner(), "other", CatalystParams(S=1), 0)
    with pytest.raises(ValidationError):
        run_catalyst(p, exact_inner(), "sc", CatalystParams(S=1, coupling="x"), 0)
    with pytest.raises(ValidationError):
        run_catalyst(nc, acc_inner(), "sc", CatalystParams(S=1), 0)
    with pytest.raises(ValidationError):
        run_catalyst(nc, acc_inner(), "convex", CatalystParams(S=1), 0)


def test_round_budget_stops_outer_loop():
    p = make_quadratic(0, 3, 2, 0.5, 2.0)
    rec0 = run_catalyst(p, exact_inner(), "sc",
                        CatalystParams(S=10, max_rounds=0), master_seed=0)
    assert len(rec0.rows) == 1 and rec0.rows[0].round == 0
    rec = run_catalyst(p, exact_inner(), "sc",
                       CatalystParams(S=10, max_rounds=5), master_seed=0)
    assert 1 < len(rec.rows) < 11
    assert rec.rows[-1].cum_rounds >= 5


def test_inner_seed_derivation_reproducible():
    p = make_quadratic(4, 3, 2, 0.5, 2.0, sigma=0.3)
    inner = ga_msgd_inner(K=5, check_every=10)
    a = run_catalyst(p, inner, "sc", CatalystParams(S=3, delta0=1.0), master_seed=9)
    b = run_catalyst(p, inner, "sc", CatalystParams(S=3, delta0=1.0), master_seed=9)
    c = run_catalyst(p, inner, "sc", CatalystParams(S=3, delta0=1.0), master_seed=10)
    ga = [r.gap for r in a.rows]
    assert ga == [r.gap for r in b.rows]
    assert ga != [r.gap for r in c.rows]


def test_warm_start_shapes():
    p = make_quadratic(4, 3, 2, 0.5, 2.0)
    x0 = np.array([0.5, -0.5])
    rec = run_catalyst(p, exact_inner(), "sc", CatalystParams(S=2, x0=x0), 0)
    assert abs(rec.rows[0].gap - (evaluate_global(p, x0)[0]
                                  - reference_solution(p).f_star)) < 1e-12
    stack = np.zeros((3, 2))
    rec2 = run_catalyst(p, exact_inner(), "sc", CatalystParams(S=2, x0=stack), 0)
    assert rec2.rows[0].consensus == 0.0


def test_exact_inner_requires_quadratic():
    p = make_logistic(0, 2, 2)
    sub = make_subproblem(p, np.zeros((2, 2)))
    with pytest.raises(ValidationError):
        exact_inner()(sub, 1e-6, np.zeros((2, 2)), seed=0)
