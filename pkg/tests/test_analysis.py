import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opinion_sim.analysis import (C1, CONSENSUS, CONVEX_MIXTURE, NON_CONVERGED, POLARIZATION, T1, T2, T3,
                                  ConvergenceError, DenominatorConditionFailed, TheoremInapplicable,
                                  check_theorem, classify_outcome, compute_epsilon, compute_l_sigma,
                                  consensus_bound, convex_coefficients, decay_bound_audit,
                                  polarization_bound, theorem_name)
from opinion_sim.dynamics import AgentParams, run, system_matrix_chain
from opinion_sim.generators import certified_scenario
from opinion_sim.graph import SignedGraph, check_structural_balance, degree_stats
from opinion_sim.schedule import make_schedule
from opinion_sim.weights import WeightModel, constant


def _g(n, edges, leader):
    return SignedGraph.from_edges(n, [(s - 1, d - 1, sg) for s, d, sg in edges], leader - 1)


def _star(n=4, theta=0.5):
    g = _g(n, [(n, i, 1) for i in range(1, n)], n)
    return g, WeightModel(constant(1.0), constant(1.0), n - 1), AgentParams.uniform(n, n - 1, theta)


def test_theorem_aliases():
    assert theorem_name("T1") == T1 and theorem_name(T3) == T3
    with pytest.raises(ValueError, match="unknown theorem"):
        theorem_name("T4")


def test_epsilon_on_a_star():
    g, wm, params = _star(theta=0.5)
    assert compute_epsilon(params, wm, degree_stats(g)) == 0.5
    # confident followers: the leader share is what limits epsilon
    params = AgentParams.uniform(4, 3, 0.9)
    assert compute_epsilon(params, wm, degree_stats(g)) == pytest.approx(0.1)
    with pytest.raises(TheoremInapplicable):
        compute_epsilon(AgentParams.uniform(4, 3, 0.0), wm, degree_stats(g))


def test_epsilon_of_the_polarized_jury(bundled):
    s = bundled("angry12_g2")
    # min(0.5, 0.5 * 0.06 / (1.0 * 2))
    assert compute_epsilon(s.params, s.weights, degree_stats(s.graph)) == pytest.approx(0.015)


def _mixed_four():
    # follower 1 trusts the leader and follower 2, distrusts follower 3
    g = _g(4, [(4, 1, 1), (2, 1, 1), (3, 1, -1), (4, 2, 1), (1, 2, 1), (4, 3, 1)], 4)
    return g, WeightModel(constant(1.0), constant(0.25), 3), AgentParams.uniform(4, 3, 0.5)


def test_l_sigma_by_hand():
    g, wm, params = _mixed_four()
    l, sigma = compute_l_sigma(params, wm, degree_stats(g))
    # 1 + 2 * 0.5 * 1 * 0.25 / (1 * 1 - 1 * 0.25);  min(0.5, 0.5 * 1 / (2 * 1 - 0))
    assert l == pytest.approx(4 / 3)
    assert sigma == pytest.approx(0.25)


def test_l_is_one_without_distrust():
    g, wm, params = _star()
    assert compute_l_sigma(params, wm, degree_stats(g)) == (1.0, 0.5)


def test_denominator_condition():
    g = _g(3, [(3, 1, 1), (2, 1, -1), (3, 2, 1)], 3)
    wm = WeightModel(constant(1.0), constant(1.0), 2)
    with pytest.raises(DenominatorConditionFailed, match="denominator-condition-failed"):
        compute_l_sigma(AgentParams.uniform(3, 2, 0.5), wm, degree_stats(g))


def test_consensus_certificate_on_a_star():
    g, wm, params = _star()
    c = check_theorem(g, wm, params, make_schedule(4, 1, 10), "T3")
    assert c.holds and c.p == 1 and c.condition_value == pytest.approx(0.5)
    assert c.expected_outcome(0.7) == CONSENSUS
    assert consensus_bound(c) == pytest.approx(0.5)


def test_certificates_on_the_polarized_jury(bundled):
    s = bundled("angry12_g2")
    for t in (T1, C1, T2):
        c = check_theorem(s.graph, s.weights, s.params, s.schedule, t)
        assert c.holds and c.p == 1
        assert c.condition_value == pytest.approx(0.985)
    c1 = check_theorem(s.graph, s.weights, s.params, s.schedule, T1)
    assert c1.expected_outcome(1.0) == POLARIZATION
    assert c1.expected_outcome(0.0) == CONSENSUS
    assert polarization_bound(c1) == pytest.approx(0.985)
    c3 = check_theorem(s.graph, s.weights, s.params, s.schedule, T3)
    assert not c3.holds and c3.expected_outcome(1.0) is None
    assert any("trust edges only" in d for d in c3.diagnostics)
    assert any("denominator-condition-failed" in d for d in c3.diagnostics)


def test_certificates_on_an_unbalanced_club(bundled):
    s = bundled("karate_unbalanced")
    c1 = check_theorem(s.graph, s.weights, s.params, s.schedule, T1)
    assert not c1.holds and "not structurally balanced" in c1.diagnostics[0]
    c2 = check_theorem(s.graph, s.weights, s.params, s.schedule, T2)
    assert c2.holds and c2.partition is None
    assert c2.expected_outcome(2.0) == CONVEX_MIXTURE


def test_theorem_hypotheses_that_depend_on_the_schedule():
    g, wm, params = _star()
    sched = make_schedule(4, 3, 30, "random", seed=3)
    c = check_theorem(g, wm, params, sched, C1)
    assert not c.holds and "schedule is not synchronous" in c.diagnostics
    c = check_theorem(g, wm, params, sched, T1)
    assert c.holds and c.h == 3 and c.window == 3
    c = check_theorem(g, wm, AgentParams([0.0, 0.5, 0.5, 1.0]), make_schedule(4, 1, 30), T2)
    assert not c.holds and c.epsilon is None


def test_classify_outcomes():
    g = _g(3, [(3, 1, 1), (3, 2, -1)], 3)
    x = np.array([[0.9, -0.9, 1.0], [1.0, -1.0, 1.0]])
    assert classify_outcome(x, g, 1.0).kind == NON_CONVERGED
    assert classify_outcome(x[-1:], g, 1.0).kind == POLARIZATION
    o = classify_outcome(np.array([[1.0, 1.0, 1.0]] * 2), _g(3, [(3, 1, 1), (3, 2, 1)], 3), 1.0)
    assert o.kind == CONSENSUS and o.value == 1.0
    assert classify_outcome(np.array([[0.2, -0.5, 1.0]] * 2), g, 1.0).kind == CONVEX_MIXTURE
    assert classify_outcome(np.array([[2.0, -0.5, 1.0]] * 2), g, 1.0).kind == NON_CONVERGED


def test_polarization_needs_a_balance_split():
    # +-1 limits on an unbalanced graph are not a polarization
    g = _g(3, [(3, 1, 1), (1, 2, 1), (3, 2, -1)], 3)
    x = np.array([[1.0, -1.0, 1.0]] * 2)
    assert classify_outcome(x, g, 1.0).kind == CONVEX_MIXTURE


def test_coefficients_all_trust_and_single_distrust():
    g, wm, params = _star()
    cc = convex_coefficients(g, wm, params, make_schedule(4, 1, 200), [0.0, 0.3, -0.2, 1.0])
    assert cc.c1 == pytest.approx(np.ones(4), abs=1e-9)
    assert cc.c2 == pytest.approx(np.zeros(4), abs=1e-9)
    g = _g(2, [(2, 1, -1)], 2)
    cc = convex_coefficients(g, wm.with_leader(1), AgentParams([0.5, 1.0]), make_schedule(2, 1, 200),
                             [0.0, 1.0])
    assert cc.c1 == pytest.approx([0, 1], abs=1e-9)
    assert cc.c2 == pytest.approx([1, 0], abs=1e-9)
    assert cc.trajectory[-1, 0] == pytest.approx(-1.0)


def test_coefficients_report_an_unsettled_chain():
    g, wm, _ = _star()
    with pytest.raises(ConvergenceError, match="not settled"):
        convex_coefficients(g, wm, AgentParams.uniform(4, 3, 0.99), make_schedule(4, 1, 200),
                            [0.0, 0.3, -0.2, 1.0], horizon=3)


def test_unbalanced_cycle_mixes_both_leader_columns():
    g = _g(3, [(3, 1, 1), (1, 2, 1), (3, 2, -1)], 3)
    wm = WeightModel(constant(1.0), constant(1.0), 2)
    cc = convex_coefficients(g, wm, AgentParams.uniform(3, 2, 0.3), make_schedule(3, 1, 5000),
                             [0.1, 0.2, 1.0])
    assert 0 < cc.c1[1] < 1 and 0 < cc.c2[1] < 1
    assert cc.c1[1] + cc.c2[1] == pytest.approx(1.0)
    assert cc.trajectory[-1, 1] == pytest.approx(cc.c1[1] - cc.c2[1], abs=1e-8)


def test_audit_examples():
    g, wm, params = _star()
    traj = np.array([[0.0, 0.0, 0.0, 1.0], [0.5, 0.5, 0.5, 1.0]])
    blocks = [m.follower_block for m in system_matrix_chain(g, wm, make_schedule(4, 1, 5), params,
                                                             traj, "degroot")]
    rep = decay_bound_audit(blocks, 0.5, 1, absolute=True)
    assert len(rep) == 1 and rep[0].norm == pytest.approx(0.5) and rep[0].ok
    rep = decay_bound_audit([np.eye(3)] * 5, 0.9, 2)
    assert len(rep) == 2 and not any(r.ok for r in rep)
    with pytest.raises(ValueError):
        decay_bound_audit([], 0.5, 1)
    with pytest.raises(ValueError):
        decay_bound_audit([np.eye(2)], 0.5, 0)


def test_consensus_bound_can_understate_a_single_window():
    """The sigma lower bound assumes the leader share is at least 1/|N+max|.

    Follower 1 hears the leader with weight 0.5 and follower 2 with weight 1,
    so the leader share is 1/3, the certificate still holds, and one window
    of the chain exceeds l - sigma.
    """
    g = _g(3, [(3, 1, 1), (2, 1, 1), (3, 2, 1)], 3)
    wm = WeightModel(constant(1.0), constant(0.1), 2, trust_leader=constant(0.5))
    params = AgentParams.uniform(3, 2, 0.5)
    c = check_theorem(g, wm, params, make_schedule(3, 1, 10), T3)
    assert c.holds and c.p == 1 and (c.l, c.sigma) == (1.0, 0.25)
    traj = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    blocks = [m.follower_block for m in system_matrix_chain(g, wm, make_schedule(3, 1, 10), params,
                                                             traj, "degroot")]
    rep = decay_bound_audit(blocks, consensus_bound(c), c.window, absolute=True)
    assert rep[0].norm == pytest.approx(0.5 + 0.5 * 2 / 3)
    assert not rep[0].ok
    # the run itself still reaches consensus
    res = run(g, wm, make_schedule(3, 1, 5000), params, "degroot", [0.3, -0.8, 1.0])
    assert classify_outcome(res.trajectory, g, 1.0).kind == CONSENSUS


# -- properties --------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_polarization_windows_contract_geometrically(seed):
    rng = np.random.default_rng(seed)
    sc = certified_scenario(rng, T1, n_max=6, horizon=200)
    c, part = sc.certificate, sc.certificate.partition
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run(sc.graph, sc.weights, sc.schedule, sc.params, "altafini", sc.x0, tol=0.0,
                  horizon=6 * c.window)
    blocks = [m.follower_block for m in system_matrix_chain(sc.graph, sc.weights, sc.schedule,
                                                             sc.params, res.trajectory,
                                                             "altafini-gauged", part)]
    assert all(r.ok for r in decay_bound_audit(blocks, polarization_bound(c), c.window))
    # distance to the predicted limit shrinks by the bound every window
    xl = sc.x0[sc.graph.leader]
    target = xl * part.gauge(sc.graph.n)
    err = np.abs(res.trajectory - target).max(axis=1)
    for k in range(1, 6):
        assert err[k * c.window] <= polarization_bound(c) ** k * err[0] + 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_convex_coefficients_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    sc = certified_scenario(rng, T2, n_max=6, horizon=20000)
    cc = convex_coefficients(sc.graph, sc.weights, sc.params, sc.schedule, sc.x0)
    assert (cc.c1 >= -1e-12).all() and (cc.c2 >= -1e-12).all()
    assert np.allclose(cc.c1 + cc.c2, 1.0, atol=1e-8)
    xl = sc.x0[sc.graph.leader]
    assert np.allclose(cc.trajectory[-1], (cc.c1 - cc.c2) * xl, atol=1e-6)
    if check_structural_balance(sc.graph) is not None:
        assert np.allclose(np.minimum(cc.c1, cc.c2), 0.0, atol=1e-6)
