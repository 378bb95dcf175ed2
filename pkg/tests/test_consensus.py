"""Communication schedules, mixing weights, and belief tracking."""

import numpy as np
import pytest

from npgplay.consensus import (
    TOPOLOGIES,
    BeliefTable,
    CommSchedule,
    belief_error,
    build_weights,
    check_window_connectivity,
    consensus_step,
    edges_at,
    mixing_matrix,
)


def test_complete_all_edges():
    sched = CommSchedule(n_agents=5, topology="complete")
    assert len(edges_at(sched, 0)) == 10
    assert edges_at(sched, 0) == edges_at(sched, 17)


def test_static_ring_two_regular():
    sched = CommSchedule(n_agents=5, topology="ring")
    edges = edges_at(sched, 3)
    assert len(edges) == 5
    deg = np.zeros(5, dtype=int)
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    assert np.all(deg == 2)


def test_static_star_spokes():
    sched = CommSchedule(n_agents=5, topology="star", hub=2)
    edges = edges_at(sched, 0)
    assert edges == frozenset({(0, 2), (1, 2), (2, 3), (2, 4)})


def test_tv_star_cycles_through_spokes():
    sched = CommSchedule(n_agents=5, topology="tv_star")
    union = set()
    for t in range(4):
        e = edges_at(sched, t)
        assert len(e) == 1
        union |= e
    assert union == {(0, 1), (0, 2), (0, 3), (0, 4)}
    assert edges_at(sched, 4) == edges_at(sched, 0)


def test_tv_ring_cycles_through_ring_edges():
    sched = CommSchedule(n_agents=4, topology="tv_ring", period=4)
    union = set()
    for t in range(4):
        e = edges_at(sched, t)
        assert len(e) == 1
        union |= e
    assert union == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_negative_t_rejected():
    sched = CommSchedule(n_agents=3, topology="complete")
    with pytest.raises(ValueError):
        edges_at(sched, -1)


def test_construction_rejects_short_window():
    # one spoke per iteration: a window shorter than N-1 misses spokes
    with pytest.raises(ValueError):
        CommSchedule(n_agents=5, topology="tv_star", period=3)
    # 4 consecutive ring edges leave a spanning path, so period=4 is valid
    CommSchedule(n_agents=5, topology="tv_ring", period=4)
    with pytest.raises(ValueError):
        CommSchedule(n_agents=5, topology="tv_ring", period=3)


def test_construction_validation():
    with pytest.raises(ValueError):
        CommSchedule(n_agents=5, topology="mesh")
    with pytest.raises(ValueError):
        CommSchedule(n_agents=1, topology="complete")
    with pytest.raises(ValueError):
        CommSchedule(n_agents=5, topology="star", hub=5)


def test_window_connectivity_all_shipped_topologies():
    for topo in TOPOLOGIES:
        if topo == "perfect":
            continue
        sched = CommSchedule(n_agents=5, topology=topo)
        ok, _ = check_window_connectivity(sched)
        assert ok


def test_build_weights_complete_n3():
    sched = CommSchedule(n_agents=3, topology="complete")
    w = build_weights(sched, 0, 0)
    assert np.allclose(w[0], [1, 0, 0])
    assert np.allclose(w[1], [1 / 3, 1 / 3, 1 / 3])
    assert np.allclose(w[2], [1 / 3, 1 / 3, 1 / 3])


def test_build_weights_isolated_agent_unit_row():
    sched = CommSchedule(n_agents=5, topology="tv_star")
    # at t=0 only edge (0,1) is active; agents 2..4 are isolated
    w = build_weights(sched, 0, 0)
    for i in (2, 3, 4):
        row = np.zeros(5)
        row[i] = 1.0
        assert np.allclose(w[i], row)


def test_weights_row_stochastic_random_triples():
    rng = np.random.default_rng(0)
    topos = [t for t in TOPOLOGIES if t != "perfect"]
    for _ in range(10**3):
        topo = topos[rng.integers(len(topos))]
        n = int(rng.integers(2, 7))
        sched = CommSchedule(n_agents=n, topology=topo, period=max(5, n))
        t = int(rng.integers(0, 50))
        j = int(rng.integers(n))
        w = build_weights(sched, t, j)
        assert np.allclose(w.sum(axis=1), 1.0)
        assert np.allclose(w[j], np.eye(n)[j])
        nz = w[w > 0]
        assert nz.min() >= 1.0 / n - 1e-12


def test_belief_table_inits():
    params = np.arange(2 * 3 * 2, dtype=float).reshape(2, 3, 2)
    zero = BeliefTable.from_params(params, "zero")
    for i in range(2):
        assert np.array_equal(zero.copies[i, i], params[i])
        assert np.all(zero.copies[i, 1 - i] == 0.0)
    exact = BeliefTable.from_params(params, "exact")
    assert np.array_equal(exact.copies[1, 0], params[0])
    with pytest.raises(ValueError):
        BeliefTable.from_params(params, "random")


def test_belief_error_exact_zero():
    params = np.random.default_rng(1).normal(size=(3, 2, 2))
    beliefs = BeliefTable.from_params(params, "exact")
    assert belief_error(beliefs, params) == 0.0


def test_belief_error_single_wrong_entry():
    params = np.zeros((2, 2, 2))
    beliefs = BeliefTable.from_params(params, "exact")
    e = 0.37
    beliefs.copies[0, 1, 0, 0] += e  # agent 0's copy of agent 1, one scalar off
    assert belief_error(beliefs, params) == pytest.approx(e / 2)


def test_belief_error_permutation_invariant():
    rng = np.random.default_rng(2)
    params = rng.normal(size=(4, 3, 2))
    copies = rng.normal(size=(4, 4, 3, 2))
    for i in range(4):
        copies[i, i] = params[i]
    base = belief_error(BeliefTable(copies), params)
    perm = rng.permutation(4)
    permuted = BeliefTable(copies[np.ix_(perm, perm)].copy())
    assert belief_error(permuted, params[perm]) == pytest.approx(base)


def test_consensus_fixed_point_static_graph():
    params = np.random.default_rng(3).normal(size=(4, 2, 2))
    beliefs = BeliefTable.from_params(params, "exact")
    sched = CommSchedule(n_agents=4, topology="ring")
    consensus_step(beliefs, params, sched, 0)
    assert np.allclose(beliefs.copies, params[None, :])


def test_consensus_n2_error_halves():
    params = np.ones((2, 1, 2))
    beliefs = BeliefTable.from_params(params, "zero")
    sched = CommSchedule(n_agents=2, topology="complete")
    errs = [belief_error(beliefs, params)]
    for t in range(5):
        consensus_step(beliefs, params, sched, t)
        errs.append(belief_error(beliefs, params))
    for a, b in zip(errs, errs[1:]):
        assert b == pytest.approx(a / 2)


def test_consensus_perfect_overwrite():
    params = np.random.default_rng(4).normal(size=(3, 2, 2))
    beliefs = BeliefTable.from_params(params, "zero")
    sched = CommSchedule(n_agents=3, topology="perfect")
    consensus_step(beliefs, params, sched, 0)
    assert np.array_equal(beliefs.copies, np.broadcast_to(params, (3, 3, 2, 2)))


def test_consensus_diagonal_stays_exact():
    rng = np.random.default_rng(5)
    params = rng.normal(size=(5, 2, 2))
    beliefs = BeliefTable.from_params(params, "zero")
    sched = CommSchedule(n_agents=5, topology="tv_star")
    for t in range(20):
        params = params + rng.normal(0, 0.1, size=params.shape)
        consensus_step(beliefs, params, sched, t)
        for i in range(5):
            assert np.allclose(beliefs.copies[i, i], params[i])


@pytest.mark.parametrize("topo", ["complete", "star", "ring", "tv_star", "tv_ring"])
def test_frozen_parameters_geometric_decay(topo):
    rng = np.random.default_rng(6)
    params = rng.normal(0, 0.3, size=(5, 5, 2))
    beliefs = BeliefTable.from_params(params, "zero")
    sched = CommSchedule(n_agents=5, topology=topo)
    errs = [belief_error(beliefs, params)]
    for t in range(200):
        consensus_step(beliefs, params, sched, t)
        errs.append(belief_error(beliefs, params))
    errs = np.array(errs)
    # restrict to the segment above the floating-point floor
    live = errs > 1e-12
    cut = int(np.argmin(live)) if not live.all() else len(errs)
    # monotone decrease per window after the first period
    window = errs[5:cut:5]
    assert np.all(np.diff(window) < 0)
    # least-squares fit of log error: slope corresponds to lambda < 0.999
    t = np.arange(cut)
    lam = np.exp(np.polyfit(t, np.log(errs[:cut]), 1)[0])
    assert lam < 0.999


def test_mixing_matrix_doubly_stochastic_on_complete():
    sched = CommSchedule(n_agents=4, topology="complete")
    a = mixing_matrix(sched, 0)
    assert np.allclose(a, 0.25)
