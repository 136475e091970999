from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, D, diamond, random_small
from mopbdstar.costvec import INF, dominates
from mopbdstar.graph import DynGraph, GridHeuristic, add_obstacle, path_cost
from mopbdstar.mopbd import MOPBDStar, PlannerConfig
from mopbdstar.namoa import solve
from mopbdstar.oracle import exhaustive_front


def test_init_state():
    p = MOPBDStar(diamond(), A, D)
    assert len(p.open) == 1
    assert dict(p.store.G[A]) == {(0, 0): p.root_id}
    assert not p.store.V[A]
    assert p.inconsistent_labels() == {(A, (0, 0))}


def test_same_start_and_goal():
    p = MOPBDStar(diamond(), A, A)
    assert p.compute_path() == [(0, 0)]


def test_single_node():
    g = DynGraph(1, 2)
    assert MOPBDStar(g, 0, 0).compute_path() == [(0, 0)]


def test_diamond_front():
    p = MOPBDStar(diamond(), A, D)
    assert p.compute_path() == [(2, 6), (6, 2)]
    paths = p.paths()
    assert paths[(2, 6)] == [D, B, A]
    assert paths[(6, 2)] == [D, C, A]
    p.audit()


def test_diamond_edge_blocked():
    g = diamond()
    p = MOPBDStar(g, A, D)
    p.compute_path()
    g.set_cost(A, B, (INF, INF))
    p.process_edge(A, B)
    assert p.compute_path() == [(6, 2)]
    p.audit()


def test_edge_off_path_changes_nothing():
    g = DynGraph(6, 2)
    for u, w, c in diamond().edges():
        g.add_edge(u, w, c)
    g.add_edge(D, 4, (1, 1))
    g.add_edge(4, 5, (1, 1))
    p = MOPBDStar(g, A, D)
    p.compute_path()
    before = p.stats.snapshot()
    g.set_cost(4, 5, (INF, INF))
    p.process_edge(4, 5)
    assert p.stats.since(before).deletes == 0


def test_expand_four_neighbours():
    g = DynGraph(5, 2)
    for w in range(1, 5):
        g.add_edge(0, w, (w, 5 - w))
    p = MOPBDStar(g, 0, 1)
    root = p.store.states[p.root_id]
    p.open.pop()
    p.update_vset(root)
    p.expand(root)
    assert len(root.children) == 4
    assert len(p.open) == 4


def test_expand_skips_equal_and_infinite():
    g = DynGraph(3, 2)
    g.add_edge(0, 1, (1, 1))
    g.add_edge(0, 2, (INF, INF))
    p = MOPBDStar(g, 0, 1)
    root = p.store.states[p.root_id]
    p.store.new_state(1, (1, 1))
    p.expand(root)
    assert not root.children


def test_delete_counts():
    g = DynGraph(6, 2)
    for i in range(5):
        g.add_edge(i, i + 1, (1, 1))
    p = MOPBDStar(g, 0, 5)
    p.compute_path()
    before = sum(len(x) for x in p.store.G)
    touched: dict = {}
    p.delete_state(p.store.states[p.root_id], touched)
    assert before - sum(len(x) for x in p.store.G) == 6
    assert not p.store.states
    assert set(touched) == set(range(6))


def test_delete_leaf_g_only():
    g = DynGraph(2, 2)
    g.add_edge(0, 1, (1, 1))
    p = MOPBDStar(g, 0, 1)
    leaf = p.store.new_state(1, (1, 1), p.root_id)
    touched: dict = {}
    p.delete_state(leaf, touched)
    assert not p.store.G[1]


def test_update_vset_replaces_dominated():
    g = DynGraph(2, 2)
    g.add_edge(0, 1, (1, 1))
    p = MOPBDStar(g, 0, 1)
    old = p.store.new_state(1, (5, 5), p.root_id)
    p.store.V[1].add((5, 5))
    new = p.store.new_state(1, (3, 3), p.root_id)
    p.update_vset(new)
    assert p.store.V[1] == {(3, 3)}
    assert old.id not in p.store.states


def test_update_vset_keeps_incomparable():
    g = DynGraph(2, 2)
    g.add_edge(0, 1, (1, 1))
    p = MOPBDStar(g, 0, 1)
    p.store.new_state(1, (1, 9), p.root_id)
    p.store.V[1].add((1, 9))
    new = p.store.new_state(1, (9, 1), p.root_id)
    p.update_vset(new)
    assert p.store.V[1] == {(1, 9), (9, 1)}


def test_update_vset_cascade_repairs_neighbour():
    # chain 0 - 1 - 2 plus a worse detour 0 - 3 - 1
    g = DynGraph(4, 2)
    g.add_edge(0, 1, (5, 5))
    g.add_edge(1, 2, (1, 1))
    g.add_edge(0, 3, (1, 1))
    g.add_edge(3, 1, (1, 1))
    p = MOPBDStar(g, 0, 2)
    s1 = p.store.new_state(1, (5, 5), p.root_id)
    p.store.V[1].add((5, 5))
    s2 = p.store.new_state(2, (6, 6), s1.id)
    p.store.V[2].add((6, 6))
    s3 = p.store.new_state(3, (1, 1), p.root_id)
    p.store.V[3].add((1, 1))
    p.store.V[0].add((0, 0))
    better = p.store.new_state(1, (2, 2), s3.id)
    p.update_vset(better)
    assert s2.id not in p.store.states
    assert (6, 6) not in p.store.V[2]
    # node 2 gets a fresh inconsistent label built from the new V(1)
    assert (3, 3) in p.store.G[2]


def test_repair_examples():
    g = DynGraph(3, 2)
    g.add_edge(0, 1, (1, 1))
    g.add_edge(1, 2, (1, 1))
    g.add_edge(0, 2, (2, 2))
    p = MOPBDStar(g, 0, 2)
    p.repair_inconsistent({})
    assert len(p.open) == 1
    s1 = p.store.new_state(1, (2, 2), p.root_id)
    p.store.V[1].add((2, 2))
    p.store.V[0].add((0, 0))
    p.repair_inconsistent({2: None})
    # (0,0)+(2,2) via node 0 and (2,2)+(1,1) via node 1 give [2,2] and [3,3]
    assert set(p.store.G[2]) == {(2, 2)}
    assert p.store.states[p.store.G[2][(2, 2)]].parent == p.root_id
    p2 = MOPBDStar(g, 0, 2)
    p2.store.V[1].add((2, 2))
    p2.store.new_state(1, (2, 2), p2.root_id)
    p2.repair_inconsistent({2: None})
    assert set(p2.store.G[2]) == {(3, 3)}
    assert s1.id in p.store.states


def test_repair_dedups_equal_contributions():
    g = DynGraph(4, 2)
    g.add_edge(0, 1, (2, 2))
    g.add_edge(0, 2, (2, 2))
    g.add_edge(1, 3, (1, 1))
    g.add_edge(2, 3, (1, 1))
    p = MOPBDStar(g, 0, 3)
    s1 = p.store.new_state(1, (2, 2), p.root_id)
    s2 = p.store.new_state(2, (2, 2), p.root_id)
    p.store.V[1].add(s1.g)
    p.store.V[2].add(s2.g)
    p.repair_inconsistent({3: None})
    assert set(p.store.G[3]) == {(3, 3)}
    # the lowest-id neighbour becomes the parent
    assert p.store.states[p.store.G[3][(3, 3)]].parent == s1.id


def test_set_start_matches_scratch():
    grid, g, u_d, u_c = random_small(11, sizes=(4,))
    h = GridHeuristic(grid, 2)
    p = MOPBDStar(g, u_d, u_c, PlannerConfig(heuristic=h))
    front = p.compute_path()
    if not front or u_c == u_d:
        pytest.skip("disconnected draw")
    path = p.paths()[front[0]]
    if len(path) > 1:
        p.set_start(path[1])
        assert p.compute_path() == solve(g, u_d, path[1], h).front
        p.set_start(u_c)
        assert p.compute_path() == front


def test_set_start_at_destination():
    p = MOPBDStar(diamond(), A, D)
    p.compute_path()
    p.set_start(A)
    assert p.compute_path() == [(0, 0)]


def test_bad_nodes():
    with pytest.raises(ValueError):
        MOPBDStar(diamond(), A, 9)
    with pytest.raises(ValueError):
        PlannerConfig(eps=-1)
    with pytest.raises(ValueError):
        MOPBDStar(diamond(), A, D).process_edge(A, D)


def test_snapshot_is_json():
    import json

    p = MOPBDStar(diamond(), A, D)
    p.compute_path()
    snap = json.loads(p.snapshot())
    assert snap["u_d"] == A and snap["u_c"] == D


def _check_paths(p, g):
    for cost, nodes in p.paths().items():
        assert path_cost(g, nodes) == cost


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["naive", "kung"]))
def test_dynamic_front_matches_exhaustive(seed, kernel):
    grid, g, u_d, u_c = random_small(seed)
    p = MOPBDStar(g, u_d, u_c, PlannerConfig(nd_kernel=kernel, heuristic=GridHeuristic(grid, 2)))
    assert p.compute_path() == exhaustive_front(g, u_c, u_d)
    p.audit()
    _check_paths(p, g)
    others = [u for u in grid.passable_nodes() if u not in (u_c, u_d)]
    for step, u in enumerate(others[:3]):
        if step == 1:
            for w in g.neighbors(u):
                ch = g.set_cost(u, w, (1, 1))
                if ch:
                    p.process_edge(ch.u, ch.w)
        else:
            for ch in add_obstacle(g, u):
                p.process_edge(ch.u, ch.w)
        assert p.compute_path() == exhaustive_front(g, u_c, u_d)
        p.audit()
        _check_paths(p, g)
        for u2 in range(g.num_nodes):
            vs = p.store.V[u2]
            assert not any(dominates(a, b) for a in vs for b in vs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_cost_decrease_improves(seed):
    grid, g, u_d, u_c = random_small(seed, sizes=(4,))
    p = MOPBDStar(g, u_d, u_c)
    old = p.compute_path()
    u, w, c = g.edges()[seed % g.num_edges]
    g.set_cost(u, w, tuple(max(1, x // 2) if x != INF else x for x in c))
    p.process_edge(u, w)
    new = p.compute_path()
    assert new == exhaustive_front(g, u_c, u_d)
    # nothing in the new front is beaten by an old vector
    assert not any(dominates(o, n) for o in old for n in new)
