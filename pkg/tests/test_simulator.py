from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mopbdstar.costvec import INF
from mopbdstar.graph import GridMap, bundled_map, path_cost
from mopbdstar.oracle import exhaustive_front
from mopbdstar.simulator import (
    SimConfig,
    Simulation,
    TaskRecord,
    canonical_paths,
    make_planner,
    csv_view,
    records_from_csv,
    records_to_csv,
    run_batch,
    run_instance,
    scatter_csv,
    summarize,
    window_nodes,
)


def small_config(**kw):
    base = dict(grid=bundled_map("empty-16-16"), planners=("mopbd", "namoa"), seed=3)
    base.update(kw)
    return SimConfig(**base)


def test_defaults_per_protocol():
    grid = GridMap.from_rows([".."])
    ahead = SimConfig(grid)
    multi = SimConfig(grid, protocol="multi")
    assert (ahead.k, ahead.lo, ahead.hi, ahead.time_limit) == (7, 1, 10, 60.0)
    assert (multi.lo, multi.hi, multi.time_limit) == (1, 5, 300.0)


@pytest.mark.parametrize(
    "kw", [{"k": 0}, {"protocol": "zigzag"}, {"planners": ("dijkstra",)}, {"eps": -1.0}, {"lo": 3, "hi": 2}]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SimConfig(GridMap.from_rows([".."]), **kw)


def test_corridor_single_task():
    grid = GridMap.from_rows(["....."])
    res = run_instance(SimConfig(grid, planners=("mopbd",), seed=1), 0)
    assert res.arrived
    assert [r.task for r in res.records] == [0]
    assert res.records[0].lk_over_l0 == 1.0


def test_disconnecting_obstacle_ends_instance():
    # a one-cell-wide corridor: the first obstacle ahead cuts u_c from u_d
    grid = GridMap.from_rows(["." * 20])
    sim = Simulation(SimConfig(grid, planners=("mopbd", "namoa"), k=1), 0)
    sim.u_o, sim.u_d = 0, 19
    sim.u_c = 0
    sim.planners = {n: make_planner(n, sim.graph, 19, 0) for n in sim.planners}
    res = sim.run()
    assert not res.arrived
    last = [r for r in res.records if r.task == res.records[-1].task]
    assert all(r.solutions == 0 for r in last)


def test_cross_planner_determinism():
    cfg = small_config(grid=bundled_map("maze-32-32-2"))
    a = run_instance(cfg, 4)
    b = run_instance(SimConfig(cfg.grid, planners=("namoa", "mopbd"), seed=cfg.seed), 4)
    by = lambda res, name: [(r.task, r.event, r.front) for r in res.records if r.planner == name]
    for name in ("mopbd", "namoa"):
        assert by(a, name) == by(b, name)
    assert by(a, "mopbd") == by(a, "namoa")


def test_same_seed_same_trace():
    cfg = small_config()
    a = [csv_view(r) | {"runtime_s": 0} for r in run_instance(cfg, 2).records]
    b = [csv_view(r) | {"runtime_s": 0} for r in run_instance(cfg, 2).records]
    assert a == b


def test_l0_and_ratio():
    res = run_instance(small_config(grid=bundled_map("maze-32-32-2")), 4)
    mop = [r for r in res.records if r.planner == "mopbd"]
    l0 = mop[0].lk
    for r in mop:
        if r.lk is not None:
            assert r.lk_over_l0 == pytest.approx(r.lk / l0)
            assert r.lk_over_l0 > 0


def test_place_obstacle_ahead():
    grid = GridMap.from_rows(["....", "....", "...."])
    sim = Simulation(SimConfig(grid, seed=5), 0)
    sim.plan("init", [])
    sim.select_path()
    path = list(sim.path)
    changes = sim.place_obstacle_ahead()
    if len(path) > 2:
        node = path[1]
        assert changes and all(ch.new[0] == INF for ch in changes)
        assert all(sim.graph.cost(node, w)[0] == INF for w in sim.graph.neighbors(node))
    else:
        assert changes == []


def test_obstacle_skips_destination():
    grid = GridMap.from_rows(["..."])
    sim = Simulation(SimConfig(grid, seed=0), 0)
    sim.path = [sim.u_c, sim.u_d]
    assert sim.place_obstacle_ahead() == []


def test_window_clipped_at_corner():
    grid = bundled_map("empty-16-16")
    assert len(window_nodes(grid, 0)) == 9
    assert len(window_nodes(grid, grid.node(8, 8))) == 25


def test_multi_alternates():
    cfg = small_config(protocol="multi")
    sim = Simulation(cfg, 0)
    first, c1 = sim.multi_obstacle_event()
    second, c2 = sim.multi_obstacle_event()
    assert first.startswith("add:") and second.startswith("delete:")
    picked = [int(x) for x in first.split(":")[1].split(",")]
    assert len(picked) == 2 and sim.u_c not in picked and sim.u_d not in picked
    assert all(all(1 <= x <= 5 for x in ch.new) for ch in c2)


def test_follow_path():
    grid = GridMap.from_rows(["...."])
    sim = Simulation(SimConfig(grid, seed=0), 0)
    sim.path = [sim.u_c, 1, 2]
    sim.follow_path()
    assert sim.u_c == 1 and sim.path == [1, 2]
    assert all(p.u_c == 1 for p in sim.planners.values())


def test_csv_and_json_round_trip():
    res = run_batch(small_config(), 3)
    records = [r for x in res for r in x.records]
    assert records_from_csv(records_to_csv(records)) == [csv_view(r) for r in records]
    assert [TaskRecord.from_json(r.to_json()) for r in records] == records
    assert scatter_csv(records).startswith("instance,task,planner")


def test_summary_separates_initial_task():
    res = run_batch(small_config(grid=bundled_map("maze-32-32-2")), 3)
    rows = {r["planner"]: r for r in summarize(res)}
    assert rows["mopbd"]["sol"] == rows["namoa"]["sol"]
    assert rows["mopbd"]["tasks"] == sum(1 for x in res for r in x.records if r.planner == "mopbd" and r.task > 0)


def test_zero_instances():
    assert summarize(run_batch(small_config(), 0)) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000))
def test_canonical_paths_match_front(seed):
    from conftest import random_small

    grid, g, u_d, u_c = random_small(seed)
    front = exhaustive_front(g, u_c, u_d)
    paths = canonical_paths(g, u_c, u_d, front)
    assert sorted(paths) == front
    for cost, nodes in paths.items():
        assert nodes[0] == u_c and nodes[-1] == u_d
        assert path_cost(g, nodes) == cost
