import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse
from scipy.optimize import linprog

from mpcsp.genealogy import initial_pool
from mpcsp.instance import GenConfig, generate_instance
from mpcsp.model import (BINARY, CONTINUOUS, EQ, GE, INTEGER, LE, Constraint, ModelSpec, SubproblemState,
                         Variable, build_full_model, build_myopic_subproblem)
from mpcsp.solver import (INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, SolverConfig, SolverError, export_lp,
                          import_solution, solve)
from mpcsp.solver.bnb import _can_prune
from mpcsp.solver.lp import ENGINES, make_engine
from mpcsp.solver.propagate import Propagator


def model(variables, constraints, objective, constant=0.0):
    names = {v[0]: k for k, v in enumerate(variables)}
    vs = tuple(Variable(*v) for v in variables)
    cons = tuple(Constraint(tuple((names[n], c) for n, c in terms), sense, rhs, "c") for terms, sense, rhs in constraints)
    obj = tuple((names[n], c) for n, c in objective)
    return ModelSpec(vs, cons, obj, constant)


def single_binary():
    return model([("u", BINARY, 0, 1)], [([("u", 1)], GE, 1)], [("u", 1)])


BACKENDS = [SolverConfig(), SolverConfig(lp_engine="simplex"), SolverConfig(propagate=False, priorities=False),
            SolverConfig("highs")]


@pytest.mark.parametrize("cfg", BACKENDS + [SolverConfig("external")])
def test_forced_binary(cfg):
    pytest.importorskip("highspy")
    sol = solve(single_binary(), cfg)
    assert sol.status == OPTIMAL
    assert sol.objective == 1
    assert sol.x.tolist() == [1.0]


@pytest.mark.parametrize("cfg", BACKENDS)
def test_infeasible_model(cfg):
    ms = model([("a", BINARY, 0, 1), ("b", BINARY, 0, 1)], [([("a", 1), ("b", 1)], GE, 3)], [("a", 1)])
    assert solve(ms, cfg).status == INFEASIBLE


@pytest.mark.parametrize("cfg", BACKENDS)
def test_unbounded_model(cfg):
    ms = model([("z", INTEGER, 0, np.inf)], [], [("z", -1)])
    assert solve(ms, cfg).status == UNBOUNDED


def test_constant_is_added():
    ms = model([("u", BINARY, 0, 1)], [], [("u", 3)], constant=-5)
    sol = solve(ms)
    assert sol.objective == -5 and sol.bound == -5


def _random_milp(data):
    n = data.draw(st.integers(2, 7))
    m = data.draw(st.integers(1, 5))
    kinds = data.draw(st.lists(st.sampled_from([BINARY, INTEGER, CONTINUOUS]), min_size=n, max_size=n))
    variables = []
    for k, kind in enumerate(kinds):
        ub = 1 if kind == BINARY else data.draw(st.integers(1, 6))
        variables.append((f"x{k}", kind, 0, ub))
    coef = st.integers(-5, 5)
    cons = []
    for _ in range(m):
        terms = [(f"x{k}", data.draw(coef)) for k in range(n)]
        cons.append((terms, data.draw(st.sampled_from([LE, GE])), data.draw(st.integers(-4, 8))))
    # continuous variables get zero objective weight so feasible objectives stay integral
    obj = [(f"x{k}", 0 if kinds[k] == CONTINUOUS else data.draw(coef)) for k in range(n)]
    return model(variables, cons, obj)


@given(st.data())
@settings(max_examples=150, deadline=None)
def test_backends_agree_on_random_milps(data):
    pytest.importorskip("highspy")
    ms = _random_milp(data)
    ref = solve(ms, SolverConfig("highs"))
    for cfg in BACKENDS[:3]:
        sol = solve(ms, cfg)
        assert sol.status == ref.status
        if sol.status == OPTIMAL:
            assert abs(sol.objective - ref.objective) < 1 - 1e-6
            assert ms.evaluate(sol.x) == pytest.approx(sol.objective)
            assert not ms.violations(sol.x)


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_lp_engines_agree(data):
    pytest.importorskip("highspy")
    n = data.draw(st.integers(1, 6))
    m = data.draw(st.integers(1, 5))
    c = np.array(data.draw(st.lists(st.integers(-5, 5), min_size=n, max_size=n)), float)
    A = sparse.csr_matrix(np.array(data.draw(st.lists(st.integers(-4, 4), min_size=n * m, max_size=n * m)),
                                   float).reshape(m, n))
    lo = np.full(m, -np.inf)
    hi = np.array(data.draw(st.lists(st.integers(0, 10), min_size=m, max_size=m)), float)
    lb = np.zeros(n)
    ub = np.array(data.draw(st.lists(st.integers(1, 5), min_size=n, max_size=n)), float)
    results = {name: make_engine(name, c, A, lo, hi).solve(lb, ub) for name in ENGINES}
    statuses = {r.status for r in results.values()}
    assert len(statuses) == 1
    if statuses == {"optimal"}:
        objs = [r.objective for r in results.values()]
        assert max(objs) - min(objs) < 1e-6


def test_unknown_engine():
    with pytest.raises(ValueError, match="unknown LP engine"):
        make_engine("nope", np.zeros(1), sparse.csr_matrix((1, 1)), np.zeros(1), np.zeros(1))


@pytest.fixture(scope="module")
def toy2_subproblem(toy2):
    return build_myopic_subproblem(SubproblemState.at(toy2, initial_pool(toy2)))


def test_toy2_subproblem_all_backends(toy2_subproblem):
    pytest.importorskip("highspy")
    ms = toy2_subproblem
    C = ms.metadata["C"]
    for cfg in BACKENDS + [SolverConfig("external")]:
        sol = solve(ms, cfg)
        assert sol.status == OPTIMAL
        assert round(sol.objective) == C * 312
        assert round(sol.value(ms, "u_0_2")) == 1


def test_root_bound_is_valid(toy2_subproblem):
    ms = toy2_subproblem
    mf = ms.arrays
    finite = np.isfinite(mf.row_hi)
    A_ub = sparse.vstack([mf.A[finite], -mf.A[np.isfinite(mf.row_lo)]])
    b_ub = np.concatenate([mf.row_hi[finite], -mf.row_lo[np.isfinite(mf.row_lo)]])
    lp = linprog(mf.c, A_ub=A_ub, b_ub=b_ub, bounds=list(zip(mf.lb, mf.ub)), method="highs")
    sol = solve(ms)
    root = sol.info["root_bound"]
    assert lp.fun + ms.constant - 1e-6 <= root <= sol.objective + 1e-6
    assert sol.bound <= sol.objective


def test_deterministic(toy2_subproblem):
    a, b = solve(toy2_subproblem), solve(toy2_subproblem)
    assert a.objective == b.objective and np.array_equal(a.x, b.x) and a.nodes == b.nodes


def test_node_limit_reports_limit(toy1):
    ms = build_full_model(toy1)
    sol = solve(ms, SolverConfig(node_limit=3))
    assert sol.status == LIMIT
    assert sol.nodes <= 3 + 2
    if sol.x is not None:
        assert sol.bound <= sol.objective + 1e-6


def test_prune_rules():
    cfg = SolverConfig()
    assert _can_prune(9.2, 10, cfg)  # no integer below 10 above 9.2
    assert not _can_prune(8.9, 10, cfg)
    assert not _can_prune(-1e9, float("inf"), cfg)
    assert _can_prune(95, 100, SolverConfig(abs_gap=1e-6, rel_gap=0.06))


@pytest.mark.parametrize("kwargs", [{"abs_gap": 0}, {"abs_gap": 1.5}, {"rel_gap": -1}, {"backend": "cplex"}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_propagator_fixes_and_detects():
    A = sparse.csr_matrix(np.array([[1.0, 1.0], [1.0, -1.0]]))
    prop = Propagator(A, np.array([2.0, -np.inf]), np.array([np.inf, 0.0]), np.array([1, 1]))
    lb, ub = prop.run(np.zeros(2), np.ones(2))
    assert lb.tolist() == [1, 1]
    assert prop.run(np.zeros(2), np.array([0.0, 1.0])) is None
    # objective cutoff x0 + x1 <= 1 contradicts the first row
    assert prop.run(np.zeros(2), np.ones(2), (np.array([1.0, 1.0]), 1.0)) is None


# -- LP files ------------------------------------------------------------------

def test_export_small_model():
    text = export_lp(single_binary())
    for section in ("Minimize", "Subject To", "Binary", "End"):
        assert section in text.splitlines()
    assert "Bounds" in text
    assert text == export_lp(single_binary())


def test_export_sections_for_kinds():
    ms = model([("a", BINARY, 0, 1), ("k", INTEGER, 0, 7), ("y", CONTINUOUS, 0.5, 2.5)],
               [([("a", 1), ("k", 2), ("y", -1)], LE, 4), ([("k", 1)], EQ, 3)], [("k", 1), ("y", 0.5)], 2)
    text = export_lp(ms)
    assert "General\n k\n" in text
    assert " 0.5 <= y <= 2.5" in text
    assert "+ 2" in text.split("Subject To")[0]


@pytest.mark.slow
def test_large_model_names_unique():
    inst = generate_instance(GenConfig(periods=5, xi=4, objects=(5, 5), items=(20, 20), catalogue=(2, 2), seed=7))
    ms = build_full_model(inst)
    names = [v.name for v in ms.variables]
    assert len(names) >= 10_000
    assert len(set(names)) == len(names)
    text = export_lp(ms)
    binary = text.split("\nBinary\n")[1].split("\nGeneral\n")[0].split("\nEnd")[0].split()
    assert len(binary) == len(set(binary)) == ms.counts()["binary"]


@pytest.mark.slow
def test_toy1_lp_roundtrip_through_external(toy1):
    pytest.importorskip("highspy")
    ms = build_full_model(toy1)
    sol = solve(ms, SolverConfig("external"))
    assert sol.status == OPTIMAL
    assert round(ms.evaluate(sol.x)) == round(sol.objective) == 27831


def test_import_empty_solution():
    ms = model([("u", BINARY, 0, 1)], [([("u", 1)], LE, 1)], [("u", 1)])
    sol = import_solution("# objective 0\n", ms)
    assert sol.status == OPTIMAL and sol.x.tolist() == [0.0] and sol.objective == 0


def test_import_snaps_binaries():
    sol = import_solution("# objective 1\nu 0.9999999\n", single_binary())
    assert sol.x.tolist() == [1.0]


@pytest.mark.parametrize("text, match", [
    ("# objective 0\nv_0_1_9 1\n", "v_0_1_9"),
    ("u 0.5\n", "not integral"),
    ("# objective 7\nu 1\n", "disagrees"),
    ("u\n", "expected"),
    ("# status weird\n", "unknown status"),
])
def test_import_errors(text, match):
    with pytest.raises(SolverError, match=match):
        import_solution(text, single_binary())


def test_import_infeasible_status():
    sol = import_solution("# status infeasible\n", single_binary())
    assert sol.status == INFEASIBLE and sol.x is None


def test_external_failure_raises():
    with pytest.raises(SolverError, match="external solver failed"):
        solve(single_binary(), SolverConfig("external", command="false {lp} {sol}"))
