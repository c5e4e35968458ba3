import math

import pytest
from hypothesis import given, strategies as st

from mpcsp.genealogy import initial_pool, log2_bits, spawn_pool, purchasable_pool
from mpcsp.instance import CatalogueItem, Instance, OrderedItem, PurchasableObject
from mpcsp.model import (ModelBuildError, SubproblemState, amortized_cost, build_flook_subproblem, build_full_model,
                         build_myopic_subproblem, evaluate_full_objective, subproblem_decision)
from mpcsp.solver import OPTIMAL, SolverConfig, solve


def first_state(inst):
    return SubproblemState.at(inst, initial_pool(inst))


def test_full_objective_at_reference_plans(toy1):
    assert toy1.total_cost == 348
    assert evaluate_full_objective(toy1, 80, 9) == 27831
    assert evaluate_full_objective(toy1, 108, 27) == 37557


@pytest.mark.parametrize("name, bv, cv, co", [("inst1", 369, 150, 2605), ("inst2", 270, 150, 1635)])
def test_full_model_counts(name, bv, cv, co, request):
    inst = request.getfixturevalue(name)
    counts = build_full_model(inst).counts()
    assert counts == {"binary": bv, "integer": 0, "continuous": cv, "constraints": co}


def test_full_model_metadata(toy1):
    ms = build_full_model(toy1)
    meta = ms.metadata
    assert (meta["W_hat"], meta["H_hat"]) == (10, 8)
    assert meta["L"] == math.floor(math.log2(10)) + 1 == 4
    assert meta["C"] == 348
    n = len(ms.variables)
    assert all(0 <= j < n for con in ms.constraints for j, _ in con.terms)
    assert len(set(v.name for v in ms.variables)) == n


def test_full_model_bit_expansion_covers_every_width(inst1):
    ms = build_full_model(inst1)
    L, Wh = ms.metadata["L"], ms.metadata["W_hat"]
    last = ms.metadata["layout"][-1]
    rows = [c for c in ms.constraints if c.family == "width_bits"]
    assert len(rows) == len(last) - last.m
    for con in rows:
        coefs = {ms.variables[j].name: c for j, c in con.terms}
        wname = next(k for k in coefs if k.startswith("Wb_"))
        tag = wname.split("_", 2)[2].split("_")[-1]
        assert coefs[wname] == 1 and con.rhs == 0
        bits = {l: coefs[f"theta_{tag}_{l}"] for l in range(L)}
        assert bits == {l: -(2 ** l) for l in range(L)}
        cap = ms.variables[ms.var(wname)].upper
        for w in range(int(cap) + 1):
            chosen = [l for l in range(L) if w >> l & 1]
            assert all(ms.variables[ms.var(f"theta_{tag}_{l}")].upper == 1 for l in chosen)
            assert sum(2 ** l for l in chosen) == w
    assert 2 ** L > Wh


@given(st.integers(1, 5000))
def test_bit_count_formula(w):
    L = log2_bits(w)
    assert L == math.floor(math.log2(w)) + 1
    assert 2 ** (L - 1) <= w < 2 ** L


def test_full_model_headroom_error():
    big = PurchasableObject(2 ** 20, 2 ** 20, 1)
    inst = Instance(0, 1, 1, ((big,),), ((OrderedItem(1, 1),),), (CatalogueItem(1, 1),))
    with pytest.raises(ModelBuildError, match="headroom"):
        build_full_model(inst)


@pytest.mark.slow
def test_full_model_toy1_optimum(toy1, highs):
    ms = build_full_model(toy1)
    sol = solve(ms, highs)
    assert sol.status == OPTIMAL
    assert round(sol.objective) == 27831


def test_myopic_toy2_buys_cheapest(toy2):
    ms = build_myopic_subproblem(first_state(toy2))
    sol = solve(ms)
    assert sol.status == OPTIMAL
    dec = subproblem_decision(ms, sol.x)
    assert dec.used == {2}
    C = ms.metadata["C"]
    assert C == 357 + 361 + 312
    assert round(sol.objective) == C * 312  # 24x13 leaves nothing usable


def test_myopic_toy1_buys_small_object(toy1):
    ms = build_myopic_subproblem(first_state(toy1))
    sol = solve(ms)
    dec = subproblem_decision(ms, sol.x)
    assert dec.used == {1}
    assert round(sol.objective) == 116 * 36 - 3 - 18  # leftovers 3x1 and 3x6


def test_empty_orders_cost_nothing():
    inst = Instance(0, 1, 1, ((PurchasableObject(5, 5, 1),),), ((),), (CatalogueItem(1, 1),))
    for cfg in (SolverConfig(), SolverConfig("highs")):
        sol = solve(build_myopic_subproblem(first_state(inst)), cfg)
        assert sol.status == OPTIMAL and sol.objective == 0


def test_scale_dominates_leftovers(toy1, toy2, inst1):
    for inst in (toy1, toy2, inst1):
        st_ = first_state(inst)
        ms = build_myopic_subproblem(st_)
        # at least one item is cut from any used object
        upper = sum(o.unit_cost * o.area for o in st_.pool.objects if not o.is_empty)
        smallest = min(it.width * it.height for it in st_.items)
        assert ms.metadata["C"] > upper - smallest


@pytest.mark.parametrize("args, expected", [
    ((1, 21, 17, 1, 1.0, 126, 1.0, 0), 231),
    ((1, 19, 19, 1, 1.0, 152, 1.0, 0), 209),
    ((1, 24, 13, 1, 1.0, 0, 1.0, 0), 312),
    ((1, 19, 19, 1, 102 / 152, 152, 0.0, 0), 259),
    ((1, 21, 17, 1, 314 / 357, 126, 0.0, 0), 247),
    ((1, 21, 17, 0, 0.5, 0, 0.5, 0), 0),
    ((2, 3, 3, 1, 0.5, 3, 0.25, 2), 18 - 4),
])
def test_amortized_cost(args, expected):
    assert amortized_cost(*args) == expected


def test_flook_optimistic_toy2(toy2):
    st_ = first_state(toy2)
    delta = {(1, k): 1.0 for k in range(1, 7)}
    ms = build_flook_subproblem(st_, delta)
    sol = solve(ms)
    dec = subproblem_decision(ms, sol.x)
    assert dec.used == {1}
    assert round(sol.value(ms, "lambda_0_1")) == 152
    C = ms.metadata["C"]
    assert round(sol.objective) == C * 209 - 152


def test_flook_zero_delta_matches_myopic(toy1, toy2):
    for inst in (toy1, toy2):
        st_ = first_state(inst)
        my = build_myopic_subproblem(st_)
        fl = build_flook_subproblem(st_, {})
        assert [v.name for v in my.variables] == [v.name for v in fl.variables]
        assert my.objective == fl.objective
        assert solve(my).objective == solve(fl).objective


def test_flook_rejects_bad_delta(toy2):
    with pytest.raises(ModelBuildError, match="outside"):
        build_flook_subproblem(first_state(toy2), {(1, 1): 1.5})


def test_later_subproblem_values_idle_leftovers(toy1):
    pool0 = initial_pool(toy1)
    ms0 = build_myopic_subproblem(first_state(toy1))
    dec = subproblem_decision(ms0, solve(ms0).x)
    pool1 = spawn_pool(pool0, dec, purchasable_pool(toy1, 1))
    ms1 = build_myopic_subproblem(SubproblemState.at(toy1, pool1))
    assert ms1.metadata["C"] == 232
    # leftovers of the second purchasable sit after the two new purchasables
    assert {4, 5} <= set(ms1.metadata["targets"])
    assert ms1.metadata["targets"] == sorted(ms1.metadata["targets"])


def test_pretty_uses_bracketed_symbols(toy1):
    text = build_myopic_subproblem(first_state(toy1)).pretty(limit=5)
    assert text.startswith("minimize")
    assert "v[0,0,1]" in text
    assert "gamma[1,2]" in text


def test_unknown_symbol_lookup(toy1):
    ms = build_full_model(toy1)
    with pytest.raises(KeyError):
        ms.var("nope")
