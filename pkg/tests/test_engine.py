"""Recursion engine: index bookkeeping, frozen low levels, store and cache."""

import pytest

from rwheat.cache import LevelCache
from rwheat.engine import (
    ParametrixEngine,
    all_level_keys,
    node_valid,
    top_level_keys,
)
from rwheat.rawsym import slow_oracle_rn
from rwheat.scalars import Scalar
from rwheat.symexpr import SymExpr, is_zero_mod_pythagoras

E1 = (1, 0, 0, 0)


def test_node_valid():
    assert node_valid(0, 1, (0, 0, 0, 0))
    assert not node_valid(0, 2, (0, 0, 0, 0))  # homogeneity 2j - 2 - |a| = n
    assert node_valid(2, 2, (0, 0, 0, 0))
    assert node_valid(2, 5, (2, 2, 2, 0))
    assert not node_valid(2, 6, (4, 2, 2, 0))  # j > 2n + 1
    assert not node_valid(1, 1, (0, 0, 0, 0))  # 2j < n + 2
    assert not node_valid(2, 3, (1, 1, -2, 2))


@pytest.mark.parametrize("n", range(0, 7))
def test_level_key_enumerations(n):
    allk = all_level_keys(n)
    assert len(set(allk)) == len(allk)
    for j, alpha in allk:
        assert node_valid(n, j, alpha)
    assert set(top_level_keys(n)) == {
        (j, a) for j, a in allk if all(x % 2 == 0 for x in a)
    }


def test_base_node_and_invalid_indices(hopf_engine):
    enc = hopf_engine.table.enc
    assert hopf_engine.r_node(0, 1, (0, 0, 0, 0)) == SymExpr.one(enc)
    assert hopf_engine.r_node(0, 2, (0, 0, 0, 0)).is_zero()
    assert hopf_engine.r_node(-1, 1, (0, 0, 0, 0)).is_zero()
    assert hopf_engine.r_node(3, 1, (9, 0, 0, 0)).is_zero()


def test_level_one_nodes_hopf(hopf_engine):
    enc = hopf_engine.table.enc
    # the leading -r0 prefactor of the recursion flips b_1 = -3i a'/a
    want = SymExpr.from_terms(enc, [(0, (0, 0), (-1, 1), Scalar(0, 3))])
    assert hopf_engine.r_node(1, 2, E1) == want
    # -2i g^22 (d_t g^kk) xi_2 xi_k^2 contributions
    want = SymExpr.from_terms(enc, [(0, (0, 0), (-3, 1), Scalar(0, 4))])
    assert hopf_engine.r_node(1, 3, (1, 2, 0, 0)) == want
    want = SymExpr.from_terms(enc, [(0, (-3, 1), (-4,), Scalar(0, 4))])
    assert hopf_engine.r_node(1, 3, (0, 1, 2, 0)) == want
    assert hopf_engine.store.n_nodes(1) == 9


def test_level_one_node_count_spherical(spherical_engine):
    spherical_engine.ensure_level(1)
    assert spherical_engine.store.n_nodes(1) == 10


def test_matches_slow_composition_hopf(hopf_engine):
    oracle = slow_oracle_rn(hopf_engine.table, 3)
    for n in range(0, 4):
        hopf_engine.ensure_level(n)
        keys = set(oracle[n]) | set(all_level_keys(n))
        for j, alpha in sorted(keys):
            want = oracle[n].get((j, alpha), SymExpr.zero(hopf_engine.table.enc))
            got = hopf_engine.r_node(n, j, alpha)
            if got != want:
                # same function, different spelling of the angle monomials
                assert is_zero_mod_pythagoras(got - want), (n, j, alpha)


def test_node_a_power_bound(hopf_engine):
    # each factor of r0 beyond the first carries at worst one g^-1 ~ a^-2,
    # so coefficients divide by at most a^(2(j-1)) = a^(n + |alpha|)
    enc = hopf_engine.table.enc
    hopf_engine.ensure_level(4)
    for n in range(0, 5):
        for j, alpha, terms in hopf_engine.store.iter_level(n):
            for key in terms:
                assert enc.jet_exponent(key, 0) >= -2 * (j - 1)


def test_iter_top_matches_nodes(hopf_engine):
    hopf_engine.ensure_level(2)
    seen = dict()
    for j, alpha, expr in hopf_engine.iter_top(2):
        seen[(j, alpha)] = expr
    assert seen
    for (j, alpha), expr in seen.items():
        assert expr == hopf_engine.node(2, j, alpha)
        assert expr.phase == 0  # even level: real coefficients


def test_parallel_scatter_matches_serial(hopf_table, hopf_engine):
    eng2 = ParametrixEngine(hopf_table, max_order=4, restrict_top=False, jobs=2)
    eng2.ensure_level(4)
    hopf_engine.ensure_level(4)
    assert eng2.store.n_nodes(4) == hopf_engine.store.n_nodes(4)
    for j, alpha in all_level_keys(4):
        assert eng2.r_node(4, j, alpha) == hopf_engine.r_node(4, j, alpha)


def test_cache_roundtrip(tmp_path, hopf_table, hopf_engine):
    cache = LevelCache(tmp_path)
    first = ParametrixEngine(hopf_table, max_order=3, restrict_top=False, cache=cache)
    first.ensure_level(3)
    assert cache.hits == 0 and cache.misses > 0
    second = ParametrixEngine(hopf_table, max_order=3, restrict_top=False, cache=cache)
    second.ensure_level(3)
    assert cache.hits >= 1
    assert second.store.term_counts[3] == -1  # level came in frozen
    hopf_engine.ensure_level(3)
    for j, alpha in all_level_keys(3):
        assert second.r_node(3, j, alpha) == hopf_engine.r_node(3, j, alpha)


def test_restrict_top_matches_full_level(hopf_table, hopf_engine):
    restricted = ParametrixEngine(hopf_table, max_order=4)
    restricted.ensure_level(4)
    hopf_engine.ensure_level(4)
    top = top_level_keys(4)
    stored = {(j, a) for j, a, _ in restricted.store.iter_level(4)}
    assert stored <= set(top)
    for j, alpha in top:
        assert restricted.node(4, j, alpha) == hopf_engine.node(4, j, alpha)


def test_ensure_level_beyond_max_order_raises(hopf_table):
    eng = ParametrixEngine(hopf_table, max_order=2)
    with pytest.raises(ValueError):
        eng.ensure_level(3)


def test_run_drops_then_recovers_low_levels(hopf_table):
    eng = ParametrixEngine(hopf_table, max_order=4, restrict_top=False)
    eng.run()
    assert not eng.store.has_level(1)  # dropped to bound memory
    want = SymExpr.from_terms(hopf_table.enc, [(0, (0, 0), (-1, 1), Scalar(0, 3))])
    assert eng.r_node(1, 2, E1) == want  # rebuilt from the reseeded base node
