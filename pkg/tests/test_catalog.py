"""Tests for the form registry, cascade systems, subspaces, and tables."""

from fractions import Fraction

import pytest

from e8jac import (
    CatalogError,
    DominantWeight,
    REGISTRY,
    build,
    classify,
    cusp_basis,
    dimension_bound_table,
    holomorphic_basis,
    holomorphic_subspace,
    pullback_max_table,
    rank_series,
    solve_cascade,
    theta_e8,
    verify_free_module,
)
from e8jac.catalog import default_order, weak_generator_names
from e8jac.invring import SIGMA_LABELS


# ---------------------------------------------------------------------------
# Registry


def test_registry_shape():
    assert len(REGISTRY) == 50
    for name, entry in REGISTRY.items():
        assert entry.name == name
        assert entry.weight % 2 == 0
        assert 1 <= entry.index <= 6
        assert entry.expected_class in ("weak", "holomorphic", "cusp")


def test_declared_only_entries():
    # listed for completeness, but out of constructible range
    for name in ("a5", "x5", "b6", "x6"):
        assert not REGISTRY[name].buildable
        assert REGISTRY[name].builder is None
        with pytest.raises(CatalogError, match="not constructible"):
            build(name)


def test_registry_meta_json():
    meta = REGISTRY["phi_-4_2"].meta_json()
    assert meta["name"] == "phi_-4_2"
    assert meta["weight"] == -4
    assert meta["index"] == 2


def test_build_unknown_name():
    with pytest.raises(KeyError, match="nosuchform"):
        build("nosuchform")


def test_default_orders():
    assert default_order(1) == default_order(3) == 3
    assert default_order(4) == 2
    assert build("x2").order == 3
    assert build("phi_-4_4").order == 2


def test_build_cache_returns_same_object():
    assert build("x2", 2) is build("x2", 2)
    assert build("x2", 2) is not build("x2", 3)


def test_build_respects_requested_order():
    f = build("phi_-4_2", 1)
    assert f.order == 1
    assert (f.weight, f.index) == (-4, 2)


def test_aliases_agree():
    assert build("a1", 2) == build("theta_e8", 2) == theta_e8(2)
    assert build("a2", 2) == build("x2", 2)
    assert build("a3", 2) == build("x3", 2)


def test_starred_recipes_need_two_terms():
    # the Σ_{16'} cancellation scale is read off the q^2 term
    with pytest.raises(CatalogError):
        build("u10_4", 1)


def test_expected_classes_hold_for_index2():
    for name in ("phi_-4_2", "phi_-2_2", "phi_0_2", "x2", "b2",
                 "u12_2", "v14_2", "w16_2"):
        f = build(name, 2)
        assert classify(f).kind == REGISTRY[name].expected_class, name


# ---------------------------------------------------------------------------
# Cascade systems


def test_cascade_index2():
    cs = solve_cascade(2, -4, (0, 2, 4))
    assert cs.index == 2 and cs.start_weight == -4
    assert cs.norms == (0, 2, 4)
    # two vanishing rows plus the weight-0 balance row
    assert len(cs.matrix) == 3
    assert cs.matrix[0] == (1, 1, 1)
    assert cs.matrix[1] == (Fraction(2, 3), Fraction(1, 6), Fraction(-1, 3))
    assert cs.nullspace == ((1, -2, 1),)


def test_cascade_index3():
    cs = solve_cascade(3, -8, (0, 2, 4, 6, 8))
    assert cs.nullspace == ((1, -4, 6, -4, 1),)


def test_cascade_index4():
    cs = solve_cascade(4, -16, tuple(range(0, 18, 2)))
    assert cs.nullspace == ((1, -8, 28, -56, 70, -56, 28, -8, 1),)


@pytest.mark.parametrize("t,w0,top", [(3, -10, 10), (3, -6, 6),
                                      (4, -18, 18), (4, -14, 14)])
def test_cascade_trivial_systems(t, w0, top):
    cs = solve_cascade(t, w0, tuple(range(0, top + 2, 2)))
    assert cs.nullspace == ()


def test_cascade_validation():
    with pytest.raises(ValueError, match="index"):
        solve_cascade(0, -4, (0, 2))
    with pytest.raises(ValueError, match="weight"):
        solve_cascade(2, -3, (0, 2))
    with pytest.raises(ValueError, match="weight"):
        solve_cascade(2, 0, (0, 2))
    for bad in [(), (2, 4), (0, 3), (0, 4, 2)]:
        with pytest.raises(ValueError, match="norms"):
            solve_cascade(2, -4, bad)


# ---------------------------------------------------------------------------
# Holomorphic subspaces


def test_weak_generator_names():
    assert weak_generator_names(1) == ("theta_e8",)
    assert len(weak_generator_names(2)) == 3
    assert len(weak_generator_names(3)) == 5
    assert len(weak_generator_names(4)) == 10
    with pytest.raises(KeyError):
        weak_generator_names(5)


def test_weight4_solutions_match_recipes():
    # the linear solver and the operator recipes must find the same forms
    assert holomorphic_subspace(4, 1, 2) == [theta_e8(2)]
    assert holomorphic_subspace(4, 2, 2) == [build("x2", 2)]


def test_weight6_index3_solution():
    sols = holomorphic_subspace(6, 3, 2)
    assert len(sols) == 1
    assert sols[0] == build("b3", 2)
    assert sols[0].term(0).display_map() == {None: Fraction(1)}


def test_weight4_index4_two_solutions():
    sols = holomorphic_subspace(4, 4, 2)
    assert len(sols) == 2
    consts = sorted(s.term(0).coeff(DominantWeight.from_fw([0] * 8)) for s in sols)
    assert consts == [0, 1]
    for s in sols:
        assert classify(s).kind in ("holomorphic", "cusp")


def test_subspace_validation():
    with pytest.raises(ValueError, match="order"):
        holomorphic_subspace(4, 3, 0)
    with pytest.raises(ValueError, match="index"):
        holomorphic_subspace(4, 5, 2)
    with pytest.raises(ValueError, match="even"):
        holomorphic_subspace(5, 2, 2)


def test_empty_subspace_below_range():
    assert holomorphic_subspace(-20, 2, 2) == []


# ---------------------------------------------------------------------------
# Free-module structure


def test_free_module_index1():
    rep = verify_free_module(1, 16, order=2)
    assert rep.ok
    assert rep.generator_count == 1
    # one copy of the modular ring shifted to weight 4
    expected = {4: 1, 6: 0, 8: 1, 10: 1, 12: 1, 14: 1, 16: 2}
    assert {w: e for w, e, _, _, _ in rep.rows} == expected
    for _, e, rk, ok, _ in rep.rows:
        assert ok and rk == e


def test_free_module_index2():
    rep = verify_free_module(2, 6, order=2)
    assert rep.ok
    assert rep.rows[0][0] == -4


# ---------------------------------------------------------------------------
# Tables


def test_rank_series():
    assert rank_series(6) == [1, 1, 3, 5, 10, 15, 27]
    assert rank_series(0) == [1]
    assert rank_series(14)[14] == 505
    with pytest.raises(ValueError):
        rank_series(-1)


def test_dimension_bounds_low_range():
    table = dimension_bound_table(12)
    assert table == [
        (4, 1, ""),
        (6, 0, "forced to zero: no invariant form of weight 6, index 1"),
        (8, 1, ""),
        (10, 1, ""),
        (12, 2, ""),
    ]


def test_dimension_bounds_top_of_range():
    table = dimension_bound_table(40)
    assert table[-1] == (40, 24, "")
    assert len(table) == 19


def test_dimension_bounds_validation():
    with pytest.raises(ValueError):
        dimension_bound_table(13)
    with pytest.raises(ValueError):
        dimension_bound_table(2)
    with pytest.raises(CatalogError, match="weight 40"):
        dimension_bound_table(42)


def test_pullback_max_table():
    table = pullback_max_table()
    assert len(table) == len(SIGMA_LABELS)
    d = dict(table)
    assert d["Σ_2"] == 2
    assert d["Σ_4"] == 4


# ---------------------------------------------------------------------------
# Distinguished bases


def test_index3_bases():
    hol = holomorphic_basis(3, 2)
    assert [n for n, _ in hol] == ["x3", "b3", "x2*theta", "b2*theta", "theta^3"]
    for name, f in hol:
        assert f.index == 3
        assert classify(f).kind in ("holomorphic", "cusp"), name
    cusp = cusp_basis(3, 2)
    assert len(cusp) == 5
    for name, f in cusp:
        assert classify(f).kind == "cusp", name


def test_index4_bases():
    hol = holomorphic_basis(4, 2)
    assert len(hol) == 10
    weights = [f.weight for _, f in hol]
    assert weights == sorted(weights)
    for name, f in hol:
        assert f.index == 4
        assert classify(f).kind in ("holomorphic", "cusp"), name
    cusp = cusp_basis(4, 2)
    for name, f in cusp:
        assert classify(f).kind == "cusp", name


def test_bases_outside_tabulated_range():
    with pytest.raises(ValueError):
        holomorphic_basis(2)
    with pytest.raises(ValueError):
        cusp_basis(5)
