"""e8: lattice model, orbits, shells, coset decoding."""
import numpy as np
import pytest

from e8jac.e8 import (
    FUNDAMENTAL_WEIGHTS,
    HIGHEST_ROOT,
    SIMPLE_ROOTS,
    WEYL_ORDER,
    ZERO,
    BudgetError,
    DominantWeight,
    E8Vector,
    coset_min_norm,
    dominant_reduce,
    max_coset_min_norm,
    max_pairing,
    orbit,
    orbit_array,
    orbit_size,
    pairing,
    shell,
    shell_by_enumeration,
)
from e8jac.qseries import sigma_pow

rng = np.random.default_rng(20240817)


def fw(*coords):
    return DominantWeight.from_fw(coords)


# ---------------------------------------------------------------------------
# model constants


def test_roots_have_norm_two():
    for r in SIMPLE_ROOTS:
        assert r.norm() == 2


def test_weights_dual_to_roots():
    for i, r in enumerate(SIMPLE_ROOTS):
        for j, w in enumerate(FUNDAMENTAL_WEIGHTS):
            assert pairing(r, w) == (1 if i == j else 0)


def test_weight_norms():
    assert [w.norm() for w in FUNDAMENTAL_WEIGHTS] == [4, 8, 14, 30, 20, 12, 6, 2]


def test_highest_root_is_last_weight():
    assert HIGHEST_ROOT == FUNDAMENTAL_WEIGHTS[7]
    assert HIGHEST_ROOT.norm() == 2
    # marks of the affine diagram
    marks = [2, 3, 4, 6, 5, 4, 3, 2]
    combo = ZERO
    for c, r in zip(marks, SIMPLE_ROOTS):
        combo = combo + c * r
    assert combo == HIGHEST_ROOT


def test_t_statistic():
    assert fw(0, 0, 0, 0, 0, 0, 0, 1).t_statistic() == 2
    assert fw(1, 0, 0, 0, 0, 0, 0, 0).t_statistic() == 2
    assert fw(0, 0, 0, 1, 0, 0, 0, 0).t_statistic() == 6


def test_vector_validation():
    with pytest.raises(ValueError):
        E8Vector((1, 0, 0, 0, 0, 0, 0, 0))  # mixed parity
    with pytest.raises(ValueError):
        E8Vector((2, 0, 0, 0, 0, 0, 0, 0))  # sum not 0 mod 4
    with pytest.raises(ValueError):
        E8Vector((1, 1, 1))  # wrong length
    assert E8Vector((1,) * 8).norm() == 2


def test_dominant_weight_rejects_non_dominant():
    with pytest.raises(ValueError):
        DominantWeight(-HIGHEST_ROOT)


# ---------------------------------------------------------------------------
# reduction and orbits


def random_lattice_vector(scale=3):
    while True:
        y = rng.integers(-scale, scale + 1, size=8)
        if rng.integers(2):
            d = 2 * y
        else:
            d = 2 * y + 1
        if d.sum() % 4 == 0:
            return E8Vector(tuple(int(x) for x in d))


def test_reduce_fixes_dominant():
    for coords in [(0,) * 8, (1, 0, 0, 0, 0, 0, 0, 1), (0, 1, 0, 0, 0, 0, 2, 0)]:
        m = fw(*coords)
        assert dominant_reduce(m.v) == m


def test_reduce_preserves_norm_and_lands_dominant():
    for _ in range(300):
        v = random_lattice_vector()
        m = dominant_reduce(v)
        assert m.norm() == v.norm()
        assert all(c >= 0 for c in m.fw)


def test_reduce_constant_on_orbit():
    m = fw(1, 0, 0, 0, 0, 0, 0, 1)
    arr = orbit_array(m)
    for row in arr[rng.integers(len(arr), size=50)]:
        assert dominant_reduce(E8Vector(tuple(int(x) for x in row))) == m


def test_batch_reduce_matches_reference():
    from e8jac.e8 import _batch_reduce, _batch_reduce_by_reflection

    roots = orbit_array(fw(0, 0, 0, 0, 0, 0, 0, 1))
    for k in (1, 2, 4, 6):
        picks = roots[rng.integers(len(roots), size=(20000, k))].sum(axis=1)
        assert (_batch_reduce(picks) == _batch_reduce_by_reflection(picks)).all()
    singles = np.array(
        [random_lattice_vector(4).d for _ in range(500)], dtype=np.int64
    )
    fast = _batch_reduce(singles)
    assert (fast == _batch_reduce_by_reflection(singles)).all()
    for v, row in zip(singles, fast):
        assert dominant_reduce(E8Vector(tuple(int(x) for x in v))).v.d == tuple(
            int(x) for x in row
        )


@pytest.mark.parametrize(
    "coords,size",
    [
        ((0, 0, 0, 0, 0, 0, 0, 0), 1),
        ((0, 0, 0, 0, 0, 0, 0, 1), 240),       # roots
        ((1, 0, 0, 0, 0, 0, 0, 0), 2160),
        ((0, 0, 0, 0, 0, 0, 1, 0), 6720),
        ((0, 1, 0, 0, 0, 0, 0, 0), 17280),
        ((0, 0, 0, 0, 0, 0, 0, 2), 240),
        ((1, 0, 0, 0, 0, 0, 0, 1), 30240),     # the whole norm-10 shell
        ((1, 0, 0, 0, 0, 1, 0, 0), 604800),
    ],
)
def test_orbit_sizes_against_bfs(coords, size):
    m = fw(*coords)
    assert orbit_size(m) == size
    arr = orbit_array(m)
    assert arr.shape == (size, 8)
    # all distinct, lexicographically sorted
    assert (np.unique(arr, axis=0) == arr).all()


def test_orbit_size_total_is_group_order_bound():
    assert WEYL_ORDER == 696729600
    assert WEYL_ORDER % orbit_size(fw(1, 0, 0, 0, 0, 1, 0, 0)) == 0


def test_orbit_list_variant():
    pts = orbit(fw(0, 0, 0, 0, 0, 0, 0, 1))
    assert len(pts) == 240
    assert all(p.norm() == 2 for p in pts)


def test_orbit_budget_guard():
    # norm-44 weight: appears in no shell or catalog support, so never cached
    with pytest.raises(BudgetError):
        orbit_array(fw(2, 1, 0, 0, 0, 0, 0, 0), budget=1000)


def test_orbit_budget_env(monkeypatch):
    monkeypatch.setenv("E8JAC_BUDGET", "100")
    with pytest.raises(BudgetError):
        orbit_array(fw(1, 2, 0, 0, 0, 0, 0, 0))


# ---------------------------------------------------------------------------
# shells


def test_shell_sizes_sigma3():
    for n in range(1, 13):
        total = sum(size for _, size in shell(2 * n))
        assert total == 240 * sigma_pow(n, 3)


def test_shell_zero():
    assert shell(0) == [(DominantWeight(ZERO), 1)]


def test_shell_spot_reps():
    assert [m.fw for m, _ in shell(2)] == [(0, 0, 0, 0, 0, 0, 0, 1)]
    assert sorted(m.fw for m, _ in shell(8)) == [
        (0, 0, 0, 0, 0, 0, 0, 2),
        (0, 1, 0, 0, 0, 0, 0, 0),
    ]


@pytest.mark.parametrize("two_n", [2, 4, 6, 8, 10, 12, 16, 20, 24])
def test_shell_dual_routes_agree(two_n):
    assert shell(two_n) == shell_by_enumeration(two_n)


def test_shell_by_enumeration_budget():
    with pytest.raises(BudgetError):
        shell_by_enumeration(24, budget=1000)


def test_shell_rejects_odd():
    with pytest.raises(ValueError):
        shell(3)


# ---------------------------------------------------------------------------
# coset minima


def brute_coset_min(l, t):
    """Independent oracle: scan all x with (x,x) <= 4(l,l)/t² plus x = 0.

    Any x beyond that bound has |tx| > 2|l|, hence |l + tx| > |l|, so it
    cannot beat the x = 0 candidate.
    """
    best = l.norm()
    m_cap = 4 * l.norm() // (t * t)
    for two_j in range(2, m_cap + 1, 2):
        for rep, _ in shell(two_j):
            arr = orbit_array(rep)
            cand = np.asarray(l.d, dtype=np.int64) + t * arr
            best = min(best, int((cand * cand).sum(axis=1).min()) // 4)
    return best


def test_coset_min_norm_examples():
    assert coset_min_norm(FUNDAMENTAL_WEIGHTS[7], 2) == 2
    assert coset_min_norm(FUNDAMENTAL_WEIGHTS[0], 2) == 4
    assert coset_min_norm(ZERO, 3) == 0


@pytest.mark.parametrize("t", [2, 3, 4])
def test_coset_min_norm_against_brute_ball(t):
    hits = 0
    while hits < 250:
        l = random_lattice_vector(scale=2)
        if l.norm() > 16:
            continue
        hits += 1
        assert coset_min_norm(l, t) == brute_coset_min(l, t)


def test_coset_min_norm_translation_invariant():
    for _ in range(50):
        l = random_lattice_vector(scale=2)
        t = int(rng.integers(2, 5))
        x = random_lattice_vector(scale=1)
        shifted = l + t * x
        assert coset_min_norm(shifted, t) == coset_min_norm(l, t)


def test_max_coset_min_norm_small():
    assert max_coset_min_norm(2) == 4
    assert max_coset_min_norm(3) == 8


# ---------------------------------------------------------------------------
# pairing maxima


def test_max_pairing_spot_values():
    assert max_pairing(fw(0, 0, 0, 0, 0, 0, 0, 1), 4) == 2
    assert max_pairing(fw(1, 0, 0, 0, 0, 0, 0, 0), 4) == 4
    assert max_pairing(fw(3, 0, 0, 0, 0, 0, 0, 0), 4) == 12


def test_max_pairing_symmetric_in_sign():
    # shells are symmetric under negation, so maxima are non-negative
    m = fw(0, 0, 1, 0, 0, 0, 0, 0)
    assert max_pairing(m, 2) >= 0
