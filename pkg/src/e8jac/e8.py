"""Exact E8 lattice machinery.

Vectors live in doubled coordinates: an E8 point x (with x_i all integers
or all half-integers and even coordinate sum) is stored as d = 2x, eight
integers of one shared parity with sum divisible by 4. Everything stays in
integer arithmetic, including the closest-vector decoder.

Bulk kernels (shell enumeration, batched dominant reduction, orbit closure,
the full coset sweep) run on int64 numpy arrays; all magnitudes here are a
few hundred at most, nowhere near overflow.
"""
from __future__ import annotations

import os
import threading
from math import factorial, isqrt

import numpy as np

from .qseries import sigma_pow

__all__ = [
    "E8Vector",
    "DominantWeight",
    "BudgetError",
    "SIMPLE_ROOTS",
    "FUNDAMENTAL_WEIGHTS",
    "HIGHEST_ROOT",
    "ZERO",
    "WEYL_ORDER",
    "element_budget",
    "pairing",
    "dominant_reduce",
    "orbit",
    "orbit_array",
    "orbit_size",
    "shell",
    "shell_by_enumeration",
    "coset_min_norm",
    "max_coset_min_norm",
    "max_pairing",
]

WEYL_ORDER = 696729600  # 2^14 * 3^5 * 5^2 * 7

DEFAULT_BUDGET = 2_000_000
BUDGET_ENV = "E8JAC_BUDGET"


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured element budget."""


def element_budget(budget: int | None = None) -> int:
    """The effective element budget: explicit argument, else environment, else default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_BUDGET


class E8Vector:
    """A lattice point in doubled-integer coordinates (true coordinate = d_i / 2)."""

    __slots__ = ("d",)

    def __init__(self, d):
        d = tuple(int(x) for x in d)
        if len(d) != 8:
            raise ValueError("need exactly 8 coordinates")
        par = d[0] & 1
        if any((x & 1) != par for x in d):
            raise ValueError(f"coordinates must share one parity: {d}")
        if sum(d) % 4 != 0:
            raise ValueError(f"coordinate sum must be divisible by 4: {d}")
        self.d = d

    def norm(self) -> int:
        return sum(x * x for x in self.d) // 4

    def __add__(self, other: "E8Vector") -> "E8Vector":
        return E8Vector(tuple(a + b for a, b in zip(self.d, other.d)))

    def __sub__(self, other: "E8Vector") -> "E8Vector":
        return E8Vector(tuple(a - b for a, b in zip(self.d, other.d)))

    def __neg__(self) -> "E8Vector":
        return E8Vector(tuple(-a for a in self.d))

    def __rmul__(self, c: int) -> "E8Vector":
        return E8Vector(tuple(c * a for a in self.d))

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        return isinstance(other, E8Vector) and self.d == other.d

    def __hash__(self) -> int:
        return hash(self.d)

    def __lt__(self, other: "E8Vector") -> bool:
        return self.d < other.d

    def __repr__(self) -> str:
        return f"E8Vector({list(self.d)})"

    def to_json(self) -> dict:
        return {"d": list(self.d), "doubled": True}

    @classmethod
    def from_json(cls, obj: dict) -> "E8Vector":
        if not obj.get("doubled"):
            raise ValueError("expected doubled-coordinate serialization")
        return cls(obj["d"])


# Doubled coordinates of the simple roots (rows) and fundamental weights.
# The weights are dual to the roots: (alpha_i, w_j) = delta_ij.
_ROOTS_D = (
    (1, -1, -1, -1, -1, -1, -1, 1),
    (2, 2, 0, 0, 0, 0, 0, 0),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
)
_WEIGHTS_D = (
    (0, 0, 0, 0, 0, 0, 0, 4),
    (1, 1, 1, 1, 1, 1, 1, 5),
    (-1, 1, 1, 1, 1, 1, 1, 7),
    (0, 0, 2, 2, 2, 2, 2, 10),
    (0, 0, 0, 2, 2, 2, 2, 8),
    (0, 0, 0, 0, 2, 2, 2, 6),
    (0, 0, 0, 0, 0, 2, 2, 4),
    (0, 0, 0, 0, 0, 0, 2, 2),
)

SIMPLE_ROOTS = tuple(E8Vector(r) for r in _ROOTS_D)
FUNDAMENTAL_WEIGHTS = tuple(E8Vector(w) for w in _WEIGHTS_D)
ZERO = E8Vector((0,) * 8)
# highest root = w_8; its expansion in simple roots is asserted in the tests
HIGHEST_ROOT = FUNDAMENTAL_WEIGHTS[7]

_A2 = np.array(_ROOTS_D, dtype=np.int64)  # (8, 8), rows are doubled roots
_W2 = np.array(_WEIGHTS_D, dtype=np.int64)

# Edges of the Coxeter graph, derived from the root pairings; used for
# stabilizer classification. (0-based vertex labels.)
_EDGES = frozenset(
    (i, j)
    for i in range(8)
    for j in range(i + 1, 8)
    if sum(_ROOTS_D[i][k] * _ROOTS_D[j][k] for k in range(8)) != 0
)


def pairing(a: E8Vector, b: E8Vector) -> int:
    """The standard scalar product; always an integer on the lattice."""
    dot = sum(x * y for x, y in zip(a.d, b.d))
    q, r = divmod(dot, 4)
    if r:
        raise ValueError("pairing of lattice vectors must be integral")
    return q


class DominantWeight:
    """An E8Vector in the closed fundamental chamber, with its weight coordinates.

    fw[i] = (alpha_{i+1}, v) >= 0, and v = sum fw[i] * w_{i+1}.
    """

    __slots__ = ("v", "fw")

    def __init__(self, v: E8Vector):
        fw = tuple(pairing(r, v) for r in SIMPLE_ROOTS)
        if any(x < 0 for x in fw):
            raise ValueError(f"not dominant: pairings {fw}")
        self.v = v
        self.fw = fw

    @classmethod
    def from_fw(cls, fw) -> "DominantWeight":
        fw = tuple(int(x) for x in fw)
        if len(fw) != 8 or any(x < 0 for x in fw):
            raise ValueError("fw coordinates must be 8 non-negative integers")
        d = tuple(
            sum(fw[i] * _WEIGHTS_D[i][k] for i in range(8)) for k in range(8)
        )
        return cls(E8Vector(d))

    def norm(self) -> int:
        return self.v.norm()

    def t_statistic(self) -> int:
        """T(m) = (m, highest root) — the index bound statistic for q^0-terms."""
        return pairing(self.v, HIGHEST_ROOT)

    def __eq__(self, other) -> bool:
        return isinstance(other, DominantWeight) and self.v == other.v

    def __hash__(self) -> int:
        return hash(self.v)

    def __lt__(self, other: "DominantWeight") -> bool:
        return self.v < other.v

    def __repr__(self) -> str:
        return f"DominantWeight(fw={list(self.fw)})"

    def to_json(self) -> dict:
        out = self.v.to_json()
        out["fw"] = list(self.fw)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "DominantWeight":
        m = cls(E8Vector.from_json(obj))
        if tuple(obj.get("fw", m.fw)) != m.fw:
            raise ValueError("fw field inconsistent with coordinates")
        return m


def dominant_reduce(v: E8Vector) -> DominantWeight:
    """Reduce to the unique orbit representative in the closed chamber.

    Scans the simple roots in fixed order and reflects at the first
    negative pairing until none remains. Idempotent on dominant input.
    """
    d = list(v.d)
    while True:
        for i, root in enumerate(_ROOTS_D):
            p4 = sum(d[k] * root[k] for k in range(8))
            if p4 < 0:
                c = p4 // 4  # exact: both are lattice vectors
                for k in range(8):
                    d[k] -= c * root[k]
                break
        else:
            return DominantWeight(E8Vector(tuple(d)))


def _batch_reduce_by_reflection(arr: np.ndarray) -> np.ndarray:
    """Dominant-reduce every row by repeated single simple reflections.

    One reflection per row per pass makes this slow on large batches with
    long reduction words; kept as the reference implementation for
    _batch_reduce.
    """
    v = np.array(arr, dtype=np.int64)
    active = np.arange(len(v))
    while active.size:
        p4 = v[active] @ _A2.T
        neg = p4 < 0
        hit = neg.any(axis=1)
        if not hit.any():
            break
        rows = active[hit]
        first = neg[hit].argmax(axis=1)
        coef = p4[hit, first] // 4
        v[rows] -= coef[:, None] * _A2[first]
        active = rows
    return v


_SPINOR_D = np.array(_ROOTS_D[0], dtype=np.int64)


def _batch_reduce(arr: np.ndarray) -> np.ndarray:
    """Dominant-reduce every row of an (n, 8) doubled-coordinate array.

    The simple roots split into the chain generating W(D7) — signed
    permutations of coordinates 1..7 with an even number of sign changes —
    and the single spinor-type root. A whole W(D7) canonicalization is one
    vectorized step: sort absolute values ascending and put a minus on the
    smallest entry iff the sign parity is odd (a zero absorbs odd parity
    for free). Alternating that step with one spinor reflection wherever
    its pairing is negative converges in a handful of passes, since the
    canonicalization maximizes the D7 height at fixed last coordinate and
    the reflection strictly increases the full height.
    """
    v = np.array(arr, dtype=np.int64)
    active = np.arange(len(v))
    while active.size:
        block = v[active]
        aa = np.abs(block[:, :7])
        odd = (block[:, :7] < 0).sum(axis=1) & 1
        aa.sort(axis=1)
        flip = (odd == 1) & (aa[:, 0] > 0)
        aa[flip, 0] = -aa[flip, 0]
        block[:, :7] = aa
        coef = (block @ _SPINOR_D) // 4
        hit = coef < 0
        block[hit] -= coef[hit, None] * _SPINOR_D
        v[active] = block
        active = active[hit]
    return v


# ---------------------------------------------------------------------------
# Orbit sizes via parabolic stabilizers.
#
# The stabilizer of a dominant weight is the standard parabolic subgroup
# generated by the simple reflections fixing it, i.e. those i with fw[i] = 0.
# Its order is the product of the Weyl-group orders of the connected
# components of the induced Coxeter subdiagram, each of type A, D or E.

def _component_group_order(nodes: list[int], adj: dict[int, list[int]]) -> int:
    n = len(nodes)
    deg = {u: len(adj[u]) for u in nodes}
    branch = [u for u in nodes if deg[u] == 3]
    if not branch:
        return factorial(n + 1)  # type A_n
    b = branch[0]
    arms = []
    for start in adj[b]:
        length, prev, cur = 1, b, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return 2 ** (n - 1) * factorial(n)  # type D_n
    if arms == [1, 2, 2]:
        return 51840  # E6
    if arms == [1, 2, 3]:
        return 2903040  # E7
    if arms == [1, 2, 4]:
        return WEYL_ORDER  # E8
    raise AssertionError(f"impossible subdiagram arms {arms}")


def _stabilizer_order(fw) -> int:
    zero = [i for i in range(8) if fw[i] == 0]
    zs = set(zero)
    adj = {u: [v for v in zero if (min(u, v), max(u, v)) in _EDGES] for u in zero}
    order = 1
    seen: set[int] = set()
    for u in zero:
        if u in seen:
            continue
        comp, stack = [], [u]
        seen.add(u)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        order *= _component_group_order(comp, adj)
    assert zs == seen or not zero
    return order


_lock = threading.Lock()
_size_cache: dict[tuple, int] = {}
_orbit_cache: dict[tuple, np.ndarray] = {}
_shell_cache: dict[int, list] = {}


def orbit_size(m: DominantWeight) -> int:
    """|W(E8)-orbit of m| = |W(E8)| / |stabilizer|, computed without enumeration."""
    key = m.v.d
    with _lock:
        if key not in _size_cache:
            stab = _stabilizer_order(m.fw)
            q, r = divmod(WEYL_ORDER, stab)
            assert r == 0
            _size_cache[key] = q
        return _size_cache[key]


def orbit_array(m: DominantWeight, budget: int | None = None) -> np.ndarray:
    """The full orbit as a lexicographically sorted (size, 8) int64 array.

    Breadth-first closure under the 8 simple reflections. The size is known
    up front from the stabilizer order, which doubles as the budget guard
    and as a completeness assertion on the closure.
    """
    key = m.v.d
    with _lock:
        cached = _orbit_cache.get(key)
    if cached is not None:
        return cached
    size = orbit_size(m)
    if size > element_budget(budget):
        raise BudgetError(
            f"orbit of size {size} exceeds element budget {element_budget(budget)}"
        )

    def rows_view(a: np.ndarray) -> np.ndarray:
        b = np.ascontiguousarray(a)
        return b.view([("", b.dtype)] * 8).ravel()

    frontier = np.array([m.v.d], dtype=np.int64)
    seen = frontier
    seen_v = rows_view(seen)
    while frontier.size:
        p4 = frontier @ _A2.T
        images = [frontier - (p4[:, i : i + 1] // 4) * _A2[i] for i in range(8)]
        cand = np.unique(np.concatenate(images), axis=0)
        fresh = cand[~np.isin(rows_view(cand), seen_v, assume_unique=True)]
        if not fresh.size:
            break
        seen = np.concatenate([seen, fresh])
        seen_v = np.sort(rows_view(seen))
        frontier = fresh
    assert len(seen) == size, "orbit closure disagrees with stabilizer order"
    order = np.lexsort(tuple(seen[:, i] for i in range(7, -1, -1)))
    out = seen[order]
    out.setflags(write=False)
    with _lock:
        _orbit_cache[key] = out
    return out


def orbit(m: DominantWeight, budget: int | None = None) -> list[E8Vector]:
    """The orbit as E8Vector objects in deterministic (lex) order."""
    return [E8Vector(tuple(row)) for row in orbit_array(m, budget)]


# ---------------------------------------------------------------------------
# Shells.

def _gram_weights() -> np.ndarray:
    return (_W2 @ _W2.T) // 4


_GW = _gram_weights()  # (w_i, w_j), all entries positive


def _dominant_of_norm(two_n: int) -> list[DominantWeight]:
    """All dominant weights of given norm, by branch-and-bound over fw coords.

    Every entry of the weight Gram matrix is positive, so the norm is
    monotone in each coordinate and partial sums prune exactly.
    """
    found: list[tuple] = []
    fw = [0] * 8

    def rec(i: int, acc: int) -> None:
        if i == 8:
            if acc == two_n:
                found.append(tuple(fw))
            return
        x = 0
        while True:
            add = x * x * _GW[i, i] + 2 * x * sum(
                fw[j] * _GW[j, i] for j in range(i)
            )
            if acc + add > two_n:
                break
            fw[i] = x
            rec(i + 1, acc + add)
            x += 1
        fw[i] = 0

    rec(0, 0)
    return [DominantWeight.from_fw(f) for f in found]


def shell(two_n: int) -> list[tuple[DominantWeight, int]]:
    """Orbit decomposition of the norm-2n shell, with orbit sizes.

    Representatives are enumerated directly in the dominant cone; sizes come
    from the stabilizer order. Completeness is certified on every call by
    the theta-series identity: total size = 240 * sigma_3(n).
    """
    if two_n < 0 or two_n % 2:
        raise ValueError("shell norm must be even and non-negative")
    with _lock:
        cached = _shell_cache.get(two_n)
    if cached is not None:
        return list(cached)
    reps = _dominant_of_norm(two_n)
    out = [(m, orbit_size(m)) for m in sorted(reps)]
    total = sum(s for _, s in out)
    expect = 1 if two_n == 0 else 240 * sigma_pow(two_n // 2, 3)
    assert total == expect, f"shell {two_n}: {total} points, expected {expect}"
    with _lock:
        _shell_cache[two_n] = out
    return list(out)


def _int_tuples4(max_sq: int, odd: bool) -> np.ndarray:
    """All 4-tuples of (all-even-parity handled by caller) integers, |.|^2 <= max_sq."""
    r = isqrt(max_sq)
    vals = np.arange(-r, r + 1, dtype=np.int64)
    if odd:
        vals = vals[vals % 2 != 0]
    grids = np.meshgrid(vals, vals, vals, vals, indexing="ij")
    tup = np.stack([g.ravel() for g in grids], axis=1)
    keep = (tup * tup).sum(axis=1) <= max_sq
    return tup[keep]


def _join_halves(half: np.ndarray, target: int, budget: int) -> np.ndarray:
    """All 8-tuples (a | b) with a, b from `half` and |a|^2 + |b|^2 = target."""
    ss = (half * half).sum(axis=1)
    order = np.argsort(ss, kind="stable")
    half, ss = half[order], ss[order]
    values, starts = np.unique(ss, return_index=True)
    ends = np.append(starts[1:], len(ss))
    span = {int(v): (int(s), int(e)) for v, s, e in zip(values, starts, ends)}
    total = sum(
        (span[v][1] - span[v][0]) * (span[target - v][1] - span[target - v][0])
        for v in span
        if target - v in span
    )
    if total > budget:
        raise BudgetError(f"enumeration of {total} candidates exceeds budget {budget}")
    blocks = []
    for v, (s1, e1) in span.items():
        w = target - v
        if w not in span:
            continue
        s2, e2 = span[w]
        left = np.repeat(half[s1:e1], e2 - s2, axis=0)
        right = np.tile(half[s2:e2], (e1 - s1, 1))
        blocks.append(np.concatenate([left, right], axis=1))
    if not blocks:
        return np.empty((0, 8), dtype=np.int64)
    return np.concatenate(blocks)


def shell_by_enumeration(
    two_n: int, budget: int | None = None
) -> list[tuple[DominantWeight, int]]:
    """Shell decomposition by the direct route: enumerate every lattice point
    of the given norm, batch dominant-reduce, and bin.

    Kept alongside shell() as the independent cross-check (meet-in-the-middle
    join over coordinate halves; integer-coordinate and half-integer-coset
    points handled as separate parity classes).
    """
    if two_n < 0 or two_n % 2:
        raise ValueError("shell norm must be even and non-negative")
    if two_n == 0:
        return [(DominantWeight(ZERO), 1)]
    limit = element_budget(budget)
    # even class: d = 2y with sum(y) even and |y|^2 = 2n
    even = _join_halves(_int_tuples4(two_n, odd=False), two_n, limit)
    even = 2 * even[even.sum(axis=1) % 2 == 0]
    # odd class: all d_i odd, sum d = 0 mod 4, |d|^2 = 8n
    odd = _join_halves(_int_tuples4(4 * two_n, odd=True), 4 * two_n, limit)
    odd = odd[odd.sum(axis=1) % 4 == 0]
    points = np.concatenate([even, odd])
    reduced = _batch_reduce(points)
    reps, counts = np.unique(reduced, axis=0, return_counts=True)
    out = [
        (DominantWeight(E8Vector(tuple(r))), int(c)) for r, c in zip(reps, counts)
    ]
    out.sort(key=lambda pair: pair[0])
    return out


# ---------------------------------------------------------------------------
# Coset minima via exact closest-vector decoding.
#
# min{(v,v) : v in l + tE8} = t^2 * dist(-l/t, E8)^2, and E8 decoding splits
# over the two glue classes of D8. Working at scale 2t keeps everything in
# integers: per coordinate A_i = -(d_i + t*g) with g in {0,1} encodes the
# target times 2t; rounding residues R_i lie in [-t, t].

def _decode_scaled(A: np.ndarray, t: int) -> np.ndarray:
    """Per row: 4t^2 * dist(A/(2t), D8)^2, exactly."""
    T = 2 * t
    n = (A + t) // T  # nearest integer (ties round up: value unaffected)
    R = A - T * n
    cost0 = (R * R).sum(axis=1)
    # flipping coordinate i to its second-nearest integer costs T^2 - 2T|R_i|
    delta = (T * T - 2 * T * np.abs(R)).min(axis=1)
    odd = (n.sum(axis=1) % 2) != 0
    return cost0 + np.where(odd, delta, 0)


def coset_min_norm(l: E8Vector, t: int) -> int:
    """Minimum norm in the coset l + tE8, by exact decoding (no search)."""
    if t < 1:
        raise ValueError("index t must be positive")
    d = np.array([l.d], dtype=np.int64)
    best = None
    for g in (0, 1):
        A = -(d + t * g)
        val = int(_decode_scaled(A, t)[0])
        best = val if best is None else min(best, val)
    q, r = divmod(best, 4)
    assert r == 0, "scaled minimum must be divisible by 4"
    return q


def max_coset_min_norm(t: int, chunk: int = 1 << 16) -> int:
    """max over all cosets of E8/tE8 of the coset minimum norm.

    Sweeps all t^8 coset representatives sum(c_i * alpha_i), c in [0,t)^8,
    in vectorized chunks.
    """
    if t < 1:
        raise ValueError("index t must be positive")
    if t == 1:
        return 0
    total = t**8
    radix = t ** np.arange(8, dtype=np.int64)
    best = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // radix) % t
        dvecs = digits @ _A2
        scaled = None
        for g in (0, 1):
            val = _decode_scaled(-(dvecs + t * g), t)
            scaled = val if scaled is None else np.minimum(scaled, val)
        m = int(scaled.max())
        best = max(best, m)
    assert best % 4 == 0
    return best // 4


def max_pairing(m: DominantWeight, two_n: int, budget: int | None = None) -> int:
    """max of (m, l) over the norm-2n shell."""
    if two_n == 0:
        return 0
    best = None
    md = np.array(m.v.d, dtype=np.int64)
    for rep, _size in shell(two_n):
        arr = orbit_array(rep, budget)
        val = int((arr @ md).max()) // 4
        best = val if best is None else max(best, val)
    return best
