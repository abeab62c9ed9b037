"""W(E8)-invariant finite Fourier sums.

An InvariantElement is a rational linear combination of plain orbit sums
orb(m) = sum of e^(a,z) over the Weyl orbit of a dominant weight m. These
are the q-power coefficients of the Jacobi forms in this package.

Internally everything multiplies plain orbit sums; the 240-normalized
Σ-labels used in printed expansions are a display layer on top
(coefficient of orb(m) renders as c·|orb(m)|/240 on the label for m).
"""
from __future__ import annotations

import threading
from fractions import Fraction

import numpy as np

from .e8 import (
    ZERO,
    DominantWeight,
    E8Vector,
    _batch_reduce,
    orbit_array,
    orbit_size,
)
from .qseries import format_rational, parse_rational

__all__ = [
    "InvariantElement",
    "SIGMA_LABELS",
    "sigma_label",
    "label_weight",
    "inv_mul_brute",
    "from_display",
]


# The closed label dictionary for orbit sums of norm <= 36: subscript -> fw
# coordinates of the dominant representative. Primes separate the distinct
# orbits sharing one norm.
_SIGMA_FW: dict[str, tuple[int, ...]] = {
    "2": (0, 0, 0, 0, 0, 0, 0, 1),
    "4": (1, 0, 0, 0, 0, 0, 0, 0),
    "6": (0, 0, 0, 0, 0, 0, 1, 0),
    "8'": (0, 1, 0, 0, 0, 0, 0, 0),
    "8''": (0, 0, 0, 0, 0, 0, 0, 2),
    "10": (1, 0, 0, 0, 0, 0, 0, 1),
    "12": (0, 0, 0, 0, 0, 1, 0, 0),
    "14'": (0, 0, 1, 0, 0, 0, 0, 0),
    "14''": (0, 0, 0, 0, 0, 0, 1, 1),
    "16'": (2, 0, 0, 0, 0, 0, 0, 0),
    "16''": (0, 1, 0, 0, 0, 0, 0, 1),
    "18'": (1, 0, 0, 0, 0, 0, 1, 0),
    "18''": (0, 0, 0, 0, 0, 0, 0, 3),
    "20'": (0, 0, 0, 0, 1, 0, 0, 0),
    "20''": (1, 0, 0, 0, 0, 0, 0, 2),
    "22'": (1, 1, 0, 0, 0, 0, 0, 0),
    "22''": (0, 0, 0, 0, 0, 1, 0, 1),
    "24'": (0, 0, 0, 0, 0, 0, 2, 0),
    "24''": (0, 0, 1, 0, 0, 0, 0, 1),
    "26'": (2, 0, 0, 0, 0, 0, 0, 1),
    "26''": (0, 1, 0, 0, 0, 0, 1, 0),
    "28'": (1, 0, 0, 0, 0, 1, 0, 0),
    "30'": (0, 0, 0, 1, 0, 0, 0, 0),
    "32'": (1, 0, 1, 0, 0, 0, 0, 0),
    "32''": (0, 2, 0, 0, 0, 0, 0, 0),
    "36'": (3, 0, 0, 0, 0, 0, 0, 0),
}


def _label_str(sub: str) -> str:
    return f"Σ_{{{sub}}}" if len(sub) > 1 else f"Σ_{sub}"


_DICT_WEIGHTS: dict[str, DominantWeight] = {
    _label_str(sub): DominantWeight.from_fw(fw) for sub, fw in _SIGMA_FW.items()
}
_DICT_BY_D: dict[tuple, str] = {m.v.d: lab for lab, m in _DICT_WEIGHTS.items()}

#: Labels in ascending-norm order (the dictionary's own order).
SIGMA_LABELS: tuple[str, ...] = tuple(_label_str(s) for s in _SIGMA_FW)


def sigma_label(m: DominantWeight) -> str:
    """Display label for an orbit: dictionary Σ-name, else explicit fw coords."""
    lab = _DICT_BY_D.get(m.v.d)
    if lab is not None:
        return lab
    return "orb(" + ",".join(str(x) for x in m.fw) + ")"


def label_weight(label: str) -> DominantWeight:
    """Inverse of sigma_label on the dictionary (and on orb(...) fallbacks)."""
    m = _DICT_WEIGHTS.get(label)
    if m is not None:
        return m
    if label.startswith("orb(") and label.endswith(")"):
        return DominantWeight.from_fw(int(x) for x in label[4:-1].split(","))
    raise KeyError(f"unknown orbit label {label!r}")


class InvariantElement:
    """Sparse map DominantWeight -> Fraction; zero coefficients pruned."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[DominantWeight, Fraction] | None = None):
        self.terms: dict[DominantWeight, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[m] = c

    @classmethod
    def zero(cls) -> "InvariantElement":
        return cls()

    @classmethod
    def constant(cls, c) -> "InvariantElement":
        return cls({DominantWeight(ZERO): Fraction(c)})

    @classmethod
    def orbit_sum(cls, m: DominantWeight, c=1) -> "InvariantElement":
        return cls({m: Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[DominantWeight]:
        return sorted(self.terms)

    def coeff(self, m: DominantWeight) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def max_norm(self) -> int:
        return max((m.norm() for m in self.terms), default=0)

    def __add__(self, other: "InvariantElement") -> "InvariantElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return InvariantElement(out)

    def __sub__(self, other: "InvariantElement") -> "InvariantElement":
        return self + (-other)

    def __neg__(self) -> "InvariantElement":
        return InvariantElement({m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "InvariantElement":
        c = Fraction(c)
        return InvariantElement({m: c * v for m, v in self.terms.items()})

    __rmul__ = scale

    def __mul__(self, other):
        if isinstance(other, InvariantElement):
            return inv_mul(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, InvariantElement) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"<InvariantElement {self.display_str()}>"

    # -- evaluation and checks ------------------------------------------------

    def eval_zero(self) -> Fraction:
        """Value at z = 0: every exponential becomes 1, so sum c(m)·|orb(m)|."""
        return sum(
            (c * orbit_size(m) for m, c in self.terms.items()), Fraction(0)
        )

    def norm_moment(self) -> Fraction:
        """Sum over all orbit elements of coefficient times (l,l)."""
        return sum(
            (c * orbit_size(m) * m.norm() for m, c in self.terms.items()),
            Fraction(0),
        )

    def t_support_check(self, t: int) -> tuple[bool, list[DominantWeight]]:
        """True iff every support point m has (m, highest root) <= t."""
        bad = [m for m in self.support() if m.t_statistic() > t]
        return (not bad, bad)

    # -- display --------------------------------------------------------------

    def to_display(self) -> list[tuple[str | None, Fraction]]:
        """(label, coefficient) pairs in canonical order.

        Coefficient of orb(m) converts to c·|orb(m)|/240 on the Σ-label;
        the constant (m = 0) keeps its plain value and sorts last. Non-zero
        norms come in ascending order, ties broken by label.
        """
        labelled = []
        const = None
        for m in self.terms:
            if m.v == ZERO:
                const = (None, self.terms[m])
            else:
                disp = self.terms[m] * Fraction(orbit_size(m), 240)
                labelled.append((m.norm(), sigma_label(m), disp))
        labelled.sort(key=lambda x: (x[0], x[1]))
        out: list[tuple[str | None, Fraction]] = [
            (lab, c) for _, lab, c in labelled
        ]
        if const is not None:
            out.append(const)
        return out

    def display_map(self) -> dict[str | None, Fraction]:
        return dict(self.to_display())

    def display_str(self) -> str:
        parts = self.to_display()
        if not parts:
            return "0"
        pieces = []
        for i, (label, c) in enumerate(parts):
            neg = c < 0
            mag = -c if neg else c
            if label is None:
                body = format_rational(mag)
            elif mag == 1:
                body = label
            elif mag.denominator == 1:
                body = f"{mag.numerator}{label}"
            else:
                body = f"({mag.numerator}/{mag.denominator}){label}"
            if i == 0:
                pieces.append(("−" if neg else "") + body)
            else:
                pieces.append((" − " if neg else " + ") + body)
        return "".join(pieces)

    # -- pullback -------------------------------------------------------------

    def pullback(self, v: E8Vector, budget: int | None = None) -> dict[int, Fraction]:
        """Restrict to the line through v: sum of c·ζ^(a,v) over orbit elements.

        Returns the Laurent polynomial as a sparse exponent -> coefficient
        map; always palindromic since -1 lies in the Weyl group.
        """
        vd = np.array(v.d, dtype=np.int64)
        out: dict[int, Fraction] = {}
        for m, c in self.terms.items():
            dots = (orbit_array(m, budget) @ vd) // 4
            exps, counts = np.unique(dots, return_counts=True)
            for e, k in zip(exps, counts):
                e = int(e)
                val = out.get(e, Fraction(0)) + c * int(k)
                if val:
                    out[e] = val
                elif e in out:
                    del out[e]
        return out

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "terms": [
                {"fw": list(m.fw), "coeff": format_rational(c)}
                for m, c in sorted(self.terms.items())
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InvariantElement":
        return cls(
            {
                DominantWeight.from_fw(t["fw"]): parse_rational(t["coeff"])
                for t in obj["terms"]
            }
        )


def from_display(pairs) -> InvariantElement:
    """Rebuild an element from (label, display-coefficient) pairs."""
    terms: dict[DominantWeight, Fraction] = {}
    for label, c in pairs:
        if label is None:
            m = DominantWeight(ZERO)
            terms[m] = terms.get(m, Fraction(0)) + Fraction(c)
        else:
            m = label_weight(label)
            terms[m] = terms.get(m, Fraction(0)) + Fraction(c) * Fraction(
                240, orbit_size(m)
            )
    return InvariantElement(terms)


# ---------------------------------------------------------------------------
# Orbit products.
#
# For single orbits, the coefficient of orb(m) in orb(m1)·orb(m2) is
# |orb(m2)|·U_m/|orb(m)| with U_m = #{a in orbit(m1) : reduce(a+m2) = m}:
# the pair count #{(a,b) : a+b in orbit(m)} is constant along the orbit of
# the second factor, so one pass over the smaller orbit suffices.

_pair_lock = threading.Lock()
_pair_cache: dict[tuple, dict[DominantWeight, Fraction]] = {}


def _orbit_pair_product(
    m1: DominantWeight, m2: DominantWeight, budget: int | None = None
) -> dict[DominantWeight, Fraction]:
    if orbit_size(m1) > orbit_size(m2):
        m1, m2 = m2, m1
    key = (m1.v.d, m2.v.d)
    with _pair_lock:
        cached = _pair_cache.get(key)
    if cached is not None:
        return cached
    if m2.v == ZERO:  # identity element
        out = {m1: Fraction(1)}
    else:
        shifted = orbit_array(m1, budget) + np.array(m2.v.d, dtype=np.int64)
        reps, counts = np.unique(_batch_reduce(shifted), axis=0, return_counts=True)
        size2 = orbit_size(m2)
        out = {}
        for rep, u in zip(reps, counts):
            m = DominantWeight(E8Vector(tuple(int(x) for x in rep)))
            out[m] = Fraction(int(u) * size2, orbit_size(m))
    with _pair_lock:
        _pair_cache[key] = out
    return out


def inv_mul(
    x: InvariantElement, y: InvariantElement, budget: int | None = None
) -> InvariantElement:
    """Product of two invariant elements, re-expressed in orbit sums."""
    acc: dict[DominantWeight, Fraction] = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            c = c1 * c2
            for m, w in _orbit_pair_product(m1, m2, budget).items():
                acc[m] = acc.get(m, Fraction(0)) + c * w
    return InvariantElement(acc)


def inv_mul_brute(m1: DominantWeight, m2: DominantWeight) -> dict[DominantWeight, Fraction]:
    """Reference double-loop decomposition of orb(m1)·orb(m2): enumerate both
    orbits, bin every sum a+b by its dominant representative, divide by orbit
    sizes. Quadratic; for oracle tests only.

    The binning packs each reduced row into one 64-bit key (a byte per
    coordinate, offset by 128), so the unique/count step runs on a flat
    integer array; work is chunked to bound memory.
    """
    a = orbit_array(m1)
    b = orbit_array(m2)
    chunk = max(1, 2_000_000 // len(b))
    shifts = (np.arange(8, dtype=np.uint64) * np.uint64(8))
    keys: list[np.ndarray] = []
    counts: list[np.ndarray] = []
    for lo in range(0, len(a), chunk):
        sums = (a[lo:lo + chunk, None, :] + b[None, :, :]).reshape(-1, 8)
        red = _batch_reduce(sums)
        assert np.abs(red).max(initial=0) < 128
        packed = ((red + 128).astype(np.uint64) << shifts).sum(
            axis=1, dtype=np.uint64
        )
        u, c = np.unique(packed, return_counts=True)
        keys.append(u)
        counts.append(c)
    allk = np.concatenate(keys)
    allc = np.concatenate(counts)
    uniq, inverse = np.unique(allk, return_inverse=True)
    merged = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(merged, inverse, allc)
    rows = ((uniq[:, None] >> shifts[None, :]) & np.uint64(255)).astype(
        np.int64
    ) - 128
    out = {}
    for row, n in zip(rows, merged):
        m = DominantWeight(E8Vector(tuple(int(x) for x in row)))
        out[m] = Fraction(int(n), orbit_size(m))
    return out
