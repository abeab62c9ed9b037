"""Truncated q-expansions of W(E8)-invariant Jacobi forms.

A JacobiQExpansion holds the coefficients of q^0..q^order, each an
InvariantElement (a finite sum of Weyl orbit sums). The operators here —
products, modular-form scaling, exact division, the heat operator, the
index-raising operator, z-rescaling — are the complete toolkit used by the
catalog constructions.

Orders are tracked pessimistically: every operator states exactly how many
input terms it consumes, and the index-raising operator refuses to run
rather than silently return fewer correct terms than requested.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .e8 import (
    ZERO,
    DominantWeight,
    E8Vector,
    coset_min_norm,
    dominant_reduce,
    orbit_array,
    shell,
)
from .invring import InvariantElement
from .qseries import ModularQSeries, eisenstein

__all__ = [
    "JacobiQExpansion",
    "theta_e8",
    "jf_mul",
    "jf_scale",
    "jf_div_modular",
    "heat",
    "hecke_t_minus",
    "rescale_z",
    "classify",
    "ClassifyResult",
    "weight0_identity",
    "check_quasi_periodicity",
]


class JacobiQExpansion:
    """A form of even weight k and index t, known through q^order.

    Invariants enforced on construction:
      * the weight is even (z -> -z lies in the Weyl group);
      * an index-0 form is a modular form: all terms supported on {0};
      * for index >= 1, every stored (n, l) satisfies the support bound
        2nt - (l,l) >= -coset_min_norm(l, t).
    """

    __slots__ = ("weight", "index", "terms")

    def __init__(self, weight: int, index: int, terms: list[InvariantElement]):
        if weight % 2:
            raise ValueError(f"weight must be even, got {weight}")
        if index < 0:
            raise ValueError("index must be non-negative")
        if not terms:
            raise ValueError("need at least the q^0 term")
        self.weight = int(weight)
        self.index = int(index)
        self.terms = list(terms)
        for n, elem in enumerate(self.terms):
            for m in elem.terms:
                if self.index == 0:
                    if m.v != ZERO:
                        raise ValueError(
                            f"index-0 form with non-trivial orbit at q^{n}"
                        )
                else:
                    slack = 2 * n * self.index - m.norm()
                    if slack < -coset_min_norm(m.v, self.index):
                        raise ValueError(
                            f"support bound violated at q^{n}, fw={m.fw}: "
                            f"2nt - (l,l) = {slack} below coset minimum"
                        )

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    def term(self, n: int) -> InvariantElement:
        if not 0 <= n <= self.order:
            raise IndexError(f"q^{n} not stored (order {self.order})")
        return self.terms[n]

    def coefficient(self, n: int, l: E8Vector) -> Fraction:
        """f(n, l): the coefficient at q^n ζ^l, looked up via orbit reduction."""
        return self.term(n).coeff(dominant_reduce(l))

    def truncate(self, order: int) -> "JacobiQExpansion":
        if order > self.order:
            raise ValueError(f"cannot extend truncation {self.order} to {order}")
        return JacobiQExpansion(self.weight, self.index, self.terms[: order + 1])

    def is_zero(self) -> bool:
        return all(t.is_zero() for t in self.terms)

    def __add__(self, other: "JacobiQExpansion") -> "JacobiQExpansion":
        if (self.weight, self.index) != (other.weight, other.index):
            raise ValueError(
                f"weight/index mismatch: ({self.weight},{self.index}) vs "
                f"({other.weight},{other.index})"
            )
        n = min(self.order, other.order)
        return JacobiQExpansion(
            self.weight,
            self.index,
            [self.terms[i] + other.terms[i] for i in range(n + 1)],
        )

    def __sub__(self, other: "JacobiQExpansion") -> "JacobiQExpansion":
        return self + (-other)

    def __neg__(self) -> "JacobiQExpansion":
        return self.scale(-1)

    def scale(self, c) -> "JacobiQExpansion":
        c = Fraction(c)
        return JacobiQExpansion(
            self.weight, self.index, [t.scale(c) for t in self.terms]
        )

    __rmul__ = scale

    def __mul__(self, other):
        if isinstance(other, JacobiQExpansion):
            return jf_mul(self, other)
        if isinstance(other, ModularQSeries):
            return jf_scale(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JacobiQExpansion)
            and (self.weight, self.index) == (other.weight, other.index)
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return (
            f"<JacobiQExpansion weight={self.weight} index={self.index} "
            f"order={self.order}>"
        )

    def value_z0(self) -> ModularQSeries:
        """Restriction to z = 0: a plain q-series of the same weight."""
        return ModularQSeries(self.weight, [t.eval_zero() for t in self.terms])

    def display_lines(self) -> list[str]:
        return [f"q^{n}: {t.display_str()}" for n, t in enumerate(self.terms)]

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "index": self.index,
            "order": self.order,
            "terms": [t.to_json() for t in self.terms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JacobiQExpansion":
        form = cls(
            obj["weight"],
            obj["index"],
            [InvariantElement.from_json(t) for t in obj["terms"]],
        )
        if form.order != obj["order"]:
            raise ValueError("order field inconsistent with terms")
        return form

    @classmethod
    def zero(cls, weight: int, index: int, order: int) -> "JacobiQExpansion":
        return cls(weight, index, [InvariantElement.zero() for _ in range(order + 1)])

    @classmethod
    def one(cls, order: int) -> "JacobiQExpansion":
        """The constant 1 as a weight-0 index-0 form."""
        terms = [InvariantElement.constant(1)] + [
            InvariantElement.zero() for _ in range(order)
        ]
        return cls(0, 0, terms)


def theta_e8(order: int) -> JacobiQExpansion:
    """Theta series of the lattice: weight 4, index 1; the q^n term is the
    characteristic sum of the norm-2n shell."""
    terms = []
    for n in range(order + 1):
        terms.append(
            InvariantElement({m: Fraction(1) for m, _size in shell(2 * n)})
        )
    return JacobiQExpansion(4, 1, terms)


def jf_mul(a: JacobiQExpansion, b: JacobiQExpansion) -> JacobiQExpansion:
    """Product: weights and indices add; order is the smaller of the two."""
    n = min(a.order, b.order)
    terms = []
    for k in range(n + 1):
        acc = InvariantElement.zero()
        for i in range(k + 1):
            ai, bj = a.terms[i], b.terms[k - i]
            if ai.is_zero() or bj.is_zero():
                continue
            acc = acc + ai * bj
        terms.append(acc)
    return JacobiQExpansion(a.weight + b.weight, a.index + b.index, terms)


def jf_scale(a: JacobiQExpansion, f: ModularQSeries) -> JacobiQExpansion:
    """Multiply by a modular q-series: index unchanged, weight adds."""
    n = min(a.order, f.order)
    terms = []
    for k in range(n + 1):
        acc = InvariantElement.zero()
        for i in range(k + 1):
            if f[i]:
                acc = acc + a.terms[k - i].scale(f[i])
        terms.append(acc)
    return JacobiQExpansion(a.weight + f.weight, a.index, terms)


def jf_div_modular(a: JacobiQExpansion, f: ModularQSeries) -> JacobiQExpansion:
    """Exact division by a modular q-series.

    If f = c·q^v + ..., the first v terms of a must vanish identically;
    otherwise the quotient would have a pole and the recipe upstream has a
    wrong normalization constant — that is reported, not papered over.
    """
    v = f.valuation()
    if v is None:
        raise ZeroDivisionError("division by the zero series")
    for n in range(min(v, a.order + 1)):
        if not a.terms[n].is_zero():
            raise ValueError(
                f"not divisible: q^{n} term survives division "
                f"(valuation of divisor is {v})"
            )
    n_top = min(a.order, f.order) - v
    if n_top < 0:
        raise ValueError(f"need at least {v + 1} terms to divide by valuation {v}")
    lead = f[v]
    out: list[InvariantElement] = []
    for n in range(n_top + 1):
        acc = a.terms[n + v]
        for j in range(1, n + 1):
            if f[v + j]:
                acc = acc - out[n - j].scale(f[v + j])
        out.append(acc.scale(Fraction(1) / lead))
    return JacobiQExpansion(a.weight - f.weight, a.index, out)


def heat(a: JacobiQExpansion) -> JacobiQExpansion:
    """The weight-raising heat operator: weight k -> k+2, index unchanged.

    Acts orbit-diagonally: the pure heat part multiplies the coefficient at
    (n, l) by n - (l,l)/(2t) — well-defined per orbit since it depends on l
    only through its norm — and the quasi-modular correction adds
    ((4-k)/12)·E2 times the form.
    """
    t = a.index
    if t == 0:
        raise ValueError("heat operator needs index >= 1")
    k = a.weight
    e2 = eisenstein(2, a.order)
    corr = jf_scale(a, e2).scale(Fraction(4 - k, 12))
    terms = []
    for n in range(a.order + 1):
        part = InvariantElement(
            {
                m: c * (n - Fraction(m.norm(), 2 * t))
                for m, c in a.terms[n].terms.items()
            }
        )
        terms.append(part + corr.terms[n])
    return JacobiQExpansion(k + 2, t, terms)


def hecke_t_minus(
    a: JacobiQExpansion, s: int, order: int | None = None
) -> JacobiQExpansion:
    """Index-raising operator: index t -> t·s, weight unchanged.

    Output coefficient g(n, l) = sum over d dividing (n, s) with l/d in the
    lattice of d^(k-1)·f(n·s/d², l/d). Orbit-level this reads: the input
    orbit term (m, c) at q^(n·s/d²) feeds c·d^(k-1) into orbit d·m at q^n.

    The output order is floor(a.order / s); requesting more via `order`
    raises with the exact input order needed.
    """
    if s < 1:
        raise ValueError("index-raising parameter must be >= 1")
    out_order = a.order // s
    if order is not None:
        if a.order < s * order:
            raise ValueError(
                f"input order {a.order} insufficient: order-{order} output "
                f"of the index-raising operator at s={s} needs input order {s * order}"
            )
        out_order = order
    k = a.weight
    terms = []
    for n in range(out_order + 1):
        acc: dict[DominantWeight, Fraction] = {}
        for d in range(1, s + 1):
            # d must divide gcd(n, s), where gcd(0, s) = s
            if s % d or (n % d if n else 0):
                continue
            src = a.terms[n * s // (d * d)]
            factor = Fraction(d) ** (k - 1)
            for m, c in src.terms.items():
                md = DominantWeight(d * m.v)
                acc[md] = acc.get(md, Fraction(0)) + factor * c
        terms.append(InvariantElement(acc))
    return JacobiQExpansion(k, a.index * s, terms)


def rescale_z(a: JacobiQExpansion, c: int) -> JacobiQExpansion:
    """Substitute z -> c·z: index multiplies by c², orbits dilate, orb(m) -> orb(c·m)."""
    if c < 1:
        raise ValueError("rescaling factor must be a positive integer")
    terms = [
        InvariantElement({DominantWeight(c * m.v): v for m, v in t.terms.items()})
        for t in a.terms
    ]
    return JacobiQExpansion(a.weight, a.index * c * c, terms)


class ClassifyResult:
    __slots__ = ("kind", "order", "witness")

    def __init__(self, kind: str, order: int, witness):
        self.kind = kind
        self.order = order
        self.witness = witness

    def __repr__(self) -> str:
        tail = f", witness={self.witness}" if self.witness else ""
        return f"<{self.kind} to order {self.order}{tail}>"


def classify(a: JacobiQExpansion) -> ClassifyResult:
    """Weak / holomorphic / cusp classification of the stored coefficients.

    Scans 2nt - (l,l) over every stored coefficient (support ordered by
    norm): any negative value means weak, with the first offender as
    witness; all positive means cusp. The verdict never extrapolates past
    the truncation order.
    """
    if a.index == 0:
        raise ValueError("classification needs index >= 1")
    t = a.index
    witness = None
    min_slack = None
    for n in range(a.order + 1):
        for m in sorted(a.terms[n].terms, key=lambda m: (m.norm(), m.v.d)):
            slack = 2 * n * t - m.norm()
            if min_slack is None or slack < min_slack:
                min_slack = slack
            if slack < 0 and witness is None:
                witness = (n, m)
    if min_slack is None:
        return ClassifyResult("cusp", a.order, None)  # the zero form
    if min_slack < 0:
        return ClassifyResult("weak", a.order, witness)
    if min_slack == 0:
        return ClassifyResult("holomorphic", a.order, None)
    return ClassifyResult("cusp", a.order, None)


def weight0_identity(a: JacobiQExpansion) -> bool:
    """The weight-0 balance identity on the q^0-term:
    2t·Σ f(0,l) = 3·Σ f(0,l)·(l,l), both sides summed over all lattice l."""
    if a.weight != 0:
        raise ValueError("identity applies to weight-0 forms only")
    x = a.terms[0]
    return 2 * a.index * x.eval_zero() == 3 * x.norm_moment()


def check_quasi_periodicity(
    a: JacobiQExpansion, samples: int = 100, seed: int = 0
) -> int:
    """Verify f(n, l) = f(n', l + t·v) with n' = n + (l,v) + t(v,v)/2 on
    randomly sampled stored coefficients and shifts v = w·(root), w = 1, 2.

    Only triples with n' <= order are checkable at a finite truncation, and
    for sparsely supported forms almost no blindly chosen (l, v) qualifies.
    So the shift is sampled first and the orbit is then scanned (one
    vectorized pass) for elements l whose image row lands in range; one of
    those is picked at random. Returns the number of identity checks
    performed; raises AssertionError on a mismatch.
    """
    t = a.index
    if t == 0:
        raise ValueError("quasi-periodicity concerns index >= 1")
    rng = np.random.default_rng(seed)
    pool = [
        (n, m)
        for n in range(a.order + 1)
        for m in a.terms[n].terms
    ]
    if not pool:
        return 0
    from .e8 import HIGHEST_ROOT  # local to avoid a wide import surface

    roots = orbit_array(DominantWeight(HIGHEST_ROOT))
    done = 0
    attempts = 0
    while done < samples:
        attempts += 1
        if attempts > 500 * samples:
            raise RuntimeError("could not find enough checkable triples")
        n, m = pool[rng.integers(len(pool))]
        arr = orbit_array(m)
        r = roots[rng.integers(len(roots))]
        w = int(rng.integers(1, 3))
        # n' = n + w·(l, r) + t·w² across the whole orbit at once
        n2_all = n + w * ((arr @ r) // 4) + t * w * w
        ok = np.flatnonzero(n2_all <= a.order)
        if not len(ok):
            continue
        pick = int(ok[rng.integers(len(ok))])
        l = E8Vector(tuple(int(x) for x in arr[pick]))
        v = E8Vector(tuple(w * int(x) for x in r))
        n2 = int(n2_all[pick])
        assert n2 >= 0, "support bound forbids negative image rows"
        lhs = a.coefficient(n, l)
        rhs = a.coefficient(n2, l + t * v)
        assert lhs == rhs, (
            f"quasi-periodicity broken: f({n},{l.d}) = {lhs} but "
            f"f({n2}, shifted) = {rhs}"
        )
        done += 1
    return done
