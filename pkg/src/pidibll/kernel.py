"""Foundational values: polynomials over parameter variables, parameter
substitutions, exact finite probability distributions, and ground types.

Everything here is immutable and exact. Probabilities are
``fractions.Fraction`` throughout; floats never appear. Polynomials have
natural-number coefficients (subtraction exists only inside the ordering
check, which works on plain integers).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, TypeVar

T = TypeVar("T")
U = TypeVar("U")


class KernelError(Exception):
    pass


class UnboundParamVar(KernelError):
    """A polynomial variable was evaluated under a substitution that does
    not bind it. Never silently zero."""


class InvalidWeights(KernelError):
    """Distribution weights do not form an exact probability distribution."""


# A monomial is a multiset of variable names, stored as a sorted tuple of
# (name, exponent) pairs. The empty tuple is the constant monomial.
Monomial = tuple[tuple[str, int], ...]

_ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[str, int] = {}
    for name, e in itertools.chain(a, b):
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


class Polynomial:
    """Multivariate polynomial with non-negative integer coefficients.

    Canonical form: no zero-coefficient monomials are stored, so structural
    equality of the term maps is semantic equality.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            if coeff < 0:
                raise ValueError(f"negative coefficient {coeff} for {mono}")
            if coeff:
                clean[mono] = coeff
        self.terms: dict[Monomial, int] = clean
        self._hash = hash(frozenset(clean.items()))

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(k: int) -> Polynomial:
        if k < 0:
            raise ValueError("polynomial constants are naturals")
        return Polynomial({_ONE_MONO: k} if k else {})

    @staticmethod
    def var(name: str) -> Polynomial:
        return Polynomial({((name, 1),): 1})

    # -- structure ----------------------------------------------------

    def vars(self) -> frozenset[str]:
        return frozenset(n for mono in self.terms for n, _ in mono)

    def is_const(self) -> bool:
        return all(m == _ONE_MONO for m in self.terms)

    def const_value(self) -> int:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(_ONE_MONO, 0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: Polynomial) -> Polynomial:
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
        return Polynomial(terms)

    def __mul__(self, other: Polynomial) -> Polynomial:
        terms: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return Polynomial(terms)

    def scale(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("scaling factor must be a natural")
        return Polynomial({m: k * c for m, c in self.terms.items()})

    def eval(self, rho: "ParamSubstitution") -> int:
        """Evaluate at a substitution covering all variables of self."""
        total = 0
        for mono, coeff in self.terms.items():
            prod = coeff
            for name, e in mono:
                prod *= rho[name] ** e
            total += prod
        return total

    def subst(self, name: str, p: Polynomial) -> Polynomial:
        """Substitute the polynomial p for the variable name (composition)."""
        out = Polynomial.const(0)
        for mono, coeff in self.terms.items():
            term = Polynomial.const(coeff)
            for var, e in mono:
                base = p if var == name else Polynomial.var(var)
                for _ in range(e):
                    term = term * base
            out = out + term
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in sorted(
            self.terms.items(), key=lambda kv: (-sum(e for _, e in kv[0]), kv[0])
        ):
            factors = []
            if coeff != 1 or not mono:
                factors.append(str(coeff))
            for name, e in mono:
                factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


class ParamSubstitution:
    """Total map from parameter-variable names to naturals.

    Querying an unbound variable raises UnboundParamVar, never yields 0.
    """

    __slots__ = ("bindings",)

    def __init__(self, bindings: Mapping[str, int] | None = None):
        bindings = dict(bindings or {})
        for name, value in bindings.items():
            if value < 0:
                raise ValueError(f"{name} must map to a natural, got {value}")
        self.bindings = bindings

    def __getitem__(self, name: str) -> int:
        try:
            return self.bindings[name]
        except KeyError:
            raise UnboundParamVar(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self.bindings

    def domain(self) -> frozenset[str]:
        return frozenset(self.bindings)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamSubstitution) and self.bindings == other.bindings

    def __hash__(self) -> int:
        return hash(frozenset(self.bindings.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in sorted(self.bindings.items()))
        return f"{{{inner}}}"


def rho_i(i: int, var: str = "n") -> ParamSubstitution:
    """The single-parameter substitution n -> i."""
    return ParamSubstitution({var: i})


# -- operations on polynomials (functional spellings) ------------------


def poly_eval(p: Polynomial, rho: ParamSubstitution) -> int:
    return p.eval(rho)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def poly_scale(k: int, p: Polynomial) -> Polynomial:
    return p.scale(k)


def _signed_diff(q: Polynomial, p: Polynomial) -> dict[Monomial, int]:
    diff: dict[Monomial, int] = dict(q.terms)
    for mono, coeff in p.terms.items():
        diff[mono] = diff.get(mono, 0) - coeff
    return {m: c for m, c in diff.items() if c}


def poly_leq_verdict(p: Polynomial, q: Polynomial) -> bool | None:
    """Pointwise p(rho) <= q(rho) over all natural substitutions.

    Verdict procedure, in order:
      1. monomial-wise: all coefficients of q - p nonnegative  -> True;
      2. univariate complete decision: q - p is a one-variable integer
         polynomial, nonneg on naturals iff nonneg on 0..B where B is the
         Cauchy-style root bound 1 + max|coeff| (sign beyond B is the
         leading coefficient's);
      3. multivariate refutation search over each variable in 0..d+2
         (d = max total degree)  -> False on a witness;
      4. otherwise None (indeterminate; callers treat as failure).
    """
    diff = _signed_diff(q, p)
    if all(c >= 0 for c in diff.values()):
        return True

    def diff_at(assignment: dict[str, int]) -> int:
        total = 0
        for mono, coeff in diff.items():
            prod = coeff
            for name, e in mono:
                prod *= assignment[name] ** e
            total += prod
        return total

    names = {n for m in diff for n, _ in m}
    if not names:
        return False  # purely constant and negative
    if len(names) == 1:
        (name,) = names
        coeffs: dict[int, int] = {}
        for mono, c in diff.items():
            deg = mono[0][1] if mono else 0
            coeffs[deg] = coeffs.get(deg, 0) + c
        lead = coeffs[max(coeffs)]
        bound = 1 + max(abs(c) for c in coeffs.values())
        for x in range(bound + 1):
            if sum(c * x**d for d, c in coeffs.items()) < 0:
                return False
        # past every real root the sign is the leading coefficient's
        return lead > 0

    d = max(p.total_degree(), q.total_degree())
    grid = range(d + 3)
    ordered = sorted(names)
    for assignment in itertools.product(grid, repeat=len(ordered)):
        if diff_at(dict(zip(ordered, assignment))) < 0:
            return False
    return None


def poly_leq(p: Polynomial, q: Polynomial) -> bool:
    """Conservative boolean form: Indeterminate counts as 'not known <='."""
    return poly_leq_verdict(p, q) is True


# -- exact finite distributions ----------------------------------------


class Distribution:
    """Finite probability distribution with exact rational weights.

    The support is exactly the stored key set; weights are Fractions in
    (0, 1] summing to exactly 1.
    """

    __slots__ = ("_support", "_hash")

    def __init__(self, support: Mapping[T, Fraction]):
        clean: dict = {}
        total = Fraction(0)
        for value, w in support.items():
            w = Fraction(w)
            if w < 0:
                raise InvalidWeights(f"negative weight {w}")
            if w == 0:
                continue
            if value in clean:
                clean[value] += w
            else:
                clean[value] = w
            total += w
        if total != 1:
            raise InvalidWeights(f"weights sum to {total}, not 1")
        self._support = clean
        self._hash = hash(frozenset(clean.items()))

    @staticmethod
    def pure(x: T) -> Distribution:
        return Distribution({x: Fraction(1)})

    @staticmethod
    def uniform(xs: Iterable[T]) -> Distribution:
        xs = list(xs)
        if not xs:
            raise InvalidWeights("uniform distribution over empty set")
        w = Fraction(1, len(xs))
        merged: dict = {}
        for x in xs:
            merged[x] = merged.get(x, Fraction(0)) + w
        return Distribution(merged)

    def support(self):
        return self._support.keys()

    def items(self):
        return self._support.items()

    def __getitem__(self, x) -> Fraction:
        return self._support.get(x, Fraction(0))

    def __len__(self) -> int:
        return len(self._support)

    def __contains__(self, x) -> bool:
        return x in self._support

    def map(self, f: Callable) -> Distribution:
        out: dict = {}
        for x, w in self._support.items():
            y = f(x)
            out[y] = out.get(y, Fraction(0)) + w
        return Distribution(out)

    def bind(self, k: Callable[..., "Distribution"]) -> Distribution:
        out: dict = {}
        for x, w in self._support.items():
            for y, v in k(x).items():
                out[y] = out.get(y, Fraction(0)) + w * v
        return Distribution(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and self._support == other._support

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{x!r}: {w}" for x, w in self._support.items())
        return f"{{{inner}}}"


def dist_pure(x: T) -> Distribution:
    return Distribution.pure(x)


def dist_map(d: Distribution, f: Callable) -> Distribution:
    return d.map(f)


def dist_bind(d: Distribution, k: Callable[..., Distribution]) -> Distribution:
    return d.bind(k)


def dist_sum(weighted: Iterable[tuple[Fraction, Distribution]]) -> Distribution:
    """Convex combination sum r_i * D_i; the r_i must sum to exactly 1."""
    out: dict = {}
    total = Fraction(0)
    for r, d in weighted:
        r = Fraction(r)
        if r <= 0:
            raise InvalidWeights(f"non-positive mixture weight {r}")
        total += r
        for x, w in d.items():
            out[x] = out.get(x, Fraction(0)) + r * w
    if total != 1:
        raise InvalidWeights(f"mixture weights sum to {total}, not 1")
    return Distribution(out)


# -- ground types -------------------------------------------------------


@dataclass(frozen=True)
class GroundType:
    """Bool or Str(p); Str carries its length polynomial."""

    kind: str  # "bool" | "str"
    length: Polynomial | None = None

    def __post_init__(self):
        if self.kind not in ("bool", "str"):
            raise ValueError(self.kind)
        if (self.kind == "str") != (self.length is not None):
            raise ValueError("Str needs a length polynomial, Bool must not have one")

    def vars(self) -> frozenset[str]:
        return self.length.vars() if self.length is not None else frozenset()

    def subst(self, name: str, p: Polynomial) -> GroundType:
        if self.kind == "bool":
            return self
        return GroundType("str", self.length.subst(name, p))

    def __str__(self) -> str:
        return "Bool" if self.kind == "bool" else f"Str[{self.length}]"


BOOL = GroundType("bool")


def str_type(p: Polynomial) -> GroundType:
    return GroundType("str", p)


def ground_type_carrier(b: GroundType, rho: ParamSubstitution) -> list:
    """Enumerable carrier of a ground type at rho: booleans, or all
    bitstrings (as '0'/'1' strings) of the instantiated length."""
    if b.kind == "bool":
        return [True, False]
    length = b.length.eval(rho)
    return ["".join(bits) for bits in itertools.product("01", repeat=length)]
