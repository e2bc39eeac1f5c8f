"""Registry of first-order probabilistic polytime function symbols.

Each symbol carries a monomorphic signature over the single parameter
variable n, a per-index semantics (argument tuple -> exact distribution
over the result carrier), and a cost polynomial in n used by the weight
accounting.

Bitstring convention: values of type Str[p] shorter than p(rho) are
implicitly left-padded with zeros when a symbol is applied; results are
always full-length strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .kernel import (
    BOOL,
    Distribution,
    GroundType,
    Polynomial,
    rho_i,
    str_type,
)
from .syntax import BoolLit, StrLit, Value


class FunsymError(Exception):
    pass


class DuplicateSymbol(FunsymError):
    pass


class UnknownSymbol(FunsymError):
    pass


class ArityMismatch(FunsymError):
    pass


class CarrierViolation(FunsymError):
    pass


N = Polynomial.var("n")


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arg_types: tuple[GroundType, ...]
    result_type: GroundType
    cost: Polynomial
    # semantics: (index i, *python-level args) -> Distribution over
    # python-level results; bools are bool, strings are '0'/'1' strings
    impl: Callable[..., Distribution]
    surface: str | None = None  # overloaded surface spelling, if any

    def arity(self) -> int:
        return len(self.arg_types)


def _pyval(v: Value, expected: GroundType, i: int, symbol: str):
    if expected.kind == "bool":
        if isinstance(v, BoolLit):
            return v.value
        raise CarrierViolation(f"{symbol}: expected a boolean, got {v}")
    if not isinstance(v, StrLit):
        raise CarrierViolation(f"{symbol}: expected a bitstring, got {v}")
    width = expected.length.eval(rho_i(i))
    if len(v.bits) > width:
        raise CarrierViolation(
            f"{symbol}: string {v.bits!r} longer than carrier width {width} at index {i}"
        )
    return v.bits.rjust(width, "0")


def _value(x) -> Value:
    return BoolLit(x) if isinstance(x, bool) else StrLit(x)


class Registry:
    """Immutable-after-build map of function symbols, with surface-name
    overloading resolved by argument ground kinds (bool vs str)."""

    def __init__(self):
        self._symbols: dict[str, FunctionSymbol] = {}
        self._overloads: dict[str, list[str]] = {}

    def register(self, sym: FunctionSymbol) -> None:
        if sym.name in self._symbols:
            raise DuplicateSymbol(sym.name)
        self._symbols[sym.name] = sym
        if sym.surface:
            self._overloads.setdefault(sym.surface, []).append(sym.name)

    def lookup(self, name: str) -> FunctionSymbol:
        try:
            return self._symbols[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._symbols

    def names(self) -> list[str]:
        return sorted(self._symbols)

    def resolve(self, name: str, arg_kinds: Sequence[str]) -> FunctionSymbol:
        """Resolve a surface name against argument kinds ('bool'/'str').
        Non-overloaded names resolve to themselves."""
        if name in self._symbols:
            return self._symbols[name]
        for internal in self._overloads.get(name, ()):
            sym = self._symbols[internal]
            if len(sym.arg_types) == len(arg_kinds) and all(
                t.kind == k for t, k in zip(sym.arg_types, arg_kinds)
            ):
                return sym
        raise UnknownSymbol(f"{name}({','.join(arg_kinds)})")

    def apply(self, name: str, i: int, args: Sequence[Value]) -> Distribution:
        """Apply symbol at index i to ground values: f_i(v1..vm)."""
        if name not in self._symbols and name in self._overloads:
            kinds = ["bool" if isinstance(v, BoolLit) else "str" for v in args]
            sym = self.resolve(name, kinds)
        else:
            sym = self.lookup(name)
        if len(args) != sym.arity():
            raise ArityMismatch(f"{name}: expected {sym.arity()} args, got {len(args)}")
        py = [_pyval(v, t, i, name) for v, t in zip(args, sym.arg_types)]
        return sym.impl(i, *py).map(_value)


def register(registry: Registry, sym: FunctionSymbol) -> None:
    registry.register(sym)


def apply(registry: Registry, name: str, i: int, args: Sequence[Value]) -> Distribution:
    return registry.apply(name, i, args)


# ---------------------------------------------------------------------
# builtins


def _all_bits(width: int) -> list[str]:
    return [format(k, f"0{width}b") if width else "" for k in range(2**width)]


def _uniform_string(i: int) -> Distribution:
    return Distribution.uniform(_all_bits(i))


def builtin_registry(prg: Callable[[str], str] | None = None) -> Registry:
    """The builtin symbol set.

    flipcoin : -> Bool, fair; gen, rand : -> Str[n], uniform;
    eq at both Bool and Str[n] signatures (internal eqb/eqs, surface 'eq');
    xor : Str[n],Str[n] -> Str[n] bitwise (otp_enc is an alias);
    g_prg : Str[n] -> Str[n], a configurable deterministic map standing in
    for a pseudorandom generator (default: identity);
    zeros, ones : -> Str[n], the two constant message words.
    """
    reg = Registry()
    one = Polynomial.const(1)
    nn = N
    strn = str_type(N)

    reg.register(
        FunctionSymbol(
            "flipcoin",
            (),
            BOOL,
            one,
            lambda i: Distribution.uniform([True, False]),
        )
    )
    for name in ("gen", "rand"):
        reg.register(FunctionSymbol(name, (), strn, nn, lambda i: _uniform_string(i)))
    reg.register(
        FunctionSymbol(
            "eqb",
            (BOOL, BOOL),
            BOOL,
            nn,
            lambda i, a, b: Distribution.pure(a == b),
            surface="eq",
        )
    )
    reg.register(
        FunctionSymbol(
            "eqs",
            (strn, strn),
            BOOL,
            nn,
            lambda i, a, b: Distribution.pure(a == b),
            surface="eq",
        )
    )

    def _xor(i, a, b):
        return Distribution.pure("".join("1" if x != y else "0" for x, y in zip(a, b)))

    reg.register(FunctionSymbol("xor", (strn, strn), strn, nn, _xor))
    reg.register(FunctionSymbol("otp_enc", (strn, strn), strn, nn, _xor))

    prg_map = prg if prg is not None else (lambda s: s)
    reg.register(
        FunctionSymbol(
            "g_prg",
            (strn,),
            strn,
            nn * nn,
            lambda i, s: Distribution.pure(prg_map(s)[:i].rjust(i, "0") if i else ""),
        )
    )
    reg.register(FunctionSymbol("zeros", (), strn, nn, lambda i: Distribution.pure("0" * i)))
    reg.register(FunctionSymbol("ones", (), strn, nn, lambda i: Distribution.pure("1" * i)))
    return reg
