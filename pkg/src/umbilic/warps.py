"""Warping functions ``f: I -> R`` together with ``f'`` and ``f''``.

A :class:`WarpingFunction` is an evaluable triple on an open interval.
Catalog constructors cover the warps used throughout the toolkit;
:meth:`WarpingFunction.from_expr` accepts any text the expression parser
understands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import warp_expr
from .errors import DomainError

__all__ = [
    "WarpingFunction", "constant", "linear", "log_csc", "log_cos_over_sqrt_sin",
    "log_cot", "log_F1", "log_F2", "log_F_corrected", "CATALOG", "warp_from_name",
]

Triple = tuple[float, float, float]


@dataclass(frozen=True)
class WarpingFunction:
    """Warp with an open domain ``(lo, hi)``; ``triple(t)`` returns ``(f, f', f'')``.

    ``text`` holds an equivalent expression when one exists, so a warp can be
    round-tripped through configuration files.
    """

    name: str
    lo: float
    hi: float
    triple: Callable[[float], Triple] = field(repr=False, compare=False)
    text: str | None = None

    def contains(self, t: float) -> bool:
        return self.lo < t < self.hi

    def eval(self, t: float) -> Triple:
        if not (self.lo < t < self.hi):
            raise DomainError(f"t={t!r} outside warp domain ({self.lo}, {self.hi}) of {self.name}")
        return self.triple(t)

    def f(self, t: float) -> float:
        return self.eval(t)[0]

    def df(self, t: float) -> float:
        return self.eval(t)[1]

    def d2f(self, t: float) -> float:
        return self.eval(t)[2]

    @classmethod
    def from_expr(cls, text: str, lo: float = -math.inf, hi: float = math.inf,
                  name: str | None = None) -> "WarpingFunction":
        """Build a warp from expression text, differentiating it symbolically."""
        ast = warp_expr.parse_warp_expr(text)
        d1 = warp_expr.differentiate(ast)
        d2 = warp_expr.differentiate(d1)
        f0, f1, f2 = (warp_expr.compile_ast(a) for a in (ast, d1, d2))

        def triple(t):
            return f0(t), f1(t), f2(t)

        return cls(name or text, lo, hi, triple, text)


def constant(c: float = 0.0) -> WarpingFunction:
    return WarpingFunction(f"constant({c:g})", -math.inf, math.inf,
                           lambda t: (c, 0.0, 0.0), repr(float(c)))


def linear(a: float = 1.0, b: float = 0.0) -> WarpingFunction:
    return WarpingFunction(f"linear({a:g},{b:g})", -math.inf, math.inf,
                           lambda t: (a * t + b, a, 0.0),
                           f"{float(a)!r} * t + {float(b)!r}")


def log_csc() -> WarpingFunction:
    """``f = ln(1/sin t)`` on ``(0, pi)``."""
    def triple(t):
        s, c = math.sin(t), math.cos(t)
        return -math.log(s), -c / s, 1.0 / (s * s)
    return WarpingFunction("log_csc", 0.0, math.pi, triple, "log(1/sin(t))")


def log_cos_over_sqrt_sin() -> WarpingFunction:
    """``f = ln(cos t / sqrt(sin t))`` on ``(0, pi/2)``."""
    def triple(t):
        s, c = math.sin(t), math.cos(t)
        f = math.log(c) - 0.5 * math.log(s)
        df = -s / c - 0.5 * c / s
        d2f = -1.0 / (c * c) + 0.5 / (s * s)
        return f, df, d2f
    return WarpingFunction("log_cos_over_sqrt_sin", 0.0, math.pi / 2, triple,
                           "log(cos(t)/sqrt(sin(t)))")


def log_cot() -> WarpingFunction:
    """``f = ln(cot t)`` on ``(0, pi/2)``."""
    def triple(t):
        s2 = math.sin(2.0 * t)
        c2 = math.cos(2.0 * t)
        return math.log(math.cos(t) / math.sin(t)), -2.0 / s2, 4.0 * c2 / (s2 * s2)
    return WarpingFunction("log_cot", 0.0, math.pi / 2, triple, "log(cos(t)/sin(t))")


def _log_two_exponentials(name, A, B, k, lo=None, hi=None):
    """``f = ln|A e^{kt} + B e^{-kt}|``; default domain is where the sum is positive."""
    if lo is None and hi is None:
        lo, hi = -math.inf, math.inf
        if A * B < 0:
            t_zero = math.log(-B / A) / (2.0 * k)
            if A > 0:
                lo = t_zero
            else:
                hi = t_zero
        elif A <= 0 and B <= 0:
            raise DomainError(f"{name}: F is nowhere positive; pass an explicit domain")

    def triple(t):
        ep, em = math.exp(k * t), math.exp(-k * t)
        F = A * ep + B * em
        dF = k * (A * ep - B * em)
        q = dF / F
        return math.log(abs(F)), q, k * k - q * q

    F_text = f"{float(A)!r}*exp({float(k)!r}*t) + {float(B)!r}*exp(-{float(k)!r}*t)"
    # sqrt of the square stands in for |F| when F may be negative on the domain
    text = f"log({F_text})" if A >= 0 and B >= 0 else f"log(sqrt(({F_text})^2))"
    return WarpingFunction(name, lo, hi, triple, text)


def log_F1(c0: float, c: float, kappa: int, lo=None, hi=None) -> WarpingFunction:
    """``ln F1`` with ``F1 = e^{-sqrt(c0) t} (c^2 e^{2 sqrt(c0) t} - 2 c0 kappa) / (4 c0 c)``."""
    k = math.sqrt(c0)
    return _log_two_exponentials(f"log_F1({c0:g},{c:g},{kappa})",
                                 c / (4 * c0), -kappa / (2 * c), k, lo, hi)


def log_F2(c0: float, c: float, kappa: int, lo=None, hi=None) -> WarpingFunction:
    """``ln F2`` with ``F2 = e^{-sqrt(c0) t} (c^2 - 2 c0 e^{2 sqrt(c0)} kappa) / (4 c0 c)``.

    The bracket is constant in ``t`` as written, so ``f`` is affine.
    """
    k = math.sqrt(c0)
    C = (c * c - 2 * c0 * math.exp(2 * k) * kappa) / (4 * c0 * c)
    return _log_two_exponentials(f"log_F2({c0:g},{c:g},{kappa})", 0.0, C, k, lo, hi)


def log_F_corrected(c0: float, A: float, kappa: int, lo=None, hi=None) -> WarpingFunction:
    """``ln(A e^{sqrt(c0) t} + B e^{-sqrt(c0) t})`` with ``A B = -kappa / (4 c0)``.

    These are exactly the warps with ``f'' + kappa e^{-2f} = 0``.
    """
    k = math.sqrt(c0)
    B = -kappa / (4 * c0 * A)
    return _log_two_exponentials(f"log_F({c0:g},{A:g},{kappa})", A, B, k, lo, hi)


CATALOG: dict[str, Callable[..., WarpingFunction]] = {
    "constant": constant,
    "linear": linear,
    "log_csc": log_csc,
    "log_cos_over_sqrt_sin": log_cos_over_sqrt_sin,
    "log_cot": log_cot,
    "log_F1": log_F1,
    "log_F2": log_F2,
    "log_F": log_F_corrected,
}


def warp_from_name(spec: str) -> WarpingFunction | None:
    """Resolve ``name`` or ``name:p1,p2,...`` against the catalog.

    Returns None when ``spec`` is not a catalog reference, letting callers
    fall back to expression parsing.
    """
    name, _, params = spec.partition(":")
    name = name.strip()
    if name not in CATALOG:
        return None
    args = []
    for p in filter(None, (x.strip() for x in params.split(","))):
        value = float(p)
        args.append(int(value) if name in ("log_F1", "log_F2", "log_F") and len(args) == 2 else value)
    return CATALOG[name](*args)
