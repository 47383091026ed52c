"""Piecewise rational interpolation kernels supported on [-2, 2].

A kernel family is named by :class:`Family` and instantiated through a
:class:`KernelSpec`.  :func:`build_kernel` compiles a spec into an immutable
:class:`PiecewiseRationalKernel`: one numerator polynomial (degree <= 4) and one
linear denominator per piece, both in powers of ``|t|``.

Evaluation uses a second copy of the coefficients expanded about the left end of
each piece, so that values at the knots (``|t| = 0, 1, 2``) are reproduced
exactly rather than up to cancellation error.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DenominatorRoot,
    NoSuchTarget,
    ParameterOutOfDomain,
    ParseError,
    RootNotBracketed,
)

__all__ = [
    "Family",
    "KernelSpec",
    "Piece",
    "PiecewiseRationalKernel",
    "build_kernel",
    "evaluate",
    "derivative",
    "degenerate",
    "special_params",
    "c3_candidate_roots",
    "kernel_catalog",
    "PARAM_NAMES",
]


class Family(str, Enum):
    NEAREST = "nearest"
    LINEAR = "linear"
    S2 = "s2"
    CUBIC = "cubic"
    CUBIC_ALT = "cubicalt"
    S4 = "s4"
    S31 = "s31"
    S41V1 = "s41v1"
    S41V2 = "s41v2"
    S41V3 = "s41v3"
    S41V4 = "s41v4"
    S41V5 = "s41v5"

    def __str__(self) -> str:
        return self.value


PARAM_NAMES: dict[Family, tuple[str, ...]] = {
    Family.NEAREST: (),
    Family.LINEAR: (),
    Family.S2: (),
    Family.CUBIC: ("a02",),
    Family.CUBIC_ALT: ("a02",),
    Family.S4: ("a02", "a03"),
    Family.S31: ("a01",),
    Family.S41V1: ("a01", "a02"),
    Family.S41V2: ("a01", "a02"),
    Family.S41V3: ("a02",),
    Family.S41V4: ("a01", "a02", "a03"),
    Family.S41V5: ("a01", "a02", "a03"),
}

# Lower bound on a01: True means a01 >= -1 is allowed, False means a01 > -1.
_A01_INCLUSIVE: dict[Family, bool] = {
    Family.S31: True,
    Family.S41V1: False,
    Family.S41V2: True,
    Family.S41V4: False,
    Family.S41V5: False,
}

RATIONAL_FAMILIES = (
    Family.S31,
    Family.S41V1,
    Family.S41V2,
    Family.S41V3,
    Family.S41V4,
    Family.S41V5,
)


def _format_number(x: float) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family together with its free parameters.

    Parameters are stored positionally in the order given by
    ``PARAM_NAMES[family]``; use :meth:`of` to build a spec by keyword.

    >>> KernelSpec.of("s41v4", a01=30, a02=20, a03=-121.5512)
    KernelSpec(family=<Family.S41V4: 's41v4'>, params=(30.0, 20.0, -121.5512))
    """

    family: Family
    params: tuple[float, ...] = ()

    def __post_init__(self):
        try:
            family = Family(str(self.family).lower())
        except ValueError:
            raise ParseError(f"unknown kernel family {self.family!r}") from None
        params = tuple(float(p) for p in self.params)
        names = PARAM_NAMES[family]
        if len(params) != len(names):
            raise ValueError(
                f"{family} takes parameters {names or '()'}, got {len(params)} values"
            )
        for name, value in zip(names, params):
            if not math.isfinite(value):
                raise ParameterOutOfDomain(f"{family}: {name}={value} is not finite")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)

    @classmethod
    def of(cls, family: Family | str, **params: float) -> "KernelSpec":
        family = Family(str(family).lower())
        names = PARAM_NAMES[family]
        extra = set(params) - set(names)
        missing = [n for n in names if n not in params]
        if extra or missing:
            raise ValueError(
                f"{family} takes {names or '()'}; missing {missing}, unexpected {sorted(extra)}"
            )
        return cls(family, tuple(params[n] for n in names))

    @property
    def names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self.family]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.params))

    def get(self, name: str) -> float:
        try:
            return self.params[self.names.index(name)]
        except ValueError:
            raise KeyError(f"{self.family} has no parameter {name!r}") from None

    @property
    def a01(self) -> float:
        return self.get("a01")

    @property
    def a02(self) -> float:
        return self.get("a02")

    @property
    def a03(self) -> float:
        return self.get("a03")

    def __str__(self) -> str:
        if not self.params:
            return self.family.value
        body = ",".join(f"{n}={_format_number(v)}" for n, v in zip(self.names, self.params))
        return f"{self.family.value}:{body}"

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """Parse ``family[:key=value[,key=value]*]``."""
        text = text.strip()
        head, sep, tail = text.partition(":")
        try:
            family = Family(head.strip().lower())
        except ValueError:
            raise ParseError(f"unknown kernel family {head.strip()!r} in {text!r}") from None
        params: dict[str, float] = {}
        if sep and tail.strip():
            for item in tail.split(","):
                key, eq, value = item.partition("=")
                key = key.strip().lower()
                if not eq or not key:
                    raise ParseError(f"malformed parameter {item!r} in {text!r}")
                if key in params:
                    raise ParseError(f"duplicate parameter {key!r} in {text!r}")
                try:
                    params[key] = float(value)
                except ValueError:
                    raise ParseError(f"parameter {key!r} is not a number: {value!r}") from None
        try:
            return cls.of(family, **params)
        except ParameterOutOfDomain:
            raise
        except ValueError as exc:
            raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# compiled representation


def _horner(coeffs: Sequence[float], x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _taylor_shift(coeffs: Sequence, x0) -> list:
    """Coefficients of ``p(s + x0)`` in powers of ``s``."""
    n = len(coeffs)
    out = [0] * n
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        for k in range(j + 1):
            out[k] += c * math.comb(j, k) * x0 ** (j - k)
    return out


def _polymul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass(frozen=True)
class Piece:
    """One rational piece ``num(|t|) / den(|t|)`` on ``lo <= |t| < hi``.

    ``num`` and ``den`` are monomial coefficients in ``|t|`` (lowest degree
    first).  ``num_local``/``den_local`` hold the same polynomials in
    ``|t| - lo`` and ``num_upper``/``den_upper`` in ``|t| - hi``; evaluation
    expands about the nearer end, which keeps knot values and one-sided
    derivatives accurate when the numerator vanishes there.
    """

    lo: float
    hi: float
    num: tuple[float, ...]
    den: tuple[float, float]
    num_local: tuple[float, ...]
    den_local: tuple[float, float]
    num_upper: tuple[float, ...] = ()
    den_upper: tuple[float, float] = (1.0, 0.0)

    def _expansion(self, u: float):
        if self.num_upper and (u - self.lo) >= (self.hi - u):
            return u - self.hi, self.num_upper, self.den_upper
        return u - self.lo, self.num_local, self.den_local

    def value(self, u: float) -> float:
        s, num, den = self._expansion(u)
        return _horner(num, s) / (den[0] + den[1] * s)

    def values(self, u: np.ndarray) -> np.ndarray:
        s = u - self.lo
        out = _horner(self.num_local, s) / (self.den_local[0] + self.den_local[1] * s)
        if self.num_upper:
            upper = s >= (self.hi - u)
            if upper.any():
                su = u[upper] - self.hi
                out[upper] = _horner(self.num_upper, su) / (self.den_upper[0] + self.den_upper[1] * su)
        return out

    def derivatives(self, u: float, order: int) -> list[float]:
        """Values of the piece and its first ``order`` derivatives at ``u``.

        Uses ``f * D = N`` differentiated k times, which for a linear ``D``
        gives ``f^(k) = (N^(k) - k * D' * f^(k-1)) / D``.
        """
        s, num, (d0, d1) = self._expansion(u)
        den = d0 + d1 * s
        num = list(num)
        out = [_horner(num, s) / den]
        for k in range(1, order + 1):
            num = [i * c for i, c in enumerate(num)][1:] or [0.0]
            out.append((_horner(num, s) - k * d1 * out[-1]) / den)
        return out


@dataclass(frozen=True)
class PiecewiseRationalKernel:
    """Compiled even kernel; immutable and safe to share between threads."""

    spec: KernelSpec
    pieces: tuple[Piece, ...]
    support: float
    # True for the box kernel, which is 1 on [-1/2, 1/2) so that shifted copies tile the line.
    closed_negative_edge: bool = False

    def __post_init__(self):
        # Segment table for vectorized evaluation: each piece is split at its
        # midpoint and each half is expanded about its own end.  The final row
        # is the zero function outside the support.
        edges, origin, num, den = [], [], [], []
        for p in self.pieces:
            mid = 0.5 * (p.lo + p.hi)
            edges += [p.lo, mid]
            origin += [p.lo, p.hi]
            num += [p.num_local, p.num_upper or p.num_local]
            den += [p.den_local, p.den_upper if p.num_upper else p.den_local]
            if not p.num_upper:
                origin[-1] = p.lo
        edges.append(self.pieces[-1].hi)
        origin.append(0.0)
        num.append((0.0,) * 5)
        den.append((1.0, 0.0))
        object.__setattr__(self, "_edges", np.array(edges))
        object.__setattr__(self, "_origin", np.array(origin))
        object.__setattr__(self, "_num", np.array(num).T.copy())
        object.__setattr__(self, "_den", np.array(den).T.copy())

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        u = np.abs(t_arr)
        # |t| >= 0 = edges[0], so every point lands in a segment or the zero row.
        seg = np.searchsorted(self._edges, u, side="right") - 1
        s = u - self._origin[seg]
        num = self._num
        acc = num[4][seg]
        for k in (3, 2, 1, 0):
            acc = acc * s + num[k][seg]
        out = acc / (self._den[0][seg] + self._den[1][seg] * s)
        if self.closed_negative_edge:
            edge = t_arr == -self.support
            if edge.any():
                out = np.where(edge, self.pieces[-1].value(self.support), out)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def value(self, t: float) -> float:
        """Scalar evaluation without numpy overhead."""
        u = -t if t < 0 else t
        if u >= self.support:
            if self.closed_negative_edge and t == -self.support:
                return self.pieces[-1].value(u)
            return 0.0
        for piece in self.pieces:
            if u < piece.hi:
                return piece.value(u)
        return 0.0  # pragma: no cover

    def derivative(self, t: float, order: int = 1, side: str = "right") -> float:
        """One-sided analytic derivative of the kernel at ``t``.

        ``side`` picks the piece used when ``t`` sits on a knot; elsewhere it
        has no effect.
        """
        if order < 0 or order > 3:
            raise ValueError("order must be in 0..3")
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if t > 0 or (t == 0 and side == "right"):
            sign, u, uside = 1.0, t, side
        else:
            sign, u, uside = -1.0, -t, "right" if side == "left" else "left"
        piece = self._piece_for(u, uside)
        if piece is None:
            return 0.0
        return sign**order * piece.derivatives(u, order)[order]

    def _piece_for(self, u: float, side: str) -> Piece | None:
        for piece in self.pieces:
            if side == "right" and piece.lo <= u < piece.hi:
                return piece
            if side == "left" and piece.lo < u <= piece.hi:
                return piece
        return None

    @property
    def knots(self) -> tuple[float, ...]:
        return (0.0,) + tuple(p.hi for p in self.pieces)

    def coefficients(self) -> list[dict]:
        return [
            {"interval": [p.lo, p.hi], "numerator": list(p.num), "denominator": list(p.den)}
            for p in self.pieces
        ]


def evaluate(kernel: PiecewiseRationalKernel, t):
    """Evaluate ``kernel`` at ``t`` (scalar or array); zero outside the support."""
    if np.ndim(t) == 0:
        return kernel.value(float(t))
    return kernel(t)


def derivative(kernel: PiecewiseRationalKernel, t: float, order: int = 1, side: str = "right") -> float:
    return kernel.derivative(float(t), order, side)


# ---------------------------------------------------------------------------
# construction

_OM = (1, -1)  # 1 - u
_TM = (2, -1)  # 2 - u


def _compile_piece(lo, hi, factors, den, scale=1) -> Piece:
    # Coefficients are expanded in exact rational arithmetic and rounded
    # once; expanding in floats loses several digits when a01 is near -1.
    factors = [[float(c) for c in f] for f in factors]
    d0, d1 = float(den[0]), float(den[1])
    scale = float(scale)
    if d1 != 0:
        root = -d0 / d1
        if lo - 1e-12 <= root <= hi + 1e-12:
            # Remove a shared linear factor (removable singularity).
            for i, f in enumerate(factors):
                if len(f) == 2 and f[1] != 0 and math.isclose(
                    float(-f[0] / f[1]), float(root), rel_tol=1e-12, abs_tol=1e-12
                ):
                    d0, d1 = d1 / f[1], float(0)
                    del factors[i]
                    break
            else:
                raise DenominatorRoot(
                    f"denominator {float(d0):+g}{float(d1):+g}|t| vanishes at |t|={float(root):g}"
                    f" in [{lo:g}, {hi:g}]"
                )
    if d1 == 0 and d0 == 0:
        raise DenominatorRoot("identically zero denominator")
    # Sign analysis on the closed interval.
    at_lo, at_hi = d0 + d1 * lo, d0 + d1 * hi
    if at_lo == 0 or at_hi == 0 or (at_lo > 0) != (at_hi > 0):
        raise DenominatorRoot(f"denominator changes sign on [{lo:g}, {hi:g}]")

    if d1 == 0:
        # Fold a constant denominator into the numerator.
        scale, d0 = scale / d0, float(1)
    lo_q, hi_q = float(lo), float(hi)
    num, num_lo, num_hi = [scale], [scale], [scale]
    for f in factors:
        # Shifting each factor before multiplying avoids the cancellation
        # that shifting the expanded product would incur.
        num = _polymul(num, f)
        num_lo = _polymul(num_lo, _taylor_shift(f, lo_q))
        num_hi = _polymul(num_hi, _taylor_shift(f, hi_q))
    if len(num) > 5:
        raise ValueError("numerator degree exceeds 4")
    pad = lambda c: tuple(float(x) for x in c) + (0.0,) * (5 - len(c))
    return Piece(
        lo=float(lo),
        hi=float(hi),
        num=pad(num),
        den=(float(d0), float(d1)),
        num_local=pad(num_lo),
        den_local=(float(d0 + d1 * lo_q), float(d1)),
        num_upper=pad(num_hi),
        den_upper=(float(d0 + d1 * hi_q), float(d1)),
    )


def _check_domain(spec: KernelSpec, strict: bool) -> None:
    inclusive = _A01_INCLUSIVE.get(spec.family)
    if inclusive is None:
        return
    a01 = spec.a01
    if a01 < -1.0 or (strict and not inclusive and a01 == -1.0):
        bound = ">= -1" if inclusive else "> -1"
        raise ParameterOutOfDomain(f"{spec.family} requires a01 {bound}, got a01={a01:g}")


def _pieces_for(spec: KernelSpec):
    f = spec.family
    p = tuple(float(x) for x in spec.params)
    if f is Family.NEAREST:
        return 0.5, [(0, 0.5, [(1,)], (1, 0))]
    if f is Family.LINEAR:
        return 1, [(0, 1, [_OM], (1, 0))]
    if f is Family.S2:
        return 2, [
            (0, 1, [_OM, (1, 1)], (1, 0)),
            (1, 2, [_OM, _TM], (1, 0)),
        ]
    if f is Family.CUBIC:
        (a02,) = p
        return 2, [
            (0, 1, [_OM, (1, 1, 1 + a02)], (1, 0)),
            (1, 2, [(3 + a02,), _TM, _TM, _OM], (1, 0)),
        ]
    if f is Family.CUBIC_ALT:
        (a02,) = p
        return 2, [
            (0, 1, [_OM, (1, 1, 1 + a02)], (1, 0)),
            (1, 2, [(-(3 + a02),), _TM, _OM, _OM], (1, 0)),
        ]
    if f is Family.S4:
        a02, a03 = p
        return 2, [
            (0, 1, [_OM, (1, 1, 1 + a02, 1 + a02 + a03)], (1, 0)),
            (1, 2, [_OM, _TM, _TM, (5 + 3 * a02 + 2 * a03, -(1 + a02 + a03))], (1, 0)),
        ]
    if f is Family.S31:
        (a01,) = p
        return 2, [
            (0, 1, [_OM, (1, 1 + a01, -1)], (1, a01)),
            (1, 2, [_OM, _TM, _TM], (1 - a01, a01)),
        ]
    if f in (Family.S41V1, Family.S41V2):
        a01, a02 = p
        inner = (0, 1, [_OM, _OM, (1, 2 + a01, 3 + 2 * a01 + a02)], (1, a01))
        if f is Family.S41V1:
            den = (-1 - 2 * a01, a01)
        else:
            den = (-1 + a01, -a01)
        return 2, [inner, (1, 2, [(3 + a02,), _TM, _TM, _OM, _OM], den)]
    if f is Family.S41V3:
        (a02,) = p
        return 2, [
            (0, 1, [_OM, _OM, (2, 3, 2 * a02 + 4)], (2, -1)),
            (1, 2, [(6 + 2 * a02,), _TM, _TM, _OM, _OM], (-3, 1)),
        ]
    if f in (Family.S41V4, Family.S41V5):
        a01, a02, a03 = p
        inner = (
            0,
            1,
            [_OM, (1, 1 + a01, 1 + a01 + a02, 1 + a01 + a02 + a03)],
            (1, a01),
        )
        if f is Family.S41V4:
            A = 5 - a01 - 3 * a01**2 + 3 * a02 - 3 * a01 * a02 + 2 * a03 - a01 * a03
            B = -1 + 4 * a01 + 3 * a01**2 - a02 + 3 * a01 * a02 - a03 + a01 * a03
            if 1 + a01 == 0:
                raise DenominatorRoot("s41v4: factor (1 + a01) vanishes at a01 = -1")
            outer = (1, 2, [_OM, _TM, _TM, (A, B)], (1 - a01, a01), float(1) / (1 + a01))
        else:
            lin = (5 + 6 * a01 + 3 * a02 + 2 * a03, -(1 + 3 * a01 + a02 + a03))
            outer = (1, 2, [_OM, _TM, _TM, lin], (1 + 2 * a01, -a01))
        return 2, [inner, outer]
    raise AssertionError(f)  # pragma: no cover


def build_kernel(spec: KernelSpec | str, *, strict: bool = True) -> PiecewiseRationalKernel:
    """Compile a kernel spec.

    With ``strict=True`` (the default) the parameter bounds are enforced
    exactly as published: ``a01 >= -1`` for s31 and s41v2, ``a01 > -1`` for
    s41v1, s41v4 and s41v5.  ``strict=False`` additionally admits the boundary
    ``a01 = -1`` wherever the singular factor cancels between numerator and
    denominator, which is how the s41v1 -> cubic degeneration is reached.
    """
    if isinstance(spec, str):
        spec = KernelSpec.parse(spec)
    _check_domain(spec, strict)
    support, raw = _pieces_for(spec)
    pieces = tuple(_compile_piece(*item) for item in raw)
    return PiecewiseRationalKernel(
        spec=spec,
        pieces=pieces,
        support=support,
        closed_negative_edge=spec.family is Family.NEAREST,
    )


# ---------------------------------------------------------------------------
# degenerations and special parameter choices


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def degenerate(spec: KernelSpec) -> KernelSpec | None:
    """Return the simpler family ``spec`` reduces to, or None.

    >>> degenerate(KernelSpec.of("s31", a01=-1))
    KernelSpec(family=<Family.S2: 's2'>, params=())
    """
    f = spec.family
    if f is Family.S31 and _close(spec.a01, -1.0):
        return KernelSpec(Family.S2)
    if f is Family.S41V1 and _close(spec.a01, -1.0):
        return KernelSpec(Family.CUBIC, (spec.a02,))
    if f is Family.S41V2 and _close(spec.a01, -1.0):
        return KernelSpec(Family.CUBIC_ALT, (spec.a02,))
    if f in (Family.S41V4, Family.S41V5):
        a01, a02, a03 = spec.params
        if _close(a01, 0.0):
            return KernelSpec(Family.S4, (a02, a03))
        if _close(a03, -1.0 - a02 + a01 * a02):
            return KernelSpec(Family.CUBIC, (a02,))
        if f is Family.S41V4 and _close(a02, -2.0 - a01) and _close(a03, 1.0):
            return KernelSpec(Family.S31, (a01,))
        return None
    if f is Family.S4 and _close(spec.a03, -1.0 - spec.a02):
        return KernelSpec(Family.CUBIC, (spec.a02,))
    return None


def _c3_quartic(x: float) -> float:
    return -12 + x * (10 + x * (26 + x * (14 + 3 * x)))


def c3_candidate_roots(lo: float = -1.0, hi: float = 10.0, steps: int = 11000) -> list[float]:
    """Every sign-change root of ``-12 + 10x + 26x^2 + 14x^3 + 3x^4`` in (lo, hi]."""
    xs = np.linspace(lo, hi, steps + 1)
    roots = []
    for a, b in zip(xs[:-1], xs[1:]):
        fa, fb = _c3_quartic(a), _c3_quartic(b)
        if fb == 0.0:
            roots.append(float(b))
            continue
        if fa == 0.0 or (fa > 0) == (fb > 0):
            continue
        while b - a > 1e-14:
            mid = 0.5 * (a + b)
            fm = _c3_quartic(mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        roots.append(float(0.5 * (a + b)))
    return [r for r in roots if r > -1.0]


def special_params(family: Family | str, target: str, free: float | None = None) -> KernelSpec:
    """Instantiate the published parameter choices for a family.

    ``target`` is one of ``order2``, ``order3``, ``C2``, ``C3``.  ``free`` is
    a02 for the order-2 targets and a01 for the C2 targets.
    """
    family = Family(str(family).lower())
    target_key = target.lower()

    def need_free(name):
        if free is None:
            raise ValueError(f"{family}/{target} needs the free parameter {name}")
        return float(free)

    def order2_s4(a02):
        return a02, (-7.0 - 4.0 * a02) / 2.0

    if family is Family.CUBIC and target_key in ("order2", "order3"):
        return KernelSpec(family, (-2.5,))
    if family is Family.S31 and target_key == "order2":
        return KernelSpec(family, (-1.0,))
    if family is Family.S41V1 and target_key == "order3":
        return KernelSpec(family, (-1.0, -2.5))
    if family is Family.S41V2 and target_key == "order2":
        return KernelSpec(family, (-1.0, -4.0))
    if family is Family.S4:
        if target_key == "order2":
            return KernelSpec(family, order2_s4(need_free("a02")))
        if target_key == "order3":
            return KernelSpec(family, (-2.5, 1.5))
        if target_key == "c2":
            return KernelSpec(family, (-3.0, 2.5))
    if family in (Family.S41V4, Family.S41V5):
        if target_key == "order2":
            return KernelSpec(family, (0.0,) + order2_s4(need_free("a02")))
        if target_key == "order3":
            return KernelSpec(family, (0.0, -2.5, 1.5))
    if family is Family.S41V4 and target_key == "c2":
        a01 = need_free("a01")
        a02 = -6.0 * (3.0 + a01) / (6.0 + a01)
        a03 = (-36.0 - 18.0 * a01 - 17.0 * a02) / 6.0
        return KernelSpec(family, (a01, a02, a03))
    if family is Family.S41V4 and target_key == "c3":
        roots = c3_candidate_roots()
        if not roots:
            raise RootNotBracketed("no real root of the C3 quartic in (-1, 10]")
        a01 = roots[0]
        a02 = -3.0 * (94.0 + 2 * a01 - 4 * a01**2 + 3 * a01**3) / 136.0
        a03 = (-36.0 - 18.0 * a01 - 17.0 * a02) / 6.0
        return KernelSpec(family, (a01, a02, a03))
    if family is Family.S41V5 and target_key == "c2":
        a01 = need_free("a01")
        a03 = (15.0 - 4.0 * a01 - 9.0 * a01**2) / (2.0 * (3.0 + 2.0 * a01))
        return KernelSpec(family, (a01, -3.0, a03))
    raise NoSuchTarget(f"{family} has no documented parameter choice for {target!r}")


# ---------------------------------------------------------------------------
# catalog

_TABLE1 = {
    # family: (continuity, derivative at t=1, highest approximation order)
    Family.NEAREST: ("C-1", "/", 1),
    Family.LINEAR: ("C0", "/", 2),
    Family.S2: ("C0", "-2 (left), -1 (right)", 2),
    Family.CUBIC: ("C1", "-3-a02", 3),
    Family.CUBIC_ALT: ("C0", "-3-a02 (left), 0 (right)", 2),
    Family.S4: ("C1", "-(4+2*a02+a03)", 3),
    Family.S31: ("C1", "-1", 2),
    Family.S41V1: ("C1", "0", 3),
    Family.S41V2: ("C1", "0", 2),
    Family.S41V3: ("C1", "0", 1),
    Family.S41V4: ("C3", "-(4+3*a01+2*a02+a03)/(1+a01)", 3),
    Family.S41V5: ("C2", "-(4+3*a01+2*a02+a03)/(1+a01)", 3),
}

_SUPPORT = {Family.NEAREST: 0.5, Family.LINEAR: 1.0}


def _domain_text(family: Family) -> dict[str, str]:
    out = {name: "real" for name in PARAM_NAMES[family]}
    if family in _A01_INCLUSIVE:
        out["a01"] = "a01 >= -1" if _A01_INCLUSIVE[family] else "a01 > -1"
    return out


def kernel_catalog(families: Iterable[Family] = tuple(Family)) -> list[dict]:
    """JSON-ready description of each kernel family."""
    rows = []
    for fam in families:
        continuity, deriv, order = _TABLE1[fam]
        rows.append(
            {
                "family": fam.value,
                "parameters": list(PARAM_NAMES[fam]),
                "domain": _domain_text(fam),
                "support": _SUPPORT.get(fam, 2.0),
                "continuity": continuity,
                "derivative_at_1": deriv,
                "max_approximation_order": order,
            }
        )
    return rows
