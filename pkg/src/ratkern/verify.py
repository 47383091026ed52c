"""Numerical certification of kernel properties.

Every check here evaluates a compiled kernel directly; nothing is solved
symbolically.  Residuals are absolute unless stated otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .exceptions import QuadratureNonconvergence, UnsupportedFamily
from .kernels import (
    Family,
    KernelSpec,
    PiecewiseRationalKernel,
    build_kernel,
    degenerate,
)

__all__ = [
    "ContinuityTable",
    "PropertyReport",
    "check_partition_of_unity",
    "check_continuity",
    "approximation_order",
    "check_integral",
    "check_symmetry",
    "sinc_residuals",
    "constraint_residuals",
    "property_report",
    "format_report_table",
]


def _shift_range(kernel: PiecewiseRationalKernel) -> range:
    r = math.ceil(kernel.support)
    return range(-r, r + 1)


def check_partition_of_unity(kernel: PiecewiseRationalKernel, grid_points: int = 1001) -> float:
    """Max over a uniform grid of [0, 1] of ``|sum_i phi(t - i) - 1|``."""
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    t = np.linspace(0.0, 1.0, grid_points)
    shifts = np.array(_shift_range(kernel), dtype=float)
    total = kernel(t[None, :] - shifts[:, None]).sum(axis=0)
    return float(np.max(np.abs(total - 1.0)))


@dataclass
class ContinuityTable:
    """One-sided mismatch ``|phi^(k)(b-) - phi^(k)(b+)|`` per knot ``b`` and order ``k``."""

    mismatch: dict[tuple[float, int], float] = field(default_factory=dict)

    def at(self, junction: float, order: int) -> float:
        return self.mismatch[(float(junction), order)]

    def max(self, order: int | None = None, junction: float | None = None) -> float:
        vals = [
            v
            for (b, k), v in self.mismatch.items()
            if (order is None or k == order) and (junction is None or b == junction)
        ]
        return max(vals) if vals else 0.0

    def smoothness(self, tol: float = 1e-9) -> int:
        """Largest k such that orders 0..k all match within ``tol`` (-1 if none)."""
        orders = sorted({k for _, k in self.mismatch})
        level = -1
        for k in orders:
            if self.max(k) > tol:
                break
            level = k
        return level

    def to_dict(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for (b, k), v in sorted(self.mismatch.items()):
            out.setdefault(f"t={b:g}", {})[f"order{k}"] = v
        return out


def check_continuity(kernel: PiecewiseRationalKernel, max_order: int = 1) -> ContinuityTable:
    """Compare one-sided analytic derivatives at every knot.

    At ``t = 0`` the left side is the mirror image of the right, so only odd
    orders can mismatch; at the support edge the right side is the zero
    function.
    """
    if not 0 <= max_order <= 3:
        raise ValueError("max_order must be in 0..3")
    table = ContinuityTable()
    for b in kernel.knots:
        for k in range(max_order + 1):
            left = kernel.derivative(b, k, "left")
            right = kernel.derivative(b, k, "right")
            table.mismatch[(float(b), k)] = abs(left - right)
    return table


def approximation_order(
    kernel: PiecewiseRationalKernel,
    max_L: int = 4,
    grid_points: int = 2001,
    tol: float = 1e-9,
) -> int:
    """Largest L such that ``sum_i (t-i)^d phi(t-i)`` is constant for all d < L.

    Constancy is judged on a uniform grid of [0, 1] against the value at t = 0.
    """
    if max_L > 4:
        raise ValueError("max_L must be <= 4")
    t = np.linspace(0.0, 1.0, grid_points)
    shifted = [(t - i, kernel(t - i)) for i in _shift_range(kernel)]
    order = 0
    for d in range(max_L):
        g = sum(x**d * phi for x, phi in shifted)
        if np.max(np.abs(g - g[0])) > tol:
            break
        order = d + 1
    return order


def check_integral(kernel: PiecewiseRationalKernel, tol: float = 1e-10) -> float:
    """Integral of the kernel over its support, integrating piece by piece."""
    total = 0.0
    for piece in kernel.pieces:
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(piece.value, piece.lo, piece.hi, epsabs=1e-11, epsrel=0.0, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureNonconvergence(str(exc)) from None
        if err > tol:
            raise QuadratureNonconvergence(f"error estimate {err:g} on [{piece.lo}, {piece.hi}]")
        total += val
    return 2.0 * total


def check_symmetry(kernel: PiecewiseRationalKernel, grid_points: int = 2001) -> float:
    t = np.linspace(0.0, kernel.support, grid_points)
    if kernel.closed_negative_edge:
        t = t[:-1]
    both = kernel(np.concatenate([t, -t]))
    return float(np.max(np.abs(both[: len(t)] - both[len(t) :])))


def sinc_residuals(kernel: PiecewiseRationalKernel) -> dict[str, float]:
    """``|phi(n) - sinc(n)|`` at the integer nodes inside the closed support.

    Both one-sided limits are reported at interior nodes.
    """
    out = {"t=0": abs(kernel.value(0.0) - 1.0)}
    n = 1
    while n <= kernel.support:
        out[f"t={n}"] = abs(kernel.value(float(n)))
        out[f"t={n}-"] = abs(kernel.derivative(float(n), 0, "left"))
        n += 1
    return out


# ---------------------------------------------------------------------------
# constraint residuals


def _raw(piece) -> tuple[list[float], float] | None:
    """Numerator and denominator normalized to the ``(... )/(1 + b|t|)`` form."""
    d0, d1 = piece.den
    if d0 == 0.0:
        return None
    return [c / d0 for c in piece.num], d1 / d0


def _functional_residuals(kernel: PiecewiseRationalKernel) -> dict[str, float]:
    d = kernel.derivative
    return {
        "interp: phi(0) = 1": abs(d(0.0, 0, "right") - 1.0),
        "interp: phi(1-) = 0": abs(d(1.0, 0, "left")),
        "interp: phi(1) = 0": abs(d(1.0, 0, "right")),
        "interp: phi(2-) = 0": abs(d(2.0, 0, "left")),
        "C1: phi'(0+) = 0": abs(d(0.0, 1, "right")),
        "C1: phi'(1-) = phi'(1+)": abs(d(1.0, 1, "left") - d(1.0, 1, "right")),
        "C1: phi'(2-) = 0": abs(d(2.0, 1, "left")),
    }


def _eq8(a01, a03, a13, b11):
    e1 = (2 * b11 + 1) * (a03 * b11 - a13 * a01 - a01 * b11 + a03 - a01 - a13 - 2 * b11 - 2)
    e2 = (
        a13 * a01**2 + 2 * a13 * a01**2 * b11 - 4 * a03 * a01 * b11**2 - a13 * a01
        - 6 * a03 * a01 * b11 - 4 * a13 * a01 * b11 + a03 * b11**2 + 3 * a03 * b11
        - a01 * b11**2 - 3 * a01 * b11 - 2 * a03 * a01 + a03 - a01 - 4 * a13 * b11
        - a13 - 2 * b11**2 - 6 * b11 - 2
    )
    e3 = (
        a13 * a01**2 + 8 * a13 * a01**2 * b11 + 2 * a03 * a01 * b11**2 - 6 * a03 * a01 * b11
        - 2 * a13 * a01 * b11 - a03 * b11**2 + a01 * b11**2 - 2 * a03 * a01
        - 2 * a13 * b11 + 2 * b11**2
    )
    e4 = a01 * b11 * (a03 * b11 + a13 * a01)
    return e1, e2, e3, e4


def constraint_residuals(spec: KernelSpec | str, *, strict: bool = True) -> dict[str, float]:
    """Evaluate the published constraint equations on the compiled coefficients.

    Coefficients are read back from the compiled kernel and normalized to the
    ``(a_k0 + a_k1|t| + ...)/(1 + b_k1|t|)`` form; each returned entry is
    ``|lhs - rhs|`` of one printed equation.  Equations whose normalization
    is undefined for the given parameters (the outer denominator vanishing at
    ``|t| = 0``) are omitted.
    """
    if isinstance(spec, str):
        spec = KernelSpec.parse(spec)
    fam = spec.family
    if fam in (Family.NEAREST, Family.LINEAR):
        raise UnsupportedFamily(f"{fam} has no rational constraint system")
    kernel = build_kernel(spec, strict=strict)
    res = _functional_residuals(kernel)

    inner = _raw(kernel.pieces[0])
    outer = _raw(kernel.pieces[1])
    a0, b01 = inner
    r = lambda lhs, rhs: abs(lhs - rhs)

    if fam in (Family.CUBIC, Family.CUBIC_ALT, Family.S2, Family.S4):
        a02 = spec.a02 if fam is not Family.S2 else -1.0
        expected_inner = {
            Family.CUBIC: [1.0, 0.0, a02, -(1.0 + a02), 0.0],
            Family.CUBIC_ALT: [1.0, 0.0, a02, -(1.0 + a02), 0.0],
            Family.S2: [1.0, 0.0, -1.0, 0.0, 0.0],
        }
        if fam is Family.S4:
            a03 = spec.a03
            expected_inner[fam] = [1.0, 0.0, a02, a03, -1.0 - a02 - a03]
        for k, (got, want) in enumerate(zip(a0, expected_inner[fam])):
            res[f"closed form: a0{k}"] = r(got, want)
        res["closed form: b01 = 0"] = abs(b01)
        if fam is Family.CUBIC:
            c = 3.0 + a02
            for k, want in enumerate([4 * c, -8 * c, 5 * c, -c, 0.0]):
                res[f"closed form: a1{k}"] = r(outer[0][k], want)
        return res

    if fam is Family.S31:
        a00, a01, a02, a03, a04 = a0
        res["a00 = 1"] = r(a00, 1.0)
        res["a02 = -1-a01-a03"] = r(a02, -1.0 - a01 - a03)
        res["a04 = 0"] = abs(a04)
        res["a01 = param"] = r(a01, spec.a01)
        res["b01 = a01"] = r(b01, a01)
        if outer is not None:
            (a10, a11, a12, a13, a14), b11 = outer
            res["a14 = 0"] = abs(a14)
            res["a11 = 2a13-3a10/2"] = r(a11, 2 * a13 - 1.5 * a10)
            res["a12 = -3a13+a10/2"] = r(a12, -3 * a13 + 0.5 * a10)
            res["a10 = -4a13"] = r(a10, -4 * a13)
            res["a03 = (2+a13+a01+a13a01+2b11+a01b11)/(1+b11)"] = r(
                a03, (2 + a13 + a01 + a13 * a01 + 2 * b11 + a01 * b11) / (1 + b11)
            )
            res["(vi) a03 = 1"] = r(a03, 1.0)
            res["(vi) a13 = -1-b11"] = r(a13, -1.0 - b11)
            res["(vi) a01 = b11/(1+b11)"] = r(a01, b11 / (1 + b11))
            for i, e in enumerate(_eq8(a01, a03, a13, b11), start=1):
                res[f"partition system eq{i}"] = abs(e)
        return res

    # quartic/linear families
    a00, a01, a02, a03, a04 = a0
    p = spec.as_dict()
    res["a00 = 1"] = r(a00, 1.0)
    res["a04 = -1-a01-a02-a03"] = r(a04, -1.0 - a01 - a02 - a03)
    res["b01 = a01"] = r(b01, a01)
    for name in ("a01", "a02", "a03"):
        if name in p:
            res[f"{name} = param"] = r(locals()[name], p[name])
    if fam is Family.S41V3:
        res["a01 = -1/2"] = r(a01, -0.5)
    if fam in (Family.S41V1, Family.S41V2, Family.S41V3):
        res["a03 = -4-3a01-2a02"] = r(a03, -4 - 3 * a01 - 2 * a02)
    if outer is None:
        return res
    (a10, a11, a12, a13, a14), b11 = outer
    res["a13 = -15/8a10-7/4a11-3/2a12"] = r(a13, -15 / 8 * a10 - 7 / 4 * a11 - 1.5 * a12)
    res["a14 = 7/8a10+3/4a11+1/2a12"] = r(a14, 7 / 8 * a10 + 0.75 * a11 + 0.5 * a12)
    if fam in (Family.S41V1, Family.S41V2, Family.S41V3):
        res["a11 = -3a10"] = r(a11, -3 * a10)
        res["a12 = 13/4a10"] = r(a12, 13 / 4 * a10)
    if fam is Family.S41V1:
        res["a10 = -4(3+a02)/(1+2a01)"] = r(a10, -4 * (3 + a02) / (1 + 2 * a01))
        res["b11 = -a01/(1+2a01)"] = r(b11, -a01 / (1 + 2 * a01))
    elif fam is Family.S41V2:
        res["a10 = -4(3+a02)/(1-a01)"] = r(a10, -4 * (3 + a02) / (1 - a01))
        res["b11 = a01/(1-a01)"] = r(b11, a01 / (1 - a01))
    elif fam is Family.S41V3:
        res["a10 = -8(3+a02)/3"] = r(a10, -8 * (3 + a02) / 3)
        res["b11 = -1/3"] = r(b11, -1.0 / 3.0)
    else:
        res["a12 = (-11a10-8a11)/4"] = r(a12, (-11 * a10 - 8 * a11) / 4)
        s = 4 + 3 * a01 + 2 * a02 + a03
        if s != 0.0:
            res["b11 = (3a10+a11)(1+a01)/(4(4+3a01+2a02+a03)) - 1"] = r(
                b11, (-16 - 12 * a01 - 8 * a02 - 4 * a03 + 3 * a10 + 3 * a01 * a10 + a11 + a01 * a11) / (4 * s)
            )
        if fam is Family.S41V4 and a01 * a01 != 1.0:
            res["a10 (first nonzero-derivative solution)"] = r(
                a10,
                4 * (-5 + a01 + 3 * a01**2 - 3 * a02 + 3 * a01 * a02 - 2 * a03 + a01 * a03) / (-1 + a01**2),
            )
            res["a11 (first nonzero-derivative solution)"] = r(
                a11,
                4 * (-11 + 6 * a01 + 9 * a01**2 - 7 * a02 + 9 * a01 * a02 - 5 * a03 + 3 * a01 * a03) / (1 - a01**2),
            )
        if fam is Family.S41V5 and 1 + 2 * a01 != 0.0:
            res["a10 (second nonzero-derivative solution)"] = r(a10, 4 * (5 + 6 * a01 + 3 * a02 + 2 * a03) / (1 + 2 * a01))
            res["a11 (second nonzero-derivative solution)"] = r(a11, -4 * (11 + 15 * a01 + 7 * a02 + 5 * a03) / (1 + 2 * a01))
    return res


# ---------------------------------------------------------------------------
# aggregate report


@dataclass
class PropertyReport:
    kernel: KernelSpec
    partition_residual: float
    continuity: ContinuityTable
    sinc_residuals: dict[str, float]
    integral: float
    approx_order: int
    symmetry_residual: float
    derivative_at_1: tuple[float, float]
    degenerates_to: KernelSpec | None = None

    @property
    def smoothness(self) -> int:
        return self.continuity.smoothness()

    def to_dict(self) -> dict:
        return {
            "kernel": str(self.kernel),
            "family": self.kernel.family.value,
            "params": self.kernel.as_dict(),
            "partition_residual": self.partition_residual,
            "continuity": self.continuity.to_dict(),
            "smoothness": self.smoothness,
            "sinc_residuals": self.sinc_residuals,
            "integral": self.integral,
            "approx_order": self.approx_order,
            "symmetry_residual": self.symmetry_residual,
            "derivative_at_1": {"left": self.derivative_at_1[0], "right": self.derivative_at_1[1]},
            "degenerates_to": str(self.degenerates_to) if self.degenerates_to else None,
        }


def property_report(
    kernel: PiecewiseRationalKernel | KernelSpec | str,
    *,
    grid_points: int = 1001,
    max_order: int = 3,
) -> PropertyReport:
    """Run every property check on one kernel."""
    if not isinstance(kernel, PiecewiseRationalKernel):
        kernel = build_kernel(kernel, strict=False)
    at1 = (
        (kernel.derivative(1.0, 1, "left"), kernel.derivative(1.0, 1, "right"))
        if kernel.support >= 1.0
        else (0.0, 0.0)
    )
    return PropertyReport(
        kernel=kernel.spec,
        partition_residual=check_partition_of_unity(kernel, grid_points),
        continuity=check_continuity(kernel, max_order),
        sinc_residuals=sinc_residuals(kernel),
        integral=check_integral(kernel),
        approx_order=approximation_order(kernel),
        symmetry_residual=check_symmetry(kernel),
        derivative_at_1=at1,
        degenerates_to=degenerate(kernel.spec),
    )


_COLUMNS = ("Kernel", "Support", "Params", "Continuity", "Derivative (t=1)", "Integral", "Approx. order", "Special case")


def format_report_table(reports: list[PropertyReport]) -> str:
    """Aligned text table with the columns of the kernel property summary."""
    rows = [_COLUMNS]
    for rep in reports:
        support = 0.5 if rep.kernel.family is Family.NEAREST else (1.0 if rep.kernel.family is Family.LINEAR else 2.0)
        left, right = rep.derivative_at_1
        deriv = f"{left:.6g}" if abs(left - right) <= 1e-9 else f"{left:.6g} / {right:.6g}"
        if rep.kernel.family is Family.NEAREST:
            deriv = "/"
        level = rep.smoothness
        rows.append(
            (
                str(rep.kernel),
                f"[-{support:g},{support:g}]",
                str(len(rep.kernel.params)),
                f"C{level}" if level >= 0 else "C-1",
                deriv,
                f"{rep.integral:.12g}",
                str(rep.approx_order),
                str(rep.degenerates_to) if rep.degenerates_to else "/",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(_COLUMNS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
