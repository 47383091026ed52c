"""Property checks: partition of unity, continuity, order, integral, constraints."""

import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ratkern.exceptions import UnsupportedFamily
from ratkern.kernels import PARAM_NAMES, Family, KernelSpec, build_kernel, special_params
from ratkern.verify import (
    approximation_order,
    check_continuity,
    check_integral,
    check_partition_of_unity,
    check_symmetry,
    constraint_residuals,
    format_report_table,
    property_report,
    sinc_residuals,
)


def _partition_oracle(kernel, n=1001):
    # Independent brute-force sum over a wide shift range, one scalar call at a time.
    worst = 0.0
    for t in np.linspace(0.0, 1.0, n):
        total = sum(kernel.value(t - i) for i in range(-5, 6))
        worst = max(worst, abs(total - 1.0))
    return worst


@pytest.mark.parametrize("spec", ["cubic:a02=-2.5", "s41v4:a01=30,a02=20,a03=-121.5512", "nearest"])
def test_partition_examples(spec):
    k = build_kernel(spec)
    assert check_partition_of_unity(k, 1001) <= 1e-12
    assert _partition_oracle(k) <= 1e-12


def test_partition_detects_broken_kernel():
    good = build_kernel("cubic:a02=-2.5")
    other = build_kernel("cubic:a02=-2")
    spliced = dataclasses.replace(good, pieces=(good.pieces[0], other.pieces[1]))
    assert check_partition_of_unity(spliced) > 1e-3
    assert check_partition_of_unity(build_kernel("linear")) <= 1e-15


def test_continuity_examples():
    table = check_continuity(build_kernel("s31:a01=0.5"), 1)
    assert table.max(0) <= 1e-12 and table.max(1) <= 1e-12
    c2 = check_continuity(build_kernel(special_params("s41v4", "C2", 1.0)), 2)
    assert c2.at(1.0, 2) <= 1e-9
    lin = check_continuity(build_kernel("linear"), 1)
    assert lin.at(1.0, 1) == pytest.approx(1.0)


def test_smoothness_levels():
    assert check_continuity(build_kernel("cubic:a02=-2.5"), 3).smoothness() == 1
    assert check_continuity(build_kernel("cubicalt:a02=-2.5"), 3).smoothness() == 0
    assert check_continuity(build_kernel("s2"), 3).smoothness() == 0
    assert check_continuity(build_kernel("nearest"), 3).smoothness() == -1
    assert check_continuity(build_kernel(special_params("s41v5", "C2", 2.0)), 3).smoothness() == 2


@pytest.mark.parametrize(
    "spec, order",
    [("cubic:a02=-2.5", 3), ("s2", 2), ("s41v3:a02=0", 1), ("linear", 2), ("nearest", 1), ("cubic:a02=0", 1)],
)
def test_approximation_order_examples(spec, order):
    assert approximation_order(build_kernel(spec)) == order


def test_approximation_order_argument_check():
    with pytest.raises(ValueError):
        approximation_order(build_kernel("linear"), max_L=5)


@pytest.mark.parametrize("spec", ["linear", "s41v5:a01=30,a02=10,a03=-90.1572", "s31:a01=2", "nearest"])
def test_integral_examples(spec):
    assert check_integral(build_kernel(spec)) == pytest.approx(1.0, abs=1e-10)


def test_integral_against_whole_support_quadrature():
    k = build_kernel("s41v4:a01=80,a02=100,a03=-444.7992")
    val, _ = integrate.quad(k.value, -2, 2, points=[-1, 0, 1], epsabs=1e-13, limit=400)
    assert check_integral(k) == pytest.approx(val, abs=1e-10)


def test_symmetry_and_sinc():
    k = build_kernel("s41v1:a01=2,a02=-3")
    assert check_symmetry(k) == 0.0
    res = sinc_residuals(k)
    assert set(res) == {"t=0", "t=1", "t=1-", "t=2", "t=2-"}
    assert max(res.values()) <= 1e-12


@pytest.mark.parametrize("spec", ["s31:a01=0.25", "s41v1:a01=1,a02=-2", "cubic:a02=-2"])
def test_constraint_examples(spec):
    res = constraint_residuals(spec)
    assert res and max(res.values()) <= 1e-12


def test_cubic_reconstruction_exact():
    assert max(constraint_residuals("cubic:a02=-2").values()) == 0.0


def test_constraints_unsupported():
    with pytest.raises(UnsupportedFamily):
        constraint_residuals("linear")


def test_s31_solution_vi_substitution():
    res = constraint_residuals("s31:a01=0.25")
    assert any(k.startswith("(vi)") for k in res)
    assert any(k.startswith("partition system") for k in res)


def test_c1_system_fails_on_excluded_locus():
    # a01 = -1 (b11 = -1) is excluded from the C1 derivation; the kernel there is only C0.
    res = constraint_residuals("s31:a01=-1", strict=False)
    assert res["C1: phi'(1-) = phi'(1+)"] == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["s31", "s41v1", "s41v2", "s41v3", "s41v4", "s41v5"]), st.floats(-0.9, 80), st.floats(-100, 100), st.floats(-400, 400))
def test_constraints_random(fam, a01, a02, a03):
    vals = {"a01": a01, "a02": a02, "a03": a03}
    spec = KernelSpec.of(fam, **{n: vals[n] for n in PARAM_NAMES[Family(fam)]})
    res = constraint_residuals(spec)
    scale = max(1.0, abs(a01), abs(a02), abs(a03)) ** 2
    assert max(res.values()) <= 1e-12 * scale


def test_property_report_round_trip():
    rep = property_report("s41v4:a01=30,a02=20,a03=-121.5512")
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["family"] == "s41v4"
    assert d["smoothness"] == 1
    assert d["approx_order"] == 1
    assert d["integral"] == pytest.approx(1.0, abs=1e-10)
    assert rep.partition_residual >= 0 and rep.symmetry_residual == 0.0
    left, right = rep.derivative_at_1
    assert left == pytest.approx(-(4 + 90 + 40 - 121.5512) / 31, abs=1e-10)
    assert right == pytest.approx(left, abs=1e-10)


def test_report_table():
    text = format_report_table([property_report(s) for s in ("nearest", "linear", "s31:a01=-1")])
    lines = text.splitlines()
    assert lines[0].startswith("Kernel")
    assert "C-1" in lines[2] and "C0" in lines[4]
    assert lines[4].rstrip().endswith("s2")
