"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line in ``conftest.RESULTS``; pytest prints
them in an "acceptance criteria" section. Running this file directly prints
the same lines.
"""

import contextlib
import io
import math
import time

import numpy as np
import pytest

from conftest import RESULTS
from qswitch_ergo import closed_forms as cf
from qswitch_ergo.cli import main
from qswitch_ergo.verification import (
    Check,
    check_purified_output_oracle,
    check_classical_bound,
    check_coherent_closed_form,
    check_ergotropy_decomposition,
    check_mixture_passivity,
    check_n_switch_scaling,
    check_product_bound,
    check_purification_optimum,
    check_two_switch_oracle,
)

SEED = 0


def record(number: int, check: Check, extra: str = "") -> None:
    line = f"criterion {number:2d}: {check.line()}"
    RESULTS[number] = f"{line} {extra}".rstrip()
    print(RESULTS[number])
    assert check.passed, RESULTS[number]


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_criterion_01_two_switch_oracle():
    check, elapsed = timed(lambda: check_two_switch_oracle(tol=1e-12))
    fast = elapsed < 5.0
    record(1, Check(check.name, check.passed and fast, check.max_residual, check.tolerance, check.detail),
           f"runtime_under_5s={fast}")


def test_criterion_02_purified_output_oracle():
    record(2, check_purified_output_oracle(tol=1e-12, seed=SEED, samples=20))


def test_criterion_03_product_temperature_bound():
    record(3, check_product_bound(tol=1e-12))


def test_criterion_04_n_switch_scaling():
    check, elapsed = timed(lambda: check_n_switch_scaling(tol=1e-9, seed=SEED, n_max=5, samples=10))
    fast = elapsed < 60.0
    record(4, Check(check.name, check.passed and fast, check.max_residual, check.tolerance, check.detail),
           f"runtime_under_60s={fast}")


def test_criterion_05_classical_bound():
    assert abs(cf.CRITICAL_BETA - math.log(3) / 2) < 1e-15
    record(5, check_classical_bound(tol=1e-12))


def test_criterion_06_purification_optimum():
    record(6, check_purification_optimum(tol=1e-9, beta=1.0))


def test_criterion_07_coherent_closed_form():
    record(7, check_coherent_closed_form(tol=1e-9, seed=SEED, samples=20, incoherent_tol=1e-10))


def test_criterion_08_ergotropy_decomposition():
    record(8, check_ergotropy_decomposition(tol=1e-10, seed=SEED, samples=500, passive_tol=1e-12))


def test_criterion_09_mixture_passivity():
    record(9, check_mixture_passivity(tol=1e-10, seed=SEED, samples=100))


def _cli_bytes(argv) -> bytes:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    assert code == 0, f"{argv} exited with {code}"
    return buf.getvalue().encode()


def test_criterion_10_determinism(monkeypatch):
    verify = [_cli_bytes(["verify", "--seed", str(SEED)]) for _ in range(2)]
    sweep_args = ["sweep", "--kind", "classical", "--beta", "0.1,0.4", "--beta-in", "0:4:0.5", "--seed", "11"]
    region_args = ["region", "--kind", "product", "--beta", "0.1:1.5:0.1", "--beta-in", "0.1:3:0.1", "--seed", "11"]
    sweeps = [_cli_bytes(sweep_args), _cli_bytes(region_args)]
    monkeypatch.setenv("QSWITCH_ERGO_THREADS", "4")
    sweeps_threaded = [_cli_bytes(sweep_args), _cli_bytes(region_args)]
    same = verify[0] == verify[1] and sweeps == sweeps_threaded
    diff = 0.0 if same else 1.0
    record(10, Check("determinism", same, diff, 0.0, f"verify_bytes={len(verify[0])}"))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
