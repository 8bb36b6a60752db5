"""Acceptance criteria 1-15, each run at its stated tolerance.

Every criterion prints one ``criterion N: PASS|FAIL`` line to the terminal.
Suites are run once per session and shared between the criteria they cover.
"""

import time
from functools import lru_cache

import numpy as np
import pytest

from superqft import model11 as m11
from superqft.suites import SUITES, SuiteConfig, qhat32_rows, tau_abs_kernel_gap

CRITERIA = {
    1: ("grassmann-laws", "Grassmann and supermatrix laws"),
    2: ("berezinian", "Berezinian worked examples"),
    3: ("green11", "1|1 Green axioms"),
    4: ("green11", "1|1 self-adjointness and Green adjointness"),
    5: ("green11", "exact sequence"),
    6: ("tau", "τ closed forms and symmetry classes"),
    7: ("green11", "Green uniqueness proxy"),
    8: ("green32", "gamma-matrix identities"),
    9: ("green32", "Dirac factorization"),
    10: ("green32", "3|2 Green axioms"),
    11: ("green32", "flat supertorsion constraints"),
    12: ("quantize", "quantization"),
    13: ("susy", "supersymmetry"),
    14: ("enriched-laws", "enriched functor and category laws"),
    15: ("enriched-laws", "non-naturality witness"),
}

# wall-clock budgets in seconds, applied to the suite that carries the criterion
BUDGETS = {1: 5.0, 3: 5.0, 9: 30.0, 10: 60.0, 12: 20.0}
TOTAL_BUDGET = 300.0


@lru_cache(maxsize=None)
def run(suite: str):
    t = time.perf_counter()
    checks = SUITES[suite](SuiteConfig(suite=suite))
    return checks, time.perf_counter() - t


def announce(capsys, line: str) -> None:
    with capsys.disabled():
        print(f"\n{line}")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    suite, title = CRITERIA[number]
    checks, elapsed = run(suite)
    mine = [c for c in checks if c.criterion == number]
    failed = [c for c in mine if not c.passed]
    budget = BUDGETS.get(number)
    slow = budget is not None and elapsed > budget
    ok = bool(mine) and not failed and not slow
    detail = "; ".join(f"{c.name}={c.value:.3g}" + (f" (tol {c.tol:.0e})" if c.tol is not None else "") for c in mine)
    announce(capsys, f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title} [{elapsed:.1f}s] {detail}")
    assert mine, f"no checks recorded for criterion {number}"
    assert not failed, [(c.name, c.value, c.tol, c.note) for c in failed]
    assert not slow, f"{suite} took {elapsed:.1f}s, budget {budget}s"


def test_supporting_checks_pass(capsys):
    extra = [c for c in run("tau")[0] if c.criterion is None]
    announce(capsys, "supporting: " + ", ".join(f"{c.name} {'PASS' if c.passed else 'FAIL'}" for c in extra))
    assert extra and all(c.passed for c in extra)


def test_whole_run_within_budget():
    total = sum(run(name)[1] for name in SUITES)
    assert total <= TOTAL_BUDGET


@pytest.mark.xfail(strict=True, reason="τ on odd-odd pairs uses the antisymmetric kernel (t−s); |t−s| does not match")
def test_odd_odd_tau_with_absolute_kernel():
    assert tau_abs_kernel_gap(m11.Grid11(0.0, 2.0, 4097)) <= 1e-6


@pytest.mark.xfail(strict=True, reason="the ψ-row scalar image comes out as −B^aρ_a, not +B^aρ_a")
def test_qhat_psi_row_with_plus_sign():
    from superqft import model32 as m32
    rows = qhat32_rows(m32.Grid32(32, 32, 32), (0.6, -0.8), np.random.default_rng(0))
    assert rows["psi_row_eta_flipped"] <= 1e-12  # sanity: the other sign is exact
    assert rows["psi_row_eta_literal"] <= 1e-12
