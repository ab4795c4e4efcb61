import json

import numpy as np
import pytest

from radosc.darboux import ComplexFactorization
from radosc.grid import RadialGrid
from radosc.report import (
    CANONICAL_CATALOGUE,
    CATALOGUE,
    DEFORMED_CATALOGUE,
    ReportEntry,
    VerificationReport,
    merge,
)
from radosc.verify import (
    CANONICAL_TOL,
    bump_functions,
    verify_section2,
    verify_section3,
)


@pytest.fixture(scope="module")
def canonical_report(grid, window):
    return verify_section2(grid, window, l_max=3, s_max=3)


@pytest.fixture(scope="module")
def deformed_report(grid, window):
    return verify_section3(ComplexFactorization(0, 11 + 5j), grid, window)


def test_catalogue_sizes():
    assert len(CANONICAL_CATALOGUE) == 13
    assert len(DEFORMED_CATALOGUE) == 8
    assert len(CATALOGUE) == 21
    assert len(set(CATALOGUE.values())) == 21


def test_every_family_is_exercised(canonical_report, deformed_report):
    assert canonical_report.identities() == set(CANONICAL_CATALOGUE)
    assert deformed_report.identities() == set(DEFORMED_CATALOGUE)
    names = {e.name for e in deformed_report.entries}
    assert {"poli-forward", "poli-reverse", "mint-raise", "conmuta3-lower", "nonadjoint-witness"} <= names


def test_canonical_suite_passes(canonical_report):
    assert canonical_report.passed, canonical_report.failures()[:5]
    assert all(e.tolerance == CANONICAL_TOL for e in canonical_report.entries)


def test_l0_skips_are_noted(canonical_report):
    l0 = {e.name for e in canonical_report.entries if e.l == 0}
    assert "factor2b-lower" not in l0 and "ene-shifted" not in l0
    assert {"factor2b-lower", "ene-shifted"} <= {e.name for e in canonical_report.entries if e.l == 1}
    assert any("l=0" in n for n in canonical_report.notes)


def test_witnesses_exceed_threshold(deformed_report):
    w = [e for e in deformed_report.entries if e.comparison == "gt"]
    assert len(w) == 2 and all(e.passed for e in w)


def test_bumps_are_deterministic_and_seeded(grid):
    a = [f(grid).values for _, f in bump_functions(1, 7)]
    b = [f(grid).values for _, f in bump_functions(1, 7)]
    c = [f(grid).values for _, f in bump_functions(1, 8)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], c[0])


def test_json_is_byte_identical_across_runs(window):
    g = RadialGrid(1e-3, 8.0, 801)
    j1 = (verify_section2(g, window, 1, 1) + verify_section3(ComplexFactorization(0, 7 + 2.5j), g, window, 1)).to_json()
    j2 = (verify_section2(g, window, 1, 1) + verify_section3(ComplexFactorization(0, 7 + 2.5j), g, window, 1)).to_json()
    assert j1 == j2
    doc = json.loads(j1)
    assert doc["schema"] == 1 and len(doc["catalogue"]) == 21
    assert doc["summary"]["total"] == len(doc["entries"])
    assert j1.endswith("\n")


def test_tolerance_override(canonical_report):
    strict = canonical_report.with_tolerance(1e-16)
    assert not strict.passed
    assert all(e.tolerance == 1e-16 for e in strict.entries if e.comparison == "le")


def test_entry_semantics():
    e = ReportEntry("x", "s-commutator", 0, "bump0", 1e-7, 1e-6)
    assert e.passed and e.tag == "conmuta2" and e.group == "canonical"
    assert not ReportEntry("x", "non-adjointness", 0, "p", 1e-4, 1e-3, comparison="gt").passed
    assert not ReportEntry("x", "s-commutator", 0, "p", float("nan"), 1.0).passed
    assert ReportEntry("x", "s-commutator", 0, "p", float("inf"), 1.0).to_dict()["residual"] is None
    d = ReportEntry("x", "polynomial-products", 0, "p", 0.0, 1.0, epsilon=1 + 2j).to_dict()
    assert d["epsilon"] == [1.0, 2.0] and d["group"] == "deformed"


def test_report_combination_and_selection():
    a = VerificationReport((ReportEntry("a", "s-commutator", 0, "p", 0.0, 1.0),), ("n1",), {"k": 1})
    b = VerificationReport((ReportEntry("b", "s-products", 1, "p", 2.0, 1.0),), ("n2",))
    m = merge([a, b])
    assert len(m.entries) == 2 and m.notes == ("n1", "n2") and m.config == {"k": 1}
    assert not m.passed and [e.name for e in m.failures()] == ["b"]
    assert [e.name for e in m.select(identity="s-products")] == ["b"]
    s = m.summary()
    assert s["by_group"]["canonical"] == {"total": 2, "passed": 1, "failed": 1}
