import math

import numpy as np
import pytest

import poisson_rbound as prb


def test_version_and_catalog():
    assert prb.__version__ == "0.1.0"
    names = prb.kernel_names()
    assert "heat" in names and "kpp" in names
    with pytest.raises(ValueError):
        prb.kernel("nosuch")


def test_bracket():
    assert prb.bracket([3.0, 4.0]) == pytest.approx(math.sqrt(26.0))
    assert prb.bracket([0.0], 2j) == pytest.approx(math.sqrt(5.0))


def test_sector():
    assert prb.sector_contains(-0.5, 0.5, 1.0)
    assert not prb.sector_contains(-0.5, 0.5, -1.0)


def test_heat_kernel_values():
    heat = prb.kernel("heat")
    assert heat([0.0], 3.0, 0.0) == pytest.approx(1.0)
    # exp(-sqrt(1 + mu^2) x) for xi = 0
    assert heat([0.0], 1.0, 1.0).real == pytest.approx(math.exp(-math.sqrt(2.0)), rel=1e-12)
    with pytest.raises(ValueError):
        heat([0.0], -1.0, 0.0)


def test_lemma_max_eval():
    assert prb.lemma_max_eval(1.0, 2.0, 2.0) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        prb.lemma_max_eval(2.0, 2.0, 1.0)


def test_decay_fit():
    rows = [(r, 0.0, 5.0 / math.sqrt(r)) for r in np.geomspace(10.0, 1000.0, 8)]
    slope, residual = prb.decay_fit(rows, modulus=True)
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert residual < 1e-10


def test_opnorm_scan_slope():
    grids = prb.GridConfig()
    grids.points_per_dim = 32
    scan = prb.MuScan()
    scan.points = 8
    result = prb.opnorm_scan(prb.kernel("heat"), 0.0, 0.0, grids, scan)
    assert len(result.rows) == 8
    assert result.slope == pytest.approx(-0.5, abs=0.03)


def test_kpp_resolvent_constant_data():
    g = np.ones(8, dtype=complex)
    v, diag = prb.kpp_resolvent_v(g, 1.0)
    assert np.allclose(v, 2.0 / 3.0)
    assert isinstance(diag, dict)


def test_kpp_lemma_scan():
    r = prb.kpp_lemma_scan(prb.KppParams(), points_per_decade=2)
    assert r["samples"] > 0
    assert r["min_gap"] > 0.0
    assert math.isfinite(r["sup_m1"]) and math.isfinite(r["sup_m2"])
