import math

import numpy as np
import pytest

from logloss_lab.core import LAMBDA_STAR, eta, log_loss, phi
from logloss_lab.verify import (
    CHECK_IDS,
    lambda_threshold_scan,
    run_check,
    sup_psi,
    _case1_ratio,
)


@pytest.mark.parametrize("check_id", CHECK_IDS)
def test_every_check_passes(check_id):
    res = 1e-2 if check_id == "PHI_LIPSCHITZ" else 1e-3
    r = run_check(check_id, resolution=res, seed=0)
    assert r.passed, f"{check_id}: worst slack {r.worst_slack} at {r.worst_point}"
    assert r.worst_slack >= -r.tolerance


def test_unknown_check():
    with pytest.raises(ValueError):
        run_check("NOT_A_CHECK")
    with pytest.raises(ValueError):
        run_check("KL_EPS", resolution=0.0)


def test_sc_pointwise_diagonal_equality():
    # f = p gives slack exactly zero
    for p in np.linspace(0.05, 0.95, 19):
        lhs = log_loss(p, 1) - log_loss(p, 1)
        rhs = phi(eta(p, 1) * (p - p))
        assert abs(rhs - lhs) < 1e-12


def test_eta_identity_other_horizons():
    for n in (1, 3, 5):
        r = run_check("ETA_IDENTITY", seed=1, n=n, n_trees=20)
        assert r.passed


def test_sup_psi_at_critical_lambda():
    val, (p, v) = sup_psi(LAMBDA_STAR, resolution=1e-2)
    assert val <= 1.0 + 1e-9
    assert abs(v) < 1e-6  # attained at v = 0


def test_sup_psi_below_and_above_threshold():
    assert sup_psi(0.1, resolution=1e-2)[0] <= 1.0 + 1e-9
    assert sup_psi(1.0, resolution=1e-2)[0] > 1.0


def test_sup_psi_monotone_below_threshold():
    sups = [sup_psi(lam, resolution=1e-2)[0] for lam in (0.1, 0.2, 0.31)]
    assert sups[0] <= sups[1] + 1e-9
    assert sups[1] <= sups[2] + 1e-9
    with pytest.raises(ValueError):
        sup_psi(0.0)


def test_lambda_scan_near_critical():
    got = lambda_threshold_scan(1e-3)
    assert abs(got - LAMBDA_STAR) <= 1e-3


def test_lambda_scan_case1_small_p_stays_above():
    # restricted to p <= 1/2, the case-1 ratio stays above the critical value
    p = np.linspace(1e-3, 0.5, 400)[:, None]
    u = np.linspace(0.0, 1.0, 400)[None, :]
    v = (p - 1.0) + u * (1.0 - p - 1e-3)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = _case1_ratio(p, v)
    assert np.nanmin(r) > LAMBDA_STAR


def test_lambda_scan_boundary_closed_form():
    # at v = p - 1 the ratio reduces to (log p + log 2 - log 3)/(log p + log 2 - 2)
    for p in (0.2, 0.5, 0.9, 0.999):
        got = float(_case1_ratio(np.array(p), np.array(p - 1.0)))
        want = (math.log(p) + math.log(2) - math.log(3)) / (
            math.log(p) + math.log(2) - 2.0
        )
        assert got == pytest.approx(want, rel=1e-10)


def test_lambda_scan_resolution_guard():
    with pytest.raises(ValueError):
        lambda_threshold_scan(1e-2)


def test_report_fields():
    r = run_check("SC_EDGE", resolution=1e-4)
    assert r.check_id == "SC_EDGE"
    assert r.passed == (r.worst_slack >= -r.tolerance)
    assert len(r.worst_point) >= 1
    assert "step" in r.grid_spec
