import json
import os

import numpy as np
import pytest

import rsmrac

CONFIG_DIR = os.environ.get("RSMRAC_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


def test_lyapunov_residual():
    A = np.array([[0.0, 1.0], [-2.0, -3.0]])
    Q = np.eye(2)
    P = rsmrac.solve_lyapunov(A, Q)
    assert np.allclose(A.T @ P + P @ A, -Q, atol=1e-10)
    assert np.all(np.linalg.eigvalsh(P) > 0)


def test_non_hurwitz_rejected():
    assert not rsmrac.is_hurwitz(np.eye(2))


def test_socp_matches_oracle():
    args = dict(r_star=np.array([1.0, 0.5]), rho=0.1, a=np.array([1.0, 0.0]), c=0.3, beta=2.0)
    s = rsmrac.socp_solve(**args)
    o = rsmrac.socp_oracle(**args)
    assert s["status"] == "optimal"
    assert abs(s["objective"] - o["objective"]) <= 1e-6 * max(1.0, abs(o["objective"]))
    assert s["kkt_residual"] <= 1e-6


def test_qp_projection():
    u = rsmrac.qp_single_constraint(np.array([0.0, 0.0]), np.array([1.0, 1.0]), 2.0)
    assert np.allclose(u, [1.0, 1.0])


def test_oracle_check_small():
    r = rsmrac.oracle_check(20, 3)
    assert r["failures"] == 0 and r["max_gap"] <= 1e-4 and r["max_kkt"] <= 1e-6


def test_short_run_is_safe():
    cfg = json.load(open(os.path.join(CONFIG_DIR, "benchmark.json")))
    cfg["sim"]["horizon"] = 3.0
    out = rsmrac.run(cfg, "robust_socp")
    assert out["x_p"].shape == (1501, 6)
    assert out["summary"]["min_h_plant"] >= 0.0
    assert out["summary"]["fault_count"] == 0


def test_bad_config_names_key():
    with pytest.raises(ValueError, match="barrier.radius must be positive"):
        rsmrac.run({"barrier": {"radius": -1.0}})


def test_default_fingerprint_stable():
    text = rsmrac.default_config()
    assert rsmrac.config_fingerprint(text) == rsmrac.config_fingerprint("")
