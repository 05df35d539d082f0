"""End-to-end smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import conical

ABS_X = json.dumps(
    {
        "dim": 1,
        "codim": 1,
        "w": {"kind": "const", "c": 1.0},
        "V0": {"kind": "const", "c": 0.0},
        "g": "coordinates",
        "box": [[-3.0, 3.0]],
    }
)

SQRT3 = math.sqrt(3.0)


def test_potential_eval():
    pot = conical.Potential(ABS_X)
    assert pot.dim == 1
    assert pot.V(np.array([-2.0])) == pytest.approx(2.0)
    assert pot.grad_V(np.array([-1.0]))[0] == pytest.approx(-1.0)
    force = pot.one_sided_force(np.array([0.0]), np.array([1.0]), side=1)
    assert force[0] == pytest.approx(-1.0)


def test_flow_through_crossing():
    pot = conical.Potential(ABS_X)
    res = conical.flow(pot, np.array([-1.0]), np.array([1.0]), SQRT3)
    assert res["tau"] == pytest.approx(SQRT3 - 1.0, abs=1e-9)
    assert len(res["crossings"]) == 1
    assert res["crossings"][0]["generic"]
    s = SQRT3 - (SQRT3 - 1.0)
    assert res["x"][0] == pytest.approx(SQRT3 * s - 0.5 * s * s, abs=1e-8)

    jac = conical.variational_jacobian(pot, np.array([-1.0]), np.array([1.0]), SQRT3)
    assert np.linalg.det(jac) == pytest.approx(1.0, abs=1e-4)


def test_non_generic_raises():
    neg = conical.Potential(
        json.dumps(
            {
                "dim": 1,
                "codim": 1,
                "w": {"kind": "const", "c": -1.0},
                "V0": {"kind": "const", "c": 0.0},
                "g": "coordinates",
                "box": [[-3.0, 3.0]],
                "expects_crossings": False,
            }
        )
    )
    with pytest.raises(conical.NumericalError):
        conical.flow(neg, np.array([0.0]), np.array([0.0]), 1.0)


def test_evolve_and_wigner():
    pot = conical.Potential(ABS_X)
    eps = 1.0 / 64
    axes = [(-2.6, 2.6, 512)]
    psi0 = conical.make_coherent(np.array([-1.0]), np.array([1.0]), eps, axes)
    assert psi0.shape == (512,)

    tc = SQRT3 - 1.0
    res = conical.evolve(pot, psi0, [(-2.6, 2.6)], eps, tc, snapshots=[tc])
    assert res["norm_drift"] <= 1e-10
    psi_t = res["snapshots"][-1]

    w = conical.wigner(psi_t, [(-2.6, 2.6)], eps)
    assert w["mass"] == pytest.approx(1.0, abs=1e-8)
    values = w["values"]
    assert values.shape == (512, 1024)
    # The packet has reached the crossing region.
    dx = 5.2 / 512
    xs = -2.6 + dx * np.arange(512)
    density = values.sum(axis=1) * (w["xi_axes"][0][1] - w["xi_axes"][0][0]) / 1024
    mean_x = float((xs * density).sum() / density.sum())
    assert abs(mean_x) <= 2.0 * math.sqrt(eps)


def test_run_subcommand(tmp_path):
    cfg = {
        "potential": json.loads(ABS_X),
        "grid": {"n": 256, "xi_max": 2.0},
        "initial": {"kind": "coherent", "q": [-1.0], "p": [1.0]},
        "time": {"t_final": 0.2, "snapshots": [0.2]},
        "eps_list": [1.0 / 32],
        "trajectory": {"x": [-1.0], "xi": [1.0], "t_final": 2.0, "samples": 51},
        "seed": 9,
    }
    code = conical.run(json.dumps(cfg), "trajectory", str(tmp_path))
    assert code == 0
    side = json.loads((tmp_path / "crossings.json").read_text())
    assert side["crossings"][0]["t_cross"] == pytest.approx(SQRT3 - 1.0, abs=1e-9)
