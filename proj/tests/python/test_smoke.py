import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import floquet_sambe as fs

CONFIGS = Path(os.environ.get("FLOQUET_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


@pytest.fixture(scope="module")
def rabi():
    return fs.load_hamiltonian(str(CONFIGS / "rabi.json"))


def test_model_properties(rabi):
    assert rabi.n_qubits == 1
    assert rabi.M == 1
    assert rabi.omega == pytest.approx(2 * math.pi)
    assert np.allclose(rabi.component(0), 0.15 * rabi.omega * np.diag([1, -1]))


def test_sambe_matrix_hermitian_and_alpha(rabi):
    L = 3
    h = fs.sambe_matrix(rabi, L, "pbc")
    assert h.shape == (2 * L * 2, 2 * L * 2)
    assert np.allclose(h, h.conj().T)
    assert np.linalg.norm(h, 2) <= fs.alpha_F(rabi, L) + 1e-12
    assert fs.alpha_F(rabi, L) == pytest.approx(3 * 0.15 * rabi.omega + L * rabi.omega)


def test_quasienergies_match_propagator(rabi):
    w = rabi.omega
    sambe = sorted(fs.quasienergies(rabi, 16))
    # independent check: eigenphases of the propagator from numpy
    u = fs.floquet_operator(rabi, 20000)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    phases = sorted(((-np.angle(np.linalg.eigvals(u)) / rabi.period + w / 2) % w) - w / 2)
    for a, b in zip(sambe, phases):
        d = (a - b + w / 2) % w - w / 2
        assert abs(d) < 1e-8 * w


def test_trivial_model_exact():
    h = fs.parse_hamiltonian(json.dumps({
        "n_qubits": 1, "period": 1.0, "units": "omega", "mode": {"bounded": {"M": 0}},
        "components": [{"m": 0, "terms": [{"coeff": [0.25, 0.0], "pauli": "Z"}]}],
    }))
    assert sorted(fs.quasienergies(h, 4)) == pytest.approx([-0.25 * h.omega, 0.25 * h.omega], abs=1e-12)


def test_verify_bounds_pass(rabi):
    rows = fs.verify_bounds(rabi, 6, "prop1,propB1", steps=20000)
    assert rows and all(r["pass"] for r in rows)


def test_fqpe_preserves_weights(rabi):
    psi = np.array([1.0, 1.0j]) / math.sqrt(2)
    phys = fs.fqpe_physical(rabi, psi, eps=1e-3)
    sambe = fs.fqpe_sambe(rabi, psi, L=6, eps=1e-3)
    assert sum(e["prob"] for e in phys["entries"]) == pytest.approx(1.0, abs=1e-12)
    assert sum(e["prob"] for e in sambe["entries"]) == pytest.approx(1.0, abs=1e-9)


def test_prepare_trivial():
    h = fs.load_hamiltonian(str(CONFIGS / "trivial_sz.json"))
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    r = fs.prepare(h, plus, eps_n=-0.25 * h.omega, Delta=0.4, gamma=0.7)
    assert r["fidelity"] >= 1 - 1e-3
    with pytest.raises(fs.FloquetError):
        fs.prepare(h, plus, eps_n=-0.25 * h.omega, Delta=0.6, gamma=0.7)


def test_f3_and_cli():
    assert fs.f3(0.5) == pytest.approx(1.0)
    code, out, err = fs.cli(["cost", "--eps", "1e-2"])
    assert code == 0 and out
    code, _, err = fs.cli(["spectrum", "--config", "/nonexistent.json"])
    assert code == 2 and err
