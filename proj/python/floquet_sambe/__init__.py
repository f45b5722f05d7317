"""Sambe-space Floquet spectra, block encodings and phase estimation."""

import json

import numpy as np

from ._core import (
    FloquetError,
    Hamiltonian,
    alpha_F,
    cli,
    cutoff_for_accuracy,
    f3,
    floquet_operator,
    load_hamiltonian,
    oracle_quasienergies,
    parse_hamiltonian,
    quasienergies,
    sambe_matrix,
)
from . import _core


def _state(psi):
    return np.asarray(psi, dtype=np.complex128)


def verify_bounds(h, L, checks="all", steps=100000):
    return json.loads(_core._verify_bounds(h, L, checks, steps))


def fqpe_physical(h, psi, eps=1e-3, delta=1e-3, nu=None):
    return json.loads(_core._fqpe_physical(h, _state(psi), eps, delta, nu))


def fqpe_sambe(h, psi, L, eps=1e-3, delta=1e-3, nu=None):
    return json.loads(_core._fqpe_sambe(h, _state(psi), L, eps, delta, nu))


def prepare(h, psi, eps_n, Delta, gamma, delta=1e-3, target="physical", L=None):
    return json.loads(_core._prepare(h, _state(psi), eps_n, Delta, gamma, delta, target, L))


__all__ = [
    "FloquetError",
    "Hamiltonian",
    "alpha_F",
    "cli",
    "cutoff_for_accuracy",
    "f3",
    "floquet_operator",
    "fqpe_physical",
    "fqpe_sambe",
    "load_hamiltonian",
    "oracle_quasienergies",
    "parse_hamiltonian",
    "prepare",
    "quasienergies",
    "sambe_matrix",
    "verify_bounds",
]
