"""Closed-form solution of a single qubit-cavity (Jaynes-Cummings) unit cell.

A cell couples one qubit to its right cavity with strength ``g_r``.  Its
excitation spectrum splits into doublets |n,+/-> built from |n, down> and
|n-1, up>; the mixing angle, eigenenergies and the coefficient tables of the
polariton-operator mapping are all analytic and serve as oracles for the
lattice solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, cavity_basis, qubit_basis, site_operator_dense


@dataclass(frozen=True)
class JcDoublet:
    """Eigensystem of the n-excitation doublet of one cell.

    Amplitudes follow the fixed gauge gamma_minus = cos(theta) > 0, with
    |n,+-> = gamma |n,down> + rho |n-1,up>.
    """

    n: int
    theta: float
    e_plus: float
    e_minus: float
    gamma_plus: float
    gamma_minus: float
    rho_plus: float
    rho_minus: float


def mixing_angle(n: int, g_r: float, delta: float) -> float:
    """Doublet mixing angle theta_n in (0, pi/2).

    theta_n = arctan[(sqrt(4 n g_r^2 + delta^2) - delta) / (2 sqrt(n) g_r)].
    """
    if n < 1:
        raise ValueError(f"excitation number must be >= 1, got {n}")
    if g_r <= 0:
        raise ValueError("g_r = 0 leaves the doublet degenerate; angle undefined")
    root = math.sqrt(4.0 * n * g_r * g_r + delta * delta)
    return math.atan2(root - delta, 2.0 * math.sqrt(n) * g_r)


def cell_ground_energy(params: ModelParams) -> float:
    """Energy of the cell ground state |0, down> (no photon, qubit down)."""
    return -params.omega_z / 2.0


def jc_eigensystem(n: int, params: ModelParams) -> JcDoublet:
    """Exact doublet energies and amplitudes, E_{n,+-} = (n-1/2) w_c +- R/2."""
    theta = mixing_angle(n, params.g_r, params.delta)
    root = math.sqrt(4.0 * n * params.g_r**2 + params.delta**2)
    base = (n - 0.5) * params.omega_c
    s, c = math.sin(theta), math.cos(theta)
    return JcDoublet(
        n=n,
        theta=theta,
        e_plus=base + root / 2.0,
        e_minus=base - root / 2.0,
        gamma_plus=s,
        gamma_minus=c,
        rho_plus=c,
        rho_minus=-s,
    )


def excitation_gaps(params: ModelParams) -> tuple[float, float, float]:
    """(dE1, dE2, U_eff): first/second polariton addition energies and their difference.

    At zero detuning dE1 = w_c - g_r, dE2 = w_c - (sqrt(2)-1) g_r, so the
    effective on-site repulsion is U_eff = (2 - sqrt(2)) g_r.
    """
    d1 = jc_eigensystem(1, params)
    d2 = jc_eigensystem(2, params)
    de1 = d1.e_minus - cell_ground_energy(params)
    de2 = d2.e_minus - d1.e_minus
    return de1, de2, de2 - de1


@dataclass(frozen=True)
class PolaritonCoeffs:
    """Coefficient tables of the photon/spin operators in the polariton basis.

    ``t[n]`` and ``k[n]`` are 2x2 arrays indexed [alpha, alpha'] with
    alpha in (+, -) mapped to (0, 1); they give the amplitude of the
    transition |n, alpha> -> |n-1, alpha'> under a and sigma^- respectively.
    For n = 1 the alpha' index refers to the unique cell ground state
    (treated as a singlet with gamma = 1, rho = 0).
    """

    n_max: int
    t: dict[int, np.ndarray]
    k: dict[int, np.ndarray]


def _amplitudes(n: int, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(gamma, rho) arrays over alpha = (+, -); n = 0 is the ground singlet."""
    if n == 0:
        return np.array([1.0, 1.0]), np.array([0.0, 0.0])
    d = jc_eigensystem(n, params)
    return np.array([d.gamma_plus, d.gamma_minus]), np.array([d.rho_plus, d.rho_minus])


def polariton_coeffs(params: ModelParams, n_max: int | None = None) -> PolaritonCoeffs:
    """Tables t^n and k^n of the polariton-operator expansion of a and sigma^-.

    t^n_{aa'} = sqrt(n) gamma_{n a} gamma_{(n-1) a'} + sqrt(n-1) rho_{n a} rho_{(n-1) a'},
    k^n_{aa'} = rho_{n a} gamma_{(n-1) a'};
    both equal the exact matrix elements <n-1,a'| a |n,a> and <n-1,a'| sigma^- |n,a>.
    """
    if n_max is None:
        n_max = params.n_max
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    t: dict[int, np.ndarray] = {}
    k: dict[int, np.ndarray] = {}
    for n in range(1, n_max + 1):
        gn, rn = _amplitudes(n, params)
        gp, rp = _amplitudes(n - 1, params)
        t[n] = math.sqrt(n) * np.outer(gn, gp) + math.sqrt(n - 1) * np.outer(rn, rp)
        k[n] = np.outer(rn, gp)
    return PolaritonCoeffs(n_max=n_max, t=t, k=k)


# ---------------------------------------------------------------------------
# Exact basis change of one cell (oracle for the coefficient tables)
# ---------------------------------------------------------------------------


def cell_hamiltonian_dense(params: ModelParams, n_max: int | None = None) -> np.ndarray:
    """Dense single-cell Hamiltonian over the product basis (qubit (x) cavity)."""
    if n_max is None:
        n_max = params.n_max
    fake = ModelParams(L=2, omega_c=params.omega_c, omega_z=params.omega_z,
                       g_l=0.0, g_r=params.g_r, n_max=n_max)
    qb, cb = qubit_basis(), cavity_basis(n_max)
    sz = site_operator_dense(qb, "sigma_z")
    sp = site_operator_dense(qb, "sigma_plus")
    num = site_operator_dense(cb, "number")
    a = site_operator_dense(cb, "a")
    iq, ic = np.eye(qb.dim), np.eye(cb.dim)
    h = (fake.omega_z / 2.0) * np.kron(sz, ic) + fake.omega_c * np.kron(iq, num)
    hop = fake.g_r * np.kron(sp, a)
    return h + hop + hop.T


def cell_eigenvector_matrix(params: ModelParams, n_max: int | None = None) -> np.ndarray:
    """Columns are cell eigenstates in the product basis, ordered by charge
    sector n ascending and, within a doublet, (+, -).

    Built analytically from the doublet amplitudes in the fixed gauge, so it
    provides a basis change independent of any numerical eigensolver.
    """
    if n_max is None:
        n_max = params.n_max
    dim = 2 * (n_max + 1)

    def idx(q: int, n_ph: int) -> int:
        # product-basis index for qubit state q (0 down, 1 up), n_ph photons
        return q * (n_max + 1) + n_ph

    cols: list[np.ndarray] = []
    ground = np.zeros(dim)
    ground[idx(0, 0)] = 1.0
    cols.append(ground)
    for n in range(1, n_max + 1):
        g, r = _amplitudes(n, params)
        for j_alpha in range(2):  # (+, -)
            v = np.zeros(dim)
            v[idx(0, n)] = g[j_alpha]
            if n >= 1:
                v[idx(1, n - 1)] = r[j_alpha]
            cols.append(v)
    # charge n = n_max + 1 has the lone state |up, n_max> at finite cutoff
    v = np.zeros(dim)
    v[idx(1, n_max)] = 1.0
    cols.append(v)
    return np.stack(cols, axis=1)
