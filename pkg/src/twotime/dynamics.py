"""Time evolution: quadratic Hamiltonians, unitary and Markovian-damped dynamics.

The open-system channel is a single thermal damping bath (rate kappa, mean
occupation n_thermal) in Lindblad form; its generator is exponentiated once
per distinct duration and cached, since correlators reuse the same map across
a whole tau grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, null_space

from .hilbert import DEFAULT_TRACE_BUDGET, DensityMatrix, FockCutoff, ladder_matrices


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H = omega adag a + (xi adag^2 + conj(xi) a^2)/2 + (eta adag + conj(eta) a)."""

    omega: float = 0.0
    xi: complex = 0.0
    eta: complex = 0.0

    def key(self) -> tuple:
        return (float(self.omega), complex(self.xi), complex(self.eta))

    @property
    def is_free(self) -> bool:
        return self.xi == 0 and self.eta == 0


@dataclass(frozen=True)
class DampingChannel:
    """Thermal damping at rate kappa into a bath with mean occupation n_thermal."""

    kappa: float = 0.0
    n_thermal: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.n_thermal < 0:
            raise ValueError("kappa and n_thermal must be >= 0")

    def key(self) -> tuple:
        return (float(self.kappa), float(self.n_thermal))


def hamiltonian_matrix(H: QuadraticHamiltonian, cutoff: FockCutoff) -> np.ndarray:
    """Fock matrix of the Hamiltonian; exactly hermitian by symmetrization."""
    a, adag = ladder_matrices(cutoff)
    m = H.omega * (adag @ a)
    if H.xi != 0:
        m = m + (H.xi * (adag @ adag) + np.conj(H.xi) * (a @ a)) / 2.0
    if H.eta != 0:
        m = m + H.eta * adag + np.conj(H.eta) * a
    return (m + m.conj().T) / 2.0


# vec convention is row-major (C order): vec(A rho B) = kron(A, B.T) vec(rho)
def _sandwich(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.kron(A, B.T)


def lindblad_generator(
    H: QuadraticHamiltonian, ch: DampingChannel, cutoff: FockCutoff
) -> np.ndarray:
    """Dense generator L with d rho/dt = L vec(rho).

    L = -i[H, .] + kappa (n+1) D[a] + kappa n D[adag],
    D[c] rho = c rho cdag - (cdag c rho + rho cdag c)/2.
    """
    d = cutoff.dim
    a, adag = ladder_matrices(cutoff)
    Hm = hamiltonian_matrix(H, cutoff)
    eye = np.eye(d, dtype=complex)
    L = -1j * (_sandwich(Hm, eye) - _sandwich(eye, Hm))

    def dissipator(c: np.ndarray) -> np.ndarray:
        cc = c.conj().T @ c
        return _sandwich(c, c.conj().T) - 0.5 * (_sandwich(cc, eye) + _sandwich(eye, cc))

    if ch.kappa > 0:
        L = L + ch.kappa * (ch.n_thermal + 1.0) * dissipator(a)
        if ch.n_thermal > 0:
            L = L + ch.kappa * ch.n_thermal * dissipator(adag)
    return L


@dataclass
class Propagated:
    """Reusable linear map rho(tau) = unvec(map @ vec(rho))."""

    map: np.ndarray
    duration: float
    dim: int

    def apply(self, rho_mat: np.ndarray) -> np.ndarray:
        return (self.map @ rho_mat.reshape(-1)).reshape(self.dim, self.dim)


_unitary_cache: dict = {}
_map_cache: dict = {}
_CACHE_LIMIT = 32


def _cache_put(cache: dict, key, value):
    if len(cache) >= _CACHE_LIMIT:
        cache.pop(next(iter(cache)))
    cache[key] = value


def unitary_matrix(H: QuadraticHamiltonian, t: float, cutoff: FockCutoff) -> np.ndarray:
    """exp(-i H t) on the truncated basis, cached per (H, t, cutoff)."""
    key = (H.key(), float(t), cutoff.n_max)
    if key not in _unitary_cache:
        _cache_put(_unitary_cache, key, expm(-1j * t * hamiltonian_matrix(H, cutoff)))
    return _unitary_cache[key]


def propagated_map(
    H: QuadraticHamiltonian,
    ch: DampingChannel,
    tau: float,
    cutoff: FockCutoff,
) -> Propagated:
    """Superoperator M(tau) = expm(L tau), cached per distinct duration."""
    if tau < 0:
        raise ValueError("tau must be >= 0 for the damped map")
    key = (H.key(), ch.key(), float(tau), cutoff.n_max)
    if key not in _map_cache:
        L = lindblad_generator(H, ch, cutoff)
        _cache_put(_map_cache, key, expm(L * tau))
    return Propagated(_map_cache[key], float(tau), cutoff.dim)


def evolve_unitary(
    rho0: DensityMatrix,
    H: QuadraticHamiltonian,
    t: float,
    trace_budget: float = DEFAULT_TRACE_BUDGET,
) -> DensityMatrix:
    """rho(t) = U(t) rho0 U(t)^dag; negative t runs the evolution backwards."""
    U = unitary_matrix(H, t, rho0.cutoff)
    out = DensityMatrix(U @ rho0.mat @ U.conj().T, rho0.cutoff)
    return out.validate(trace_budget)


def evolve_lindblad(
    rho0: DensityMatrix,
    H: QuadraticHamiltonian,
    ch: DampingChannel,
    t: float,
    trace_budget: float = DEFAULT_TRACE_BUDGET,
) -> DensityMatrix:
    """Damped evolution for t >= 0; kappa = 0 reduces to the unitary path."""
    if t < 0:
        raise ValueError("t must be >= 0 for damped evolution")
    if ch.kappa == 0:
        return evolve_unitary(rho0, H, t, trace_budget)
    M = propagated_map(H, ch, t, rho0.cutoff)
    out = DensityMatrix(M.apply(rho0.mat), rho0.cutoff)
    return out.validate(trace_budget)


def steady_state(
    H: QuadraticHamiltonian, ch: DampingChannel, cutoff: FockCutoff
) -> DensityMatrix:
    """Null-space state of the generator (kappa > 0 required for uniqueness)."""
    if ch.kappa <= 0:
        raise ValueError("steady state requires kappa > 0")
    L = lindblad_generator(H, ch, cutoff)
    ns = null_space(L, rcond=1e-10)
    if ns.shape[1] == 0:
        raise RuntimeError("generator null space is empty at this tolerance")
    rho = ns[:, 0].reshape(cutoff.dim, cutoff.dim)
    rho = (rho + rho.conj().T) / 2.0
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho, cutoff).validate()


def choi_matrix(P: Propagated) -> np.ndarray:
    """Choi reshuffle of the map, for complete-positivity desk checks."""
    d = P.dim
    return P.map.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)
