"""Coherent-state propagator K(alpha,t|beta,0) = <alpha|U(t)|beta>.

Two forms: a closed Gaussian (exponential) kernel whose six coefficients
solve a Riccati-type ODE system, exact for quadratic Hamiltonians, and a
truncated-Fock numeric oracle used to validate it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CutoffTooSmallError, InstabilityError
from .dynamics import QuadraticHamiltonian, unitary_matrix
from .hilbert import FockCutoff, coherent_vector

ODE_RTOL = 1e-11
ODE_ATOL = 1e-13
GAUSSIAN_BOUND = 0.5  # |C| or |D| at this value means a non-normalizable kernel


@dataclass(frozen=True)
class GaussianKernel:
    """K = exp(A + B conj(a) b + C conj(a)^2 + D b^2 + E conj(a) + F b
              - |a|^2/2 - |b|^2/2) with a the final and b the initial amplitude."""

    A: complex
    B: complex
    C: complex
    D: complex
    E: complex
    F: complex
    duration: float

    def evaluate(self, alpha, beta):
        """K(alpha, t | beta, 0); accepts scalars or broadcastable arrays."""
        alpha = np.asarray(alpha, dtype=complex)
        beta = np.asarray(beta, dtype=complex)
        ac = np.conj(alpha)
        out = np.exp(
            self.A
            + self.B * ac * beta
            + self.C * ac * ac
            + self.D * beta * beta
            + self.E * ac
            + self.F * beta
            - np.abs(alpha) ** 2 / 2
            - np.abs(beta) ** 2 / 2
        )
        return complex(out) if out.ndim == 0 else out

    def heisenberg_coefficients(self) -> tuple[complex, complex, complex]:
        """(mu, nu, lam) with U^dag a U = mu a + nu adag + lam.

        Follows from <beta|aU|alpha> = (B alpha + 2C conj(beta) + E) K and the
        unitarity identity |B|^2 = 1 - 4|C|^2, giving mu = 1/conj(B),
        nu = 2C/B, lam = (E + 2C conj(E)) / |B|^2.
        """
        B, C, E = self.B, self.C, self.E
        bb = (B * np.conj(B)).real
        mu = 1.0 / np.conj(B)
        nu = 2.0 * C / B
        lam = (E + 2.0 * C * np.conj(E)) / bb
        return complex(mu), complex(nu), complex(lam)


def kernel_harmonic(omega: float, t: float) -> GaussianKernel:
    """Free-oscillator kernel: B = exp(-i omega t), all other coefficients zero."""
    return GaussianKernel(0.0, np.exp(-1j * omega * t), 0.0, 0.0, 0.0, 0.0, float(t))


def _coefficient_rhs(omega: float, xi: complex, eta: complex):
    xic = np.conj(xi)
    etac = np.conj(eta)

    def rhs(t, y):
        A, B, C, D, E, F = y[0::2] + 1j * y[1::2]
        dA = -1j * (xic / 2 * (E * E + 2 * C) + etac * E)
        dB = -1j * B * (omega + 2 * xic * C)
        dC = -1j * (2 * omega * C + xi / 2 + 2 * xic * C * C)
        dD = -1j * (xic / 2) * B * B
        dE = -1j * ((omega + 2 * xic * C) * E + eta + 2 * etac * C)
        dF = -1j * B * (xic * E + etac)
        dz = np.array([dA, dB, dC, dD, dE, dF])
        out = np.empty(12)
        out[0::2] = dz.real
        out[1::2] = dz.imag
        return out

    return rhs


def kernel_quadratic(H: QuadraticHamiltonian, t: float) -> GaussianKernel:
    """Kernel for a general quadratic Hamiltonian.

    The exponential ansatz substituted into i dU/dt = H U yields coupled
    coefficient ODEs (Riccati in C); they are integrated adaptively from the
    identity kernel.  Raises InstabilityError once |C| or |D| reaches 1/2,
    where the Gaussian stops being normalizable (parametric amplification
    beyond validity).
    """
    if H.xi == 0 and H.eta == 0:
        return kernel_harmonic(H.omega, t)
    y0 = np.zeros(12)
    y0[2] = 1.0  # B = 1 at t = 0
    sol = solve_ivp(
        _coefficient_rhs(H.omega, complex(H.xi), complex(H.eta)),
        (0.0, float(t)),
        y0,
        method="RK45",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=False,
    )
    if not sol.success:
        raise InstabilityError(f"kernel coefficient integration failed: {sol.message}")
    traj = sol.y[0::2] + 1j * sol.y[1::2]  # rows A..F over solver steps
    worst = max(np.max(np.abs(traj[2])), np.max(np.abs(traj[3])))
    if worst >= GAUSSIAN_BOUND:
        raise InstabilityError(
            f"|C| or |D| reached {worst:.3f} >= 0.5 during [0, {t}]; "
            "squeezing has left the normalizable-kernel regime"
        )
    A, B, C, D, E, F = traj[:, -1]
    return GaussianKernel(A, B, C, D, E, F, float(t))


def kernel_numeric(
    H: QuadraticHamiltonian,
    t: float,
    alpha: complex,
    beta: complex,
    cutoff: FockCutoff,
) -> complex:
    """Truncated-Fock oracle <alpha|exp(-iHt)|beta>."""
    va = coherent_vector(alpha, cutoff)
    vb = coherent_vector(beta, cutoff)
    for amp, v in ((alpha, va), (beta, vb)):
        deficit = abs(1.0 - float(np.vdot(v, v).real))
        if deficit > 1e-6:
            raise CutoffTooSmallError(
                f"|amp|={abs(amp):.3g} loses norm {deficit:.2e} at n_max={cutoff.n_max}"
            )
    U = unitary_matrix(H, t, cutoff)
    return complex(np.vdot(va, U @ vb))
