"""Single-excitation manifold of the driven atom-cavity system.

The states |e,0>, |g1,0>, |g2,1> form a closed 3x3 block of the effective
(non-Hermitian) optical Hamiltonian. Everything downstream -- excitation
spectra, scattering amplitudes, heating/cooling rates -- is built from the
characteristic function ``f(zeta)`` of this block and from the entries of its
resolvent.

Basis ordering used for matrices here: (|e,0>, |g1,0>, |g2,1>).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .params import SystemParams

# |f(zeta)| below this (relative to max(1, |zeta|^3)) counts as sitting on a
# dressed-state pole.
POLE_TOL = 1e-12

# Resonance-condition tolerance for dark-state bookkeeping, in units of nu.
RESONANCE_TOL = 1e-9


def three_photon_detuning(p: SystemParams, zeta):
    """The factor delta_c2 + zeta - delta1, grouped as zeta - (delta1 - delta_c2).

    This grouping makes the three-photon zero exact in floating point when
    zeta equals delta1 - delta_c2 computed from the same fields.
    """
    return zeta - (p.delta1 - p.delta_c2)


def char_poly(p: SystemParams, zeta):
    """Characteristic function f(zeta) of the single-excitation block.

    f(zeta) = (i kappa + zeta) { [delta_c2 + zeta + i gamma/2]
              (delta_c2 + zeta - delta1) - omega_L^2/4 }
              - g^2 cos^2(varphi) (delta_c2 + zeta - delta1)

    with gamma the total linewidth. Accepts scalars or numpy arrays.
    """
    dtp = three_photon_detuning(p, zeta)
    return (1j * p.kappa + zeta) * (
        (p.delta_c2 + zeta + 0.5j * p.gamma) * dtp - p.omega_L**2 / 4
    ) - p.g_cos**2 * dtp


def manifold_matrix(p: SystemParams) -> np.ndarray:
    """Effective Hamiltonian on (|e,0>, |g1,0>, |g2,1>), divided by hbar.

    Complex symmetric; f(zeta) = det(zeta - M).
    """
    return np.array(
        [
            [-p.delta_c2 - 0.5j * p.gamma, p.omega_L / 2, p.g_cos],
            [p.omega_L / 2, p.delta1 - p.delta_c2, 0.0],
            [p.g_cos, 0.0, -1j * p.kappa],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class DressedSpectrum:
    """The three complex dressed-state frequencies of the driven manifold.

    Real parts are positions (units of nu), imaginary parts are minus the
    half-linewidths. Ordered by descending real part, ties by ascending
    imaginary part.
    """

    omega_eff: tuple[complex, complex, complex]

    @property
    def positions(self) -> np.ndarray:
        return np.array([z.real for z in self.omega_eff])

    @property
    def half_linewidths(self) -> np.ndarray:
        return np.array([-z.imag for z in self.omega_eff])


def dressed_states(p: SystemParams) -> DressedSpectrum:
    """Dressed-state spectrum from a non-Hermitian eigensolve of the 3x3 block.

    Eigenvalues are used instead of the closed-form cubic: the eigensolve
    stays accurate through the avoided crossings where the cubic loses digits.
    """
    ev = np.linalg.eigvals(manifold_matrix(p))
    ordered = sorted(ev, key=lambda z: (-z.real, z.imag))
    return DressedSpectrum(omega_eff=tuple(complex(z) for z in ordered))


@dataclass(frozen=True)
class ResolventBlock:
    """Entries of the manifold resolvent (zeta - M)^(-1) in units of 1/nu.

    The six independent entries of the complex-symmetric inverse; naming is
    by the bare states: ``ee`` = <e,0|...|e,0>, ``g1g2`` = <g1,0|...|g2,1>,
    and so on.
    """

    zeta: complex
    f_value: complex
    ee: complex
    g1g1: complex
    g2g2: complex
    g1e: complex
    g2e: complex
    g1g2: complex

    def as_matrix(self) -> np.ndarray:
        """Full 3x3 inverse in the (|e,0>, |g1,0>, |g2,1>) basis."""
        return np.array(
            [
                [self.ee, self.g1e, self.g2e],
                [self.g1e, self.g1g1, self.g1g2],
                [self.g2e, self.g1g2, self.g2g2],
            ],
            dtype=complex,
        )


def resolvent_block(p: SystemParams, zeta: complex) -> ResolventBlock:
    """Resolvent entries at complex frequency ``zeta``.

    Raises
    ------
    PoleError
        If |f(zeta)| is below the pole tolerance; the caller is probing a
        dressed-state resonance.
    """
    f = char_poly(p, zeta)
    scale = max(1.0, abs(zeta) ** 3)
    if abs(f) < POLE_TOL * scale:
        raise PoleError(
            f"f({zeta}) = {f}: evaluation point sits on a dressed-state pole",
            factor="f(zeta)",
        )
    dtp = three_photon_detuning(p, zeta)
    gc = p.g_cos
    ge = p.delta_c2 + zeta + 0.5j * p.gamma
    ck = 1j * p.kappa + zeta
    return ResolventBlock(
        zeta=zeta,
        f_value=f,
        ee=dtp * ck / f,
        g1g1=(ge * ck - gc**2) / f,
        g2g2=(ge * dtp - p.omega_L**2 / 4) / f,
        g1e=ck * (p.omega_L / 2) / f,
        g2e=gc * dtp / f,
        g1g2=gc * (p.omega_L / 2) / f,
    )


@dataclass(frozen=True)
class DarkStateWeights:
    """Normalized coefficients of the two dark superpositions.

    ``three_photon`` holds (c1, c2) of the pump-displaced dark state
    c1 |g1, eps'> + c2 |g2, eps'>; it is None at Delta = 0 where the
    displaced frame is undefined. ``two_photon`` holds (c1, c2) of
    c1 |g1,0> + c2 |g2,1>. The booleans record whether the corresponding
    resonance condition holds within RESONANCE_TOL.
    """

    three_photon: tuple[float, float] | None
    three_photon_resonant: bool
    two_photon: tuple[float, float]
    two_photon_resonant: bool


def _normalized(c1: float, c2: float) -> tuple[float, float]:
    n = np.hypot(c1, c2)
    if n == 0.0:
        return (1.0, 0.0)
    return (c1 / n, c2 / n)


def dark_state_weights(p: SystemParams, tol: float = RESONANCE_TOL) -> DarkStateWeights:
    """Coefficients of the three-photon and two-photon dark states."""
    from .params import derive

    d = derive(p)
    if d.epsilon_prime is None:
        three = None
    else:
        three = _normalized(d.epsilon_prime * p.g_cos, -p.omega_L / 2)
    two = _normalized(p.g_cos, -p.omega_L / 2)
    return DarkStateWeights(
        three_photon=three,
        three_photon_resonant=abs(d.delta_TP) <= tol * p.nu,
        two_photon=two,
        two_photon_resonant=abs(p.delta1 - p.delta_c2) <= tol * p.nu,
    )
