"""Phonon-ladder rate equation: populations, time evolution, mean trajectory."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import solve_ivp

from .errors import HeatingWarning, IntegrationError, TruncationError

if TYPE_CHECKING:  # avoid a circular import; only the attributes are used
    from .rates import RateSet

log = logging.getLogger(__name__)

DEFAULT_M_MAX = 60
DEFAULT_TAIL_CAP = 1e-8


@dataclass(frozen=True)
class PhononDistribution:
    """Occupations p_0 .. p_{m_max} of the vibrational ladder."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("p must be a non-empty 1-D array")
        if np.any(arr < -1e-12):
            raise ValueError("occupations must be non-negative")

    @property
    def m_max(self) -> int:
        return self.p.size - 1

    @property
    def total(self) -> float:
        return float(self.p.sum())

    def mean(self) -> float:
        return float(np.arange(self.p.size) @ self.p)

    @classmethod
    def thermal(cls, mbar: float, m_max: int = DEFAULT_M_MAX) -> "PhononDistribution":
        """Truncated geometric (thermal) distribution with mean mbar."""
        if mbar < 0:
            raise ValueError("mbar must be non-negative")
        if mbar == 0:
            return cls.fock(0, m_max)
        ratio = mbar / (1 + mbar)
        pm = ratio ** np.arange(m_max + 1)
        return cls(p=pm / pm.sum())

    @classmethod
    def fock(cls, m0: int, m_max: int = DEFAULT_M_MAX) -> "PhononDistribution":
        if not 0 <= m0 <= m_max:
            raise ValueError("m0 must lie on the ladder")
        pm = np.zeros(m_max + 1)
        pm[m0] = 1.0
        return cls(p=pm)


def generator_matrix(a_plus: float, a_minus: float, m_max: int) -> np.ndarray:
    """Tridiagonal rate-equation generator with a reflecting top level.

    The A_plus flux out of m_max is dropped, which keeps the column sums at
    zero (probability is conserved exactly).
    """
    m = np.arange(m_max + 1)
    gen = np.zeros((m_max + 1, m_max + 1))
    diag = -((m + 1) * a_plus + m * a_minus)
    diag[m_max] = -m_max * a_minus
    gen[m, m] = diag
    gen[m[1:], m[1:] - 1] = m[1:] * a_plus          # gain from below
    gen[m[:-1], m[:-1] + 1] = (m[:-1] + 1) * a_minus  # gain from above
    return gen


@dataclass(frozen=True)
class RateTrajectory:
    times: np.ndarray
    populations: np.ndarray  # shape (len(times), m_max + 1)
    mean_m: np.ndarray


def evolve(
    r: "RateSet",
    p0: PhononDistribution,
    times,
    tail_cap: float = DEFAULT_TAIL_CAP,
    rtol: float = 1e-10,
    atol: float = 1e-13,
) -> RateTrajectory:
    """Integrate the phonon rate equation from p0 over the given time grid.

    Raises TruncationError if the top-level occupation exceeds ``tail_cap``
    at any sample (raise m_max in that case).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-decreasing 1-D grid")
    gen = generator_matrix(r.A_plus, r.A_minus, p0.m_max)
    t0 = min(0.0, times[0])
    sol = solve_ivp(
        lambda _t, y: gen @ y,
        (t0, times[-1] if times[-1] > t0 else t0 + 1e-12),
        p0.p,
        t_eval=times,
        method="RK45",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationError(f"rate-equation integration failed: {sol.message}")
    pops = sol.y.T
    top = pops[:, -1]
    if np.any(top > tail_cap):
        raise TruncationError(
            f"top-level occupation reached {top.max():.3e} > cap {tail_cap:.1e}; "
            "raise m_max")
    dropped_flux = (p0.m_max + 1) * r.A_plus * top[-1]
    log.debug(
        "reflecting boundary at m_max=%d: final top occupation %.3e, "
        "dropped A_plus flux %.3e", p0.m_max, top[-1], dropped_flux)
    mean_m = pops @ np.arange(p0.m_max + 1)
    return RateTrajectory(times=times, populations=pops, mean_m=mean_m)


def mean_m_closed_form(r: "RateSet", m0: float, t):
    """Closed-form mean phonon number m(t) of d<m>/dt = -Gamma <m> + A_plus.

    For Gamma <= 0 the trajectory grows without bound (net heating); it is
    still returned, with a HeatingWarning.
    """
    t = np.asarray(t, dtype=float)
    if r.Gamma == 0:
        out = m0 + r.A_plus * t
    else:
        if r.Gamma < 0:
            warnings.warn(
                f"Gamma = {r.Gamma} < 0: mean phonon number grows exponentially",
                HeatingWarning, stacklevel=2)
        m_inf = r.A_plus / r.Gamma
        out = m_inf + (m0 - m_inf) * np.exp(-r.Gamma * t)
    return float(out) if out.ndim == 0 else out
