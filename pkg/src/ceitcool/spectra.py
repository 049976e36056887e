"""Excitation spectra of atom and cavity under weak cavity pumping.

The response functions F_gamma / F_kappa are the Fano-like factors whose
squared moduli give the rates of photon emission through the atomic and the
cavity channel. Spectra are returned as absolute rates (units of nu): the
weak-pump prefactor (omega_P/2)^2 and the emission rate of the channel
(gamma2, respectively 2 kappa) are included.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import optimize

from .params import SystemParams, derive
from .resolvent import char_poly, three_photon_detuning


def response_gamma(p: SystemParams, Delta):
    """Atomic response F_gamma(Delta) = g (delta_c2 + Delta - delta1) / f(Delta).

    Vanishes identically at the three-photon resonance Delta = delta1 - delta_c2.
    Accepts scalars or arrays.
    """
    return p.g * three_photon_detuning(p, Delta) / char_poly(p, Delta)


def response_kappa(p: SystemParams, Delta):
    """Cavity response F_kappa(Delta).

    The numerator carries gamma2 (the |e> -> |g2> branch), not the total
    linewidth; f(Delta) carries the total gamma. The two coincide for
    gamma1 = 0, the regime of the analytic rate theory.
    """
    num = three_photon_detuning(p, Delta) * (
        p.delta_c2 + Delta + 0.5j * p.gamma2
    ) - p.omega_L**2 / 4
    return num / char_poly(p, Delta)


def excitation_spectrum(p: SystemParams, deltas, channel: str = "cavity"):
    """Pointwise excitation spectrum over a grid of pump detunings.

    channel="atom": (omega_P/2)^2 gamma2 |F_gamma|^2 (photons scattered by
    the atom); channel="cavity": (omega_P/2)^2 2 kappa |F_kappa|^2 (photons
    leaking through the mirrors).
    """
    deltas = np.asarray(deltas, dtype=float)
    drive = (p.omega_P / 2) ** 2
    if channel == "atom":
        return drive * p.gamma2 * np.abs(response_gamma(p, deltas)) ** 2
    if channel == "cavity":
        return drive * 2 * p.kappa * np.abs(response_kappa(p, deltas)) ** 2
    raise ValueError(f"unknown channel {channel!r}; use 'atom' or 'cavity'")


class DarkFeature(NamedTuple):
    delta: float
    channel: str
    depth: float


def locate_dark_features(
    p: SystemParams,
    delta_range: tuple[float, float],
    points: int = 2001,
    xtol: float = 1e-6,
) -> list[DarkFeature]:
    """Local minima of both excitation spectra inside ``delta_range``.

    Grid minima are refined by golden-section search to ``xtol`` (units of
    nu). The exact atom-channel zero at Delta0 = delta1 - delta_c2 is always
    reported when it lies in range.
    """
    lo, hi = delta_range
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise ValueError("delta_range must be a finite increasing pair")
    grid = np.linspace(lo, hi, points)
    features: list[DarkFeature] = []
    delta0 = derive(p).Delta0
    for channel in ("cavity", "atom"):
        s = excitation_spectrum(p, grid, channel)
        interior = np.flatnonzero((s[1:-1] < s[:-2]) & (s[1:-1] <= s[2:])) + 1
        for i in interior:
            func = lambda x: float(excitation_spectrum(p, np.array([x]), channel)[0])
            xmin = optimize.golden(
                func, brack=(grid[i - 1], grid[i], grid[i + 1]), tol=xtol)
            if channel == "atom" and abs(xmin - delta0) < max(10 * xtol, 1e-4):
                # refined copy of the exact three-photon zero; added below
                continue
            features.append(DarkFeature(float(xmin), channel, func(float(xmin))))
    if lo <= delta0 <= hi:
        features.append(
            DarkFeature(float(delta0), "atom",
                        float(excitation_spectrum(p, np.array([delta0]), "atom")[0])))
    features.sort(key=lambda f: (f.delta, f.channel))
    return features
