"""First-order Lamb-Dicke scattering amplitudes and heating/cooling rates.

Conventions: the sign ``s = +1`` labels processes that raise the vibrational
quantum number by one (heating, rate ``A_plus``), ``s = -1`` those that lower
it (cooling, ``A_minus``). Amplitudes carry the pump factor omega_P/2, so the
assembled rates already scale as |epsilon|^2 eta^2.

The analytic amplitudes follow the gamma1 = 0 derivation: the total linewidth
``gamma`` enters every propagator through f(zeta), while only the gamma2
branch appears at the emission vertex. For gamma1 > 0 the returned RateSet
carries a warning and its accuracy is quantified only by the master-equation
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .dynamics import PhononDistribution
from .errors import HeatingError, NoRootError, PoleError, PreconditionError
from .params import SystemParams, derive
from .resolvent import char_poly, manifold_matrix
from .spectra import response_gamma, response_kappa

# Relative pole guard for the perturbative amplitudes: |f| below this fraction
# of its Hadamard bound counts as resonant.
F_GUARD = 1e-6

# Three-photon resonance tolerance (units of nu) for the closed forms.
TPR_TOL = 1e-9


def _f_guarded(p: SystemParams, zeta: complex, label: str) -> complex:
    """f(zeta) with a relative magnitude guard against dressed-state poles."""
    f = char_poly(p, zeta)
    m = manifold_matrix(p)
    shifted = zeta * np.eye(3) - m
    scale = float(np.prod(np.linalg.norm(shifted, axis=1)))
    if abs(f) < F_GUARD * scale:
        raise PoleError(
            f"{label} is resonant: |f({zeta})| = {abs(f):.3e} "
            f"< {F_GUARD:.0e} x {scale:.3e}",
            factor=label,
        )
    return f


@dataclass(frozen=True)
class AmplitudeSet:
    """Tilded first-order transition amplitudes at one sideband sign."""

    sign: int
    T_D: complex
    T_L_gamma: complex
    T_L_kappa: complex
    T_C_gamma: complex
    T_C_kappa: complex


def _amplitude_set(p: SystemParams, s: int, nu: float) -> AmplitudeSet:
    # nu is passed explicitly so sideband metamorphic checks can flip it.
    if s not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    d = derive(p)
    shifted = p.Delta - s * nu
    f0 = _f_guarded(p, p.Delta, "f(Delta)")
    fs = _f_guarded(p, shifted, "f(Delta -+ nu)")
    cphi = math.cos(p.varphi)
    sphi = math.sin(p.varphi)
    gc = p.g_cos
    drive = p.omega_P / 2
    fg0 = response_gamma(p, p.Delta)
    fk0 = response_kappa(p, p.Delta)
    fgs = response_gamma(p, shifted)
    fks = response_kappa(p, shifted)
    ck_s = 1j * p.kappa + shifted

    T_D = -1j * p.eta * drive * cphi * fg0
    laser = -1j * s * d.eta_L * drive * (p.omega_L**2 / 4) * nu / (fs * f0)
    T_L_gamma = laser * ck_s * gc
    T_L_kappa = laser * gc**2
    T_C_gamma = -d.eta_C * drive * sphi * fgs * (p.g * cphi**2 * fg0 + ck_s * fk0)
    T_C_kappa = -d.eta_C * drive * (math.sin(2 * p.varphi) / 2) * p.g * (
        fgs * fk0 + fg0 * fks
    )
    return AmplitudeSet(
        sign=s,
        T_D=complex(T_D),
        T_L_gamma=complex(T_L_gamma),
        T_L_kappa=complex(T_L_kappa),
        T_C_gamma=complex(T_C_gamma),
        T_C_kappa=complex(T_C_kappa),
    )


def amplitudes(p: SystemParams, s: int) -> AmplitudeSet:
    """First-order amplitudes for raising (s=+1) or lowering (s=-1) a phonon.

    Raises PoleError when f(Delta) or f(Delta -+ nu) is resonant; the message
    names the offending factor.
    """
    return _amplitude_set(p, s, p.nu)


def diffusion(p: SystemParams) -> float:
    """Recoil diffusion rate gamma2 W2 |T_D|^2.

    Vanishes at a node of the cavity mode (cos varphi = 0) and at the
    three-photon resonance Delta = delta1 - delta_c2, where the excited state
    is dark. Equals gamma W2 |T_D|^2 in the gamma1 = 0 regime of the analytic
    theory.
    """
    amp = amplitudes(p, +1)
    return p.gamma2 * p.W2 * abs(amp.T_D) ** 2


@dataclass(frozen=True)
class RateSet:
    """Assembled per-quantum transition rates, units of nu."""

    D: float
    A_plus: float
    A_minus: float
    Gamma: float
    m_st: float | None
    warnings: tuple[str, ...] = ()


def _assemble(p: SystemParams, amp: AmplitudeSet) -> float:
    d_rate = p.gamma2 * p.W2 * abs(amp.T_D) ** 2
    gamma_channel = p.gamma2 * abs(amp.T_L_gamma + amp.T_C_gamma) ** 2
    kappa_channel = 2 * p.kappa * abs(amp.T_L_kappa + amp.T_C_kappa) ** 2
    return d_rate + gamma_channel + kappa_channel


def transition_rates(p: SystemParams) -> RateSet:
    """Heating and cooling rates A_plus / A_minus with coherent channel sums.

    The laser and cavity amplitudes interfere inside |T_L + T_C|^2 for each
    emission channel. m_st is None whenever Gamma <= 0 (net heating).
    """
    warns: list[str] = []
    if p.gamma1 > 0:
        warns.append(
            "gamma1 > 0: amplitudes keep total gamma in propagators but only "
            "the gamma2 emission branch; accuracy quantified by the oracle")
    a_plus = _assemble(p, amplitudes(p, +1))
    a_minus = _assemble(p, amplitudes(p, -1))
    gamma_cool = a_minus - a_plus
    m_st = a_plus / gamma_cool if gamma_cool > 0 else None
    return RateSet(
        D=diffusion(p),
        A_plus=a_plus,
        A_minus=a_minus,
        Gamma=gamma_cool,
        m_st=m_st,
        warnings=tuple(warns),
    )


def _require_tpr(p: SystemParams, where: str):
    d = derive(p)
    if abs(d.delta_TP) > TPR_TOL * p.nu:
        raise PreconditionError(
            f"{where} requires three-photon resonance; delta_TP = {d.delta_TP}")


def closed_form_tpr(p: SystemParams) -> tuple[float, float]:
    """(A_plus, A_minus) in closed form on the three-photon resonance.

    A_pm = |eps|^2 etatilde^2 g^2 gamma (1 + C_pm) /
           { gamma^2/4 (1 + C_pm)^2
             + [omega_L^2/(4 nu) - nu +- delta1
                + gamma/(2 kappa) C_pm (nu -+ Delta)]^2 }

    gamma is the total radiative linewidth; the expression is exact for the
    assembled first-order rates with gamma1 = 0 (the dual-path identity in
    the tests pins this).
    """
    _require_tpr(p, "closed_form_tpr")
    d = derive(p)
    eps2 = abs(d.epsilon) ** 2
    base = eps2 * d.eta_tilde_sq * p.g**2 * p.gamma
    out = []
    for s, c_s in ((+1, d.C_plus), (-1, d.C_minus)):
        bracket = (
            p.omega_L**2 / (4 * p.nu)
            - p.nu
            + s * p.delta1
            + (p.gamma / (2 * p.kappa)) * c_s * (p.nu - s * p.Delta)
        )
        out.append(base * (1 + c_s) / ((p.gamma**2 / 4) * (1 + c_s) ** 2 + bracket**2))
    return out[0], out[1]


def closed_form_limits(p: SystemParams, regime: str) -> tuple[float, float]:
    """(A_plus, A_minus) in the printed asymptotic regimes.

    regime="eit": C_pm -> 0 limit; bare EIT-cooling rate structure.
    regime="eit_modified": kappa << |Delta -+ nu| limit; EIT with the Rabi
        frequency shifted by the dispersive cavity coupling.
    regime="resonant_drive": Delta = 0, arbitrary cooperativity. Written with
        the effective linewidth gamma (1 + C_0) so that it coincides exactly
        with the three-photon closed form at Delta = 0; the cavity-induced
        shift term keeps gamma C_0, which is the printed modified linewidth
        (the two agree for C_0 >> 1, the regime of interest).
    regime="strong_coupling": Delta = nu, C >> 1, kappa << nu; pump on the
        cavity blue sideband, cooling via the red sideband of the narrow
        dressed state at delta1 = delta_opt.
    """
    _require_tpr(p, f"closed_form_limits({regime!r})")
    d = derive(p)
    eps2 = abs(d.epsilon) ** 2
    pref = eps2 * d.eta_tilde_sq
    nu = p.nu
    gcs = p.g_cos**2

    if regime == "eit":
        out = []
        for s in (+1, -1):
            bracket = p.omega_L**2 / 4 - nu * (nu - s * p.delta1)
            out.append(
                pref * p.gamma * p.g**2 * nu**2
                / (nu**2 * p.gamma**2 / 4 + bracket**2))
        return out[0], out[1]

    if regime == "eit_modified":
        out = []
        for s in (+1, -1):
            if abs(nu - s * p.Delta) <= TPR_TOL * nu:
                raise PreconditionError(
                    "eit_modified is singular at Delta = +-nu")
            bracket = (
                p.omega_L**2 / 4
                + nu * gcs / (nu - s * p.Delta)
                - nu * (nu - s * p.delta1)
            )
            out.append(
                pref * p.gamma * p.g**2 * nu**2
                / (nu**2 * p.gamma**2 / 4 + bracket**2))
        return out[0], out[1]

    if regime == "resonant_drive":
        if abs(p.Delta) > TPR_TOL * nu:
            raise PreconditionError("resonant_drive requires Delta = 0")
        c0 = d.C * p.kappa**2 / (p.kappa**2 + nu**2)
        gamma_eff = p.gamma * (1 + c0)
        shift = nu * (p.gamma * c0) / (2 * p.kappa)
        out = []
        for s in (+1, -1):
            bracket = p.omega_L**2 / (4 * nu) - nu + s * p.delta1 + shift
            out.append(
                pref * p.g**2 * gamma_eff
                / (gamma_eff**2 / 4 + bracket**2))
        return out[0], out[1]

    if regime == "strong_coupling":
        if abs(p.Delta - nu) > TPR_TOL * nu:
            raise PreconditionError("strong_coupling requires Delta = nu")
        if d.C == 0:
            raise PreconditionError("strong_coupling requires g cos(varphi) != 0")
        a_plus = pref * (4 * p.g**2) / (d.C * p.gamma)
        cm = d.C_minus
        a_minus = (
            pref * p.g**2 * p.gamma * (1 + cm)
            / ((p.gamma**2 / 4) * (1 + cm) ** 2 + (p.delta1 - d.delta_opt) ** 2))
        return a_plus, a_minus

    raise ValueError(
        f"unknown regime {regime!r}; use eit, eit_modified, resonant_drive "
        "or strong_coupling")


def cavity_dominated_rates(p: SystemParams) -> tuple[float, float]:
    """(A_plus, A_minus) keeping only the cavity mechanical channel.

    A_C,pm = gamma2 |T_C^gamma|^2 + 2 kappa |T_C^kappa|^2. Around the
    three-photon resonance these rates show the alternating cooling/heating
    oscillations of the double dark resonance.
    """
    out = []
    for s in (+1, -1):
        amp = amplitudes(p, s)
        out.append(
            p.gamma2 * abs(amp.T_C_gamma) ** 2
            + 2 * p.kappa * abs(amp.T_C_kappa) ** 2)
    return out[0], out[1]


@dataclass(frozen=True)
class SteadyState:
    distribution: PhononDistribution
    m_st: float
    tail_mass: float


def steady_state(r: RateSet, m_max: int) -> SteadyState:
    """Geometric steady state of the rate equation, truncated at m_max.

    The truncated distribution is renormalized (detailed balance ratios are
    unaffected); the discarded tail mass is reported. m_st is the closed-form
    mean of the untruncated distribution.

    Raises HeatingError when Gamma <= 0.
    """
    if r.Gamma <= 0:
        raise HeatingError(f"no steady state: Gamma = {r.Gamma} <= 0")
    ratio = r.A_plus / r.A_minus
    m = np.arange(m_max + 1)
    pm = (1 - ratio) * ratio**m
    tail = ratio ** (m_max + 1)
    return SteadyState(
        distribution=PhononDistribution(p=pm / pm.sum()),
        m_st=r.A_plus / r.Gamma,
        tail_mass=float(tail),
    )


def optimal_detunings(
    p: SystemParams,
    mode: str,
    delta_range: tuple[float, float] | None = None,
    points: int = 4097,
    xtol: float = 1e-10,
):
    """Resonance-condition solvers.

    mode="tpr_max_cooling": the control detuning maximizing A_minus on the
    three-photon-resonance manifold at the pump detuning p.Delta,

        delta1 = omega_L^2/(4 nu) - nu
                 + (nu + Delta) g^2 cos^2 varphi / (kappa^2 + (Delta + nu)^2).

    mode="sideband_real_root": all real Delta in ``delta_range`` solving
    Re f(Delta + nu) = 0 (cooling enhanced over heating), found by bracketing
    on a scan grid and bisection. Raises NoRootError when no sign change is
    found in range.
    """
    if mode == "tpr_max_cooling":
        return (
            p.omega_L**2 / (4 * p.nu)
            - p.nu
            + (p.nu + p.Delta) * p.g_cos**2
            / (p.kappa**2 + (p.Delta + p.nu) ** 2))

    if mode == "sideband_real_root":
        if delta_range is None:
            raise ValueError("sideband_real_root requires delta_range")
        lo, hi = delta_range
        grid = np.linspace(lo, hi, points)
        vals = np.real(char_poly(p, grid + p.nu))
        roots = []
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
            func = lambda x: float(np.real(char_poly(p, x + p.nu)))
            roots.append(float(optimize.brentq(func, grid[i], grid[i + 1], xtol=xtol)))
        exact = grid[vals == 0.0]
        roots.extend(float(x) for x in exact)
        if not roots:
            raise NoRootError(
                f"Re f(Delta + nu) has no zero in [{lo}, {hi}]")
        return sorted(roots)

    raise ValueError(
        f"unknown mode {mode!r}; use tpr_max_cooling or sideband_real_root")
