"""Physical parameters of the driven atom-cavity system and derived quantities.

All frequencies and rates are expressed in units of the trap frequency
(``nu``, normally left at 1.0). The cavity decay rate ``kappa`` is the field
(half-)linewidth: the cavity intensity linewidth is ``2 kappa``. The excited
state decays into |g1> and |g2> with rates ``gamma1`` and ``gamma2``; the
total radiative linewidth is ``gamma = gamma1 + gamma2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

from .errors import ParameterFileError

LD_THRESHOLD = 0.1
PUMP_THRESHOLD = 0.1


@dataclass(frozen=True)
class SystemParams:
    """Inputs of the model, in trap-frequency units.

    Attributes
    ----------
    gamma2, gamma1 : decay rates |e> -> |g2>, |e> -> |g1|.
    kappa : cavity field decay rate (half the intensity linewidth).
    g : vacuum Rabi frequency of the cavity-coupled transition.
    omega_L : Rabi frequency of the control laser on |g1> <-> |e>.
    omega_P : pump strength driving the cavity mode.
    delta1 : control-laser detuning from |g1> <-> |e>.
    delta_c2 : cavity detuning from |g2> <-> |e>.
    Delta : pump-cavity detuning.
    eta : Lamb-Dicke parameter.
    phi_L, phi_C : angles of laser / cavity axis to the motional axis.
    varphi : atom position phase in the cavity standing wave.
    W2 : angular factor of the spontaneous-emission recoil pattern.
    nu : trap frequency, the frequency unit (keep at 1.0).
    """

    gamma2: float
    kappa: float
    g: float
    omega_L: float
    omega_P: float
    delta1: float
    delta_c2: float
    Delta: float
    eta: float
    gamma1: float = 0.0
    phi_L: float = 0.0
    phi_C: float = 0.0
    varphi: float = 0.0
    W2: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        for name in ("gamma1", "kappa", "g", "omega_L", "omega_P", "eta", "W2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if not (math.isfinite(self.gamma2) and self.gamma2 > 0):
            raise ValueError(f"gamma2 must be positive, got {self.gamma2}")
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"nu must be positive, got {self.nu}")
        for name in ("delta1", "delta_c2", "Delta", "phi_L", "phi_C", "varphi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def gamma(self) -> float:
        """Total radiative linewidth of |e>."""
        return self.gamma1 + self.gamma2

    @property
    def g_cos(self) -> float:
        """Effective coupling g cos(varphi) at the trap center."""
        return self.g * math.cos(self.varphi)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        """Build from a flat key-value mapping; keys must be field names."""
        unknown = set(data) - set(cls.field_names())
        if unknown:
            raise ParameterFileError(
                f"unknown parameter key(s): {', '.join(sorted(unknown))}")
        try:
            values = {k: float(v) for k, v in data.items()}
        except (TypeError, ValueError) as exc:
            raise ParameterFileError(f"non-numeric parameter value: {exc}") from exc
        try:
            return cls(**values)
        except TypeError as exc:
            raise ParameterFileError(str(exc)) from exc
        except ValueError as exc:
            raise ParameterFileError(str(exc)) from exc


def load_params_file(path: str) -> SystemParams:
    """Load parameters from a flat JSON object.

    A document produced by the ``rates`` subcommand (with a ``"params"``
    sub-object) is accepted as well, so outputs round-trip as inputs.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterFileError(f"cannot read parameter file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParameterFileError(f"parameter file {path} must hold a JSON object")
    if "params" in data and isinstance(data["params"], dict):
        data = data["params"]
    return SystemParams.from_dict(data)


@dataclass(frozen=True)
class DerivedParams:
    """Dimensionless combinations used throughout the rate formulas.

    ``epsilon`` is the bare-cavity field amplitude driven by the pump;
    ``epsilon_prime`` is its dispersive (kappa-free) counterpart, undefined
    at Delta = 0. ``C`` is the single-atom cooperativity and ``C_plus`` /
    ``C_minus`` its sideband-filtered values. ``alpha`` is the natural scale
    of the cooling rate.
    """

    eta_L: float
    eta_C: float
    eta_tilde_sq: float
    epsilon: complex
    epsilon_prime: float | None
    C: float
    C_plus: float
    C_minus: float
    delta_TP: float
    Delta0: float
    delta_opt: float
    alpha: float


def derive(p: SystemParams) -> DerivedParams:
    """Compute every derived quantity from a parameter set."""
    eta_L = p.eta * math.cos(p.phi_L)
    eta_C = p.eta * math.cos(p.phi_C)
    cphi = math.cos(p.varphi)
    sphi = math.sin(p.varphi)
    eta_tilde_sq = eta_L**2 * cphi**2 + eta_C**2 * sphi**2
    epsilon = (p.omega_P / 2) / (p.Delta + 1j * p.kappa)
    epsilon_prime = None if p.Delta == 0 else p.omega_P / (2 * p.Delta)
    C = (p.g * cphi) ** 2 / (p.kappa * p.gamma / 2)
    C_plus = C * p.kappa**2 / (p.kappa**2 + (p.Delta - p.nu) ** 2)
    C_minus = C * p.kappa**2 / (p.kappa**2 + (p.Delta + p.nu) ** 2)
    Delta0 = p.delta1 - p.delta_c2
    # delta_TP written as Delta - Delta0 so that delta_TP == 0 is bit-exact
    # whenever Delta was set to Delta0.
    delta_TP = p.Delta - Delta0
    delta_opt = p.omega_L**2 / (4 * p.nu) + (p.g * cphi) ** 2 / (2 * p.nu) - p.nu
    alpha = p.eta**2 * p.omega_P**2 / p.nu
    return DerivedParams(
        eta_L=eta_L,
        eta_C=eta_C,
        eta_tilde_sq=eta_tilde_sq,
        epsilon=epsilon,
        epsilon_prime=epsilon_prime,
        C=C,
        C_plus=C_plus,
        C_minus=C_minus,
        delta_TP=delta_TP,
        Delta0=Delta0,
        delta_opt=delta_opt,
        alpha=alpha,
    )


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostic values for the two perturbative small parameters.

    Purely advisory: nothing is rejected, callers decide what to do with a
    failed flag.
    """

    ld_value: float
    ld_pass: bool
    pump_value: float
    pump_pass: bool
    ld_threshold: float
    pump_threshold: float
    warnings: tuple[str, ...]


def validate(
    p: SystemParams,
    m_expected: float,
    ld_threshold: float = LD_THRESHOLD,
    pump_threshold: float = PUMP_THRESHOLD,
) -> ValidationReport:
    """Check the Lamb-Dicke and weak-pump conditions at a given temperature.

    ``ld_value`` is ``eta * sqrt(2 <m> + 1)`` (wavepacket size over
    wavelength), ``pump_value`` the bare-cavity photon number ``|epsilon|^2``.
    """
    if m_expected < 0:
        raise ValueError("m_expected must be non-negative")
    ld_value = p.eta * math.sqrt(2 * m_expected + 1)
    pump_value = abs(derive(p).epsilon) ** 2
    warnings = []
    if p.Delta == 0:
        warnings.append("Delta = 0: dispersive amplitude epsilon_prime undefined")
    if p.eta >= 1.0:
        warnings.append("eta >= 1: outside any Lamb-Dicke expansion")
    return ValidationReport(
        ld_value=ld_value,
        ld_pass=ld_value <= ld_threshold,
        pump_value=pump_value,
        pump_pass=pump_value <= pump_threshold,
        ld_threshold=ld_threshold,
        pump_threshold=pump_threshold,
        warnings=tuple(warnings),
    )
