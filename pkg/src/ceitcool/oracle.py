"""Brute-force Lindblad oracle on the truncated atom-cavity-motion space.

The generator is assembled from the full rotating-frame Hamiltonian with the
position-dependent couplings expanded to first or second order in the
Lamb-Dicke parameters, plus jump channels for cavity decay (rate 2 kappa),
the recoilless |e> -> |g1> branch, and the |e> -> |g2> branch split into a
bare jump and a recoil jump sqrt(gamma2 W2) eta sigma (b + b^dag) that
reproduces the structure of the diffusion coefficient.

Hilbert space: internal (|g1>, |g2>, |e>) x photon Fock (0..n_max) x phonon
Fock (0..m_max). The generator is held as sparse factors and applied
matrix-wise; evolution uses an explicit adaptive integrator, which preserves
the trace (a linear invariant) to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.optimize import curve_fit

from .errors import DimensionError, FitError, IntegrationError
from .params import SystemParams, derive
from .rates import transition_rates

G1, G2, E = 0, 1, 2  # internal level indices

DEFAULT_MAX_DIM = 120


@dataclass(frozen=True)
class OracleConfig:
    """Truncation and sampling choices for one oracle run."""

    n_max: int
    m_max: int
    t_final: float
    sample_dt: float
    ld_order: int = 2
    max_dim: int = DEFAULT_MAX_DIM
    rtol: float = 1e-6
    atol: float = 1e-10

    def __post_init__(self):
        if self.n_max < 1:
            raise DimensionError("n_max must be at least 1")
        if self.m_max < 0:
            raise DimensionError("m_max must be non-negative")
        if self.ld_order not in (1, 2):
            raise DimensionError("ld_order must be 1 or 2")

    @property
    def dim(self) -> int:
        return 3 * (self.n_max + 1) * (self.m_max + 1)


def _destroy(n: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n)), 1, format="csr")


def _proj(i: int) -> sp.csr_matrix:
    m = sp.lil_matrix((3, 3))
    m[i, i] = 1.0
    return m.tocsr()


def _sigma(i: int, j: int) -> sp.csr_matrix:
    m = sp.lil_matrix((3, 3))
    m[i, j] = 1.0
    return m.tocsr()


def _kron3(a, b, c) -> sp.csr_matrix:
    return sp.kron(sp.kron(a, b, format="csr"), c, format="csr")


@dataclass
class Liouvillian:
    """Assembled generator: Hamiltonian, jump operators, observables."""

    params: SystemParams
    config: OracleConfig
    dim: int
    hamiltonian: sp.csr_matrix
    h_nonhermitian: sp.csr_matrix
    jumps: list
    m_diag: np.ndarray
    n_diag: np.ndarray
    e_diag: np.ndarray

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """d rho / dt for Hermitian rho (the subspace preserved by the flow)."""
        x = self.h_nonhermitian @ rho
        out = -1j * (x - x.conj().T)
        for lop, lop_conj in self.jumps:
            y = lop @ rho
            out += (lop_conj @ y.T).T
        return out

    def superoperator(self) -> sp.csr_matrix:
        """Sparse matrix acting on row-major vectorized density operators."""
        eye = sp.identity(self.dim, format="csr")
        s = -1j * (
            sp.kron(self.h_nonhermitian, eye, format="csr")
            - sp.kron(eye, self.h_nonhermitian.conj(), format="csr"))
        for lop, _ in self.jumps:
            s = s + sp.kron(lop, lop.conj(), format="csr")
        return s.tocsr()

    def trace_preservation_residual(self) -> float:
        """Max |vec(I)^T S|; zero for a trace-preserving generator."""
        s = self.superoperator()
        ident = np.eye(self.dim, dtype=complex).reshape(-1)
        return float(np.max(np.abs(ident @ s)))

    def initial_state(self, mbar: float) -> np.ndarray:
        """|g2><g2| x |0><0|_photon x thermal(mbar) phonons."""
        n_ph = self.config.n_max + 1
        n_m = self.config.m_max + 1
        if mbar == 0:
            pm = np.zeros(n_m)
            pm[0] = 1.0
        else:
            ratio = mbar / (1 + mbar)
            pm = ratio ** np.arange(n_m)
            pm /= pm.sum()
        rho_int = np.zeros((3, 3))
        rho_int[G2, G2] = 1.0
        rho_ph = np.zeros((n_ph, n_ph))
        rho_ph[0, 0] = 1.0
        rho = np.kron(np.kron(rho_int, rho_ph), np.diag(pm))
        return rho.astype(complex)

    def observables(self, rho: np.ndarray) -> tuple[float, float, float, float]:
        d = rho.diagonal().real
        return (
            float(d @ self.m_diag),
            float(d @ self.n_diag),
            float(d @ self.e_diag),
            float(d.sum()),
        )

    def reduced_internal(self, rho: np.ndarray) -> np.ndarray:
        """3x3 internal density matrix, photon and phonon degrees traced out."""
        per = self.dim // 3
        blocks = rho.reshape(3, per, 3, per)
        return np.trace(blocks, axis1=1, axis2=3)


def build_generator(p: SystemParams, cfg: OracleConfig) -> Liouvillian:
    """Assemble the Lindblad generator on the truncated space.

    Raises DimensionError when 3 (n_max+1) (m_max+1) exceeds cfg.max_dim or
    when the recoil split would need W2 eta^2 > 1.
    """
    if cfg.dim > cfg.max_dim:
        raise DimensionError(
            f"dim = {cfg.dim} exceeds configured maximum {cfg.max_dim}")
    if p.W2 * p.eta**2 > 1.0:
        raise DimensionError("W2 eta^2 > 1: recoil split undefined")

    d = derive(p)
    n_ph = cfg.n_max + 1
    n_m = cfg.m_max + 1
    eye_ph = sp.identity(n_ph, format="csr")
    eye_m = sp.identity(n_m, format="csr")
    eye3 = sp.identity(3, format="csr")

    a = _destroy(n_ph)
    b = _destroy(n_m)
    u = (b + b.T).tocsr()
    u2 = (u @ u).tocsr()
    num_ph = (a.T @ a).tocsr()
    num_m = (b.T @ b).tocsr()

    # exp(i eta_L u) and g cos(eta_C u + varphi), expanded to ld_order
    exp_l = eye_m + 1j * d.eta_L * u
    g_of_x = p.g * (math.cos(p.varphi) * eye_m - math.sin(p.varphi) * d.eta_C * u)
    if cfg.ld_order == 2:
        exp_l = exp_l - (d.eta_L**2 / 2) * u2
        g_of_x = g_of_x - p.g * math.cos(p.varphi) * (d.eta_C**2 / 2) * u2

    h = (
        p.nu * _kron3(eye3, eye_ph, num_m + 0.5 * eye_m)
        + _kron3(
            -p.delta_c2 * _proj(E)
            + (p.delta1 - p.delta_c2) * _proj(G1)
            + p.Delta * _proj(G2),
            eye_ph, eye_m)
        - p.Delta * _kron3(eye3, num_ph, eye_m)
        + (p.omega_P / 2) * _kron3(eye3, a + a.T, eye_m)
    )
    w_l = (p.omega_L / 2) * _kron3(_sigma(E, G1), eye_ph, exp_l)
    w_c = _kron3(_sigma(E, G2), a, g_of_x)
    h = (h + w_l + w_l.conj().T + w_c + w_c.conj().T).tocsr()

    jumps: list[sp.csr_matrix] = []
    jumps.append(math.sqrt(2 * p.kappa) * _kron3(eye3, a, eye_m))
    if p.gamma1 > 0:
        jumps.append(math.sqrt(p.gamma1) * _kron3(_sigma(G1, E), eye_ph, eye_m))
    bare = p.gamma2 * (1 - p.W2 * p.eta**2)
    jumps.append(math.sqrt(bare) * _kron3(_sigma(G2, E), eye_ph, eye_m))
    if p.eta > 0 and p.W2 > 0:
        jumps.append(
            math.sqrt(p.gamma2 * p.W2) * p.eta
            * _kron3(_sigma(G2, E), eye_ph, u))

    dissip = sum((l.conj().T @ l for l in jumps), sp.csr_matrix((cfg.dim, cfg.dim)))
    h_nh = (h - 0.5j * dissip).tocsr()

    m_diag = _kron3(eye3, eye_ph, num_m).diagonal().real
    n_diag = _kron3(eye3, num_ph, eye_m).diagonal().real
    e_diag = _kron3(_proj(E), eye_ph, eye_m).diagonal().real

    return Liouvillian(
        params=p,
        config=cfg,
        dim=cfg.dim,
        hamiltonian=h,
        h_nonhermitian=h_nh,
        jumps=[(l.tocsr(), l.conj().tocsr()) for l in jumps],
        m_diag=m_diag,
        n_diag=n_diag,
        e_diag=e_diag,
    )


@dataclass(frozen=True)
class OracleTrajectory:
    times: np.ndarray
    mean_m: np.ndarray
    mean_n: np.ndarray
    pop_e: np.ndarray
    trace: np.ndarray
    final_rho: np.ndarray


def evolve_master(
    liou: Liouvillian, rho0: np.ndarray, cfg: OracleConfig | None = None
) -> OracleTrajectory:
    """Integrate the master equation, sampling observables every sample_dt.

    rho0 must be Hermitian with unit trace. Raises IntegrationError if the
    integrator fails or the trace drifts beyond 1e-9.
    """
    cfg = cfg or liou.config
    dim = liou.dim
    if rho0.shape != (dim, dim):
        raise DimensionError(f"rho0 must be {dim} x {dim}")
    if abs(np.trace(rho0) - 1.0) > 1e-9 or np.max(np.abs(rho0 - rho0.conj().T)) > 1e-9:
        raise ValueError("rho0 must be Hermitian with unit trace")

    t_eval = np.arange(0.0, cfg.t_final + cfg.sample_dt / 2, cfg.sample_dt)

    def rhs(_t, y):
        return liou.rhs(y.reshape(dim, dim)).reshape(-1)

    sol = solve_ivp(
        rhs,
        (0.0, float(t_eval[-1])),
        rho0.astype(complex).reshape(-1),
        t_eval=t_eval,
        method="RK45",
        rtol=cfg.rtol,
        atol=cfg.atol,
    )
    if not sol.success:
        raise IntegrationError(f"master-equation integration failed: {sol.message}")

    n_samp = sol.t.size
    mean_m = np.empty(n_samp)
    mean_n = np.empty(n_samp)
    pop_e = np.empty(n_samp)
    trace = np.empty(n_samp)
    for k in range(n_samp):
        rho = sol.y[:, k].reshape(dim, dim)
        mean_m[k], mean_n[k], pop_e[k], trace[k] = liou.observables(rho)
    if np.max(np.abs(trace - 1.0)) > 1e-9:
        raise IntegrationError(
            f"trace drifted to {np.max(np.abs(trace - 1.0)):.2e} > 1e-9")
    return OracleTrajectory(
        times=sol.t,
        mean_m=mean_m,
        mean_n=mean_n,
        pop_e=pop_e,
        trace=trace,
        final_rho=sol.y[:, -1].reshape(dim, dim),
    )


def steady_state_direct(liou: Liouvillian) -> np.ndarray:
    """Null-space steady state via a dense least-squares solve.

    Intended for small truncations (dim <= 64); the long-time-evolution path
    stays the default for the large validation runs.
    """
    if liou.dim > 64:
        raise DimensionError(
            "direct null-space solve is limited to dim <= 64; evolve instead")
    s = liou.superoperator().toarray()
    ident = np.eye(liou.dim, dtype=complex).reshape(1, -1)
    lhs = np.vstack([s, ident])
    rhs_vec = np.zeros(lhs.shape[0], dtype=complex)
    rhs_vec[-1] = 1.0
    rho_vec, *_ = np.linalg.lstsq(lhs, rhs_vec, rcond=None)
    rho = rho_vec.reshape(liou.dim, liou.dim)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class CoolingFit:
    Gamma: float
    m_inf: float
    m0: float
    r_squared: float
    rms_residual: float


def extract_cooling_rate(
    traj: OracleTrajectory | tuple,
    t_skip: float = 0.0,
    resid_threshold: float = 0.05,
) -> CoolingFit:
    """Least-squares fit of mean_m(t) = m_inf + (m0 - m_inf) exp(-Gamma t).

    Samples with t < t_skip are excluded (internal-state transient). Raises
    FitError when the relative rms residual exceeds ``resid_threshold``.
    Accepts an OracleTrajectory or a plain (times, mean_m) pair.
    """
    if isinstance(traj, OracleTrajectory):
        t, y = traj.times, traj.mean_m
    else:
        t, y = traj
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
    keep = t >= t_skip
    t, y = t[keep], y[keep]
    if t.size < 4:
        raise FitError("too few samples to fit after t_skip")

    span = y[0] - y[-1]
    if abs(span) < 1e-12:
        raise FitError("trajectory is flat; nothing to fit")
    # crude 1/e crossing for the rate guess
    target = y[-1] + span / math.e
    below = np.flatnonzero((y - target) * np.sign(span) <= 0)
    g0 = 1.0 / t[below[0]] if below.size and t[below[0]] > 0 else 3.0 / t[-1]
    p0 = (g0, y[-1], y[0])

    def model(tt, gamma_fit, m_inf, m0):
        return m_inf + (m0 - m_inf) * np.exp(-gamma_fit * tt)

    try:
        popt, _ = curve_fit(model, t, y, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"exponential fit did not converge: {exc}") from exc
    resid = y - model(t, *popt)
    rms = float(np.sqrt(np.mean(resid**2)))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    if rms > resid_threshold * abs(span):
        raise FitError(
            f"fit residual {rms:.3e} exceeds {resid_threshold} x span {abs(span):.3e}")
    return CoolingFit(
        Gamma=float(popt[0]),
        m_inf=float(popt[1]),
        m0=float(popt[2]),
        r_squared=r2,
        rms_residual=rms,
    )


@dataclass(frozen=True)
class ValidationPoint:
    """One oracle-vs-perturbation comparison point."""

    name: str
    params: SystemParams
    config: OracleConfig
    mbar0: float
    t_skip: float


def validation_points() -> list[ValidationPoint]:
    """The stock comparison points: EIT regime, strong coupling, generic.

    All use eta = 0.05, |epsilon|^2 <= 0.01, gamma1 = 0 (the regime where the
    analytic rates are exact at first order), n_max = 2, m_max = 12.
    """
    pts = []

    # strong coupling: pump on the cavity blue sideband, delta1 = delta_opt
    p_sc = SystemParams(
        gamma2=4.0, kappa=0.1, g=8.0, omega_L=3.0, omega_P=0.201,
        delta1=9.25, delta_c2=8.25, Delta=1.0, eta=0.05,
        varphi=math.pi / 3)
    pts.append(ValidationPoint(
        name="strong_coupling",
        params=p_sc,
        config=OracleConfig(n_max=2, m_max=12, t_final=2800.0, sample_dt=7.0),
        mbar0=1.0,
        t_skip=56.0,
    ))

    # EIT regime: C_pm << 1 (atom near a node keeps the cooperativity low
    # while g stays large enough for a usable cooling rate)
    p_eit = SystemParams(
        gamma2=5.0, kappa=0.5, g=10.0, omega_L=4.0, omega_P=1.00499,
        delta1=2.2886697323704233, delta_c2=7.288669732370423,
        Delta=-5.0, eta=0.05, varphi=1.40)
    pts.append(ValidationPoint(
        name="eit",
        params=p_eit,
        config=OracleConfig(n_max=2, m_max=12, t_final=2500.0, sample_dt=6.25),
        mbar0=1.0,
        t_skip=50.0,
    ))

    # generic off-resonance point: delta_TP != 0, recoil diffusion active
    # (D is about 40% of A_plus here)
    p_gen = SystemParams(
        gamma2=5.0, kappa=1.0, g=6.0, omega_L=5.0, omega_P=1.06888,
        delta1=2.0, delta_c2=8.0, Delta=-5.25, eta=0.05,
        varphi=math.pi / 3)
    pts.append(ValidationPoint(
        name="generic",
        params=p_gen,
        config=OracleConfig(n_max=2, m_max=12, t_final=6200.0, sample_dt=15.5),
        mbar0=1.0,
        t_skip=124.0,
    ))
    return pts


def run_point(point: ValidationPoint) -> dict:
    """Evolve one validation point and compare with the perturbative rates."""
    r = transition_rates(point.params)
    liou = build_generator(point.params, point.config)
    traj = evolve_master(liou, liou.initial_state(point.mbar0))
    fit = extract_cooling_rate(traj, t_skip=point.t_skip)
    gamma_rel = abs(fit.Gamma - r.Gamma) / abs(r.Gamma)
    m_st = r.m_st if r.m_st is not None else float("nan")
    m_err = abs(fit.m_inf - m_st)
    ok = gamma_rel <= 0.15 and m_err <= max(0.15 * m_st, 0.05)
    return {
        "point": point.name,
        "Gamma_pert": r.Gamma,
        "Gamma_fit": fit.Gamma,
        "m_st_pert": m_st,
        "m_inf_fit": fit.m_inf,
        "gamma_rel_err": gamma_rel,
        "m_abs_err": m_err,
        "r_squared": fit.r_squared,
        "pass": bool(ok),
    }


def check_convergence(point: ValidationPoint, gamma_fit: float) -> dict:
    """Re-fit on a reduced truncation; flag green when Gamma moves < 2%.

    The reduced run uses (n_max - 1, m_max - 4): agreement between the two
    truncations certifies that the stated one is converged at the point.
    """
    cfg = point.config
    reduced = replace(cfg, n_max=cfg.n_max - 1, m_max=cfg.m_max - 4)
    liou = build_generator(point.params, reduced)
    traj = evolve_master(liou, liou.initial_state(point.mbar0))
    fit = extract_cooling_rate(traj, t_skip=point.t_skip)
    shift = abs(fit.Gamma - gamma_fit) / abs(gamma_fit)
    return {"Gamma_fit_reduced": fit.Gamma, "truncation_shift": shift,
            "converged": bool(shift < 0.02)}


def run_validation(
    points: list[ValidationPoint] | None = None,
    convergence: bool = True,
) -> list[dict]:
    """Run all validation points; returns one report dict per point."""
    reports = []
    for point in points if points is not None else validation_points():
        rep = run_point(point)
        if convergence:
            rep.update(check_convergence(point, rep["Gamma_fit"]))
            rep["pass"] = bool(rep["pass"] and rep["converged"])
        reports.append(rep)
    return reports
