"""Closed-form propagation of the diagonal (Omega-independent) part.

The block-diagonal generator -i w0 K0 + L exponentiates exactly through an
su(1,1) disentangling:

    e^{t(-i w0 K0 + L)} =
        e^{(mu-nu)t/2} e^{G K+} e^{-i w0 t K0 - 2 log(F) K3} e^{E K-}

with scalar functions E(t), F(t), G(t) of the rates alone.  K+ and K- are
nilpotent at finite cutoff, so the outer factors are finite polynomial sums
and the middle factor is diagonal: no matrix exponential is needed.

E, F, G are evaluated in a tanh/log1p form that stays finite for large t
(the cosh/sinh forms overflow near (mu-nu)t ~ 1400):

    x = (mu-nu)t/2,  r = (mu+nu)/(mu-nu),  th = tanh(x)
    E = (2 mu/(mu-nu)) th / (1 + r th)
    G = (2 nu/(mu-nu)) th / (1 + r th)
    log F = x + log1p(e^{-2x}) - log 2 + log1p(r th)

These satisfy F (1 - G) = e^{(mu-nu)t/2} identically, E(0)=G(0)=0, F(0)=1,
and G increases monotonically to nu/mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, ParamError
from .fock import annihilation, coherent_state, creation, number
from .params import ModelParams
from .superop import k_generators


@dataclass(frozen=True)
class EFG:
    """The scalar functions E, F, G at a fixed time.

    F is also carried as log_F so callers can stay in log space when
    (mu-nu)t is large enough for F to overflow.
    """

    t: float
    E: float
    G: float
    log_F: float

    @property
    def F(self) -> float:
        return math.exp(self.log_F)


def efg(t: float, p: ModelParams) -> EFG:
    """Evaluate E, F, G at time t >= 0."""
    if not (t >= 0):
        raise DomainError(f"t must be >= 0, got {t}")
    delta = p.mu - p.nu
    x = delta * t / 2
    r = (p.mu + p.nu) / delta
    th = math.tanh(x)
    den = 1.0 + r * th
    E = (2 * p.mu / delta) * th / den
    G = (2 * p.nu / delta) * th / den
    # log F = log(cosh x + r sinh x) rewritten to avoid overflow
    log_F = x + math.log1p(math.exp(-2 * x)) - math.log(2) + math.log1p(r * th)
    return EFG(t=t, E=E, G=G, log_F=log_F)


def _ladder_exp(K: np.ndarray, c: float, dim: int) -> np.ndarray:
    """e^{c K} for a ladder superoperator with K^dim = 0: finite sum."""
    q = dim * dim
    out = np.eye(q, dtype=complex)
    term = np.eye(q, dtype=complex)
    for n in range(1, dim):
        term = term @ K * (c / n)
        out = out + term
    return out


def diagonal_block_propagator(t: float, p: ModelParams, phase: float = 0.0) -> np.ndarray:
    """e^{i phase t} e^{t(-i w0 K0 + L)} as a dense dim^2 x dim^2 matrix.

    phase is 0 for the two diagonal blocks of the stacked state and -w0/+w0
    for the (01)/(10) blocks.  Product of the three disentangled factors;
    the scalar prefactor e^{(mu-nu)t/2} and the phase are folded into the
    diagonal middle factor.
    """
    if not (t >= 0):
        raise DomainError(f"t must be >= 0, got {t}")
    d = p.dim
    g = efg(t, p)
    Kp, Km, _, _ = k_generators(d)
    x = (p.mu - p.nu) * t / 2
    m_idx, n_idx = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    mid = np.exp(
        1j * phase * t
        + x
        - 1j * p.omega0 * t * (m_idx - n_idx).ravel()
        - g.log_F * (m_idx + n_idx + 1).ravel()
    )
    return _ladder_exp(Kp, g.G, d) @ (mid[:, None] * _ladder_exp(Km, g.E, d))


def tau_series(tau0: np.ndarray, t: float, p: ModelParams,
               max_n: int | None = None, max_m: int | None = None) -> np.ndarray:
    """Double-series form of the diagonal flow applied to tau0:

        (e^{(mu-nu)t/2}/F) sum_n (G^n/n!) (a+)^n {
            e^{(-i w0 t - log F) N} [sum_m (E^m/m!) a^m tau0 (a+)^m]
            e^{(+i w0 t - log F) N} } a^n

    Terms with n or m >= dim vanish identically (a^dim = 0), so the sums
    run to dim-1 by default; larger max_n/max_m are accepted and harmless.
    """
    if not (t >= 0):
        raise DomainError(f"t must be >= 0, got {t}")
    tau0 = np.asarray(tau0, dtype=complex)
    d = p.dim
    if tau0.shape != (d, d):
        raise DomainError(f"tau0 must be {d}x{d} for dim={d}, got {tau0.shape}")
    n_top = d - 1 if max_n is None else min(max_n, d - 1)
    m_top = d - 1 if max_m is None else min(max_m, d - 1)

    g = efg(t, p)
    a = annihilation(d)
    ad = creation(d)

    inner = tau0.copy()
    term = tau0.copy()
    for m in range(1, m_top + 1):
        term = (g.E / m) * (a @ term @ ad)
        inner = inner + term

    n_idx = np.arange(d)
    left = np.exp((-1j * p.omega0 * t - g.log_F) * n_idx)
    right = np.exp((+1j * p.omega0 * t - g.log_F) * n_idx)
    mid = (left[:, None] * inner) * right[None, :]

    out = mid.copy()
    term = mid.copy()
    for n in range(1, n_top + 1):
        term = (g.G / n) * (ad @ term @ a)
        out = out + term

    x = (p.mu - p.nu) * t / 2
    return math.exp(x - g.log_F) * out


def vacuum_solution(t: float, p: ModelParams) -> np.ndarray:
    """Diagonal flow of |0><0|: (e^{(mu-nu)t/2}/F) diag(G^n).

    At t=0 (G=0) this is the projector onto n=0, the G -> 0+ limit.
    """
    if not (t >= 0):
        raise DomainError(f"t must be >= 0, got {t}")
    g = efg(t, p)
    x = (p.mu - p.nu) * t / 2
    n = np.arange(p.dim)
    return np.diag(math.exp(x - g.log_F) * np.power(g.G, n)).astype(complex)


def coherent_solution(alpha: complex, t: float, p: ModelParams) -> np.ndarray:
    """Diagonal flow of |alpha><alpha|:

        (1-G) e^{|alpha|^2 e^{-(mu-nu)t} log G}
            exp(-log G {beta a+ + conj(beta) a - N}),
        beta = alpha e^{-((mu-nu)/2 + i w0) t}.

    The formula degenerates at t=0 or nu=0 (log G -> -inf): both are
    rejected; use the initial state itself or tau_series there.
    """
    if not (t > 0):
        raise DomainError(f"coherent_solution requires t > 0, got {t} "
                          "(log G diverges at t=0)")
    if p.nu == 0:
        raise DomainError("coherent_solution requires nu > 0 (log G diverges); "
                          "use tau_series for pure damping")
    # same cutoff adequacy requirement as building |alpha> itself
    coherent_state(alpha, p.dim)

    g = efg(t, p)
    log_G = math.log(g.G)
    beta = alpha * np.exp(-((p.mu - p.nu) / 2 + 1j * p.omega0) * t)
    braces = (beta * creation(p.dim)
              + np.conj(beta) * annihilation(p.dim)
              - number(p.dim))
    prefactor = (1 - g.G) * math.exp(abs(alpha) ** 2 * math.exp(-(p.mu - p.nu) * t) * log_G)
    return prefactor * expm(-log_G * braces)


# ---------------------------------------------------------------------------
# classical damped oscillator (cross-check for the first-moment dynamics)


@dataclass(frozen=True)
class ClassicalTrajectory:
    """x'' + gamma x' + omega^2 x = 0 with omega > gamma/2 (underdamped)."""

    gamma: float
    omega: float
    alpha: complex
    x0: float

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ParamError(f"gamma must be > 0, got {self.gamma}")
        if not (self.omega > self.gamma / 2):
            raise ParamError(
                f"underdamped case requires omega > gamma/2 "
                f"(omega={self.omega}, gamma={self.gamma})")


def classical_trajectory(tr: ClassicalTrajectory, t: float, approx: bool = False) -> float:
    """x(t) = {alpha e^{-(gamma/2 + i wt~) t} + conj(alpha) e^{-(gamma/2 - i wt~) t}} x(0)

    with wt~ = sqrt(omega^2 - gamma^2/4); approx=True replaces wt~ by omega
    (valid for small gamma/2 omega).
    """
    w = tr.omega if approx else math.sqrt(tr.omega ** 2 - (tr.gamma / 2) ** 2)
    z = tr.alpha * np.exp(-(tr.gamma / 2 + 1j * w) * t)
    return float(2 * z.real * tr.x0)
