"""Truncated Fock-space operators and states.

All operators are dense complex matrices on the space spanned by
|0>, |1>, ..., |dim-1>.  Truncation breaks [a, a+] = 1 in the last row/column
only; everything in this module is exact on the retained levels.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import DomainError, ShapeError, TruncationError


def _check_dim(dim) -> int:
    if not isinstance(dim, (int, np.integer)) or isinstance(dim, bool):
        raise DomainError(f"dim must be an integer, got {dim!r}")
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    return int(dim)


def annihilation(dim: int) -> np.ndarray:
    """a with entries a[n-1, n] = sqrt(n); a|n> = sqrt(n)|n-1>."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)


def creation(dim: int) -> np.ndarray:
    """a+ = a conjugate-transposed; a+|n> = sqrt(n+1)|n+1>."""
    return annihilation(dim).conj().T


def number(dim: int) -> np.ndarray:
    """N = a+ a = diag(0, 1, ..., dim-1)."""
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def coherent_tail_weight(alpha: complex, dim: int) -> float:
    """Poisson weight the cutoff discards: sum_{n>=dim} e^{-|a|^2} |a|^{2n}/n!."""
    dim = _check_dim(dim)
    lam = abs(alpha) ** 2
    # complement of the retained Poisson mass, accumulated term by term
    term = math.exp(-lam)
    retained = term
    for n in range(1, dim):
        term *= lam / n
        retained += term
    return max(0.0, 1.0 - retained)


def coherent_state(alpha: complex, dim: int, tail_tol: float = 1e-10) -> np.ndarray:
    """Truncated coherent state c_n = e^{-|a|^2/2} a^n / sqrt(n!), renormalized.

    Raises TruncationError when the discarded Poisson tail weight is >=
    tail_tol, i.e. the cutoff is too small for this alpha.
    """
    dim = _check_dim(dim)
    tail = coherent_tail_weight(alpha, dim)
    if tail >= tail_tol:
        raise TruncationError(
            f"coherent state alpha={alpha} needs more than dim={dim} levels "
            f"(discarded weight {tail:.3e} >= {tail_tol:.1e})"
        )
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c / np.linalg.norm(c)


def func_of_number(f: Callable, dim: int, shift: int = 0) -> np.ndarray:
    """diag(f(n + shift)) for n = 0..dim-1; shift in {0, 1} selects N or N+1.

    Used for cos(x sqrt(N+1)), sin(x sqrt(N))/sqrt(N) and friends; the
    function is evaluated on integers only, so operator identities such as
    a f(N) = f(N+1) a hold exactly on the retained levels.
    """
    dim = _check_dim(dim)
    if shift not in (0, 1):
        raise DomainError(f"shift must be 0 or 1, got {shift!r}")
    values = np.asarray([f(n + shift) for n in range(dim)], dtype=complex)
    if not np.all(np.isfinite(values)):
        raise DomainError("func_of_number: f returned non-finite values")
    return np.diag(values)


def cos_sqrt(x: float, dim: int, shift: int = 0) -> np.ndarray:
    """diag(cos(x sqrt(n + shift)))."""
    return func_of_number(lambda n: math.cos(x * math.sqrt(n)), dim, shift)


def sinc_sqrt(x: float, dim: int, shift: int = 0) -> np.ndarray:
    """diag(sin(x sqrt(n + shift)) / sqrt(n + shift)), with the n+shift = 0
    entry set to its analytic limit x (sin(x s)/s -> x as s -> 0)."""

    def f(n):
        if n == 0:
            return x
        r = math.sqrt(n)
        return math.sin(x * r) / r

    return func_of_number(f, dim, shift)


def embed_operator(op: np.ndarray, dim_to: int) -> np.ndarray:
    """Zero-pad a dim x dim operator into the top-left of dim_to x dim_to."""
    d = op.shape[0]
    if op.shape != (d, d):
        raise ShapeError(f"expected a square matrix, got {op.shape}")
    if dim_to < d:
        raise ShapeError(f"cannot embed dim {d} into smaller dim {dim_to}")
    out = np.zeros((dim_to, dim_to), dtype=complex)
    out[:d, :d] = op
    return out


def restrict_operator(op: np.ndarray, dim_to: int) -> np.ndarray:
    """Keep the top-left dim_to x dim_to block."""
    d = op.shape[0]
    if op.shape != (d, d):
        raise ShapeError(f"expected a square matrix, got {op.shape}")
    if dim_to > d:
        raise ShapeError(f"cannot restrict dim {d} to larger dim {dim_to}")
    return op[:dim_to, :dim_to].copy()
