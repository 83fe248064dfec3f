"""Vectorization and superoperator construction.

A block density operator

    rho = [[rho00, rho01],
           [rho10, rho11]]

is flattened to a vector (rho00^, rho01^, rho10^, rho11^) of length 4*dim^2,
each block row-major, so that left/right multiplication becomes a Kronecker
product:  vec(E X F) = (E kron F^T) vec(X).

The master equation in this representation reads d rho^/dt = (X + Y) rho^,
with X block-diagonal (built from the su(1,1) ladder superoperators K+, K-,
K3, K0 and the dissipative part L) and Y the off-diagonal coupling
proportional to Omega.

Convention: the dissipator term a a+ is expanded as N + 1 (the operator
identity) rather than as the truncated matrix product, whose top-right
corner is defective.  This makes the explicit tensor form of L agree
entrywise with its K-form and with the componentwise right-hand side used
by the reference integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .fock import annihilation, creation, number
from .params import ModelParams

BLOCK_KEYS = ((0, 0), (0, 1), (1, 0), (1, 1))


# ---------------------------------------------------------------------------
# vectorization


def vectorize(X: np.ndarray) -> np.ndarray:
    """Row-major flattening (x00, x01, ..., x10, x11, ...)."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {X.shape}")
    return X.ravel().copy()


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of vectorize; length must be a perfect square."""
    v = np.asarray(v, dtype=complex).ravel()
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise ShapeError(f"length {v.size} is not a perfect square")
    return v.reshape(d, d).copy()


def sandwich_superop(E: np.ndarray, F: np.ndarray) -> np.ndarray:
    """E kron F^T, so that sandwich_superop(E, F) @ vec(X) = vec(E X F)."""
    E = np.asarray(E, dtype=complex)
    F = np.asarray(F, dtype=complex)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ShapeError(f"E must be square, got shape {E.shape}")
    if F.shape != E.shape:
        raise ShapeError(f"F shape {F.shape} does not match E shape {E.shape}")
    return np.kron(E, F.T)


@dataclass
class BlockDensity:
    """2x2 block density operator over the two atomic levels."""

    rho00: np.ndarray
    rho01: np.ndarray
    rho10: np.ndarray
    rho11: np.ndarray

    def __post_init__(self):
        blocks = [np.asarray(b, dtype=complex) for b in
                  (self.rho00, self.rho01, self.rho10, self.rho11)]
        d = blocks[0].shape[0]
        for b in blocks:
            if b.shape != (d, d):
                raise ShapeError(
                    f"all blocks must be {d}x{d}, got shapes "
                    f"{[x.shape for x in blocks]}"
                )
        self.rho00, self.rho01, self.rho10, self.rho11 = blocks

    @property
    def dim(self) -> int:
        return self.rho00.shape[0]

    def block(self, i: int, j: int) -> np.ndarray:
        return getattr(self, f"rho{i}{j}")

    def full(self) -> np.ndarray:
        """Assemble the 2*dim x 2*dim matrix."""
        return np.block([[self.rho00, self.rho01], [self.rho10, self.rho11]])

    @classmethod
    def from_full(cls, M: np.ndarray) -> "BlockDensity":
        M = np.asarray(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ShapeError(f"expected a square even-dimensional matrix, got {M.shape}")
        d = M.shape[0] // 2
        return cls(M[:d, :d], M[:d, d:], M[d:, :d], M[d:, d:])

    @classmethod
    def zero(cls, dim: int) -> "BlockDensity":
        z = np.zeros((dim, dim), dtype=complex)
        return cls(z.copy(), z.copy(), z.copy(), z.copy())

    def trace(self) -> complex:
        return np.trace(self.rho00) + np.trace(self.rho11)

    def copy(self) -> "BlockDensity":
        return BlockDensity(self.rho00.copy(), self.rho01.copy(),
                            self.rho10.copy(), self.rho11.copy())


def guard_occupation(rho: BlockDensity, guard: int = 3) -> float:
    """Total population in the top `guard` Fock levels.

    States whose weight reaches the edge of the truncated space are being
    corrupted by the cutoff; propagation routines warn when this exceeds
    1e-8.
    """
    lo = max(0, rho.dim - guard)
    occ = (np.diag(rho.rho00)[lo:].real.sum()
           + np.diag(rho.rho11)[lo:].real.sum())
    return float(occ)


def vectorize_blocks(rho: BlockDensity) -> np.ndarray:
    """Stack (rho00^, rho01^, rho10^, rho11^) into one 4*dim^2 vector."""
    return np.concatenate([rho.block(i, j).ravel() for i, j in BLOCK_KEYS])


def devectorize_blocks(v: np.ndarray, dim: int | None = None) -> BlockDensity:
    v = np.asarray(v, dtype=complex).ravel()
    if dim is None:
        dim = math.isqrt(v.size // 4)
    if 4 * dim * dim != v.size:
        raise ShapeError(f"length {v.size} is not 4*dim^2 for dim={dim}")
    q = dim * dim
    return BlockDensity(*(v[k * q:(k + 1) * q].reshape(dim, dim) for k in range(4)))


# ---------------------------------------------------------------------------
# generators


def k_generators(dim: int):
    """(K+, K-, K3, K0) on the dim^2-dimensional vectorized space.

    K+ = a+ kron a^T, K- = a kron (a+)^T,
    K3 = (N kron 1 + 1 kron N + 1 kron 1)/2, K0 = N kron 1 - 1 kron N.

    [K3, K+-] = +-K+- and [K+, K-] = -2 K3 hold exactly on index pairs away
    from the truncation edge; K0 commutes with all three at any cutoff.
    """
    a = annihilation(dim)
    ad = creation(dim)
    N = number(dim)
    I = np.eye(dim, dtype=complex)
    Kp = np.kron(ad, a.T)
    Km = np.kron(a, ad.T)
    K3 = 0.5 * (np.kron(N, I) + np.kron(I, N) + np.kron(I, I))
    K0 = np.kron(N, I) - np.kron(I, N)
    return Kp, Km, K3, K0


def lindblad_superop(p: ModelParams) -> np.ndarray:
    """Single-block dissipative superoperator L.

    Built two ways -- the explicit tensor form

        L = mu {a kron (a+)^T - (a+ a kron 1 + 1 kron a+ a)/2}
          + nu {a+ kron a^T  - ((N+1) kron 1 + 1 kron (N+1))/2}

    and the K-form (mu-nu)/2 + nu K+ + mu K- - (mu+nu) K3 -- which must
    agree entrywise; the agreement is asserted at 1e-13.
    """
    d = p.dim
    a = annihilation(d)
    ad = creation(d)
    N = number(d)
    I = np.eye(d, dtype=complex)
    Np1 = N + I  # a a+ expanded via the operator identity, see module docstring

    explicit = (
        p.mu * (sandwich_superop(a, ad)
                - 0.5 * (np.kron(N, I) + np.kron(I, N.T)))
        + p.nu * (sandwich_superop(ad, a)
                  - 0.5 * (np.kron(Np1, I) + np.kron(I, Np1.T)))
    )

    Kp, Km, K3, _ = k_generators(d)
    kform = (p.mu - p.nu) / 2 * np.eye(d * d) + p.nu * Kp + p.mu * Km - (p.mu + p.nu) * K3

    defect = np.max(np.abs(explicit - kform))
    assert defect < 1e-13, f"L construction mismatch: {defect:.3e}"
    return kform


def build_X(p: ModelParams) -> np.ndarray:
    """Block-diagonal generator: the diagonal part of the canonical form.

    Blocks (-i w0 K0 + L), (-i w0 - i w0 K0 + L), (+i w0 - i w0 K0 + L),
    (-i w0 K0 + L), acting on (rho00^, rho01^, rho10^, rho11^).
    """
    d = p.dim
    q = d * d
    _, _, _, K0 = k_generators(d)
    L = lindblad_superop(p)
    base = -1j * p.omega0 * K0 + L
    Iq = np.eye(q, dtype=complex)
    X = np.zeros((4 * q, 4 * q), dtype=complex)
    shifts = (0.0, -1j * p.omega0, 1j * p.omega0, 0.0)
    for k, s in enumerate(shifts):
        X[k * q:(k + 1) * q, k * q:(k + 1) * q] = base + s * Iq
    return X


def build_Y(p: ModelParams) -> np.ndarray:
    """Off-diagonal coupling generator, -i Omega times the block matrix

        [[0,     -1 kron (a+)^T, a kron 1,      0        ],
         [-1 kron a^T, 0,        0,             a kron 1 ],
         [a+ kron 1,   0,        0,             -1 kron (a+)^T],
         [0,     a+ kron 1,      -1 kron a^T,   0        ]]
    """
    d = p.dim
    q = d * d
    a = annihilation(d)
    ad = creation(d)
    I = np.eye(d, dtype=complex)
    aI = np.kron(a, I)
    adI = np.kron(ad, I)
    IaT = np.kron(I, a.T)
    IadT = np.kron(I, ad.T)
    Z = np.zeros((q, q), dtype=complex)
    return -1j * p.Omega * np.block([
        [Z, -IadT, aI, Z],
        [-IaT, Z, Z, aI],
        [adI, Z, Z, -IadT],
        [Z, adI, -IaT, Z],
    ])


def build_generator(p: ModelParams) -> np.ndarray:
    """Full generator X + Y of the vectorized master equation."""
    return build_X(p) + build_Y(p)


def build_hamiltonian(p: ModelParams):
    """(H_diag, H_off): the 2x2-block Jaynes-Cummings Hamiltonian split into

        H_diag = [[w0/2 + w0 N, 0], [0, -w0/2 + w0 N]]
        H_off  = [[0, Omega a], [Omega a+, 0]]
    """
    d = p.dim
    N = number(d)
    I = np.eye(d, dtype=complex)
    Z = np.zeros((d, d), dtype=complex)
    H_diag = np.block([
        [p.omega0 / 2 * I + p.omega0 * N, Z],
        [Z, -p.omega0 / 2 * I + p.omega0 * N],
    ])
    H_off = np.block([
        [Z, p.Omega * annihilation(d)],
        [p.Omega * creation(d), Z],
    ])
    return H_diag, H_off


# ---------------------------------------------------------------------------
# cutoff changes on the vectorized space


def fock_keep_indices(dim_from: int, dim_to: int) -> np.ndarray:
    """Indices of the dim_to x dim_to sub-block inside a row-major dim_from^2
    vectorized block."""
    if dim_to > dim_from:
        raise ShapeError(f"cannot keep {dim_to} levels out of {dim_from}")
    return np.array([m * dim_from + n for m in range(dim_to) for n in range(dim_to)])


def restrict_superop(S: np.ndarray, dim_from: int, dim_to: int,
                     nblocks: int = 1) -> np.ndarray:
    """Compress a superoperator built at cutoff dim_from down to dim_to.

    nblocks=1 for single-block (dim_from^2) operators, 4 for the full
    stacked space.  This is the superoperator image of discarding Fock
    levels >= dim_to on both sides.
    """
    q = dim_from * dim_from
    if S.shape != (nblocks * q, nblocks * q):
        raise ShapeError(f"expected shape {(nblocks * q, nblocks * q)}, got {S.shape}")
    keep = fock_keep_indices(dim_from, dim_to)
    keep = np.concatenate([b * q + keep for b in range(nblocks)])
    return S[np.ix_(keep, keep)].copy()


def embed_block_vector(v: np.ndarray, dim_from: int, dim_to: int) -> np.ndarray:
    """Zero-pad a 4*dim_from^2 stacked state vector to cutoff dim_to."""
    if dim_to < dim_from:
        raise ShapeError(f"cannot embed dim {dim_from} into smaller dim {dim_to}")
    rho = devectorize_blocks(np.asarray(v), dim_from)
    out = BlockDensity.zero(dim_to)
    for i, j in BLOCK_KEYS:
        out.block(i, j)[:dim_from, :dim_from] = rho.block(i, j)
    return vectorize_blocks(out)


def restrict_block_vector(v: np.ndarray, dim_from: int, dim_to: int) -> np.ndarray:
    """Drop Fock levels >= dim_to from a 4*dim_from^2 stacked state vector."""
    rho = devectorize_blocks(np.asarray(v), dim_from)
    return vectorize_blocks(BlockDensity(
        *(rho.block(i, j)[:dim_to, :dim_to] for i, j in BLOCK_KEYS)))
