"""Discretized scalar-field chain of coupled harmonic oscillators: exact
Gaussian ground-state covariances, closed-form block entanglement entropy,
and a brute-force truncated-Fock diagonalization used as an independent
oracle.

Lattice spacing is 1; everything is in lattice units.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import numerics
from .quantum_state import BipartiteState

__all__ = [
    "ChainSpec",
    "GaussianGroundState",
    "build_potential",
    "ground_state_covariance",
    "symplectic_eigenvalues",
    "block_entropy",
    "entanglement_spectrum",
    "oscillator_ops",
    "fock_ground_state",
]

_PURE_NU_TOL = 1e-12
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class ChainSpec:
    """Chain of n_sites oscillators with the given mass.

    boundary "fixed" clamps the field to zero beyond both ends (keeps the
    potential positive definite even at mass 0); "open" leaves the ends free,
    which at mass 0 has a zero mode and is rejected.
    """

    n_sites: int
    mass: float = 0.0
    boundary: str = "fixed"

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.mass < 0.0:
            raise ValueError("mass must be nonnegative")
        if self.boundary not in ("fixed", "open"):
            raise ValueError(f"unknown boundary {self.boundary!r}")


@dataclass(frozen=True)
class GaussianGroundState:
    """Ground-state covariances X = <phi phi> = V^{-1/2}/2 and
    P = <pi pi> = V^{1/2}/2."""

    X: np.ndarray
    P: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.X.shape[0]


def build_potential(spec: ChainSpec) -> np.ndarray:
    """Tridiagonal coupling matrix of the discretized chain.

    Diagonal 2 + mass^2 (one less per missing neighbor on open ends),
    off-diagonal -1.  Rejects a massless open chain (zero mode).
    """
    n, m2 = spec.n_sites, spec.mass ** 2
    v = np.zeros((n, n))
    np.fill_diagonal(v, 2.0 + m2)
    if spec.boundary == "open":
        v[0, 0] -= 1.0
        v[-1, -1] -= 1.0
    if n > 1:
        off = np.arange(n - 1)
        v[off, off + 1] = -1.0
        v[off + 1, off] = -1.0
    if spec.boundary == "open" and spec.mass == 0.0:
        raise ValueError(
            "massless open chain has a zero mode; set mass > 0 or use "
            "boundary='fixed'")
    return v


def ground_state_covariance(potential: np.ndarray) -> GaussianGroundState:
    """Exact ground-state covariances from the spectral square roots of the
    potential."""
    dec = numerics.sym_eig(potential)
    if dec.values[0] <= 0.0:
        raise ValueError(
            f"potential is not positive definite (min eigenvalue "
            f"{dec.values[0]:.3e})")
    q = dec.vectors
    x = 0.5 * (q * dec.values ** -0.5) @ q.T
    p = 0.5 * (q * dec.values ** 0.5) @ q.T
    return GaussianGroundState(X=0.5 * (x + x.T), P=0.5 * (p + p.T))


def _region_indices(gs: GaussianGroundState, region: Iterable[int]) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in region)), dtype=int)
    if idx.size == 0:
        raise ValueError("region must be nonempty")
    if idx.min() < 0 or idx.max() >= gs.n_sites:
        raise ValueError("region indices outside the chain")
    return idx


def symplectic_eigenvalues(gs: GaussianGroundState, region: Iterable[int]) -> np.ndarray:
    """Symplectic spectrum of the reduced state on the region: square roots
    of the eigenvalues of X_B P_B, computed from the symmetrized form
    sqrt(X_B) P_B sqrt(X_B).  Each value is >= 1/2 (clamped)."""
    idx = _region_indices(gs, region)
    xb = gs.X[np.ix_(idx, idx)]
    pb = gs.P[np.ix_(idx, idx)]
    dec = numerics.sym_eig(xb)
    sqrt_x = (dec.vectors * np.sqrt(np.clip(dec.values, 0.0, None))) @ dec.vectors.T
    mu = np.linalg.eigvalsh(sqrt_x @ pb @ sqrt_x)
    return np.sqrt(np.clip(mu, 0.25, None))


def _mode_entropy(nu: np.ndarray) -> float:
    mixed = nu[nu > 0.5 + _PURE_NU_TOL]
    up = mixed + 0.5
    dn = mixed - 0.5
    return float((up * np.log(up) - dn * np.log(dn)).sum())


def block_entropy(gs: GaussianGroundState, region: Iterable[int]) -> float:
    """Entanglement entropy (nats) of a block of sites in the Gaussian
    ground state: S = sum (nu+1/2)ln(nu+1/2) - (nu-1/2)ln(nu-1/2), with
    nu = 1/2 modes contributing zero."""
    return _mode_entropy(symplectic_eigenvalues(gs, region))


def entanglement_spectrum(
    gs: GaussianGroundState,
    region: Iterable[int],
    n_levels: int,
) -> np.ndarray:
    """The n_levels largest reduced-density eigenvalues, descending.

    Eigenvalues are products prod_k (1 - e^{-eps_k}) e^{-n_k eps_k} over
    occupations n_k >= 0, with eps_k = ln((nu_k+1/2)/(nu_k-1/2)).  Pure
    modes (nu = 1/2) are weight-1 factors and drop out of the enumeration.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    nu = symplectic_eigenvalues(gs, region)
    mixed = nu[nu > 0.5 + _PURE_NU_TOL]
    if mixed.size == 0:
        return np.array([1.0])
    eps = np.log((mixed + 0.5) / (mixed - 0.5))
    norm_log = float(np.log1p(-np.exp(-eps)).sum())

    # best-first search over occupation tuples ordered by total energy
    start = (0,) * eps.size
    heap = [(0.0, start)]
    seen = {start}
    out: list[float] = []
    while heap and len(out) < n_levels:
        energy, occ = heapq.heappop(heap)
        out.append(np.exp(norm_log - energy))
        for k in range(eps.size):
            succ = occ[:k] + (occ[k] + 1,) + occ[k + 1:]
            if succ not in seen:
                seen.add(succ)
                heapq.heappush(heap, (energy + float(eps[k]), succ))
    return np.array(out)


def oscillator_ops(omega: float, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-site operators in the first d oscillator eigenstates at
    frequency omega.

    Returns (h, phi, pi_factor): h is the on-site Hamiltonian
    omega (n + 1/2), already the exact projection onto the basis; phi the
    position matrix; pi_factor the real antisymmetric matrix with
    pi = 1j * pi_factor.
    """
    if d < 2:
        raise ValueError("local dimension must be >= 2")
    if omega <= 0.0:
        raise ValueError("frequency must be positive")
    n = np.arange(d)
    a = np.diag(np.sqrt(n[1:].astype(float)), 1)
    h = np.diag(omega * (n + 0.5))
    phi = (a + a.T) / np.sqrt(2.0 * omega)
    pi_factor = np.sqrt(omega / 2.0) * (a.T - a)
    return h, phi, pi_factor


def _embed(op: np.ndarray, site: int, dims: Sequence[int]) -> np.ndarray:
    out = np.array([[1.0]])
    for s, d in enumerate(dims):
        out = np.kron(out, op if s == site else np.eye(d))
    return out


def fock_ground_state(
    potential: np.ndarray,
    d: int,
    cut: int | None = None,
    dense_limit: int = DENSE_LIMIT,
) -> tuple[BipartiteState, float]:
    """Brute-force ground state of H = sum pi^2/2 + phi^T V phi / 2 in a
    truncated product Fock basis, d levels per site in the local eigenbasis
    at each site's self-frequency sqrt(V_ii).

    Returns the ground state as a BipartiteState split at `cut` (default
    half) together with the ground energy.  The basis is a nested family in
    d, so the energy decreases monotonically toward the exact value.
    """
    v = np.asarray(potential, dtype=float)
    n = v.shape[0]
    if d < 2:
        raise ValueError("d must be >= 2")
    size = d ** n
    if size > dense_limit:
        raise ValueError(
            f"dense basis of size {d}^{n} = {size} exceeds limit {dense_limit}")
    if cut is None:
        cut = n // 2
    if not 1 <= cut < max(n, 2):
        raise ValueError(f"cut {cut} outside (0, {n})")

    dims = [d] * n
    h = np.zeros((size, size))
    phis = []
    for i in range(n):
        hi, phi, _ = oscillator_ops(float(np.sqrt(v[i, i])), d)
        phis.append(phi)
        h += _embed(hi, i, dims)
    for i in range(n):
        for j in range(i + 1, n):
            if v[i, j] != 0.0:
                left = _embed(phis[i], i, dims)
                right = _embed(phis[j], j, dims)
                h += v[i, j] * (left @ right)

    dec = numerics.sym_eig(h)
    energy = float(dec.values[0])
    psi = dec.vectors[:, 0]
    state = BipartiteState(psi.reshape(d ** cut, d ** (n - cut)))
    return state, energy
