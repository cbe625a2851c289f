"""Infinite-system density-matrix renormalization group for the harmonic
chain with truncated local Fock spaces.

The block is grown at its origin-facing edge, reflected to form a superblock,
and truncated to the dominant eigenstates of its reduced density matrix at
every step.  No free sites are inserted between block and mirror.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics
from .harmonic_chain import oscillator_ops
from .quantum_state import BipartiteState, reduced_density_left

__all__ = [
    "DmrgConfig",
    "DmrgBlock",
    "DmrgIterate",
    "Superblock",
    "init_block",
    "form_superblock",
    "dmrg_step",
    "run",
]

_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class DmrgConfig:
    local_dim: int = 8
    kept_states: int = 16
    target_length: int = 20
    mass: float = 1.0
    gs_tolerance: float = 1e-10
    max_iterations: int = 200
    initial_block_sites: int = 1
    dense_limit: int = 4096
    superblock_limit: int = 1 << 20

    def __post_init__(self):
        if self.local_dim < 2:
            raise ValueError("local_dim must be >= 2")
        if self.kept_states < 1:
            raise ValueError("kept_states must be >= 1")
        if self.target_length < 2 or self.target_length % 2:
            raise ValueError("target_length must be a positive even integer")
        if self.initial_block_sites < 1:
            raise ValueError("initial_block_sites must be >= 1")
        if self.local_dim ** self.initial_block_sites > self.dense_limit:
            raise ValueError(
                f"initial block basis {self.local_dim}^{self.initial_block_sites} "
                f"exceeds dense limit {self.dense_limit}")

    @property
    def site_frequency(self) -> float:
        # fixed-end chain: every site sees self-frequency sqrt(2 + mass^2)
        return float(np.sqrt(2.0 + self.mass ** 2))


@dataclass(frozen=True)
class DmrgBlock:
    """Block of `length` sites in a (possibly truncated) basis.

    edge_phi / edge_pi are the field and momentum operators of the
    origin-facing boundary site.  All matrices are real; the physical
    momentum is 1j * edge_pi, so edge_pi itself is antisymmetric.
    warm_start, when present, is the previous ground state embedded in this
    block's superblock space.
    """

    length: int
    hamiltonian: np.ndarray
    edge_phi: np.ndarray
    edge_pi: np.ndarray
    warm_start: np.ndarray | None = field(default=None, compare=False)

    @property
    def basis_size(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class DmrgIterate:
    chain_length: int
    ground_energy: float
    half_chain_entropy: float
    truncation_weight: float
    kept: int


@dataclass(frozen=True)
class Superblock:
    """Block + mirror image coupled across the origin by -phi_edge phi'_edge.

    Acts on vectors of length basis_size**2 (the block x mirror product
    space) without materializing the matrix.
    """

    hamiltonian: np.ndarray
    edge_phi: np.ndarray
    coupling: float = 1.0

    @property
    def block_dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def dim(self) -> int:
        return self.block_dim ** 2

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        n = self.block_dim
        m = vec.reshape(n, n)
        out = self.hamiltonian @ m + m @ self.hamiltonian
        if self.coupling != 0.0:
            out = out - self.coupling * (self.edge_phi @ m @ self.edge_phi)
        return out.ravel()

    def dense(self) -> np.ndarray:
        n2 = self.dim
        h = np.kron(self.hamiltonian, np.eye(self.block_dim))
        h += np.kron(np.eye(self.block_dim), self.hamiltonian)
        h -= self.coupling * np.kron(self.edge_phi, self.edge_phi)
        return h.reshape(n2, n2)


def _single_site(config: DmrgConfig) -> DmrgBlock:
    h, phi, pi_factor = oscillator_ops(config.site_frequency, config.local_dim)
    return DmrgBlock(length=1, hamiltonian=h, edge_phi=phi, edge_pi=pi_factor)


def _enlarge(block: DmrgBlock, config: DmrgConfig) -> DmrgBlock:
    """Adjoin one bare site at the origin-facing edge; the enlarged basis is
    (new site) x (block)."""
    d = config.local_dim
    h1, phi1, pi1 = oscillator_ops(config.site_frequency, d)
    n = block.basis_size
    ham = (np.kron(h1, np.eye(n))
           + np.kron(np.eye(d), block.hamiltonian)
           - np.kron(phi1, block.edge_phi))
    return DmrgBlock(length=block.length + 1,
                     hamiltonian=ham,
                     edge_phi=np.kron(phi1, np.eye(n)),
                     edge_pi=np.kron(pi1, np.eye(n)))


def init_block(config: DmrgConfig) -> DmrgBlock:
    """Exact block of `initial_block_sites` sites in the truncated Fock
    basis (no renormalization yet)."""
    block = _single_site(config)
    for _ in range(config.initial_block_sites - 1):
        block = _enlarge(block, config)
    return block


def form_superblock(block: DmrgBlock, coupling: float = 1.0) -> Superblock:
    """Reflect the block through the origin and couple the two edge sites.

    `coupling` scales the cross term (0 gives two uncoupled copies, used in
    tests)."""
    if block.basis_size ** 2 > (1 << 26):
        raise ValueError(f"superblock dimension {block.basis_size ** 2} too large")
    return Superblock(hamiltonian=block.hamiltonian, edge_phi=block.edge_phi,
                      coupling=coupling)


def dmrg_step(
    block: DmrgBlock,
    config: DmrgConfig,
    initial_guess: np.ndarray | None = None,
) -> tuple[DmrgBlock, DmrgIterate]:
    """One growth step: solve the superblock, truncate the block basis to the
    kept_states dominant density-matrix eigenstates, adjoin one site.

    Returns the enlarged block and the iterate record for the superblock
    just solved (chain length 2 x block length).
    """
    n = block.basis_size
    if n ** 2 > config.superblock_limit:
        raise ValueError(
            f"superblock dimension {n ** 2} exceeds limit {config.superblock_limit}")
    superblock = form_superblock(block)
    guess = initial_guess if initial_guess is not None else block.warm_start
    energy, psi = numerics.smallest_eigenpair(
        superblock.matvec, superblock.dim, tol=config.gs_tolerance, v0=guess)

    matrix = psi.reshape(n, n)
    rho = reduced_density_left(BipartiteState(matrix))  # validates the invariants
    w, u = np.linalg.eigh(rho.entries.real)
    w = w[::-1]
    u = u[:, ::-1]

    positive = np.clip(w, 0.0, 1.0)
    nz = positive[positive > 1e-16]
    entropy = float(-(nz * np.log(nz)).sum())

    kept = min(config.kept_states, n)
    # keep a degenerate multiplet intact when it straddles the cut (zero-weight
    # tails do not count as a multiplet)
    while (kept < n and w[kept] > _DEGENERACY_TOL
           and w[kept - 1] - w[kept] <= _DEGENERACY_TOL):
        kept += 1
    weight = float(max(0.0, 1.0 - w[:kept].sum()))
    basis = u[:, :kept]

    kept_ham = basis.T @ block.hamiltonian @ basis
    kept_ham = 0.5 * (kept_ham + kept_ham.T)
    truncated = DmrgBlock(length=block.length,
                          hamiltonian=kept_ham,
                          edge_phi=basis.T @ block.edge_phi @ basis,
                          edge_pi=basis.T @ block.edge_pi @ basis)
    enlarged = _enlarge(truncated, config)

    # embed the ground state for warm starting the next superblock solve:
    # new sites in their local ground state, block part rotated to the kept basis
    ground_site = np.zeros(config.local_dim)
    ground_site[0] = 1.0
    kept_psi = basis.T @ matrix @ basis
    warm = np.kron(np.outer(ground_site, ground_site), kept_psi).ravel()
    warm /= np.linalg.norm(warm)
    enlarged = replace(enlarged, warm_start=warm)

    iterate = DmrgIterate(chain_length=2 * block.length,
                          ground_energy=float(energy),
                          half_chain_entropy=entropy,
                          truncation_weight=weight,
                          kept=kept)
    return enlarged, iterate


def run(config: DmrgConfig) -> list[DmrgIterate]:
    """Grow the chain until the superblock reaches target_length (or the
    iteration cap), recording one iterate per step."""
    block = init_block(config)
    iterates: list[DmrgIterate] = []
    while len(iterates) < config.max_iterations:
        block, iterate = dmrg_step(block, config)
        iterates.append(iterate)
        if iterate.chain_length >= config.target_length:
            break
    return iterates
