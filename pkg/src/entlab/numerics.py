"""Dense and iterative linear algebra plus the special functions shared by the
other modules: symmetric eigensolves, SVD, a ground-state (smallest eigenpair)
solver for matrix-free operators, imaginary-order modified Bessel functions
K_{i ell}(x), and a bracketing root finder.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

__all__ = [
    "EigenDecomposition",
    "SingularValueDecomposition",
    "EigensolverError",
    "RootCountWarning",
    "sym_eig",
    "svd",
    "smallest_eigenpair",
    "bessel_K_imag",
    "find_roots",
]


class EigensolverError(RuntimeError):
    """Iterative eigensolver failed to meet its residual contract."""

    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class RootCountWarning(UserWarning):
    """Fewer sign changes found than roots requested."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending, eigenvectors as orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SingularValueDecomposition:
    """A = u @ diag(s) @ v.conj().T with s descending and u, v orthonormal."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def _require_finite(a: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")


def sym_eig(matrix: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric (or complex Hermitian) matrix.

    Symmetry is verified on entry; eigenvalues come back ascending with
    orthonormal eigenvector columns.
    """
    m = np.asarray(matrix)
    _require_finite(m, "matrix")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    if np.abs(m - m.conj().T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric/Hermitian")
    values, vectors = np.linalg.eigh(m)
    return EigenDecomposition(values=values, vectors=vectors)


def svd(matrix: np.ndarray) -> SingularValueDecomposition:
    """Thin singular value decomposition with descending singular values."""
    a = np.asarray(matrix)
    _require_finite(a, "matrix")
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SingularValueDecomposition(u=u, s=s, v=vh.conj().T)


# Deterministic start vector seed for the iterative solver; any fixed value
# works, it only must not be orthogonal to the ground state generically.
_START_SEED = 0x5EED


def _dense_from_apply(apply: Callable[[np.ndarray], np.ndarray], dim: int,
                      dtype) -> np.ndarray:
    cols = [np.asarray(apply(np.eye(dim, dtype=dtype)[:, j])) for j in range(dim)]
    return np.stack(cols, axis=1)


def smallest_eigenpair(
    apply: Callable[[np.ndarray], np.ndarray],
    dim: int,
    tol: float = 1e-10,
    max_iterations: int = 20000,
    v0: np.ndarray | None = None,
    dtype=np.float64,
) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and eigenvector of a self-adjoint operator.

    `apply` maps a vector of length `dim` to H @ v.  Small problems fall back
    to a dense solve; larger ones use a Lanczos iteration whose result is
    verified against the residual contract ||H v - E v|| <= tol and re-run
    tighter if needed.

    Raises EigensolverError (with the iteration count) on non-convergence.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim <= 16:
        h = _dense_from_apply(apply, dim, dtype)
        dec = sym_eig(h)
        return float(dec.values[0]), dec.vectors[:, 0]

    if v0 is None:
        v0 = np.random.default_rng(_START_SEED).standard_normal(dim)
    v0 = np.asarray(v0, dtype=dtype)

    op = LinearOperator((dim, dim), matvec=apply, dtype=dtype)
    arpack_tol = tol
    iterations = 0
    for _ in range(3):
        try:
            vals, vecs = eigsh(op, k=1, which="SA", v0=v0, tol=arpack_tol,
                               maxiter=max_iterations)
        except ArpackNoConvergence as exc:
            raise EigensolverError(
                "Lanczos iteration did not converge", max_iterations) from exc
        iterations += max_iterations
        value = float(vals[0])
        vector = vecs[:, 0]
        residual = float(np.linalg.norm(apply(vector) - value * vector))
        if residual <= tol:
            return value, vector
        v0 = vector
        arpack_tol = max(arpack_tol / 100.0, 1e-16)
    raise EigensolverError(
        f"residual {residual:.3e} above tolerance {tol:.3e}", iterations)


# --- imaginary-order modified Bessel function ------------------------------
#
# K_{i ell}(x) = integral_0^inf exp(-x cosh t) cos(ell t) dt.  The integrand
# is even in t and decays double-exponentially, so the composite trapezoid
# rule with step halving converges geometrically.  Accumulation is done in
# extended precision: for large ell the result is exponentially smaller than
# the integrand (cancellation), and 80-bit arithmetic keeps the noise floor
# near 1e-19.

_LOG_TAIL_CUT = float(np.log(1e18))
_QUAD_REL_TOL = 1e-10
_QUAD_ABS_FLOOR = 1e-16
_MAX_DOUBLINGS = 24
_CHUNK = 2048  # caps the (batch x grid) work matrix at ~100 MB


def _upper_limit(x_min: float) -> float:
    # exp(-x cosh T) below 1e-18 of the integrand peak exp(-x)
    return float(np.arccosh(1.0 + _LOG_TAIL_CUT / x_min))


def _trapezoid_K(ells: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Shared-grid trapezoid quadrature; ells and xs are 1-d, result is
    shape (len(ells), len(xs))."""
    ld = np.longdouble
    big = float(np.max(ells)) if ells.size else 0.0
    T = _upper_limit(float(np.min(xs)))
    n = max(64, 16 * int(np.ceil(big * T / (2.0 * np.pi))) if big > 0 else 64)
    t = np.linspace(ld(0.0), ld(T), n + 1)
    h = ld(T) / n

    xs_ld = xs.astype(ld)
    ells_ld = ells.astype(ld)

    def weights(tt):
        return np.exp(-np.outer(xs_ld, np.cosh(tt)))  # (nx, nt)

    w = weights(t)
    w[:, 0] *= 0.5
    w[:, -1] *= 0.5
    # (nl, nt) @ (nt, nx)
    estimate = h * (np.cos(np.outer(ells_ld, t)) @ w.T)
    for _ in range(_MAX_DOUBLINGS):
        mid = t[:-1] + 0.5 * h
        refined = 0.5 * estimate + 0.5 * h * (np.cos(np.outer(ells_ld, mid))
                                              @ weights(mid).T)
        h = 0.5 * h
        t = np.sort(np.concatenate([t, mid]))
        err = np.abs(refined - estimate)
        bound = np.maximum(_QUAD_REL_TOL * np.abs(refined), _QUAD_ABS_FLOOR)
        estimate = refined
        if np.all(err <= bound):
            break
    else:
        raise RuntimeError("Bessel quadrature did not converge")
    return estimate.astype(np.float64)


def bessel_K_imag(ell, x):
    """Modified Bessel function of imaginary order, K_{i ell}(x), real-valued.

    Requires x > 0 and ell >= 0.  Either argument may be a 1-d array while
    the other is scalar; the quadrature grid is then shared across the batch.
    """
    ell_arr = np.atleast_1d(np.asarray(ell, dtype=float))
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if ell_arr.ndim > 1 or x_arr.ndim > 1:
        raise ValueError("ell and x must be scalars or 1-d arrays")
    if ell_arr.size > 1 and x_arr.size > 1 and ell_arr.size != x_arr.size:
        raise ValueError("array arguments must have matching lengths")
    _require_finite(ell_arr, "ell")
    _require_finite(x_arr, "x")
    if np.any(x_arr <= 0.0):
        raise ValueError("x must be positive: the wave is undefined at x=0")
    if np.any(ell_arr < 0.0):
        raise ValueError("ell must be nonnegative")

    scalar = np.isscalar(ell) or getattr(ell, "ndim", 1) == 0
    scalar = scalar and (np.isscalar(x) or getattr(x, "ndim", 1) == 0)

    if ell_arr.size > 1 and x_arr.size > 1:
        # paired evaluation
        out = np.array([_trapezoid_K(ell_arr[i:i + 1], x_arr[i:i + 1])[0, 0]
                        for i in range(ell_arr.size)])
        return out
    if x_arr.size == 1:
        out = np.concatenate([
            _trapezoid_K(ell_arr[i:i + _CHUNK], x_arr)[:, 0]
            for i in range(0, ell_arr.size, _CHUNK)])
        return float(out[0]) if scalar else out
    out = np.concatenate([
        _trapezoid_K(ell_arr, x_arr[i:i + _CHUNK])[0, :]
        for i in range(0, x_arr.size, _CHUNK)])
    return float(out[0]) if scalar else out


def find_roots(
    f: Callable,
    bracket: Sequence[float],
    count: int | None = None,
    scan_points_per_unit: float = 1000.0,
    xtol: float = 1e-12,
    f_tol: float = 1e-8,
    vectorized: bool = False,
) -> np.ndarray:
    """Roots of a continuous function on an interval, ascending.

    Scans the bracket for sign changes (default 10^3 points per unit length)
    and bisects each one.  Returned roots satisfy |f(r)| <= f_tol and carry a
    sign change in their surrounding sub-bracket.  If `count` is given and
    fewer sign changes are found, a RootCountWarning is issued and the roots
    found are returned.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not hi > lo:
        raise ValueError("bracket must satisfy lo < hi")
    n_scan = max(8, int(np.ceil((hi - lo) * scan_points_per_unit)))
    grid = np.linspace(lo, hi, n_scan + 1)
    if vectorized:
        values = np.asarray(f(grid), dtype=float)
    else:
        values = np.array([float(f(g)) for g in grid])
    _require_finite(values, "f(scan grid)")

    roots: list[float] = []
    exact = grid[values == 0.0]
    roots.extend(float(g) for g in exact)

    sign = np.sign(values)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    for i in flips:
        a, b = float(grid[i]), float(grid[i + 1])
        fa = float(values[i])
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = float(f(mid)) if not vectorized else float(f(np.array([mid]))[0])
            if fm == 0.0:
                a = b = mid
                break
            if np.sign(fm) == np.sign(fa):
                a, fa = mid, fm
            else:
                b = mid
            if b - a <= xtol * max(1.0, abs(b)):
                break
        r = 0.5 * (a + b)
        fr = float(f(r)) if not vectorized else float(f(np.array([r]))[0])
        if abs(fr) <= f_tol:
            roots.append(r)

    roots.sort()
    merged: list[float] = []
    step = (hi - lo) / n_scan
    for r in roots:
        if not merged or r - merged[-1] > 0.5 * step:
            merged.append(r)
    if count is not None and len(merged) < count:
        warnings.warn(
            f"found {len(merged)} roots, {count} requested", RootCountWarning)
    return np.array(merged)
