"""Deterministic dense kernels: symmetric eigensolver, SVD, Lanczos, least squares.

Dense decompositions delegate to LAPACK via numpy; this module pins the
conventions the rest of the code relies on (ascending eigenvalues, descending
singular values, first-nonzero-positive vector signs) and adds a restartable
Lanczos iteration with full reorthogonalization.  Everything is real double
precision; with no randomness anywhere, identical inputs give identical
outputs for a fixed build.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# When enabled (tests, debugging) kernel boundaries reject NaN/Inf inputs.
DEBUG_CHECKS = False

_SIGN_TOL = 1e-12


def _check_finite(*arrays):
    if DEBUG_CHECKS:
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise FloatingPointError("non-finite values at kernel boundary")


def _fix_column_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry exceeding a relative tolerance is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        scale = np.max(np.abs(col))
        if scale == 0.0:
            continue
        nz = np.nonzero(np.abs(col) > _SIGN_TOL * scale)[0]
        if len(nz) and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def sym_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Raises on asymmetric input (tolerance 1e-10 relative to the largest entry).
    """
    a = np.asarray(a, dtype=float)
    _check_finite(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.max(np.abs(a)), 1.0)
    if np.max(np.abs(a - a.T)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh((a + a.T) / 2.0)
    return vals, _fix_column_signs(vecs)


def svd(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD with descending singular values and pinned column signs."""
    a = np.asarray(a, dtype=float)
    _check_finite(a)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    v = vt.T.copy()
    cutoff = np.finfo(float).eps * max(a.shape) * (s[0] if len(s) else 0.0)
    for k in range(len(s)):
        col = u[:, k]
        scale = np.max(np.abs(col))
        nz = np.nonzero(np.abs(col) > _SIGN_TOL * scale)[0] if scale > 0 else []
        if len(nz) and col[nz[0]] < 0:
            u[:, k] = -col
            if s[k] > cutoff:
                v[:, k] = -v[:, k]
    if len(s):
        v[:, s <= cutoff] = _fix_column_signs(v[:, s <= cutoff])
    return u, s, v


@dataclass
class LanczosResult:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    converged: bool
    # lowest Ritz values tracked for convergence (at least one entry)
    values: np.ndarray


def _dense_lowest(matvec, dim: int, n_values: int) -> LanczosResult:
    h = np.zeros((dim, dim))
    e = np.zeros(dim)
    for j in range(dim):
        e[:] = 0.0
        e[j] = 1.0
        h[:, j] = matvec(e)
    vals, vecs = sym_eig(h)
    v = vecs[:, 0]
    res = float(np.linalg.norm(h @ v - vals[0] * v))
    return LanczosResult(float(vals[0]), v, res, dim, True, vals[: min(n_values, dim)].copy())


def lanczos_lowest(
    matvec,
    dim: int,
    start: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = 500,
    max_basis: int = 200,
    n_values: int = 1,
) -> LanczosResult:
    """Lowest eigenpair of a symmetric operator given by ``matvec``.

    Full reorthogonalization of the Krylov basis; the iteration restarts from
    the current Ritz vector when the basis reaches ``max_basis``.  The start
    vector defaults to the uniform vector; on breakdown (invariant subspace
    that fails the residual test) deterministic unit-vector perturbations are
    mixed in, so a start accidentally orthogonal to the ground state recovers.
    Convergence requires the lowest ``n_values`` Ritz values to move less
    than ``tol`` between iterations; the residual ``|H v - E v|`` is computed
    explicitly on the returned vector.
    """
    if dim <= 0:
        raise ValueError("dimension must be positive")
    if dim <= 16:
        return _dense_lowest(matvec, dim, n_values)

    if start is None:
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
    else:
        v0 = np.asarray(start, dtype=float).reshape(dim).copy()
        nrm = np.linalg.norm(v0)
        if nrm == 0.0:
            v0 = np.full(dim, 1.0 / np.sqrt(dim))
        else:
            v0 /= nrm
    _check_finite(v0)

    total_iters = 0
    perturb_count = 0
    best: tuple[float, np.ndarray] | None = None

    while total_iters < max_iter:
        basis: list[np.ndarray] = []
        alphas: list[float] = []
        betas: list[float] = []
        v = v0
        ritz_prev: np.ndarray | None = None
        breakdown = False

        while total_iters < max_iter and len(basis) < max_basis:
            basis.append(v)
            w = matvec(v)
            total_iters += 1
            alphas.append(float(v @ w))
            # full reorthogonalization, twice for stability
            for _ in range(2):
                for u in basis:
                    w -= (u @ w) * u
            beta = float(np.linalg.norm(w))
            tri_vals, tri_vecs = _tridiag_eig(alphas, betas)
            k = min(n_values, len(tri_vals))
            if ritz_prev is not None and len(ritz_prev) >= k:
                if np.all(np.abs(tri_vals[:k] - ritz_prev[:k]) < tol):
                    break
            ritz_prev = tri_vals[: k].copy()
            if beta < 1e-14:
                breakdown = True
                break
            betas.append(beta)
            v = w / beta

        tri_vals, tri_vecs = _tridiag_eig(alphas, betas[: len(alphas) - 1])
        vec = _ritz_vector(basis, tri_vecs[:, 0])
        value = float(tri_vals[0])
        if best is None or value < best[0] - 1e-15:
            best = (value, vec)

        hv = matvec(best[1])
        total_iters += 1
        residual = float(np.linalg.norm(hv - best[0] * best[1]))
        res_ok = residual <= max(tol * 10.0, 1e-11) * max(1.0, abs(best[0]))

        converged_vals = (
            ritz_prev is not None
            and len(alphas) > 1
            and np.all(np.abs(tri_vals[: len(ritz_prev)] - ritz_prev) < tol * 10)
        )
        if res_ok and (converged_vals or breakdown or len(alphas) >= dim):
            if breakdown and perturb_count < 3 and len(alphas) < dim:
                # invariant subspace: verify it is not a spurious one by
                # restarting once with a deterministic perturbation mixed in
                e = np.zeros(dim)
                e[(perturb_count * 7919) % dim] = 1.0
                v0 = best[1] + 1e-3 * e
                v0 /= np.linalg.norm(v0)
                perturb_count += 1
                continue
            vals_out = tri_vals[: min(n_values, len(tri_vals))].copy()
            return LanczosResult(best[0], best[1], residual, total_iters, True, vals_out)

        # restart from the best Ritz vector; add a deterministic perturbation
        # if the previous cycle stalled at the same value
        v0 = best[1].copy()
        if breakdown:
            e = np.zeros(dim)
            e[(perturb_count * 7919) % dim] = 1.0
            v0 += 1e-3 * e
            perturb_count += 1
        v0 /= np.linalg.norm(v0)

    hv = matvec(best[1])
    residual = float(np.linalg.norm(hv - best[0] * best[1]))
    vals_out = np.array([best[0]])
    return LanczosResult(best[0], best[1], residual, total_iters, False, vals_out)


def _tridiag_eig(alphas: list[float], betas: list[float]):
    from scipy.linalg import eigh_tridiagonal

    a = np.asarray(alphas, dtype=float)
    if len(a) == 1:
        return a.copy(), np.ones((1, 1))
    b = np.asarray(betas[: len(a) - 1], dtype=float)
    vals, vecs = eigh_tridiagonal(a, b)
    return vals, vecs


def _ritz_vector(basis: list[np.ndarray], coeffs: np.ndarray) -> np.ndarray:
    v = coeffs[0] * basis[0]
    for c, u in zip(coeffs[1:], basis[1:]):
        v += c * u
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 else v


def linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Ordinary least squares y = intercept + slope * x.

    Returns (intercept, slope, rms residual, r^2).  Raises on a degenerate
    design matrix (all x equal).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < 2:
        raise ValueError("need at least two points")
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate design matrix: all x values equal")
    design = np.stack([np.ones_like(x), x], axis=1)
    coeffs, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    pred = design @ coeffs
    rms = float(np.sqrt(np.mean((y - pred) ** 2)))
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coeffs[0]), float(coeffs[1]), rms, r2
