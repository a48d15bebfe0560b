"""Geometry of the complex Stiefel manifold St(p, n, C) = {X : X^H X = I_p}.

Points and tangent vectors are plain ``complex128`` arrays of shape (n, p).
Tangent vectors at X satisfy X^H xi + xi^H X = 0. The metric is
Re tr(xi^H eta), which equals half the Frobenius inner product of the
2n x 2p real representations.
"""

from __future__ import annotations

import numpy as np

from .rng import make_rng

FEAS_TOL = 1e-10
TANGENT_TOL = 1e-10


class DimensionError(ValueError):
    """Raised on invalid manifold dimensions or mismatched array shapes."""


class DecompositionError(ArithmeticError):
    """Raised when a positive-diagonal QR factor does not exist."""


class NoSolutionError(ArithmeticError):
    """Raised when the inverse retraction has no solution."""


def _check_dims(n, p):
    if not (isinstance(n, (int, np.integer)) and isinstance(p, (int, np.integer))):
        raise DimensionError(f"dimensions must be integers, got n={n!r}, p={p!r}")
    if p < 1 or n < 1 or p > n:
        raise DimensionError(f"need 1 <= p <= n, got n={n}, p={p}")


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def skew(a):
    """Skew-Hermitian part (a - a^H) / 2."""
    return 0.5 * (a - a.conj().T)


def herm(a):
    return 0.5 * (a + a.conj().T)


def qf(a):
    """Q-factor of the thin QR decomposition with a positive real R diagonal.

    Returns ``(Q, R)``. Raises DecompositionError when ``a`` is numerically
    rank deficient, since the positive-diagonal factorization is then
    undefined.
    """
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    mag = np.abs(d)
    scale = max(np.linalg.norm(a), 1.0)
    if not np.all(np.isfinite(mag)) or np.any(mag <= 1e-13 * scale):
        raise DecompositionError("matrix is rank deficient; Q-factor undefined")
    phase = d / mag
    q = q * phase[np.newaxis, :]
    r = phase.conj()[:, np.newaxis] * r
    return q, r


def random_point(n, p, seed):
    """Random point from the Q-factor of an i.i.d. CN(0, 1) n x p matrix."""
    _check_dims(n, p)
    rng = make_rng(seed, "init")
    z = (rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))) / np.sqrt(2.0)
    return qf(z)[0]


def check_feasibility(x):
    """Frobenius residual ||X^H X - I_p||_F."""
    x = np.asarray(x)
    p = x.shape[1]
    return float(np.linalg.norm(x.conj().T @ x - np.eye(p)))


def tangency_residual(x, xi):
    """||X^H xi + xi^H X||_F; zero for tangent vectors."""
    a = x.conj().T @ xi
    return float(np.linalg.norm(a + a.conj().T))


def tangent_project(x, g):
    """Orthogonal projection of an ambient n x p matrix onto T_X St.

    (I - X X^H) G + X skew(X^H G). Applied to a Euclidean gradient this is the
    Riemannian gradient.
    """
    x = np.asarray(x)
    g = np.asarray(g)
    _check_same_shape(x, g)
    xhg = x.conj().T @ g
    return g - x @ xhg + x @ skew(xhg)


def tangent_project_batch(x, g):
    """tangent_project applied to a stack of ambient matrices g[t]."""
    xhg = np.einsum("ij,tik->tjk", x.conj(), g)
    sym = 0.5 * (xhg + np.conj(np.swapaxes(xhg, 1, 2)))
    return g - np.einsum("ij,tjk->tik", x, sym)


def metric(xi, eta):
    """Re tr(xi^H eta)."""
    xi = np.asarray(xi)
    eta = np.asarray(eta)
    _check_same_shape(xi, eta)
    return float(np.real(np.vdot(xi, eta)))


def norm(xi):
    return float(np.sqrt(metric(xi, xi)))


def retract(x, xi):
    """QR retraction qf(X + xi)."""
    x = np.asarray(x)
    xi = np.asarray(xi)
    _check_same_shape(x, xi)
    return qf(x + xi)[0]


def transport(y, xi):
    """Projection-based vector transport of ``xi`` into the tangent space at ``y``.

    Only the target point enters the formula, so the base point of ``xi`` and
    the connecting tangent vector are not needed.
    """
    return tangent_project(y, xi)


def _solve_r_recursive(a):
    """Solve herm(A R) = I for upper-triangular R with positive real diagonal.

    Column j of the system only involves R[:j+1, j] once the earlier columns
    are known: the strictly upper entries (i < j) give j complex equations,
    the diagonal entry gives one real equation.
    """
    p = a.shape[0]
    r = np.zeros((p, p), dtype=complex)
    b = np.zeros((p, p), dtype=complex)  # b = a @ r, filled column by column
    for j in range(p):
        c = -np.conj(b[j, :j])
        if j == 0:
            denom = np.real(a[0, 0])
            if denom <= 0:
                raise NoSolutionError("non-positive diagonal in inverse retraction")
            d = 1.0 / denom
            r[0, 0] = d
        else:
            a11 = a[:j, :j]
            u = np.linalg.solve(a11, c)
            v = np.linalg.solve(a11, a[:j, j])
            denom = np.real(a[j, j] - a[j, :j] @ v)
            num = 1.0 - np.real(a[j, :j] @ u)
            if denom == 0:
                raise NoSolutionError("degenerate column in inverse retraction")
            d = num / denom
            if d <= 0:
                raise NoSolutionError("non-positive diagonal in inverse retraction")
            r[:j, j] = u - v * d
            r[j, j] = d
        b[:, j] = a[:, : j + 1] @ r[: j + 1, j]
    return r


def _solve_r_dense(a):
    """Same system as _solve_r_recursive, as one real least-squares problem."""
    p = a.shape[0]
    basis = []
    for j in range(p):
        for i in range(j + 1):
            e = np.zeros((p, p), dtype=complex)
            e[i, j] = 1.0
            basis.append(e)
            if i < j:
                e = np.zeros((p, p), dtype=complex)
                e[i, j] = 1j
                basis.append(e)

    def residual_map(m):
        h = a @ m
        h = h + h.conj().T
        return np.concatenate([h.real.ravel(), h.imag.ravel()])

    mat = np.stack([residual_map(e) for e in basis], axis=1)
    rhs = np.concatenate([2.0 * np.eye(p).ravel(), np.zeros(p * p)])
    coef, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    r = sum(c * e for c, e in zip(coef, basis))
    if np.any(np.real(np.diag(r)) <= 0):
        raise NoSolutionError("non-positive diagonal in inverse retraction")
    return r


def inverse_retract(x_base, y):
    """Tangent vector eta at ``x_base`` with retract(x_base, eta) == y.

    Writes x_base + eta = Y R with R upper triangular (positive diagonal) and
    solves R^H Y^H x_base + x_base^H Y R = 2 I, which is what tangency of eta
    reduces to.
    """
    x_base = np.asarray(x_base)
    y = np.asarray(y)
    _check_same_shape(x_base, y)
    a = x_base.conj().T @ y
    if np.linalg.cond(a) > 1e12:
        raise NoSolutionError("X^H Y is singular; points too far apart")
    try:
        r = _solve_r_recursive(a)
        if not np.all(np.isfinite(r)):
            raise NoSolutionError("non-finite recursion")
        lead = [np.linalg.cond(a[:j, :j]) for j in range(1, a.shape[0])]
        if lead and max(lead) > 1e12:
            r = _solve_r_dense(a)
    except np.linalg.LinAlgError:
        r = _solve_r_dense(a)
    return y @ r - x_base


def real_representation(x):
    """2n x 2p real matrix [[Re X, Im X], [-Im X, Re X]]."""
    x = np.asarray(x)
    re, im = x.real, x.imag
    return np.block([[re, im], [-im, re]])


def from_real_representation(xbar):
    n2, p2 = xbar.shape
    n, p = n2 // 2, p2 // 2
    return xbar[:n, :p] + 1j * xbar[:n, p:]


def symplectic_j(k):
    z = np.zeros((k, k))
    i = np.eye(k)
    return np.block([[z, i], [-i, z]])


def real_tangent_project(xbar, gbar):
    """Real Stiefel projection (I - Y Y^T) G + Y skew(Y^T G) in R^{2n x 2p}."""
    ytg = xbar.T @ gbar
    return gbar - xbar @ ytg + xbar @ (0.5 * (ytg - ytg.T))
