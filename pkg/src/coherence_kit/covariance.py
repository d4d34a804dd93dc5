"""Feasibility and synthesis for channels covariant under all diagonal unitaries.

A channel commuting with every diagonal unitary has only two kinds of Kraus
operators: diagonal matrices and single-entry hops |x><x'|. Whether one state
can reach another under such channels reduces to positivity of a ratio matrix
built from the two states, and a feasible instance yields an explicit channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, apply
from .numerics import eig_hermitian
from .states import DensityMatrix
from .transforms import TransformDecision, _trace_distance

PSD_TOL = 1e-9


@dataclass(frozen=True)
class NQMatrix:
    """Hermitian ratio matrix with q_xx = min(sigma_xx/rho_xx, 1), q_xx' = sigma_xx'/rho_xx'."""

    q: np.ndarray


@dataclass(frozen=True)
class NCovariantSpec:
    """Gram matrix H of diagonal-operator columns plus a column-stochastic R.

    R's diagonal equals H's; off-diagonal entries of R are the squared hop
    amplitudes.
    """

    h: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        h, r = np.asarray(self.h), np.asarray(self.r)
        if eig_hermitian(h).eigenvalues[0] < -PSD_TOL:
            raise ValueError("Gram matrix must be PSD")
        if np.min(r) < -1e-12 or np.max(np.abs(r.sum(axis=0) - 1.0)) > 1e-9:
            raise ValueError("transfer matrix must be column stochastic")
        if np.max(np.abs(np.diag(r) - np.diag(h).real)) > 1e-10:
            raise ValueError("transfer diagonal must match the Gram diagonal")


def n_q_matrix(rho: DensityMatrix, sigma: DensityMatrix) -> NQMatrix:
    """Build the ratio matrix; requires every off-diagonal of rho nonzero."""
    if rho.dim != sigma.dim:
        raise ValueError("states must share a dimension")
    d = rho.dim
    off = np.abs(rho.mat - np.diag(np.diag(rho.mat)))
    if d > 1 and np.min(off + np.eye(d)) <= 1e-12:
        raise ValueError("all off-diagonal entries of the source must be nonzero")
    diag = np.diag(rho.mat).real
    if np.min(diag) <= 0.0:
        raise ValueError("source diagonal entries must be strictly positive")
    q = sigma.mat / rho.mat
    np.fill_diagonal(q, np.minimum(np.diag(sigma.mat).real / diag, 1.0))
    q = (q + q.conj().T) / 2.0
    return NQMatrix(q=q)


def is_n_covariant(ch: KrausChannel, tol: float = PSD_TOL) -> bool:
    """Structural test: E(|x><x'|) sits on entry (x, x') alone for x != x',
    and E(|x><x|) is diagonal."""
    if ch.din != ch.dout:
        raise ValueError("covariance test needs a square channel")
    g = ch.unit_actions()
    d = ch.din
    for x in range(d):
        for z in range(d):
            block = g[:, :, x, z].copy()
            if x == z:
                block[np.arange(d), np.arange(d)] = 0.0
            else:
                block[x, z] = 0.0
            if np.max(np.abs(block)) > tol:
                return False
    return True


def commutes_with_diagonal_unitaries(
    ch: KrausChannel, samples: int = 20, seed: int = 0, tol: float = 1e-8
) -> bool:
    """Monte-Carlo cross-check of diagonal-unitary covariance."""
    if ch.din != ch.dout:
        raise ValueError("covariance test needs a square channel")
    rng = np.random.default_rng(seed)
    d = ch.din
    g = ch.unit_actions()
    for _ in range(samples):
        phases = np.exp(2j * np.pi * rng.random(d))
        u = np.diag(phases)
        for x in range(d):
            for z in range(d):
                lhs = phases[x] * np.conj(phases[z]) * g[:, :, x, z]
                lhs = u.conj().T @ lhs @ u
                if np.max(np.abs(lhs - g[:, :, x, z])) > tol:
                    return False
    return True


def n_feasible(rho: DensityMatrix, sigma: DensityMatrix) -> TransformDecision:
    """Is sigma reachable from rho by a diagonal-unitary-covariant channel?"""
    q = n_q_matrix(rho, sigma).q
    dec = eig_hermitian(q)
    if dec.eigenvalues[0] < -PSD_TOL:
        return TransformDecision(
            False,
            violation={
                "monotone": "ratio_matrix_psd",
                "lhs": float(dec.eigenvalues[0]),
                "rhs": 0.0,
            },
        )
    return TransformDecision(True, witness=n_construct(rho, sigma))


def _northwest_corner(supply: np.ndarray, demand: np.ndarray) -> np.ndarray:
    """Column-stochastic C with demand = C @ supply, by the greedy corner rule."""
    rows, cols = demand.size, supply.size
    amounts = np.zeros((rows, cols))
    d_rem = demand.astype(float).copy()
    s_rem = supply.astype(float).copy()
    i = j = 0
    while i < rows and j < cols:
        move = min(d_rem[i], s_rem[j])
        amounts[i, j] = move
        d_rem[i] -= move
        s_rem[j] -= move
        if d_rem[i] <= 1e-15:
            i += 1
        if s_rem[j] <= 1e-15:
            j += 1
    c = np.zeros_like(amounts)
    for j in range(cols):
        if supply[j] > 1e-15:
            c[:, j] = amounts[:, j] / supply[j]
    return c


def n_covariant_spec(rho: DensityMatrix, sigma: DensityMatrix) -> NCovariantSpec:
    """Gram/transfer pair realizing a feasible transformation.

    Takes the ratio matrix itself as the Gram matrix of the diagonal
    operators, and routes the leftover population flow with a greedy
    transportation plan.
    """
    d = rho.dim
    q = n_q_matrix(rho, sigma).q
    if eig_hermitian(q).eigenvalues[0] < -PSD_TOL:
        raise ValueError("ratio matrix is not PSD: transformation infeasible")

    rho_d = np.diag(rho.mat).real
    sig_d = np.diag(sigma.mat).real
    up = [x for x in range(d) if sig_d[x] >= rho_d[x] - 1e-15]
    down = [x for x in range(d) if x not in up]
    r_mat = np.zeros((d, d))
    for x in up:
        r_mat[x, x] = 1.0
    if down:
        demand = np.array([sig_d[x] - rho_d[x] for x in up])
        supply = np.array([rho_d[x] - sig_d[x] for x in down])
        c = _northwest_corner(supply, demand)
        for jj, x_col in enumerate(down):
            ratio = sig_d[x_col] / rho_d[x_col]
            r_mat[x_col, x_col] = ratio
            for ii, x_row in enumerate(up):
                r_mat[x_row, x_col] = c[ii, jj] * (1.0 - ratio)
    return NCovariantSpec(h=q, r=r_mat)


def channel_from_n_spec(spec: NCovariantSpec) -> KrausChannel:
    """Kraus operators (diagonals plus hops) realizing a Gram/transfer pair."""
    d = spec.h.shape[0]
    dec = eig_hermitian(spec.h)
    vals = np.clip(dec.eigenvalues, 0.0, None)
    # F[k, x] = sqrt(lam_k) V[x, k] makes sum_k F[k,x] conj(F[k,z]) = H[x,z]
    factor = (np.sqrt(vals)[:, None]) * dec.eigenvectors.T
    ops = [np.diag(factor[j]).astype(complex) for j in range(d) if vals[j] > 1e-14]
    for x_col in range(d):
        for x_row in range(d):
            if x_row != x_col and spec.r[x_row, x_col] > 1e-15:
                hop = np.zeros((d, d), dtype=complex)
                hop[x_row, x_col] = np.sqrt(spec.r[x_row, x_col])
                ops.append(hop)
    return KrausChannel(ops, atol=1e-8)


def n_construct(rho: DensityMatrix, sigma: DensityMatrix) -> KrausChannel:
    """Diagonal-unitary-covariant channel mapping rho to sigma."""
    channel = channel_from_n_spec(n_covariant_spec(rho, sigma))
    if not is_n_covariant(channel, tol=1e-7):
        raise ArithmeticError("constructed channel lost diagonal-unitary covariance")
    out = apply(channel, rho)
    if _trace_distance(out, sigma) > 1e-8:
        raise ArithmeticError("constructed channel misses the target state")
    return channel


def random_n_covariant_channel(d: int, rng: np.random.Generator) -> KrausChannel:
    """Random channel in diagonal-plus-hop form.

    Draws a Gram matrix with diagonal entries in [0, 1] for the diagonal
    operators and fills each column's leftover weight with hop operators.
    """
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    gram = g.conj().T @ g
    scale = np.diag(gram).real
    lift = 1.0 / np.sqrt(scale)
    gram = gram * np.outer(lift, lift)  # unit diagonal
    shrink = 0.15 + 0.8 * rng.random(d)
    gram = gram * np.outer(np.sqrt(shrink), np.sqrt(shrink))
    dec = eig_hermitian(gram)
    vals = np.clip(dec.eigenvalues, 0.0, None)
    factor = (np.sqrt(vals)[:, None]) * dec.eigenvectors.T
    ops = [np.diag(factor[j]).astype(complex) for j in range(d) if vals[j] > 1e-14]
    for col in range(d):
        leftover = 1.0 - shrink[col]
        split = rng.dirichlet(np.ones(d - 1)) * leftover
        k = 0
        for row in range(d):
            if row == col:
                continue
            if split[k] > 1e-14:
                hop = np.zeros((d, d), dtype=complex)
                hop[row, col] = np.sqrt(split[k])
                ops.append(hop)
            k += 1
    return KrausChannel(ops)


# ---------------------------------------------------------------------------
# The family Phi_t(rho) = (1+t) * dephased(rho) - rho and its CP threshold.
# ---------------------------------------------------------------------------


def phi_t(rho: DensityMatrix, t: float) -> np.ndarray:
    """Evaluate (1+t) * dephased(rho) - rho (not a state below threshold)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return (1.0 + t) * np.diag(np.diag(rho.mat)) - rho.mat


def is_phi_t_cp(d: int, t: float, tol: float = PSD_TOL) -> bool:
    """PSD test of the map's Choi matrix (1+t) sum |jj><jj| - |Omega><Omega|."""
    diag_idx = np.arange(d) * d + np.arange(d)
    omega = np.zeros(d * d)
    omega[diag_idx] = 1.0
    j = -np.outer(omega, omega)
    j[diag_idx, diag_idx] += 1.0 + t
    return bool(eig_hermitian(j).eigenvalues[0] >= -tol)


def phi_t_threshold(d: int) -> float:
    """Complete-positivity threshold of the family: d - 1."""
    if d < 1:
        raise ValueError("dimension must be positive")
    return float(d - 1)
