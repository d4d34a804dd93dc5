"""Coherence measures: Renyi families, robustness measures, and rate calculators.

All values are in bits (log base 2). Each measure returns a MonotoneReport
carrying the value, the evaluation method, and an optional witness
(an optimal diagonal majorant, an optimal ratio vector, or similar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    LinearProgram,
    _simplex,
    eig_hermitian,
    mat_power_psd,
    solve_lp,
    trace_norm,
)
from .states import DensityMatrix, PureStateVector, SchmidtVector

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class MonotoneReport:
    name: str
    value: float
    method: str  # closed_form | cutting_plane | eigenvalue
    witness: object = None

    def to_json_dict(self, include_witness: bool = False) -> dict:
        payload = {"name": self.name, "value": self.value, "method": self.method}
        if include_witness and self.witness is not None:
            w = np.asarray(self.witness)
            if np.iscomplexobj(w):
                payload["witness"] = [[float(z.real), float(z.imag)] for z in w.ravel()]
            else:
                payload["witness"] = [float(v) for v in w.ravel()]
        return payload


def _prob_vector(p) -> np.ndarray:
    if isinstance(p, SchmidtVector):
        vec = p.probs
    else:
        vec = np.asarray(p, dtype=float).ravel()
        if np.min(vec, initial=0.0) < -1e-10:
            raise ValueError("negative probabilities")
        if abs(vec.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")
    return np.clip(vec, 0.0, None)


def renyi(p, alpha: float) -> float:
    """Renyi entropy S_alpha in bits; alpha=1 is Shannon, alpha=inf is min-entropy."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    vec = _prob_vector(p)
    vec = vec[vec > 1e-15]
    if math.isinf(alpha):
        return float(-np.log2(np.max(vec)))
    if alpha == 1.0:
        return float(-np.sum(vec * np.log2(vec)))
    if alpha == 0.0:
        return float(np.log2(vec.size))
    return float(np.log2(np.sum(vec**alpha)) / (1.0 - alpha))


def _entropy_of_spectrum(mat: np.ndarray) -> float:
    vals = eig_hermitian(mat).eigenvalues
    vals = vals[vals > 1e-15]
    return float(-np.sum(vals * np.log2(vals)))


def c_rel(rho: DensityMatrix) -> MonotoneReport:
    """Relative entropy of coherence S(dephased) - S(rho)."""
    diag = np.diag(rho.mat).real
    diag = diag[diag > 1e-15]
    s_deph = float(-np.sum(diag * np.log2(diag)))
    return MonotoneReport("c_rel", s_deph - _entropy_of_spectrum(rho.mat), "closed_form")


def c_alpha(rho: DensityMatrix, alpha: float) -> MonotoneReport:
    """Renyi coherence monotone, closed form, for alpha in [0, 2].

    (alpha/(alpha-1)) * log2 sum_x <x|rho^alpha|x>^(1/alpha); alpha = 1
    dispatches to the relative entropy of coherence, alpha = 0 is the
    analytic limit -log2 max_x <x|P|x> with P the support projector.
    """
    if not 0.0 <= alpha <= 2.0:
        raise ValueError("alpha must lie in [0, 2]")
    name = f"c_alpha[{alpha:g}]"
    if alpha == 1.0:
        return MonotoneReport(name, c_rel(rho).value, "closed_form")
    if alpha == 0.0:
        proj = mat_power_psd(rho.mat, 0.0)
        top = float(np.max(np.diag(proj).real))
        return MonotoneReport(name, -math.log2(top), "closed_form")
    powered = mat_power_psd(rho.mat, alpha)
    diag = np.clip(np.diag(powered).real, 0.0, None)
    total = float(np.sum(diag ** (1.0 / alpha)))
    value = (alpha / (alpha - 1.0)) * math.log2(total)
    return MonotoneReport(name, value, "closed_form")


def c_l1(rho: DensityMatrix) -> MonotoneReport:
    """Sum of off-diagonal moduli."""
    off = np.abs(rho.mat) - np.diag(np.abs(np.diag(rho.mat)))
    return MonotoneReport("c_l1", float(off.sum()), "closed_form")


def c_q_alpha_pure(psi: PureStateVector, alpha: float) -> MonotoneReport:
    """Sandwiched-Renyi coherence of a pure state: S_gamma(p), gamma = a/(2a-1)."""
    if alpha < 0.5:
        raise ValueError("alpha must be at least 1/2")
    if math.isinf(alpha):
        gamma = 0.5
    elif alpha == 0.5:
        gamma = math.inf
    else:
        gamma = alpha / (2.0 * alpha - 1.0)
    return MonotoneReport(f"c_q_alpha[{alpha:g}]", renyi(psi.probs, gamma), "closed_form")


def c_delta_alpha(rho: DensityMatrix, alpha: float, side: str = "right") -> MonotoneReport:
    """Dephasing-relative Renyi monotone.

    right: (1/(alpha-1)) log2 Tr[rho^alpha (dephased)^{1-alpha}]
    left:  same with the arguments swapped. At alpha = 1 these become the
    corresponding relative entropies; the left variant is +inf when rho is
    rank deficient (support of the dephased state exceeds support of rho).
    """
    if not 0.0 <= alpha <= 2.0:
        raise ValueError("alpha must lie in [0, 2]")
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    name = f"c_delta_alpha[{alpha:g},{side}]"
    delta = np.diag(np.diag(rho.mat))
    if alpha == 1.0:
        if side == "right":
            return MonotoneReport(name, c_rel(rho).value, "closed_form")
        dec = eig_hermitian(rho.mat)
        rank = int(np.sum(dec.eigenvalues > 1e-12))
        if int(np.sum(np.diag(delta).real > 1e-12)) > rank:
            return MonotoneReport(name, math.inf, "closed_form")
        log_rho = (
            dec.eigenvectors * np.log2(np.clip(dec.eigenvalues, 1e-300, None))
        ) @ dec.eigenvectors.conj().T
        diag_p = np.clip(np.diag(delta).real, 0.0, None)
        mask = diag_p > 1e-15
        value = float(
            np.sum(diag_p[mask] * np.log2(diag_p[mask])) - np.trace(delta @ log_rho).real
        )
        return MonotoneReport(name, value, "closed_form")
    if side == "right":
        first, second = rho.mat, delta
    else:
        first, second = delta, rho.mat
    if alpha > 1.0 and side == "left":
        rank = int(np.sum(eig_hermitian(rho.mat).eigenvalues > 1e-12))
        if int(np.sum(np.abs(np.diag(rho.mat)) > 1e-12)) > rank:
            return MonotoneReport(name, math.inf, "closed_form")
    a_pow = mat_power_psd(first, alpha)
    b_pow = mat_power_psd(second, 1.0 - alpha)
    val = np.trace(a_pow @ b_pow).real
    value = math.log2(max(val, 1e-300)) / (alpha - 1.0)
    return MonotoneReport(name, value, "closed_form")


def trace_norm_coherence(rho: DensityMatrix) -> MonotoneReport:
    """Trace norm of rho minus its dephased version."""
    return MonotoneReport(
        "trace_norm_coherence", trace_norm(rho.mat - np.diag(np.diag(rho.mat))), "closed_form"
    )


def _is_pure(rho: DensityMatrix) -> bool:
    return float(np.trace(rho.mat @ rho.mat).real) >= 1.0 - 1e-12


def _is_real_nonneg(rho: DensityMatrix) -> bool:
    return bool(
        np.max(np.abs(rho.mat.imag)) <= 1e-12 and np.min(rho.mat.real) >= -1e-12
    )


def _min_sum_over_cuts(cuts, n: int) -> np.ndarray:
    """min 1.d subject to a.d >= b per cut and d >= 0, via the dual LP.

    The dual (min -b.y s.t. A^T y + s = 1, y, s >= 0) starts from the slack
    basis, so the same Bland simplex solves it in one phase; the primal d is
    read off the optimal reduced costs of the slack columns.
    """
    a_mat = np.array([a for a, _ in cuts], dtype=float)
    b_vec = np.array([b for _, b in cuts], dtype=float)
    m = len(cuts)
    try:
        table = np.hstack([a_mat.T, np.eye(n), np.ones((n, 1))])
        basis = list(range(m, m + n))
        cost = np.concatenate([-b_vec, np.zeros(n)])
        _simplex(table, basis, cost)
        reduced = cost - cost[basis] @ table[:, : m + n]
        return np.clip(reduced[m : m + n], 0.0, None)
    except ArithmeticError:
        # heavily degenerate instances occasionally stall the dual path;
        # the two-phase primal engine is the safety net
        d_vec, _ = solve_lp(LinearProgram(np.ones(n), cuts))
        return d_vec


def _c_r_cutting_plane(rho: DensityMatrix, max_iter: int = 500):
    """min{ sum d - 1 : diag(d) >= rho, d >= 0 } by eigenvector cutting planes.

    Starts from d = lambda_max * ones (always feasible) and repeatedly adds
    the most-violated eigenvector cut of diag(d) - rho until the minimum
    eigenvalue clears -1e-9. Axis cuts d_x >= rho_xx are seeded up front.
    """
    d_dim = rho.dim
    diag_rho = np.clip(np.diag(rho.mat).real, 0.0, None)
    axis_cuts = []
    for x in range(d_dim):
        axis = np.zeros(d_dim)
        axis[x] = 1.0
        axis_cuts.append((axis, float(diag_rho[x])))
    cuts = []
    history = []
    gaps = []
    prune = True
    # lambda_max * ones is a feasible a-priori incumbent; the LP iterates
    # climb toward it from below until one of them (or a window average of
    # them, which shares the lower-bound property) is itself PSD-feasible.
    # Every violated eigenvector of diag(d) - rho supplies a cut; slack cuts
    # are pruned while the infeasibility shrinks, and pruning is switched off
    # if progress stalls (degenerate optimal faces can otherwise cycle).
    for _ in range(max_iter):
        d_vec = _min_sum_over_cuts(axis_cuts + cuts, d_dim)
        history.append(d_vec)
        candidates = [d_vec]
        candidates.extend(
            np.mean(history[-k:], axis=0) for k in (2, 4, 8, 16, 32) if len(history) >= k
        )
        feasible = None
        for cand in candidates:
            gap = np.diag(cand).astype(complex) - rho.mat
            mu = float(np.linalg.eigvalsh((gap + gap.conj().T) / 2.0)[0])
            if cand is d_vec:
                gaps.append(mu)
            if mu >= -1e-9:
                feasible = cand
                break
        if feasible is not None:
            return float(np.sum(feasible) - 1.0), feasible
        if prune and len(gaps) > 15 and gaps[-1] < 0.97 * gaps[-16]:
            prune = False
        gap = np.diag(d_vec).astype(complex) - rho.mat
        vals, vecs = np.linalg.eigh((gap + gap.conj().T) / 2.0)
        if prune:
            cuts = [
                (coeffs, bound)
                for coeffs, bound in cuts
                if coeffs @ d_vec - bound <= 1e-7 * max(1.0, abs(bound))
            ]
        for idx in range(d_dim):
            if vals[idx] >= -1e-9:
                break
            vec = vecs[:, idx]
            coeffs = np.abs(vec) ** 2
            bound = float((vec.conj() @ rho.mat @ vec).real)
            cuts.append((coeffs, bound))
    raise ArithmeticError("cutting-plane iteration cap exceeded")


def c_r(rho: DensityMatrix, method: str = "auto") -> MonotoneReport:
    """Robustness of coherence.

    Closed forms: pure states give (sum sqrt p)^2 - 1, qubits give 2r, and
    entrywise-nonnegative real states give the l1 value; anything else (or
    method='cutting_plane') runs the LP cutting-plane solver. The witness is
    the optimal diagonal majorant's diagonal when the solver runs.
    """
    if method not in ("auto", "cutting_plane"):
        raise ValueError("method must be 'auto' or 'cutting_plane'")
    if method == "auto":
        if _is_pure(rho):
            p = np.clip(np.diag(rho.mat).real, 0.0, None)
            return MonotoneReport("c_r", float(np.sum(np.sqrt(p)) ** 2 - 1.0), "closed_form")
        if rho.dim == 2:
            return MonotoneReport("c_r", 2.0 * abs(rho.mat[0, 1]), "closed_form")
        if _is_real_nonneg(rho):
            return MonotoneReport("c_r", c_l1(rho).value, "closed_form")
    value, d_vec = _c_r_cutting_plane(rho)
    return MonotoneReport("c_r", value, "cutting_plane", witness=d_vec)


def c_delta_r(rho: DensityMatrix) -> MonotoneReport:
    """Dephasing robustness: the least t with (1+t) * dephased - rho PSD.

    Computed as lambda_max(D^{-1/2} rho D^{-1/2}) - 1 on the support of the
    dephased state D; the witness is the maximizing ratio vector.
    """
    diag = np.diag(rho.mat).real
    keep = diag > 1e-12
    if not np.all(keep):
        dropped = ~keep
        if np.max(np.abs(rho.mat[dropped, :]), initial=0.0) > 1e-10:
            raise ValueError("zero-diagonal row carries off-diagonal weight")
    sub = rho.mat[np.ix_(keep, keep)]
    scale = 1.0 / np.sqrt(diag[keep])
    core = sub * np.outer(scale, scale)
    dec = eig_hermitian(core)
    lam = float(dec.eigenvalues[-1])
    top = dec.eigenvectors[:, -1] * scale
    witness = np.zeros(rho.dim, dtype=complex)
    witness[keep] = top / np.linalg.norm(top)
    return MonotoneReport("c_delta_r", max(lam - 1.0, 0.0), "eigenvalue", witness=witness)


def log_robustness_dephasing(rho: DensityMatrix) -> MonotoneReport:
    """log2(1 + dephasing robustness); between 0 and log2 d."""
    base = c_delta_r(rho)
    return MonotoneReport("r_d", math.log2(1.0 + base.value), "eigenvalue", witness=base.witness)


def _trace_distance_to_diag(rho: DensityMatrix, q: np.ndarray) -> float:
    return trace_norm(rho.mat - np.diag(q.astype(complex)))


def monotone_from_divergence(
    rho: DensityMatrix,
    divergence: str = "trace_distance",
    reference_set: str = "dephased_singleton",
) -> MonotoneReport:
    """Distance-based monotone for a supported (divergence, reference set) pair.

    dephased_singleton: the exact trace-norm distance to the dephased state.
    incoherent_set: minimized over diagonal states by pairwise coordinate
    descent on the diagonal weights (convergence threshold 1e-7).
    """
    if divergence != "trace_distance":
        raise ValueError(f"unsupported divergence {divergence!r}")
    if reference_set == "dephased_singleton":
        return MonotoneReport(
            "div[trace_distance,dephased_singleton]",
            trace_norm_coherence(rho).value,
            "closed_form",
        )
    if reference_set != "incoherent_set":
        raise ValueError(f"unsupported reference set {reference_set!r}")
    q = np.clip(np.diag(rho.mat).real, 0.0, None)
    q = q / q.sum()
    best = _trace_distance_to_diag(rho, q)
    d_dim = rho.dim
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(200):
        improved = 0.0
        for i in range(d_dim):
            for j in range(i + 1, d_dim):
                lo, hi = -q[j], q[i]
                if hi - lo < 1e-14:
                    continue
                x1 = hi - golden * (hi - lo)
                x2 = lo + golden * (hi - lo)

                def shifted(t):
                    trial = q.copy()
                    trial[i] -= t
                    trial[j] += t
                    return _trace_distance_to_diag(rho, trial)

                f1, f2 = shifted(x1), shifted(x2)
                for _ in range(60):
                    if f1 <= f2:
                        hi, x2, f2 = x2, x1, f1
                        x1 = hi - golden * (hi - lo)
                        f1 = shifted(x1)
                    else:
                        lo, x1, f1 = x1, x2, f2
                        x2 = lo + golden * (hi - lo)
                        f2 = shifted(x2)
                t_best = (lo + hi) / 2.0
                val = shifted(t_best)
                if val < best - 1e-15:
                    improved += best - val
                    best = val
                    q[i] -= t_best
                    q[j] += t_best
        if improved < 1e-7:
            break
    return MonotoneReport(
        "div[trace_distance,incoherent_set]", best, "closed_form", witness=q
    )


def distillation_rate_pure(psi: PureStateVector) -> float:
    """Shannon entropy (bits) of the squared amplitudes."""
    return renyi(psi.probs, 1.0)


def dilution_ratio(psi: PureStateVector, phi: PureStateVector) -> float:
    """Entropy ratio of the two squared-amplitude distributions."""
    denom = distillation_rate_pure(phi)
    if denom <= 1e-12:
        raise ValueError("target state is incoherent (zero entropy)")
    return distillation_rate_pure(psi) / denom
