"""State-transformation deciders with constructive channel witnesses.

Pure-state convertibility under strictly incoherent operations is governed by
majorization of the squared-amplitude vectors; the qubit mixed-state order is
governed by the two robustness measures; and a qubit can be pumped into a
higher-rank pure qudit by maximally incoherent operations exactly on the
`sum sqrt(q) <= sqrt(2)` region. Every positive verdict carries a Kraus
witness which is re-verified (CPTP, class membership, output match) before it
is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel, apply, is_io_rep, is_mio, is_pio_rep, is_sio_rep
from .monotones import c_delta_r, c_r
from .numerics import birkhoff_decompose, trace_norm
from .states import (
    DensityMatrix,
    PureStateVector,
    SchmidtVector,
    qubit_standard_form,
    schmidt_vector,
)

WITNESS_TOL = 1e-8


@dataclass(frozen=True)
class MajorizationCheck:
    holds: bool
    failing_k: int | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class TransformDecision:
    verdict: bool
    witness: KrausChannel | None = None
    violation: dict | None = None
    detail: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        payload: dict = {"verdict": self.verdict}
        if self.witness is not None:
            payload["witness"] = self.witness.to_json_dict()
        if self.violation is not None:
            payload["violation"] = self.violation
        return payload


def _padded_desc(*vectors) -> list:
    size = max(v.size for v in vectors)
    return [np.sort(np.pad(v, (0, size - v.size)))[::-1] for v in vectors]


def majorizes(target: SchmidtVector, source: SchmidtVector) -> MajorizationCheck:
    """True iff every partial sum of source is dominated by target's.

    Vectors are zero-padded to a common length; on failure the smallest
    violating prefix length k (1-based) is reported.
    """
    t, s = _padded_desc(target.probs, source.probs)
    src_sums = np.cumsum(s)
    tgt_sums = np.cumsum(t)
    for k in range(t.size):
        if src_sums[k] > tgt_sums[k] + 1e-12:
            return MajorizationCheck(False, failing_k=k + 1)
    return MajorizationCheck(True)


def _trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    return 0.5 * trace_norm(a.mat - b.mat)


def _verify_witness(channel: KrausChannel, source: DensityMatrix, target: DensityMatrix):
    out = apply(channel, source)
    dist = _trace_distance(out, target)
    if dist > WITNESS_TOL:
        raise ArithmeticError(f"witness output misses the target by {dist:.3e}")


def _sorting_gauge(psi: PureStateVector) -> tuple:
    """Incoherent unitary g with (g @ psi) real, nonnegative, descending."""
    order = np.argsort(-np.abs(psi.amps), kind="stable")
    d = psi.dim
    perm = np.zeros((d, d), dtype=complex)
    perm[np.arange(d), order] = 1.0
    phases = np.ones(d, dtype=complex)
    moved = psi.amps[order]
    nonzero = np.abs(moved) > 1e-15
    phases[nonzero] = np.exp(-1j * np.angle(moved[nonzero]))
    gauge = np.diag(phases) @ perm
    sorted_amps = np.abs(moved)
    return gauge, sorted_amps


def sio_pure_construct(psi: PureStateVector, phi: PureStateVector) -> KrausChannel:
    """Strictly incoherent Kraus set mapping psi to phi.

    Works in the sorted-amplitude frame: find a doubly stochastic D with
    tau(psi) = D tau(phi) via a chain of 2x2 averaging steps, split D into
    permutations, and Hadamard each permutation against the amplitude-ratio
    matrix. Zero-amplitude input columns keep an identity block per operator
    so the sum rule closes exactly. Sorting gauges are composed back in.
    """
    if psi.dim != phi.dim:
        raise ValueError("construction expects equal input and output dimensions")
    check = majorizes(schmidt_vector(phi), schmidt_vector(psi))
    if not check:
        raise ValueError(f"majorization fails at k={check.failing_k}")
    d = psi.dim
    g_in, amps_in = _sorting_gauge(psi)
    g_out, amps_out = _sorting_gauge(phi)
    x = amps_in**2
    y = amps_out**2

    dmat = _tee_transform_chain(x, y)
    decomposition = birkhoff_decompose(dmat, tol=1e-8)

    support = amps_in > 1e-12
    ratio = np.zeros((d, d))
    cols = np.where(support)[0]
    ratio[:, cols] = amps_out[:, None] / amps_in[cols][None, :]
    zero_block = np.diag((~support).astype(float))

    ops = []
    for weight, perm in decomposition.terms:
        perm_t = np.zeros((d, d))
        perm_t[perm, np.arange(d)] = 1.0  # transpose of the permutation matrix
        op = np.sqrt(weight) * (perm_t * ratio + zero_block)
        ops.append(g_out.conj().T @ op @ g_in)
    channel = KrausChannel(ops, atol=WITNESS_TOL)
    if not is_sio_rep(channel):
        raise ArithmeticError("constructed operators lost strict incoherence")
    _verify_witness(channel, psi.to_density(), phi.to_density())
    return channel


def _tee_transform_chain(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Doubly stochastic D with x = D y from 2x2 averaging steps.

    x and y are descending with equal sums and x majorized by y; each step
    moves mass between the last over-supplied coordinate and the next
    under-supplied one, pinning at least one coordinate per step.
    """
    d = x.size
    dmat = np.eye(d)
    cur = y.astype(float).copy()
    for _ in range(d):
        diff = cur - x
        over = np.where(diff > 1e-13)[0]
        if over.size == 0:
            break
        j = int(over[-1])
        under = np.where(diff < -1e-13)[0]
        under = under[under > j]
        k = int(under[0])
        delta = min(cur[j] - x[j], x[k] - cur[k])
        t = delta / (cur[j] - cur[k])
        step = np.eye(d)
        step[j, j] = step[k, k] = 1.0 - t
        step[j, k] = step[k, j] = t
        cur = step @ cur
        dmat = step @ dmat
    if np.max(np.abs(dmat @ y - x)) > 1e-10:
        raise ArithmeticError("averaging chain failed to reach the target vector")
    return dmat


def sio_pure_decide(psi: PureStateVector, phi: PureStateVector) -> TransformDecision:
    """Is psi -> phi possible by strictly incoherent operations?"""
    check = majorizes(schmidt_vector(phi), schmidt_vector(psi))
    if not check:
        return TransformDecision(False, violation={"failing_k": check.failing_k})
    return TransformDecision(True, witness=sio_pure_construct(psi, phi))


def multi_outcome_decide(psi: PureStateVector, ensemble) -> bool:
    """Is the multi-outcome transformation psi -> {(p_i, phi_i)} possible?

    Holds iff tau(psi) is majorized by the probability mix of the outcome
    Schmidt vectors.
    """
    weights = np.array([float(p) for p, _ in ensemble])
    if weights.size == 0 or np.min(weights) < -1e-12 or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("invalid ensemble weights")
    vecs = _padded_desc(psi.probs, *(schmidt_vector(s).probs for _, s in ensemble))
    source = vecs[0]
    mixed = sum(w * v for w, v in zip(weights, vecs[1:]))
    mixed = np.sort(mixed)[::-1]
    return bool(
        majorizes(SchmidtVector(mixed), SchmidtVector(np.sort(source)[::-1])).holds
    )


def max_conversion_probability(psi: PureStateVector, phi: PureStateVector) -> float:
    """Largest p with psi -> phi succeeding at probability p under SIO.

    min over k of the tail-sum ratios of the descending squared amplitudes,
    zero-padded to a common length; 1 exactly when the target majorizes the
    source.
    """
    s, t = _padded_desc(psi.probs, phi.probs)
    src_tail = np.cumsum(s[::-1])[::-1]
    tgt_tail = np.cumsum(t[::-1])[::-1]
    best = 1.0
    for k in range(s.size):
        if tgt_tail[k] > 1e-15:
            best = min(best, src_tail[k] / tgt_tail[k])
    return float(max(best, 0.0))


# ---------------------------------------------------------------------------
# Qubit -> qudit pure transformations under maximally incoherent operations.
# ---------------------------------------------------------------------------


def mio_qubit_pure_construct(q) -> KrausChannel:
    """Maximally incoherent channel taking |+> to sum_y sqrt(q_y) |y>.

    Uses d'+1 operators built from r_y = sqrt(q_y)/s with s = sum sqrt(q):
    column 0 of operator j holds sqrt(r_j) e_j, column 1 holds
    sqrt(2 q_y) c_j - sqrt(r_y) delta_{yj}, with c_j = sqrt(s/2) q_j^(1/4)
    and a completing coefficient c_{d'+1} = sqrt(1 - s^2/2). Feasible exactly
    when s <= sqrt(2); at the boundary the completing operator vanishes.
    """
    qv = np.asarray(q, dtype=float).ravel()
    if qv.size < 3:
        raise ValueError("target needs dimension greater than 2")
    if np.min(qv) <= 1e-15:
        raise ValueError("all target probabilities must be strictly positive")
    if abs(qv.sum() - 1.0) > 1e-9:
        raise ValueError("target probabilities must sum to 1")
    s = float(np.sum(np.sqrt(qv)))
    radicand = 1.0 - s * s / 2.0
    if radicand < -1e-12:
        raise ValueError(f"sum of square roots {s:.6f} exceeds sqrt(2)")
    radicand = max(radicand, 0.0)
    d_out = qv.size
    r = np.sqrt(qv) / s
    c = np.sqrt(s / 2.0) * qv**0.25
    c_last = math.sqrt(radicand)
    ops = []
    for j in range(d_out + 1):
        cj = c[j] if j < d_out else c_last
        op = np.zeros((d_out, 2), dtype=complex)
        if j < d_out:
            op[j, 0] = np.sqrt(r[j])
        op[:, 1] = np.sqrt(2.0 * qv) * cj
        if j < d_out:
            op[j, 1] -= np.sqrt(r[j])
        if j == d_out and c_last < 1e-13:
            continue
        ops.append(op)
    channel = KrausChannel(ops)
    if not is_mio(channel):
        raise ArithmeticError("constructed channel lost the incoherence property")
    plus = PureStateVector(np.array([1.0, 1.0]) / math.sqrt(2.0))
    target = PureStateVector(np.sqrt(qv).astype(complex))
    _verify_witness(channel, plus.to_density(), target.to_density())
    return channel


def mio_qubit_pure_decide(p, q) -> TransformDecision:
    """Can the pure qubit with probabilities p reach the pure qudit q by MIO?

    Requires p uniform and sum sqrt(q) <= sqrt(2); both checks carry a
    1e-12 slack. The witness channel is built on a positive verdict.
    """
    pv = np.asarray(p, dtype=float).ravel()
    qv = np.asarray(q, dtype=float).ravel()
    if pv.size != 2 or np.min(pv) < -1e-12 or abs(pv.sum() - 1.0) > 1e-9:
        raise ValueError("source must be a qubit probability vector")
    if qv.size <= 2:
        raise ValueError("target dimension must exceed 2 (use qubit_decide instead)")
    if np.min(qv) <= 1e-15:
        raise ValueError("all target probabilities must be strictly positive")
    if abs(qv.sum() - 1.0) > 1e-9:
        raise ValueError("target probabilities must sum to 1")
    s = float(np.sum(np.sqrt(qv)))
    if abs(pv[0] - 0.5) > 1e-12:
        return TransformDecision(
            False, violation={"monotone": "uniform_source", "lhs": float(pv[0]), "rhs": 0.5}
        )
    if s > math.sqrt(2.0) + 1e-12:
        return TransformDecision(
            False,
            violation={"monotone": "sqrt_sum", "lhs": s, "rhs": math.sqrt(2.0)},
        )
    return TransformDecision(True, witness=mio_qubit_pure_construct(qv))


# ---------------------------------------------------------------------------
# Qubit mixed-state transformations.
# ---------------------------------------------------------------------------


def _qubit_cdr(p: float, r: float) -> float:
    if p >= 1.0 - 1e-12:
        return 0.0
    return r / math.sqrt(p * (1.0 - p))


def qubit_decide(rho: DensityMatrix, sigma: DensityMatrix) -> TransformDecision:
    """Decide rho -> sigma for qubits via the two robustness inequalities."""
    if rho.dim != 2 or sigma.dim != 2:
        raise ValueError("both states must be qubits")
    sf_in = qubit_standard_form(rho)
    sf_out = qubit_standard_form(sigma)
    cr_in, cr_out = 2.0 * sf_in.r, 2.0 * sf_out.r
    cdr_in = _qubit_cdr(sf_in.p, sf_in.r)
    cdr_out = _qubit_cdr(sf_out.p, sf_out.r)
    if cr_in < cr_out - 1e-12:
        return TransformDecision(
            False, violation={"monotone": "c_r", "lhs": cr_in, "rhs": cr_out}
        )
    if cdr_in < cdr_out - 1e-12:
        return TransformDecision(
            False, violation={"monotone": "c_delta_r", "lhs": cdr_in, "rhs": cdr_out}
        )
    return TransformDecision(True, witness=qubit_construct(rho, sigma))


def _qubit_peak_offdiagonal(p: float, q: float, r: float) -> float:
    if q >= p:
        return r * math.sqrt(q * (1.0 - q) / (p * (1.0 - p)))
    return r


def _qubit_stage_one(p: float, q: float):
    """Diagonal/antidiagonal pair {J, K} moving (p, r) to (q, r_peak)."""
    if abs(p - q) < 1e-14:
        return [np.eye(2, dtype=complex)]
    if p >= q:
        u = v = (p + q - 1.0) / (2.0 * p - 1.0)
    else:
        w = (p + q - 1.0) / (2.0 * q - 1.0)
        u = (q / p) * w
        v = ((1.0 - q) / (1.0 - p)) * w
    u = min(max(u, 0.0), 1.0)
    v = min(max(v, 0.0), 1.0)
    j_op = np.diag([math.sqrt(u), math.sqrt(v)]).astype(complex)
    k_op = np.array([[0.0, math.sqrt(1.0 - v)], [math.sqrt(1.0 - u), 0.0]], dtype=complex)
    if np.max(np.abs(k_op)) < 1e-13:
        return [j_op]
    return [j_op, k_op]


def qubit_construct(rho: DensityMatrix, sigma: DensityMatrix) -> KrausChannel:
    """Strictly incoherent channel realizing a feasible qubit transformation.

    Two stages on standard forms: first a {diagonal, antidiagonal} pair
    reaching the target populations at the largest compatible off-diagonal,
    then a dephasing pair diag(cos t, sin t) / diag(sin t, cos t) whose angle
    is bisected until the composed off-diagonal matches the target. The
    standard-form gauges of both states are folded into the operators.
    """
    if rho.dim != 2 or sigma.dim != 2:
        raise ValueError("both states must be qubits")
    sf_in = qubit_standard_form(rho)
    sf_out = qubit_standard_form(sigma)
    p, r = sf_in.p, sf_in.r
    q, t = sf_out.p, sf_out.r
    t_peak = _qubit_peak_offdiagonal(p, q, r)
    if 2.0 * r < 2.0 * t - 1e-12 or _qubit_cdr(p, r) < _qubit_cdr(q, t) - 1e-12:
        raise ValueError("transformation is not feasible for these qubits")

    stage_one = _qubit_stage_one(p, q)
    if t >= t_peak - 1e-12:
        ops = stage_one
    else:
        lo, hi = 0.0, math.pi / 4.0

        def off_diagonal(theta: float) -> float:
            d1 = np.diag([math.cos(theta), math.sin(theta)]).astype(complex)
            d2 = np.diag([math.sin(theta), math.cos(theta)]).astype(complex)
            composed = [dd @ op for dd in (d1, d2) for op in stage_one]
            state = sum(k @ np.array([[p, r], [r, 1 - p]]) @ k.conj().T for k in composed)
            return float(state[0, 1].real)

        for _ in range(60):
            mid = (lo + hi) / 2.0
            if off_diagonal(mid) < t:
                lo = mid
            else:
                hi = mid
        theta = (lo + hi) / 2.0
        d1 = np.diag([math.cos(theta), math.sin(theta)]).astype(complex)
        d2 = np.diag([math.sin(theta), math.cos(theta)]).astype(complex)
        ops = [dd @ op for dd in (d1, d2) for op in stage_one]

    gauged = [sf_out.gauge.conj().T @ op @ sf_in.gauge for op in ops]
    channel = KrausChannel(gauged, atol=WITNESS_TOL)
    if not is_sio_rep(channel):
        raise ArithmeticError("constructed operators lost strict incoherence")
    _verify_witness(channel, rho, sigma)
    return channel


# ---------------------------------------------------------------------------
# Pure-state transformations under physically incoherent operations.
# ---------------------------------------------------------------------------


def _match_blocks(values_desc, profile, tol: float = 1e-9):
    """Partition index-value pairs into blocks proportional to the profile."""
    if not values_desc:
        return []
    idx, top = values_desc[0]
    scale = top / profile[0]
    needed = [scale * v for v in profile[1:]]
    remaining = values_desc[1:]
    block = [idx]
    for want in needed:
        pick = None
        for pos, (cand_idx, cand_val) in enumerate(remaining):
            if abs(cand_val - want) <= tol * max(1.0, want):
                pick = pos
                break
        if pick is None:
            return None
        block.append(remaining[pick][0])
        remaining = remaining[:pick] + remaining[pick + 1 :]
    rest = _match_blocks(remaining, profile, tol)
    if rest is None:
        return None
    return [block] + rest


def pio_pure_decide(psi: PureStateVector, phi: PureStateVector) -> TransformDecision:
    """Is psi -> phi possible by physically incoherent operations?

    Requires the support of psi to split into equal-size blocks, each with
    modulus pattern proportional to that of phi; a positive verdict carries
    the block partition and a projective Kraus witness.
    """
    if psi.dim != phi.dim:
        raise ValueError("decision expects equal dimensions")
    d = psi.dim
    supp_in = [x for x in range(d) if abs(psi.amps[x]) > 1e-12]
    supp_out = [y for y in range(d) if abs(phi.amps[y]) > 1e-12]
    n = len(supp_out)
    if n == 0 or len(supp_in) % n != 0:
        return TransformDecision(False, violation={"reason": "support sizes incompatible"})
    profile = sorted((abs(phi.amps[y]) for y in supp_out), reverse=True)
    values = sorted(
        ((x, abs(psi.amps[x])) for x in supp_in), key=lambda iv: -iv[1]
    )
    blocks = _match_blocks(values, profile)
    if blocks is None:
        return TransformDecision(
            False, violation={"reason": "no proportional block partition"}
        )

    out_sorted = sorted(supp_out, key=lambda y: -abs(phi.amps[y]))
    ops = []
    weights = []
    for block in blocks:
        op = np.zeros((d, d), dtype=complex)
        scale = abs(psi.amps[block[0]]) / abs(phi.amps[out_sorted[0]])
        weights.append(scale**2)
        for y, x in zip(out_sorted, block):
            phase = (psi.amps[x] / (scale * phi.amps[y])).conjugate()
            op[y, x] = phase / abs(phase)
        ops.append(op)
    complement = [x for x in range(d) if x not in supp_in]
    if complement:
        op = np.zeros((d, d), dtype=complex)
        for x in complement:
            op[x, x] = 1.0
        ops.append(op)
    channel = KrausChannel(ops, atol=WITNESS_TOL)
    if d <= 8 and len(ops) <= 12 and not is_pio_rep(channel):
        raise ArithmeticError("constructed witness lost the projective form")
    _verify_witness(channel, psi.to_density(), phi.to_density())
    return TransformDecision(
        True,
        witness=channel,
        detail={"blocks": blocks, "weights": weights},
    )
