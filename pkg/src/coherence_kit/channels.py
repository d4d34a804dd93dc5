"""Kraus/Choi channel representations and incoherent-operation class predicates.

Class predicates for IO/SIO/sIO/PIO test the *given* Kraus representation
(those classes are defined by the existence of a representation, and deciding
existence in general is a search problem); MIO and DIO are properties of the
channel itself and are tested at the level of its action on matrix units.
``qubit_mio_to_io`` is the one constructive existence procedure offered, for
qubit channels.
"""

from __future__ import annotations

import numpy as np

from .numerics import eig_hermitian, trace_norm
from .states import DensityMatrix

CPTP_TOL = 1e-9
PREDICATE_TOL = 1e-9
CHOI_ROUNDTRIP_TOL = 1e-8


class NoIncoherentRepresentationError(ValueError):
    """The channel admits no Kraus representation made of incoherent operators."""


class KrausChannel:
    """An ordered list of dout x din Kraus operators.

    By default the operator sum is required to be trace preserving
    (sum K^dag K = I within CPTP_TOL); pass require_tp=False for plain CP
    maps such as duals of channels.
    """

    def __init__(self, kraus, require_tp: bool = True, atol: float = CPTP_TOL):
        ops = [np.asarray(k, dtype=complex) for k in kraus]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2:
            raise ValueError("Kraus operators must be matrices")
        for k in ops:
            if k.shape != shape:
                raise ValueError("all Kraus operators must share one shape")
            if not np.all(np.isfinite(k)):
                raise ValueError("Kraus operator has non-finite entries")
        stack = np.stack(ops)
        stack.setflags(write=False)
        self.kraus = tuple(stack)
        self._stack = stack
        self.dout, self.din = shape
        self.require_tp = bool(require_tp)
        if require_tp:
            defect = np.einsum("jyx,jyz->xz", stack.conj(), stack) - np.eye(self.din)
            if np.max(np.abs(defect)) > atol:
                raise ValueError(
                    f"Kraus operators are not trace preserving (defect {np.max(np.abs(defect)):.3e})"
                )

    def __len__(self) -> int:
        return self._stack.shape[0]

    def unit_actions(self) -> np.ndarray:
        """Tensor G with G[y, y', x, x'] = <y| E(|x><x'|) |y'>."""
        return np.einsum("jyx,jwz->ywxz", self._stack, self._stack.conj())

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return apply(self, rho)

    def to_json_dict(self) -> dict:
        return {
            "din": self.din,
            "dout": self.dout,
            "kraus": [
                [[[float(z.real), float(z.imag)] for z in row] for row in k] for k in self.kraus
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict, require_tp: bool = True) -> "KrausChannel":
        din, dout = int(payload["din"]), int(payload["dout"])
        ops = []
        for entry in payload["kraus"]:
            ops.append(np.array([[complex(re, im) for re, im in row] for row in entry]))
            if ops[-1].shape != (dout, din):
                raise ValueError(
                    f"Kraus operator shape {ops[-1].shape} does not match declared ({dout},{din})"
                )
        return cls(ops, require_tp=require_tp)


class ChoiMatrix:
    """Choi matrix J = sum_{jk} |j><k| (x) E(|j><k|) of a CPTP map."""

    def __init__(self, mat, din: int, dout: int, atol: float = CPTP_TOL):
        m = np.asarray(mat, dtype=complex)
        if m.shape != (din * dout, din * dout):
            raise ValueError(f"Choi matrix shape {m.shape} does not match ({din*dout},)*2")
        if np.linalg.norm(m - m.conj().T) > atol * max(1.0, np.linalg.norm(m)):
            raise ValueError("Choi matrix is not Hermitian")
        m = (m + m.conj().T) / 2.0
        if eig_hermitian(m).eigenvalues[0] < -atol:
            raise ValueError("Choi matrix is not PSD: the map is not completely positive")
        blocks = m.reshape(din, dout, din, dout)
        reduced = np.einsum("xyzy->xz", blocks)
        if np.max(np.abs(reduced - np.eye(din))) > atol:
            raise ValueError("partial trace over the output is not the identity")
        m.setflags(write=False)
        self.mat = m
        self.din = din
        self.dout = dout


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Evaluate sum_j K_j rho K_j^dag and validate the output state."""
    if rho.dim != ch.din:
        raise ValueError(f"state dim {rho.dim} does not match channel input dim {ch.din}")
    s = ch._stack
    out = np.einsum("jyx,xz,jwz->yw", s, rho.mat, s.conj())
    out = (out + out.conj().T) / 2.0
    return DensityMatrix(out / np.trace(out).real)


def _choi_array(ch: KrausChannel) -> np.ndarray:
    g = ch.unit_actions()
    return np.ascontiguousarray(g.transpose(2, 0, 3, 1)).reshape(
        ch.din * ch.dout, ch.din * ch.dout
    )


def choi(ch: KrausChannel) -> ChoiMatrix:
    """Choi matrix of a CPTP channel."""
    return ChoiMatrix(_choi_array(ch), ch.din, ch.dout)


def channel_from_choi(j: ChoiMatrix) -> KrausChannel:
    """Kraus operators from the eigendecomposition of a Choi matrix.

    The rank is the number of eigenvalues above 1e-10; each operator's global
    phase is fixed by making its largest-modulus entry real positive.
    """
    dec = eig_hermitian(j.mat)
    ops = []
    for lam, vec in zip(dec.eigenvalues, dec.eigenvectors.T):
        if lam <= 1e-10:
            continue
        k = np.sqrt(lam) * vec.reshape(j.din, j.dout).T
        pivot = k.flat[int(np.argmax(np.abs(k)))]
        if abs(pivot) > 0:
            k = k * (pivot.conjugate() / abs(pivot))
        ops.append(k)
    if not ops:
        raise ValueError("Choi matrix has no eigenvalue above threshold")
    return KrausChannel(ops)


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Frobenius distance between the Choi matrices of two maps."""
    if (a.din, a.dout) != (b.din, b.dout):
        raise ValueError("channel dimensions differ")
    return float(np.linalg.norm(_choi_array(a) - _choi_array(b)))


def _offdiag(m: np.ndarray) -> np.ndarray:
    return m - np.diag(np.diag(m))


# ---------------------------------------------------------------------------
# Class membership predicates.
# ---------------------------------------------------------------------------


def is_mio(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """True iff every incoherent basis state maps to a diagonal state."""
    g = ch.unit_actions()
    for x in range(ch.din):
        if np.max(np.abs(_offdiag(g[:, :, x, x]))) > tol:
            return False
    return True


def is_dio(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """True iff E(|x><x|) is diagonal and diag(E(|x><x'|)) = 0 for x != x'."""
    g = ch.unit_actions()
    diag_idx = np.arange(ch.dout)
    for x in range(ch.din):
        for z in range(ch.din):
            block = g[:, :, x, z]
            if x == z:
                if np.max(np.abs(_offdiag(block))) > tol:
                    return False
            elif np.max(np.abs(block[diag_idx, diag_idx])) > tol:
                return False
    return True


def is_covariant_under_dephasing(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """Trace-norm check that the channel commutes with full dephasing.

    Linearity makes matrix units a spanning set, so this agrees with is_dio.
    """
    g = ch.unit_actions()
    for x in range(ch.din):
        for z in range(ch.din):
            block = g[:, :, x, z]
            dephased_in = block if x == z else np.zeros_like(block)
            if trace_norm(np.diag(np.diag(block)) - dephased_in) > tol:
                return False
    return True


def _column_rows(op: np.ndarray, tol: float):
    """Per column: the list of rows whose modulus exceeds tol."""
    return [list(np.nonzero(np.abs(op[:, x]) > tol)[0]) for x in range(op.shape[1])]


def is_io_rep(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """True iff every operator has at most one entry above tol per column."""
    return all(
        all(len(rows) <= 1 for rows in _column_rows(k, tol)) for k in ch.kraus
    )


def is_sio_rep(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """True iff every operator is column- and row-wise single-entried.

    Each operator then acts as c_x |pi(x)><x| on its support with pi injective.
    """
    if ch.din != ch.dout:
        raise ValueError("SIO representation test needs a square channel")
    for k in ch.kraus:
        if any(len(rows) > 1 for rows in _column_rows(k, tol)):
            return False
        if any(len(cols) > 1 for cols in _column_rows(k.T, tol)):
            return False
    return True


def is_sio_special_rep(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """True iff a single column-collapse function unifies all operators.

    Looks for one f and per-operator permutations Pi_a with every operator of
    the form sum_x c_ax Pi_a |f(x)><x|. Columns sharing an output row inside
    any operator must share f; columns split by any operator must not.
    """
    maps = []
    for k in ch.kraus:
        rows = _column_rows(k, tol)
        if any(len(r) > 1 for r in rows):
            return False
        maps.append({x: r[0] for x, r in enumerate(rows) if r})

    parent = list(range(ch.din))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in maps:
        by_row = {}
        for x, row in g.items():
            by_row.setdefault(row, []).append(x)
        for xs in by_row.values():
            for other in xs[1:]:
                parent[find(other)] = find(xs[0])

    for g in maps:
        for x in g:
            for z in g:
                if find(x) == find(z) and g[x] != g[z]:
                    return False
    return True


def _partial_permutation_weight(op: np.ndarray, tol: float):
    """(weight, column support) if op = sqrt(w) * phase-permutation on support."""
    rows = _column_rows(op, tol)
    if any(len(r) > 1 for r in rows):
        return None
    if any(len(c) > 1 for c in _column_rows(op.T, tol)):
        return None
    support = [x for x, r in enumerate(rows) if r]
    if not support:
        return None
    moduli = np.array([abs(op[rows[x][0], x]) for x in support])
    if np.max(moduli) - np.min(moduli) > 1e-8:
        return None
    return float(np.mean(moduli) ** 2), frozenset(support)


def is_pio_rep(ch: KrausChannel, tol: float = PREDICATE_TOL) -> bool:
    """True iff the operators split into groups {sqrt(w) U_j P_j}.

    Within a group all operators share the modulus sqrt(w), each is a
    phase-permutation on its column support, and the supports partition the
    whole basis. Search is exhaustive over operator partitions and is capped
    at 12 operators and d <= 8.
    """
    if ch.din != ch.dout:
        raise ValueError("PIO representation test needs a square channel")
    if ch.din > 8 or len(ch.kraus) > 12:
        raise ValueError("PIO grouping search capped at d <= 8 and 12 operators")
    d = ch.din
    infos = []
    for k in ch.kraus:
        if np.max(np.abs(k)) <= tol:
            continue
        info = _partial_permutation_weight(k, tol)
        if info is None:
            return False
        infos.append(info)

    full = frozenset(range(d))

    def assign(unused):
        """Group weights for a full partition of ``unused``, or None."""
        if not unused:
            return []
        seed = min(unused)
        w_seed, sup_seed = infos[seed]

        def extend(covered, pool, chosen):
            if covered == full:
                rest = assign(unused - frozenset(chosen) - {seed})
                return None if rest is None else [w_seed] + rest
            missing = min(full - covered)
            for idx in sorted(pool):
                w, sup = infos[idx]
                if missing not in sup or not sup.isdisjoint(covered):
                    continue
                if abs(w - w_seed) > 1e-8:
                    continue
                found = extend(covered | sup, pool - {idx}, chosen + [idx])
                if found is not None:
                    return found
            return None

        return extend(sup_seed, unused - {seed}, [])

    weights = assign(frozenset(range(len(infos))))
    if weights is None:
        return False
    return abs(sum(weights) - 1.0) <= 1e-7


def dual_map(ch: KrausChannel) -> KrausChannel:
    """The adjoint CP map, with Kraus operators {K_j^dag}. Unital iff ch is TP."""
    return KrausChannel([k.conj().T for k in ch.kraus], require_tp=False)


# ---------------------------------------------------------------------------
# The covariant channel family q1*id + q2/(d-1)*(I - Delta) + q3/(d-1)*(d Delta - id).
# ---------------------------------------------------------------------------


class GCovariantParams:
    """Probability weights (q1, q2, q3) of the three extremal covariant maps."""

    def __init__(self, q1: float, q2: float, q3: float, d: int):
        qs = (float(q1), float(q2), float(q3))
        if min(qs) < -1e-12:
            raise ValueError("weights must be nonnegative")
        if abs(sum(qs) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if d < 2:
            raise ValueError("dimension must be at least 2")
        self.q1, self.q2, self.q3 = (max(q, 0.0) for q in qs)
        self.d = int(d)

    def as_tuple(self):
        return (self.q1, self.q2, self.q3)


def _rank_raising_dephasing_choi(d: int) -> np.ndarray:
    """Choi of rho -> (d*Delta(rho) - rho)/(d-1)."""
    diag_idx = np.arange(d) * d + np.arange(d)
    omega = np.zeros(d * d, dtype=complex)
    omega[diag_idx] = 1.0
    j = -np.outer(omega, omega.conj())
    j[diag_idx, diag_idx] += d
    return j / (d - 1)


def g_covariant_channel(params: GCovariantParams) -> KrausChannel:
    """Assemble a Kraus representation of the covariant mixture."""
    d, (q1, q2, q3) = params.d, params.as_tuple()
    ops = []
    if q1 > 0:
        ops.append(np.sqrt(q1) * np.eye(d, dtype=complex))
    if q2 > 0:
        scale = np.sqrt(q2 / (d - 1))
        for x in range(d):
            for y in range(d):
                if x != y:
                    op = np.zeros((d, d), dtype=complex)
                    op[y, x] = scale
                    ops.append(op)
    if q3 > 0:
        piece = channel_from_choi(ChoiMatrix(_rank_raising_dephasing_choi(d), d, d))
        ops.extend(np.sqrt(q3) * k for k in piece.kraus)
    return KrausChannel(ops)


def fit_g_covariant(ch: KrausChannel, tol: float = PREDICATE_TOL):
    """Recover covariant-mixture weights, or None if the channel is not one.

    Reads a = <0|E(|0><0|)|0> and c = <0|E(|0><1|)|1> off the channel's
    action, converts to weights, and accepts only if the rebuilt mixture
    matches the channel's Choi matrix within tol.
    """
    if ch.din != ch.dout or ch.din < 2:
        return None
    d = ch.din
    g = ch.unit_actions()
    a = float(np.real(g[0, 0, 0, 0]))
    c = complex(g[0, 1, 0, 1])
    if abs(c.imag) > 1e-7:
        return None
    cr = c.real
    if not (-a / (d - 1) - 1e-7 <= cr <= a + 1e-7):
        return None
    q1 = (a + cr * (d - 1)) / d
    q2 = 1.0 - a
    q3 = (a - cr) * (d - 1) / d
    qs = np.clip([q1, q2, q3], 0.0, None)
    total = qs.sum()
    if abs(total - 1.0) > 1e-6:
        return None
    try:
        params = GCovariantParams(*(qs / total), d)
        rebuilt = g_covariant_channel(params)
    except ValueError:
        return None
    if choi_distance(ch, rebuilt) > tol:
        return None
    return params


# ---------------------------------------------------------------------------
# Qubit canonicalization: incoherent Kraus representation of a MIO channel.
# ---------------------------------------------------------------------------


def _mix_pair(ops, i, j, x):
    """Unitary 2x2 mix making <0|ops[i]|x> exactly zero."""
    a, b = -ops[j][0, x], ops[i][0, x]
    norm = np.hypot(abs(a), abs(b))
    a, b = a / norm, b / norm
    new_i = a * ops[i] + b * ops[j]
    new_j = -b.conjugate() * ops[i] + a.conjugate() * ops[j]
    new_i[0, x] = 0.0
    ops[i], ops[j] = new_i, new_j


def _pairwise_io_pass(ops, eps: float = 1e-11):
    """Pairwise unitary mixing toward column-wise single-entried operators.

    Column 0 first, then column 1 restricted to pairs whose column-0 patterns
    are compatible (mixing incompatible ones would repopulate column 0).
    Returns True if no incompatible deadlock was left behind.
    """

    def bad(k, x):
        return abs(ops[k][0, x]) > eps and abs(ops[k][1, x]) > eps

    guard = 0
    while True:
        cand = [k for k in range(len(ops)) if bad(k, 0)]
        if len(cand) < 2:
            break
        _mix_pair(ops, cand[0], cand[1], 0)
        guard += 1
        if guard > 4 * len(ops) + 16:
            return False

    for group_of in (lambda k: abs(ops[k][1, 0]) <= eps, lambda k: abs(ops[k][1, 0]) > eps):
        guard = 0
        while True:
            cand = [k for k in range(len(ops)) if bad(k, 1) and group_of(k)]
            if len(cand) < 2:
                break
            _mix_pair(ops, cand[0], cand[1], 1)
            guard += 1
            if guard > 4 * len(ops) + 16:
                return False

    leftovers = [k for k in range(len(ops)) if bad(k, 1)]
    return len(leftovers) == 0 and not any(bad(k, 0) for k in range(len(ops)))


_MASS_EPS = 1e-22
_FEAS_TOL = 1e-10


def _qubit_io_feasible_loads(a, b, m):
    """Solve the 2-D convex feasibility problem behind a qubit IO split.

    Looks for X >= 0 with row sums <= a and column loads
    sum_i m[i][j]/X[i][j] <= b[j]; returns the per-pattern X or None.
    Saturating rows and taking the minimal column masses m/X is lossless, so
    this reduces to minimizing the convex max-violation over (u, v) =
    (X[0,0], X[1,0]); the inner v-optimum is a monotone crossing (bisected),
    the outer u-optimum is found by ternary search.
    """
    a = [float(a[0]), float(a[1])]
    b = [float(b[0]), float(b[1])]
    m = [[float(m[0, 0]), float(m[0, 1])], [float(m[1, 0]), float(m[1, 1])]]
    # quick Cauchy-Schwarz screen: an IO split forces sum_ij |C_ij| <= sqrt(sum a * sum b)
    if sum(np.sqrt(v) for row in m for v in row) > np.sqrt(sum(a) * sum(b)) + 1e-12:
        return None
    present = [[v > _MASS_EPS for v in row] for row in m]
    row0 = present[0][0] and present[0][1]
    row1 = present[1][0] and present[1][1]

    def x_row(i, t):
        if present[i][0] and present[i][1]:
            return t, a[i] - t
        if present[i][0]:
            return a[i], 0.0
        if present[i][1]:
            return 0.0, a[i]
        return 0.0, 0.0

    def load(mass, x):
        if mass <= _MASS_EPS:
            return 0.0
        if x <= 1e-300:
            return np.inf
        return mass / x

    def col_loads(u, v):
        x00, x01 = x_row(0, u)
        x10, x11 = x_row(1, v)
        g0 = load(m[0][0], x00) + load(m[1][0], x10) - b[0]
        g1 = load(m[0][1], x01) + load(m[1][1], x11) - b[1]
        return g0, g1

    def inner(u):
        """min over v of max(col loads), plus the arg v."""
        if not row1:
            g0, g1 = col_loads(u, 0.0)
            return max(g0, g1), 0.0
        lo, hi = 0.0, a[1]
        # g0 decreases in v, g1 increases; the minimax sits at their crossing.
        for _ in range(70):
            mid = (lo + hi) / 2.0
            g0, g1 = col_loads(u, mid)
            if g0 > g1:
                lo = mid
            else:
                hi = mid
        v = (lo + hi) / 2.0
        return max(col_loads(u, v)), v

    if not row0:
        best, v = inner(0.0)
        u = 0.0
    else:
        lo, hi = 0.0, a[0]
        for _ in range(80):
            u1 = lo + (hi - lo) / 3.0
            u2 = hi - (hi - lo) / 3.0
            if inner(u1)[0] <= inner(u2)[0]:
                hi = u2
            else:
                lo = u1
        u = (lo + hi) / 2.0
        best, v = inner(u)

    if not best <= _FEAS_TOL:
        return None
    x = np.zeros((2, 2))
    x[0, 0], x[0, 1] = x_row(0, u)
    x[1, 0], x[1, 1] = x_row(1, v)
    return x


def _qubit_io_rep_from_channel(ch: KrausChannel):
    """Exact IO Kraus list reproducing a qubit MIO channel, or None.

    The channel is determined by a = diag E(|0><0|), b = diag E(|1><1|) and
    the cross block C = E(|0><1|); an IO representation exists iff the masses
    |C_ij|^2 can be supported by a feasible split of a and b.
    """
    g = ch.unit_actions()
    a = np.clip(np.real(np.diag(g[:, :, 0, 0])), 0.0, None)
    b = np.clip(np.real(np.diag(g[:, :, 1, 1])), 0.0, None)
    cross = g[:, :, 0, 1]
    masses = np.abs(cross) ** 2
    x = _qubit_io_feasible_loads(a, b, masses)
    if x is None:
        return None
    ops = []
    col1_used = np.zeros(2)
    for i in range(2):
        for j in range(2):
            if masses[i, j] <= 1e-22:
                continue
            op = np.zeros((2, 2), dtype=complex)
            op[i, 0] = np.sqrt(x[i, j])
            op[j, 1] = cross[i, j].conjugate() / np.sqrt(x[i, j])
            col1_used[j] += masses[i, j] / x[i, j]
            ops.append(op)
    row_used = np.array([sum(x[i, j] for j in range(2) if masses[i, j] > 1e-22) for i in range(2)])
    for i in range(2):
        slack = a[i] - row_used[i]
        if slack > 1e-15:
            op = np.zeros((2, 2), dtype=complex)
            op[i, 0] = np.sqrt(slack)
            ops.append(op)
    for j in range(2):
        slack = b[j] - col1_used[j]
        if slack > 1e-15:
            op = np.zeros((2, 2), dtype=complex)
            op[j, 1] = np.sqrt(slack)
            ops.append(op)
    return ops


def qubit_mio_to_io(ch: KrausChannel) -> KrausChannel:
    """Re-represent a qubit MIO channel with incoherent Kraus operators.

    First runs the iterative pairwise 2x2 unitary mixing over operator pairs
    whose columns still violate the incoherent form; when that stalls (some
    MIO channels defeat it), falls back to rebuilding an incoherent operator
    list directly from the channel's action. Raises
    NoIncoherentRepresentationError for channels where no incoherent
    representation exists at all.
    """
    if ch.din != 2 or ch.dout != 2:
        raise ValueError("canonicalization is defined for qubit channels only")
    if not is_mio(ch):
        raise ValueError("channel is not MIO")

    ops = [k.copy() for k in ch.kraus]
    if _pairwise_io_pass(ops):
        candidate = KrausChannel(ops)
        if is_io_rep(candidate) and choi_distance(ch, candidate) <= CHOI_ROUNDTRIP_TOL:
            return candidate

    rebuilt = _qubit_io_rep_from_channel(ch)
    if rebuilt is None:
        raise NoIncoherentRepresentationError(
            "this qubit MIO channel has no incoherent Kraus representation"
        )
    candidate = KrausChannel(rebuilt)
    if not is_io_rep(candidate) or choi_distance(ch, candidate) > CHOI_ROUNDTRIP_TOL:
        raise ArithmeticError("incoherent rebuild failed to reproduce the channel")
    return candidate


def _project_mio_affine_qubit(j: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the qubit MIO + trace-preservation affine set."""
    out = (j + j.conj().T) / 2.0
    for x in (0, 1):
        r, c = 2 * x, 2 * x + 1
        out[r, c] = 0.0
        out[c, r] = 0.0
    shift = (out[0, 0] + out[1, 1] - 1.0) / 2.0
    out[0, 0] -= shift
    out[1, 1] -= shift
    shift = (out[2, 2] + out[3, 3] - 1.0) / 2.0
    out[2, 2] -= shift
    out[3, 3] -= shift
    s = (out[0, 2] + out[1, 3]) / 2.0
    out[0, 2] -= s
    out[1, 3] -= s
    out[2, 0] -= s.conjugate()
    out[3, 1] -= s.conjugate()
    return out


def sample_mio_qubit_channel(seed: int) -> KrausChannel:
    """Random qubit MIO channel via alternating projections on Choi matrices.

    Alternates between the affine set (MIO constraints plus trace
    preservation, both linear in the Choi matrix) and the PSD cone until the
    gap is tiny; deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    for _ in range(4):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        j = g @ g.conj().T
        j *= 2.0 / np.trace(j).real
        for _ in range(10000):
            j = _project_mio_affine_qubit(j)
            dec = eig_hermitian(j)
            clipped = np.clip(dec.eigenvalues, 0.0, None)
            j_psd = (dec.eigenvectors * clipped) @ dec.eigenvectors.conj().T
            gap = np.linalg.norm(j - j_psd)
            j = j_psd
            if gap <= 1e-12:
                j = _project_mio_affine_qubit(j)
                return channel_from_choi(ChoiMatrix(j, 2, 2))
    raise ArithmeticError("alternating projections failed to converge")


# ---------------------------------------------------------------------------
# Reference channels and samplers.
# ---------------------------------------------------------------------------


def qubit_to_qutrit_mio_example() -> KrausChannel:
    """The 3-operator qubit-to-qutrit MIO channel sending |+> to a rank-3 state.

    Its target is the pure state with probabilities (8/9, 1/18, 1/18); the
    representation is deliberately not incoherent operator-wise, and the
    channel is not dephasing-covariant.
    """
    m1 = (np.sqrt(2.0) / (3.0 * np.sqrt(3.0))) * np.array(
        [[3.0, 1.0], [0.0, 1.0], [0.0, 1.0]], dtype=complex
    )
    m2 = (1.0 / (3.0 * np.sqrt(6.0))) * np.array(
        [[0.0, 4.0], [3.0, -2.0], [0.0, 1.0]], dtype=complex
    )
    m3 = (1.0 / (3.0 * np.sqrt(6.0))) * np.array(
        [[0.0, 4.0], [0.0, 1.0], [3.0, -2.0]], dtype=complex
    )
    return KrausChannel([m1, m2, m3])


def random_channel(din: int, dout: int, n_ops: int, rng: np.random.Generator) -> KrausChannel:
    """Generic CPTP sample: Kraus blocks of a random Stinespring isometry."""
    g = rng.standard_normal((dout * n_ops, din)) + 1j * rng.standard_normal((dout * n_ops, din))
    q, _ = np.linalg.qr(g)
    return KrausChannel([q[i * dout : (i + 1) * dout, :] for i in range(n_ops)])


def random_incoherent_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Permutation times diagonal phases."""
    perm = rng.permutation(d)
    phases = np.exp(2j * np.pi * rng.random(d))
    u = np.zeros((d, d), dtype=complex)
    u[perm, np.arange(d)] = phases
    return u


def incoherent_unitary_channel(u: np.ndarray) -> KrausChannel:
    return KrausChannel([u])


def compose(after: KrausChannel, before: KrausChannel) -> KrausChannel:
    """Channel doing ``before`` first, then ``after``."""
    if after.din != before.dout:
        raise ValueError("composition dimension mismatch")
    ops = [a @ b for a in after.kraus for b in before.kraus]
    return KrausChannel(ops, require_tp=after.require_tp and before.require_tp)


def _column_stochastic_amplitudes(d: int, n_ops: int, rng: np.random.Generator) -> np.ndarray:
    w = rng.random((n_ops, d)) + 0.05
    w /= w.sum(axis=0, keepdims=True)
    return np.sqrt(w) * np.exp(2j * np.pi * rng.random((n_ops, d)))


def random_sio_channel(d: int, rng: np.random.Generator, n_ops: int = 3) -> KrausChannel:
    """Random strictly incoherent representation: permutation-diagonal operators."""
    c = _column_stochastic_amplitudes(d, n_ops, rng)
    ops = []
    for jj in range(n_ops):
        perm = rng.permutation(d)
        op = np.zeros((d, d), dtype=complex)
        op[perm, np.arange(d)] = c[jj]
        ops.append(op)
    return KrausChannel(ops)


def random_sio_special_channel(
    d: int, rng: np.random.Generator, collapse=None
) -> KrausChannel:
    """Random sIO representation: one shared collapse map f, per-operator permutations."""
    if collapse is None:
        collapse = rng.integers(0, d, size=d)
    f = np.asarray(collapse)
    fibers = {}
    for x in range(d):
        fibers.setdefault(int(f[x]), []).append(x)
    n_ops = max(len(v) for v in fibers.values()) + 1
    c = np.zeros((n_ops, d), dtype=complex)
    for members in fibers.values():
        g = rng.standard_normal((n_ops, len(members))) + 1j * rng.standard_normal(
            (n_ops, len(members))
        )
        q, _ = np.linalg.qr(g)
        c[:, members] = q[:, : len(members)]
    ops = []
    for jj in range(n_ops):
        perm = rng.permutation(d)
        op = np.zeros((d, d), dtype=complex)
        for x in range(d):
            op[perm[f[x]], x] += c[jj, x]
        ops.append(op)
    return KrausChannel(ops)


def random_io_channel(d: int, rng: np.random.Generator) -> KrausChannel:
    """Random incoherent representation built as a mixture of two sIO pieces.

    The two pieces use different collapse maps, so the result is generally
    not sIO (and not SIO) at the representation level while staying IO.
    """
    f1 = rng.integers(0, d, size=d)
    f2 = (f1 + 1 + rng.integers(0, d - 1, size=d)) % d
    lam = 0.2 + 0.6 * rng.random()
    part1 = random_sio_special_channel(d, rng, collapse=f1)
    part2 = random_sio_special_channel(d, rng, collapse=f2)
    ops = [np.sqrt(lam) * k for k in part1.kraus]
    ops += [np.sqrt(1.0 - lam) * k for k in part2.kraus]
    return KrausChannel(ops)


def random_pio_channel(d: int, rng: np.random.Generator, n_groups: int = 2) -> KrausChannel:
    """Random physically incoherent representation: weighted projective groups."""
    weights = rng.dirichlet(np.ones(n_groups))
    ops = []
    for g in range(n_groups):
        order = rng.permutation(d)
        n_parts = int(rng.integers(1, d + 1))
        bounds = sorted(rng.choice(np.arange(1, d), size=n_parts - 1, replace=False)) if n_parts > 1 else []
        parts = np.split(order, bounds)
        for part in parts:
            perm = rng.permutation(d)
            phases = np.exp(2j * np.pi * rng.random(d))
            op = np.zeros((d, d), dtype=complex)
            for x in part:
                op[perm[x], x] = phases[x] * np.sqrt(weights[g])
            ops.append(op)
    return KrausChannel(ops)
