"""Entanglement-breaking certification for channels.

``classify`` returns an :class:`EbtVerdict` whose certificate can be checked
independently: an EBT verdict carries a measure-and-prepare form whose Choi
matrix matches the channel's, a NotEBT verdict carries the failing necessary
condition with its numbers, and an Undecided verdict carries diagnostics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg

from .channels import (
    Channel,
    ChoiMatrix,
    HolevoChannel,
    KrausChannel,
    choi_of,
    holevo_from_rank1_kraus,
    holevo_from_separable_choi,
    kraus_from_choi,
)
from .decomposition import SeparableDecomposition
from .errors import MergeStall, PreconditionRankMismatch, RankTooHigh, UnsupportedDimension
from .linalg import BipartiteDims, numerical_rank, partial_trace, partial_transpose, proj

DEFAULT_TOL = 1e-9
RESIDUAL_TOL = 1e-8
ALPHA_ZERO_TOL = 1e-9


class Status(str, enum.Enum):
    EBT = "EBT"
    NOT_EBT = "NotEBT"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class EbtVerdict:
    status: Status
    criterion: str
    evidence: dict[str, Any] = field(default_factory=dict)
    certificate: HolevoChannel | None = None
    decomposition: SeparableDecomposition | None = None

    @property
    def is_ebt(self) -> bool:
        return self.status is Status.EBT


@dataclass(frozen=True)
class NotEbtWitness:
    test: str
    rank: int
    dim: int
    max_eigenvalue: float
    marginal_max_eigenvalue: float


# --- necessary conditions -------------------------------------------------------

def min_pt_eigenvalue(choi: ChoiMatrix) -> float:
    pt = partial_transpose(choi.mat, choi.dims, which=1)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


def is_ppt(choi: ChoiMatrix, tol: float = 1e-10) -> tuple[bool, float]:
    """Whether the partial transpose of ``choi`` is PSD, with its minimum eigenvalue."""
    lam = min_pt_eigenvalue(choi)
    return lam >= -tol, lam


def kraus_count_test(choi: ChoiMatrix, tol: float = DEFAULT_TOL) -> NotEbtWitness | None:
    """Witness from the Kraus-rank bound or the maximal-eigenvalue bound.

    A trace-preserving channel whose Choi matrix has rank below ``d`` is not
    EBT.  Independently, a separable state cannot have a largest eigenvalue
    exceeding that of either marginal.
    """
    d = choi.dim_in
    rank = numerical_rank(choi.mat, tol)
    lam = float(np.linalg.eigvalsh(choi.mat)[-1])
    marg_a = np.linalg.eigvalsh(partial_trace(choi.mat, choi.dims, 1))[-1]
    marg_b = np.linalg.eigvalsh(partial_trace(choi.mat, choi.dims, 0))[-1]
    marg = float(min(marg_a, marg_b))
    if choi.trace_preserving and choi.is_square and rank < d:
        return NotEbtWitness("kraus-rank", rank, d, lam, marg)
    if lam > marg + tol:
        return NotEbtWitness("max-eigenvalue", rank, d, lam, marg)
    return None


# --- decompositions -------------------------------------------------------------

def _check_rank_precondition(rho: np.ndarray, dims: BipartiteDims, tol: float) -> None:
    d = dims.dim_a
    r = numerical_rank(rho, tol)
    ra = numerical_rank(partial_trace(rho, dims, 1), tol)
    if r != d or ra != d:
        raise PreconditionRankMismatch(f"need rank(rho) = rank(rho_A) = {d}, got {r} and {ra}")


def reduce_decomposition(dec: SeparableDecomposition, tol: float = DEFAULT_TOL) -> SeparableDecomposition:
    """Rewrite a separable decomposition with at most ``dim_a`` product terms.

    Requires the represented state and its first marginal to both have rank
    ``dim_a``.  Each pass picks ``dim_a`` terms with independent left vectors
    plus one more, finds the linear dependency among those product vectors,
    and merges the dependent terms, whose right vectors all coincide up to
    phase, into fewer terms sharing that right vector.
    """
    d = dec.dims.dim_a
    if len(dec) <= d:
        return dec
    _check_rank_precondition(dec.state(), dec.dims, tol)
    weights = list(dec.weights)
    left = [v for v in dec.left]
    right = [v for v in dec.right]
    while len(weights) > d:
        k = len(weights)
        a_mat = np.array(left).T
        _, _, piv = scipy.linalg.qr(a_mat, pivoting=True, mode="economic")
        order = list(piv[:d]) + [i for i in range(k) if i not in set(piv[:d])]
        weights = [weights[i] for i in order]
        left = [left[i] for i in order]
        right = [right[i] for i in order]

        prods = np.stack([np.kron(left[j], right[j]) for j in range(d + 1)], axis=1)
        _, s, vh = np.linalg.svd(prods)
        alpha = vh[-1].conj()
        if s[-1] > 1e-6 * s[0]:
            raise MergeStall(f"product vectors are independent (smallest singular value {s[-1]:.3e})")
        mags = np.abs(alpha)
        active = [j for j in range(d + 1) if mags[j] > ALPHA_ZERO_TOL * mags.max()]
        pivot = max(active, key=lambda j: mags[j])
        nu = right[pivot]
        for j in active:
            if abs(abs(np.vdot(nu, right[j])) - 1.0) > 1e-6:
                raise MergeStall(f"right vector {j} is not parallel to the common vector")

        rho_a = sum(weights[j] * proj(left[j]) for j in active)
        vals, vecs = np.linalg.eigh(rho_a)
        keep = vals > tol * max(vals[-1], 1.0)
        if keep.sum() >= len(active):
            raise MergeStall(f"merging {len(active)} terms did not reduce the count")
        rest = [j for j in range(k) if j not in set(active)]
        weights = [weights[j] for j in rest] + [float(v) for v in vals[keep]]
        left = [left[j] for j in rest] + [vecs[:, i] for i in np.flatnonzero(keep)]
        right = [right[j] for j in rest] + [nu] * int(keep.sum())

    total = sum(weights)
    return SeparableDecomposition(dec.dims, np.array(weights) / total, np.array(left), np.array(right))


def _takagi(tau: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Factor a complex symmetric matrix as ``Z diag(s) Z^T`` with ``Z`` unitary."""
    n = tau.shape[0]
    a, b = tau.real, tau.imag
    emb = np.block([[a, b], [b, -a]])
    vals, vecs = np.linalg.eigh(emb)
    scale = max(abs(vals).max(), 1.0)
    cols, svals = [], []
    for v, vec in zip(vals[::-1], vecs[:, ::-1].T):
        if v <= tol * scale:
            break
        cols.append(vec[:n] + 1j * vec[n:])
        svals.append(v)
    z = np.array(cols).T.reshape(n, len(cols))
    if len(cols) < n:
        # Complete with conj(null(tau)), orthogonal to the range part.
        null = scipy.linalg.null_space(tau, rcond=tol).conj()
        if z.size:
            null = null - z @ (z.conj().T @ null)
        q, _ = np.linalg.qr(null)
        z = np.hstack([z, q[:, : n - len(cols)]])
        svals += [0.0] * (n - len(cols))
    return z, np.array(svals)


def _polygon_phases(lengths: np.ndarray) -> np.ndarray:
    """Angles closing a polygon with the given four side lengths.

    The longest side must not exceed the sum of the others; small violations
    are absorbed by clipping.
    """
    order = np.argsort(lengths)[::-1]
    a, b, c, e = lengths[order]
    s = min(max(a - b, c - e), c + e)

    def _cos(x):
        return float(np.clip(x, -1.0, 1.0))

    ang_b = np.pi if a * b == 0 else np.arccos(_cos((s**2 - a**2 - b**2) / (2 * a * b)))
    target = -(a + b * np.exp(1j * ang_b))
    t_ang = np.angle(target) if abs(target) > 0 else 0.0
    if c == 0 or s == 0:
        ang_c = t_ang
    else:
        ang_c = t_ang + np.arccos(_cos((s**2 + c**2 - e**2) / (2 * s * c)))
    rem = target - c * np.exp(1j * ang_c)
    ang_e = np.angle(rem) if abs(rem) > 0 else ang_c + np.pi
    out = np.empty(4)
    out[order] = [0.0, ang_b, ang_c, ang_e]
    return out


_HADAMARD4 = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float)
_SPIN_FLIP = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])).real


def two_qubit_decomposition(rho, tol: float = 1e-12) -> SeparableDecomposition:
    """Product-state decomposition of a PPT two-qubit state (Wootters' construction).

    Writes ``rho`` as at most four pure product states.  Raises ``ValueError``
    when the state has nonzero concurrence.
    """
    rho = np.asarray(rho, dtype=complex)
    vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = vals > tol * max(vals[-1], 1.0)
    v = vecs[:, keep] * np.sqrt(vals[keep])
    tau = v.T @ _SPIN_FLIP @ v
    z, sig = _takagi(tau, tol)
    x = v @ z.conj()
    r = x.shape[1]
    x = np.hstack([x, np.zeros((4, 4 - r), dtype=complex)])
    sig = np.concatenate([sig, np.zeros(4 - r)])
    order = np.argsort(sig)[::-1]
    x, sig = x[:, order], sig[order]
    concurrence = sig[0] - sig[1:].sum()
    if concurrence > 1e-7:
        raise ValueError(f"state is entangled (concurrence {concurrence:.3e})")
    theta = 0.5 * _polygon_phases(sig)
    y = x * np.exp(1j * theta)
    zs = 0.5 * (y @ _HADAMARD4.T)
    terms = []
    for col in zs.T:
        w = np.linalg.norm(col) ** 2
        if w <= tol:
            continue
        u, s, vh = np.linalg.svd(col.reshape(2, 2) / np.sqrt(w))
        terms.append((w * s[0] ** 2, u[:, 0], vh[0]))
    return SeparableDecomposition.from_terms(BipartiteDims(2, 2), terms, normalize=True)


def rank_d_decomposition(choi: ChoiMatrix, tol: float = DEFAULT_TOL, seed: int = 0) -> SeparableDecomposition:
    """Product-state decomposition of a PPT Choi matrix of rank ``d`` with full-rank marginal.

    After filtering the input factor so that the marginal is ``I/d``, such a
    state corresponds to a channel ``Psi(X) = sum_i R_i <e_i|X|e_i>`` for an
    orthonormal basis ``e_i``.  The basis diagonalizes every output of the
    adjoint channel, so it is read off from ``adjoint(Psi)(Y)`` for a random
    Hermitian ``Y``.  Raises ``ValueError`` if the structure is not found.
    """
    d, d_out = choi.dim_in, choi.dim_out
    rho = choi.mat
    _check_rank_precondition(rho, choi.dims, tol)
    rho_a = partial_trace(rho, choi.dims, 1)
    ev, evec = np.linalg.eigh(rho_a)
    sq = (evec * np.sqrt(ev)) @ evec.conj().T
    inv_sq = (evec / np.sqrt(ev)) @ evec.conj().T
    filt = np.kron(inv_sq, np.eye(d_out))
    psi = ChoiMatrix(filt @ rho @ filt / d, d, d_out)
    kraus = kraus_from_choi(psi)

    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d_out, d_out)) + 1j * rng.standard_normal((d_out, d_out))
    y = g + g.conj().T
    h = sum(a.conj().T @ y @ a for a in kraus.operators)
    _, basis = np.linalg.eigh(0.5 * (h + h.conj().T))

    scale = np.linalg.norm(psi.mat)
    for i in range(d):
        for j in range(i + 1, d):
            off = psi(np.outer(basis[:, i], basis[:, j].conj()))
            if np.linalg.norm(off) > 1e-7 * max(scale, 1.0):
                raise ValueError("channel does not act diagonally in the candidate basis")

    terms = []
    for i in range(d):
        r_i = psi(proj(basis[:, i]))
        r_i = 0.5 * (r_i + r_i.conj().T)
        vals, vecs = np.linalg.eigh(r_i)
        left = sq @ basis[:, i].conj()
        for lam, w in zip(vals, vecs.T):
            if lam > tol:
                terms.append((lam, left, w))
    dec = SeparableDecomposition.from_terms(choi.dims, terms, normalize=True)
    if len(dec) > d:
        dec = reduce_decomposition(dec, tol)
    return dec


# --- classification ---------------------------------------------------------------

def rank_one_refinement(h: HolevoChannel, rel_tol: float = 1e-12) -> HolevoChannel:
    """Split every pair into pure prepared states and rank-one effects."""
    states, effects = [], []
    for r, f in zip(h.states, h.effects):
        rv, rvec = np.linalg.eigh(r)
        fv, fvec = np.linalg.eigh(f)
        for a, psi in zip(rv, rvec.T):
            if a <= rel_tol * rv[-1]:
                continue
            for b, phi in zip(fv, fvec.T):
                if b <= rel_tol * fv[-1]:
                    continue
                states.append(proj(psi))
                effects.append(a * b * proj(phi))
    return HolevoChannel(tuple(states), tuple(effects))


def _diagnostics(choi: ChoiMatrix, tol: float) -> dict[str, Any]:
    vals = np.linalg.eigvalsh(choi.mat)
    return {
        "dim": choi.dim_in,
        "choi_rank": numerical_rank(choi.mat, tol),
        "min_pt_eigenvalue": min_pt_eigenvalue(choi),
        "max_eigenvalue": float(vals[-1]),
        "marginal_max_eigenvalue": float(
            min(
                np.linalg.eigvalsh(partial_trace(choi.mat, choi.dims, 1))[-1],
                np.linalg.eigvalsh(partial_trace(choi.mat, choi.dims, 0))[-1],
            )
        ),
        "trace_preserving": choi.trace_preserving,
    }


def _certify(choi: ChoiMatrix, dec: SeparableDecomposition, criterion: str, evidence: dict) -> EbtVerdict | None:
    residual = dec.residual(choi.mat)
    if residual > RESIDUAL_TOL:
        return None
    cert = holevo_from_separable_choi(dec, choi.dim_in, trace_preserving=choi.trace_preserving)
    cert_residual = float(np.linalg.norm(choi_of(cert).mat - choi.mat))
    if cert_residual > RESIDUAL_TOL:
        return None
    evidence = dict(evidence, decomposition_residual=residual, certificate_residual=cert_residual, terms=len(dec))
    return EbtVerdict(Status.EBT, criterion, evidence, certificate=cert, decomposition=dec)


def classify(channel: Channel, tol: float = DEFAULT_TOL) -> EbtVerdict:
    """Decide whether a square channel is entanglement breaking.

    Order of tests: an explicit measure-and-prepare form; the Kraus-rank and
    maximal-eigenvalue bounds; the partial-transpose test; a given Kraus set
    made only of rank-one operators (itself a measure-and-prepare form); then a product
    decomposition of the Choi matrix when it is PPT and either a qubit channel
    or of rank ``d``.  Anything left is reported as Undecided.
    """
    if not channel.is_square:
        raise UnsupportedDimension("classification needs dim_in == dim_out")
    choi = choi_of(channel)
    d = choi.dim_in

    if isinstance(channel, HolevoChannel):
        cert = rank_one_refinement(channel)
        res = float(np.linalg.norm(choi_of(cert).mat - choi.mat))
        return EbtVerdict(
            Status.EBT, "Holevo form given (measure-and-prepare)", {"certificate_residual": res, "terms": len(cert)},
            certificate=cert,
        )

    evidence = _diagnostics(choi, tol)
    witness = kraus_count_test(choi, tol)
    if witness is not None:
        if witness.test == "kraus-rank":
            label = "Kraus-rank test (fewer than d Kraus operators)"
        else:
            label = "max-eigenvalue test (exceeds marginal maximum)"
        return EbtVerdict(Status.NOT_EBT, label, dict(evidence, witness=witness.test))

    ppt, lam = is_ppt(choi, tol)
    if not ppt:
        return EbtVerdict(Status.NOT_EBT, "PPT test (partial transpose not PSD)", evidence)

    if isinstance(channel, KrausChannel):
        try:
            cert = holevo_from_rank1_kraus(channel)
        except RankTooHigh:
            cert = None
        if cert is not None:
            res = float(np.linalg.norm(choi_of(cert).mat - choi.mat))
            if res <= RESIDUAL_TOL:
                return EbtVerdict(
                    Status.EBT, "rank-one Kraus operators (measure-and-prepare)",
                    dict(evidence, certificate_residual=res, terms=len(cert)), certificate=cert,
                )

    if d == 2:
        try:
            dec = two_qubit_decomposition(choi.mat)
        except ValueError:
            dec = None
        if dec is not None:
            verdict = _certify(choi, dec, "PPT, 2x2 (zero-concurrence decomposition)", evidence)
            if verdict is not None:
                return verdict
    if evidence["choi_rank"] == d:
        try:
            dec = rank_d_decomposition(choi, tol)
        except (ValueError, PreconditionRankMismatch, MergeStall):
            dec = None
        if dec is not None:
            verdict = _certify(choi, dec, "PPT with Choi rank d (rank-d separability)", evidence)
            if verdict is not None:
                return verdict
    return EbtVerdict(Status.UNDECIDED, "PPT but no separable decomposition constructed", evidence)
