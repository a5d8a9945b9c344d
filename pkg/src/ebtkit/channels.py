"""Kraus, Holevo (measure-and-prepare) and Choi representations of channels.

All three are immutable and callable on matrices: ``channel(x)`` returns the
image of an arbitrary ``dim_in x dim_in`` matrix as a numpy array.  The Choi
matrix is ``(1/d) sum_jk |j><k| (x) Phi(|j><k|)``; its first factor is the
input space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .decomposition import SeparableDecomposition
from .errors import (
    DimensionMismatch,
    IncompleteProjectors,
    InvalidState,
    MarginalNotMaximallyMixed,
    NonOrthonormalBasis,
    NotPsd,
    NotTracePreserving,
    RankTooHigh,
    ShapeMismatch,
)
from .linalg import BipartiteDims, as_matrix, is_hermitian, min_eigenvalue, partial_trace, proj, psd_sqrt
from .states import DensityMatrix, Povm, PureState, _check_effects

TP_TOL = 1e-9
KRAUS_PRUNE_TOL = 1e-12
STRUCT_TOL = 1e-9
ORTHO_TOL = 1e-10
CHOI_PSD_TOL = 1e-9


class _Channel:
    dim_in: int
    dim_out: int

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatch(f"channel expects {self.dim_in}x{self.dim_in} input, got {x.shape}")
        return self._apply(x)

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_square(self) -> bool:
        return self.dim_in == self.dim_out

    @property
    def trace_preserving(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class KrausChannel(_Channel):
    operators: tuple

    def __post_init__(self):
        ops = [as_matrix(a) for a in self.operators]
        if not ops:
            raise ShapeMismatch("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        for k, a in enumerate(ops):
            if a.shape != shape:
                raise ShapeMismatch(f"operator {k} has shape {a.shape}, expected {shape}")
            a.setflags(write=False)
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def dim_out(self) -> int:
        return self.operators[0].shape[0]

    @property
    def dim_in(self) -> int:
        return self.operators[0].shape[1]

    def __len__(self) -> int:
        return len(self.operators)

    def _apply(self, x):
        return sum(a @ x @ a.conj().T for a in self.operators)

    def tp_residual(self) -> float:
        s = sum(a.conj().T @ a for a in self.operators)
        return float(np.linalg.norm(s - np.eye(self.dim_in)))

    @property
    def trace_preserving(self) -> bool:
        return self.tp_residual() <= TP_TOL


@dataclass(frozen=True, eq=False)
class HolevoChannel(_Channel):
    """``Phi(rho) = sum_k states[k] * Tr(effects[k] rho)``."""

    states: tuple
    effects: tuple

    def __post_init__(self):
        if len(self.states) != len(self.effects) or not self.states:
            raise ShapeMismatch("need the same positive number of states and effects")
        rs = [np.array(DensityMatrix(r).mat) for r in self.states]
        fs = _check_effects(self.effects)
        d_out = rs[0].shape[0]
        if any(r.shape[0] != d_out for r in rs):
            raise ShapeMismatch("prepared states have inconsistent dimensions")
        rs_f, fs_f = [], []
        for r, f in zip(rs, fs):
            f = 0.5 * (f + f.conj().T)
            r.setflags(write=False)
            f.setflags(write=False)
            rs_f.append(r)
            fs_f.append(f)
        object.__setattr__(self, "states", tuple(rs_f))
        object.__setattr__(self, "effects", tuple(fs_f))

    @property
    def dim_out(self) -> int:
        return self.states[0].shape[0]

    @property
    def dim_in(self) -> int:
        return self.effects[0].shape[0]

    @property
    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.states, self.effects))

    def __len__(self) -> int:
        return len(self.states)

    def _apply(self, x):
        return sum(r * np.trace(f @ x) for r, f in zip(self.states, self.effects))

    def tp_residual(self) -> float:
        return float(np.linalg.norm(sum(self.effects) - np.eye(self.dim_in)))

    @property
    def trace_preserving(self) -> bool:
        return self.tp_residual() <= TP_TOL

    def povm(self) -> Povm:
        from .states import validate_povm

        return validate_povm(self.effects)


@dataclass(frozen=True, eq=False)
class ChoiMatrix(_Channel):
    mat: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        m = as_matrix(self.mat)
        n = self.dim_in * self.dim_out
        if m.shape != (n, n):
            raise DimensionMismatch(f"Choi matrix shape {m.shape} does not match {self.dim_in}x{self.dim_out}")
        if not is_hermitian(m):
            raise NotPsd("Choi matrix is not Hermitian")
        lam = min_eigenvalue(m)
        if lam < -CHOI_PSD_TOL:
            raise NotPsd(f"Choi matrix has negative eigenvalue {lam:.3e}", min_eigenvalue=lam)
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dims(self) -> BipartiteDims:
        return BipartiteDims(self.dim_in, self.dim_out)

    def _apply(self, x):
        t = self.mat.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)
        return self.dim_in * np.einsum("jk,jmkn->mn", x, t)

    def left_marginal(self) -> np.ndarray:
        return partial_trace(self.mat, self.dims, which=1)

    def tp_residual(self) -> float:
        return float(np.linalg.norm(self.left_marginal() - np.eye(self.dim_in) / self.dim_in))

    @property
    def trace_preserving(self) -> bool:
        return self.tp_residual() <= TP_TOL


Channel = Union[KrausChannel, HolevoChannel, ChoiMatrix]


# --- application and conversions ------------------------------------------

def apply(channel: Channel, rho) -> DensityMatrix | np.ndarray:
    """Apply ``channel`` to a state.

    Returns a validated :class:`DensityMatrix` for trace-preserving channels and
    the raw output matrix otherwise.
    """
    mat = rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho)
    out = channel(mat)
    if channel.trace_preserving:
        return DensityMatrix(out)
    return out


def choi_of(channel: Channel) -> ChoiMatrix:
    d_in, d_out = channel.dim_in, channel.dim_out
    if isinstance(channel, ChoiMatrix):
        return channel
    if isinstance(channel, KrausChannel):
        vecs = np.stack([a.T.reshape(-1) for a in channel.operators], axis=1) / np.sqrt(d_in)
        mat = vecs @ vecs.conj().T
    elif isinstance(channel, HolevoChannel):
        mat = sum(np.kron(f.T, r) for r, f in zip(channel.states, channel.effects)) / d_in
    else:
        raise TypeError(f"not a channel: {type(channel).__name__}")
    return ChoiMatrix(mat, d_in, d_out)


def kraus_from_choi(choi: ChoiMatrix, tol: float | None = None) -> KrausChannel:
    """Canonical Kraus operators from the eigenvectors of the Choi matrix.

    Eigenvalues at or below ``tol`` (default ``1e-10`` times the largest
    eigenvalue) are discarded.
    """
    d_in, d_out = choi.dim_in, choi.dim_out
    vals, vecs = np.linalg.eigh(choi.mat)
    if vals[0] < -CHOI_PSD_TOL:
        raise NotPsd(f"Choi matrix has negative eigenvalue {vals[0]:.3e}", min_eigenvalue=vals[0])
    lam_max = max(vals[-1], 0.0)
    if tol is None:
        tol = max(1e-10 * lam_max, vals.size * np.finfo(float).eps * lam_max)
    ops = []
    for mu, u in zip(vals[::-1], vecs[:, ::-1].T):
        if mu <= tol:
            break
        ops.append(np.sqrt(d_in * mu) * u.reshape(d_in, d_out).T)
    if not ops:
        ops.append(np.zeros((d_out, d_in), dtype=complex))
    return KrausChannel(tuple(ops))


def _eig_factors(m: np.ndarray, rel_tol: float = KRAUS_PRUNE_TOL):
    vals, vecs = np.linalg.eigh(m)
    keep = vals > rel_tol * max(vals[-1], 0.0)
    return vals[keep], vecs[:, keep]


def kraus_from_holevo(h: HolevoChannel, basis: str = "eigen") -> KrausChannel:
    """Kraus operators ``sqrt(R_k) |m><n| sqrt(F_k)``.

    With ``basis="eigen"`` the vectors ``m``, ``n`` run over eigenbases of
    ``R_k`` and ``F_k``; the operators are then rank one and their number is
    ``sum_k rank(R_k) * rank(F_k)``.  This covers the CQ (``sqrt(R_k)|m><k|``),
    pure CQ (``|psi_k><k|``) and QC (``|k><n| sqrt(F_k)``) reductions.  With
    ``basis="computational"`` both run over the standard basis and operators of
    Frobenius norm at most ``1e-12`` are pruned.
    """
    ops = []
    for r, f in zip(h.states, h.effects):
        if basis == "eigen":
            rv, rvec = _eig_factors(r)
            fv, fvec = _eig_factors(f)
            for a, psi in zip(np.sqrt(rv), rvec.T):
                for b, phi in zip(np.sqrt(fv), fvec.T):
                    ops.append(a * b * np.outer(psi, phi.conj()))
        elif basis == "computational":
            sr, sf = psd_sqrt(r), psd_sqrt(f)
            for m in range(h.dim_out):
                for n in range(h.dim_in):
                    a = np.outer(sr[:, m], sf[n, :])
                    if np.linalg.norm(a) > KRAUS_PRUNE_TOL:
                        ops.append(a)
        else:
            raise ValueError(f"unknown basis {basis!r}")
    return KrausChannel(tuple(ops))


def holevo_from_rank1_kraus(k: KrausChannel, rel_tol: float = STRUCT_TOL) -> HolevoChannel:
    """Measure-and-prepare form of a channel whose Kraus operators all have rank one.

    ``A = s |w><u|`` contributes the pair ``(|w><w|, s^2 |u><u|)``.  Zero
    operators are skipped.
    """
    states, effects = [], []
    scale = max(np.linalg.norm(a, 2) for a in k.operators)
    for idx, a in enumerate(k.operators):
        u, s, vh = np.linalg.svd(a)
        if s[0] <= KRAUS_PRUNE_TOL * max(scale, 1.0):
            continue
        if s.size > 1 and s[1] > rel_tol * s[0]:
            raise RankTooHigh(f"Kraus operator {idx} has rank > 1 (second singular value {s[1]:.3e})", idx)
        states.append(proj(u[:, 0]))
        effects.append(s[0] ** 2 * proj(vh[0].conj()))
    return HolevoChannel(tuple(states), tuple(effects))


def holevo_from_separable_choi(
    dec: SeparableDecomposition, d: int, trace_preserving: bool = True, tol: float = 1e-8
) -> HolevoChannel:
    """Measure-and-prepare channel whose Choi matrix is the decomposed state.

    ``R_n = |w_n><w_n|`` and ``F_n = d * p_n * conj(|v_n><v_n|)``; the
    conjugate is required by the Choi convention for complex ``v_n``.
    """
    if dec.dims.dim_a != d:
        raise DimensionMismatch(f"decomposition input factor has dim {dec.dims.dim_a}, expected {d}")
    if trace_preserving:
        marginal = sum(p * proj(v) for p, v in zip(dec.weights, dec.left))
        dev = float(np.linalg.norm(marginal - np.eye(d) / d))
        if dev > tol:
            raise MarginalNotMaximallyMixed(f"left marginal deviates from I/d by {dev:.3e}")
    states = [proj(w) for w in dec.right]
    effects = [d * p * proj(v).conj() for p, v in zip(dec.weights, dec.left)]
    return HolevoChannel(tuple(states), tuple(effects))


def to_kraus(channel: Channel) -> KrausChannel:
    if isinstance(channel, KrausChannel):
        return channel
    if isinstance(channel, HolevoChannel):
        return kraus_from_holevo(channel)
    return kraus_from_choi(channel)


def channels_close(a: Channel, b: Channel, tol: float = 1e-9) -> bool:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        return False
    return bool(np.linalg.norm(choi_of(a).mat - choi_of(b).mat) <= tol)


# --- structured constructors -------------------------------------------------

def _orthonormal_vectors(basis) -> np.ndarray:
    vecs = np.array([b.vec if isinstance(b, PureState) else PureState(b).vec for b in basis])
    gram = vecs.conj() @ vecs.T
    err = np.linalg.norm(gram - np.eye(len(vecs)))
    if err > ORTHO_TOL:
        raise NonOrthonormalBasis(f"basis Gram matrix deviates from identity by {err:.3e}")
    return vecs


def _as_density(r) -> np.ndarray:
    return r.mat if isinstance(r, DensityMatrix) else DensityMatrix(r).mat


def cq_channel(states, basis=None) -> HolevoChannel:
    """``rho -> sum_k R_k <e_k|rho|e_k>``; ``basis`` defaults to the standard basis."""
    rs = [_as_density(r) for r in states]
    if basis is None:
        basis = np.eye(len(rs), dtype=complex)
    vecs = _orthonormal_vectors(basis)
    if len(vecs) != len(rs):
        raise ShapeMismatch(f"{len(rs)} states but {len(vecs)} basis vectors")
    return HolevoChannel(tuple(rs), tuple(proj(e) for e in vecs))


def qc_channel(povm, basis=None) -> HolevoChannel:
    """``rho -> sum_k |e_k><e_k| Tr(F_k rho)``; ``basis`` defaults to the standard basis."""
    from .states import validate_povm

    effects = povm.elements if isinstance(povm, Povm) else validate_povm(povm).elements
    if basis is None:
        basis = np.eye(len(effects), dtype=complex)
    vecs = _orthonormal_vectors(basis)
    if len(vecs) != len(effects):
        raise ShapeMismatch(f"{len(effects)} effects but {len(vecs)} basis vectors")
    return HolevoChannel(tuple(proj(e) for e in vecs), tuple(effects))


def point_channel(r, dim_in: int | None = None) -> HolevoChannel:
    r = _as_density(r)
    d_in = r.shape[0] if dim_in is None else dim_in
    return HolevoChannel((r,), (np.eye(d_in, dtype=complex),))


def block_projection_channel(projections) -> KrausChannel:
    """``rho -> sum_k P_k rho P_k`` for a complete set of orthogonal projectors."""
    ps = [as_matrix(p) for p in projections]
    d = ps[0].shape[0]
    for k, p in enumerate(ps):
        if p.shape != (d, d):
            raise ShapeMismatch(f"projection {k} has shape {p.shape}")
        if np.linalg.norm(p - p.conj().T) > ORTHO_TOL or np.linalg.norm(p @ p - p) > ORTHO_TOL:
            raise IncompleteProjectors(f"element {k} is not an orthogonal projection")
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if np.linalg.norm(ps[i] @ ps[j]) > ORTHO_TOL:
                raise IncompleteProjectors(f"projections {i} and {j} are not orthogonal")
    residual = np.linalg.norm(sum(ps) - np.eye(d))
    if residual > ORTHO_TOL:
        raise IncompleteProjectors(f"projections sum to identity only within {residual:.3e}")
    return KrausChannel(tuple(ps))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((as_matrix(u),))


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=complex),))


def depolarizing_channel(d: int, lam: float) -> ChoiMatrix:
    """``rho -> lam * rho + (1 - lam) * Tr(rho) I/d``, given by its Choi matrix."""
    beta = np.zeros(d * d, dtype=complex)
    beta[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    mat = lam * np.outer(beta, beta) + (1.0 - lam) * np.eye(d * d) / d**2
    return ChoiMatrix(mat, d, d)


def dephasing_channel(d: int) -> HolevoChannel:
    basis = np.eye(d, dtype=complex)
    return cq_channel([proj(e) for e in basis], basis)


# --- structural predicates ---------------------------------------------------

def is_rank_one(m: np.ndarray, rel_tol: float = STRUCT_TOL) -> bool:
    vals = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return vals[-1] > 0 and (vals.size < 2 or vals[-2] <= rel_tol * vals[-1])


def _top_vector(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return vecs[:, -1]


def _mutually_orthogonal(mats, tol: float = STRUCT_TOL) -> bool:
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.linalg.norm(mats[i] @ mats[j]) > tol:
                return False
    return True


def is_cq(h: HolevoChannel) -> bool:
    """Effects are rank-one, mutually orthogonal and complete."""
    fs = h.effects
    if not all(is_rank_one(f) for f in fs):
        return False
    return _mutually_orthogonal(fs) and h.tp_residual() <= STRUCT_TOL


def is_qc(h: HolevoChannel) -> bool:
    """Prepared states are rank-one, mutually orthogonal and sum to the identity."""
    rs = h.states
    if not all(is_rank_one(r) for r in rs):
        return False
    return _mutually_orthogonal(rs) and np.linalg.norm(sum(rs) - np.eye(h.dim_out)) <= STRUCT_TOL


def is_point(h: HolevoChannel) -> bool:
    r0 = h.states[0]
    return all(np.linalg.norm(r - r0) <= STRUCT_TOL for r in h.states[1:])


def cq_pure_states(h: HolevoChannel) -> np.ndarray | None:
    """Rows ``psi_k`` for an extreme CQ channel, else ``None``."""
    if not is_cq(h) or not all(is_rank_one(r) for r in h.states):
        return None
    return np.array([_top_vector(r) for r in h.states])


# --- algebra on channels -------------------------------------------------------

def convex_combination(alpha: float, phi1: HolevoChannel, phi2: HolevoChannel) -> HolevoChannel:
    """``alpha * phi1 + (1 - alpha) * phi2`` with the POVMs concatenated and rescaled."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if (phi1.dim_in, phi1.dim_out) != (phi2.dim_in, phi2.dim_out):
        raise DimensionMismatch("channels have different dimensions")
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        if not phi.trace_preserving:
            raise NotTracePreserving(f"{name} is not trace-preserving")
    if alpha == 0.0:
        return phi2
    if alpha == 1.0:
        return phi1
    states = phi1.states + phi2.states
    effects = tuple(alpha * f for f in phi1.effects) + tuple((1.0 - alpha) * f for f in phi2.effects)
    return HolevoChannel(states, effects)


def adjoint(phi: Channel) -> Channel:
    """Hilbert-Schmidt adjoint; a Holevo form stays a Holevo form."""
    if isinstance(phi, HolevoChannel):
        states, effects = [], []
        for r, f in zip(phi.states, phi.effects):
            t = np.trace(f).real
            states.append(f / t)
            effects.append(t * r)
        return HolevoChannel(tuple(states), tuple(effects))
    return KrausChannel(tuple(a.conj().T for a in to_kraus(phi).operators))


def compose(phi: Channel, upsilon: Channel) -> Channel:
    """``phi o upsilon`` (``upsilon`` acts first).

    A Holevo ``phi`` keeps its states and has each effect replaced by
    ``adjoint(upsilon)(F_k)``; a Holevo ``upsilon`` keeps its effects up to
    scale and has each state pushed through ``phi``.  Otherwise Kraus
    operators multiply pairwise.
    """
    if upsilon.dim_out != phi.dim_in:
        raise DimensionMismatch(f"cannot compose: inner output {upsilon.dim_out} vs outer input {phi.dim_in}")
    if isinstance(phi, HolevoChannel):
        up_adj = adjoint(to_kraus(upsilon))
        pairs = [(r, up_adj(f)) for r, f in zip(phi.states, phi.effects)]
        pairs = [(r, f) for r, f in pairs if np.linalg.norm(f) > KRAUS_PRUNE_TOL]
        return HolevoChannel(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
    if isinstance(upsilon, HolevoChannel):
        states, effects = [], []
        for r, f in zip(upsilon.states, upsilon.effects):
            out = phi(r)
            t = np.trace(out).real
            if t <= KRAUS_PRUNE_TOL:
                continue
            states.append(out / t)
            effects.append(t * f)
        return HolevoChannel(tuple(states), tuple(effects))
    outer, inner = to_kraus(phi), to_kraus(upsilon)
    return KrausChannel(tuple(a @ b for a in outer.operators for b in inner.operators))


# --- measure-and-prepare simulation ------------------------------------------

def outcome_probabilities(h: HolevoChannel, rho, clip_tol: float = 1e-10) -> np.ndarray:
    mat = rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho)
    p = np.array([np.trace(f @ mat).real for f in h.effects])
    if p.min() < -clip_tol:
        raise InvalidState(f"negative outcome probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def simulate_measure_prepare(h: HolevoChannel, rho, n_samples: int, seed=None):
    """Sample ``n_samples`` rounds of measure-then-prepare.

    Returns ``(empirical_state, outcome_counts)`` where the empirical state is
    the average of the prepared states.  A fixed ``seed`` fixes the result.
    """
    if not h.trace_preserving:
        raise NotTracePreserving("simulation requires a trace-preserving channel")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    p = outcome_probabilities(h, rho)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n_samples, p)
    emp = sum(c * r for c, r in zip(counts, h.states)) / n_samples
    return DensityMatrix(emp), counts
