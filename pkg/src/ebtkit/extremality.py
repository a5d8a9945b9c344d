"""Extreme points of the CPT and EBT convex sets.

CPT extremality uses Choi's criterion: with a minimal Kraus set ``{A_k}``
the channel is extreme iff the products ``A_j^dag A_k`` are linearly
independent.  EBT extremality has no general test here; the hints report
sufficient conditions, explicit convex splits, and the verified status of
the named example channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .channels import (
    Channel,
    ChoiMatrix,
    HolevoChannel,
    KrausChannel,
    channels_close,
    choi_of,
    cq_pure_states,
    holevo_from_rank1_kraus,
    is_cq,
    is_point,
    is_qc,
    is_rank_one,
    kraus_from_choi,
    qc_channel,
)
from .ebt import Status, classify
from .errors import IncompleteProjectors, NotEbtInput, RankTooHigh
from .linalg import numerical_rank, proj

INDEP_REL_TOL = 1e-8
OVERLAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ExtremalityReport:
    cpt_extreme: str
    gram_min_singular_value: float
    gram_max_singular_value: float
    n_kraus: int
    structural_class: str
    cq_overlap_matrix: np.ndarray | None = None


def kraus_product_singular_values(k: KrausChannel) -> np.ndarray:
    """Singular values of the matrix whose columns are ``vec(A_j^dag A_k)``.

    When there are more products than the ``d_in^2`` dimensions they live in,
    the missing singular values are reported as zeros.
    """
    ops = k.operators
    cols = [(a.conj().T @ b).reshape(-1) for a in ops for b in ops]
    m = np.array(cols).T
    s = np.linalg.svd(m, compute_uv=False)
    if m.shape[1] > s.size:
        s = np.concatenate([s, np.zeros(m.shape[1] - s.size)])
    return s


def cpt_extremality(channel: Channel) -> ExtremalityReport:
    """Decide extremality among CPT maps from a canonical Kraus set.

    ``"yes"`` when the smallest singular value exceeds ``1e-8`` times the
    largest, ``"marginal"`` within a factor ten below that, else ``"no"``.
    """
    k = kraus_from_choi(choi_of(channel))
    s = kraus_product_singular_values(k)
    smax, smin = float(s.max()), float(s.min())
    tau = INDEP_REL_TOL * smax
    if smin > tau:
        verdict = "yes"
    elif smin >= tau / 10:
        verdict = "marginal"
    else:
        verdict = "no"
    overlaps = None
    structure = classify_structure(channel)
    if isinstance(channel, HolevoChannel):
        psis = cq_pure_states(channel)
        if psis is not None:
            overlaps = psis.conj() @ psis.T
    return ExtremalityReport(verdict, smin, smax, len(k), structure, overlaps)


def _is_block_projection(k: KrausChannel) -> bool:
    from .channels import block_projection_channel

    if not k.is_square:
        return False
    try:
        block_projection_channel(k.operators)
    except IncompleteProjectors:
        return False
    return True


def _merge_equal_states(h: HolevoChannel) -> HolevoChannel:
    """Sum the effects of pairs that prepare the same state."""
    states, effects = [], []
    for r, f in zip(h.states, h.effects):
        for i, s in enumerate(states):
            if np.linalg.norm(r - s) <= 1e-9:
                effects[i] = effects[i] + f
                break
        else:
            states.append(r)
            effects.append(f)
    return HolevoChannel(tuple(states), tuple(effects))


def _holevo_structure(h: HolevoChannel) -> str:
    kind = _pair_structure(h)
    if kind == "general":
        merged = _merge_equal_states(h)
        if len(merged) < len(h):
            kind = _pair_structure(merged)
    return kind


def _pair_structure(h: HolevoChannel) -> str:
    if is_point(h):
        return "point"
    if is_cq(h):
        return "extremeCQ" if all(is_rank_one(r) for r in h.states) else "CQ"
    if is_qc(h):
        return "QC"
    return "general"


def classify_structure(channel: Channel) -> str:
    """One of ``point``, ``extremeCQ``, ``CQ``, ``QC``, ``block-projection``, ``general``."""
    if isinstance(channel, HolevoChannel):
        return _holevo_structure(channel)
    k = channel if isinstance(channel, KrausChannel) else kraus_from_choi(channel)
    try:
        return _holevo_structure(holevo_from_rank1_kraus(k))
    except RankTooHigh:
        pass
    if isinstance(channel, KrausChannel) and _is_block_projection(channel):
        return "block-projection"
    if channel.is_square and channel.trace_preserving:
        verdict = classify(channel)
        if verdict.is_ebt and verdict.criterion.startswith("PPT with Choi rank d"):
            return _holevo_structure(verdict.certificate)
    return "general"


# --- named example channels ---------------------------------------------------

def tetrahedron_vectors() -> np.ndarray:
    signs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return signs / np.sqrt(3)


def tetrahedron_channel() -> HolevoChannel:
    """``rho -> (3/4) sum_i |v_i><v_i| <v_i|rho|v_i>`` for the four tetrahedron vertices in C^3."""
    vs = tetrahedron_vectors()
    return HolevoChannel(tuple(proj(v) for v in vs), tuple(0.75 * proj(v) for v in vs))


def tetrahedron_w(i: int, j: int) -> np.ndarray:
    """Unit vector orthogonal to the two vertices other than ``i`` and ``j``."""
    k, l = sorted(set(range(4)) - {i, j})
    vs = tetrahedron_vectors()
    w = np.cross(vs[k], vs[l])
    w = w / np.linalg.norm(w)
    if w[np.flatnonzero(np.abs(w) > 1e-12)[0]] < 0:
        w = -w
    return w.astype(complex)


@dataclass
class TetrahedronReport:
    povm_residual: float
    orthogonality: dict = field(default_factory=dict)
    output_residual: dict = field(default_factory=dict)
    output_rank: dict = field(default_factory=dict)
    complement_overlap: dict = field(default_factory=dict)
    output_eigenvalues: dict = field(default_factory=dict)
    cpt_extreme: str = ""

    @property
    def ok(self) -> bool:
        tol = 1e-10
        return (
            self.povm_residual <= tol
            and max(self.orthogonality.values()) <= 1e-12
            and max(self.output_residual.values()) <= tol
            and all(r == 2 for r in self.output_rank.values())
            and max(self.complement_overlap.values()) <= tol
            and self.cpt_extreme == "no"
        )


def verify_tetrahedron() -> TetrahedronReport:
    """Recompute the observables behind the tetrahedron channel's extremality argument."""
    vs = tetrahedron_vectors()
    phi = tetrahedron_channel()
    rep = TetrahedronReport(povm_residual=float(np.linalg.norm(sum(phi.effects) - np.eye(3))))
    for i in range(4):
        for j in range(i + 1, 4):
            k, l = sorted(set(range(4)) - {i, j})
            w = tetrahedron_w(i, j)
            out = phi(proj(w))
            expected = 0.5 * (proj(vs[i]) + proj(vs[j]))
            rep.orthogonality[(i, j)] = float(max(abs(np.vdot(w, vs[k])), abs(np.vdot(w, vs[l]))))
            rep.output_residual[(i, j)] = float(np.linalg.norm(out - expected))
            rep.output_rank[(i, j)] = numerical_rank(out, 1e-10)
            w_kl = tetrahedron_w(k, l)
            rep.complement_overlap[(i, j)] = float(abs(np.vdot(w_kl, out @ w_kl)))
            rep.output_eigenvalues[(i, j)] = np.linalg.eigvalsh(out)
    rep.cpt_extreme = cpt_extremality(phi).cpt_extreme
    return rep


def trine_block_channel() -> HolevoChannel:
    """Quantum-classical channel on C^4: a trine on span{g1, g2} plus the projector on span{g3, g4}."""
    g = np.eye(4, dtype=complex)
    g_plus = 0.5 * g[0] + np.sqrt(3) / 2 * g[1]
    g_minus = 0.5 * g[0] - np.sqrt(3) / 2 * g[1]
    effects = [
        2 / 3 * proj(g[0]),
        2 / 3 * proj(g_plus),
        2 / 3 * proj(g_minus),
        proj(g[2]) + proj(g[3]),
    ]
    return qc_channel(effects)


def _builtin_match(channel: Channel) -> str | None:
    if (channel.dim_in, channel.dim_out) == (3, 3) and channels_close(channel, tetrahedron_channel(), 1e-8):
        return "tetrahedron"
    if (channel.dim_in, channel.dim_out) == (4, 4) and channels_close(channel, trine_block_channel(), 1e-8):
        return "trine4"
    return None


# --- EBT extremality hints ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EbtExtremalityHints:
    extreme_in_ebt: str
    reason: str
    general_test: str
    structural_class: str
    cpt_extreme: str
    builtin: str | None = None
    split: tuple[float, HolevoChannel, HolevoChannel] | None = None
    details: dict[str, Any] = field(default_factory=dict)


def mixed_state_split(h: HolevoChannel) -> tuple[float, HolevoChannel, HolevoChannel] | None:
    """Write ``h = a*h1 + (1-a)*h2`` with ``h1 != h2`` by splitting a mixed prepared state.

    If ``R_k = a P + (1-a) R'`` with ``P`` its top eigenprojector, ``h1`` and
    ``h2`` prepare ``P`` and ``R'`` on outcome ``k`` and agree elsewhere.
    """
    for idx, r in enumerate(h.states):
        vals, vecs = np.linalg.eigh(r)
        if vals[-2] <= 1e-9 * vals[-1]:
            continue
        a = float(vals[-1])
        top = proj(vecs[:, -1])
        rest = (r - a * top) / (1.0 - a)
        s1 = list(h.states)
        s2 = list(h.states)
        s1[idx], s2[idx] = top, rest
        return a, HolevoChannel(tuple(s1), h.effects), HolevoChannel(tuple(s2), h.effects)
    return None


def ebt_extremality_hints(channel: Channel) -> EbtExtremalityHints:
    """Sufficient conditions for (non-)extremality of an EBT channel among EBT channels."""
    verdict = classify(channel)
    if verdict.status is not Status.EBT:
        raise NotEbtInput(f"channel is not certified EBT ({verdict.status.value})")
    structure = classify_structure(channel)
    cpt = cpt_extremality(channel).cpt_extreme
    builtin = _builtin_match(channel)
    common = dict(structural_class=structure, cpt_extreme=cpt, builtin=builtin)

    if structure == "extremeCQ":
        return EbtExtremalityHints("yes", "extreme CQ channels are extreme among EBT maps", "yes", **common)
    pure_point = not isinstance(channel, HolevoChannel) or is_rank_one(channel.states[0])
    if structure == "point" and pure_point:
        return EbtExtremalityHints("yes", "point channel with a pure image", "yes", **common)
    if cpt == "yes":
        return EbtExtremalityHints(
            "yes", "extreme among CPT maps and EBT, hence extreme among EBT maps (must be extreme CQ)", "yes",
            details={"consistent_with_extreme_cq": structure == "extremeCQ"}, **common,
        )
    if isinstance(channel, HolevoChannel):
        split = mixed_state_split(channel)
        if split is not None:
            a, h1, h2 = split
            residual = float(np.linalg.norm(
                choi_of(channel).mat - a * choi_of(h1).mat - (1 - a) * choi_of(h2).mat
            ))
            return EbtExtremalityHints(
                "no", "explicit convex split of a mixed prepared state", "no",
                split=split, details={"split_residual": residual}, **common,
            )
    if builtin is not None:
        return EbtExtremalityHints(
            "yes", f"verified extreme for the named example '{builtin}'", "inconclusive", **common,
        )
    return EbtExtremalityHints("inconclusive", "no sufficient condition applies", "inconclusive", **common)
