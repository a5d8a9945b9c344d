"""Hermitian operator bases and the real transfer matrix of a channel.

With an orthonormal Hermitian basis ``G_0 = I/sqrt(d), G_1, ...`` a channel
acts on coordinate vectors ``x_j = Tr(G_j X)`` through the matrix
``t_jk = Tr(G_j Phi(G_k))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import Channel, HolevoChannel
from .errors import DimensionMismatch, NonHermiticityPreserving, UnsupportedDimension
from .linalg import as_matrix, numerical_rank

IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    dim: int
    elements: tuple

    def __len__(self) -> int:
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return np.array(self.elements)

    def coordinates(self, m) -> np.ndarray:
        """Real coordinates ``Tr(G_j m)`` of a Hermitian matrix."""
        m = as_matrix(m)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"expected a {self.dim}x{self.dim} matrix, got {m.shape}")
        c = np.einsum("jab,ba->j", self.stacked(), m)
        if np.max(np.abs(c.imag), initial=0.0) > IMAG_TOL * (1.0 + np.linalg.norm(m)):
            raise NonHermiticityPreserving("matrix is not Hermitian")
        return c.real

    def matrix(self, coords) -> np.ndarray:
        return np.einsum("j,jab->ab", np.asarray(coords), self.stacked())


def gell_mann_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis, normalized so that ``Tr(G_j G_k) = delta_jk``.

    Order: ``I/sqrt(d)``; symmetric off-diagonals for ``j < k`` in lexicographic
    order; antisymmetric off-diagonals in the same order; diagonal ladder.
    For ``d = 2`` this is ``(I, X, Y, Z)/sqrt(2)``.
    """
    if d < 2:
        raise UnsupportedDimension(f"basis needs d >= 2, got {d}")
    elems = [np.eye(d, dtype=complex) / np.sqrt(d)]
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[j, k] = g[k, j] = 1.0 / np.sqrt(2)
        elems.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[k, j] = 1j / np.sqrt(2)
        g[j, k] = -1j / np.sqrt(2)
        elems.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        elems.append(np.diag(diag).astype(complex) / np.sqrt(l * (l + 1)))
    return OperatorBasis(d, tuple(elems))


def bloch_vector(rho, basis: OperatorBasis) -> np.ndarray:
    mat = rho.mat if hasattr(rho, "mat") else rho
    return basis.coordinates(mat)


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    t: np.ndarray
    basis: OperatorBasis

    @property
    def dim(self) -> int:
        return self.basis.dim

    def first_row_residual(self) -> float:
        e0 = np.zeros(self.t.shape[1])
        e0[0] = 1.0
        return float(np.linalg.norm(self.t[0] - e0))

    def rank(self, tol: float | None = 1e-9) -> int:
        return numerical_rank(self.t, tol)


def transfer_matrix(channel: Channel, basis: OperatorBasis) -> TransferMatrix:
    if channel.dim_in != basis.dim or channel.dim_out != basis.dim:
        raise DimensionMismatch("channel and basis dimensions differ")
    g = basis.stacked()
    images = np.array([channel(gk) for gk in g])
    t = np.einsum("jab,kba->jk", g, images)
    if np.max(np.abs(t.imag)) > IMAG_TOL:
        raise NonHermiticityPreserving(f"transfer matrix has imaginary part {np.max(np.abs(t.imag)):.3e}")
    return TransferMatrix(t.real, basis)


@dataclass(frozen=True, eq=False)
class WuFactors:
    """Coordinates of prepared states (``w``) and effects (``u``), one column per pair.

    Both matrices are ``d^2 x N``; the transfer matrix is ``w @ u.T``.
    """

    w: np.ndarray
    u: np.ndarray

    def product(self) -> np.ndarray:
        return self.w @ self.u.T


def wu_factorization(h: HolevoChannel, basis: OperatorBasis) -> WuFactors:
    if h.dim_in != basis.dim or h.dim_out != basis.dim:
        raise DimensionMismatch("channel and basis dimensions differ")
    w = np.array([basis.coordinates(r) for r in h.states]).T
    u = np.array([basis.coordinates(f) for f in h.effects]).T
    return WuFactors(w, u)


def ebt_diag_necessary(tm: TransferMatrix, tol: float = 1e-10) -> tuple[bool, float]:
    """Qubit necessary condition: an EBT map has ``sum_{j>=1} |t_jj| <= 1``.

    ``False`` is a NotEBT witness; ``True`` decides nothing.
    """
    if tm.dim != 2:
        raise UnsupportedDimension("the diagonal-sum condition is only available for qubits")
    value = float(np.abs(np.diag(tm.t)[1:]).sum())
    return value <= 1.0 + tol, value
