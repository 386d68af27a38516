"""Fourier mode analysis of the deformation complex on the flat seven-torus.

Constant-structure operators act mode by mode on the torus: on the span of
e^{i k.x} the exterior derivative becomes the wedge with ik, so every
differential operator in the deformation complex reduces to a small matrix
per integer mode k.  The middle operator of the complex sends a one-form
alpha to star(d alpha ^ star_phi), a first-order map whose per-mode block
is linear in k; its kernel intersected with the coclosed condition counts
the check-harmonic one-forms.  Summing kernel dimensions over a box of
modes certifies the dimension of that space and, by subtracting the first
Betti number, the obstruction count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .forms import KForm, wedge, rel_residual, _wedge_table
from .g2 import G2Data, standard_g2

KERNEL_RTOL = 1e-10


@lru_cache(maxsize=None)
def _coordinate_wedge(n: int, g: int) -> np.ndarray:
    """W[j] is the matrix of beta -> e^j ^ beta from grade g to g + 1."""
    ia, ib, out, signs = _wedge_table(n, 1, g)
    mats = np.zeros((n, comb(n, g + 1), comb(n, g)))
    np.add.at(mats, (ia, out, ib), signs)
    return mats


def _base_tensors(data: G2Data) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate pieces (T, U) with D1'(k) = ic sum k_j T[j] and
    dstar1(k) = i sum k_j U[j]."""
    if "torus_base" not in data._cache:
        w2 = _coordinate_wedge(7, 1)
        m_star = np.zeros((7, 21))
        for pos in range(21):
            unit = np.zeros(21)
            unit[pos] = 1.0
            m_star[:, pos] = wedge(KForm(7, 2, unit), data.star_phi).coeffs
        project = data.metric.hodge_matrix(6) @ m_star
        t = np.einsum("pa,jab->jpb", project, w2)
        w6 = _coordinate_wedge(7, 6)
        h1 = data.metric.hodge_matrix(1)
        h7 = data.metric.hodge_matrix(7)
        u = -float(h7[0, 0]) * np.einsum("jxa,ab->jxb", w6, h1)[:, 0, :]
        data._cache["torus_base"] = (t, u)
    return data._cache["torus_base"]


@dataclass(frozen=True)
class ModeBlock:
    """The complex of one Fourier mode, as dense matrices on coefficients."""

    k: tuple[int, ...]
    d0: np.ndarray
    d1: np.ndarray
    d1_prime: np.ndarray
    dstar1: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        """The check-harmonic condition: d1_prime rows over the coclosed row."""
        return np.vstack([self.d1_prime, self.dstar1[None, :]])


def mode_block(k, data: G2Data | None = None, c: float = 1.0) -> ModeBlock:
    """Assemble the mode matrices for one integer frequency vector."""
    if data is None:
        data = standard_g2()
    kvec = np.asarray(k, dtype=np.float64)
    if kvec.shape != (7,):
        raise ValueError(f"mode must have seven components, got shape {kvec.shape}")
    t, u = _base_tensors(data)
    w2 = _coordinate_wedge(7, 1)
    return ModeBlock(
        k=tuple(int(v) for v in np.asarray(k).ravel()),
        d0=1j * kvec,
        d1=1j * np.einsum("j,jab->ab", kvec, w2),
        d1_prime=1j * c * np.einsum("j,jab->ab", kvec, t),
        dstar1=1j * np.einsum("j,ja->a", kvec, u),
    )


def _kernel_total(tensor: np.ndarray, cutoff: int, chunk: int) -> int:
    """Sum per-mode kernel dimensions of i * sum k_j tensor[j] over the box."""
    side = 2 * cutoff + 1
    total = side**7
    count = 0
    for lo in range(0, total, chunk):
        flat = np.arange(lo, min(lo + chunk, total))
        modes = np.stack(np.unravel_index(flat, (side,) * 7), axis=1) - cutoff
        # Blocks are i times a real matrix, so S^H S is real symmetric.
        real = np.einsum("mj,jrc->mrc", modes.astype(np.float64), tensor)
        gram = np.einsum("mrc,mrd->mcd", real, real)
        eigs = np.linalg.eigvalsh(gram)
        count += int(np.sum(eigs <= KERNEL_RTOL**2 * eigs[:, -1:]))
    return count


@dataclass(frozen=True)
class CohomologySummary:
    """Dimension counts over all modes with max-norm at most the cutoff."""

    cutoff: int
    dim_check_H1: int
    dim_H2: int
    b1: int

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "dim_check_H1": self.dim_check_H1,
            "dim_H2": self.dim_H2,
            "b1": self.b1,
        }


def betti_one(cutoff: int, data: G2Data | None = None, chunk: int = 65536) -> int:
    """First Betti number from closed and coclosed one-forms, mode by mode."""
    if data is None:
        data = standard_g2()
    _, u = _base_tensors(data)
    w2 = _coordinate_wedge(7, 1)
    tensor = np.concatenate([w2, u[:, None, :]], axis=1)
    return _kernel_total(tensor, cutoff, chunk)


def harmonic_dim(cutoff: int, data: G2Data | None = None, c: float = 1.0,
                 chunk: int = 65536) -> CohomologySummary:
    """Count check-harmonic one-forms over the mode box and derive the rest.

    dim_check_H1 sums the kernels of the stacked (d1_prime; dstar1) blocks;
    b1 is recomputed from the ordinary harmonic condition on the same box,
    and dim_H2 is their difference.
    """
    if data is None:
        data = standard_g2()
    t, u = _base_tensors(data)
    tensor = np.concatenate([c * t, u[:, None, :]], axis=1)
    check_h1 = _kernel_total(tensor, cutoff, chunk)
    b1 = betti_one(cutoff, data, chunk)
    return CohomologySummary(cutoff, check_h1, check_h1 - b1, b1)


def adjoint_check(k, data: G2Data | None = None, c: float = 1.0) -> float:
    """Residuals of the adjoint identities of the middle operator at one mode.

    The operator is formally self-adjoint, so the conjugate transpose of its
    block must equal the gram-conjugated block at the same mode, and by
    reality the plain transpose at the opposite mode must agree with it.
    """
    if data is None:
        data = standard_g2()
    block = mode_block(k, data, c).d1_prime
    opposite = mode_block(tuple(-v for v in np.asarray(k).ravel()), data, c).d1_prime
    g1 = data.metric.gram_on_forms(1)
    weighted = g1 @ block @ np.linalg.inv(g1)
    return max(
        rel_residual(block.conj().T, weighted),
        rel_residual(block.conj(), opposite),
        rel_residual(opposite.T, weighted),
    )
