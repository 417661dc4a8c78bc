"""Direct solvers for the complex systems produced by the FEM kernel.

Two factorizations share one interface:

* :class:`BandedComplexMatrix` -> LAPACK band LU (``zgbtrf``/``zgbtrs``) with
  partial pivoting confined to the widened band.
* scipy sparse matrices -> SuperLU.  Band storage grows like ``N * bandwidth``
  and stops fitting in memory around ``n = 250`` for edge elements, so the FEM
  sweeps go through this path.

Both are deterministic: identical inputs give bit-identical solutions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import lapack

PIVOT_TOL = 1e-14


class SingularMatrixError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BandedComplexMatrix:
    """Square matrix in LAPACK general-band layout.

    ``band[ku + i - j, j] = A[i, j]`` for ``max(0, j - ku) <= i <= min(n - 1, j + kl)``.
    """

    n: int
    kl: int
    ku: int
    band: np.ndarray

    def __post_init__(self):
        if self.band.shape != (self.kl + self.ku + 1, self.n):
            raise ValueError(f"band shape {self.band.shape} does not match n={self.n}, kl={self.kl}, ku={self.ku}")
        if max(self.kl, self.ku) > max(self.n - 1, 0):
            raise ValueError("bandwidth exceeds dimension")

    @classmethod
    def from_dense(cls, a, kl: int | None = None, ku: int | None = None) -> "BandedComplexMatrix":
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        lo, up = bandwidths(a)
        kl = lo if kl is None else kl
        ku = up if ku is None else ku
        n = a.shape[0]
        band = np.zeros((kl + ku + 1, n), dtype=complex)
        for d in range(-kl, ku + 1):
            diag = np.diagonal(a, offset=d)
            if d >= 0:
                band[ku - d, d:] = diag
            else:
                band[ku - d, : n + d] = diag
        return cls(n, kl, ku, band)

    @classmethod
    def from_sparse(cls, a: sp.spmatrix) -> "BandedComplexMatrix":
        a = sp.coo_matrix(a)
        if a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        n = a.shape[0]
        off = a.col - a.row
        kl = int(max(0, -off.min())) if a.nnz else 0
        ku = int(max(0, off.max())) if a.nnz else 0
        band = np.zeros((kl + ku + 1, n), dtype=complex)
        np.add.at(band, (ku + a.row - a.col, a.col), a.data)
        return cls(n, kl, ku, band)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=complex)
        for d in range(-self.kl, self.ku + 1):
            idx = np.arange(max(0, -d), min(self.n, self.n - d))
            a[idx, idx + d] = self.band[self.ku - d, idx + d]
        return a

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        y = np.zeros(self.n, dtype=complex)
        for d in range(-self.kl, self.ku + 1):
            idx = np.arange(max(0, -d), min(self.n, self.n - d))
            y[idx] += self.band[self.ku - d, idx + d] * x[idx + d]
        return y

    def row_max(self) -> np.ndarray:
        out = np.zeros(self.n)
        for d in range(-self.kl, self.ku + 1):
            idx = np.arange(max(0, -d), min(self.n, self.n - d))
            np.maximum.at(out, idx, np.abs(self.band[self.ku - d, idx + d]))
        return out


def bandwidths(a) -> tuple[int, int]:
    """Lower and upper bandwidth of a dense or sparse matrix."""
    if sp.issparse(a):
        coo = sp.coo_matrix(a)
        rows, cols = coo.row, coo.col
        keep = coo.data != 0
        rows, cols = rows[keep], cols[keep]
    else:
        rows, cols = np.nonzero(np.asarray(a))
    if len(rows) == 0:
        return 0, 0
    off = cols - rows
    return int(max(0, -off.min())), int(max(0, off.max()))


class BandLU:
    def __init__(self, matrix: BandedComplexMatrix):
        n, kl, ku = matrix.n, matrix.kl, matrix.ku
        self.n = n
        self.kl, self.ku = kl, ku
        if n == 0:
            raise ValueError("empty matrix")
        ab = np.zeros((2 * kl + ku + 1, n), dtype=complex, order="F")
        ab[kl:, :] = matrix.band
        lu, piv, info = lapack.zgbtrf(ab, kl, ku)
        if info < 0:
            raise ValueError(f"zgbtrf: illegal argument {-info}")
        diag = np.abs(lu[kl + ku, :])
        scale = matrix.row_max()
        if info > 0 or np.any(diag < PIVOT_TOL * np.maximum(scale, np.finfo(float).tiny)):
            raise SingularMatrixError("singular system: vanishing pivot in band LU")
        self._lu, self._piv = lu, piv

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=complex)
        if rhs.shape[0] != self.n:
            raise ValueError(f"rhs has length {rhs.shape[0]}, expected {self.n}")
        x, info = lapack.zgbtrs(self._lu, self.kl, self.ku, rhs, self._piv)
        if info != 0:
            raise ValueError(f"zgbtrs failed with info={info}")
        return x


class SparseLU:
    def __init__(self, matrix: sp.spmatrix):
        a = sp.csc_matrix(matrix, dtype=complex)
        if a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        self.n = a.shape[0]
        try:
            self._lu = spla.splu(a, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SingularMatrixError(f"singular system: {exc}") from exc
        diag = np.abs(self._lu.U.diagonal())
        scale = abs(a).max(axis=1).toarray().ravel()
        if np.any(diag < PIVOT_TOL * scale.max()):
            raise SingularMatrixError("singular system: vanishing pivot in sparse LU")

    @property
    def fill_nnz(self) -> int:
        return int(self._lu.L.nnz + self._lu.U.nnz)

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=complex)
        if rhs.shape[0] != self.n:
            raise ValueError(f"rhs has length {rhs.shape[0]}, expected {self.n}")
        return self._lu.solve(rhs)


def factorize(matrix) -> BandLU | SparseLU:
    """LU-factorize a banded, sparse, or dense square matrix for repeated solves."""
    if isinstance(matrix, BandedComplexMatrix):
        return BandLU(matrix)
    if sp.issparse(matrix):
        return SparseLU(matrix)
    return BandLU(BandedComplexMatrix.from_dense(matrix))


def solve(factorization: BandLU | SparseLU, rhs) -> np.ndarray:
    return factorization.solve(rhs)


def relative_residual(matrix, x, b) -> float:
    if isinstance(matrix, BandedComplexMatrix):
        ax = matrix.matvec(x)
    else:
        ax = matrix @ x
    nb = np.linalg.norm(b)
    r = np.linalg.norm(ax - b)
    return float(r / nb) if nb > 0 else float(r)
