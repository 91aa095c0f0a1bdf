#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Sparse symmetric matrices and preordered Cholesky solves."""

from dataclasses import dataclass
import numpy as np
from pathlib import Path
from scipy import linalg, sparse
from scipy.io import mmwrite
from scipy.sparse.linalg import splu
from sebaubuntu_libs.liblogging import LOGD
from typing import Optional, Sequence, Union

from balanceparam.utils.errors import NotPositiveDefinite, ShapeError

# Type aliases
SparseMatrix = sparse.spmatrix
NDArray = np.ndarray

# Below this dimension factors are computed densely with natural ordering
DENSE_THRESHOLD = 64

ORDERINGS = {
	"minimum_degree": "MMD_AT_PLUS_A",
	"natural": "NATURAL",
}

def _as_index_array(indices: Sequence[int], size: int, name: str) -> NDArray:
	indices = np.asarray(indices, dtype=np.int64).ravel()
	if len(indices) and (indices.min() < 0 or indices.max() >= size):
		raise IndexError(f"{name} index out of range [0, {size})")
	if len(np.unique(indices)) != len(indices):
		raise IndexError(f"Repeated {name} index")

	return indices

def submatrix(A: SparseMatrix, rows: Sequence[int], cols: Sequence[int]) -> sparse.csr_matrix:
	"""Extract the block A[rows, cols], relabeled in the given order."""
	A = sparse.csr_matrix(A)
	rows = _as_index_array(rows, A.shape[0], "row")
	cols = _as_index_array(cols, A.shape[1], "column")

	return A[rows][:, cols].tocsr()

@dataclass(frozen=True, eq=False)
class CholeskyFactor:
	"""
	Factor of a symmetric positive definite matrix M.

	U is upper triangular with U^T U = M[p][:, p], where p is the
	fill-reducing permutation.
	"""
	U: Union[NDArray, sparse.csr_matrix]
	permutation: NDArray
	dimension: int
	_lu: Optional[object] = None

	@property
	def P(self) -> sparse.csr_matrix:
		"""Permutation matrix with P^T M P = U^T U."""
		n = self.dimension
		return sparse.csr_matrix(
			(np.ones(n), (self.permutation, np.arange(n))), shape=(n, n)
		)

	def solve(self, r: NDArray) -> NDArray:
		return solve(self, r)

def factorize(M: SparseMatrix, ordering: str = "minimum_degree") -> CholeskyFactor:
	"""
	Compute a preordered Cholesky factor of M.

	Raises NotPositiveDefinite when a non-positive pivot shows up.
	"""
	if ordering not in ORDERINGS:
		raise ValueError(f"Unknown ordering {ordering}")
	if M.ndim != 2 or M.shape[0] != M.shape[1]:
		raise ShapeError(f"Cannot factorize a {M.shape} matrix")

	n = M.shape[0]
	if n == 0:
		return CholeskyFactor(np.zeros((0, 0)), np.zeros(0, dtype=np.int64), 0)

	if sparse.issparse(M):
		asymmetry = abs(M - M.T).max()
		scale = abs(M).max()
	else:
		asymmetry = np.abs(M - M.T).max()
		scale = np.abs(M).max()
	if asymmetry > 1e-12 * max(scale, 1.0):
		raise NotPositiveDefinite("Matrix is not symmetric")

	if n < DENSE_THRESHOLD:
		return _factorize_dense(M)

	return _factorize_sparse(sparse.csc_matrix(M), ordering)

def _factorize_dense(M) -> CholeskyFactor:
	dense = M.toarray() if sparse.issparse(M) else np.asarray(M, dtype=float)
	try:
		lower = np.linalg.cholesky(dense)
	except np.linalg.LinAlgError as e:
		raise NotPositiveDefinite(f"Dense Cholesky failed: {e}") from e

	n = len(dense)
	return CholeskyFactor(lower.T.copy(), np.arange(n), n)

def _factorize_sparse(M: sparse.csc_matrix, ordering: str) -> CholeskyFactor:
	n = M.shape[0]
	try:
		lu = splu(
			M,
			permc_spec=ORDERINGS[ordering],
			diag_pivot_thresh=0.0,
			options={"SymmetricMode": True},
		)
	except RuntimeError as e:
		raise NotPositiveDefinite(f"Sparse factorization failed: {e}") from e

	if not np.array_equal(lu.perm_r, lu.perm_c):
		raise NotPositiveDefinite("Factorization left the diagonal (off-diagonal pivot)")

	pivots = lu.U.diagonal()
	if np.any(pivots <= 0):
		raise NotPositiveDefinite(
			f"Non-positive pivot {pivots.min():.3e} at step {int(np.argmin(pivots))}"
		)

	# M[p][:, p] = L D L^T with U_LU = D L^T, so D^(-1/2) U_LU is the Cholesky factor
	U = sparse.diags(1.0 / np.sqrt(pivots)) @ lu.U
	permutation = np.argsort(lu.perm_c)

	LOGD(f"Cholesky factor: n={n}, nnz(M)={M.nnz}, nnz(U)={U.nnz}, ordering={ordering}")

	return CholeskyFactor(sparse.csr_matrix(U), permutation, n, lu)

def solve(F: CholeskyFactor, r: NDArray) -> NDArray:
	"""Solve M x = r given the factor of M, for a vector or a column block r."""
	r = np.asarray(r, dtype=float)
	if r.ndim not in (1, 2) or r.shape[0] != F.dimension:
		raise ShapeError(f"Right-hand side of shape {r.shape} for dimension {F.dimension}")

	if F.dimension == 0:
		return r.copy()

	if F._lu is not None:
		return F._lu.solve(r)

	p = F.permutation
	y = linalg.solve_triangular(F.U, r[p], trans="T", lower=False)
	z = linalg.solve_triangular(F.U, y, lower=False)
	x = np.empty_like(z)
	x[p] = z

	return x

def export_matrix_market(path: Path, A: SparseMatrix, comment: str = ""):
	"""Write A in MatrixMarket coordinate format."""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	mmwrite(str(path), sparse.coo_matrix(A), comment=comment)
