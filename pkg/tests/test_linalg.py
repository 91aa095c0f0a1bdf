#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

import numpy as np
import pytest
from scipy import sparse
from scipy.io import mmread

from balanceparam.utils.errors import NotPositiveDefinite, ShapeError
from balanceparam.utils.laplacian import build_LD
from balanceparam.utils.linalg import (
	export_matrix_market,
	factorize,
	solve,
	submatrix,
)

def grid_laplacian(k, shift=0.1):
	"""5-point Laplacian of a k x k grid plus a diagonal shift."""
	path = sparse.diags([-1, 2, -1], [-1, 0, 1], shape=(k, k))
	eye = sparse.identity(k)
	return (sparse.kron(path, eye) + sparse.kron(eye, path) + shift * sparse.identity(k * k)).tocsr()

def random_spd(n, seed=0):
	rng = np.random.default_rng(seed)
	A = rng.standard_normal((n, n))
	return A @ A.T + n * np.eye(n)

def test_diagonal_factor():
	F = factorize(sparse.diags([4.0, 9.0]).tocsr())
	np.testing.assert_allclose(F.U, np.diag([2.0, 3.0]))
	np.testing.assert_array_equal(F.permutation, [0, 1])
	np.testing.assert_array_equal(F.P.toarray(), np.eye(2))

def test_hand_cholesky():
	F = factorize(sparse.csr_matrix([[4.0, 2.0], [2.0, 3.0]]))
	np.testing.assert_allclose(F.U, [[2.0, 1.0], [0.0, np.sqrt(2.0)]])

def test_indefinite():
	with pytest.raises(NotPositiveDefinite):
		factorize(sparse.csr_matrix([[1.0, 2.0], [2.0, 1.0]]))

	with pytest.raises(NotPositiveDefinite):
		factorize(-grid_laplacian(10))

def test_asymmetric():
	with pytest.raises(NotPositiveDefinite):
		factorize(sparse.csr_matrix([[2.0, 1.0], [0.0, 2.0]]))

def test_not_square():
	with pytest.raises(ShapeError):
		factorize(sparse.csr_matrix((3, 4)))

def test_empty():
	F = factorize(sparse.csr_matrix((0, 0)))
	assert F.dimension == 0
	assert solve(F, np.zeros(0)).shape == (0,)

def test_identity_solve():
	F = factorize(sparse.identity(5, format="csr"))
	r = np.arange(5.0)
	np.testing.assert_allclose(solve(F, r), r)

def test_random_dense_solve():
	M = random_spd(50, seed=4)
	F = factorize(sparse.csr_matrix(M))
	r = np.random.default_rng(5).standard_normal(50)
	np.testing.assert_allclose(solve(F, r), np.linalg.solve(M, r), rtol=1e-10, atol=1e-12)
	np.testing.assert_allclose(F.U.T @ F.U, M, rtol=1e-10, atol=1e-10)

@pytest.mark.parametrize("seed", range(50))
def test_random_sparse_solve(seed):
	# Sizes straddle the dense fallback threshold
	rng = np.random.default_rng(100 + seed)
	n = int(rng.integers(2, 201))
	B = sparse.random(n, n, density=0.05, random_state=rng, format="csr")
	M = (B @ B.T + sparse.identity(n)).tocsr()

	F = factorize(M)
	r = rng.standard_normal(n)
	x = solve(F, r)
	expected = np.linalg.solve(M.toarray(), r)
	assert np.linalg.norm(x - expected) <= 1e-10 * np.linalg.norm(expected)

@pytest.mark.parametrize("ordering", ["minimum_degree", "natural"])
def test_sparse_factor(ordering):
	M = grid_laplacian(12)
	F = factorize(M, ordering)
	p = F.permutation

	dense = M.toarray()
	U = F.U.toarray()
	np.testing.assert_allclose(U, np.triu(U))
	np.testing.assert_allclose(U.T @ U, dense[p][:, p], atol=1e-10)
	np.testing.assert_allclose((F.P.T @ M @ F.P).toarray(), dense[p][:, p])

	r = np.random.default_rng(0).standard_normal(M.shape[0])
	x = solve(F, r)
	assert np.linalg.norm(M @ x - r) / np.linalg.norm(r) <= 1e-10

def test_multi_column_solve():
	M = grid_laplacian(9)
	F = factorize(M)
	R = np.random.default_rng(1).standard_normal((M.shape[0], 3))
	X = solve(F, R)
	for column in range(3):
		np.testing.assert_allclose(X[:, column], solve(F, R[:, column]), rtol=1e-12, atol=1e-14)

def test_solve_shape_mismatch():
	F = factorize(sparse.identity(4, format="csr"))
	with pytest.raises(ShapeError):
		solve(F, np.zeros(3))

def test_interior_block_is_positive_definite(hemisphere):
	L = build_LD(hemisphere)
	I = hemisphere.interior_indices
	F = factorize(submatrix(L, I, I))
	assert F.dimension == hemisphere.n_interior

def test_submatrix():
	A = sparse.csr_matrix(np.arange(16.0).reshape(4, 4))
	np.testing.assert_array_equal(submatrix(A, [2, 0], [1, 3]).toarray(), [[9, 11], [1, 3]])

	with pytest.raises(IndexError):
		submatrix(A, [4], [0])
	with pytest.raises(IndexError):
		submatrix(A, [1, 1], [0])

def test_export_matrix_market(tmp_path):
	M = grid_laplacian(4)
	path = tmp_path / "operators" / "M.mtx"
	export_matrix_market(path, M, comment="grid")
	np.testing.assert_allclose(mmread(str(path)).toarray(), M.toarray())
