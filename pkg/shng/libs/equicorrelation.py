#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import helmert

from ..exceptions import DomainError


def check_rho(rho: float, n_max: int) -> float:
    """
    Validate the common correlation of an equicorrelation matrix.

    :param rho: Common correlation
    :type rho: float
    :param n_max: Largest panel size the matrix must support
    :type n_max: int

    :returns: float -- Correlation
    """

    lower = -1.0 / (n_max - 1) if n_max > 1 else -1.0
    if not (lower < rho < 1.0):
        raise DomainError(f"Invalid rho (expected: {lower} < rho < 1 for panel size {n_max}, got: {rho})")
    return float(rho)


@lru_cache(maxsize=32)
def orthogonal_complement(n: int) -> np.ndarray:
    """
    Orthonormal ``(n, n-1)`` basis of the complement of the ones vector (Helmert sub-basis).
    """

    basis = helmert(n).T if n > 1 else np.zeros((1, 0))
    basis.setflags(write=False)
    return basis


def equicorrelation_matrix(n: int, rho: float) -> np.ndarray:
    return (1.0 - rho) * np.eye(n) + rho * np.ones((n, n))


@dataclass(frozen=True)
class EquicorrAlgebra:
    """
    Closed-form algebra of the equicorrelation matrix :math:`\\Omega_n` through the
    projections onto the ones vector and its orthogonal complement.
    """

    n: int
    rho: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"Invalid panel size (expected: >= 1, got: {self.n})")
        check_rho(self.rho, self.n)

    @property
    def common_eigenvalue(self) -> float:
        return self.n * self.rho + 1.0 - self.rho

    @property
    def orthogonal_eigenvalue(self) -> float:
        return 1.0 - self.rho

    @property
    def projection(self) -> np.ndarray:
        return np.full((self.n, self.n), 1.0 / self.n)

    @property
    def orthogonal_projection(self) -> np.ndarray:
        return np.eye(self.n) - self.projection

    def inverse(self) -> np.ndarray:
        return self.projection / self.common_eigenvalue + self.orthogonal_projection / self.orthogonal_eigenvalue

    def determinant(self) -> float:
        return self.common_eigenvalue * self.orthogonal_eigenvalue ** (self.n - 1)

    def log_determinant(self) -> float:
        return float(np.log(self.common_eigenvalue) + (self.n - 1) * np.log(self.orthogonal_eigenvalue))

    def components(self, errors: np.ndarray):
        """
        Split a vector into its scaled mean :math:`V = n^{-1/2}\\sum e` and its
        complement coordinates :math:`W = \\iota_\\perp' e`.
        """

        errors = np.asarray(errors, dtype=float)
        return errors.sum() / np.sqrt(self.n), orthogonal_complement(self.n).T @ errors

    def quadratic_form(self, errors: np.ndarray) -> float:
        common, orthogonal = self.components(errors)
        return float(common ** 2 / self.common_eigenvalue + orthogonal @ orthogonal / self.orthogonal_eigenvalue)

    def solve(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector, dtype=float)
        mean = vector.mean(axis=0)
        return mean / self.common_eigenvalue + (vector - mean) / self.orthogonal_eigenvalue


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1, order="F")


def vech(matrix: np.ndarray) -> np.ndarray:
    """
    Stack the lower triangle (diagonal included) column by column.
    """

    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    return np.concatenate([matrix[j:, j] for j in range(n)])


@lru_cache(maxsize=16)
def duplication_matrix(n: int) -> np.ndarray:
    """
    Duplication matrix :math:`D_n` with :math:`D_n\\,\\mathrm{vech}(A) = \\mathrm{vec}(A)` for symmetric ``A``.

    :param n: Matrix order
    :type n: int

    :returns: numpy.ndarray -- ``(n*n, n*(n+1)/2)`` matrix
    """

    matrix = np.zeros((n * n, n * (n + 1) // 2))
    column = 0
    for j in range(n):
        for i in range(j, n):
            matrix[j * n + i, column] = 1.0
            matrix[i * n + j, column] = 1.0
            column += 1
    matrix.setflags(write=False)
    return matrix
