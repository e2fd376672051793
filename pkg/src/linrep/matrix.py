"""Dense matrices over GF(q): arithmetic, elimination, rank, kernels.

Entries are integer codes (see linrep.field) held in a numpy uint8 array.
Everything is exact; elimination uses table lookups, no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .field import FieldSpec


class SingularMatrixError(ValueError):
    pass


class DenseMatrix:
    """Immutable rows-by-cols matrix with entries in a fixed GF(q)."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        self.field = field
        arr = np.asarray(data, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        if arr.size and arr.max() >= field.q:
            raise ValueError("entry code out of range for field")
        arr.setflags(write=False)
        self.data = arr

    # -- constructors --

    @classmethod
    def zeros(cls, field, rows, cols=None):
        cols = rows if cols is None else cols
        return cls(field, np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, field, rows):
        return cls(field, np.array(rows, dtype=np.uint8).reshape(len(rows), -1))

    # -- basic protocol --

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    def __eq__(self, other):
        return (isinstance(other, DenseMatrix) and self.field == other.field
                and self.data.shape == other.data.shape
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.field, self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"DenseMatrix({self.field.p}^{self.field.deg}, {self.data.tolist()})"

    def _check_same(self, other):
        if self.field != other.field:
            raise ValueError("field mismatch")

    # -- arithmetic --

    def __add__(self, other):
        self._check_same(other)
        t = self.field.tables
        return DenseMatrix(self.field, t.add[self.data, other.data])

    def __sub__(self, other):
        self._check_same(other)
        t = self.field.tables
        return DenseMatrix(self.field, t.add[self.data, t.neg[other.data]])

    def __neg__(self):
        return DenseMatrix(self.field, self.field.tables.neg[self.data])

    def __matmul__(self, other):
        self._check_same(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return DenseMatrix(self.field, matmul_data(self.field, self.data, other.data))

    def scale(self, c: int):
        return DenseMatrix(self.field, self.field.tables.mul[self.data, c])

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix-vector product; vec is a 1-D code array of length cols."""
        col = np.asarray(vec, dtype=np.uint8).reshape(self.cols, 1)
        return matmul_data(self.field, self.data, col)[:, 0]

    # -- elimination --

    def rref(self):
        """Reduced row echelon form.  Returns (matrix array, pivot column list)."""
        R, pivots = rref_array(self.field, self.data)
        return DenseMatrix(self.field, R), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def normalized_rank(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("normalized rank needs a square matrix")
        return Fraction(self.rank(), self.rows)

    def inverse(self):
        if self.rows != self.cols:
            raise SingularMatrixError("not square")
        n = self.rows
        aug = np.concatenate([self.data, np.eye(n, dtype=np.uint8)], axis=1)
        R, pivots = rref_array(self.field, aug, pivot_limit=n)
        if len(pivots) < n:
            raise SingularMatrixError("matrix is singular")
        return DenseMatrix(self.field, R[:, n:])

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def kernel(self):
        """Basis of the right null space, rows in echelon-derived order."""
        R, pivots = rref_array(self.field, self.data)
        n = self.cols
        free = [j for j in range(n) if j not in pivots]
        t = self.field.tables
        basis = []
        for j in free:
            v = np.zeros(n, dtype=np.uint8)
            v[j] = 1
            for i, pc in enumerate(pivots):
                v[pc] = t.neg[R[i, j]]
            basis.append(v)
        return np.array(basis, dtype=np.uint8).reshape(len(basis), n)

    def solve(self, rhs: np.ndarray):
        """One solution x of self @ x = rhs, or None if inconsistent."""
        rhs = np.asarray(rhs, dtype=np.uint8).reshape(-1, 1)
        aug = np.concatenate([self.data, rhs], axis=1)
        R, pivots = rref_array(self.field, aug, pivot_limit=self.cols)
        # Inconsistent iff some row is (0 ... 0 | nonzero).
        lead = np.any(R[:, : self.cols], axis=1)
        if np.any(~lead & (R[:, self.cols] != 0)):
            return None
        x = np.zeros(self.cols, dtype=np.uint8)
        for i, pc in enumerate(pivots):
            x[pc] = R[i, self.cols]
        return x

    def to_json(self):
        return self.data.astype(int).tolist()

    @staticmethod
    def from_json(field, obj):
        return DenseMatrix(field, np.array(obj, dtype=np.uint8))


def matmul_data(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Raw code-array product, picking the fastest exact path for the field.

    Prime fields go through an integer matmul reduced mod p (entries stay
    below 2^63 for any practical size); characteristic 2 uses the fact
    that packed-code addition is XOR.  Other extensions fall back to a
    table-driven loop over the inner dimension.
    """
    t = field.tables
    if field.deg == 1:
        prod = a.astype(np.int64) @ b.astype(np.int64)
        return (prod % field.p).astype(np.uint8)
    if field.p == 2:
        terms = t.mul[a[:, :, None], b[None, :, :]]
        return np.bitwise_xor.reduce(terms, axis=1)
    acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for k in range(a.shape[1]):
        acc = t.add[acc, t.mul[a[:, k][:, None], b[k, :][None, :]]]
    return acc


def rref_array(field: FieldSpec, data: np.ndarray, pivot_limit: int | None = None):
    """Reduced row echelon form of a raw code array.

    Row operations apply across the full width; pivots are only sought in
    the first `pivot_limit` columns (used for augmented systems).
    """
    t = field.tables
    R = np.array(data, dtype=np.uint8)
    m, n = R.shape
    limit = n if pivot_limit is None else pivot_limit
    pivots = []
    row = 0
    for col in range(limit):
        if row >= m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            R[[row, pr]] = R[[pr, row]]
        pv = R[row, col]
        if pv != 1:
            R[row] = t.mul[R[row], t.inv[pv]]
        others = np.nonzero(R[:, col])[0]
        others = others[others != row]
        if others.size:
            factors = t.neg[R[others, col]]
            R[others] = t.add[R[others], t.mul[factors[:, None], R[row][None, :]]]
        pivots.append(col)
        row += 1
    return R, pivots


def random_matrix(field, rng, rows, cols=None) -> DenseMatrix:
    cols = rows if cols is None else cols
    return DenseMatrix(field, rng.integers(0, field.q, size=(rows, cols), dtype=np.uint64).astype(np.uint8))


def random_invertible(field, rng, n) -> DenseMatrix:
    while True:
        m = random_matrix(field, rng, n)
        if m.is_invertible():
            return m
