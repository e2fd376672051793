"""Subspaces of GF(q)^n in canonical reduced-echelon form.

Two subspaces are equal exactly when their canonical bases are identical
arrays, so equality and hashing are structural and O(1)-ish.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

from .field import FieldSpec
from .matrix import DenseMatrix, matmul_data, rref_array


class AmbientMismatchError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    pass


class Subspace:
    """A subspace of GF(q)^ambient, held as a reduced-echelon row basis."""

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field: FieldSpec, ambient: int, rows=None, *, _canonical=False):
        self.field = field
        self.ambient = ambient
        if rows is None or len(rows) == 0:
            self.basis = np.zeros((0, ambient), dtype=np.uint8)
            self.pivots = ()
            return
        arr = np.asarray(rows, dtype=np.uint8).reshape(len(rows), ambient)
        if _canonical:
            R, piv = arr, _pivot_cols(arr)
        else:
            R, piv = rref_array(field, arr)
            R = R[: len(piv)]
        R = np.array(R, dtype=np.uint8)
        R.setflags(write=False)
        self.basis = R
        self.pivots = tuple(piv)

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, ambient)

    @classmethod
    def full(cls, field, ambient):
        return cls(field, ambient, np.eye(ambient, dtype=np.uint8), _canonical=True)

    @classmethod
    def span(cls, field, vectors):
        vecs = [np.asarray(v, dtype=np.uint8) for v in vectors]
        if not vecs:
            raise ValueError("span of empty vector list needs explicit ambient")
        return cls(field, len(vecs[0]), np.array(vecs))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field == other.field
                and self.ambient == other.ambient
                and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self):
        return hash((self.ambient, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"

    def _check_ambient(self, other):
        if self.field != other.field or self.ambient != other.ambient:
            raise AmbientMismatchError("subspaces live in different ambient spaces")

    # -- lattice operations --

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        stacked = np.concatenate([self.basis, other.basis], axis=0)
        return Subspace(self.field, self.ambient, stacked)

    def intersection(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: echelonize [U|U; W|0], read rows with zero left half."""
        self._check_ambient(other)
        n = self.ambient
        top = np.concatenate([self.basis, self.basis], axis=1)
        bot = np.concatenate([other.basis, np.zeros_like(other.basis)], axis=1)
        R, piv = rref_array(self.field, np.concatenate([top, bot], axis=0))
        inter_rows = [R[i, n:] for i in range(len(piv)) if piv[i] >= n]
        # Rows past the pivot count are all-zero by construction.
        return Subspace(self.field, n, np.array(inter_rows, dtype=np.uint8).reshape(len(inter_rows), n))

    def contains_vector(self, v) -> bool:
        v = np.asarray(v, dtype=np.uint8)
        stacked = np.concatenate([self.basis, v[None, :]], axis=0)
        _, piv = rref_array(self.field, stacked)
        return len(piv) == self.dim

    def contains(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return self.sum(other).dim == self.dim

    def complement(self) -> "Subspace":
        """Coordinate complement: standard basis vectors off the pivot columns."""
        free = [j for j in range(self.ambient) if j not in self.pivots]
        rows = np.zeros((len(free), self.ambient), dtype=np.uint8)
        for i, j in enumerate(free):
            rows[i, j] = 1
        return Subspace(self.field, self.ambient, rows, _canonical=True)

    def image_under(self, m: DenseMatrix) -> "Subspace":
        if m.cols != self.ambient:
            raise AmbientMismatchError("matrix does not act on this ambient space")
        mapped = matmul_data(self.field, m.data, self.basis.T).T
        return Subspace(self.field, m.rows, mapped.reshape(self.dim, m.rows))

    def vectors(self):
        """Every vector of the subspace (q^dim of them), zero first."""
        q = self.field.q
        t = self.field.tables
        for coeffs in product(range(q), repeat=self.dim):
            v = np.zeros(self.ambient, dtype=np.uint8)
            for c, row in zip(coeffs, self.basis):
                v = t.add[v, t.mul[row, c]]
            yield v


def subspaces_independent(spaces) -> bool:
    """True iff dim of the sum equals the sum of dims."""
    spaces = list(spaces)
    if not spaces:
        return True
    first = spaces[0]
    for s in spaces[1:]:
        first._check_ambient(s)
    stacked = np.concatenate([s.basis for s in spaces], axis=0)
    _, piv = rref_array(first.field, stacked)
    return len(piv) == sum(s.dim for s in spaces)


def gaussian_binomial(n: int, d: int, q: int) -> int:
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(field: FieldSpec, n: int, d: int, cap: int | None = None):
    """All d-dimensional subspaces of GF(q)^n, each exactly once.

    Order: pivot patterns lexicographically, then free entries
    lexicographically.  Raises BudgetExceededError up front when the
    Gaussian binomial count exceeds `cap`.
    """
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    count = gaussian_binomial(n, d, field.q)
    if cap is not None and count > cap:
        raise BudgetExceededError(f"{count} subspaces exceeds cap {cap}")
    if d == 0:
        yield Subspace.zero(field, n)
        return
    q = field.q
    for pivots in combinations(range(n), d):
        free_slots = [(i, j) for i in range(d) for j in range(pivots[i] + 1, n)
                      if j not in pivots]
        for values in product(range(q), repeat=len(free_slots)):
            basis = np.zeros((d, n), dtype=np.uint8)
            for i, pc in enumerate(pivots):
                basis[i, pc] = 1
            for (i, j), v in zip(free_slots, values):
                basis[i, j] = v
            yield Subspace(field, n, basis, _canonical=True)


def projection_onto(v: Subspace, w: Subspace) -> DenseMatrix:
    """Idempotent matrix with image `v` and kernel `w` (complementary pair)."""
    v._check_ambient(w)
    n = v.ambient
    if v.dim + w.dim != n or not subspaces_independent([v, w]):
        raise ValueError("subspaces are not complementary")
    # Columns of B are the combined basis; P maps the v-part to itself
    # and the w-part to zero: P = [V|0] B^{-1}.
    b_cols = np.concatenate([v.basis, w.basis], axis=0).T
    B = DenseMatrix(v.field, b_cols)
    target = np.concatenate([v.basis, np.zeros_like(w.basis)], axis=0).T
    return DenseMatrix(v.field, target) @ B.inverse()


def _pivot_cols(arr):
    piv = []
    for row in arr:
        nz = np.nonzero(row)[0]
        piv.append(int(nz[0]))
    return piv
