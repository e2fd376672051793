"""Finite-dimensional representations of F_r and their rank profiles.

A representation is an r-tuple of invertible matrices over GF(q); group
algebra matrices are evaluated blockwise, and normalized ranks are exact
Fractions rank/n_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .field import FieldSpec
from .freealg import AlgebraMatrix, Word
from .matrix import DenseMatrix, SingularMatrixError, random_invertible
from .subspace import Subspace


class Representation:
    """theta: F_r -> GL(n, GF(q)), given by its generator images."""

    __slots__ = ("field", "r", "n", "generators", "inverses", "_word_cache")

    def __init__(self, field: FieldSpec, generators):
        self.field = field
        self.generators = list(generators)
        self.r = len(self.generators)
        if self.r == 0:
            raise ValueError("need at least one generator")
        self.n = self.generators[0].rows
        for g in self.generators:
            if g.field != field or g.rows != self.n or g.cols != self.n:
                raise ValueError("generators must be square matrices over the same field")
        try:
            self.inverses = [g.inverse() for g in self.generators]
        except SingularMatrixError as exc:
            raise ValueError("all generator images must be invertible") from exc
        self._word_cache = {(): DenseMatrix.identity(field, self.n)}

    def of_word(self, word: Word) -> DenseMatrix:
        key = word.letters
        if key in self._word_cache:
            return self._word_cache[key]
        # Build up along prefixes so shared prefixes are evaluated once.
        m = self._word_cache[()]
        for idx in range(len(key)):
            prefix = key[: idx + 1]
            if prefix in self._word_cache:
                m = self._word_cache[prefix]
                continue
            i, e = key[idx]
            step = self.generators[i - 1] if e == 1 else self.inverses[i - 1]
            m = m @ step
            self._word_cache[prefix] = m
        return m

    def of_generator(self, i: int, exponent: int = 1) -> DenseMatrix:
        return self.generators[i - 1] if exponent == 1 else self.inverses[i - 1]

    def to_json(self):
        return {"field": self.field.to_json(), "r": self.r, "n": self.n,
                "generators": [g.to_json() for g in self.generators]}

    @staticmethod
    def from_json(obj) -> "Representation":
        field = FieldSpec.from_json(obj["field"])
        gens = [DenseMatrix.from_json(field, g) for g in obj["generators"]]
        rep = Representation(field, gens)
        if rep.n != obj.get("n", rep.n) or rep.r != obj.get("r", rep.r):
            raise ValueError("representation file is inconsistent")
        return rep


def apply_matrix(rep: Representation, a: AlgebraMatrix) -> DenseMatrix:
    """Image of an n x n algebra matrix as an (n*n_k) x (n*n_k) block matrix."""
    if a.field != rep.field:
        raise ValueError("field mismatch")
    if a.r > rep.r:
        raise ValueError("element uses more generators than the representation has")
    nk = rep.n
    out = np.zeros((a.n * nk, a.n * nk), dtype=np.uint8)
    t = rep.field.tables
    for i in range(a.n):
        for j in range(a.n):
            block = np.zeros((nk, nk), dtype=np.uint8)
            for word, coeff in a.entries[i][j].terms.items():
                block = t.add[block, t.mul[rep.of_word(word).data, coeff]]
            out[i * nk:(i + 1) * nk, j * nk:(j + 1) * nk] = block
    return DenseMatrix(rep.field, out)


def normalized_rank(rep: Representation, a: AlgebraMatrix) -> Fraction:
    """rk(theta(A)) / n_k, an exact rational in [0, n]."""
    return Fraction(apply_matrix(rep, a).rank(), rep.n)


@dataclass
class RankProfile:
    """Per-k exact ranks of one algebra matrix: entries (k, n_k, rank)."""

    entries: list = dc_field(default_factory=list)

    def add(self, k: int, n_k: int, rank: int):
        self.entries.append((k, n_k, rank))

    def values(self):
        return [Fraction(rank, n_k) for (_, n_k, rank) in self.entries]


@dataclass
class AtiyahReport:
    limit_estimate: Fraction
    tail_oscillation: Fraction
    nearest_integer: int
    integral: bool
    tolerance: Fraction

    def to_json(self):
        def frac(x):
            return {"num": x.numerator, "den": x.denominator}
        return {"limit_estimate": frac(self.limit_estimate),
                "tail_oscillation": frac(self.tail_oscillation),
                "nearest_integer": self.nearest_integer,
                "integral": self.integral,
                "tolerance": frac(self.tolerance)}


def atiyah_check(profile: RankProfile, tail_window: int, tol: Fraction) -> AtiyahReport:
    """Integrality diagnostic over the last `tail_window` profile entries.

    The limit estimate is the last value (no extrapolation); integrality
    holds when it sits within `tol` of an integer and the tail oscillates
    by at most `tol`.
    """
    values = profile.values()
    if len(values) < tail_window:
        raise ValueError(f"profile has {len(values)} entries, window needs {tail_window}")
    tail = values[-tail_window:]
    limit = tail[-1]
    oscillation = max(tail) - min(tail)
    nearest = int(limit + Fraction(1, 2))  # floor(x + 1/2)
    integral = abs(limit - nearest) <= tol and oscillation <= tol
    return AtiyahReport(limit, oscillation, nearest, integral, Fraction(tol))


def rank_profile(reps, a: AlgebraMatrix) -> RankProfile:
    """Profile of A over an iterable of (k, Representation)."""
    profile = RankProfile()
    for k, rep in reps:
        m = apply_matrix(rep, a)
        profile.add(k, rep.n, m.rank())
    return profile


def repair_to_invertible(m: DenseMatrix) -> DenseMatrix:
    """Closest invertible matrix in rank distance.

    Adds a correction that is zero on a complement of the kernel and maps
    the kernel isomorphically onto a complement of the column space, so
    rank(M' - M) equals the rank defect exactly (the minimum possible,
    since rank distance is at least the defect).
    """
    if m.rows != m.cols:
        raise ValueError("need a square matrix")
    n = m.rows
    field = m.field
    ker = Subspace(field, n, m.kernel())
    if ker.dim == 0:
        return m
    col_space = Subspace(field, n, m.data.T)
    col_comp = col_space.complement()
    ker_comp = ker.complement()
    # X: kernel basis vector i -> col_comp basis vector i, zero on ker_comp.
    basis = np.concatenate([ker.basis, ker_comp.basis], axis=0)
    binv = DenseMatrix(field, basis.T).inverse()
    targets = np.concatenate([col_comp.basis, np.zeros((ker_comp.dim, n), dtype=np.uint8)], axis=0)
    X = DenseMatrix(field, targets.T) @ binv
    repaired = m + X
    assert repaired.is_invertible()
    return repaired


# -- built-in families --

@dataclass(frozen=True)
class FamilyDescriptor:
    kind: str
    params: tuple = ()

    @staticmethod
    def cyclic_regular(r: int = 1):
        return FamilyDescriptor("cyclic_regular", (r,))

    @staticmethod
    def abelian_quotient(moduli):
        return FamilyDescriptor("abelian_quotient", tuple(moduli))

    @staticmethod
    def schreier(perm_tuples):
        return FamilyDescriptor("schreier", tuple(tuple(p) for p in perm_tuples))

    @staticmethod
    def random_invertible(seed: int, n: int, r: int):
        return FamilyDescriptor("random_invertible", (seed, n, r))

    @staticmethod
    def block_diagonal(blocks):
        return FamilyDescriptor("block_diagonal", tuple(blocks))


def _shift_matrix(field, k):
    data = np.zeros((k, k), dtype=np.uint8)
    for i in range(k):
        data[(i + 1) % k, i] = 1
    return DenseMatrix(field, data)


def _perm_matrix(field, perm):
    k = len(perm)
    data = np.zeros((k, k), dtype=np.uint8)
    for i, p in enumerate(perm):
        data[p, i] = 1
    return DenseMatrix(field, data)


def family_generate(spec: FamilyDescriptor, k: int, field: FieldSpec) -> Representation:
    """Instantiate the k-th member of a built-in representation family."""
    if spec.kind == "cyclic_regular":
        (r,) = spec.params or (1,)
        gens = [_shift_matrix(field, k)] + [DenseMatrix.identity(field, k)] * (r - 1)
        return Representation(field, gens)
    if spec.kind == "abelian_quotient":
        moduli = spec.params
        n = int(np.prod(moduli))
        gens = []
        for axis in range(len(moduli)):
            perm = []
            for idx in range(n):
                digits = _mixed_digits(idx, moduli)
                digits[axis] = (digits[axis] + 1) % moduli[axis]
                perm.append(_mixed_value(digits, moduli))
            gens.append(_perm_matrix(field, perm))
        return Representation(field, gens)
    if spec.kind == "schreier":
        return Representation(field, [_perm_matrix(field, p) for p in spec.params])
    if spec.kind == "random_invertible":
        seed, n, r = spec.params
        rng = np.random.Generator(np.random.Philox(seed))
        return Representation(field, [random_invertible(field, rng, n) for _ in range(r)])
    if spec.kind == "block_diagonal":
        subreps = [family_generate(sub, k, field) for sub in spec.params]
        r = subreps[0].r
        if any(s.r != r for s in subreps):
            raise ValueError("all blocks need the same generator count")
        gens = []
        for i in range(r):
            total = sum(s.n for s in subreps)
            data = np.zeros((total, total), dtype=np.uint8)
            off = 0
            for s in subreps:
                data[off:off + s.n, off:off + s.n] = s.generators[i].data
                off += s.n
            gens.append(DenseMatrix(field, data))
        return Representation(field, gens)
    raise ValueError(f"unknown family {spec.kind!r}")


def _mixed_digits(idx, moduli):
    digits = []
    for m in moduli:
        digits.append(idx % m)
        idx //= m
    return digits


def _mixed_value(digits, moduli):
    value = 0
    mult = 1
    for d, m in zip(digits, moduli):
        value += d * mult
        mult *= m
    return value


def rank_distance(a: DenseMatrix, b: DenseMatrix) -> Fraction:
    """d(A, B) = rank(A - B)/n, the rank metric on n x n matrices."""
    if a.rows != b.rows or a.cols != b.cols or a.rows != a.cols:
        raise ValueError("need square matrices of equal size")
    return Fraction((a - b).rank(), a.rows)
