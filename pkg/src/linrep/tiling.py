"""Linear tilings: good subspaces, centers, greedy tiling, certificates.

A FiniteApproxMap is a unit-preserving linear map from the span of finitely
many basis elements of an algebra into Mat_n(GF(q)), together with a partial
multiplication table for the basis.  Goodness of a vector means the map is
exactly multiplicative on it for all products from the first i basis
elements; tilings pack mutually independent orbits of good vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .field import FieldSpec
from .matrix import DenseMatrix, rref_array
from .subspace import Subspace, subspaces_independent


class MissingProductError(KeyError):
    """The partial multiplication table lacks a needed basis product."""


class FiniteApproxMap:
    """phi restricted to span{r_1..r_imax}, with phi(r_1) = Id.

    `phi` lists the images of the basis elements (index 0 is r_1 = 1).
    `mult` maps 1-based basis index pairs (a, b) to the coordinate vector
    of r_a * r_b in span{r_1..r_imax}; entries may be absent.
    """

    __slots__ = ("field", "n", "i_max", "phi", "mult")

    def __init__(self, field: FieldSpec, phi, mult):
        self.field = field
        self.phi = list(phi)
        self.i_max = len(self.phi)
        self.n = self.phi[0].rows
        if self.phi[0] != DenseMatrix.identity(field, self.n):
            raise ValueError("phi(1) must be the identity (unit preserving)")
        for m in self.phi:
            if m.field != field or m.rows != self.n or m.cols != self.n:
                raise ValueError("phi images must be n x n over the field")
        self.mult = {}
        for (a, b), coords in mult.items():
            coords = np.asarray(coords, dtype=np.uint8)
            if coords.shape != (self.i_max,):
                raise ValueError("mult coordinates must have length i_max")
            self.mult[(int(a), int(b))] = coords

    def phi_of(self, coords) -> DenseMatrix:
        """Image of the span element with the given basis coordinates."""
        coords = np.asarray(coords, dtype=np.uint8)
        t = self.field.tables
        acc = np.zeros((self.n, self.n), dtype=np.uint8)
        for idx in np.nonzero(coords)[0]:
            acc = t.add[acc, t.mul[self.phi[idx].data, coords[idx]]]
        return DenseMatrix(self.field, acc)

    def product_matrix(self, a: int, b: int) -> DenseMatrix:
        """phi(r_a * r_b) via the table; raises when the entry is missing."""
        if (a, b) not in self.mult:
            raise MissingProductError(f"mult table has no entry for ({a}, {b})")
        return self.phi_of(self.mult[(a, b)])

    def product_coords(self, ca, cb) -> np.ndarray:
        """Coordinates of the product of two span elements (bilinear expansion)."""
        ca = np.asarray(ca, dtype=np.uint8)
        cb = np.asarray(cb, dtype=np.uint8)
        t = self.field.tables
        out = np.zeros(self.i_max, dtype=np.uint8)
        for a in np.nonzero(ca)[0]:
            for b in np.nonzero(cb)[0]:
                if (a + 1, b + 1) not in self.mult:
                    raise MissingProductError(f"mult table has no entry for ({a + 1}, {b + 1})")
                term = t.mul[self.mult[(a + 1, b + 1)], t.mul[ca[a], cb[b]]]
                out = t.add[out, term]
        return out

    def unit_coords(self) -> np.ndarray:
        c = np.zeros(self.i_max, dtype=np.uint8)
        c[0] = 1
        return c


@dataclass
class FSubspaceData:
    """The tile-shape subspace F: basis coordinate vectors, 1 included.

    `finv` optionally maps the index of each nonzero basis element to the
    coordinates of its inverse; absence makes the inverse-containment
    precondition unverifiable (reported as False).
    """

    basis: list
    finv: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.basis = [np.asarray(v, dtype=np.uint8) for v in self.basis]
        self.finv = {int(k): np.asarray(v, dtype=np.uint8) for k, v in self.finv.items()}
        unit = np.zeros_like(self.basis[0])
        unit[0] = 1
        if not any(np.array_equal(v, unit) for v in self.basis):
            raise ValueError("F must contain the unit")

    @property
    def dim(self):
        return len(self.basis)


@dataclass
class TilingCertificate:
    """Checkable evidence of an (F, H, i, delta)-tiling."""

    i: int
    delta: Fraction
    dim_f: int
    centers: list                 # vectors in GF(q)^n
    tiles: list                   # Subspace phi(F)(x) per center
    h_basis: list                 # canonical basis of H
    coverage: int                 # sum of tile dimensions
    partial: bool = False         # candidate budget ran out before maximality

    def to_json(self):
        return {"i": self.i,
                "delta": {"num": self.delta.numerator, "den": self.delta.denominator},
                "dim_f": self.dim_f,
                "centers": [np.asarray(c).astype(int).tolist() for c in self.centers],
                "tiles": [t.basis.astype(int).tolist() for t in self.tiles],
                "h_basis": [list(map(int, row)) for row in self.h_basis],
                "coverage": self.coverage,
                "partial": self.partial}

    @staticmethod
    def from_json(field, n, obj):
        tiles = [Subspace(field, n, np.array(rows, dtype=np.uint8).reshape(len(rows), n))
                 for rows in obj["tiles"]]
        return TilingCertificate(
            i=int(obj["i"]),
            delta=Fraction(obj["delta"]["num"], obj["delta"]["den"]),
            dim_f=int(obj["dim_f"]),
            centers=[np.array(c, dtype=np.uint8) for c in obj["centers"]],
            tiles=tiles,
            h_basis=obj["h_basis"],
            coverage=int(obj["coverage"]),
            partial=bool(obj.get("partial", False)))


def good_subspace(m: FiniteApproxMap, i: int) -> Subspace:
    """G^{i,phi}: vectors where phi is exactly multiplicative up to level i.

    By bilinearity it suffices to intersect the kernels of
    phi(r_s r_t) - phi(r_s) phi(r_t) over basis pairs s, t <= i.
    """
    if i > m.i_max:
        raise ValueError(f"i = {i} exceeds basis count {m.i_max}")
    space = Subspace.full(m.field, m.n)
    for s in range(1, i + 1):
        for t in range(1, i + 1):
            diff = m.product_matrix(s, t) - (m.phi[s - 1] @ m.phi[t - 1])
            if not np.any(diff.data):
                continue
            ker = Subspace(m.field, m.n, diff.kernel())
            space = space.intersection(ker)
    return space


def is_good_map(m: FiniteApproxMap, i: int) -> bool:
    """dim G^{i,phi} >= (1 - 1/i) n, compared with exact rationals."""
    g = good_subspace(m, i)
    return Fraction(g.dim, m.n) >= 1 - Fraction(1, i)


def candidate_space(m: FiniteApproxMap, f: FSubspaceData, h: Subspace, i: int,
                    good: Subspace | None = None) -> Subspace:
    """A_{F,i}: vectors x with phi(f)(x) in G intersect H for every f in F."""
    if h.ambient != m.n:
        raise ValueError("H must live in the map's ambient space")
    good = good_subspace(m, i) if good is None else good
    gh = good.intersection(h)
    # Functionals vanishing on G cap H: kernel of its basis matrix.
    constraint = DenseMatrix(m.field, gh.basis).kernel() if gh.dim < m.n else None
    space = Subspace.full(m.field, m.n)
    if constraint is None or len(constraint) == 0:
        pass
    else:
        cmat = DenseMatrix(m.field, constraint)
        for coords in f.basis:
            rows = (cmat @ m.phi_of(coords)).data
            ker = Subspace(m.field, m.n, DenseMatrix(m.field, rows).kernel())
            space = space.intersection(ker)
    return space


def orbit_of(m: FiniteApproxMap, f: FSubspaceData, x) -> Subspace:
    """phi(F)(x), the tile spanned by the images of x under the F-basis."""
    vecs = [m.phi_of(coords).apply(x) for coords in f.basis]
    return Subspace(m.field, m.n, np.array(vecs, dtype=np.uint8))


def is_center(m: FiniteApproxMap, f: FSubspaceData, h: Subspace, i: int, x,
              good: Subspace | None = None) -> bool:
    """Center conditions for a single vector (set-level independence excluded):
    the orbit has dimension dim F, lies in H, and every image is i-good.
    """
    good = good_subspace(m, i) if good is None else good
    x = np.asarray(x, dtype=np.uint8)
    images = [m.phi_of(coords).apply(x) for coords in f.basis]
    orbit = Subspace(m.field, m.n, np.array(images, dtype=np.uint8))
    if orbit.dim != f.dim:
        return False
    if not h.contains(orbit):
        return False
    return all(good.contains_vector(v) for v in images)


@dataclass
class PreconditionReport:
    """Sufficient inequalities from the tiling theorem's proof, individually."""

    inverses_in_span: bool
    candidate_dim_ok: bool
    kernel_bound_ok: bool
    f_size_ok: bool
    h_dim_ok: bool
    good_map_ok: bool

    @property
    def all_ok(self) -> bool:
        return (self.inverses_in_span and self.candidate_dim_ok
                and self.kernel_bound_ok and self.f_size_ok
                and self.h_dim_ok and self.good_map_ok)

    def to_json(self):
        return {k: getattr(self, k) for k in
                ("inverses_in_span", "candidate_dim_ok", "kernel_bound_ok",
                 "f_size_ok", "h_dim_ok", "good_map_ok")} | {"all_ok": self.all_ok}


def precondition_check(m: FiniteApproxMap, f: FSubspaceData, h: Subspace,
                       i: int, delta: Fraction) -> PreconditionReport:
    delta = Fraction(delta)
    n = m.n
    q = m.field.q

    # F and the inverses of its listed nonzero basis elements inside span{r_1..r_i}.
    def in_level(coords):
        return not np.any(coords[i:])

    inverses = (all(in_level(c) for c in f.basis)
                and all(idx in f.finv and in_level(f.finv[idx])
                        for idx in range(len(f.basis))))

    good = good_subspace(m, i)
    a_space = candidate_space(m, f, h, i, good=good)
    candidate_ok = Fraction(a_space.dim, n) >= 1 - delta / 4

    kernel_ok = True
    for coords in f.basis:
        mat = m.phi_of(coords)
        defect = n - mat.rank()
        if not np.any(coords):
            kernel_ok = False
            break
        if Fraction(defect, n) > delta / 3:
            kernel_ok = False
            break

    # |F| = q^dim F <= q^(delta n / 3), i.e. dim F <= delta n / 3.
    f_size_ok = Fraction(f.dim) <= delta * n / 3
    h_ok = Fraction(h.dim, n) >= 1 - Fraction(1, i)
    good_ok = Fraction(good.dim, n) >= 1 - Fraction(1, i)
    return PreconditionReport(inverses, candidate_ok, kernel_ok, f_size_ok, h_ok, good_ok)


def greedy_tiling(m: FiniteApproxMap, f: FSubspaceData, h: Subspace, i: int,
                  delta: Fraction, *, seed: int = 0, sample_budget: int = 2048) -> TilingCertificate:
    """Maximal greedy set of centers over a deterministic candidate pool.

    Candidates are the echelon basis vectors of A_{F,i} first, then seeded
    pseudo-random samples from A_{F,i}.  If the precondition report is
    all-true, the theorem's coverage bound (1 - delta) n is asserted.
    """
    delta = Fraction(delta)
    good = good_subspace(m, i)
    a_space = candidate_space(m, f, h, i, good=good)
    report = precondition_check(m, f, h, i, delta)

    centers, tiles = [], []
    accum = Subspace.zero(m.field, m.n)

    def try_center(x):
        nonlocal accum
        if not np.any(x):
            return
        if not is_center(m, f, h, i, x, good=good):
            return
        orbit = orbit_of(m, f, x)
        joined = accum.sum(orbit)
        if joined.dim != accum.dim + orbit.dim:
            return
        centers.append(np.array(x, dtype=np.uint8))
        tiles.append(orbit)
        accum = joined

    for row in a_space.basis:
        try_center(row)

    rng = np.random.Generator(np.random.Philox(seed))
    exhausted = a_space.dim > 0 and m.field.q ** a_space.dim > sample_budget + a_space.dim
    for _ in range(sample_budget if a_space.dim else 0):
        coeffs = rng.integers(0, m.field.q, size=a_space.dim, dtype=np.uint64).astype(np.uint8)
        t = m.field.tables
        x = np.zeros(m.n, dtype=np.uint8)
        for c, row in zip(coeffs, a_space.basis):
            x = t.add[x, t.mul[row, c]]
        try_center(x)

    coverage = sum(t.dim for t in tiles)
    cert = TilingCertificate(i=i, delta=delta, dim_f=f.dim, centers=centers,
                             tiles=tiles, h_basis=h.basis.astype(int).tolist(),
                             coverage=coverage, partial=exhausted)
    if report.all_ok and Fraction(coverage, m.n) < 1 - delta:
        raise RuntimeError(
            "tiling theorem violated: preconditions hold but greedy coverage "
            f"{coverage}/{m.n} < (1 - {delta})")
    return cert


def verify_certificate(cert: TilingCertificate, m: FiniteApproxMap, f: FSubspaceData,
                       h: Subspace, i: int, delta: Fraction) -> bool:
    """Re-check every center condition, independence, and coverage from scratch."""
    delta = Fraction(delta)
    if f.dim != cert.dim_f or len(cert.centers) != len(cert.tiles):
        return False
    good = good_subspace(m, i)
    recomputed = []
    for x, claimed in zip(cert.centers, cert.tiles):
        if not is_center(m, f, h, i, x, good=good):
            return False
        orbit = orbit_of(m, f, x)
        if orbit != claimed:
            return False
        recomputed.append(orbit)
    if not subspaces_independent(recomputed):
        return False
    coverage = sum(t.dim for t in recomputed)
    if coverage != cert.coverage:
        return False
    return Fraction(coverage, m.n) >= 1 - delta
