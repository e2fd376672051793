"""Sofic-representation checks, Folner pairs, and truncated multiplication.

The concrete amenable instance is the polynomial part of GF(q)(x): elements
of degree < m acting on V_m = span{1, x, ..., x^(m-1)} by multiply-then-
truncate.  Truncation by total degree is an algebra quotient, so the maps
are honestly unital and almost multiplicative with defects controlled by
the Folner geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .field import FieldSpec
from .freealg import Word
from .matrix import DenseMatrix
from .repseq import Representation
from .subspace import Subspace, subspaces_independent
from .tiling import FiniteApproxMap, MissingProductError, good_subspace, is_good_map


@dataclass(frozen=True)
class PolyInstance:
    """Polynomials over GF(q) of degree < m acting on V_m."""

    field: FieldSpec
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("degree cap must be positive")

    def coeffs(self, poly) -> np.ndarray:
        arr = np.asarray(poly, dtype=np.uint8)
        if arr.ndim != 1 or len(arr) > self.m:
            raise ValueError("polynomial degree exceeds the instance cap")
        out = np.zeros(self.m, dtype=np.uint8)
        out[: len(arr)] = arr
        return out

    def degree(self, poly) -> int:
        arr = self.coeffs(poly)
        nz = np.nonzero(arr)[0]
        return int(nz[-1]) if nz.size else 0

    def multiply(self, a, b) -> np.ndarray:
        """Exact product in GF(q)[x] (length may exceed m)."""
        a = np.asarray(a, dtype=np.uint8)
        b = np.asarray(b, dtype=np.uint8)
        t = self.field.tables
        out = np.zeros(len(a) + len(b) - 1, dtype=np.uint8)
        for i in np.nonzero(a)[0]:
            out[i:i + len(b)] = t.add[out[i:i + len(b)], t.mul[b, a[i]]]
        return out

    def degree_subspace(self, d: int) -> Subspace:
        """span{1, x, ..., x^(d-1)} inside the ambient V_m."""
        if not 0 <= d <= self.m:
            raise ValueError("degree out of range")
        rows = np.eye(self.m, dtype=np.uint8)[:d]
        return Subspace(self.field, self.m, rows, _canonical=True)


class InfeasibleParametersError(ValueError):
    pass


def folner_pair(instance: PolyInstance, elements, delta: Fraction):
    """(V_1, V) with E V_1 inside V and dim V_1 >= (1 - delta) dim V.

    V = polynomials of degree < m', V_1 = degree < m' - d where d is the
    top degree in E and m' is minimal with (m' - d)/m' >= 1 - delta.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise InfeasibleParametersError("delta must be positive")
    degrees = [instance.degree(e) for e in elements]
    d = max(degrees, default=0)
    if d == 0:
        return instance.degree_subspace(instance.m), instance.degree_subspace(instance.m)
    # Minimal m' with (m' - d)/m' >= 1 - delta, i.e. m' >= d / delta.
    m_prime = int(-(-d * delta.denominator // delta.numerator))
    if m_prime > instance.m:
        raise InfeasibleParametersError(
            f"needs degree window {m_prime}, instance caps at {instance.m}")
    return instance.degree_subspace(m_prime - d), instance.degree_subspace(m_prime)


def truncation_map(instance: PolyInstance, v: Subspace, w: Subspace, poly) -> DenseMatrix:
    """Matrix of P o M_poly as an endomorphism of V (in V's basis).

    P projects onto V along W; coordinates of the product above the ambient
    cap are cut by definition of the instance.  V + W must span the ambient.
    """
    d = instance.coeffs(poly)
    field = instance.field
    n = v.dim
    if v.ambient != instance.m or w.ambient != instance.m:
        raise ValueError("subspaces must live in the instance ambient")
    if v.dim + w.dim != instance.m or not subspaces_independent([v, w]):
        raise ValueError("V and W must be complementary in the ambient")
    cols = []
    basis_mat = np.concatenate([v.basis, w.basis], axis=0)
    binv = DenseMatrix(field, basis_mat.T).inverse()
    for row in v.basis:
        prod = instance.multiply(row, d)[: instance.m]
        padded = np.zeros(instance.m, dtype=np.uint8)
        padded[: len(prod)] = prod
        coords = binv.apply(padded)     # coordinates in [V basis; W basis]
        cols.append(coords[:n])         # drop the W part: that is P
    return DenseMatrix(field, np.array(cols, dtype=np.uint8).T.reshape(n, n))


def poly_basis_map(instance: PolyInstance, i_max: int) -> FiniteApproxMap:
    """FiniteApproxMap for the monomial basis {1, x, ..., x^(i_max-1)}.

    phi(x^j) is multiply-by-x^j-and-truncate on V_m; the table holds
    x^a * x^b wherever the product stays inside the basis span.
    """
    if i_max > instance.m:
        raise ValueError("basis cannot exceed the ambient dimension")
    field = instance.field
    full = Subspace.full(field, instance.m)
    zero = Subspace.zero(field, instance.m)
    phi = []
    for j in range(i_max):
        mono = np.zeros(j + 1, dtype=np.uint8)
        mono[j] = 1
        phi.append(truncation_map(instance, full, zero, mono))
    mult = {}
    for a in range(1, i_max + 1):
        for b in range(1, i_max + 1):
            if a + b - 1 <= i_max:
                coords = np.zeros(i_max, dtype=np.uint8)
                coords[a + b - 2] = 1
                mult[(a, b)] = coords
    return FiniteApproxMap(field, phi, mult)


@dataclass
class SoficData:
    """One level of a sofic approximation: maps, defect bounds, rank floors."""

    maps: list                       # FiniteApproxMap per level k
    s_bounds: list                   # defect bound s_k per level (Fractions)
    j_floor: dict = dc_field(default_factory=dict)   # element key -> Fraction

    def to_json(self):
        return {"levels": len(self.maps),
                "s": [{"num": Fraction(s).numerator, "den": Fraction(s).denominator}
                      for s in self.s_bounds]}


@dataclass
class SoficReport:
    unit_ok: bool
    rank_ok: bool
    mult_ok: bool
    max_defect: Fraction
    min_rank: Fraction | None
    s_bound: Fraction

    @property
    def all_ok(self):
        return self.unit_ok and self.rank_ok and self.mult_ok

    def to_json(self):
        def frac(x):
            return None if x is None else {"num": x.numerator, "den": x.denominator}
        return {"unit_ok": self.unit_ok, "rank_ok": self.rank_ok,
                "mult_ok": self.mult_ok, "max_defect": frac(self.max_defect),
                "min_rank": frac(self.min_rank),
                "s_bound": frac(self.s_bound), "all_ok": self.all_ok}


def sofic_check(data: SoficData, k: int, elements=None,
                basis_count: int | None = None) -> SoficReport:
    """Check the k-th map (1-based) against span{r_1..r_basis_count}, bound s_k.

    `basis_count` defaults to k, matching the usual diagonal indexing where
    the k-th level certifies the first k basis elements.  The
    multiplicativity defect is bilinear, so basis pairs suffice; the rank
    floor is not, so it is checked on the supplied element list
    (coordinate vector, j-floor) only.
    """
    phi = data.maps[k - 1]
    s_k = Fraction(data.s_bounds[k - 1])
    span = k if basis_count is None else basis_count
    n = phi.n
    unit_ok = phi.phi[0] == DenseMatrix.identity(phi.field, n)

    max_defect = Fraction(0)
    mult_ok = True
    for a in range(1, span + 1):
        for b in range(1, span + 1):
            diff = phi.product_matrix(a, b) - (phi.phi[a - 1] @ phi.phi[b - 1])
            defect = Fraction(diff.rank(), n)
            max_defect = max(max_defect, defect)
            if defect >= s_k:
                mult_ok = False

    rank_ok = True
    min_rank = None
    for coords, floor in (elements or []):
        mat = phi.phi_of(np.asarray(coords, dtype=np.uint8))
        r = Fraction(mat.rank(), n)
        min_rank = r if min_rank is None else min(min_rank, r)
        if r < Fraction(floor):
            rank_ok = False
    return SoficReport(unit_ok, rank_ok, mult_ok, max_defect, min_rank, s_k)


@dataclass
class ExtensionReport:
    good_ok: bool
    max_distance: Fraction
    delta: Fraction

    @property
    def all_ok(self):
        return self.good_ok and self.max_distance < self.delta

    def to_json(self):
        def frac(x):
            return {"num": x.numerator, "den": x.denominator}
        return {"good_ok": self.good_ok, "max_distance": frac(self.max_distance),
                "delta": frac(self.delta), "all_ok": self.all_ok}


def approx_extension_check(rho: Representation, phi: FiniteApproxMap,
                           theta_images: dict, m: int, delta: Fraction) -> ExtensionReport:
    """(m, delta)-approximate-extension test.

    theta_images maps signed generator indices (+i and -i) to coordinate
    vectors of theta(gamma_i^(+-1)) in the map's basis.  Linearity reduces
    the length-<=m quantifier to reduced words, whose coordinates are
    built with the multiplication table (loud failure when it cannot).
    """
    delta = Fraction(delta)
    good_ok = is_good_map(phi, m)
    max_distance = Fraction(0)
    n = phi.n
    for word in _reduced_words(rho.r, m):
        coords = phi.unit_coords()
        for (i, e) in word.letters:
            key = i if e == 1 else -i
            if key not in theta_images:
                raise MissingProductError(f"no coordinates for generator {key}")
            coords = phi.product_coords(coords, theta_images[key])
        diff = phi.phi_of(coords) - rho.of_word(word)
        max_distance = max(max_distance, Fraction(diff.rank(), n))
    return ExtensionReport(good_ok, max_distance, delta)


def _reduced_words(r: int, max_len: int):
    """All reduced words of length <= max_len in F_r."""
    frontier = [Word.identity()]
    yield Word.identity()
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for i in range(1, r + 1):
                for e in (1, -1):
                    if w.letters and w.letters[-1] == (i, -e):
                        continue
                    nw = Word(w.letters + ((i, e),))
                    nxt.append(nw)
                    yield nw
        frontier = nxt
