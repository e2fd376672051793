"""Hyperfiniteness witnesses, witness search, and dimension expansion.

A witness decomposes GF(q)^n into independent, almost-invariant tiles of
bounded dimension covering most of the space; the expansion constant is
the minimal growth ratio dim(W + sum theta(gamma_i) W)/dim W over small
subspaces, computed exactly by enumeration or bounded from above by
sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .matrix import matmul_data, rref_array
from .repseq import Representation
from .subspace import (BudgetExceededError, Subspace, enumerate_subspaces,
                       gaussian_binomial, subspaces_independent)
from .tiling import FiniteApproxMap, TilingCertificate

ENUM_CAP = 1 << 24


@dataclass
class HyperfiniteWitness:
    epsilon: Fraction
    k_bound: int
    subspaces: list

    def to_json(self):
        return {"epsilon": {"num": self.epsilon.numerator, "den": self.epsilon.denominator},
                "K": self.k_bound,
                "tiles": [s.basis.astype(int).tolist() for s in self.subspaces]}

    @staticmethod
    def from_json(field, n, obj):
        eps = Fraction(obj["epsilon"]["num"], obj["epsilon"]["den"])
        tiles = [Subspace(field, n, np.array(rows, dtype=np.uint8).reshape(len(rows), n))
                 for rows in obj["tiles"]]
        return HyperfiniteWitness(eps, int(obj["K"]), tiles)


@dataclass
class ExpansionReport:
    min_ratio: Fraction
    witness_subspace: Subspace
    exact: bool
    samples: int

    def to_json(self):
        return {"min_ratio": {"num": self.min_ratio.numerator,
                              "den": self.min_ratio.denominator},
                "witness_subspace": self.witness_subspace.basis.astype(int).tolist(),
                "exact": self.exact,
                "samples": self.samples}


def grow(rep: Representation, w: Subspace) -> Subspace:
    """W + sum_i theta(gamma_i) W."""
    if w.dim == 0:
        return w
    stacked = _grown_rows(rep, w.basis)
    return Subspace(rep.field, rep.n, stacked)


def _grown_rows(rep: Representation, rows: np.ndarray) -> np.ndarray:
    """Rows spanning span(rows) + sum_i theta(gamma_i) span(rows)."""
    pieces = [rows]
    for g in rep.generators:
        pieces.append(matmul_data(rep.field, g.data, rows.T).T)
    return np.concatenate(pieces, axis=0)


def witness_check(rep: Representation, w: HyperfiniteWitness) -> bool:
    """Re-derive all three witness conditions; trusts nothing in the witness."""
    n = rep.n
    grown = []
    for v in w.subspaces:
        if v.ambient != n:
            raise ValueError("witness tile ambient does not match representation")
        if v.dim == 0 or v.dim > w.k_bound:
            return False
        wv = grow(rep, v)
        if Fraction(wv.dim) >= (1 + w.epsilon) * v.dim:
            return False
        grown.append(wv)
    if not subspaces_independent(grown):
        return False
    coverage = sum(v.dim for v in w.subspaces)
    return Fraction(coverage) >= (1 - w.epsilon) * n


def cheeger_exact(rep: Representation, cap: int = ENUM_CAP) -> ExpansionReport:
    """Exact minimal growth ratio over all W with 1 <= dim W <= n/2."""
    n = rep.n
    total = sum(gaussian_binomial(n, d, rep.field.q) for d in range(1, n // 2 + 1))
    if total > cap:
        raise BudgetExceededError(f"{total} subspaces exceeds cap {cap}")
    best = None
    best_w = None
    count = 0
    for d in range(1, n // 2 + 1):
        for w in enumerate_subspaces(rep.field, n, d):
            count += 1
            ratio = Fraction(grow(rep, w).dim, w.dim)
            if best is None or ratio < best:
                best, best_w = ratio, w
    return ExpansionReport(best, best_w, True, count)


def cheeger_random(rep: Representation, trials: int, seed: int = 0) -> ExpansionReport:
    """Sampled upper bound on the same minimum; exact=False.

    Each trial draws a random row set with at most n/2 rows; its span and
    the grown span are ranked directly, one elimination each, so a
    Subspace object is only built when the sample improves the running
    minimum (ties broken by canonical basis for determinism).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = rep.n
    rng = np.random.Generator(np.random.Philox(seed))
    best = None
    best_w = None
    half = max(1, n // 2)
    for _ in range(trials):
        d = int(rng.integers(1, half + 1))
        rows = rng.integers(0, rep.field.q, size=(d, n), dtype=np.uint64).astype(np.uint8)
        dim_w = len(rref_array(rep.field, rows)[1])
        if dim_w == 0:
            continue
        dim_grown = len(rref_array(rep.field, _grown_rows(rep, rows))[1])
        ratio = Fraction(dim_grown, dim_w)
        if best is not None and ratio > best:
            continue
        w = Subspace(rep.field, n, rows)
        if best is None or ratio < best or _canon_key(w) < _canon_key(best_w):
            best, best_w = ratio, w
    if best is None:
        # All samples degenerated to zero; fall back to a coordinate line.
        w = Subspace(rep.field, n, np.eye(n, dtype=np.uint8)[:1])
        best, best_w = Fraction(grow(rep, w).dim, w.dim), w
    return ExpansionReport(best, best_w, False, trials)


def _canon_key(w: Subspace):
    return (w.dim, w.basis.tobytes())


def expander_check(rep: Representation, alpha: Fraction, cap: int = ENUM_CAP) -> bool:
    """Dimension-expander test: every small subspace grows by >= 1 + alpha."""
    return cheeger_exact(rep, cap).min_ratio >= 1 + Fraction(alpha)


def orbit_closure(rep: Representation, vec, max_dim: int) -> Subspace | None:
    """Smallest invariant subspace containing vec, or None past max_dim."""
    s = Subspace(rep.field, rep.n, np.asarray(vec, dtype=np.uint8)[None, :])
    if s.dim == 0:
        return None
    while True:
        grown = grow(rep, s)
        if grown.dim > max_dim:
            return None
        if grown.dim == s.dim:
            return s
        s = grown


def witness_search(rep: Representation, epsilon: Fraction, k_bound: int,
                   budget: int = 1000, seed: int = 0) -> HyperfiniteWitness | None:
    """Heuristic witness construction; None means budget exhausted, nothing more.

    Pipeline: orbit-closure tiles seeded from coordinate and random vectors,
    then greedy acceptance of almost-invariant tiles that stay independent
    of what has been accepted already.
    """
    epsilon = Fraction(epsilon)
    n = rep.n
    rng = np.random.Generator(np.random.Philox(seed))
    tiles = []
    grown_accum = Subspace.zero(rep.field, n)
    covered = 0

    def try_tile(v: Subspace):
        nonlocal grown_accum, covered
        if v is None or v.dim == 0 or v.dim > k_bound:
            return False
        wv = grow(rep, v)
        if Fraction(wv.dim) >= (1 + epsilon) * v.dim:
            return False
        joined = grown_accum.sum(wv)
        if joined.dim != grown_accum.dim + wv.dim:
            return False
        tiles.append(v)
        grown_accum = joined
        covered += v.dim
        return True

    seeds = list(np.eye(n, dtype=np.uint8))
    for _ in range(budget):
        if Fraction(covered) >= (1 - epsilon) * n:
            break
        if seeds:
            vec = seeds.pop(0)
        else:
            vec = rng.integers(0, rep.field.q, size=n, dtype=np.uint64).astype(np.uint8)
        if grown_accum.dim and grown_accum.contains_vector(vec):
            continue
        closure = orbit_closure(rep, vec, k_bound)
        if try_tile(closure):
            continue
        # Almost-invariant fallback: grow until the ratio budget is hit.
        s = Subspace(rep.field, n, np.asarray(vec, dtype=np.uint8)[None, :])
        if s.dim == 0:
            continue
        while s.dim <= k_bound:
            if try_tile(s):
                break
            nxt = grow(rep, s)
            if nxt.dim == s.dim or nxt.dim > k_bound:
                break
            s = nxt

    if Fraction(covered) >= (1 - epsilon) * n:
        witness = HyperfiniteWitness(epsilon, k_bound, tiles)
        assert witness_check(rep, witness)
        return witness
    return None


def epsilon_for_delta(delta: Fraction) -> Fraction:
    """Smallest workable epsilon for a tiling parameter delta:
    needs (1-delta)^2 > 1-eps and (1-delta)^(-1) <= 1+eps.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    lower = max(1 - (1 - delta) ** 2, 1 / (1 - delta) - 1)
    # Strict inequality in the first bound: nudge upward.
    return lower + Fraction(1, 1 + lower.denominator * 4)


def witness_from_tiling(rep: Representation, approx: FiniteApproxMap,
                        cert: TilingCertificate, f_basis, f1_basis,
                        epsilon: Fraction) -> HyperfiniteWitness:
    """Tiles V_x = phi(F_1)(x) for each certified center x.

    F_1 must sit inside F; acceptance is decided separately by
    witness_check, never here.
    """
    f_space = Subspace(approx.field, approx.i_max,
                       np.array([np.asarray(v, dtype=np.uint8) for v in f_basis]))
    for v in f1_basis:
        if not f_space.contains_vector(np.asarray(v, dtype=np.uint8)):
            raise ValueError("F_1 is not contained in F")
    tiles = []
    for x in cert.centers:
        vecs = [approx.phi_of(np.asarray(coords, dtype=np.uint8)).apply(x)
                for coords in f1_basis]
        tiles.append(Subspace(approx.field, approx.n,
                              np.array(vecs, dtype=np.uint8)))
    return HyperfiniteWitness(Fraction(epsilon), cert.dim_f, tiles)
