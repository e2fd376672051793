"""Noncommutative rational expressions: AST, evaluation, equivalence sampling.

Grammar:

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := 'z' digit+ | const | 'inv' '(' expr ')' | '(' expr ')'

Subtraction desugars to addition of a (-1)-scaled product, keeping the AST
to constants, variables, sums, products, and inverses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldSpec
from .freealg import ParseError
from .matrix import DenseMatrix, SingularMatrixError, random_matrix


@dataclass(frozen=True)
class Const:
    code: int


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("variable index must be >= 1")


@dataclass(frozen=True)
class Sum:
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty sum")


@dataclass(frozen=True)
class Prod:
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty product")


@dataclass(frozen=True)
class Inv:
    arg: object


RatExpr = object  # union of the five node types above


def max_variable(expr) -> int:
    if isinstance(expr, Var):
        return expr.index
    if isinstance(expr, (Sum, Prod)):
        return max(max_variable(p) for p in expr.parts)
    if isinstance(expr, Inv):
        return max_variable(expr.arg)
    return 0


@dataclass
class EvalResult:
    """Either a value, or the AST path to the Inv whose argument was singular."""

    value: DenseMatrix | None = None
    failure_path: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.value is not None


def evaluate(expr, matrices: list) -> EvalResult:
    """Bottom-up evaluation on an r-tuple of same-size square matrices."""
    if not matrices:
        raise ValueError("need at least one matrix")
    field = matrices[0].field
    n = matrices[0].rows
    for m in matrices:
        if m.field != field or m.rows != n or m.cols != n:
            raise ValueError("matrices must share field and size")
    if max_variable(expr) > len(matrices):
        raise ValueError("expression uses more variables than matrices supplied")
    return _eval(expr, matrices, field, n, ())


def _eval(expr, mats, field, n, path):
    if isinstance(expr, _MinusOne):
        return EvalResult(DenseMatrix.identity(field, n).scale(field.neg(1)))
    if isinstance(expr, Const):
        if not 0 <= expr.code < field.q:
            raise ValueError(f"constant code {expr.code} out of range for GF({field.q})")
        return EvalResult(DenseMatrix.identity(field, n).scale(expr.code))
    if isinstance(expr, Var):
        return EvalResult(mats[expr.index - 1])
    if isinstance(expr, Sum):
        acc = None
        for idx, part in enumerate(expr.parts):
            sub = _eval(part, mats, field, n, path + (idx,))
            if not sub.ok:
                return sub
            acc = sub.value if acc is None else acc + sub.value
        return EvalResult(acc)
    if isinstance(expr, Prod):
        acc = None
        for idx, part in enumerate(expr.parts):
            sub = _eval(part, mats, field, n, path + (idx,))
            if not sub.ok:
                return sub
            acc = sub.value if acc is None else acc @ sub.value
        return EvalResult(acc)
    if isinstance(expr, Inv):
        sub = _eval(expr.arg, mats, field, n, path + (0,))
        if not sub.ok:
            return sub
        try:
            return EvalResult(sub.value.inverse())
        except SingularMatrixError:
            return EvalResult(failure_path=path)
    raise TypeError(f"not a rational expression node: {expr!r}")


def in_domain(expr, matrices) -> bool:
    return evaluate(expr, matrices).ok


# -- equivalence sampling --

@dataclass
class EquivVerdict:
    kind: str                     # "counterexample" | "consistent" | "no_common_domain"
    common_domain_points: int
    point: list | None = None     # matrices of the verified counterexample
    values: tuple | None = None   # (value of R, value of S) at the point

    def to_json(self):
        out = {"kind": self.kind, "common_domain_points": self.common_domain_points}
        if self.point is not None:
            out["point"] = [m.to_json() for m in self.point]
            out["values"] = [v.to_json() for v in self.values]
        return out


def equiv_probabilistic(r_expr, s_expr, sizes, trials: int, ext_deg: int = 8,
                        seed: int = 0, base_field: FieldSpec | None = None) -> EquivVerdict:
    """Sample random tuples over GF(q^ext_deg) and compare the two expressions.

    A counterexample is re-evaluated from scratch before being reported;
    a "consistent" verdict is evidence, not a proof of equivalence.
    """
    base = base_field or FieldSpec(2)
    field = FieldSpec(base.p, base.deg * ext_deg) if ext_deg > 1 else base
    r = max(max_variable(r_expr), max_variable(s_expr), 1)
    rng = np.random.Generator(np.random.Philox(seed))
    common = 0
    for n in sizes:
        for _ in range(trials):
            mats = [random_matrix(field, rng, n) for _ in range(r)]
            res_r = evaluate(r_expr, mats)
            res_s = evaluate(s_expr, mats)
            if not (res_r.ok and res_s.ok):
                continue
            common += 1
            if res_r.value != res_s.value:
                # Independent re-verification before reporting.
                check_r = evaluate(r_expr, mats)
                check_s = evaluate(s_expr, mats)
                if check_r.ok and check_s.ok and check_r.value != check_s.value:
                    return EquivVerdict("counterexample", common, mats,
                                        (check_r.value, check_s.value))
    if common == 0:
        return EquivVerdict("no_common_domain", 0)
    return EquivVerdict("consistent", common)


# -- parsing and printing --

def parse_ratexpr(text: str):
    sc = _Scanner(text)
    expr = _parse_expr(sc)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise ParseError(f"unexpected {sc.text[sc.pos]!r}", sc.pos)
    return expr


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def startswith(self, s):
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def take(self, s):
        if not self.startswith(s):
            raise ParseError(f"expected {s!r}", self.pos)
        self.pos += len(s)

    def number(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected digits", start)
        return int(self.text[start:self.pos])


@dataclass(frozen=True)
class _MinusOne:
    """Field-agnostic -1 produced by desugaring '-'; resolved at evaluation."""


def _parse_expr(sc):
    parts = [_parse_term(sc)]
    signs = [1]
    while sc.peek() in ("+", "-"):
        op = sc.peek()
        sc.take(op)
        parts.append(_parse_term(sc))
        signs.append(1 if op == "+" else -1)
    if len(parts) == 1:
        return parts[0]
    resolved = [p if s == 1 else Prod((_MinusOne(), p)) if not isinstance(p, Prod)
                else Prod((_MinusOne(),) + p.parts)
                for p, s in zip(parts, signs)]
    return Sum(tuple(resolved))


def _parse_term(sc):
    parts = [_parse_factor(sc)]
    while sc.peek() == "*":
        sc.take("*")
        parts.append(_parse_factor(sc))
    return parts[0] if len(parts) == 1 else Prod(tuple(parts))


def _parse_factor(sc):
    ch = sc.peek()
    if ch == "z":
        start = sc.pos
        sc.take("z")
        idx = sc.number()
        if idx < 1:
            raise ParseError("variable index must be >= 1", start)
        return Var(idx)
    if ch.isdigit():
        return Const(sc.number())
    if sc.startswith("inv"):
        sc.take("inv")
        sc.take("(")
        inner = _parse_expr(sc)
        sc.take(")")
        return Inv(inner)
    if ch == "(":
        sc.take("(")
        inner = _parse_expr(sc)
        sc.take(")")
        return inner
    raise ParseError("expected variable, constant, inv(...) or (...)", sc.pos)


def print_ratexpr(expr) -> str:
    return _print(expr, 0)


def _print(expr, level):
    # level 0 = sum context, 1 = product context.
    if isinstance(expr, Const):
        return str(expr.code)
    if isinstance(expr, _MinusOne):
        raise ValueError("negation marker cannot be printed directly")
    if isinstance(expr, Var):
        return f"z{expr.index}"
    if isinstance(expr, Inv):
        return f"inv({_print(expr.arg, 0)})"
    if isinstance(expr, Sum):
        pieces = []
        for idx, p in enumerate(expr.parts):
            if (isinstance(p, Prod) and isinstance(p.parts[0], _MinusOne)):
                rest = p.parts[1:]
                inner = rest[0] if len(rest) == 1 else Prod(rest)
                if idx == 0:
                    raise ValueError("leading negation has no printable form")
                pieces.append("- " + _print(inner, 1))
            else:
                if idx:
                    pieces.append("+ " + _print(p, 1))
                else:
                    pieces.append(_print(p, 1))
        text = " ".join(pieces)
        return f"({text})" if level >= 1 else text
    if isinstance(expr, Prod):
        text = "*".join(_print(p, 1) if not isinstance(p, (Sum,))
                        else f"({_print(p, 0)})" for p in expr.parts)
        return text
    raise TypeError(f"not a rational expression node: {expr!r}")
