"""Free-group words, group-algebra elements, and matrices over them.

Words are kept reduced at all times so they can serve as dict keys in the
term maps of algebra elements.  The textual grammar is:

    elem  := term (('+'|'-') term)*
    term  := [coeff '*'] wordpart
    wordpart := 'e' | gen ('*' gen)*
    gen   := 'g' digit+ ['^' ['-'] digit+]
    coeff := digit+
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldSpec
from .matrix import DenseMatrix


class ParseError(ValueError):
    """Syntax error with a character position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Word:
    """A reduced word in F_r: letters are (generator index >= 1, exponent +-1)."""

    letters: tuple = ()

    def __post_init__(self):
        for (i, e) in self.letters:
            if i < 1 or e not in (1, -1):
                raise ValueError("letters must be (index >= 1, +-1)")
        for a, b in zip(self.letters, self.letters[1:]):
            if a[0] == b[0] and a[1] == -b[1]:
                raise ValueError("word is not reduced")

    @staticmethod
    def identity() -> "Word":
        return Word(())

    @staticmethod
    def generator(i: int, exponent: int = 1) -> "Word":
        if exponent == 0:
            return Word(())
        sign = 1 if exponent > 0 else -1
        return Word(tuple((i, sign) for _ in range(abs(exponent))))

    @staticmethod
    def from_letters(letters) -> "Word":
        return Word(reduce_letters(letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(reduce_letters(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for (i, e) in reversed(self.letters)))

    def max_generator(self) -> int:
        return max((i for (i, _) in self.letters), default=0)

    def __str__(self):
        if not self.letters:
            return "e"
        parts = []
        idx = 0
        while idx < len(self.letters):
            i, e = self.letters[idx]
            run = 1
            while idx + run < len(self.letters) and self.letters[idx + run] == (i, e):
                run += 1
            exp = e * run
            parts.append(f"g{i}" if exp == 1 else f"g{i}^{exp}")
            idx += run
        return "*".join(parts)


def reduce_letters(letters) -> tuple:
    """Free reduction by a stack pass; confluent regardless of input order."""
    out = []
    for (i, e) in letters:
        if out and out[-1][0] == i and out[-1][1] == -e:
            out.pop()
        else:
            out.append((i, e))
    return tuple(out)


class AlgebraElement:
    """An element of the group algebra KF_r: finite map Word -> nonzero Scalar."""

    __slots__ = ("field", "r", "terms")

    def __init__(self, field: FieldSpec, r: int, terms=None):
        self.field = field
        self.r = r
        clean = {}
        for w, c in (terms or {}).items():
            c = int(c) % field.q if field.deg == 1 else int(c)
            if c:
                if w.max_generator() > r:
                    raise ValueError(f"generator index {w.max_generator()} exceeds r={r}")
                clean[w] = c
        self.terms = clean

    # -- constructors --

    @classmethod
    def zero(cls, field, r):
        return cls(field, r, {})

    @classmethod
    def one(cls, field, r):
        return cls(field, r, {Word.identity(): 1})

    @classmethod
    def from_word(cls, field, r, word, coeff=1):
        return cls(field, r, {word: coeff})

    def _check(self, other):
        if self.field != other.field or self.r != other.r:
            raise ValueError("algebra mismatch")

    def __eq__(self, other):
        return (isinstance(other, AlgebraElement) and self.field == other.field
                and self.r == other.r and self.terms == other.terms)

    def __hash__(self):
        return hash((self.field, self.r, tuple(sorted(self.terms.items(), key=lambda t: str(t[0])))))

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = self.field.add(out.get(w, 0), c)
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return AlgebraElement(self.field, self.r, out)

    def __neg__(self):
        return AlgebraElement(self.field, self.r,
                              {w: self.field.neg(c) for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 * w2
                s = self.field.add(out.get(w, 0), self.field.mul(c1, c2))
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return AlgebraElement(self.field, self.r, out)

    def scale(self, c: int):
        return AlgebraElement(self.field, self.r,
                              {w: self.field.mul(k, c) for w, k in self.terms.items()})

    @property
    def length(self) -> int:
        return max((w.length for w in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (w.length, str(w))):
            c = self.terms[w]
            if w.length == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(str(w))
            else:
                parts.append(f"{c}*{w}")
        return " + ".join(parts)

    __repr__ = __str__


class AlgebraMatrix:
    """A square matrix over KF_r."""

    __slots__ = ("field", "r", "n", "entries")

    def __init__(self, field, r, entries):
        self.field = field
        self.r = r
        self.entries = [list(row) for row in entries]
        self.n = len(self.entries)
        for row in self.entries:
            if len(row) != self.n:
                raise ValueError("matrix must be square")
            for e in row:
                if e.field != field or e.r != r:
                    raise ValueError("entry algebra mismatch")

    @classmethod
    def scalar(cls, field, r, n, element):
        zero = AlgebraElement.zero(field, r)
        return cls(field, r, [[element if i == j else zero for j in range(n)]
                              for i in range(n)])

    @classmethod
    def diag_blocks(cls, a: "AlgebraMatrix", b: "AlgebraMatrix") -> "AlgebraMatrix":
        zero = AlgebraElement.zero(a.field, a.r)
        n = a.n + b.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i < a.n and j < a.n:
                    row.append(a.entries[i][j])
                elif i >= a.n and j >= a.n:
                    row.append(b.entries[i - a.n][j - a.n])
                else:
                    row.append(zero)
            rows.append(row)
        return cls(a.field, a.r, rows)

    @property
    def length(self) -> int:
        return max((e.length for row in self.entries for e in row), default=0)

    def __eq__(self, other):
        return (isinstance(other, AlgebraMatrix) and self.n == other.n
                and self.entries == other.entries)

    def to_json(self):
        return [[str(e) for e in row] for row in self.entries]

    @staticmethod
    def from_json(field, r, obj):
        return AlgebraMatrix(field, r, [[parse_element(s, field, r) for s in row]
                                        for row in obj])


# -- parsing --

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

    def take(self, ch):
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def number(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected digits", start)
        return int(self.text[start:self.pos])


def parse_element(text: str, field: FieldSpec, r: int) -> AlgebraElement:
    """Parse the group-algebra grammar; round-trips with str()."""
    sc = _Scanner(text)
    result = _parse_term(sc, field, r)
    while True:
        ch = sc.peek()
        if ch == "+":
            sc.take("+")
            result = result + _parse_term(sc, field, r)
        elif ch == "-":
            sc.take("-")
            result = result - _parse_term(sc, field, r)
        else:
            break
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise ParseError(f"unexpected {sc.text[sc.pos]!r}", sc.pos)
    return result


def _parse_term(sc, field, r):
    coeff = 1
    if sc.peek().isdigit():
        coeff = sc.number() % field.q if field.deg == 1 else sc.number()
        if coeff >= field.q:
            raise ParseError(f"coefficient {coeff} out of range [0, {field.q})", sc.pos)
        if sc.peek() == "*":
            sc.take("*")
        else:
            return AlgebraElement(field, r, {Word.identity(): coeff})
    word = _parse_wordpart(sc, r)
    return AlgebraElement(field, r, {word: coeff})


def _parse_wordpart(sc, r):
    if sc.peek() == "e":
        sc.take("e")
        return Word.identity()
    word = _parse_gen(sc, r)
    while sc.peek() == "*":
        sc.take("*")
        word = word * _parse_gen(sc, r)
    return word


def _parse_gen(sc, r):
    pos = sc.pos
    if sc.peek() != "g":
        raise ParseError("expected generator 'g<digits>'", sc.pos)
    sc.take("g")
    idx = sc.number()
    if idx < 1 or idx > r:
        raise ParseError(f"generator index {idx} out of range [1, {r}]", pos)
    exp = 1
    if sc.peek() == "^":
        sc.take("^")
        sign = 1
        if sc.peek() == "-":
            sc.take("-")
            sign = -1
        exp = sign * sc.number()
    return Word.generator(idx, exp)


def word_multiply(u: Word, v: Word) -> Word:
    return u * v
