"""Exact rational scalars, sparse multivariate polynomials and fraction-field
linear algebra.

Scalars are `fractions.Fraction` (arbitrary precision, normalized gcd = 1,
positive denominator), aliased as `Rat`.  Polynomials are sparse maps from
exponent vectors to nonzero scalars; the monomial order used for pivoting is
graded lexicographic.  Everything here is immutable in spirit: operations
return fresh values and never mutate their inputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

Rat = Fraction

RAT_ZERO = Fraction(0)
RAT_ONE = Fraction(1)


def _key(exps: tuple, degree: int):
    # graded lex: total degree first, then plain lex on the exponent vector
    return (degree, exps)


class Poly:
    """Sparse multivariate polynomial over the rationals.

    `terms` maps exponent tuples (length `nvars`) to nonzero Fractions.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        self.nvars = nvars
        self.terms = terms

    # --- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return cls(nvars, {})
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {exps: RAT_ONE})

    # --- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return RAT_ZERO
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    # --- arithmetic ---------------------------------------------------

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials over different variable counts")

    def add(self, other: "Poly") -> "Poly":
        self._check(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            s = terms.get(exps, RAT_ZERO) + c
            if s == 0:
                terms.pop(exps, None)
            else:
                terms[exps] = s
        return Poly(self.nvars, terms)

    def neg(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def sub(self, other: "Poly") -> "Poly":
        return self.add(other.neg())

    def mul(self, other: "Poly") -> "Poly":
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, RAT_ZERO) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return Poly(self.nvars, terms)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def pow(self, k: int) -> "Poly":
        result = Poly.one(self.nvars)
        base = self
        while k > 0:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base)
            k >>= 1
        return result

    # --- calculus -----------------------------------------------------

    def derivative(self, i: int) -> "Poly":
        terms = {}
        for exps, c in self.terms.items():
            if exps[i] == 0:
                continue
            e = list(exps)
            k = e[i]
            e[i] -= 1
            te = tuple(e)
            s = terms.get(te, RAT_ZERO) + c * k
            if s == 0:
                terms.pop(te, None)
            else:
                terms[te] = s
        return Poly(self.nvars, terms)

    def antiderivative(self, i: int) -> "Poly":
        """Termwise antiderivative in variable i with zero constant term."""
        terms = {}
        for exps, c in self.terms.items():
            e = list(exps)
            e[i] += 1
            terms[tuple(e)] = c / e[i]
        return Poly(self.nvars, terms)

    def eval(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("point has wrong length")
        pt = [Fraction(p) for p in point]
        total = RAT_ZERO
        for exps, c in self.terms.items():
            v = c
            for x, e in zip(pt, exps):
                if e:
                    v *= x**e
            total += v
        return total

    def compose(self, subs: Sequence["Poly"]) -> "Poly":
        """Substitute subs[i] for variable i.  All subs share one variable count."""
        if len(subs) != self.nvars:
            raise ValueError("substitution list has wrong length")
        nv = subs[0].nvars if subs else 0
        result = Poly.zero(nv)
        for exps, c in self.terms.items():
            term = Poly.const(nv, c)
            for sub, e in zip(subs, exps):
                if e:
                    term = term.mul(sub.pow(e))
            result = result.add(term)
        return result

    # --- leading data & division ---------------------------------------

    def leading(self):
        """Leading (exponents, coefficient) under graded lex order."""
        if not self.terms:
            return None
        exps = max(self.terms, key=lambda e: _key(e, sum(e)))
        return exps, self.terms[exps]

    def div_exact(self, other: "Poly") -> Optional["Poly"]:
        """Exact quotient self / other, or None when division is not exact."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Poly.zero(self.nvars)
        lo, lc = other.leading()
        rem = self
        qterms: dict = {}
        while not rem.is_zero():
            le, ce = rem.leading()
            qe = tuple(a - b for a, b in zip(le, lo))
            if any(e < 0 for e in qe):
                return None
            qc = ce / lc
            qterms[qe] = qterms.get(qe, RAT_ZERO) + qc
            rem = rem.sub(Poly(self.nvars, {qe: qc}).mul(other))
        return Poly(self.nvars, {e: c for e, c in qterms.items() if c != 0})

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators over lcm of denominators)."""
        if not self.terms:
            return RAT_ZERO
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "Poly":
        c = self.content()
        if c in (0, 1):
            return self
        return self.scale(1 / c)

    # --- dunder -------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({self.to_string([f'x{i}' for i in range(self.nvars)])})"

    def to_string(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: _key(kv[0], sum(kv[0])), reverse=True)
        parts = []
        for exps, c in items:
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            coeff = str(c)
            if factors and abs(c) == 1:
                body = "*".join(factors)
                text = body if c > 0 else "-" + body
            elif factors:
                text = coeff + "*" + "*".join(factors)
            else:
                text = coeff
            parts.append(text)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """Dispatch form of the exact polynomial ring operations."""
    if op == "add":
        return a.add(b)
    if op == "sub":
        return a.sub(b)
    if op == "mul":
        return a.mul(b)
    raise ValueError(f"unknown op {op!r}")


# --- rational functions -------------------------------------------------


class RatFunc:
    """Quotient of two polynomials, normalized with monic denominator.

    Simplification only attempts exact division; no polynomial gcd is used.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None):
        if den is None:
            den = Poly.one(num.nvars)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.one(num.nvars)
        else:
            _, lc = den.leading()
            if lc != 1:
                den = den.scale(1 / lc)
                num = num.scale(1 / lc)
            q = num.div_exact(den)
            if q is not None:
                num, den = q, Poly.one(num.nvars)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p)

    @classmethod
    def zero(cls, nvars: int) -> "RatFunc":
        return cls(Poly.zero(nvars))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def add(self, other: "RatFunc") -> "RatFunc":
        if self.den == other.den:
            return RatFunc(self.num.add(other.num), self.den)
        return RatFunc(
            self.num.mul(other.den).add(other.num.mul(self.den)),
            self.den.mul(other.den),
        )

    def sub(self, other: "RatFunc") -> "RatFunc":
        return self.add(other.neg())

    def neg(self) -> "RatFunc":
        return RatFunc(self.num.neg(), self.den)

    def mul(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num.mul(other.num), self.den.mul(other.den))

    def div(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num.mul(other.den), self.den.mul(other.num))

    def as_poly(self) -> Optional[Poly]:
        """Polynomial representative, or None when a denominator survives."""
        if self.den == Poly.one(self.num.nvars):
            return self.num
        return self.num.div_exact(self.den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num.mul(other.den) == other.num.mul(self.den)

    def __repr__(self):
        return f"RatFunc({self.num!r} / {self.den!r})"


# --- matrices ------------------------------------------------------------


class PolyMatrix:
    """Rectangular matrix with Poly entries."""

    __slots__ = ("rows", "cols", "entries", "nvars")

    def __init__(self, rows: int, cols: int, entries: list, nvars: int):
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValueError("entry grid does not match declared shape")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self.nvars = nvars

    @classmethod
    def zero(cls, rows: int, cols: int, nvars: int) -> "PolyMatrix":
        return cls(rows, cols, [[Poly.zero(nvars) for _ in range(cols)] for _ in range(rows)], nvars)

    @classmethod
    def identity(cls, n: int, nvars: int) -> "PolyMatrix":
        m = cls.zero(n, n, nvars)
        for i in range(n):
            m.entries[i][i] = Poly.one(nvars)
        return m

    @classmethod
    def from_rat(cls, rows: int, cols: int, data: list, nvars: int) -> "PolyMatrix":
        return cls(
            rows, cols,
            [[Poly.const(nvars, data[i][j]) for j in range(cols)] for i in range(rows)],
            nvars,
        )

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[i][j]

    def is_constant(self) -> bool:
        return all(e.is_constant() for row in self.entries for e in row)

    def to_rat(self) -> list:
        return [[e.constant_value() for e in row] for row in self.entries]

    def eval_at(self, point: Sequence) -> list:
        return [[e.eval(point) for e in row] for row in self.entries]

    def mul(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        out = PolyMatrix.zero(self.rows, other.cols, self.nvars)
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.entries[i][k]
                if a.is_zero():
                    continue
                for j in range(other.cols):
                    b = other.entries[k][j]
                    if b.is_zero():
                        continue
                    out.entries[i][j] = out.entries[i][j].add(a.mul(b))
        return out

    def add(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix sum")
        return PolyMatrix(
            self.rows, self.cols,
            [[self.entries[i][j].add(other.entries[i][j]) for j in range(self.cols)]
             for i in range(self.rows)],
            self.nvars,
        )

    def sub(self, other: "PolyMatrix") -> "PolyMatrix":
        return self.add(other.scale(-1))

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(
            self.rows, self.cols,
            [[e.scale(c) for e in row] for row in self.entries],
            self.nvars,
        )

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            self.cols, self.rows,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.nvars,
        )

    def col(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def map_entries(self, f) -> "PolyMatrix":
        return PolyMatrix(
            self.rows, self.cols,
            [[f(e) for e in row] for row in self.entries],
            self.nvars,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols})"


# --- rational (Fraction) linear algebra ----------------------------------


def rat_rank(m: list) -> int:
    """Rank of a matrix given as list of Fraction rows (destructive on a copy)."""
    a = [list(map(Fraction, row)) for row in m]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][c]
        a[rank] = [v * inv for v in a[rank]]
        for r in range(rows):
            if r != rank and a[r][c] != 0:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def rat_rref(m: list):
    """Reduced row echelon form; returns (rref rows, pivot column list)."""
    a = [list(map(Fraction, row)) for row in m]
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots = []
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][c]
        a[rank] = [v * inv for v in a[rank]]
        for r in range(rows):
            if r != rank and a[r][c] != 0:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[rank])]
        pivots.append(c)
        rank += 1
        if rank == rows:
            break
    return a, pivots


def rat_kernel(m: list, cols: Optional[int] = None) -> list:
    """Basis of the right kernel, cleared to standard form vectors."""
    if not m:
        return [[RAT_ONE if i == j else RAT_ZERO for i in range(cols or 0)] for j in range(cols or 0)]
    ncols = len(m[0])
    rref, pivots = rat_rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [RAT_ZERO] * ncols
        v[f] = RAT_ONE
        for r, p in enumerate(pivots):
            v[p] = -rref[r][f]
        basis.append(v)
    return basis


def rat_solve(m: list, b: list):
    """One solution of m x = b over the rationals, or None when inconsistent.

    Free variables are set to zero; returns (solution, None) or
    (None, index of an inconsistent row in the eliminated system).
    """
    if not m:
        return ([], None) if all(v == 0 for v in b) else (None, 0)
    rows, cols = len(m), len(m[0])
    a = [list(map(Fraction, m[r])) + [Fraction(b[r])] for r in range(rows)]
    pivots = []
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][c]
        a[rank] = [v * inv for v in a[rank]]
        for r in range(rows):
            if r != rank and a[r][c] != 0:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[rank])]
        pivots.append(c)
        rank += 1
        if rank == rows:
            break
    for r in range(rank, rows):
        if a[r][cols] != 0:
            return None, r
    x = [RAT_ZERO] * cols
    for r, p in enumerate(pivots):
        x[p] = a[r][cols]
    return x, None


def rat_inverse(m: list) -> list:
    n = len(m)
    if n == 0:
        return []
    aug = [list(map(Fraction, m[r])) + [RAT_ONE if c == r else RAT_ZERO for c in range(n)] for r in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def rat_mat_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), RAT_ZERO)
             for j in range(len(b[0]))] for i in range(len(a))]


# --- polynomial-matrix operations ----------------------------------------


def rank_generic(m: PolyMatrix) -> int:
    """Rank over the rational function field, by fraction-free elimination."""
    a = [row[:] for row in m.entries]
    rows, cols = m.rows, m.cols
    nv = m.nvars
    if rows == 0 or cols == 0:
        return 0
    prev = Poly.one(nv)
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if not a[r][c].is_zero()), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pivot = a[rank][c]
        for r in range(rank + 1, rows):
            if all(a[r][j].is_zero() for j in range(c, cols)):
                continue
            for j in range(cols):
                if j == c:
                    continue
                num = a[r][j].mul(pivot).sub(a[r][c].mul(a[rank][j]))
                q = num.div_exact(prev)
                if q is None:
                    # Bareiss guarantees exactness; guard for safety
                    raise ArithmeticError("fraction-free elimination lost exactness")
                a[r][j] = q
            a[r][c] = Poly.zero(nv)
        prev = pivot
        rank += 1
        if rank == rows:
            break
    return rank


def rank_at(m: PolyMatrix, point: Sequence) -> int:
    """Rank of the numeric specialization at a rational point."""
    return rat_rank(m.eval_at(point))


def _ratfunc_rref(rows: list, ncols: int):
    """RREF over the fraction field; rows are lists of RatFunc. Returns (rows, pivots)."""
    pivots = []
    rank = 0
    nrows = len(rows)
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if not rows[r][c].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][c]
        rows[rank] = [v.div(inv) for v in rows[rank]]
        for r in range(nrows):
            if r != rank and not rows[r][c].is_zero():
                f = rows[r][c]
                rows[r] = [v.sub(f.mul(w)) for v, w in zip(rows[r], rows[rank])]
        pivots.append(c)
        rank += 1
        if rank == nrows:
            break
    return rows, pivots


def kernel_basis(m: PolyMatrix):
    """Kernel of m over the fraction field.

    Returns a list of (vector, polynomial_flag) pairs.  Vectors are scaled by
    the product of surviving denominators, so the flag records whether that
    clearing produced a genuine polynomial representative (it always does for
    kernel vectors; the flag is part of the reporting contract).
    """
    nv = m.nvars
    if m.cols == 0:
        return []
    if m.rows == 0:
        basis = []
        for j in range(m.cols):
            v = [Poly.one(nv) if i == j else Poly.zero(nv) for i in range(m.cols)]
            basis.append((v, True))
        return basis
    rows = [[RatFunc(e) for e in row] for row in m.entries]
    rref, pivots = _ratfunc_rref(rows, m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    one = RatFunc(Poly.one(nv))
    basis = []
    for f in free:
        v = [RatFunc.zero(nv) for _ in range(m.cols)]
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = rref[r][f].neg()
        # clear denominators by the product of distinct denominators
        denom = Poly.one(nv)
        seen = set()
        for entry in v:
            dk = frozenset(entry.den.terms.items())
            if dk not in seen and entry.den != Poly.one(nv):
                seen.add(dk)
                denom = denom.mul(entry.den)
        cleared = []
        ok = True
        for entry in v:
            p = entry.mul(RatFunc(denom)).as_poly()
            if p is None:
                ok = False
                cleared.append(entry.num)
            else:
                cleared.append(p)
        # normalize rational content for determinism
        content = RAT_ZERO
        for p in cleared:
            c = p.content()
            content = c if content == 0 else Fraction(
                gcd(content.numerator * c.denominator, c.numerator * content.denominator),
                content.denominator * c.denominator,
            )
        if content not in (0, 1):
            cleared = [p.scale(1 / content) for p in cleared]
        basis.append((cleared, ok))
    return basis


def poly_solve(m: PolyMatrix, b: list):
    """Solve m x = b over the fraction field.

    Returns (list of RatFunc, None) on success, with free variables set to
    zero, or (None, row_index) naming an inconsistent row of the original
    system.
    """
    nv = m.nvars
    rows = [[RatFunc(e) for e in row] + [RatFunc(b[r])] for r, row in enumerate(m.entries)]
    tags = list(range(m.rows))
    pivots = []
    rank = 0
    for c in range(m.cols):
        piv = next((r for r in range(rank, m.rows) if not rows[r][c].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        tags[rank], tags[piv] = tags[piv], tags[rank]
        inv = rows[rank][c]
        rows[rank] = [v.div(inv) for v in rows[rank]]
        for r in range(m.rows):
            if r != rank and not rows[r][c].is_zero():
                f = rows[r][c]
                rows[r] = [v.sub(f.mul(w)) for v, w in zip(rows[r], rows[rank])]
        pivots.append(c)
        rank += 1
        if rank == m.rows:
            break
    for r in range(rank, m.rows):
        if not rows[r][m.cols].is_zero():
            return None, tags[r]
    x = [RatFunc.zero(nv) for _ in range(m.cols)]
    for r, p in enumerate(pivots):
        x[p] = rows[r][m.cols]
    return x, None


def poly_inverse(m: PolyMatrix) -> Optional[PolyMatrix]:
    """Inverse with polynomial entries, or None when no polynomial inverse exists."""
    n = m.rows
    if n != m.cols:
        raise ValueError("inverse of a non-square matrix")
    nv = m.nvars
    cols = []
    for j in range(n):
        e = [Poly.one(nv) if i == j else Poly.zero(nv) for i in range(n)]
        x, bad = poly_solve(m, e)
        if x is None:
            return None
        col = []
        for entry in x:
            p = entry.as_poly()
            if p is None:
                return None
            col.append(p)
        cols.append(col)
    return PolyMatrix(n, n, [[cols[j][i] for j in range(n)] for i in range(n)], nv)


def span_rank(columns: Iterable[list], nvars: int) -> int:
    """Generic rank of the span of polynomial column vectors."""
    cols = list(columns)
    if not cols:
        return 0
    rows = len(cols[0])
    m = PolyMatrix(rows, len(cols), [[cols[j][i] for j in range(len(cols))] for i in range(rows)], nvars)
    return rank_generic(m)
