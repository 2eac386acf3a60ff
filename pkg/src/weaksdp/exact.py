"""Exact rational scalars and dense matrices.

All certification arithmetic in this package is exact: scalars are
`fractions.Fraction` values (re-exported as `Rational`), matrices are dense
tuples of them, and no floating point enters any verification path. Matrix
entries are addressed with 1-based indices via ``at(i, j)``, matching the
1-based index sets used for block structures, so a single indexing convention
runs through structures, matrices and emitted file formats.

Every value is immutable after construction and all operations are pure, so
the types here are safe to share across threads. ``SymBuilder`` is the one
mutable scratch type, used while assembling a symmetric matrix; ``freeze()``
produces the immutable result.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def rational(value) -> Fraction:
    """Coerce ints, Fractions, and strings like ``-3/7`` or ``1.25`` to a Rational.

    Floats are rejected on purpose: binary rounding must never leak into the
    exact pipeline silently.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _int_values(entries: Sequence[Fraction]) -> list[int] | None:
    """Return plain ints when every entry has denominator 1, else None.

    Integer data is the common case for generated instances; dropping to raw
    int arithmetic makes the O(n^3) kernels an order of magnitude faster than
    Fraction arithmetic while staying exact.
    """
    out = []
    for q in entries:
        if q.denominator != 1:
            return None
        out.append(q.numerator)
    return out


class Matrix:
    """Dense exact matrix; entries are Fractions, read with 1-based ``at(i, j)``."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries: tuple[Fraction, ...]):
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ValueError("entry count does not match dimensions")
        self.rows = rows
        self.cols = cols
        self._e = entries

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "Matrix":
        grid = [[rational(v) for v in row] for row in rows]
        nrows = len(grid)
        ncols = len(grid[0]) if grid else 0
        if any(len(row) != ncols for row in grid):
            raise ValueError("ragged rows")
        return cls(nrows, ncols, tuple(v for row in grid for v in row))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(_ONE if i == j else _ZERO for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (_ZERO,) * (rows * cols))

    def at(self, i: int, j: int) -> Fraction:
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols} (indices are 1-based)")
        return self._e[(i - 1) * self.cols + (j - 1)]

    def row(self, i: int) -> tuple[Fraction, ...]:
        if not 1 <= i <= self.rows:
            raise IndexError("row index out of range")
        return self._e[(i - 1) * self.cols : i * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(1, self.rows + 1)]

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols,
            self.rows,
            tuple(self._e[r * self.cols + c] for c in range(self.cols) for r in range(self.rows)),
        )

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not match")
        n, k, m = self.rows, self.cols, other.cols
        a = _int_values(self._e)
        b = _int_values(other._e)
        if a is not None and b is not None:
            flat = [0] * (n * m)
            for i in range(n):
                arow = a[i * k : (i + 1) * k]
                base = i * m
                for t in range(k):
                    av = arow[t]
                    if av:
                        brow = b[t * m : (t + 1) * m]
                        for j in range(m):
                            flat[base + j] += av * brow[j]
            return Matrix(n, m, tuple(Fraction(v) for v in flat))
        flat_q = [_ZERO] * (n * m)
        for i in range(n):
            base = i * m
            for t in range(k):
                av = self._e[i * k + t]
                if av:
                    for j in range(m):
                        flat_q[base + j] += av * other._e[t * m + j]
        return Matrix(n, m, tuple(flat_q))

    def mul_vec(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum((self._e[i * self.cols + j] * v[j] for j in range(self.cols)), _ZERO)
                     for i in range(self.rows))

    def scale(self, c) -> "Matrix":
        q = rational(c)
        return Matrix(self.rows, self.cols, tuple(q * v for v in self._e))

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self._e, other._e)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._e == other._e
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._e))

    def __repr__(self) -> str:
        return f"Matrix({self.to_rows()!r})"


def _upper_offset(n: int, i: int, j: int) -> int:
    # i <= j, both 1-based; packed row-major upper triangle including diagonal
    return (i - 1) * (2 * n - i + 2) // 2 + (j - i)


class SymMatrix:
    """Dense exact symmetric matrix of order n.

    Only the upper triangle is stored, so symmetry holds by construction.
    Entries are read with 1-based ``at(i, j)``.
    """

    __slots__ = ("n", "_u")

    def __init__(self, n: int, upper: tuple[Fraction, ...]):
        if n < 0 or len(upper) != n * (n + 1) // 2:
            raise ValueError("upper-triangle length does not match order")
        self.n = n
        self._u = upper

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "SymMatrix":
        grid = [[rational(v) for v in row] for row in rows]
        n = len(grid)
        if any(len(row) != n for row in grid):
            raise ValueError("matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if grid[i][j] != grid[j][i]:
                    raise ValueError(f"not symmetric at ({i + 1},{j + 1})")
        return cls(n, tuple(grid[i][j] for i in range(n) for j in range(i, n)))

    @classmethod
    def zeros(cls, n: int) -> "SymMatrix":
        return cls(n, (_ZERO,) * (n * (n + 1) // 2))

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls.diag([_ONE] * n)

    @classmethod
    def diag(cls, values: Sequence) -> "SymMatrix":
        vals = [rational(v) for v in values]
        n = len(vals)
        upper = [_ZERO] * (n * (n + 1) // 2)
        for i in range(1, n + 1):
            upper[_upper_offset(n, i, i)] = vals[i - 1]
        return cls(n, tuple(upper))

    @classmethod
    def unit(cls, n: int, i: int, j: int, value=1) -> "SymMatrix":
        """Symmetric unit matrix: `value` at (i, j) and (j, i), zero elsewhere."""
        b = SymBuilder(n)
        b.set(i, j, rational(value))
        return b.freeze()

    def at(self, i: int, j: int) -> Fraction:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"entry ({i},{j}) outside order {self.n} (indices are 1-based)")
        if i > j:
            i, j = j, i
        return self._u[_upper_offset(self.n, i, j)]

    def to_rows(self) -> list[list[Fraction]]:
        return [[self.at(i, j) for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def to_matrix(self) -> Matrix:
        return Matrix(self.n, self.n, tuple(v for row in self.to_rows() for v in row))

    def principal(self, indices: Iterable[int]) -> "SymMatrix":
        """Principal submatrix on the given (1-based) indices, in sorted order."""
        idx = sorted(set(indices))
        if idx and not (1 <= idx[0] and idx[-1] <= self.n):
            raise IndexError("principal indices out of range")
        return SymMatrix(
            len(idx),
            tuple(self.at(idx[r], idx[c]) for r in range(len(idx)) for c in range(r, len(idx))),
        )

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> Matrix:
        """General rectangular block, rows and columns given as 1-based indices."""
        ri = list(row_idx)
        ci = list(col_idx)
        return Matrix(len(ri), len(ci), tuple(self.at(r, c) for r in ri for c in ci))

    def add(self, other: "SymMatrix") -> "SymMatrix":
        if self.n != other.n:
            raise ValueError("order mismatch")
        return SymMatrix(self.n, tuple(a + b for a, b in zip(self._u, other._u)))

    def sub(self, other: "SymMatrix") -> "SymMatrix":
        return self.add(other.scale(-1))

    def scale(self, c) -> "SymMatrix":
        q = rational(c)
        return SymMatrix(self.n, tuple(q * v for v in self._u))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self._u)

    def denominator_lcm(self) -> int:
        from math import lcm

        return lcm(1, *(v.denominator for v in self._u)) if self._u else 1

    def __eq__(self, other) -> bool:
        return isinstance(other, SymMatrix) and self.n == other.n and self._u == other._u

    def __hash__(self) -> int:
        return hash((self.n, self._u))

    def __repr__(self) -> str:
        return f"SymMatrix({self.to_rows()!r})"


class SymBuilder:
    """Mutable scratch for assembling a SymMatrix entry by entry (1-based)."""

    __slots__ = ("n", "_d")

    def __init__(self, n: int):
        self.n = n
        self._d: dict[tuple[int, int], Fraction] = {}

    @staticmethod
    def _key(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i <= j else (j, i)

    def set(self, i: int, j: int, value) -> None:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError("builder index out of range")
        q = rational(value)
        key = self._key(i, j)
        if q == 0:
            self._d.pop(key, None)
        else:
            self._d[key] = q

    def get(self, i: int, j: int) -> Fraction:
        return self._d.get(self._key(i, j), _ZERO)

    def add(self, i: int, j: int, value) -> None:
        self.set(i, j, self.get(i, j) + rational(value))

    def inner(self, other: "SymBuilder") -> Fraction:
        """Entrywise trace inner product with another builder of the same order."""
        if self.n != other.n:
            raise ValueError("order mismatch")
        small, large = (self._d, other._d) if len(self._d) <= len(other._d) else (other._d, self._d)
        total = _ZERO
        for (i, j), v in small.items():
            w = large.get((i, j))
            if w is not None:
                total += (v * w) if i == j else 2 * v * w
        return total

    def freeze(self) -> SymMatrix:
        upper = [_ZERO] * (self.n * (self.n + 1) // 2)
        for (i, j), v in self._d.items():
            upper[_upper_offset(self.n, i, j)] = v
        return SymMatrix(self.n, tuple(upper))


def inner(a: SymMatrix, b: SymMatrix) -> Fraction:
    """Trace inner product of symmetric matrices: sum of entrywise products.

    Equals the trace of the ordinary matrix product, computed exactly.
    """
    if a.n != b.n:
        raise ValueError("order mismatch")
    n = a.n
    ai = _int_values(a._u)
    bi = _int_values(b._u)
    if ai is not None and bi is not None:
        total = 0
        pos = 0
        for i in range(n):
            total += ai[pos] * bi[pos]
            for off in range(1, n - i):
                total += 2 * ai[pos + off] * bi[pos + off]
            pos += n - i
        return Fraction(total)
    total_q = _ZERO
    pos = 0
    for i in range(n):
        total_q += a._u[pos] * b._u[pos]
        for off in range(1, n - i):
            total_q += 2 * a._u[pos + off] * b._u[pos + off]
        pos += n - i
    return total_q


def inner_general(m: Matrix, y: Matrix) -> Fraction:
    """Inner product of general matrices: trace(m^T y) = sum of entrywise products."""
    if (m.rows, m.cols) != (y.rows, y.cols):
        raise ValueError("shape mismatch")
    return sum((u * v for u, v in zip(m._e, y._e)), _ZERO)


def congruence(a: SymMatrix, t: Matrix) -> SymMatrix:
    """Congruence transform T^T A T, computed exactly.

    T must be square of the same order as A; invertibility is not checked here
    (callers that need an invertible transform verify the determinant).
    """
    if not t.is_square() or t.rows != a.n:
        raise ValueError("transform must be square of the same order")
    product = t.transpose() @ (a.to_matrix() @ t)
    n = a.n
    # exact arithmetic: the result is symmetric identically, take the upper triangle
    return SymMatrix(
        n,
        tuple(product._e[(i - 1) * n + (j - 1)] for i in range(1, n + 1) for j in range(i, n + 1)),
    )
