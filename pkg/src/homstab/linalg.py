"""Exact linear algebra over Z, Q and F_p.

Everything here works on Python integers (arbitrary precision) and
:class:`fractions.Fraction`; there is no floating point anywhere.

Two routes to the invariant factors of an integer matrix are provided:

* :func:`smith_normal_form` -- dense, returns unimodular certificates
  ``left``/``right`` with ``left @ m @ right == diag``.
* :func:`invariant_factors` -- sparse elimination on unit pivots followed by
  a dense Smith reduction of whatever is left.  No certificates, but it copes
  with the several-thousand-column boundary matrices built elsewhere.

The two are checked against each other in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_characteristic(char: int) -> int:
    """Return ``char`` if it is 0 or a prime, raise ``ValueError`` otherwise."""
    if char != 0 and not is_prime(char):
        raise ValueError(f"characteristic must be 0 or a prime, got {char}")
    return char


class IntegerMatrix:
    """Immutable sparse integer matrix, stored column by column.

    Only nonzero entries are kept.  Indexing is bounds-checked: asking for an
    entry outside the shape raises ``IndexError``.

    >>> m = IntegerMatrix.from_rows([[1, 2], [3, 4]])
    >>> m[1, 0]
    3
    >>> m.shape
    (2, 2)
    """

    __slots__ = ("_rows", "_cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, columns: Iterable[dict[int, int]] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        data: list[dict[int, int]] = []
        if columns is not None:
            for col in columns:
                clean = {}
                for r, v in col.items():
                    if not 0 <= r < rows:
                        raise IndexError(f"row {r} out of range for {rows} rows")
                    v = int(v)
                    if v:
                        clean[r] = v
                data.append(clean)
            if len(data) != cols:
                raise ValueError(f"expected {cols} columns, got {len(data)}")
        else:
            data = [{} for _ in range(cols)]
        self._rows = rows
        self._cols = cols
        self._data = tuple(data)
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntegerMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        cols: list[dict[int, int]] = [{} for _ in range(ncols)]
        for r, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for c, v in enumerate(row):
                if v:
                    cols[c][r] = v
        return cls(nrows, ncols, cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int, scale: int = 1) -> "IntegerMatrix":
        return cls(n, n, [{i: scale} for i in range(n)])

    @classmethod
    def diagonal(cls, rows: int, cols: int, diag: Sequence[int]) -> "IntegerMatrix":
        columns: list[dict[int, int]] = [{} for _ in range(cols)]
        for i, d in enumerate(diag):
            if d:
                columns[i][i] = d
        return cls(rows, cols, columns)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["IntegerMatrix"]]) -> "IntegerMatrix":
        """Assemble a block matrix; every block row must share heights, every
        block column widths."""
        heights = [row[0].rows for row in blocks]
        widths = [b.cols for b in blocks[0]] if blocks else []
        columns: list[dict[int, int]] = [{} for _ in range(sum(widths))]
        roff = 0
        for bi, row in enumerate(blocks):
            if len(row) != len(widths):
                raise ValueError("block rows have different lengths")
            coff = 0
            for bj, b in enumerate(row):
                if b.rows != heights[bi] or b.cols != widths[bj]:
                    raise ValueError("block shapes do not line up")
                for c, col in enumerate(b._data):
                    target = columns[coff + c]
                    for r, v in col.items():
                        target[roff + r] = v
                coff += widths[bj]
            roff += heights[bi]
        return cls(sum(heights), sum(widths), columns)

    # access ---------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self._rows, self._cols)

    def __getitem__(self, key: tuple[int, int]) -> int:
        r, c = key
        if not (0 <= r < self._rows and 0 <= c < self._cols):
            raise IndexError(f"entry ({r}, {c}) outside a {self._rows}x{self._cols} matrix")
        return self._data[c].get(r, 0)

    def column(self, c: int) -> dict[int, int]:
        if not 0 <= c < self._cols:
            raise IndexError(f"column {c} out of range")
        return dict(self._data[c])

    def columns(self) -> list[dict[int, int]]:
        return [dict(col) for col in self._data]

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self._cols for _ in range(self._rows)]
        for c, col in enumerate(self._data):
            for r, v in col.items():
                out[r][c] = v
        return out

    def nnz(self) -> int:
        return sum(len(col) for col in self._data)

    def is_zero(self) -> bool:
        return all(not col for col in self._data)

    # arithmetic -----------------------------------------------------------

    def transpose(self) -> "IntegerMatrix":
        columns: list[dict[int, int]] = [{} for _ in range(self._rows)]
        for c, col in enumerate(self._data):
            for r, v in col.items():
                columns[r][c] = v
        return IntegerMatrix(self._cols, self._rows, columns)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self._cols != other._rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for col in other._data:
            acc: dict[int, int] = {}
            for k, v in col.items():
                for r, w in self._data[k].items():
                    acc[r] = acc.get(r, 0) + w * v
            out.append(acc)
        return IntegerMatrix(self._rows, other._cols, out)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = []
        for a, b in zip(self._data, other._data):
            acc = dict(a)
            for r, v in b.items():
                acc[r] = acc.get(r, 0) + v
            out.append(acc)
        return IntegerMatrix(self._rows, self._cols, out)

    def __neg__(self) -> "IntegerMatrix":
        return self.scale(-1)

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntegerMatrix":
        return IntegerMatrix(self._rows, self._cols, [{r: k * v for r, v in col.items()} for col in self._data])

    def reduce_mod(self, p: int) -> "IntegerMatrix":
        return IntegerMatrix(self._rows, self._cols, [{r: v % p for r, v in col.items()} for col in self._data])

    def select_rows(self, keep: Sequence[int]) -> "IntegerMatrix":
        pos = {r: i for i, r in enumerate(keep)}
        return IntegerMatrix(
            len(keep), self._cols,
            [{pos[r]: v for r, v in col.items() if r in pos} for col in self._data],
        )

    def select_columns(self, keep: Sequence[int]) -> "IntegerMatrix":
        return IntegerMatrix(self._rows, len(keep), [self._data[c] for c in keep])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, tuple(tuple(sorted(c.items())) for c in self._data)))
        return self._hash

    def __repr__(self) -> str:
        if self._rows * self._cols <= 64:
            return f"IntegerMatrix.from_rows({self.to_rows()!r}, ncols={self._cols})"
        return f"<IntegerMatrix {self._rows}x{self._cols}, nnz={self.nnz()}>"


@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple[int, ...]
    left: IntegerMatrix
    right: IntegerMatrix


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """A finitely generated abelian group ``Z^free_rank + Z/t1 + Z/t2 + ...``
    with ``t1 | t2 | ...`` and every ``ti > 1``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for t in self.torsion:
            if t <= 1:
                raise ValueError(f"torsion coefficients must exceed 1, got {t}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion chain broken: {a} does not divide {b}")

    @classmethod
    def from_diagonal(cls, free_rank: int, diag: Iterable[int]) -> "AbelianGroupInvariants":
        return cls(free_rank, tuple(d for d in diag if d > 1))

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def dim_mod(self, p: int) -> int:
        """Dimension of ``G (x) F_p``."""
        return self.free_rank + sum(1 for t in self.torsion if t % p == 0)

    def __str__(self) -> str:
        """``Z^3 + Z/2 + Z/4``; the trivial group prints as ``0``."""
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    @classmethod
    def parse(cls, text: str) -> "AbelianGroupInvariants":
        text = text.strip()
        if text == "0":
            return cls()
        free, tors = 0, []
        for part in text.split("+"):
            part = part.strip()
            if part == "Z":
                free += 1
            elif part.startswith("Z^"):
                free += int(part[2:])
            elif part.startswith("Z/"):
                tors.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse group summand {part!r}")
        return cls(free, tuple(tors))


# ---------------------------------------------------------------------------
# dense Smith normal form


def _smith_dense(a: list[list[int]], track: bool, ncols: int | None = None):
    """In-place Smith reduction of the dense matrix ``a``.

    Returns ``(diag, left, right)``; the transforms are ``None`` unless
    ``track`` is set.  Pivot choice is the smallest nonzero absolute value in
    the remaining block, first in row-major order, so the output only depends
    on the input.
    """
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if m else 0)
    left = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    right = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in right:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        ra, rs = a[dst], a[src]
        for c in range(n):
            if rs[c]:
                ra[c] += k * rs[c]
        if track:
            la, ls = left[dst], left[src]
            for c in range(m):
                if ls[c]:
                    la[c] += k * ls[c]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in a:
            if row[src]:
                row[dst] += k * row[src]
        if track:
            for row in right:
                if row[src]:
                    row[dst] += k * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, -q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, -q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/column t onto the pivot
                cand = [(abs(a[i][t]), 0, i) for i in range(t + 1, m) if a[i][t]]
                cand += [(abs(a[t][j]), 1, j) for j in range(t + 1, n) if a[t][j]]
                _, kind, idx = min(cand)
                if kind == 0:
                    swap_rows(t, idx)
                else:
                    swap_cols(t, idx)
                continue
            bad = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
            if track:
                left[t] = [-v for v in left[t]]
        diag.append(a[t][t])
        t += 1
    return diag, left, right


def smith_normal_form(m: IntegerMatrix) -> SmithForm:
    """Smith normal form with unimodular certificates.

    ``diagonal`` has ``min(rows, cols)`` entries, nonzero ones first, each
    dividing the next.

    >>> smith_normal_form(IntegerMatrix.from_rows([[2, 4], [6, 8]])).diagonal
    (2, 4)
    """
    rows, cols = m.shape
    dense = m.to_rows()
    diag, left, right = _smith_dense(dense, track=True, ncols=cols)
    diag = diag + [0] * (min(rows, cols) - len(diag))
    return SmithForm(
        tuple(diag),
        IntegerMatrix.from_rows(left, ncols=rows),
        IntegerMatrix.from_rows(right, ncols=cols),
    )


# ---------------------------------------------------------------------------
# sparse elimination


def _sparse_unit_elimination(cols: list[dict[int, int]], nrows: int, modulus: int = 0):
    """Eliminate unit pivots in place.

    With ``modulus == 0`` works over Z and only pivots on entries ``+-1``;
    with a prime modulus every nonzero entry is a unit.  Each pivot step is a
    Schur complement, which leaves the invariant factors of the rest of the
    matrix unchanged.  Returns the number of pivots taken; ``cols`` is left
    holding the unreduced remainder.
    """
    rowidx: list[set[int]] = [set() for _ in range(nrows)]
    for c, col in enumerate(cols):
        for r in col:
            rowidx[r].add(c)

    pivots = 0
    progress = True
    while progress:
        progress = False
        order = sorted((len(col), c) for c, col in enumerate(cols) if col)
        for _, c in order:
            col = cols[c]
            if not col:
                continue
            best_r = -1
            best_len = 0
            for r, v in col.items():
                if modulus or v == 1 or v == -1:
                    ln = len(rowidx[r])
                    if best_r < 0 or ln < best_len or (ln == best_len and r < best_r):
                        best_r, best_len = r, ln
            if best_r < 0:
                continue
            r = best_r
            u = col[r]
            inv = pow(u, -1, modulus) if modulus else u
            for c2 in sorted(rowidx[r]):
                if c2 == c:
                    continue
                target = cols[c2]
                f = target[r] * inv
                for rr, v in col.items():
                    nv = target.get(rr, 0) - f * v
                    if modulus:
                        nv %= modulus
                    if nv:
                        if rr not in target:
                            rowidx[rr].add(c2)
                        target[rr] = nv
                    elif rr in target:
                        del target[rr]
                        rowidx[rr].discard(c2)
            for rr in col:
                rowidx[rr].discard(c)
            cols[c] = {}
            pivots += 1
            progress = True
    return pivots


def _compact(cols: list[dict[int, int]]) -> list[list[int]]:
    live_cols = [c for c in cols if c]
    live_rows = sorted({r for c in live_cols for r in c})
    pos = {r: i for i, r in enumerate(live_rows)}
    dense = [[0] * len(live_cols) for _ in live_rows]
    for j, c in enumerate(live_cols):
        for r, v in c.items():
            dense[pos[r]][j] = v
    return dense


def invariant_factors(m: IntegerMatrix) -> tuple[int, ...]:
    """Nonzero Smith diagonal entries of ``m`` (so ``len`` is the rank over Q)."""
    cols = m.columns()
    units = _sparse_unit_elimination(cols, m.rows)
    rest = _compact(cols)
    diag = _smith_dense(rest, track=False)[0] if rest else []
    return (1,) * units + tuple(diag)


def _rank_mod_p(m: IntegerMatrix, p: int) -> int:
    cols = [{r: v % p for r, v in col.items() if v % p} for col in m.columns()]
    return _sparse_unit_elimination(cols, m.rows, modulus=p)


def rank_over_field(m: IntegerMatrix, char: int) -> int:
    """Rank of ``m`` over Q (``char == 0``) or over F_p.

    >>> rank_over_field(IntegerMatrix.from_rows([[2]]), 2)
    0
    """
    check_characteristic(char)
    if char == 0:
        return len(invariant_factors(m))
    return _rank_mod_p(m, char)


def cokernel_invariants(m: IntegerMatrix) -> AbelianGroupInvariants:
    """The group ``Z^rows / (column span of m)``."""
    diag = invariant_factors(m)
    return AbelianGroupInvariants.from_diagonal(m.rows - len(diag), diag)


def kernel_basis(m: IntegerMatrix) -> IntegerMatrix:
    """Columns form a Z-basis of the integer kernel of ``m``."""
    snf = smith_normal_form(m)
    nonzero = sum(1 for d in snf.diagonal if d)
    return snf.right.select_columns(list(range(nonzero, m.cols)))


def determinant(rows: Sequence[Sequence[int | Fraction]]) -> Fraction:
    """Exact determinant: rows are cleared of denominators, then Bareiss
    fraction-free elimination runs on integers."""
    n = len(rows)
    scale = Fraction(1)
    a = []
    for row in rows:
        d = _common_denominator([row])
        scale /= d
        a.append([int(v * d) for v in row])
    sign = 1
    prev = 1
    for t in range(n - 1):
        if a[t][t] == 0:
            piv = next((i for i in range(t + 1, n) if a[i][t]), None)
            if piv is None:
                return Fraction(0)
            a[t], a[piv] = a[piv], a[t]
            sign = -sign
        p = a[t][t]
        for i in range(t + 1, n):
            ai = a[i]
            f = ai[t]
            at = a[t]
            for j in range(t + 1, n):
                ai[j] = (p * ai[j] - f * at[j]) // prev
            ai[t] = 0
        prev = p
    det = a[n - 1][n - 1] if n else 1
    return sign * det * scale


# ---------------------------------------------------------------------------
# dense linear algebra over a field (Q as Fraction, F_p as ints mod p)


class Field:
    """Arithmetic helper for Q (``char == 0``) or F_p."""

    def __init__(self, char: int):
        self.char = check_characteristic(char)

    def coerce(self, v):
        if self.char:
            if isinstance(v, Fraction):
                return v.numerator * pow(v.denominator, -1, self.char) % self.char
            return int(v) % self.char
        return Fraction(v)

    def inv(self, v):
        return pow(v, -1, self.char) if self.char else 1 / v

    def norm(self, v):
        return v % self.char if self.char else v


def rref(rows: Sequence[Sequence], char: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    F = Field(char)
    a = [[F.coerce(v) for v in row] for row in rows]
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = F.inv(a[r][c])
        a[r] = [F.norm(v * inv) for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [F.norm(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def field_rank(rows: Sequence[Sequence], char: int) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows, char)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, char: int) -> list[list]:
    """Basis (as vectors) of ``{x : rows @ x == 0}``."""
    F = Field(char)
    if not rows:
        return [[F.coerce(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, char)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [F.coerce(0)] * ncols
        v[f] = F.coerce(1)
        for row, pc in zip(red, pivots):
            v[pc] = F.norm(-row[f])
        basis.append(v)
    return basis


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], char: int = 0, ncols: int | None = None) -> list[list]:
    """Product of row-lists; pass ``ncols`` when ``b`` has no rows."""
    if ncols is None:
        ncols = len(b[0]) if b else 0
    if char:
        ia = [[int(v) % char for v in row] for row in a]
        ib = [[int(v) % char for v in row] for row in b]
        return [[v % char for v in row] for row in _int_matmul(ia, ib, ncols)]
    # rationals: clear denominators, multiply integers, divide back once
    da = _common_denominator(a)
    db = _common_denominator(b)
    ia = [[int(v * da) for v in row] for row in a]
    ib = [[int(v * db) for v in row] for row in b]
    den = da * db
    return [[Fraction(v, den) for v in row] for row in _int_matmul(ia, ib, ncols)]


def _common_denominator(a: Sequence[Sequence]) -> int:
    d = 1
    for row in a:
        for v in row:
            if isinstance(v, Fraction) and v.denominator != 1:
                d = d * v.denominator // gcd(d, v.denominator)
    return d


def _int_matmul(a: list[list[int]], b: list[list[int]], ncols: int) -> list[list[int]]:
    out = []
    for row in a:
        acc = [0] * ncols
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def inverse(a: Sequence[Sequence], char: int = 0) -> list[list]:
    """Inverse of a square matrix over the field; ``ValueError`` if singular."""
    n = len(a)
    F = Field(char)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug, char) if n else ([], [])
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [[F.norm(v) for v in row[n:]] for row in red[:n]]


def identity(n: int, char: int = 0) -> list[list]:
    F = Field(char)
    return [[F.coerce(int(i == j)) for j in range(n)] for i in range(n)]


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
