"""Exact sparse linear algebra over the rationals.

Rank uses fraction-free elimination on integer rows (each row is cleared of
denominators first and kept primitive by dividing out its content).  Solving
and kernels use reduced row echelon form over ``Fraction``; the matrices that
need them here are small enough for that.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


class DimensionError(ValueError):
    pass


class SparseRationalMatrix:
    """A rows x cols matrix stored as a dict (row, col) -> nonzero Fraction."""

    def __init__(self, rows: int, cols: int, entries=()):
        self.rows = rows
        self.cols = cols
        data = {}
        self._data = data
        if isinstance(entries, dict):
            entries = [(r, c, v) for (r, c), v in entries.items()]
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if (r, c) in data:
                raise DimensionError(f"duplicate entry ({r}, {c})")
            v = Fraction(v)
            if v:
                data[(r, c)] = v

    @classmethod
    def from_columns(cls, rows: int, columns):
        """Build from a list of sparse columns, each a dict row -> value."""
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    entries[(i, j)] = Fraction(v)
        return cls(rows, len(columns), entries)

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        entries = {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(len(rows), ncols, entries)

    @property
    def entries(self):
        return sorted((r, c, v) for (r, c), v in self._data.items())

    @property
    def nnz(self) -> int:
        return len(self._data)

    def get(self, r, c):
        return self._data.get((r, c), Fraction(0))

    def to_dense(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._data.items():
            out[r][c] = v
        return out

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self._data.items():
            rows[r][c] = v
        return rows

    def transpose(self):
        return SparseRationalMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self._data.items()})

    def matvec(self, x):
        if len(x) != self.cols:
            raise DimensionError("vector length does not match column count")
        out = [Fraction(0)] * self.rows
        for (r, c), v in self._data.items():
            if x[c]:
                out[r] += v * x[c]
        return out

    def __matmul__(self, other: "SparseRationalMatrix"):
        if self.cols != other.rows:
            raise DimensionError("inner dimensions differ")
        by_row = {}
        for (k, c), v in other._data.items():
            by_row.setdefault(k, []).append((c, v))
        acc = {}
        for (r, k), v in self._data.items():
            for c, w in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseRationalMatrix(self.rows, other.cols, {k: v for k, v in acc.items() if v})

    def is_zero(self) -> bool:
        return not self._data

    def __eq__(self, other):
        return (
            isinstance(other, SparseRationalMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self._data == other._data
        )

    def __repr__(self):
        return f"SparseRationalMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    # -- file format: header "rows cols nnz", then "row col p/q" sorted

    def dumps(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        for r, c, v in self.entries:
            lines.append(f"{r} {c} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix file")
        rows, cols, nnz = (int(x) for x in lines[0].split())
        entries = []
        for ln in lines[1:]:
            r, c, v = ln.split()
            entries.append((int(r), int(c), Fraction(v)))
        if len(entries) != nnz:
            raise ValueError(f"matrix file declares {nnz} entries, found {len(entries)}")
        return cls(rows, cols, entries)


# ---------------------------------------------------------------------------
# rank by fraction-free elimination


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _integer_rows(M: SparseRationalMatrix):
    rows = []
    for row in M.row_dicts():
        if not row:
            continue
        den = lcm(*(v.denominator for v in row.values()))
        rows.append(_primitive({c: int(v * den) for c, v in row.items()}))
    return rows


def rank(M: SparseRationalMatrix) -> int:
    """Exact rank over Q."""
    rows = _integer_rows(M)
    # sparsest rows first keeps fill-in down
    rows.sort(key=lambda r: (len(r), min(r)))
    pivots = {}
    for row in rows:
        while row:
            hits = [c for c in row if c in pivots]
            if not hits:
                break
            c = min(hits)
            prow = pivots[c]
            a, b = prow[c], row[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            new = {k: a * v for k, v in row.items()}
            for k, v in prow.items():
                w = new.get(k, 0) - b * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            row = _primitive(new)
        if row:
            pivots[min(row)] = row
    return len(pivots)


# ---------------------------------------------------------------------------
# reduced row echelon form over Fraction


def _rref(rows, ncols):
    """Reduce sparse Fraction rows to {pivot col: row with 1 at pivot}.

    Rows may carry an extra column index ``ncols`` (augmented part); it is
    never chosen as a pivot.  Returns ``(pivots, consistent)``.
    """
    pivots = {}
    consistent = True
    for row in rows:
        row = dict(row)
        for c in sorted(c for c in row if c in pivots):
            if c not in row:
                continue
            f = row[c]
            for k, v in pivots[c].items():
                w = row.get(k, 0) - f * v
                if w:
                    row[k] = w
                else:
                    row.pop(k, None)
        # fill-in only appears in columns without pivots, so one pass suffices
        free = [c for c in row if c < ncols]
        if not free:
            if row:
                consistent = False
            continue
        p = min(free)
        inv = 1 / row[p]
        row = {k: v * inv for k, v in row.items()}
        for prow in pivots.values():
            f = prow.get(p)
            if f:
                for k, v in row.items():
                    w = prow.get(k, 0) - f * v
                    if w:
                        prow[k] = w
                    else:
                        prow.pop(k, None)
        pivots[p] = row
    return pivots, consistent


def solve(M: SparseRationalMatrix, b):
    """Some exact x with M x = b, or None when the system is inconsistent."""
    b = [Fraction(v) for v in b]
    if len(b) != M.rows:
        raise DimensionError("right-hand side length does not match row count")
    rows = M.row_dicts()
    for i, v in enumerate(b):
        if v:
            rows[i][M.cols] = v
    piv, consistent = _rref(rows, M.cols)
    if not consistent:
        return None
    x = [Fraction(0)] * M.cols
    for p, row in piv.items():
        x[p] = row.get(M.cols, Fraction(0))
    return x


def kernel_basis(M: SparseRationalMatrix):
    """A basis of {x : M x = 0}, one dense vector per free column."""
    piv, _ = _rref(M.row_dicts(), M.cols)
    free = [c for c in range(M.cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for p, row in piv.items():
            if f in row:
                v[p] = -row[f]
        basis.append(v)
    return basis
