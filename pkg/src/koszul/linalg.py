"""Exact sparse linear algebra over prime fields, the rationals, and the integers.

Everything here is exact: prime-field scalars are ints reduced mod p,
rational scalars are fractions.Fraction, integer scalars are unbounded ints.
No floating point anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


def is_prime(n: int) -> bool:
    """
    >>> [k for k in range(2, 20) if is_prime(k)]
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Coefficients:
    """Ground coefficients: a prime field F_p, the rationals Q, or the integers Z."""

    kind: str  # "prime_field" | "rationals" | "integers"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("prime_field", "rationals", "integers"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "prime_field":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"prime field needs a prime, got {self.p!r}")
        elif self.p is not None:
            raise ValueError("p only makes sense for prime fields")

    @classmethod
    def prime_field(cls, p: int) -> "Coefficients":
        return cls("prime_field", p)

    @classmethod
    def rationals(cls) -> "Coefficients":
        return cls("rationals")

    @classmethod
    def integers(cls) -> "Coefficients":
        return cls("integers")

    @property
    def is_field(self) -> bool:
        return self.kind != "integers"

    def normalize(self, x):
        """Bring a scalar to canonical form (0..p-1, Fraction, or int)."""
        if self.kind == "prime_field":
            return int(x) % self.p
        if self.kind == "rationals":
            return x if isinstance(x, Fraction) else Fraction(x)
        return int(x)

    def add(self, a, b):
        c = a + b
        return c % self.p if self.kind == "prime_field" else c

    def mul(self, a, b):
        c = a * b
        return c % self.p if self.kind == "prime_field" else c

    def neg(self, a):
        return (-a) % self.p if self.kind == "prime_field" else -a

    def inv(self, a):
        if self.kind == "prime_field":
            return pow(int(a), -1, self.p)
        if self.kind == "rationals":
            return Fraction(1) / a
        raise ValueError("no inverses over the integers")

    @property
    def zero(self):
        return Fraction(0) if self.kind == "rationals" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "rationals" else 1

    def __str__(self):
        if self.kind == "prime_field":
            return f"F{self.p}"
        return "Q" if self.kind == "rationals" else "Z"


class Matrix:
    """Sparse exact matrix: entries keyed by (row, col), zeros never stored.

    Shape is explicit so zero matrices of every shape are distinguishable.
    Columns index the source basis, rows the target basis.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        self.rows = rows
        self.cols = cols
        self.entries = {} if entries is None else dict(entries)

    @classmethod
    def from_rows(cls, data) -> "Matrix":
        """
        >>> Matrix.from_rows([[1, 0], [0, 2]]).entries
        {(0, 0): 1, (1, 1): 2}
        """
        m = cls(len(data), len(data[0]) if data else 0)
        for i, row in enumerate(data):
            for j, v in enumerate(row):
                if v:
                    m.entries[(i, j)] = v
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def set(self, i: int, j: int, v) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
        if v:
            self.entries[(i, j)] = v
        else:
            self.entries.pop((i, j), None)

    def get(self, i: int, j: int):
        return self.entries.get((i, j), 0)

    def column(self, j: int) -> dict:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def columns(self) -> list[dict]:
        cols = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def compose(self, other: "Matrix", coeffs: Coefficients) -> "Matrix":
        """self @ other, i.e. apply other first."""
        if other.rows != self.cols:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} after {other.rows}x{other.cols}")
        by_row: dict[int, dict] = {}
        for (i, j), v in self.entries.items():
            by_row.setdefault(i, {})[j] = v
        out = Matrix(self.rows, other.cols)
        other_cols = other.columns()
        for j, col in enumerate(other_cols):
            if not col:
                continue
            for i, row in by_row.items():
                acc = coeffs.zero
                for k, v in col.items():
                    w = row.get(k)
                    if w is not None:
                        acc = acc + w * v
                acc = coeffs.normalize(acc)
                if acc:
                    out.entries[(i, j)] = acc
        return out

    def scaled(self, c) -> "Matrix":
        if not c:
            return Matrix(self.rows, self.cols)
        return Matrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def to_rows(self) -> list[list]:
        data = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            data[i][j] = v
        return data

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {len(self.entries)} entries)"


def matrix_vector(m: Matrix, vec: dict, coeffs: Coefficients) -> dict:
    """Apply m to a sparse column vector; result is sparse and normalized."""
    out: dict[int, object] = {}
    for (i, j), w in m.entries.items():
        x = vec.get(j)
        if x:
            out[i] = out.get(i, coeffs.zero) + w * x
    return {i: coeffs.normalize(v) for i, v in out.items() if coeffs.normalize(v)}


def _vec_axpy(coeffs: Coefficients, v: dict, c, w: dict) -> dict:
    """v + c*w on sparse dict vectors."""
    out = dict(v)
    for i, x in w.items():
        y = coeffs.normalize(out.get(i, coeffs.zero) + c * x)
        if y:
            out[i] = y
        else:
            out.pop(i, None)
    return out


class VectorSpan:
    """Incrementally built echelon basis of a subspace of k^n (field coefficients).

    Each stored pivot row remembers how it was assembled from the inserted
    vectors, so reducing against the span also yields coordinates; that is
    what homology-class coordinates and quotient normal forms run on.
    """

    def __init__(self, coeffs: Coefficients):
        if not coeffs.is_field:
            raise ValueError("VectorSpan needs field coefficients")
        self.coeffs = coeffs
        self.pivots: dict[int, tuple[dict, dict]] = {}  # pivot col -> (row, combo)
        self.n_inserted = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: dict) -> tuple[dict, dict]:
        """Return (residual, combo) with v = residual + sum combo[k] * inserted_k."""
        c = self.coeffs
        v = {i: c.normalize(x) for i, x in v.items() if c.normalize(x)}
        combo: dict[int, object] = {}
        while True:
            hit = None
            for i in v:
                if i in self.pivots:
                    hit = i if hit is None or i < hit else hit
            if hit is None:
                return v, combo
            row, rcombo = self.pivots[hit]
            factor = v[hit]  # pivot rows are normalized to leading coefficient 1
            v = _vec_axpy(c, v, c.neg(factor), row)
            combo = _vec_axpy(c, combo, factor, rcombo)

    def insert(self, v: dict) -> bool:
        """Adjoin v; True if it enlarged the span."""
        idx = self.n_inserted
        self.n_inserted += 1
        residual, combo = self.reduce(v)
        if not residual:
            return False
        lead = min(residual)
        c = self.coeffs
        scale = c.inv(residual[lead])
        row = {i: c.mul(scale, x) for i, x in residual.items()}
        rcombo = {k: c.mul(c.neg(scale), x) for k, x in combo.items()}
        rcombo[idx] = scale  # residual = v - combo terms, so flip the combo sign
        self.pivots[lead] = (row, rcombo)
        return True

    def contains(self, v: dict) -> bool:
        residual, _ = self.reduce(v)
        return not residual


def rank_over_field(m: Matrix, coeffs: Coefficients) -> int:
    """Rank by sparse Gaussian elimination; rejects integer coefficients.

    >>> rank_over_field(Matrix.from_rows([[1, 1], [1, 1]]), Coefficients.prime_field(2))
    1
    """
    if not coeffs.is_field:
        raise ValueError("rank over a field only; use smith_normal_form over Z")
    span = VectorSpan(coeffs)
    for col in m.columns():
        span.insert(col)
    return span.rank


def kernel_basis(m: Matrix, coeffs: Coefficients) -> list[dict]:
    """Basis of ker(m) by column reduction of [m; I] (independent of rank_over_field).

    Columns whose m-part reduces to zero leave kernel vectors in the I-part.
    """
    if not coeffs.is_field:
        raise ValueError("kernel basis over a field only")
    c = coeffs
    work = []  # (m-part, bookkeeping part) column pairs
    for j, col in enumerate(m.columns()):
        work.append(({i: c.normalize(v) for i, v in col.items() if c.normalize(v)}, {j: c.one}))
    kernel = []
    lead_of: dict[int, int] = {}  # pivot row -> index into work
    for idx in range(len(work)):
        top, book = work[idx]
        while top:
            lead = min(top)
            owner = lead_of.get(lead)
            if owner is None:
                break
            otop, obook = work[owner]
            factor = c.neg(c.mul(top[lead], c.inv(otop[lead])))
            top = _vec_axpy(c, top, factor, otop)
            book = _vec_axpy(c, book, factor, obook)
        work[idx] = (top, book)
        if top:
            lead_of[min(top)] = idx
        else:
            kernel.append(book)
    return kernel


def nullity(m: Matrix, coeffs: Coefficients) -> int:
    return len(kernel_basis(m, coeffs))


def image_span(m: Matrix, coeffs: Coefficients) -> VectorSpan:
    span = VectorSpan(coeffs)
    for col in m.columns():
        span.insert(col)
    return span


# ---------------------------------------------------------------------------
# integer matrices: Smith normal form and lattice arithmetic


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for row in a:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(m: Matrix) -> tuple[int, ...]:
    """Positive invariant factors d_1 | d_2 | ... of an integer matrix.

    >>> smith_normal_form(Matrix.from_rows([[2, 0], [0, 3]]))
    (1, 6)
    >>> smith_normal_form(Matrix(3, 2))
    ()
    """
    raw, _, _ = smith_with_transforms(m, need_transforms=False)
    # enforce the divisibility chain via gcd/lcm swaps (valid on a diagonal)
    diag = list(raw)
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            x, y = diag[i], diag[i + 1]
            if y % x:
                g = gcd(x, y)
                diag[i], diag[i + 1] = g, x * y // g
                changed = True
    diag.sort()
    return tuple(diag)


def smith_with_transforms(m: Matrix, need_transforms: bool = True):
    """Diagonalize over Z: returns (raw, S, T) with S*m*T = diag(raw, then zeros).

    raw holds the positive diagonal entries in matrix order, not yet forced
    into a divisibility chain; S and T are unimodular.  Exact big-integer
    arithmetic throughout; a dense working copy is fine at the bidegree sizes
    this engine meets.
    """
    rows, cols = m.rows, m.cols
    a = m.to_rows()
    for i, row in enumerate(a):
        for v in row:
            if not isinstance(v, int):
                raise ValueError("integer matrix required")
    s = [[int(i == j) for j in range(rows)] for i in range(rows)] if need_transforms else None
    t = [[int(i == j) for j in range(cols)] for i in range(cols)] if need_transforms else None

    def row_op(i, j, c):  # row_i += c*row_j
        ai, aj = a[i], a[j]
        for k in range(cols):
            ai[k] += c * aj[k]
        if s is not None:
            si, sj = s[i], s[j]
            for k in range(rows):
                si[k] += c * sj[k]

    def col_op(i, j, c):  # col_i += c*col_j
        for row in a:
            row[i] += c * row[j]
        if t is not None:
            for row in t:
                row[i] += c * row[j]

    k = 0
    limit = min(rows, cols)
    while k < limit:
        # smallest nonzero entry of the remaining block becomes the pivot
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                v = a[i][j]
                if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        if i != k:
            _swap_rows(a, k, i)
            if s is not None:
                _swap_rows(s, k, i)
        if j != k:
            _swap_cols(a, k, j)
            if t is not None:
                _swap_cols(t, k, j)
        dirty = False
        for i in range(k + 1, rows):
            if a[i][k]:
                q = a[i][k] // a[k][k]
                row_op(i, k, -q)
                if a[i][k]:
                    dirty = True
        for j in range(k + 1, cols):
            if a[k][j]:
                q = a[k][j] // a[k][k]
                col_op(j, k, -q)
                if a[k][j]:
                    dirty = True
        if dirty:
            continue  # remainders survive, pick a smaller pivot next pass
        if a[k][k] < 0:
            for jj in range(cols):
                a[k][jj] = -a[k][jj]
            if s is not None:
                for jj in range(rows):
                    s[k][jj] = -s[k][jj]
        k += 1

    raw = tuple(a[i][i] for i in range(min(rows, cols)) if a[i][i])
    smat = Matrix.from_rows(s) if s is not None else None
    tmat = Matrix.from_rows(t) if t is not None else None
    return raw, smat, tmat


def rational_rank(m: Matrix) -> int:
    q = Coefficients.rationals()
    lifted = Matrix(m.rows, m.cols, {k: Fraction(v) for k, v in m.entries.items()})
    return rank_over_field(lifted, q)


def integer_kernel_basis(m: Matrix) -> list[dict]:
    """Lattice basis of the integer kernel (columns of T past the rank)."""
    d, _, t = smith_with_transforms(m)
    r = len(d)
    out = []
    for j in range(r, m.cols):
        col = t.column(j)
        if col:
            out.append(col)
    return out


class IntegerLattice:
    """The column lattice of an integer matrix, with exact membership tests."""

    def __init__(self, m: Matrix):
        self.m = m
        self.d, self.s, self.t = smith_with_transforms(m)

    @property
    def rank(self) -> int:
        return len(self.d)

    def contains(self, v: dict) -> bool:
        """x in col-lattice(m) iff S*x is divisible by the invariant factors."""
        sx = [0] * self.m.rows
        for (i, j), w in self.s.entries.items():
            x = v.get(j)
            if x:
                sx[i] += w * x
        for i, val in enumerate(sx):
            if i < len(self.d):
                if val % self.d[i]:
                    return False
            elif val:
                return False
        return True

    def basis_columns(self) -> list[dict]:
        """A lattice basis: the first rank columns of m*T."""
        prod = self.m.compose(self.t, Coefficients.integers())
        return [prod.column(j) for j in range(self.rank)]


def cokernel_invariants(m: Matrix) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion factors > 1) of Z^rows / column-lattice(m).

    >>> cokernel_invariants(Matrix.from_rows([[9]]))
    (0, (9,))
    """
    d = smith_normal_form(m)
    free = m.rows - len(d)
    return free, tuple(v for v in d if v > 1)


def lattice_quotient_invariants(a: Matrix, b: Matrix) -> tuple[int, tuple[int, ...]]:
    """Invariants of col-lattice(a) / col-lattice(b); requires col(b) inside col(a)."""
    if a.rows != b.rows:
        raise ValueError("ambient ranks differ")
    lat = IntegerLattice(a)
    r = lat.rank
    # coordinates of b's columns in the lattice basis: rows of S*b scaled by 1/d_i
    sb = lat.s.compose(b, Coefficients.integers())
    coords = Matrix(r, b.cols)
    for (i, j), v in sb.entries.items():
        if i < r:
            if v % lat.d[i]:
                raise ValueError("second lattice is not contained in the first")
            coords.set(i, j, v // lat.d[i])
        elif v:
            raise ValueError("second lattice is not contained in the first")
    dd = smith_normal_form(coords)
    return r - len(dd), tuple(v for v in dd if v > 1)
