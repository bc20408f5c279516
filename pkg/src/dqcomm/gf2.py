"""Bit matrices over GF(2).

Rows are stored as Python ints: bit ``j`` of ``rows[i]`` is entry (i, j).
A CNOT circuit on n qubits acts on basis states as x -> M x, and a CNOT with
control c and target t adds row c into row t of the current matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput, NotInvertible


@dataclass(frozen=True)
class F2Matrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise InvalidInput("row count mismatch")
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise InvalidInput("row has bits outside the column range")

    # construction

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> "F2Matrix":
        ncols = nrows if ncols is None else ncols
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_array(cls, a) -> "F2Matrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise InvalidInput("expected a 2-d array")
        if not np.all((a == 0) | (a == 1)):
            raise InvalidInput("entries must be 0 or 1")
        rows = tuple(sum(1 << j for j in range(a.shape[1]) if a[i, j]) for i in range(a.shape[0]))
        return cls(a.shape[0], a.shape[1], rows)

    @classmethod
    def from_rows(cls, rows: Sequence[int], ncols: int) -> "F2Matrix":
        return cls(len(rows), ncols, tuple(int(r) for r in rows))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "F2Matrix":
        """Matrix P with (P x)_i = x_{perm[i]}."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise InvalidInput("not a permutation")
        return cls(n, n, tuple(1 << p for p in perm))

    # access

    def __getitem__(self, ij) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def to_lists(self) -> list[list[int]]:
        return self.to_array().tolist()

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def transpose(self) -> "F2Matrix":
        rows = []
        for j in range(self.ncols):
            rows.append(sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)))
        return F2Matrix(self.ncols, self.nrows, tuple(rows))

    def apply(self, x: int) -> int:
        """M x for a column vector packed into an int (bit j = x_j)."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= (bin(r & x).count("1") & 1) << i
        return out

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise InvalidInput("shape mismatch in product")
        rows = []
        for r in self.rows:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= other.rows[j]
                r >>= 1
                j += 1
            rows.append(acc)
        return F2Matrix(self.nrows, other.ncols, tuple(rows))

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "F2Matrix":
        rows = list(rows)
        cols = list(cols)
        out = []
        for i in rows:
            r = self.rows[i]
            out.append(sum(((r >> c) & 1) << j for j, c in enumerate(cols)))
        return F2Matrix(len(rows), len(cols), tuple(out))

    def with_row_added(self, target: int, source: int) -> "F2Matrix":
        """Row target += row source, i.e. the effect of appending CNOT(source -> target)."""
        rows = list(self.rows)
        rows[target] ^= rows[source]
        return F2Matrix(self.nrows, self.ncols, tuple(rows))

    def is_lower_unitriangular(self) -> bool:
        return self.is_square and all(r >> i == 1 for i, r in enumerate(self.rows))

    def is_upper_triangular(self) -> bool:
        return self.is_square and all(r & ((1 << i) - 1) == 0 for i, r in enumerate(self.rows))

    def is_invertible(self) -> bool:
        return self.is_square and f2_rank(self) == self.nrows

    def inverse(self) -> "F2Matrix":
        if not self.is_square:
            raise NotInvertible("non-square matrix")
        n = self.nrows
        a = list(self.rows)
        inv = [1 << i for i in range(n)]
        for col in range(n):
            piv = next((i for i in range(col, n) if (a[i] >> col) & 1), None)
            if piv is None:
                raise NotInvertible("matrix is singular over GF(2)")
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            for i in range(n):
                if i != col and (a[i] >> col) & 1:
                    a[i] ^= a[col]
                    inv[i] ^= inv[col]
        return F2Matrix(n, n, tuple(inv))


def f2_rank(m: F2Matrix) -> int:
    rows = [r for r in m.rows if r]
    rank = 0
    while rows:
        pivot = rows.pop()
        if not pivot:
            continue
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
        rows = [r for r in rows if r]
        rank += 1
    return rank


def f2_plu(m: F2Matrix) -> tuple[list[int], F2Matrix, F2Matrix]:
    """Factor m = P L U over GF(2).

    Returns ``(perm, L, U)`` where P = F2Matrix.permutation(perm), L is unit
    lower-triangular and U is upper-triangular with unit diagonal.
    """
    if not m.is_square:
        raise NotInvertible("PLU needs a square matrix")
    n = m.nrows
    a = list(m.rows)
    order = list(range(n))  # a[i] currently holds original row order[i]
    low = [0] * n  # multipliers below the diagonal, same row order as a
    for col in range(n):
        piv = next((i for i in range(col, n) if (a[i] >> col) & 1), None)
        if piv is None:
            raise NotInvertible("matrix is singular over GF(2)")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            order[col], order[piv] = order[piv], order[col]
            low[col], low[piv] = low[piv], low[col]
        for i in range(col + 1, n):
            if (a[i] >> col) & 1:
                a[i] ^= a[col]
                low[i] |= 1 << col
    lmat = F2Matrix(n, n, tuple(low[i] | (1 << i) for i in range(n)))
    umat = F2Matrix(n, n, tuple(a))
    # rows of (L U) are original rows order[i]; so m = P (L U) with (P y)_order[i] = y_i
    perm = [0] * n
    for i, o in enumerate(order):
        perm[o] = i
    return perm, lmat, umat


def f2_random(n: int, rng: np.random.Generator, ncols: int | None = None) -> F2Matrix:
    ncols = n if ncols is None else ncols
    bits = rng.integers(0, 2, size=(n, ncols), dtype=np.uint8)
    return F2Matrix.from_array(bits)


def f2_random_invertible(n: int, seed: int | np.random.Generator | None = None) -> F2Matrix:
    """Rejection-sample a uniform matrix until it is invertible."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    rng = np.random.default_rng(seed)
    while True:
        m = f2_random(n, rng)
        if f2_rank(m) == n:
            return m


def f2_local_synth(m: F2Matrix) -> list[tuple[int, int]]:
    """CNOT list (control, target) in time order whose matrix is m.

    Gauss-Jordan elimination with row additions only, so at most n^2 gates.
    """
    if not m.is_square:
        raise InvalidInput("need a square matrix")
    n = m.nrows
    a = list(m.rows)
    ops: list[tuple[int, int]] = []

    def add(target: int, source: int):
        a[target] ^= a[source]
        ops.append((source, target))

    for col in range(n):
        if not (a[col] >> col) & 1:
            src = next((i for i in range(col + 1, n) if (a[i] >> col) & 1), None)
            if src is None:
                raise NotInvertible("matrix is singular over GF(2)")
            add(col, src)
        for i in range(n):
            if i != col and (a[i] >> col) & 1:
                add(i, col)
    # E_k ... E_1 m = I, so m = E_1 ... E_k and the first gate in time is E_k
    return ops[::-1]


def cnot_circuit_matrix(n: int, cnots: Iterable[tuple[int, int]]) -> F2Matrix:
    """Matrix of a CNOT list (control, target) applied in time order."""
    rows = [1 << i for i in range(n)]
    for c, t in cnots:
        if c == t:
            raise InvalidInput("CNOT control equals target")
        rows[t] ^= rows[c]
    return F2Matrix(n, n, tuple(rows))
