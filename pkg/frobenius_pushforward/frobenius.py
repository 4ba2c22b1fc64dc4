from dataclasses import dataclass
from math import comb
import logging

from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.ring import PolynomialRing, SparsePoly, parse_poly, poly_pow


# direct construction of M(f^k) is used while f^k has at most this many terms
DIRECT_TERM_LIMIT = 64


# x^a with 0 <= a_i < q, numbered in mixed radix with x1 least significant
@dataclass(frozen=True)
class FrobBasis:
    p: int
    e: int
    n: int

    def __post_init__(self):
        if self.e < 1:
            raise ValidationError(f"e must be at least 1, got {self.e}")
        if self.n < 1:
            raise ValidationError(f"n must be at least 1, got {self.n}")

    @property
    def q(self):
        return self.p ** self.e

    @property
    def size(self):
        return self.q ** self.n

    def __len__(self):
        return self.size

    def index(self, exponents):
        q = self.q
        if len(exponents) != self.n or any(not 0 <= a < q for a in exponents):
            raise ValidationError(f"{tuple(exponents)} is not a basis exponent for q={q}, n={self.n}")
        index = 0
        for a in reversed(exponents):
            index = index * q + a
        return index

    def exponents(self, index):
        if not 0 <= index < self.size:
            raise ValidationError(f"basis index {index} out of range 0..{self.size - 1}")
        digits = []
        for _ in range(self.n):
            index, digit = divmod(index, self.q)
            digits.append(digit)
        return tuple(digits)

    def __iter__(self):
        for index in range(self.size):
            yield self.exponents(index)

    def check_ring(self, ring):
        if ring.p != self.p or ring.ngens != self.n:
            raise ValidationError(f"basis over F_{self.p} in {self.n} variables does not match "
                                  f"ring {ring.names} over F_{ring.p}")


class PolyMatrix:
    # _columns[j] maps row indices to the nonzero entries of column j
    __slots__ = ("ring", "rows", "cols", "_columns")

    def __init__(self, ring, rows, cols, entries=None):
        if rows < 1 or cols < 1:
            raise ValidationError(f"matrix dimensions must be positive, got {rows}x{cols}")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self._columns = {}
        if isinstance(entries, dict):
            entries = entries.items()
        for (i, j), value in entries or ():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValidationError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            if isinstance(value, int):
                value = ring.constant(value)
            if value.ring != ring:
                raise ValidationError("matrix entry from a different ring")
            if not value.is_zero:
                self._columns.setdefault(j, {})[i] = value

    @classmethod
    def _from_columns(cls, ring, rows, cols, columns):
        matrix = cls.__new__(cls)
        matrix.ring = ring
        matrix.rows = rows
        matrix.cols = cols
        matrix._columns = {j: col for j, col in columns.items() if col}
        return matrix

    @classmethod
    def zero(cls, ring, rows, cols=None):
        return cls._from_columns(ring, rows, rows if cols is None else cols, {})

    @classmethod
    def scalar(cls, ring, size, value):
        if isinstance(value, int):
            value = ring.constant(value)
        if value.is_zero:
            return cls.zero(ring, size)
        return cls._from_columns(ring, size, size, {j: {j: value} for j in range(size)})

    @classmethod
    def identity(cls, ring, size):
        return cls.scalar(ring, size, ring.one())

    @classmethod
    def from_rows(cls, ring, rows):
        entries = {}
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                entries[(i, j)] = value
        return cls(ring, len(rows), len(rows[0]), entries)

    @classmethod
    def block(cls, ring, grid):
        row_sizes = []
        for block_row in grid:
            sizes = {block.rows for block in block_row if block is not None}
            if len(sizes) != 1:
                raise ValidationError("every block row needs one consistent height")
            row_sizes.append(sizes.pop())
        col_sizes = []
        for m in range(len(grid[0])):
            sizes = {block_row[m].cols for block_row in grid if block_row[m] is not None}
            if len(sizes) != 1:
                raise ValidationError("every block column needs one consistent width")
            col_sizes.append(sizes.pop())
        columns = {}
        row_offset = 0
        for k, block_row in enumerate(grid):
            col_offset = 0
            for m, block in enumerate(block_row):
                if block is not None:
                    if block.ring != ring:
                        raise ValidationError("block from a different ring")
                    for j, column in block._columns.items():
                        target = columns.setdefault(col_offset + j, {})
                        for i, value in column.items():
                            target[row_offset + i] = value
                col_offset += col_sizes[m]
            row_offset += row_sizes[k]
        return cls._from_columns(ring, sum(row_sizes), sum(col_sizes), columns)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self):
        return self.rows == self.cols

    @property
    def is_zero(self):
        return not self._columns

    def nnz(self):
        return sum(len(column) for column in self._columns.values())

    def get(self, i, j):
        value = self._columns.get(j, {}).get(i)
        return value if value is not None else self.ring.zero()

    def column(self, j):
        return dict(sorted(self._columns.get(j, {}).items()))

    def entries(self):
        for j in sorted(self._columns):
            for i in sorted(self._columns[j]):
                yield i, j, self._columns[j][i]

    def to_rows(self):
        return [[self.get(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def to_dict(self):
        report = {}
        report["rows"] = self.rows
        report["cols"] = self.cols
        report["entries"] = [[i, j, str(entry)] for i, j, entry in self.entries()]
        return report

    @classmethod
    def from_dict(cls, ring, data):
        entries = {(i, j): parse_poly(text, ring.p, ring=ring) for i, j, text in data["entries"]}
        return cls(ring, data["rows"], data["cols"], entries)

    def zero_like(self):
        return PolyMatrix.zero(self.ring, self.rows, self.cols)

    def one_like(self):
        if not self.is_square:
            raise ValidationError("identity requires a square matrix")
        return PolyMatrix.identity(self.ring, self.rows)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.ring == other.ring and self.shape == other.shape
                and self._columns == other._columns)

    def __hash__(self):
        return hash((self.ring, self.shape, tuple(self.entries())))

    def _check_compatible(self, other):
        if self.ring != other.ring:
            raise ValidationError("matrices over different rings")

    def __add__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check_compatible(other)
        if self.shape != other.shape:
            raise ValidationError(f"cannot add {self.shape} and {other.shape} matrices")
        columns = {j: dict(column) for j, column in self._columns.items()}
        for j, column in other._columns.items():
            target = columns.setdefault(j, {})
            for i, value in column.items():
                total = target[i] + value if i in target else value
                if total.is_zero:
                    target.pop(i, None)
                else:
                    target[i] = total
        return PolyMatrix._from_columns(self.ring, self.rows, self.cols, columns)

    def __neg__(self):
        columns = {j: {i: -value for i, value in column.items()} for j, column in self._columns.items()}
        return PolyMatrix._from_columns(self.ring, self.rows, self.cols, columns)

    def __sub__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, value):
        if isinstance(value, int):
            value = self.ring.constant(value)
        if value.is_zero:
            return self.zero_like()
        columns = {}
        for j, column in self._columns.items():
            scaled = {i: entry * value for i, entry in column.items()}
            columns[j] = {i: entry for i, entry in scaled.items() if not entry.is_zero}
        return PolyMatrix._from_columns(self.ring, self.rows, self.cols, columns)

    def matmul(self, other):
        self._check_compatible(other)
        if self.cols != other.rows:
            raise ValidationError(f"cannot multiply {self.shape} by {other.shape}")
        columns = {}
        for j, other_column in other._columns.items():
            accumulated = {}
            for l, right in other_column.items():
                for i, left in self._columns.get(l, {}).items():
                    product = left * right
                    accumulated[i] = accumulated[i] + product if i in accumulated else product
            columns[j] = {i: value for i, value in accumulated.items() if not value.is_zero}
        return PolyMatrix._from_columns(self.ring, self.rows, other.cols, columns)

    def __matmul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.matmul(other)

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            return self.matmul(other)
        if isinstance(other, (SparsePoly, int)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (SparsePoly, int)):
            return self.scale(other)
        return NotImplemented

    def power(self, exponent):
        if not self.is_square:
            raise ValidationError("only square matrices have powers")
        if exponent < 0:
            raise ValidationError(f"negative matrix power {exponent}")
        result = self.one_like()
        base = self
        while exponent:
            if exponent & 1:
                result = result.matmul(base)
            exponent >>= 1
            if exponent:
                base = base.matmul(base)
        return result

    def direct_sum(self, other):
        self._check_compatible(other)
        columns = {j: dict(column) for j, column in self._columns.items()}
        for j, column in other._columns.items():
            columns[self.cols + j] = {self.rows + i: value for i, value in column.items()}
        return PolyMatrix._from_columns(self.ring, self.rows + other.rows, self.cols + other.cols, columns)

    def at_origin(self):
        constants = {}
        for i, j, value in self.entries():
            c = value.at_origin()
            if c:
                constants[(i, j)] = c
        return constants

    def embed(self, ring):
        columns = {j: {i: value.embed(ring) for i, value in column.items()}
                   for j, column in self._columns.items()}
        return PolyMatrix._from_columns(ring, self.rows, self.cols, columns)

    def is_scalar(self, value):
        if not self.is_square:
            return False
        return self == PolyMatrix.scalar(self.ring, self.rows, value)

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}, nnz={self.nnz()}, ring={self.ring.names})"


def frobenius_decompose(g, basis):
    """The g_i with g = sum_i g_i^q x^i, keyed by basis index; zeros omitted."""
    basis.check_ring(g.ring)
    q = basis.q
    buckets = {}
    for exponents, coefficient in g.terms:
        index = 0
        place = 1
        quotient = []
        for a in exponents:
            high, low = divmod(a, q)
            quotient.append(high)
            index += low * place
            place *= q
        # c^q = c in F_p, so the coefficient passes through unchanged
        buckets.setdefault(index, {})[tuple(quotient)] = coefficient
    return {index: SparsePoly(g.ring, terms) for index, terms in sorted(buckets.items())}


def matrix_of_relations(f, basis):
    """M_S(f, e): column j is the decomposition of x^j * f."""
    basis.check_ring(f.ring)
    columns = {}
    for j, exponents in enumerate(basis):
        columns[j] = frobenius_decompose(f.shift(exponents), basis)
    return PolyMatrix._from_columns(f.ring, basis.size, basis.size, columns)


def direct_is_cheaper(f, k):
    if f.is_monomial or f.is_zero or k == 1:
        return True
    return comb(len(f) + k - 1, k) <= DIRECT_TERM_LIMIT


def matrix_power(f, k, basis):
    if k < 1:
        raise ValidationError(f"power must be at least 1, got {k}")
    if direct_is_cheaper(f, k):
        logging.debug(f"M(f^{k}) by direct construction, r_e={basis.size}")
        return matrix_of_relations(poly_pow(f, k), basis)
    logging.debug(f"M(f^{k}) by repeated multiplication, r_e={basis.size}")
    return matrix_of_relations(f, basis).power(k)


def matrix_powers(f, basis, top):
    powers = [PolyMatrix.identity(f.ring, basis.size)]
    if top < 1:
        return powers
    if f.is_monomial:
        for k in range(1, top + 1):
            powers.append(matrix_of_relations(poly_pow(f, k), basis))
        return powers
    base = matrix_of_relations(f, basis)
    powers.append(base)
    for _ in range(2, top + 1):
        powers.append(powers[-1].matmul(base))
    return powers


def block_assemble(coefficients, basis, variable=None):
    """M_L(g, e) for g = g_0 + g_1 y + ... + g_d y^d with L = S[y], from the M_S(g_k, e).

    Block (k, m) is A_{k-m} when 0 <= k-m <= d and y * A_{k-m+q} when k < m
    and k-m+q <= d; everything else is zero.
    """
    if not coefficients:
        raise ValidationError("need at least the coefficient g_0")
    q = basis.q
    d = len(coefficients) - 1
    if d >= q:
        raise ValidationError(f"degree {d} in the new variable must be below q={q}")
    small = coefficients[0].ring
    variable = variable or f"x{small.ngens + 1}"
    large = small.extend(variable)
    y = large.gen(variable)
    blocks = [matrix_of_relations(g, basis).embed(large) for g in coefficients]
    zero = PolyMatrix.zero(large, basis.size)
    grid = []
    for k in range(q):
        block_row = []
        for m in range(q):
            if 0 <= k - m <= d:
                block_row.append(blocks[k - m])
            elif k < m and k - m + q <= d:
                block_row.append(blocks[k - m + q].scale(y))
            else:
                block_row.append(zero)
        grid.append(block_row)
    return PolyMatrix.block(large, grid)


def split_last_variable(g):
    large = g.ring
    if large.ngens < 2:
        raise ValidationError("need at least two variables to split off the last one")
    small = PolynomialRing(large.field, large.names[:-1])
    buckets = {}
    for exponents, coefficient in g.terms:
        buckets.setdefault(exponents[-1], {})[exponents[:-1]] = coefficient
    degree = max(buckets, default=0)
    return [SparsePoly(small, buckets.get(s, {})) for s in range(degree + 1)]
