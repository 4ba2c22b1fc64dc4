from dataclasses import dataclass, field
from enum import Enum
import logging

from sympy import GF
from sympy.polys.matrices import DomainMatrix

from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.frobenius import PolyMatrix
from frobenius_pushforward.ring import PolynomialRing, PrimeField, parse_poly


class MatFac:
    __slots__ = ("phi", "psi", "f")

    def __init__(self, phi, psi, f, verify=True):
        if not (phi.is_square and psi.is_square) or phi.shape != psi.shape:
            raise ValidationError(f"a factorization needs two square matrices of one size, "
                                  f"got {phi.shape} and {psi.shape}")
        if f.ring != phi.ring:
            f = f.embed(phi.ring)
        self.phi = phi
        self.psi = psi
        self.f = f
        if verify and not verify_matfac(phi, psi, f):
            raise ValidationError(f"({phi!r}, {psi!r}) is not a matrix factorization of {f}")

    @property
    def ring(self):
        return self.phi.ring

    @property
    def size(self):
        return self.phi.rows

    def swap(self):
        return MatFac(self.psi, self.phi, self.f, verify=False)

    def to_dict(self):
        report = {}
        report["p"] = self.ring.p
        report["variables"] = list(self.ring.names)
        report["f"] = str(self.f)
        report["size"] = self.size
        report["phi"] = self.phi.to_dict()
        report["psi"] = self.psi.to_dict()
        return report

    @classmethod
    def from_dict(cls, data, verify=True):
        try:
            ring = PolynomialRing(PrimeField(data["p"]), tuple(data["variables"]))
            phi = PolyMatrix.from_dict(ring, data["phi"])
            psi = PolyMatrix.from_dict(ring, data["psi"])
            f = parse_poly(data["f"], ring.p, ring=ring)
        except (KeyError, TypeError) as e:
            raise ValidationError(f"malformed factorization record: {e}") from None
        return cls(phi, psi, f, verify=verify)

    def __eq__(self, other):
        if not isinstance(other, MatFac):
            return NotImplemented
        return (self.phi, self.psi, self.f) == (other.phi, other.psi, other.f)

    def __repr__(self):
        return f"MatFac(size={self.size}, f={self.f})"


@dataclass(frozen=True)
class SummandCount:
    t: int
    r: int
    size: int

    def __post_init__(self):
        if self.t < 0 or self.r < 0 or self.t + self.r > self.size:
            raise ValidationError(f"inconsistent summand count t={self.t}, r={self.r}, size={self.size}")

    @property
    def reduced_size(self):
        return self.size - self.t - self.r

    def __add__(self, other):
        return SummandCount(self.t + other.t, self.r + other.r, self.size + other.size)


def verify_matfac(phi, psi, f):
    if not (phi.is_square and psi.is_square) or phi.shape != psi.shape:
        raise ValidationError(f"size mismatch: {phi.shape} and {psi.shape}")
    if f.ring != phi.ring:
        f = f.embed(phi.ring)
    target = PolyMatrix.scalar(phi.ring, phi.rows, f)
    return phi.matmul(psi) == target and psi.matmul(phi) == target


def maltese(mf, verify=True):
    """([phi, -vI; uI, psi], [psi, vI; -uI, phi]), a factorization of f + uv."""
    ring = mf.ring.extend("u", "v")
    u, v = ring.gen("u"), ring.gen("v")
    phi, psi = mf.phi.embed(ring), mf.psi.embed(ring)
    n = mf.size
    phi_out = PolyMatrix.block(ring, [[phi, PolyMatrix.scalar(ring, n, -v)],
                                      [PolyMatrix.scalar(ring, n, u), psi]])
    psi_out = PolyMatrix.block(ring, [[psi, PolyMatrix.scalar(ring, n, v)],
                                      [PolyMatrix.scalar(ring, n, -u), phi]])
    return MatFac(phi_out, psi_out, mf.f.embed(ring) + u * v, verify=verify)


def sharp(mf, verify=True):
    """([phi, -zI; zI, psi], [psi, zI; -zI, phi]), a factorization of f + z^2."""
    if mf.ring.p == 2:
        raise ValidationError("the f + z^2 construction needs an odd characteristic")
    ring = mf.ring.extend("z")
    z = ring.gen("z")
    phi, psi = mf.phi.embed(ring), mf.psi.embed(ring)
    n = mf.size
    phi_out = PolyMatrix.block(ring, [[phi, PolyMatrix.scalar(ring, n, -z)],
                                      [PolyMatrix.scalar(ring, n, z), psi]])
    psi_out = PolyMatrix.block(ring, [[psi, PolyMatrix.scalar(ring, n, z)],
                                      [PolyMatrix.scalar(ring, n, -z), phi]])
    return MatFac(phi_out, psi_out, mf.f.embed(ring) + z * z, verify=verify)


def direct_sum(a, b):
    if a.ring != b.ring or a.f != b.f:
        raise ValidationError(f"cannot add factorizations of {a.f} and {b.f}")
    return MatFac(a.phi.direct_sum(b.phi), a.psi.direct_sum(b.psi), a.f, verify=False)


def rank_at_origin(matrix):
    constants = matrix.at_origin()
    if not constants:
        return 0
    domain = GF(matrix.ring.p)
    rows = {}
    for (i, j), c in constants.items():
        rows.setdefault(i, {})[j] = domain.convert(c)
    return DomainMatrix(rows, (matrix.rows, matrix.cols), domain).rank()


def trivial_summand_counts(mf):
    """(t, r): the copies of (f, 1) and (1, f) split off from mf over the local ring."""
    t = rank_at_origin(mf.psi)
    r = rank_at_origin(mf.phi)
    logging.debug(f"trivial summands of a size {mf.size} factorization: t={t}, r={r}")
    return SummandCount(t, r, mf.size)


class CompanionShape(Enum):
    CHAIN = "chain"
    EVEN = "even"
    ODD = "odd"
    SPLIT = "split"
    UV = "uv"


@dataclass
class EquivalenceCertificate:
    """left @ source @ right == reduced, with left and right built from ``ops``."""
    shape: CompanionShape
    size: int
    source: PolyMatrix
    left: PolyMatrix
    right: PolyMatrix
    reduced: PolyMatrix
    ops: list = field(default_factory=list)
    template: object = field(default=None, repr=False, compare=False)
    reduced_grid: list = field(default=None, repr=False, compare=False)

    def check(self):
        return self.left.matmul(self.source).matmul(self.right) == self.reduced

    def replay(self):
        left = _flatten(_identity_grid(self.template, self.size))
        right = left
        for op in self.ops:
            elementary = _flatten(_elementary_grid(self.template, self.size, op))
            if op[0].startswith("row"):
                left = elementary.matmul(left)
            else:
                right = right.matmul(elementary)
        return left, right

    def entry(self, i, j):
            return self.reduced_grid[i][j]


def _zero(template):
    return template.zero_like()


def _one(template):
    return template.one_like()


def _identity_grid(template, size):
    return [[_one(template) if i == j else _zero(template) for j in range(size)] for i in range(size)]


def _elementary_grid(template, size, op):
    kind = op[0]
    grid = _identity_grid(template, size)
    if kind == "row_add":
        _, target, source, factor = op
        grid[target][source] = -factor
    elif kind == "col_add":
        _, target, source, factor = op
        grid[source][target] = -factor
    elif kind == "row_perm":
        order = op[1]
        grid = [[_zero(template) for _ in range(size)] for _ in range(size)]
        for i, src in enumerate(order):
            grid[i][src] = _one(template)
    elif kind == "col_perm":
        order = op[1]
        grid = [[_zero(template) for _ in range(size)] for _ in range(size)]
        for j, src in enumerate(order):
            grid[src][j] = _one(template)
    return grid


def _flatten(grid):
    first = grid[0][0]
    if isinstance(first, PolyMatrix):
        return PolyMatrix.block(first.ring, grid)
    return PolyMatrix.from_rows(first.ring, grid)


def _power(b, exponent):
    result = b.one_like()
    for _ in range(exponent):
        result = result * b
    return result


def _signed_power(b, exponent):
    value = _power(b, exponent)
    return value if exponent % 2 == 1 else -value


def _check_element(value, template, name):
    if value is None:
        raise ValidationError(f"the shape needs the corner entry {name}")
    if type(value) is not type(template) or value.ring != template.ring:
        raise ValidationError(f"corner entry {name} is not in the ring of b")
    if isinstance(value, PolyMatrix) and value.shape != template.shape:
        raise ValidationError(f"corner block {name} has shape {value.shape}, expected {template.shape}")
    return value


def _as_shape(shape):
    try:
        return CompanionShape(shape)
    except ValueError:
        raise ValidationError(f"unsupported companion shape {shape!r}") from None


def _validate_shape(shape, size, k):
    shape = _as_shape(shape)
    if size < 2:
        raise ValidationError(f"companion reductions need size at least 2, got {size}")
    if shape is CompanionShape.EVEN and size % 2:
        raise ValidationError(f"the even shape needs an even size, got {size}")
    if shape is CompanionShape.ODD and size % 2 == 0:
        raise ValidationError(f"the odd shape needs an odd size, got {size}")
    if shape is CompanionShape.SPLIT and (k is None or not 1 <= k <= size - 1):
        raise ValidationError(f"the split shape needs 1 <= k <= {size - 1}, got k={k}")
    return shape


def companion_matrix(b, size, shape, k=None, x=None, y=None, u=None, v=None, uv=None):
    """The matrix a reduction of ``shape`` starts from, as a grid of ring elements.

    chain: b on the diagonal, 1 on the subdiagonal.
    even/odd: b on the diagonal, 1 on the second subdiagonal; even has x at
    (0, n-1), odd has x at (0, n-2) and y at (1, n-1).
    split: the chain with u in place of the 1 at (k, k-1) and v at (0, n-1).
    uv: the chain with uv at (0, n-1).
    """
    shape = _validate_shape(shape, size, k)
    grid = _identity_grid(b, size)
    for i in range(size):
        grid[i][i] = b
    offset = 2 if shape in (CompanionShape.EVEN, CompanionShape.ODD) else 1
    for i in range(size - offset):
        grid[i + offset][i] = _one(b)
    if shape is CompanionShape.EVEN:
        grid[0][size - 1] = _check_element(x, b, "x")
    elif shape is CompanionShape.ODD:
        grid[0][size - 2] = _check_element(x, b, "x")
        grid[1][size - 1] = _check_element(y, b, "y")
    elif shape is CompanionShape.SPLIT:
        grid[k][k - 1] = _check_element(u, b, "u")
        grid[0][size - 1] = _check_element(v, b, "v")
    elif shape is CompanionShape.UV:
        grid[0][size - 1] = _check_element(uv, b, "uv")
    return grid


class _Reduction:
    # working matrix with the accumulated left and right transforms

    def __init__(self, grid, template):
        self.size = len(grid)
        self.work = [list(row) for row in grid]
        self.left = _identity_grid(template, self.size)
        self.right = _identity_grid(template, self.size)
        self.ops = []

    def row_add(self, target, source, factor):
        # row_target -= factor * row_source
        if factor.is_zero:
            return
        for matrix in (self.work, self.left):
            source_row = matrix[source]
            target_row = matrix[target]
            for c in range(self.size):
                if not source_row[c].is_zero:
                    target_row[c] = target_row[c] - factor * source_row[c]
        self.ops.append(("row_add", target, source, factor))

    def col_add(self, target, source, factor):
        if factor.is_zero:
            return
        for matrix in (self.work, self.right):
            for row in matrix:
                if not row[source].is_zero:
                    row[target] = row[target] - row[source] * factor
        self.ops.append(("col_add", target, source, factor))

    def row_perm(self, order):
        self.work = [self.work[i] for i in order]
        self.left = [self.left[i] for i in order]
        self.ops.append(("row_perm", tuple(order)))

    def col_perm(self, order):
        self.work = [[row[j] for j in order] for row in self.work]
        self.right = [[row[j] for j in order] for row in self.right]
        self.ops.append(("col_perm", tuple(order)))

    def eliminate_chain(self, indices):
        for j in range(len(indices) - 1):
            pivot_row, pivot_col = indices[j + 1], indices[j]
            for r in indices[:j + 1]:
                self.row_add(r, pivot_row, self.work[r][pivot_col])
            for c in indices[j + 1:]:
                self.col_add(c, pivot_col, self.work[pivot_row][c])


def _expected(b, size, shape, k, corners):
    grid = [[_zero(b) for _ in range(size)] for _ in range(size)]
    one = _one(b)
    if shape is CompanionShape.CHAIN:
        for i in range(size - 1):
            grid[i + 1][i] = one
        grid[0][size - 1] = _signed_power(b, size)
    elif shape in (CompanionShape.EVEN, CompanionShape.ODD):
        for i in range(size - 2):
            grid[i + 2][i] = one
        m = size // 2
        if shape is CompanionShape.EVEN:
            grid[0][size - 2] = _signed_power(b, m)
            grid[1][size - 1] = _signed_power(b, m)
            grid[0][size - 1] = corners["x"]
        else:
            grid[0][size - 1] = _signed_power(b, m + 1)
            grid[1][size - 2] = _signed_power(b, m)
            grid[0][size - 2] = corners["x"]
            grid[1][size - 1] = corners["y"]
    elif shape is CompanionShape.SPLIT:
        for i in range(size - 2):
            grid[i][i] = one
        grid[size - 2][size - 2] = _signed_power(b, k)
        grid[size - 2][size - 1] = corners["v"]
        grid[size - 1][size - 2] = corners["u"]
        grid[size - 1][size - 1] = _signed_power(b, size - k)
    else:
        for i in range(size - 2):
            grid[i][i] = one
        grid[size - 2][size - 2] = _signed_power(b, size - 1)
        grid[size - 2][size - 1] = corners["uv"]
        grid[size - 1][size - 2] = one
        grid[size - 1][size - 1] = b
    return grid


def companion_reduce(b, size, shape, k=None, x=None, y=None, u=None, v=None, uv=None):
    shape = _as_shape(shape)
    grid = companion_matrix(b, size, shape, k=k, x=x, y=y, u=u, v=v, uv=uv)
    reduction = _Reduction(grid, b)
    if shape is CompanionShape.CHAIN:
        reduction.eliminate_chain(list(range(size)))
    elif shape in (CompanionShape.EVEN, CompanionShape.ODD):
        reduction.eliminate_chain(list(range(0, size, 2)))
        reduction.eliminate_chain(list(range(1, size, 2)))
    elif shape is CompanionShape.SPLIT:
        reduction.eliminate_chain(list(range(k)))
        reduction.eliminate_chain(list(range(k, size)))
        rows = list(range(1, k)) + list(range(k + 1, size))
        reduction.row_perm(rows + [0, k])
        reduction.col_perm([r - 1 for r in rows] + [k - 1, size - 1])
    else:
        reduction.eliminate_chain(list(range(size - 1)))
        rows = list(range(1, size - 1))
        reduction.row_perm(rows + [0, size - 1])
        reduction.col_perm([r - 1 for r in rows] + [size - 2, size - 1])

    corners = {"x": x, "y": y, "u": u, "v": v, "uv": uv}
    expected = _flatten(_expected(b, size, shape, k, corners))
    reduced = _flatten(reduction.work)
    if reduced != expected:
        raise ArithmeticError(f"{shape.value} reduction of size {size} missed its normal form")
    logging.debug(f"{shape.value} reduction of size {size} used {len(reduction.ops)} operations")
    certificate = EquivalenceCertificate(
        shape=shape,
        size=size,
        source=_flatten(grid),
        left=_flatten(reduction.left),
        right=_flatten(reduction.right),
        reduced=reduced,
        ops=reduction.ops,
        template=b,
        reduced_grid=reduction.work,
    )
    return certificate
