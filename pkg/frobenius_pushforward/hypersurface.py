from dataclasses import dataclass, field
import logging

from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.frobenius import PolyMatrix, block_assemble, matrix_power, matrix_powers
from frobenius_pushforward.helpers import run_tasks
from frobenius_pushforward.matfac import (
    CompanionShape, MatFac, companion_matrix, companion_reduce, maltese, rank_at_origin, sharp,
    trivial_summand_counts
)


def _check_nonunit(f):
    if f.is_zero or f.is_constant:
        raise ValidationError(f"f must be a nonzero non-unit, got {f}")


def _check_odd(basis):
    if basis.p == 2:
        raise ValidationError("the f + z^2 presentation needs an odd characteristic")


def _check_k(k, q, low=1):
    if not low <= k <= q - 1:
        raise ValidationError(f"k must lie in {low}..{q - 1}, got {k}")


def presentation_fk(f, k, basis, verify=True):
    """(M(f^k, e), M(f^{q-k}, e)), the factorization of f whose cokernel is F_*^e(S/f^k)."""
    basis.check_ring(f.ring)
    _check_k(k, basis.q)
    return MatFac(matrix_power(f, k, basis), matrix_power(f, basis.q - k, basis), f, verify=verify)


def free_rank_fk(f, k, basis):
    basis.check_ring(f.ring)
    _check_k(k, basis.q)
    return rank_at_origin(matrix_power(f, basis.q - k, basis))


@dataclass
class UVBlock:
    k: int
    matfac: MatFac
    t: int
    r: int

    @property
    def size(self):
        return self.matfac.size


@dataclass
class UVDecomposition:
    q: int
    r_e: int
    blocks: list = field(default_factory=list)

    @property
    def free_rank_part(self):
        return self.r_e

    @property
    def free_rank_total(self):
        return self.r_e + sum(block.t for block in self.blocks)

    def to_dict(self):
        return {
            "q": self.q,
            "r_e": self.r_e,
            "blocks": [{"k": b.k, "t": b.t, "r": b.r, "size": b.size} for b in self.blocks],
            "free_rank_total": self.free_rank_total,
        }


def uv_decomposition(f, basis, verify=True):
    basis.check_ring(f.ring)
    _check_nonunit(f)
    q = basis.q
    powers = matrix_powers(f, basis, q - 1)
    decomposition = UVDecomposition(q=q, r_e=basis.size)
    for k in range(1, q):
        presentation = MatFac(powers[k], powers[q - k], f, verify=verify)
        block = maltese(presentation, verify=verify)
        counts = trivial_summand_counts(block)
        logging.info(f"B_{k}: size {block.size}, t={counts.t}, r={counts.r}")
        decomposition.blocks.append(UVBlock(k, block, counts.t, counts.r))
    return decomposition


def free_rank_uv(f, basis, workers=1):
    """r_e + 2 * sum_k rank(M(f^{q-k}, e) at the origin)."""
    basis.check_ring(f.ring)
    _check_nonunit(f)
    q = basis.q
    powers = matrix_powers(f, basis, q - 1)
    # k runs over 1..q-1, so q-k does too
    ranks = run_tasks(rank_at_origin, powers[1:q], workers, message="ranks of M(f^j) at the origin")
    logging.debug(f"free ranks of F_*^e(S/f^k): {list(reversed(ranks))}")
    return basis.size + 2 * sum(ranks)


@dataclass
class Z2Presentation:
    q: int
    matfac: MatFac

    @property
    def size(self):
        return self.matfac.size


def z2_presentation(f, basis, verify=True):
    basis.check_ring(f.ring)
    _check_odd(basis)
    _check_nonunit(f)
    q = basis.q
    low = matrix_power(f, (q - 1) // 2, basis)
    high = matrix_power(f, (q + 1) // 2, basis)
    return Z2Presentation(q, sharp(MatFac(low, high, f, verify=verify), verify=verify))


def free_rank_z2(f, basis):
    """rank(A^{(q-1)/2}) + rank(A^{(q+1)/2}) at the origin."""
    basis.check_ring(f.ring)
    _check_odd(basis)
    _check_nonunit(f)
    q = basis.q
    return (rank_at_origin(matrix_power(f, (q - 1) // 2, basis))
            + rank_at_origin(matrix_power(f, (q + 1) // 2, basis)))


def _uv_corners(f, basis):
    ring = f.ring.extend("u", "v")
    size = basis.size
    a = matrix_power(f, 1, basis).embed(ring)
    u = PolyMatrix.scalar(ring, size, ring.gen("u"))
    v = PolyMatrix.scalar(ring, size, ring.gen("v"))
    return a, u, v


def _uv_shape(k, q):
    if k == 0:
        return CompanionShape.UV, None
    return CompanionShape.SPLIT, q - k


def uv_graded_block(f, k, basis):
    # f + uv on the k-th graded piece of F_*^e(S[u,v]), as q x q blocks over M_{r_e}(S[u,v])
    basis.check_ring(f.ring)
    q = basis.q
    _check_k(k, q, low=0)
    a, u, v = _uv_corners(f, basis)
    shape, split = _uv_shape(k, q)
    if shape is CompanionShape.UV:
        grid = companion_matrix(a, q, shape, uv=u.matmul(v))
    else:
        grid = companion_matrix(a, q, shape, k=split, u=u, v=v)
    return PolyMatrix.block(a.ring, grid)


def certify_uv_block(f, k, basis):
    # core for k >= 1: [(-1)^{q-k+1} A^{q-k}, vI; uI, (-1)^{k+1} A^k]; for k = 0: [(-1)^q A^{q-1}, uvI; I, A]
    basis.check_ring(f.ring)
    q = basis.q
    _check_k(k, q, low=0)
    a, u, v = _uv_corners(f, basis)
    shape, split = _uv_shape(k, q)
    if shape is CompanionShape.UV:
        return companion_reduce(a, q, shape, uv=u.matmul(v))
    return companion_reduce(a, q, shape, k=split, u=u, v=v)


def certify_z2_presentation(f, basis):
    """M_T(f + z^2, e) over T = S[z], built by block assembly and reduced.

    The reduced form keeps zI at blocks (0, q-2) and (1, q-1) and carries
    +-A^{(q+1)/2} at (0, q-1) and +-A^{(q-1)/2} at (1, q-2).
    """
    basis.check_ring(f.ring)
    _check_odd(basis)
    _check_nonunit(f)
    small = f.ring
    assembled = block_assemble([f, small.zero(), small.one()], basis, variable="z")
    ring = assembled.ring
    a = matrix_power(f, 1, basis).embed(ring)
    z = PolyMatrix.scalar(ring, basis.size, ring.gen("z"))
    certificate = companion_reduce(a, basis.q, CompanionShape.ODD, x=z, y=z)
    if certificate.source != assembled:
        raise ArithmeticError("block assembly of f + z^2 does not match the odd companion shape")
    return certificate
