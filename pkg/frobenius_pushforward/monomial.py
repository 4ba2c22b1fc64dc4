from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from math import prod
import logging

from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.frobenius import FrobBasis, matrix_power
from frobenius_pushforward.helpers import run_tasks
from frobenius_pushforward.ring import PolynomialRing


@dataclass(frozen=True)
class MonomialData:
    dvec: tuple

    def __post_init__(self):
        dvec = tuple(self.dvec)
        if not dvec:
            raise ValidationError("a monomial needs at least one exponent")
        if any(not isinstance(d, int) or d < 1 for d in dvec):
            raise ValidationError(f"exponents must be positive integers, got {dvec}")
        object.__setattr__(self, "dvec", dvec)

    @property
    def n(self):
        return len(self.dvec)

    @property
    def d(self):
        return max(self.dvec)

    def gamma(self):
        return list(product(*(range(d + 1) for d in self.dvec)))

    def contains(self, c):
        return len(c) == self.n and all(0 <= a <= d for a, d in zip(c, self.dvec))


def monomial_poly(md, p):
    return PolynomialRing.standard(p, md.n).monomial(md.dvec)


def dvec_of(f):
    if not f.is_monomial or f.is_constant:
        return None
    (exponents, _), = f.terms
    return tuple(a for a in exponents if a)


def _eta_factor(k, c, d, q):
    gap = abs(c * q - k * d)
    return q - gap if gap < q else 0


def eta(k, c, md, q):
    """Multiplicity of x^c on the diagonal of M(f^k, e)."""
    if not md.contains(c):
        raise ValidationError(f"label {tuple(c)} lies outside the box of {md.dvec}")
    if not 1 <= k <= q - 1:
        raise ValidationError(f"k must lie in 1..{q - 1}, got {k}")
    return prod(_eta_factor(k, c_j, d_j, q) for c_j, d_j in zip(c, md.dvec))


def diagonalize_monomial_matrix(matrix):
    if not matrix.is_square:
        raise ValidationError(f"expected a square matrix, got {matrix.shape}")
    seen_rows = set()
    diagonal = Counter()
    for j in range(matrix.cols):
        column = matrix.column(j)
        if len(column) != 1:
            raise ValidationError(f"column {j} has {len(column)} nonzero entries")
        (i, entry), = column.items()
        if i in seen_rows:
            raise ValidationError(f"row {i} has more than one nonzero entry")
        if not entry.is_monomial:
            raise ValidationError(f"entry ({i}, {j}) = {entry} is not a monomial")
        seen_rows.add(i)
        (exponents, _), = entry.terms
        diagonal[exponents] += 1
    return diagonal


def free_rank_formula(md, q, k):
    """prod_j max(0, q - d_j (q - k)): the free rank of F_*^e(S/f^k) over S/f."""
    if not 1 <= k <= q - 1:
        raise ValidationError(f"k must lie in 1..{q - 1}, got {k}")
    return prod(max(0, q - d * (q - k)) for d in md.dvec)


@dataclass
class DecompositionReport:
    q: int
    e: int
    free_rank: int
    summands: dict = field(default_factory=dict)
    threshold_ok: bool = True

    def to_dict(self):
        report = {}
        report["q"] = self.q
        report["e"] = self.e
        report["free_rank"] = self.free_rank
        report["summands"] = [{"c": list(c), "multiplicity": m} for c, m in sorted(self.summands.items())]
        report["threshold_ok"] = self.threshold_ok
        return report


def _oracle_counts(md, p, e, workers):
    basis = FrobBasis(p, e, md.n)
    f = monomial_poly(md, p)

    def diagonal(k):
        return diagonalize_monomial_matrix(matrix_power(f, k, basis))

    return run_tasks(diagonal, range(1, basis.q), workers, message="diagonalizing M(f^k)")


def decomposition_report(md, p, e, workers=1):
    # labels 0 and d only give free summands; below q > max d_j + 1 the counts come from diagonalizing
    q = p ** e
    n = md.n
    trivial = {(0,) * n, md.dvec}
    threshold_ok = q > md.d + 1
    if threshold_ok:
        per_k = [{c: eta(k, c, md, q) for c in md.gamma()} for k in range(1, q)]
    else:
        logging.info(f"q={q} is not above max d + 1 = {md.d + 1}, diagonalizing M(f^k) instead")
        per_k = _oracle_counts(md, p, e, workers)
    free_rank = q ** n
    summands = Counter()
    for counts in per_k:
        for c, multiplicity in counts.items():
            if not multiplicity:
                continue
            if c in trivial:
                free_rank += multiplicity
            else:
                summands[c] += multiplicity
    return DecompositionReport(q, e, free_rank, dict(summands), threshold_ok)


def ffrt_witness(md, p, e_max):
    """Every label x^c that shows up in some M(f^k, e) with e <= e_max."""
    if e_max < 1:
        raise ValidationError(f"e_max must be at least 1, got {e_max}")
    labels = set()
    gamma = md.gamma()
    for e in range(1, e_max + 1):
        q = p ** e
        for k in range(1, q):
            labels.update(c for c in gamma if eta(k, c, md, q) > 0)
    return labels
