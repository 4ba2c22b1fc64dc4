from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, prod
import logging

from sympy import Poly, QQ, Rational, expand, symbols

from frobenius_pushforward.exceptions import ValidationError, check_resource_bound
from frobenius_pushforward.frobenius import FrobBasis
from frobenius_pushforward.helpers import run_tasks
from frobenius_pushforward.hypersurface import free_rank_uv, free_rank_z2
from frobenius_pushforward.monomial import dvec_of


TARGETS = ("uv", "z2")


@dataclass(frozen=True)
class WTable:
    n: int
    d: int
    dvec: tuple
    values: tuple

    def __getitem__(self, s):
        return self.values[s]


def _check_dvec(dvec):
    dvec = tuple(dvec)
    if not dvec:
        raise ValidationError("empty exponent vector")
    if any(d < 1 for d in dvec):
        raise ValidationError(f"exponents must be positive, got {dvec}")
    return dvec


def _w_direct(dvec, d):
    n = len(dvec)
    values = []
    for s in range(n + 1):
        total = 0
        for chosen in combinations(range(n), s):
            total += prod(d - dvec[j] if j in chosen else dvec[j] for j in range(n))
        values.append(total)
    return values


def _w_recurrence(dvec, d):
    values = [dvec[0], d - dvec[0]]
    for d_n in dvec[1:]:
        shifted = [0] + values
        values = values + [0]
        values = [(d - d_n) * shifted[j] + d_n * values[j] for j in range(len(values))]
    return values


def w_values(dvec):
    """W_0..W_n, with W_s summing prod(d - d_j) over s-subsets times the other d_j."""
    dvec = _check_dvec(dvec)
    d = max(dvec)
    direct = _w_direct(dvec, d)
    recurrence = _w_recurrence(dvec, d)
    if direct != recurrence:
        raise ArithmeticError(f"W table for {dvec} disagrees: {direct} vs {recurrence}")
    return WTable(len(dvec), d, dvec, tuple(direct))


def fsignature_uv_closed(dvec):
    table = w_values(dvec)
    n, d = table.n, table.d
    if table[n] != 0:
        raise ArithmeticError(f"W_{n} = {table[n]} should vanish for d = max d_j")
    total = sum(Fraction(table[j], n - j + 1) for j in range(n + 1))
    return Fraction(2, d ** (n + 1)) * total


def fsignature_z2_closed(dvec):
    dvec = _check_dvec(dvec)
    if all(d == 1 for d in dvec):
        return Fraction(1, 2 ** (len(dvec) - 1))
    return Fraction(0)


def signature_normalizer(target, q, n):
    if target == "uv":
        return q ** (n + 1)
    if target == "z2":
        return q ** n
    raise ValidationError(f"unknown target {target!r}, expected one of {TARGETS}")


def presentation_bound(target, q, n):
    return q ** (n + 2) if target == "uv" else q ** (n + 1)


def feasible_e_values(target, p, n, e_max, max_size):
    """1..e_max cut off before the first e whose presentation exceeds ``max_size``."""
    e_values = []
    for e in range(1, e_max + 1):
        if max_size is not None and presentation_bound(target, p ** e, n) > max_size:
            logging.warning(f"stopping the {target} sweep at e={e - 1}: e={e} exceeds max_size={max_size}")
            break
        e_values.append(e)
    return e_values


@dataclass
class SignatureReport:
    target: str
    p: int = None
    dvec: tuple = None
    closed_form: Fraction = None
    empirical: list = field(default_factory=list)

    def gaps(self):
        if self.closed_form is None:
            return []
        return [(e, abs(s - self.closed_form)) for e, s in self.empirical]

    def to_dict(self):
        report = {}
        report["target"] = self.target
        if self.p is not None:
            report["p"] = self.p
        if self.dvec is not None:
            report["dvec"] = list(self.dvec)
        if self.closed_form is not None:
            report["closed_form"] = str(self.closed_form)
        if self.empirical:
            gaps = dict(self.gaps())
            rows = []
            for e, s in self.empirical:
                row = {"e": e, "s": str(s)}
                if e in gaps:
                    row["gap"] = str(gaps[e])
                rows.append(row)
            report["empirical"] = rows
        return report


def closed_form(target, dvec):
    if target == "uv":
        return fsignature_uv_closed(dvec)
    if target == "z2":
        return fsignature_z2_closed(dvec)
    raise ValidationError(f"unknown target {target!r}, expected one of {TARGETS}")


def empirical_sequence(f, p, e_range, target, max_size=None, workers=1):
    """s_e = free rank of F_*^e(R) / q^dim for every e in ``e_range``."""
    if target not in TARGETS:
        raise ValidationError(f"unknown target {target!r}, expected one of {TARGETS}")
    if f.ring.p != p:
        raise ValidationError(f"f is over F_{f.ring.p}, not F_{p}")
    if target == "z2" and p == 2:
        raise ValidationError("the f + z^2 target needs an odd characteristic")
    if f.is_zero or f.is_constant:
        raise ValidationError(f"f must be a nonzero non-unit, got {f}")
    n = f.ring.ngens
    e_values = sorted(set(e_range))
    if not e_values or e_values[0] < 1:
        raise ValidationError(f"e values must be positive, got {e_values}")
    for e in e_values:
        check_resource_bound(presentation_bound(target, p ** e, n), max_size, what=f"presentation size at e={e}")

    def evaluate(e):
        basis = FrobBasis(p, e, n)
        if target == "uv":
            free_rank = free_rank_uv(f, basis)
        else:
            free_rank = free_rank_z2(f, basis)
        value = Fraction(free_rank, signature_normalizer(target, basis.q, n))
        logging.info(f"{target} free rank at p={p}, e={e}: {free_rank} (s_e = {value})")
        return value

    values = run_tasks(evaluate, e_values, workers, message="empirical F-signature terms")
    dvec = dvec_of(f)
    report = SignatureReport(target=target, p=p, dvec=dvec, empirical=list(zip(e_values, values)))
    if dvec:
        report.closed_form = closed_form(target, dvec)
    return report


@lru_cache(maxsize=None)
def bernoulli(j):
    # B_1 = -1/2
    if j < 0:
        raise ValidationError(f"no Bernoulli number of index {j}")
    if j == 0:
        return Fraction(1)
    return -sum(comb(j + 1, i) * bernoulli(i) for i in range(j)) / (j + 1)


def sum_powers(delta, s):
    if delta < 0 or s < 0:
        raise ValidationError(f"sum_powers needs non-negative arguments, got {delta}, {s}")
    total = sum((-1) ** j * comb(s + 1, j) * bernoulli(j) * delta ** (s + 1 - j) for j in range(s + 1))
    return Fraction(total) / (s + 1)


def expansion_check(dvec, u_values, r_degree_bound=None):
    """Expand prod_j (d_j r + q (d - d_j)/d + u_j) and check its shape.

    The coefficient of r^{n-j} q^j must be W_j / d^j, every other term
    r^c q^i must have c + i <= n - 1, and no power of r may exceed
    ``r_degree_bound`` (n by default).
    """
    table = w_values(dvec)
    n, d = table.n, table.d
    if len(u_values) != n:
        raise ValidationError(f"need {n} shifts u_j, got {len(u_values)}")
    bound = n if r_degree_bound is None else r_degree_bound
    r, q = symbols("r q")
    expression = 1
    for d_j, u_j in zip(table.dvec, u_values):
        u_j = Fraction(u_j)
        expression *= d_j * r + q * Rational(d - d_j, d) + Rational(u_j.numerator, u_j.denominator)
    polynomial = Poly(expand(expression), r, q, domain=QQ)
    for j in range(n + 1):
        expected = Rational(table[j], d ** j)
        if polynomial.coeff_monomial(r ** (n - j) * q ** j) != expected:
            logging.debug(f"coefficient of r^{n - j} q^{j} is not {expected}")
            return False
    for (power_r, power_q), _ in polynomial.terms():
        if power_r > bound:
            return False
        if power_r + power_q > n:
            return False
        if power_r + power_q == n:
            continue
        # residual g_c(q) for c = power_r has degree at most n - 1 - c
        if power_q > n - 1 - power_r:
            return False
    return True
