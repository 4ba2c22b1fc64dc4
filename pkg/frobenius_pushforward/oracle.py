from itertools import product
from math import comb

from sympy import GF, Symbol
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.ring import SparsePoly


def decompose_by_exponents(g, basis):
    """Brute-force twin of ``frobenius_decompose``: match every term against every basis monomial."""
    q = basis.q
    n = g.ring.ngens
    if n != basis.n or g.ring.p != basis.p:
        raise ValidationError("polynomial and basis disagree on the ring")
    coordinates = {}
    for a, coefficient in g.terms:
        for b in product(range(q), repeat=n):
            if all(x >= y and (x - y) % q == 0 for x, y in zip(a, b)):
                index = sum(y * q ** i for i, y in enumerate(b))
                quotient = tuple((x - y) // q for x, y in zip(a, b))
                coordinates.setdefault(index, {})[quotient] = coefficient
                break
    return {index: SparsePoly(g.ring, terms) for index, terms in sorted(coordinates.items())}


def fedder_membership(dvec, p, e):
    """True when (x^dvec + z^2)^{q-1} lies in (x1^q, ..., xn^q, z^q)."""
    if p == 2:
        raise ValidationError("the f + z^2 test needs an odd characteristic")
    q = p ** e
    for j in range(q):
        if comb(q - 1, j) % p == 0:
            continue
        in_ideal = any(d * j >= q for d in dvec) or 2 * (q - 1 - j) >= q
        if not in_ideal:
            return False
    return True


def _to_domain(poly, domain):
    return domain.ring.from_dict(dict(poly.terms))


def _from_domain(element, ring):
    p = ring.p
    if element:
        element = element.monic()
    return SparsePoly(ring, {tuple(exponents): int(c) % p for exponents, c in element.terms()})


def invariant_factors_univariate(matrix):
    ring = matrix.ring
    if ring.ngens != 1:
        raise ValidationError(f"invariant factors need a univariate ring, got {ring.names}")
    domain = GF(ring.p)[Symbol(ring.names[0])]
    rows = [[_to_domain(entry, domain) for entry in row] for row in matrix.to_rows()]
    factors = invariant_factors(DomainMatrix(rows, matrix.shape, domain))
    return [_from_domain(factor, ring) for factor in factors]
