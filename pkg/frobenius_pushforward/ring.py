from dataclasses import dataclass
import re

from sympy import isprime

from frobenius_pushforward.exceptions import ValidationError


RESERVED_NAMES = ("u", "v", "z")

_VARIABLE = re.compile(r"^x(\d+)(?:\^(\d+))?$")
_INTEGER = re.compile(r"^\d+$")
_TERM = re.compile(r"[+-]?[^+-]+")


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool) or not isprime(self.p):
            raise ValidationError(f"p must be a prime, got {self.p!r}")


@dataclass(frozen=True)
class PolynomialRing:
    field: PrimeField
    names: tuple

    @classmethod
    def standard(cls, p, n):
        if n < 1:
            raise ValidationError(f"the ring needs at least one variable, got n={n}")
        return cls(PrimeField(p), tuple(f"x{i}" for i in range(1, n + 1)))

    @property
    def p(self):
        return self.field.p

    @property
    def ngens(self):
        return len(self.names)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"variable {name} is not in the ring {self.names}") from None

    def extend(self, *names):
        for name in names:
            if name in self.names:
                raise ValidationError(f"variable {name} already belongs to the ring")
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate variable names in {names}")
        return PolynomialRing(self.field, self.names + tuple(names))

    def contains(self, other):
        return self.field == other.field and self.names[:other.ngens] == other.names

    def zero(self):
        return SparsePoly(self, {})

    def one(self):
        return self.constant(1)

    def constant(self, value):
        return SparsePoly(self, {(0,) * self.ngens: value})

    def monomial(self, exponents, coefficient=1):
        return SparsePoly(self, {tuple(exponents): coefficient})

    def gen(self, name):
        exponents = [0] * self.ngens
        exponents[self.index(name)] = 1
        return self.monomial(exponents)


class SparsePoly:
    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring, terms=None):
        p = ring.p
        normalized = {}
        for exponents, coefficient in (terms or {}).items():
            exponents = tuple(exponents)
            if len(exponents) != ring.ngens or any(a < 0 for a in exponents):
                raise ValidationError(f"exponent tuple {exponents} does not fit {ring.names}")
            coefficient = (normalized.get(exponents, 0) + coefficient) % p
            if coefficient:
                normalized[exponents] = coefficient
            else:
                normalized.pop(exponents, None)
        self.ring = ring
        self._terms = normalized
        self._hash = None

    @classmethod
    def _trusted(cls, ring, terms):
        poly = cls.__new__(cls)
        poly.ring = ring
        poly._terms = terms
        poly._hash = None
        return poly

    @property
    def terms(self):
        return tuple(sorted(self._terms.items()))

    def __len__(self):
        return len(self._terms)

    @property
    def is_zero(self):
        return not self._terms

    @property
    def is_constant(self):
        return all(not any(a) for a in self._terms)

    @property
    def is_monomial(self):
        return len(self._terms) == 1

    def degree(self):
        if not self._terms:
            return -1
        return max(sum(a) for a in self._terms)

    def at_origin(self):
        return self._terms.get((0,) * self.ring.ngens, 0)

    def zero_like(self):
        return self.ring.zero()

    def one_like(self):
        return self.ring.one()

    def _check_ring(self, other):
        if other.ring != self.ring:
            raise ValidationError(f"ring mismatch: {self.ring.names} over F_{self.ring.p} "
                                  f"vs {other.ring.names} over F_{other.ring.p}")

    def _coerce(self, other):
        if isinstance(other, SparsePoly):
            self._check_ring(other)
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        terms = dict(self._terms)
        for exponents, coefficient in other._terms.items():
            total = (terms.get(exponents, 0) + coefficient) % p
            if total:
                terms[exponents] = total
            else:
                terms.pop(exponents, None)
        return SparsePoly._trusted(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return SparsePoly._trusted(self.ring, {a: p - c for a, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return poly_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent):
        return poly_pow(self, exponent)

    def scale(self, value):
        p = self.ring.p
        value %= p
        if not value:
            return self.ring.zero()
        return SparsePoly._trusted(self.ring, {a: (c * value) % p for a, c in self._terms.items()})

    def shift(self, exponents):
        """Multiply by the monomial x^exponents."""
        return SparsePoly._trusted(
            self.ring,
            {tuple(a + b for a, b in zip(term, exponents)): c for term, c in self._terms.items()}
        )

    def embed(self, ring):
        if not ring.contains(self.ring):
            raise ValidationError(f"cannot embed {self.ring.names} into {ring.names}")
        pad = (0,) * (ring.ngens - self.ring.ngens)
        return SparsePoly._trusted(ring, {a + pad: c for a, c in self._terms.items()})

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"SparsePoly({format_poly(self)!r}, p={self.ring.p})"


def poly_mul(a, b):
    a._check_ring(b)
    if a.is_zero or b.is_zero:
        return a.ring.zero()
    p = a.ring.p
    terms = {}
    for ea, ca in a._terms.items():
        for eb, cb in b._terms.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            terms[key] = (terms.get(key, 0) + ca * cb) % p
    return SparsePoly._trusted(a.ring, {k: c for k, c in terms.items() if c})


def poly_pow(a, m):
    if m < 0:
        raise ValidationError(f"negative exponent {m}")
    result = a.ring.one()
    base = a
    while m:
        if m & 1:
            result = poly_mul(result, base)
        m >>= 1
        if m:
            base = poly_mul(base, base)
    return result


def format_poly(poly):
    if poly.is_zero:
        return "0"
    names = poly.ring.names
    pieces = []
    for exponents, coefficient in reversed(poly.terms):
        factors = []
        for name, power in zip(names, exponents):
            if power == 1:
                factors.append(name)
            elif power > 1:
                factors.append(f"{name}^{power}")
        if coefficient != 1 or not factors:
            factors.insert(0, str(coefficient))
        pieces.append("*".join(factors))
    return " + ".join(pieces)


def max_variable_index(text):
    indices = [int(i) for i in re.findall(r"x(\d+)", text)]
    return max(indices, default=1)


def parse_poly(text, p, n=None, ring=None):
    if ring is None:
        if n is None:
            n = max_variable_index(text)
        ring = PolynomialRing.standard(p, n)
    compact = re.sub(r"\s+", "", text or "")
    if not compact:
        raise ValidationError("empty polynomial")
    matched = _TERM.findall(compact)
    if "".join(matched) != compact:
        raise ValidationError(f"syntax error in {text!r}")
    terms = {}
    for raw in matched:
        sign = -1 if raw.startswith("-") else 1
        body = raw.lstrip("+-")
        coefficient = sign
        exponents = [0] * ring.ngens
        for factor in body.split("*"):
            if _INTEGER.match(factor):
                coefficient *= int(factor)
                continue
            name, caret, power = factor.partition("^")
            if name in RESERVED_NAMES:
                if name not in ring.names or (caret and not _INTEGER.match(power)):
                    raise ValidationError(f"variable {name} is reserved for the f+uv / f+z^2 constructions")
                exponents[ring.names.index(name)] += int(power or 1)
                continue
            match = _VARIABLE.match(factor)
            if not match:
                raise ValidationError(f"syntax error near {factor!r} in {text!r}")
            index = int(match.group(1))
            if not 1 <= index <= ring.ngens or ring.names[index - 1] != f"x{index}":
                raise ValidationError(f"variable x{index} out of range 1..{ring.ngens}")
            exponents[index - 1] += int(match.group(2) or 1)
        key = tuple(exponents)
        terms[key] = terms.get(key, 0) + coefficient
    return SparsePoly(ring, terms)
