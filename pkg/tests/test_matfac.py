import json

import pytest

from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.frobenius import FrobBasis, PolyMatrix, matrix_power
from frobenius_pushforward.matfac import (
    CompanionShape, MatFac, SummandCount, companion_matrix, companion_reduce, direct_sum, maltese,
    rank_at_origin, sharp, trivial_summand_counts, verify_matfac
)
from frobenius_pushforward.ring import PolynomialRing, parse_poly, poly_pow


def one_by_one(poly):
    return PolyMatrix.from_rows(poly.ring, [[poly]])


def pair_for(text, p, k, e=1):
    f = parse_poly(text, p)
    basis = FrobBasis(p, e, f.ring.ngens)
    return f, matrix_power(f, k, basis), matrix_power(f, basis.q - k, basis)


def test_verify_pair_for_x():
    f, a2, a1 = pair_for("x1", 3, 2)
    assert verify_matfac(a2, a1, f)


def test_verify_trivial_pair():
    f = parse_poly("x1^2 + x1*x2", 3, 2)
    assert verify_matfac(one_by_one(f), one_by_one(f.ring.one()), f)


def test_verify_rejects_non_factorization():
    ring = PolynomialRing.standard(3, 2)
    x, y = ring.gen("x1"), ring.gen("x2")
    assert not verify_matfac(one_by_one(x), one_by_one(y), x * x)
    with pytest.raises(ValidationError):
        MatFac(one_by_one(x), one_by_one(y), x * x)


def test_verify_size_mismatch():
    ring = PolynomialRing.standard(3, 1)
    with pytest.raises(ValidationError):
        verify_matfac(PolyMatrix.identity(ring, 2), PolyMatrix.identity(ring, 3), ring.one())


def test_maltese_of_x_x():
    ring = PolynomialRing.standard(3, 1)
    x = ring.gen("x1")
    mf = maltese(MatFac(one_by_one(x), one_by_one(x), x * x))
    large = mf.ring
    x, u, v = large.gen("x1"), large.gen("u"), large.gen("v")
    assert mf.phi == PolyMatrix.from_rows(large, [[x, -v], [u, x]])
    assert mf.psi == PolyMatrix.from_rows(large, [[x, v], [-u, x]])
    assert mf.f == x * x + u * v
    assert verify_matfac(mf.phi, mf.psi, mf.f)


def test_maltese_needs_fresh_variables():
    ring = PolynomialRing.standard(3, 1)
    x = ring.gen("x1")
    mf = maltese(MatFac(one_by_one(x), one_by_one(x), x * x))
    with pytest.raises(ValidationError):
        maltese(mf)


def test_maltese_of_trivial_factorization():
    f = parse_poly("x1^2", 3)
    counts = trivial_summand_counts(maltese(MatFac(one_by_one(f), one_by_one(f.ring.one()), f)))
    assert (counts.t, counts.r) == (1, 1)


def test_maltese_distributes_over_sums():
    f, a1, a2 = pair_for("x1^2", 3, 1)
    first = MatFac(a1, a2, f)
    second = MatFac(a2, a1, f)
    summed = maltese(direct_sum(first, second))
    separate = direct_sum(maltese(first), maltese(second))
    assert verify_matfac(summed.phi, summed.psi, summed.f)
    assert trivial_summand_counts(summed) == trivial_summand_counts(separate)
    size = first.size
    perm = []
    for i in range(separate.size):
        if i < size:
            perm.append(i)
        elif i < 2 * size:
            perm.append(2 * size + i - size)
        elif i < 3 * size:
            perm.append(size + i - 2 * size)
        else:
            perm.append(i)
    for name in ("phi", "psi"):
        moved = {(perm[i], perm[j]): entry for i, j, entry in getattr(separate, name).entries()}
        assert PolyMatrix(summed.ring, summed.size, summed.size, moved) == getattr(summed, name)
    assert summed.f == separate.f


def test_sharp_of_x_x():
    ring = PolynomialRing.standard(3, 1)
    x = ring.gen("x1")
    mf = sharp(MatFac(one_by_one(x), one_by_one(x), x * x))
    z = mf.ring.gen("z")
    x = mf.ring.gen("x1")
    assert mf.phi.matmul(mf.psi) == PolyMatrix.scalar(mf.ring, 2, x * x + z * z)
    with pytest.raises(ValidationError):
        sharp(mf)


def test_sharp_needs_odd_characteristic():
    ring = PolynomialRing.standard(2, 1)
    x = ring.gen("x1")
    with pytest.raises(ValidationError):
        sharp(MatFac(one_by_one(x), one_by_one(x), x * x))


@pytest.mark.parametrize("text, p, e", [("x1^2 + x1*x2", 3, 1), ("x1^3", 5, 1), ("x1*x2", 3, 2)])
def test_constructions_preserve_factorizations(text, p, e):
    f = parse_poly(text, p)
    basis = FrobBasis(p, e, f.ring.ngens)
    for k in (1, basis.q - 1):
        mf = MatFac(matrix_power(f, k, basis), matrix_power(f, basis.q - k, basis), f)
        plus_uv = maltese(mf, verify=False)
        plus_z2 = sharp(mf, verify=False)
        assert verify_matfac(plus_uv.phi, plus_uv.psi, plus_uv.f)
        assert verify_matfac(plus_z2.phi, plus_z2.psi, plus_z2.f)


def test_direct_sum_of_trivial_factorizations():
    f = parse_poly("x1*x2", 3)
    one = f.ring.one()
    total = direct_sum(MatFac(one_by_one(f), one_by_one(one), f), MatFac(one_by_one(one), one_by_one(f), f))
    assert total.size == 2
    assert verify_matfac(total.phi, total.psi, f)
    assert trivial_summand_counts(total) == SummandCount(1, 1, 2)


def test_direct_sum_needs_same_f():
    ring = PolynomialRing.standard(3, 1)
    x = ring.gen("x1")
    with pytest.raises(ValidationError):
        direct_sum(MatFac(one_by_one(x), one_by_one(ring.one()), x),
                   MatFac(one_by_one(x), one_by_one(x), x * x))


def test_trivial_summand_counts():
    f = parse_poly("x1^2", 3)
    assert trivial_summand_counts(MatFac(one_by_one(f), one_by_one(f.ring.one()), f)) == SummandCount(1, 0, 1)
    _, a1, a2 = pair_for("x1^2", 3, 1)
    assert trivial_summand_counts(MatFac(a2, a1, f)) == SummandCount(1, 0, 3)
    assert trivial_summand_counts(MatFac(a1, a2, f)) == SummandCount(0, 1, 3)
    assert SummandCount(0, 1, 3).reduced_size == 2


def test_counts_add_over_direct_sums():
    f, a1, a2 = pair_for("x1^2 + x1*x2", 3, 1)
    first, second = MatFac(a1, a2, f), MatFac(a2, a1, f)
    assert trivial_summand_counts(direct_sum(first, second)) == \
        trivial_summand_counts(first) + trivial_summand_counts(second)


def elementary(ring, size, i, j, value):
    matrix = PolyMatrix.identity(ring, size)
    return matrix + PolyMatrix(ring, size, size, {(i, j): value})


def test_counts_are_equivalence_invariants(rng, random_poly):
    f, a1, a2 = pair_for("x1^2 + x1*x2", 3, 1)
    ring = f.ring
    size = a1.rows
    for _ in range(5):
        left = right = PolyMatrix.identity(ring, size)
        left_inverse = right_inverse = left
        for _ in range(4):
            i, j = rng.sample(range(size), 2)
            value = random_poly(ring, max_terms=2, max_degree=2)
            left = elementary(ring, size, i, j, value) @ left
            left_inverse = left_inverse @ elementary(ring, size, i, j, -value)
            i, j = rng.sample(range(size), 2)
            value = random_poly(ring, max_terms=2, max_degree=2)
            right = right @ elementary(ring, size, i, j, value)
            right_inverse = elementary(ring, size, i, j, -value) @ right_inverse
        assert left @ left_inverse == PolyMatrix.identity(ring, size)
        moved = MatFac(left @ a1 @ right, right_inverse @ a2 @ left_inverse, f)
        assert trivial_summand_counts(moved) == trivial_summand_counts(MatFac(a1, a2, f))


def test_rank_at_origin_of_zero_matrix():
    ring = PolynomialRing.standard(5, 1)
    assert rank_at_origin(PolyMatrix.zero(ring, 4)) == 0
    assert rank_at_origin(PolyMatrix.from_rows(ring, [[1, 2], [2, 4]])) == 1


# b, x, y, u, v are independent variables so no accidental cancellation can hide an error
RING = PolynomialRing.standard(3, 3).extend("u", "v")
B, X, Y = RING.gen("x1"), RING.gen("x2"), RING.gen("x3")
U, V = RING.gen("u"), RING.gen("v")


def shape_cases():
    for size in range(2, 7):
        yield "chain", size, {}
        if size % 2 == 0:
            yield "even", size, {"x": X}
        else:
            yield "odd", size, {"x": X, "y": Y}
        for k in range(1, size):
            yield "split", size, {"k": k, "u": U, "v": V}
        yield "uv", size, {"uv": U * V}


@pytest.mark.parametrize("shape, size, corners", list(shape_cases()))
def test_companion_reductions(shape, size, corners):
    certificate = companion_reduce(B, size, shape, **corners)
    assert certificate.source == PolyMatrix.from_rows(RING, companion_matrix(B, size, shape, **corners))
    assert certificate.check()
    assert certificate.replay() == (certificate.left, certificate.right)
    assert all(op[0] in ("row_add", "col_add", "row_perm", "col_perm") for op in certificate.ops)


def signed(power):
    value = poly_pow(B, power)
    return value if power % 2 else -value


def test_chain_of_size_two():
    certificate = companion_reduce(B, 2, "chain")
    assert certificate.reduced == PolyMatrix.from_rows(RING, [[0, -B * B], [1, 0]])


@pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
def test_chain_corner(size):
    assert companion_reduce(B, size, CompanionShape.CHAIN).entry(0, size - 1) == signed(size)


@pytest.mark.parametrize("size", [2, 4, 6])
def test_even_corners(size):
    m = size // 2
    certificate = companion_reduce(B, size, "even", x=X)
    assert certificate.entry(0, size - 2) == signed(m)
    assert certificate.entry(1, size - 1) == signed(m)
    assert certificate.entry(0, size - 1) == X


@pytest.mark.parametrize("size", [3, 5])
def test_odd_corners(size):
    m = size // 2
    certificate = companion_reduce(B, size, "odd", x=X, y=Y)
    assert certificate.entry(0, size - 1) == signed(m + 1)
    assert certificate.entry(1, size - 2) == signed(m)


def test_split_base_case():
    certificate = companion_reduce(B, 2, "split", k=1, u=U, v=V)
    assert certificate.reduced == PolyMatrix.from_rows(RING, [[B, V], [U, B]])


def test_split_core():
    certificate = companion_reduce(B, 5, "split", k=2, u=U, v=V)
    for i in range(3):
        assert certificate.entry(i, i) == 1
    assert certificate.entry(3, 3) == signed(2)
    assert certificate.entry(3, 4) == V
    assert certificate.entry(4, 3) == U
    assert certificate.entry(4, 4) == signed(3)


def test_uv_of_size_three():
    certificate = companion_reduce(B, 3, "uv", uv=U * V)
    assert certificate.reduced == PolyMatrix.from_rows(RING, [[1, 0, 0], [0, -B * B, U * V], [0, 1, B]])


def test_block_entries():
    ring = PolynomialRing.standard(3, 1)
    a = matrix_power(ring.gen("x1") ** 2, 1, FrobBasis(3, 1, 1))
    certificate = companion_reduce(a, 3, "chain")
    assert certificate.check()
    # A^3 = M(x^6) = x^2 I
    assert certificate.entry(0, 2) == PolyMatrix.scalar(ring, 3, ring.gen("x1") ** 2)


@pytest.mark.parametrize("shape, size, corners", [
    ("chain", 1, {}),
    ("even", 3, {"x": X}),
    ("odd", 4, {"x": X, "y": Y}),
    ("split", 4, {"u": U, "v": V}),
    ("split", 4, {"k": 4, "u": U, "v": V}),
    ("even", 4, {}),
    ("zigzag", 4, {}),
])
def test_companion_rejects(shape, size, corners):
    with pytest.raises(ValidationError):
        companion_reduce(B, size, shape, **corners)


@pytest.mark.parametrize("text, p, k", [("x1^2 + x1*x2", 3, 1), ("x1^3", 5, 2)])
def test_factorization_survives_json(text, p, k):
    f, phi, psi = pair_for(text, p, k)
    mf = MatFac(phi, psi, f)
    for original in (mf, maltese(mf), sharp(mf)):
        data = json.loads(json.dumps(original.to_dict()))
        assert data["size"] == original.size
        assert MatFac.from_dict(data) == original


def test_malformed_factorization_record():
    f, phi, psi = pair_for("x1^2", 3, 1)
    data = MatFac(phi, psi, f).to_dict()
    with pytest.raises(ValidationError):
        MatFac.from_dict({key: value for key, value in data.items() if key != "psi"})
    data["psi"] = data["phi"]
    with pytest.raises(ValidationError):
        MatFac.from_dict(data)
