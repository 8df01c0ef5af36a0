import numpy as np
import pytest

from msrcode.galois import GF, FieldError, FieldSpec, _clmul_mod, get_field, is_irreducible


@pytest.fixture(scope="module")
def gf8():
    return get_field(8)


@pytest.fixture(scope="module")
def gf16():
    return get_field(16)


def test_add_examples(gf8):
    assert gf8.add(0x53, 0xCA) == 0x99
    for x in (0, 1, 0x53, 0xFF):
        assert gf8.add(x, 0) == x
        assert gf8.add(x, x) == 0


def test_mul_identities(gf8, gf16):
    for gf in (gf8, gf16):
        for a in (0, 1, 2, 0x53, gf.order - 1):
            assert gf.mul(a, 1) == a
            assert gf.mul(a, 0) == 0
            assert gf.mul(0, a) == 0


def test_table_mul_matches_carryless_w8(gf8):
    a = np.arange(256)[:, None]
    b = np.arange(256)[None, :]
    table = gf8.mul(a, b)
    ref = np.array([[_clmul_mod(i, j, 0x11B, 8) for j in range(256)] for i in range(256)])
    np.testing.assert_array_equal(table, ref)


def test_table_mul_matches_carryless_w16(gf16):
    rng = np.random.default_rng(7)
    a = rng.integers(0, 1 << 16, 100_000)
    b = rng.integers(0, 1 << 16, 100_000)
    got = gf16.mul(a, b)
    ref = np.array([_clmul_mod(int(x), int(y), 0x1100B, 16) for x, y in zip(a[:5000], b[:5000])])
    np.testing.assert_array_equal(got[:5000], ref)


def test_known_aes_product(gf8):
    # 0x53 and 0xCA are inverses in the AES field
    assert gf8.mul(0x53, 0xCA) == 1
    assert gf8.inv(0x53) == 0xCA


def test_inverse_exhaustive(gf8, gf16):
    for gf in (gf8, gf16):
        g = np.arange(1, gf.order)
        np.testing.assert_array_equal(gf.mul(g, gf.inv(g)), 1)
        np.testing.assert_array_equal(gf.inv(gf.inv(g)), g)
    assert gf8.inv(1) == 1


def test_inverse_of_zero(gf8):
    with pytest.raises(ZeroDivisionError):
        gf8.inv(0)
    with pytest.raises(ZeroDivisionError):
        gf8.inv(np.array([1, 0]))


def test_distributive_exhaustive_w8(gf8):
    a = np.arange(256)[:, None]
    b = np.arange(256)[None, :]
    ab = a ^ b
    for c in range(256):
        np.testing.assert_array_equal(gf8.mul(ab, c), gf8.mul(a, c) ^ gf8.mul(b, c))


def test_distributive_random_w16(gf16):
    rng = np.random.default_rng(3)
    a, b, c = rng.integers(0, 1 << 16, (3, 100_000))
    np.testing.assert_array_equal(gf16.mul(a ^ b, c), gf16.mul(a, c) ^ gf16.mul(b, c))


def test_generator_has_full_order(gf8, gf16):
    for gf in (gf8, gf16):
        q1 = gf.order - 1
        assert gf.pow(gf.generator, q1) == 1
        assert all(gf.pow(gf.generator, q1 // p) != 1 for p in (3, 5, 17, 257) if q1 % p == 0)


def test_polynomials():
    assert is_irreducible(0x11B)
    assert is_irreducible(0x1100B)
    assert not is_irreducible(0x100)  # x^8
    with pytest.raises(FieldError):
        GF(FieldSpec(8, 0x101))  # x^8 + 1 = (x + 1)^8
    with pytest.raises(FieldError):
        FieldSpec(12)
    with pytest.raises(FieldError):
        FieldSpec(8, 0x1100B)


def test_out_of_field(gf8):
    with pytest.raises(FieldError):
        gf8.mul(256, 1)


def test_solve_and_inverse(gf16):
    rng = np.random.default_rng(11)
    A = rng.integers(0, 1 << 16, (12, 12)).astype(gf16.dtype)
    X = rng.integers(0, 1 << 16, (12, 5)).astype(gf16.dtype)
    B = gf16.matmul(A, X)
    np.testing.assert_array_equal(gf16.solve(A, B), X)
    np.testing.assert_array_equal(gf16.matmul(gf16.inverse(A), A), np.eye(12, dtype=gf16.dtype))


def test_singular(gf8):
    A = np.array([[1, 2], [2, gf8.mul(2, 2)]])
    assert gf8.rank(A) == 1
    assert not gf8.is_invertible(A)
    with pytest.raises(np.linalg.LinAlgError):
        gf8.solve(A, np.array([1, 0]))
