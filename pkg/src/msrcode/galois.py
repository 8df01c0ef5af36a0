"""Table-driven arithmetic over GF(2^w) for w in {8, 16}.

Scalars are plain ints; arrays are numpy integer arrays.  Addition is XOR.
Multiplication goes through log/antilog tables whose zero handling is
branch-free: ``log[0]`` points past the live region of the antilog table,
which is zero-padded, so any product involving 0 looks up a 0.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

DEFAULT_POLYNOMIALS = {
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}


class FieldError(ValueError):
    """Bad field construction or an operation outside the field's domain."""


def _clmul_mod(a: int, b: int, poly: int, width: int) -> int:
    """Carry-less multiply then reduce; the slow reference path."""
    top = 1 << width
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division of a GF(2)[x] polynomial by every polynomial of degree <= deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    return all(_poly_mod(poly, d) != 0 for d in range(2, 1 << (deg // 2 + 1)))


@dataclass(frozen=True)
class FieldSpec:
    width: int = 16
    polynomial: int | None = None

    def __post_init__(self):
        if self.width not in DEFAULT_POLYNOMIALS:
            raise FieldError(f"unsupported field width {self.width}; expected 8 or 16")
        if self.polynomial is None:
            object.__setattr__(self, "polynomial", DEFAULT_POLYNOMIALS[self.width])
        if self.polynomial.bit_length() - 1 != self.width:
            raise FieldError(
                f"reduction polynomial {self.polynomial:#x} is not of degree {self.width}"
            )

    @property
    def order(self) -> int:
        return 1 << self.width

    @property
    def dtype(self):
        return np.dtype(np.uint8) if self.width == 8 else np.dtype("<u2")

    @property
    def symbol_bytes(self) -> int:
        return self.width // 8


class GF:
    """GF(2^w) with vectorised multiply, inverse and dense linear algebra."""

    def __init__(self, spec: FieldSpec | None = None):
        spec = spec or FieldSpec()
        if not is_irreducible(spec.polynomial):
            raise FieldError(f"polynomial {spec.polynomial:#x} is reducible")
        self.spec = spec
        self.width = spec.width
        self.order = spec.order
        self.dtype = spec.dtype
        self.generator = self._find_generator()

        q1 = self.order - 1
        exp = np.zeros(4 * q1 + 1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x = _clmul_mod(x, self.generator, spec.polynomial, self.width)
        exp[q1 : 2 * q1] = exp[:q1]
        log[0] = 2 * q1  # log[a] + log[0] lands in the zero tail of exp
        if len(set(exp[:q1].tolist())) != q1:
            raise FieldError("generator does not span the multiplicative group")
        self._exp = exp
        self._log = log

    def _find_generator(self) -> int:
        q1 = self.order - 1
        prime_factors = [p for p in range(2, q1 + 1) if q1 % p == 0 and all(p % d for d in range(2, p))]
        for g in range(2, self.order):
            if all(self._slow_pow(g, q1 // p) != 1 for p in prime_factors):
                return g
        raise FieldError("no primitive element found")

    def _slow_pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = _clmul_mod(out, a, self.spec.polynomial, self.width)
            a = _clmul_mod(a, a, self.spec.polynomial, self.width)
            e >>= 1
        return out

    def __repr__(self):
        return f"GF(2^{self.width}, poly={self.spec.polynomial:#x})"

    # scalar / elementwise arithmetic

    @staticmethod
    def add(a, b):
        return a ^ b

    def mul(self, a, b):
        """Elementwise product; accepts ints or broadcastable arrays."""
        if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
            self._check(a)
            self._check(b)
            return int(self._exp[self._log[a] + self._log[b]])
        a = np.asarray(a)
        b = np.asarray(b)
        return self._exp[self._log[a] + self._log[b]].astype(self.dtype)

    def inv(self, a):
        if isinstance(a, (int, np.integer)):
            self._check(a)
            if a == 0:
                raise ZeroDivisionError("0 has no multiplicative inverse")
            return int(self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)])
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)].astype(self.dtype)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if a == 0:
            return 1 if e == 0 else 0
        return int(self._exp[(int(self._log[a]) * e) % (self.order - 1)])

    def _check(self, a):
        if not 0 <= int(a) < self.order:
            raise FieldError(f"{a} is not an element of GF(2^{self.width})")

    # dense linear algebra

    def matmul(self, A, B):
        """Matrix product over the field; B may carry many columns."""
        A = np.asarray(A)
        B = np.asarray(B)
        if A.shape[1] != B.shape[0]:
            raise FieldError(f"shape mismatch {A.shape} @ {B.shape}")
        out = np.zeros((A.shape[0],) + B.shape[1:], dtype=self.dtype)
        logB = self._log[B]
        for j in range(A.shape[1]):
            col = self._log[A[:, j]].reshape((-1,) + (1,) * (B.ndim - 1))
            out ^= self._exp[col + logB[j]].astype(self.dtype)
        return out

    def _eliminate(self, M, ncols: int):
        """Gauss-Jordan on M's first ``ncols`` columns in place; returns rank."""
        rows = M.shape[0]
        rank = 0
        for col in range(ncols):
            nz = np.flatnonzero(M[rank:, col])
            if nz.size == 0:
                continue
            p = rank + nz[0]
            if p != rank:
                M[[rank, p]] = M[[p, rank]]
            piv_inv = self.inv(int(M[rank, col]))
            M[rank] = self.mul(piv_inv, M[rank])
            factors = M[:, col].copy()
            factors[rank] = 0
            hit = np.flatnonzero(factors)
            if hit.size:
                M[hit] ^= self.mul(factors[hit, None], M[rank][None, :])
            rank += 1
            if rank == rows:
                break
        return rank

    def rank(self, A) -> int:
        M = np.array(A, dtype=self.dtype, copy=True)
        return self._eliminate(M, M.shape[1])

    def is_invertible(self, A) -> bool:
        A = np.asarray(A)
        return A.shape[0] == A.shape[1] and self.rank(A) == A.shape[0]

    def solve(self, A, B):
        """Solve A X = B for square invertible A; raises LinAlgError when singular."""
        A = np.asarray(A, dtype=self.dtype)
        B = np.asarray(B, dtype=self.dtype)
        n = A.shape[0]
        if A.shape != (n, n):
            raise FieldError(f"expected a square matrix, got {A.shape}")
        rhs = B.reshape(n, -1)
        M = np.concatenate([A, rhs], axis=1)
        if self._eliminate(M, n) != n:
            raise np.linalg.LinAlgError("singular matrix over GF(2^%d)" % self.width)
        return M[:, n:].reshape(B.shape)

    def inverse(self, A):
        n = np.asarray(A).shape[0]
        return self.solve(A, np.eye(n, dtype=self.dtype))


@functools.lru_cache(maxsize=None)
def get_field(width: int = 16, polynomial: int | None = None) -> GF:
    """Shared, immutable field instance per (width, polynomial)."""
    return GF(FieldSpec(width, polynomial))
