"""Code parameters, symbol/node indexing and the repair access rule."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .galois import GF, FieldSpec, get_field

log = logging.getLogger(__name__)


class ParameterError(ValueError):
    pass


class UnsupportedRepairError(ValueError):
    """Raised for repair requests outside systematic single-node repair."""


@dataclass(frozen=True)
class CodeParams:
    m: int
    r: int
    field: FieldSpec = FieldSpec()

    @property
    def k(self) -> int:
        return self.m * self.r

    @property
    def n(self) -> int:
        return self.k + self.r

    @property
    def d(self) -> int:
        return self.n - 1

    @property
    def alpha(self) -> int:
        return self.r**self.m

    @property
    def beta(self) -> int:
        return self.r ** (self.m - 1)

    @property
    def B(self) -> int:
        return self.k * self.alpha

    @property
    def gf(self) -> GF:
        return get_field(self.field.width, self.field.polynomial)

    @property
    def field_bound(self) -> int:
        """Field size that guarantees a valid common coefficient exists."""
        return math.comb(self.n, self.k) * self.r ** (self.m + 1)

    @property
    def meets_field_bound(self) -> bool:
        return self.field.order >= self.field_bound

    def __str__(self):
        return (
            f"(n={self.n}, k={self.k}, d={self.d}) alpha={self.alpha} beta={self.beta} "
            f"B={self.B} over GF(2^{self.field.width})"
        )


def validate(m: int, r: int, field: FieldSpec | int | None = None) -> CodeParams:
    """Check (m, r) and derive the full parameter set.

    Fields smaller than C(n, k) * r^(m+1) are accepted with a logged warning;
    a valid coefficient may still exist there, it is just not guaranteed.
    """
    if not isinstance(m, int) or m < 1:
        raise ParameterError(f"m must be an integer >= 1, got {m!r}")
    if not isinstance(r, int) or r < 2:
        raise ParameterError(f"r must be an integer >= 2, got {r!r}")
    if field is None:
        field = FieldSpec()
    elif isinstance(field, int):
        field = FieldSpec(field)
    params = CodeParams(m, r, field)
    if params.n > field.order:
        raise ParameterError(f"GF(2^{field.width}) too small for n={params.n} nodes")
    if not params.meets_field_bound:
        log.warning(
            "GF(2^%d) has %d elements, below the existence bound C(%d,%d)*%d^%d = %d",
            field.width, field.order, params.n, params.k, r, m + 1, params.field_bound,
        )
    return params


# symbol indices: m-tuples over Z_r, big-endian, y_1 most significant


def tuple_to_ordinal(idx, params: CodeParams) -> int:
    if len(idx) != params.m:
        raise IndexError(f"expected {params.m} digits, got {len(idx)}")
    out = 0
    for y in idx:
        if not 0 <= y < params.r:
            raise IndexError(f"digit {y} outside Z_{params.r}")
        out = out * params.r + y
    return out


def ordinal_to_tuple(ordinal: int, params: CodeParams) -> tuple[int, ...]:
    if not 0 <= ordinal < params.alpha:
        raise IndexError(f"symbol ordinal {ordinal} outside [0, {params.alpha})")
    digits = []
    for _ in range(params.m):
        ordinal, y = divmod(ordinal, params.r)
        digits.append(y)
    return tuple(reversed(digits))


def all_indices(params: CodeParams) -> Iterator[tuple[int, ...]]:
    """Every symbol index in ascending ordinal order."""
    return product(range(params.r), repeat=params.m)


def shift_digit(idx: tuple[int, ...], s: int, j: int, r: int) -> tuple[int, ...]:
    """Add j (mod r) to the s-th digit, s 1-based."""
    out = list(idx)
    out[s - 1] = (out[s - 1] + j) % r
    return tuple(out)


@dataclass(frozen=True, order=True)
class NodeId:
    """A storage node.

    Systematic nodes are ``(s, t)`` with 1-based s and t in Z_r; parity
    nodes carry their index x in Z_r.
    """

    kind: str
    a: int
    b: int = 0

    @classmethod
    def systematic(cls, s: int, t: int) -> NodeId:
        return cls("systematic", s, t)

    @classmethod
    def parity(cls, x: int) -> NodeId:
        return cls("parity", x)

    @property
    def is_systematic(self) -> bool:
        return self.kind == "systematic"

    @property
    def s(self) -> int:
        return self.a

    @property
    def t(self) -> int:
        return self.b

    @property
    def x(self) -> int:
        return self.a

    def ordinal(self, params: CodeParams) -> int:
        if self.is_systematic:
            if not (1 <= self.s <= params.m and 0 <= self.t < params.r):
                raise ParameterError(f"no systematic node {self} for {params}")
            return (self.s - 1) * params.r + self.t
        if not 0 <= self.x < params.r:
            raise ParameterError(f"no parity node {self} for {params}")
        return params.k + self.x

    @classmethod
    def from_ordinal(cls, ordinal: int, params: CodeParams) -> NodeId:
        if not 0 <= ordinal < params.n:
            raise ParameterError(f"node ordinal {ordinal} outside [0, {params.n})")
        if ordinal < params.k:
            s, t = divmod(ordinal, params.r)
            return cls.systematic(s + 1, t)
        return cls.parity(ordinal - params.k)

    def __str__(self):
        if self.is_systematic:
            return f"N({self.s},{self.t})"
        return f"P{self.x}"


def as_node(node, params: CodeParams) -> NodeId:
    """Accept a NodeId, an ordinal, or an (s, t) pair."""
    if isinstance(node, NodeId):
        node.ordinal(params)
        return node
    if isinstance(node, (int,)) or hasattr(node, "__index__"):
        return NodeId.from_ordinal(int(node), params)
    s, t = node
    out = NodeId.systematic(s, t)
    out.ordinal(params)
    return out


def access_set(failed, params: CodeParams) -> list[int]:
    """Symbol ordinals every helper sends when systematic node (s, t) fails.

    These are the beta = r^(m-1) indices whose s-th digit equals t, ascending.
    The set does not depend on which helper is sending.
    """
    node = as_node(failed, params)
    if not node.is_systematic:
        raise UnsupportedRepairError("only systematic nodes can be repaired")
    return [
        tuple_to_ordinal(idx, params)
        for idx in all_indices(params)
        if idx[node.s - 1] == node.t
    ]


def split_index_sets(params: CodeParams) -> list[list[int]]:
    """Access sets by recursive splitting of {0..alpha-1}.

    Level s cuts every block into r equal consecutive pieces; the sets for
    nodes (s, 0..r-1) are unions of the t-th piece of each block.  This is an
    alternative to the closed-form digit rule in :func:`access_set`.
    """
    blocks = [list(range(params.alpha))]
    out = []
    for _ in range(params.m):
        pieces = []
        for block in blocks:
            size = len(block) // params.r
            pieces.append([block[t * size : (t + 1) * size] for t in range(params.r)])
        for t in range(params.r):
            out.append(sorted(i for p in pieces for i in p[t]))
        blocks = [piece for p in pieces for piece in p]
    return out
