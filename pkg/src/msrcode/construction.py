"""Parity supports, coefficient assignment and MDS verification.

Parity x, symbol f is

    sum_u a[x][u] * msg[u][f]  +  [x >= 1] * c * sum_{i=1..m} msg[(i, f_i)][f + x e_i]

The first sum runs over the whole row f (the set called R2 below), the
second over the m "shifted" symbols (R1).  Row coefficients a[x][u] form a
scalar MDS code whose first parity row is all ones; c is shared by every
parity node x >= 1.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .params import (
    CodeParams,
    NodeId,
    ParameterError,
    all_indices,
    ordinal_to_tuple,
    shift_digit,
    tuple_to_ordinal,
)


class ConstructionError(RuntimeError):
    pass


class CoefficientNotFound(ConstructionError):
    def __init__(self, params: CodeParams):
        self.params = params
        super().__init__(
            f"no common coefficient c in GF(2^{params.field.width}) makes {params} MDS; "
            f"existence is only guaranteed for field size >= C({params.n},{params.k})*"
            f"{params.r}^{params.m + 1} = {params.field_bound}"
        )


@dataclass(frozen=True)
class ParitySupport:
    x: int
    f: tuple[int, ...]
    r1: tuple[tuple[NodeId, tuple[int, ...]], ...]
    r2: tuple[tuple[NodeId, tuple[int, ...]], ...]


def parity_support(x: int, f, params: CodeParams) -> ParitySupport:
    if not 0 <= x < params.r:
        raise ParameterError(f"parity index {x} outside Z_{params.r}")
    f = tuple(f)
    tuple_to_ordinal(f, params)
    r1 = tuple(
        (NodeId.systematic(i, f[i - 1]), shift_digit(f, i, x, params.r))
        for i in range(1, params.m + 1)
    )
    r2 = tuple(
        (NodeId.from_ordinal(u, params), f) for u in range(params.k)
    )
    return ParitySupport(x, f, r1, r2)


@functools.lru_cache(maxsize=None)
def _r1_tables(m: int, r: int, x: int) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, m) arrays of node ordinals and symbol ordinals of R1, row by row."""
    params = CodeParams(m, r)
    nodes = np.zeros((params.alpha, m), dtype=np.intp)
    syms = np.zeros((params.alpha, m), dtype=np.intp)
    for fo, f in enumerate(all_indices(params)):
        for i in range(1, m + 1):
            nodes[fo, i - 1] = (i - 1) * r + f[i - 1]
            syms[fo, i - 1] = tuple_to_ordinal(shift_digit(f, i, x, r), params)
    nodes.flags.writeable = False
    syms.flags.writeable = False
    return nodes, syms


def r1_tables(params: CodeParams, x: int) -> tuple[np.ndarray, np.ndarray]:
    return _r1_tables(params.m, params.r, x)


@dataclass(frozen=True)
class CodeDescription:
    """Everything needed to encode bit-exactly: params, row coefficients, c."""

    params: CodeParams
    a: tuple[tuple[int, ...], ...]
    c: int | None = None
    seed: int = 0

    def with_c(self, c: int) -> CodeDescription:
        return replace(self, c=int(c))

    @property
    def coefficient_matrix(self) -> np.ndarray:
        return np.array(self.a, dtype=self.params.field.dtype)

    def scalar_generator(self) -> np.ndarray:
        """The n x k generator [I; a] of the underlying scalar code."""
        k = self.params.k
        return np.concatenate(
            [np.eye(k, dtype=self.params.field.dtype), self.coefficient_matrix]
        )


@dataclass(frozen=True)
class SubsetMatrix:
    nodes: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)


def _scalar_mds_failures(gen: np.ndarray, params: CodeParams) -> list[tuple[int, ...]]:
    gf = params.gf
    return [
        D
        for D in itertools.combinations(range(params.n), params.k)
        if not gf.is_invertible(gen[list(D)])
    ]


def assign_coefficients(params: CodeParams, seed: int = 0, budget: int = 16) -> CodeDescription:
    """Row coefficients from a column-normalised Cauchy matrix.

    Evaluation points X_x = x and Y_u = r + u + shift with shift = seed * k
    (wrapped to fit the field).  Columns are scaled so parity 0
    is the plain row sum.  Every k x k minor of [I; a] is checked; on failure
    the seed advances, up to ``budget`` attempts.
    """
    gf = params.gf
    q, n, r, k = params.field.order, params.n, params.r, params.k
    for attempt in range(budget):
        s = seed + attempt
        shift = (s * k) % (q - n + 1)
        X = list(range(r))
        Y = [r + u + shift for u in range(k)]
        raw = [[gf.inv(X[x] ^ Y[u]) for u in range(k)] for x in range(r)]
        scale = [gf.inv(raw[0][u]) for u in range(k)]
        a = tuple(tuple(gf.mul(raw[x][u], scale[u]) for u in range(k)) for x in range(r))
        desc = CodeDescription(params, a, None, s)
        if not _scalar_mds_failures(desc.scalar_generator(), params):
            return desc
    raise ConstructionError(
        f"no scalar MDS coefficient set for {params} within {budget} seeds"
    )


def check_description(desc: CodeDescription) -> None:
    """Structural checks on a description loaded from elsewhere."""
    p = desc.params
    if len(desc.a) != p.r or any(len(row) != p.k for row in desc.a):
        raise ConstructionError(f"coefficient table must be {p.r} x {p.k}")
    if any(v != 1 for v in desc.a[0]):
        raise ConstructionError("parity 0 coefficients must all be 1")
    if any(not 0 < v < p.field.order for row in desc.a for v in row):
        raise ConstructionError("row coefficients must be nonzero field elements")
    if desc.c is not None and not 0 < desc.c < p.field.order:
        raise ConstructionError(f"c={desc.c} must be a nonzero field element")


def build_subset_matrix(desc: CodeDescription, D, c: int | None = None) -> SubsetMatrix:
    """The k*alpha square matrix mapping the message to the symbols of nodes D.

    Systematic rows come first, then parity rows; columns are message symbols
    in (node, symbol) order.
    """
    p = desc.params
    c = desc.c if c is None else c
    if c is None:
        raise ConstructionError("common coefficient c is not set")
    D = tuple(sorted(int(u) for u in D))
    if len(D) != p.k or len(set(D)) != p.k or not all(0 <= u < p.n for u in D):
        raise ParameterError(f"subset must hold {p.k} distinct node ordinals, got {D}")
    alpha, k = p.alpha, p.k
    E = np.zeros((k * alpha, k * alpha), dtype=p.field.dtype)
    f_all = np.arange(alpha)
    cols_row = np.arange(k)[None, :] * alpha + f_all[:, None]  # (alpha, k)
    for slot, u in enumerate(D):
        rows = slot * alpha + f_all
        if u < k:
            E[rows, u * alpha + f_all] = 1
            continue
        x = u - k
        E[rows[:, None], cols_row] = np.array(desc.a[x], dtype=p.field.dtype)[None, :]
        if x:
            nodes, syms = r1_tables(p, x)
            E[rows[:, None], nodes * alpha + syms] ^= c
    return SubsetMatrix(D, E)


@dataclass
class MdsReport:
    checked: int
    failing: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return not self.failing


def verify_mds(desc: CodeDescription, c: int | None = None, stop_at_first: bool = False,
               order=None) -> MdsReport:
    """Certify every k-subset matrix invertible by elimination."""
    p = desc.params
    c = desc.c if c is None else c
    if not c:
        raise ConstructionError("verify_mds needs a nonzero c")
    gf = p.gf
    subsets = order if order is not None else itertools.combinations(range(p.n), p.k)
    failing = []
    checked = 0
    for D in subsets:
        checked += 1
        if not gf.is_invertible(build_subset_matrix(desc, D, c).matrix):
            failing.append(tuple(D))
            if stop_at_first:
                break
    return MdsReport(checked, failing)


def verify_mds_reduced(desc: CodeDescription, c: int | None = None) -> MdsReport:
    """Second opinion on the MDS property through a smaller system.

    With the surviving systematic symbols known, subset D decodes iff the
    parity rows of D restricted to the erased systematic nodes' columns form
    an invertible square matrix.  The matrix is assembled from
    :func:`parity_support` and reduced with scalar arithmetic only.
    """
    p = desc.params
    c = desc.c if c is None else c
    gf = p.gf
    failing = []
    checked = 0
    for D in itertools.combinations(range(p.n), p.k):
        checked += 1
        parities = [u - p.k for u in D if u >= p.k]
        erased = [u for u in range(p.k) if u not in D]
        if not parities:
            continue
        col_of = {(u, f): i * p.alpha + f for i, u in enumerate(erased) for f in range(p.alpha)}
        rows = []
        for x in parities:
            for fo in range(p.alpha):
                sup = parity_support(x, ordinal_to_tuple(fo, p), p)
                row = [0] * len(col_of)
                for node, g in sup.r2:
                    key = (node.ordinal(p), tuple_to_ordinal(g, p))
                    if key in col_of:
                        row[col_of[key]] ^= desc.a[x][key[0]]
                if x:
                    for node, g in sup.r1:
                        key = (node.ordinal(p), tuple_to_ordinal(g, p))
                        if key in col_of:
                            row[col_of[key]] ^= c
                rows.append(row)
        if _scalar_rank(rows, gf) < len(rows):
            failing.append(D)
    return MdsReport(checked, failing)


def _scalar_rank(rows: list[list[int]], gf) -> int:
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pinv = gf.inv(rows[rank][col])
        rows[rank] = [gf.mul(pinv, v) for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                fac = rows[i][col]
                rows[i] = [v ^ gf.mul(fac, w) for v, w in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@dataclass
class CSearch:
    c: int
    rejected: int
    subsets_checked: int


def search_c(desc: CodeDescription) -> CSearch:
    """Scan c = 1, 2, ... and stop at the first value giving an MDS code.

    Subsets that just rejected a candidate are tried first on the next one;
    that only reorders work, the returned c is the smallest valid value.
    """
    p = desc.params
    subsets = list(itertools.combinations(range(p.n), p.k))
    checked = 0
    for c in range(1, p.field.order):
        report = verify_mds(desc, c, stop_at_first=True, order=subsets)
        checked += report.checked
        if report.ok:
            return CSearch(c, c - 1, checked)
        bad = report.failing[0]
        subsets.remove(bad)
        subsets.insert(0, bad)
    raise CoefficientNotFound(p)


def find_c(desc: CodeDescription) -> int:
    return search_c(desc).c


def build_code(params: CodeParams, seed: int = 0) -> CodeDescription:
    """Coefficients plus the smallest valid c; the full construction pipeline."""
    desc = assign_coefficients(params, seed)
    return desc.with_c(find_c(desc))
