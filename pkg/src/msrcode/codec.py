"""Systematic encoding, sequential help-by-transfer repair, and decoding.

All routines accept leading batch dimensions so a whole file's worth of
stripes can go through in one call: a message is ``(..., k, alpha)``, a
codeword ``(..., n, alpha)``, a helper's contribution ``(..., beta)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .construction import CodeDescription, build_subset_matrix, r1_tables
from .params import (
    CodeParams,
    NodeId,
    UnsupportedRepairError,
    access_set,
    as_node,
    ordinal_to_tuple,
    shift_digit,
    tuple_to_ordinal,
)


class CodecError(ValueError):
    pass


class RepairProtocolError(CodecError):
    """Helper data does not match the access rule for the failed node."""


class InvalidDescriptionError(CodecError):
    pass


class CorruptDescriptionError(CodecError):
    """A k-subset system turned out singular; the description is not MDS."""


def _require_c(desc: CodeDescription) -> int:
    if not desc.c:
        raise InvalidDescriptionError("description has no nonzero common coefficient c")
    return desc.c


def encode(message, desc: CodeDescription) -> np.ndarray:
    p = desc.params
    gf = p.gf
    c = _require_c(desc)
    msg = np.asarray(message)
    if msg.shape[-2:] != (p.k, p.alpha):
        raise CodecError(f"message must end in shape ({p.k}, {p.alpha}), got {msg.shape}")
    if msg.dtype != p.field.dtype:
        if msg.size and (msg.min() < 0 or msg.max() >= p.field.order):
            raise CodecError("message symbols outside the field")
        msg = msg.astype(p.field.dtype)
    out = np.empty(msg.shape[:-2] + (p.n, p.alpha), dtype=p.field.dtype)
    out[..., : p.k, :] = msg
    out[..., p.k, :] = np.bitwise_xor.reduce(msg, axis=-2)
    for x in range(1, p.r):
        coeffs = np.array(desc.a[x], dtype=p.field.dtype)[:, None]
        acc = np.bitwise_xor.reduce(gf.mul(coeffs, msg), axis=-2)
        nodes, syms = r1_tables(p, x)
        shifted = np.bitwise_xor.reduce(msg[..., nodes, syms], axis=-1)
        out[..., p.k + x, :] = acc ^ gf.mul(c, shifted)
    return out


# repair


class ReadCounter(Counter):
    """Symbols read per helper node ordinal."""

    @property
    def total(self) -> int:
        return sum(self.values())


@dataclass(frozen=True)
class HelperSymbols:
    indices: tuple[int, ...]
    values: np.ndarray


def extract_helpers(codeword, failed, params: CodeParams, counter: ReadCounter | None = None,
                    ) -> dict[int, HelperSymbols]:
    """Read exactly the access-set symbols from each surviving node.

    ``codeword`` is anything indexable as ``codeword[..., node, symbols]``.
    Every read goes through here, so ``counter`` sees the true access cost.
    """
    node = as_node(failed, params)
    idx = access_set(node, params)
    fo = node.ordinal(params)
    cw = np.asarray(codeword)
    out = {}
    for u in range(params.n):
        if u == fo:
            continue
        vals = cw[..., u, idx]
        out[u] = HelperSymbols(tuple(idx), vals)
        if counter is not None:
            counter[u] += vals.size
    return out


@dataclass
class RepairSession:
    """State of one repair; ``consumed[j]`` records the sources stage j read.

    Source tags: ``("S",)`` surviving systematic symbol, ``("H", x)`` parity
    x helper symbol, ``("M", j)`` a symbol of the failed node recovered in
    stage j.
    """

    failed: NodeId
    params: CodeParams
    recovered: dict[int, np.ndarray] = field(default_factory=dict)
    stage_of: dict[int, int] = field(default_factory=dict)
    consumed: dict[int, set] = field(default_factory=dict)

    def node(self) -> np.ndarray:
        p = self.params
        if len(self.recovered) != p.alpha:
            raise CodecError("repair incomplete")
        out = np.stack([np.asarray(self.recovered[f]) for f in range(p.alpha)], axis=-1)
        return out.astype(p.field.dtype)


def repair_session(failed, helpers: dict[int, HelperSymbols], desc: CodeDescription) -> RepairSession:
    p = desc.params
    gf = p.gf
    c = _require_c(desc)
    c_inv = gf.inv(c)
    node = as_node(failed, p)
    if not node.is_systematic:
        raise UnsupportedRepairError("parity node repair is not supported")
    fo = node.ordinal(p)
    idx = tuple(access_set(node, p))
    expected = set(range(p.n)) - {fo}
    if set(helpers) != expected:
        missing = sorted(expected - set(helpers))
        raise RepairProtocolError(
            f"repair of {node} needs all {p.n - 1} helpers; missing {missing}, "
            f"use full reconstruction instead"
        )
    pos = {f: i for i, f in enumerate(idx)}
    for u, h in helpers.items():
        if tuple(h.indices) != idx or np.shape(h.values)[-1] != len(idx):
            raise RepairProtocolError(
                f"helper {u} sent symbols {tuple(h.indices)}, expected {idx}"
            )

    session = RepairSession(node, p)

    def read(u: int, f: int, stage: int):
        """Fetch symbol f of node u, logging its provenance for ``stage``."""
        log = session.consumed.setdefault(stage, set())
        if u == fo:
            log.add(("M", session.stage_of[f]))
            return session.recovered[f]
        if f not in pos:
            raise RepairProtocolError(f"stage {stage} needs unsent symbol {f} of node {u}")
        log.add(("S",) if u < p.k else ("H", u - p.k))
        return helpers[u].values[..., pos[f]]

    # stage 0: row parity minus the other systematic symbols of the row
    for f in idx:
        acc = read(p.k, f, 0)
        for u in range(p.k):
            if u != fo:
                acc = acc ^ read(u, f, 0)
        session.recovered[f] = acc
        session.stage_of[f] = 0

    # stage j: parity j at f has exactly one unknown, the failed node's
    # symbol at f with digit s moved to t + j
    for j in range(1, p.r):
        done = {}
        for f in idx:
            ft = ordinal_to_tuple(f, p)
            acc = read(p.k + j, f, j)
            for u in range(p.k):
                acc = acc ^ gf.mul(desc.a[j][u], read(u, f, j))
            target = None
            for i in range(1, p.m + 1):
                u = (i - 1) * p.r + ft[i - 1]
                g = tuple_to_ordinal(shift_digit(ft, i, j, p.r), p)
                if u == fo:
                    target = g
                else:
                    acc = acc ^ gf.mul(c, read(u, g, j))
            done[target] = gf.mul(c_inv, acc)
        for g, v in done.items():
            session.recovered[g] = v
            session.stage_of[g] = j
    return session


def repair_systematic(failed, helpers: dict[int, HelperSymbols], desc: CodeDescription) -> np.ndarray:
    """Rebuild the alpha symbols of a failed systematic node from its d = n-1 helpers."""
    return repair_session(failed, helpers, desc).node()


@dataclass(frozen=True)
class AccessReport:
    failed: NodeId
    indices: tuple[int, ...]
    per_helper: dict[int, int]
    total: int
    baseline: int

    @property
    def ratio(self) -> float:
        return self.total / self.baseline

    def as_dict(self) -> dict:
        return {
            "failed": str(self.failed),
            "indices": list(self.indices),
            "per_helper": self.per_helper,
            "total": self.total,
            "baseline": self.baseline,
            "ratio": self.ratio,
        }


def access_report(failed, params: CodeParams) -> AccessReport:
    node = as_node(failed, params)
    idx = tuple(access_set(node, params))
    fo = node.ordinal(params)
    per = {u: len(idx) for u in range(params.n) if u != fo}
    return AccessReport(node, idx, per, sum(per.values()), params.k * params.alpha)


# reconstruction


def reconstruct(nodes: dict, desc: CodeDescription) -> np.ndarray:
    """Recover the ``(..., k, alpha)`` message from any k nodes' contents.

    ``nodes`` maps node ordinals (or NodeIds) to ``(..., alpha)`` arrays.
    """
    p = desc.params
    gf = p.gf
    _require_c(desc)
    data = {as_node(u, p).ordinal(p): np.asarray(v) for u, v in nodes.items()}
    if len(data) != p.k:
        raise CodecError(f"reconstruction needs exactly {p.k} distinct nodes, got {len(data)}")
    D = tuple(sorted(data))
    batch = np.broadcast_shapes(*(v.shape[:-1] for v in data.values()))
    # (k*alpha, batch...) with rows in the same order as the subset matrix
    rhs = np.concatenate(
        [np.moveaxis(np.broadcast_to(data[u], batch + (p.alpha,)), -1, 0) for u in D]
    ).astype(p.field.dtype)
    E = build_subset_matrix(desc, D).matrix
    try:
        E_inv = gf.inverse(E)
    except np.linalg.LinAlgError as exc:
        raise CorruptDescriptionError(f"subset {D} is not decodable: {exc}") from None
    sol = gf.matmul(E_inv, rhs)
    sol = np.moveaxis(sol, 0, -1)
    return sol.reshape(batch + (p.k, p.alpha))
