"""Exit criteria for the construction, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (see conftest.py).
"""

import itertools
import math
import os
import time

import numpy as np
import pytest

from msrcode.codec import ReadCounter, encode, extract_helpers, repair_session, repair_systematic
from msrcode.construction import (
    assign_coefficients,
    build_subset_matrix,
    parity_support,
    search_c,
    verify_mds,
    verify_mds_reduced,
)
from msrcode.params import access_set, all_indices, validate
from msrcode.shardio import read_all, repair_shard, shard_name, write_shards

RESULTS: list[str] = []


def record(name: str, ok: bool, detail: str = ""):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    assert ok, detail


def _fixture_check(m, r, w, helpers, per_helper, naive, limit_s):
    t0 = time.perf_counter()
    p = validate(m, r, w)
    desc = assign_coefficients(p)
    desc = desc.with_c(search_c(desc).c)
    report = verify_mds(desc)
    shapes = {build_subset_matrix(desc, D).matrix.shape for D in [tuple(range(p.k)), tuple(range(p.r, p.n))]}
    rng = np.random.default_rng(2024)
    msgs = rng.integers(0, p.field.order, (200, p.k, p.alpha)).astype(p.field.dtype)
    cw = encode(msgs, desc)
    exact, reads_ok = True, True
    for u in range(p.k):
        for trial in range(200):
            counter = ReadCounter()
            got = repair_systematic(u, extract_helpers(cw[trial], u, p, counter), desc)
            exact &= np.array_equal(got, msgs[trial, u])
            reads_ok &= len(counter) == helpers and set(counter.values()) == {per_helper}
            reads_ok &= counter.total == helpers * per_helper
    elapsed = time.perf_counter() - t0
    ok = (
        report.ok
        and report.checked == math.comb(p.n, p.k)
        and shapes == {(p.B, p.B)}
        and exact
        and reads_ok
        and helpers * per_helper < naive == p.B
        and elapsed < limit_s
    )
    return ok, (
        f"{report.checked} subsets {p.B}x{p.B} ok={report.ok}; reads {helpers}x{per_helper}="
        f"{helpers * per_helper} vs {naive}; exact={exact}; {elapsed:.2f}s"
    )


def test_ac1_example1():
    ok, detail = _fixture_check(2, 2, 8, helpers=5, per_helper=2, naive=16, limit_s=1.0)
    record("AC1 (6,4,5) fixture over GF(2^8)", ok, detail)


def test_ac2_example2():
    ok, detail = _fixture_check(2, 3, 16, helpers=8, per_helper=3, naive=54, limit_s=10.0)
    record("AC2 (9,6,8) fixture over GF(2^16)", ok, detail)


def test_ac3_access_sets():
    p1, p2 = validate(2, 2), validate(2, 3)
    # 1-based labels, as in the worked examples
    g = [sorted(i + 1 for i in access_set(u, p1)) for u in range(p1.k)]
    h = [sorted(i + 1 for i in access_set(u, p2)) for u in range(p2.k)]
    ok = [set(x) for x in g] == [{1, 2}, {3, 4}, {1, 3}, {2, 4}] and [set(x) for x in h] == [
        {1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {1, 4, 7}, {2, 5, 8}, {3, 6, 9},
    ]
    record("AC3 access sets G1..G4, H1..H6", ok, f"G={g} H={h}")


def test_ac4_coefficient_search_bound():
    p = validate(2, 2, 8)
    desc = assign_coefficients(p)
    found = search_c(desc)
    bound = math.comb(6, 4) * 2**3
    final = desc.with_c(found.c)
    full = verify_mds(final)
    reduced = verify_mds_reduced(final)
    ok = (
        bound == 120
        and found.c != 0
        and found.rejected <= bound
        and full.ok
        and reduced.ok
        and full.checked == reduced.checked == 15
    )
    record(
        "AC4 c search within bound",
        ok,
        f"c={found.c} rejected={found.rejected} <= {bound}; full={full.ok} reduced={reduced.ok}",
    )


def test_ac5_msr_identities():
    bad = []
    for m, r in itertools.product((1, 2, 3), (2, 3)):
        p = validate(m, r)
        if not (p.alpha == (p.d - p.k + 1) * p.beta and p.B == p.k * p.alpha):
            bad.append((m, r))
    record("AC5 alpha=(d-k+1)beta, B=k alpha over m in {1,2,3}, r in {2,3}", not bad, f"violations={bad}")


def test_ac6_parity_supports():
    bad = []
    for m, r in ((2, 2), (2, 3)):
        p = validate(m, r)
        for x in range(r):
            for f in all_indices(p):
                sup = parity_support(x, f, p)
                r1, r2 = set(sup.r1), set(sup.r2)
                ok = len(r1) == m and len(r2) == m * r
                ok &= (r1 < r2) == (x == 0)
                ok &= (not r1 & r2) == (x != 0)
                if not ok:
                    bad.append((m, r, x, f))
    record("AC6 parity supports R1/R2", not bad, f"violations={bad}")


def test_ac7_sequential_repair_structure(ex1, ex2):
    bad = []
    for desc in (ex1, ex2):
        p = desc.params
        rng = np.random.default_rng(7)
        msg = rng.integers(0, p.field.order, (p.k, p.alpha)).astype(p.field.dtype)
        cw = encode(msg, desc)
        for u in range(p.k):
            s = repair_session(u, extract_helpers(cw, u, p), desc)
            if s.consumed[0] != {("S",), ("H", 0)}:
                bad.append((p.n, u, 0))
            for j in range(1, p.r):
                if not (s.consumed[j] <= {("S",), ("M", 0), ("H", j)} and ("H", j) in s.consumed[j]):
                    bad.append((p.n, u, j))
            if not np.array_equal(s.node(), msg[u]):
                bad.append((p.n, u, "inexact"))
    record("AC7 stage j reads only S, M(T0), H_j", not bad, f"violations={bad}")


def test_ac8_file_round_trip(ex2, tmp_path):
    p = ex2.params
    rng = np.random.default_rng(8)
    data = rng.bytes(1 << 20)
    paths_a, man = write_shards(data, ex2, tmp_path / "a")
    paths_b, _ = write_shards(data, ex2, tmp_path / "b")
    deterministic = all(a.read_bytes() == b.read_bytes() for a, b in zip(paths_a, paths_b))

    lost = int(rng.integers(0, p.k))
    original = paths_a[lost].read_bytes()
    paths_a[lost].unlink()
    counter = ReadCounter()
    repair_shard(tmp_path / "a", man, lost, counter)
    repaired = (tmp_path / "a" / shard_name(lost)).read_bytes() == original
    reads = counter.total == (p.n - 1) * p.beta * man.stripe_count

    subsets = [tuple(range(p.k)), tuple(range(p.r, p.n)), (lost,) + tuple(range(p.n - p.k + 1, p.n))]
    subsets += [tuple(sorted(rng.choice(p.n, p.k, replace=False).tolist())) for _ in range(3)]
    round_trips = [read_all(tmp_path / "a", man, D) == data for D in subsets]
    ok = deterministic and repaired and reads and all(round_trips)
    record(
        "AC8 1 MiB shard round trip",
        ok,
        f"deterministic={deterministic} repaired shard {lost} exact={repaired} "
        f"reads ok={reads} subsets {subsets} -> {round_trips}",
    )
