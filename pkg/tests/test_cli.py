import json
import os

import pytest

from msrcode.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def built(tmp_path, capsys):
    man = tmp_path / "code.txt"
    code, res = run_json(capsys, "build", "--m", 2, "--r", 2, "--field-bits", 8, "--out", man)
    assert code == 0
    return man, res


def test_build_example1(built):
    man, res = built
    assert res["subsets_verified"] == 15
    assert res["c"] >= 1 and "warning" not in res
    assert man.exists()


def test_build_example2(tmp_path, capsys):
    code, res = run_json(capsys, "build", "--m", 2, "--r", 3, "--field-bits", 16, "--out", tmp_path / "m")
    assert code == 0 and res["subsets_verified"] == 84
    assert res["field_bound"] == 84 * 27


def test_build_below_bound(tmp_path, capsys):
    # a valid c exists in GF(2^8) here, so the bound violation is only a warning
    code, res = run_json(capsys, "build", "--m", 2, "--r", 3, "--field-bits", 8, "--out", tmp_path / "m")
    assert code == 0
    assert "2268" in res["warning"]


def test_build_not_found_exits_1(tmp_path, capsys, monkeypatch):
    import msrcode.construction as construction

    monkeypatch.setattr(construction, "verify_mds", lambda *a, **kw: construction.MdsReport(1, [(0, 1, 2, 3, 4, 5)]))
    code, res = run_json(capsys, "build", "--m", 2, "--r", 3, "--field-bits", 8, "--out", tmp_path / "m")
    assert code == 1
    assert "2268" in res["error"]


def test_human_and_json_agree(tmp_path, capsys):
    argv = ["build", "--m", 1, "--r", 2, "--field-bits", 8, "--out", tmp_path / "m"]
    _, res = run_json(capsys, *argv)
    _, out, _ = run(capsys, *argv)
    lines = dict(line.split(": ", 1) for line in out.splitlines())
    for key in ("c", "subsets_verified", "n", "k", "alpha", "beta"):
        assert lines[key] == str(res[key])


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["build", "--m", "2"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "build", "--m", 0, "--r", 2, "--out", tmp_path / "m")
    assert code == 2


def test_full_pipeline(built, tmp_path, capsys):
    man, _ = built
    data = os.urandom(3000)
    src = tmp_path / "in.bin"
    src.write_bytes(data)
    shards = tmp_path / "shards"
    code, res = run_json(capsys, "encode", "--manifest", man, "--input", src, "--outdir", shards)
    assert code == 0 and len(res["shards"]) == 6
    full = shards / "manifest.txt"

    (shards / "shard_003.msra").unlink()
    code, res = run_json(capsys, "repair", "--manifest", full, "--failed", "2,1")
    assert code == 0
    assert (res["total"], res["baseline"], res["ratio"]) == (10, 16, 0.625)
    assert res["symbols_read_per_stripe"] == 10

    code, res = run_json(capsys, "verify", "--manifest", full)
    assert code == 0 and res["subsets_checked"] == 15

    out = tmp_path / "out.bin"
    code, _ = run_json(capsys, "reconstruct", "--manifest", full, "--nodes", "0,3,4,5", "--output", out)
    assert code == 0 and out.read_bytes() == data

    code, res = run_json(capsys, "bench", "--manifest", full, "--trials", 5)
    assert code == 0 and res["mean_symbols_read"] == 10.0 and res["repairs"] == 20


def test_repair_errors(built, tmp_path, capsys):
    man, _ = built
    src = tmp_path / "in.bin"
    src.write_bytes(b"some data")
    shards = tmp_path / "s"
    run_json(capsys, "encode", "--manifest", man, "--input", src, "--outdir", shards)
    full = shards / "manifest.txt"
    (shards / "shard_000.msra").unlink()
    (shards / "shard_001.msra").unlink()
    code, res = run_json(capsys, "repair", "--manifest", full, "--node-ordinal", 0)
    assert code == 1 and "reconstruct" in res["error"]
    code, _, _ = run(capsys, "repair", "--manifest", full, "--node-ordinal", 5)
    assert code == 2
    code, _, _ = run(capsys, "repair", "--manifest", full)
    assert code == 2
    code, _, _ = run(capsys, "reconstruct", "--manifest", full, "--nodes", "0,1", "--output", tmp_path / "o")
    assert code == 2


def test_io_errors(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--manifest", tmp_path / "nope.txt")
    assert code == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("format: other\n")
    code, _, _ = run(capsys, "verify", "--manifest", bad)
    assert code == 3


def test_repair_on_example2(tmp_path, capsys):
    man = tmp_path / "m"
    run_json(capsys, "build", "--m", 2, "--r", 3, "--out", man)
    src = tmp_path / "in.bin"
    src.write_bytes(os.urandom(1000))
    run_json(capsys, "encode", "--manifest", man, "--input", src, "--outdir", tmp_path / "s")
    (tmp_path / "s" / "shard_000.msra").unlink()
    code, res = run_json(capsys, "repair", "--manifest", tmp_path / "s" / "manifest.txt", "--failed", "1,0")
    assert code == 0 and (res["total"], res["baseline"]) == (24, 54)
