"""
Files, shards and a lost node
=============================

A file is cut into stripes of B symbols and each stripe is encoded.  Shard u
holds node u's symbols for every stripe.  We delete a systematic shard,
regenerate it from the others, then rebuild the file from k arbitrary shards.
The same steps are available from the shell as ``msrcode encode``,
``msrcode repair`` and ``msrcode reconstruct``.
"""
import os
import tempfile
from pathlib import Path

from msrcode import build_code, validate
from msrcode.codec import ReadCounter
from msrcode.shardio import read_all, repair_shard, serialize_manifest, write_shards

desc = build_code(validate(2, 3, 16))
data = os.urandom(200_000)
workdir = Path(tempfile.mkdtemp())

###############################################################################
# Encode.  The manifest records every coefficient, the file length and a CRC
# per shard.

paths, man = write_shards(data, desc, workdir)
print(serialize_manifest(man))

###############################################################################
# Lose shard 4 and regenerate it.  Each helper contributes 3 of its 9 symbols
# per stripe.

before = paths[4].read_bytes()
paths[4].unlink()
counter = ReadCounter()
repair_shard(workdir, man, 4, counter)
print("identical:", paths[4].read_bytes() == before)
print("symbols read per stripe:", counter.total // man.stripe_count, "of", man.params.B)

###############################################################################
# Any six shards give the file back, including ones made mostly of parity.

for nodes in [(0, 1, 2, 3, 4, 5), (3, 4, 5, 6, 7, 8), (0, 2, 4, 6, 7, 8)]:
    print(nodes, read_all(workdir, man, nodes) == data)
