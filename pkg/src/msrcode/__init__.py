"""Access-optimal MSR regenerating codes with sub-packetization r^m.

Parameters (n = k + r, k = m r, d = n - 1), alpha = r^m symbols per node.
Any systematic node is rebuilt by reading beta = alpha / r symbols from each
of the other n - 1 nodes; any k nodes recover the data.
"""

from .codec import (
    ReadCounter,
    access_report,
    encode,
    extract_helpers,
    reconstruct,
    repair_session,
    repair_systematic,
)
from .construction import (
    CodeDescription,
    assign_coefficients,
    build_code,
    build_subset_matrix,
    find_c,
    parity_support,
    search_c,
    verify_mds,
)
from .galois import GF, FieldSpec, get_field
from .params import CodeParams, NodeId, access_set, validate

__all__ = [
    "GF", "FieldSpec", "get_field",
    "CodeParams", "NodeId", "access_set", "validate",
    "CodeDescription", "assign_coefficients", "build_code", "build_subset_matrix",
    "find_c", "parity_support", "search_c", "verify_mds",
    "ReadCounter", "access_report", "encode", "extract_helpers", "reconstruct",
    "repair_session", "repair_systematic",
]
