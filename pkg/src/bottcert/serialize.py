"""JSON readers and writers with canonical, byte-deterministic output.

Exact integers are emitted as JSON numbers while |x| < 2^53 and as decimal
strings beyond that; readers accept both forms.  Writers sort object keys
and keep arrays in index order, so equal values serialize to equal bytes.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import BottError, ShapeError
from .iso import GradedIso, make_iso
from .moves import Move, MoveSeq, ReplayResult, switch, twist
from .ring import BottMatrix, Class2, make_bott_matrix
from .stabilize import StabilizationCertificate, verify_certificate

CERT_SCHEMA = "bott-stabilization-cert/1"
_JSON_INT_LIMIT = 2**53


def encode_int(x: int) -> int | str:
    return x if -_JSON_INT_LIMIT < x < _JSON_INT_LIMIT else str(x)


def decode_int(v: Any) -> int:
    if isinstance(v, bool):
        raise ShapeError("expected an integer, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 10)
        except ValueError as exc:
            raise ShapeError(f"not a decimal integer: {v!r}") from exc
    raise ShapeError(f"expected an integer, got {type(v).__name__}")


def dumps_canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def matrix_to_obj(A: BottMatrix) -> dict:
    return {"n": A.n, "rows": [[encode_int(e) for e in row] for row in A.rows]}


def matrix_from_obj(obj: Any) -> BottMatrix:
    if not isinstance(obj, dict) or "n" not in obj or "rows" not in obj:
        raise ShapeError("matrix object needs keys 'n' and 'rows'")
    rows = obj["rows"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ShapeError("'rows' must be a list of lists")
    return make_bott_matrix(decode_int(obj["n"]), [[decode_int(e) for e in r] for r in rows])


def class2_to_obj(c: Class2) -> dict:
    return {"coeffs": [encode_int(t) for t in c.coeffs]}


def class2_from_obj(obj: Any, context: BottMatrix) -> Class2:
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ShapeError("class object needs key 'coeffs'")
    return Class2(context, [decode_int(t) for t in obj["coeffs"]])


def iso_to_obj(phi: GradedIso) -> dict:
    return {"C": [[encode_int(e) for e in row] for row in phi.C]}


def iso_matrix_from_obj(obj: Any) -> list[list[int]]:
    if not isinstance(obj, dict) or "C" not in obj:
        raise ShapeError("isomorphism object needs key 'C'")
    C = obj["C"]
    if not isinstance(C, list) or not all(isinstance(r, list) for r in C):
        raise ShapeError("'C' must be a list of rows")
    return [[decode_int(e) for e in row] for row in C]


def move_to_obj(mv: Move) -> dict:
    if mv.kind == "switch":
        return {"kind": "switch", "j": mv.j}
    return {"kind": "twist", "j": mv.j, "v": [encode_int(t) for t in mv.v.coeffs]}


def move_from_obj(obj: Any, before: BottMatrix) -> Move:
    if not isinstance(obj, dict) or "kind" not in obj or "j" not in obj:
        raise ShapeError("move object needs keys 'kind' and 'j'")
    kind = obj["kind"]
    j = decode_int(obj["j"])
    if kind == "switch":
        return switch(before, j)
    if kind == "twist":
        if "v" not in obj:
            raise ShapeError("twist move needs key 'v'")
        v = Class2(before, [decode_int(t) for t in obj["v"]])
        return twist(before, j, v)
    raise ShapeError(f"unknown move kind {kind!r}")


def seq_to_obj(seq: MoveSeq) -> dict:
    return {"start": matrix_to_obj(seq.start), "moves": [move_to_obj(m) for m in seq.moves]}


def seq_from_obj(obj: Any) -> MoveSeq:
    if not isinstance(obj, dict) or "start" not in obj or "moves" not in obj:
        raise ShapeError("move sequence object needs keys 'start' and 'moves'")
    cur = matrix_from_obj(obj["start"])
    start = cur
    moves = []
    for mv_obj in obj["moves"]:
        mv = move_from_obj(mv_obj, cur)
        moves.append(mv)
        cur = mv.after
    return MoveSeq.build(start, moves)


def certificate_to_obj(cert: StabilizationCertificate) -> dict:
    return {
        "schema": CERT_SCHEMA,
        "A": matrix_to_obj(cert.A),
        "B": matrix_to_obj(cert.B),
        "phi": iso_to_obj(cert.phi),
        "f_seq": seq_to_obj(cert.f_seq),
        "g_seq": seq_to_obj(cert.g_seq),
        "phi_prime": iso_to_obj(cert.phi_prime),
        "k_final": encode_int(cert.k_final),
    }


def certificate_from_obj(obj: Any) -> StabilizationCertificate:
    if not isinstance(obj, dict):
        raise ShapeError("certificate must be a JSON object")
    if obj.get("schema") != CERT_SCHEMA:
        raise ShapeError(f"unsupported certificate schema {obj.get('schema')!r}")
    for key in ("A", "B", "phi", "f_seq", "g_seq", "phi_prime", "k_final"):
        if key not in obj:
            raise ShapeError(f"certificate is missing key {key!r}")
    A = matrix_from_obj(obj["A"])
    B = matrix_from_obj(obj["B"])
    f_seq = seq_from_obj(obj["f_seq"])
    g_seq = seq_from_obj(obj["g_seq"])
    phi = make_iso(A, B, iso_matrix_from_obj(obj["phi"]))
    phi_prime = make_iso(f_seq.start, g_seq.end, iso_matrix_from_obj(obj["phi_prime"]))
    return StabilizationCertificate(
        A=A,
        B=B,
        phi=phi,
        f_seq=f_seq,
        g_seq=g_seq,
        phi_prime=phi_prime,
        k_final=decode_int(obj["k_final"]),
    )


def verify_certificate_obj(obj: Any) -> ReplayResult:
    """Verify a parsed certificate object; bad data yields False, not a raise."""
    try:
        cert = certificate_from_obj(obj)
    except (BottError, ValueError, TypeError, KeyError, IndexError) as exc:
        return ReplayResult(False, f"certificate does not parse: {exc}")
    return verify_certificate(cert)
