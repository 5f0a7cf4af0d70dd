"""Command line front end.

Subcommands parse matrices, isomorphisms and certificates from JSON files,
dispatch to the library, and emit canonical JSON on standard output.  Exit
codes: 0 on success, 1 on domain errors (with an {"error": ...} payload),
2 on usage errors.  Output is byte-deterministic for fixed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import BottError
from .iso import extract_sigma_eps, make_iso, max_stable, search_isos
from .ring import square
from .serialize import (
    certificate_to_obj,
    dumps_canonical,
    encode_int,
    matrix_from_obj,
    matrix_to_obj,
    verify_certificate_obj,
)
from .stabilize import stabilize_full, verify_certificate
from .structure import (
    blocks_at,
    decompose_tower,
    qtrivial_partition,
    square_zero_generators,
)

DEFAULT_SEARCH_BOUND = 6


def _load(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_matrix(path: str):
    return matrix_from_obj(_load(path))


def _cmd_ring(args) -> dict:
    A = _load_matrix(args.matrix)
    return {
        "n": A.n,
        "alpha": [[encode_int(t) for t in A.alpha(i).coeffs] for i in range(1, A.n + 1)],
        "alpha_sq_zero": [square(A.alpha(i)).is_zero() for i in range(1, A.n + 1)],
    }


def _cmd_sqzero(args) -> dict:
    A = _load_matrix(args.matrix)
    return {
        "generators": [
            {
                "index": g.index,
                "gen": [encode_int(t) for t in g.gen.coeffs],
                "primitive": [encode_int(t) for t in g.primitive_form.coeffs],
            }
            for g in square_zero_generators(A)
        ]
    }


def _cmd_decompose(args) -> dict:
    A = _load_matrix(args.matrix)
    tower = decompose_tower(A)
    perm = tower.perm()
    inv = {perm[i]: i for i in range(1, A.n + 1)}  # base index -> original index
    blocks = []
    for lev in range(1, tower.stages + 1):
        for cls in blocks_at(A, tower, lev).classes:
            blocks.append(sorted(inv[r] for r in cls))
    blocks.sort(key=lambda c: (min(c), c))
    partition = qtrivial_partition(A)
    return {
        "dims": list(tower.dims),
        "levels": [tower.level_of_index(i) for i in range(1, A.n + 1)],
        "blocks": blocks,
        "partition_if_qtrivial": list(partition) if partition is not None else None,
    }


def _cmd_iso_check(args) -> dict:
    A = _load_matrix(args.source)
    B = _load_matrix(args.target)
    obj = _load(args.iso)
    if not isinstance(obj, dict) or "C" not in obj:
        raise BottError("isomorphism file needs key 'C'")
    try:
        phi = make_iso(A, B, [[int(e) if not isinstance(e, str) else int(e, 10) for e in row] for row in obj["C"]])
    except BottError as exc:
        return {"valid": False, "reason": str(exc)}
    se = extract_sigma_eps(phi, decompose_tower(A), decompose_tower(B))
    return {
        "valid": True,
        "max_stable": max_stable(phi),
        "sigma": list(se.sigma),
        "eps_times_2": [encode_int(int(2 * e)) for e in se.eps],
    }


def _cmd_iso_search(args) -> dict:
    A = _load_matrix(args.source)
    B = _load_matrix(args.target)
    isos = search_isos(A, B, args.bound)
    return {
        "bound": args.bound,
        "isos": [[[encode_int(e) for e in row] for row in phi.C] for phi in isos],
    }


def _cmd_stabilize(args) -> dict:
    A = _load_matrix(args.source)
    B = _load_matrix(args.target)
    obj = _load(args.iso)
    if not isinstance(obj, dict) or "C" not in obj:
        raise BottError("isomorphism file needs key 'C'")
    phi = make_iso(A, B, [[int(e) if not isinstance(e, str) else int(e, 10) for e in row] for row in obj["C"]])
    cert = stabilize_full(phi)
    result = verify_certificate(cert)
    if not result:
        raise BottError(f"freshly built certificate failed verification: {result.diagnostic}")
    cert_obj = certificate_to_obj(cert)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps_canonical(cert_obj))
        return {
            "k_final": cert.k_final,
            "n": A.n,
            "out": args.out,
            "source_moves": len(cert.f_seq.moves),
            "target_moves": len(cert.g_seq.moves),
            "verified": True,
        }
    return cert_obj


def _cmd_verify_cert(args) -> dict:
    obj = _load(args.certificate)
    result = verify_certificate_obj(obj)
    if result.ok:
        return {"valid": True}
    return {"valid": False, "diagnostic": result.diagnostic}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bottcert",
        description="Cohomology rings of Bott manifolds and certified stabilization "
        "of graded ring isomorphisms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ring", help="ring presentation data of a Bott matrix")
    p.add_argument("matrix")
    p.set_defaults(func=_cmd_ring)

    p = sub.add_parser("sqzero", help="square-zero generators of degree 2")
    p.add_argument("matrix")
    p.set_defaults(func=_cmd_sqzero)

    p = sub.add_parser("decompose", help="tower dimensions, levels, blocks, partition")
    p.add_argument("matrix")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("iso-check", help="validate a degree-2 matrix as a ring isomorphism")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("iso")
    p.set_defaults(func=_cmd_iso_check)

    default_bound = int(os.environ.get("BOTT_SEARCH_BOUND", DEFAULT_SEARCH_BOUND))
    p = sub.add_parser("iso-search", help="enumerate isomorphisms with bounded entries")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--bound", type=int, default=default_bound)
    p.set_defaults(func=_cmd_iso_search)

    p = sub.add_parser("stabilize", help="produce a stabilization certificate")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("iso")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stabilize)

    p = sub.add_parser("verify-cert", help="replay and verify a certificate")
    p.add_argument("certificate")
    p.set_defaults(func=_cmd_verify_cert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        payload = args.func(args)
    except (BottError, OSError, ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        sys.stdout.write(dumps_canonical({"error": str(exc)}))
        return 1
    sys.stdout.write(dumps_canonical(payload))
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
