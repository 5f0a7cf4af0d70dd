"""Realizable elementary operations on Bott matrices.

Two moves transform a Bott matrix while inducing an isomorphism of
cohomology rings that comes from a diffeomorphism of the underlying
manifolds:

* switch(j): when b_{j+1,j} = 0, exchange rows and columns j and j+1; the
  induced map swaps the two generators.
* twist(j, v): for integral v in F_{j-1} with v(beta_j - v) = 0, replace
  row j by beta_j - 2v; the induced map sends y_j to y_j + v and is the
  identity on F_{j-1}.

Rows above j of a twisted matrix become beta_i + b_ij v; this completion is
forced by requiring the induced map to be a ring isomorphism, and every
constructed move is machine-verified by full relation checking rather than
trusted.  Sequences of moves chain matrices and compose the induced
isomorphisms, and can be replayed from scratch for certification.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContextMismatch, RangeError, SwitchBlocked, TwistInvalid
from .iso import GradedIso, compose, identity_iso, make_iso
from .ring import BottMatrix, Class2, pair_product


@dataclass(frozen=True)
class Move:
    """One switch or twist together with its matrices and induced isomorphism."""

    kind: str  # "switch" | "twist"
    j: int
    v: Class2 | None
    before: BottMatrix
    after: BottMatrix
    induced: GradedIso


def switch(B: BottMatrix, j: int) -> Move:
    """Exchange adjacent stages j and j+1; requires b_{j+1,j} = 0."""
    n = B.n
    if not 1 <= j < n:
        raise RangeError(f"switch position {j} outside 1..{n - 1}")
    if B.a(j + 1, j) != 0:
        raise SwitchBlocked(f"entry ({j + 1},{j}) is {B.a(j + 1, j)}, must be 0")

    def swap(i: int) -> int:
        return j + 1 if i == j else j if i == j + 1 else i

    rows = tuple(
        tuple(B.a(swap(i), swap(col)) for col in range(1, i)) for i in range(1, n + 1)
    )
    after = BottMatrix(n, rows)
    C = tuple(
        tuple(1 if col == swap(i) else 0 for col in range(1, n + 1))
        for i in range(1, n + 1)
    )
    induced = make_iso(B, after, C)
    return Move("switch", j, None, B, after, induced)


def twist(B: BottMatrix, j: int, v: Class2) -> Move:
    """Replace row j by beta_j - 2v for v in F_{j-1} with v(beta_j - v) = 0."""
    n = B.n
    if not 1 <= j <= n:
        raise RangeError(f"twist position {j} outside 1..{n}")
    if v.context != B:
        raise ContextMismatch("twist parameter lives over a different matrix")
    if v.height() >= j:
        raise TwistInvalid(f"v has height {v.height()}, needs < {j}")
    beta_j = B.alpha(j)
    if not pair_product(v, beta_j - v).is_zero():
        raise TwistInvalid(f"v(beta_j - v) != 0 for v={v!r}")

    rows = []
    for i in range(1, n + 1):
        if i < j:
            rows.append(B.rows[i - 1])
        elif i == j:
            rows.append(tuple(B.a(j, col) - 2 * v[col] for col in range(1, j)))
        else:
            bij = B.a(i, j)
            rows.append(
                tuple(
                    B.a(i, col) + (bij * v[col] if col < j else 0)
                    for col in range(1, i)
                )
            )
    after = BottMatrix(n, tuple(rows))
    C = tuple(
        tuple(
            (1 if col == i else 0) + (v[col] if i == j and col < j else 0)
            for col in range(1, n + 1)
        )
        for i in range(1, n + 1)
    )
    induced = make_iso(B, after, C)
    return Move("twist", j, v, B, after, induced)


def invert_move(mv: Move) -> Move:
    """The move undoing mv, constructed (and hence verified) from mv.after."""
    if mv.kind == "switch":
        return switch(mv.after, mv.j)
    v_hat = Class2(mv.after, mv.v.coeffs)
    return twist(mv.after, mv.j, -v_hat)


@dataclass(frozen=True)
class MoveSeq:
    """Chained moves with their start/end matrices and composite isomorphism."""

    start: BottMatrix
    moves: tuple[Move, ...]
    end: BottMatrix
    composite: GradedIso

    @staticmethod
    def build(start: BottMatrix, moves) -> "MoveSeq":
        moves = tuple(moves)
        comp = identity_iso(start)
        cur = start
        for idx, mv in enumerate(moves):
            if mv.before != cur:
                raise ContextMismatch(f"move {idx} starts at {mv.before!r}, expected {cur!r}")
            comp = compose(mv.induced, comp)
            cur = mv.after
        return MoveSeq(start, moves, cur, comp)


def invert_seq(seq: MoveSeq) -> MoveSeq:
    """Reverse a sequence, inverting each move; runs from seq.end to seq.start."""
    return MoveSeq.build(seq.end, tuple(invert_move(mv) for mv in reversed(seq.moves)))


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    diagnostic: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def replay(seq: MoveSeq) -> ReplayResult:
    """Re-verify a sequence from scratch: chaining, each move, the composite."""
    cur = seq.start
    comp = identity_iso(seq.start)
    for idx, mv in enumerate(seq.moves):
        if mv.before != cur:
            return ReplayResult(False, f"move {idx}: chain broken, before != previous after")
        try:
            if mv.kind == "switch":
                fresh = switch(mv.before, mv.j)
            elif mv.kind == "twist":
                fresh = twist(mv.before, mv.j, Class2(mv.before, mv.v.coeffs))
            else:
                return ReplayResult(False, f"move {idx}: unknown kind {mv.kind!r}")
        except Exception as exc:  # invalid parameters surface as a diagnostic
            return ReplayResult(False, f"move {idx}: {exc}")
        if fresh.after != mv.after:
            return ReplayResult(False, f"move {idx}: recorded result matrix is wrong")
        if fresh.induced.C != mv.induced.C:
            return ReplayResult(False, f"move {idx}: recorded induced map is wrong")
        comp = compose(fresh.induced, comp)
        cur = fresh.after
    if cur != seq.end:
        return ReplayResult(False, "end matrix does not match the chain")
    if comp.C != seq.composite.C:
        return ReplayResult(False, "composite does not match the chain")
    return ReplayResult(True, None)
