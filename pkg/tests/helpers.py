"""Shared generators and independent oracles for the test suite.

The oracles deliberately avoid the production code paths they check:
polynomial reduction substitutes the smallest repeated index first (the
library uses the largest), and the raw isomorphism search enumerates full
coefficient boxes with no structural pruning.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import bottcert as bc


def rand_matrix(rng, n, mag):
    return bc.make_bott_matrix(n, [[rng.randint(-mag, mag) for _ in range(i)] for i in range(n)])


def sparse_matrix(rng, n, mag, p_zero=0.6):
    return bc.make_bott_matrix(
        n,
        [[(rng.randint(-mag, mag) if rng.random() > p_zero else 0) for _ in range(i)] for i in range(n)],
    )


def rand_class(rng, A, mag):
    return bc.Class2(A, [rng.randint(-mag, mag) for _ in range(A.n)])


def reduce_oracle(raw, A):
    """Normal form by substituting the smallest repeated index first."""
    acc = {}

    def add(key, c):
        if c:
            acc[key] = acc.get(key, 0) + c
            if not acc[key]:
                del acc[key]

    work = [(tuple(sorted(m)), c) for m, c in raw.items() if c]
    while work:
        mono, coeff = work.pop()
        rep = None
        for pos in range(1, len(mono)):
            if mono[pos] == mono[pos - 1]:
                rep = pos
                break
        if rep is None:
            add(frozenset(mono), coeff)
            continue
        i = mono[rep]
        rest = mono[: rep - 1] + mono[rep + 1 :]
        for j in range(1, i):
            aij = A.a(i, j)
            if aij:
                work.append((tuple(sorted(rest + (j, i))), coeff * aij))
    return bc.CohClass(A, acc)


def fraction_det(C):
    n = len(C)
    m = [[Fraction(e) for e in row] for row in C]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        m[col] = [e * inv for e in m[col]]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col]
                m[r] = [e - f * p for e, p in zip(m[r], m[col])]
    return det


def raw_iso_search(A, B, bound):
    """Exhaustive box enumeration of valid isomorphism matrices.

    Rows range over every vector with entries in [-bound, bound]; a partial
    assignment is kept only if the relation x_i^2 = alpha_i x_i maps to a
    true identity, and complete matrices must have determinant +1 or -1.
    Exponential, so only usable for small n and bound.
    """
    n = A.n
    if B.n != n:
        return []
    box = list(itertools.product(range(-bound, bound + 1), repeat=n))
    found = []
    rows = []

    def relation_ok(i):
        img = bc.Class2(B, rows[i - 1])
        phi_alpha = [0] * n
        for j in range(1, i):
            aij = A.a(i, j)
            if aij:
                for col in range(n):
                    phi_alpha[col] += aij * rows[j - 1][col]
        res = bc.pair_product(img, img) - bc.pair_product(bc.Class2(B, phi_alpha), img)
        return res.is_zero()

    def extend(i):
        if i > n:
            if fraction_det(rows) in (1, -1):
                found.append(tuple(rows))
            return
        for cand in box:
            rows.append(cand)
            if relation_ok(i):
                extend(i + 1)
            rows.pop()

    extend(1)
    return sorted(found)


def admissible_twists(M, j, mag):
    """All v with entries in [-mag, mag], height < j and v(beta_j - v) = 0."""
    out = []
    for tail in itertools.product(range(-mag, mag + 1), repeat=j - 1):
        v = bc.Class2(M, list(tail) + [0] * (M.n - j + 1))
        if bc.pair_product(v, M.alpha(j) - v).is_zero():
            out.append(v)
    return out


def lift_chain(phi, tgt_side, i, t):
    """Lift generator i towards position t by admissible adjacent switches."""
    M = phi.target if tgt_side else phi.source
    for j in range(i, t):
        if M.a(j + 1, j) != 0:
            break
        mv = bc.switch(M, j)
        phi = bc.compose(mv.induced, phi) if tgt_side else bc.compose(phi, bc.invert(mv.induced))
        M = phi.target if tgt_side else phi.source
    return phi


def scrambled_iso(rng, A, rounds, twist_mag=2):
    """Compose the identity with random realizable moves on both sides."""
    phi = bc.identity_iso(A)
    phi = lift_chain(phi, rng.random() < 0.5, 1, A.n)
    for _ in range(rounds):
        tgt_side = rng.random() < 0.5
        M = phi.target if tgt_side else phi.source
        if rng.random() < 0.55 and M.n >= 2:
            i = rng.randint(1, max(1, M.n // 2))
            phi = lift_chain(phi, tgt_side, i, rng.randint(i + 1, M.n))
        else:
            j = rng.randint(1, M.n)
            vs = [v for v in admissible_twists(M, j, twist_mag) if not v.is_zero()]
            if vs:
                mv = bc.twist(M, j, rng.choice(vs))
                phi = bc.compose(mv.induced, phi) if tgt_side else bc.compose(phi, bc.invert(mv.induced))
    return phi


def moved_partner(rng, A, count, twist_mag=1):
    """A matrix connected to A by a short chain of random moves."""
    M = A
    for _ in range(count):
        if rng.random() < 0.5:
            js = [j for j in range(1, M.n) if M.a(j + 1, j) == 0]
            if js:
                M = bc.switch(M, rng.choice(js)).after
                continue
        j = rng.randint(1, M.n)
        vs = [v for v in admissible_twists(M, j, twist_mag) if not v.is_zero()]
        if vs:
            M = bc.twist(M, j, rng.choice(vs)).after
    return M


def block_map(A):
    """index -> (level, block id) for the generators of A, via one tower."""
    T = bc.decompose_tower(A)
    p = T.perm()
    out = {}
    for lev in range(1, T.stages + 1):
        blocks = bc.blocks_at(A, T, lev)
        for b_id, cls in enumerate(blocks.classes):
            for r in cls:
                out[r] = (lev, b_id)
    return {i: out[p[i]] for i in range(1, A.n + 1)}
