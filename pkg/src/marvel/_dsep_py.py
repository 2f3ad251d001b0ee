"""Pure-Python d-separation kernel over integer bitmasks.

Twin of the compiled kernel in ``_dsepc.pyx``. Python ints are unbounded, so
this version works for any vertex count; the compiled one is capped at 64.

The query uses the classic criterion: x and y are d-separated by S iff they
are disconnected in the moralized ancestral subgraph of {x, y} | S with the
vertices of S deleted.
"""

from __future__ import annotations

from typing import Sequence


def dsep_bitmask(
    pmask: Sequence[int], cmask: Sequence[int], x: int, y: int, smask: int
) -> bool:
    """True iff x and y are d-separated given the vertex set encoded by smask.

    ``pmask[v]`` has bit i set iff i is a parent of v; ``cmask`` likewise for
    children. Callers guarantee x != y and that neither is in smask.
    """
    seed = (1 << x) | (1 << y) | smask
    anc = seed
    frontier = seed
    while frontier:
        nxt = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            nxt |= pmask[v]
        nxt &= ~anc
        anc |= nxt
        frontier = nxt

    # Moral adjacency restricted to the ancestral set: drop directions, then
    # connect every pair of co-parents of a common ancestral child.
    madj = [0] * len(pmask)
    a = anc
    while a:
        w = (a & -a).bit_length() - 1
        a &= a - 1
        madj[w] |= (pmask[w] | cmask[w]) & anc
        pw = pmask[w] & anc
        q = pw
        while q:
            u = (q & -q).bit_length() - 1
            q &= q - 1
            madj[u] |= pw & ~(1 << u)

    ybit = 1 << y
    visited = 1 << x
    frontier = visited
    while frontier:
        nxt = 0
        f = frontier
        while f:
            u = (f & -f).bit_length() - 1
            f &= f - 1
            nxt |= madj[u]
        if nxt & ybit:
            return False
        nxt &= ~visited & ~smask
        visited |= nxt
        frontier = nxt
    return True
