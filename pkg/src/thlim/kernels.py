"""Backend selection for the automorphism search kernel.

The compiled extension is used when it imports; otherwise the pure-Python
twin.  Set ``THLIM_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
from functools import lru_cache

from . import _search as _pure

try:
    if os.environ.get("THLIM_PURE"):
        raise ImportError("pure backend requested")
    from . import _search_ext as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _pure.search}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.search

BACKEND = "compiled" if _compiled is not None else "python"


@lru_cache(maxsize=256)
def _encode_cached(s):
    return _encode(s)


def encode(s):
    """Flat arrays describing every table entry of ``s`` (names are ignored)."""
    return _encode_cached(s)


def _encode(s):
    n = s.size
    kind, arity, coord_off, coords, out, symoff = [], [], [], [], [], []
    tables = []
    inv = [[] for _ in range(n)]

    def add_symbol(k, a, table):
        base = len(tables)
        tables.extend(table)
        for idx, val in enumerate(table):
            tup = []
            x = idx
            for _ in range(a):
                tup.append(x % n)
                x //= n
            tup.reverse()
            e = len(kind)
            kind.append(k)
            arity.append(a)
            coord_off.append(len(coords))
            coords.extend(tup)
            out.append(val)
            symoff.append(base)
            distinct = set(tup)
            for v in distinct:
                inv[v].append(e)
            rem0.append(len(distinct))

    rem0 = []
    for fname, a in s.signature.functions:
        add_symbol(0, a, list(s.table(fname)))
    for rname, a in s.signature.relations:
        rel = s.relations[rname]
        table = []
        for idx in range(n**a):
            tup = []
            x = idx
            for _ in range(a):
                tup.append(x % n)
                x //= n
            table.append(1 if tuple(reversed(tup)) in rel else 0)
        add_symbol(1, a, table)
    inv_off = [0]
    inv_list = []
    for v in range(n):
        inv_list.extend(inv[v])
        inv_off.append(len(inv_list))
    return (kind, arity, coord_off, coords, out, symoff, tables, rem0, inv_off, inv_list)


def refine_colors(s, pins=()):
    """Stable colouring of two copies of ``s`` (domain then codomain).

    Pin ``k`` = ``(v, w)`` individualises ``v`` in the domain copy and ``w``
    in the codomain copy with the same label, so any automorphism honouring
    the pins maps each element to one of the same final colour.
    """
    n = s.size
    kind, arity, coord_off, coords, out, symoff, tables, _, _, _ = encode(s)
    col = [0] * (2 * n)
    for k, (v, w) in enumerate(pins):
        col[v] = col[n + w] = k + 1
    ncolors = len(set(col))
    while True:
        items = [[] for _ in col]
        for e in range(len(kind)):
            if kind[e] == 1 and not out[e]:
                continue
            tup = coords[coord_off[e]: coord_off[e] + arity[e]]
            for side in (0, n):
                cs = tuple(col[side + x] for x in tup)
                if kind[e] == 0:
                    y = col[side + out[e]]
                    items[side + out[e]].append(("fo", symoff[e], cs))
                    for p, x in enumerate(tup):
                        items[side + x].append(("f", symoff[e], p, cs, y))
                else:
                    for p, x in enumerate(tup):
                        items[side + x].append(("r", symoff[e], p, cs))
        index = {}
        new = [index.setdefault((c, tuple(sorted(it))), len(index)) for c, it in zip(col, items)]
        if len(index) == ncolors:
            return new
        col, ncolors = new, len(index)


def run_search(s, allowed, limit=0, budget=10**7, backend=None):
    """Return ``(solutions, complete, nodes)``.

    ``allowed`` is a flat ``n*n`` 0/1 sequence: entry ``v*n + w`` permits
    ``v -> w``.  Rows with a single permitted value act as pins; candidates
    are first cut down by colour refinement.  ``limit=0`` enumerates
    everything.
    """
    fn = BACKENDS[backend or BACKEND]
    n = s.size
    allowed = list(allowed)
    pins = []
    for v in range(n):
        row = allowed[v * n:(v + 1) * n]
        if sum(row) == 1:
            pins.append((v, row.index(1)))
    col = refine_colors(s, pins)
    for v in range(n):
        for w in range(n):
            if col[v] != col[n + w]:
                allowed[v * n + w] = 0
    return fn(n, *encode(s), allowed, limit, budget)
