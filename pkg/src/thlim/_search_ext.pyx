# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled automorphism search kernel; same contract as ``thlim._search``."""

import numpy as np
cimport numpy as cnp

ctypedef long idx_t


cdef struct Ctx:
    idx_t n
    idx_t nent
    idx_t* kind
    idx_t* arity
    idx_t* coord_off
    idx_t* coords
    idx_t* out
    idx_t* symoff
    idx_t* tables
    idx_t* rem
    idx_t* inv_off
    idx_t* inv_list
    unsigned char* allowed
    idx_t* img
    idx_t* pre
    idx_t* trail
    idx_t trail_len
    idx_t* stack_v
    idx_t* stack_w
    idx_t stack_len
    idx_t* ready
    long long nodes
    long long budget
    int exhausted


cdef inline int check(Ctx* c, idx_t e):
    cdef idx_t off = c.coord_off[e]
    cdef idx_t idx = 0
    cdef idx_t t, val, y
    for t in range(c.arity[e]):
        idx = idx * c.n + c.img[c.coords[off + t]]
    val = c.tables[c.symoff[e] + idx]
    if c.kind[e] == 1:
        return val == c.out[e]
    y = c.out[e]
    if c.img[y] >= 0:
        return c.img[y] == val
    c.stack_v[c.stack_len] = y
    c.stack_w[c.stack_len] = val
    c.stack_len += 1
    return 1


cdef int assign_all(Ctx* c):
    cdef idx_t v, w, k, e, nready, r
    while c.stack_len > 0:
        c.stack_len -= 1
        v = c.stack_v[c.stack_len]
        w = c.stack_w[c.stack_len]
        if c.img[v] >= 0:
            if c.img[v] != w:
                c.stack_len = 0
                return 0
            continue
        if c.pre[w] >= 0 or not c.allowed[v * c.n + w]:
            c.stack_len = 0
            return 0
        c.img[v] = w
        c.pre[w] = v
        c.trail[c.trail_len] = v
        c.trail_len += 1
        nready = 0
        for k in range(c.inv_off[v], c.inv_off[v + 1]):
            e = c.inv_list[k]
            c.rem[e] -= 1
            if c.rem[e] == 0:
                c.ready[nready] = e
                nready += 1
        for r in range(nready):
            if not check(c, c.ready[r]):
                c.stack_len = 0
                return 0
    return 1


cdef void undo(Ctx* c, idx_t mark):
    cdef idx_t v, k
    while c.trail_len > mark:
        c.trail_len -= 1
        v = c.trail[c.trail_len]
        for k in range(c.inv_off[v], c.inv_off[v + 1]):
            c.rem[c.inv_list[k]] += 1
        c.pre[c.img[v]] = -1
        c.img[v] = -1


cdef int rec(Ctx* c, list sols, long limit):
    cdef idx_t v, w, cnt, row, mark
    cdef idx_t best = -1
    cdef idx_t best_count = c.n + 1
    cdef idx_t n = c.n
    for v in range(n):
        if c.img[v] < 0:
            cnt = 0
            row = v * n
            for w in range(n):
                if c.pre[w] < 0 and c.allowed[row + w]:
                    cnt += 1
            if cnt == 0:
                return 0
            if cnt < best_count:
                best = v
                best_count = cnt
    if best < 0:
        sols.append(tuple([c.img[v] for v in range(n)]))
        return 1 if (limit > 0 and len(sols) >= limit) else 0
    row = best * n
    for w in range(n):
        if c.pre[w] < 0 and c.allowed[row + w]:
            c.nodes += 1
            if c.nodes > c.budget:
                c.exhausted = 1
                return 1
            mark = c.trail_len
            c.stack_v[0] = best
            c.stack_w[0] = w
            c.stack_len = 1
            if assign_all(c) and rec(c, sols, limit):
                undo(c, mark)
                return 1
            undo(c, mark)
    return 0


def _arr(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.int64).reshape(-1))


def search(n, kind, arity, coord_off, coords, out, symoff, tables, rem0,
           inv_off, inv_list, allowed, limit, budget):
    cdef cnp.int64_t[::1] a_kind = _arr(kind)
    cdef cnp.int64_t[::1] a_arity = _arr(arity)
    cdef cnp.int64_t[::1] a_coord_off = _arr(coord_off)
    cdef cnp.int64_t[::1] a_coords = _arr(list(coords) + [0])
    cdef cnp.int64_t[::1] a_out = _arr(out)
    cdef cnp.int64_t[::1] a_symoff = _arr(symoff)
    cdef cnp.int64_t[::1] a_tables = _arr(list(tables) + [0])
    cdef cnp.int64_t[::1] a_rem = _arr(list(rem0) + [0])
    cdef cnp.int64_t[::1] a_inv_off = _arr(inv_off)
    cdef cnp.int64_t[::1] a_inv_list = _arr(list(inv_list) + [0])
    cdef cnp.uint8_t[::1] a_allowed = np.ascontiguousarray(np.asarray(allowed, dtype=np.uint8).reshape(-1))
    cdef idx_t nent = len(kind)
    cdef cnp.int64_t[::1] img = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] pre = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] trail = np.zeros(n + 1, dtype=np.int64)
    # every push assigns or refutes; bound by entries plus one seed
    cdef cnp.int64_t[::1] stack_v = np.zeros(nent + n + 2, dtype=np.int64)
    cdef cnp.int64_t[::1] stack_w = np.zeros(nent + n + 2, dtype=np.int64)
    cdef cnp.int64_t[::1] ready = np.zeros(nent + 1, dtype=np.int64)
    cdef Ctx c
    c.n = n
    c.nent = nent
    # empty tables still need a valid pointer; padded by one above
    if nent == 0:
        a_kind = _arr([0]); a_arity = _arr([0]); a_coord_off = _arr([0])
        a_out = _arr([0]); a_symoff = _arr([0])
    c.kind = <idx_t*>&a_kind[0]
    c.arity = <idx_t*>&a_arity[0]
    c.coord_off = <idx_t*>&a_coord_off[0]
    c.coords = <idx_t*>&a_coords[0]
    c.out = <idx_t*>&a_out[0]
    c.symoff = <idx_t*>&a_symoff[0]
    c.tables = <idx_t*>&a_tables[0]
    c.rem = <idx_t*>&a_rem[0]
    c.inv_off = <idx_t*>&a_inv_off[0]
    c.inv_list = <idx_t*>&a_inv_list[0]
    c.allowed = <unsigned char*>&a_allowed[0]
    c.img = <idx_t*>&img[0]
    c.pre = <idx_t*>&pre[0]
    c.trail = <idx_t*>&trail[0]
    c.trail_len = 0
    c.stack_v = <idx_t*>&stack_v[0]
    c.stack_w = <idx_t*>&stack_w[0]
    c.stack_len = 0
    c.ready = <idx_t*>&ready[0]
    c.nodes = 0
    c.budget = budget
    c.exhausted = 0

    sols = []
    cdef idx_t e
    cdef int feasible = 1
    for e in range(nent):
        if a_rem[e] == 0:
            if not check(&c, e):
                feasible = 0
                break
    if feasible and assign_all(&c):
        rec(&c, sols, limit)
    return sols, not c.exhausted, c.nodes
