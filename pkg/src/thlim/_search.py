"""Pure-Python automorphism search kernel.

Mirrors ``_search_ext.pyx`` line for line; both take the flat encoding built
by :func:`thlim.kernels.encode`.  The search assigns one element at a time,
most-constrained element first, and propagates function values: once all
inputs of a table entry are mapped, the image of its output is forced.
"""


def search(n, kind, arity, coord_off, coords, out, symoff, tables, rem0,
           inv_off, inv_list, allowed, limit, budget):
    img = [-1] * n
    pre = [-1] * n
    rem = list(rem0)
    trail = []
    sols = []
    state = {"nodes": 0, "exhausted": False}

    def check(e, stack):
        off = coord_off[e]
        idx = 0
        for t in range(arity[e]):
            idx = idx * n + img[coords[off + t]]
        val = tables[symoff[e] + idx]
        if kind[e] == 1:
            return val == out[e]
        y = out[e]
        if img[y] >= 0:
            return img[y] == val
        stack.append((y, val))
        return True

    def assign_all(stack):
        while stack:
            v, w = stack.pop()
            if img[v] >= 0:
                if img[v] != w:
                    return False
                continue
            if pre[w] >= 0 or not allowed[v * n + w]:
                return False
            img[v] = w
            pre[w] = v
            trail.append(v)
            ready = []
            for k in range(inv_off[v], inv_off[v + 1]):
                e = inv_list[k]
                rem[e] -= 1
                if rem[e] == 0:
                    ready.append(e)
            for e in ready:
                if not check(e, stack):
                    return False
        return True

    def undo(mark):
        while len(trail) > mark:
            v = trail.pop()
            for k in range(inv_off[v], inv_off[v + 1]):
                rem[inv_list[k]] += 1
            pre[img[v]] = -1
            img[v] = -1

    def rec():
        best = -1
        best_count = n + 1
        for v in range(n):
            if img[v] < 0:
                c = 0
                row = v * n
                for w in range(n):
                    if pre[w] < 0 and allowed[row + w]:
                        c += 1
                if c == 0:
                    return False
                if c < best_count:
                    best, best_count = v, c
        if best < 0:
            sols.append(tuple(img))
            return 0 < limit <= len(sols)
        row = best * n
        for w in range(n):
            if pre[w] < 0 and allowed[row + w]:
                state["nodes"] += 1
                if state["nodes"] > budget:
                    state["exhausted"] = True
                    return True
                mark = len(trail)
                if assign_all([(best, w)]) and rec():
                    undo(mark)
                    return True
                undo(mark)
        return False

    stack = []
    feasible = all(check(e, stack) for e in range(len(kind)) if rem0[e] == 0)
    if feasible and assign_all(stack):
        rec()
    return sols, not state["exhausted"], state["nodes"]
