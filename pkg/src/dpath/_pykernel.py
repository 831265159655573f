"""Pure-Python exact search kernels.

Both kernels work on a CSR adjacency (``indptr``, ``indices``; neighbours
sorted ascending) and return ``(status, paths, nodes)`` where status is
FOUND, NONE or BUDGET.  The compiled kernel in ``_kernel.pyx`` mirrors this
file branch for branch, so both return identical witnesses.
"""

FOUND = 0
NONE = 1
BUDGET = 2


class _OutOfBudget(Exception):
    pass


def pack_valid(n, indptr, indices, is_term, dem, k, budget):
    """Search for k vertex-disjoint valid paths.

    ``dem`` is a flat n*n bytes-like demand adjacency matrix.  Paths are
    built from their smaller endpoint and starts increase along the
    sequence; only minimal paths are explored (a path stops at the first
    demand neighbour of its start).
    """
    if k <= 0:
        return FOUND, [], 0
    used = bytearray(n)
    terms = [v for v in range(n) if is_term[v]]
    paths = []
    cur = []
    nodes = [0]

    def tick():
        nodes[0] += 1
        if nodes[0] > budget:
            raise _OutOfBudget

    def has_pair():
        # some free demand pair inside one component of the free graph
        comp = [-1] * n
        c = 0
        for s in terms:
            if used[s] or comp[s] >= 0:
                continue
            comp[s] = c
            stack = [s]
            while stack:
                v = stack.pop()
                for idx in range(indptr[v], indptr[v + 1]):
                    w = indices[idx]
                    if not used[w] and comp[w] < 0:
                        comp[w] = c
                        stack.append(w)
            c += 1
        for s in terms:
            if used[s]:
                continue
            base = s * n
            for t in terms:
                if t > s and not used[t] and dem[base + t] and comp[t] == comp[s]:
                    return True
        return False

    def reach(s, v):
        # can v reach a free demand neighbour t > s of s
        seen = bytearray(n)
        seen[v] = 1
        stack = [v]
        base = s * n
        while stack:
            x = stack.pop()
            for idx in range(indptr[x], indptr[x + 1]):
                w = indices[idx]
                if used[w] or seen[w]:
                    continue
                if dem[base + w]:
                    if w > s:
                        return True
                    continue
                seen[w] = 1
                stack.append(w)
        return False

    def rec(i, last):
        if i == k:
            return True
        tick()
        if not has_pair():
            return False
        for s in terms:
            if s <= last or used[s]:
                continue
            used[s] = 1
            cur.append(s)
            if extend(s, s, i):
                return True
            cur.pop()
            used[s] = 0
        return False

    def extend(s, v, i):
        tick()
        if not reach(s, v):
            return False
        base = s * n
        for idx in range(indptr[v], indptr[v + 1]):
            w = indices[idx]
            if used[w]:
                continue
            if dem[base + w]:
                if w < s:
                    continue
                used[w] = 1
                cur.append(w)
                paths.append(list(cur))
                saved = cur[:]
                cur.clear()
                if rec(i + 1, s):
                    return True
                cur.extend(saved)
                paths.pop()
                cur.pop()
                used[w] = 0
                continue
            used[w] = 1
            cur.append(w)
            if extend(s, w, i):
                return True
            cur.pop()
            used[w] = 0
        return False

    try:
        ok = rec(0, -1)
    except _OutOfBudget:
        return BUDGET, None, nodes[0]
    return (FOUND, paths, nodes[0]) if ok else (NONE, None, nodes[0])


def link_pairs(n, indptr, indices, srcs, dsts, budget):
    """Search for vertex-disjoint paths joining srcs[i] to dsts[i], in order."""
    k = len(srcs)
    owner = [-1] * n
    for i in range(k):
        for v in (srcs[i], dsts[i]):
            if owner[v] >= 0 and owner[v] != i:
                return NONE, None, 0
            owner[v] = i
    used = bytearray(n)
    paths = []
    cur = []
    nodes = [0]

    def tick():
        nodes[0] += 1
        if nodes[0] > budget:
            raise _OutOfBudget

    def connected(i, v):
        t = dsts[i]
        if v == t:
            return True
        seen = bytearray(n)
        seen[v] = 1
        stack = [v]
        while stack:
            x = stack.pop()
            for idx in range(indptr[x], indptr[x + 1]):
                w = indices[idx]
                if w == t:
                    return True
                if used[w] or seen[w] or owner[w] >= 0:
                    continue
                seen[w] = 1
                stack.append(w)
        return False

    def rec(i):
        if i == k:
            return True
        tick()
        for j in range(i, k):
            if not connected(j, srcs[j]):
                return False
        s = srcs[i]
        used[s] = 1
        cur.append(s)
        if s == dsts[i]:
            paths.append(list(cur))
            cur.clear()
            if rec(i + 1):
                return True
            paths.pop()
            cur.append(s)
        elif extend(i, s):
            return True
        cur.pop()
        used[s] = 0
        return False

    def extend(i, v):
        tick()
        if not connected(i, v):
            return False
        t = dsts[i]
        for idx in range(indptr[v], indptr[v + 1]):
            w = indices[idx]
            if w == t:
                used[w] = 1
                cur.append(w)
                paths.append(list(cur))
                saved = cur[:]
                cur.clear()
                if rec(i + 1):
                    return True
                cur.extend(saved)
                paths.pop()
                cur.pop()
                used[w] = 0
                continue
            if used[w] or owner[w] >= 0:
                continue
            used[w] = 1
            cur.append(w)
            if extend(i, w):
                return True
            cur.pop()
            used[w] = 0
        return False

    try:
        ok = rec(0)
    except _OutOfBudget:
        return BUDGET, None, nodes[0]
    return (FOUND, paths, nodes[0]) if ok else (NONE, None, nodes[0])
