# Compiled twin of _pykernel; keep the branch order identical.

from libc.stdlib cimport malloc, free
from libc.string cimport memset

FOUND = 0
NONE_ = 1
BUDGET = 2


cdef class _Graph:
    cdef int n
    cdef int *indptr
    cdef int *indices
    cdef unsigned char *used
    cdef unsigned char *seen
    cdef int *stack
    cdef long long nodes
    cdef long long budget

    def __cinit__(self, int n, indptr, indices, *rest):
        cdef int i
        self.n = n
        self.indptr = <int *> malloc((n + 1) * sizeof(int))
        self.indices = <int *> malloc((len(indices) + 1) * sizeof(int))
        self.used = <unsigned char *> malloc(n + 1)
        self.seen = <unsigned char *> malloc(n + 1)
        self.stack = <int *> malloc((n + 1) * sizeof(int))
        for i in range(n + 1):
            self.indptr[i] = indptr[i]
        for i in range(len(indices)):
            self.indices[i] = indices[i]
        memset(self.used, 0, n + 1)
        self.nodes = 0
        self.budget = rest[len(rest) - 1]

    def __dealloc__(self):
        free(self.indptr)
        free(self.indices)
        free(self.used)
        free(self.seen)
        free(self.stack)

    cdef inline int tick(self) except -1:
        self.nodes += 1
        if self.nodes > self.budget:
            raise OverflowError
        return 0


cdef class _Packer(_Graph):
    cdef unsigned char *dem
    cdef unsigned char *is_term
    cdef int *comp
    cdef int *terms
    cdef int nterms
    cdef int k
    cdef list paths
    cdef list cur

    def __init__(self, int n, indptr, indices, is_term, dem, int k, long long budget):
        cdef int i
        self.dem = <unsigned char *> malloc(n * n + 1)
        self.is_term = <unsigned char *> malloc(n + 1)
        self.comp = <int *> malloc((n + 1) * sizeof(int))
        self.terms = <int *> malloc((n + 1) * sizeof(int))
        for i in range(n * n):
            self.dem[i] = 1 if dem[i] else 0
        self.nterms = 0
        for i in range(n):
            self.is_term[i] = 1 if is_term[i] else 0
            if is_term[i]:
                self.terms[self.nterms] = i
                self.nterms += 1
        self.k = k
        self.paths = []
        self.cur = []

    def __dealloc__(self):
        free(self.dem)
        free(self.is_term)
        free(self.comp)
        free(self.terms)

    cdef bint has_pair(self):
        cdef int n = self.n, c = 0, a, b, s, t, v, w, idx, top
        for a in range(n):
            self.comp[a] = -1
        for a in range(self.nterms):
            s = self.terms[a]
            if self.used[s] or self.comp[s] >= 0:
                continue
            self.comp[s] = c
            top = 0
            self.stack[top] = s
            top += 1
            while top > 0:
                top -= 1
                v = self.stack[top]
                for idx in range(self.indptr[v], self.indptr[v + 1]):
                    w = self.indices[idx]
                    if not self.used[w] and self.comp[w] < 0:
                        self.comp[w] = c
                        self.stack[top] = w
                        top += 1
            c += 1
        for a in range(self.nterms):
            s = self.terms[a]
            if self.used[s]:
                continue
            for b in range(self.nterms):
                t = self.terms[b]
                if t > s and not self.used[t] and self.dem[s * n + t] and self.comp[t] == self.comp[s]:
                    return True
        return False

    cdef bint reach(self, int s, int v):
        cdef int n = self.n, x, w, idx, top = 0
        cdef int base = s * n
        memset(self.seen, 0, n)
        self.seen[v] = 1
        self.stack[top] = v
        top += 1
        while top > 0:
            top -= 1
            x = self.stack[top]
            for idx in range(self.indptr[x], self.indptr[x + 1]):
                w = self.indices[idx]
                if self.used[w] or self.seen[w]:
                    continue
                if self.dem[base + w]:
                    if w > s:
                        return True
                    continue
                self.seen[w] = 1
                self.stack[top] = w
                top += 1
        return False

    cdef int rec(self, int i, int last) except -1:
        cdef int a, s
        if i == self.k:
            return 1
        self.tick()
        if not self.has_pair():
            return 0
        for a in range(self.nterms):
            s = self.terms[a]
            if s <= last or self.used[s]:
                continue
            self.used[s] = 1
            self.cur.append(s)
            if self.extend(s, s, i):
                return 1
            self.cur.pop()
            self.used[s] = 0
        return 0

    cdef int extend(self, int s, int v, int i) except -1:
        cdef int idx, w
        cdef int base = s * self.n
        cdef list saved
        self.tick()
        if not self.reach(s, v):
            return 0
        for idx in range(self.indptr[v], self.indptr[v + 1]):
            w = self.indices[idx]
            if self.used[w]:
                continue
            if self.dem[base + w]:
                if w < s:
                    continue
                self.used[w] = 1
                self.cur.append(w)
                self.paths.append(list(self.cur))
                saved = self.cur
                self.cur = []
                if self.rec(i + 1, s):
                    return 1
                self.cur = saved
                self.paths.pop()
                self.cur.pop()
                self.used[w] = 0
                continue
            self.used[w] = 1
            self.cur.append(w)
            if self.extend(s, w, i):
                return 1
            self.cur.pop()
            self.used[w] = 0
        return 0


def pack_valid(int n, indptr, indices, is_term, dem, int k, long long budget):
    if k <= 0:
        return FOUND, [], 0
    cdef _Packer p = _Packer(n, indptr, indices, is_term, dem, k, budget)
    try:
        ok = p.rec(0, -1)
    except OverflowError:
        return BUDGET, None, p.nodes
    if ok:
        return FOUND, p.paths, p.nodes
    return NONE_, None, p.nodes


cdef class _Linker(_Graph):
    cdef int k
    cdef int *srcs
    cdef int *dsts
    cdef int *owner
    cdef list paths
    cdef list cur

    def __init__(self, int n, indptr, indices, srcs, dsts, long long budget):
        cdef int i
        self.k = len(srcs)
        self.srcs = <int *> malloc((self.k + 1) * sizeof(int))
        self.dsts = <int *> malloc((self.k + 1) * sizeof(int))
        self.owner = <int *> malloc((n + 1) * sizeof(int))
        for i in range(self.k):
            self.srcs[i] = srcs[i]
            self.dsts[i] = dsts[i]
        for i in range(n):
            self.owner[i] = -1
        self.paths = []
        self.cur = []

    def __dealloc__(self):
        free(self.srcs)
        free(self.dsts)
        free(self.owner)

    cdef bint assign_owners(self):
        cdef int i, v, j
        for i in range(self.k):
            for j in range(2):
                v = self.srcs[i] if j == 0 else self.dsts[i]
                if self.owner[v] >= 0 and self.owner[v] != i:
                    return False
                self.owner[v] = i
        return True

    cdef bint connected(self, int i, int v):
        cdef int t = self.dsts[i], x, w, idx, top = 0
        if v == t:
            return True
        memset(self.seen, 0, self.n)
        self.seen[v] = 1
        self.stack[top] = v
        top += 1
        while top > 0:
            top -= 1
            x = self.stack[top]
            for idx in range(self.indptr[x], self.indptr[x + 1]):
                w = self.indices[idx]
                if w == t:
                    return True
                if self.used[w] or self.seen[w] or self.owner[w] >= 0:
                    continue
                self.seen[w] = 1
                self.stack[top] = w
                top += 1
        return False

    cdef int rec(self, int i) except -1:
        cdef int j, s
        if i == self.k:
            return 1
        self.tick()
        for j in range(i, self.k):
            if not self.connected(j, self.srcs[j]):
                return 0
        s = self.srcs[i]
        self.used[s] = 1
        self.cur.append(s)
        if s == self.dsts[i]:
            self.paths.append(list(self.cur))
            self.cur = []
            if self.rec(i + 1):
                return 1
            self.paths.pop()
            self.cur.append(s)
        elif self.extend(i, s):
            return 1
        self.cur.pop()
        self.used[s] = 0
        return 0

    cdef int extend(self, int i, int v) except -1:
        cdef int idx, w, t = self.dsts[i]
        cdef list saved
        self.tick()
        if not self.connected(i, v):
            return 0
        for idx in range(self.indptr[v], self.indptr[v + 1]):
            w = self.indices[idx]
            if w == t:
                self.used[w] = 1
                self.cur.append(w)
                self.paths.append(list(self.cur))
                saved = self.cur
                self.cur = []
                if self.rec(i + 1):
                    return 1
                self.cur = saved
                self.paths.pop()
                self.cur.pop()
                self.used[w] = 0
                continue
            if self.used[w] or self.owner[w] >= 0:
                continue
            self.used[w] = 1
            self.cur.append(w)
            if self.extend(i, w):
                return 1
            self.cur.pop()
            self.used[w] = 0
        return 0


def link_pairs(int n, indptr, indices, srcs, dsts, long long budget):
    cdef _Linker p = _Linker(n, indptr, indices, srcs, dsts, budget)
    if not p.assign_owners():
        return NONE_, None, 0
    try:
        ok = p.rec(0)
    except OverflowError:
        return BUDGET, None, p.nodes
    if ok:
        return FOUND, p.paths, p.nodes
    return NONE_, None, p.nodes
