# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernel for the connected maximum-common-subgraph search.

Exact transliteration of ``_mcs_py``: identical branching order, identical
tie-breaking, identical expansion accounting.  The test suite asserts that
both backends return bit-identical results.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc

from templater.errors import BudgetExceeded


cdef class _Search:
    cdef int nr, np
    cdef int levels, maxc, maxm
    cdef unsigned char *adj_r
    cdef unsigned char *adj_p
    cdef unsigned char *allowed
    cdef int *g_buf
    cdef int *h_buf
    cdef int *cls_g0
    cdef int *cls_gn
    cdef int *cls_h0
    cdef int *cls_hn
    cdef unsigned char *cls_adj
    cdef int *ncls
    cdef int *map_v
    cdef int *map_w
    cdef int *best_v
    cdef int *best_w
    cdef int *sort_v
    cdef int *sort_w
    cdef int best_n
    cdef long long expansions
    cdef long long budget
    cdef bint exceeded

    def __cinit__(self, int nr, int np_, long long budget):
        self.nr = nr
        self.np = np_
        self.levels = nr + np_ + 2
        self.maxc = (nr if nr < np_ else np_) + 1
        self.maxm = nr if nr < np_ else np_
        self.budget = budget
        self.expansions = 0
        self.best_n = 0
        self.exceeded = False
        self.adj_r = <unsigned char *> PyMem_Malloc(nr * nr or 1)
        self.adj_p = <unsigned char *> PyMem_Malloc(np_ * np_ or 1)
        self.allowed = <unsigned char *> PyMem_Malloc(nr * np_ or 1)
        self.g_buf = <int *> PyMem_Malloc(self.levels * nr * sizeof(int) or sizeof(int))
        self.h_buf = <int *> PyMem_Malloc(self.levels * np_ * sizeof(int) or sizeof(int))
        self.cls_g0 = <int *> PyMem_Malloc(self.levels * self.maxc * sizeof(int))
        self.cls_gn = <int *> PyMem_Malloc(self.levels * self.maxc * sizeof(int))
        self.cls_h0 = <int *> PyMem_Malloc(self.levels * self.maxc * sizeof(int))
        self.cls_hn = <int *> PyMem_Malloc(self.levels * self.maxc * sizeof(int))
        self.cls_adj = <unsigned char *> PyMem_Malloc(self.levels * self.maxc)
        self.ncls = <int *> PyMem_Malloc(self.levels * sizeof(int))
        self.map_v = <int *> PyMem_Malloc((self.maxm + 1) * sizeof(int))
        self.map_w = <int *> PyMem_Malloc((self.maxm + 1) * sizeof(int))
        self.best_v = <int *> PyMem_Malloc((self.maxm + 1) * sizeof(int))
        self.best_w = <int *> PyMem_Malloc((self.maxm + 1) * sizeof(int))
        self.sort_v = <int *> PyMem_Malloc((self.maxm + 1) * sizeof(int))
        self.sort_w = <int *> PyMem_Malloc((self.maxm + 1) * sizeof(int))

    def __dealloc__(self):
        PyMem_Free(self.adj_r)
        PyMem_Free(self.adj_p)
        PyMem_Free(self.allowed)
        PyMem_Free(self.g_buf)
        PyMem_Free(self.h_buf)
        PyMem_Free(self.cls_g0)
        PyMem_Free(self.cls_gn)
        PyMem_Free(self.cls_h0)
        PyMem_Free(self.cls_hn)
        PyMem_Free(self.cls_adj)
        PyMem_Free(self.ncls)
        PyMem_Free(self.map_v)
        PyMem_Free(self.map_w)
        PyMem_Free(self.best_v)
        PyMem_Free(self.best_w)
        PyMem_Free(self.sort_v)
        PyMem_Free(self.sort_w)

    cdef void _record(self, int depth):
        """Keep the larger mapping, or the smaller sorted pair list on ties."""
        cdef int i, j, ti, tw
        if depth < self.best_n or depth == 0:
            return
        for i in range(depth):
            self.sort_v[i] = self.map_v[i]
            self.sort_w[i] = self.map_w[i]
        # insertion sort by v; v values are distinct
        for i in range(1, depth):
            ti = self.sort_v[i]
            tw = self.sort_w[i]
            j = i - 1
            while j >= 0 and self.sort_v[j] > ti:
                self.sort_v[j + 1] = self.sort_v[j]
                self.sort_w[j + 1] = self.sort_w[j]
                j -= 1
            self.sort_v[j + 1] = ti
            self.sort_w[j + 1] = tw
        if depth == self.best_n:
            for i in range(depth):
                if self.sort_v[i] != self.best_v[i]:
                    if self.sort_v[i] > self.best_v[i]:
                        return
                    break
                if self.sort_w[i] != self.best_w[i]:
                    if self.sort_w[i] > self.best_w[i]:
                        return
                    break
            else:
                return  # identical key
        self.best_n = depth
        for i in range(depth):
            self.best_v[i] = self.sort_v[i]
            self.best_w[i] = self.sort_w[i]

    cdef void _search(self, int level, int depth):
        cdef int n, idx, best_idx, best_max, best_first, size_max
        cdef int i, k, gi, hi, v, w, child, gl, hl, u, x
        cdef int g_off, h_off, c_off, ng_off, nh_off, nc_off, bound
        cdef unsigned char *row_v
        cdef unsigned char *row_w
        if self.exceeded:
            return
        self._record(depth)

        n = self.ncls[level]
        c_off = level * self.maxc
        bound = depth
        for i in range(n):
            gl = self.cls_gn[c_off + i]
            hl = self.cls_hn[c_off + i]
            bound += gl if gl < hl else hl
        if bound < self.best_n:
            return

        g_off = level * self.nr
        h_off = level * self.np
        best_idx = -1
        best_max = 0
        best_first = 0
        for i in range(n):
            if depth > 0 and not self.cls_adj[c_off + i]:
                continue
            gl = self.cls_gn[c_off + i]
            hl = self.cls_hn[c_off + i]
            size_max = gl if gl > hl else hl
            gi = self.g_buf[g_off + self.cls_g0[c_off + i]]
            if best_idx < 0 or size_max < best_max or (size_max == best_max and gi < best_first):
                best_idx = i
                best_max = size_max
                best_first = gi
        if best_idx < 0:
            return
        idx = best_idx
        v = self.g_buf[g_off + self.cls_g0[c_off + idx]]
        row_v = self.adj_r + v * self.nr

        ng_off = (level + 1) * self.nr
        nh_off = (level + 1) * self.np
        nc_off = (level + 1) * self.maxc

        for k in range(self.cls_hn[c_off + idx]):
            w = self.h_buf[h_off + self.cls_h0[c_off + idx] + k]
            if not self.allowed[v * self.np + w]:
                continue
            self.expansions += 1
            if self.expansions > self.budget:
                self.exceeded = True
                return
            row_w = self.adj_p + w * self.np
            # refine every class into (adjacent, rest) children at level+1
            child = 0
            gi = 0
            hi = 0
            for i in range(n):
                # adjacent-to-(v, w) part
                gl = 0
                for x in range(self.cls_gn[c_off + i]):
                    u = self.g_buf[g_off + self.cls_g0[c_off + i] + x]
                    if u != v and row_v[u]:
                        self.g_buf[ng_off + gi + gl] = u
                        gl += 1
                hl = 0
                for x in range(self.cls_hn[c_off + i]):
                    u = self.h_buf[h_off + self.cls_h0[c_off + i] + x]
                    if u != w and row_w[u]:
                        self.h_buf[nh_off + hi + hl] = u
                        hl += 1
                if gl > 0 and hl > 0:
                    self.cls_g0[nc_off + child] = gi
                    self.cls_gn[nc_off + child] = gl
                    self.cls_h0[nc_off + child] = hi
                    self.cls_hn[nc_off + child] = hl
                    self.cls_adj[nc_off + child] = 1
                    gi += gl
                    hi += hl
                    child += 1
                # non-adjacent part
                gl = 0
                for x in range(self.cls_gn[c_off + i]):
                    u = self.g_buf[g_off + self.cls_g0[c_off + i] + x]
                    if u != v and not row_v[u]:
                        self.g_buf[ng_off + gi + gl] = u
                        gl += 1
                hl = 0
                for x in range(self.cls_hn[c_off + i]):
                    u = self.h_buf[h_off + self.cls_h0[c_off + i] + x]
                    if u != w and not row_w[u]:
                        self.h_buf[nh_off + hi + hl] = u
                        hl += 1
                if gl > 0 and hl > 0:
                    self.cls_g0[nc_off + child] = gi
                    self.cls_gn[nc_off + child] = gl
                    self.cls_h0[nc_off + child] = hi
                    self.cls_hn[nc_off + child] = hl
                    self.cls_adj[nc_off + child] = self.cls_adj[c_off + i]
                    gi += gl
                    hi += hl
                    child += 1
            self.ncls[level + 1] = child
            self.map_v[depth] = v
            self.map_w[depth] = w
            self._search(level + 1, depth + 1)
            if self.exceeded:
                return

        # branch with v excluded from its class
        child = 0
        gi = 0
        hi = 0
        for i in range(n):
            gl = 0
            for x in range(self.cls_gn[c_off + i]):
                u = self.g_buf[g_off + self.cls_g0[c_off + i] + x]
                if i == idx and u == v:
                    continue
                self.g_buf[ng_off + gi + gl] = u
                gl += 1
            if gl == 0:
                continue
            hl = self.cls_hn[c_off + i]
            for x in range(hl):
                self.h_buf[nh_off + hi + x] = self.h_buf[h_off + self.cls_h0[c_off + i] + x]
            self.cls_g0[nc_off + child] = gi
            self.cls_gn[nc_off + child] = gl
            self.cls_h0[nc_off + child] = hi
            self.cls_hn[nc_off + child] = hl
            self.cls_adj[nc_off + child] = self.cls_adj[c_off + i]
            gi += gl
            hi += hl
            child += 1
        self.ncls[level + 1] = child
        self._search(level + 1, depth)


def max_common_connected_subgraph(labels_r, labels_p, adj_r, adj_p, budget, allowed=None):
    """Find the best connected common induced subgraph mapping.

    Same contract as the pure-Python kernel: returns the sorted matched
    pairs plus the expansion count, raising BudgetExceeded past the cap.
    """
    cdef int nr = len(labels_r)
    cdef int np_ = len(labels_p)
    cdef _Search s = _Search(nr, np_, budget)
    cdef int i, j, gi, hi, child

    # Masks are arbitrary-precision Python ints; test bits in object space.
    for i in range(nr):
        mask = adj_r[i]
        for j in range(nr):
            s.adj_r[i * nr + j] = 1 if (mask >> j) & 1 else 0
    for i in range(np_):
        mask = adj_p[i]
        for j in range(np_):
            s.adj_p[i * np_ + j] = 1 if (mask >> j) & 1 else 0
    for i in range(nr):
        mask = allowed[i] if allowed is not None else None
        for j in range(np_):
            if mask is None:
                s.allowed[i * np_ + j] = 1
            else:
                s.allowed[i * np_ + j] = 1 if (mask >> j) & 1 else 0

    by_label = {}
    for i, label in enumerate(labels_r):
        by_label.setdefault(label, ([], []))[0].append(i)
    for j, label in enumerate(labels_p):
        entry = by_label.get(label)
        if entry is not None:
            entry[1].append(j)

    child = 0
    gi = 0
    hi = 0
    for label in sorted(by_label):
        g_nodes, h_nodes = by_label[label]
        if not g_nodes or not h_nodes:
            continue
        s.cls_g0[child] = gi
        s.cls_gn[child] = len(g_nodes)
        s.cls_h0[child] = hi
        s.cls_hn[child] = len(h_nodes)
        s.cls_adj[child] = 0
        for i, u in enumerate(g_nodes):
            s.g_buf[gi + i] = u
        for i, u in enumerate(h_nodes):
            s.h_buf[hi + i] = u
        gi += len(g_nodes)
        hi += len(h_nodes)
        child += 1
    s.ncls[0] = child

    if child:
        s._search(0, 0)
    if s.exceeded:
        raise BudgetExceeded(
            f"common-subgraph search exceeded {budget} pair expansions"
        )
    pairs = [(s.best_v[i], s.best_w[i]) for i in range(s.best_n)]
    return pairs, int(s.expansions)
