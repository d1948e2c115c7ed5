# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled run loops for the three algorithms (strings of at most 64 bits).

Each runner consumes the PCG64 word stream exactly as its pure-Python
counterpart in ``ga``, ``nsga2`` and ``sms_emoa`` does, so both backends give
identical populations and evaluation counts for the same seed.
"""

cimport cython
from cpython.mem cimport PyMem_Free, PyMem_Malloc
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport qsort
from numpy.random cimport bitgen_t

import numpy as np

from .variation import flip_count_thresholds

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) noexcept nogil

cdef double DOUBLE_SCALE = 1.0 / 9007199254740992.0
cdef double LEDGER_TOLERANCE = 1e-9

cdef enum:
    FAIR = 0
    UNIFORM = 1
    TOURNAMENT = 2


cdef inline int jump_value(int ones, int n, int k) noexcept nogil:
    if ones <= n - k or ones == n:
        return k + ones
    return n - ones


cdef int cmp_double_desc(const void* a, const void* b) noexcept nogil:
    cdef double x = (<double*>a)[0]
    cdef double y = (<double*>b)[0]
    return (x < y) - (x > y)


cdef class _Runner:
    """Shared state: random stream, mutation table and population buffers."""

    cdef bitgen_t* bg
    cdef object _gen
    cdef readonly int n, k, mu
    cdef double pc
    cdef bint diversity
    cdef uint64_t full
    cdef uint64_t* thresh
    cdef uint64_t* pop
    cdef int* f1
    cdef int* f2
    cdef int capacity
    cdef int* ones_seen
    cdef int* ones
    cdef int* F1
    cdef int* F2
    cdef int* lexdesc
    cdef readonly long long evaluations
    cdef readonly bint success

    def __cinit__(self, int n, int k, int mu, double p_c, bint diversity, uint64_t seed, *args, **kwargs):
        if n < 1 or n > 64:
            raise ValueError("compiled core supports 1 <= n <= 64")
        self.n = n
        self.k = k
        self.mu = mu
        self.pc = p_c
        self.diversity = diversity
        self.full = 0xFFFFFFFFFFFFFFFF if n == 64 else ((<uint64_t>1) << n) - 1
        self._gen = np.random.PCG64(seed)
        self.bg = <bitgen_t*>PyCapsule_GetPointer(self._gen.capsule, "BitGenerator")
        self.capacity = 2 * mu + 2
        self.thresh = <uint64_t*>PyMem_Malloc(n * sizeof(uint64_t))
        self.pop = <uint64_t*>PyMem_Malloc(self.capacity * sizeof(uint64_t))
        self.f1 = <int*>PyMem_Malloc(self.capacity * sizeof(int))
        self.f2 = <int*>PyMem_Malloc(self.capacity * sizeof(int))
        self.ones_seen = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.ones = <int*>PyMem_Malloc(self.capacity * sizeof(int))
        self.F1 = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.F2 = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.lexdesc = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        if not (self.thresh and self.pop and self.f1 and self.f2 and self.ones_seen
                and self.ones and self.F1 and self.F2 and self.lexdesc):
            raise MemoryError()
        cdef int i
        table = flip_count_thresholds(n)
        for i in range(n):
            self.thresh[i] = table[i]
        # Objective vectors depend only on the one-count and are distinct for
        # distinct counts, so one-counts serve as objective-vector classes.
        for i in range(n + 1):
            self.F1[i] = jump_value(i, n, k)
            self.F2[i] = jump_value(n - i, n, k)
        classes = sorted(range(n + 1), key=lambda c: (self.F1[c], self.F2[c]), reverse=True)
        for i in range(n + 1):
            self.lexdesc[i] = classes[i]

    def __dealloc__(self):
        PyMem_Free(self.thresh)
        PyMem_Free(self.pop)
        PyMem_Free(self.f1)
        PyMem_Free(self.f2)
        PyMem_Free(self.ones_seen)
        PyMem_Free(self.ones)
        PyMem_Free(self.F1)
        PyMem_Free(self.F2)
        PyMem_Free(self.lexdesc)

    # -- random stream ---------------------------------------------------

    @cython.final
    cdef inline uint64_t next_u64(self) noexcept nogil:
        return self.bg.next_uint64(self.bg.state)

    @cython.final
    cdef inline uint64_t below(self, uint64_t m) noexcept nogil:
        cdef uint64_t mask, v
        if m <= 1:
            return 0
        mask = m - 1
        mask |= mask >> 1
        mask |= mask >> 2
        mask |= mask >> 4
        mask |= mask >> 8
        mask |= mask >> 16
        mask |= mask >> 32
        while True:
            v = self.next_u64() & mask
            if v < m:
                return v

    @cython.final
    cdef inline bint bernoulli(self, double p) noexcept nogil:
        return (self.next_u64() >> 11) * DOUBLE_SCALE < p

    # -- variation -------------------------------------------------------

    @cython.final
    cdef inline uint64_t mutate(self, uint64_t x) noexcept nogil:
        cdef uint64_t u = self.next_u64()
        cdef int flips = 0
        cdef uint64_t mask = 0, bit
        cdef int i
        while flips < self.n and u >= self.thresh[flips]:
            flips += 1
        for i in range(flips):
            while True:
                bit = (<uint64_t>1) << self.below(self.n)
                if not (mask & bit):
                    mask |= bit
                    break
        return x ^ mask

    @cython.final
    cdef inline uint64_t offspring(self) noexcept nogil:
        cdef uint64_t x = self.pop[self.below(self.mu)]
        cdef uint64_t y, exchange
        if self.bernoulli(self.pc):
            y = self.pop[self.below(self.mu)]
            exchange = (x ^ y) & self.next_u64() & self.full
            x ^= exchange
        return self.mutate(x)

    @cython.final
    cdef inline void evaluate(self, int i) noexcept nogil:
        cdef int c = popcount64(self.pop[i])
        self.ones[i] = c
        self.f1[i] = self.F1[c]
        self.f2[i] = self.F2[c]

    @cython.final
    cdef void init_population(self) noexcept nogil:
        cdef int i
        for i in range(self.mu):
            self.pop[i] = self.next_u64() & self.full
            self.evaluate(i)
        self.evaluations = self.mu

    @cython.final
    cdef void remove_at(self, int z, int size) noexcept nogil:
        cdef int i
        for i in range(z, size - 1):
            self.pop[i] = self.pop[i + 1]
            self.f1[i] = self.f1[i + 1]
            self.f2[i] = self.f2[i + 1]
            self.ones[i] = self.ones[i + 1]

    @cython.final
    cdef bint front_covered(self) noexcept nogil:
        cdef int i, c
        for i in range(self.n + 1):
            self.ones_seen[i] = 0
        for i in range(self.mu):
            self.ones_seen[self.ones[i]] = 1
        if not (self.ones_seen[0] and self.ones_seen[self.n]):
            return False
        for c in range(self.k, self.n - self.k + 1):
            if not self.ones_seen[c]:
                return False
        return True

    @cython.final
    cdef void max_pair(self, uint64_t* values, int m, int* a, int* b) noexcept nogil:
        """Maximum-Hamming index pair with uniform tie-break (lexicographic scan)."""
        cdef int i, j, d, best = -1, ties = 0, target, seen = 0
        for i in range(m - 1):
            for j in range(i + 1, m):
                d = popcount64(values[i] ^ values[j])
                if d > best:
                    best = d
                    ties = 1
                elif d == best:
                    ties += 1
        target = <int>self.below(ties)
        for i in range(m - 1):
            for j in range(i + 1, m):
                if popcount64(values[i] ^ values[j]) == best:
                    if seen == target:
                        a[0] = i
                        b[0] = j
                        return
                    seen += 1

    def population_values(self):
        return [self.pop[i] for i in range(self.mu)]



@cython.final
cdef class GaRun(_Runner):
    """(mu+1)-GA on Jump."""

    cdef uint64_t* scratch
    cdef int* worst

    def __cinit__(self, *args, **kwargs):
        self.scratch = <uint64_t*>PyMem_Malloc(self.capacity * sizeof(uint64_t))
        self.worst = <int*>PyMem_Malloc(self.capacity * sizeof(int))
        if not (self.scratch and self.worst):
            raise MemoryError()
        if self.mu < 2:
            raise ValueError("mu must be at least 2")
        if not (2 <= self.k < self.n):
            raise ValueError("Jump needs 2 <= k < n")
        self.init_population()
        self.success = self.has_optimum()

    def __dealloc__(self):
        PyMem_Free(self.scratch)
        PyMem_Free(self.worst)

    @cython.final
    cdef bint has_optimum(self) noexcept nogil:
        cdef int i
        for i in range(self.mu):
            if self.pop[i] == self.full:
                return True
        return False

    @cython.final
    cdef void step_c(self) noexcept nogil:
        cdef int mu = self.mu, i, count = 0, low, z, a, b, r
        self.pop[mu] = self.offspring()
        self.evaluate(mu)
        self.evaluations += 1
        low = self.f1[0]
        for i in range(1, mu + 1):
            if self.f1[i] < low:
                low = self.f1[i]
        for i in range(mu + 1):
            if self.f1[i] == low:
                self.worst[count] = i
                count += 1
        if not self.diversity or count <= 2:
            z = self.worst[self.below(count)]
        else:
            for i in range(count):
                self.scratch[i] = self.pop[self.worst[i]]
            self.max_pair(self.scratch, count, &a, &b)
            r = <int>self.below(count - 2)
            for i in range(count):
                if i == a or i == b:
                    continue
                if r == 0:
                    z = self.worst[i]
                    break
                r -= 1
        self.remove_at(z, mu + 1)
        if not self.success:
            self.success = self.has_optimum()

    def step(self):
        self.step_c()

    def run(self, long long max_evaluations):
        with nogil:
            while not self.success and self.evaluations + 1 <= max_evaluations:
                self.step_c()
        return self.evaluations, bool(self.success)


cdef class _Sorter(_Runner):
    """Non-dominated sorting and crowding for OneJumpZeroJump pools."""

    cdef int* rank
    cdef int* front_start
    cdef int* front_items
    cdef int* front_last
    cdef int nfronts
    cdef int* ccount
    cdef int* crank
    cdef int* perm
    cdef int* order
    cdef int* counts
    cdef int* vals
    cdef uint64_t* scratch
    cdef double* dist
    cdef double* total
    cdef double* sorted_total
    cdef int* flags
    cdef int* tied
    cdef readonly long long crowding_checks, crowding_violations

    def __cinit__(self, *args, **kwargs):
        cdef int cap = self.capacity
        cdef int vmax = self.n + self.k + 2
        self.rank = <int*>PyMem_Malloc(cap * sizeof(int))
        self.front_start = <int*>PyMem_Malloc((cap + 1) * sizeof(int))
        self.front_items = <int*>PyMem_Malloc(cap * sizeof(int))
        self.front_last = <int*>PyMem_Malloc((cap + self.n + 1) * sizeof(int))
        self.ccount = <int*>PyMem_Malloc((self.n + 1) * sizeof(int))
        self.crank = <int*>PyMem_Malloc((self.n + 1) * sizeof(int))
        self.perm = <int*>PyMem_Malloc(cap * sizeof(int))
        self.order = <int*>PyMem_Malloc(2 * cap * sizeof(int))
        self.counts = <int*>PyMem_Malloc((vmax + 1) * sizeof(int))
        self.vals = <int*>PyMem_Malloc(cap * sizeof(int))
        self.scratch = <uint64_t*>PyMem_Malloc(cap * sizeof(uint64_t))
        self.dist = <double*>PyMem_Malloc(2 * cap * sizeof(double))
        self.total = <double*>PyMem_Malloc(cap * sizeof(double))
        self.sorted_total = <double*>PyMem_Malloc(cap * sizeof(double))
        self.flags = <int*>PyMem_Malloc(cap * sizeof(int))
        self.tied = <int*>PyMem_Malloc(cap * sizeof(int))
        if not (self.rank and self.front_start and self.front_items and self.front_last
                and self.ccount and self.crank and self.perm and self.order and self.counts
                and self.vals and self.scratch and self.dist and self.total
                and self.sorted_total and self.flags and self.tied):
            raise MemoryError()
        if not (2 <= self.k and 2 * self.k < self.n):
            raise ValueError("OneJumpZeroJump needs 2 <= k < n/2")

    def __dealloc__(self):
        PyMem_Free(self.rank)
        PyMem_Free(self.front_start)
        PyMem_Free(self.front_items)
        PyMem_Free(self.front_last)
        PyMem_Free(self.ccount)
        PyMem_Free(self.crank)
        PyMem_Free(self.perm)
        PyMem_Free(self.order)
        PyMem_Free(self.counts)
        PyMem_Free(self.vals)
        PyMem_Free(self.scratch)
        PyMem_Free(self.dist)
        PyMem_Free(self.total)
        PyMem_Free(self.sorted_total)
        PyMem_Free(self.flags)
        PyMem_Free(self.tied)

    @cython.final
    cdef void nd_sort(self, int size) noexcept nogil:
        """Fronts of pool[0:size] as CSR lists in ascending index order.

        Sorting runs over one-count classes: classes are swept in decreasing
        lexicographic (f1, f2) order and each joins the first front whose most
        recently added class does not dominate it. Distinct classes have
        distinct first objectives, so domination reduces to comparing f2.
        """
        cdef int i, t, c, q, r
        cdef int n = self.n
        for c in range(n + 1):
            self.ccount[c] = 0
        for i in range(size):
            self.ccount[self.ones[i]] += 1
        self.nfronts = 0
        for t in range(n + 1):
            c = self.lexdesc[t]
            if self.ccount[c] == 0:
                continue
            r = 0
            while r < self.nfronts:
                q = self.front_last[r]
                if self.F2[q] < self.F2[c]:
                    break
                r += 1
            if r == self.nfronts:
                self.nfronts += 1
            self.front_last[r] = c
            self.crank[c] = r
        for r in range(self.nfronts + 1):
            self.front_start[r] = 0
        for i in range(size):
            r = self.crank[self.ones[i]]
            self.rank[i] = r
            self.front_start[r + 1] += 1
        for r in range(self.nfronts):
            self.front_start[r + 1] += self.front_start[r]
        for r in range(self.nfronts):
            self.front_last[r] = self.front_start[r]
        for i in range(size):
            r = self.rank[i]
            self.front_items[self.front_last[r]] = i
            self.front_last[r] += 1

    @cython.final
    cdef void crowding(self, int* front, int size) noexcept nogil:
        """Crowding of ``front`` members into ``total`` (aligned with ``front``)."""
        cdef int j, i, t, p, run_end, a, b, tmp, span, v
        cdef int vmax = self.n + self.k + 1
        cdef int* order
        cdef int* vals = self.vals
        cdef double* dist
        for p in range(size):
            self.total[p] = 0.0
        for j in range(2):
            order = self.order + j * size
            dist = self.dist + j * size
            for p in range(size):
                vals[p] = self.f1[front[p]] if j == 0 else self.f2[front[p]]
                self.perm[p] = p
            for i in range(size - 1, 0, -1):
                t = <int>self.below(i + 1)
                tmp = self.perm[i]
                self.perm[i] = self.perm[t]
                self.perm[t] = tmp
            # stable counting sort of perm by value
            for v in range(vmax + 1):
                self.counts[v] = 0
            for p in range(size):
                self.counts[vals[p] + 1] += 1
            for v in range(vmax):
                self.counts[v + 1] += self.counts[v]
            for i in range(size):
                p = self.perm[i]
                order[self.counts[vals[p]]] = p
                self.counts[vals[p]] += 1
            if self.diversity:
                i = 0
                while i < size:
                    run_end = i
                    while run_end + 1 < size and vals[order[run_end + 1]] == vals[order[i]]:
                        run_end += 1
                    if run_end > i:
                        for t in range(i, run_end + 1):
                            self.scratch[t - i] = self.pop[front[order[t]]]
                        self.max_pair(self.scratch, run_end - i + 1, &a, &b)
                        tmp = order[i]
                        order[i] = order[i + a]
                        order[i + a] = tmp
                        tmp = order[run_end]
                        order[run_end] = order[i + b]
                        order[i + b] = tmp
                    i = run_end + 1
            if size <= 2:
                for p in range(size):
                    dist[p] = INFINITY
            else:
                for p in range(size):
                    dist[p] = 0.0
                dist[order[0]] = INFINITY
                dist[order[size - 1]] = INFINITY
                span = vals[order[size - 1]] - vals[order[0]]
                if span > 0:
                    for t in range(1, size - 1):
                        dist[order[t]] = (<double>(vals[order[t + 1]] - vals[order[t - 1]])) / (<double>span)
            for p in range(size):
                self.total[p] += dist[p]
        self.crowding_checks += 1
        if not self.crowding_ledger_ok(front, size):
            self.crowding_violations += 1

    @cython.final
    cdef bint crowding_ledger_ok(self, int* front, int size) noexcept nogil:
        cdef int j, t, p, c
        cdef int* order
        cdef double* dist
        cdef double interior
        for p in range(size):
            self.flags[p] = 0
        for j in range(2):
            order = self.order + j * size
            dist = self.dist + j * size
            if dist[order[0]] != INFINITY or dist[order[size - 1]] != INFINITY:
                return False
            self.flags[order[0]] = 1
            self.flags[order[size - 1]] = 1
            interior = 0.0
            for t in range(1, size - 1):
                interior += dist[order[t]]
            if interior > 2.0 + LEDGER_TOLERANCE:
                return False
        for p in range(size):
            if (self.total[p] == INFINITY) != (self.flags[p] == 1):
                return False
        for c in range(self.n + 1):
            self.ones_seen[c] = 0
        for p in range(size):
            if self.total[p] > 0:
                c = self.ones[front[p]]
                self.ones_seen[c] += 1
                if self.ones_seen[c] > 4:
                    return False
        return True


@cython.final
cdef class NsgaRun(_Sorter):
    """NSGA-II on OneJumpZeroJump."""

    cdef int selection
    cdef int* parents
    cdef int* prank
    cdef double* pcrowd
    cdef int* survivor

    def __cinit__(self, int n, int k, int mu, double p_c, bint diversity, uint64_t seed,
                  selection="uniform"):
        sel = getattr(selection, "value", selection)
        if sel == "fair":
            self.selection = FAIR
        elif sel == "uniform":
            self.selection = UNIFORM
        elif sel == "tournament":
            self.selection = TOURNAMENT
        else:
            raise ValueError(f"unknown selection scheme {selection!r}")
        if mu < 2 or mu % 2:
            raise ValueError("NSGA-II needs an even mu >= 2")
        self.parents = <int*>PyMem_Malloc(mu * sizeof(int))
        self.prank = <int*>PyMem_Malloc(mu * sizeof(int))
        self.pcrowd = <double*>PyMem_Malloc(mu * sizeof(double))
        self.survivor = <int*>PyMem_Malloc(self.capacity * sizeof(int))
        if not (self.parents and self.prank and self.pcrowd and self.survivor):
            raise MemoryError()
        self.init_population()
        self.success = self.front_covered()

    def __dealloc__(self):
        PyMem_Free(self.parents)
        PyMem_Free(self.prank)
        PyMem_Free(self.pcrowd)
        PyMem_Free(self.survivor)

    @cython.final
    cdef void score_population(self) noexcept nogil:
        cdef int r, s, e, i
        self.nd_sort(self.mu)
        for r in range(self.nfronts):
            s = self.front_start[r]
            e = self.front_start[r + 1]
            self.crowding(self.front_items + s, e - s)
            for i in range(e - s):
                self.prank[self.front_items[s + i]] = r
                self.pcrowd[self.front_items[s + i]] = self.total[i]

    @cython.final
    cdef void select_parents(self) noexcept nogil:
        cdef int mu = self.mu, i, t, tmp, a, b
        if self.selection == FAIR:
            for i in range(mu):
                self.parents[i] = i
            for i in range(mu - 1, 0, -1):
                t = <int>self.below(i + 1)
                tmp = self.parents[i]
                self.parents[i] = self.parents[t]
                self.parents[t] = tmp
        elif self.selection == UNIFORM:
            for i in range(mu):
                self.parents[i] = <int>self.below(mu)
        else:
            for i in range(mu):
                a = <int>self.below(mu)
                b = <int>self.below(mu)
                if a == b:
                    self.parents[i] = a
                elif self.prank[a] != self.prank[b]:
                    self.parents[i] = a if self.prank[a] < self.prank[b] else b
                elif self.pcrowd[a] != self.pcrowd[b]:
                    self.parents[i] = a if self.pcrowd[a] > self.pcrowd[b] else b
                else:
                    self.parents[i] = a if self.below(2) == 0 else b

    @cython.final
    cdef void select_critical(self, int* front, int size, int slots) noexcept nogil:
        cdef int p, ntied = 0, chosen = 0, need, i, j, tmp
        cdef double cutoff
        self.crowding(front, size)
        for p in range(size):
            self.sorted_total[p] = self.total[p]
        qsort(self.sorted_total, size, sizeof(double), cmp_double_desc)
        cutoff = self.sorted_total[slots - 1]
        for p in range(size):
            if self.total[p] > cutoff:
                self.survivor[front[p]] = 1
                chosen += 1
            elif self.total[p] == cutoff:
                self.tied[ntied] = front[p]
                ntied += 1
        need = slots - chosen
        if need < ntied:
            for i in range(need):
                j = i + <int>self.below(ntied - i)
                tmp = self.tied[i]
                self.tied[i] = self.tied[j]
                self.tied[j] = tmp
        for i in range(need):
            self.survivor[self.tied[i]] = 1

    @cython.final
    cdef void step_c(self) noexcept nogil:
        cdef int mu = self.mu, t, i, r, s, e, kept = 0, w
        cdef uint64_t x, y, exchange
        if self.selection == TOURNAMENT:
            self.score_population()
        self.select_parents()
        for t in range(0, mu, 2):
            x = self.pop[self.parents[t]]
            y = self.pop[self.parents[t + 1]]
            if self.bernoulli(self.pc):
                exchange = (x ^ y) & self.next_u64() & self.full
                x ^= exchange
                y ^= exchange
            self.pop[mu + t] = self.mutate(x)
            self.pop[mu + t + 1] = self.mutate(y)
        for i in range(mu, 2 * mu):
            self.evaluate(i)
        self.evaluations += mu
        self.nd_sort(2 * mu)
        for i in range(2 * mu):
            self.survivor[i] = 0
        for r in range(self.nfronts):
            s = self.front_start[r]
            e = self.front_start[r + 1]
            if kept + (e - s) <= mu:
                for i in range(s, e):
                    self.survivor[self.front_items[i]] = 1
                kept += e - s
                if kept == mu:
                    break
                continue
            self.select_critical(self.front_items + s, e - s, mu - kept)
            break
        w = 0
        for i in range(2 * mu):
            if self.survivor[i]:
                self.pop[w] = self.pop[i]
                self.f1[w] = self.f1[i]
                self.f2[w] = self.f2[i]
                self.ones[w] = self.ones[i]
                w += 1
        self.success = self.front_covered()

    def step(self):
        self.step_c()

    def run(self, long long max_evaluations):
        with nogil:
            while not self.success and self.evaluations + self.mu <= max_evaluations:
                self.step_c()
        return self.evaluations, bool(self.success)


@cython.final
cdef class SmsRun(_Runner):
    """Steady-state SMS-EMOA on OneJumpZeroJump with reference point (0, 0).

    Every step works on one-count classes: the pool's class counts are kept
    up to date, so sorting and contributions cost O(n) and only the final
    pick of an index touches the pool.
    """

    cdef int* cnt
    cdef int* crank
    cdef int* front_last
    cdef int* last
    cdef int64_t* cdelta
    cdef int* mark
    cdef int* members
    cdef uint64_t* scratch
    cdef bint* pareto
    cdef int covered, npareto
    cdef readonly long long delta_checks, delta_violations

    def __cinit__(self, *args, **kwargs):
        cdef int c, n = self.n
        if self.mu < 2:
            raise ValueError("mu must be at least 2")
        if not (2 <= self.k and 2 * self.k < n):
            raise ValueError("OneJumpZeroJump needs 2 <= k < n/2")
        self.cnt = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.crank = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.front_last = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.last = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.cdelta = <int64_t*>PyMem_Malloc((n + 1) * sizeof(int64_t))
        self.mark = <int*>PyMem_Malloc((n + 1) * sizeof(int))
        self.pareto = <bint*>PyMem_Malloc((n + 1) * sizeof(bint))
        self.members = <int*>PyMem_Malloc(self.capacity * sizeof(int))
        self.scratch = <uint64_t*>PyMem_Malloc(self.capacity * sizeof(uint64_t))
        if not (self.cnt and self.crank and self.front_last and self.last and self.cdelta
                and self.mark and self.pareto and self.members and self.scratch):
            raise MemoryError()
        self.npareto = 0
        for c in range(n + 1):
            self.cnt[c] = 0
            self.pareto[c] = c == 0 or c == n or self.k <= c <= n - self.k
            self.npareto += self.pareto[c]
        self.covered = 0
        self.init_population()
        for c in range(self.mu):
            self.add_class(self.ones[c])
        self.success = self.covered == self.npareto

    def __dealloc__(self):
        PyMem_Free(self.cnt)
        PyMem_Free(self.crank)
        PyMem_Free(self.front_last)
        PyMem_Free(self.last)
        PyMem_Free(self.cdelta)
        PyMem_Free(self.mark)
        PyMem_Free(self.pareto)
        PyMem_Free(self.members)
        PyMem_Free(self.scratch)

    @cython.final
    cdef inline void add_class(self, int c) noexcept nogil:
        self.cnt[c] += 1
        if self.cnt[c] == 1 and self.pareto[c]:
            self.covered += 1

    @cython.final
    cdef inline void drop_class(self, int c) noexcept nogil:
        self.cnt[c] -= 1
        if self.cnt[c] == 0 and self.pareto[c]:
            self.covered -= 1

    @cython.final
    cdef int last_front(self) noexcept nogil:
        """Classes of the worst front in ascending f1 order; returns their number."""
        cdef int t, c, q, r, nfronts = 0, nl = 0
        for t in range(self.n + 1):
            c = self.lexdesc[t]
            if self.cnt[c] == 0:
                continue
            r = 0
            while r < nfronts:
                q = self.front_last[r]
                if self.F2[q] < self.F2[c]:
                    break
                r += 1
            if r == nfronts:
                nfronts += 1
            self.front_last[r] = c
            self.crank[c] = r
        for t in range(self.n, -1, -1):
            c = self.lexdesc[t]
            if self.cnt[c] and self.crank[c] == nfronts - 1:
                self.last[nl] = c
                nl += 1
        return nl

    @cython.final
    cdef inline int64_t box(self, int c, int left, int below) noexcept nogil:
        return (<int64_t>(self.F1[c] - left)) * (self.F2[c] - below)

    @cython.final
    cdef void deltas(self, int nl) noexcept nogil:
        """Smallest member contribution per last-front class.

        Copies of one vector sit next to each other in f1 order, so the first
        copy is bounded below by its twin and the others on the left; all of
        them are evaluated and checked against the zero-contribution rule.
        """
        cdef int t, c, left, below
        cdef int64_t d
        cdef bint ok = True
        for t in range(nl):
            c = self.last[t]
            left = self.F1[self.last[t - 1]] if t > 0 else 0
            below = self.F2[self.last[t + 1]] if t + 1 < nl else 0
            if self.cnt[c] == 1:
                self.cdelta[c] = self.box(c, left, below)
            else:
                d = self.box(c, left, self.F2[c])
                if d != 0 or self.box(c, self.F1[c], below) != 0 or self.box(c, self.F1[c], self.F2[c]) != 0:
                    ok = False
                self.cdelta[c] = d
        self.delta_checks += 1
        if not ok:
            self.delta_violations += 1

    @cython.final
    cdef int pick_member(self, int r) noexcept nogil:
        """Pool index of the r-th member (in index order) of a marked class."""
        cdef int i
        for i in range(self.mu + 1):
            if self.mark[self.ones[i]]:
                if r == 0:
                    return i
                r -= 1
        return -1

    @cython.final
    cdef int argmin_delta(self, int nl) noexcept nogil:
        cdef int t, c, total = 0
        cdef int64_t low = self.cdelta[self.last[0]]
        for t in range(1, nl):
            if self.cdelta[self.last[t]] < low:
                low = self.cdelta[self.last[t]]
        for c in range(self.n + 1):
            self.mark[c] = 0
        for t in range(nl):
            c = self.last[t]
            if self.cdelta[c] == low:
                self.mark[c] = 1
                total += self.cnt[c]
        return self.pick_member(<int>self.below(total))

    @cython.final
    cdef int remove_diversity(self, int nl) noexcept nogil:
        cdef int t, c, i, largest = 0, ncrowded = 0, g, m = 0, a, b, r
        for t in range(nl):
            if self.cnt[self.last[t]] > largest:
                largest = self.cnt[self.last[t]]
        if largest <= 2:
            return self.argmin_delta(nl)
        for t in range(nl):
            if self.cnt[self.last[t]] == largest:
                ncrowded += 1
        r = <int>self.below(ncrowded)
        # equally crowded vectors are ranked by first appearance in the pool
        for c in range(self.n + 1):
            self.mark[c] = 0
        g = -1
        for i in range(self.mu + 1):
            c = self.ones[i]
            if self.cnt[c] == largest and self.crank[c] == self.crank[self.last[0]] and not self.mark[c]:
                self.mark[c] = 1
                if r == 0:
                    g = c
                    break
                r -= 1
        for i in range(self.mu + 1):
            if self.ones[i] == g:
                self.members[m] = i
                self.scratch[m] = self.pop[i]
                m += 1
        self.max_pair(self.scratch, m, &a, &b)
        r = <int>self.below(m - 2)
        for i in range(m):
            if i == a or i == b:
                continue
            if r == 0:
                return self.members[i]
            r -= 1
        return -1

    @cython.final
    cdef void step_c(self) noexcept nogil:
        cdef int mu = self.mu, nl, z
        self.pop[mu] = self.offspring()
        self.evaluate(mu)
        self.evaluations += 1
        self.add_class(self.ones[mu])
        nl = self.last_front()
        self.deltas(nl)
        if self.diversity:
            z = self.remove_diversity(nl)
        else:
            z = self.argmin_delta(nl)
        self.drop_class(self.ones[z])
        self.remove_at(z, mu + 1)
        self.success = self.covered == self.npareto

    def step(self):
        self.step_c()

    def run(self, long long max_evaluations):
        with nogil:
            while not self.success and self.evaluations + 1 <= max_evaluations:
                self.step_c()
        return self.evaluations, bool(self.success)
