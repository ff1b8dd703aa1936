# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitmask kernels.

Must give bit-identical results to valim._kernels.pure, including which
witness a scan reports first.  The dispatch layer guarantees n <= 64 and
that every value fits comfortably in an int64 before calling in here.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc, qsort

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef int _cmp_u64(const void* a, const void* b) noexcept nogil:
    cdef uint64_t x = (<const uint64_t*> a)[0]
    cdef uint64_t y = (<const uint64_t*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


ctypedef struct MaskIdx:
    uint64_t mask
    int64_t idx


cdef int _cmp_mask_idx(const void* a, const void* b) noexcept nogil:
    cdef uint64_t x = (<const MaskIdx*> a).mask
    cdef uint64_t y = (<const MaskIdx*> b).mask
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef int64_t _dfs(int k, uint64_t mask, int n, int* order, uint64_t* above,
                  uint64_t* out, int64_t count, int64_t cap) noexcept nogil:
    cdef int e
    if count > cap:
        return count
    if k == n:
        out[count] = mask
        return count + 1
    e = order[k]
    count = _dfs(k + 1, mask, n, order, above, out, count, cap)
    if count > cap:
        return count
    if above[e] & ~mask == 0:
        count = _dfs(k + 1, mask | ((<uint64_t> 1) << e), n, order, above, out,
                     count, cap)
    return count


def enumerate_upsets(up, int n, long long limit):
    if n == 0:
        return [0]
    cdef uint64_t* cup = NULL
    cdef uint64_t* above = NULL
    cdef uint64_t* out = NULL
    cdef uint64_t* buckets = NULL
    cdef int* order = NULL
    cdef int64_t* offs = NULL
    cdef int i, j, e, pc, best
    cdef int64_t count, k, cap = limit
    cdef object result

    cup = <uint64_t*> malloc(n * sizeof(uint64_t))
    above = <uint64_t*> malloc(n * sizeof(uint64_t))
    order = <int*> malloc(n * sizeof(int))
    out = <uint64_t*> malloc((cap + 1) * sizeof(uint64_t))
    if cup == NULL or above == NULL or order == NULL or out == NULL:
        free(cup); free(above); free(order); free(out)
        raise MemoryError()
    try:
        for i in range(n):
            cup[i] = <uint64_t> up[i]
            above[i] = cup[i] & ~((<uint64_t> 1) << i)
            order[i] = i
        # insertion sort on (popcount(up), index): maximal points first
        for i in range(1, n):
            e = order[i]
            j = i - 1
            while j >= 0 and (
                __builtin_popcountll(cup[order[j]]) > __builtin_popcountll(cup[e])
                or (__builtin_popcountll(cup[order[j]]) == __builtin_popcountll(cup[e])
                    and order[j] > e)
            ):
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = e
        count = _dfs(0, 0, n, order, above, out, 0, cap)
        if count > cap:
            return None
        # sort by (popcount, mask): bucket on popcount, qsort inside buckets
        buckets = <uint64_t*> malloc(count * sizeof(uint64_t))
        offs = <int64_t*> malloc((n + 2) * sizeof(int64_t))
        if buckets == NULL or offs == NULL:
            raise MemoryError()
        for i in range(n + 2):
            offs[i] = 0
        for k in range(count):
            offs[__builtin_popcountll(out[k]) + 1] += 1
        for i in range(1, n + 2):
            offs[i] += offs[i - 1]
        for k in range(count):
            pc = __builtin_popcountll(out[k])
            buckets[offs[pc]] = out[k]
            offs[pc] += 1
        # offs got shifted while filling; recompute starts to sort buckets
        for i in range(n + 1, 0, -1):
            offs[i] = offs[i - 1]
        offs[0] = 0
        for i in range(n + 1):
            if offs[i + 1] > offs[i]:
                qsort(buckets + offs[i], offs[i + 1] - offs[i],
                      sizeof(uint64_t), _cmp_u64)
        result = [0] * count
        for k in range(count):
            result[k] = buckets[k]
        return result
    finally:
        free(cup); free(above); free(order); free(out)
        free(buckets); free(offs)


cdef inline int64_t _add(int64_t a, int64_t b) noexcept nogil:
    if a == -1 or b == -1:
        return -1
    return a + b


cdef inline bint _le(int64_t a, int64_t b) noexcept nogil:
    if b == -1:
        return 1
    if a == -1:
        return 0
    return a <= b


cdef inline int64_t _lookup(uint64_t mask, int32_t* table, MaskIdx* pairs,
                            int64_t m) noexcept nogil:
    cdef int64_t lo, hi, mid
    if table != NULL:
        return table[mask]
    lo = 0
    hi = m - 1
    while lo <= hi:
        mid = (lo + hi) >> 1
        if pairs[mid].mask < mask:
            lo = mid + 1
        elif pairs[mid].mask > mask:
            hi = mid - 1
        else:
            return pairs[mid].idx
    return -1


def scan_axioms(opens, values, int n):
    cdef int64_t m = len(opens)
    cdef uint64_t* cm = NULL
    cdef int64_t* cv = NULL
    cdef int32_t* table = NULL
    cdef MaskIdx* pairs = NULL
    cdef int64_t i, j, k0, ku, kw
    cdef uint64_t mi, mj
    cdef int64_t vi

    cm = <uint64_t*> malloc(m * sizeof(uint64_t))
    cv = <int64_t*> malloc(m * sizeof(int64_t))
    if cm == NULL or cv == NULL:
        free(cm); free(cv)
        raise MemoryError()
    try:
        for i in range(m):
            cm[i] = <uint64_t> opens[i]
            cv[i] = <int64_t> values[i]
        if n <= 20:
            table = <int32_t*> malloc(((<int64_t> 1) << n) * sizeof(int32_t))
            if table == NULL:
                raise MemoryError()
            for i in range((<int64_t> 1) << n):
                table[i] = -1
            for i in range(m):
                table[cm[i]] = <int32_t> i
        else:
            pairs = <MaskIdx*> malloc(m * sizeof(MaskIdx))
            if pairs == NULL:
                raise MemoryError()
            for i in range(m):
                pairs[i].mask = cm[i]
                pairs[i].idx = i
            qsort(pairs, m, sizeof(MaskIdx), _cmp_mask_idx)
        k0 = _lookup(0, table, pairs, m)
        if k0 < 0 or cv[k0] != 0:
            return (1, 0 if k0 < 0 else int(k0), -1)
        for i in range(m):
            mi = cm[i]
            vi = cv[i]
            for j in range(i + 1, m):
                mj = cm[j]
                if mi & ~mj == 0:
                    if not _le(vi, cv[j]):
                        return (2, int(i), int(j))
                    continue
                ku = _lookup(mi | mj, table, pairs, m)
                kw = _lookup(mi & mj, table, pairs, m)
                if ku < 0 or kw < 0:
                    return (4, int(i), int(j))
                if _add(cv[ku], cv[kw]) != _add(vi, cv[j]):
                    return (3, int(i), int(j))
        return (0, -1, -1)
    finally:
        free(cm); free(cv); free(table); free(pairs)


def eval_weights(weights, opens):
    cdef int n = len(weights)
    cdef int64_t m = len(opens)
    cdef int64_t* cw = NULL
    cdef int64_t i, s
    cdef uint64_t mm, b
    cdef int e
    cdef object out

    cw = <int64_t*> malloc((n if n else 1) * sizeof(int64_t))
    if cw == NULL:
        raise MemoryError()
    try:
        for e in range(n):
            cw[e] = <int64_t> weights[e]
        out = [0] * m
        for i in range(m):
            mm = <uint64_t> opens[i]
            s = 0
            while mm:
                b = mm & (~mm + 1)
                e = __builtin_popcountll(b - 1)
                if cw[e] < 0:
                    s = -1
                    break
                s += cw[e]
                mm ^= b
            out[i] = s
        return out
    finally:
        free(cw)
