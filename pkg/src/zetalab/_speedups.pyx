# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled enumeration kernel: prefix-tree walk over Dehn-reduced words.

Mirrors the contract of ``_speedups_py.enumerate_classes_kernel``; see that
module for the reference semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy

cnp.import_array()

DEF MAXLEN = 40
DEF EXPLEN = 48      # room for arc-expanded words (up to MAXLEN + 4 letters)
DEF ORBIT_CAP = 256
DEF RED_CAP = 64     # nodes in one reduction branch search
DEF RES_CAP = 16     # minimal forms returned per arc expansion


cdef inline unsigned long long _mix(unsigned long long x) nogil:
    x ^= x >> 30
    x *= 0xbf58476d1ce4e5b9ULL
    x ^= x >> 27
    x *= 0x94d049bb133111ebULL
    x ^= x >> 31
    return x


cdef void _min_rotation(unsigned char* w, int n, unsigned char* out) nogil:
    cdef int best = 0, i, j, cmp
    for i in range(1, n):
        cmp = 0
        for j in range(n):
            cmp = <int> w[(i + j) % n] - <int> w[(best + j) % n]
            if cmp != 0:
                break
        if cmp < 0:
            best = i
    for j in range(n):
        out[j] = w[(best + j) % n]


cdef int _cyc_free_reduce(unsigned char* w, int n, unsigned char* out) nogil:
    """Free reduction plus cyclic end cancellation; returns the new length."""
    cdef int m = 0, i, lo, hi
    for i in range(n):
        if m > 0 and out[m - 1] == (w[i] ^ 4):
            m -= 1
        else:
            out[m] = w[i]
            m += 1
    lo = 0
    hi = m
    while hi - lo >= 2 and out[lo] == (out[hi - 1] ^ 4):
        lo += 1
        hi -= 1
    for i in range(lo, hi):
        out[i - lo] = out[i]
    return hi - lo


cdef int _minimal_forms(unsigned char* w0, int n0, int target, int* repl,
                        unsigned char res[RES_CAP][MAXLEN]) nogil:
    """Length-``target`` Dehn-minimal min-rotation forms of a cyclic word.

    Branch search over every applicable longer-than-half window
    replacement; returns the number of distinct results collected.
    """
    cdef unsigned char nodes[RED_CAP][EXPLEN]
    cdef int nlen[RED_CAP]
    cdef unsigned char buf[EXPLEN]
    cdef unsigned char red[EXPLEN]
    cdef unsigned char rot[EXPLEN]
    cdef int n_nodes = 0, head = 0, n_res = 0
    cdef int n, m, rl, i, j, k, code, packed, reducible, same, cmp
    rl = _cyc_free_reduce(w0, n0, red)
    _min_rotation(red, rl, nodes[0])
    nlen[0] = rl
    n_nodes = 1
    while head < n_nodes:
        n = nlen[head]
        reducible = 0
        if n >= 5:
            for i in range(n):
                code = 0
                for j in range(5):
                    code = (code << 3) | <int> nodes[head][(i + j) % n]
                packed = repl[code]
                if packed < 0:
                    continue
                reducible = 1
                buf[0] = (packed >> 6) & 7
                buf[1] = (packed >> 3) & 7
                buf[2] = packed & 7
                m = 3
                for j in range(i + 5, i + n):
                    buf[m] = nodes[head][j % n]
                    m += 1
                rl = _cyc_free_reduce(buf, m, red)
                _min_rotation(red, rl, rot)
                same = 0
                for k in range(n_nodes):
                    if nlen[k] != rl:
                        continue
                    cmp = 0
                    for j in range(rl):
                        cmp = <int> rot[j] - <int> nodes[k][j]
                        if cmp != 0:
                            break
                    if cmp == 0:
                        same = 1
                        break
                if same or n_nodes >= RED_CAP:
                    continue
                memcpy(nodes[n_nodes], rot, rl)
                nlen[n_nodes] = rl
                n_nodes += 1
        if reducible == 0 and n == target:
            same = 0
            for k in range(n_res):
                cmp = 0
                for j in range(n):
                    cmp = <int> nodes[head][j] - <int> res[k][j]
                    if cmp != 0:
                        break
                if cmp == 0:
                    same = 1
                    break
            if same == 0 and n_res < RES_CAP:
                memcpy(res[n_res], nodes[head], n)
                n_res += 1
        head += 1
    return n_res


cdef int _orbit_add(unsigned char orbit[ORBIT_CAP][MAXLEN], int* n_orbit,
                    int n, unsigned char* cand, unsigned char* out) nogil:
    """Append a min-rotation candidate to the orbit if new, tracking the
    least form in ``out``; returns 1 on orbit-buffer overflow."""
    cdef int k, j, cmp
    for k in range(n_orbit[0]):
        cmp = 0
        for j in range(n):
            cmp = <int> cand[j] - <int> orbit[k][j]
            if cmp != 0:
                break
        if cmp == 0:
            return 0
    if n_orbit[0] >= ORBIT_CAP:
        return 1
    memcpy(orbit[n_orbit[0]], cand, n)
    n_orbit[0] += 1
    cmp = 0
    for j in range(n):
        cmp = <int> cand[j] - <int> out[j]
        if cmp != 0:
            break
    if cmp < 0:
        memcpy(out, cand, n)
    return 0


cdef int _canonical(unsigned char* word, int n, int* repl, int* arc2,
                    int* arc3, int* half, unsigned char* out) nogil:
    """Least rotation over the length-preserving relator-move closure.

    Moves: exact-half swaps plus 2- and 3-letter arc expansions kept only
    when cyclic Dehn reduction restores the original length (see the
    pure-Python twin).  Returns 0, or 1 if the closure overflowed the
    orbit buffer (best-so-far returned)."""
    cdef unsigned char orbit[ORBIT_CAP][MAXLEN]
    cdef unsigned char cand[MAXLEN]
    cdef unsigned char buf[EXPLEN]
    cdef unsigned char res[RES_CAP][MAXLEN]
    cdef int n_orbit = 1, head = 0, i, j, k, m, r, code, packed
    cdef int n_res, overflow = 0
    _min_rotation(word, n, orbit[0])
    memcpy(out, orbit[0], n)
    if n < 2:
        return 0
    while head < n_orbit:
        for i in range(n):
            # exact-half swap: same length, no reduction needed
            if n >= 4:
                code = 0
                for j in range(4):
                    code = (code << 3) | <int> orbit[head][(i + j) % n]
                packed = half[code]
                if packed >= 0:
                    buf[0] = (packed >> 9) & 7
                    buf[1] = (packed >> 6) & 7
                    buf[2] = (packed >> 3) & 7
                    buf[3] = packed & 7
                    m = 4
                    for j in range(i + 4, i + n):
                        buf[m] = orbit[head][j % n]
                        m += 1
                    _min_rotation(buf, n, cand)
                    overflow |= _orbit_add(orbit, &n_orbit, n, cand, out)
            # short-arc expansion followed by branching reduction
            for k in range(2, 4):
                if n < k:
                    continue
                code = 0
                for j in range(k):
                    code = (code << 3) | <int> orbit[head][(i + j) % n]
                packed = arc2[code] if k == 2 else arc3[code]
                if packed < 0:
                    continue
                m = 8 - k
                for j in range(m):
                    buf[j] = (packed >> (3 * (m - 1 - j))) & 7
                for j in range(i + k, i + n):
                    buf[m] = orbit[head][j % n]
                    m += 1
                n_res = _minimal_forms(buf, m, n, repl, res)
                for r in range(n_res):
                    overflow |= _orbit_add(orbit, &n_orbit, n, res[r], out)
        head += 1
    return overflow


cdef struct HashTable:
    unsigned long long* k0
    unsigned long long* k1
    size_t capacity
    size_t used


cdef int _ht_init(HashTable* ht, size_t capacity) nogil:
    cdef size_t c = 64, i
    while c < capacity:
        c <<= 1
    ht.k0 = <unsigned long long*> malloc(c * sizeof(unsigned long long))
    ht.k1 = <unsigned long long*> malloc(c * sizeof(unsigned long long))
    if ht.k0 == NULL or ht.k1 == NULL:
        return 1
    for i in range(c):
        ht.k0[i] = 0
        ht.k1[i] = 0
    ht.capacity = c
    ht.used = 0
    return 0


cdef int _ht_grow(HashTable* ht) nogil:
    cdef HashTable bigger
    cdef size_t i, slot, mask
    if _ht_init(&bigger, ht.capacity * 2):
        return 1
    mask = bigger.capacity - 1
    for i in range(ht.capacity):
        if ht.k0[i] == 0 and ht.k1[i] == 0:
            continue
        slot = _mix(ht.k0[i] ^ (ht.k1[i] * 0x9E3779B97F4A7C15ULL)) & mask
        while bigger.k0[slot] != 0 or bigger.k1[slot] != 0:
            slot = (slot + 1) & mask
        bigger.k0[slot] = ht.k0[i]
        bigger.k1[slot] = ht.k1[i]
    bigger.used = ht.used
    free(ht.k0)
    free(ht.k1)
    ht[0] = bigger
    return 0


cdef int _ht_insert(HashTable* ht, unsigned long long k0,
                    unsigned long long k1) nogil:
    """Returns 1 if the key was new, 0 if present, -1 on allocation error."""
    cdef size_t mask, slot
    if ht.used * 10 >= ht.capacity * 7:
        if _ht_grow(ht):
            return -1
    mask = ht.capacity - 1
    slot = _mix(k0 ^ (k1 * 0x9E3779B97F4A7C15ULL)) & mask
    while ht.k0[slot] != 0 or ht.k1[slot] != 0:
        if ht.k0[slot] == k0 and ht.k1[slot] == k1:
            return 0
        slot = (slot + 1) & mask
    ht.k0[slot] = k0
    ht.k1[slot] = k1
    ht.used += 1
    return 1


def enumerate_classes_kernel(double[:, ::1] gens, unsigned char[::1] forb,
                             int[::1] repl, int[::1] arc2, int[::1] arc3,
                             int[::1] half, double thresh,
                             double cosh_dmax, long long node_budget,
                             int word_cap, long long expected):
    """See ``_speedups_py.enumerate_classes_kernel``."""
    cdef unsigned char word[MAXLEN]
    cdef unsigned char canon[MAXLEN]
    cdef unsigned char choice[MAXLEN + 2]
    cdef double mats[(MAXLEN + 2) * 4]
    cdef int depth = 0, n, g, k, code, ok, is_new
    cdef long long nodes = 0
    cdef int status = 0
    cdef double a, b, c, d, e, f, gg, h, na, nb, nc, nd, tr, limit
    cdef HashTable ht
    cdef unsigned long long pk0, pk1
    cdef size_t out_cap, out_len_cap, flat_used = 0, n_out = 0, i
    cdef unsigned char* flat
    cdef int* wlens
    cdef double* wtraces
    cdef int* repl_ptr = &repl[0]
    cdef int* arc2_ptr = &arc2[0]
    cdef int* arc3_ptr = &arc3[0]
    cdef int* half_ptr = &half[0]
    cdef unsigned char* forb_ptr = &forb[0]
    cdef cnp.int8_t[::1] fv
    cdef cnp.int64_t[::1] lv
    cdef double[::1] tv

    if word_cap > MAXLEN - 2:
        raise ValueError("word_cap exceeds the compiled maximum")
    limit = 2.0 * cosh_dmax
    if _ht_init(&ht, <size_t> (4 * expected)):
        raise MemoryError()
    out_len_cap = <size_t> max(1024, expected)
    out_cap = out_len_cap * 16
    flat = <unsigned char*> malloc(out_cap)
    wlens = <int*> malloc(out_len_cap * sizeof(int))
    wtraces = <double*> malloc(out_len_cap * sizeof(double))
    if flat == NULL or wlens == NULL or wtraces == NULL:
        free(ht.k0)
        free(ht.k1)
        free(flat)
        free(wlens)
        free(wtraces)
        raise MemoryError()

    mats[0] = 1.0
    mats[1] = 0.0
    mats[2] = 0.0
    mats[3] = 1.0
    choice[0] = 0

    try:
        with nogil:
            while depth >= 0:
                if choice[depth] >= 8:
                    depth -= 1
                    if depth >= 0:
                        choice[depth] += 1
                    continue
                g = choice[depth]
                n = depth
                if n > 0 and g == (word[n - 1] ^ 4):
                    choice[depth] += 1
                    continue
                if n >= 4:
                    code = ((<int> word[n - 4]) << 12) \
                         | ((<int> word[n - 3]) << 9) \
                         | ((<int> word[n - 2]) << 6) \
                         | ((<int> word[n - 1]) << 3) | g
                    if forb_ptr[code]:
                        choice[depth] += 1
                        continue
                a = mats[4 * n]
                b = mats[4 * n + 1]
                c = mats[4 * n + 2]
                d = mats[4 * n + 3]
                e = gens[g, 0]
                f = gens[g, 1]
                gg = gens[g, 2]
                h = gens[g, 3]
                na = a * e + b * gg
                nb = a * f + b * h
                nc = c * e + d * gg
                nd = c * f + d * h
                if na * na + nb * nb + nc * nc + nd * nd > limit:
                    choice[depth] += 1
                    continue
                nodes += 1
                if nodes > node_budget:
                    status = 1
                    break
                word[n] = g
                n += 1
                mats[4 * n] = na
                mats[4 * n + 1] = nb
                mats[4 * n + 2] = nc
                mats[4 * n + 3] = nd
                # candidate test: hyperbolic, within the trace window, and
                # cyclically Dehn-reduced (no wrap-around long relator piece)
                tr = fabs(na + nd)
                if 2.0 + 1e-12 < tr <= thresh and word[0] != (word[n - 1] ^ 4):
                    ok = 1
                    if n >= 5:
                        for k in range(1, 5):
                            code = 0
                            for g in range(n - k, n):
                                code = (code << 3) | <int> word[g]
                            for g in range(5 - k):
                                code = (code << 3) | <int> word[g]
                            if forb_ptr[code]:
                                ok = 0
                                break
                    if ok:
                        _canonical(word, n, repl_ptr, arc2_ptr, arc3_ptr,
                                   half_ptr, canon)
                        pk0 = 0
                        pk1 = 0
                        for k in range(n if n < 20 else 20):
                            pk0 |= (<unsigned long long> canon[k]) << (3 * k)
                        for k in range(20, n):
                            pk1 |= (<unsigned long long> canon[k]) << (3 * (k - 20))
                        pk1 |= (<unsigned long long> n) << 48
                        is_new = _ht_insert(&ht, pk0, pk1)
                        if is_new < 0:
                            status = 2
                            break
                        if is_new:
                            # trace recomputed from the canonical spelling
                            # so the stored value is independent of which
                            # conjugate the tree walk discovered first
                            a = 1.0
                            b = 0.0
                            c = 0.0
                            d = 1.0
                            for k in range(n):
                                g = canon[k]
                                e = gens[g, 0]
                                f = gens[g, 1]
                                gg = gens[g, 2]
                                h = gens[g, 3]
                                na = a * e + b * gg
                                nb = a * f + b * h
                                nc = c * e + d * gg
                                nd = c * f + d * h
                                a = na
                                b = nb
                                c = nc
                                d = nd
                            tr = fabs(a + d)
                            if n_out >= out_len_cap:
                                out_len_cap *= 2
                                wlens = <int*> realloc(wlens, out_len_cap * sizeof(int))
                                wtraces = <double*> realloc(wtraces, out_len_cap * sizeof(double))
                                if wlens == NULL or wtraces == NULL:
                                    status = 2
                                    break
                            if flat_used + <size_t> n > out_cap:
                                out_cap *= 2
                                flat = <unsigned char*> realloc(flat, out_cap)
                                if flat == NULL:
                                    status = 2
                                    break
                            memcpy(flat + flat_used, canon, n)
                            flat_used += <size_t> n
                            wlens[n_out] = n
                            wtraces[n_out] = tr
                            n_out += 1
                if n >= word_cap:
                    choice[depth] += 1
                    continue
                depth += 1
                choice[depth] = 0
        if status == 2:
            raise MemoryError()
        flat_arr = np.empty(flat_used, dtype=np.int8)
        lens_arr = np.empty(n_out, dtype=np.int64)
        traces_arr = np.empty(n_out, dtype=np.float64)
        if flat_used:
            fv = flat_arr
            memcpy(&fv[0], flat, flat_used)
        if n_out:
            lv = lens_arr
            tv = traces_arr
            for i in range(n_out):
                lv[i] = wlens[i]
                tv[i] = wtraces[i]
        return flat_arr, lens_arr, traces_arr, nodes, status
    finally:
        free(ht.k0)
        free(ht.k1)
        free(flat)
        free(wlens)
        free(wtraces)
