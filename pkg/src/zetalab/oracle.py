"""Brute-force conjugacy-class oracle for cross-checking the enumerator.

Deliberately shares no machinery with ``surface_group.enumerate_classes``:
it walks *every* freely reduced word up to a letter-length bound (no Dehn
reduction, no geometric pruning), deduplicates group elements by their
matrices, and joins elements into conjugacy classes by single-generator
conjugation inside the collected set.  Slow and memory-hungry by design;
intended for cutoffs around L <= 6.5.

Matrix dedup uses two quantization grids offset by half a cell: equal
matrices known to ~1e-9 can straddle a cell boundary of one grid but
never of both, so keying on both grids and unioning matches is immune to
rounding splits.
"""

import math

import numpy as np
from numba import njit
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .surface_group import _cyclic_free_reduce, _generator_entries, _relator_tables

_GRID = 1e8


@njit(cache=True)
def _collect(gens, word_bound, thresh, out_words, out_mats, out_lens):
    """Depth-first walk over all freely reduced words of length <= bound.

    Words whose matrix has 2 < |trace| <= thresh are appended to the
    output arrays; returns the number collected (negative on overflow).
    """
    word = np.zeros(word_bound, dtype=np.int8)
    choice = np.zeros(word_bound + 1, dtype=np.int8)
    mats = np.zeros((word_bound + 1, 4), dtype=np.float64)
    mats[0, 0] = 1.0
    mats[0, 3] = 1.0
    depth = 0
    count = 0
    while depth >= 0:
        if choice[depth] >= 8:
            depth -= 1
            if depth >= 0:
                choice[depth] += 1
            continue
        g = choice[depth]
        if depth > 0 and g == word[depth - 1] ^ 4:
            choice[depth] += 1
            continue
        a, b, c, d = mats[depth]
        e, f, gg, h = gens[g]
        na = a * e + b * gg
        nb = a * f + b * h
        nc = c * e + d * gg
        nd = c * f + d * h
        word[depth] = g
        n = depth + 1
        mats[n, 0] = na
        mats[n, 1] = nb
        mats[n, 2] = nc
        mats[n, 3] = nd
        tr = abs(na + nd)
        if 2.0 + 1e-12 < tr <= thresh:
            if count >= out_words.shape[0]:
                return -1
            for j in range(n):
                out_words[count, j] = word[j]
            out_mats[count, 0] = na
            out_mats[count, 1] = nb
            out_mats[count, 2] = nc
            out_mats[count, 3] = nd
            out_lens[count] = n
            count += 1
        if n >= word_bound:
            choice[depth] += 1
            continue
        depth += 1
        choice[depth] = 0
    return count


# Largest |entry| * _GRID that still quantizes exactly in int64.  Rows
# beyond it would overflow the cast: every overflowing coordinate
# saturates to the same integer, so unrelated matrices would collide on
# a shared key and distinct elements would be merged.
_KEY_MAX = 4.0e18


def _grid_keys(mats):
    """Sign-normalized integer keys on the base and half-offset grids.

    Returns (k1, k2, bad).  Rows flagged in ``bad`` are too large to
    quantize; their keys are replaced by per-row unique sentinels so they
    can never match anything, and callers must not put them in lookups.
    """
    signs = np.where(
        np.abs(mats[:, 0]) > 1e-9,
        np.sign(mats[:, 0]),
        np.where(np.abs(mats[:, 1]) > 1e-9, np.sign(mats[:, 1]), np.sign(mats[:, 2])),
    )
    scaled = mats * (signs * _GRID)[:, None]
    bad = np.max(np.abs(scaled), axis=1) > _KEY_MAX
    scaled = np.clip(scaled, -_KEY_MAX, _KEY_MAX)
    k1 = np.round(scaled).astype(np.int64)
    k2 = np.round(scaled + 0.5).astype(np.int64)
    if np.any(bad):
        idx = np.nonzero(bad)[0]
        marker = np.int64(-(2**62))
        for k in (k1, k2):
            k[idx, 0] = marker
            k[idx, 1] = idx
    return k1, k2, bad


def _group_by_keys(k1, k2):
    """Union items sharing a key on either grid; returns component labels."""
    n = len(k1)
    rows, cols = [], []
    for keys in (k1, k2):
        _, inverse = np.unique(keys, axis=0, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        sorted_inv = inverse[order]
        starts = np.concatenate([[True], sorted_inv[1:] != sorted_inv[:-1]])
        group_first = order[np.maximum.accumulate(np.where(starts, np.arange(n), 0))]
        rows.append(order)
        cols.append(group_first)
    graph = coo_matrix(
        (np.ones(2 * n), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return connected_components(graph, directed=False)[1]


def _is_cyclically_reduced(word):
    return len(word) >= 1 and word[0] != (word[-1] ^ 4)


def _cyclic_dehn_minimize(word, replacement):
    """Fully cyclically Dehn-reduce a tuple of letters."""
    cur = _cyclic_free_reduce(word)
    while True:
        n = len(cur)
        doubled = cur + cur
        hit = None
        for i in range(n):
            rep = replacement.get(doubled[i : i + 5])
            if rep is not None:
                hit = (i, rep)
                break
        if hit is None:
            return cur
        i, rep = hit
        cur = _cyclic_free_reduce(rep + doubled[i + 5 : i + n])


def brute_force_classes(pres, cutoff, word_bound, capacity=8_000_000):
    """All conjugacy classes of length <= cutoff among short words.

    Returns a list of (canonical_letters, length, n_gamma) triples sorted
    by (length, canonical word); canonical letters are the
    lexicographically least minimal-length cyclically reduced spelling
    found in the class.
    """
    gens = _generator_entries(pres)
    thresh = 2.0 * math.cosh(cutoff / 2.0) + 1e-9
    out_words = np.zeros((capacity, word_bound), dtype=np.int8)
    out_mats = np.zeros((capacity, 4), dtype=np.float64)
    out_lens = np.zeros(capacity, dtype=np.int32)
    count = _collect(gens, word_bound, thresh, out_words, out_mats, out_lens)
    if count < 0:
        raise MemoryError("oracle capacity exhausted; raise `capacity`")
    words = out_words[:count]
    mats = out_mats[:count]
    lens = out_lens[:count]

    k1, k2, key_bad = _grid_keys(mats)
    element_of_word = _group_by_keys(k1, k2)
    n_elements = int(element_of_word.max()) + 1 if count else 0

    first_word = np.full(n_elements, -1, dtype=np.int64)
    for w_idx, e_idx in enumerate(element_of_word.tolist()):
        if first_word[e_idx] < 0:
            first_word[e_idx] = w_idx
    rep_mats = mats[first_word]

    # map both grid keys of every collected word to its element id
    lookup = {}
    for w_idx in range(count):
        if key_bad[w_idx]:
            continue
        e_idx = int(element_of_word[w_idx])
        lookup[k1[w_idx].tobytes()] = e_idx
        lookup[k2[w_idx].tobytes()] = e_idx

    # single-generator conjugation edges between elements
    rows, cols = [], []
    m3 = rep_mats.reshape(-1, 2, 2)
    for g in range(8):
        gm = gens[g].reshape(2, 2)
        gi = np.linalg.inv(gm)
        conj = np.einsum("ij,njk,kl->nil", gm, m3, gi).reshape(-1, 4)
        c1, c2, c_bad = _grid_keys(conj)
        for i in range(n_elements):
            if c_bad[i]:
                continue
            j = lookup.get(c1[i].tobytes())
            if j is None:
                j = lookup.get(c2[i].tobytes())
            if j is not None:
                rows.append(i)
                cols.append(j)
    graph = coo_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(n_elements, n_elements)
    )
    component = connected_components(graph, directed=False)[1]

    # per element: its best (shortest, then lexicographically least)
    # cyclically reduced spelling
    best = [None] * n_elements
    for w_idx in range(count):
        n = int(lens[w_idx])
        letters = tuple(int(x) for x in words[w_idx, :n])
        if not _is_cyclically_reduced(letters):
            continue
        e_idx = int(element_of_word[w_idx])
        cand = (n, letters)
        if best[e_idx] is None or cand < best[e_idx]:
            best[e_idx] = cand

    # Repair pass: a component whose shortest spelling is still cyclically
    # Dehn-reducible is a fragment of a shorter class -- its conjugation
    # chain to shorter spellings leaves the collected word set near the
    # length bound.  Each Dehn step is an explicit conjugacy, so the
    # reduction certifies a merge with the reduced word's element.
    _, replacement, _ = _relator_tables()
    comp_best = {}
    for e_idx in range(n_elements):
        if best[e_idx] is None:
            continue
        c = int(component[e_idx])
        if c not in comp_best or (best[e_idx], e_idx) < comp_best[c]:
            comp_best[c] = (best[e_idx], e_idx)
    extra_rows, extra_cols = [], []
    for (spelling, e_idx) in comp_best.values():
        n, letters = spelling
        reduced = _cyclic_dehn_minimize(letters, replacement)
        if len(reduced) >= n:
            continue
        m = np.eye(2)
        for x in reduced:
            m = m @ gens[x].reshape(2, 2)
        rk1, rk2, r_bad = _grid_keys(m.reshape(1, 4))
        if r_bad[0]:
            continue
        j = lookup.get(rk1[0].tobytes())
        if j is None:
            j = lookup.get(rk2[0].tobytes())
        if j is not None:
            extra_rows.append(e_idx)
            extra_cols.append(j)
    if extra_rows:
        graph = coo_matrix(
            (
                np.ones(len(rows) + len(extra_rows)),
                (rows + extra_rows, cols + extra_cols),
            ),
            shape=(n_elements, n_elements),
        )
        component = connected_components(graph, directed=False)[1]

    members_of = {}
    for e_idx in range(n_elements):
        members_of.setdefault(int(component[e_idx]), []).append(e_idx)

    records = []
    for comp, members in members_of.items():
        spellings = [best[e] for e in members if best[e] is not None]
        if not spellings:
            continue
        n, letters = min(spellings)
        tr = abs(rep_mats[members[0], 0] + rep_mats[members[0], 3])
        length = 2.0 * math.acosh(tr / 2.0)
        if length > cutoff + 1e-12:
            continue
        # n_gamma: maximal letter-level power among the class's
        # minimal-length cyclically reduced spellings
        n_gamma = 1
        for sn, w in spellings:
            if sn != n:
                continue
            for d in range(1, n):
                if n % d == 0 and w == w[:d] * (n // d):
                    n_gamma = max(n_gamma, n // d)
                    break
        records.append((letters, length, n_gamma))
    records.sort(key=lambda r: (r[1], len(r[0]), r[0]))
    return records


def log_selberg_triple(s, spec, rep, j_max=200, k_max=200):
    """Independent triple-sum form of log Z(s; chi).

    Sums over primitive classes, powers k >= 1, and shifts j >= 0:
    log Z = - sum_{gamma0} sum_{j} sum_{k} (1/k) tr chi(gamma0^k)
            e^{-k(s+j) l0}.
    Deliberately computed class-by-class with matrix powers, unlike the
    single-sum production path.
    """
    from .representation import evaluate

    s = complex(s)
    total = 0.0 + 0.0j
    for i in range(len(spec)):
        if spec.n_gammas[i] != 1:
            continue
        l0 = float(spec.lengths[i])
        chi = evaluate(rep, spec.word_at(i))
        power = np.eye(rep.dim, dtype=complex)
        for k in range(1, k_max + 1):
            power = power @ chi
            tr_k = np.trace(power)
            base = np.exp(-k * s * l0)
            if abs(base) < 1e-22 and k > 3:
                break
            for j in range(j_max + 1):
                term = (tr_k / k) * base * np.exp(-k * j * l0)
                if abs(term) < 1e-22 and j > 2:
                    break
                total -= term
    return total
