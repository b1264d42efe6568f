"""Pure-Python enumeration kernel.

Reference implementation of the prefix-tree walk used by
``surface_group.enumerate_classes``; the compiled twin in ``_speedups.pyx``
follows the same contract.  Selected automatically when the extension is
unavailable, or forced with ``ZETA_LAB_KERNEL=py``.
"""

import math

import numpy as np


def _min_rotation(word):
    n = len(word)
    if n <= 1:
        return tuple(word)
    doubled = tuple(word) + tuple(word)
    return min(doubled[i : i + n] for i in range(n))


def _unpack(packed, k):
    return tuple((packed >> (3 * (k - 1 - j))) & 7 for j in range(k))


def _cyc_free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == (x ^ 4):
            out.pop()
        else:
            out.append(x)
    while len(out) >= 2 and out[0] == (out[-1] ^ 4):
        out = out[1:-1]
    return tuple(out)


def _minimal_forms(word, repl, target):
    """Length-``target`` Dehn-minimal forms of a cyclic word.

    Branches over every applicable longer-than-half window replacement;
    an arc-expanded word can reduce to several distinct minimal
    spellings and all of them belong to the conjugacy orbit.
    """
    out = []
    start = _cyc_free_reduce(word)
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        n = len(cur)
        reducible = False
        if n >= 5:
            doubled = cur + cur
            for i in range(n):
                code = 0
                for j in range(5):
                    code = (code << 3) | doubled[i + j]
                packed = repl[code]
                if packed < 0:
                    continue
                reducible = True
                new = _cyc_free_reduce(_unpack(packed, 3) + doubled[i + 5 : i + n])
                if new not in seen:
                    seen.add(new)
                    stack.append(new)
        if not reducible and n == target:
            out.append(_min_rotation(cur))
    return out


def _canonical(word, repl, arc2, arc3, half):
    """Least rotation over the length-preserving relator-move closure.

    Moves: exact-half swaps plus 2- and 3-letter arc expansions kept
    only when cyclic Dehn reduction returns to the original length.
    """
    start = _min_rotation(word)
    n = len(start)
    seen = {start}
    queue = [start]
    best = start
    while queue:
        cur = queue.pop()
        doubled = cur + cur
        for i in range(n):
            for k, table in ((2, arc2), (3, arc3), (4, half)):
                if n < k:
                    continue
                code = 0
                for j in range(k):
                    code = (code << 3) | doubled[i + j]
                packed = table[code]
                if packed < 0:
                    continue
                new = _unpack(packed, 8 - k) + doubled[i + k : i + n]
                if k == 4:
                    keys = (_min_rotation(new),)
                else:
                    keys = _minimal_forms(new, repl, n)
                for key in keys:
                    if key not in seen:
                        seen.add(key)
                        queue.append(key)
                        if key < best:
                            best = key
    return best


def enumerate_classes_kernel(gens, forb, repl, arc2, arc3, half, thresh,
                             cosh_dmax, node_budget, word_cap, expected):
    """Depth-first walk over Dehn-reduced words with displacement pruning.

    Emits one canonical word per conjugacy class whose |trace| is at most
    ``thresh``.  Returns (words_flat int8, word_lengths, abs_traces, nodes,
    status) with status 0 on success, 1 on budget exhaustion.
    """
    gens = [tuple(row) for row in np.asarray(gens)]
    forb = np.asarray(forb)
    repl = np.asarray(repl)
    arc2 = np.asarray(arc2)
    arc3 = np.asarray(arc3)
    half = np.asarray(half)
    found = {}
    order = []
    nodes = 0
    status = 0
    stack = [((), (1.0, 0.0, 0.0, 1.0))]
    while stack:
        word, mat = stack.pop()
        nodes += 1
        if nodes > node_budget:
            status = 1
            break
        n = len(word)
        if n:
            tr = abs(mat[0] + mat[3])
            if 2.0 + 1e-12 < tr <= thresh and word[0] != (word[-1] ^ 4):
                ok = True
                if n >= 5:
                    for k in range(1, 5):
                        code = 0
                        for x in word[n - k :] + word[: 5 - k]:
                            code = (code << 3) | x
                        if forb[code]:
                            ok = False
                            break
                if ok:
                    key = _canonical(word, repl, arc2, arc3, half)
                    if key not in found:
                        # trace recomputed from the canonical spelling so
                        # the stored value is independent of which
                        # conjugate the tree walk discovered first
                        ka, kb, kc, kd = 1.0, 0.0, 0.0, 1.0
                        for x in key:
                            e, f, gg, h = gens[x]
                            ka, kb, kc, kd = (
                                ka * e + kb * gg,
                                ka * f + kb * h,
                                kc * e + kd * gg,
                                kc * f + kd * h,
                            )
                        found[key] = abs(ka + kd)
                        order.append(key)
        if n >= word_cap:
            continue
        last = word[-1] if n else -1
        a, b, c, d = mat
        # letters pushed in reverse so the stack pops them in 0..7 order
        for g in range(7, -1, -1):
            if n and g == (last ^ 4):
                continue
            if n >= 4:
                code = 0
                for x in word[-4:]:
                    code = (code << 3) | x
                if forb[(code << 3) | g]:
                    continue
            e, f, gg, h = gens[g]
            m2 = (
                a * e + b * gg,
                a * f + b * h,
                c * e + d * gg,
                c * f + d * h,
            )
            if m2[0] * m2[0] + m2[1] * m2[1] + m2[2] * m2[2] + m2[3] * m2[3] > 2.0 * cosh_dmax:
                continue
            stack.append((word + (g,), m2))
    lengths = np.array([len(w) for w in order], dtype=np.int64)
    flat = np.empty(int(lengths.sum()), dtype=np.int8)
    pos = 0
    for w in order:
        flat[pos : pos + len(w)] = w
        pos += len(w)
    traces = np.array([found[w] for w in order], dtype=np.float64)
    return flat, lengths, traces, nodes, status
