"""Hyperbolic conjugacy classes of the genus-2 surface group.

Words are tuples of letter codes 0..7 (a1, b1, a2, b2, A1, B1, A2, B2 with
capitals denoting inverses; code k and code k XOR 4 are mutually inverse).
The single relator is [a1,b1][a2,b2], an 8-letter word satisfying the small
cancellation condition C'(1/8): every piece has length 1, so Dehn's
algorithm (replace any subword longer than half of a cyclic rotation of the
relator or its inverse by the shorter complementary side) reaches words of
minimal length, and two minimal cyclic words represent conjugate elements
exactly when they are related by rotations and exact-half relator swaps.

``enumerate_classes`` walks the prefix tree of Dehn-reduced words with
on-the-fly matrix products, pruning prefixes whose displacement of the
base point i already exceeds the cutoff plus a fixed conjugacy slack, and
deduplicates classes by their canonical cyclic form.
"""

import math
import os
from bisect import bisect_right
from functools import lru_cache

import numpy as np

from .errors import (
    BeyondCutoff,
    CutoffTooLarge,
    WordTooLong,
    ZetaLabError,
)
from .hyperbolic_core import (
    GENUS2_LETTERS,
    GENUS2_RELATOR,
    MoebiusMatrix,
    compose,
    translation_length,
)

N_LETTERS = 8
WORD_CAP = 64  # module-wide cap on supported word length
KERNEL_WORD_CAP = 36  # packed canonical keys in the enumeration kernels
SAFETY_FACTOR = 1.15
#: displacement prune bound is cutoff + PRUNE_SLACK; every class of length
#: l has a conjugate displacing the octagon center by at most l + 2.13, and
#: the measured worst prefix excursion of its geodesic spellings is < 2.9.
PRUNE_SLACK = 3.4
DEFAULT_NODE_BUDGET = 1_500_000_000
_CAL_CUTOFF = 8.0  # warm-up cutoff for the word-length calibration


def letter_inverse(code):
    return code ^ 4


def _inverse_word(letters):
    return tuple(letter_inverse(x) for x in reversed(letters))


class Word:
    """A freely reduced word in the genus-2 generators."""

    __slots__ = ("letters",)

    def __init__(self, letters):
        letters = tuple(int(x) for x in letters)
        if len(letters) > WORD_CAP:
            raise WordTooLong(f"{len(letters)} letters exceeds the cap {WORD_CAP}")
        for x in letters:
            if not 0 <= x < N_LETTERS:
                raise ValueError(f"letter code {x} out of range")
        self.letters = letters

    @classmethod
    def parse(cls, text):
        """Parse the dotted form, e.g. ``a1.B1.a2``."""
        if not text:
            return cls(())
        return cls(GENUS2_LETTERS.index(part) for part in text.split("."))

    def format(self):
        return ".".join(GENUS2_LETTERS[x] for x in self.letters)

    def inverse(self):
        return Word(_inverse_word(self.letters))

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters

    def __lt__(self, other):
        a, b = self.letters, other.letters
        return (len(a), a) < (len(b), b)

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({self.format()!r})"


def word_matrix(w, pres):
    """Matrix of a word under the presentation's generators."""
    m = MoebiusMatrix.identity()
    for code in w.letters:
        m = compose(m, pres.letter_matrix(code))
    return m


def free_reduce(w):
    """Cancel adjacent inverse pairs until none remain."""
    out = []
    for x in w.letters:
        if out and out[-1] == letter_inverse(x):
            out.pop()
        else:
            out.append(x)
    return Word(out)


def cyclic_reduce(w):
    """Freely reduce, then strip conjugating prefix/suffix pairs."""
    letters = list(free_reduce(w).letters)
    while len(letters) >= 2 and letters[0] == letter_inverse(letters[-1]):
        letters = letters[1:-1]
    return Word(letters)


@lru_cache(maxsize=1)
def _relator_tables():
    """Dehn-replacement and half-swap tables for the genus-2 relator.

    Returns (forbidden, replacement, halves): ``forbidden`` is the set of
    5-letter windows that begin a longer-than-half relator piece;
    ``replacement`` maps each such window to the equivalent 3-letter word;
    ``halves`` maps each exact-half (4-letter) window to the complementary
    half representing the same group element.
    """
    forbidden = {}
    halves = {}
    for base in (GENUS2_RELATOR, _inverse_word(GENUS2_RELATOR)):
        for rot in range(len(base)):
            cyc = base[rot:] + base[:rot]
            # cyc[:5] * cyc[5:] = relator = identity, so cyc[:5] equals
            # the inverse of cyc[5:], which is 3 letters shorter.
            forbidden[cyc[:5]] = _inverse_word(cyc[5:])
            halves[cyc[:4]] = _inverse_word(cyc[4:])
    return frozenset(forbidden), dict(forbidden), dict(halves)


def dehn_reduce(w, pres):
    """Shorten a word to minimal letter-length via Dehn's algorithm."""
    if pres.genus != 2:
        raise ZetaLabError("Dehn reduction is implemented for genus 2 only")
    _, replacement, _ = _relator_tables()
    letters = list(free_reduce(w).letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 4):
            window = tuple(letters[i : i + 5])
            rep = replacement.get(window)
            if rep is not None:
                letters[i : i + 5] = rep
                letters = list(free_reduce(Word(letters)).letters)
                changed = True
                break
    return Word(letters)


def _min_rotation(letters):
    n = len(letters)
    if n <= 1:
        return tuple(letters)
    doubled = tuple(letters) + tuple(letters)
    return min(doubled[i : i + n] for i in range(n))


@lru_cache(maxsize=1)
def _arc_tables():
    """Map each 2/3/4-letter relator arc to its complementary side.

    For every cyclic rotation of the relator or its inverse, the first
    ``k`` letters equal the inverse of the remaining ``8 - k`` as a group
    element.  Pieces have length 1, so each arc determines its rotation
    uniquely and the map is well defined.
    """
    arcs = {}
    for base in (GENUS2_RELATOR, _inverse_word(GENUS2_RELATOR)):
        for rot in range(len(base)):
            cyc = base[rot:] + base[:rot]
            for k in (2, 3, 4):
                arcs[cyc[:k]] = _inverse_word(cyc[k:])
    return arcs


def _cyclic_free_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == letter_inverse(x):
            out.pop()
        else:
            out.append(x)
    while len(out) >= 2 and out[0] == letter_inverse(out[-1]):
        out = out[1:-1]
    return tuple(out)


def _cyclic_minimal_forms(letters, replacement, target):
    """Minimal-rotation length-``target`` words reachable by cyclic Dehn moves.

    Branches over every applicable longer-than-half window replacement
    (an expanded word can admit several, leading to different minimal
    spellings) and over cyclic free reduction; collects only the fully
    reduced results of the requested length.
    """
    out = set()
    start = _cyclic_free_reduce(letters)
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        n = len(cur)
        reducible = False
        if n >= 5:
            doubled = cur + cur
            for i in range(n):
                rep = replacement.get(doubled[i : i + 5])
                if rep is None:
                    continue
                reducible = True
                new = _cyclic_free_reduce(rep + doubled[i + 5 : i + n])
                if new not in seen:
                    seen.add(new)
                    stack.append(new)
        if not reducible and n == target:
            out.add(_min_rotation(cur))
    return out


def _conjugacy_orbit(letters):
    """Minimal-rotation forms reachable by length-preserving relator moves.

    Two kinds of moves generate the orbit: exact-half swaps (a 4-letter
    arc is replaced by the complementary half, same length), and shorter
    arc moves where a 2- or 3-letter arc is replaced by its 6- or
    5-letter complement and the result is kept only when cyclic Dehn
    reduction restores the original length.  The short-arc moves realize
    conjugacies coming from annular diagrams whose cells touch both
    boundary words -- rotations plus half swaps alone miss those, which
    would split one conjugacy class into several keys.
    """
    _, replacement, _ = _relator_tables()
    arcs = _arc_tables()
    start = _min_rotation(letters)
    n = len(start)
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop()
        doubled = cur + cur
        for i in range(n):
            for k in (2, 3, 4):
                if n < k:
                    continue
                comp = arcs.get(doubled[i : i + k])
                if comp is None:
                    continue
                new = comp + doubled[i + k : i + n]
                if k == 4:
                    results = (_min_rotation(new),)
                else:
                    results = _cyclic_minimal_forms(new, replacement, n)
                for key in results:
                    if key not in seen:
                        seen.add(key)
                        queue.append(key)
    return seen


def canonical_cyclic_form(w):
    """Deterministic conjugacy-class key for a cyclically reduced word.

    Lexicographically least word over the closure of ``w`` under
    rotations, exact-half relator swaps, and length-preserving short-arc
    moves; see ``_conjugacy_orbit`` for why all three are needed to make
    the key a complete conjugacy invariant for minimal cyclic words.
    """
    if len(w) == 0:
        return w
    return Word(min(_conjugacy_orbit(w.letters)))


def primitive_decompose(w):
    """Shortest letter-level cyclic root and the cofactor exponent."""
    letters = w.letters
    n = len(letters)
    if n == 0:
        raise ValueError("empty word has no primitive decomposition")
    for d in range(1, n + 1):
        if n % d == 0 and letters == letters[:d] * (n // d):
            return Word(letters[:d]), n // d
    raise AssertionError("unreachable")


class ConjugacyClassRecord:
    """One hyperbolic conjugacy class."""

    __slots__ = ("canonical_word", "length", "n_gamma", "primitive_root", "abs_trace")

    def __init__(self, canonical_word, length, n_gamma, primitive_root, abs_trace):
        self.canonical_word = canonical_word
        self.length = length
        self.n_gamma = n_gamma
        self.primitive_root = primitive_root
        self.abs_trace = abs_trace

    def __repr__(self):
        return (
            f"ConjugacyClassRecord({self.canonical_word.format()!r}, "
            f"l={self.length:.6f}, n={self.n_gamma})"
        )

    def __eq__(self, other):
        if not isinstance(other, ConjugacyClassRecord):
            return NotImplemented
        return (
            self.canonical_word == other.canonical_word
            and abs(self.length - other.length) <= 1e-9
            and self.n_gamma == other.n_gamma
            and self.primitive_root == other.primitive_root
        )


class LengthSpectrum:
    """All hyperbolic conjugacy classes with length up to a cutoff.

    Data is stored columnar (numpy arrays) so that million-class spectra
    stay compact; ``records`` materializes classic record objects on
    demand.  ``completeness`` carries the word-length bound used by the
    enumeration and its calibration.
    """

    def __init__(self, cutoff, lengths, abs_traces, n_gammas, words_flat,
                 offsets, root_index, completeness):
        self.cutoff = float(cutoff)
        self.lengths = lengths
        self.abs_traces = abs_traces
        self.n_gammas = n_gammas
        self.words_flat = words_flat
        self.offsets = offsets
        self.root_index = root_index
        self.completeness = dict(completeness)

    def __len__(self):
        return len(self.lengths)

    def word_at(self, i):
        return Word(self.words_flat[self.offsets[i] : self.offsets[i + 1]])

    def record_at(self, i):
        root = self.word_at(self.root_index[i])
        return ConjugacyClassRecord(
            self.word_at(i),
            float(self.lengths[i]),
            int(self.n_gammas[i]),
            root,
            float(self.abs_traces[i]),
        )

    @property
    def records(self):
        return [self.record_at(i) for i in range(len(self))]

    def __iter__(self):
        return (self.record_at(i) for i in range(len(self)))


def _pack_letters(letters):
    code = 0
    for x in letters:
        code = (code << 3) | x
    return code


def _build_kernel_tables():
    """Numpy lookup tables consumed by the enumeration kernels.

    ``forb`` flags longer-than-half 5-letter windows, ``repl`` maps each
    to the packed 3-letter complement, and ``arc2``/``arc3``/``half`` map
    packed 2/3/4-letter relator arcs to their packed complements.
    """
    _, replacement, _ = _relator_tables()
    arcs = _arc_tables()
    forb = np.zeros(1 << 15, dtype=np.uint8)
    repl = np.full(1 << 15, -1, dtype=np.int32)
    for window, comp in replacement.items():
        forb[_pack_letters(window)] = 1
        repl[_pack_letters(window)] = _pack_letters(comp)
    arc2 = np.full(1 << 6, -1, dtype=np.int32)
    arc3 = np.full(1 << 9, -1, dtype=np.int32)
    half = np.full(1 << 12, -1, dtype=np.int32)
    for window, comp in arcs.items():
        table = {2: arc2, 3: arc3, 4: half}[len(window)]
        table[_pack_letters(window)] = _pack_letters(comp)
    return forb, repl, arc2, arc3, half


def _generator_entries(pres):
    out = np.empty((N_LETTERS, 4), dtype=np.float64)
    for code in range(N_LETTERS):
        out[code] = pres.letter_matrix(code).entries()
    return out


def _select_kernel():
    forced = os.environ.get("ZETA_LAB_KERNEL", "").strip().lower()
    if forced == "py":
        from . import _speedups_py

        return _speedups_py.enumerate_classes_kernel, "python"
    try:
        from . import _speedups

        return _speedups.enumerate_classes_kernel, "cython"
    except ImportError:
        if forced == "c":
            raise
        from . import _speedups_py

        return _speedups_py.enumerate_classes_kernel, "python"


def kernel_backend():
    """Name of the enumeration backend selected at import: cython or python."""
    return _select_kernel()[1]


def _run_kernel(pres, cutoff, dmax, node_budget, expected):
    kernel, _ = _select_kernel()
    forb, repl, arc2, arc3, half = _build_kernel_tables()
    gens = _generator_entries(pres)
    thresh = 2.0 * math.cosh(cutoff / 2.0) + 1e-9
    words_flat, lengths_arr, traces, nodes, status = kernel(
        gens, forb, repl, arc2, arc3, half, thresh, math.cosh(dmax),
        int(node_budget), KERNEL_WORD_CAP, int(expected),
    )
    if status != 0:
        raise CutoffTooLarge(
            f"enumeration aborted after {nodes} nodes (budget {node_budget})"
        )
    offsets = np.zeros(len(lengths_arr) + 1, dtype=np.int64)
    np.cumsum(lengths_arr, out=offsets[1:])
    return words_flat, offsets, traces, nodes


@lru_cache(maxsize=4)
def _calibration(pres):
    """Fit the linear lower bound l >= slope*n - offset on a warm-up run.

    ``n`` is the letter-length of canonical class words from a complete
    warm-up enumeration; the fit takes the lower convex hull of the
    per-length minima and uses its final-segment slope, pushed down so the
    bound sits below every data point.
    """
    dmax = _CAL_CUTOFF + PRUNE_SLACK
    words_flat, offsets, traces, _ = _run_kernel(
        pres, _CAL_CUTOFF, dmax, DEFAULT_NODE_BUDGET, 1 << 12
    )
    lengths = 2.0 * np.arccosh(traces / 2.0)
    word_lens = np.diff(offsets)
    min_l = {}
    for n, l in zip(word_lens.tolist(), lengths.tolist()):
        if l <= _CAL_CUTOFF and (n not in min_l or l < min_l[n]):
            min_l[n] = l
    points = sorted(min_l.items())
    # lower convex hull
    hull = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    if len(hull) >= 2:
        (x1, y1), (x2, y2) = hull[-2], hull[-1]
        slope = (y2 - y1) / (x2 - x1)
    else:
        slope = points[-1][1] / points[-1][0]
    offset = max(slope * n - l for n, l in points)
    return slope, offset


def word_length_bound(pres, cutoff):
    """Calibrated letter-length bound W(L) for classes of length <= L."""
    slope, offset = _calibration(pres)
    return int(math.ceil((cutoff + offset) / slope * SAFETY_FACTOR)), slope, offset


def enumerate_classes(pres, cutoff, node_budget=DEFAULT_NODE_BUDGET):
    """Enumerate every hyperbolic conjugacy class with length <= cutoff."""
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    bound, slope, offset = word_length_bound(pres, cutoff)
    if bound > min(WORD_CAP, KERNEL_WORD_CAP):
        raise CutoffTooLarge(
            f"calibrated word-length bound {bound} exceeds the supported cap "
            f"{min(WORD_CAP, KERNEL_WORD_CAP)}"
        )
    projected = 0.25 * math.exp(cutoff + PRUNE_SLACK)
    if projected > node_budget:
        raise CutoffTooLarge(
            f"projected enumeration of ~{projected:.2e} nodes exceeds the "
            f"budget {node_budget}"
        )
    expected = max(64, int(3.0 * math.exp(cutoff) / cutoff))
    words_flat, offsets, traces, _ = _run_kernel(
        pres, cutoff, cutoff + PRUNE_SLACK, node_budget, expected
    )
    lengths = 2.0 * np.arccosh(traces / 2.0)
    keep = lengths <= cutoff + 1e-12
    if not np.all(keep):
        idx = np.flatnonzero(keep)
        word_lens = np.diff(offsets)[idx]
        sel = np.concatenate(
            [np.arange(offsets[i], offsets[i + 1]) for i in idx]
        ) if len(idx) else np.empty(0, dtype=np.int64)
        words_flat = words_flat[sel]
        offsets = np.zeros(len(idx) + 1, dtype=np.int64)
        np.cumsum(word_lens, out=offsets[1:])
        traces = traces[idx]
        lengths = lengths[idx]

    n = len(lengths)
    order = _sort_order(lengths, words_flat, offsets)
    words_flat, offsets = _reorder_words(words_flat, offsets, order)
    lengths = lengths[order]
    traces = traces[order]

    n_gammas, root_index = _power_structure(lengths, words_flat, offsets, cutoff)
    completeness = {
        "word_length_bound": bound,
        "calibration_slope": slope,
        "calibration_offset": offset,
        "safety_factor": SAFETY_FACTOR,
    }
    return LengthSpectrum(
        cutoff, lengths, traces, n_gammas, words_flat, offsets, root_index,
        completeness,
    )


def _sort_order(lengths, words_flat, offsets):
    """Deterministic order: by length, ties broken by canonical word."""
    n = len(lengths)
    width = int(np.diff(offsets).max()) if n else 1
    padded = np.zeros((n, width), dtype=np.uint8)
    for i in range(n):
        seg = words_flat[offsets[i] : offsets[i + 1]]
        padded[i, : len(seg)] = seg + 1  # 0 is the pad, codes shift to 1..8
    keys = padded.view(f"|S{width}").ravel()
    return np.lexsort((keys, lengths))


def _reorder_words(words_flat, offsets, order):
    word_lens = np.diff(offsets)[order]
    new_offsets = np.zeros(len(order) + 1, dtype=np.int64)
    np.cumsum(word_lens, out=new_offsets[1:])
    new_flat = np.empty(int(new_offsets[-1]), dtype=words_flat.dtype)
    for new_i, old_i in enumerate(order.tolist()):
        new_flat[new_offsets[new_i] : new_offsets[new_i + 1]] = words_flat[
            offsets[old_i] : offsets[old_i + 1]
        ]
    return new_flat, new_offsets


def _power_structure(lengths, words_flat, offsets, cutoff):
    """Assign n_gamma and the primitive-root index to every class.

    Classes sorted by length are walked in order; each primitive class of
    length <= cutoff/2 marks its proper powers by constructing the powered
    cyclic word and canonicalizing it, so letter-periodicity hidden behind
    half-relator swaps is still found.
    """
    n = len(lengths)
    n_gammas = np.ones(n, dtype=np.int32)
    root_index = np.arange(n, dtype=np.int64)
    if n == 0:
        return n_gammas, root_index
    index_of = {}
    for i in range(n):
        index_of[bytes(words_flat[offsets[i] : offsets[i + 1]])] = i
    marked = np.zeros(n, dtype=bool)
    for i in range(n):
        if marked[i] or lengths[i] > cutoff / 2.0 + 1e-9:
            continue
        base = tuple(words_flat[offsets[i] : offsets[i + 1]].tolist())
        k = 2
        while k * lengths[i] <= cutoff + 1e-9:
            powered = canonical_cyclic_form(Word(base * k))
            j = index_of.get(bytes(bytearray(powered.letters)))
            if j is None:
                raise ZetaLabError(
                    "internal consistency failure: power of an enumerated "
                    "class is missing from the spectrum"
                )
            if abs(lengths[j] - k * lengths[i]) > 1e-9:
                raise ZetaLabError(
                    "internal consistency failure: power length mismatch"
                )
            n_gammas[j] = k
            root_index[j] = i
            marked[j] = True
            k += 1
    return n_gammas, root_index


def counting_function(spectrum, radius):
    """Number of classes with length <= radius."""
    if radius > spectrum.cutoff + 1e-12:
        raise BeyondCutoff(
            f"R = {radius!r} exceeds the enumerated cutoff {spectrum.cutoff!r}"
        )
    return int(bisect_right(spectrum.lengths.tolist(), radius + 1e-12))


def save_spectrum(spectrum, path):
    """Write the cache file; see the package docs for the format."""
    c = spectrum.completeness
    lines = [
        f"# genus=2 cutoff={spectrum.cutoff:.17g} "
        f"slope={c['calibration_slope']:.17g} "
        f"offset={c['calibration_offset']:.17g} "
        f"safety={c['safety_factor']:.17g}"
    ]
    lines.append("length,n_gamma,abs_trace,canonical_word,primitive_root")
    for i in range(len(spectrum)):
        word = spectrum.word_at(i).format()
        root = spectrum.word_at(spectrum.root_index[i]).format()
        lines.append(
            f"{spectrum.lengths[i]:.17g},{int(spectrum.n_gammas[i])},"
            f"{spectrum.abs_traces[i]:.17g},{word},{root}"
        )
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_spectrum(path):
    """Read a cache file written by ``save_spectrum``."""
    with open(path) as fh:
        header = fh.readline().strip()
        fields = dict(
            part.split("=", 1) for part in header.lstrip("# ").split()
        )
        fh.readline()  # column names
        lengths, n_gammas, traces, words, roots = [], [], [], [], []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            l, ng, tr, word, root = line.split(",")
            lengths.append(float(l))
            n_gammas.append(int(ng))
            traces.append(float(tr))
            words.append(Word.parse(word))
            roots.append(Word.parse(root))
    offsets = np.zeros(len(words) + 1, dtype=np.int64)
    np.cumsum([len(w) for w in words], out=offsets[1:])
    flat = np.empty(int(offsets[-1]), dtype=np.int8)
    index_of = {}
    for i, w in enumerate(words):
        flat[offsets[i] : offsets[i + 1]] = w.letters
        index_of[w.letters] = i
    root_index = np.array([index_of[r.letters] for r in roots], dtype=np.int64)
    completeness = {
        "word_length_bound": word_length_bound_from_fit(
            float(fields["cutoff"]), float(fields["slope"]),
            float(fields["offset"]), float(fields["safety"]),
        ),
        "calibration_slope": float(fields["slope"]),
        "calibration_offset": float(fields["offset"]),
        "safety_factor": float(fields["safety"]),
    }
    return LengthSpectrum(
        float(fields["cutoff"]),
        np.array(lengths),
        np.array(traces),
        np.array(n_gammas, dtype=np.int32),
        flat,
        offsets,
        root_index,
        completeness,
    )


def word_length_bound_from_fit(cutoff, slope, offset, safety):
    return int(math.ceil((cutoff + offset) / slope * safety))
