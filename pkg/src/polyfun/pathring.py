"""Free module diagrams over the H/P path ring, by word enumeration.

The rank-one free module on the level-i idempotent has, at level j, the
abelian group spanned by composable arrow words from level i to level j
modulo the two-sided ideal generated by the degree's relations.  Nothing
in the relation data promises finite rank, so the computation enumerates
words by length, rewrites against the relation set, and certifies the
result empirically: a run is accepted only if two consecutive length
strata produce no new irreducible word (every longer word then reduces,
by induction on length).

Rewriting orients each relation at its largest term under a fixed
(length, arrow-precedence) order, which makes every rewrite strictly
decreasing and hence terminating.  Completeness of the imposed relation
lattice comes from instancing every rule against every irreducible word
and closing the lattices under left multiplication by arrows.
"""

from __future__ import annotations

import os

from .abgroup import AbHom, Subquotient
from .intlinalg import IntLattice, IntMatrix
from .polyzmod import (PathRingPresentation, PolyZModule, ZModMorphism,
                       arrow_source_level, arrow_target_level, word_levels)

DEFAULT_MAX_WORDLEN = 12
_ENV_CAP = "POLYFUN_MAX_WORDLEN"


class StabilizationError(RuntimeError):
    """Word enumeration did not stabilize within the length cap."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _max_wordlen(explicit=None):
    if explicit is not None:
        return explicit
    env = os.environ.get(_ENV_CAP)
    return int(env) if env else DEFAULT_MAX_WORDLEN


def _arrow_precedence(degree):
    """Larger value = larger arrow in the rewriting order.

    Chosen so that every oriented relation rewrites its trigger to strictly
    smaller words: within equal length, the trigger must dominate every
    replacement word lexicographically.
    """
    if degree == 2:
        order = [("H", 1, 2), ("P", 1, 2)]
    else:
        order = [("H", 1, 2), ("P", 1, 2), ("H", 1, 3), ("H", 2, 3),
                 ("P", 1, 3), ("P", 2, 3)]
    return {a: len(order) - i for i, a in enumerate(order)}


def _composable(word):
    try:
        word_levels(word)
        return True
    except ValueError:
        return False


class _Rules:
    """Completed rewriting system for one relation presentation.

    Base relations are oriented at their largest term; the system is then
    closed under critical pairs (Knuth-Bendix style): for every overlap of
    two triggers, the two one-step reductions are compared, and a nonzero
    difference either yields a new rule (unit leading coefficient) or is
    parked as a plain relation vector for the lattice stage.
    """

    _COMPLETION_ROUNDS = 50

    def __init__(self, presentation):
        self.degree = presentation.degree
        self.prec = _arrow_precedence(presentation.degree)
        self.rules = []
        self.parked = []
        self._memo = {}
        for name, terms in presentation.relations:
            trigger_idx = max(range(len(terms)),
                              key=lambda k: self.weight(terms[k][1]))
            c0, trigger = terms[trigger_idx]
            if abs(c0) != 1:
                raise ValueError(f"relation {name}: trigger coefficient not a unit")
            for k, (c, w) in enumerate(terms):
                if k != trigger_idx and self.weight(w) >= self.weight(trigger):
                    raise ValueError(f"relation {name}: ambiguous trigger")
            replacement = [(-c0 * c, w) for k, (c, w) in enumerate(terms)
                           if k != trigger_idx]
            self.rules.append((trigger, replacement))
        self._complete()

    def weight(self, word):
        return (len(word), tuple(self.prec[a] for a in word))

    def match_at(self, word, pos):
        for trigger, replacement in self.rules:
            k = len(trigger)
            if word[pos:pos + k] == trigger:
                return trigger, replacement
        return None

    def reduce(self, word):
        """Normal form of an abstract composable word."""
        memo = self._memo
        cached = memo.get(word)
        if cached is not None:
            return cached
        for pos in range(len(word)):
            hit = self.match_at(word, pos)
            if hit is None:
                continue
            acc = self._reduce_forcing(word, pos, *hit)
            memo[word] = acc
            return acc
        memo[word] = {word: 1}
        return memo[word]

    def _reduce_forcing(self, word, pos, trigger, replacement):
        u, v = word[:pos], word[pos + len(trigger):]
        acc = {}
        for c, t in replacement:
            _vec_add(acc, self.reduce(u + t + v), c)
        return acc

    def _superpositions(self):
        """(word, position of the second trigger, rule2) for all overlaps."""
        out = []
        for t1, r1 in self.rules:
            for t2, r2 in self.rules:
                spots = set()
                for k in range(1, min(len(t1), len(t2)) + 1):
                    if t1[len(t1) - k:] == t2[:k]:
                        spots.add((t1 + t2[k:], len(t1) - k))
                for pos in range(len(t1) - len(t2) + 1):
                    if t1[pos:pos + len(t2)] == t2 and not (pos == 0 and t1 == t2):
                        spots.add((t1, pos))
                for w, pos in spots:
                    if _composable(w):
                        out.append((w, (t1, r1), pos, (t2, r2)))
        return out

    def _complete(self):
        for _ in range(self._COMPLETION_ROUNDS):
            self._memo = {}
            triggers = {t for t, _ in self.rules}
            new_rules = []
            for w, (t1, r1), pos, (t2, r2) in self._superpositions():
                a = self._reduce_forcing(w, 0, t1, r1)
                b = self._reduce_forcing(w, pos, t2, r2)
                diff = dict(a)
                _vec_add(diff, b, -1)
                if not diff:
                    continue
                lead = max(diff, key=self.weight)
                c0 = diff[lead]
                if abs(c0) == 1 and lead not in triggers:
                    repl = [(-c0 * c, ww) for ww, c in diff.items() if ww != lead]
                    new_rules.append((lead, repl))
                    triggers.add(lead)
                else:
                    self.parked.append(diff)
            if not new_rules:
                self._memo = {}
                return
            self.rules.extend(new_rules)
        raise StabilizationError(
            f"rewriting system did not complete in {self._COMPLETION_ROUNDS} rounds")


_RULES_CACHE = {}


def _completed_rules(presentation):
    key = presentation.degree
    if key not in _RULES_CACHE:
        _RULES_CACHE[key] = _Rules(presentation)
    return _RULES_CACHE[key]


def _vec_add(acc, vec, scale):
    for w, c in vec.items():
        nc = acc.get(w, 0) + scale * c
        if nc:
            acc[w] = nc
        else:
            acc.pop(w, None)


class FreeModuleDiagram:
    """Underlying diagram of the free module on one level idempotent."""

    __slots__ = ("presentation", "level", "module", "words", "stable_at",
                 "_sq", "_rules", "_memo", "_index", "_lattices")

    def __init__(self, presentation, level, max_len=None):
        if presentation.degree not in (2, 3):
            raise ValueError("free modules are computed for degrees 2 and 3 only")
        if not 1 <= level <= presentation.degree:
            raise ValueError("level out of range")
        self.presentation = presentation
        self.level = level
        self._rules = _completed_rules(presentation)
        cap = _max_wordlen(max_len)
        self._enumerate(cap)
        self._impose_relations()
        self._build_module()

    def _reduce(self, word):
        return self._rules.reduce(word)

    def _word_target(self, word):
        return word_levels(word)[1] if word else self.level

    # -- enumeration -------------------------------------------------------

    def _enumerate(self, cap):
        arrows = self.presentation.arrows()
        empty = ()
        self.words = {lv: [] for lv in range(1, self.presentation.degree + 1)}
        self.words[self.level].append(empty)
        frontier = [empty]
        length = 0
        while frontier:
            length += 1
            if length > cap:
                raise StabilizationError(
                    f"no stabilization within word length {cap} "
                    f"(set {_ENV_CAP} to raise the cap)",
                    {"cap": cap,
                     "words": {lv: len(ws) for lv, ws in self.words.items()}})
            new_words = []
            for w in frontier:
                src = self._word_target(w)
                for a in arrows:
                    if arrow_source_level(a) != src:
                        continue
                    w2 = (a,) + w
                    nf = self._reduce(w2)
                    if len(nf) == 1 and nf.get(w2) == 1:
                        new_words.append(w2)
                        self.words[self._word_target(w2)].append(w2)
            frontier = new_words
        # an empty stratum is conclusive (suffixes of irreducible words are
        # irreducible), but certify the two-stratum window explicitly: every
        # one- and two-arrow extension of the vocabulary must reduce into it
        vocab = {w for ws in self.words.values() for w in ws}
        for ws in self.words.values():
            for w in ws:
                for a in arrows:
                    if arrow_source_level(a) != self._word_target(w):
                        continue
                    for b in arrows:
                        if arrow_source_level(b) != arrow_target_level(a):
                            continue
                        nf = self._reduce((b, a) + w)
                        if any(t not in vocab for t in nf):
                            raise StabilizationError(
                                "two-stratum certification failed",
                                {"word": (b, a) + w})
        self.stable_at = length

    # -- relation lattices ---------------------------------------------------

    def _index_maps(self):
        idx = {}
        for lv, ws in self.words.items():
            for k, w in enumerate(ws):
                idx[w] = (lv, k)
        return idx

    def _to_vector(self, nf, level):
        vec = [0] * len(self.words[level])
        for w, c in nf.items():
            lv, k = self._index[w]
            if lv != level:
                raise AssertionError("normal form crosses levels")
            vec[k] = c
        return vec

    def _impose_relations(self):
        self._index = self._index_maps()
        lattices = {lv: IntLattice(len(ws)) for lv, ws in self.words.items()}
        all_words = [w for ws in self.words.values() for w in ws]
        # every rule instanced against every irreducible word
        for trigger, replacement in self._rules.rules:
            tsrc, ttgt = word_levels(trigger)
            for v in all_words:
                if self._word_target(v) != tsrc:
                    continue
                acc = dict(self._reduce(trigger + v))
                for c, t in replacement:
                    _vec_add(acc, self._reduce(t + v), -c)
                if acc:
                    lattices[ttgt].add(self._to_vector(acc, ttgt))
        # parked critical-pair vectors, instanced the same way
        for vec in self._rules.parked:
            some_word = next(iter(vec))
            tsrc, ttgt = word_levels(some_word)
            for v in all_words:
                if self._word_target(v) != tsrc:
                    continue
                acc = {}
                for w, c in vec.items():
                    _vec_add(acc, self._reduce(w + v), c)
                if acc:
                    lattices[ttgt].add(self._to_vector(acc, ttgt))
        # close under left multiplication by arrows
        changed = True
        while changed:
            changed = False
            for lv in list(lattices):
                basis_snapshot = [row[:] for row in lattices[lv].basis]
                for row in basis_snapshot:
                    for a in self.presentation.arrows():
                        if arrow_source_level(a) != lv:
                            continue
                        tgt = arrow_target_level(a)
                        acc = {}
                        for k, c in enumerate(row):
                            if c:
                                _vec_add(acc, self._reduce((a,) + self.words[lv][k]), c)
                        vec = self._to_vector(acc, tgt)
                        if vec not in lattices[tgt]:
                            lattices[tgt].add(vec)
                            changed = True
        self._lattices = lattices

    # -- the diagram ---------------------------------------------------------

    def _build_module(self):
        degree = self.presentation.degree
        sqs = {}
        groups = []
        for lv in range(1, degree + 1):
            n = len(self.words[lv])
            den = [row[:] for row in self._lattices[lv].basis]
            sq = Subquotient(n, None, den)
            sqs[lv] = sq
            groups.append(sq.group)
        h = {}
        p = {}
        for a in self.presentation.arrows():
            src = arrow_source_level(a)
            tgt = arrow_target_level(a)
            cols = []
            for g in range(sqs[src].group.ngens):
                combo = sqs[src].lift(sqs[src].group.unit(g))
                acc = {}
                for k, c in enumerate(combo):
                    if c:
                        _vec_add(acc, self._reduce((a,) + self.words[src][k]), c)
                cols.append(list(sqs[tgt].project(self._to_vector(acc, tgt))))
            hom = AbHom.from_columns(sqs[src].group, sqs[tgt].group, cols)
            kind, m, n = a
            (h if kind == "H" else p)[(m, n)] = hom
        self._sq = sqs
        self.module = PolyZModule(groups, h, p,
                                  name=f"free(e{self.level})@deg{degree}")

    def yoneda_morphism(self, target, element):
        """The morphism free(e_i) -> target sending e_i to the element."""
        comps = []
        for lv in range(1, self.presentation.degree + 1):
            sq = self._sq[lv]
            cols = []
            for g in range(sq.group.ngens):
                combo = sq.lift(sq.group.unit(g))
                out = [0] * target.groups[lv - 1].ngens
                for k, c in enumerate(combo):
                    if not c:
                        continue
                    w = self.words[lv][k]
                    val = list(element)
                    for a in reversed(w):
                        val = list(target.arrow(a)(val))
                    for t, v in enumerate(val):
                        out[t] += c * v
                cols.append(list(target.groups[lv - 1].reduce(out)))
            comps.append(AbHom.from_columns(sq.group, target.groups[lv - 1], cols))
        return ZModMorphism(self.module, target, comps)


def free_module_diagram(presentation, level, max_len=None):
    """Diagram of the rank-one free module on the idempotent e_level."""
    return FreeModuleDiagram(presentation, level, max_len=max_len)
