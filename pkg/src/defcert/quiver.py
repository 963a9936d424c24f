"""Quiver presentations and noncommutative rewriting over F_p.

Words are tuples of arrow names in written order: the rightmost arrow acts
first, so the word ("gamma", "beta") is the path "first beta, then gamma"
and is composable when source(gamma) = target(beta).  Monomial order is
degree-lexicographic with the lexicographic tie-break taken in arrow
declaration order; it is admissible, so rewriting leading words to strictly
smaller tails terminates.

Completion runs overlap (critical-pair) closure on the relation set until
every S-polynomial reduces to zero, keeping the rule set interreduced.  The
irreducible words then form a basis of the quotient algebra; the basis
search fails with CapExceededError as soon as an irreducible word reaches
the configured length cap, which is how an infinite-dimensional quotient is
detected and reported.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


class QuiverSyntaxError(ValueError):
    """Fixture text that does not conform to the grammar."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceededError(RuntimeError):
    """Completion or basis search hit the length cap."""


def _as_vertex(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


@dataclass(frozen=True)
class PathWord:
    """A path, written order: arrows[-1] acts first.  Empty = idempotent."""

    source: object
    arrows: tuple[str, ...]

    def __str__(self):
        return "*".join(self.arrows) if self.arrows else f"e_{self.source}"


class QuiverSpec:
    """A quiver with relations over F_p.

    Arrows keep declaration order (it fixes the monomial order).  Relations
    are stored normalized: powers expanded, coefficients canonical mod p,
    terms parallel and composable, every monomial of length >= 2.
    """

    def __init__(self, p, vertices, arrows, relations=(), suggested_cap=None):
        self.p = p
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.arrows = dict(arrows)  # name -> (src, tgt), insertion ordered
        for name, (s, t) in self.arrows.items():
            if s not in self.vertices or t not in self.vertices:
                raise ValueError(f"arrow {name} references unknown vertex")
        self.arrow_names = tuple(self.arrows)
        self.arrow_index = {a: i for i, a in enumerate(self.arrow_names)}
        self.suggested_cap = suggested_cap
        self.relations = [self._normalize_relation(r) for r in relations]

    def source(self, name):
        return self.arrows[name][0]

    def target(self, name):
        return self.arrows[name][1]

    def word_endpoints(self, word: tuple[str, ...]):
        """(source, target) of a composable nonempty word; raises otherwise."""
        if not word:
            raise ValueError("empty word has no canonical endpoints")
        for name in word:
            if name not in self.arrows:
                raise ValueError(f"unknown arrow {name!r}")
        for left, right in zip(word, word[1:]):
            if self.source(left) != self.target(right):
                raise ValueError(
                    f"word {'*'.join(word)} is not composable at {left}*{right}"
                )
        return self.source(word[-1]), self.target(word[0])

    def _normalize_relation(self, terms: dict) -> dict:
        out = {}
        for word, c in terms.items():
            word = tuple(word)
            c = c % self.p
            if c == 0:
                continue
            if len(word) < 2:
                raise ValueError("relation monomials must have length >= 2")
            self.word_endpoints(word)
            out[word] = (out.get(word, 0) + c) % self.p
        out = {w: c for w, c in out.items() if c}
        if not out:
            raise ValueError("relation is identically zero")
        ends = {self.word_endpoints(w) for w in out}
        if len(ends) != 1:
            raise ValueError("relation terms are not parallel paths")
        return out

    def __eq__(self, other):
        return (
            isinstance(other, QuiverSpec)
            and self.p == other.p
            and self.vertices == other.vertices
            and self.arrows == other.arrows
            and self.relations == other.relations
        )

    def __repr__(self):
        return (
            f"QuiverSpec(p={self.p}, {len(self.vertices)} vertices, "
            f"{len(self.arrows)} arrows, {len(self.relations)} relations)"
        )


# ---------------------------------------------------------------------------
# fixture grammar


def parse_quiver_spec(text: str) -> QuiverSpec:
    """Parse the line-oriented quiver fixture grammar.

    Sections: `prime:`, `vertices:`, `arrows:` (one `name: src -> tgt` per
    line), `relations:` (one expression per line).  `#` starts a comment,
    `*` composes right to left exactly as juxtaposition is read, `^k`
    repeats a parenthesized word, and `+`/`-` form F_p combinations.
    """
    p = None
    vertices = []
    arrows = {}
    arrow_lines = {}
    relation_lines = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(":", 1)[0].strip().lower()
        if head in ("prime", "vertices", "arrows", "relations") and ":" in line:
            rest = line.split(":", 1)[1].strip()
            section = head
            if head == "prime":
                try:
                    p = int(rest)
                except ValueError:
                    raise QuiverSyntaxError(f"bad prime {rest!r}", lineno)
            elif head == "vertices":
                if not rest:
                    raise QuiverSyntaxError("vertices: needs labels", lineno)
                vertices = [_as_vertex(t) for t in rest.split()]
            continue
        if section == "arrows":
            if ":" not in line or "->" not in line:
                raise QuiverSyntaxError(f"bad arrow line {line!r}", lineno)
            name, rest = (s.strip() for s in line.split(":", 1))
            src, tgt = (s.strip() for s in rest.split("->", 1))
            if not name.isidentifier():
                raise QuiverSyntaxError(f"bad arrow name {name!r}", lineno)
            if name in arrows:
                raise QuiverSyntaxError(f"duplicate arrow {name!r}", lineno)
            arrows[name] = (_as_vertex(src), _as_vertex(tgt))
            arrow_lines[name] = lineno
        elif section == "relations":
            relation_lines.append((lineno, line))
        else:
            raise QuiverSyntaxError(f"unexpected line {line!r}", lineno)
    if p is None:
        raise QuiverSyntaxError("missing prime: section")
    if not vertices:
        raise QuiverSyntaxError("missing vertices: section")
    for name, (src, tgt) in arrows.items():
        if src not in vertices or tgt not in vertices:
            raise QuiverSyntaxError(
                f"arrow {name} references unknown vertex", arrow_lines[name]
            )
    try:
        spec = QuiverSpec(p, vertices, arrows)
    except ValueError as exc:
        raise QuiverSyntaxError(str(exc)) from exc
    rels = []
    for lineno, line in relation_lines:
        try:
            terms = _parse_relation(line, spec)
            spec._normalize_relation(terms)  # semantic checks, kept per line
            rels.append(terms)
        except ValueError as exc:
            raise QuiverSyntaxError(str(exc), lineno) from exc
    return QuiverSpec(p, vertices, arrows, rels, suggested_cap=None)


def _tokenize_relation(s: str):
    tokens = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*^()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            tokens.append(int(s[i:j]))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(s) and (s[j].isalnum() or s[j] == "_"):
                j += 1
            tokens.append(s[i:j])
            i = j
        else:
            raise ValueError(f"unexpected character {ch!r}")
    return tokens


def _parse_relation(line: str, spec: QuiverSpec) -> dict:
    """expression := term (('+'|'-') term)*
    term := [int '*'] factor ('*' factor)* ;  factor := arrow['^'k] | '(' factors ')' ['^'k]
    """
    tokens = _tokenize_relation(line)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_factor():
        tok = take()
        if tok == "(":
            word = []
            while peek() != ")":
                if peek() is None:
                    raise ValueError("unbalanced parenthesis")
                if peek() == "*":
                    take()
                    continue
                word.extend(parse_factor())
            take()  # ')'
            return _maybe_power(word)
        if isinstance(tok, str) and tok not in "+-*^()":
            if tok not in spec.arrows:
                raise ValueError(f"unknown arrow {tok!r}")
            return _maybe_power([tok])
        raise ValueError(f"unexpected token {tok!r}")

    def _maybe_power(word):
        nonlocal pos
        if peek() == "^":
            take()
            exp = take()
            if not isinstance(exp, int) or exp < 0:
                raise ValueError("power must be a nonnegative integer")
            word = list(word) * exp
        return word

    def parse_term():
        coeff = 1
        if isinstance(peek(), int):
            coeff = take()
            if peek() == "*":
                take()
        word = []
        word.extend(parse_factor())
        while True:
            if peek() == "*":
                take()
                word.extend(parse_factor())
            elif peek() == "(" or (
                isinstance(peek(), str) and peek() not in "+-*^()"
            ):
                # juxtaposition composes exactly like an explicit *
                word.extend(parse_factor())
            else:
                break
        return coeff, tuple(word)

    terms = {}
    sign = 1
    if peek() in ("+", "-"):
        sign = -1 if take() == "-" else 1
    while pos < len(tokens):
        coeff, word = parse_term()
        terms[word] = terms.get(word, 0) + sign * coeff
        if pos < len(tokens):
            tok = take()
            if tok == "+":
                sign = 1
            elif tok == "-":
                sign = -1
            else:
                raise ValueError(f"expected + or -, got {tok!r}")
    return terms


def print_quiver_spec(spec: QuiverSpec) -> str:
    """Canonical fixture text; parse(print(spec)) == spec."""
    lines = [f"prime: {spec.p}"]
    lines.append("vertices: " + " ".join(str(v) for v in spec.vertices))
    lines.append("arrows:")
    for name, (s, t) in spec.arrows.items():
        lines.append(f"  {name}: {s} -> {t}")
    if spec.relations:
        lines.append("relations:")
        for rel in spec.relations:
            lines.append("  " + relation_str(spec, rel))
    return "\n".join(lines) + "\n"


def relation_str(spec: QuiverSpec, terms: dict) -> str:
    key = lambda w: _word_key(spec, w)
    parts = []
    for word in sorted(terms, key=key, reverse=True):
        c = terms[word] % spec.p
        body = "*".join(word)
        parts.append(body if c == 1 else f"{c}*{body}")
    return " + ".join(parts)


def _word_key(spec: QuiverSpec, word):
    return (len(word), tuple(spec.arrow_index[a] for a in word))


# ---------------------------------------------------------------------------
# builtin family presentations


def _rel(*chunks, repeat=None):
    """Concatenate pieces written left to right; repeat=(piece, k) expands."""
    word = []
    for chunk in chunks:
        if isinstance(chunk, tuple) and len(chunk) == 2 and isinstance(chunk[1], int):
            word.extend(list(chunk[0]) * chunk[1])
        else:
            word.extend(chunk)
    return tuple(word)


def builtin_family(family: str, d: int) -> QuiverSpec:
    """The three builtin basic-algebra presentations, over F_2.

    Families I and II take any d >= 2 (the long relation words repeat a
    4-cycle 2^(d-1)-1 times).  Family III exists only at d = 3; its loop
    needs a closure relation on top of the four printed strand relations,
    without which the loop powers alpha^k stay irreducible and the algebra
    is infinite-dimensional (see tests).
    """
    cap = 8 * 2 ** (d - 1) + 8
    if family == "I":
        if d < 2:
            raise ValueError("family I needs d >= 2")
        e = 2 ** (d - 1) - 1
        b, g, dl, h = "beta", "gamma", "delta", "eta"
        arrows = {b: (1, 0), g: (0, 1), dl: (0, 2), h: (2, 0)}
        rels = [
            {_rel([b, g, b]): 1, _rel([h, dl, b], ([g, h, dl, b], e)): -1},
            {_rel([g, b, g]): 1, _rel([g, h, dl], ([b, g, h, dl], e)): -1},
            {_rel([h, dl, h]): 1, _rel([b, g, h], ([dl, b, g, h], e)): -1},
            {_rel([dl, h, dl]): 1, _rel([dl, b, g], ([h, dl, b, g], e)): -1},
            {_rel([dl, b, g, b]): 1},
            {_rel([g, h, dl, h]): 1},
        ]
        return QuiverSpec(2, (1, 0, 2), arrows, rels, suggested_cap=cap)
    if family == "II":
        if d < 2:
            raise ValueError("family II needs d >= 2")
        e = 2 ** (d - 1) - 1
        b, g, dl, h, k, l = "beta", "gamma", "delta", "eta", "kappa", "lambda"
        arrows = {
            b: (0, 1), g: (1, 0), dl: (1, 2), h: (2, 1), k: (0, 2), l: (2, 0)
        }
        rels = [
            {_rel([dl, b]): 1, _rel([k, l, k]): -1},
            {_rel([g, h]): 1, _rel([l, k, l]): -1},
            {_rel([l, dl]): 1, _rel([g, b, g]): -1},
            {_rel([h, k]): 1, _rel([b, g, b]): -1},
            {_rel([b, l]): 1, _rel([h], ([dl, h], e)): -1},
            {_rel([k, g]): 1, _rel([dl], ([h, dl], e)): -1},
            {_rel([dl, b, g]): 1},
            {_rel([g, h, dl]): 1},
            {_rel([h, k, l]): 1},
        ]
        return QuiverSpec(2, (0, 1, 2), arrows, rels, suggested_cap=cap)
    if family == "III":
        if d != 3:
            raise ValueError("family III exists only at d = 3")
        return QuiverSpec(
            2,
            (1, 0, 2),
            _family3_arrows(),
            _family3_relations(closure=True),
            suggested_cap=cap,
        )
    raise ValueError(f"unknown family {family!r}")


def _family3_arrows():
    a, b, g, dl, h = "alpha", "beta", "gamma", "delta", "eta"
    return {a: (1, 1), b: (1, 0), g: (0, 1), dl: (0, 2), h: (2, 0)}


def _family3_relations(closure: bool):
    """The four printed strand relations, optionally closed off.

    The four strand relations alone leave every power of the loop alpha
    irreducible, so the path algebra modulo them is infinite-dimensional.
    Closing the presentation needs the identification gamma*beta = alpha^3
    (the two-step loop through the middle vertex is the cube of the arrow
    loop) plus the two short socle killers delta*beta*alpha and
    gamma*eta*delta*eta that the other two families carry in the analogous
    positions.  Among the candidate closures alpha^s for s = 2, 3 this is
    the one whose completion has Cartan determinant 64 = 2^(d+3) at d = 3,
    matching families I and II at the same parameter; both choices give
    symmetric socles, uniform Loewy length 9 and the expected
    dimension-1 Hom/Ext values for the 5-dimensional fixture module.
    """
    a, b, g, dl, h = "alpha", "beta", "gamma", "delta", "eta"
    rels = [
        {_rel([b, a]): 1, _rel([h, dl, b], ([g, h, dl, b], 1)): -1},
        {_rel([a, g]): 1, _rel([g, h, dl], ([b, g, h, dl], 1)): -1},
        {_rel([h, dl, h]): 1, _rel([b, g, h], ([dl, b, g, h], 1)): -1},
        {_rel([dl, h, dl]): 1, _rel([dl, b, g], ([h, dl, b, g], 1)): -1},
    ]
    if closure:
        rels.append({_rel([g, b]): 1, _rel([a, a, a]): -1})
        rels.append({_rel([dl, b, a]): 1})
        rels.append({_rel([g, h, dl, h]): 1})
    return rels


def family3_printed_spec() -> QuiverSpec:
    """Family III with only the four printed relations (no loop closure)."""
    return QuiverSpec(
        2, (1, 0, 2), _family3_arrows(), _family3_relations(closure=False),
        suggested_cap=8 * 2**2 + 8,
    )


# ---------------------------------------------------------------------------
# completion


class CompletedSystem:
    """A confluent rewriting system plus the irreducible-word basis.

    rules: list of (lead, tail) with lead an int-tuple word and tail a dict
    of strictly smaller words; basis_by_source[v] lists irreducible words
    with source v in length-then-lex order (index 0 is the empty word e_v).
    """

    def __init__(self, spec, rules, basis_by_source, cap):
        self.spec = spec
        self.rules = rules
        self.basis_by_source = basis_by_source
        self.cap = cap
        self.dim = sum(len(ws) for ws in basis_by_source.values())
        self._rules_by_first = {}
        for lead, tail in rules:
            self._rules_by_first.setdefault(lead[0], []).append((lead, tail))

    def dims_by_source(self):
        return {v: len(ws) for v, ws in self.basis_by_source.items()}

    def _names(self, iword):
        return tuple(self.spec.arrow_names[i] for i in iword)

    def _iword(self, word):
        return tuple(self.spec.arrow_index[a] for a in word)

    def basis_words(self, v):
        return [PathWord(v, self._names(w)) for w in self.basis_by_source[v]]

    def reduce_terms(self, terms: dict) -> dict:
        """Full normal form of {int-word: coeff}; exercised by everything."""
        return _reduce(terms, self._rules_by_first, self.spec.p)

    def normal_form_word(self, word: PathWord) -> dict:
        """Normal form of a path as {int-word: coeff}; empty word is itself."""
        if not word.arrows:
            if word.source not in self.spec.vertices:
                raise ValueError(f"unknown vertex {word.source!r}")
            return {(): 1}
        self.spec.word_endpoints(tuple(word.arrows))
        return self.reduce_terms({self._iword(word.arrows): 1})


def normal_form(sys: CompletedSystem, word) -> dict:
    """Public normal form: PathWord (or arrow-name tuple) -> {word: coeff}.

    Returned keys are arrow-name tuples ((),) meaning the idempotent at the
    word's source.
    """
    if isinstance(word, PathWord):
        pw = word
    else:
        word = tuple(word)
        src = sys.spec.word_endpoints(word)[0] if word else None
        pw = PathWord(src, word)
    nf = sys.normal_form_word(pw)
    return {sys._names(w) if w else (): c for w, c in nf.items()}


def _reduce(terms, rules_by_first, p):
    terms = {w: c % p for w, c in terms.items() if c % p}
    changed = True
    while changed:
        changed = False
        for word in sorted(terms, key=lambda w: (len(w), w), reverse=True):
            c = terms.get(word)
            if not c:
                continue
            hit = _find_reduction(word, rules_by_first)
            if hit is None:
                continue
            pos, lead, tail = hit
            del terms[word]
            pre, suf = word[:pos], word[pos + len(lead) :]
            for tw, tc in tail.items():
                nw = pre + tw + suf
                nc = (terms.get(nw, 0) + c * tc) % p
                if nc:
                    terms[nw] = nc
                else:
                    terms.pop(nw, None)
            changed = True
            break
    return terms


def _find_reduction(word, rules_by_first):
    n = len(word)
    for pos in range(n):
        for lead, tail in rules_by_first.get(word[pos], ()):
            L = len(lead)
            if pos + L <= n and word[pos : pos + L] == lead:
                return pos, lead, tail
    return None


def complete(spec: QuiverSpec, cap: int | None = None) -> CompletedSystem:
    """Overlap completion of the relation ideal, then the basis search.

    Fails with CapExceededError if an irreducible word of length == cap
    exists, or if the rule set refuses to converge within generous guards.
    """
    if cap is None:
        cap = spec.suggested_cap or 64
    p = spec.p
    iword = lambda w: tuple(spec.arrow_index[a] for a in w)

    rules: list = []  # parallel lists: leads[i] -> tails[i], active flag
    rules_by_first: dict = {}

    def rebuild_index():
        rules_by_first.clear()
        for lead, tail in rules:
            rules_by_first.setdefault(lead[0], []).append((lead, tail))

    pending = deque(
        {iword(w): c for w, c in rel.items()} for rel in spec.relations
    )
    spairs_done = 0
    while pending:
        poly = _reduce(pending.popleft(), rules_by_first, p)
        if not poly:
            continue
        lead = max(poly, key=lambda w: (len(w), w))
        if len(lead) > 2 * cap:
            raise CapExceededError(
                f"completion produced a rule of length {len(lead)} > {2 * cap}"
            )
        inv = pow(poly[lead], -1, p)
        tail = {w: (-c * inv) % p for w, c in poly.items() if w != lead}
        # retire rules whose lead the new lead reduces; requeue them whole
        keep = []
        for old_lead, old_tail in rules:
            if _find_reduction(old_lead, {lead[0]: [(lead, tail)]}) is not None:
                requeued = dict(old_tail)
                requeued[old_lead] = (requeued.get(old_lead, 0) - 1) % p
                pending.append({w: -c % p for w, c in requeued.items()})
            else:
                keep.append((old_lead, old_tail))
        rules[:] = keep
        rules.append((lead, tail))
        if len(rules) > 600:
            raise CapExceededError("completion exceeded 600 rules")
        rebuild_index()
        # reduce all tails against the updated system
        for i, (ld, tl) in enumerate(rules):
            red = _reduce(dict(tl), rules_by_first, p)
            if red != tl:
                rules[i] = (ld, red)
        rebuild_index()
        # overlap S-polynomials of the new rule with every active rule
        new_idx = len(rules) - 1
        snapshot = list(rules)
        for other_lead, other_tail in snapshot:
            for first, second in ((rules[new_idx], (other_lead, other_tail)),
                                  ((other_lead, other_tail), rules[new_idx])):
                u, tu = first
                v, tv = second
                for ell in range(1, min(len(u), len(v))):
                    if u[len(u) - ell :] != v[:ell]:
                        continue
                    rest = v[ell:]
                    prefix = u[: len(u) - ell]
                    s = {}
                    for tw, tc in tu.items():
                        w = tw + rest
                        s[w] = (s.get(w, 0) + tc) % p
                    for tw, tc in tv.items():
                        w = prefix + tw
                        s[w] = (s.get(w, 0) - tc) % p
                    s = {w: c for w, c in s.items() if c}
                    if s:
                        pending.append(s)
                    spairs_done += 1
                    if spairs_done > 200000:
                        raise CapExceededError("completion S-pair budget exhausted")

    basis = _irreducible_basis(spec, rules_by_first, cap)
    return CompletedSystem(spec, list(rules), basis, cap)


def _irreducible_basis(spec, rules_by_first, cap):
    src = {spec.arrow_index[a]: s for a, (s, t) in spec.arrows.items()}
    tgt = {spec.arrow_index[a]: t for a, (s, t) in spec.arrows.items()}
    leads_by_first = {
        a: [lead for lead, _ in rl] for a, rl in rules_by_first.items()
    }

    def extendable(word, v):
        # target vertex of the word as a path from v
        return tgt[word[0]] if word else v

    basis = {}
    for v in spec.vertices:
        words = [()]
        frontier = [()]
        while frontier:
            nxt = []
            for w in frontier:
                at = extendable(w, v)
                for name, idx in spec.arrow_index.items():
                    if src[idx] != at:
                        continue
                    cand = (idx,) + w
                    ok = True
                    for lead in leads_by_first.get(idx, ()):
                        if len(lead) <= len(cand) and cand[: len(lead)] == lead:
                            ok = False
                            break
                    if ok:
                        if len(cand) >= cap:
                            raise CapExceededError(
                                f"irreducible word of length {cap} at vertex {v}"
                            )
                        nxt.append(cand)
            words.extend(sorted(nxt))
            frontier = nxt
        basis[v] = sorted(words, key=lambda w: (len(w), w))
    return basis


def build_projective(sys: CompletedSystem, v):
    """The left ideal generated by the idempotent at v, as an FdModule.

    Basis: irreducible words with source v; each arrow acts by left
    composition followed by normal form.
    """
    from . import fdmod

    return fdmod.projective_from_system(sys, v)
