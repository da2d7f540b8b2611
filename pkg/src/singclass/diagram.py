"""Weighted tree diagrams with conjugate-pair (brace) markings.

A diagram is the dendrogram of pro-branches under contact exponents.  Leaves
are pro-branches; an internal node carries the exponent at which its child
clusters separate.  Complex leaves come in star pairs (the side-normalized
conjugation); a brace spans the minimal set of sibling subtrees closed under
that pairing.  Canonical serialization sorts recursively and, where sibling
subtrees tie, takes the minimum over their orderings together with the pair
structure, so equal keys mean isomorphic marked trees.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PolyParseError

Q = Fraction


@dataclass
class DNode:
    split: Fraction | None = None          # None for leaves
    children: list = field(default_factory=list)
    leaf_id: int | None = None

    def is_leaf(self):
        return self.split is None and not self.children

    def leaves(self):
        if self.is_leaf():
            return [self.leaf_id]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out


@dataclass
class Diagram:
    root: DNode
    pairs: frozenset = frozenset()         # frozensets {i, j} of leaf ids
    flags: set = field(default_factory=set)

    def leaf_count(self):
        return len(self.root.leaves())

    def real_leaves(self):
        paired = set()
        for p in self.pairs:
            paired |= set(p)
        return [i for i in self.root.leaves() if i not in paired]

    def partner(self, leaf_id):
        for p in self.pairs:
            if leaf_id in p:
                (a, b) = tuple(p)
                return b if a == leaf_id else a
        return None


def _label_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_label(s: str) -> Fraction:
    return Q(s)


# ---------------------------------------------------------------------------
# brace groups: per node, connected components of the cross-pair graph
# ---------------------------------------------------------------------------

def brace_groups(node: DNode, pairs) -> list[list[int]]:
    """Indices of node.children spanned by each brace at this node.

    A pair whose two leaves live under distinct children ties those children
    together; every connected component with at least one such pair is one
    brace.  Pairs inside a single child are that child's business.
    """
    if node.is_leaf() or not pairs:
        return []
    owner = {}
    for idx, ch in enumerate(node.children):
        for leaf in ch.leaves():
            owner[leaf] = idx
    parent = list(range(len(node.children)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    crossing = set()
    for p in pairs:
        a, b = tuple(p)
        if a in owner and b in owner and owner[a] != owner[b]:
            parent[find(owner[a])] = find(owner[b])
            crossing.add(find(owner[a]))
    groups = {}
    for idx in range(len(node.children)):
        groups.setdefault(find(idx), []).append(idx)
    out = []
    for root_idx, members in groups.items():
        if len(members) > 1 and any(
                owner.get(a) in members and owner.get(b) in members
                and owner[a] != owner[b]
                for a, b in (tuple(p) for p in pairs)):
            out.append(sorted(members))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def _shape_sig(node: DNode, pairs, mode):
    """Order-independent signature used to sort siblings."""
    if node.is_leaf():
        if mode == "real":
            return ("leaf", node.leaf_id is not None and _is_paired(node.leaf_id, pairs))
        return ("leaf", False)
    return ("node", _label_str(node.split),
            tuple(sorted(_shape_sig(c, pairs, mode) for c in node.children)))


def _is_paired(leaf_id, pairs):
    return any(leaf_id in p for p in pairs)


def _orderings(node: DNode, pairs, mode):
    """All child orderings compatible with the canonical signature sort."""
    if node.is_leaf():
        yield node
        return
    sigs = [(_shape_sig(c, pairs, mode), i) for i, c in enumerate(node.children)]
    sigs.sort(key=lambda t: t[0])
    groups = []
    for _, grp in itertools.groupby(sigs, key=lambda t: t[0]):
        groups.append([i for _, i in grp])
    child_variants = [list(_orderings(c, pairs, mode)) for c in node.children]
    for perm_choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = [i for g in perm_choice for i in g]
        for combo in itertools.product(*(child_variants[i] for i in order)):
            yield DNode(split=node.split, children=list(combo))


def _serialize(node: DNode, pairs, mode, counter, leaf_pos):
    if node.is_leaf():
        leaf_pos[node.leaf_id] = counter[0]
        counter[0] += 1
        return "leaf"
    parts = []
    taken = brace_groups(node, pairs) if mode == "real" else []
    grouped = {i for g in taken for i in g}
    rendered = {}
    for idx, ch in enumerate(node.children):
        rendered[idx] = None
    out_items = []
    idx = 0
    # children are emitted in order; a brace group is emitted at the position
    # of its first member
    emitted = set()
    for idx, ch in enumerate(node.children):
        if idx in emitted:
            continue
        grp = next((g for g in taken if idx in g), None)
        if grp is None:
            out_items.append(_serialize(ch, pairs, mode, counter, leaf_pos))
            emitted.add(idx)
        else:
            inner = []
            for j in grp:
                inner.append(_serialize(node.children[j], pairs, mode,
                                        counter, leaf_pos))
                emitted.add(j)
            out_items.append("{" + ", ".join(inner) + "}")
    return f"({_label_str(node.split)} → [" + ", ".join(out_items) + "])"


def canonical_text(diagram: Diagram, mode: str = "real") -> str:
    """Deterministic minimal serialization; equal text <=> equivalent."""
    pairs = diagram.pairs if mode == "real" else frozenset()
    best = None
    for variant in _orderings(diagram.root, pairs, mode):
        counter = [0]
        leaf_pos = {}
        text = _serialize(variant, pairs, mode, counter, leaf_pos)
        if mode == "real" and pairs:
            idx_pairs = sorted(tuple(sorted((leaf_pos[a], leaf_pos[b])))
                               for a, b in (tuple(p) for p in pairs))
            key = (text, tuple(idx_pairs))
        else:
            key = (text, ())
        if best is None or key < best:
            best = key
    return best[0]


# ---------------------------------------------------------------------------
# text grammar (inverse of canonical_text)
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(leaf|→|->|[(){}\[\],]|[0-9]+(?:/[0-9]+)?)")


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise PolyParseError(pos, "a diagram token", text)
            break
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _DParser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.next_leaf = 0
        self.pairs = []

    def error(self, expected):
        pos = self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)
        raise PolyParseError(pos, expected, self.text)

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, tok=None):
        cur = self.peek()
        if cur is None or (tok is not None and cur != tok):
            self.error(tok or "a token")
        self.i += 1
        return cur

    def parse_node(self):
        if self.peek() == "leaf":
            self.take()
            node = DNode(leaf_id=self.next_leaf)
            self.next_leaf += 1
            return node
        if self.peek() == "(":
            self.take("(")
            label = self.take()
            try:
                split = _parse_label(label)
            except (ValueError, ZeroDivisionError):
                self.error("a rational label")
            if self.peek() in ("→", "->"):
                self.take()
            self.take("[")
            children = []
            while True:
                children.extend(self.parse_item())
                if self.peek() == ",":
                    self.take(",")
                    continue
                break
            self.take("]")
            self.take(")")
            return DNode(split=split, children=children)
        self.error("'leaf' or '('")

    def parse_item(self):
        if self.peek() != "{":
            return [self.parse_node()]
        self.take("{")
        members = [self.parse_node()]
        while self.peek() == ",":
            self.take(",")
            members.append(self.parse_node())
        self.take("}")
        self._pair_group(members)
        return members

    def _pair_group(self, members):
        leaves = [leaf for m in members for leaf in m.leaves()]
        if len(members) == 2:
            l1, l2 = members[0].leaves(), members[1].leaves()
            if len(l1) == len(l2):
                for a, b in zip(l1, l2):
                    self.pairs.append(frozenset((a, b)))
                return
        if len(leaves) % 2:
            self.error("an even brace group")
        for k in range(0, len(leaves), 2):
            self.pairs.append(frozenset((leaves[k], leaves[k + 1])))


def parse_diagram(text: str) -> Diagram:
    """Parse canonical diagram text back into a Diagram."""
    p = _DParser(text)
    root = p.parse_node()
    if p.i != len(p.toks):
        p.error("end of input")
    return Diagram(root=root, pairs=frozenset(p.pairs))


# ---------------------------------------------------------------------------
# JSON view
# ---------------------------------------------------------------------------

def diagram_to_json(diagram: Diagram):
    pairs = diagram.pairs

    def node_json(node):
        if node.is_leaf():
            return {"branch": node.leaf_id,
                    "real": not _is_paired(node.leaf_id, pairs)}
        groups = brace_groups(node, pairs)
        grouped = {i for g in groups for i in g}
        children = []
        emitted = set()
        for idx, ch in enumerate(node.children):
            if idx in emitted:
                continue
            grp = next((g for g in groups if idx in g), None)
            if grp is None:
                children.append(node_json(ch))
                emitted.add(idx)
            else:
                children.append({
                    "brace": True,
                    "children": [node_json(node.children[j]) for j in grp],
                })
                emitted.update(grp)
        return {"split": _label_str(node.split), "brace": False,
                "children": children}

    return node_json(diagram.root)
