"""Pairwise exponents of contact and assembly of the tree diagram."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diagram import Diagram, DNode
from .errors import InsufficientTruncation, UltrametricViolation
from .numbers import CNum
from .puiseux import ExpansionSettings, ProBranch, _first_difference

Q = Fraction


@dataclass
class ContactMatrix:
    n: int
    entries: list              # entries[i][j]: Fraction, None on the diagonal

    def get(self, i, j):
        return self.entries[i][j]

    def to_json(self):
        return [[None if v is None else f"{v.numerator}/{v.denominator}"
                 for v in row] for row in self.entries]


def contact_exponent(b1: ProBranch, b2: ProBranch,
                     settings: ExpansionSettings | None = None) -> Fraction:
    """Smallest exponent at which the two series differ."""
    settings = settings or ExpansionSettings()
    if b1.branch_id == b2.branch_id:
        raise ValueError("contact of a branch with itself is infinite")
    e = _first_difference(dict(b1.terms), dict(b2.terms), settings.eq_tol)
    if e is None:
        required = min(b1.trunc_order, b2.trunc_order)
        raise InsufficientTruncation(required)
    return e


def contact_matrix(branches: list[ProBranch],
                   settings: ExpansionSettings | None = None) -> ContactMatrix:
    settings = settings or ExpansionSettings()
    n = len(branches)
    entries = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            e = contact_exponent(branches[i], branches[j], settings)
            entries[i][j] = entries[j][i] = e
    return ContactMatrix(n=n, entries=entries)


def validate_ultrametric(cm: ContactMatrix):
    """None if ultrametric, else the first witness triple (i, j, k)."""
    n = cm.n
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a = cm.entries[i][j]
                b = cm.entries[i][k]
                c = cm.entries[j][k]
                # min of every triple must be attained at least twice
                lo = min(a, b, c)
                if [a, b, c].count(lo) < 2:
                    return (i, j, k)
    return None


def build_diagram(cm: ContactMatrix, branches: list[ProBranch]) -> Diagram:
    """Single-linkage dendrogram at the distinct contact values."""
    witness = validate_ultrametric(cm)
    if witness is not None:
        raise UltrametricViolation(witness)
    ids = [b.branch_id for b in branches]
    index = {b.branch_id: i for i, b in enumerate(branches)}

    def cluster(members):
        if len(members) == 1:
            return DNode(leaf_id=members[0])
        val = min(cm.entries[index[a]][index[b]]
                  for ai, a in enumerate(members) for b in members[ai + 1:])
        # children: classes of "contact > val"
        parent = {m: m for m in members}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ai, a in enumerate(members):
            for b in members[ai + 1:]:
                if cm.entries[index[a]][index[b]] > val:
                    parent[find(a)] = find(b)
        classes = {}
        for m in members:
            classes.setdefault(find(m), []).append(m)
        children = [cluster(sorted(c)) for c in classes.values()]
        children.sort(key=lambda nd: sorted(nd.leaves()))
        return DNode(split=val, children=children)

    pairs = set()
    for b in branches:
        if not b.real_marked and b.star_partner is not None:
            pairs.add(frozenset((b.branch_id, b.star_partner)))
    root = cluster(sorted(ids))
    flags = set()
    for b in branches:
        if "unseparated" in getattr(b, "flags", ()):  # pragma: no cover
            flags.add("unseparated")
    return Diagram(root=root, pairs=frozenset(pairs), flags=flags)


def diagram_contacts(diagram: Diagram) -> ContactMatrix:
    """Recompute pairwise contacts from the tree (LCA split values)."""
    leaves = diagram.root.leaves()
    pos = {leaf: i for i, leaf in enumerate(leaves)}
    n = len(leaves)
    entries = [[None] * n for _ in range(n)]

    def walk(node):
        if node.is_leaf():
            return [node.leaf_id]
        subsets = [walk(c) for c in node.children]
        for ai in range(len(subsets)):
            for bi in range(ai + 1, len(subsets)):
                for a in subsets[ai]:
                    for b in subsets[bi]:
                        entries[pos[a]][pos[b]] = node.split
                        entries[pos[b]][pos[a]] = node.split
        return [x for s in subsets for x in s]

    walk(diagram.root)
    return ContactMatrix(n=n, entries=entries)
