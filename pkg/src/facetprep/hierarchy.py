"""Term trees over a facet's values and the operations that edit them.

A tree holds two kinds of nodes under one parent structure:

- data terms, one per facet value that participates in a hierarchy;
- grouping terms (manual groups and interval buckets), which exist only in
  the tree.

A grouping term may carry the same label as a data term: grouping the values
["Heraklion", "Heraklion Port"] under the prefix "Heraklion" creates a group
named exactly like one of its members. Nodes are therefore keyed by
(class, label), where class is "value" for data terms and "group" for
everything else. Labels stay unique within each class. The RDF export merges
same-label nodes into one term and drops the degenerate self-edge.

All operations are pure: they return a new tree and never touch cell values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import CycleWouldForm, LabelCollision, NoMatch, UnknownChild, UnknownTerm

VALUE = "value"
GROUP = "group"

DATA_TERM = "data-term"
GROUP_TERM = "group-term"
INTERVAL_TERM = "interval-term"

NodeKey = tuple[str, str]  # (class, label)


def _cls_of(kind: str) -> str:
    return VALUE if kind == DATA_TERM else GROUP


@dataclass(frozen=True)
class TermNode:
    label: str
    kind: str  # data-term | group-term | interval-term
    parent: NodeKey | None = None


@dataclass(frozen=True)
class TermTree:
    nodes: dict[NodeKey, TermNode] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.nodes)

    def get(self, key: NodeKey) -> TermNode | None:
        return self.nodes.get(key)

    def resolve(self, label: str, prefer: str) -> NodeKey | None:
        """Find the node a bare label denotes, preferring class *prefer*."""
        other = GROUP if prefer == VALUE else VALUE
        if (prefer, label) in self.nodes:
            return (prefer, label)
        if (other, label) in self.nodes:
            return (other, label)
        return None

    def ancestors(self, key: NodeKey) -> list[NodeKey]:
        """Parent chain from *key*'s parent up to the root. Bounded by node
        count, so a corrupted cyclic tree raises instead of spinning."""
        chain: list[NodeKey] = []
        node = self.nodes[key]
        for _ in range(len(self.nodes)):
            if node.parent is None:
                return chain
            chain.append(node.parent)
            node = self.nodes[node.parent]
        raise AssertionError("parent links form a cycle")

    def is_ancestor(self, maybe_ancestor: NodeKey, of: NodeKey) -> bool:
        return maybe_ancestor in self.ancestors(of)

    def children_of(self, key: NodeKey) -> list[NodeKey]:
        return sorted(k for k, n in self.nodes.items() if n.parent == key)

    def roots(self) -> list[NodeKey]:
        return sorted(k for k, n in self.nodes.items() if n.parent is None)

    def data_terms(self) -> list[str]:
        return sorted(label for cls, label in self.nodes if cls == VALUE)

    def edges(self) -> list[tuple[str, str]]:
        """Distinct (child label, parent label) pairs, self-pairs dropped."""
        pairs = {
            (node.label, self.nodes[node.parent].label)
            for node in self.nodes.values()
            if node.parent is not None and node.label != self.nodes[node.parent].label
        }
        return sorted(pairs)

    def _with(self, updates: dict[NodeKey, TermNode]) -> "TermTree":
        merged = dict(self.nodes)
        merged.update(updates)
        return TermTree(merged)

    def to_payload(self) -> list[dict]:
        """JSON-friendly node list for the service API."""
        out = []
        for (cls, label), node in sorted(self.nodes.items()):
            parent = None
            if node.parent is not None:
                parent = {"class": node.parent[0], "label": node.parent[1]}
            out.append({"class": cls, "label": label, "kind": node.kind, "parent": parent})
        return out


def add_parent(
    tree: TermTree,
    children: list[str],
    parent: str,
    facet_values: tuple[str, ...] = (),
) -> TermTree:
    """Give every child the same parent, creating the parent as a grouping
    term when it does not exist yet. Children must already be in the tree or
    be current facet values (those are registered as data terms)."""
    if not children:
        raise UnknownChild("<empty child list>")
    for child in children:
        if child == parent:
            raise CycleWouldForm(child, parent)

    updates: dict[NodeKey, TermNode] = {}
    parent_key = tree.resolve(parent, prefer=GROUP)
    if parent_key is None:
        parent_key = (GROUP, parent)
        updates[parent_key] = TermNode(label=parent, kind=GROUP_TERM)

    child_keys: list[NodeKey] = []
    values = set(facet_values)
    for child in children:
        key = tree.resolve(child, prefer=VALUE)
        if key is None:
            if child not in values:
                raise UnknownChild(child)
            key = (VALUE, child)
            updates[key] = TermNode(label=child, kind=DATA_TERM)
        child_keys.append(key)

    for key in child_keys:
        if key in tree.nodes and parent_key in tree.nodes:
            if parent_key == key or tree.is_ancestor(key, of=parent_key):
                raise CycleWouldForm(key[1], parent)

    for key in child_keys:
        node = updates.get(key) or tree.nodes[key]
        updates[key] = replace(node, parent=parent_key)
    return tree._with(updates)


def move_term(tree: TermTree, term: str, new_parent: str | None) -> TermTree:
    """Re-hang one term under a new parent, or make it a root when the new
    parent is absent."""
    term_key = tree.resolve(term, prefer=VALUE)
    if term_key is None:
        raise UnknownTerm(term)
    if new_parent is None:
        node = tree.nodes[term_key]
        return tree._with({term_key: replace(node, parent=None)})
    if new_parent == term:
        raise CycleWouldForm(term, new_parent)
    parent_key = tree.resolve(new_parent, prefer=GROUP)
    if parent_key is None:
        raise UnknownTerm(new_parent)
    if parent_key == term_key or tree.is_ancestor(term_key, of=parent_key):
        raise CycleWouldForm(term, new_parent)
    node = tree.nodes[term_key]
    return tree._with({term_key: replace(node, parent=parent_key)})


def _gather(
    tree: TermTree,
    facet_values: list[str],
    group_label: str,
    matcher,
    pattern: str,
) -> TermTree:
    """Shared machinery of the automatic groupings: create or reuse the
    grouping term and capture every currently parentless matching data term
    (facet values not yet in the tree count as parentless)."""
    candidates: dict[str, NodeKey | None] = {}
    for value in facet_values:
        if matcher(value):
            candidates.setdefault(value, None)
    for (cls, label), node in tree.nodes.items():
        if cls == VALUE and matcher(label):
            candidates[label] = (cls, label)
    if not candidates:
        raise NoMatch(pattern)

    updates: dict[NodeKey, TermNode] = {}
    group_key = (GROUP, group_label)
    existing = tree.get(group_key)
    if existing is None:
        updates[group_key] = TermNode(label=group_label, kind=GROUP_TERM)
    elif existing.kind != GROUP_TERM:
        raise LabelCollision(group_label)

    for label in sorted(candidates):
        key = candidates[label]
        if key is None:
            updates[(VALUE, label)] = TermNode(label=label, kind=DATA_TERM, parent=group_key)
            continue
        node = tree.nodes[key]
        if node.parent is not None:
            continue  # hand-built placement wins over automatic grouping
        if group_key in tree.nodes and tree.is_ancestor(key, of=group_key):
            continue  # capturing this one would close a cycle
        updates[key] = replace(node, parent=group_key)
    return tree._with(updates)


def group_by_prefix(tree: TermTree, facet_values: list[str], prefix: str) -> TermTree:
    """Group every parentless value starting with *prefix* (case-sensitive)
    under a grouping term labelled exactly *prefix*."""
    if not prefix:
        raise ValueError("prefix must be non-empty")
    return _gather(tree, facet_values, prefix, lambda v: v.startswith(prefix), prefix)


def group_by_letter_range(
    tree: TermTree, facet_values: list[str], from_letter: str, to_letter: str
) -> TermTree:
    """Group parentless values whose case-folded first character lies in
    [from, to] under a term labelled "<FROM>-<TO>". Values starting with a
    non-letter never match any letter range."""
    lo = from_letter.casefold()
    hi = to_letter.casefold()
    if len(lo) != 1 or len(hi) != 1 or lo > hi:
        raise ValueError(f"bad letter range: {from_letter!r}-{to_letter!r}")
    label = f"{from_letter.upper()}-{to_letter.upper()}"

    def matcher(value: str) -> bool:
        if not value or not value[0].isalpha():
            return False
        return lo <= value[0].casefold() <= hi

    return _gather(tree, facet_values, label, matcher, label)
