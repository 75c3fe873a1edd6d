"""
Split AST
=========

Dominator-tree based splitting of a method AST:

1. build a statement-level control flow graph (CFG) whose entry is the
   method declaration,
2. compute the dominator tree,
3. cut dominator-tree edges ``u -> v`` where ``v`` has several CFG
   predecessors or ``u`` has several CFG successors; every remaining
   component is one block,
4. render each block as ``<method header> { <block statements> }`` and parse
   it again.

The CFG builder works on normalized trees from the Java frontend and keys off
tree-sitter-java node labels. ``catch`` and ``finally`` clauses are left out
of the graph; lambda bodies and local classes stay inside the statement that
contains them.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Generator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from astkit.config import FrontendConfig
from astkit.errors import InputError, ParseFailure
from astkit.frontend import METHOD_TYPES, SourceSnippet, parse_method
from astkit.tree import AstTree, NodeKind

logger = logging.getLogger(__name__)

BODY_TYPES = frozenset({"block", "constructor_body"})
LOOP_TYPES = frozenset({"while_statement", "for_statement", "enhanced_for_statement"})
SWITCH_TYPES = frozenset({"switch_expression", "switch_statement"})
HEADER_TYPES = frozenset({"try_with_resources_statement", "synchronized_statement"})
EXCLUDED_CLAUSES = frozenset({"catch_clause", "finally_clause"})
EXIT_TYPES = frozenset({"return_statement", "throw_statement"})
PLACEHOLDER_BODY = ("{", "}")


# ============================================================================
# Types
# ============================================================================

@dataclass(frozen=True)
class Cfg:
    """
    Statement-level control flow graph.

    Attributes
    ----------
    graph : nx.DiGraph
        Nodes are statement node ids of ``tree`` (or arbitrary hashables for
        hand-built graphs)
    entry : int
        Entry node; the method declaration for graphs built from a tree
    tree : AstTree, optional
        Tree the node ids refer to
    """

    graph: nx.DiGraph
    entry: int
    tree: Optional[AstTree] = None

    @property
    def statements(self) -> List[int]:
        return sorted(n for n in self.graph.nodes if n != self.entry)


@dataclass(frozen=True)
class DominatorTree:
    """Immediate-dominator map; the entry has no parent."""

    entry: int
    idom: Dict[int, int]

    def dominates(self, u: int, v: int) -> bool:
        while True:
            if v == u:
                return True
            if v == self.entry:
                return False
            v = self.idom[v]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((parent, child) for child, parent in self.idom.items())


@dataclass(frozen=True)
class SplitAstSet:
    """
    Per-block ASTs of one method, in block order.

    Attributes
    ----------
    trees : list of AstTree
    statements : list of tuple of int
        Statement node ids (of the punctuation-preserving method tree) that
        each block covers; the declaration is not listed
    skipped_blocks : int
        Blocks whose split code could not be parsed at all
    """

    trees: List[AstTree]
    statements: List[Tuple[int, ...]]
    skipped_blocks: int = 0


# ============================================================================
# CFG construction
# ============================================================================

@dataclass
class _Jump:
    kind: str  # "loop", "switch" or "label"
    names: FrozenSet[str] = frozenset()
    continue_target: Optional[int] = None
    breaks: List[int] = field(default_factory=list)


def _statement_children(tree: AstTree, node_id: int) -> List[int]:
    return [c for c in tree[node_id].children if tree[c].kind is not NodeKind.VALUE]


def _has_value(tree: AstTree, node_id: int, text: str) -> bool:
    return any(
        tree[c].kind is NodeKind.VALUE and tree[c].label == text
        for c in tree[node_id].children
    )


def _loop_body(tree: AstTree, node_id: int) -> Optional[int]:
    """Last child of a loop; ``None`` when the body is the empty statement."""
    children = tree[node_id].children
    if not children or tree[children[-1]].kind is NodeKind.VALUE:
        return None
    return children[-1]


def _identifier_text(tree: AstTree, node_id: int) -> Optional[str]:
    for c in tree[node_id].children:
        if tree[c].label == "identifier":
            values = tree.labels(tree[c].children)
            return values[0] if values else None
    return None


# Pending wiring request: (statement node, predecessors, enclosing labels)
_Request = Tuple[int, List[int], FrozenSet[str]]
_Wiring = Generator[_Request, List[int], List[int]]


class _CfgBuilder:
    """
    Wires statements into ``graph``.

    Each statement is wired by a generator that yields a request per nested
    statement and receives that statement's fall-through nodes back.
    :meth:`statement` drives the generators from an explicit stack, so
    nesting depth is bounded by memory only.
    """

    def __init__(self, tree: AstTree):
        self.tree = tree
        self.graph = nx.DiGraph()
        self.jumps: List[_Jump] = []

    def link(self, preds: Sequence[int], target: int) -> None:
        for p in preds:
            self.graph.add_edge(p, target)

    def first(self, node_id: int) -> Optional[int]:
        """CFG node that control reaches first when entering ``node_id``."""
        tree = self.tree
        # (node, fallback): a fallback entry answers for a do-loop whose body is empty
        stack: List[Tuple[int, bool]] = [(node_id, False)]
        while stack:
            current, fallback = stack.pop()
            if fallback:
                return current
            label = tree[current].label
            if label in BODY_TYPES or label == "labeled_statement":
                kids = [
                    c for c in _statement_children(tree, current)
                    if not (label == "labeled_statement" and tree[c].label == "identifier")
                ]
                stack.extend((c, False) for c in reversed(kids))
            elif label == "try_statement":
                body = self._try_body(current)
                if body is not None:
                    stack.append((body, False))
            elif label == "do_statement":
                kids = _statement_children(tree, current)
                stack.append((current, True))
                if kids:
                    stack.append((kids[0], False))
            else:
                return current
        return None

    def _try_body(self, node_id: int) -> Optional[int]:
        for c in _statement_children(self.tree, node_id):
            if self.tree[c].label == "block":
                return c
        return None

    def _find_jump(self, kinds: Tuple[str, ...], name: Optional[str]) -> Optional[_Jump]:
        for jump in reversed(self.jumps):
            if name is None and jump.kind in kinds:
                return jump
            if name is not None and name in jump.names and jump.kind in kinds:
                return jump
        return None

    def statement(self, node_id: int, preds: List[int], labels: FrozenSet[str] = frozenset()) -> List[int]:
        """Wire ``node_id`` after ``preds``; return the nodes that fall through."""
        stack: List[_Wiring] = [self._wire(node_id, preds, labels)]
        result: Optional[List[int]] = None
        while stack:
            try:
                request = stack[-1].send(result)
            except StopIteration as done:
                stack.pop()
                result = done.value
                continue
            stack.append(self._wire(*request))
            result = None
        return result

    def _sequence(self, nodes: Sequence[int], preds: List[int]) -> _Wiring:
        for node_id in nodes:
            preds = yield (node_id, preds, frozenset())
        return preds

    def _wire(self, node_id: int, preds: List[int], labels: FrozenSet[str]) -> _Wiring:
        tree = self.tree
        label = tree[node_id].label
        kids = _statement_children(tree, node_id)

        if label in BODY_TYPES:
            return (yield from self._sequence(kids, preds))

        if label == "labeled_statement":
            name = _identifier_text(tree, node_id)
            inner = [c for c in kids if tree[c].label != "identifier"]
            jump = _Jump("label", frozenset({name}) if name else frozenset())
            self.jumps.append(jump)
            exits = (yield (inner[-1], preds, labels | jump.names)) if inner else preds
            self.jumps.pop()
            return exits + jump.breaks

        if label == "try_statement":
            body = self._try_body(node_id)
            return (yield (body, preds, frozenset())) if body is not None else preds

        self.graph.add_node(node_id)

        if label == "do_statement":
            # the do node stands for the loop condition, reached after the body
            jump = _Jump("loop", labels, continue_target=node_id)
            self.jumps.append(jump)
            body_exits = (yield (kids[0], preds, frozenset())) if kids else preds
            self.jumps.pop()
            self.link(body_exits, node_id)
            entry = self.first(kids[0]) if kids else None
            self.graph.add_edge(node_id, node_id if entry is None else entry)
            return [node_id] + jump.breaks

        self.link(preds, node_id)

        if label == "if_statement":
            branches = kids[1:]
            exits = (yield (branches[0], [node_id], frozenset())) if branches else [node_id]
            if len(branches) > 1:
                exits = exits + (yield (branches[1], [node_id], frozenset()))
            else:
                exits = exits + [node_id]
            return exits

        if label in LOOP_TYPES:
            jump = _Jump("loop", labels, continue_target=node_id)
            self.jumps.append(jump)
            body = _loop_body(tree, node_id)
            body_exits = (yield (body, [node_id], frozenset())) if body is not None else [node_id]
            self.jumps.pop()
            self.link(body_exits, node_id)
            return [node_id] + jump.breaks

        if label in SWITCH_TYPES:
            return (yield from self._switch(node_id, kids, labels))

        if label in HEADER_TYPES:
            body = [c for c in kids if tree[c].label == "block"]
            return (yield (body[-1], [node_id], frozenset())) if body else [node_id]

        if label in EXIT_TYPES:
            return []

        if label == "break_statement" or label == "yield_statement":
            name = _identifier_text(tree, node_id) if label == "break_statement" else None
            kinds = ("switch",) if label == "yield_statement" else (
                ("loop", "switch", "label") if name else ("loop", "switch")
            )
            jump = self._find_jump(kinds, name)
            if jump is None:
                logger.debug("%s at node %d has no enclosing target", label, node_id)
            else:
                jump.breaks.append(node_id)
            return []

        if label == "continue_statement":
            name = _identifier_text(tree, node_id)
            jump = self._find_jump(("loop",), name)
            if jump is None:
                logger.debug("continue at node %d has no enclosing loop", node_id)
            else:
                self.graph.add_edge(node_id, jump.continue_target)
            return []

        return [node_id]

    def _switch(self, node_id: int, kids: List[int], labels: FrozenSet[str]) -> _Wiring:
        tree = self.tree
        blocks = [c for c in kids if tree[c].label == "switch_block"]
        jump = _Jump("switch", labels)
        self.jumps.append(jump)
        has_default = False
        fallthrough: List[int] = []
        exits: List[int] = []
        arms = _statement_children(tree, blocks[0]) if blocks else []
        for arm in arms:
            arm_kids = _statement_children(tree, arm)
            arm_labels = [c for c in arm_kids if tree[c].label == "switch_label"]
            body = [c for c in arm_kids if tree[c].label != "switch_label"]
            if any(_has_value(tree, c, "default") for c in arm_labels):
                has_default = True
            if tree[arm].label == "switch_rule":
                exits += (yield (body[-1], [node_id], frozenset())) if body else [node_id]
            else:
                fallthrough = yield from self._sequence(body, [node_id] + fallthrough)
        self.jumps.pop()
        exits += fallthrough + jump.breaks
        if not has_default or not arms:
            exits.append(node_id)
        return exits


def build_cfg(method_tree: AstTree) -> Cfg:
    """
    Build the statement-level CFG of a method.

    Parameters
    ----------
    method_tree : AstTree
        Normalized tree rooted at a method or constructor declaration

    Returns
    -------
    Cfg
        Unreachable statements (for example after ``return``) are pruned

    Raises
    ------
    InputError
        If the tree is not rooted at a method declaration.
    """
    root = method_tree.root
    if method_tree[root].label not in METHOD_TYPES:
        raise InputError(
            f"CFG construction needs a method declaration root, got {method_tree[root].label!r}"
        )
    builder = _CfgBuilder(method_tree)
    builder.graph.add_node(root)
    for c in _statement_children(method_tree, root):
        if method_tree[c].label in BODY_TYPES:
            builder.statement(c, [root])
    graph = builder.graph
    reachable = nx.descendants(graph, root) | {root}
    unreachable = [n for n in graph.nodes if n not in reachable]
    if unreachable:
        logger.debug("pruning %d unreachable statements", len(unreachable))
        graph.remove_nodes_from(unreachable)
    return Cfg(graph=graph, entry=root, tree=method_tree)


# ============================================================================
# Dominators and blocks
# ============================================================================

def build_dominator_tree(cfg: Cfg) -> DominatorTree:
    """
    Immediate dominators of every CFG node.

    Raises
    ------
    InputError
        If a node is not reachable from the entry.
    """
    graph = cfg.graph
    reachable = nx.descendants(graph, cfg.entry) | {cfg.entry}
    if len(reachable) != graph.number_of_nodes():
        missing = sorted(set(graph.nodes) - reachable, key=str)
        raise InputError(f"CFG nodes unreachable from entry: {missing}")
    idom = dict(nx.immediate_dominators(graph, cfg.entry))
    idom.pop(cfg.entry, None)
    return DominatorTree(entry=cfg.entry, idom=idom)


def partition_blocks(dom: DominatorTree, cfg: Cfg) -> List[List[int]]:
    """
    Cut the dominator tree into blocks of branch-free statements.

    An edge ``u -> v`` is removed when ``v`` has more than one CFG
    predecessor or ``u`` has more than one CFG successor.

    Returns
    -------
    list of list
        Blocks with their nodes in statement order, ordered by first node
    """
    graph = cfg.graph
    kept = nx.Graph()
    kept.add_nodes_from(graph.nodes)
    for u, v in dom.edges():
        if graph.in_degree(v) > 1 or graph.out_degree(u) > 1:
            continue
        kept.add_edge(u, v)
    blocks = [sorted(component) for component in nx.connected_components(kept)]
    blocks.sort(key=lambda block: block[0])
    return blocks


# ============================================================================
# Split code
# ============================================================================

def _render_plan(tree: AstTree, node_id: int) -> Tuple[Set[int], Set[int]]:
    """Children replaced by an empty block, and children dropped, when rendering."""
    label = tree[node_id].label
    kids = _statement_children(tree, node_id)
    if not kids:
        return set(), set()
    if label == "if_statement":
        placeholder = set(kids[1:2])
        dropped = set(kids[2:])
        dropped.update(
            c for c in tree[node_id].children
            if tree[c].kind is NodeKind.VALUE and tree[c].label == "else"
        )
        return placeholder, dropped
    if label in LOOP_TYPES:
        body = _loop_body(tree, node_id)
        return ({body} if body is not None else set()), set()
    if label == "do_statement":
        return {kids[0]}, set()
    if label in SWITCH_TYPES:
        return {c for c in kids if tree[c].label == "switch_block"}, set()
    if label in HEADER_TYPES:
        body = [c for c in kids if tree[c].label == "block"]
        dropped = {c for c in kids if tree[c].label in EXCLUDED_CLAUSES}
        return set(body[-1:]), dropped
    return set(), set()


def render_tokens(tree: AstTree, node_id: int, skip: Sequence[int] = ()) -> List[str]:
    """Source tokens of a statement with nested branches stubbed out."""
    placeholder, dropped = _render_plan(tree, node_id)
    dropped = dropped | set(skip)
    out: List[str] = []
    stack = [node_id]
    while stack:
        current = stack.pop()
        if current in dropped:
            continue
        if current in placeholder:
            out.extend(PLACEHOLDER_BODY)
            continue
        n = tree[current]
        if n.kind is NodeKind.VALUE:
            out.append(n.label)
        stack.extend(reversed(n.children))
    return out


def split_code(method_tree: AstTree, statements: Sequence[int]) -> str:
    """Method header followed by the given statements inside one body."""
    root = method_tree.root
    bodies = [c for c in method_tree[root].children if method_tree[c].label in BODY_TYPES]
    tokens = render_tokens(method_tree, root, skip=bodies)
    tokens.append("{")
    for s in statements:
        tokens.extend(render_tokens(method_tree, s))
    tokens.append("}")
    return " ".join(tokens)


def split_asts(snippet: SourceSnippet, config: Optional[FrontendConfig] = None) -> SplitAstSet:
    """
    Split a method into per-block ASTs.

    Parameters
    ----------
    snippet : SourceSnippet
    config : FrontendConfig, optional
        Settings for parsing the split code; the method itself is parsed
        with punctuation kept so its tokens reassemble into source

    Returns
    -------
    SplitAstSet

    Raises
    ------
    InputError
        If the snippet does not parse to a method declaration.
    """
    config = config or FrontendConfig()
    outcome = parse_method(snippet, replace(config, drop_punctuation=False))
    cfg = build_cfg(outcome.tree)
    blocks = partition_blocks(build_dominator_tree(cfg), cfg)

    trees: List[AstTree] = []
    covered: List[Tuple[int, ...]] = []
    skipped = 0
    for block in blocks:
        statements = tuple(s for s in block if s != cfg.entry)
        code = split_code(outcome.tree, statements)
        try:
            parsed = parse_method(SourceSnippet(snippet.id, code, snippet.language), config)
        except (ParseFailure, InputError) as exc:
            logger.warning("skipping block of %s: %s", snippet.id, exc)
            skipped += 1
            continue
        trees.append(parsed.tree)
        covered.append(statements)
    return SplitAstSet(trees=trees, statements=covered, skipped_blocks=skipped)
