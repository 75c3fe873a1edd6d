"""
Parser Frontend
===============

Turns method-level source snippets into canonical :class:`AstTree` objects.

The grammar backend is abstracted behind :class:`GrammarBackend`; the shipped
backend is tree-sitter with the Java grammar. Syntax errors never raise:
tree-sitter recovers and the number of ``ERROR``/missing nodes is reported
on the :class:`ParseOutcome`.

Snippets that are not accepted at top level are wrapped in
``class __W { ... }`` and the wrapper is stripped again by rooting the
result at the method declaration.
"""

import ctypes
import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

try:
    from typing import Protocol
except ImportError:  # pragma: no cover
    from typing_extensions import Protocol

from astkit.config import SUPPORTED_LANGUAGES, FrontendConfig
from astkit.errors import ConfigurationError, InputError, ParseFailure
from astkit.tree import AstTree, NodeKind, build_tree

logger = logging.getLogger(__name__)

WRAPPER_PREFIX = "class __W {\n"
WRAPPER_SUFFIX = "\n}"
METHOD_TYPES = frozenset({"method_declaration", "constructor_declaration"})
PUNCTUATION = frozenset({"{", "}", "(", ")", ";", ",", "."})
COMMENT_TYPES = frozenset({"comment", "line_comment", "block_comment"})
# Named nodes whose whole text is one token even though the grammar nests them.
LEXICAL_TYPES = frozenset({"string_literal", "character_literal", "text_block"})
ERROR_TYPE = "ERROR"


# ============================================================================
# Types
# ============================================================================

@dataclass(frozen=True)
class SourceSnippet:
    """One method-level code sample."""

    id: str
    code: str
    language: str = "java"

    def __post_init__(self):
        if not self.code or not self.code.strip():
            raise InputError(f"snippet {self.id!r} has empty code")


@dataclass(frozen=True)
class ParseOutcome:
    """
    Result of :func:`parse_method`.

    Attributes
    ----------
    tree : AstTree
        Normalized tree, rooted at the method declaration when one was found
    error_node_count : int
        Number of ERROR and missing nodes in the concrete parse
    wrapped : bool
        Whether the synthetic class wrapper was needed
    """

    tree: AstTree
    error_node_count: int
    wrapped: bool


class ConcreteNode(Protocol):
    """The subset of a backend node that normalization relies on."""

    type: str
    is_named: bool
    is_missing: bool
    text: Optional[bytes]

    @property
    def children(self) -> Sequence["ConcreteNode"]: ...


class GrammarBackend(Protocol):
    """Parse source bytes into a concrete tree and return its root node."""

    language: str

    def parse(self, source: bytes) -> ConcreteNode: ...


# ============================================================================
# tree-sitter backend
# ============================================================================

_LOADED_LIBRARIES: Dict[str, Any] = {}


def _find_grammar_library(grammar_dir: Path, language: str) -> Path:
    candidates = [
        f"{language}.so",
        f"libtree-sitter-{language}.so",
        f"tree-sitter-{language}.so",
        f"{language}.dylib",
        f"libtree-sitter-{language}.dylib",
        f"{language}.dll",
    ]
    for name in candidates:
        path = grammar_dir / name
        if path.is_file():
            return path
    raise ConfigurationError(
        f"no {language} grammar library in {grammar_dir} (tried {', '.join(candidates)})"
    )


def load_language(language: str, grammar_dir: Optional[str] = None):
    """
    Resolve a tree-sitter ``Language``.

    A compiled grammar in ``grammar_dir`` wins; otherwise the packaged
    ``tree_sitter_<language>`` binding is used.
    """
    from tree_sitter import Language

    if grammar_dir:
        path = _find_grammar_library(Path(grammar_dir), language)
        library = _LOADED_LIBRARIES.get(str(path))
        if library is None:
            library = ctypes.cdll.LoadLibrary(str(path))
            _LOADED_LIBRARIES[str(path)] = library
        entry = getattr(library, f"tree_sitter_{language}")
        entry.restype = ctypes.c_void_p
        logger.debug("loaded %s grammar from %s", language, path)
        return Language(entry())

    if language != "java":
        raise ConfigurationError(f"no packaged grammar for {language!r}")
    try:
        import tree_sitter_java
    except ImportError as exc:
        raise ConfigurationError(
            "tree-sitter-java is not installed; install it or set ASTKIT_GRAMMAR_DIR"
        ) from exc
    return Language(tree_sitter_java.language())


class TreeSitterBackend:
    """Grammar backend built on a tree-sitter ``Parser``."""

    def __init__(self, language: str = "java", grammar_dir: Optional[str] = None):
        from tree_sitter import Parser

        self.language = language
        ts_language = load_language(language, grammar_dir)
        self._parser = Parser(ts_language)

    def parse(self, source: bytes) -> ConcreteNode:
        return self._parser.parse(source).root_node


# ============================================================================
# Normalization
# ============================================================================

class _Draft:
    __slots__ = ("label", "kind", "children")

    def __init__(self, label: str, kind: NodeKind):
        self.label = label
        self.kind = kind
        self.children: List["_Draft"] = []


def _text(node: ConcreteNode) -> str:
    raw = node.text
    if raw is None:
        return ""
    return raw.decode("utf-8", errors="replace")


def _is_token(node: ConcreteNode) -> bool:
    return not node.is_named and not node.children


def _keep(node: ConcreteNode, drop_punctuation: bool) -> bool:
    if node.type in COMMENT_TYPES or node.is_missing:
        return False
    if _is_token(node):
        return not (drop_punctuation and node.type in PUNCTUATION)
    return True


def normalize_tree(concrete: ConcreteNode, config: Optional[FrontendConfig] = None) -> AstTree:
    """
    Map a backend tree onto the canonical node taxonomy.

    - anonymous tokens become Value leaves (punctuation dropped when
      ``config.drop_punctuation``)
    - named leaves and lexical literals become a Terminal with one Value child
    - named nodes whose kept children are all tokens become Terminals
    - everything else is a NonTerminal; child order is preserved
    - comments and missing (inserted) nodes are skipped

    Parameters
    ----------
    concrete : ConcreteNode
        Root of the subtree to normalize
    config : FrontendConfig, optional

    Returns
    -------
    AstTree
    """
    drop = (config or FrontendConfig()).drop_punctuation

    def convert(node: ConcreteNode) -> Tuple[_Draft, List[ConcreteNode]]:
        if _is_token(node):
            return _Draft(_text(node), NodeKind.VALUE), []
        if node.type in LEXICAL_TYPES or not node.children:
            draft = _Draft(node.type, NodeKind.TERMINAL)
            draft.children.append(_Draft(_text(node), NodeKind.VALUE))
            return draft, []
        kept = [c for c in node.children if _keep(c, drop)]
        if kept and all(_is_token(c) for c in kept):
            kind = NodeKind.TERMINAL
        else:
            kind = NodeKind.NON_TERMINAL
        return _Draft(node.type, kind), kept

    root, pending = convert(concrete)
    stack = [(root, pending)]
    while stack:
        draft, kept = stack.pop()
        for child in kept:
            child_draft, child_kept = convert(child)
            draft.children.append(child_draft)
            if child_kept:
                stack.append((child_draft, child_kept))
    return build_tree(root)


# ============================================================================
# Parsing
# ============================================================================

def _walk(root: ConcreteNode) -> Iterator[ConcreteNode]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def count_error_nodes(root: ConcreteNode) -> int:
    return sum(1 for n in _walk(root) if n.type == ERROR_TYPE or n.is_missing)


def find_method(root: ConcreteNode) -> Optional[ConcreteNode]:
    """First method or constructor declaration in preorder."""
    for node in _walk(root):
        if node.type in METHOD_TYPES:
            return node
    return None


def _has_content(root: ConcreteNode) -> bool:
    return any(c.is_named and c.type not in COMMENT_TYPES for c in root.children)


class ParserFrontend:
    """
    Error-tolerant method parser.

    Instances own a backend parser and must stay confined to one worker; use
    :func:`get_frontend` to obtain a per-process instance.
    """

    def __init__(self, config: Optional[FrontendConfig] = None,
                 backend: Optional[GrammarBackend] = None):
        self.config = config or FrontendConfig()
        if self.config.language not in SUPPORTED_LANGUAGES:
            raise ConfigurationError(f"unsupported language {self.config.language!r}")
        self.backend = backend or TreeSitterBackend(
            self.config.language, self.config.grammar_dir
        )

    def parse_concrete(self, code: str) -> Tuple[ConcreteNode, int, bool]:
        """
        Locate the method node, wrapping the snippet when needed.

        Returns
        -------
        tuple
            (node to normalize, error node count, wrapped flag)

        Raises
        ------
        ParseFailure
            If no method and no parseable fragment exists.
        """
        bare = self.backend.parse(code.encode("utf-8"))
        bare_errors = count_error_nodes(bare)
        bare_method = find_method(bare)
        if bare_method is not None and bare_errors == 0:
            return bare_method, 0, False

        wrapped = self.backend.parse((WRAPPER_PREFIX + code + WRAPPER_SUFFIX).encode("utf-8"))
        wrapped_errors = count_error_nodes(wrapped)
        wrapped_method = find_method(wrapped)
        if wrapped_method is not None and (wrapped_errors == 0 or bare_method is None):
            return wrapped_method, wrapped_errors, True
        if bare_method is not None:
            return bare_method, bare_errors, False
        if _has_content(bare):
            logger.debug("no method declaration found; keeping the parsed fragment")
            return bare, bare_errors, False
        raise ParseFailure("backend produced no method node and no parseable fragment")

    def parse(self, snippet: SourceSnippet) -> ParseOutcome:
        if snippet.language != self.config.language:
            raise ConfigurationError(
                f"snippet language {snippet.language!r} does not match "
                f"frontend language {self.config.language!r}"
            )
        node, errors, wrapped = self.parse_concrete(snippet.code)
        tree = normalize_tree(node, self.config)
        if errors:
            logger.debug("snippet %s parsed with %d error nodes", snippet.id, errors)
        return ParseOutcome(tree=tree, error_node_count=errors, wrapped=wrapped)


@lru_cache(maxsize=None)
def get_frontend(config: FrontendConfig) -> ParserFrontend:
    """Per-process frontend factory; each worker process builds its own parser."""
    return ParserFrontend(config)


def parse_method(snippet: SourceSnippet, config: Optional[FrontendConfig] = None) -> ParseOutcome:
    """
    Parse one method-level snippet into a canonical tree.

    Parameters
    ----------
    snippet : SourceSnippet
    config : FrontendConfig, optional

    Returns
    -------
    ParseOutcome

    Raises
    ------
    ConfigurationError
        Unsupported language or missing grammar.
    ParseFailure
        Nothing usable could be parsed.
    """
    config = config or FrontendConfig()
    if snippet.language not in SUPPORTED_LANGUAGES:
        raise ConfigurationError(f"unsupported language {snippet.language!r}")
    return get_frontend(replace(config, language=snippet.language)).parse(snippet)
