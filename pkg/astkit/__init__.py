"""
astkit: abstract syntax tree extraction, preprocessing and evaluation
metrics for method-level source code.
"""

from astkit.errors import (
    AstkitError,
    ConfigurationError,
    InputError,
    ParseFailure,
    TreeFormatError,
)
from astkit.tree import (
    AstNode,
    AstTree,
    NodeKind,
    bfs_sequence,
    build_tree,
    mask_leaves,
    node,
    preorder_nodes,
    sbt_decode,
    sbt_encode,
)

__version__ = "0.1.0"

__all__ = [
    "AstNode",
    "AstTree",
    "AstkitError",
    "ConfigurationError",
    "InputError",
    "NodeKind",
    "ParseFailure",
    "TreeFormatError",
    "bfs_sequence",
    "build_tree",
    "mask_leaves",
    "node",
    "preorder_nodes",
    "sbt_decode",
    "sbt_encode",
]
