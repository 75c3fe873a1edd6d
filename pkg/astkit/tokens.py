"""
Sub-tokenization.

The ``simple`` tokenizer splits on non-alphanumeric characters, camelCase
boundaries and letter/digit boundaries, then lowercases. The ``external``
tokenizer delegates to a pretrained Hugging Face tokenizer (for example
``microsoft/codebert-base``) loaded on first use.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, List, Optional

from astkit.config import TokenizerConfig
from astkit.errors import ConfigurationError

logger = logging.getLogger(__name__)

# Unicode letter runs and digit runs; "_" and punctuation separate chunks.
_LETTERS_OR_DIGITS = re.compile(r"[^\W\d_]+|\d+")
# Byte-level BPE marks a leading space with this character.
_BPE_SPACE = "Ġ"


@dataclass(frozen=True)
class TokenBag:
    """Tokens of one text, as a sequence, multiset and set."""

    tokens: List[str]

    @property
    def counts(self) -> Counter:
        return Counter(self.tokens)

    @property
    def set(self) -> FrozenSet[str]:
        return frozenset(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


def split_subtokens(text: str) -> List[str]:
    """
    Split ``text`` into lowercase sub-tokens.

    >>> split_subtokens("getMaxValue2")
    ['get', 'max', 'value', '2']
    >>> split_subtokens("HTTPServer_url")
    ['http', 'server', 'url']
    """
    out = []
    for run in _LETTERS_OR_DIGITS.findall(text):
        out.extend(piece.lower() for piece in _case_pieces(run))
    return out


def _case_pieces(run: str) -> List[str]:
    """Cut a letter run before each camelCase hump and at the end of an acronym."""
    pieces = []
    start = 0
    for i in range(1, len(run)):
        prev, cur = run[i - 1], run[i]
        following = run[i + 1] if i + 1 < len(run) else ""
        if cur.isupper() and (prev.islower() or (prev.isupper() and following.islower())):
            pieces.append(run[start:i])
            start = i
    pieces.append(run[start:])
    return pieces


@lru_cache(maxsize=4)
def _load_external(spec: str):
    try:
        from transformers import AutoTokenizer
    except ImportError as exc:
        raise ConfigurationError(
            "external tokenizer mode needs the 'transformers' package"
        ) from exc
    try:
        tokenizer = AutoTokenizer.from_pretrained(spec)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"cannot load tokenizer {spec!r}: {exc}") from exc
    logger.info("loaded external tokenizer %s", spec)
    return tokenizer


def _external_tokens(text: str, spec: str) -> List[str]:
    pieces = _load_external(spec).tokenize(text)
    out = []
    for piece in pieces:
        piece = piece.replace(_BPE_SPACE, "").strip()
        if piece:
            out.append(piece.lower())
    return out


def tokenize(text: str, config: Optional[TokenizerConfig] = None) -> TokenBag:
    """
    Tokenize ``text`` according to ``config``.

    Parameters
    ----------
    text : str
    config : TokenizerConfig, optional
        Defaults to the simple tokenizer

    Returns
    -------
    TokenBag

    Raises
    ------
    ConfigurationError
        If the external tokenizer cannot be resolved.
    """
    config = config or TokenizerConfig()
    if config.mode == "external":
        return TokenBag(_external_tokens(text, config.external_spec))
    return TokenBag(split_subtokens(text))
