"""
Pytest configuration and shared fixtures.

This file contains fixtures that are available to all test modules.
"""

import json
from pathlib import Path

import pytest

from astkit.config import AstkitConfig, FrontendConfig
from astkit.tree import AstTree, build_tree, node
from tests.helpers import HAS_JAVA_GRAMMAR

FIXTURES = Path(__file__).parent / "fixtures"


# ============================================================================
# Session-level fixtures
# ============================================================================

@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def method_records():
    """The 200-method Java fixture corpus as raw JSON objects."""
    with open(FIXTURES / "methods.jsonl", "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


@pytest.fixture(scope="session")
def edge_records():
    """Hand-written methods with less common constructs, keyed by shape."""
    with open(FIXTURES / "edge_methods.jsonl", "r", encoding="utf-8") as handle:
        records = [json.loads(line) for line in handle if line.strip()]
    return {r["shape"]: r for r in records}


@pytest.fixture(scope="session")
def parsed_methods(method_records):
    """``(record, ParseOutcome)`` for every fixture method."""
    if not HAS_JAVA_GRAMMAR:
        pytest.skip("tree-sitter-java is not installed")
    from astkit.frontend import SourceSnippet, parse_method

    config = FrontendConfig()
    return [
        (record, parse_method(SourceSnippet(record["id"], record["code"]), config))
        for record in method_records
    ]


# ============================================================================
# Function-level fixtures
# ============================================================================

@pytest.fixture
def e1() -> AstTree:
    """A(B(x), C(y, z)), preorder ids A=0 B=1 x=2 C=3 y=4 z=5."""
    return build_tree(node("A", node("B", node("x")), node("C", node("y"), node("z"))))


@pytest.fixture
def config() -> AstkitConfig:
    return AstkitConfig(jobs=1)


@pytest.fixture
def corpus_file(tmp_path, method_records):
    """Small corpus file with one straight-line and one if/else method."""
    path = tmp_path / "corpus.jsonl"
    chosen = [r for r in method_records if r["id"] in ("m000", "m020")]
    path.write_text("".join(json.dumps(r) + "\n" for r in chosen), encoding="utf-8")
    return path


# ============================================================================
# Markers
# ============================================================================

def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )


# ============================================================================
# Test collection customization
# ============================================================================

def pytest_collection_modifyitems(config, items):
    """Modify test items during collection."""
    for item in items:
        # Add unit marker to all tests not marked as integration
        if "integration" not in item.keywords:
            item.add_marker(pytest.mark.unit)
