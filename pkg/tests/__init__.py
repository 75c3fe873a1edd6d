"""
astkit test suite.

Unit tests per module plus integration tests that parse the Java fixture
corpus in tests/fixtures.
"""
