"""Unit tests for content digests."""

from gep_planner.common.hashing import (
    directory_digests,
    file_digest,
    payload_digest,
)


class TestFileDigests:
    """Tests for file and directory digests."""

    def test_known_digest(self, tmp_path):
        # Given
        path = tmp_path / "empty.csv"
        path.write_bytes(b"")

        # When/Then
        assert file_digest(path) == "da39a3ee5e6b4b0d3255bfef95601890afd80709"

    def test_directory_keeps_data_files_only(self, tmp_path):
        # Given
        (tmp_path / "sub").mkdir()
        (tmp_path / "buses.csv").write_text("id,peak_load\n1,10\n")
        (tmp_path / "sub" / "study.toml").write_text("years = 1\n")
        (tmp_path / "notes.txt").write_text("ignored")

        # When
        digests = directory_digests(tmp_path)

        # Then
        assert sorted(digests) == ["buses.csv", "sub/study.toml"]


def test_payload_digest_ignores_key_order():
    """Canonical JSON makes the digest independent of insertion order."""
    assert payload_digest({"a": 1, "b": [1, 2]}) == payload_digest({"b": [1, 2], "a": 1})
