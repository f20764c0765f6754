"""
OEIS b-file reading and writing, plus an in-memory cache of reference b-files.

A b-file is ASCII text with one "<index> <value>" pair per line, indices
ascending from 0, LF line endings. Lines starting with '#' and blank lines are
comments when parsing.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)


def format_bfile(values: Sequence[int]) -> str:
    """Render terms as b-file text: "<n> <a(n)>\\n" for n from 0."""
    return "".join(f"{i} {v}\n" for i, v in enumerate(values))


def parse_bfile(text: str) -> List[int]:
    """
    Parse b-file text back into its terms.

    Args:
        text: b-file content

    Returns:
        list[int]: Terms in index order

    Raises:
        ValueError: On malformed lines or indices that are not 0, 1, 2, ...
    """
    values: List[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<index> <value>', got {line!r}")
        try:
            index, value = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {line!r}") from None
        if index != len(values):
            raise ValueError(f"line {lineno}: expected index {len(values)}, got {index}")
        values.append(value)
    return values


def read_bfile(path: Path) -> List[int]:
    """Read and parse a b-file from disk."""
    with open(path, "r", encoding="ascii") as f:
        return parse_bfile(f.read())


class BFileCache:
    """
    Loads every b-file (*.txt) of a folder into memory, keyed by file stem.
    """

    def __init__(self, folder: str):
        """
        Initialize the cache.

        Args:
            folder: Path to the folder with reference b-files
        """
        self.folder = Path(folder)
        self.cache: Dict[str, List[int]] = {}
        self.logger = logging.getLogger(__name__)
        self._load_files()

    def _load_files(self):
        if not self.folder.exists():
            self.logger.warning(f"b-file folder does not exist: {self.folder}")
            return

        self.logger.info(f"Loading b-files from: {self.folder}")
        for path in sorted(self.folder.glob("*.txt")):
            try:
                self.cache[path.stem] = read_bfile(path)
                self.logger.debug(f"Loaded b-file: {path.stem}")
            except (OSError, UnicodeDecodeError, ValueError) as e:
                self.logger.error(f"Skipping unreadable b-file {path}: {e}")
        self.logger.info(f"Loaded {len(self.cache)} b-files into cache")

    def get(self, name: str) -> Optional[List[int]]:
        return self.cache.get(name)

    def names(self) -> List[str]:
        return sorted(self.cache)
