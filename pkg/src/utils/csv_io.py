"""
CSV sample reader utilities
"""

import csv
import io
import logging
from pathlib import Path
from typing import Iterator, List, Optional

import aiofiles
import numpy as np

from .error_handler import FileOperationError, SampleError, validate_file_path

logger = logging.getLogger(__name__)


class SampleReader:
    """Reads n x d samples from comma-separated text"""

    def __init__(self, expected_d: Optional[int] = None) -> None:
        """
        Initialize sample reader

        Args:
            expected_d: Dimension to enforce (column count is used otherwise)
        """
        self.expected_d = expected_d

    def read_file(self, file_path: str) -> np.ndarray:
        """
        Read a sample from a CSV file

        Args:
            file_path: Path to the CSV file

        Returns:
            n x d float64 matrix

        Raises:
            FileOperationError: File cannot be read
            SampleError: Content does not parse to a rectangular numeric matrix
        """
        file_path = validate_file_path(file_path)
        try:
            text = Path(file_path).expanduser().read_text(encoding="utf-8")
        except OSError as e:
            raise FileOperationError(f"Cannot read {file_path}: {e}")

        return self.parse_text(text, source=file_path)

    async def read_file_async(self, file_path: str) -> np.ndarray:
        """Read a sample from a CSV file without blocking the event loop"""
        file_path = validate_file_path(file_path)
        try:
            async with aiofiles.open(Path(file_path).expanduser(), mode="r", encoding="utf-8") as f:
                text = await f.read()
        except OSError as e:
            raise FileOperationError(f"Cannot read {file_path}: {e}")

        return self.parse_text(text, source=file_path)

    def parse_text(self, text: str, source: str = "<input>") -> np.ndarray:
        """
        Parse CSV text into a sample

        A single non-numeric first row is treated as a header. Blank lines are
        skipped. Errors report 1-based file row and column.
        """
        rows: List[List[float]] = []
        width = None

        for line_no, cells in self._records(text):
            values = self._parse_row(cells)
            if values is None:
                if line_no == self._first_line(text) and not rows:
                    logger.debug("Skipping header row in %s", source)
                    continue
                bad_col = self._first_bad_column(cells)
                raise SampleError(
                    f"{source}: non-numeric value {cells[bad_col].strip()!r} at row {line_no}, column {bad_col + 1}"
                )

            if width is None:
                width = len(values)
            elif len(values) != width:
                raise SampleError(f"{source}: row {line_no} has {len(values)} columns, expected {width}")
            rows.append(values)

        if not rows:
            raise SampleError(f"{source}: no data rows")

        sample = np.asarray(rows, dtype=np.float64)
        if self.expected_d is not None and sample.shape[1] != self.expected_d:
            raise SampleError(f"{source}: expected d={self.expected_d} columns, found {sample.shape[1]}")

        if not np.all(np.isfinite(sample)):
            bad_row, bad_col = np.argwhere(~np.isfinite(sample))[0]
            raise SampleError(f"{source}: non-finite value at data row {bad_row + 1}, column {bad_col + 1}")

        return sample

    def iter_batches(self, sample: np.ndarray, batch_size: int) -> Iterator[np.ndarray]:
        """
        Split consecutive rows into fixed-size batches

        Raises:
            SampleError: Row count is not a multiple of batch_size
        """
        n_rows = sample.shape[0]
        if n_rows % batch_size:
            raise SampleError(
                f"Ragged final batch: {n_rows} rows is not a multiple of batch size {batch_size} "
                f"({n_rows % batch_size} rows left over)"
            )
        for start in range(0, n_rows, batch_size):
            yield sample[start:start + batch_size]

    @staticmethod
    def _records(text: str) -> Iterator[tuple]:
        for line_no, cells in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            yield line_no, cells

    @staticmethod
    def _first_line(text: str) -> int:
        for line_no, line in enumerate(text.splitlines(), start=1):
            if line.strip():
                return line_no
        return 1

    @staticmethod
    def _parse_row(cells: List[str]) -> Optional[List[float]]:
        try:
            return [float(c) for c in cells]
        except ValueError:
            return None

    @staticmethod
    def _first_bad_column(cells: List[str]) -> int:
        for col, cell in enumerate(cells):
            try:
                float(cell)
            except ValueError:
                return col
        return 0


def read_sample(file_path: str, expected_d: Optional[int] = None) -> np.ndarray:
    """
    Convenience function to read a CSV sample

    Args:
        file_path: CSV path
        expected_d: Optional dimension check

    Returns:
        n x d float64 matrix
    """
    return SampleReader(expected_d).read_file(file_path)


async def read_sample_async(file_path: str, expected_d: Optional[int] = None) -> np.ndarray:
    """Async counterpart of read_sample"""
    return await SampleReader(expected_d).read_file_async(file_path)
