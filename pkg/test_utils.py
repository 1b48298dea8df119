#!/usr/bin/env python3
"""
Tests for the utility modules: errors, config, CSV input, replicates, tables
"""

import asyncio
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.utils.config import load_env, load_settings
from src.utils.csv_io import SampleReader, read_sample, read_sample_async
from src.utils.error_handler import (
    FileOperationError,
    ParameterError,
    SampleError,
    SmmdError,
    validate_alpha,
    validate_gamma,
    validate_positive_int,
    validate_sample,
)
from src.utils.replicates import run_replicates, spawn_generators, validate_seed
from src.utils.tables import dumps_fixed, format_float, rows_to_csv, rows_to_json, write_table


class TestValidators:
    def test_hierarchy(self):
        for cls in (ParameterError, SampleError, FileOperationError):
            assert issubclass(cls, SmmdError)

    def test_gamma(self):
        assert validate_gamma(2) == 2.0
        for bad in (None, 0, -1.0, float("inf"), float("nan"), True, "1"):
            with pytest.raises(ParameterError):
                validate_gamma(bad)

    def test_alpha(self):
        assert validate_alpha("0.05") == 0.05
        for bad in (0, 1, 1.5, "x", None):
            with pytest.raises(ParameterError):
                validate_alpha(bad)

    def test_positive_int(self):
        assert validate_positive_int(np.int64(3), "n") == 3
        with pytest.raises(ParameterError):
            validate_positive_int(1, "batch size", minimum=2)
        with pytest.raises(ParameterError):
            validate_positive_int(2.0, "n")

    def test_sample(self):
        assert validate_sample([1.0, 2.0, 3.0]).shape == (3, 1)
        with pytest.raises(SampleError, match="row 1, column 0"):
            validate_sample([[0.0], [float("nan")]])
        with pytest.raises(SampleError):
            validate_sample([[1.0, 2.0], [3.0]])
        with pytest.raises(SampleError):
            validate_sample([[1.0]], min_rows=2)


class TestSettings:
    def test_defaults(self, monkeypatch):
        for key in ("SMMD_CACHE_DIR", "SMMD_LOG_LEVEL", "SMMD_THREADS"):
            monkeypatch.delenv(key, raising=False)
        settings = load_settings()
        assert settings.cache_dir.name == "smmd"
        assert settings.log_level == "WARNING"
        assert settings.threads is None

    def test_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("SMMD_CACHE_DIR", str(tmp_path))
        monkeypatch.setenv("SMMD_LOG_LEVEL", "debug")
        monkeypatch.setenv("SMMD_THREADS", "3")
        settings = load_settings()
        assert settings.cache_dir == tmp_path
        assert settings.log_level == "DEBUG"
        assert settings.threads == 3

    def test_bad_threads(self, monkeypatch):
        monkeypatch.setenv("SMMD_THREADS", "many")
        with pytest.raises(ParameterError):
            load_settings()

    def test_env_file(self, monkeypatch, tmp_path):
        # undo removes SMMD_THREADS again
        monkeypatch.setenv("SMMD_THREADS", "1")
        monkeypatch.delenv("SMMD_THREADS")
        monkeypatch.setenv("SMMD_LOG_LEVEL", "ERROR")
        (tmp_path / ".env").write_text("SMMD_THREADS=4\nSMMD_LOG_LEVEL=DEBUG\n")
        assert load_env(tmp_path)
        settings = load_settings()
        assert settings.threads == 4
        assert settings.log_level == "ERROR"

    def test_missing_env_file(self, tmp_path):
        assert load_env(tmp_path) is False


class TestSampleReader:
    def test_header_detected(self):
        sample = SampleReader().parse_text("x,y\n1,2\n\n3,4\n")
        assert sample.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_bad_cell_location(self):
        with pytest.raises(SampleError, match="row 3, column 2"):
            SampleReader().parse_text("1,2\n3,4\n5,oops\n")

    def test_ragged_row(self):
        with pytest.raises(SampleError, match="row 2 has 1 columns"):
            SampleReader().parse_text("1,2\n3\n")

    def test_non_finite(self):
        with pytest.raises(SampleError, match="non-finite"):
            SampleReader().parse_text("1\nnan\n")

    def test_empty(self):
        with pytest.raises(SampleError, match="no data rows"):
            SampleReader().parse_text("a,b\n")

    def test_expected_dimension(self):
        with pytest.raises(SampleError, match="expected d=3"):
            SampleReader(3).parse_text("1,2\n")

    def test_files(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("1,2\n3,4\n")
        assert np.array_equal(read_sample(str(path)), asyncio.run(read_sample_async(str(path))))
        with pytest.raises(FileOperationError):
            read_sample(str(tmp_path / "missing.csv"))

    def test_batches(self):
        reader = SampleReader()
        data = np.arange(12.0).reshape(6, 2)
        batches = list(reader.iter_batches(data, 3))
        assert len(batches) == 2
        assert batches[1][0].tolist() == [6.0, 7.0]
        with pytest.raises(SampleError, match="Ragged"):
            list(reader.iter_batches(data, 4))


class TestReplicates:
    def test_seed_validation(self):
        assert validate_seed(0) == 0
        for bad in (None, -1, 2**64, 1.5, True):
            with pytest.raises(ParameterError):
                validate_seed(bad)

    def test_streams_independent_of_count(self):
        first = [g.random() for g in spawn_generators(7, 3)]
        more = [g.random() for g in spawn_generators(7, 5)]
        assert first == more[:3]

    def test_thread_count_does_not_change_results(self):
        def body(index, rng):
            return index, float(rng.standard_normal())

        serial = run_replicates(body, 11, 37, threads=1)
        parallel = run_replicates(body, 11, 37, threads=5)
        assert serial == parallel
        assert [i for i, _ in serial] == list(range(37))

    def test_different_seeds_differ(self):
        def body(index, rng):
            return rng.random()

        assert run_replicates(body, 1, 4, threads=1) != run_replicates(body, 2, 4, threads=1)


@dataclass
class Row:
    name: str
    value: float
    count: int


class TestTables:
    def test_float_round_trip(self):
        for value in (0.1, 1 / 3, -2.5e-300, 12345.678901234567):
            assert float(format_float(value)) == value
        assert format_float(float("nan")) == "NaN"

    def test_dumps_fixed(self):
        text = dumps_fixed({"b": 1.0, "a": None, "flag": True, "name": "x"})
        assert text == '{"b": 1, "a": null, "flag": true, "name": "x"}'

    def test_non_finite_values_are_null(self):
        text = dumps_fixed({"tau": float("inf"), "low": -np.inf, "sd": float("nan"), "m": [1.5, np.nan]})
        assert json.loads(text) == {"tau": None, "low": None, "sd": None, "m": [1.5, None]}
        assert json.loads(rows_to_json([Row("x", float("inf"), 1)]))[0]["value"] is None

    def test_csv_and_json(self):
        rows = [Row("a", 0.5, 1), Row("b", 0.25, 2)]
        assert rows_to_csv(rows) == "name,value,count\na,0.5,1\nb,0.25,2\n"
        assert rows_to_json(rows).splitlines()[1] == '  {"name": "a", "value": 0.5, "count": 1},'

    def test_write_table(self, tmp_path):
        out = tmp_path / "t.csv"
        text = write_table([Row("a", 1.5, 3)], str(out))
        assert out.read_text() == text
        with pytest.raises(FileOperationError):
            write_table([Row("a", 1.5, 3)], str(tmp_path / "no" / "dir" / "t.csv"))
