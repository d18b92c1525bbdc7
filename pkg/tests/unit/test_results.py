"""Unit tests for result rows and CSV output."""

import math

import aiofiles.os
import pytest

from src.harness.config import Mode
from src.harness.results import (
    OUTAGE_HEADER,
    RESULT_HEADER,
    OutageRow,
    ResultRow,
    render_csv,
    write_text_atomic,
)


def row(**overrides) -> ResultRow:
    fields = {
        "mode": Mode.MIMO,
        "L": 2,
        "trials": 10,
        "mean_greedy": 1.5,
        "stderr_greedy": 0.25,
        "seed": 7,
    }
    fields.update(overrides)
    return ResultRow(**fields)


@pytest.mark.unit
class TestResultRow:
    """Test ResultRow cells and unit scaling."""

    def test_cells_without_optimum(self):
        """Test missing optimum columns render empty."""
        assert row().cells() == ["mimo", "2", "10", "1.5", "0.25", "", "", "", "7"]

    def test_cells_with_optimum(self):
        """Test optimum columns render when present."""
        cells = row(mean_optimal=2.0, stderr_optimal=0.5, ratio=0.75).cells()
        assert cells[5:8] == ["2.0", "0.5", "0.75"]

    def test_cells_round_trip_floats(self):
        """Test cells keep full float precision."""
        value = 1.0 / 3.0
        assert float(row(mean_greedy=value).cells()[3]) == value

    def test_scaled_leaves_ratio(self):
        """Test scaling changes capacities but not the ratio."""
        scaled = row(mean_optimal=2.0, stderr_optimal=0.5, ratio=0.75).scaled(2.0)
        assert scaled.mean_greedy == 3.0
        assert scaled.stderr_greedy == 0.5
        assert scaled.mean_optimal == 4.0
        assert scaled.stderr_optimal == 1.0
        assert scaled.ratio == 0.75

    def test_scaled_identity_and_missing_optimum(self):
        """Test scale 1 returns the row itself."""
        original = row()
        assert original.scaled(1.0) is original
        assert original.scaled(1.0 / math.log(2.0)).mean_optimal is None


@pytest.mark.unit
class TestRenderCsv:
    """Test CSV rendering."""

    def test_header_only(self):
        """Test no rows gives just the header."""
        assert render_csv(RESULT_HEADER, []) == ",".join(RESULT_HEADER) + "\n"

    def test_comments_precede_header(self):
        """Test comment lines come first with LF endings."""
        text = render_csv(RESULT_HEADER, [row()], comments=["first", "second"])
        lines = text.splitlines()
        assert lines[0] == "# first"
        assert lines[1] == "# second"
        assert lines[2].startswith("mode,L,trials,")
        assert lines[3] == "mimo,2,10,1.5,0.25,,,,7"
        assert text.endswith("\n")
        assert "\r" not in text

    def test_outage_rows(self):
        """Test outage rows under the outage header."""
        outage = OutageRow(
            mode=Mode.RELAY, L=3, trials=4, rate=1.0, outage=0.25, stderr=0.2, seed=0
        )
        lines = render_csv(OUTAGE_HEADER, [outage]).splitlines()
        assert lines == ["mode,L,trials,rate,outage,stderr,seed", "relay,3,4,1.0,0.25,0.2,0"]


@pytest.mark.unit
class TestAtomicWrite:
    """Test atomic CSV writes through aiofiles."""

    async def test_writes_and_creates_parents(self, tmp_path):
        """Test missing parents are created and no temp file remains."""
        target = tmp_path / "nested" / "out.csv"
        await write_text_atomic(target, "a,b\n1,2\n")
        assert target.read_text(encoding="utf-8") == "a,b\n1,2\n"
        assert [p.name for p in target.parent.iterdir()] == ["out.csv"]

    async def test_overwrites(self, tmp_path):
        """Test an existing file is replaced."""
        target = tmp_path / "out.csv"
        target.write_text("old\n")
        await write_text_atomic(target, "new\n")
        assert target.read_text() == "new\n"

    async def test_failed_rename_removes_temp(self, tmp_path, monkeypatch):
        """Test a failed rename leaves no temp file behind."""

        async def refuse(src, dst):
            raise OSError("rename refused")

        monkeypatch.setattr(aiofiles.os, "replace", refuse)
        target = tmp_path / "out.csv"
        with pytest.raises(OSError, match="rename refused"):
            await write_text_atomic(target, "data\n")
        assert list(tmp_path.iterdir()) == []
