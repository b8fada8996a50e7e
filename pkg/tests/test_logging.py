"""Tests for the logging context helpers."""

import structlog

from atomlaser.utils.logging import ContextLogger


class TestContextLogger:
    """Test cases for ContextLogger."""

    def test_nested_point_keeps_run(self):
        """Test a point bound inside a run leaves the run id in place."""
        with ContextLogger(run_id="abc"):
            with ContextLogger(point="I_s=2,c=40,r=3"):
                bound = structlog.contextvars.get_contextvars()
                assert bound["run_id"] == "abc"
                assert bound["point"] == "I_s=2,c=40,r=3"
            bound = structlog.contextvars.get_contextvars()
            assert bound["run_id"] == "abc"
            assert "point" not in bound
        assert "run_id" not in structlog.contextvars.get_contextvars()

    def test_restores_outer_value(self):
        """Test rebinding a key restores the outer value on exit."""
        with ContextLogger(point="outer"):
            with ContextLogger(point="inner"):
                assert structlog.contextvars.get_contextvars()["point"] == "inner"
            assert structlog.contextvars.get_contextvars()["point"] == "outer"
