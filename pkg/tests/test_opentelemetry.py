import json

import pytest
import yaml

from padic_rds.analysis import analyze
from padic_rds.errors import NotInvariant
from padic_rds.utils.otel_wrapper import TracerFactory, trace_function


@pytest.fixture
def trace_file(tmp_path):
    """A file exporter writing to a temporary JSON lines file."""
    path = tmp_path / "otel_trace.jsonl"
    TracerFactory.shutdown()
    TracerFactory.get_tracer(config={
        "exporter": "file",
        "service_name": "padic-rds-tests",
        "batch_processor": {"max_queue_size": 1000, "schedule_delay_millis": 100},
        "file_exporter": {"path": str(path)},
    })
    return path


def read_spans(path):
    TracerFactory.shutdown()  # flushes the batch processor
    return [json.loads(line) for line in path.read_text().splitlines()]


@trace_function(attributes={"component": "tests"})
def traced_helper(x):
    return x * 2


@trace_function
def failing_helper():
    raise NotInvariant("not closed")


def test_analyze_is_traced(trace_file, spec29):
    analyze(spec29)
    spans = {span["name"]: span for span in read_spans(trace_file)}
    attributes = spans["padic_rds.analysis.analyze"]["attributes"]
    assert attributes["padic_rds.p"] == 29
    assert attributes["padic_rds.exponents"] == [29, 2, 3]
    assert attributes["padic_rds.seed"] == 7


def test_attributes_and_exceptions_are_recorded(trace_file):
    assert traced_helper(21) == 42
    with pytest.raises(NotInvariant):
        failing_helper()
    spans = {span["name"]: span for span in read_spans(trace_file)}
    helper = spans[f"{__name__}.traced_helper"]
    assert helper["attributes"]["component"] == "tests"
    failing = spans[f"{__name__}.failing_helper"]
    assert "ERROR" in failing["status"]["status_code"]


def test_nested_spans_share_a_trace(trace_file, spec29):
    @trace_function
    def outer():
        return analyze(spec29)

    outer()
    spans = {span["name"]: span for span in read_spans(trace_file)}
    inner = spans["padic_rds.analysis.analyze"]
    parent = [s for name, s in spans.items() if name.endswith("outer")][0]
    assert inner["context"]["trace_id"] == parent["context"]["trace_id"]
    assert inner["parent_id"] == parent["context"]["span_id"]


def test_config_from_environment(tmp_path, monkeypatch):
    config_path = tmp_path / "otel_config.yaml"
    trace_path = tmp_path / "env_trace.jsonl"
    config_path.write_text(yaml.safe_dump({
        "exporter": "file",
        "service_name": "padic-rds-env",
        "file_exporter": {"path": str(trace_path)},
    }))
    monkeypatch.setenv("PADIC_RDS_OT_CONFIG", str(config_path))
    TracerFactory.shutdown()
    traced_helper(1)
    assert [s["name"] for s in read_spans(trace_path)] == [f"{__name__}.traced_helper"]


def test_packaged_config_exports_nothing(monkeypatch):
    monkeypatch.delenv("PADIC_RDS_OT_CONFIG", raising=False)
    config = TracerFactory._load_config()
    assert config["exporter"] == "none"
    assert config["service_name"] == "padic-rds"


def test_unsupported_exporter():
    TracerFactory.shutdown()
    with pytest.raises(ValueError):
        TracerFactory.get_tracer(config={"exporter": "carrier-pigeon", "service_name": "x"})
