import json
import os
import sys
from functools import wraps
from importlib import resources
from threading import Lock
from typing import Any, Dict, Optional, Sequence

import yaml
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import \
    OTLPSpanExporter
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import ReadableSpan, TracerProvider
from opentelemetry.sdk.trace.export import (BatchSpanProcessor,
                                            ConsoleSpanExporter, SpanExporter,
                                            SpanExportResult)

# Explicitly define exports
__all__ = ['TracerFactory', 'trace_function', 'experiment_attributes', 'JsonLinesFileExporter']
DEFAULT_OTEL_CONFIG = "otel_config.yaml"
CONFIG_ENV_VAR = "PADIC_RDS_OT_CONFIG"


class JsonLinesFileExporter(SpanExporter):
    """Appends one JSON object per finished span to a file."""

    def __init__(self, filepath: str):
        self.filepath = os.path.expanduser(filepath)
        directory = os.path.dirname(self.filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._export_lock = Lock()

    def _serialize_span(self, span: ReadableSpan) -> dict:
        return {
            'name': span.name,
            'context': {
                'trace_id': format(span.context.trace_id, '032x'),
                'span_id': format(span.context.span_id, '016x'),
            },
            'parent_id': format(span.parent.span_id, '016x') if span.parent else None,
            'start_time': span.start_time,
            'end_time': span.end_time,
            'attributes': dict(span.attributes),
            'status': {
                'status_code': str(span.status.status_code),
                'description': span.status.description
            }
        }

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        try:
            with self._export_lock, open(self.filepath, 'a') as f:
                for span in spans:
                    f.write(json.dumps(self._serialize_span(span)) + "\n")
            return SpanExportResult.SUCCESS
        except OSError as e:
            print(f"Error exporting spans to file: {e}", file=sys.stderr)
            return SpanExportResult.FAILURE

    def shutdown(self) -> None:
        pass


# Singleton TracerFactory
class TracerFactory:
    """Builds the package tracer once, from a YAML config.

    The config is looked up in the ``PADIC_RDS_OT_CONFIG`` environment variable,
    then in the packaged ``resources/otel_config.yaml``. The tracer uses its own
    provider, so applications embedding the library keep their global one.
    """
    _instance = None
    _provider: Optional[TracerProvider] = None
    _config = None
    _lock = Lock()

    @classmethod
    def _load_config(cls, yaml_file=None):
        """Load configuration from YAML file.

        Args:
            yaml_file: Optional path override for the YAML configuration file
        Returns:
            dict: Configuration dictionary
        """
        config_path = yaml_file or os.environ.get(CONFIG_ENV_VAR, "")
        if not config_path:
            try:
                config_path = str(resources.files('padic_rds.resources').joinpath(DEFAULT_OTEL_CONFIG))
            except Exception as e:
                raise RuntimeError(f"Could not find {DEFAULT_OTEL_CONFIG} in package resources: {e}")

        with open(config_path, 'r') as file:
            cls._config = yaml.safe_load(file)
        return cls._config

    @classmethod
    def get_tracer(cls, config: Optional[Dict[str, Any]] = None):
        """Get or create the tracer instance.

        Args:
            config: Optional configuration override. If not provided, loads from file.
        Returns:
            Tracer instance
        """
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cfg = config if config is not None else cls._load_config()
                    cls._config = cfg
                    provider = TracerProvider(resource=Resource.create({"service.name": cfg["service_name"]}))
                    exporter = cls._configure_exporter(cfg.get('exporter', 'none'), cfg)
                    if exporter is not None:
                        batch = cfg.get('batch_processor', {})
                        provider.add_span_processor(BatchSpanProcessor(
                            exporter,
                            max_queue_size=batch.get('max_queue_size', 2048),
                            schedule_delay_millis=batch.get('schedule_delay_millis', 5000)
                        ))
                    cls._provider = provider
                    cls._instance = provider.get_tracer(cfg["service_name"])
        return cls._instance

    @classmethod
    def shutdown(cls) -> None:
        """Flush pending spans and forget the tracer; the next call rebuilds it."""
        with cls._lock:
            if cls._provider is not None:
                cls._provider.shutdown()
            cls._provider = None
            cls._instance = None

    @staticmethod
    def _configure_exporter(exporter_type: str, config: Dict[str, Any]) -> Optional[SpanExporter]:
        """Configure the appropriate exporter based on type.

        Args:
            exporter_type: none | console | file | otlp
            config: the full tracing config, for exporter settings
        Returns:
            Configured exporter instance, None when spans are not exported
        """
        if exporter_type == "none":
            return None
        elif exporter_type == "otlp":
            return OTLPSpanExporter()  # OTEL_EXPORTER_OTLP_... environment variables apply here
        elif exporter_type == "console":
            return ConsoleSpanExporter(out=sys.stderr)
        elif exporter_type == "file":
            file_path = config.get('file_exporter', {}).get('path', "~/.padic_rds/otel_trace.jsonl")
            return JsonLinesFileExporter(file_path)
        else:
            raise ValueError(f"Unsupported exporter type {exporter_type!r}")


def experiment_attributes(args: Sequence[Any], kwargs: Dict[str, Any]) -> Dict[str, Any]:
    """p, exponents and seed of the first experiment definition among the arguments.

    Accepts an RdsSpec or anything carrying one as ``.spec`` (PatternConfig).
    """
    for value in list(args) + list(kwargs.values()):
        spec = getattr(value, "spec", value)
        if all(hasattr(spec, name) for name in ("p", "exponents", "seed")):
            return {
                "padic_rds.p": int(spec.p),
                "padic_rds.exponents": [int(s) for s in spec.exponents],
                "padic_rds.seed": int(spec.seed),
            }
    return {}


# Decorator for OpenTelemetry tracing
def trace_function(func=None, *, attributes: Optional[Dict[str, Any]] = None):
    """Run the function in a span named after it, tagged with the experiment it runs."""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            tracer = TracerFactory.get_tracer()
            span_name = f"{func.__module__}.{func.__name__}"
            with tracer.start_as_current_span(span_name) as span:
                for key, value in experiment_attributes(args, kwargs).items():
                    span.set_attribute(key, value)
                if attributes:
                    for key, value in attributes.items():
                        span.set_attribute(key, str(value))
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    span.record_exception(e)
                    raise
        return wrapper

    if func is None:
        return decorator
    return decorator(func)
