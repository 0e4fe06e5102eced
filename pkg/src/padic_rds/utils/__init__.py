from .otel_wrapper import TracerFactory, trace_function
from .timing import timed

__all__ = ['TracerFactory', 'trace_function', 'timed']
