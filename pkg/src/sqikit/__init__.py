"""ECG signal quality indices, denoising and outlier benchmarks."""

from .signal_core import Signal, SignalError

__version__ = "0.1.0"

__all__ = ["Signal", "SignalError", "__version__"]
