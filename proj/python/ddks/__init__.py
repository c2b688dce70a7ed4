"""d-dimensional two-sample Kolmogorov-Smirnov tests."""

from ._ddks import (
    Error,
    generate,
    ks_1d,
    min_sample_size,
    significance,
    statistic,
    test,
)

__all__ = ["Error", "generate", "ks_1d", "min_sample_size", "significance", "statistic", "test"]
__version__ = "0.1.0"
