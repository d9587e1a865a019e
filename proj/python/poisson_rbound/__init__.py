"""Symbol kernels, Poisson operators and R-bound estimates on a periodic half-space."""

from ._core import (
    DomainError,
    GridConfig,
    Kernel,
    KppParams,
    MuScan,
    ParameterError,
    ScanResult,
    __version__,
    bracket,
    decay_fit,
    kernel,
    kernel_names,
    kpp_lemma_scan,
    kpp_resolvent_v,
    lemma_max_eval,
    opnorm_scan,
    rbound_scan,
    sector_contains,
    worker_count,
)

__all__ = [
    "DomainError",
    "GridConfig",
    "Kernel",
    "KppParams",
    "MuScan",
    "ParameterError",
    "ScanResult",
    "__version__",
    "bracket",
    "decay_fit",
    "kernel",
    "kernel_names",
    "kpp_lemma_scan",
    "kpp_resolvent_v",
    "lemma_max_eval",
    "opnorm_scan",
    "rbound_scan",
    "sector_contains",
    "worker_count",
]
