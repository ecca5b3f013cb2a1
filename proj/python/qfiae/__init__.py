"""QFIAE: quantum Fourier amplitude-estimation integration of LTD decay rates.

The heavy lifting lives in the compiled extension; this package re-exports its
submodules.
"""

from qfiae._core import (  # noqa: F401
    artifacts,
    fourier,
    iqae,
    ltd,
    pipeline,
    quad,
    statevec,
    vqc,
)

__all__ = [
    "artifacts",
    "fourier",
    "iqae",
    "ltd",
    "pipeline",
    "quad",
    "statevec",
    "vqc",
]
