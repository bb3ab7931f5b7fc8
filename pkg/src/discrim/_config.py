"""Shared numerical tolerances.

The relative eigenvalue cutoff can be overridden at runtime with the
``DISCRIM_CUTOFF`` environment variable; it is read on every call so that
long-lived processes and tests see changes immediately.
"""

import os

DEFAULT_CUTOFF = 1e-10

# Invariant tolerances (absolute unless noted).
HERMITIAN_RTOL = 1e-12
DENSITY_PSD_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
PRIOR_SUM_TOL = 1e-10
PRIOR_RENORMALIZE_TOL = 1e-6
POVM_PSD_TOL = 1e-9
POVM_COMPLETENESS_TOL = 1e-8
CHAIN_TOL = 1e-9

MAX_STATES = 64


def eigen_cutoff(cutoff=None):
    """Return the relative eigenvalue cutoff, honouring ``DISCRIM_CUTOFF``."""
    source = "cutoff"
    if cutoff is not None:
        value = float(cutoff)
    else:
        source = "DISCRIM_CUTOFF"
        raw = os.environ.get("DISCRIM_CUTOFF")
        if raw is None or raw.strip() == "":
            return DEFAULT_CUTOFF
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"DISCRIM_CUTOFF must be a float, got {raw!r}") from None
    if not (value > 0 and value < 1):
        raise ValueError(f"{source}: eigenvalue cutoff must lie in (0, 1), got {value!r}")
    return value
