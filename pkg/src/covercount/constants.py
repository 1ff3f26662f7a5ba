"""Shared numeric constants for the decay analysis.

These values are the single source of truth: the marginal estimators, the
certified-depth formulas, and the bound-verification suite all import from
here so a transcription error cannot silently diverge between modules.
"""

from __future__ import annotations

import math

# Geometric decay bases of the truncated-estimate error, one per engine.
CNF_DECAY_BASE = 0.981
AMO_DECAY_BASE = 0.99

# Group-width bookkeeping: expanding a width-w group costs ceil(log_M(w+1))
# depth units.  The analysis constants above are tied to M = 4.
DEPTH_LOG_BASE = 4

SQRT6 = math.sqrt(6.0)

# |truncated - exact| <= COEFF * base^L envelopes.
CNF_ENVELOPE_COEFF = 5.0 * SQRT6          # any read-5 variable
CNF_ENVELOPE_COEFF_DEG4 = 2.0 * SQRT6     # variables occurring in <= 4 clauses
AMO_ENVELOPE_COEFF = 4.0 * SQRT6

# Certified depth: L = ceil(log_base(eps / (COEFF * n))).
CNF_CERTIFIED_COEFF = 10.0 * SQRT6
AMO_CERTIFIED_COEFF = 8.0 * SQRT6

DEFAULT_NODE_BUDGET = 2_000_000
