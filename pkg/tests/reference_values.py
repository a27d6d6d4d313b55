"""Reference values for local P^2 at hbar = 2 pi."""

import math

# lowest energies E_0..E_4
P2_ENERGIES = [
    2.56264206862381937,
    3.91821318829983977,
    4.91178982376733606,
    5.73573703542155946,
    6.45535922844299896,
]

Z1_EXACT = 1.0 / 9.0
Z2_EXACT = 1.0 / (12 * math.sqrt(3) * math.pi) - 1.0 / 81.0

# Tr rho_{1,1} at hbar = 2 pi / 3
TRACE_P2_THIRD = 0.46045214817283
