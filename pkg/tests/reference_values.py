"""Reference numbers computed by tools/derive_oracles.py (sympy, written
directly from the line elements; no package code involved)."""

import math

# Kerr-Newman m=1, a=0.5, e=0.3 at (0, 3, pi/3, 0)
KN_PARAMS = {"m": 1.0, "a": 0.5, "e": 0.3}
KN_POINT = (0.0, 3.0, math.pi / 3, 0.0)
KN_PHI2 = 0.34786206896551725
KN_XI3 = -0.24455172413793103
KN_H_DIAG = (2.713323353293413, 9.0625, 7.2011300555114985)
KN_B = (0.3033826465038694, -0.022393656425348386, 0.0)
KN_OMEGA13 = -0.32705058294305905
KN_OMEGA23 = 0.4300256862329986
# Ricci components on the threading frame
KN_RICCI_00 = 0.0004265456066259379
KN_RICCI_11 = -0.0029733636175924014
KN_RICCI_22 = 0.009931034482758621
KN_RICCI_33 = 0.008829966420469107
KN_RICCI_30 = -0.0008707612722665985

# Schwarzschild m=1 at r=4
SCHW_GAMMA1_00 = 0.03125
SCHW_C1 = 0.125

# circular Schwarzschild orbit at r=6: (dphi/dt)^2 = m / r^3
SCHW_CIRCULAR_OMEGA2_R6 = 1.0 / 216.0

# flat FLRW with a = exp(t) (de Sitter, H = 1)
DESITTER_RICCI_00 = -3.0
DESITTER_EXPANSION = 3.0

# Reissner-Nordstrom m=1, e=1.5 (no horizon): static observer at r = e^2/m
RN_STATIC_RADIUS = 2.25
DE_SITTER_POINT = (1.3, 0.4, 1.0, 0.2)
