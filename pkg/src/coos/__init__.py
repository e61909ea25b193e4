"""coos: community consensus toolkit.

Slow loop: ternary value assessment over simulated community-energy
scenarios, paired-comparison preference learning, group intention
diagnostics, and consensus geometry. Fast loop: cooperation-rate
prediction with determinant scores and intervention ranking. A session
service and CLI tie the two together.
"""

__version__ = "0.1.0"
