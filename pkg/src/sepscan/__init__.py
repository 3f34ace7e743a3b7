"""Entanglement detection through filtering normal forms.

Quantum states are transformed to their local filtering (SLOCC) normal form,
where every single-party reduced state is maximally mixed, and then tested
with correlation-matrix / correlation-tensor separability criteria and with
entanglement witnesses built from local orthogonal observables.
"""

from sepscan.errors import SepscanError
from sepscan.linalg import DensityMatrix
from sepscan.policy import DEFAULT_POLICY, NumericPolicy

__version__ = "0.1.0"

__all__ = ["DEFAULT_POLICY", "DensityMatrix", "NumericPolicy", "SepscanError", "__version__"]
