"""
Verification suites. Importing this package registers every check.

- axioms: groupoid axioms, composition-table mutation, the class-space quotient.
- algebra: associativity, involution, identity, the norm bracket, the truncated regular rep.
- cocycle: cocycle identity, coboundary solving, ker c, exactness, u_t.
- bimodule: both actions, both inner products, D and its transforms, cutoffs, spectral subspaces.
- kms: modular function, KMS boundary identity, traces.
- index: Ind_mu by compression and spectral flow, homomorphism and invariance.
"""

from __future__ import annotations

from groupoidal.services.suites import algebra, axioms, bimodule, cocycle, index, kms  # noqa: F401
from groupoidal.services.suites.base import SUITE_ORDER, Check, checks_for, run_suite, run_suites

__all__ = ["SUITE_ORDER", "Check", "checks_for", "run_suite", "run_suites"]
