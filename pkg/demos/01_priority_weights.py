"""
Deriving placement priority weights from a hotspot profile
==========================================================

A VM's dominant resource demand (its hotspot profile) is turned into a
3x3 pairwise comparison matrix whose entries are demand ratios.  The
principal eigenvector of that matrix, normalized to sum 1, is the
weight vector used to score candidate servers.
"""

import numpy as np

from vmshield import (
    HotspotProfile,
    InconsistentMatrix,
    ResourceVector,
    consistency_ratio,
    derive_weights,
    matrix_from_profile,
    principal_eigenvector,
)

# a memory-hungry VM: 20% cpu, 60% memory, 20% bandwidth
profile = HotspotProfile(ResourceVector(cpu=20, mem=60, bw=20))
matrix = matrix_from_profile(profile)
print("comparison matrix built from the profile:")
print(np.array_str(matrix, precision=4))

weights = derive_weights(profile)
print("\nderived weights:", weights.to_json())

# the eigen-solution also reports how coherent the judgments are;
# ratio matrices are consistent by construction, so CR is ~0
_, lambda_max = principal_eigenvector(matrix)
print(f"lambda_max = {lambda_max:.12f}, CR = {consistency_ratio(lambda_max):.2e}")

# hand-written judgments do not have to be coherent.  This cyclic
# matrix says cpu >> mem >> bw >> cpu and is rejected outright.
cyclic = [[1, 9, 1 / 9], [1 / 9, 1, 9], [9, 1 / 9, 1]]
try:
    derive_weights(cyclic)
except InconsistentMatrix as exc:
    print(f"\ncyclic judgments rejected: {exc}")
