"""Split a few two-qubit Hamiltonians into local parts and a residual,
then show how the residual decides whether a product state entangles."""

import numpy as np

from entanglab.dynamics import PropagatorSpec, propagate_pure
from entanglab.hamiltonian import BipartiteOperator, biorthogonal_rate, local_split, pauli
from entanglab.hilbert import tensor_product

I, X, Y, Z = pauli()
cases = {
    "Z(x)I + I(x)X": np.kron(Z, I) + np.kron(I, X),
    "X(x)X": np.kron(X, X),
    "Z(x)Z + 0.3 X(x)I": np.kron(Z, Z) + 0.3 * np.kron(X, I),
}
# |++> is an eigenvector of X(x)X, so that entangling H leaves it a product
plus = np.array([1, 1]) / np.sqrt(2)
for name, m in cases.items():
    h = BipartiteOperator((2, 2), m)
    split = local_split(h)
    gamma = biorthogonal_rate(h, plus, plus).gamma
    tr = propagate_pure(h, tensor_product(plus, plus), PropagatorSpec(0.1, 20))
    print(f"{name:<20} residual {split.residual_hs_norm:6.3f}  gamma(|++>) {gamma:6.3f}  "
          f"max entropy {tr.column('linear_entropy').max():6.3f}")
