"""
Dense operators on a truncated bosonic mode tensored with K two-level systems.

Slot 0 is always the resonator, slots 1..K the DQD qubits.  Qubit basis
order is (|g>, |e>) with sigma_z = diag(+1, -1), so that the eigenbasis
Hamiltonian term ``-(omega/2) sigma_z`` places |g> lowest.
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionError, InvalidTruncationError


@dataclass(frozen=True)
class HilbertLayout:
    fock_cutoff: int = 5
    num_qubits: int = 0

    def __post_init__(self):
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 2:
            raise InvalidTruncationError(f"fock_cutoff must be an integer >= 2, got {self.fock_cutoff}")
        if int(self.num_qubits) != self.num_qubits or self.num_qubits < 0:
            raise DimensionError(f"num_qubits must be a non-negative integer, got {self.num_qubits}")

    @property
    def dims(self):
        return (self.fock_cutoff,) + (2,) * self.num_qubits

    @property
    def dim(self):
        return self.fock_cutoff * 2 ** self.num_qubits


def fock_destroy(cutoff):
    """Annihilation operator a on Fock states |0>..|cutoff-1>."""
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidTruncationError(f"cutoff must be an integer >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def fock_create(cutoff):
    return fock_destroy(cutoff).conj().T


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# |g><e| and |e><g| in the (|g>, |e>) ordering
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()


def pauli(axis):
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None


def embed(op, slot, layout):
    """Kronecker-embed a local operator into the full space: I x ... x op x ... x I."""
    dims = layout.dims
    if not 0 <= slot < len(dims):
        raise DimensionError(f"slot {slot} out of range for layout with {len(dims)} slots")
    op = np.asarray(op)
    if op.shape != (dims[slot], dims[slot]):
        raise DimensionError(
            f"operator shape {op.shape} does not match slot {slot} dimension {dims[slot]}"
        )
    factors = [np.eye(n, dtype=complex) for n in dims]
    factors[slot] = op.astype(complex)
    return reduce(np.kron, factors)


def commutator(a, b):
    return a @ b - b @ a


def dag(op):
    return op.conj().T


def identity(layout):
    return np.eye(layout.dim, dtype=complex)


def basis_state(layout, photons, qubits=()):
    """Ket |n, q_1, ..., q_K> with q_k in {0 (g), 1 (e)}."""
    qubits = tuple(qubits) + (0,) * (layout.num_qubits - len(qubits))
    if len(qubits) != layout.num_qubits:
        raise DimensionError("too many qubit labels for layout")
    idx = np.ravel_multi_index((photons,) + qubits, layout.dims)
    ket = np.zeros(layout.dim, dtype=complex)
    ket[idx] = 1.0
    return ket
