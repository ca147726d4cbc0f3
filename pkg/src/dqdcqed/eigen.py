"""
One-excitation eigenstructure of two DQDs coupled to one resonator mode.

Basis order is {|e,g,0>, |g,g,1>, |g,e,0>}; energies are relative to the
common qubit energy.  Couplings passed here are the effective ones
(g_k sin theta_k); at the charge sweet spot they equal the bare g_k.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateInputError
from .model import mixing_angle, qubit_frequency

DRESSED = "dressed-resonant"
BARE = "bare-resonant"
CONVENTIONS = (DRESSED, BARE)

RESONATOR_INDEX = 1


def resonator_weight(state):
    return float(abs(state[RESONATOR_INDEX]) ** 2)


def symmetric_drive_weight(state):
    """|(<e,g,0| + <g,e,0|) state|^2 / 2: overlap with a symmetric qubit drive."""
    return float(abs(state[0] + state[2]) ** 2 / 2.0)


@dataclass
class EigenTriple:
    energies: np.ndarray
    states: np.ndarray  # row i is the eigenvector for energies[i]
    labels: tuple = ()
    resonator_weight: np.ndarray = field(init=False)
    drive_weight: np.ndarray = field(init=False)

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        self.resonator_weight = np.array([resonator_weight(s) for s in self.states])
        self.drive_weight = np.array([symmetric_drive_weight(s) for s in self.states])

    def state(self, label):
        return self.states[self.labels.index(label)]

    def energy(self, label):
        return float(self.energies[self.labels.index(label)])

    def to_dict(self):
        return {
            "energies_MHz": [float(e) for e in self.energies],
            "labels": list(self.labels),
            "basis": ["|e,g,0>", "|g,g,1>", "|g,e,0>"],
            "states": [[[float(c.real), float(c.imag)] for c in s] for s in self.states],
            "brightness": {
                "resonator_weight": [float(w) for w in self.resonator_weight],
                "symmetric_drive": [float(w) for w in self.drive_weight],
            },
        }


def one_excitation_hamiltonian(g1, g2, delta_r, qubit2_offset=0.0):
    """Single-excitation block; resonator at delta_r, DQD_2 at qubit2_offset."""
    return np.array(
        [[0.0, g1, 0.0], [g1, delta_r, g2], [0.0, g2, qubit2_offset]], dtype=float
    )


def _label_exact(energies, vecs):
    # resonator-like: largest photon weight; of the rest, the darker is "dark"
    weights = np.abs(vecs[:, RESONATOR_INDEX]) ** 2
    res = int(np.argmax(weights))
    rest = [i for i in range(3) if i != res]
    dark, bright = sorted(rest, key=lambda i: (weights[i], i))
    labels = [""] * 3
    labels[res], labels[dark], labels[bright] = "resonator", "dark", "bright"
    return tuple(labels)


def _diagonalize(h):
    w, v = np.linalg.eigh(h)
    vecs = v.T.astype(complex)
    # fix the global phase: largest-magnitude component real positive
    for i, s in enumerate(vecs):
        j = int(np.argmax(np.abs(s)))
        vecs[i] = s * (abs(s[j]) / s[j])
    return w, vecs


def resonant_triplet(g1, g2):
    """Closed-form triplet when both qubits and the resonator are degenerate."""
    if g1 < 0 or g2 < 0:
        raise ValueError("couplings must be non-negative")
    gc = math.hypot(g1, g2)
    if gc == 0:
        raise DegenerateInputError("g1 = g2 = 0: the triplet is fully degenerate")
    r2 = math.sqrt(2.0) * gc
    states = np.array(
        [
            [g1 / r2, -gc / r2, g2 / r2],
            [-g2 / gc, 0.0, g1 / gc],
            [g1 / r2, gc / r2, g2 / r2],
        ],
        dtype=complex,
    )
    return EigenTriple(np.array([-gc, 0.0, gc]), states, ("bright-", "dark", "bright+"))


@dataclass
class DispersiveReport:
    g1: float
    g2: float
    delta_r: float
    exact: EigenTriple
    perturbative: EigenTriple
    max_energy_deviation: float

    def to_dict(self):
        return {
            "g1_MHz": self.g1,
            "g2_MHz": self.g2,
            "delta_r_MHz": self.delta_r,
            "exact": self.exact.to_dict(),
            "perturbative": self.perturbative.to_dict(),
            "max_energy_deviation_MHz": self.max_energy_deviation,
        }


def perturbative_states(g1, g2, delta_r):
    """Dark (+'), bright (-') and resonator-like (1') states, normalized."""
    gc = math.hypot(g1, g2)
    if gc == 0:
        return np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
    dark = np.array([-g2, 0.0, g1]) / gc
    bright = np.array([g1 * delta_r, -gc * gc, g2 * delta_r]) / (gc * math.hypot(gc, delta_r))
    res = np.array([g1, delta_r, g2]) / math.hypot(gc, delta_r)
    return np.array([dark, bright, res], dtype=complex)


def dispersive_eigensystem(g1, g2, delta_r):
    """
    Exact diagonalization of the detuned single-excitation Hamiltonian together
    with the second-order energies {0, -g_c^2/Delta, Delta + g_c^2/Delta}.
    """
    if delta_r == 0:
        raise ZeroDivisionError("delta_r = 0: use resonant_triplet for the resonant case")
    gc2 = g1 * g1 + g2 * g2
    w, vecs = _diagonalize(one_excitation_hamiltonian(g1, g2, delta_r))
    exact = EigenTriple(w, vecs, _label_exact(w, vecs))
    pert_e = np.array([0.0, -gc2 / delta_r, delta_r + gc2 / delta_r])
    pert = EigenTriple(pert_e, perturbative_states(g1, g2, delta_r), ("dark", "bright", "resonator"))
    dev = max(abs(exact.energy(lbl) - pert.energy(lbl)) for lbl in ("dark", "bright", "resonator"))
    return DispersiveReport(float(g1), float(g2), float(delta_r), exact, pert, float(dev))


def exchange_splitting(g1, g2, delta_r, convention=DRESSED):
    """
    Qubit-qubit splitting 2J in MHz.

    ``dressed-resonant``: 2 g1 g2 / Delta (dressed qubit frequencies degenerate);
    ``bare-resonant``: (g1^2 + g2^2) / Delta (bare frequencies degenerate).
    """
    if delta_r == 0:
        raise ZeroDivisionError("delta_r = 0: the resonant case is described by resonant_triplet")
    if convention == DRESSED:
        return abs(2.0 * g1 * g2 / delta_r)
    if convention == BARE:
        return abs((g1 * g1 + g2 * g2) / delta_r)
    raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def perturbative_two_qubit_hamiltonian(g1, g2, delta_r):
    """
    Second-order effective Hamiltonian in the basis {|e,g>, |g,e>}.

    The sign is that of virtual exchange with a resonator *above* the qubits
    (delta_r > 0 lowers the bright state), consistent with the exact
    single-excitation spectrum.
    """
    if delta_r == 0:
        raise ZeroDivisionError("delta_r = 0")
    return -np.array([[g1 * g1, g1 * g2], [g1 * g2, g2 * g2]], dtype=float) / delta_r


def qubit_like_splitting(g1, g2, delta_r, qubit2_offset=0.0):
    """Exact splitting between the two qubit-like eigenstates."""
    w, vecs = _diagonalize(one_excitation_hamiltonian(g1, g2, delta_r, qubit2_offset))
    res = int(np.argmax(np.abs(vecs[:, RESONATOR_INDEX]) ** 2))
    q = sorted(w[i] for i in range(3) if i != res)
    return float(q[1] - q[0])


def dressed_gap(g1, g2, delta_r):
    """
    Minimum exact qubit-like splitting over the bare detuning of DQD_2, i.e.
    2J measured where the dressed qubit frequencies cross.  Returns
    (gap, offset at the minimum).
    """
    if delta_r == 0:
        raise ZeroDivisionError("delta_r = 0")
    gc2 = g1 * g1 + g2 * g2
    centre = (g2 * g2 - g1 * g1) / delta_r
    half = 2.0 * gc2 / abs(delta_r) + 1.0
    res = minimize_scalar(
        lambda eps: qubit_like_splitting(g1, g2, delta_r, eps),
        bounds=(centre - half, centre + half),
        method="bounded",
        options={"xatol": 1e-10 * max(1.0, abs(delta_r))},
    )
    return float(res.fun), float(res.x)


def dark_state_fixed_frequency_check(g1, g2, delta_rs, validity_ratio=8.0, tolerance=0.01):
    """
    Track the exact qubit-like branches over resonator detunings.

    The dark branch should stay at zero energy while the bright branch follows
    -g_c^2/Delta and loses resonator amplitude as 1/Delta.  Constancy is
    judged only over Delta >= validity_ratio * max(g).
    """
    delta_rs = [float(d) for d in delta_rs]
    if any(d == 0 for d in delta_rs):
        raise ZeroDivisionError("delta_r values must be nonzero")
    gc2 = g1 * g1 + g2 * g2
    rows = []
    for d in delta_rs:
        rep = dispersive_eigensystem(g1, g2, d)
        ex = rep.exact
        rows.append({
            "delta_r_MHz": d,
            "dark_energy_MHz": ex.energy("dark"),
            "bright_energy_MHz": ex.energy("bright"),
            "bright_perturbative_MHz": -gc2 / d,
            "bright_resonator_amplitude": math.sqrt(ex.resonator_weight[ex.labels.index("bright")]),
            "dark_resonator_amplitude": math.sqrt(ex.resonator_weight[ex.labels.index("dark")]),
        })
    valid = [r for r in rows if abs(r["delta_r_MHz"]) >= validity_ratio * max(g1, g2)]
    variation = 0.0
    reference = 0.0
    if valid:
        darks = [r["dark_energy_MHz"] for r in valid]
        variation = max(darks) - min(darks)
        reference = gc2 / min(abs(r["delta_r_MHz"]) for r in valid)
    dark_constant = variation <= tolerance * reference if reference > 0 else True
    return {
        "g1_MHz": float(g1),
        "g2_MHz": float(g2),
        "rows": rows,
        "valid_points": len(valid),
        "dark_energy_variation_MHz": float(variation),
        "dark_constant": bool(dark_constant),
    }


# -- transition frequencies of a full configuration ---------------------------

def one_excitation_frequencies(config):
    """
    Absolute single-excitation transition frequencies (MHz, ascending) of the
    RWA Hamiltonian for an arbitrary configuration.
    """
    n = 1 + config.num_qubits
    h = np.zeros((n, n))
    h[0, 0] = config.resonator.omega_r
    for k, (dqd, g) in enumerate(zip(config.dqds, config.couplings)):
        s, _ = mixing_angle(dqd)
        h[k + 1, k + 1] = qubit_frequency(dqd)
        h[0, k + 1] = h[k + 1, 0] = g * s
    return np.linalg.eigvalsh(h)
