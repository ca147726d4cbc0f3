"""
Physical parameters of the resonator + DQD system and the operators built from them.

All frequencies and rates are plain frequencies nu = omega / 2pi in MHz.
Every formula used here is homogeneous of degree one in frequency, so the
angular-frequency expressions carry over without conversion factors.
"""
import json
import math
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError, UnsupportedCombinationError
from .operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    HilbertLayout,
    dag,
    embed,
    fock_destroy,
    pauli,
)

EXPLICIT_RATES = "explicit-rates"
DERIVED_FROM_SPECTRUM = "derived-from-spectrum"


@dataclass(frozen=True)
class NoiseSpectrum:
    """White-noise environment of one DQD: C(0) and C(omega_k)."""

    c0: float
    c_omega: float
    mode: str = DERIVED_FROM_SPECTRUM

    def __post_init__(self):
        if self.mode not in (EXPLICIT_RATES, DERIVED_FROM_SPECTRUM):
            raise ConfigError("noise.mode", f"unknown mode {self.mode!r}")
        if self.c0 < 0:
            raise ConfigError("noise.c0", "must be >= 0")
        if self.c_omega < 0:
            raise ConfigError("noise.c_omega", "must be >= 0")


@dataclass(frozen=True)
class DqdParams:
    delta: float
    t: float
    gamma1: float = 0.0
    gamma_phi: float = 0.0
    noise: Optional[NoiseSpectrum] = None

    def __post_init__(self):
        if not self.t > 0:
            raise ConfigError("t", "tunnel coupling must be > 0")
        if self.gamma1 < 0:
            raise ConfigError("gamma1", "must be >= 0")
        if self.gamma_phi < 0:
            raise ConfigError("gamma_phi", "must be >= 0")

    @property
    def two_t(self):
        return 2.0 * self.t

    @property
    def frequency(self):
        return qubit_frequency(self)

    @property
    def gamma2(self):
        """Total linewidth gamma1/2 + gamma_phi of the effective rates."""
        g1, gphi = effective_rates(self)
        return g1 / 2.0 + gphi


@dataclass(frozen=True)
class ResonatorParams:
    omega_r: float
    kappa_int: float
    kappa_ext: float

    def __post_init__(self):
        if self.kappa_int < 0:
            raise ConfigError("kappa_int", "must be >= 0")
        if not self.kappa_ext > 0:
            raise ConfigError("kappa_ext", "must be > 0")

    @property
    def kappa_tot(self):
        return self.kappa_int + self.kappa_ext


@dataclass(frozen=True)
class ProbeParams:
    omega_p: float = 0.0
    alpha: complex = 0.1


@dataclass(frozen=True)
class SystemConfig:
    resonator: ResonatorParams
    dqds: tuple = ()
    couplings: tuple = ()
    probe: ProbeParams = field(default_factory=ProbeParams)
    layout: Optional[HilbertLayout] = None
    rwa: bool = True

    def __post_init__(self):
        object.__setattr__(self, "dqds", tuple(self.dqds))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))
        if self.layout is None:
            object.__setattr__(self, "layout", HilbertLayout(5, len(self.dqds)))
        if len(self.dqds) > 2:
            raise ConfigError("dqds", f"at most 2 DQDs are supported, got {len(self.dqds)}")
        if len(self.couplings) != len(self.dqds):
            raise ConfigError(
                "couplings", f"length {len(self.couplings)} does not match {len(self.dqds)} dqds"
            )
        for k, g in enumerate(self.couplings):
            if g < 0:
                raise ConfigError(f"couplings[{k}]", "must be >= 0")
        if self.layout.num_qubits != len(self.dqds):
            raise ConfigError(
                "layout.num_qubits",
                f"{self.layout.num_qubits} does not match {len(self.dqds)} dqds",
            )

    @property
    def num_qubits(self):
        return len(self.dqds)


# -- single-DQD relations ---------------------------------------------------

def qubit_frequency(dqd):
    """Transition frequency sqrt(4 t^2 + delta^2) of a DQD charge qubit."""
    return math.hypot(2.0 * dqd.t, dqd.delta)


def mixing_angle(dqd):
    """Return (sin theta, cos theta) with tan theta = 2t / delta."""
    nu = qubit_frequency(dqd)
    return 2.0 * dqd.t / nu, dqd.delta / nu


def decay_rates(dqd, noise):
    """
    Relaxation and pure-dephasing rates from a white-noise spectral function.

    gamma1 = sin^2(theta) C(omega_k), gamma_phi = cos^2(theta) C(0).  In
    explicit-rates mode the DQD's stored rates are returned unchanged.
    """
    if noise is None or noise.mode == EXPLICIT_RATES:
        return dqd.gamma1, dqd.gamma_phi
    s, c = mixing_angle(dqd)
    return s * s * noise.c_omega, c * c * noise.c0


def effective_rates(dqd):
    return decay_rates(dqd, dqd.noise)


# -- operators ----------------------------------------------------------------

class Channel(NamedTuple):
    name: str
    op: np.ndarray
    monitored: bool = False


def _local_ops(layout):
    a = embed(fock_destroy(layout.fock_cutoff), 0, layout)
    sz = [embed(pauli("z"), k + 1, layout) for k in range(layout.num_qubits)]
    sm = [embed(SIGMA_MINUS, k + 1, layout) for k in range(layout.num_qubits)]
    sp = [embed(SIGMA_PLUS, k + 1, layout) for k in range(layout.num_qubits)]
    return a, sz, sm, sp


def excitation_operator(layout):
    """a^dag a - 1/2 sum_k sigma_z^(k): the generator of the rotating frame."""
    a, sz, _, _ = _local_ops(layout)
    out = dag(a) @ a
    for z in sz:
        out = out - 0.5 * z
    return out


def probe_hamiltonian(config):
    """H_P = (1/2i) sqrt(kappa_ext) (alpha a^dag - alpha^* a)."""
    a = embed(fock_destroy(config.layout.fock_cutoff), 0, config.layout)
    alpha = complex(config.probe.alpha)
    return (math.sqrt(config.resonator.kappa_ext) / 2j) * (alpha * dag(a) - alpha.conjugate() * a)


def build_hamiltonian(config):
    """
    System Hamiltonian in MHz.

    With ``rwa`` the Tavis-Cummings form in the frame rotating at the probe
    frequency, including the probe term.  Without it the lab-frame
    Hamiltonian with the full dipole coupling; that form has no probe term.
    """
    layout = config.layout
    a, sz, sm, sp = _local_ops(layout)
    ad = dag(a)
    num = ad @ a
    if not config.rwa:
        if abs(complex(config.probe.alpha)) > 0:
            raise UnsupportedCombinationError(
                "rwa=false is only defined without a probe (alpha must be 0)"
            )
        H = config.resonator.omega_r * num
        x = ad + a
        for k, (dqd, g) in enumerate(zip(config.dqds, config.couplings)):
            s, c = mixing_angle(dqd)
            sx = embed(pauli("x"), k + 1, layout)
            H = H - 0.5 * qubit_frequency(dqd) * sz[k] + g * (s * sx + c * sz[k]) @ x
        return H

    nu_p = config.probe.omega_p
    H = (config.resonator.omega_r - nu_p) * num
    for k, (dqd, g) in enumerate(zip(config.dqds, config.couplings)):
        s, _ = mixing_angle(dqd)
        H = H - 0.5 * (qubit_frequency(dqd) - nu_p) * sz[k]
        H = H + g * s * (sm[k] @ ad + sp[k] @ a)
    return H + probe_hamiltonian(config)


def scattering_operator(config):
    """L = sqrt(kappa_ext) a + alpha * 1, the monitored output channel."""
    layout = config.layout
    a = embed(fock_destroy(layout.fock_cutoff), 0, layout)
    return math.sqrt(config.resonator.kappa_ext) * a + complex(config.probe.alpha) * np.eye(layout.dim)


def build_collapse_ops(config):
    """
    Dissipative channels: relaxation, pure dephasing (prefactor sqrt(gamma_phi/2)),
    internal resonator loss, and the monitored scattering channel L last.
    Zero-rate channels are omitted; L is always present.
    """
    layout = config.layout
    a, sz, sm, _ = _local_ops(layout)
    out = []
    for k, dqd in enumerate(config.dqds):
        g1, gphi = effective_rates(dqd)
        if g1 > 0:
            out.append(Channel(f"relax[{k}]", math.sqrt(g1) * sm[k]))
        if gphi > 0:
            out.append(Channel(f"dephase[{k}]", math.sqrt(gphi / 2.0) * sz[k]))
    if config.resonator.kappa_int > 0:
        out.append(Channel("kappa_int", math.sqrt(config.resonator.kappa_int) * a))
    out.append(Channel("L", scattering_operator(config), monitored=True))
    return out


# -- parameter paths ----------------------------------------------------------

_TOKEN = re.compile(r"^(?P<name>[a-z_][a-z0-9_]*)(\[(?P<idx>\d+)\])?$")

_SCALAR_FIELDS = {
    "resonator": ("omega_r", "kappa_int", "kappa_ext"),
    "probe": ("omega_p", "alpha"),
    "layout": ("fock_cutoff",),
}
_DQD_FIELDS = ("delta", "t", "gamma1", "gamma_phi", "two_t", "gamma2")


def _parse_path(path):
    parts = path.split(".")
    tokens = []
    for part in parts:
        m = _TOKEN.match(part.strip())
        if m is None:
            raise ConfigError(path, "malformed parameter path")
        idx = m.group("idx")
        tokens.append((m.group("name"), None if idx is None else int(idx)))
    return tokens


def _resolve(config, path):
    tokens = _parse_path(path)
    head, idx = tokens[0]
    if head == "couplings" and len(tokens) == 1 and idx is not None:
        if idx >= len(config.couplings):
            raise ConfigError(path, "coupling index out of range")
        return ("coupling", idx, None)
    if head == "dqds" and idx is not None and len(tokens) == 2 and tokens[1][1] is None:
        if idx >= len(config.dqds):
            raise ConfigError(path, "dqd index out of range")
        name = tokens[1][0]
        if name not in _DQD_FIELDS:
            raise ConfigError(path, f"unknown DQD field {name!r}")
        return ("dqd", idx, name)
    if head in _SCALAR_FIELDS and idx is None and len(tokens) == 2 and tokens[1][1] is None:
        name = tokens[1][0]
        if name not in _SCALAR_FIELDS[head]:
            raise ConfigError(path, f"unknown {head} field {name!r}")
        return (head, None, name)
    raise ConfigError(path, "path does not address a scalar parameter")


def get_param(config, path):
    """Read one scalar addressed by a path such as ``dqds[0].delta``."""
    kind, idx, name = _resolve(config, path)
    if kind == "coupling":
        return config.couplings[idx]
    if kind == "dqd":
        return getattr(config.dqds[idx], name)
    return getattr(getattr(config, kind), name)


def set_param(config, path, value):
    """
    Return a copy of ``config`` with one scalar replaced.

    ``dqds[k].two_t`` sets t = value / 2; ``dqds[k].gamma2`` sets
    gamma1 = 2 (value - gamma_phi), keeping pure dephasing fixed.
    """
    kind, idx, name = _resolve(config, path)
    if kind == "coupling":
        couplings = list(config.couplings)
        couplings[idx] = float(value)
        return replace(config, couplings=tuple(couplings))
    if kind == "dqd":
        dqd = config.dqds[idx]
        try:
            if name == "two_t":
                dqd = replace(dqd, t=float(value) / 2.0)
            elif name == "gamma2":
                dqd = replace(dqd, gamma1=2.0 * (float(value) - dqd.gamma_phi))
            else:
                dqd = replace(dqd, **{name: float(value)})
        except ConfigError as exc:
            raise ConfigError(path, str(exc)) from None
        dqds = list(config.dqds)
        dqds[idx] = dqd
        return replace(config, dqds=tuple(dqds))
    if kind == "layout":
        return replace(config, layout=HilbertLayout(int(value), config.layout.num_qubits))
    sub = getattr(config, kind)
    try:
        value = complex(value) if name == "alpha" else float(value)
        sub = replace(sub, **{name: value})
    except ConfigError as exc:
        raise ConfigError(path, str(exc)) from None
    return replace(config, **{kind: sub})


def with_overrides(config, overrides):
    for path, value in (overrides or {}).items():
        config = set_param(config, path, value)
    return config


# -- JSON serialization -------------------------------------------------------

def _encode_complex(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _decode_complex(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    raise ConfigError(where, "expected a number or a [re, im] pair")


def config_to_dict(config):
    dqds = []
    for dqd in config.dqds:
        d = {"delta": dqd.delta, "t": dqd.t, "gamma1": dqd.gamma1, "gamma_phi": dqd.gamma_phi}
        if dqd.noise is not None:
            d["noise"] = asdict(dqd.noise)
        dqds.append(d)
    return {
        "resonator": asdict(config.resonator),
        "dqds": dqds,
        "couplings": list(config.couplings),
        "probe": {"omega_p": config.probe.omega_p, "alpha": _encode_complex(config.probe.alpha)},
        "layout": {"fock_cutoff": config.layout.fock_cutoff, "num_qubits": config.layout.num_qubits},
        "rwa": config.rwa,
    }


def _number(obj, key, where, default=None):
    if key not in obj:
        if default is None:
            raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}" if where else key, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key}" if where else key, "must be finite")
    return float(value)


def _prefixed(where, fn):
    try:
        return fn()
    except ConfigError as exc:
        if exc.field.startswith(where):
            raise
        raise ConfigError(f"{where}.{exc.field}", str(exc).split(": ", 1)[1]) from None


def config_from_dict(data):
    """Build and validate a SystemConfig from its JSON representation."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    known = {"resonator", "dqds", "couplings", "probe", "layout", "rwa"}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown field")
    if "resonator" not in data or not isinstance(data["resonator"], dict):
        raise ConfigError("resonator", "missing or not an object")
    r = data["resonator"]
    resonator = _prefixed("resonator", lambda: ResonatorParams(
        omega_r=_number(r, "omega_r", ""),
        kappa_int=_number(r, "kappa_int", ""),
        kappa_ext=_number(r, "kappa_ext", ""),
    ))

    dqds = []
    raw_dqds = data.get("dqds", [])
    if not isinstance(raw_dqds, list):
        raise ConfigError("dqds", "expected a list")
    for k, d in enumerate(raw_dqds):
        where = f"dqds[{k}]"
        if not isinstance(d, dict):
            raise ConfigError(where, "expected an object")
        noise = None
        if "noise" in d:
            n = d["noise"]
            noise = _prefixed(f"{where}.noise", lambda: NoiseSpectrum(
                c0=_number(n, "c0", ""),
                c_omega=_number(n, "c_omega", ""),
                mode=n.get("mode", DERIVED_FROM_SPECTRUM),
            ))
        dqds.append(_prefixed(where, lambda: DqdParams(
            delta=_number(d, "delta", ""),
            t=_number(d, "t", ""),
            gamma1=_number(d, "gamma1", "", 0.0),
            gamma_phi=_number(d, "gamma_phi", "", 0.0),
            noise=noise,
        )))

    couplings = data.get("couplings", [])
    if not isinstance(couplings, list):
        raise ConfigError("couplings", "expected a list")
    for k, g in enumerate(couplings):
        if isinstance(g, bool) or not isinstance(g, (int, float)):
            raise ConfigError(f"couplings[{k}]", f"expected a number, got {g!r}")

    p = data.get("probe", {})
    probe = ProbeParams(
        omega_p=_number(p, "omega_p", "probe", 0.0),
        alpha=_decode_complex(p.get("alpha", 0.1), "probe.alpha"),
    )
    lay = data.get("layout", {})
    try:
        layout = HilbertLayout(
            int(lay.get("fock_cutoff", 5)), int(lay.get("num_qubits", len(dqds)))
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError("layout", str(exc)) from None
    rwa = data.get("rwa", True)
    if not isinstance(rwa, bool):
        raise ConfigError("rwa", "expected true or false")
    return SystemConfig(
        resonator=resonator, dqds=dqds, couplings=couplings, probe=probe, layout=layout, rwa=rwa
    )


def load_config(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON at line {exc.lineno} column {exc.colno}") from None
    return config_from_dict(data)


def save_config(config, path):
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
