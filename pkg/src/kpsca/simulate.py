"""Parametric generator of synthetic scalar-multiplication power traces.

Every sample of slot j, cycle i is

    base[s] + A_i * g(bit_j, prev_j) * w[s] + a_j * u[s] + N(0, noise_sigma)

where ``A_i`` is the per-cycle leakage amplitude (zero outside the configured
leaky cycles), ``g`` maps the processed bit and its predecessor to one of up
to four levels (two when ``pair_dependence`` is zero), ``a_j`` is a
key-independent per-slot offset of magnitude ``address_noise_amp`` with a
pseudo-random sign, and ``w``/``u`` are fixed in-cycle shape windows placed
on disjoint sample ranges. The slot offset ``a_j`` models bus-address
sequencing countermeasures: it is coherent across all cycles of a slot, so
it dominates whole-trace clustering long before it can mask the level
separation inside a single leaky cycle.

All randomness comes from PCG64 generators derived from the configured
seeds, so a (key, model) pair yields a bit-identical trace every time.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .trace import RawTrace, SecretKey, TraceGeometry

PRESET_NAMES = ("design1_like", "design3_like")

# Shared preset ingredients: six leaky cycles, moderate leakage amplitude,
# light measurement noise. design3_like adds slot-address noise tuned so its
# compressed-domain variance beats the leakage variance by this factor.
_PRESET_GEOMETRY = TraceGeometry(l=230, D=54, S=625)
_PRESET_LEAKY_CYCLES = (5, 13, 21, 29, 37, 45)
_PRESET_LEAK_AMP = 0.25
_PRESET_NOISE = 0.05
_ADDRESS_VARIANCE_FACTOR = 5.0


def default_waveform(S: int) -> np.ndarray:
    """Positive per-cycle current template (offset sine)."""
    s = np.arange(S)
    return 1.0 + 0.25 * np.sin(2.0 * np.pi * (s + 0.5) / S)


def leak_shape(S: int) -> np.ndarray:
    """Unit window over the first quarter of the cycle (switching edge)."""
    w = np.zeros(S)
    w[: max(1, S // 4)] = 1.0
    return w


def address_shape(S: int) -> np.ndarray:
    """Unit window over the third quarter of the cycle, disjoint from
    ``leak_shape`` for S >= 2."""
    u = np.zeros(S)
    u[S // 2 : S // 2 + max(1, S // 4)] = 1.0
    return u


@dataclass(frozen=True, eq=False)
class LeakModel:
    geometry: TraceGeometry
    leaky_cycles: dict[int, float] = field(default_factory=dict)
    pair_dependence: float = 0.0
    noise_sigma: float = 0.0
    address_noise_amp: float = 0.0
    seed: int = 0
    base_waveform: np.ndarray | None = None  # None -> default_waveform

    def __post_init__(self):
        D = self.geometry.D
        for cycle, amp in self.leaky_cycles.items():
            if not 1 <= int(cycle) <= D:
                raise ValueError(f"leaky cycle {cycle} outside 1..{D}")
            if amp < 0:
                raise ValueError("leakage amplitudes must be >= 0")
        if not 0.0 <= self.pair_dependence <= 1.0:
            raise ValueError("pair_dependence must lie in [0, 1]")
        if self.noise_sigma < 0 or self.address_noise_amp < 0:
            raise ValueError("noise amplitudes must be >= 0")
        if self.base_waveform is not None:
            wf = np.ascontiguousarray(self.base_waveform, dtype=np.float64)
            if wf.shape != (self.geometry.S,):
                raise ValueError("base_waveform length must equal S")
            object.__setattr__(self, "base_waveform", wf)

    def waveform(self) -> np.ndarray:
        if self.base_waveform is not None:
            return self.base_waveform
        return default_waveform(self.geometry.S)


@dataclass(frozen=True, eq=False)
class SimulatedTrace:
    trace: RawTrace
    truth: SecretKey
    model_echo: dict


def gen_key(seed: int, bit_length: int) -> SecretKey:
    """Uniformly random scalar; the analyzed window skips the two MSBs."""
    if bit_length < 3:
        raise ValueError("bit_length must be >= 3")
    rng = np.random.Generator(np.random.PCG64(seed))
    bits = rng.integers(0, 2, size=bit_length, dtype=np.uint8)
    return SecretKey(bits, (2, bit_length - 2))


def _bit_pair_levels(key: SecretKey, pair_dependence: float) -> np.ndarray:
    """Leakage level per slot from (processed bit, previously processed bit)."""
    start, length = key.analyzed_window
    if start < 1:
        raise ValueError(
            "analyzed window must leave at least one more-significant bit "
            "as the first slot's predecessor"
        )
    current = key.analyzed_bits.astype(np.float64)
    prev = np.empty(length)
    prev[0] = key.bits[start - 1]
    prev[1:] = current[:-1]
    return current + pair_dependence * 0.5 * (prev - 0.5)


def simulate_trace(key: SecretKey, model: LeakModel) -> SimulatedTrace:
    """Generate one deterministic trace for (key, model)."""
    g = model.geometry
    if key.analyzed_window[1] != g.l:
        raise ValueError(
            f"key window length {key.analyzed_window[1]} != geometry l={g.l}"
        )
    base = model.waveform()
    w = leak_shape(g.S)
    u = address_shape(g.S)
    amps = np.zeros(g.D)
    for cycle, amp in model.leaky_cycles.items():
        amps[int(cycle) - 1] = amp
    levels = _bit_pair_levels(key, model.pair_dependence)

    addr_seq, noise_seq = np.random.SeedSequence(model.seed).spawn(2)
    addr_rng = np.random.Generator(np.random.PCG64(addr_seq))
    signs = addr_rng.integers(0, 2, size=g.l).astype(np.float64) * 2.0 - 1.0
    offsets = model.address_noise_amp * signs

    cube = (
        base[None, None, :]
        + levels[:, None, None] * amps[None, :, None] * w[None, None, :]
        + offsets[:, None, None] * u[None, None, :]
    )
    if model.noise_sigma > 0:
        noise_rng = np.random.Generator(np.random.PCG64(noise_seq))
        cube = cube + noise_rng.normal(0.0, model.noise_sigma, size=cube.shape)

    metadata = {
        "key_hex": key.to_hex(),
        "key_bits": key.bit_length,
        "description": "synthetic scalar-multiplication trace",
    }
    trace = RawTrace(g, np.ascontiguousarray(cube.reshape(-1)), metadata)
    return SimulatedTrace(trace, key, model_to_json(model))


def _tuned_address_amp(geometry: TraceGeometry, leak_amp: float, n_leaky: int) -> float:
    # Make the slot-offset variance, summed over all D compressed cycles,
    # exceed the summed leakage variance by _ADDRESS_VARIANCE_FACTOR while the
    # per-cycle offset stays below half the leakage gap (so single leaky
    # cycles still separate cleanly).
    base = default_waveform(geometry.S)
    w = leak_shape(geometry.S)
    u = address_shape(geometry.S)
    gap = 2.0 * leak_amp * float(base @ w) + leak_amp * leak_amp * float(w @ w)
    beta = gap * np.sqrt(_ADDRESS_VARIANCE_FACTOR * n_leaky / (4.0 * geometry.D))
    return beta / (2.0 * float(base @ u))


def preset(name: str, seed: int = 0) -> LeakModel:
    """Built-in leakage regimes at the reference geometry (230/54/625).

    ``design1_like``: clean key-dependent leakage in six cycles, the level
    additionally split by the previously processed bit (four clusters).
    ``design3_like``: same leaky cycles plus slot-address noise strong enough
    to dominate whole-trace clustering.
    """
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    leaky = {c: _PRESET_LEAK_AMP for c in _PRESET_LEAKY_CYCLES}
    if name == "design1_like":
        return LeakModel(
            geometry=_PRESET_GEOMETRY,
            leaky_cycles=leaky,
            pair_dependence=0.5,
            noise_sigma=_PRESET_NOISE,
            address_noise_amp=0.0,
            seed=seed,
        )
    return LeakModel(
        geometry=_PRESET_GEOMETRY,
        leaky_cycles=leaky,
        pair_dependence=0.0,
        noise_sigma=_PRESET_NOISE,
        address_noise_amp=_tuned_address_amp(
            _PRESET_GEOMETRY, _PRESET_LEAK_AMP, len(_PRESET_LEAKY_CYCLES)
        ),
        seed=seed,
    )


def with_seed(model: LeakModel, seed: int) -> LeakModel:
    return replace(model, seed=seed)


def model_to_json(model: LeakModel) -> dict:
    g = model.geometry
    return {
        "geometry": {"l": g.l, "D": g.D, "S": g.S},
        "leaky_cycles": {str(c): float(a) for c, a in sorted(model.leaky_cycles.items())},
        "pair_dependence": float(model.pair_dependence),
        "noise_sigma": float(model.noise_sigma),
        "address_noise_amp": float(model.address_noise_amp),
        "seed": int(model.seed),
        "base_waveform": None
        if model.base_waveform is None
        else [float(v) for v in model.base_waveform],
    }


def model_from_json(obj) -> LeakModel:
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    g = obj["geometry"]
    wf = obj.get("base_waveform")
    return LeakModel(
        geometry=TraceGeometry(int(g["l"]), int(g["D"]), int(g["S"])),
        leaky_cycles={int(c): float(a) for c, a in obj.get("leaky_cycles", {}).items()},
        pair_dependence=float(obj.get("pair_dependence", 0.0)),
        noise_sigma=float(obj.get("noise_sigma", 0.0)),
        address_noise_amp=float(obj.get("address_noise_amp", 0.0)),
        seed=int(obj.get("seed", 0)),
        base_waveform=None if wf is None else np.asarray(wf, dtype=np.float64),
    )
