"""Link state, fading models, and reproducible random streams.

Randomness is drawn from counter-based Philox streams keyed by
``(seed, stream_id)`` so that independent tasks can own disjoint streams
and a run is reproducible regardless of how work is scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroChannelError

# Recorded in experiment manifests; bump if the generator ever changes.
RNG_ALGORITHM = "numpy.random.Philox4x64 + Generator"

_CHANNEL_KINDS = ("rayleigh_unit_power", "static")


@dataclass(frozen=True)
class LinkState:
    """Instantaneous physical link: channel power gain |h|^2 and noise variance."""

    gain_sq: float
    noise_var: float

    def __post_init__(self):
        if not self.gain_sq >= 0.0 or not np.isfinite(self.gain_sq):
            raise ValueError(f"gain_sq must be finite and >= 0, got {self.gain_sq!r}")
        if not self.noise_var > 0.0 or not np.isfinite(self.noise_var):
            raise ValueError(f"noise_var must be finite and > 0, got {self.noise_var!r}")


@dataclass(frozen=True)
class ChannelModel:
    """Fading law for |h|^2 draws.

    rayleigh_unit_power: |h|^2 ~ Exponential(mean 1)
    static:              |h|^2 fixed at static_gain_sq
    """

    kind: str
    static_gain_sq: float | None = None

    def __post_init__(self):
        if self.kind not in _CHANNEL_KINDS:
            raise ValueError(f"kind must be one of {_CHANNEL_KINDS}, got {self.kind!r}")
        if self.kind == "static":
            if self.static_gain_sq is None:
                raise ValueError("static channel requires static_gain_sq")
            if not self.static_gain_sq >= 0.0 or not np.isfinite(self.static_gain_sq):
                raise ValueError(f"static_gain_sq must be finite and >= 0, got {self.static_gain_sq!r}")
        elif self.static_gain_sq is not None:
            raise ValueError("static_gain_sq only applies to the static kind")


def make_stream(seed: int, stream_id: int) -> np.random.Generator:
    """Independent reproducible random stream for (seed, stream_id).

    Streams with distinct ids never overlap, which lets parallel tasks
    draw independently while the overall run stays deterministic.
    """
    for name, value in (("seed", seed), ("stream_id", stream_id)):
        if not isinstance(value, (int, np.integer)) or value < 0 or value >= 2**64:
            raise ValueError(f"{name} must be an integer in [0, 2^64), got {value!r}")
    key = np.array([seed, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_gain(model: ChannelModel, stream: np.random.Generator, size=None):
    """Draw |h|^2 from the fading law (scalar for size=None, else ndarray)."""
    if model.kind == "rayleigh_unit_power":
        draws = stream.standard_exponential(size=size)
        return float(draws) if size is None else draws
    if size is None:
        return model.static_gain_sq
    return np.full(size, model.static_gain_sq, dtype=float)


def snr(power: float, link: LinkState):
    """Receive SNR p * |h|^2 / sigma^2 for transmit power p (scalar or array)."""
    p = np.asarray(power, dtype=float)
    if not np.all(p >= 0.0):
        raise ValueError("power must be nonnegative")
    value = p * link.gain_sq / link.noise_var
    if np.ndim(power) == 0:
        return float(value)
    return value


def require_nonzero_gain(link: LinkState) -> None:
    """Reject links with zero gain, which would need infinite power."""
    if link.gain_sq == 0.0:
        raise ZeroChannelError("channel gain_sq is zero; no finite power reaches any SNR")
