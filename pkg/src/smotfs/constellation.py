"""Unit-energy Q-ary alphabets with Gray bit labeling.

The alphabet is stored as an array indexed by the integer value of the
label bits (MSB first): ``points[v]`` is the symbol whose label is the
L2-bit binary expansion of ``v``.  Gray labeling is baked into that
ordering so neighbouring symbols differ in one label bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidSymbolError

_MATCH_TOL = 1e-9


def _gray_pam(n_bits: int) -> np.ndarray:
    """Amplitude levels of a 2**n_bits PAM axis, indexed by label value.

    Level u (left to right: -(2^b - 1), ..., 2^b - 1 in steps of 2) gets
    the Gray codeword u ^ (u >> 1) as its label.
    """
    n = 1 << n_bits
    levels = np.arange(n) * 2.0 - (n - 1)
    out = np.empty(n)
    for u in range(n):
        out[u ^ (u >> 1)] = levels[u]
    return out


@dataclass(frozen=True)
class Constellation:
    """Normalized alphabet plus its bit labeling.

    points[v] is the symbol labeled by the bits of v, MSB first.
    """

    points: np.ndarray
    kind: str = "qam"
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.complex128)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        energy = float(np.mean(np.abs(pts) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ConfigurationError(f"average symbol energy {energy!r} is not 1")
        if len(set(pts.tolist())) != pts.size:
            raise ConfigurationError("labeling is not a bijection: duplicate points")
        object.__setattr__(
            self, "_index", {complex(a): v for v, a in enumerate(pts.tolist())}
        )

    @property
    def order(self) -> int:
        return int(self.points.size)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    def label_of(self, symbol: complex) -> int:
        """Integer label of an alphabet member; rejects foreign symbols."""
        v = self._index.get(complex(symbol))
        if v is not None:
            return v
        # tolerate tiny representation drift from serialization round trips
        dist = np.abs(self.points - symbol)
        v = int(np.argmin(dist))
        if dist[v] > _MATCH_TOL:
            raise InvalidSymbolError(f"{symbol!r} is not in the alphabet")
        return v


def make_constellation(q: int, kind: str = "qam") -> Constellation:
    """Build a Gray-labeled unit-energy alphabet of order q.

    kind="qam": rectangular QAM; the label splits into ceil(L2/2) in-phase
    and floor(L2/2) quadrature bits, each axis Gray coded.  Degenerates to
    BPSK for q=2 and the usual square QAM for q=4, 16, 64.
    kind="psk": points exp(j*2*pi*u/q) with a Gray-coded phase index.
    """
    if q < 2 or (q & (q - 1)) != 0:
        raise ConfigurationError(f"constellation order must be a power of two >= 2, got {q}")
    n_bits = q.bit_length() - 1
    if kind == "qam":
        bits_i = (n_bits + 1) // 2
        bits_q = n_bits // 2
        axis_i = _gray_pam(bits_i)
        if bits_q == 0:
            pts = axis_i.astype(np.complex128)
        else:
            axis_q = _gray_pam(bits_q)
            # label = (I bits, Q bits); I selects the slow axis
            pts = (axis_i[:, None] + 1j * axis_q[None, :]).reshape(-1)
        pts = pts / np.sqrt(np.mean(np.abs(pts) ** 2))
    elif kind == "psk":
        pts = np.empty(q, dtype=np.complex128)
        for u in range(q):
            pts[u ^ (u >> 1)] = np.exp(2j * np.pi * u / q)
    else:
        raise ConfigurationError(f"unknown constellation kind {kind!r}")
    return Constellation(points=pts, kind=kind)
