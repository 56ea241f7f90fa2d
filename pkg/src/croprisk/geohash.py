"""Geohash encoding/decoding and the neighborhood/region grid.

Neighborhoods are 4-character geohash cells and regions are their 3-character
prefixes; both are identified purely by string code. All functions are pure
and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

BASE32 = "0123456789bcdefghjkmnpqrstuvwxyz"
_CHARMAP = {c: i for i, c in enumerate(BASE32)}
_BIT_MASKS = (16, 8, 4, 2, 1)

NEIGHBORHOOD_PRECISION = 4
REGION_PRECISION = 3


@dataclass(frozen=True)
class Bounds:
    """Bounding box of a geohash cell (half-open in each axis)."""

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    @property
    def center(self) -> tuple[float, float]:
        return ((self.lat_min + self.lat_max) / 2, (self.lon_min + self.lon_max) / 2)

    def contains(self, lat: float, lon: float) -> bool:
        return self.lat_min <= lat < self.lat_max and self.lon_min <= lon < self.lon_max


def validate_code(code: str) -> str:
    """Check alphabet and length, returning the lowercased code."""
    if not isinstance(code, str) or not code:
        raise DomainError("geohash code must be a nonempty string")
    code = code.lower()
    if len(code) > 12:
        raise DomainError(f"geohash precision {len(code)} exceeds 12")
    for ch in code:
        if ch not in _CHARMAP:
            raise DomainError(f"invalid geohash character {ch!r} in {code!r}")
    return code


def encode(lat: float, lon: float, precision: int = NEIGHBORHOOD_PRECISION) -> str:
    """Encode a coordinate into a geohash of the requested precision."""
    if not -90.0 <= lat <= 90.0:
        raise DomainError(f"latitude {lat} outside [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise DomainError(f"longitude {lon} outside [-180, 180]")
    if not 1 <= precision <= 12:
        raise DomainError(f"precision {precision} outside 1..12")

    lat_lo, lat_hi = -90.0, 90.0
    lon_lo, lon_hi = -180.0, 180.0
    chars: list[str] = []
    digit = 0
    bit = 0
    even = True  # longitude first
    while len(chars) < precision:
        if even:
            mid = (lon_lo + lon_hi) / 2
            if lon >= mid:
                digit |= _BIT_MASKS[bit]
                lon_lo = mid
            else:
                lon_hi = mid
        else:
            mid = (lat_lo + lat_hi) / 2
            if lat >= mid:
                digit |= _BIT_MASKS[bit]
                lat_lo = mid
            else:
                lat_hi = mid
        even = not even
        if bit < 4:
            bit += 1
        else:
            chars.append(BASE32[digit])
            digit = 0
            bit = 0
    return "".join(chars)


def decode_bounds(code: str) -> Bounds:
    """Return the bounding box of a geohash cell."""
    code = validate_code(code)
    lat_lo, lat_hi = -90.0, 90.0
    lon_lo, lon_hi = -180.0, 180.0
    even = True
    for ch in code:
        digit = _CHARMAP[ch]
        for mask in _BIT_MASKS:
            if even:
                mid = (lon_lo + lon_hi) / 2
                if digit & mask:
                    lon_lo = mid
                else:
                    lon_hi = mid
            else:
                mid = (lat_lo + lat_hi) / 2
                if digit & mask:
                    lat_lo = mid
                else:
                    lat_hi = mid
            even = not even
    return Bounds(lat_lo, lat_hi, lon_lo, lon_hi)


def center(code: str) -> tuple[float, float]:
    """Center coordinate of a geohash cell."""
    return decode_bounds(code).center


def region_of(code: str) -> str:
    """3-character region prefix of a geohash with precision >= 3."""
    code = validate_code(code)
    if len(code) < REGION_PRECISION:
        raise DomainError(f"precision {len(code)} < {REGION_PRECISION}; cannot derive region")
    return code[:REGION_PRECISION]


def code_to_int(code: str) -> int:
    """Stable integer identity of a geohash code (used to derive RNG substreams)."""
    code = validate_code(code)
    value = 0
    for ch in code:
        value = value * 32 + _CHARMAP[ch]
    return value
