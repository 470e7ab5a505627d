"""FNV-1a 64-bit hashing; the determinism backbone for all mock outputs."""

from __future__ import annotations

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1


def fnv1a64(text: str) -> int:
    """FNV-1a over the UTF-8 bytes of `text`, 64-bit wrapping."""
    h = FNV_OFFSET_BASIS
    for b in text.encode("utf-8"):
        h = ((h ^ b) * FNV_PRIME) & _MASK64
    return h


def hash_color(text: str) -> tuple[int, int, int]:
    """Derived color: bytes 0-2 of the big-endian representation of the hash."""
    h = fnv1a64(text)
    return ((h >> 56) & 0xFF, (h >> 48) & 0xFF, (h >> 40) & 0xFF)


def hash_hex(text: str) -> str:
    return f"{fnv1a64(text):016x}"
