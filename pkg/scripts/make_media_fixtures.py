#!/usr/bin/env python3
"""Regenerate the tiny deterministic media blobs under exercises/media/.

These are stand-ins served during tests (the server treats media as
opaque bytes); they carry plausible magic numbers but no real audio or
video payload.  Deterministic so the repo never churns.
"""

from __future__ import annotations

from pathlib import Path

MEDIA_DIR = Path(__file__).resolve().parent.parent / "exercises" / "media"


def pattern(seed: int, size: int) -> bytes:
    return bytes((seed * 31 + i * 7) % 256 for i in range(size))


def main() -> None:
    MEDIA_DIR.mkdir(parents=True, exist_ok=True)
    files = {
        # minimal mp4: ftyp box header + filler
        "count-up-intro.mp4": b"\x00\x00\x00\x18ftypisom" + pattern(1, 2048),
        # mp3-ish: ID3 header + filler
        "count-up-line1.mp3": b"ID3\x03\x00\x00\x00\x00\x00\x00" + pattern(2, 512),
        "count-up-line2.mp3": b"ID3\x03\x00\x00\x00\x00\x00\x00" + pattern(3, 512),
        "count-up-line3.mp3": b"ID3\x03\x00\x00\x00\x00\x00\x00" + pattern(4, 512),
    }
    for name, blob in files.items():
        path = MEDIA_DIR / name
        path.write_bytes(blob)
        print(f"wrote {path} ({len(blob)} bytes)")


if __name__ == "__main__":
    main()
