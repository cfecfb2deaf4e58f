"""Stage manifests: inputs, outputs, content hashes, seed, timings."""

from __future__ import annotations

import hashlib
from pathlib import Path

from .jsonio import write_json


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir: str | Path, stage: str, *,
                   inputs: dict[str, str | Path],
                   outputs: list[str | Path],
                   seed: int, timings: dict[str, float],
                   deterministic: bool) -> Path:
    """Write <stage>.manifest.json next to the stage artifacts.

    Output paths are stored relative to the output directory. In
    deterministic mode timings are zeroed so reruns are byte-identical.
    """
    out_dir = Path(out_dir)
    manifest = {
        "stage": stage,
        "seed": seed,
        "deterministic": deterministic,
        "inputs": {name: {"path": str(path), "sha256": file_sha256(path)}
                   for name, path in sorted(inputs.items())},
        "outputs": {str(Path(path).relative_to(out_dir)): file_sha256(path)
                    for path in sorted(outputs, key=str)},
        "timings_s": ({name: 0.0 for name in timings} if deterministic
                      else {name: round(t, 6) for name, t in timings.items()}),
    }
    return write_json(out_dir / f"{stage}.manifest.json", manifest)
