"""Quick check of the compiled extension.

Build and install it first, e.g. `pip install ./crates/python` or
`maturin develop -m crates/python/Cargo.toml`.
"""

import json
import math
import sys
import tempfile
from pathlib import Path

import spinchain_py as sc


def check(name, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return ok


def main():
    results = []

    ring = sc.ChainSpec(8, "closed", delta=0.5)
    levels = sorted(sc.spectrum(ring))
    band = sorted(math.cos(2 * math.pi * k / 8) for k in range(8))
    results.append(check("ideal ring has a cosine band",
                         max(abs(a - b) for a, b in zip(levels, band)) < 1e-12))

    spec = sc.ChainSpec(6, "open", delta=10, g=20, n0=3)
    roots = sc.roots(spec)
    localized = [r for r in roots if r.classification == "localized"]
    exact = sorted(sc.spectrum(spec))
    results.append(check("open chain roots reproduce the spectrum",
                         max(min(abs(r.energy - e) for e in exact) for r in roots) < 1e-9))
    results.append(check("three localized roots at strong defect", len(localized) == 3))

    pair = sc.ChainSpec(30, "closed", delta=20, g=10, n0=15)
    labels = [label for _, label in sc.band_assignment(pair)]
    results.append(check("defect-bound pairs fill their band", labels.count("LDP") == 27))

    leak_bp, leak_ldp, _ = sc.antiresonance(10.0)
    results.append(check("resonant pair dissociates", leak_bp < 0.01 and leak_ldp > 0.5))

    exp = sc.run_figure("Fig5LocLength")
    with tempfile.TemporaryDirectory() as tmp:
        csv_path, json_path = exp.write(Path(tmp))
        meta = json.loads(Path(json_path).read_text())
        results.append(check("figure writes csv and sidecar",
                             Path(csv_path).exists() and meta["records"] == len(exp)))

    try:
        sc.ChainSpec(4, "periodic")
        results.append(check("bad boundary is rejected", False))
    except ValueError:
        results.append(check("bad boundary is rejected", True))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
