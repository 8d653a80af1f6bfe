"""Boundary traces of pi0 and of a localized peak, for plotting downstream.

    python scripts/peak_trace.py --delta 0.05 --arc 0.2 --out-dir traces/

Produces ``rhombus_trace.csv`` (k, theta, re, im of pi0 on the circle) and
``peak_trace.csv`` (theta, |u|, re u, im u) on a grid refined near the peak.
"""

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sphereiso.algebra import write_grid_csv
from sphereiso.conformal import boundary_image, build_rhombus_map
from sphereiso.peaking import Arc, localized_peak


@dataclass
class TraceConfig:
    nodes: int = 2048
    delta: float = 0.05
    arc: float = 0.2
    angle: float = 0.0


def run(cfg: TraceConfig, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    cmap = build_rhombus_map()
    theta, img = boundary_image(cmap, cfg.nodes)
    write_grid_csv(out_dir / "rhombus_trace.csv", theta, img)

    u = localized_peak(np.exp(1j * cfg.angle), Arc.around(cfg.angle, cfg.arc), cfg.delta, cmap)
    near = cfg.angle + np.concatenate([-np.logspace(0, -12, 200), np.logspace(-12, 0, 200)])
    t = np.sort(np.concatenate([np.linspace(-np.pi, np.pi, cfg.nodes), near]))
    vals = u(t)
    with open(out_dir / "peak_trace.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "abs", "re", "im"])
        for a, v in zip(t, vals):
            w.writerow([f"{a:.17g}", f"{abs(v):.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
    return u.certificate.to_json()


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=2048)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--arc", type=float, default=0.2)
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--out-dir", default="traces")
    a = p.parse_args(argv)
    cert = run(TraceConfig(a.nodes, a.delta, a.arc, a.angle), Path(a.out_dir))
    print(cert)


if __name__ == "__main__":
    main()
