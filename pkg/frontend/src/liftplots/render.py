"""Render lift CSVs.

The input contract is the CSV written by the lifting engine: exactly the
header ``tau,l,z,a`` followed by float rows.  Two figure kinds are supported:

- ``relation``: the lifting function z plotted against the plane arc length l
- ``lifted3d``: the lifted circle reconstructed as (cos tau, sin tau, z)

Rendering is deterministic for a fixed input and style settings.
"""

from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = ("relation", "lifted3d")
HEADER = "tau,l,z,a"


class PlotError(ValueError):
    """Malformed input, empty data, or unknown figure kind."""


@dataclass(frozen=True)
class PlotJob:
    input_csv: str
    kind: str
    output_png: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; "
                            f"expected one of {', '.join(KINDS)}")


def read_lift_csv(path: str) -> dict[str, np.ndarray]:
    """Parse a lift CSV, enforcing the exact header and nonempty data."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != HEADER:
            raise PlotError(f"expected header {HEADER!r}, got {header!r}")
        rows = [line for line in fh if line.strip()]
    if not rows:
        raise PlotError("CSV contains no data rows")
    try:
        data = np.loadtxt(rows, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise PlotError(f"malformed CSV row: {exc}") from exc
    if data.shape[1] != 4:
        raise PlotError(f"expected 4 columns, got {data.shape[1]}")
    return dict(zip(HEADER.split(","), data.T))


def _render_relation(cols, ax):
    ax.plot(cols["l"], cols["z"], color="tab:blue", linewidth=1.5)
    ax.set_xlabel("plane curve length l")
    ax.set_ylabel("lifting function z")
    ax.set_title("z versus l along the lift")
    ax.grid(True, alpha=0.3)


def _render_lifted3d(cols, ax):
    tau, z = cols["tau"], cols["z"]
    ax.plot(np.cos(tau), np.sin(tau), z, color="tab:blue", linewidth=1.5)
    ax.plot(np.cos(tau), np.sin(tau), np.zeros_like(tau),
            color="tab:gray", linewidth=0.8, linestyle="--")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_title("lifted unit circle")


def render(kind: str, input_csv: str, output_png: str) -> None:
    """Render one figure; raises PlotError before creating the output file."""
    job = PlotJob(input_csv, kind, output_png)
    cols = read_lift_csv(job.input_csv)
    fig = plt.figure(figsize=(6.4, 4.8), dpi=120)
    try:
        if job.kind == "relation":
            _render_relation(cols, fig.add_subplot(111))
        else:
            _render_lifted3d(cols, fig.add_subplot(111, projection="3d"))
        fig.savefig(job.output_png, format="png",
                    metadata={"Software": None})  # keep output byte-stable
    finally:
        plt.close(fig)
