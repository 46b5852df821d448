"""Offline figures: a rendered PNG plus a standalone script that redraws it from the CSV."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ._util import loglog_fit

SCRIPT = '''\
"""Redraw {name}.png from {name}.csv (needs numpy and matplotlib)."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
with open(here / "{name}.csv", newline="") as fh:
    rows = list(csv.DictReader(fh))
x = np.array([float(r["grid"]) for r in rows])
y = np.array([float(r["value"]) for r in rows])
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.plot(x, y, "o-", label="measured")
if {fit!r} and np.all(y > 0):
    slope, icept = np.polyfit(np.log(x), np.log(y), 1)
    ax.plot(x, np.exp(icept) * x**slope, "--", label=f"fit, slope {{slope:.3f}}")
    ref = {ref!r}
    if ref is not None:
        ax.plot(x, y[0] * (x / x[0]) ** ref, ":", label=f"predicted slope {{ref:g}}")
overlay = {overlay!r}
if overlay:
    ax.plot(x, overlay["y"], "-.", label=overlay["label"])
ax.set_xscale({xscale!r})
ax.set_yscale({yscale!r})
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
ax.set_title({title!r})
ax.legend()
fig.tight_layout()
fig.savefig(here / "{name}.png", dpi=120)
'''


def _scales(spec: dict, y: np.ndarray) -> tuple[str, str]:
    y = np.asarray(y, dtype=float)
    logx = spec.get("logx", True)
    logy = spec.get("logy", True) and bool(np.all(y > 0))
    return ("log" if logx else "linear"), ("log" if logy else "linear")


def write_plot_script(path: Path, name: str, spec: dict, y: np.ndarray) -> Path:
    xscale, yscale = _scales(spec, y)
    path.write_text(SCRIPT.format(
        name=name, fit=bool(spec.get("fit")), overlay=spec.get("overlay"),
        ref=spec.get("reference_slope"), xscale=xscale, yscale=yscale,
        xlabel=spec.get("xlabel", "grid"), ylabel=spec.get("ylabel", "value"),
        title=spec.get("title", name)))
    return path


def render_png(path: Path, rows, spec: dict) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x = np.array([r[0] for r in rows], dtype=float)
    y = np.array([r[1] for r in rows], dtype=float)
    xscale, yscale = _scales(spec, y)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(x, y, "o-", label="measured")
    if spec.get("fit") and yscale == "log":
        fit = loglog_fit(x, y)
        ax.plot(x, np.exp(fit.intercept) * x**fit.slope, "--", label=f"fit, slope {fit.slope:.3f}")
        ref = spec.get("reference_slope")
        if ref is not None:
            # reference line pinned to the first measured point
            ax.plot(x, y[0] * (x / x[0]) ** ref, ":", label=f"predicted slope {ref:g}")
    overlay = spec.get("overlay")
    if overlay:
        ax.plot(x, overlay["y"], "-.", label=overlay["label"])
    ax.set_xscale(xscale)
    ax.set_yscale(yscale)
    ax.set_xlabel(spec.get("xlabel", "grid"))
    ax.set_ylabel(spec.get("ylabel", "value"))
    ax.set_title(spec.get("title", ""))
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
