"""Figure builders: one matplotlib Figure per kind, written as <kind>.png.

Axis conventions: log-y for loss curves and the gradient-vs-dimension
figure, log-log for the statistical-rate figure, overridable from the
command line.  Reference slopes (-1/2 for loss, -1/4 for the statistical
rate) are anchored at the first plotted point; fitted lines are drawn only
from fits already present in the summary JSON.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import (
    SchemaError,
    read_grad_vs_d_csv,
    read_stat_csv,
    read_trajectory_csv,
    split_inputs,
)

FIGURE_KINDS = ("converge", "weights", "bad-init", "stat-rate")


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: figure kind, input files, output directory."""

    kind: str
    inputs: list = field(default_factory=list)
    out_dir: str = "figures"
    logy: bool | None = None  # None = per-kind default

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def _yscale(ax, spec: PlotSpec, default_log: bool):
    log = default_log if spec.logy is None else spec.logy
    ax.set_yscale("log" if log else "linear")


def _reference_line(ax, xs, ys, slope, label):
    """Power-law guide of the given slope anchored at the first point."""
    anchor = next(
        ((x, y) for x, y in zip(xs, ys) if x > 0 and y > 0), None
    )
    if anchor is None:
        return
    x0, y0 = anchor
    ref_x = [x for x in xs if x > 0]
    ref_y = [y0 * (x / x0) ** slope for x in ref_x]
    ax.plot(ref_x, ref_y, "r--", linewidth=1, label=label)


def _figure_converge(spec: PlotSpec):
    csvs, _ = split_inputs(spec.inputs)
    fig, ax = plt.subplots(figsize=(6, 4))
    first = None
    k = 0
    for path in csvs:
        for block in read_trajectory_csv(path):
            ax.plot(block["step"], block["loss"], label=f"trajectory {k}")
            first = first or block
            k += 1
    _reference_line(ax, first["step"], first["loss"], -0.5, "slope -1/2")
    _yscale(ax, spec, default_log=True)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.set_title("Loss along gradient EM")
    ax.legend(fontsize=7)
    return fig


def _figure_weights(spec: PlotSpec):
    csvs, summaries = split_inputs(spec.inputs)
    configs = None
    repeats = None
    for s in summaries:
        if "configs" in s:
            configs = s["configs"]
            repeats = s.get("repeats")
    fig, ax = plt.subplots(figsize=(6, 4))
    blocks = [b for path in csvs for b in read_trajectory_csv(path)]
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for k, block in enumerate(blocks):
        label = f"trajectory {k}"
        color = None
        if configs and repeats and len(blocks) == len(configs) * repeats:
            ci = k // repeats
            color = cycle[ci % len(cycle)]
            weights = ", ".join(f"{w:.2g}" for w in configs[ci])
            label = f"weights ({weights})" if k % repeats == 0 else None
        ax.plot(block["step"], block["loss"], color=color, alpha=0.8, label=label)
    _yscale(ax, spec, default_log=True)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.set_title("Weight configurations")
    ax.legend(fontsize=7)
    return fig


def _figure_bad_init(spec: PlotSpec):
    csvs, summaries = split_inputs(spec.inputs)
    grad_paths = [p for p in csvs]
    data = None
    errors = []
    for path in grad_paths:
        try:
            data = read_grad_vs_d_csv(path)
            break
        except SchemaError as exc:
            errors.append(exc)
    if data is None:
        raise errors[0] if errors else SchemaError("no gradient-vs-d CSV given")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(
        data["d"], data["grad_norm"], yerr=data["grad_norm_se"],
        fmt="o", capsize=3, label="measured",
    )
    for s in summaries:
        fit = s.get("grad_vs_d")
        if fit:
            line = [
                math.exp(fit["intercept"] + fit["slope"] * d) for d in data["d"]
            ]
            ax.plot(
                data["d"], line, "r-",
                label=f"fit, slope {fit['slope']:.2f}",
            )
    _yscale(ax, spec, default_log=True)
    ax.set_xlabel("dimension d")
    ax.set_ylabel("gradient norm")
    ax.set_title("Gradient norm at the bad initialization")
    ax.legend(fontsize=8)
    return fig


def _figure_stat_rate(spec: PlotSpec):
    csvs, _ = split_inputs(spec.inputs)
    data = read_stat_csv(csvs[0])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(
        data["sample_size"], data["mean_param_error"],
        yerr=data["std_param_error"], fmt="o-", capsize=3, label="measured",
    )
    _reference_line(
        ax, data["sample_size"], data["mean_param_error"], -0.25, "slope -1/4"
    )
    ax.set_xscale("log")
    _yscale(ax, spec, default_log=True)
    ax.set_xlabel("sample size")
    ax.set_ylabel("parametric error")
    ax.set_title("Statistical error vs sample size")
    ax.legend(fontsize=8)
    return fig


_BUILDERS = {
    "converge": _figure_converge,
    "weights": _figure_weights,
    "bad-init": _figure_bad_init,
    "stat-rate": _figure_stat_rate,
}


def build_figure(spec: PlotSpec):
    """Build the matplotlib Figure for the spec without touching disk."""
    return _BUILDERS[spec.kind](spec)


def render(spec: PlotSpec) -> Path:
    """Render the figure and write ``<kind>.png`` into the output directory."""
    fig = build_figure(spec)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / f"{spec.kind}.png"
    fig.savefig(target, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return target
