"""End-to-end check: the renderer consumes real harness outputs.

Small-scale runs of every experiment kind are produced through the
primary package's command line (the only interface this package may rely
on), then each figure kind is rendered.  Prints a single
``criterion 10: PASS/FAIL`` line.
"""

import json
import subprocess
import sys

import pytest

from gradem_plots.cli import main as render_main


def run_gradem(subcommand, out_dir, config=None, extra=()):
    cmd = [sys.executable, "-m", "gradem", subcommand, "--out", str(out_dir)]
    if config is not None:
        cmd += ["--config", str(config)]
    cmd += list(extra)
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_dir


@pytest.fixture(scope="module")
def harness_outputs(tmp_path_factory):
    base = tmp_path_factory.mktemp("harness")

    cfg = base / "small.json"
    cfg.write_text(json.dumps({"d": 2, "n": 3, "steps": 30, "samples": 2000,
                               "seed": 5, "log_every": 5}))
    run_gradem("converge", base / "converge", config=cfg)
    run_gradem("weights", base / "weights", config=cfg)

    bad_cfg = base / "bad.json"
    bad_cfg.write_text(json.dumps({
        "n": 3, "samples": 2000, "seed": 5, "log_every": 5,
        "d_grid": [2, 3, 4], "bad_init_traj_d": 3, "bad_init_traj_steps": 20,
    }))
    run_gradem("bad-init", base / "badinit", config=bad_cfg)

    stat_cfg = base / "stat.json"
    stat_cfg.write_text(json.dumps({
        "d": 2, "n": 2, "samples": 2000, "seed": 5,
        "stat_sizes": [200, 800], "stat_runs": 2, "stat_max_steps": 200,
    }))
    run_gradem("stat-rate", base / "statrate", config=stat_cfg)
    return base


def test_criterion_10_all_figure_kinds_render(harness_outputs, tmp_path, capsys):
    base = harness_outputs
    figs = tmp_path / "figs"
    jobs = [
        ("converge", [base / "converge" / "converge.csv"]),
        ("weights", [base / "weights" / "weights.csv",
                     base / "weights" / "weights_summary.json"]),
        ("bad-init", [base / "badinit" / "bad_init_grad.csv",
                      base / "badinit" / "bad_init_summary.json"]),
        ("stat-rate", [base / "statrate" / "stat_rate.csv"]),
    ]
    ok = True
    for kind, inputs in jobs:
        code = render_main(
            ["--kind", kind, "--in", *map(str, inputs), "--out", str(figs)]
        )
        if code != 0 or not (figs / f"{kind}.png").exists():
            ok = False
    # The quarter-slope reference must be present on the stat-rate figure.
    from gradem_plots import PlotSpec, build_figure

    fig = build_figure(
        PlotSpec("stat-rate", [str(base / "statrate" / "stat_rate.csv")])
    )
    labels = [l.get_label() for l in fig.axes[0].get_lines()]
    if "slope -1/4" not in labels:
        ok = False
    with capsys.disabled():
        print(f"criterion 10: {'PASS' if ok else 'FAIL'}", flush=True)
    assert ok
