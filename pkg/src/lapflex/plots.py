"""Figure rendering for sweep tables, validation reports and traces.

Everything renders off-screen and writes an image file next to the
delimited output; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .validation import ValidationReport

__all__ = ["render_sweep", "render_validation", "render_trace"]


def render_sweep(rows, path: str) -> None:
    """Opening angle, tip width and force ratio against slider travel."""
    sliders = [r[0] for r in rows]
    theta = [r[4] for r in rows]
    width = [r[5] for r in rows]
    ratio = [r[6] for r in rows]
    fig, (ax1, ax3) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.plot(sliders, theta, color="tab:blue", label="total angle")
    ax1.set_ylabel("total jaw angle [deg]", color="tab:blue")
    ax2 = ax1.twinx()
    ax2.plot(sliders, width, color="tab:orange", label="tip width")
    ax2.set_ylabel("tip width [mm]", color="tab:orange")
    ax1.grid(True, alpha=0.3)
    ax3.plot(sliders, ratio, color="tab:green")
    ax3.set_ylabel("tip force / input force")
    ax3.set_xlabel("slider displacement [mm]")
    ax3.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_validation(report: ValidationReport, path: str) -> None:
    """Model curve with measured points and the error at each point."""
    fig, (ax, axe) = plt.subplots(
        2, 1, figsize=(7, 7), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]})
    curve_x = [p[0] for p in report.curve]
    curve_y = [p[1] for p in report.curve]
    ax.plot(curve_x, curve_y, color="tab:blue", label="model")
    refs = [p[0] for p in report.pairs]
    ax.scatter(report.sliders, refs, color="tab:red", zorder=3, s=24,
               label=f"{report.source.value} references")
    ax.set_ylabel("total jaw angle [deg]")
    ax.legend()
    ax.grid(True, alpha=0.3)
    ax.set_title(f"MAE {report.mae:.3f} deg, max {report.max_err:.3f} deg, "
                 f"{len(report.errors)} points ({len(report.excluded)} excluded)")
    axe.stem(report.sliders, report.errors, basefmt=" ")
    axe.set_ylabel("abs error [deg]")
    axe.set_xlabel("slider displacement [mm]")
    axe.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_trace(records, path: str, dt: float) -> None:
    """Joint estimates and commands over a recorded run, mode shading on top."""
    t = [r.tick * dt for r in records]
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    axq, axc, axm = axes
    axq.plot(t, [r.estimated.q1 for r in records], label="q1 bend [deg]")
    axq.plot(t, [r.estimated.q2 for r in records], label="q2 head [deg]")
    axq.plot(t, [r.estimated.q4 for r in records], label="q4 shaft [deg]")
    axq2 = axq.twinx()
    axq2.plot(t, [r.estimated.q3 for r in records], color="tab:red",
              label="q3 slider [mm]")
    axq2.set_ylabel("q3 [mm]", color="tab:red")
    axq.set_ylabel("angles [deg]")
    axq.legend(loc="upper left")
    axq.grid(True, alpha=0.3)
    axc.plot(t, [r.command.q1dot for r in records], label="q1dot [deg/s]")
    axc.plot(t, [r.command.q2dot for r in records], label="q2dot [deg/s]")
    axc.plot(t, [r.command.q3dot for r in records], label="q3dot [mm/s]")
    axc.plot(t, [r.command.q4dot for r in records], label="q4dot [deg/s]")
    axc.set_ylabel("commands")
    axc.legend(loc="upper left", ncol=2)
    axc.grid(True, alpha=0.3)
    modes = sorted({r.mode for r in records})
    lookup = {m: i for i, m in enumerate(modes)}
    axm.step(t, [lookup[r.mode] for r in records], where="post")
    axm.set_yticks(range(len(modes)), modes)
    axm.set_ylabel("mode")
    axm.set_xlabel("time [s]")
    axm.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
