"""Static plots of estimate reports; each figure is written next to its CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _eps_of(r) -> float | None:
    par = r.parameters or {}
    for key in ("outer_eps", "eps"):
        if key in par:
            return float(par[key])
    plan = par.get("plan")
    if isinstance(plan, dict) and "delta" in plan:
        return float(plan["delta"])
    return None


def emit_plots(reports, outdir, prefix: str = "") -> list[Path]:
    """Write accuracy-vs-eps and (if present) ratio-vs-p plots with their data.

    Reports without a truth value are drawn as bound bands only.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to plot")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    acc = [r for r in reports if r.estimator not in ("exact", "advantage")]
    if acc:
        rows = []
        for i, r in enumerate(acc):
            eps = _eps_of(r)
            rows.append((r.estimator, i if eps is None else eps, r.error, r.claimed_bound))
        path = outdir / f"{prefix}accuracy.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["estimator", "eps", "error", "bound"])
            w.writerows([(e, repr(x), "" if err is None else repr(err), repr(b)) for e, x, err, b in rows])
        written.append(path)
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for est in sorted({row[0] for row in rows}):
            pts = sorted(row for row in rows if row[0] == est)
            xs = [row[1] for row in pts]
            ax.plot(xs, [row[3] for row in pts], "--", label=f"{est} bound")
            errs = [(row[1], row[2]) for row in pts if row[2] is not None]
            if errs:
                ax.plot(*zip(*errs), "o", label=f"{est} |error|")
        ax.set_xlabel("eps")
        ax.set_ylabel("absolute error")
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(outdir / f"{prefix}accuracy.png", dpi=100)
        plt.close(fig)
        written.append(outdir / f"{prefix}accuracy.png")

    adv = [r for r in reports if r.estimator == "advantage"]
    if adv:
        pts = sorted((float(r.parameters["p"]), r.value, r.parameters.get("sqrt_d_ratio")) for r in adv)
        path = outdir / f"{prefix}ratio.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["p", "ratio", "sqrt_d_ratio"])
            w.writerows([(repr(p), repr(v), repr(s)) for p, v, s in pts])
        written.append(path)
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.semilogy([q[0] for q in pts], [q[1] for q in pts], "o-", label="||A||^p / (d max|A_ij|)^p")
        ax.semilogy([q[0] for q in pts], [q[2] for q in pts], "--", label="d^(-p/2)")
        ax.set_xlabel("p")
        ax.set_ylabel("quantum / classical bound")
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(outdir / f"{prefix}ratio.png", dpi=100)
        plt.close(fig)
        written.append(outdir / f"{prefix}ratio.png")
    return written
