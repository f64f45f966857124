"""Render kinkstab CSV outputs as raster figures.

Three figure kinds, matched to the producing subcommand's schema:

* ``spectrum-scatter``  <- ``block-spectrum`` CSV (re,im): points in the
  complex plane with symmetric axes.
* ``scan-curves``       <- ``criterion-scan`` CSV: the three lowest
  eigenvalues versus R and the product lambda1 * F_R(0) with horizontal
  reference lines at 1/2 and 1/4.
* ``eigenfunction-panels`` <- ``spectrum`` CSV (z,x,v1,v2,v3): the first
  three eigenfunctions against x.

Rendering is deterministic: fixed figure geometry, no timestamps, pinned
PNG metadata, so re-running overwrites byte-identically.
"""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureJob", "render", "main"]

_SCHEMAS = {
    "spectrum-scatter": ["re", "im"],
    "scan-curves": ["R", "z_R", "lambda1", "lambda2", "lambda3", "F0", "product"],
    "eigenfunction-panels": ["z", "x", "v1", "v2", "v3"],
}

_PNG_METADATA = {"Software": "kinkfigs"}


class SchemaError(ValueError):
    pass


class FigureJob:
    """One rendering task: input CSV, output image, figure kind."""

    def __init__(self, kind: str, csv_path: str, out_path: str):
        if kind not in _SCHEMAS:
            raise SchemaError(f"unknown figure kind {kind!r}; have {sorted(_SCHEMAS)}")
        self.kind = kind
        self.csv_path = csv_path
        self.out_path = out_path


def _load(job: FigureJob) -> dict[str, np.ndarray]:
    expected = _SCHEMAS[job.kind]
    with open(job.csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{job.csv_path}: empty file, expected header {','.join(expected)}")
        if header != expected:
            raise SchemaError(
                f"{job.csv_path}: header {','.join(header)!r} does not match "
                f"the {job.kind} schema {','.join(expected)!r}"
            )
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise SchemaError(f"{job.csv_path}: no data rows")
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(expected)}


def _fig(width=6.4, height=4.0):
    return plt.figure(figsize=(width, height), dpi=144)


def _render_spectrum_scatter(cols):
    fig = _fig(5.0, 5.0)
    ax = fig.add_subplot(111)
    ax.plot(cols["re"], cols["im"], ".", markersize=3, color="tab:blue")
    lim_re = max(1.0, float(np.abs(cols["re"]).max()) * 1.1)
    lim_im = float(np.abs(cols["im"]).max()) * 1.05
    ax.set_xlim(-lim_re, lim_re)
    ax.set_ylim(-lim_im, lim_im)
    ax.axvline(0.0, color="0.8", linewidth=0.8, zorder=0)
    ax.axhline(0.0, color="0.8", linewidth=0.8, zorder=0)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.set_title("Spectrum of the linearized flow")
    return fig


def _render_scan_curves(cols):
    fig = _fig(9.0, 4.0)
    ax1 = fig.add_subplot(121)
    ax1.plot(cols["R"], cols["lambda1"], "o-", markersize=3, label=r"$\lambda_1$")
    ax1.plot(cols["R"], cols["lambda2"], "s-", markersize=3, label=r"$\lambda_2$")
    ax1.plot(cols["R"], cols["lambda3"], "^-", markersize=3, label=r"$\lambda_3$")
    ax1.axhline(0.0, color="0.8", linewidth=0.8, zorder=0)
    ax1.set_xlabel("R")
    ax1.set_ylabel(r"$\lambda$")
    ax1.set_title("Lowest three eigenvalues")
    ax1.legend(loc="center right")
    ax2 = fig.add_subplot(122)
    ax2.plot(cols["R"], cols["product"], "o-", markersize=3, color="tab:red")
    ax2.axhline(0.5, color="0.5", linestyle="--", linewidth=1.0, label="1/2")
    ax2.axhline(0.25, color="0.5", linestyle=":", linewidth=1.0, label="1/4")
    ax2.set_xlabel("R")
    ax2.set_ylabel(r"$\lambda_1\, F_R(0)$")
    ax2.set_title("Criterion product")
    ax2.legend(loc="center right")
    fig.tight_layout()
    return fig


def _render_eigenfunction_panels(cols):
    finite = np.isfinite(cols["x"])
    fig = _fig(9.0, 3.2)
    for i, name in enumerate(("v1", "v2", "v3"), start=1):
        ax = fig.add_subplot(1, 3, i)
        ax.plot(cols["x"][finite], cols[name][finite], linewidth=0.9)
        ax.set_xlabel("x")
        ax.set_title(name)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "spectrum-scatter": _render_spectrum_scatter,
    "scan-curves": _render_scan_curves,
    "eigenfunction-panels": _render_eigenfunction_panels,
}


def render(job: FigureJob) -> str:
    """Render the job; returns the output path. No file is written on error."""
    cols = _load(job)
    fig = _RENDERERS[job.kind](cols)
    try:
        fig.savefig(job.out_path, format="png", metadata=_PNG_METADATA)
    finally:
        plt.close(fig)
    return job.out_path


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(
        prog="render_figure", description="Render a kinkstab CSV as a PNG figure"
    )
    ap.add_argument("kind", choices=sorted(_SCHEMAS))
    ap.add_argument("csv_path")
    ap.add_argument("out_path")
    args = ap.parse_args(argv)
    try:
        render(FigureJob(args.kind, args.csv_path, args.out_path))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)
    sys.exit(0)
