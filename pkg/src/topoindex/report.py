"""Figure rendering for scenario runs: every scenario gets at least one
matplotlib figure next to its CSV tables, built from the same row data."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import RunResult, ScenarioConfig

__all__ = ["render"]


def _save(fig, outdir, name, figures):
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    figures.append(name)


def _render_phase_diagram(result, outdir, figures):
    rows = result.rows
    fig, ax = plt.subplots(figsize=(6, 4))
    Ws = sorted({r["W"] for r in rows})
    for W in Ws:
        pts = [(r["a"], r["value"], r["reliable"]) for r in rows if r["W"] == W]
        a = [p[0] for p in pts]
        v = [p[1] for p in pts]
        ax.plot(a, v, "o-", label=f"W = {W:g}")
        bad = [(x, y) for x, y, ok in pts if not ok]
        if bad:
            ax.plot(*zip(*bad), "rx", markersize=10, label="_unreliable")
    ax.set_xlabel("mass parameter a")
    ax.set_ylabel("index value")
    ax.set_title(f"phase diagram ({rows[0]['flavor']})" if rows else "phase diagram")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, outdir, "phase_diagram.png", figures)


def _render_fermi_sweep(result, outdir, figures):
    rows = result.rows
    fig, ax = plt.subplots(figsize=(6, 4))
    for seed in sorted({r["seed"] for r in rows}):
        pts = [(r["mu"], r["value"]) for r in rows if r["seed"] == seed]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label=f"seed {seed}")
    ax.set_xlabel("Fermi energy mu")
    ax.set_ylabel("index value")
    ax.set_title("index constancy across the mobility gap")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, outdir, "fermi_sweep.png", figures)


def _render_bec(result, outdir, figures):
    rows = result.rows
    fig, ax = plt.subplots(figsize=(6, 4))
    seeds = [r["seed"] for r in rows]
    x = np.arange(len(seeds))
    ax.bar(x - 0.17, [r["bulk_value"] for r in rows], width=0.34, label="bulk")
    ax.bar(x + 0.17, [r["edge_value"] for r in rows], width=0.34, label="edge")
    ax.plot(x + 0.17, [r["edge_raw"] for r in rows], "k.", label="edge raw")
    ax.set_xticks(x, [str(s) for s in seeds])
    ax.set_xlabel("seed")
    ax.set_ylabel("index value")
    ax.set_title("bulk-edge correspondence")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, outdir, "bec.png", figures)


def _render_kitaev(result, outdir, figures):
    rows = result.rows
    fig, ax = plt.subplots(figsize=(5, 5))
    b = [r["bulk_raw"] for r in rows]
    k = [r["kitaev_raw"] for r in rows]
    lim = max(1.5, max(np.abs(b + k)) * 1.2) if rows else 1.5
    ax.plot([-lim, lim], [-lim, lim], "k--", alpha=0.5)
    ax.plot(b, k, "o")
    ax.set_xlabel("flux-insertion raw value")
    ax.set_ylabel("half-space winding raw value")
    ax.set_title("flux vs half-space index")
    ax.grid(alpha=0.3)
    _save(fig, outdir, "kitaev_check.png", figures)
    if rows and rows[0]["stage0"] != "":
        fig, ax = plt.subplots(figsize=(6, 4))
        for r in rows:
            vals = [r[f"stage{i}"] for i in range(5)]
            ax.plot(range(5), vals, "o-", label=f"W={r['W']:g}, seed {r['seed']}")
        ax.set_xlabel("deformation stage")
        ax.set_ylabel("index value")
        ax.set_title("flux-to-half-space deformation stages")
        ax.set_xticks(range(5))
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        _save(fig, outdir, "homotopy_stages.png", figures)


def _render_locality(result, outdir, figures):
    rows = result.rows
    fig, ax = plt.subplots(figsize=(6, 4))
    L = [r["L"] for r in rows]
    s3 = [r["schatten3_commutator"] for r in rows]
    ax.loglog(L, s3, "o-", label="Schatten-3 of [P, U]")
    if len(L) >= 2:
        ref = s3[0] * np.array(L, dtype=float) / L[0]
        ax.loglog(L, ref, "k--", alpha=0.5, label="linear growth reference")
    ax.set_xlabel("system size L")
    ax.set_ylabel("norm")
    ax.set_title("commutator Schatten-3 growth")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    _save(fig, outdir, "locality_schatten.png", figures)
    envelopes = result.extras.get("envelopes", {})
    if envelopes:
        fig, ax = plt.subplots(figsize=(6, 4))
        for L, env in sorted(envelopes.items()):
            keep = env.max_norms > 0
            ax.semilogy(env.distances[keep], env.max_norms[keep], ".-", label=f"L = {L}")
        ax.set_xlabel("distance")
        ax.set_ylabel("sup block norm")
        ax.set_title("Fermi projection off-diagonal envelope")
        ax.legend()
        ax.grid(alpha=0.3)
        _save(fig, outdir, "locality_envelopes.png", figures)


def _render_sule(result, outdir, figures):
    comp = result.extras.get("compactness")
    if comp is not None and comp.singular_values.size:
        fig, ax = plt.subplots(figsize=(6, 4))
        s = comp.singular_values
        ax.semilogy(np.arange(1, s.size + 1), s / s[0], "o-", markersize=3)
        ax.axhline(0.1, color="r", linestyle="--", alpha=0.6, label="10% of s1")
        ax.set_xlabel("k")
        ax.set_ylabel("s_k / s_1")
        ax.set_title("(U - V)Q singular value profile")
        ax.legend()
        ax.grid(alpha=0.3)
        _save(fig, outdir, "sule_singular_values.png", figures)
    slopes = [r["envelope_slope"] for r in result.rows]
    if slopes:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(slopes, bins=20)
        ax.axvline(0.0, color="r", linestyle="--")
        ax.set_xlabel("fitted envelope slope")
        ax.set_ylabel("vectors")
        ax.set_title("per-vector localization slopes")
        ax.grid(alpha=0.3)
        _save(fig, outdir, "sule_slopes.png", figures)


def _render_homotopy(result, outdir, figures):
    rows = result.rows
    fig, ax = plt.subplots(figsize=(6, 4))
    N = [r["N"] for r in rows]
    d = [r["sup_distance"] for r in rows]
    ax.semilogy(N, d, "o-")
    ax.axhline(0.25, color="r", linestyle="--", label="target 1/4")
    n_min = result.summary.get("minimal_N")
    if n_min:
        ax.axvline(n_min, color="g", linestyle=":", label=f"minimal N = {n_min}")
    ax.set_xlabel("polynomial degree N")
    ax.set_ylabel("sup distance to exp(-2 pi i a) on [0, 1]")
    ax.set_title("flat exponential approximation")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, outdir, "homotopy_poly.png", figures)


_RENDERERS = {
    "phase-diagram": _render_phase_diagram,
    "fermi-sweep": _render_fermi_sweep,
    "bec": _render_bec,
    "kitaev-check": _render_kitaev,
    "locality": _render_locality,
    "sule": _render_sule,
    "homotopy-check": _render_homotopy,
}


def render(result: RunResult, outdir) -> list:
    """Render the scenario's figures into outdir; returns the file names."""
    figures = []
    renderer = _RENDERERS.get(result.scenario)
    if renderer is not None and result.rows:
        renderer(result, outdir, figures)
    return figures
