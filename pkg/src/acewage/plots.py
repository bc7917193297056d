"""Figures written next to the delimited report and trace outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .cost import estimate_area, permutation_inventory  # noqa: E402


def area_breakdown(cipher, degrees, cfg, ge, path):
    """Stacked bars of estimated GE per component, one bar per degree."""
    ests = [estimate_area(permutation_inventory(cipher, p, cfg), ge, cipher, p) for p in degrees]
    names = sorted({n for e in ests for n, _ in e.components})
    fig, ax = plt.subplots(figsize=(7, 4))
    bottom = [0.0] * len(ests)
    labels = [f"p={p}" for p in degrees]
    cmap = plt.get_cmap("tab20")
    for i, name in enumerate(names):
        vals = [e.component(name) for e in ests]
        ax.bar(labels, vals, bottom=bottom, label=name, color=cmap(i % 20))
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_ylabel("estimated area [GE]")
    ax.set_title(f"{cipher.upper()} area by component")
    ax.legend(fontsize=7, ncol=2, loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def waveform(trace, path, max_cycles=400):
    """Digital waveform of the handshake signals and pcount."""
    recs = trace.records[:max_cycles]
    cyc = [r.cycle for r in recs]
    rows = [
        ("o_ready", [r.o_ready for r in recs]),
        ("i_valid", [r.i_valid for r in recs]),
        ("o_valid", [r.o_valid for r in recs]),
        ("i_dom_sep", [r.i_dom_sep for r in recs]),
    ]
    fig, axes = plt.subplots(len(rows) + 1, 1, sharex=True, figsize=(9, 4.5))
    for ax, (name, vals) in zip(axes, rows):
        ax.step(cyc, vals, where="post", lw=1)
        ax.set_ylabel(name, rotation=0, ha="right", fontsize=8)
        ax.set_yticks([])
    axes[-1].step(cyc, [r.pcount for r in recs], where="post", lw=1)
    axes[-1].set_ylabel("pcount", rotation=0, ha="right", fontsize=8)
    axes[-1].set_xlabel("cycle")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
