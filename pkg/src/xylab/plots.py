"""Figure rendering for the command-line front end.

Plain matplotlib line plots and heat maps written straight to files (SVG by
default); figure emission is purely additive and never touches the CSV
output paths.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_line(path, x, series, xlabel, ylabel, title=None, hline=None):
    """Write a line plot; ``series`` maps labels to y arrays."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in series.items():
        ax.plot(x, y, marker=".", label=label)
    if hline is not None:
        ax.axhline(hline, linestyle="--", color="gray", linewidth=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_heatmap(path, x, y, z, xlabel, ylabel, zlabel, title=None):
    """Write a pseudocolor map of z[j, i] over (x[i], y[j])."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh = ax.pcolormesh(x, y, z, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=zlabel)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
