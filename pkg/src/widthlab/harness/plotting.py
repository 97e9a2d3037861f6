"""Static log-log rate plots."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def rate_plot(path, series, title="", reference_exponent=None):
    """Save a log-log plot of ``{label: (n, error)}`` series as SVG.

    Positive values only. A dashed reference line n^exponent, anchored at the
    first point of the first series, is drawn when an exponent is given.
    Output bytes are reproducible (fixed hash salt, no date stamp).
    """
    with plt.rc_context({"svg.hashsalt": "widthlab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        anchor = None
        for label, (n, err) in series.items():
            n, err = np.asarray(n, float), np.asarray(err, float)
            keep = (n > 0) & (err > 0) & np.isfinite(err)
            if not keep.any():
                continue
            ax.loglog(n[keep], err[keep], "o-", label=label)
            if anchor is None:
                anchor = (n[keep], err[keep][0] / n[keep][0] ** (reference_exponent or 0))
        if reference_exponent is not None and anchor is not None:
            ns, c = anchor
            ax.loglog(ns, c * ns ** reference_exponent, "k--",
                      label=f"n^{reference_exponent:.3g}")
        ax.set_xlabel("n")
        ax.set_ylabel("error")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
