"""Published benchmark results for external reference methods.

G1DBN (its S1 screening step and S2 refinement step) and GeneNet are
third-party network-recovery tools that were benchmarked on the same
simulation protocol; their reported rates are reproduced here so the
comparison tables can show them alongside freshly computed results.
They are transcribed constants, not outputs of this package, and the
table renderer labels them as such.

Keys: PUBLISHED[mode][p][method] -> Rates in (tpr, fpr, tnr, fnr, mce).
"""

from __future__ import annotations

from .metrics import Rates

PUBLISHED_LABEL = "published values, not computed"

REFERENCE_METHODS = ("G1DBN-S1", "G1DBN-S2", "GeneNet")


def _r(tpr, fpr, tnr, fnr, mce):
    return Rates(tpr=tpr, fpr=fpr, tnr=tnr, fnr=fnr, mce=mce)


PUBLISHED = {
    "linear": {
        50: {
            "G1DBN-S1": _r(0.51, 0.15, 0.85, 0.49, 0.17),
            "G1DBN-S2": _r(0.47, 0.11, 0.89, 0.53, 0.13),
            "GeneNet": _r(0.11, 0.01, 0.99, 0.89, 0.05),
        },
        100: {
            "G1DBN-S1": _r(0.26, 0.11, 0.89, 0.74, 0.14),
            "G1DBN-S2": _r(0.21, 0.07, 0.93, 0.79, 0.11),
            "GeneNet": _r(0.12, 0.01, 0.99, 0.88, 0.06),
        },
    },
    "nonlinear": {
        50: {
            "G1DBN-S1": _r(0.49, 0.22, 0.78, 0.51, 0.24),
            "G1DBN-S2": _r(0.39, 0.16, 0.84, 0.61, 0.18),
            "GeneNet": _r(0.24, 0.04, 0.96, 0.76, 0.07),
        },
        100: {
            "G1DBN-S1": _r(0.43, 0.17, 0.83, 0.57, 0.19),
            "G1DBN-S2": _r(0.29, 0.07, 0.93, 0.71, 0.10),
            "GeneNet": _r(0.17, 0.03, 0.97, 0.83, 0.07),
        },
    },
    "mixture": {
        50: {
            "G1DBN-S1": _r(0.61, 0.24, 0.76, 0.39, 0.25),
            "G1DBN-S2": _r(0.49, 0.16, 0.84, 0.51, 0.18),
            "GeneNet": _r(0.33, 0.03, 0.97, 0.67, 0.07),
        },
        100: {
            "G1DBN-S1": _r(0.46, 0.17, 0.83, 0.54, 0.19),
            "G1DBN-S2": _r(0.31, 0.07, 0.93, 0.69, 0.10),
            "GeneNet": _r(0.14, 0.02, 0.98, 0.86, 0.06),
        },
    },
}


def published_rates(mode: str, p: int):
    """Reference rows for a table cell, or {} when none were reported."""
    return PUBLISHED.get(mode, {}).get(p, {})
