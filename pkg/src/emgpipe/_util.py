"""Small shared helpers."""

import math


def round_half_up(v):
    """Round to the nearest integer, halves away from zero-ward up.

    Python's round() rounds halves to even; the segmentation and split
    arithmetic here needs the plain schoolbook rule.
    """
    return int(math.floor(v + 0.5))


def fmt_float(v):
    """Fixed six-decimal rendering used in every CSV this package writes."""
    return "%.6f" % float(v)
