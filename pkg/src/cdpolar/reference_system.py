"""Hand-expanded form of the factored system, kept as an independent cross-check.

``printed_system`` is a term-by-term transcription of the published closed-form
expansion of ``q e^{e4 phi4} e^{e5 phi5} e^{e6 phi6} e^{e7 phi7}``;
``PRINTED_PAIRS`` lists the published planar-rotation pairings for each stage.
Neither is used by the solver. ``pairing_errata`` compares the pairings with
those derived from the multiplication table; see ERRATA.md.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .factor import stage_pairs

# stage angle -> ((out_real, out_imag), ...) as printed; stage names x <- a <- b <- c <- y
PRINTED_PAIRS: dict[int, tuple[tuple[int, int], ...]] = {
    7: ((0, 7), (1, 6), (5, 2), (4, 2)),
    6: ((0, 6), (7, 1), (4, 2), (3, 5)),
    5: ((0, 5), (4, 1), (2, 7), (6, 3)),
    4: ((0, 4), (1, 3), (2, 6), (3, 7)),
}

_STAGE_SYMBOLS = {7: ("x", "a"), 6: ("a", "b"), 5: ("b", "c"), 4: ("c", "y")}


def printed_system(y: Sequence[float], phi: Sequence[float]) -> np.ndarray:
    y0, y1, y2, y3 = (float(v) for v in y)
    c4, c5, c6, c7 = np.cos(np.asarray(phi, dtype=float))
    s4, s5, s6, s7 = np.sin(np.asarray(phi, dtype=float))
    x = np.empty(8)
    x[0] = (
        c7 * (c6 * (c5 * c4 * y0 - s5 * s4 * y1) - s6 * (c5 * s4 * y2 - s5 * c4 * y3))
        - s7 * (-s6 * (s5 * s4 * y0 + c5 * c4 * y1) + c6 * (s5 * c4 * y2 + c5 * s4 * y3))
    )
    x[1] = (
        -s7 * (s6 * (c5 * c4 * y0 - s5 * s4 * y1) + c6 * (c5 * s4 * y2 - s5 * c4 * y3))
        + c7 * (c6 * (s5 * s4 * y0 + c5 * c4 * y1) + s6 * (s5 * c4 * y2 + c5 * s4 * y3))
    )
    x[2] = (
        s7 * (c6 * (s5 * c4 * y0 + c5 * s4 * y1) + s6 * (s5 * s4 * y2 + c5 * c4 * y3))
        + c7 * (s6 * (c5 * s4 * y0 - s5 * c4 * y1) + c6 * (c5 * c4 * y2 - s5 * s4 * y3))
    )
    x[3] = (
        c7 * (-s6 * (s5 * c4 * y0 + c5 * s4 * y1) + c6 * (s5 * s4 * y2 + c5 * c4 * y3))
        + s7 * (c6 * (c5 * s4 * y0 - s5 * c4 * y1) - s6 * (c5 * c4 * y2 - s5 * s4 * y3))
    )
    x[4] = (
        -s7 * (-s6 * (s5 * c4 * y0 + c5 * s4 * y1) + c6 * (s5 * s4 * y2 + c5 * c4 * y3))
        + c7 * (c6 * (c5 * s4 * y0 - s5 * c4 * y1) - s6 * (c5 * c4 * y2 - s5 * s4 * y3))
    )
    x[5] = (
        c7 * (c6 * (s5 * c4 * y0 + c5 * s4 * y1) + s6 * (s5 * s4 * y2 + c5 * c4 * y3))
        - s7 * (s6 * (c5 * s4 * y0 - s5 * c4 * y1) + c6 * (c5 * c4 * y2 - s5 * s4 * y3))
    )
    x[6] = (
        c7 * (s6 * (c5 * c4 * y0 - s5 * s4 * y1) + c6 * (c5 * s4 * y2 - s5 * c4 * y3))
        + s7 * (c6 * (s5 * s4 * y0 + c5 * c4 * y1) + s6 * (s5 * c4 * y2 + c5 * s4 * y3))
    )
    x[7] = (
        s7 * (c6 * (c5 * c4 * y0 - s5 * s4 * y1) - s6 * (c5 * s4 * y2 - s5 * c4 * y3))
        + c7 * (-s6 * (s5 * s4 * y0 + c5 * c4 * y1) + c6 * (s5 * c4 * y2 + c5 * s4 * y3))
    )
    return x


def pair_label(k: int, pair: tuple[int, int]) -> str:
    """Render a pairing as ``x4 + x3 i = (a4 + a3 i) e^{i phi7}``."""
    out, inp = _STAGE_SYMBOLS[k]
    m, n = pair
    if k == 4:
        # the first stage rotates a single quaternion coefficient
        return f"{out}{m} + {out}{n} i = {inp}{m % 4} e^{{i phi{k}}}"
    return f"{out}{m} + {out}{n} i = ({inp}{m} + {inp}{n} i) e^{{i phi{k}}}"


def pairing_errata() -> list[tuple[int, str, str]]:
    """Printed pairings that differ from the derived ones.

    Returns ``(k, printed, derived)`` label triples; derived pairs are matched
    to printed ones by their real slot.
    """
    out = []
    for k, printed in PRINTED_PAIRS.items():
        derived = {m: (m, n) for m, n in stage_pairs(k)}
        for pair in printed:
            good = derived.get(pair[0])
            if good != pair:
                fix = pair_label(k, good) if good else "(no derived pair)"
                out.append((k, pair_label(k, pair), fix))
    return out
