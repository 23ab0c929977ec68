"""Published infrastructure-friendliness grades of a Swedish operator's segments.

Only the input column (f_IF per segment) is stored here; every hedged value
and verdict is recomputed from it.
"""

MOSAIC_F_IF = {
    "A": 0.96, "B": 0.98, "C": 0.93, "D": 0.92, "E": 0.96, "F": 0.92, "G": 0.93,
    "H": 0.96, "I": 0.97, "J": 0.92, "K": 0.97, "L": 0.98, "M": 0.96, "N": 0.95,
}

TELENOR_F_IF = {"CA": 0.94, "MM": 0.99, "QA": 0.96, "T": 0.98, "CC": 0.92, "VA": 0.97}

REFERENCE_F_IF = {"mosaic": MOSAIC_F_IF, "telenor": TELENOR_F_IF}
