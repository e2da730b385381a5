"""The two-column vehicle/colour worked example, end to end."""

from fractions import Fraction

from .categorical import decode_categorical, fit_encoding
from .numerics import RandomSource
from .pipeline import DataTable, FitConfig, fit, generate

VEHICLE = ["CAR", "BUS", "BICYCLE", "BUS", "CAR", "BUS", "CAR", "BICYCLE", "BICYCLE", "BUS"]
COLOR = ["BLUE", "GREEN", "GREEN", "BLUE", "GREEN", "BLUE", "GREEN", "BLUE", "BLUE", "GREEN"]

# a generated numeric version of the table, as fractions
GENERATED_VEHICLE = ["7/10", "4/7", "1/100", "1/80", "1/2", "1/6", "1/6", "3/5", "7/10", "3/11"]
GENERATED_COLOR = ["3/4", "7/8", "1/3", "2/9", "3/5", "2/3", "3/11", "1/101", "5/9", "1/3"]


def vehicle_table():
    return DataTable({"VEHICLE": VEHICLE, "COLOR": COLOR})


def _frac(s):
    return float(Fraction(s))


def run_demo(seed=0, echo=print):
    """Print the encoding, the decode decisions for the generated table, and a fitted run.

    Returns the decoded table as a dict of label lists.
    """
    enc_v = fit_encoding(VEHICLE)
    enc_c = fit_encoding(COLOR)
    echo("Training table: 10 rows, columns VEHICLE, COLOR")
    for name, enc in (("VEHICLE", enc_v), ("COLOR", enc_c)):
        parts = ", ".join(
            f"{lev}={Fraction(p).limit_denominator(enc.n)} (CI {lo:.4f}..{hi:.4f})"
            for lev, p, (lo, hi) in zip(enc.levels, enc.proportions, enc.confidence_intervals()))
        echo(f"  {name}: {parts}")

    rng = RandomSource(seed, 0)
    decoded = {}
    for name, enc, gen, orig, stream in (
        ("VEHICLE", enc_v, GENERATED_VEHICLE, VEHICLE, 0),
        ("COLOR", enc_c, GENERATED_COLOR, COLOR, 1),
    ):
        trace = []
        decoded[name] = decode_categorical(enc, [_frac(g) for g in gen], orig, rng.spawn(stream), trace)
        echo(f"Decoding generated {name} values:")
        for row, (g, t) in enumerate(zip(gen, trace), start=1):
            dists = ", ".join(f"{lev}:{d:.4f}" for lev, d in zip(enc.levels, t["distances"]))
            echo(f"  row {row:2d}: G={g:>6} D=[{dists}] argmin={{{','.join(t['argmin'])}}}"
                 f" original={orig[row - 1]} -> {t['label']} ({t['rule']})")

    echo("Decoded table:")
    for row, (v, c) in enumerate(zip(decoded["VEHICLE"], decoded["COLOR"]), start=1):
        echo(f"  {row:2d}  {v:<8} {c}")

    model = fit(vehicle_table(), FitConfig(seed=seed))
    syn = generate(model, 10, RandomSource(seed, 1))
    echo(f"Fitted copula correlation (VEHICLE, COLOR): {model.copula.correlation[0, 1]:.4f}")
    echo("Synthetic table from the fitted model:")
    for row, (v, c) in enumerate(zip(syn["VEHICLE"], syn["COLOR"]), start=1):
        echo(f"  {row:2d}  {v:<8} {c}")
    return decoded
