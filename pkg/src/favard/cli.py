"""Command-line surface: project, favard, tiling, spectral, x-lambda.

Configuration comes from flags or a JSON config file (flags win).  Every
command is deterministic for a fixed config; outputs are CSV (RFC 4180,
header row) or JSON (UTF-8) with rationals as "p/q" strings.  Exit codes:
0 ok, 2 validation, 3 resource, 4 numeric grid, 1 other failures.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import reporting
from .cantor import validate_digit_system
from .errors import FavardError, GridTooCoarse, ResourceError, ValidationError
from .projection import (
    Slope,
    counting_function,
    farey_slopes,
    projection_measure,
    x_lambda_measure_estimate,
    x_lambda_member,
)
from .quadrature import QuadratureSpec, decay_report_from_estimates, favard_length
from .spectral import (
    default_epsilon,
    f_hat,
    integral_I,
    nu_hat,
    sample_spectrum,
    zero_set_scan,
    zero_set_structure_check,
)
from .tiling import complement_search, direction_analysis, direction_multiset

DEFAULT_SYSTEM = {"K": 4, "A": "0,3", "B": "0,3"}


def _parse_digits(raw) -> tuple[int, ...]:
    if isinstance(raw, str):
        return tuple(int(part) for part in raw.split(",") if part.strip() != "")
    return tuple(int(v) for v in raw)


class Config:
    """Flag/config-file resolution; explicitly passed flags take priority."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file: dict = {}
        if getattr(args, "config", None):
            with open(args.config, "r", encoding="utf-8") as fh:
                self.file = json.load(fh)

    def get(self, name: str, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.file:
            return self.file[name]
        return default

    def digit_system(self):
        K = int(self.get("K", DEFAULT_SYSTEM["K"]))
        A = _parse_digits(self.get("A", DEFAULT_SYSTEM["A"]))
        B = _parse_digits(self.get("B", DEFAULT_SYSTEM["B"]))
        return validate_digit_system(K, A, B)

    def slope(self, name: str = "t", default: str | None = None) -> Slope:
        raw = self.get(name, default)
        if raw is None:
            raise ValidationError(f"missing slope option --{name}")
        return Slope.parse(str(raw))

    def write_text(self, text: str) -> None:
        path = self.get("output")
        if path:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--K", type=int, help="base of the digit system")
    parser.add_argument("--A", type=str, help="comma-separated A digits")
    parser.add_argument("--B", type=str, help="comma-separated B digits")
    parser.add_argument("--config", type=str, help="JSON config file (flags win)")
    parser.add_argument("--seed", type=int, help="seed for grid jitter")
    parser.add_argument("--cap", type=int, help="element cap for enumerations")
    parser.add_argument("-o", "--output", type=str, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="favard",
        description="Exact projections, Favard quadrature, spectral diagnostics "
        "and tiling certificates for product Cantor sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="exact projection measure at one slope")
    _add_common(p)
    p.add_argument("--n", type=int, help="iteration level")
    p.add_argument("--t", type=str, help="slope q/r (or decimal)")
    p.add_argument("--window", choices=("box", "shadow"))
    p.add_argument("--step-function", type=str, help="also write the counting step function CSV")

    p = sub.add_parser("favard", help="Favard length table (CSV)")
    _add_common(p)
    p.add_argument("--n-max", type=int, help="largest iteration level")
    p.add_argument("--nodes", type=int, help="quadrature nodes per quarter-range")
    p.add_argument("--placement", choices=("theta", "t", "farey"))
    p.add_argument("--levels", type=int, help="refinement levels")
    p.add_argument("--farey-order", type=int)
    p.add_argument("--q", type=int, help="reference direction numerator (for the n^(-1/p) column)")
    p.add_argument("--r", type=int, help="reference direction denominator")
    p.add_argument("--plot", type=str, help="render the decay figure to this file")

    p = sub.add_parser("tiling", help="direction analysis with tiling certificate (JSON)")
    _add_common(p)
    p.add_argument("--q", type=int, help="slope numerator")
    p.add_argument("--r", type=int, help="slope denominator")
    p.add_argument("--m-max", type=int, help="largest modulus for the complement search")
    p.add_argument("--n-probe", type=int, help="levels probed for measure stability")

    p = sub.add_parser("spectral", help="Fourier-side evaluations and scans")
    p.add_argument(
        "action",
        choices=("nu-hat", "f-hat", "spectrum", "integral", "zeros", "structure"),
    )
    _add_common(p)
    p.add_argument("--n", type=int, help="iteration level")
    p.add_argument("--N", type=int, help="outer level for band integrals")
    p.add_argument("--m", type=int, help="band width exponent / scan level")
    p.add_argument("--t", type=str, help="slope q/r (or decimal)")
    p.add_argument("--xi", type=float, help="evaluation frequency")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--step", type=float, help="grid step (guard-checked)")
    p.add_argument("--kind", choices=("nu-hat", "f-hat"))
    p.add_argument("--delta", type=float, help="smallness threshold")
    p.add_argument("--epsilon", type=float, help="cover exponent split")
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--modulus", type=int, help="lattice modulus (default: from certificate)")
    p.add_argument("--num", type=int, help="scan grid size")
    p.add_argument("--try-variants", action="store_true", default=None,
                   help="retry divisors/multiples of the modulus")
    p.add_argument("--plot", type=str, help="render a figure to this file")

    p = sub.add_parser("x-lambda", help="small-counting-norm membership")
    _add_common(p)
    p.add_argument("--N", type=int, help="max level in the norm")
    p.add_argument("--t", type=str, help="slope for single membership")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, help="threshold")
    p.add_argument("--window", choices=("box", "shadow"))
    p.add_argument("--grid-order", type=int, help="Farey order for a grid estimate")
    p.add_argument("--jitter", action="store_true", default=None,
                   help="jitter grid slopes (seeded)")
    return parser


def cmd_project(cfg: Config) -> None:
    ds = cfg.digit_system()
    n = int(cfg.get("n", 1))
    slope = cfg.slope("t", "0/1")
    cap = cfg.get("cap")
    measure = projection_measure(ds, n, slope, cap=cap)
    if measure.rational_part is not None:
        rational = reporting.fraction_str(measure.rational_part)
        cfg.write_text(f"{rational} x cos(theta) = {measure.value!r}\n")
    else:
        cfg.write_text(f"measure = {measure.value!r}\n")
    step_path = cfg.get("step_function")
    if step_path:
        window = cfg.get("window", "box")
        step = counting_function(ds, n, slope, window=window, cap=cap)
        with open(step_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(reporting.step_function_csv(step))


def cmd_favard(cfg: Config) -> None:
    ds = cfg.digit_system()
    n_max = cfg.get("n_max")
    if n_max is None:
        raise ValidationError("missing --n-max")
    n_max = int(n_max)
    if n_max < 0:
        raise ValidationError("--n-max must be nonnegative")
    if not cfg.get("output"):
        raise ValidationError("favard requires an output path (-o/--output)")
    spec = QuadratureSpec(
        nodes=int(cfg.get("nodes", 128)),
        placement=cfg.get("placement", "theta"),
        levels=int(cfg.get("levels", 3)),
        farey_order=int(cfg.get("farey_order", 8)),
    )
    cap = cfg.get("cap")
    levels = [0] if n_max == 0 else list(range(1, n_max + 1))
    estimates = [favard_length(ds, n, spec=spec, cap=cap) for n in levels]
    cfg.write_text(reporting.favard_csv(estimates))
    plot_path = cfg.get("plot")
    if plot_path:
        if n_max < 2:
            raise ValidationError("decay figure needs --n-max >= 2")
        p_ref = None
        if cfg.get("q") is not None and cfg.get("r") is not None:
            from .tiling import exponent_report

            p_ref = exponent_report(ds, int(cfg.get("q")), int(cfg.get("r"))).p_inf_float
        report = decay_report_from_estimates(estimates, p_reference=p_ref)
        reporting.plot_decay(report, plot_path)


def cmd_tiling(cfg: Config) -> None:
    ds = cfg.digit_system()
    q = int(cfg.get("q", 2))
    r = int(cfg.get("r", 1))
    analysis = direction_analysis(
        ds,
        q,
        r,
        n_probe=int(cfg.get("n_probe", 4)),
        m_max=int(cfg.get("m_max", 256)),
        cap=cfg.get("cap"),
    )
    cfg.write_text(reporting.dump_json(analysis.to_json_dict()))


def _format_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


def cmd_spectral(cfg: Config) -> None:
    ds = cfg.digit_system()
    action = cfg.args.action
    cap = cfg.get("cap")
    if action in ("nu-hat", "f-hat"):
        n = int(cfg.get("n", 1))
        slope = cfg.slope("t", "0/1")
        xi = float(cfg.get("xi", 0.0))
        value = nu_hat(ds, n, slope, xi) if action == "nu-hat" else f_hat(ds, n, slope, xi)
        cfg.write_text(_format_complex(value) + "\n")
        return
    if action == "spectrum":
        n = int(cfg.get("n", 1))
        slope = cfg.slope("t", "0/1")
        lo = float(cfg.get("lo", 0.0))
        hi = float(cfg.get("hi", float(ds.K**n)))
        grid = sample_spectrum(
            ds, n, slope, lo, hi, step=cfg.get("step"), kind=cfg.get("kind", "nu-hat")
        )
        cfg.write_text(reporting.spectrum_csv(grid))
        if cfg.get("plot"):
            reporting.plot_spectrum(grid, cfg.get("plot"))
        return
    if action == "integral":
        slope = cfg.slope("t", "0/1")
        result = integral_I(
            ds,
            N=int(cfg.get("N", 2)),
            n=int(cfg.get("n", 1)),
            m=int(cfg.get("m", 1)),
            slope=slope,
            step=cfg.get("step"),
            delta=cfg.get("delta"),
        )
        payload = {
            "I": result.I,
            "I1": result.I1,
            "I2": result.I2,
            "zdelta_measure": result.zdelta_measure,
            "lo": result.lo,
            "hi": result.hi,
            "step": result.step,
            "points": result.points,
        }
        cfg.write_text(reporting.dump_json(payload))
        return
    if action == "zeros":
        m = int(cfg.get("m", 1))
        delta = float(cfg.get("delta", 0.1))
        scan = zero_set_scan(ds, m, delta, num=int(cfg.get("num", 1 << 18)))
        payload = {
            "m": scan.m,
            "delta": scan.delta,
            "resolution": scan.resolution,
            "intervals": [list(iv) for iv in scan.intervals],
        }
        cfg.write_text(reporting.dump_json(payload))
        return
    if action == "structure":
        m = int(cfg.get("m", 3))
        delta = float(cfg.get("delta", 0.05))
        q = int(cfg.get("q", 2))
        r = int(cfg.get("r", 1))
        epsilon = cfg.get("epsilon")
        epsilon = default_epsilon(q, r) if epsilon is None else float(epsilon)
        modulus = cfg.get("modulus")
        if modulus is None:
            D = direction_multiset(ds, q, r)
            if len(set(D)) != len(D):
                raise ValidationError(
                    f"direction {q}/{r} has colliding sums; supply --modulus explicitly"
                )
            cert = complement_search(D, M_max=int(cfg.get("m_max", 256)))
            if cert is None:
                raise ValidationError(
                    "no tiling certificate found; supply --modulus explicitly"
                )
            modulus = cert.M // len(cert.D)
        report = zero_set_structure_check(
            ds,
            m,
            delta,
            epsilon,
            q,
            r,
            int(modulus),
            num=int(cfg.get("num", 1 << 18)),
            try_variants=bool(cfg.get("try_variants", False)),
        )
        cfg.write_text(reporting.dump_json(report.to_json_dict()))
        if cfg.get("plot"):
            reporting.plot_zero_structure(report, cfg.get("plot"))
        return
    raise ValidationError(f"unknown spectral action {action!r}")


def _jittered(slopes: list[Slope], seed: int) -> list[Slope]:
    rng = random.Random(seed)
    out = []
    for s in slopes:
        shift = Fraction(rng.randrange(-500, 501), 10**6)
        t = min(max(Fraction(s.q, s.r) + shift, Fraction(0)), Fraction(1))
        out.append(Slope.rational(t.numerator, t.denominator))
    return out


def cmd_x_lambda(cfg: Config) -> None:
    ds = cfg.digit_system()
    N = int(cfg.get("N", 3))
    lam = cfg.get("lam")
    if lam is None:
        raise ValidationError("missing --lam threshold")
    window = cfg.get("window", "box")
    cap = cfg.get("cap")
    grid_order = cfg.get("grid_order")
    if grid_order is None:
        slope = cfg.slope("t", "0/1")
        result = x_lambda_member(ds, N, slope, float(lam), window=window, cap=cap)
        payload = {
            "N": N,
            "t": str(slope),
            "lambda": float(lam),
            "member": result.member,
            "witness_n": result.witness_n,
            "max_value": reporting.fraction_str(result.max_value),
            "per_level": [reporting.fraction_str(v) for v in result.per_level],
        }
        cfg.write_text(reporting.dump_json(payload))
        return
    slopes = farey_slopes(int(grid_order))
    if cfg.get("jitter"):
        slopes = _jittered(slopes, int(cfg.get("seed", 0)))
    report = x_lambda_measure_estimate(ds, N, float(lam), slopes, window=window, cap=cap)
    payload = {
        "N": N,
        "lambda": float(lam),
        "grid_order": int(grid_order),
        "member_fraction": reporting.fraction_str(report.member_fraction),
        "entries": [
            {
                "t": str(slope),
                "member": res.member,
                "witness_n": res.witness_n,
                "max_value": reporting.fraction_str(res.max_value),
            }
            for slope, res in report.entries
        ],
    }
    cfg.write_text(reporting.dump_json(payload))


COMMANDS = {
    "project": cmd_project,
    "favard": cmd_favard,
    "tiling": cmd_tiling,
    "spectral": cmd_spectral,
    "x-lambda": cmd_x_lambda,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(args)
        COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except GridTooCoarse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except FavardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
