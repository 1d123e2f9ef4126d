"""Command-line front end.

    modriemann integrate --f "x^2" --psi "1+x" --interval 0 1 --n 4096
    modriemann modsum    --f "1" --map "lipschitz:x/2" --n 64
    modriemann study     --f "x" --map "gamma:0.5" --schedule dyadic:4:12 --tol 1e-3
    modriemann diagnose  --f "x^2" --psi "1+x" --map "lengthphi:sin(t):alpha=0" --n 256
    modriemann signal    --f "1+0.5*cos(2*pi*x)" --duty 0.5 --schedule dyadic:4:12

Exit status: 0 success, 1 usage or parse error, 2 a hypothesis of the chosen
map/weight fails, 3 a study finished with an inconclusive verdict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .core import Interval, SamplePointRule, uniform_partition
from .errors import (
    CellTooWide,
    DomainError,
    ExprSyntaxError,
    HypothesisViolation,
    InvalidArgument,
    ModRiemannError,
    NoSignChange,
    ScheduleTooCoarse,
)
from .mapping import (
    IntervalMap,
    LengthPhi,
    Placement,
    gamma_left,
    length_phi,
    lipschitz_image,
    weighted_target_c,
    weighted_target_d,
)
from .modsum import convergence_study, modified_sums, predict_limit, study_inputs, theorem_b_diagnostics
from .signal import GatedSignalSpec, gated_integral, gated_integral_reference, retrieval_study
from .stieltjes import RealFunction, Weight, oracle_integral, sum_report

SCHEMA_VERSION = 1
COMMANDS = ("integrate", "modsum", "study", "diagnose", "signal")
STUDY_COLUMNS = ("n", "mesh", "s", "u", "l", "gap", "UL_gap", "predicted", "abs_error")

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_NOT_CONVERGED = 0, 1, 2, 3


class UsageError(ModRiemannError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    interval: Tuple[float, float] = (0.0, 1.0)
    f_text: str = "x"
    psi_text: str = "1"
    map_spec: Optional[str] = None
    schedule: str = "dyadic:4:12"
    n: int = 4096
    rule: str = "mid"
    tol: float = 1e-3
    output: str = "table"
    out_path: Optional[str] = None
    f_lipschitz: Optional[float] = None
    duty: float = 0.5

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out_path")
        d["interval"] = list(self.interval)
        return d


# ---------------------------------------------------------------- parsing


def parse_schedule(text: str) -> List[int]:
    """``dyadic:kmin:kmax`` or a comma-separated list of cell counts."""
    text = text.strip()
    if text.startswith("dyadic:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad schedule {text!r}; expected dyadic:<kmin>:<kmax>")
        try:
            k0, k1 = int(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad schedule {text!r}") from None
        if not 0 <= k0 <= k1 <= 30:
            raise UsageError(f"bad dyadic range in {text!r}")
        return [2**k for k in range(k0, k1 + 1)]
    try:
        ns = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad schedule {text!r}") from None
    if not ns or any(n < 1 for n in ns):
        raise UsageError(f"bad schedule {text!r}")
    return ns


def _options(parts: Sequence[str], allowed: Sequence[str], spec: str) -> dict:
    opts = {}
    for part in parts:
        key, eq, value = part.partition("=")
        if not eq or key not in allowed:
            raise UsageError(f"bad option {part!r} in map descriptor {spec!r}; allowed: {', '.join(allowed)}")
        opts[key] = value
    return opts


def _float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what} must be a number, got {text!r}") from None


def parse_map(spec: str, w: Weight) -> IntervalMap:
    """Build a map from ``kind:args``; see the module docstring for the grammar."""
    kind, _, rest = spec.strip().partition(":")
    parts = rest.split(":") if rest else []
    base = w.base
    if kind == "gamma":
        if len(parts) != 1:
            raise UsageError(f"expected gamma:<γ>, got {spec!r}")
        return gamma_left(_float(parts[0], "gamma"))
    if kind in ("lengthphi", "targetc", "targetd", "lipschitz"):
        if not parts or not parts[0].strip():
            raise UsageError(f"map descriptor {spec!r} is missing its expression")
        text = parts[0]
    if kind == "lengthphi":
        opts = _options(parts[1:], ("alpha", "side", "seed"), spec)
        if "alpha" not in opts:
            raise UsageError(f"lengthphi needs alpha=<α>: {spec!r}")
        alpha = _float(opts["alpha"], "alpha")
        side = opts.get("side", "right")
        if side not in ("left", "right"):
            raise UsageError(f"side must be left or right, got {side!r}")
        window = Interval(alpha, alpha + base.width()) if side == "right" else Interval(alpha - base.width(), alpha)
        placement = Placement("seeded", int(opts["seed"])) if "seed" in opts else Placement()
        return length_phi(RealFunction.parse(text, "t"), alpha, side, window, placement)
    if kind in ("targetc", "targetd"):
        opts = _options(parts[1:], ("gamma",), spec)
        if "gamma" not in opts:
            raise UsageError(f"{kind} needs gamma=<γ>: {spec!r}")
        build = weighted_target_c if kind == "targetc" else weighted_target_d
        return build(RealFunction.parse(text), _float(opts["gamma"], "gamma"), w)
    if kind == "lipschitz":
        _options(parts[1:], (), spec)
        return lipschitz_image(RealFunction.parse(text), base)
    raise UsageError(f"unknown map kind {kind!r}; expected gamma, lengthphi, targetc, targetd or lipschitz")


# ---------------------------------------------------------------- output


def _num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (bool, int, float)):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _table(rows: List[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[c for c in cols]] + [
        [(format(r[c], ".10g") if isinstance(r[c], float) else str(r[c])) for c in cols] for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    lines = ["  ".join(v.rjust(wd) for v, wd in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * wd for wd in widths))
    return "\n".join(lines)


def _csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(rows[0])
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_num(r[c]) if isinstance(r[c], (int, float)) else r[c] for c in cols])
    return buf.getvalue()


def render(config: RunConfig, results: List[dict], verdict, oracle: Optional[dict], extra: Optional[dict] = None) -> str:
    if config.output == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": config.command,
            "config": config.echo(),
            "results": results,
            "verdict": verdict,
            "oracle": oracle,
        }
        if extra:
            doc.update(extra)
        return to_json(doc) + "\n"
    if config.output == "csv":
        return _csv(results)
    lines = [_table(results)]
    if oracle is not None:
        lines.append(
            f"oracle: {oracle['value']:.12g}  bracket [{oracle['bracket_lo']:.12g}, {oracle['bracket_hi']:.12g}]"
        )
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    if verdict is not None:
        lines.append(f"verdict: {verdict}")
    return "\n".join(lines) + "\n"


def _oracle_from_prediction(pred) -> dict:
    return {"value": pred.value, "bracket_lo": pred.oracle_bracket[0], "bracket_hi": pred.oracle_bracket[1]}


# ---------------------------------------------------------------- commands


def _inputs(config: RunConfig):
    a, b = config.interval
    if not a < b:
        raise UsageError(f"interval needs a < b, got {a!r} {b!r}")
    base = Interval(a, b)
    f = RealFunction.parse(config.f_text, lipschitz=config.f_lipschitz)
    w = Weight.from_text(config.psi_text, base)
    rule = SamplePointRule.parse(config.rule)
    return base, f, w, rule


def _need_map(config: RunConfig, w: Weight) -> IntervalMap:
    if not config.map_spec:
        raise UsageError(f"{config.command} needs --map")
    return parse_map(config.map_spec, w)


def _study_rows(rep) -> List[dict]:
    return [{c: getattr(r, c) for c in STUDY_COLUMNS} for r in rep.rows]


def _execute(config: RunConfig) -> Tuple[str, int]:
    base, f, w, rule = _inputs(config)
    cmd = config.command

    if cmd == "integrate":
        p = uniform_partition(base, config.n)
        rep = sum_report(f, w, p, rule)
        orc = oracle_integral(f, w)
        row = {
            "n": rep.n_cells,
            "mesh": rep.mesh,
            "lower": rep.lower,
            "upper": rep.upper,
            "sample_sum": rep.sample_sum,
            "oscillation_sum": rep.oscillation_sum,
            "certified": rep.certified,
        }
        oracle = {"value": orc.midpoint, "bracket_lo": orc.lower, "bracket_hi": orc.upper}
        return render(config, [row], None, oracle), EXIT_OK

    m = _need_map(config, w)

    if cmd == "modsum":
        g, wg = study_inputs(f, w, m)
        p = uniform_partition(base, config.n)
        r = modified_sums(g, wg, p, m, rule)
        pred = predict_limit(f, w, m)
        row = {
            "n": r.n_cells,
            "mesh": r.mesh,
            "s": r.s_val,
            "u": r.u_val,
            "l": r.l_val,
            "gap": r.osc_val,
            "skipped_empty": r.skipped_empty,
            "predicted": pred.value,
        }
        return render(config, [row], None, _oracle_from_prediction(pred), {"map": m.describe()}), EXIT_OK

    if cmd == "study":
        rep = convergence_study(f, w, m, parse_schedule(config.schedule), rule, config.tol)
        extra = {
            "map": m.describe(),
            "theorem": rep.prediction.theorem,
            "fitted_rate": rep.fitted_rate,
            "dominated": rep.dominated,
        }
        text = render(config, _study_rows(rep), rep.verdict, _oracle_from_prediction(rep.prediction), extra)
        return text, EXIT_OK if rep.converged else EXIT_NOT_CONVERGED

    if cmd == "diagnose":
        if not isinstance(m, LengthPhi):
            raise UsageError("diagnose needs a lengthphi map")
        d = theorem_b_diagnostics(f, w, m, uniform_partition(base, config.n), rule)
        row = {
            "n": d.n,
            "s": d.s_val,
            "A_n": d.A_n,
            "C_n": d.C_n,
            "D_n": d.D_n,
            "residual": d.residual,
            "A_bound": d.A_bound,
        }
        pred = predict_limit(f, w, m)
        return render(config, [row], None, _oracle_from_prediction(pred), {"map": m.describe()}), EXIT_OK

    raise UsageError(f"unknown command {cmd!r}")


def _execute_signal(config: RunConfig) -> Tuple[str, int]:
    base, f, w, _ = _inputs(config)
    ns = parse_schedule(config.schedule)
    rep = retrieval_study(f, w, ns, config.duty, config.tol)
    rows = []
    for r in rep.rows:
        spec = GatedSignalSpec(f, r.n, config.duty)
        rows.append(
            {
                "carrier_n": r.n,
                "gated": gated_integral(spec, w),
                "gated_reference": gated_integral_reference(spec, w),
                "predicted": r.predicted,
                "abs_error": r.abs_error,
            }
        )
    text = render(config, rows, rep.verdict, _oracle_from_prediction(rep.prediction), {"fitted_rate": rep.fitted_rate})
    return text, EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if config.command not in COMMANDS:
            raise UsageError(f"unknown command {config.command!r}")
        if config.output not in ("table", "json", "csv"):
            raise UsageError(f"unknown output format {config.output!r}")
        if config.command == "signal":
            text, status = _execute_signal(config)
        else:
            text, status = _execute(config)
    except (HypothesisViolation, NoSignChange, CellTooWide, ScheduleTooCoarse) as e:
        print(f"error: {e}", file=stderr)
        return EXIT_HYPOTHESIS
    except (UsageError, ExprSyntaxError, InvalidArgument, DomainError) as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    if config.out_path:
        with open(config.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modriemann", description="Classic and modified Riemann-Stieltjes sums.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_map: bool):
        p.add_argument("--f", dest="f_text", required=True, help="integrand in x")
        p.add_argument("--psi", dest="psi_text", default="1", help="positive density psi(x) (default 1)")
        p.add_argument("--interval", nargs=2, type=float, default=(0.0, 1.0), metavar=("A", "B"))
        p.add_argument("--lf", dest="f_lipschitz", type=float, default=None, help="declared Lipschitz constant of f")
        p.add_argument("--rule", default="mid", help="left | right | mid | seeded:<int>")
        p.add_argument("--output", choices=("table", "json", "csv"), default="table")
        p.add_argument("--out", dest="out_path", default=None)
        if needs_map:
            p.add_argument("--map", dest="map_spec", required=True, help="map descriptor, e.g. gamma:0.5")

    p = sub.add_parser("integrate", help="classic Darboux and Riemann sums with the oracle")
    common(p, False)
    p.add_argument("--n", type=int, default=4096)

    p = sub.add_parser("modsum", help="modified sums on one uniform partition")
    common(p, True)
    p.add_argument("--n", type=int, default=4096)

    p = sub.add_parser("study", help="convergence of modified sums along a schedule")
    common(p, True)
    p.add_argument("--schedule", default="dyadic:4:12")
    p.add_argument("--tol", type=float, default=1e-3)

    p = sub.add_parser("diagnose", help="Theorem B decomposition s = A_n + C_n + D_n")
    common(p, True)
    p.add_argument("--n", type=int, default=256)

    p = sub.add_parser("signal", help="square-wave gated integration")
    common(p, False)
    p.set_defaults(rule="left")
    p.add_argument("--duty", type=float, default=0.5)
    p.add_argument("--schedule", default="dyadic:4:12")
    p.add_argument("--tol", type=float, default=1e-3)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    fields["interval"] = tuple(fields.get("interval", (0.0, 1.0)))
    return run(RunConfig(**fields))


if __name__ == "__main__":
    sys.exit(main())
