"""Command-line front end.

Exit status: 0 when every record passes, 1 on a tolerance failure, 2 on a
configuration or truncation error.

CSV columns (fixed order)::

    scenario, alpha_re, alpha_im, g, nu, n, k, dim, guard,
    p_numeric, p_analytic, fidelity, max_residual, pass
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import sys
from dataclasses import dataclass, field

from . import acceptance, experiments
from .states import TruncationError, cat, coherent, fock, single_rail_qubit

SCENARIOS = ("coherent", "fock", "qubit", "cat", "op-equiv")
CSV_COLUMNS = (
    "scenario", "alpha_re", "alpha_im", "g", "nu", "n", "k", "dim", "guard",
    "p_numeric", "p_analytic", "fidelity", "max_residual", "pass",
)
GRID_KEYS = ("alpha", "g", "nu", "n", "k", "dim", "guard")

log = logging.getLogger("npa")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    fmt: str = "table"
    out: str | None = None
    sweep_scenario: str | None = None
    grid: list = field(default_factory=list)


# --- parsing -------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """``"re"`` or ``"re,im"``."""
    parts = text.split(",")
    if len(parts) > 2:
        raise ValueError(f"bad complex value {text!r}")
    re = float(parts[0])
    im = float(parts[1]) if len(parts) == 2 else 0.0
    return complex(re, im)


def parse_grid(text: str, conv=float) -> list:
    """``start:stop:step`` (endpoints inclusive within half a step) or a single value."""
    if ":" not in text:
        return [conv(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if not step > 0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"grid stop {stop} below start {start}")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return [conv(start + i * step) for i in range(count)]


def _int_value(x) -> int:
    x = float(x)
    if x != int(x):
        raise ValueError(f"expected an integer, got {x}")
    return int(x)


def _validate(p: dict):
    g, nu = p.get("g"), p.get("nu")
    if g is not None and not g >= 1:
        raise ConfigError("g must be ≥ 1")
    if nu is not None and not 0 < nu <= 1:
        raise ConfigError("nu must lie in (0, 1]")
    if p.get("n") is not None and p["n"] < 0:
        raise ConfigError("n must be ≥ 0")
    if p.get("k") is not None and p["k"] < 0:
        raise ConfigError("k must be ≥ 0")
    if p.get("dim") is not None and p["dim"] < 2:
        raise ConfigError("dim must be ≥ 2")
    if p.get("guard") is not None and not 0 < p["guard"] < 1:
        raise ConfigError("guard must lie in (0, 1)")


def _gain(p: dict) -> dict:
    """Resolve ``--g`` / ``--nu`` into a single gain (``g = 1/nu``)."""
    p = dict(p)
    nu = p.pop("nu", None)
    if nu is not None:
        if p.get("g") is not None:
            raise ConfigError("--g and --nu are mutually exclusive")
        p["g"] = 1.0 / nu
    return p


_REQUIRED = {
    "coherent": ("alpha", "g"),
    "fock": ("n", "g"),
    "qubit": ("g",),
    "cat": ("alpha", "g"),
    "op-equiv": ("g",),
}


def _add_common(sp, grid=False):
    conv = str if grid else None
    sp.add_argument("--alpha", type=conv or parse_complex, help="complex amplitude, 're[,im]'")
    sp.add_argument("--g", type=conv or float, help="amplifier gain g = cosh(r) >= 1")
    sp.add_argument("--nu", type=conv or float, help="attenuation 1/g in (0, 1]; alternative to --g")
    sp.add_argument("--n", type=conv or int, help="Fock photon number")
    sp.add_argument("--k", type=conv or int, help="heralded idler photon count (default 0)")
    sp.add_argument("--dim", type=conv or int, help="working truncation (default: guard-band rule)")
    sp.add_argument("--guard", type=conv or float, help="op-equiv guard fraction (default 0.4)")
    sp.add_argument("--format", dest="fmt", choices=("table", "json", "csv"), default="table")
    sp.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npa",
        description="Heralded noiseless parametric attenuator: simulation and verification.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="SCENARIO")
    for name in SCENARIOS:
        _add_common(sub.add_parser(name, help=f"run the {name} scenario"))
    sp = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    sp.add_argument("--scenario", dest="sweep_scenario", required=True, choices=SCENARIOS)
    _add_common(sp, grid=True)
    vp = sub.add_parser("verify-all", help="run every acceptance criterion")
    vp.add_argument("--format", dest="fmt", choices=("table", "json", "csv"), default="table")
    vp.add_argument("--out", help="output path (default: stdout)")
    return parser


def _grid_values(key, text):
    if key == "alpha":
        return parse_grid(text, complex) if ":" in text else [parse_complex(text)]
    if key in ("n", "k", "dim"):
        return parse_grid(text, _int_value)
    return parse_grid(text, float)


def parse_args(argv=None) -> RunConfig:
    """Parse and validate; usage errors exit with status 2."""
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(args.scenario, fmt=args.fmt, out=args.out)
    if args.scenario == "verify-all":
        return cfg
    raw = {k: getattr(args, k) for k in GRID_KEYS if getattr(args, k) is not None}
    try:
        if args.scenario == "sweep":
            cfg.sweep_scenario = args.sweep_scenario
            values = {k: _grid_values(k, v) for k, v in raw.items()}
            keys = list(values)
            points = [dict(zip(keys, combo)) for combo in itertools.product(*values.values())]
            for p in points:
                _validate(p)
            cfg.grid = [_gain(p) for p in points]
            cfg.params = {k: [_jsonable(x) for x in v] for k, v in values.items()}
            _check_required(cfg.sweep_scenario, cfg.grid[0] if cfg.grid else {})
        else:
            _validate(raw)
            cfg.params = _gain(raw)
            _check_required(args.scenario, cfg.params)
    except ValueError as exc:
        parser.error(str(exc))
    return cfg


def _check_required(scenario, params):
    missing = [k for k in _REQUIRED[scenario] if params.get(k) is None]
    if missing:
        raise ConfigError(f"{scenario} needs --{', --'.join(missing)}"
                          + (" (or --nu)" if "g" in missing else ""))


# --- execution -----------------------------------------------------------


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def run_point(scenario: str, params: dict) -> experiments.ExperimentRecord:
    p = dict(params)
    g = p["g"]
    k = p.get("k") or 0
    dim = p.get("dim")
    if scenario == "op-equiv":
        d = dim or 60
        return experiments.run_operator_equivalence(math.acosh(g), (d, d), p.get("guard", 0.4))
    if k:
        alpha = p.get("alpha")
        state = {
            "coherent": lambda: coherent(alpha),
            "fock": lambda: fock(p["n"], p["n"] + 1),
            "qubit": lambda: single_rail_qubit(1 / math.sqrt(2), 1 / math.sqrt(2)),
            "cat": lambda: cat(alpha),
        }[scenario]()
        inputs = {"alpha": _jsonable(alpha)} if alpha is not None else {}
        if "n" in p:
            inputs["n"] = p["n"]
        return experiments.run_herald(state, g, k, dim, scenario, inputs)
    if scenario == "coherent":
        return experiments.run_coherent(p["alpha"], g, dim)
    if scenario == "fock":
        return experiments.run_fock(p["n"], g, dim)
    if scenario == "qubit":
        return experiments.run_qubit(g, dim)
    if scenario == "cat":
        return experiments.run_cat_comparison(p["alpha"], g, dim)
    raise ConfigError(f"unknown scenario {scenario!r}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def csv_row(rec: experiments.ExperimentRecord) -> dict:
    i, num, ana = rec.inputs, rec.numeric, rec.analytic
    alpha = i.get("alpha")
    fid = num.get("fidelity", num.get("heralded_fidelity"))
    if fid is None and "fidelity_deficit" in rec.residuals:
        fid = 1.0 - rec.residuals["fidelity_deficit"]
    dim = i.get("dim", (i.get("dims") or [None])[0])
    return {
        "scenario": rec.scenario,
        "alpha_re": alpha[0] if alpha else None,
        "alpha_im": alpha[1] if alpha else None,
        "g": i.get("g"),
        "nu": i.get("nu"),
        "n": i.get("n"),
        "k": i.get("k", 0 if rec.scenario != "op-equiv" else None),
        "dim": dim,
        "guard": i.get("guard"),
        "p_numeric": num.get("probability", num.get("heralded_probability")),
        "p_analytic": ana.get("probability"),
        "fidelity": fid,
        "max_residual": max(rec.residuals.values()) if rec.residuals else None,
        "pass": rec.passed,
    }


def emit_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        row = csv_row(rec)
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_json(scenario, params, records, criteria=None) -> str:
    doc = {"scenario": scenario, "params": params, "records": [r.to_dict() for r in records]}
    if criteria is not None:
        doc["criteria"] = [
            {"number": c.number, "title": c.title, "pass": c.passed, "detail": c.detail}
            for c in criteria
        ]
    return json.dumps(doc, indent=2) + "\n"


def parse_json(text: str) -> list:
    return [experiments.ExperimentRecord.from_dict(d) for d in json.loads(text)["records"]]


def emit_table(records) -> str:
    head = ("scenario", "inputs", "P numeric", "P analytic", "fidelity", "max residual", "pass")
    rows = []
    for rec in records:
        row = csv_row(rec)
        inputs = " ".join(
            f"{k}={_short(v)}" for k, v in rec.inputs.items() if k not in ("nu",)
        )
        rows.append((
            rec.scenario,
            inputs,
            _num(row["p_numeric"]),
            _num(row["p_analytic"]),
            _num(row["fidelity"]),
            _num(row["max_residual"], ".2e"),
            "PASS" if rec.passed else "FAIL",
        ))
    widths = [max(len(str(x)) for x in col) for col in zip(head, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip() for r in [head, *rows]]
    for rec in records:
        lines.extend(f"  {rec.scenario}: {f}" for f in rec.failures)
    return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, list) and len(v) == 2 and v[1] == 0 and isinstance(v[0], float):
        return f"{v[0]:g}"
    if isinstance(v, list):
        return ",".join(_short(x) for x in v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _num(x, spec=".9g"):
    return "" if x is None else format(x, spec)


def _write(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def execute(cfg: RunConfig) -> int:
    criteria = None
    if cfg.scenario == "verify-all":
        criteria = acceptance.verify_all()
        records = [r for c in criteria for r in c.records]
        ok = all(c.passed for c in criteria)
    elif cfg.scenario == "sweep":
        records = experiments.sweep(lambda **p: run_point(cfg.sweep_scenario, p), cfg.grid)
        ok = all(r.passed for r in records)
    else:
        records = [run_point(cfg.scenario, cfg.params)]
        ok = records[0].passed

    name = cfg.sweep_scenario if cfg.scenario == "sweep" else cfg.scenario
    params = cfg.params if cfg.scenario == "sweep" else {
        k: _jsonable(v) for k, v in cfg.params.items()
    }
    if cfg.fmt == "json":
        text = emit_json(cfg.scenario if cfg.scenario != "sweep" else f"sweep:{name}",
                         params, records, criteria)
    elif cfg.fmt == "csv":
        text = emit_csv(records)
    elif criteria is not None:
        text = "\n".join(c.line() for c in criteria) + "\n"
        text += f"{sum(c.passed for c in criteria)}/{len(criteria)} criteria passed\n"
    else:
        text = emit_table(records)
    _write(text, cfg.out)
    return 0 if ok else 1


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    cfg = parse_args(argv)
    try:
        return execute(cfg)
    except (TruncationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
