"""Command-line experiment driver.

Every subcommand writes its outputs into ``--out`` (a directory) via
temp-file-and-rename, so a failed run leaves no partial files behind.
A ``--config`` JSON file may supply any flag (``--n-min`` becomes ``n_min``);
flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from . import depth
from .errors import GroverSuppressError
from .gates import index_to_label
from .grover import (
    GroverConfig,
    Mode,
    OracleSpec,
    closed_form_success,
    grover_state,
    plan_iterations,
    register_probabilities,
    sweep_suppression,
)
from .qaoa import Comparison, QaoaConfig, TspInstance, bundled_instance, compare_initializations
from .sim import StateVector, sample

SUBCOMMANDS = ("grover", "suppress", "depth-sweep", "qaoa-compare")

DEFAULTS: dict[str, dict[str, Any]] = {
    "grover": {"n": None, "targets": None, "k": None, "shots": 4096, "seed": 0,
               "diffuser_spans_ancilla": False, "out": "out"},
    "suppress": {"n": None, "undesired": None, "k": None, "shots": 4096, "seed": 0,
                 "trailing_x": False, "out": "out"},
    "depth-sweep": {"n_min": depth.MIN_N, "n_max": depth.MAX_N, "seed": 0, "out": "out"},
    "qaoa-compare": {"instance": None, "p": 1, "budget": 500, "seed": 0,
                     "grover_iterations": None, "out": "out"},
}


class ConfigError(GroverSuppressError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    out: str = "out"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        data = json.loads(text)
        return cls(data["subcommand"], dict(data.get("params", {})),
                   int(data.get("seed", 0)), str(data.get("out", "out")))

    @classmethod
    def from_flat(cls, subcommand: str, values: dict[str, Any]) -> RunConfig:
        values = dict(values)
        seed = values.pop("seed", 0)
        out = values.pop("out", "out")
        return cls(subcommand, values, seed, out)


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_round_floats(obj), sort_keys=True, indent=2) + "\n"


def write_outputs(out_dir: str | Path, files: dict[str, str]) -> list[Path]:
    """Write every file to a temp name first, then rename them all into place."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    staged: list[tuple[str, Path]] = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.", suffix=".tmp")
            staged.append((tmp, out / name))
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


def _split_labels(raw: Any, n: int, flag: str) -> list[str]:
    tokens = raw if isinstance(raw, list) else [t.strip() for t in str(raw).split(",")]
    for tok in tokens:
        if len(tok) != n or not tok or set(tok) - {"0", "1"}:
            raise ConfigError(f"--{flag}: bad token {tok!r} (expected a {n}-bit string)")
    if len(set(tokens)) != len(tokens):
        raise ConfigError(f"--{flag}: duplicate labels")
    return tokens


def _histogram_csv(probs: dict[str, float], counts: dict[str, int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "probability", "counts"])
    for label, p in probs.items():
        w.writerow([label, fmt(p), counts.get(label, 0)])
    return buf.getvalue()


def _register_dist(state: StateVector, n: int) -> dict[str, float]:
    probs = register_probabilities(state)
    return {index_to_label(i, n): float(p) for i, p in enumerate(probs)}


def cmd_grover(cfg: RunConfig) -> dict[str, str]:
    p = cfg.params
    n = p["n"]
    targets = _split_labels(p["targets"], n, "targets")
    spec = OracleSpec(n)
    plan = plan_iterations(spec, Mode.CLASSICAL, targets)
    k = plan.optimal_k if p.get("k") is None else int(p["k"])
    config = GroverConfig(spec, Mode.CLASSICAL, k, targets=frozenset(targets),
                          diffuser_spans_ancilla=bool(p.get("diffuser_spans_ancilla")))
    state = grover_state(config)
    probs = _register_dist(state, n)
    counts = sample(state, p["shots"], cfg.seed, ancilla=n)
    summary = {
        "n": n,
        "targets": targets,
        "k": k,
        "optimal_k": plan.optimal_k,
        "closed_form_probability": closed_form_success(2**n, len(targets), k),
        "simulated_probability": sum(probs[t] for t in targets),
        "shots": p["shots"],
        "seed": cfg.seed,
    }
    return {"histogram.csv": _histogram_csv(probs, counts), "summary.json": dump_json(summary)}


def cmd_suppress(cfg: RunConfig) -> dict[str, str]:
    p = cfg.params
    n = p["n"]
    undesired = _split_labels(p["undesired"], n, "undesired")
    if len(undesired) == 2**n:
        raise ConfigError("--undesired covers every basis state; nothing would remain")
    spec = OracleSpec(n, frozenset(undesired))
    trailing = bool(p.get("trailing_x"))
    sweep = sweep_suppression(spec, trailing_x=trailing)
    k = sweep.best_k if p.get("k") is None else int(p["k"])
    state = grover_state(GroverConfig(spec, Mode.SUPPRESSION, k, trailing_x=trailing))
    probs = _register_dist(state, n)
    counts = sample(state, p["shots"], cfg.seed, ancilla=n)
    summary = {
        "n": n,
        "undesired": sorted(undesired),
        "k": k,
        "trailing_x": trailing,
        "paper_bound": sweep.plan.paper_bound,
        "undesired_probability_before": len(undesired) / 2**n,
        "undesired_probability_after": sum(probs[s] for s in undesired),
        "sweep": [{"k": kk, "undesired_probability": pp} for kk, pp in sweep.table],
        "sweep_best_k": sweep.best_k,
        "shots": p["shots"],
        "seed": cfg.seed,
    }
    return {"histogram.csv": _histogram_csv(probs, counts), "summary.json": dump_json(summary)}


def cmd_depth_sweep(cfg: RunConfig) -> dict[str, str]:
    rows = depth.sweep(cfg.params["n_min"], cfg.params["n_max"])
    cross = depth.crossover(rows)
    print(f"crossover: n={cross}" if cross is not None else "crossover: none in range")
    return {"depth_sweep.csv": depth.rows_to_csv(rows)}


def comparison_csv(comp: Comparison) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "evaluation", "best_expected_cost", "optimal_state_probability"])
    for arm in comp.arms():
        for i, (cost, prob) in enumerate(arm.trace):
            w.writerow([arm.mode.value, i, fmt(cost), fmt(prob)])
    return buf.getvalue()


def comparison_summary(comp: Comparison, cfg: QaoaConfig) -> dict:
    def arm(r):
        return {
            "gammas": list(r.gammas),
            "betas": list(r.betas),
            "best_expected_cost": r.best_expected_cost,
            "optimal_state_probability": r.optimal_state_probability,
            "initial_feasible_probability": r.initial_feasible_probability,
            "grover_iterations": r.grover_iterations,
            "evaluations": r.evaluations,
        }

    return {
        "instance": cfg.instance.to_dict(),
        "p": cfg.p,
        "budget": cfg.budget,
        "seed": cfg.seed,
        "optimal_labels": comp.uniform.optimal_labels,
        "uniform": arm(comp.uniform),
        "suppression": arm(comp.suppression),
        "winner": comp.winner,
    }


def cmd_qaoa_compare(cfg: RunConfig) -> dict[str, str]:
    p = cfg.params
    instance = bundled_instance() if p.get("instance") is None else TspInstance.load(p["instance"])
    qcfg = QaoaConfig(instance, int(p["p"]), budget=int(p["budget"]), seed=cfg.seed,
                      grover_iterations=p.get("grover_iterations"))
    comp = compare_initializations(qcfg)
    print(f"winner: {comp.winner}")
    return {"comparison.csv": comparison_csv(comp),
            "summary.json": dump_json(comparison_summary(comp, qcfg))}


COMMANDS = {
    "grover": cmd_grover,
    "suppress": cmd_suppress,
    "depth-sweep": cmd_depth_sweep,
    "qaoa-compare": cmd_qaoa_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grover-suppress", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", default=S, help="JSON file with flag values")
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--out", default=S, help="output directory")

    g = sub.add_parser("grover", help="classical Grover search")
    g.add_argument("--n", type=int, default=S)
    g.add_argument("--targets", default=S, help="comma-separated bitstrings")
    g.add_argument("--k", type=int, default=S)
    g.add_argument("--shots", type=int, default=S)
    g.add_argument("--diffuser-spans-ancilla", action="store_true", default=S)
    common(g)

    s = sub.add_parser("suppress", help="amplitude-suppression Grover")
    s.add_argument("--n", type=int, default=S)
    s.add_argument("--undesired", default=S, help="comma-separated bitstrings")
    s.add_argument("--k", type=int, default=S)
    s.add_argument("--shots", type=int, default=S)
    s.add_argument("--trailing-x", action="store_true", default=S)
    common(s)

    d = sub.add_parser("depth-sweep", help="oracle gate-count growth table")
    d.add_argument("--n-min", type=int, default=S)
    d.add_argument("--n-max", type=int, default=S)
    common(d)

    q = sub.add_parser("qaoa-compare", help="QAOA with uniform vs suppression start")
    q.add_argument("--instance", default=S, help="TSP JSON; defaults to the bundled 3-city instance")
    q.add_argument("--p", type=int, default=S)
    q.add_argument("--budget", type=int, default=S)
    q.add_argument("--grover-iterations", type=int, default=S)
    common(q)
    return parser


def resolve(args: argparse.Namespace) -> RunConfig:
    flags = vars(args).copy()
    sub = flags.pop("subcommand")
    values = dict(DEFAULTS[sub])
    config_path = flags.pop("config", None)
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"--config {config_path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"--config {config_path}: expected a JSON object")
        if "subcommand" in data and "params" in data:
            data = {**data["params"], "seed": data.get("seed", 0), "out": data.get("out", "out")}
        unknown = set(data) - set(values) - {"subcommand"}
        if unknown:
            raise ConfigError(f"--config: unknown field(s) {sorted(unknown)} for {sub}")
        values.update({k: v for k, v in data.items() if k != "subcommand"})
    values.update(flags)
    missing = [k for k, v in values.items() if v is None and k in ("n", "targets", "undesired")]
    if missing:
        raise ConfigError(f"missing required option(s): {', '.join('--' + m for m in missing)}")
    return RunConfig.from_flat(sub, values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        files = COMMANDS[cfg.subcommand](cfg)
        for path in write_outputs(cfg.out, files):
            print(f"wrote {path}")
    except ConfigError as exc:
        parser.error(str(exc))
    except GroverSuppressError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
