"""Command line interface.

Three subcommands:

* ``simulate``: sample one of the synthetic systems to CSV, alongside
  the ground-truth edge sets and an echo of the generator config.
* ``infer``: run surrogate tests over a block-split recording, either
  inferring the full causality graph or evaluating an explicit measure
  battery, and write report.json / graph.dot / histograms/*.csv.
* ``oracle``: print exact Gaussian VAR values for a measure, or run the
  closed-form identity checks.

Exit codes: 0 success, 1 usage error, 2 data or model error,
3 numerical failure.

``infer`` runs are reproducible: the effective config is hashed into the
report, reruns with the same config produce byte-identical files except
for the ``created_at`` timestamp, and an existing report from a
different config is never overwritten unless ``--force`` is given.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys

from . import __version__
from .errors import DataError, DirinfoError, EstimationError, ModelError
from .estimators import CmiMode, EstimatorConfig
from .gaussian import GaussianVarModel, oracle_measure, random_stable_model, run_identity_suite
from .inference import (
    InstantMode,
    SurrogatePolicy,
    graph_to_dot,
    infer_graph,
    report_to_dict,
    test_battery,
)
from .measures import MeasureKind, MeasureSpec
from .series import LagSpec, SampleMatrix, read_csv, split_blocks, write_csv
from . import synth

__all__ = ["main", "cmd_simulate", "cmd_infer", "cmd_oracle"]


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(_canonical_json(obj))


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DataError(f"{what} must be a comma-separated integer list, got {text!r}")
    if not values:
        raise DataError(f"{what} is empty")
    return values


def _parse_float_list(text: str, what: str, n: int) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise DataError(f"{what} must be comma-separated floats, got {text!r}")
    if len(values) != n:
        raise DataError(f"{what} needs exactly {n} values, got {len(values)}")
    return values


def _ensure_dir(path) -> None:
    os.makedirs(path, exist_ok=True)


# ---------------------------------------------------------------------------
# simulate


def _generate(model: str, n: int, seed: int, params: dict, model_file: str | None):
    if model == "chain":
        p = synth.ChainParams(**params)
        return synth.gen_chain(p, n, seed), synth.chain_truth(p)
    if model == "four_d":
        p = synth.FourDParams(**params)
        return synth.gen_4d(p, n, seed), synth.fourd_truth(p)
    if model == "var1":
        if not model_file:
            raise DataError("var1 generation needs a model file (--model-file)")
        m = GaussianVarModel.load(model_file)
        return synth.gen_var1(m, n, seed), synth.var1_truth(m)
    raise DataError(f"unknown model {model!r}; choose chain, four_d or var1")


def cmd_simulate(args) -> int:
    params = dict(json.loads(args.params)) if args.params else {}
    if args.rho is not None:
        if args.model != "four_d":
            raise DataError("--rho only applies to the four_d model")
        r1, r2, r3 = _parse_float_list(args.rho, "--rho", 3)
        params.update(rho1=r1, rho2=r2, rho3=r3)
    try:
        data, truth = _generate(args.model, args.n, args.seed, params, args.model_file)
    except TypeError as exc:
        raise DataError(f"bad generator params: {exc}") from None
    _ensure_dir(args.out)
    csv_path = os.path.join(args.out, "data.csv")
    if os.path.exists(csv_path) and not args.force:
        raise DataError(f"{csv_path} exists; pass --force to overwrite")
    write_csv(data, csv_path)
    _write_json(os.path.join(args.out, "truth.json"), truth.to_json_dict())
    echo = {
        "generator": {
            "model": args.model,
            "n": args.n,
            "seed": args.seed,
            "params": params,
        }
    }
    if args.model_file:
        echo["generator"]["model_file"] = args.model_file
    _write_json(os.path.join(args.out, "config.json"), echo)
    print(f"wrote {data.n_samples} samples of {data.n_channels} channels to {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# infer


_EFFECTIVE_DEFAULTS = {
    "blocks": {"n_blocks": 100, "block_len": 3000},
    "lag": {"d_lag": 2},
    "est": {"k": 5, "cmi_mode": "digamma_counts"},
    "policy": {"alpha": 0.1, "seed": 0, "n_surrogates_per_block": 1, "n_tests": None},
    "mode": "graph",
    "instant_mode": "conditional",
    "zscore": False,
    "jitter_seed": None,
}


def _effective_config(cfg: dict) -> dict:
    """Fill defaults so the hash covers every value that shapes the run."""
    if "data" not in cfg:
        raise DataError("config needs a 'data' section (csv path or generator)")
    eff = {"data": cfg["data"]}
    for key, default in _EFFECTIVE_DEFAULTS.items():
        if isinstance(default, dict):
            section = dict(default)
            section.update(cfg.get(key, {}))
            eff[key] = section
        else:
            eff[key] = cfg.get(key, default)
    if eff["mode"] not in ("graph", "battery"):
        raise DataError(f"mode must be 'graph' or 'battery', got {eff['mode']!r}")
    if eff["mode"] == "battery":
        measures = cfg.get("measures")
        if not measures:
            raise DataError("battery mode needs a non-empty 'measures' list")
        eff["measures"] = measures
    if "out_dir" in cfg:
        eff["out_dir"] = cfg["out_dir"]
    return eff


def _resolve_data(eff: dict) -> SampleMatrix:
    data_cfg = eff["data"]
    if "csv" in data_cfg:
        data = read_csv(data_cfg["csv"])
    elif "generator" in data_cfg:
        gen = data_cfg["generator"]
        try:
            data, _ = _generate(
                gen["model"],
                int(gen["n"]),
                int(gen["seed"]),
                dict(gen.get("params", {})),
                gen.get("model_file"),
            )
        except KeyError as exc:
            raise DataError(f"generator config missing key {exc}") from None
        except TypeError as exc:
            raise DataError(f"bad generator params: {exc}") from None
    else:
        raise DataError("data section needs 'csv' or 'generator'")
    if eff["zscore"]:
        data = data.zscored()
    if eff["jitter_seed"] is not None:
        data = data.jittered(int(eff["jitter_seed"]))
    return data


def _battery_specs(eff: dict, names, lag: LagSpec, est: EstimatorConfig):
    specs = []
    for i, m in enumerate(eff["measures"]):
        try:
            kind = MeasureKind(m["kind"])
            spec = MeasureSpec(
                kind=kind,
                target=m["target"],
                source=m["source"],
                side=tuple(m.get("side", ())),
                lag=lag,
                est=est,
                ar_order=int(m.get("ar_order", 10)),
            )
        except KeyError as exc:
            raise DataError(f"measure {i} missing key {exc}") from None
        except ValueError as exc:
            raise DataError(f"measure {i}: {exc}") from None
        spec.validate_channels(names)
        specs.append(spec)
    return specs


def _run_infer_once(eff: dict, out_dir: str, threads: int, force: bool) -> None:
    cfg_hash = _config_hash(eff)
    _ensure_dir(out_dir)
    report_path = os.path.join(out_dir, "report.json")
    if os.path.exists(report_path) and not force:
        with open(report_path) as fh:
            try:
                previous = json.load(fh)
            except json.JSONDecodeError:
                previous = {}
        old_hash = previous.get("metadata", {}).get("config_hash")
        if old_hash != cfg_hash:
            raise DataError(
                f"{report_path} was produced by config {old_hash}, current is "
                f"{cfg_hash}; pass --force to overwrite"
            )

    data = _resolve_data(eff)
    blocks = split_blocks(data, eff["blocks"]["n_blocks"], eff["blocks"]["block_len"])
    lag = LagSpec(d_lag=int(eff["lag"]["d_lag"]))
    est = EstimatorConfig(
        k=int(eff["est"]["k"]), cmi_mode=CmiMode(eff["est"]["cmi_mode"])
    )
    pol = eff["policy"]
    policy = SurrogatePolicy(
        n_surrogates_per_block=int(pol["n_surrogates_per_block"]),
        seed=int(pol["seed"]),
        alpha=float(pol["alpha"]),
        n_tests=None if pol["n_tests"] is None else int(pol["n_tests"]),
    )

    graph = None
    if eff["mode"] == "graph":
        instant_mode = InstantMode(eff["instant_mode"])
        graph, results = infer_graph(
            blocks, policy, lag=lag, est=est, instant_mode=instant_mode, threads=threads
        )
        n_tests_resolved = next(iter(results.values())).n_tests if results else 0
    else:
        specs = _battery_specs(eff, blocks[0].names, lag, est)
        results = test_battery(blocks, specs, policy, threads=threads)
        n_tests_resolved = next(iter(results.values())).n_tests if results else 0

    metadata = {
        "tool": "dirinfo",
        "version": __version__,
        "config_hash": cfg_hash,
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "mode": eff["mode"],
        "instant_mode": eff["instant_mode"],
        "channels": list(blocks[0].names),
        "n_blocks": len(blocks),
        "block_len": eff["blocks"]["block_len"],
        "d_lag": eff["lag"]["d_lag"],
        "k": eff["est"]["k"],
        "alpha": pol["alpha"],
        "seed": pol["seed"],
        "n_surrogates_per_block": pol["n_surrogates_per_block"],
        "n_tests": n_tests_resolved,
        "threshold_policy": "per-pair empirical quantile, nearest rank",
    }
    report = report_to_dict(results, metadata, graph)
    _write_json(report_path, report)
    if graph is not None:
        with open(os.path.join(out_dir, "graph.dot"), "w") as fh:
            fh.write(graph_to_dot(graph))
    hist_dir = os.path.join(out_dir, "histograms")
    _ensure_dir(hist_dir)
    for label, res in sorted(results.items()):
        path = os.path.join(hist_dir, f"{label}.csv")
        n_surr = policy.n_surrogates_per_block
        with open(path, "w") as fh:
            header = ["block", "observed"] + [f"surrogate_{s}" for s in range(n_surr)]
            fh.write(",".join(header) + "\n")
            for b_idx, obs in enumerate(res.observed):
                surr = res.surrogate[b_idx * n_surr : (b_idx + 1) * n_surr]
                row = [str(b_idx), format(obs.value, ".17g")] + [
                    format(v.value, ".17g") for v in surr
                ]
                fh.write(",".join(row) + "\n")
    print(f"wrote {report_path}")


def cmd_infer(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.config}: not valid JSON ({exc})") from None
    eff = _effective_config(cfg)
    out_dir = args.out or eff.get("out_dir")
    if not out_dir:
        raise DataError("no output directory (config out_dir or --out)")
    if args.threads < 1:
        raise DataError(f"--threads must be >= 1, got {args.threads}")
    if args.k_sweep:
        ks = _parse_int_list(args.k_sweep, "--k-sweep")
        for k in ks:
            sweep_eff = json.loads(json.dumps(eff))  # deep copy
            sweep_eff["est"]["k"] = k
            _run_infer_once(
                sweep_eff, os.path.join(out_dir, f"k{k}"), args.threads, args.force
            )
    else:
        _run_infer_once(eff, out_dir, args.threads, args.force)
    return 0


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle(args) -> int:
    if args.model:
        model = GaussianVarModel.load(args.model)
    else:
        model = random_stable_model(args.channels, args.seed)
    if args.identities:
        names = model.names
        source = args.source or names[0]
        target = args.target or names[1]
        side = tuple(args.side.split(",")) if args.side else tuple(
            ch for ch in names if ch not in (source, target)
        )
        residuals = run_identity_suite(
            model, source, target, side, d_lag=args.d_lag
        )
        worst = max(residuals.values())
        for name, value in sorted(residuals.items()):
            print(f"{name}: {value:.3e}")
        print(f"max residual: {worst:.3e}")
        return 0
    if not (args.kind and args.target and args.source):
        raise DataError("oracle needs --kind, --target and --source (or --identities)")
    try:
        kind = MeasureKind(args.kind)
    except ValueError:
        choices = ", ".join(k.value for k in MeasureKind)
        raise DataError(f"unknown kind {args.kind!r}; choose from: {choices}") from None
    side = tuple(s for s in (args.side.split(",") if args.side else ()) if s)
    spec = MeasureSpec(
        kind=kind,
        target=args.target,
        source=args.source,
        side=side,
        lag=LagSpec(d_lag=args.d_lag),
        ar_order=args.ar_order,
    )
    value = oracle_measure(model, spec)
    print(format(value, ".12g"))
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirinfo",
        description="Directed-information causality measures and graph inference",
    )
    parser.add_argument("--version", action="version", version=f"dirinfo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample a synthetic system to CSV")
    sim.add_argument("--model", required=True, choices=["chain", "four_d", "var1"])
    sim.add_argument("--n", type=int, required=True, help="samples to keep after burn-in")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--params", help="JSON dict of generator parameter overrides")
    sim.add_argument("--rho", help="four_d noise correlations r1,r2,r3")
    sim.add_argument("--model-file", help="GaussianVarModel JSON (var1 only)")
    sim.add_argument("--force", action="store_true", help="overwrite existing data")
    sim.set_defaults(func=cmd_simulate)

    inf = sub.add_parser("infer", help="surrogate tests / graph inference")
    inf.add_argument("--config", required=True, help="JSON run configuration")
    inf.add_argument("--out", help="output directory (overrides config out_dir)")
    inf.add_argument("--k-sweep", help="rerun per k, e.g. 3,5,10")
    inf.add_argument("--threads", type=int, default=1)
    inf.add_argument("--force", action="store_true", help="overwrite mismatched report")
    inf.set_defaults(func=cmd_infer)

    orc = sub.add_parser("oracle", help="exact Gaussian VAR values and identity checks")
    orc.add_argument("--model", help="GaussianVarModel JSON file")
    orc.add_argument("--channels", type=int, default=4, help="random model size")
    orc.add_argument("--seed", type=int, default=0, help="random model seed")
    orc.add_argument("--kind", help="measure kind, e.g. cond_transfer_entropy")
    orc.add_argument("--target")
    orc.add_argument("--source")
    orc.add_argument("--side", help="comma-separated side channels")
    orc.add_argument("--d-lag", type=int, default=2)
    orc.add_argument("--ar-order", type=int, default=10)
    orc.add_argument(
        "--identities", action="store_true", help="run the exact identity checks"
    )
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (DataError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DirinfoError as exc:  # pragma: no cover - future subclasses
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
