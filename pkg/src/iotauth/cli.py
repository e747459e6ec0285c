"""Command-line front end.

Exit status: 0 on success, 2 on configuration or usage errors, 1 on runtime
failures.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from pathlib import Path

import yaml

from . import sim
from .config import DEFAULTS_PATH, FORMAT_VERSION, ScenarioConfig, load_config
from .errors import ConfigError


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        t = dt.datetime.fromtimestamp(int(epoch), tz=dt.timezone.utc)
    else:
        t = dt.datetime.now(tz=dt.timezone.utc).replace(microsecond=0)
    return t.isoformat()


def _stamp_line(cfg: ScenarioConfig) -> str:
    return f"# iotauth format={FORMAT_VERSION} config_sha256={cfg.digest()} rng_seed={cfg.rng_seed}"


def _parse_overrides(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(item, "override must look like key=value")
        out[key.strip()] = yaml.safe_load(value)
    return out


def _load(args) -> ScenarioConfig:
    overrides = _parse_overrides(args.set)
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    path = Path(args.config)
    if not path.is_file():
        raise ConfigError(str(path), "config file not found")
    return load_config(path, overrides)


def _envelope(args, cfg: ScenarioConfig, body: dict) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "generated_at": _timestamp(),
        "config_hash": cfg.digest(),
        "rng_seed": cfg.rng_seed,
        "manifest": {
            "command": args.command if args.command != "simulate" else f"simulate {args.kind}",
            "config_path": str(args.config),
            "rng_seed_override": args.seed,
            "output_dir": str(getattr(args, "out", "")),
        },
        "config": cfg.to_dict(),
        "result": body,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    p = out / name
    p.write_text(text, encoding="utf-8")
    return p


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    stamp = _stamp_line(cfg)
    if args.kind == "lightweight":
        report = sim.run_lightweight_scenario(cfg)
        _write(out, "transcripts.csv", report.transcript_csv(stamp))
    else:
        report = sim.run_holistic_scenario(cfg, parallel=args.parallel)
        _write(out, "trajectories.csv", report.trajectory_csv(stamp))
    p = _write(out, "report.json", _envelope(args, cfg, report.to_dict()))
    print(f"wrote {p}")
    return 0


def _parse_grid(text: str) -> list[int]:
    try:
        grid = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("--n", f"expected comma-separated integers, got {text!r}") from None
    if not grid:
        raise ConfigError("--n", "grid must not be empty")
    if any(n < 0 for n in grid):
        raise ConfigError("--n", "grid values must be >= 0")
    return grid


def cmd_compare(args) -> int:
    grid = _parse_grid(args.n)
    cfg = _load(args)
    out = Path(args.out)
    table = sim.compare_costs(cfg, grid)
    _write(out, "comparison.csv", table.to_csv(_stamp_line(cfg)))
    p = _write(out, "comparison_summary.json", _envelope(args, cfg, table.summary()))
    s = table.summary()
    print(f"crossover n0 = {s['crossover_n0']}")
    for scheme, ok in s["privacy_leak_free"].items():
        print(f"privacy_leak_free[{scheme}]: {str(ok).lower()}")
    print(f"wrote {p}")
    return 0


def cmd_quantize_demo(args) -> int:
    cfg = _load(args)
    d = sim.quantize_demo(cfg)
    b = d["boundary"]
    print(f"boundary: {b['kernel']} kernel, gamma={b['gamma']}, {b['support_vectors']} support vectors, "
          f"bias={b['bias']:.4f}, {b['size_bits']} bits on air")
    print(f"guard band: kept {d['kept']} / dropped {d['dropped']} of {d['rounds']} rounds")
    print(f"bit disagreement: svm+guard={d['svm_disagreement']:.4f} rss_baseline={d['rss_disagreement']:.4f}")
    eve = d["eve_bit_agreement"]
    print(f"eve bit agreement: {'n/a' if eve is None else f'{eve:.4f}'}")
    print(f"seed establishment: {json.dumps(d['seed'], sort_keys=True)}")
    return 0


def cmd_defaults(args) -> int:
    sys.stdout.write(DEFAULTS_PATH.read_text(encoding="utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iotauth", description="IoT fast authentication / progressive authorization simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("config", help="scenario YAML file")
        sp.add_argument("--seed", type=int, default=None, help="override rng_seed")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a dotted config key")
        if out:
            sp.add_argument("--out", default="out", help="output directory (default: ./out)")

    s = sub.add_parser("simulate", help="run a lightweight or holistic scenario")
    s.add_argument("kind", choices=["lightweight", "holistic"])
    common(s)
    s.add_argument("--parallel", action="store_true", help="fan out sweep points over processes")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="cost comparison against the key-generation baseline")
    common(c)
    c.add_argument("--n", default="1,10,100,1000", help="comma-separated authentication counts")
    c.set_defaults(func=cmd_compare)

    q = sub.add_parser("quantize-demo", help="walk one link through probe/train/quantize/handshake")
    common(q, out=False)
    q.set_defaults(func=cmd_quantize_demo)

    d = sub.add_parser("defaults", help="print the defaults reference file")
    d.set_defaults(func=cmd_defaults)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and map to exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
