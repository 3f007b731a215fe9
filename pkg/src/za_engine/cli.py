"""Command-line driver: runs verification suites and writes a JSON report."""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .cache import ModeCache
from .dva import check_dva_limit
from .fock import ModuleLabel
from .rational import Rational, to_rational
from .report import PreconditionError, skipped
from .trace import (ONE_POINT_LABEL, TWO_POINT_LABEL, check_character, check_trace_onepoint,
                    check_trace_twopoint, kz_check, wp_spot_check)
from .vop import (ModeProvider, check_eta, check_intertwining, check_screening,
                  check_sl2_relations, check_zalgebra)

SUITES = ("sl2-relations", "zalgebra", "screening", "intertwining", "eta", "dva-limit",
          "character", "trace-one", "trace-two", "kz")

DEFAULT_LABELS = (("1/2", "1"), ("1/3", "2/5"), ("1", "-4"), ("1/2", "-3"), ("1", "2"))
DVA_LEVELS = ("2", "1", "3", "1/2")

# suite -> (degree, modes)
DEFAULT_WINDOWS = {
    "sl2-relations": (6, 4),
    "zalgebra": (4, 3),
    "screening": (4, 3),
    "intertwining": (4, 3),
    "eta": (5, 3),
    "character": (20, 0),
    "trace-one": (12, 0),
    "trace-two": (6, 0),
    "kz": (6, 0),
    "dva-limit": (0, 0),
}
DEFAULT_ORDERS = {"x": 6, "T": 12, "zeta": 12, "h": 4, "contact": 12}

CONFIG_KEYS = {"suite", "j", "k", "degree", "modes", "orders", "cache", "out", "parallel",
               "float_wp", "m_count"}


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suite: str
    j: Rational | None = None
    k: Rational | None = None
    degree: int | None = None
    modes: int | None = None
    orders: dict = field(default_factory=dict)
    cache: str | None = None
    out: str | None = None
    parallel: int = 1
    float_wp: bool = False
    m_count: int = 1

    def __post_init__(self):
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if (self.j is None) != (self.k is None):
            raise ConfigError("--j and --k must be given together")
        if self.j is not None:
            self.j, self.k = parse_rational(self.j), parse_rational(self.k)
            try:
                ModuleLabel(self.j, self.k)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if self.parallel < 1:
            raise ConfigError("--parallel must be at least 1")
        unknown = set(self.orders) - set(DEFAULT_ORDERS)
        if unknown:
            raise ConfigError(f"unknown order keys {sorted(unknown)}")

    def echo(self) -> dict:
        return {
            "suite": self.suite,
            "j": None if self.j is None else str(self.j),
            "k": None if self.k is None else str(self.k),
            "degree": self.degree,
            "modes": self.modes,
            "orders": {**DEFAULT_ORDERS, **self.orders},
            "m_count": self.m_count,
            "float_wp": self.float_wp,
        }


def parse_rational(text) -> Rational:
    if isinstance(text, (int,)) or not isinstance(text, str):
        return to_rational(text)
    try:
        return to_rational(text.strip())
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{text!r} is not an exact rational 'p/q'") from exc


def parse_orders(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"order {item!r} must look like key=value")
        key, val = (s.strip() for s in item.split("=", 1))
        try:
            out[key] = int(val)
        except ValueError as exc:
            raise ConfigError(f"order {key} must be an integer") from exc
    return out


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; keys as on the command line with ``-`` replaced by ``_``."""
    parser = configparser.ConfigParser(interpolation=None)
    with open(path) as fh:
        parser.read_string("[config]\n" + fh.read())
    raw = {k.replace("-", "_"): v for k, v in parser["config"].items()}
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    out: dict = {}
    for key, val in raw.items():
        if key in ("degree", "modes", "parallel", "m_count"):
            out[key] = int(val)
        elif key == "float_wp":
            out[key] = val.strip().lower() in ("1", "true", "yes", "on")
        elif key == "orders":
            out[key] = parse_orders(val)
        else:
            out[key] = val.strip()
    return out


# -- task planning -------------------------------------------------------------

def _labels(cfg: SuiteConfig) -> list[ModuleLabel]:
    if cfg.j is not None:
        return [ModuleLabel(cfg.j, cfg.k)]
    return [ModuleLabel(parse_rational(j), parse_rational(k)) for j, k in DEFAULT_LABELS]


def plan(cfg: SuiteConfig) -> list[tuple]:
    """Ordered list of ``(suite, j, k)`` tasks; ``j``/``k`` are strings or None."""
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    tasks = []
    for suite in suites:
        if suite == "dva-limit":
            levels = [str(cfg.k)] if cfg.k is not None else list(DVA_LEVELS)
            tasks.extend((suite, None, k) for k in levels)
        elif suite in ("trace-one", "trace-two", "kz"):
            tasks.append((suite, None if cfg.j is None else str(cfg.j),
                          None if cfg.k is None else str(cfg.k)))
        else:
            tasks.extend((suite, str(l.j), str(l.k)) for l in _labels(cfg))
    if cfg.float_wp:
        tasks.append(("wp-spot", None, None))
    return tasks


def _window(cfg: SuiteConfig, suite: str) -> tuple[int, int]:
    N, M = DEFAULT_WINDOWS.get(suite, (0, 0))
    return (cfg.degree if cfg.degree is not None else N, cfg.modes if cfg.modes is not None else M)


def run_task(cfg: SuiteConfig, task: tuple) -> dict:
    suite, j, k = task
    orders = {**DEFAULT_ORDERS, **cfg.orders}
    N, M = _window(cfg, suite)
    provider = ModeProvider(ModeCache(cfg.cache) if cfg.cache else None)
    params = {"j": j, "k": k}
    try:
        label = ModuleLabel(parse_rational(j), parse_rational(k)) if j is not None else None
        if suite == "sl2-relations":
            rep = check_sl2_relations(label, N, M, provider)
        elif suite == "zalgebra":
            rep = check_zalgebra(label, N, M, provider)
        elif suite == "screening":
            rep = check_screening(label, N, M, cfg.m_count, provider, require_residue=False)
        elif suite == "intertwining":
            rep = check_intertwining(label, N, M, provider)
        elif suite == "eta":
            rep = check_eta(label, N, M, provider)
        elif suite == "dva-limit":
            rep = check_dva_limit(parse_rational(k), orders["zeta"], orders["h"], orders["contact"])
        elif suite == "character":
            rep = check_character(label, N)
        elif suite == "trace-one":
            _fixed_label(label, ONE_POINT_LABEL)
            rep = check_trace_onepoint(N)
        elif suite == "trace-two":
            _fixed_label(label, TWO_POINT_LABEL)
            rep = check_trace_twopoint(N, orders["T"], orders["x"])
        elif suite == "kz":
            _fixed_label(label, TWO_POINT_LABEL)
            rep = kz_check(N, orders["T"], orders["x"])
        elif suite == "wp-spot":
            rep = wp_spot_check()
        else:
            raise ConfigError(f"unknown suite {suite!r}")
    except PreconditionError as exc:
        rep = skipped(suite, params, str(exc))
    return rep.to_dict()


def _fixed_label(label, required: ModuleLabel):
    if label is not None and label != required:
        raise PreconditionError(f"this trace identity is stated only on F{required}")


def _run(args):
    return run_task(*args)


def run_suite(cfg: SuiteConfig) -> dict:
    tasks = plan(cfg)
    t0 = time.perf_counter()
    if cfg.parallel > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            records = list(pool.map(_run, [(cfg, t) for t in tasks]))
    else:
        records = [run_task(cfg, t) for t in tasks]
    gating = [r for r in records if not r["optional"]]
    verdict = "fail" if any(r["verdict"] == "fail" for r in gating) else "pass"
    return {
        "tool": "za-engine",
        "version": __version__,
        "config": cfg.echo(),
        "verdict": verdict,
        "records": records,
        "wall_time": round(time.perf_counter() - t0, 3),
    }


def strip_times(report: dict) -> dict:
    """Copy of a report without wall-time fields, for determinism comparisons."""
    out = {k: v for k, v in report.items() if k != "wall_time"}
    out["records"] = [{k: v for k, v in r.items() if k != "wall_time"} for r in report["records"]]
    return out


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="za-engine", description=__doc__)
    p.add_argument("suite", nargs="?", help=" | ".join(SUITES + ("all", "cache")))
    p.add_argument("action", nargs="?", help="for 'cache': warm | verify | purge")
    p.add_argument("--config", help="flat key = value file with the options below")
    p.add_argument("--j", help="exact rational, e.g. 1/2")
    p.add_argument("--k", help="exact rational, e.g. -4")
    p.add_argument("--degree", type=int, help="degree cutoff N")
    p.add_argument("--modes", type=int, help="mode range M")
    p.add_argument("--orders", help="series orders, e.g. x=6,T=12,zeta=12,h=4,contact=12")
    p.add_argument("--m-count", type=int, dest="m_count", help="number of screening residues")
    p.add_argument("--cache", help="mode matrix cache directory")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--parallel", type=int, help="worker processes")
    p.add_argument("--float-wp", action="store_true", dest="float_wp", default=None,
                   help="add the optional floating-point Weierstrass check")
    p.add_argument("--sample", type=int, default=10, help="entries checked by 'cache verify'")
    return p


def _config_from(args) -> dict:
    values = read_config_file(args.config) if args.config else {}
    for key in ("j", "k", "degree", "modes", "cache", "out", "parallel", "float_wp", "m_count"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if args.orders is not None:
        values["orders"] = parse_orders(args.orders)
    return values


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    for r in report.get("records", []):
        where = " ".join(f"{k}={r['params'][k]}" for k in ("j", "k") if r["params"].get(k) is not None)
        reason = f" ({r['skipped_reason']})" if r["skipped_reason"] else ""
        print(f"{r['verdict'].upper():7s} {r['name']} {where} [{r['checked']} identities, "
              f"{r['wall_time']:.1f}s]{reason}")
    if "action" in report:
        print(f"cache {report['action']}: {report['entries']} entries, {len(report['mismatches'])} mismatches")
        for name in report["mismatches"]:
            print(f"MISMATCH {name}")
    print(f"overall: {report['verdict']}")


def cache_ops(action: str, cfg: SuiteConfig, sample: int = 10) -> dict:
    if not cfg.cache:
        raise ConfigError("cache operations need --cache DIR")
    cache = ModeCache(cfg.cache)
    N, M = _window(cfg, "intertwining")
    t0 = time.perf_counter()
    if action == "warm":
        n = cache.warm(_labels(cfg), N, M)
        body = {"action": "warm", "entries": n, "mismatches": []}
    elif action == "verify":
        bad = cache.verify(sample)
        body = {"action": "verify", "entries": len(cache.entries()), "mismatches": bad}
    elif action == "purge":
        body = {"action": "purge", "entries": cache.purge(), "mismatches": []}
    else:
        raise ConfigError(f"unknown cache action {action!r}")
    return {"tool": "za-engine", "version": __version__, "config": cfg.echo(), **body,
            "verdict": "fail" if body["mismatches"] else "pass",
            "records": [], "wall_time": round(time.perf_counter() - t0, 3)}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = _config_from(args)
        suite = args.suite or values.pop("suite", None)
        values.pop("suite", None)
        if suite is None:
            raise ConfigError("no suite given")
        if suite == "cache":
            cfg = SuiteConfig("all", **values)
            report = cache_ops(args.action or "", cfg, args.sample)
        else:
            cfg = SuiteConfig(suite, **values)
            report = run_suite(cfg)
    except (ConfigError, OSError) as exc:
        print(f"za-engine: {exc}", file=sys.stderr)
        return 2
    _emit(report, cfg.out)
    return 0 if report["verdict"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
