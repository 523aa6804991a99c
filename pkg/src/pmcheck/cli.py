"""Command line runner.

Usage::

    pmcheck all --out reports/
    pmcheck four-star --tower p3-zeta7plus
    pmcheck all --config run.toml --checks claim,hio --workers 4
    pmcheck cache build | verify | clear

Exit status: 0 when every selected check passes, 1 when some check fails,
2 for configuration or internal errors.  Reports are written as JSON lines
(``reports.jsonl``), a CSV summary (``summary.csv``) and run metadata
(``run.json``, the only file carrying timings).  The cache directory is taken
from ``PMCHECK_CACHE_DIR`` and defaults to ``~/.cache/pmcheck``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from . import congruence as cg
from .arith import is_prime, padic_valuation
from .grouplat import MoebiusTable, enumerate_subgroups, load_catalog, moebius_table
from .lvalues import (
    CACHE_FILE,
    cache_dir,
    install_bernoulli_table,
    read_bernoulli_cache,
    reset_bernoulli_table,
    verify_bernoulli_cache,
    write_bernoulli_cache,
)

CHECKS = ("claim", "hio", "dr", "pseudomeasure", "special-g", "norm-compat", "four-star", "prop9", "theorem")
CLAIM_R = (Fraction(2), Fraction(-2), Fraction(3), Fraction(-3), Fraction(5), Fraction(7), Fraction(1, 3), Fraction(3, 5))
MOEBIUS_CACHE = "moebius.json"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    towers: list[str] = field(default_factory=lambda: sorted(cg.TOWERS))
    p: int | None = None
    levels: list[int] | None = None  # None: the sweep p^j * m for j <= max_exponent
    max_exponent: int = 3
    ks: list[int] = field(default_factory=lambda: [2, 4])
    alpha_max: int = 5
    seed: int = 0
    checks: list[str] = field(default_factory=lambda: list(CHECKS))
    out: str | None = None
    workers: int = 1
    dr_mode: str = "both"  # literal, even, both
    cocycle_samples: int = 24
    random_functions: int = 3
    caps: dict = field(default_factory=lambda: {"alpha": 8, "group_order": 64, "level": 1000})

    def validate(self, where: "_Locator | None" = None) -> "RunConfig":
        loc = where or _Locator("")

        def bad(key, msg):
            raise ConfigError(f"{loc.describe(key)}: {msg}")

        for name in self.towers:
            if name not in cg.TOWERS:
                bad("towers", f"unknown tower {name!r}; known: {', '.join(sorted(cg.TOWERS))}")
        if self.p is not None:
            if not isinstance(self.p, int) or not is_prime(self.p):
                bad("p", f"{self.p!r} is not a prime")
            if self.p not in {cg.TOWERS[t][0] for t in cg.TOWERS}:
                bad("p", f"no shipped tower has p = {self.p}")
        for c in self.checks:
            if c not in CHECKS:
                bad("checks", f"unknown check {c!r}; known: {', '.join(CHECKS)}")
        for k in self.ks:
            if not isinstance(k, int) or k < 2 or k % 2:
                bad("ks", f"k = {k!r} must be an even integer >= 2")
        if not isinstance(self.alpha_max, int) or not 1 <= self.alpha_max <= self.caps.get("alpha", 8):
            bad("alpha_max", f"must be an integer in [1, {self.caps.get('alpha', 8)}]")
        if not isinstance(self.workers, int) or self.workers < 1:
            bad("workers", "must be a positive integer")
        if self.dr_mode not in ("literal", "even", "both"):
            bad("dr_mode", "must be one of literal, even, both")
        if not isinstance(self.max_exponent, int) or self.max_exponent < 1:
            bad("max_exponent", "must be a positive integer")
        if self.levels is not None:
            for lv in self.levels:
                if not isinstance(lv, int) or lv < 2 or lv > self.caps.get("level", 1000):
                    bad("levels", f"level {lv!r} outside [2, {self.caps.get('level', 1000)}]")
        return self

    def selected_towers(self) -> list[str]:
        return [t for t in self.towers if self.p is None or cg.TOWERS[t][0] == self.p]


class _Locator:
    """Maps config keys to line numbers for diagnostics."""

    def __init__(self, text: str, path: str = "<config>"):
        self.path = path
        self.lines = {}
        for i, line in enumerate(text.splitlines(), 1):
            m = re.match(r"\s*([A-Za-z_][\w-]*)\s*=", line)
            if m and m.group(1) not in self.lines:
                self.lines[m.group(1)] = i

    def describe(self, key: str) -> str:
        line = self.lines.get(key)
        return f"{self.path}:{line}: field '{key}'" if line else f"{self.path}: field '{key}'"


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_mapping(raw, _Locator(text, str(path)))


def config_from_mapping(raw: dict, loc: "_Locator | None" = None) -> RunConfig:
    loc = loc or _Locator("")
    cfg = RunConfig()
    known = set(RunConfig.__dataclass_fields__)
    types = {
        "towers": list, "p": int, "levels": list, "max_exponent": int, "ks": list, "alpha_max": int,
        "seed": int, "checks": list, "out": str, "workers": int, "dr_mode": str,
        "cocycle_samples": int, "random_functions": int, "caps": dict,
    }
    for key, val in raw.items():
        if key not in known:
            raise ConfigError(f"{loc.describe(key)}: unknown field")
        if isinstance(val, bool) or not isinstance(val, types[key]):
            raise ConfigError(f"{loc.describe(key)}: expected {types[key].__name__}, got {type(val).__name__}")
        if key == "caps":
            val = {**cfg.caps, **val}
        setattr(cfg, key, val)
    return cfg.validate(loc)


# ---------------------------------------------------------------------------
# caches


def build_caches(directory: Path) -> list[str]:
    directory.mkdir(parents=True, exist_ok=True)
    write_bernoulli_cache(directory / CACHE_FILE)
    tables = {}
    for entry in load_catalog():
        lat = enumerate_subgroups(entry.group)
        mu = moebius_table(lat)
        tables[entry.name] = [[sorted(s), mu[s]] for s in lat]
    (directory / MOEBIUS_CACHE).write_text(json.dumps({"format": "pmcheck-moebius/1", "groups": tables}, indent=1) + "\n")
    return [CACHE_FILE, MOEBIUS_CACHE]


def verify_caches(directory: Path) -> list[str]:
    """Human-readable list of problems; empty when the caches are clean or absent."""
    problems = []
    bfile = directory / CACHE_FILE
    if bfile.exists():
        try:
            for k, cached, truth in verify_bernoulli_cache(bfile):
                problems.append(f"{bfile}: B_{k} cached as {cached}, recomputed {truth}")
        except ValueError as exc:
            problems.append(str(exc))
    mfile = directory / MOEBIUS_CACHE
    if mfile.exists():
        cached = _read_moebius_cache(mfile)
        for entry in load_catalog():
            if entry.name not in cached:
                continue
            fresh = moebius_table(enumerate_subgroups(entry.group))
            for sub, val in cached[entry.name].items():
                if fresh.get(sub) != val:
                    problems.append(f"{mfile}: {entry.name} subgroup {sorted(sub)} cached mu {val}, recomputed {fresh.get(sub)}")
    return problems


def clear_caches(directory: Path) -> list[str]:
    removed = []
    for name in (CACHE_FILE, MOEBIUS_CACHE):
        f = directory / name
        if f.exists():
            f.unlink()
            removed.append(name)
    return removed


def _read_moebius_cache(path: Path) -> dict[str, dict[frozenset[int], int]]:
    raw = json.loads(path.read_text())
    return {name: {frozenset(s): v for s, v in rows} for name, rows in raw["groups"].items()}


def _install_caches(directory: Path) -> dict:
    """Load cached values into the running process; returns provenance metadata."""
    meta = {"bernoulli": "computed", "moebius": "computed"}
    bfile = directory / CACHE_FILE
    if bfile.exists():
        install_bernoulli_table(read_bernoulli_cache(bfile))
        meta["bernoulli"] = str(bfile)
    if (directory / MOEBIUS_CACHE).exists():
        meta["moebius"] = str(directory / MOEBIUS_CACHE)
    return meta


# ---------------------------------------------------------------------------
# jobs


@dataclass(frozen=True)
class Job:
    check: str
    tower: str | None
    params: tuple  # sorted (key, value) pairs, hashable and picklable

    def kwargs(self) -> dict:
        return dict(self.params)


def plan_jobs(cfg: RunConfig) -> list[Job]:
    jobs: list[Job] = []
    towers = cfg.selected_towers()
    ks = tuple(cfg.ks)
    for check in cfg.checks:
        if check in ("claim", "hio"):
            for entry in load_catalog():
                if entry.group.order > cfg.caps.get("group_order", 64):
                    continue
                if cfg.p is not None and entry.p != cfg.p:
                    continue
                if check == "claim":
                    for r in CLAIM_R:
                        if padic_valuation(r, entry.p) == 0:
                            jobs.append(Job("claim", None, (("group", entry.name), ("r", str(r)))))
                else:
                    jobs.append(Job("hio", None, (("group", entry.name),)))
            continue
        for tname in towers:
            tower = cg.build_tower(tname)
            if check in ("dr", "pseudomeasure"):
                for tf in tower.fields:
                    levels = cfg.levels or cg.sweep_levels(tower, tf.field, cfg.max_exponent)
                    for lv in levels:
                        if tf.field.m > 1 and lv % tf.field.m:
                            continue
                        base = (("field", tf.field.name), ("ks", ks), ("level", lv))
                        if check == "dr":
                            modes = {"literal": [False], "even": [True], "both": [False, True]}[cfg.dr_mode]
                            if tower.p != 2 and cfg.dr_mode == "both":
                                modes = [False]
                            for even in modes:
                                jobs.append(Job("dr", tname, base + (("even", even),)))
                        else:
                            jobs.append(Job("pseudomeasure", tname, base + (("seed", cfg.seed), ("samples", cfg.cocycle_samples))))
            elif check == "prop9":
                jobs.append(Job("prop9", tname, (("alpha_max", cfg.alpha_max), ("ks", ks), ("random_functions", cfg.random_functions), ("seed", cfg.seed))))
                for tf in tower.fields:
                    for a in range(1, cfg.alpha_max + 1):
                        jobs.append(Job("iota", tname, (("alpha", a), ("field", tf.field.name))))
            elif check in ("four-star", "theorem"):
                jobs.append(Job(check, tname, (("ks", ks), ("random_functions", cfg.random_functions), ("seed", cfg.seed))))
            else:
                jobs.append(Job(check, tname, ()))
    return jobs


def _field(tower: cg.TowerSpec, name: str):
    for tf in tower.fields:
        if tf.field.name == name:
            return tf
    raise ConfigError(f"tower {tower.name} has no field {name!r}")


def _catalog_group(name: str):
    return next(e for e in load_catalog() if e.name == name)


def _cached_moebius(directory: Path, name: str, group) -> MoebiusTable:
    mfile = directory / MOEBIUS_CACHE
    lat = enumerate_subgroups(group)
    if mfile.exists():
        cached = _read_moebius_cache(mfile).get(name)
        if cached is not None:
            return MoebiusTable(lat, cached)
    return moebius_table(lat)


def run_job(job: Job, cache: str | None = None) -> tuple[dict, float]:
    """Execute one job; returns its report record and its elapsed time."""
    directory = Path(cache) if cache else cache_dir()
    if cache is not None:
        _install_caches(directory)
    kw = job.kwargs()
    if job.check == "claim":
        entry = _catalog_group(kw["group"])
        rep = cg.check_claim(entry.group, Fraction(kw["r"]), _cached_moebius(directory, entry.name, entry.group))
    elif job.check == "hio":
        rep = cg.check_hio(_catalog_group(kw["group"]).group)
    else:
        tower = cg.build_tower(job.tower)
        rep = _run_tower_job(job.check, tower, kw)
    record = rep.as_record()
    record["job"] = {"check": job.check, "tower": job.tower, **{k: _jsonable(v) for k, v in kw.items()}}
    return record, rep.elapsed


def _run_tower_job(check: str, tower: cg.TowerSpec, kw: dict) -> cg.CheckReport:
    if check == "dr":
        F = _field(tower, kw["field"]).field
        return cg.check_dr_integrality(tower, F, kw["level"], ks=kw["ks"], even=kw["even"])
    if check == "pseudomeasure":
        F = _field(tower, kw["field"]).field
        lv = kw["level"]
        parts = [
            cg.check_k_independence(tower, F, lv, ks=kw["ks"]),
            cg.check_cocycle(tower, F, lv, samples=kw["samples"], seed=kw["seed"]),
        ]
        if lv * tower.p <= 4 * tower.level:
            parts.append(cg.check_level_compatibility(tower, F, lv, seed=kw["seed"]))
        return _merge("pseudomeasure", {"tower": tower.name, "field": F.name, "level": lv}, parts)
    if check == "special-g":
        return cg.select_special_g(tower)[1]
    if check == "norm-compat":
        return cg.check_norm_compat(tower)
    if check in ("four-star", "theorem", "prop9"):
        fns = cg.even_test_functions(tower, extra=kw["random_functions"], seed=kw["seed"])
        if check == "four-star":
            return cg.check_four_star(tower, ks=kw["ks"], functions=fns)
        if check == "theorem":
            return cg.check_theorem(tower, ks=kw["ks"])
        return cg.check_prop9(tower, alphas=range(1, kw["alpha_max"] + 1), ks=kw["ks"], functions=fns)
    if check == "iota":
        return cg.check_iota_bijection(tower, _field(tower, kw["field"]), kw["alpha"])
    raise ConfigError(f"unknown check {check!r}")


def _merge(name: str, params: dict, parts: Sequence[cg.CheckReport]) -> cg.CheckReport:
    failed = [r for r in parts if not r.passed]
    witness = {"failed": failed[0].name, **failed[0].witness} if failed else {}
    rep = cg.CheckReport(name, params, not failed, witness, note="; ".join(f"{r.name}: {'pass' if r.passed else 'fail'}" for r in parts))
    rep.elapsed = sum(r.elapsed for r in parts)
    return rep


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    return v


# ---------------------------------------------------------------------------
# orchestration


@dataclass
class ReportBundle:
    metadata: dict
    records: list[dict]
    timings: list[float]

    @property
    def counts(self) -> dict:
        passed = sum(r["verdict"] == "pass" for r in self.records)
        return {"total": len(self.records), "passed": passed, "failed": len(self.records) - passed}

    @property
    def ok(self) -> bool:
        return self.counts["failed"] == 0

    def jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "tower", "params", "verdict", "vacuous", "witness"])
        for r in self.records:
            job = dict(r["job"])
            w.writerow([job.pop("check"), job.pop("tower") or "", json.dumps(job, sort_keys=True), r["verdict"], r["vacuous"], json.dumps(r["witness"], sort_keys=True)])
        return buf.getvalue()

    def write(self, out: Path) -> None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "reports.jsonl").write_text(self.jsonl())
        (out / "summary.csv").write_text(self.csv())
        meta = {**self.metadata, "counts": self.counts, "timings": self.timings}
        (out / "run.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def run(cfg: RunConfig) -> ReportBundle:
    cfg.validate()
    start = time.perf_counter()
    directory = cache_dir()
    sources = _install_caches(directory)
    try:
        jobs = plan_jobs(cfg)
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(run_job, jobs, [str(directory)] * len(jobs)))
        else:
            results = [run_job(j, None) for j in jobs]
    finally:
        reset_bernoulli_table()
    records = [r for r, _ in results]
    metadata = {
        "pmcheck": __version__,
        "python": platform.python_version(),
        "config": {k: _jsonable(v) for k, v in vars(cfg).items()},
        "caches": sources,
        "wall_time": time.perf_counter() - start,
    }
    return ReportBundle(metadata, records, [t for _, t in results])


# ---------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML run configuration")
    common.add_argument("--tower", metavar="NAME", action="append", help=f"tower to check (repeatable): {', '.join(sorted(cg.TOWERS))}")
    common.add_argument("--checks", metavar="LIST", help="comma-separated checks (with 'all')")
    common.add_argument("--workers", type=int, metavar="N")
    common.add_argument("--out", metavar="DIR", help="write reports.jsonl, summary.csv and run.json here")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--quiet", action="store_true", help="only print the summary line")
    ap = argparse.ArgumentParser(prog="pmcheck", description="Exact checks of abelian pseudomeasure congruences.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in CHECKS + ("all",):
        sub.add_parser(name, parents=[common], help=f"run the {name} checks" if name != "all" else "run every check")
    cache = sub.add_parser("cache", help="manage the Bernoulli and Moebius caches")
    cache.add_argument("action", choices=["build", "verify", "clear"])
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.command != "all":
        cfg.checks = [args.command]
    elif args.checks is not None:
        cfg.checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    if args.tower:
        cfg.towers = args.tower
    if args.workers is not None:
        cfg.workers = args.workers
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    return cfg.validate(_Locator("", "<command line>"))


def _cache_command(action: str) -> int:
    directory = cache_dir()
    if action == "build":
        for name in build_caches(directory):
            print(f"wrote {directory / name}")
        return EXIT_OK
    if action == "verify":
        problems = verify_caches(directory)
        for line in problems:
            print(line)
        print("cache clean" if not problems else f"{len(problems)} corrupt entries")
        return EXIT_OK if not problems else EXIT_FAIL
    removed = clear_caches(directory)
    print(f"removed {', '.join(removed)}" if removed else "nothing to clear")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "cache":
            return _cache_command(args.action)
        cfg = _config_from_args(args)
        bundle = run(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"pmcheck: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # internal error, reported rather than raised
        print(f"pmcheck: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        bundle.write(Path(cfg.out))
    if not args.quiet:
        for r in bundle.records:
            job = dict(r["job"])
            label = ", ".join(f"{k}={v}" for k, v in job.items() if k not in ("check",) and v is not None)
            line = f"{r['verdict'].upper():4} {job['check']:<14} {label}"
            if r["verdict"] == "fail":
                line += f"  witness={json.dumps(r['witness'], sort_keys=True)}"
            print(line)
    c = bundle.counts
    print(f"{c['passed']}/{c['total']} checks passed")
    return EXIT_OK if bundle.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
