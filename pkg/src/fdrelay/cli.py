"""
Command-line front end: ``fdrelay analytic|simulate|sweep``.

Scenario values come from an optional flat ``key = value`` config file and
are overridden by command-line flags. Gains are given in dB. Exit status is
0 on success, 2 for configuration errors and 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import analytic
from .core import ProtocolKind, SystemParams
from .protocol import simulate, sweep_rate

log = logging.getLogger("fdrelay")

FMT = "%.10g"


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    pi_sd_db: float = 10.0
    pi_sr_db: float = 20.0
    pi_rd_db: float = 20.0
    pi_rr_db: float = 10.0
    relay_power: float = 1.0
    rate: Optional[float] = None
    gamma_th_db: Optional[float] = 5.0
    block_len: int = 20
    delay: int = 2
    blocks: int = 1_000_000
    seed: int = 0
    workers: int = 1
    protocols: List[ProtocolKind] = field(
        default_factory=lambda: [ProtocolKind.DT, ProtocolKind.SDF, ProtocolKind.ISDF]
    )
    grid: Tuple[float, float, float] = (-10.0, 30.0, 0.1)
    rates: Optional[Tuple[float, float, float]] = None
    out: Optional[str] = None

    def params(self) -> SystemParams:
        try:
            return SystemParams.from_db(
                self.pi_sd_db,
                self.pi_sr_db,
                self.pi_rd_db,
                self.pi_rr_db,
                relay_power=self.relay_power,
                rate=self.rate,
                gamma_th_db=None if self.rate is not None else self.gamma_th_db,
                block_len=self.block_len,
                delay=self.delay,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid_db(self) -> np.ndarray:
        return _range_points(self.grid)

    def rate_list(self) -> np.ndarray:
        if self.rates is None:
            raise ConfigError("sweep needs a rate range (rates = min:max:step or --rates)")
        return _range_points(self.rates)


def _range_points(spec: Tuple[float, float, float]) -> np.ndarray:
    lo, hi, step = spec
    if lo == hi:
        return np.array([lo])
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # round away accumulated float noise so output text is stable
    return np.round(lo + step * np.arange(n), 12)


def _parse_range(text: str) -> Tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected min:max:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"non-numeric range {text!r}") from None
    if math.isnan(lo) or math.isnan(hi) or not (step > 0 and math.isfinite(step)):
        raise ConfigError(f"invalid range {text!r}: need numeric bounds and step > 0")
    if hi < lo:
        raise ConfigError(f"invalid range {text!r}: max < min")
    if lo != hi and not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"invalid range {text!r}: infinite bounds only allowed for a single point")
    return lo, hi, step


def _parse_protocols(text: str) -> List[ProtocolKind]:
    try:
        kinds = [ProtocolKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not kinds:
        raise ConfigError("empty protocol list")
    return kinds


def _finite(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


_CONVERTERS = {
    "pi_sd_db": _finite,
    "pi_sr_db": _finite,
    "pi_rd_db": _finite,
    "pi_rr_db": _finite,
    "relay_power": _finite,
    "rate": _finite,
    "gamma_th_db": _finite,
    "block_len": int,
    "delay": int,
    "blocks": int,
    "seed": int,
    "workers": int,
    "protocols": _parse_protocols,
    "grid": _parse_range,
    "rates": _parse_range,
    "out": str,
}


def _convert(key: str, raw: str, where: str):
    try:
        return _CONVERTERS[key](raw)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {key}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{where}: {key}: invalid value {raw!r} ({exc})") from None


def load_config(path: str) -> dict:
    """Parse a ``key = value`` file into a dict of converted values."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        key, raw = (t.strip() for t in line.split("=", 1))
        if key not in _CONVERTERS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        values[key] = _convert(key, raw, where)
    return values


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    values = load_config(args.config) if args.config else {}
    if args.rate is not None:
        values.pop("gamma_th_db", None)
    if args.gamma_th_db is not None:
        values.pop("rate", None)
    for key in _CONVERTERS:
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = _convert(key, raw, "command line")
    if "rate" in values and "gamma_th_db" in values:
        raise ConfigError("give only one of rate and gamma_th_db")
    cfg = replace(ScenarioConfig(), **values)
    if "rate" in values:
        cfg.gamma_th_db = None
    for name in ("blocks", "workers", "block_len", "delay"):
        if getattr(cfg, name) < 1:
            raise ConfigError(f"{name} must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    cfg.params()
    return cfg


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FMT % x
    return str(x)


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_fmt(v) for v in row] for row in rows)


def _config_echo(cfg: ScenarioConfig) -> List[Tuple[str, object]]:
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "protocols":
            v = ",".join(str(k) for k in v)
        elif f.name in ("grid", "rates") and v is not None:
            v = ":".join(FMT % t for t in v)
        out.append((f"config.{f.name}", v))
    return out


def cmd_analytic(cfg: ScenarioConfig) -> str:
    """Closed-form DT/SDF/ISDF curves over the dB grid."""
    p = cfg.params()
    g_db = cfg.grid_db()
    g = 10.0 ** (g_db / 10.0)
    cols = [
        g_db,
        np.atleast_1d(analytic.cdf_sd(g, p)),
        np.atleast_1d(analytic.cdf_sdf(g, p)),
        np.atleast_1d(analytic.cdf_isdf(g, p)),
        np.atleast_1d(analytic.pdf_sdf(g, p)),
        np.atleast_1d(analytic.pdf_isdf(g, p)),
    ]
    path = cfg.out or "analytic.csv"
    header = ["gamma_db", "cdf_dt", "cdf_sdf", "cdf_isdf", "pdf_sdf", "pdf_isdf"]
    _write_csv(path, header, zip(*cols))
    return path


def cmd_simulate(cfg: ScenarioConfig) -> str:
    """Monte Carlo run per protocol: one ECDF CSV each plus ``summary.txt``."""
    p = cfg.params()
    outdir = cfg.out or "simulate_out"
    os.makedirs(outdir, exist_ok=True)
    lines = _config_echo(cfg)
    for kind in cfg.protocols:
        rep = simulate(kind, p, cfg.blocks, cfg.seed, cfg.workers)
        dist = rep.distribution
        _write_csv(
            os.path.join(outdir, f"ecdf_{kind.value.lower()}.csv"),
            ["gamma_db", "ecdf"],
            zip(np.round(dist.edges_db, 12), dist.cdf()),
        )
        lines += [(f"{kind.value.lower()}.{k}", v) for k, v in rep.summary().items()]
        log.info("%s: sup_distance=%s", kind, rep.sup_distance)
    with open(os.path.join(outdir, "summary.txt"), "w", encoding="utf-8") as fh:
        for key, value in lines:
            if value is not None:
                fh.write(f"{key}={_fmt(value)}\n")
    return outdir


def cmd_sweep(cfg: ScenarioConfig) -> str:
    """Average SNR and cooperation percentage of SDF and ISDF versus rate."""
    base = cfg.params()
    rates = cfg.rate_list()
    if np.any(rates <= 0):
        raise ConfigError("rates must be positive")
    kinds = (ProtocolKind.SDF, ProtocolKind.ISDF)
    reps = {k: sweep_rate(k, base, rates, cfg.blocks, cfg.seed, cfg.workers) for k in kinds}
    rows = []
    for i, r in enumerate(rates):
        p = base.with_rate(float(r))
        row = [r]
        for kind in kinds:
            row += [reps[kind][i].mean_snr, analytic.avg_snr(kind, p)]
        for kind in kinds:
            row += [100.0 * reps[kind][i].relay_active_fraction, 100.0 * analytic.cooperation_fraction(kind, p)]
        rows.append(row)
    header = [
        "rate_bits",
        "avg_snr_sim_sdf",
        "avg_snr_ana_sdf",
        "avg_snr_sim_isdf",
        "avg_snr_ana_isdf",
        "coop_pct_sim_sdf",
        "coop_pct_ana_sdf",
        "coop_pct_sim_isdf",
        "coop_pct_ana_isdf",
    ]
    path = cfg.out or "sweep.csv"
    _write_csv(path, header, rows)
    return path


COMMANDS = {"analytic": cmd_analytic, "simulate": cmd_simulate, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value scenario file")
    common.add_argument("--pi-sd-db", dest="pi_sd_db")
    common.add_argument("--pi-sr-db", dest="pi_sr_db")
    common.add_argument("--pi-rd-db", dest="pi_rd_db")
    common.add_argument("--pi-rr-db", dest="pi_rr_db")
    common.add_argument("--relay-power", dest="relay_power")
    thr = common.add_mutually_exclusive_group()
    thr.add_argument("--rate", help="source rate, bits/s/Hz")
    thr.add_argument("--gamma-th-db", dest="gamma_th_db", help="outage threshold in dB")
    common.add_argument("--block-len", dest="block_len")
    common.add_argument("--delay")
    common.add_argument("--blocks")
    common.add_argument("--seed")
    common.add_argument("--workers")
    common.add_argument("--protocols", help="comma-separated: DT,SDF,ISDF,NonSelectiveFDR")
    common.add_argument("--grid", metavar="MIN:MAX:STEP", help="SNR grid in dB")
    common.add_argument("--rates", metavar="MIN:MAX:STEP")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fdrelay", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__.strip().splitlines()[0])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
        path = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"fdrelay: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"fdrelay: error: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
