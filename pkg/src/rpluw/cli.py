"""Command-line harness: ``rpluw run | sweep | weights | channel``."""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, channel, config, engine, metrics, swara
from .config import ConfigError
from .protocol import PROTOCOLS, ProtocolError

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_IO = 0, 2, 3, 4
SEED_ENV = "RPLUW_SEED"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers

def expand_axis(text: str, name: str = "axis") -> list[float]:
    """``a:b:step`` (inclusive), ``a,b,c`` or a single number."""
    text = text.strip()
    if not text:
        raise UsageError(f"{name}: empty axis")
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise UsageError(f"{name}: expected start:stop:step, got {text!r}")
            a, b, step = parts
            if step <= 0 or b < a:
                raise UsageError(f"{name}: need step > 0 and stop >= start in {text!r}")
            n = int(round((b - a) / step)) + 1
            vals = [round(a + i * step, 12) for i in range(n)]
            return [v for v in vals if v <= b + 1e-9]
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"{name}: not a number list: {text!r}") from None
    if not vals:
        raise UsageError(f"{name}: empty axis")
    return vals


def _int_axis(text, name):
    vals = expand_axis(text, name)
    if any(v != int(v) or v < 1 for v in vals):
        raise UsageError(f"{name}: expected positive integers, got {text!r}")
    return [int(v) for v in vals]


def _protocol_list(text):
    names = [p.strip() for p in text.split(",") if p.strip()]
    if not names:
        raise UsageError("--protocols: empty axis")
    bad = [p for p in names if p not in PROTOCOLS]
    if bad:
        raise UsageError(f"--protocols: unknown variant(s) {', '.join(bad)}; choose from {', '.join(PROTOCOLS)}")
    return names


def base_seed(cli_seed, cfg) -> int:
    env = os.environ.get(SEED_ENV, "").strip()
    if env:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    elif cli_seed is not None:
        seed = cli_seed
    else:
        seed = cfg.rng_seed
    if seed < 0:
        raise UsageError("seed must be >= 0")
    return seed


def _load_config(args):
    if args.config:
        return config.load(args.config)
    return config.preset(args.preset)


def _jobs(n):
    if n is None or n == 1:
        return 1
    if n < 0:
        raise UsageError("--jobs must be >= 0")
    return n or (os.cpu_count() or 1)


# ---------------------------------------------------------------- running

def _run_one(task):
    cfg, seed, protocol, trace_path = task
    sim = engine.Simulation(cfg, seed=seed, protocol=protocol, trace=trace_path is not None)
    report = sim.run()
    if trace_path is not None:
        sim.write_trace(trace_path)
    report.delays = []  # not needed past this point; keeps inter-process traffic small
    return report


def _execute(tasks, jobs):
    """Yield reports in task order, running up to ``jobs`` at a time."""
    if jobs <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield _run_one(t)
        return
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        yield from pool.map(_run_one, tasks)


def _trace_path(trace, seed, many):
    if trace is None:
        return None
    p = Path(trace)
    return p.with_name(f"{p.stem}.seed{seed}{p.suffix or '.tsv'}") if many else p


def _finish(out: Path, plots: bool, figure):
    rows = metrics.read_rows(out)
    agg = metrics.write_aggregate(rows, out)
    print(f"wrote {out} ({len(rows)} rows) and {agg}")
    if plots and rows:
        for p in figure(rows, out):
            print(f"wrote {p}")


def cmd_run(args) -> int:
    cfg = _load_config(args)
    if args.protocol:
        cfg = cfg.replace(protocol=args.protocol)
    if args.weights:
        cfg = cfg.replace(weights=args.weights)
    if args.duration is not None:
        cfg = cfg.replace(sim_duration_s=args.duration)
    iterations = args.iterations or cfg.iterations
    if iterations < 1:
        raise UsageError("--iterations must be >= 1")
    seed0 = base_seed(args.seed, cfg)
    engine.resolve_weights(cfg, cfg.protocol)  # fail before any run starts
    seeds = [seed0 + i for i in range(iterations)]
    tasks = [(cfg, s, cfg.protocol, _trace_path(args.trace, s, iterations > 1)) for s in seeds]
    out = Path(args.out)
    with metrics.RowWriter(out) as w:
        for report in _execute(tasks, _jobs(args.jobs)):
            w.write(report)
    _finish(out, args.plots, lambda rows, path: [_run_figure(rows, path)])
    return EXIT_OK


def _run_figure(rows, path):
    from . import plotting

    return plotting.run_figure(rows, path)


def _sweep_figures(rows, path):
    from . import plotting

    return plotting.sweep_figures(rows, path)


def cmd_sweep(args) -> int:
    base = _load_config(args)
    nodes = _int_axis(args.nodes, "--nodes")
    lambdas = expand_axis(args.lam, "--lambda")
    protocols = _protocol_list(args.protocols)
    fractions = expand_axis(args.mobile_fraction, "--mobile-fraction") if args.mobile_fraction else [base.mobile_fraction]
    iterations = args.iterations or base.iterations
    if args.duration is not None:
        base = base.replace(sim_duration_s=args.duration)
    seed0 = base_seed(args.seed, base)
    tasks = []
    for n, lam, mf, proto in itertools.product(nodes, lambdas, fractions, protocols):
        cfg = base.replace(name=f"{base.name}-n{n}-l{lam:g}-m{mf:g}", node_count=n, traffic_rate_lambda=lam,
                           mobile_fraction=mf, positions=(), mobile_ids=None)
        engine.resolve_weights(cfg, proto)
        for i in range(iterations):
            tasks.append((cfg, seed0 + i, proto, None))
    out = Path(args.out)
    with metrics.RowWriter(out) as w:
        for report in _execute(tasks, _jobs(args.jobs)):
            w.write(report)
    _finish(out, args.plots, _sweep_figures)
    return EXIT_OK


# ---------------------------------------------------------------- weights

def _open_out(dest):
    if dest in (None, "-"):
        return sys.stdout, False
    return open(dest, "w", newline=""), True


def cmd_weights(args) -> int:
    if bool(args.assessment) == bool(args.preset):
        raise UsageError("give exactly one of an assessment file or --preset")
    if args.preset:
        w = swara.preset_weights(args.preset)
        values = swara.PRESET_TEXT[w.provenance]
        provenance = w.provenance
    else:
        text = Path(args.assessment).read_text()
        w = swara.parse_assessment(text).weights()
        values = [f"{x:.12g}" for x in w.weights]
        provenance = f"{w.provenance}:{Path(args.assessment).name}"
    fh, close = _open_out(args.out)
    try:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["criterion", "weight", "provenance"])
        for name, v in zip(w.names, values):
            wr.writerow([name, v, provenance])
    finally:
        if close:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------- channel

_GRID = {
    # option: (column header, default)
    "t": ("temperature_c", "14"),
    "s": ("salinity_ppt", "35"),
    "d": ("depth_m", "0"),
    "f": ("frequency_khz", "30.5"),
    "ph": ("ph", "8"),
    "shipping": ("shipping_activity", "0.5"),
    "wind": ("wind_speed_mps", "0"),
    "dist": ("distance_m", "100"),
    "power": ("tx_power_w", "1.3"),
    "k": ("spreading_factor", "1.3"),
    "snr": ("snr_db", "10"),
    "bw": ("bandwidth_hz", "30000"),
}


def _env(v):
    return channel.EnvironmentProfile(temperature_c=v.get("t", 14.0), salinity_ppt=v.get("s", 35.0),
                                      ph=v.get("ph", 8.0), shipping_activity=v.get("shipping", 0.5),
                                      wind_speed_mps=v.get("wind", 0.0))


def _m_sound_speed(v, coeffs):
    return [channel.sound_speed(_env(v), v["d"], coeffs)]


def _m_absorption(v, coeffs):
    return [channel.absorption_db_per_km(v["f"], _env(v), v["d"] / 1000.0)]


def _m_noise(v, coeffs):
    comps, total = channel.noise_psd(v["f"], _env(v))
    return [*comps.as_tuple(), total]


def _m_path_loss(v, coeffs):
    alpha = channel.absorption_db_per_km(v["f"], _env(v), v["d"] / 1000.0)
    return [channel.path_loss_db(v["dist"], v["k"], alpha)]


def _m_snr(v, coeffs):
    b = channel.link_budget(v["power"], v["dist"], v["f"], v["bw"], _env(v), v["k"], v["d"] / 1000.0)
    return [b.path_loss_db, b.snr_db, b.capacity_bps]


def _m_capacity(v, coeffs):
    return [channel.channel_capacity_bps(v["snr"], v["bw"])]


def _m_delay(v, coeffs):
    c = channel.sound_speed(_env(v), v["d"], coeffs)
    return [c, channel.propagation_delay_s(v["dist"], c)]


CHANNEL_MODELS = {
    # name: (grid options, output columns, evaluator)
    "sound-speed": (("t", "s", "d"), ("sound_speed_mps",), _m_sound_speed),
    "absorption": (("f", "t", "s", "ph", "d"), ("absorption_db_per_km",), _m_absorption),
    "noise": (("f", "shipping", "wind"),
              ("turbulence_db_re_upa_hz", "shipping_db_re_upa_hz", "wind_db_re_upa_hz", "thermal_db_re_upa_hz",
               "total_db_re_upa_hz"), _m_noise),
    "path-loss": (("dist", "f", "k", "t", "s", "ph", "d"), ("path_loss_db",), _m_path_loss),
    "snr": (("dist", "power", "f", "bw", "k", "t", "s", "ph", "shipping", "wind", "d"),
            ("path_loss_db", "snr_db", "capacity_bps"), _m_snr),
    "capacity": (("snr", "bw"), ("capacity_bps",), _m_capacity),
    "delay": (("dist", "t", "s", "d"), ("sound_speed_mps", "delay_s"), _m_delay),
}


def channel_table(model: str, grids: dict[str, str], preset: str = "mackenzie-standard"):
    """Header and rows for one channel model over the cartesian product of its grids."""
    opts, outputs, fn = CHANNEL_MODELS[model]
    coeffs = channel.sound_speed_preset(preset)
    axes = [expand_axis(grids.get(o) or _GRID[o][1], f"--{o}") for o in opts]
    header = [_GRID[o][0] for o in opts] + list(outputs)
    rows = []
    for combo in itertools.product(*axes):
        v = dict(zip(opts, combo))
        rows.append(list(combo) + [float(x) for x in fn(v, coeffs)])
    return header, rows


def cmd_channel(args) -> int:
    grids = {o: getattr(args, o) for o in _GRID}
    header, rows = channel_table(args.model, grids, args.sound_speed_preset)
    fh, close = _open_out(args.out)
    try:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([f"{x:.12g}" for x in r])
    finally:
        if close:
            fh.close()
    if args.plot:
        from . import plotting

        print(f"wrote {plotting.channel_figure(header, rows, args.plot)}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_scenario_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="TOML scenario file")
    src.add_argument("--preset", default="table3-default", choices=sorted(config.PRESETS),
                     help="built-in scenario (default: table3-default)")
    p.add_argument("--seed", type=int, help=f"base seed; {SEED_ENV} overrides it")
    p.add_argument("--iterations", type=int, help="runs per configuration (default: from the scenario)")
    p.add_argument("--duration", type=float, help="simulated seconds per run")
    p.add_argument("--jobs", type=int, default=1, help="parallel runs (0 = one per CPU)")
    p.add_argument("--plots", action=argparse.BooleanOptionalAction, default=True,
                   help="render PNG figures next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rpluw", description="Underwater acoustic RPL experiment harness.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario for every iteration seed")
    _add_scenario_args(p)
    p.add_argument("--protocol", choices=PROTOCOLS)
    p.add_argument("--weights", help="weight preset or assessment file for rpluw variants")
    p.add_argument("--out", default="results.csv", help="metrics CSV (aggregate written alongside)")
    p.add_argument("--trace", help="write a tab-separated event trace here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="cartesian sweep over nodes, load, mobility and protocols")
    _add_scenario_args(p)
    p.add_argument("--nodes", default="50,100,200")
    p.add_argument("--lambda", dest="lam", default="0.1")
    p.add_argument("--mobile-fraction")
    p.add_argument("--protocols", default="rpluw-swara,baseline-hop")
    p.add_argument("--out", default="sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("weights", help="criterion weights from an assessment file or a preset")
    p.add_argument("assessment", nargs="?")
    p.add_argument("--preset", choices=("paper-swara", "paper-fuzzy"))
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("channel", help="tabulate an acoustic channel model over a grid")
    p.add_argument("model", choices=sorted(CHANNEL_MODELS))
    for opt, (col, default) in _GRID.items():
        p.add_argument(f"--{opt}", help=f"{col} grid (default {default})")
    p.add_argument("--sound-speed-preset", default="mackenzie-standard", choices=sorted(channel.SOUND_SPEED_PRESETS))
    p.add_argument("--out", default="-")
    p.add_argument("--plot", help="also render the curve to this image file")
    p.set_defaults(func=cmd_channel)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rpluw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, swara.MCDMError, channel.ChannelDomainError, ProtocolError) as exc:
        print(f"rpluw: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        where = f" {exc.filename}" if getattr(exc, "filename", None) else ""
        print(f"rpluw: I/O error:{where} {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
