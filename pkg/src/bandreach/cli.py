"""Command-line front end producing CSV (or fixed-width table) reports.

Commands: noise-profile, snr-sweep, snr-vs-spans, band-optima, thresholds,
reach, rates, ber-curves.  All outputs are deterministic for a given config
and flag set: ordered rows, fixed float formatting, LF line endings.  Exit
codes: 0 success, 2 configuration/validation error, 3 numeric/model error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .configio import ConfigError, LinkConfig, build_grid, load_config, parse_config
from .linkmodel import ModelError, NoiseTables, dbm_to_watts
from .planner import (
    Band,
    NumericError,
    band_worst_snr,
    build_reach_report,
    get_format,
    make_threshold,
    net_bit_rate,
    optimize_launch,
    snr_threshold,
)

CONFIG_ENV_VAR = "BANDREACH_CONFIG"
DEFAULT_NOISE_PROFILE_POWERS = (0.0, -5.0, -7.5)
DEFAULT_MAX_SPANS = 150


def _fmt_db(value: float) -> str:
    return f"{value:.4f}"


def _fmt_watts(value: float) -> str:
    return f"{value:.6e}"


def _fmt_thz(value: float) -> str:
    return f"{value:.6f}"


def _write_rows(header: list[str], rows: list[list[str]], output: str, table: bool) -> None:
    if table:
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
                  for i, h in enumerate(header)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        lines = [",".join(header)] + [",".join(row) for row in rows]
        text = "\n".join(lines) + "\n"
    if output == "-":
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise RuntimeError(f"cannot write output file {output}: {exc}") from exc


def _load(args: argparse.Namespace) -> LinkConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if path:
        try:
            return load_config(path)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config("")


def _band_of(bands: tuple[Band, ...], channel_index: int) -> str:
    for band in bands:
        if channel_index in band.member_channels:
            return band.name
    raise ValueError(f"channel {channel_index} outside every band")


def _tables(config: LinkConfig) -> tuple[NoiseTables, tuple[Band, ...]]:
    grid, bands = build_grid(config)
    tables = NoiseTables.build(grid, config.fiber, config.amplifier,
                               config.reference_bandwidth_hz)
    # narrow grids may leave outer bands without any slots; reports skip them
    populated = tuple(band for band in bands if len(band.member_channels))
    return tables, populated


def _parse_power_list(raw: str) -> list[float]:
    try:
        return [float(p) for p in raw.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"--powers: expected comma-separated dBm values, got {raw!r}") from None


def cmd_noise_profile(args: argparse.Namespace) -> None:
    config = _load(args)
    tables, bands = _tables(config)
    powers = _parse_power_list(args.powers) if args.powers else list(DEFAULT_NOISE_PROFILE_POWERS)
    header = ["channel_index", "frequency_thz", "band", "p_ase_w"]
    header += [f"p_nli_w_at_{p:g}dbm" for p in powers]
    n = len(tables.grid)
    nli_columns = []
    for p in powers:
        power_w = dbm_to_watts(p)
        eta = tables.eta(power_w * n)
        nli_columns.append(eta * power_w**3)
    rows = []
    for i in range(n):
        row = [str(i), _fmt_thz(tables.grid.frequencies[i] / 1e12),
               _band_of(bands, i), _fmt_watts(float(tables.p_ase[i]))]
        row += [_fmt_watts(float(col[i])) for col in nli_columns]
        rows.append(row)
    _write_rows(header, rows, args.output, args.format == "table")


def cmd_snr_sweep(args: argparse.Namespace) -> None:
    config = _load(args)
    tables, bands = _tables(config)
    sweep = config.sweep_powers_dbm()
    optima = {band.name: optimize_launch(band, tables, sweep) for band in bands}
    header = ["power_dbm", "band", "worst_snr_db", "worst_channel_index", "is_band_optimum"]
    rows = []
    for power in sweep:
        for band in bands:
            snr_db, worst = band_worst_snr(band, tables, float(power))
            marker = "1" if float(power) == optima[band.name].optimal_launch_dbm else "0"
            rows.append([_fmt_db(float(power)), band.name, _fmt_db(snr_db), str(worst), marker])
    _write_rows(header, rows, args.output, args.format == "table")


def cmd_snr_vs_spans(args: argparse.Namespace) -> None:
    config = _load(args)
    tables, bands = _tables(config)
    power = args.fixed_power if args.fixed_power is not None else config.fixed_power_dbm
    header = ["span_count"] + [f"{band.name}_worst_snr_db" for band in bands]
    rows = []
    for spans in range(1, args.max_spans + 1):
        row = [str(spans)]
        for band in bands:
            snr_db, _ = band_worst_snr(band, tables, power, span_count=spans)
            row.append(_fmt_db(snr_db))
        rows.append(row)
    _write_rows(header, rows, args.output, args.format == "table")


def cmd_band_optima(args: argparse.Namespace) -> None:
    config = _load(args)
    tables, bands = _tables(config)
    sweep = config.sweep_powers_dbm()
    header = ["band", "optimal_launch_dbm", "max_snr_db", "worst_channel_index",
              "worst_channel_frequency_thz"]
    rows = []
    for band in bands:
        result = optimize_launch(band, tables, sweep)
        freq_thz = tables.grid.frequencies[result.worst_channel_index] / 1e12
        rows.append([band.name, _fmt_db(result.optimal_launch_dbm), _fmt_db(result.max_snr_db),
                     str(result.worst_channel_index), _fmt_thz(freq_thz)])
    _write_rows(header, rows, args.output, args.format == "table")


def _thresholds_from(args: argparse.Namespace, config: LinkConfig):
    if args.thresholds:
        try:
            values = [float(v) for v in args.thresholds.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(
                f"--thresholds: expected comma-separated BER values, got {args.thresholds!r}"
            ) from None
    else:
        values = list(config.ber_thresholds)
    try:
        return tuple(make_threshold(v) for v in values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_thresholds(args: argparse.Namespace) -> None:
    config = _load(args)
    thresholds = _thresholds_from(args, config)
    formats = tuple(get_format(name) for name in config.format_names)
    formats = tuple(sorted(formats, key=lambda f: f.bits_per_symbol))
    header = ["format", "ber_threshold", "snr_threshold_db"]
    rows = []
    for threshold in thresholds:
        for fmt in formats:
            th_db = snr_threshold(fmt, threshold, config.reference_bandwidth_hz,
                                  config.symbol_rate_hz)
            rows.append([fmt.name, f"{threshold.value:g}", _fmt_db(th_db)])
    _write_rows(header, rows, args.output, args.format == "table")


def cmd_reach(args: argparse.Namespace) -> None:
    config = _load(args)
    tables, bands = _tables(config)
    thresholds = _thresholds_from(args, config)
    formats = tuple(get_format(name) for name in config.format_names)
    fixed_power = args.fixed_power if args.fixed_power is not None else config.fixed_power_dbm
    report = build_reach_report(
        tables, bands, formats, thresholds,
        fixed_power_dbm=fixed_power,
        per_band_optimum=args.per_band_optimum,
        sweep_dbm=config.sweep_powers_dbm(),
        reference_bandwidth_hz=config.reference_bandwidth_hz,
        channel_bandwidth_hz=config.symbol_rate_hz,
        symbol_rate_baud=config.symbol_rate_hz,
    )
    header = ["ber_threshold", "band", "format", "snr_threshold_db", "reach_spans",
              "net_bit_rate_gbps"]
    rows = [[f"{e.ber_threshold:g}", e.band_name, e.format_name, _fmt_db(e.snr_threshold_db),
             str(e.reach_spans), str(e.net_bit_rate_gbps)] for e in report.entries]
    _write_rows(header, rows, args.output, args.format == "table")


def cmd_rates(args: argparse.Namespace) -> None:
    config = _load(args)
    thresholds = _thresholds_from(args, config)
    formats = tuple(sorted((get_format(name) for name in config.format_names),
                           key=lambda f: f.bits_per_symbol))
    header = ["format", "bits_per_symbol", "ber_threshold", "net_bit_rate_gbps"]
    rows = []
    for fmt in formats:
        for threshold in thresholds:
            rows.append([fmt.name, str(fmt.bits_per_symbol), f"{threshold.value:g}",
                         str(net_bit_rate(fmt, threshold, config.symbol_rate_hz))])
    _write_rows(header, rows, args.output, args.format == "table")


def cmd_ber_curves(args: argparse.Namespace) -> None:
    config = _load(args)
    formats = tuple(sorted((get_format(name) for name in config.format_names),
                           key=lambda f: f.bits_per_symbol))
    from .planner import format_ber
    header = ["snr_db"] + [f"ber_{fmt.name.lower()}" for fmt in formats]
    rows = []
    for snr_db in range(0, 36):
        snr_linear = 10.0 ** (snr_db / 10.0)
        row = [f"{snr_db:.1f}"]
        for fmt in formats:
            ber = float(format_ber(fmt, snr_linear, config.reference_bandwidth_hz,
                                   config.symbol_rate_hz))
            row.append(f"{ber:.6e}")
        rows.append(row)
    _write_rows(header, rows, args.output, args.format == "table")


_COMMANDS = {
    "noise-profile": cmd_noise_profile,
    "snr-sweep": cmd_snr_sweep,
    "snr-vs-spans": cmd_snr_vs_spans,
    "band-optima": cmd_band_optima,
    "thresholds": cmd_thresholds,
    "reach": cmd_reach,
    "rates": cmd_rates,
    "ber-curves": cmd_ber_curves,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandreach",
        description="Multi-band optical link SNR, reach and rate reports.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help=f"config file path (or ${CONFIG_ENV_VAR})")
        p.add_argument("--output", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "table"), default="csv")
        if name == "noise-profile":
            p.add_argument("--powers", help="comma-separated launch powers [dBm]")
        if name in ("snr-vs-spans", "reach"):
            p.add_argument("--fixed-power", type=float, default=None,
                           help="per-channel launch power [dBm]")
        if name == "snr-vs-spans":
            p.add_argument("--max-spans", type=int, default=DEFAULT_MAX_SPANS)
        if name == "reach":
            p.add_argument("--per-band-optimum", action="store_true",
                           help="base reach on each band's optimal launch power")
        if name in ("thresholds", "reach", "rates"):
            p.add_argument("--thresholds", help="comma-separated BER thresholds")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ModelError, NumericError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
