"""Command-line front end.

Every subcommand reads an optional flat TOML config (``--config``); any key
can also be given as a flag (``c_nv`` -> ``--c-nv``), and flags win. Output
files start with a commented copy of the fully resolved config, so an output
file is itself a valid ``--config`` for reproducing it.
"""

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .estimates import (
    EnhancementInputs,
    MaterialParams,
    avg_defect_distance,
    diffusion_length,
    enhancement_factor,
    polarized_ratio,
)
from .exceptions import ConfigError, NVHyperpolError
from .hamiltonian import (
    REFERENCE_TENSOR,
    HyperfineTensor,
    SpinSystemParams,
    level_diagram,
    load_tensor,
)
from .lindblad import PumpModel
from .odmr import alignment_spread, angle_scan, axis_angles
from .plotdata import format_plot_data
from .sweep import SweepConfig, buildup_timescales, default_time_grid, field_grid, field_sweep

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

THREADS_ENV = "NVHYPERPOL_THREADS"
CONFIG_BEGIN = "# --- config ---"
CONFIG_END = "# --- end config ---"

FLOAT, INT, BOOL, STR, OPT_FLOAT, FLOATS = "float", "int", "bool", "str", "float|none", "floats"

SYSTEM = {
    "d_es_MHz": (FLOAT, 1420.0),
    "d_gs_MHz": (FLOAT, 2870.0),
    "gamma_nv_MHz_per_T": (FLOAT, 2.8e4),
    "gamma_c13_MHz_per_T": (FLOAT, 10.0),
}
PUMP = {
    "pump_rate_MHz": (FLOAT, 10.0),
    "leak_rate_MHz": (FLOAT, 0.5),
    "nuclear_t1_s": (OPT_FLOAT, 100.0),
    "electron_t1_s": (OPT_FLOAT, None),
    "dephasing_rate_MHz": (FLOAT, 0.0),
    "cross_leak": (BOOL, False),
}
TENSOR = {
    "tensor_file": (STR, ""),
    "hyperfine_scale": (FLOAT, 1.0),
}
SCHEMAS = {
    "sweep": {
        **SYSTEM, **PUMP, **TENSOR,
        "field_start_mT": (FLOAT, 45.0),
        "field_stop_mT": (FLOAT, 56.0),
        "field_step_mT": (FLOAT, 0.05),
        "fields_mT": (FLOATS, None),
        "orientations": (INT, 6),
        "euler_deg": (FLOATS, None),
        "seed": (INT, None),
    },
    "buildup": {
        **SYSTEM, **PUMP, **TENSOR,
        "magnitudes_kHz": (FLOATS, [1.0, 10.0, 100.0, 1000.0]),
        "field_mT": (OPT_FLOAT, None),
        "euler_deg": (FLOATS, [0.0, 0.0, 0.0]),
        "time_points": (INT, 240),
    },
    "levels": {
        **SYSTEM, **TENSOR,
        "field_start_mT": (FLOAT, 0.0),
        "field_stop_mT": (FLOAT, 100.0),
        "field_step_mT": (FLOAT, 0.5),
        "fields_mT": (FLOATS, None),
        "euler_deg": (FLOATS, [0.0, 0.0, 0.0]),
    },
    "odmr": {
        **SYSTEM,
        "field_mT": (FLOATS, [50 / math.sqrt(3)] * 3),
        "scan_start_deg": (OPT_FLOAT, None),
        "scan_stop_deg": (OPT_FLOAT, None),
        "scan_step_deg": (FLOAT, 0.1),
    },
    "estimate": {
        "c_nv": (FLOAT, 10e-6),
        "aligned_fraction": (FLOAT, 0.25),
        "c_13c": (FLOAT, 0.011),
        "p_13c": (FLOAT, 0.005),
        "rho_g_cm3": (FLOAT, 3.52),
        "molar_mass_g_mol": (FLOAT, 12.01),
        "d_coeff_cm2_s": (FLOAT, 6.7e-15),
        "tau_s": (FLOAT, 10.0),
        "s_op": (FLOAT, 1.0),
        "s_op_err": (FLOAT, 0.0),
        "s_ref": (FLOAT, 1.0),
        "s_ref_err": (FLOAT, 0.0),
        "nt_op": (FLOAT, 1.0),
        "nt_ref": (FLOAT, 10.0),
        "m_op_mg": (FLOAT, 16.0),
        "m_ref_mg": (FLOAT, 800.0),
    },
}
FORMATS = {
    "sweep": ("csv", "plot-data"),
    "buildup": ("csv", "plot-data"),
    "levels": ("csv",),
    "odmr": ("csv",),
    "estimate": ("table", "csv"),
}
HELP = {
    "sweep": "orientation-averaged steady-state polarization vs axial field",
    "buildup": "polarization build-up time vs hyperfine strength",
    "levels": "excited-state energy levels vs axial field",
    "odmr": "ground-state ODMR lines of the four NV orientations",
    "estimate": "enhancement factor, NV spacing, diffusion length, 13C/NV ratio",
}


# -- config parsing ---------------------------------------------------------

def _coerce(key, kind, value):
    if kind in (OPT_FLOAT, FLOATS) and (value is None or (isinstance(value, str) and value.lower() == "none")):
        return None
    try:
        if kind in (FLOAT, OPT_FLOAT):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind == INT:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if kind == BOOL:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind == STR:
            if not isinstance(value, str):
                raise TypeError
            return value
        if kind == FLOATS:
            if not isinstance(value, (list, tuple)):
                raise TypeError
            return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {value!r}, expected {kind}", key=key) from None
    raise AssertionError(kind)


def _key_line(text, key):
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for n, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return n
    return None


def extract_config_text(text):
    """Pull the embedded config block out of an output file, if there is one."""
    if CONFIG_BEGIN not in text:
        return text
    lines = text.splitlines()
    start = lines.index(CONFIG_BEGIN) + 1
    end = lines.index(CONFIG_END, start)
    return "\n".join(line[2:] if line.startswith("# ") else line.lstrip("#") for line in lines[start:end])


def load_config_file(path, command):
    """Read and strictly validate a config file for ``command``."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    text = extract_config_text(raw)
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}", line=getattr(exc, "lineno", None)) from None
    schema = SCHEMAS[command]
    file_cmd = data.pop("command", command)
    if file_cmd != command:
        raise ConfigError(f"{path} is a '{file_cmd}' config, not '{command}'", key="command")
    values = {}
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"{path}: unknown key", key=key, line=_key_line(text, key))
        values[key] = _coerce(key, schema[key][0], value)
    return values


def resolve_config(command, file_values, flag_values):
    schema = SCHEMAS[command]
    cfg = {key: default for key, (_, default) in schema.items()}
    cfg.update(file_values)
    for key, value in flag_values.items():
        cfg[key] = _coerce(key, schema[key][0], value)
    return cfg


def _toml_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return '"none"'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    if isinstance(value, str):
        return json.dumps(value)
    return str(value)


def config_header(command, cfg, notes=()):
    lines = [
        f"# nvhyperpol {__version__} {command}",
        "# units: fields mT, frequencies and rates MHz, times s, hyperfine magnitudes kHz",
    ]
    lines += [f"# {n}" for n in notes]
    lines.append(CONFIG_BEGIN)
    lines.append(f"# command = {_toml_value(command)}")
    lines += [f"# {key} = {_toml_value(cfg[key])}" for key in SCHEMAS[command]]
    lines.append(CONFIG_END)
    return "\n".join(lines) + "\n"


# -- model construction -----------------------------------------------------

def _positive(cfg, key):
    if not cfg[key] > 0:
        raise ConfigError("must be positive", key=key)


def _params(cfg):
    for key in SYSTEM:
        _positive(cfg, key)
    return SpinSystemParams(
        d_es=cfg["d_es_MHz"],
        d_gs=cfg["d_gs_MHz"],
        gamma_nv=cfg["gamma_nv_MHz_per_T"],
        gamma_c13=cfg["gamma_c13_MHz_per_T"],
    )


def _pump(cfg):
    for key in ("pump_rate_MHz", "leak_rate_MHz", "dephasing_rate_MHz"):
        if cfg[key] < 0:
            raise ConfigError("must be non-negative", key=key)
    for key in ("nuclear_t1_s", "electron_t1_s"):
        if cfg[key] is not None:
            _positive(cfg, key)
    return PumpModel(
        pump_rate_to_0=cfg["pump_rate_MHz"],
        leak_rate_to_pm1=cfg["leak_rate_MHz"],
        nuclear_t1=cfg["nuclear_t1_s"],
        electron_t1=cfg["electron_t1_s"],
        dephasing_rate=cfg["dephasing_rate_MHz"],
        cross_leak=cfg["cross_leak"],
    )


def _tensor(cfg):
    if cfg["tensor_file"]:
        try:
            a = load_tensor(cfg["tensor_file"])
        except (OSError, NVHyperpolError) as exc:
            raise ConfigError(str(exc), key="tensor_file") from None
    else:
        a = REFERENCE_TENSOR
    try:
        return HyperfineTensor(a)
    except NVHyperpolError as exc:
        raise ConfigError(str(exc), key="tensor_file") from None


def _euler_triples(cfg, key="euler_deg"):
    vals = cfg[key]
    if vals is None:
        return None
    if len(vals) == 0 or len(vals) % 3:
        raise ConfigError("needs a multiple of three angles (alpha, beta, gamma)", key=key)
    return np.radians(np.array(vals).reshape(-1, 3))


def _grid(cfg):
    if cfg["fields_mT"] is not None:
        grid = np.array(cfg["fields_mT"])
        if grid.size == 0:
            raise ConfigError("field grid is empty", key="fields_mT")
        if np.any(np.diff(grid) <= 0):
            raise ConfigError("fields must be strictly increasing", key="fields_mT")
        return grid
    _positive(cfg, "field_step_mT")
    if cfg["field_stop_mT"] < cfg["field_start_mT"]:
        raise ConfigError("field grid is empty (stop < start)", key="field_stop_mT")
    return field_grid(cfg["field_start_mT"], cfg["field_stop_mT"], cfg["field_step_mT"])


# -- commands ---------------------------------------------------------------

def cmd_sweep(cfg, fmt, threads):
    euler = _euler_triples(cfg)
    if euler is None:
        if cfg["orientations"] < 1:
            raise ConfigError("need at least one orientation", key="orientations")
        if cfg["seed"] is None:
            raise ConfigError("random orientations need a seed", key="seed")
        if cfg["seed"] < 0:
            raise ConfigError("seed must be non-negative", key="seed")
    sc = SweepConfig(
        field_grid=tuple(_grid(cfg)),
        orientations=euler,
        n_orientations=cfg["orientations"],
        seed=cfg["seed"],
        pump=_pump(cfg),
        tensor=_tensor(cfg),
        hyperfine_scale=cfg["hyperfine_scale"],
        params=_params(cfg),
    )
    result = field_sweep(sc, n_jobs=threads)
    crossings = " ".join(f"{b:.6g}" for b in result.zero_crossings) or "none"
    notes = [
        "euler_rad = " + json.dumps([[float(f"{x:.12g}") for x in row] for row in sc.orientations]),
        f"zero_crossings_mT = {crossings}",
    ]
    header = config_header("sweep", cfg, notes)
    if fmt == "plot-data":
        return format_plot_data(result, header)
    return header + result.to_csv()


def cmd_buildup(cfg, fmt, threads):
    euler = _euler_triples(cfg)
    if euler.shape[0] != 1:
        raise ConfigError("build-up takes a single orientation", key="euler_deg")
    mags = cfg["magnitudes_kHz"]
    if not mags or min(mags) <= 0:
        raise ConfigError("magnitudes must be a non-empty list of positive values", key="magnitudes_kHz")
    if cfg["time_points"] < 10:
        raise ConfigError("need at least 10 time points", key="time_points")
    pump = _pump(cfg)
    base = _tensor(cfg).scaled(cfg["hyperfine_scale"])
    sc = SweepConfig(field_grid=(0.0,), orientations=euler, pump=pump, tensor=base, params=_params(cfg))
    result = buildup_timescales(
        mags, sc, bz=cfg["field_mT"], t_grid=default_time_grid(pump, cfg["time_points"])
    )
    notes = ["field_used_mT = " + " ".join(f"{b:.6g}" for b in result.fields)]
    header = config_header("buildup", cfg, notes)
    if fmt == "plot-data":
        return format_plot_data(result, header)
    return header + result.to_csv()


def cmd_levels(cfg, fmt, threads):
    euler = _euler_triples(cfg)
    if euler.shape[0] != 1:
        raise ConfigError("levels takes a single orientation", key="euler_deg")
    tensor = _tensor(cfg).scaled(cfg["hyperfine_scale"]).oriented(tuple(euler[0]))
    grid = _grid(cfg)
    levels = level_diagram(_params(cfg), tensor, grid)
    rows = ["field_mT," + ",".join(f"E{k + 1}_MHz" for k in range(levels.shape[1]))]
    rows += [",".join(f"{x:.12g}" for x in (b, *e)) for b, e in zip(grid, levels)]
    return config_header("levels", cfg) + "\n".join(rows) + "\n"


def cmd_odmr(cfg, fmt, threads):
    p = _params(cfg)
    b = np.array(cfg["field_mT"])
    if b.shape != (3,):
        raise ConfigError("needs three components (bx, by, bz)", key="field_mT")
    if not np.linalg.norm(b) > 0:
        raise ConfigError("field vector must be non-zero", key="field_mT")
    scan = cfg["scan_start_deg"] is not None or cfg["scan_stop_deg"] is not None
    if scan:
        for key in ("scan_start_deg", "scan_stop_deg"):
            if cfg[key] is None:
                raise ConfigError("tilt scan needs both start and stop", key=key)
        _positive(cfg, "scan_step_deg")
        if not 0 <= cfg["scan_start_deg"] <= cfg["scan_stop_deg"] <= 180:
            raise ConfigError("scan range must satisfy 0 <= start <= stop <= 180", key="scan_stop_deg")
        thetas = field_grid(cfg["scan_start_deg"], cfg["scan_stop_deg"], cfg["scan_step_deg"])
        freqs = angle_scan(float(np.linalg.norm(b)), np.radians(thetas), p)
        rows = ["theta_deg,f_minus_MHz,f_plus_MHz"]
        rows += [f"{t:.12g},{f[0]:.12g},{f[1]:.12g}" for t, f in zip(thetas, freqs)]
        return config_header("odmr", cfg) + "\n".join(rows) + "\n"
    spread, per_axis = alignment_spread(b, p=p)
    thetas = np.degrees(axis_angles(b))
    rows = ["axis,theta_deg,f_minus_MHz,f_plus_MHz"]
    rows += [
        f"{k + 1},{t:.12g},{f[0]:.12g},{f[1]:.12g}" for k, (t, f) in enumerate(zip(thetas, per_axis))
    ]
    header = config_header("odmr", cfg, [f"spread_MHz = {spread:.12g}"])
    return header + "\n".join(rows) + "\n"


def cmd_estimate(cfg, fmt, threads):
    try:
        mp = MaterialParams(
            c_nv=cfg["c_nv"],
            aligned_fraction=cfg["aligned_fraction"],
            c_13c=cfg["c_13c"],
            rho=cfg["rho_g_cm3"],
            molar_mass=cfg["molar_mass_g_mol"],
            d_coeff=cfg["d_coeff_cm2_s"],
        )
        enh = EnhancementInputs(
            s_op=cfg["s_op"], s_ref=cfg["s_ref"],
            nt_op=cfg["nt_op"], nt_ref=cfg["nt_ref"],
            m_op=cfg["m_op_mg"], m_ref=cfg["m_ref_mg"],
            sigma_s_op=cfg["s_op_err"], sigma_s_ref=cfg["s_ref_err"],
        )
        eta, sigma = enhancement_factor(enh)
        rows = [
            ("d_avg_all_nv", avg_defect_distance(MaterialParams(**{**mp.__dict__, "aligned_fraction": 1.0})), "nm"),
            ("d_avg_aligned", avg_defect_distance(mp), "nm"),
            ("r_pol", diffusion_length(mp.d_coeff, cfg["tau_s"]), "nm"),
            ("polarized_13c_per_nv", polarized_ratio(mp.c_13c, cfg["p_13c"], mp.c_nv, mp.aligned_fraction), "1"),
            ("eta", eta, "1"),
            ("eta_sigma", sigma, "1"),
        ]
    except NVHyperpolError as exc:
        raise ConfigError(str(exc)) from None
    header = config_header("estimate", cfg)
    if fmt == "csv":
        return header + "quantity,value,unit\n" + "".join(f"{q},{v:.12g},{u}\n" for q, v, u in rows)
    width = max(len(q) for q, _, _ in rows)
    body = f"{'quantity':<{width}}  {'value':>14}  unit\n"
    body += "".join(f"{q:<{width}}  {v:>14.6g}  {u}\n" for q, v, u in rows)
    return header + body


COMMANDS = {
    "sweep": cmd_sweep,
    "buildup": cmd_buildup,
    "levels": cmd_levels,
    "odmr": cmd_odmr,
    "estimate": cmd_estimate,
}


# -- argument parsing -------------------------------------------------------

def _add_schema_flags(parser, schema):
    group = parser.add_argument_group("parameters (override config file)")
    for key, (kind, default) in schema.items():
        flag = "--" + key.replace("_", "-")
        kw = {"dest": key, "default": argparse.SUPPRESS, "help": f"default: {default}"}
        if kind == BOOL:
            group.add_argument(flag, action=argparse.BooleanOptionalAction, **kw)
        elif kind == FLOATS:
            group.add_argument(flag, nargs="*", type=float, metavar="X", **kw)
        elif kind == INT:
            group.add_argument(flag, type=int, **kw)
        elif kind == FLOAT:
            group.add_argument(flag, type=float, **kw)
        else:
            group.add_argument(flag, **kw)


def build_parser():
    parser = argparse.ArgumentParser(prog="nvhyperpol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--config", type=Path, help="TOML config or a previous output file")
        p.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")
        p.add_argument("--format", choices=FORMATS[name], default=FORMATS[name][0])
        if name == "sweep":
            p.add_argument("--threads", type=int, default=None,
                           help=f"worker threads (default: ${THREADS_ENV} or 1)")
        _add_schema_flags(p, schema)
    return parser


def _threads(args):
    n = getattr(args, "threads", None)
    if n is None:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer") from None
    if n < 1:
        raise ConfigError("thread count must be >= 1", key="threads")
    return n


def run(argv=None):
    """Entry point; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    schema = SCHEMAS[command]
    try:
        file_values = load_config_file(args.config, command) if args.config else {}
        flags = {k: getattr(args, k) for k in schema if hasattr(args, k)}
        cfg = resolve_config(command, file_values, flags)
        text = COMMANDS[command](cfg, args.format, _threads(args))
    except ConfigError as exc:
        print(f"nvhyperpol {command}: config error: {exc}", file=sys.stderr)
        return 2
    except NVHyperpolError as exc:
        print(f"nvhyperpol {command}: solver error: {exc}", file=sys.stderr)
        return 1
    if args.output is None:
        sys.stdout.write(text)
    else:
        try:
            args.output.write_text(text)
        except OSError as exc:
            print(f"nvhyperpol {command}: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
