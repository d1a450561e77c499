"""Command-line driver: GP curves, parameter sweeps, channel checks, spheroid clouds.

Every numeric parameter accepts a comma separated list; the run covers the
Cartesian product of all lists.  ``--sweep axis:lo:hi:n`` replaces one
parameter by an inclusive linear grid.  Values may be written with ``pi``
(``3*pi/4``).  A config file holds ``key = value`` lines using the long
flag names; ``[name]`` sections define panels that inherit the top-level
keys.  Flags given on the command line override the file for every panel.

Exit status: 0 on success, 2 for a bad configuration, 3 for a numerical
failure.
"""

from __future__ import annotations

import argparse
import ast
import configparser
import csv
import itertools
import math
import operator
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dissipative as diss
from .dephasing import BathSpec, gamma_qnd_grid, phase_damping_kraus, qnd_state
from .errors import ChannelDomainError, NumericalError
from .geometry import channel_image, fibonacci_sphere, principal_axes
from .numerics import DEFAULT_QUAD, OdeSpec
from .phase import gp_dissipative_closed, gp_qnd_closed, unitary_phase, wrap_phase
from .state import apply_kraus, from_angles

MODES = ("gp-qnd", "gp-dissipative", "sweep", "bloch-spheroid", "verify")
CHANNELS = ("sgad", "qnd", "both")

# flag name -> default; all accept comma lists
PARAMS = {
    "theta0": "pi/4",
    "phi0": "0",
    "temp": "0",
    "gamma0": "0.0025",
    "squeeze-r": "0",
    "squeeze-a": "0",
    "squeeze-phi": "0",
    "omega": "1",
    "omega-c": "40",
}
BATH_FIELDS = {
    "temp": "T",
    "gamma0": "gamma0",
    "squeeze-r": "r",
    "squeeze-a": "a",
    "squeeze-phi": "Phi",
    "omega": "omega",
    "omega-c": "omega_c",
}
SCALARS = {
    "mode": "gp-qnd",
    "sweep": "",
    "samples": "2048",
    "seed": "0",
    "time": "0.15",
    "channel": "both",
    "points": "2000",
}
DEFAULT_SWEEP_POINTS = 200
ANGLE_COLUMNS = {"theta0", "phi0", "squeeze_phi", "gp", "gp_unitary", "gp_qnd", "gp_dissipative", "theta_tau"}

VERIFY_LIMITS = {"rk4_vs_closed": 1e-6, "kraus_vs_closed": 1e-8, "qnd_kraus_vs_closed": 1e-10, "lindblad_form": 1e-10}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- value parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Float literal or arithmetic on literals and ``pi``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError

    try:
        value = ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot read number {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"non-finite number {text!r}")
    return value


def parse_list(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"empty value list {text!r}")
    return [parse_number(s) for s in items]


@dataclass(frozen=True)
class Sweep:
    axis: str
    lo: float
    hi: float
    n: int

    def grid(self) -> list[float]:
        if self.n == 1:
            return [self.lo]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.n)]


def parse_sweep(text: str) -> Sweep | None:
    if not text.strip():
        return None
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"sweep must be axis:lo:hi[:n], got {text!r}")
    axis = parts[0].strip()
    if axis not in PARAMS:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(PARAMS)}")
    lo, hi = parse_number(parts[1]), parse_number(parts[2])
    if hi < lo:
        raise ConfigError(f"sweep bounds out of order: {lo} > {hi}")
    try:
        n = int(parts[3]) if len(parts) == 4 else DEFAULT_SWEEP_POINTS
    except ValueError:
        raise ConfigError(f"sweep point count must be an integer, got {parts[3]!r}") from None
    if n < 1:
        raise ConfigError("sweep needs at least one point")
    return Sweep(axis, lo, hi, n)


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class RunConfig:
    panel: str
    mode: str
    values: dict  # parameter flag name -> list of floats
    sweep: Sweep | None = None
    samples: int = 2048
    seed: int = 0
    time: float = 0.15
    channel: str = "both"
    points: int = 2000

    def grid(self, name: str) -> list[float]:
        if self.sweep is not None and self.sweep.axis == name:
            return self.sweep.grid()
        return self.values[name]

    def baths(self) -> list[BathSpec]:
        names = list(BATH_FIELDS)
        out = []
        for combo in itertools.product(*(self.grid(n) for n in names)):
            kwargs = {BATH_FIELDS[n]: v for n, v in zip(names, combo)}
            try:
                out.append(BathSpec(**kwargs))
            except ValueError as exc:
                raise ConfigError(f"panel {self.panel}: {exc}") from None
        return out

    def angles(self) -> list[tuple[float, float]]:
        pairs = list(itertools.product(self.grid("theta0"), self.grid("phi0")))
        for th, ph in pairs:
            if not 0 <= th <= math.pi:
                raise ConfigError(f"panel {self.panel}: theta0={th!r} outside [0, pi]")
            if not 0 <= ph < 2 * math.pi:
                raise ConfigError(f"panel {self.panel}: phi0={ph!r} outside [0, 2pi)")
        return pairs


def build_config(panel: str, raw: dict) -> RunConfig:
    unknown = set(raw) - set(PARAMS) - set(SCALARS)
    if unknown:
        raise ConfigError(f"panel {panel}: unknown key(s) {', '.join(sorted(unknown))}")
    merged = {**PARAMS, **SCALARS, **raw}
    mode = merged["mode"].strip()
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    channel = merged["channel"].strip()
    if channel not in CHANNELS:
        raise ConfigError(f"unknown channel {channel!r}; choose from {', '.join(CHANNELS)}")
    try:
        samples, seed, points = int(merged["samples"]), int(merged["seed"]), int(merged["points"])
    except ValueError as exc:
        raise ConfigError(f"panel {panel}: {exc}") from None
    if samples < 16:
        raise ConfigError("samples must be >= 16")
    if points < 4:
        raise ConfigError("points must be >= 4")
    time = parse_number(merged["time"])
    if time <= 0:
        raise ConfigError("time must be positive")
    return RunConfig(
        panel=panel,
        mode=mode,
        values={name: parse_list(merged[name]) for name in PARAMS},
        sweep=parse_sweep(merged["sweep"]),
        samples=samples,
        seed=seed,
        time=time,
        channel=channel,
        points=points,
    )


def read_config_file(path: str) -> list[tuple[str, dict]]:
    """Panels from a key = value file; top-level keys are shared by all panels."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",), delimiters=("=",)
    )
    parser.optionxform = str
    try:
        parser.read_string("[DEFAULT]\n" + text, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc.message.splitlines()[0]}") from None
    shared = dict(parser.defaults())
    if not parser.sections():
        return [("main", shared)]
    return [(name, dict(parser[name])) for name in parser.sections()]


def _flag_overrides(args: argparse.Namespace) -> dict:
    out = {}
    for key in list(PARAMS) + list(SCALARS):
        v = getattr(args, key.replace("-", "_"), None)
        if v is not None:
            out[key] = str(v)
    return out


def load_configs(args: argparse.Namespace) -> list[RunConfig]:
    panels = read_config_file(args.config) if args.config else [("main", {})]
    overrides = _flag_overrides(args)
    configs = [build_config(name, {**raw, **overrides}) for name, raw in panels]
    modes = {c.mode for c in configs}
    if len(modes) > 1:
        raise ConfigError(f"all panels must share one mode, got {', '.join(sorted(modes))}")
    return configs


# ---------------------------------------------------------------- evaluation


@lru_cache(maxsize=64)
def _gammas(bath: BathSpec, samples: int):
    times = np.linspace(0.0, bath.period, samples + 1)
    return gamma_qnd_grid(times, bath, DEFAULT_QUAD)


def _bath_columns(bath: BathSpec) -> dict:
    return {
        "temp": bath.T,
        "gamma0": bath.gamma0,
        "squeeze_r": bath.r,
        "squeeze_a": bath.a,
        "squeeze_phi": bath.Phi,
        "omega": bath.omega,
        "omega_c": bath.omega_c,
    }


def _sgad_valid(bath: BathSpec) -> int:
    return int(diss.sgad_validity(bath.period, bath))


def _qnd_rows(bath, angles, samples):
    gammas = _gammas(bath, samples)
    rows = []
    for theta0, phi0 in angles:
        res = gp_qnd_closed(theta0, bath, samples=samples, gammas=gammas)
        rows.append({
            "theta0": theta0, "phi0": phi0, **_bath_columns(bath), "samples": samples,
            "gp": res.phase, "gp_unitary": float(wrap_phase(unitary_phase(theta0))),
            "bloch_length_tau": res.bloch_length_final, "theta_tau": res.theta_final,
        })
    return rows


def _dissipative_rows(bath, angles, samples):
    valid = _sgad_valid(bath)
    rows = []
    for theta0, phi0 in angles:
        res = gp_dissipative_closed(theta0, phi0, bath, samples=samples)
        rows.append({
            "theta0": theta0, "phi0": phi0, **_bath_columns(bath), "samples": samples,
            "gp": res.phase, "gp_unitary": float(wrap_phase(unitary_phase(theta0))),
            "bloch_length_tau": res.bloch_length_final, "theta_tau": res.theta_final,
            "t_cross": res.extras["t_cross"], "sgad_valid": valid,
        })
    return rows


def _sweep_rows(bath, angles, samples):
    gammas = _gammas(bath, samples)
    valid = _sgad_valid(bath)
    rows = []
    for theta0, phi0 in angles:
        q = gp_qnd_closed(theta0, bath, samples=samples, gammas=gammas)
        d = gp_dissipative_closed(theta0, phi0, bath, samples=samples)
        rows.append({
            "theta0": theta0, "phi0": phi0, **_bath_columns(bath), "samples": samples,
            "gp_qnd": q.phase, "gp_dissipative": d.phase, "gp_unitary": float(wrap_phase(unitary_phase(theta0))),
            "sgad_valid": valid,
        })
    return rows


def _random_pure_states(rng, n):
    out = []
    for _ in range(n):
        theta0 = float(np.arccos(rng.uniform(-1, 1)))
        phi0 = float(rng.uniform(0, 2 * math.pi))
        out.append(from_angles(theta0, phi0))
    return out


def _verify_rows(bath, angles, samples, seed):
    """Residuals of the independent routes for one bath, maximised over states and times."""
    rng = np.random.default_rng(seed)
    states = [from_angles(th, ph) for th, ph in angles] + _random_pure_states(rng, 3)
    tau = bath.period
    check_times = np.linspace(0, tau, 6)[1:]
    spec = OdeSpec.for_period(tau, 4096)
    rk4 = kraus_gap = qnd_gap = 0.0
    valid = 1
    for st in states:
        sol = diss.lindblad_trajectory(st.rho, tau, bath, spec)
        for t, rho in zip(sol.times, sol.values):
            rk4 = max(rk4, float(np.max(np.abs(rho - diss.evolve_interaction(st.rho, t, bath)))))
    gammas = gamma_qnd_grid(check_times, bath, DEFAULT_QUAD)
    for t, g in zip(check_times, gammas):
        try:
            _, kraus = diss.sgad_channel(float(t), bath)
            for st in states:
                gap = kraus.apply_matrix(st.rho) - diss.evolve_interaction(st.rho, t, bath)
                kraus_gap = max(kraus_gap, float(np.max(np.abs(gap))))
        except ChannelDomainError:
            valid = 0
        pd = phase_damping_kraus(float(t), bath, gamma=float(g))
        for th, ph in angles:
            direct = qnd_state(float(t), th, ph, bath, gamma=float(g))
            via = apply_kraus(from_angles(th, ph), pd)
            qnd_gap = max(qnd_gap, float(np.max(np.abs(direct.rho - via.rho))))
    form = diss.lindblad_form_check(bath, seed=seed)
    row = {
        **_bath_columns(bath), "states": len(states), "seed": seed,
        "rk4_vs_closed": rk4, "kraus_vs_closed": kraus_gap if valid else float("nan"),
        "qnd_kraus_vs_closed": qnd_gap, "lindblad_form": form, "sgad_valid": valid,
    }
    ok = all(row[k] <= lim for k, lim in VERIFY_LIMITS.items() if not (k == "kraus_vs_closed" and not valid))
    row["pass"] = int(ok)
    return [row]


def _spheroid_rows(bath, time, channel, points):
    sphere = fibonacci_sphere(points)
    rows = []
    kinds = ("sgad", "qnd") if channel == "both" else (channel,)
    for kind in kinds:
        if kind == "sgad":
            _, kraus = diss.sgad_channel(time, bath)
        else:
            kraus = phase_damping_kraus(time, bath)
        image = channel_image(kraus, sphere)
        shape = principal_axes(image)
        for i, (p, q) in enumerate(zip(sphere, image)):
            rows.append({
                "channel": kind, "index": i, **_bath_columns(bath), "time": time,
                "x0": p[0], "y0": p[1], "z0": p[2], "x": q[0], "y": q[1], "z": q[2],
                "polar_semi_axis": shape.polar, "equatorial_semi_axis": shape.equatorial, "shape": shape.kind,
            })
    return rows


def evaluate(task):
    """One unit of work: every (theta0, phi0) point of one bath in one panel."""
    mode, cfg, bath, angles = task
    if mode == "gp-qnd":
        rows = _qnd_rows(bath, angles, cfg.samples)
    elif mode == "gp-dissipative":
        rows = _dissipative_rows(bath, angles, cfg.samples)
    elif mode == "sweep":
        rows = _sweep_rows(bath, angles, cfg.samples)
    elif mode == "verify":
        rows = _verify_rows(bath, angles, cfg.samples, cfg.seed)
    else:
        rows = _spheroid_rows(bath, cfg.time, cfg.channel, cfg.points)
    return [{"panel": cfg.panel, **r} for r in rows]


def tasks_for(configs: list[RunConfig]):
    tasks = []
    for cfg in configs:
        angles = cfg.angles()
        for bath in cfg.baths():
            tasks.append((cfg.mode, cfg, bath, angles))
    return tasks


def run_tasks(tasks, workers: int) -> list[dict]:
    """Evaluate tasks, returning rows in task order whatever the completion order."""
    if workers <= 1 or len(tasks) <= 1:
        chunks = [evaluate(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(evaluate, tasks))
    return [row for chunk in chunks for row in chunk]


# ---------------------------------------------------------------- output


def _format(key, value, degrees):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if degrees and key in ANGLE_COLUMNS:
            value = math.degrees(value)
        return repr(value)
    return str(value)


def write_csv(rows: list[dict], fh, degrees: bool = False):
    if not rows:
        return
    header = list(rows[0])
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(k, row[k], degrees) for k in header])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qgphase",
        description="Geometric phase of a qubit in a squeezed thermal bath.",
    )
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--theta0", help="initial polar angle(s), radians; comma list")
    p.add_argument("--phi0", help="initial azimuth(s), radians")
    p.add_argument("--temp", help="bath temperature(s)")
    p.add_argument("--gamma0", help="coupling strength(s)")
    p.add_argument("--squeeze-r", help="squeeze magnitude(s)")
    p.add_argument("--squeeze-a", help="squeeze phase slope(s) of the dephasing model")
    p.add_argument("--squeeze-phi", help="squeeze phase(s) of the dissipative model")
    p.add_argument("--omega", help="qubit frequency (default 1)")
    p.add_argument("--omega-c", help="bath cutoff frequency (default 40)")
    p.add_argument("--sweep", help="axis:lo:hi[:n] inclusive grid, n defaults to 200")
    p.add_argument("--samples", help="time samples per period (default 2048)")
    p.add_argument("--time", help="channel time for bloch-spheroid (default 0.15)")
    p.add_argument("--channel", choices=CHANNELS, help="bloch-spheroid channel (default both)")
    p.add_argument("--points", help="sphere sample points for bloch-spheroid (default 2000)")
    p.add_argument("--seed", help="seed for randomly drawn test states (default 0)")
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    p.add_argument("--degrees", action="store_true", help="emit angles in degrees")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configs = load_configs(args)
        tasks = tasks_for(configs)
    except ConfigError as exc:
        print(f"qgphase: config error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_tasks(tasks, max(1, args.workers))
    except (NumericalError, ValueError) as exc:
        print(f"qgphase: numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.out == "-":
        try:
            write_csv(rows, sys.stdout, args.degrees)
        except BrokenPipeError:
            # reader closed early (e.g. piped into head)
            sys.stderr.close()
            return 0
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_csv(rows, fh, args.degrees)
    if configs[0].mode == "verify":
        failed = [r for r in rows if not r["pass"]]
        if failed:
            print(f"qgphase: {len(failed)} verify row(s) above threshold", file=sys.stderr)
            return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
