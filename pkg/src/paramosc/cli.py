"""Command-line front end: potentials, densities, verification and propagation.

    paramosc potential --preset fig3 --panel 2 --out v1.csv
    paramosc density --config run.json --format json
    paramosc verify core
    paramosc propagate --grid 2048

CSV output starts with ``#`` metadata lines (the full config as JSON on the
``# config:`` line), then a header and t-major rows with 17 significant digits.
JSON output carries the same config and one array per CSV column.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__, classical, oracle, states, verify
from .classical import CosineDrive, ErmakovParams, SechPulse
from .errors import ConfigError, ParamOscError, WindowError
from .factorization import SeedSpec, potential
from .grid import Grid

FLOAT_FMT = ".17g"
SQRT2 = math.sqrt(2.0)

PROFILE_KEYS = {"cosine": ("kind", "omega0", "F0", "alpha", "amplitude", "phase"),
                "sech": ("kind", "omega1", "omega2", "k", "t0", "gamma1", "gamma2", "window")}
TOP_KEYS = ("command", "profile", "params", "spec", "k", "states", "grid", "time", "propagate",
            "format", "out", "preset", "panel")
PROPAGATE_KEYS = ("k", "n", "evolve_k", "dt", "t_b", "snapshot_every", "grid_n")


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; validated on construction."""

    command: str = "potential"
    profile: dict = field(default_factory=lambda: {"kind": "cosine"})
    params: dict = field(default_factory=lambda: {"a": 1.0, "c": 1.0})
    spec: dict = field(default_factory=lambda: {"order": 1, "m": 4})
    k: int | None = None
    states: tuple = ((1, 0),)
    grid: dict = field(default_factory=lambda: {"x_min": -6.0, "x_max": 6.0, "n": 201})
    time: dict = field(default_factory=lambda: {"t_min": 0.0, "t_max": math.pi, "samples": 41})
    propagate: dict = field(default_factory=lambda: {"k": 1, "n": 0, "evolve_k": 1,
                                                     "dt": oracle.DT_DEFAULT, "t_b": math.pi,
                                                     "snapshot_every": 400, "grid_n": oracle.N_DEFAULT})
    format: str = "csv"
    out: str | None = field(default=None, compare=False)
    preset: str | None = None
    panel: int | None = None

    def __post_init__(self):
        validate(self)

    # -- derived objects
    def build_profile(self):
        return build_profile(self.profile)

    def build_params(self) -> ErmakovParams:
        return ErmakovParams(**self.params)

    def build_spec(self) -> SeedSpec:
        return SeedSpec.from_dict(self.spec)

    @property
    def order(self) -> int:
        return self.build_spec().order if self.k is None else int(self.k)

    def to_dict(self) -> dict:
        # the output path is not part of the run, so it stays out of the echo
        d = asdict(self)
        d.pop("out")
        d["states"] = [list(s) for s in self.states]
        return d

    @classmethod
    def from_dict(cls, d: dict, text: str | None = None) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(d) - set(TOP_KEYS))
        if unknown:
            raise ConfigError(_where(text, unknown[0]) + f"unknown config key {unknown[0]!r}")
        d = dict(d)
        if "states" in d:
            try:
                d["states"] = tuple((int(k), int(n)) for k, n in d["states"])
            except (TypeError, ValueError):
                raise ConfigError(_where(text, "states") + "states must be a list of [k, n] pairs") from None
        try:
            return cls(**d)
        except ConfigError as exc:
            key = getattr(exc, "key", None)
            raise ConfigError(_where(text, key) + str(exc)) from None


def _where(text, key) -> str:
    """'line N: ' for the first occurrence of "key" in the config text."""
    if not text or not key:
        return ""
    m = re.search(r'"%s"\s*:' % re.escape(str(key)), text)
    if not m:
        return ""
    return f"line {text.count(chr(10), 0, m.start()) + 1}: "


def _fail(key, msg):
    exc = ConfigError(msg)
    exc.key = key
    raise exc


def build_profile(d: dict):
    kind = d.get("kind")
    if kind not in PROFILE_KEYS:
        _fail("kind", f"profile kind must be 'cosine' or 'sech', got {kind!r}")
    extra = sorted(set(d) - set(PROFILE_KEYS[kind]))
    if extra:
        _fail(extra[0], f"unknown {kind} profile key {extra[0]!r}")
    kw = {k: float(v) for k, v in d.items() if k not in ("kind", "window")}
    if kind == "cosine":
        return CosineDrive(**kw)
    if "omega2" in kw:
        kw["omega2_amp"] = kw.pop("omega2")
    if "window" in d:
        kw["window_"] = tuple(float(v) for v in d["window"])
    return SechPulse(**kw)


def validate(cfg: RunConfig):
    """Schema and physics checks, before any computation."""
    if cfg.command not in COMMANDS:
        _fail("command", f"command must be one of {sorted(COMMANDS)}, got {cfg.command!r}")
    if cfg.format not in ("csv", "json"):
        _fail("format", f"format must be csv or json, got {cfg.format!r}")
    for name, keys in (("grid", ("x_min", "x_max", "n")), ("time", ("t_min", "t_max", "samples")),
                       ("propagate", PROPAGATE_KEYS)):
        block = getattr(cfg, name)
        if not isinstance(block, dict):
            _fail(name, f"{name} must be an object")
        extra = sorted(set(block) - set(keys))
        if extra:
            _fail(extra[0], f"unknown {name} key {extra[0]!r}")
    g, t = cfg.grid, cfg.time
    if not g.get("x_max", 0) > g.get("x_min", 0):
        _fail("x_max", "grid needs x_max > x_min")
    if int(g.get("n", 0)) < 16:
        _fail("n", "grid needs at least 16 points")
    if not t.get("t_max", 0) >= t.get("t_min", 0) or int(t.get("samples", 0)) < 1:
        _fail("time", "time needs t_max >= t_min and samples >= 1")
    extra = sorted(set(cfg.params) - {"a", "c", "b"})
    if extra:
        _fail(extra[0], f"unknown params key {extra[0]!r}")
    try:
        profile = cfg.build_profile()
        params = cfg.build_params()
        spec = cfg.build_spec()
        # resolving the layer checks a, c > 0, the b constraint and a = c for sech
        classical.layer(profile, params)
    except ConfigError:
        raise
    except (ParamOscError, TypeError, KeyError, ValueError) as exc:
        _fail(None, f"invalid physics parameters: {exc}")
    if cfg.k is not None and not 0 <= int(cfg.k) <= spec.order:
        _fail("k", f"k={cfg.k} needs a spec of order >= k (spec has order {spec.order})")
    for k, n in cfg.states:
        if not 0 <= k <= spec.order or n < 0:
            _fail("states", f"state (k={k}, n={n}) is not available for spec order {spec.order}")
    p = cfg.propagate
    if not 0 <= int(p.get("k", 0)) <= spec.order or not 0 <= int(p.get("evolve_k", 0)) <= spec.order:
        _fail("propagate", "propagate k and evolve_k must not exceed the spec order")


# ---------------------------------------------------------------------------
# Presets

FIG_COLUMNS = (
    {"amplitude": 0.0, "phase": 0.0, "a": SQRT2, "c": SQRT2, "F0": 0.0, "alpha": 3.0},
    {"amplitude": 1.0, "phase": 0.0, "a": 1.0, "c": 1.0, "F0": 0.0, "alpha": 3.0},
    {"amplitude": 1.0, "phase": 0.0, "a": SQRT2, "c": SQRT2, "F0": 1.0, "alpha": 3.0},
)
PRESET_PANELS = {"fig3": 6, "fig4": 6, "fig5": 4}


def preset_config(name: str, panel: int | None = None) -> dict:
    """fig3, fig4: panels 1-3 are the three parameter columns of the first row,
    4-6 of the second row.  fig3 rows are V1 (m=4) and V2 (4,5); fig4 rows are
    n=0 and n=1 densities for both k=1 and k=2.  fig5 is the sech pulse: panel 1
    V1, 2 V2, 3 n=0 densities, 4 n=1 densities."""
    if name not in PRESET_PANELS:
        raise ConfigError(f"preset must be one of {sorted(PRESET_PANELS)}, got {name!r}")
    panel = 1 if panel is None else int(panel)
    if not 1 <= panel <= PRESET_PANELS[name]:
        raise ConfigError(f"{name} has panels 1..{PRESET_PANELS[name]}, got {panel}")
    if name in ("fig3", "fig4"):
        col = FIG_COLUMNS[(panel - 1) % 3]
        row = (panel - 1) // 3
        d = {"profile": {"kind": "cosine", "omega0": 1.0, "F0": col["F0"], "alpha": col["alpha"],
                         "amplitude": col["amplitude"], "phase": col["phase"]},
             "params": {"a": col["a"], "c": col["c"]},
             "grid": {"x_min": -6.0, "x_max": 6.0, "n": 241},
             "time": {"t_min": 0.0, "t_max": 2 * math.pi, "samples": 97}}
        if name == "fig3":
            d.update(command="potential", spec={"order": 1, "m": 4} if row == 0 else {"order": 2, "m": [4, 5]},
                     k=row + 1)
        else:
            d.update(command="density", spec={"order": 2, "m": [4, 5]}, states=((1, row), (2, row)))
    else:
        d = {"profile": {"kind": "sech", "omega1": 2.0, "omega2": 15.0, "k": 1.0, "t0": 6.0,
                         "gamma1": 0.0, "gamma2": 0.0},
             "params": {"a": 1.0, "c": 1.0}, "spec": {"order": 2, "m": [4, 5]},
             "grid": {"x_min": -5.0, "x_max": 5.0, "n": 201},
             "time": {"t_min": 0.0, "t_max": 12.0, "samples": 121}}
        if panel <= 2:
            d.update(command="potential", k=panel)
        else:
            d.update(command="density", states=((1, panel - 3), (2, panel - 3)))
    d.update(preset=name, panel=panel)
    return d


# ---------------------------------------------------------------------------
# Commands

def _axes(cfg: RunConfig):
    x = np.linspace(float(cfg.grid["x_min"]), float(cfg.grid["x_max"]), int(cfg.grid["n"]))
    t = np.linspace(float(cfg.time["t_min"]), float(cfg.time["t_max"]), int(cfg.time["samples"]))
    return x, t


def _potential_spec(spec: SeedSpec, k: int) -> SeedSpec:
    if k == 0:
        return SeedSpec.none()
    return spec if k == spec.order else spec.first_step()


def cmd_potential(cfg: RunConfig) -> dict:
    """Columns x, t, V in t-major order."""
    profile, params, spec = cfg.build_profile(), cfg.build_params(), cfg.build_spec()
    pspec = _potential_spec(spec, cfg.order)
    x, ts = _axes(cfg)
    cols = {"x": [], "t": [], "V": []}
    for t in ts:
        cs = classical.kinematic_state(profile, params, t)
        cols["x"].append(x)
        cols["t"].append(np.full_like(x, t))
        cols["V"].append(potential(pspec, cs, x))
    return {k: np.concatenate(v) for k, v in cols.items()}


def cmd_density(cfg: RunConfig) -> dict:
    """Columns x, t, k, n, density; t-major, then state, then x."""
    profile, params, spec = cfg.build_profile(), cfg.build_params(), cfg.build_spec()
    x, ts = _axes(cfg)
    grid = Grid(float(x[0]), float(x[1] - x[0]), len(x))
    cols = {"x": [], "t": [], "k": [], "n": [], "density": []}
    for t in ts:
        cs = classical.kinematic_state(profile, params, t)
        for k, n in cfg.states:
            phi = states.eigenfunction(k, n, _state_spec(spec, k), cs, grid, check_tail=False)
            cols["x"].append(grid.x)
            cols["t"].append(np.full(len(x), t))
            cols["k"].append(np.full(len(x), k))
            cols["n"].append(np.full(len(x), n))
            cols["density"].append(phi.density())
    return {k: np.concatenate(v) for k, v in cols.items()}


def _state_spec(spec: SeedSpec, k: int) -> SeedSpec:
    if k == 0:
        return SeedSpec.none()
    if k == 1 and spec.order == 2:
        return spec.first_step()
    return spec


def cmd_propagate(cfg: RunConfig) -> dict:
    """Columns t, overlap, invariant, norm: the CN field under H_{evolve_k}
    compared with the analytic psi_n^(k); ``invariant`` is <I_k>(t)."""
    profile, params, spec = cfg.build_profile(), cfg.build_params(), cfg.build_spec()
    p = cfg.propagate
    k, n, ek = int(p.get("k", 1)), int(p.get("n", 0)), int(p.get("evolve_k", p.get("k", 1)))
    sspec = _state_spec(spec, k)
    cs0 = classical.classical_state(profile, params, 0.0)
    grid = states.default_grid(cs0, 6, int(p.get("grid_n", oracle.N_DEFAULT)))
    psi0 = states.schrodinger_solution(k, n, sspec, profile, params, grid, 0.0)
    # the wrong-Hamiltonian demo wanders to the walls; only the matched run is monitored
    plan = oracle.PropagationPlan(ek, spec, profile, params, grid,
                                  float(p.get("dt", oracle.DT_DEFAULT)), 0.0, float(p.get("t_b", math.pi)),
                                  int(p.get("snapshot_every", 400)), monitor=(ek == k))
    traj = oracle.propagate(plan, psi0)
    ref_plan = replace(plan, k=k, spec=sspec)
    overlaps = [abs(oracle.analytic_reference(ref_plan, t, {n: 1.0}).inner(f))
                for t, f in zip(traj.times, traj.fields)]
    _, inv = oracle.invariant_drift(traj, k, sspec)
    return {"t": np.array(traj.times), "overlap": np.array(overlaps), "invariant": np.array(inv),
            "norm": np.array(traj.norms)}


COMMANDS = {"potential": cmd_potential, "density": cmd_density, "propagate": cmd_propagate}


# ---------------------------------------------------------------------------
# Output

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), FLOAT_FMT)


def render_csv(cfg: RunConfig, cols: dict) -> str:
    lines = [f"# paramosc {__version__} {cfg.command}",
             "# config: " + json.dumps(cfg.to_dict(), sort_keys=True)]
    names = list(cols)
    lines.append(",".join(names))
    ints = {k for k in names if k in ("k", "n")}
    for row in zip(*(cols[k] for k in names)):
        lines.append(",".join(str(int(v)) if k in ints else _fmt(v) for k, v in zip(names, row)))
    return "\n".join(lines) + "\n"


def render_json(cfg: RunConfig, cols: dict) -> str:
    body = {"command": cfg.command, "config": cfg.to_dict(), "columns": list(cols)}
    for k, v in cols.items():
        body[k] = [int(a) for a in v] if k in ("k", "n") else [float(a) for a in v]
    return json.dumps(body, sort_keys=True) + "\n"


def parse_metadata(text: str) -> RunConfig:
    """Recover the RunConfig from a CSV metadata block or a JSON document."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return RunConfig.from_dict(json.loads(stripped)["config"])
    for line in text.splitlines():
        if line.startswith("# config: "):
            return RunConfig.from_dict(json.loads(line[len("# config: "):]))
        if not line.startswith("#"):
            break
    raise ConfigError("no '# config:' metadata line found")


def load_config(path: str) -> tuple:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return data, text


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_config(command: str, args) -> RunConfig:
    data, text = {}, None
    if args.preset:
        data = preset_config(args.preset, args.panel)
    elif args.panel is not None:
        raise ConfigError("--panel needs --preset")
    if args.config:
        file_data, text = load_config(args.config)
        if not isinstance(file_data, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
        data.update(file_data)
    data["command"] = command
    if args.grid is not None and command == "propagate":
        data["propagate"] = {**data.get("propagate", RunConfig().propagate), "grid_n": int(args.grid)}
    elif args.grid is not None:
        data["grid"] = {**data.get("grid", RunConfig().grid), "n": int(args.grid)}
    if args.format is not None:
        data["format"] = args.format
    if args.out is not None:
        data["out"] = args.out
    try:
        return RunConfig.from_dict(data, text)
    except ConfigError as exc:
        prefix = f"{args.config}: " if args.config else ""
        raise ConfigError(prefix + str(exc)) from None


def run_verify(args) -> int:
    reports = []
    stream = None
    try:
        if args.out:
            stream = open(args.out, "w")
        elif args.format == "json":
            stream = sys.stdout
        reports = verify.run_suite(args.selection, args.mutate, stream)
    finally:
        if stream is not None and stream is not sys.stdout:
            stream.close()
    if args.format != "json" or args.out:
        print(verify.summary_table(reports))
    return verify.exit_code(reports)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--grid", type=int, metavar="N", help="number of x points")
    common.add_argument("--preset", choices=sorted(PRESET_PANELS))
    common.add_argument("--panel", type=int, help="panel of the preset (default 1)")
    common.add_argument("--mutate", choices=states.MUTATIONS, help="break one phase term (verify only)")

    ap = argparse.ArgumentParser(prog="paramosc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"paramosc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("potential", parents=[common], help="V_k(x, t) on a grid")
    sub.add_parser("density", parents=[common], help="|phi_n^(k)(x, t)|^2 on a grid")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("selection", nargs="?", default="all", choices=verify.SELECTIONS)
    sub.add_parser("propagate", parents=[common], help="Crank-Nicolson run against the analytic solution")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args)
        if args.mutate:
            raise ConfigError("--mutate only applies to verify")
        cfg = build_config(args.command, args)
        cols = COMMANDS[cfg.command](cfg)
        text = render_json(cfg, cols) if cfg.format == "json" else render_csv(cfg, cols)
        _emit(text, cfg.out)
        return 0
    except BrokenPipeError:
        return 0
    except ConfigError as exc:
        print(f"paramosc: config error: {exc}", file=sys.stderr)
        return 2
    except WindowError as exc:
        print(f"paramosc: window error: {exc}", file=sys.stderr)
        return 3
    except ParamOscError as exc:
        print(f"paramosc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
