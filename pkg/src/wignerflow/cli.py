"""Batch CLI: scenario configs, figure presets, pipeline orchestration.

Subcommands::

    wignerflow run --preset fig1 [--out DIR]
    wignerflow run --config scenario.json
    wignerflow presets list
    wignerflow validate --config scenario.json

Exit codes: 0 success, 2 validation failure, 3 numerical failure. All run
state lives in the config; there are no environment variables.
"""

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ValidationError, WignerFlowError
from .flow import TruncationPolicy, flow_divergence, flow_for_system
from .grids import PhaseGrid, ScalarField
from .output import (
    draw_polyline,
    field_to_pixels,
    topology_payload,
    write_json,
    write_ppm,
    write_scalar_csv,
    write_vector_csv,
)
from .states import PhysicalParams, StateSpec, at_time
from .topology import (
    BilinearField,
    pinch_point_report,
    stagnation_points,
    streamline,
    zero_contours,
)
from .velocity import analytic_gradient, phase_velocity, velocity_divergence
from .wigner import QuadratureSpec, WignerCalculator

ALL_OUTPUTS = (
    "wigner", "flow", "flow_divergence", "velocity", "velocity_divergence",
    "contours", "stagnation", "streamlines", "pinch_report", "plots",
)

_FIG1_TERMS = (
    (0, complex(math.cos(math.pi / 3.0), 0.0)),
    (1, math.sin(math.pi / 3.0) * complex(math.cos(-1.75 * math.pi),
                                          math.sin(-1.75 * math.pi))),
)

PRESETS = {
    "fig1": {
        "description": "harmonic superposition cos(pi/3)|0> + sin(pi/3)e^{-i 7pi/4}|1>",
        "system": "harmonic",
        "params": {"mass": 1.0, "spring_k": 1.0, "hbar": 1.0},
        "state": {
            "basis": "harmonic",
            "terms": [
                {"n": 0, "re": _FIG1_TERMS[0][1].real, "im": _FIG1_TERMS[0][1].imag},
                {"n": 1, "re": _FIG1_TERMS[1][1].real, "im": _FIG1_TERMS[1][1].imag},
            ],
            "t": 0.0,
        },
        "grid": {"x_min": -4.5, "x_max": 4.5, "n_x": 201,
                 "p_min": -4.5, "p_max": 4.5, "n_p": 201},
        "outputs": ["wigner", "flow", "streamlines", "stagnation", "contours", "plots"],
    },
    "fig2": {
        "description": "same superposition under the Kerr Hamiltonian, Lambda = 2",
        "system": "kerr",
        "params": {"mass": 1.0, "spring_k": 1.0, "hbar": 1.0, "kerr_lambda": 2.0},
        "state": {
            "basis": "kerr",
            "terms": [
                {"n": 0, "re": _FIG1_TERMS[0][1].real, "im": _FIG1_TERMS[0][1].imag},
                {"n": 1, "re": _FIG1_TERMS[1][1].real, "im": _FIG1_TERMS[1][1].imag},
            ],
            "t": 0.0,
        },
        "grid": {"x_min": -4.5, "x_max": 4.5, "n_x": 201,
                 "p_min": -4.5, "p_max": 4.5, "n_p": 201},
        "outputs": ["wigner", "flow", "velocity_divergence", "stagnation",
                    "contours", "plots"],
    },
    "fig3": {
        "description": "first excited Morse bound state, U = 8 (1 - e^{-x/4})^2",
        "system": "morse",
        "params": {"mass": 1.0, "spring_k": 1.0, "hbar": 1.0,
                   "morse_depth": 8.0, "morse_range": 0.25},
        "state": {"basis": "morse", "terms": [{"n": 1, "re": 1.0, "im": 0.0}],
                  "t": 0.0},
        "grid": {"x_min": -3.0, "x_max": 12.0, "n_x": 201,
                 "p_min": -4.0, "p_max": 4.0, "n_p": 201},
        "outputs": ["wigner", "flow", "velocity_divergence", "stagnation",
                    "contours", "pinch_report", "plots"],
    },
}


@dataclass
class ScenarioConfig:
    system: str
    params: PhysicalParams
    state: StateSpec
    grid: PhaseGrid
    quad: QuadratureSpec
    trunc: TruncationPolicy
    times: list
    outputs: list
    out_dir: str
    raw: dict = field(default_factory=dict)


def config_hash(raw):
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def parse_config(raw):
    """Build a ScenarioConfig from a JSON dict, collecting every violation."""
    problems = []

    def take(section, key, default=None, required=False):
        sec = raw.get(section, {})
        if required and key not in sec:
            problems.append(f"missing {section}.{key}")
            return default
        return sec.get(key, default)

    system = raw.get("system")
    if system not in ("harmonic", "kerr", "morse"):
        problems.append(f"system must be harmonic, kerr or morse, got {system!r}")

    params = state = grid = quad = trunc = None
    try:
        params = PhysicalParams(**raw.get("params", {}))
    except (ValidationError, TypeError) as exc:
        problems.append(f"params: {exc}")
    try:
        sraw = raw.get("state", {})
        terms = tuple(
            (t["n"], complex(t.get("re", 0.0), t.get("im", 0.0)))
            for t in sraw.get("terms", [])
        )
        state = StateSpec(sraw.get("basis", system), terms, t=float(sraw.get("t", 0.0)))
    except (ValidationError, TypeError, KeyError) as exc:
        problems.append(f"state: {exc}")
    try:
        grid = PhaseGrid(**raw.get("grid", {}))
    except (ValidationError, TypeError) as exc:
        problems.append(f"grid: {exc}")
    try:
        quad = QuadratureSpec(**raw.get("quadrature", {}))
    except (ValidationError, TypeError) as exc:
        problems.append(f"quadrature: {exc}")
    try:
        trunc = TruncationPolicy(**raw.get("truncation", {}))
    except (ValidationError, TypeError) as exc:
        problems.append(f"truncation: {exc}")

    sweep = raw.get("sweep")
    if sweep is not None:
        try:
            steps = int(sweep["steps"])
            if steps < 1:
                problems.append("sweep.steps must be >= 1")
            times = list(np.linspace(float(sweep["start"]), float(sweep["stop"]), steps))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"sweep: {exc}")
            times = [0.0]
    else:
        times = [float(raw.get("state", {}).get("t", 0.0))]

    outputs = raw.get("outputs", [])
    for o in outputs:
        if o not in ALL_OUTPUTS:
            problems.append(f"unknown output {o!r} (choices: {', '.join(ALL_OUTPUTS)})")

    if state is not None and params is not None:
        try:
            state.validate(params)
        except WignerFlowError as exc:
            problems.append(f"state: {exc}")

    if problems:
        raise ValidationError(problems)
    return ScenarioConfig(
        system=system, params=params, state=state, grid=grid, quad=quad,
        trunc=trunc, times=times, outputs=list(outputs),
        out_dir=raw.get("out_dir", "."), raw=raw,
    )


def preset_config(name, out_dir=None):
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}")
    raw = {k: v for k, v in PRESETS[name].items() if k != "description"}
    raw = json.loads(json.dumps(raw))  # deep copy
    if out_dir is not None:
        raw["out_dir"] = str(out_dir)
    return raw


def _default_streamline_seeds(grid):
    r = 0.25 * min(grid.x_max - grid.x_min, grid.p_max - grid.p_min)
    cx = 0.5 * (grid.x_min + grid.x_max)
    cp = 0.5 * (grid.p_min + grid.p_max)
    th = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
    return [(cx + r * math.cos(a), cp + r * math.sin(a)) for a in th]


def run_scenario(config, progress=None):
    """Execute one scenario and write its artifacts; returns the manifest dict."""
    import pathlib

    out = pathlib.Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    artifacts = []

    def emit(path, kind, quantity):
        artifacts.append({
            "path": path.name, "kind": kind, "quantity": quantity,
            "grid": {"x_min": config.grid.x_min, "x_max": config.grid.x_max,
                     "n_x": config.grid.n_x, "p_min": config.grid.p_min,
                     "p_max": config.grid.p_max, "n_p": config.grid.n_p},
        })

    calc = WignerCalculator(
        config.state.basis, config.state.quantum_numbers(), config.grid,
        config.quad, config.params,
    )
    sel = set(config.outputs)
    multi = len(config.times) > 1

    for step, t in enumerate(config.times):
        tag = f"_t{step:02d}" if multi else ""
        state = at_time(config.state, t)
        w = calc.field(state, 0, 0)
        need_flow = sel & {"flow", "flow_divergence", "velocity",
                           "velocity_divergence", "stagnation", "streamlines",
                           "pinch_report", "plots"}
        j = flow_for_system(config.system, state, config.grid, config.quad,
                            config.params, config.trunc, calc=calc) if need_flow else None

        if "wigner" in sel:
            path = out / f"wigner{tag}.csv"
            write_scalar_csv(path, w)
            emit(path, "csv", "wigner")
        if "flow" in sel:
            path = out / f"flow{tag}.csv"
            write_vector_csv(path, j)
            emit(path, "csv", "wigner_flow")
        if "flow_divergence" in sel:
            path = out / f"flow_divergence{tag}.csv"
            write_scalar_csv(path, flow_divergence(j))
            emit(path, "csv", "flow_divergence")

        div_map = None
        if sel & {"velocity", "velocity_divergence"}:
            dwdt = calc.time_derivative(state) if len(state.terms) > 1 else None
            div_map = velocity_divergence(
                j, w, dwdt, grad_w=analytic_gradient(state, calc)
            )
        if "velocity" in sel:
            vel = phase_velocity(j, w)
            path = out / f"velocity{tag}.csv"
            write_vector_csv(
                path,
                type(j)(config.grid, vel.w_x, vel.w_p, quantity="phase_velocity"),
            )
            emit(path, "csv", "phase_velocity")
        if "velocity_divergence" in sel:
            for name, fld in (("velocity_divergence_raw", div_map.raw),
                              ("velocity_divergence_compressed", div_map.compressed)):
                path = out / f"{name}{tag}.csv"
                write_scalar_csv(path, fld)
                emit(path, "csv", fld.quantity)

        stags = stagnation_points(j) if sel & {"stagnation", "pinch_report"} else None
        contour_sets = None
        if "contours" in sel:
            contour_sets = [zero_contours(w, tag="wigner_zero")]
            if j is not None:
                contour_sets.append(zero_contours(
                    ScalarField(config.grid, j.j_p, quantity="j_p"), tag="j_p_zero"))
        pinch = None
        if "pinch_report" in sel:
            pinch = pinch_point_report(w, j, stags)
        if sel & {"stagnation", "contours", "pinch_report"}:
            path = out / f"topology{tag}.json"
            write_json(path, topology_payload(stags, contour_sets, pinch))
            emit(path, "json", "topology")

        lines = None
        if "streamlines" in sel:
            ev = BilinearField(j)
            lines = [streamline(ev, s, step=5e-3, max_length=12.0)
                     for s in _default_streamline_seeds(config.grid)]
            path = out / f"streamlines{tag}.json"
            write_json(path, {
                "streamlines": [
                    {"terminated": ln.terminated,
                     "points": [[float(a), float(b)] for a, b in ln.points]}
                    for ln in lines
                ],
            })
            emit(path, "json", "streamlines")

        if "plots" in sel:
            img = field_to_pixels(w)
            path = out / f"wigner{tag}.ppm"
            write_ppm(path, img)
            emit(path, "ppm", "wigner")
            if lines:
                over = field_to_pixels(w)
                for ln in lines:
                    draw_polyline(over, config.grid, ln.points)
                path = out / f"streamlines{tag}.ppm"
                write_ppm(path, over)
                emit(path, "ppm", "streamlines")
            if div_map is not None:
                imgc = field_to_pixels(div_map.compressed, symmetric_limit=1.0,
                                       mask=div_map.valid)
                path = out / f"velocity_divergence{tag}.ppm"
                write_ppm(path, imgc)
                emit(path, "ppm", "compressed_divergence")

    manifest = {
        "config_hash": config_hash(config.raw),
        "version": __version__,
        "wall_time_s": time.monotonic() - started,
        "artifacts": artifacts,
    }
    write_json(out / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def make_parser():
    parser = argparse.ArgumentParser(prog="wignerflow",
                                     description="Wigner flow batch pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario")
    group = run.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="path to a JSON scenario config")
    group.add_argument("--preset", choices=sorted(PRESETS),
                       help="named figure reproduction")
    run.add_argument("--out", help="output directory (overrides config)")

    pre = sub.add_parser("presets", help="preset utilities")
    pre.add_argument("action", choices=["list"])

    val = sub.add_parser("validate", help="validate a config without running")
    val.add_argument("--config", required=True)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name in sorted(PRESETS):
                print(f"{name}: {PRESETS[name]['description']}")
            return 0
        if args.command == "validate":
            with open(args.config) as fh:
                raw = json.load(fh)
            parse_config(raw)
            print("config ok")
            return 0
        if args.preset:
            raw = preset_config(args.preset, out_dir=args.out or args.preset)
        else:
            with open(args.config) as fh:
                raw = json.load(fh)
            if args.out:
                raw["out_dir"] = args.out
        config = parse_config(raw)
        manifest = run_scenario(config)
        print(f"wrote {len(manifest['artifacts'])} artifacts to {config.out_dir} "
              f"(config {manifest['config_hash'][:12]})")
        return 0
    except ValidationError as exc:
        for v in exc.violations:
            print(f"validation: {v}", file=sys.stderr)
        return 2
    except WignerFlowError as exc:
        print(f"numerical failure in {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
