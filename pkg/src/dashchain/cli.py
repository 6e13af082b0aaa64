"""Command-line entry point.

Exit codes: 0 success (for ``analyze``: controllable and observable),
3 ``analyze`` found a common root, 1 usage or input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import analysis, chain_model, dynamics, poly_engine
from .errors import (
    BadStep,
    ChainSpecError,
    DashchainError,
    DerivedStiffnessNonPositive,
    InsufficientSamples,
    NotControllable,
    NotObservable,
    OracleDimensionExceeded,
)
from .polynomial import format_fraction, format_poly, to_fraction

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_NEGATIVE = 0, 1, 2, 3

SUBCOMMANDS = ("analyze", "polys", "simulate", "control", "observe", "counterexample", "quarter-car")
DYNAMICS = ("simulate", "control", "observe", "quarter-car")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliConfig:
    subcommand: str
    spec_path: Optional[str] = None
    output_path: Optional[str] = None
    horizon: float = dynamics.DEFAULT_HORIZON
    step: float = dynamics.DEFAULT_STEP
    seed: Optional[int] = None
    format: str = "json"
    options: Optional[dict] = None

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand in DYNAMICS:
            if not (self.step > 0) or not math.isfinite(self.step):
                raise BadStep(f"--step must be > 0, got {self.step}")
            if not (self.horizon >= self.step):
                raise BadStep(f"--horizon must be at least one step, got {self.horizon}")
        if self.spec_path is None and self.subcommand not in ("counterexample", "quarter-car"):
            raise UsageError(f"{self.subcommand} needs a spec file")
        if self.format not in ("json", "csv", "text"):
            raise UsageError(f"unknown format {self.format!r}")


def _floats(text: Optional[str], dim: int, what: str) -> np.ndarray:
    if text is None:
        return np.zeros(dim)
    vals = [float(to_fraction(x)) for x in text.split(",") if x.strip()]
    if len(vals) != dim:
        raise UsageError(f"{what} needs {dim} comma-separated values, got {len(vals)}")
    return np.array(vals)


def _input_signal(text: str):
    parts = text.split(":")
    kind = parts[0]
    if kind == "zero" and len(parts) == 1:
        return None
    if kind == "const" and len(parts) == 2:
        return float(parts[1])
    if kind == "sine" and len(parts) == 3:
        amp, freq = float(parts[1]), float(parts[2])
        return lambda t: amp * math.sin(2 * math.pi * freq * t)
    raise UsageError(f"bad input {text!r}; use zero, const:<v> or sine:<amp>:<freq>")


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- subcommands ------------------------------------------------------------

def _analyze(cfg: CliConfig):
    spec = chain_model.load_spec(cfg.spec_path)
    verdict = analysis.decide(spec)
    return _json(verdict.to_dict()), EXIT_OK if verdict.controllable_observable else EXIT_NEGATIVE


def polys_text(spec: chain_model.ChainSpec) -> str:
    """Canonical text block printed by ``polys``."""
    p = poly_engine.char_poly_recursive(spec)
    fact = poly_engine.adjoint_poly_closed_form(spec)
    lines = [
        f"char_poly: {format_poly(p)}",
        f"adjoint_poly: {format_poly(fact.expand())}",
        f"adjoint_factored: {fact}",
        "adjoint_roots: " + (", ".join(format_fraction(r) for r in fact.roots) or "none"),
    ]
    return "\n".join(lines) + "\n"


def _polys(cfg: CliConfig):
    spec = chain_model.load_spec(cfg.spec_path)
    if cfg.format == "json":
        fact = poly_engine.adjoint_poly_closed_form(spec)
        out = {
            "char_poly": format_poly(poly_engine.char_poly_recursive(spec)),
            "adjoint_poly": format_poly(fact.expand()),
            "adjoint_factored": str(fact),
            "adjoint_roots": [format_fraction(r) for r in fact.roots],
        }
        return _json(out), EXIT_OK
    return polys_text(spec), EXIT_OK


def _simulate(cfg: CliConfig):
    spec = chain_model.load_spec(cfg.spec_path)
    model = chain_model.assemble_state_space(spec)
    opts = cfg.options
    z0 = _floats(opts.get("z0"), model.dim, "--z0")
    traj = dynamics.simulate(model, z0, _input_signal(opts.get("input") or "zero"), cfg.horizon, cfg.step)
    return traj.to_csv(), EXIT_OK


def _control(cfg: CliConfig):
    spec = chain_model.load_spec(cfg.spec_path)
    model = chain_model.assemble_state_space(spec)
    opts = cfg.options
    z0 = _floats(opts.get("z0"), model.dim, "--z0")
    target = _floats(opts.get("target"), model.dim, "--target")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = dynamics.min_energy_control(model, z0, target, cfg.horizon, cfg.step)
    if cfg.format == "json":
        check = dynamics.simulate(model, z0, plan.samples, cfg.horizon, cfg.step)
        out = {
            "horizon": plan.horizon,
            "step": plan.step,
            "gramian_condition": plan.gramian_condition,
            "energy": plan.energy,
            "terminal_error": float(np.max(np.abs(check.states[-1] - target))),
        }
        return _json(out), EXIT_OK
    return plan.to_csv(), EXIT_OK


def _observe(cfg: CliConfig):
    spec = chain_model.load_spec(cfg.spec_path)
    model = chain_model.assemble_state_space(spec)
    opts = cfg.options
    z0 = _floats(opts.get("z0"), model.dim, "--z0")
    traj = dynamics.simulate(model, z0, None, cfg.horizon, cfg.step)
    samples = dynamics.sample_outputs(traj, opts.get("samples") or 200)
    rec = dynamics.reconstruct_initial_state(model, samples)
    scale = max(float(np.max(np.abs(z0))), 1.0)
    out = {
        "initial_state": [float(x) for x in z0],
        "reconstructed": [float(x) for x in rec.state],
        "relative_error": float(np.max(np.abs(rec.state - z0))) / scale,
        "residual": rec.residual,
        "samples": int(len(samples)),
    }
    return _json(out), EXIT_OK


def _random_counterexample(seed: int) -> analysis.CounterexampleN3:
    rng = random.Random(seed)
    for _ in range(10_000):
        m = [Fraction(rng.randint(1, 12), rng.randint(1, 12)) for _ in range(3)]
        k1 = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        c1 = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        c2 = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        try:
            return analysis.make_counterexample_n3(m, k1, c1, c2)
        except DerivedStiffnessNonPositive:
            continue
    raise DashchainError("no counterexample found for this seed")


def _counterexample(cfg: CliConfig):
    opts = cfg.options
    if opts.get("nonproportional"):
        m = [to_fraction(x) for x in (opts.get("m") or "1,1,1").split(",")]
        c1 = to_fraction(opts.get("c1") or 1)
        c2 = to_fraction(opts.get("c2") or 1)
        spec = analysis.make_controllable_nonproportional_n3(m, c1, c2)
        return _json(spec.to_dict()), EXIT_OK
    if opts.get("m") is None and cfg.seed is not None:
        ce = _random_counterexample(cfg.seed)
    else:
        m = [to_fraction(x) for x in (opts.get("m") or "1,1,1").split(",")]
        ce = analysis.make_counterexample_n3(m, opts.get("k1") or 1, opts.get("c1") or 1,
                                             opts.get("c2") or 1)
    out = ce.spec.to_dict()
    out["counterexample"] = {
        "k2": format_fraction(ce.k2),
        "common_root": format_fraction(ce.common_root),
        "h_sum": format_fraction(ce.h_sum),
    }
    return _json(out), EXIT_OK


def _quarter_car(cfg: CliConfig):
    opts = cfg.options
    params = {k: opts[k] for k in ("m1", "m2", "k1", "c1", "k", "c") if opts.get(k) is not None}
    qc = dynamics.QuarterCarSpec(road=dynamics.road_profile(opts.get("road") or "flat"), **params)
    x0 = _floats(opts.get("z0"), 4, "--z0")
    run = dynamics.quarter_car_demo(qc, cfg.horizon, cfg.step, x0)
    if cfg.format == "json":
        out = {
            "chain_controllable_observable": run.chain_verdict.controllable_observable,
            "initial_state": [float(x) for x in run.initial_state],
            "reconstructed": [float(x) for x in run.reconstruction.state],
            "relative_error": run.reconstruction_error,
            "max_abs_state": float(np.max(np.abs(run.trajectory.states))),
        }
        return _json(out), EXIT_OK
    return run.trajectory.to_csv(), EXIT_OK


HANDLERS = {
    "analyze": _analyze,
    "polys": _polys,
    "simulate": _simulate,
    "control": _control,
    "observe": _observe,
    "counterexample": _counterexample,
    "quarter-car": _quarter_car,
}


def run(cfg: CliConfig, stdout=None) -> int:
    """Execute a validated config; returns the process exit code."""
    stdout = stdout or sys.stdout
    try:
        cfg.validate()
        text, code = HANDLERS[cfg.subcommand](cfg)
    except (UsageError, ChainSpecError, BadStep, InsufficientSamples, DerivedStiffnessNonPositive,
            OracleDimensionExceeded, NotControllable, NotObservable, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dashchain", description="Dashpot-spring-mass chain analysis and simulation.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, fmt="json", dyn=False, spec=True):
        if spec:
            sp.add_argument("spec_file", nargs="?", help="chain spec (.json or .toml)")
            sp.add_argument("--spec", dest="spec_opt", help="chain spec, alternative to the positional")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")
        sp.add_argument("--format", default=fmt, choices=("json", "csv", "text"))
        if dyn:
            sp.add_argument("--horizon", type=float, default=dynamics.DEFAULT_HORIZON, help="final time (s)")
            sp.add_argument("--step", type=float, default=dynamics.DEFAULT_STEP, help="RK4 step (s)")

    common(sub.add_parser("analyze", help="exact controllability/observability verdict (JSON)"))
    common(sub.add_parser("polys", help="characteristic and adjoint polynomials"), fmt="text")

    sp = sub.add_parser("simulate", help="RK4 trajectory as CSV t,z1..z2N,y,u")
    common(sp, fmt="csv", dyn=True)
    sp.add_argument("--z0", help="initial state, comma separated")
    sp.add_argument("--input", default="zero", help="zero | const:<v> | sine:<amp>:<freq_hz>")

    sp = sub.add_parser("control", help="minimum-energy control as CSV t,u")
    common(sp, fmt="csv", dyn=True)
    sp.add_argument("--z0", help="initial state, comma separated (default zero)")
    sp.add_argument("--target", required=True, help="target state, comma separated")

    sp = sub.add_parser("observe", help="simulate, sample y, reconstruct z0 (JSON)")
    common(sp, dyn=True)
    sp.add_argument("--z0", required=True, help="true initial state, comma separated")
    sp.add_argument("--samples", type=int, default=200)

    sp = sub.add_parser("counterexample", help="three-mass chain with a common root (JSON spec)")
    common(sp, spec=False)
    sp.add_argument("--m", help="three masses, comma separated")
    sp.add_argument("--k1")
    sp.add_argument("--c1")
    sp.add_argument("--c2")
    sp.add_argument("--seed", type=int, help="draw random parameters with this seed")
    sp.add_argument("--nonproportional", action="store_true",
                    help="instead find a controllable chain with c/k not proportional")

    sp = sub.add_parser("quarter-car", help="quarter-car road response and state recovery")
    common(sp, fmt="csv", dyn=True, spec=False)
    sp.set_defaults(step=1e-4)
    for name in ("m1", "m2", "k1", "c1", "k", "c"):
        sp.add_argument(f"--{name}", type=float)
    sp.add_argument("--road", default="flat", help="flat | step:<height>:<time> | sine:<amp>:<freq_hz>")
    sp.add_argument("--z0", help="initial state z1,z2,v1,v2")
    return p


def parse_config(argv) -> CliConfig:
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("subcommand")
    spec_path = ns.pop("spec_opt", None) or ns.pop("spec_file", None)
    ns.pop("spec_file", None)
    return CliConfig(
        subcommand=cmd,
        spec_path=spec_path,
        output_path=ns.pop("output", None),
        horizon=ns.pop("horizon", dynamics.DEFAULT_HORIZON),
        step=ns.pop("step", dynamics.DEFAULT_STEP),
        seed=ns.pop("seed", None),
        format=ns.pop("format", "json"),
        options=ns,
    )


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
