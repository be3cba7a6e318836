"""Command-line front end: JSON configs in, CSV series and JSON reports out.

Numbers are printed with 17 significant digits so every CSV reloads to the
exact binary64 value that was written; identical configs therefore yield
byte-identical outputs.  All file writes go through a temp-file rename, so
a failing run never leaves a partial file behind.

Exit codes: 0 success, 2 configuration or schema error, 3 runtime domain
error (axis singularity, field domain, runaway guard, budget), 4 a scaling
gate failed (converge / theorem1).  Diagnostics go to stderr as a single
JSON line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .boris import Trajectory, magnetic_moment
from .drift import DriftConfig, DriftTrajectory, drift_init, drift_integrate
from .errors import (
    AxisSingularity,
    BudgetExceeded,
    DomainError,
    GridMismatch,
    SanityGuard,
    SchemaError,
    ToroborisError,
)
from .geometry import PRESET_NAME, ToroidalFieldModel, check_field, toroidal_model, toroidal_probes
from .harness import (
    DEFAULT_BUDGET,
    ErrorSeries,
    ExperimentSpec,
    convergence_study,
    error_vs_drift,
    error_vs_reference,
    observables,
    run_drift,
    run_reference,
    run_trajectory,
    theorem1_suite,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_GATE = 4

_RUNTIME_ERRORS = (AxisSingularity, DomainError, SanityGuard, BudgetExceeded, GridMismatch)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp, path)


def _diag(name: str, message: str, **extra) -> None:
    payload = {"error": name, "message": message}
    payload.update(extra)
    print(json.dumps(payload), file=sys.stderr)


# ---------------------------------------------------------------------------
# config parsing


def _expect_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {type(value).__name__}")
    return value


def _check_keys(obj: dict, path: str, required: set, optional: set) -> None:
    for key in obj:
        if key not in required and key not in optional:
            raise SchemaError(f"{path}/{key}", "unknown key")
    for key in required:
        if key not in obj:
            raise SchemaError(f"{path}/{key}", "missing required key")


def _number(obj: dict, key: str, path: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise SchemaError(f"{path}/{key}", "missing required key")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}/{key}", "expected a number")
    v = float(v)
    if not np.isfinite(v):
        raise SchemaError(f"{path}/{key}", "number must be finite")
    return v


def _integer(obj: dict, key: str, path: str, default=None) -> int:
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{path}/{key}", "expected an integer")
    return v


def _string(obj: dict, key: str, path: str, default=None, choices=None) -> str:
    if key not in obj:
        if default is None:
            raise SchemaError(f"{path}/{key}", "missing required key")
        return default
    v = obj[key]
    if not isinstance(v, str):
        raise SchemaError(f"{path}/{key}", "expected a string")
    if choices is not None and v not in choices:
        raise SchemaError(f"{path}/{key}", f"expected one of {sorted(choices)}, got {v!r}")
    return v


def _vec3(obj: dict, key: str, path: str) -> tuple[float, float, float]:
    if key not in obj:
        raise SchemaError(f"{path}/{key}", "missing required key")
    v = obj[key]
    if not isinstance(v, list) or len(v) != 3:
        raise SchemaError(f"{path}/{key}", "expected an array of 3 numbers")
    out = []
    for i, comp in enumerate(v):
        if isinstance(comp, bool) or not isinstance(comp, (int, float)):
            raise SchemaError(f"{path}/{key}/{i}", "expected a number")
        if not np.isfinite(float(comp)):
            raise SchemaError(f"{path}/{key}/{i}", "number must be finite")
        out.append(float(comp))
    return tuple(out)


@dataclass(frozen=True)
class FieldConfig:
    preset: str
    a0: float
    a1: float
    a2: float
    c: float

    def build(self, epsilon: float, r_min: float) -> ToroidalFieldModel:
        return toroidal_model(
            epsilon, a0=self.a0, a1=self.a1, a2=self.a2, c=self.c, r_min=r_min
        )

    def to_dict(self) -> dict:
        return {"preset": self.preset, "a0": self.a0, "a1": self.a1, "a2": self.a2, "c": self.c}


def _parse_field(obj: dict, path: str) -> FieldConfig:
    field = _expect_object(obj, path)
    _check_keys(field, path, {"preset"}, {"a0", "a1", "a2", "c"})
    preset = _string(field, "preset", path, choices={PRESET_NAME})
    return FieldConfig(
        preset=preset,
        a0=_number(field, "a0", path, default=0.0),
        a1=_number(field, "a1", path, default=1.0),
        a2=_number(field, "a2", path, default=1.0),
        c=_number(field, "c", path, default=0.1),
    )


@dataclass(frozen=True)
class RunConfig:
    """Validated simulate/drift/compare configuration with defaults filled."""

    epsilon: float
    h: float
    t_final: float
    variant: str
    field: FieldConfig
    x0: tuple[float, float, float]
    v0: tuple[float, float, float]
    output_path: str
    stride: float
    summary_path: str | None
    r_min: float
    budget_steps: int
    c: float
    dtau: float
    against: str
    ref_h_factor: float
    ref_filtered: bool

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "h": self.h,
            "t_final": self.t_final,
            "variant": self.variant,
            "field": self.field.to_dict(),
            "x0": list(self.x0),
            "v0": list(self.v0),
            "output": {
                "path": self.output_path,
                "stride": self.stride,
                **({"summary_path": self.summary_path} if self.summary_path else {}),
            },
            "r_min": self.r_min,
            "budget_steps": self.budget_steps,
            "c": self.c,
            "dtau": self.dtau,
            "against": self.against,
            "reference": {"h_factor": self.ref_h_factor, "filtered": self.ref_filtered},
        }

    def model(self) -> ToroidalFieldModel:
        return self.field.build(self.epsilon, self.r_min)

    def spec(self) -> ExperimentSpec:
        return ExperimentSpec(
            field=self.model(),
            x0=self.x0,
            v0=self.v0,
            h=self.h,
            t_final=self.t_final,
            variant=self.variant,
            dt_out=self.stride,
            ref_h_factor=self.ref_h_factor,
            ref_filtered_init=self.ref_filtered,
            c=self.c,
            budget_steps=self.budget_steps,
            dtau=self.dtau,
        )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration, filling defaults.

    Unknown keys are rejected; errors carry a JSON-pointer-style path to
    the offending key.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON: {e}") from e
    obj = _expect_object(raw, "")
    _check_keys(
        obj,
        "",
        {"epsilon", "h", "t_final", "variant", "field", "x0", "v0", "output"},
        {"r_min", "budget_steps", "c", "dtau", "against", "reference"},
    )
    epsilon = _number(obj, "epsilon", "")
    if not 0.0 < epsilon <= 1.0:
        raise SchemaError("/epsilon", f"must lie in (0, 1], got {epsilon}")
    h = _number(obj, "h", "")
    if h <= 0.0:
        raise SchemaError("/h", "must be positive")
    t_final = _number(obj, "t_final", "")
    if t_final < 0.0:
        raise SchemaError("/t_final", "must be nonnegative")
    variant = _string(obj, "variant", "", choices={"standard", "modified"})
    field = _parse_field(obj.get("field"), "/field")
    x0 = _vec3(obj, "x0", "")
    v0 = _vec3(obj, "v0", "")
    output = _expect_object(obj.get("output"), "/output")
    _check_keys(output, "/output", {"path"}, {"stride", "summary_path"})
    output_path = _string(output, "path", "/output")
    stride = _number(output, "stride", "/output", default=max(h, 0.5))
    if stride <= 0.0:
        raise SchemaError("/output/stride", "must be positive")
    summary_path = output.get("summary_path")
    if summary_path is not None and not isinstance(summary_path, str):
        raise SchemaError("/output/summary_path", "expected a string")
    r_min = _number(obj, "r_min", "", default=1e-9)
    if r_min <= 0.0:
        raise SchemaError("/r_min", "must be positive")
    budget = _integer(obj, "budget_steps", "", default=DEFAULT_BUDGET)
    if budget <= 0:
        raise SchemaError("/budget_steps", "must be positive")
    c = _number(obj, "c", "", default=0.5)
    if c <= 0.0:
        raise SchemaError("/c", "must be positive")
    dtau = _number(obj, "dtau", "", default=1e-4)
    against = _string(obj, "against", "", default="reference", choices={"reference", "drift"})
    ref = obj.get("reference", {})
    ref = _expect_object(ref, "/reference")
    _check_keys(ref, "/reference", set(), {"h_factor", "filtered"})
    ref_h_factor = _number(ref, "h_factor", "/reference", default=0.05)
    if not 0.0 < ref_h_factor <= 1.0:
        raise SchemaError("/reference/h_factor", "must lie in (0, 1]")
    ref_filtered = ref.get("filtered", False)
    if not isinstance(ref_filtered, bool):
        raise SchemaError("/reference/filtered", "expected a boolean")
    return RunConfig(
        epsilon=epsilon,
        h=h,
        t_final=t_final,
        variant=variant,
        field=field,
        x0=x0,
        v0=v0,
        output_path=output_path,
        stride=stride,
        summary_path=summary_path,
        r_min=r_min,
        budget_steps=budget,
        c=c,
        dtau=dtau,
        against=against,
        ref_h_factor=ref_h_factor,
        ref_filtered=ref_filtered,
    )


def serialize_config(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# CSV writers / readers

TRAJECTORY_HEADER = "t,x1,x2,x3,v1,v2,v3,r,z,vpar,mu,energy"
DRIFT_HEADER = "t,r,z,vpar,rv_invariant"
ERROR_HEADER = "t,err_r,err_z,err_vpar"


def trajectory_csv(traj: Trajectory) -> str:
    obs = observables(traj)
    lines = [TRAJECTORY_HEADER]
    for i in range(len(traj)):
        row = (
            traj.t[i],
            traj.x[i, 0],
            traj.x[i, 1],
            traj.x[i, 2],
            traj.v[i, 0],
            traj.v[i, 1],
            traj.v[i, 2],
            obs.r[i],
            obs.z[i],
            obs.vpar[i],
            obs.mu[i],
            obs.energy[i],
        )
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def drift_csv(traj: DriftTrajectory) -> str:
    lines = [DRIFT_HEADER]
    rv = traj.rv_invariant
    for i in range(len(traj)):
        row = (traj.t[i], traj.r[i], traj.z[i], traj.vpar[i], rv[i])
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def error_csv(err: ErrorSeries) -> str:
    lines = [ERROR_HEADER]
    for i in range(len(err.t)):
        row = (err.t[i], err.err_r[i], err.err_z[i], err.err_vpar[i])
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_series_csv(path: str, columns: tuple[str, ...]):
    """Read named columns from a CSV produced by this tool."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(f"/{path}", f"CSV lacks columns {missing}")
        idx = [header.index(c) for c in columns]
        rows = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            rows.append([float(parts[i]) for i in idx])
    data = np.asarray(rows, dtype=float)
    return {c: data[:, k] for k, c in enumerate(columns)}


# ---------------------------------------------------------------------------
# subcommands


def _load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON: {e}") from e
    return _expect_object(raw, "")


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    spec = config.spec()
    traj = run_trajectory(spec)
    _atomic_write(config.output_path, trajectory_csv(traj))
    if traj.error is not None:
        _diag("RuntimeDomainError", f"run aborted: {traj.error}", tag=traj.error,
              steps=traj.steps_completed)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_drift(args) -> int:
    config = _load_config(args.config)
    model = config.model()
    s0 = drift_init(config.x0, config.v0, model)
    mu0 = magnetic_moment(config.x0, config.v0, model)
    dconf = DriftConfig(epsilon=config.epsilon, mu0=mu0, dtau=config.dtau, dt_out=config.stride)
    traj = drift_integrate(s0, model, dconf, config.t_final)
    _atomic_write(config.output_path, drift_csv(traj))
    return EXIT_OK


def _compare_from_csvs(path_a: str, path_b: str) -> ErrorSeries:
    cols = ("t", "r", "z", "vpar")
    a = read_series_csv(path_a, cols)
    b = read_series_csv(path_b, cols)
    if len(a["t"]) != len(b["t"]) or np.max(np.abs(a["t"] - b["t"])) > 1e-12:
        raise GridMismatch(
            float(np.max(np.abs(a["t"] - b["t"]))) if len(a["t"]) == len(b["t"]) else float("inf")
        )
    return ErrorSeries(
        t=a["t"],
        err_r=np.abs(a["r"] - b["r"]),
        err_z=np.abs(a["z"] - b["z"]),
        err_vpar=np.abs(a["vpar"] - b["vpar"]),
    )


def _cmd_compare(args) -> int:
    if args.csv_a or args.csv_b:
        if not (args.csv_a and args.csv_b and args.out):
            _diag("ConfigError", "CSV mode needs --csv-a, --csv-b and --out")
            return EXIT_CONFIG
        err = _compare_from_csvs(args.csv_a, args.csv_b)
        summary = {"max_err": err.max_by_component(), "n_samples": len(err.t)}
        _atomic_write(args.out, error_csv(err))
        if args.summary:
            _atomic_write(args.summary, json.dumps(summary, indent=2) + "\n")
        else:
            print(json.dumps(summary))
        return EXIT_OK
    if not args.config:
        _diag("ConfigError", "compare needs either --config or --csv-a/--csv-b/--out")
        return EXIT_CONFIG
    config = _load_config(args.config)
    spec = config.spec()
    traj = run_trajectory(spec)
    if traj.error is not None:
        _diag("RuntimeDomainError", f"run aborted: {traj.error}", tag=traj.error)
        return EXIT_RUNTIME
    obs = observables(traj)
    if config.against == "drift":
        comparator = run_drift(spec, sample_times=traj.t)
        err = error_vs_drift(obs, comparator)
        ref_steps = None
    else:
        ref = run_reference(spec)
        if ref.error is not None:
            _diag("RuntimeDomainError", f"reference aborted: {ref.error}", tag=ref.error)
            return EXIT_RUNTIME
        err = error_vs_reference(obs, observables(ref))
        ref_steps = ref.steps_completed
    summary = {
        "max_err": err.max_by_component(),
        "n_samples": len(err.t),
        "against": config.against,
        "epsilon": config.epsilon,
        "h": config.h,
        "variant": config.variant,
        "steps": {"run": traj.steps_completed, "reference": ref_steps},
        "sigma_min": traj.sigma_min,
        "warnings": traj.warnings,
    }
    _atomic_write(config.output_path, error_csv(err))
    if config.summary_path:
        _atomic_write(config.summary_path, json.dumps(summary, indent=2) + "\n")
    else:
        print(json.dumps(summary))
    return EXIT_OK


def _parse_converge_config(obj: dict):
    _check_keys(
        obj,
        "",
        {"mode", "field", "x0", "v0", "output"},
        {"pairs", "h_list", "epsilon", "c", "stride", "dtau", "budget_steps", "order_band"},
    )
    mode = _string(obj, "mode", "", choices={"scaled_pairs", "fixed_eps"})
    field = _parse_field(obj.get("field"), "/field")
    x0 = _vec3(obj, "x0", "")
    v0 = _vec3(obj, "v0", "")
    output = _expect_object(obj.get("output"), "/output")
    _check_keys(output, "/output", {"path"}, {"csv_dir"})
    c = _number(obj, "c", "", default=0.5)
    dtau = _number(obj, "dtau", "", default=1e-4)
    budget = _integer(obj, "budget_steps", "", default=DEFAULT_BUDGET)
    band = obj.get("order_band", [1.7, 2.3])
    if not isinstance(band, list) or len(band) != 2:
        raise SchemaError("/order_band", "expected [low, high]")
    pairs = None
    h_list = None
    epsilon = None
    if mode == "scaled_pairs":
        raw_pairs = obj.get("pairs")
        if not isinstance(raw_pairs, list) or len(raw_pairs) < 2:
            raise SchemaError("/pairs", "expected a list of at least 2 [epsilon, h] pairs")
        pairs = []
        for i, p in enumerate(raw_pairs):
            if not isinstance(p, list) or len(p) != 2:
                raise SchemaError(f"/pairs/{i}", "expected [epsilon, h]")
            pairs.append((float(p[0]), float(p[1])))
    else:
        epsilon = _number(obj, "epsilon", "")
        raw_h = obj.get("h_list")
        if not isinstance(raw_h, list) or len(raw_h) < 2:
            raise SchemaError("/h_list", "expected a list of at least 2 step sizes")
        h_list = [float(v) for v in raw_h]
    stride = obj.get("stride")
    return {
        "mode": mode,
        "field": field,
        "x0": x0,
        "v0": v0,
        "output_path": _string(output, "path", "/output"),
        "csv_dir": output.get("csv_dir"),
        "c": c,
        "dtau": dtau,
        "budget": budget,
        "band": (float(band[0]), float(band[1])),
        "pairs": pairs,
        "h_list": h_list,
        "epsilon": epsilon,
        "stride": stride,
    }


def _cmd_converge(args) -> int:
    cfg = _parse_converge_config(_load_json(args.config))
    if cfg["mode"] == "scaled_pairs":
        eps0, h0 = cfg["pairs"][0]
    else:
        eps0, h0 = cfg["epsilon"], cfg["h_list"][0]
    base_model = cfg["field"].build(eps0, 1e-9)
    base_spec = ExperimentSpec(
        field=base_model,
        x0=cfg["x0"],
        v0=cfg["v0"],
        h=h0,
        t_final=cfg["c"] / eps0,
        variant="modified",
        dt_out=cfg["stride"],
        c=cfg["c"],
        budget_steps=cfg["budget"],
        dtau=cfg["dtau"],
    )
    csv_dir = cfg["csv_dir"]
    report = convergence_study(
        base_spec,
        cfg["mode"],
        h_list=cfg["h_list"],
        pairs=cfg["pairs"],
        order_band=cfg["band"],
        keep_series=csv_dir is not None,
    )
    if csv_dir is not None:
        os.makedirs(csv_dir, exist_ok=True)
        for point, err in zip(report.points, report.series):
            name = f"errors_eps{point.epsilon:g}_h{point.h:g}.csv"
            _atomic_write(os.path.join(csv_dir, name), error_csv(err))
    _atomic_write(cfg["output_path"], json.dumps(report.to_dict(), indent=2) + "\n")
    if not report.passed:
        _diag("GateFailure", "convergence order gate failed", slopes=report.slopes)
        return EXIT_GATE
    return EXIT_OK


def _cmd_theorem1(args) -> int:
    obj = _load_json(args.config)
    _check_keys(
        obj,
        "",
        {"eps_list", "field", "x0", "v0", "output"},
        {"c", "stride", "dtau", "budget_steps"},
    )
    raw_eps = obj.get("eps_list")
    if not isinstance(raw_eps, list) or not raw_eps:
        raise SchemaError("/eps_list", "expected a non-empty list of numbers")
    eps_list = [float(v) for v in raw_eps]
    field = _parse_field(obj.get("field"), "/field")
    x0 = _vec3(obj, "x0", "")
    v0 = _vec3(obj, "v0", "")
    output = _expect_object(obj.get("output"), "/output")
    _check_keys(output, "/output", {"path"}, {"csv_dir"})
    c = _number(obj, "c", "", default=0.5)
    stride = _number(obj, "stride", "", default=0.5)
    dtau = _number(obj, "dtau", "", default=1e-4)
    budget = _integer(obj, "budget_steps", "", default=DEFAULT_BUDGET)
    csv_dir = output.get("csv_dir")
    report = theorem1_suite(
        lambda eps: field.build(eps, 1e-9),
        eps_list,
        c,
        x0,
        v0,
        dt_out=stride,
        budget_steps=budget,
        dtau=dtau,
        keep_series=csv_dir is not None,
    )
    if csv_dir is not None:
        os.makedirs(csv_dir, exist_ok=True)
        for eps, err in zip(report.eps_list, report.series):
            _atomic_write(os.path.join(csv_dir, f"errors_eps{eps:g}.csv"), error_csv(err))
    _atomic_write(_string(output, "path", "/output"), json.dumps(report.to_dict(), indent=2) + "\n")
    if not report.passed:
        _diag("GateFailure", "epsilon scaling gate failed", ratios=report.ratios)
        return EXIT_GATE
    return EXIT_OK


def _cmd_check_field(args) -> int:
    obj = _load_json(args.config)
    _check_keys(obj, "", {"epsilon", "field"}, {"probes", "delta", "output", "r_min"})
    epsilon = _number(obj, "epsilon", "")
    field = _parse_field(obj.get("field"), "/field")
    r_min = _number(obj, "r_min", "", default=1e-9)
    probes_cfg = _expect_object(obj.get("probes", {}), "/probes")
    _check_keys(probes_cfg, "/probes", set(), {"count", "seed", "r_range", "z_range"})
    count = _integer(probes_cfg, "count", "/probes", default=50)
    seed = _integer(probes_cfg, "seed", "/probes", default=0)
    r_range = tuple(probes_cfg.get("r_range", (0.25, 1.0)))
    z_range = tuple(probes_cfg.get("z_range", (-0.75, 0.75)))
    delta = _number(obj, "delta", "", default=1e-6)
    model = field.build(epsilon, r_min)
    probes = toroidal_probes(count, seed=seed, r_range=r_range, z_range=z_range)
    report = check_field(model, probes, delta=delta)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    output = obj.get("output")
    if output is not None:
        output = _expect_object(output, "/output")
        _check_keys(output, "/output", {"path"}, set())
        _atomic_write(_string(output, "path", "/output"), text)
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toroboris",
        description="Large-stepsize Boris pushers and slow-drift studies in toroidal fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a pusher and write the trajectory CSV")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("drift", help="integrate the slow system and write its CSV")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_drift)

    p = sub.add_parser("compare", help="error series of a run against reference or drift")
    p.add_argument("--config")
    p.add_argument("--csv-a")
    p.add_argument("--csv-b")
    p.add_argument("--out")
    p.add_argument("--summary")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("converge", help="order-of-accuracy study (exit 4 on gate failure)")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("theorem1", help="epsilon-scaling study (exit 4 on gate failure)")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_theorem1)

    p = sub.add_parser("check-field", help="numerical field self-validation report")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_check_field)

    return parser


def cli_main(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except SchemaError as e:
        _diag("SchemaError", str(e), path=e.path)
        return EXIT_CONFIG
    except (OSError, ValueError) as e:
        _diag("ConfigError", str(e))
        return EXIT_CONFIG
    except _RUNTIME_ERRORS as e:
        _diag(type(e).__name__, str(e))
        return EXIT_RUNTIME
    except (ToroborisError, RuntimeError) as e:
        _diag(type(e).__name__, str(e))
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
