"""Command-line entry point: ``actionwave {profile,phase,action,verify}``.

Settings come from the defaults table, then ``--config FILE`` (JSON), then
explicit flags. Exit codes: 0 success, 1 validation error, 2 numerical failure
(including a verification run that does not pass its thresholds).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from actionwave import __version__, defaults
from actionwave.action import action_profile, action_report
from actionwave.errors import ActionWaveError, NumericalError, ParameterError
from actionwave.io import csv_text, json_text, write_csv, write_json
from actionwave.models import (
    ModelSpec,
    admissible_speed,
    canonical_name,
    closed_form_profile,
    make_model,
)
from actionwave.pde_verify import dump_snapshots, verify_wave
from actionwave.reduction import (
    PhasePoint,
    equilibria,
    integrate_orbit,
    is_hamiltonian,
    periodic_orbit,
    trace_separatrix,
)

OUTPUT_ENV = "ACTIONWAVE_OUTPUT_DIR"
MODEL_PARAMS = ("A", "D", "k", "u1", "u2")

# Keys accepted in a config file, per command, besides the shared ones.
COMMON_KEYS = {"model", "v", "z0", "branch", "out", *MODEL_PARAMS}
COMMAND_KEYS = {
    "profile": {"range"},
    "phase": {"loop", "fan", "samples"},
    "action": {"abs_tol"},
    "verify": {"dx", "dt", "T", "snapshots", "force_v", "sweep", "workers"},
}
COMMAND_DEFAULTS = {
    "profile": {"range": "-20:20:0.01"},
    "phase": {"loop": None, "fan": 4, "samples": defaults.ORBIT_SAMPLES},
    "action": {"abs_tol": defaults.QUAD_ABS_TOL},
    "verify": {"dx": None, "dt": None, "T": None, "snapshots": defaults.PDE_SNAPSHOTS,
               "force_v": None, "sweep": None, "workers": 1},
}


@dataclass
class RunConfig:
    command: str
    model: ModelSpec
    v: float
    settings: dict[str, Any] = field(default_factory=dict)
    out: Path | None = None

    def effective(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "model": self.model.name,
            "params": self.model.params(),
            "v": self.v,
            **{k: v for k, v in sorted(self.settings.items())},
            "out": None if self.out is None else str(self.out),
        }


def _speed_arg(raw: str) -> float | str:
    if raw.strip().lower() == "auto":
        return "auto"
    try:
        return float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {raw!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="JSON file with settings; flags override it")
    p.add_argument("--model", help="kdv | sg | kpp | burgers")
    for name in MODEL_PARAMS:
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--v", type=_speed_arg, default=None, help="wave speed or 'auto'")
    p.add_argument("--z0", type=float, default=None)
    p.add_argument("--branch", default=None, help="kink|antikink (sg), decreasing|increasing (kpp)")
    p.add_argument("--out", default=None, metavar="DIR",
                   help=f"output directory (default: ${OUTPUT_ENV}, else stdout where possible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actionwave",
        description="Solitary traveling waves in action-angle variables: profiles, "
        "phase portraits, action integrals and PDE verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    prof = sub.add_parser("profile", help="sample u(z), du/dz of the closed-form profile")
    _add_common(prof)
    prof.add_argument("--range", default=None, metavar="START:STOP:STEP")

    phase = sub.add_parser("phase", help="separatrix, orbit fan and equilibria")
    _add_common(phase)
    phase.add_argument("--loop", default=None, help="top|bottom for sine-Gordon")
    phase.add_argument("--fan", type=int, default=None, help="number of extra orbits")
    phase.add_argument("--samples", type=int, default=None)

    act = sub.add_parser("action", help="numerical and closed-form action")
    _add_common(act)
    act.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)

    ver = sub.add_parser("verify", help="evolve the PDE and check speed and action")
    _add_common(ver)
    ver.add_argument("--dx", type=float, default=None)
    ver.add_argument("--dt", type=float, default=None)
    ver.add_argument("--T", type=float, default=None)
    ver.add_argument("--snapshots", type=int, default=None)
    ver.add_argument("--force-v", dest="force_v", type=float, default=None,
                     help="claimed speed to test instead of the profile's own")
    ver.add_argument("--sweep", default=None, metavar="V1,V2,...",
                     help="run one verification per speed (free-speed models only)")
    ver.add_argument("--workers", type=int, default=None)
    return parser


def _load_config_file(path: str, command: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config file: {exc}", path=path) from exc
    if not isinstance(data, dict):
        raise ParameterError("config file must hold a JSON object", path=path)
    data.pop("command", None)
    if isinstance(data.get("params"), dict):
        data.update(data.pop("params"))
    allowed = COMMON_KEYS | COMMAND_KEYS[command]
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(unknown)}", unknown=unknown)
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    command = args.command
    merged: dict[str, Any] = dict(COMMAND_DEFAULTS[command])
    if args.config:
        merged.update(_load_config_file(args.config, command))
    for key in COMMON_KEYS | COMMAND_KEYS[command]:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val

    model_key = canonical_name(merged.pop("model", None) or "kdv")
    params = dict(defaults.DEFAULT_PARAMS[model_key])
    for key in MODEL_PARAMS:
        if key in merged:
            val = merged.pop(key)
            if val is not None:
                params[key] = val
    model = make_model(model_key, **params)
    v_raw = merged.pop("v", None)
    if merged.get("z0") is None:
        merged["z0"] = 0.0
    merged.setdefault("branch", None)
    # validates speed, branch and offset together; a KPP branch picks the sign of an auto speed
    v = closed_form_profile(model, "auto" if v_raw is None else v_raw,
                            z0=merged["z0"], branch=merged["branch"]).v

    out = merged.pop("out", None) or os.environ.get(OUTPUT_ENV) or None
    return RunConfig(command=command, model=model, v=v, settings=merged,
                     out=Path(out) if out else None)


def _parse_range(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(s) for s in str(text).split(":"))
    except ValueError:
        raise ParameterError("range must be START:STOP:STEP", range=text) from None
    if not (step > 0 and stop > start and all(map(math.isfinite, (start, stop, step)))):
        raise ParameterError("range needs START < STOP and STEP > 0", range=text)
    n = int(round((stop - start) / step)) + 1
    return start + step * np.arange(n)


def _wave(cfg: RunConfig):
    return closed_form_profile(cfg.model, cfg.v, z0=float(cfg.settings["z0"]),
                               branch=cfg.settings.get("branch"))


def _manifest(cfg: RunConfig, files: Sequence[str]) -> dict[str, Any]:
    return {"tool": "actionwave", "version": __version__, "config": cfg.effective(),
            "files": list(files)}


def cmd_profile(cfg: RunConfig, stdout) -> int:
    wave = _wave(cfg)
    z = _parse_range(cfg.settings["range"])
    u, du = wave.derivatives(z, 1)
    cols = [z, u, du]
    if cfg.out is None:
        stdout.write(csv_text(["z", "u", "du_dz"], cols))
        return 0
    write_csv(cfg.out / "profile.csv", ["z", "u", "du_dz"], cols)
    write_json(cfg.out / "manifest.json", _manifest(cfg, ["profile.csv"]))
    return 0


def _equilibria_payload(model, v, window) -> list[dict[str, Any]]:
    return [
        {
            "u": e.point.u,
            "p": e.point.p,
            "kind": e.kind,
            "eigenvalues": [[lam.real, lam.imag] for lam in e.eigenvalues],
        }
        for e in equilibria(model, v, window)
    ]


def _fan(cfg: RunConfig, sep, n: int) -> list:
    model, v = cfg.model, cfg.v
    if n <= 0:
        return []
    orbits = []
    span = 20.0 * closed_form_profile(model, v).decay_length
    if is_hamiltonian(model):
        centers = [e for e in equilibria(model, v, (float(np.min(sep.u)), float(np.max(sep.u))))
                   if e.kind == "center"]
        uc = centers[0].point.u
        u_far = float(sep.u[np.argmax(np.abs(sep.u - uc))])
        n_in = (n + 1) // 2
        for f in np.linspace(0.2, 0.8, n_in):
            orbits.append(periodic_orbit(model, v, PhasePoint(uc + f * (u_far - uc), 0.0),
                                         n_samples=cfg.settings["samples"]))
        p_edge = float(np.max(np.abs(sep.p)))
        for f in np.linspace(0.1, 0.5, n - n_in):
            start = PhasePoint(uc, (1.0 + f) * p_edge)
            orbits.append(integrate_orbit(model, v, start, (0.0, span),
                                          n_samples=cfg.settings["samples"]))
        return orbits
    src = sep.info["source"]
    for ang in np.linspace(0.0, 2.0 * math.pi, n, endpoint=False):
        start = PhasePoint(src + 0.05 * math.cos(ang), 0.05 * math.sin(ang))
        orbits.append(integrate_orbit(model, v, start, (0.0, span),
                                      n_samples=cfg.settings["samples"]))
    return orbits


def cmd_phase(cfg: RunConfig, stdout) -> int:
    model, v = cfg.model, cfg.v
    out = cfg.out or Path("actionwave-phase")
    sep = trace_separatrix(model, v, cfg.settings.get("loop") or cfg.settings.get("branch"),
                           n_samples=cfg.settings["samples"])
    lo = float(min(np.min(sep.u), 0.0))
    hi = float(max(np.max(sep.u), 0.0))
    pad = 0.25 * (hi - lo)
    eq = _equilibria_payload(model, v, (lo - pad, hi + pad))
    files = ["separatrix.csv"]
    sep.to_csv(out / "separatrix.csv")
    fan_meta = []
    for i, orb in enumerate(_fan(cfg, sep, int(cfg.settings["fan"]))):
        name = f"orbit_{i:02d}.csv"
        orb.to_csv(out / name)
        files.append(name)
        fan_meta.append({"file": name, "closed": orb.closed, "escaped": orb.escaped,
                         "energy": orb.energy, "start": [orb.u[0], orb.p[0]]})
    summary = {
        "model": model.name,
        "params": model.params(),
        "v": v,
        "separatrix": {
            "file": "separatrix.csv",
            "closed": sep.closed,
            "u_min": float(np.min(sep.u)),
            "u_max": float(np.max(sep.u)),
            "p_min": float(np.min(sep.p)),
            "p_max": float(np.max(sep.p)),
            "start": [sep.u[0], sep.p[0]],
            "end": [sep.u[-1], sep.p[-1]],
            "source": sep.info["source"],
            "target": sep.info["target"],
            "energy": sep.energy,
        },
        "orbits": fan_meta,
        "equilibria": eq,
    }
    write_json(out / "equilibria.json", eq)
    write_json(out / "phase.json", summary)
    files += ["equilibria.json", "phase.json"]
    write_json(out / "manifest.json", _manifest(cfg, files))
    stdout.write(json_text(summary))
    return 0


def cmd_action(cfg: RunConfig, stdout) -> int:
    wave = _wave(cfg)
    est = action_profile(wave, abs_tol=float(cfg.settings["abs_tol"]))
    report = action_report(wave, est)
    report["discrepancy"] = report["abs_error"]
    report["config"] = cfg.effective()
    if cfg.out is not None:
        write_json(cfg.out / "action.json", report)
        write_json(cfg.out / "manifest.json", _manifest(cfg, ["action.json"]))
    stdout.write(json_text(report))
    return 0


def _verify_one(model: ModelSpec, v: float, settings: dict[str, Any], out: str | None) -> dict:
    wave = closed_form_profile(model, v, z0=0.0, branch=settings.get("branch"))
    res = verify_wave(
        wave,
        dx=settings.get("dx"),
        dt=settings.get("dt"),
        T=settings.get("T"),
        n_snapshots=int(settings["snapshots"]),
        v_claimed=settings.get("force_v"),
    )
    if out is not None:
        dump_snapshots(res, Path(out) / "snapshots")
        write_json(Path(out) / "report.json", res.report)
    return res.report


def cmd_verify(cfg: RunConfig, stdout) -> int:
    settings = cfg.settings
    if settings.get("sweep"):
        raw = settings["sweep"]
        speeds = raw if isinstance(raw, list) else [float(s) for s in str(raw).split(",") if s.strip()]
        speeds = sorted(admissible_speed(cfg.model, s) for s in speeds)
        outs = [None if cfg.out is None else str(cfg.out / f"v={s!r}") for s in speeds]
        workers = max(1, int(settings.get("workers") or 1))
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(_verify_one, [cfg.model] * len(speeds), speeds,
                                        [settings] * len(speeds), outs))
        else:
            reports = [_verify_one(cfg.model, s, settings, o) for s, o in zip(speeds, outs)]
        payload = {"runs": reports, "pass": all(r["pass"] for r in reports)}
    else:
        out = None if cfg.out is None else str(cfg.out)
        payload = _verify_one(cfg.model, cfg.v, settings, out)
    payload["config"] = cfg.effective()
    if cfg.out is not None:
        write_json(cfg.out / "manifest.json", _manifest(cfg, ["report.json", "snapshots/manifest.json"]))
    stdout.write(json_text(payload))
    return 0 if payload["pass"] else 2


COMMANDS = {"profile": cmd_profile, "phase": cmd_phase, "action": cmd_action, "verify": cmd_verify}


def _error(exc: ActionWaveError, stderr) -> None:
    payload = {"error": exc.message, "type": type(exc).__name__, "details": exc.details}
    stderr.write(json_text(payload))


def _glue_range(argv: list[str]) -> list[str]:
    # argparse would read "-20:20:0.01" as an option flag
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv):
            out.append(f"--range={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(_glue_range(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg, stdout)
    except ParameterError as exc:
        _error(exc, stderr)
        return 1
    except NumericalError as exc:
        _error(exc, stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
