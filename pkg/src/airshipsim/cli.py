"""Command-line front door: run scenarios and flavor sweeps, list bundled
configs, benchmark the numba kernel against the numpy fallback.

Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 IO failure.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from importlib import resources

import numpy as np

from . import analysis, kernels, siso
from .control import RankDeficientT
from .sim import ConfigError, NumericalBlowup, ScenarioConfig, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

BUNDLED = ("ideal_hover", "actual_hover", "windshift", "mission_3d", "siso_chain")


def scenario_path(name: str):
    return resources.files("airshipsim").joinpath("scenarios", f"{name}.json")


def load_scenario_dict(spec: str) -> dict:
    """Resolve a bundled scenario name or a JSON file path to its dict."""
    if spec in BUNDLED:
        text = scenario_path(spec).read_text()
    elif os.path.exists(spec):
        with open(spec) as fh:
            text = fh.read()
    else:
        raise ConfigError(f"scenario {spec!r} is neither a bundled name nor a file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in scenario {spec!r}: {e}") from e


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)


def _apply_overrides(d: dict, args) -> dict:
    d = json.loads(json.dumps(d))  # deep copy
    if args.seed is not None:
        d["seed"] = args.seed
    if args.mode is not None:
        d["mode"] = args.mode
    gains = d.setdefault("gains", {})
    if isinstance(gains, dict):
        if args.eps is not None:
            gains["eps"] = args.eps
        if args.switch is not None:
            gains["switch_mode"] = args.switch
    return d


def _comparison_data(out_dir: str, logs: dict) -> list:
    """Flavor-comparison data files: N/E/D traces, wrench traces, phase plane."""
    written = []
    flavors = list(logs)
    t = logs[flavors[0]].t

    def table(path, header, cols):
        arr = np.column_stack([t] + cols)
        with open(path, "w") as fh:
            fh.write(",".join(["t"] + header) + "\n")
            for row in arr:
                fh.write(",".join(format(v, ".10g") for v in row) + "\n")
        written.append(path)

    table(
        os.path.join(out_dir, "traces_position.csv"),
        [f"{fl}_{ax}" for fl in flavors for ax in ("pN", "pE", "pD")],
        [logs[fl].eta[:, i] for fl in flavors for i in range(3)],
    )
    table(
        os.path.join(out_dir, "traces_wrench.csv"),
        [f"{fl}_{ax}" for fl in flavors for ax in ("Fx", "Fy", "Fz", "Mx", "My", "Mz")],
        [logs[fl].f_applied[:, i] for fl in flavors for i in range(6)],
    )
    table(
        os.path.join(out_dir, "phase_north.csv"),
        [f"{fl}_{nm}" for fl in flavors for nm in ("z1", "z1dot")],
        [series for fl in flavors for series in (logs[fl].z1[:, 0], logs[fl].z1_dot[:, 0])],
    )
    _render_images(out_dir, logs, written)
    return written


def _render_images(out_dir: str, logs: dict, written: list) -> None:
    """Optional rendered figures; the data files are the contract."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    for fl, log in logs.items():
        axes[0].plot(log.t, log.eta[:, 0], label=fl)
        axes[1].plot(log.t, -log.eta[:, 2], label=fl)
        axes[2].plot(log.t, log.f_applied[:, 0], label=fl)
    axes[0].set_ylabel("North [m]")
    axes[1].set_ylabel("altitude [m]")
    axes[2].set_ylabel("Fx [N]")
    axes[2].set_xlabel("t [s]")
    for ax in axes:
        ax.legend(loc="best")
        ax.grid(True, alpha=0.3)
    path = os.path.join(out_dir, "traces.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 5))
    for fl, log in logs.items():
        ax.plot(log.z1[:, 0], log.z1_dot[:, 0], label=fl, lw=0.8)
    k1 = next(iter(logs.values())).meta["config"]["gains"]["k1"][0]
    z = np.linspace(*ax.get_xlim(), 10)
    ax.plot(z, -k1 * z, "k--", lw=1, label="sliding line")
    ax.set_xlabel("z1 North [m]")
    ax.set_ylabel("z1dot North [m/s]")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    path = os.path.join(out_dir, "phase_north.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)


def _run_airship(d: dict, args) -> int:
    flavors = [f.strip() for f in args.flavors.split(",") if f.strip()]
    if not flavors:
        print("error: flavor list is empty", file=sys.stderr)
        return EXIT_CONFIG
    logs = {}
    for flavor in flavors:
        cfg_dict = json.loads(json.dumps(d))
        cfg_dict.setdefault("gains", {})["flavor"] = flavor
        cfg = ScenarioConfig.from_dict(cfg_dict)
        try:
            log = run_scenario(cfg)
        except NumericalBlowup as e:
            print(f"error: numerical blowup in flavor {flavor!r}: {e}", file=sys.stderr)
            return EXIT_NUMERICAL
        except RankDeficientT as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_NUMERICAL
        logs[flavor] = log
        paths = log.save(args.out, flavor)
        metrics = analysis.metrics_report(log)
        metrics_path = os.path.join(args.out, f"{flavor}_metrics.json")
        _write_json(metrics_path, metrics)
        print(f"{flavor}: wrote {paths['csv']} and {metrics_path}")
    if args.plots:
        for path in _comparison_data(args.out, logs):
            print(f"wrote {path}")
    return EXIT_OK


def _run_siso(d: dict, args) -> int:
    controllers = (
        [c.strip() for c in args.flavors.split(",") if c.strip()]
        if args.flavors_given
        else [d.get("controller", "bsmc2")]
    )
    for c in controllers:
        if c not in siso.CONTROLLERS:
            print(
                f"error: flavor {c!r} invalid for a siso scenario "
                f"(use {'/'.join(siso.CONTROLLERS)})",
                file=sys.stderr,
            )
            return EXIT_CONFIG
    try:
        gains = siso.SisoGains.from_dict(d["gains"])
        plant = siso.ChainPlant(n=int(d.get("n", 2)))
        x0 = d.get("x0", [1.0] + [0.0] * (plant.n - 1))
        dt = float(d.get("dt", 1e-4))
        t_end = float(d.get("t_end", 20.0))
    except (KeyError, ValueError) as e:
        print(f"error: bad siso config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    for c in controllers:
        log = siso.run_chain(plant, gains, c, x0, dt, t_end)
        paths = log.save(args.out, c)
        metrics = {
            "controller": c,
            "final_abs_z": float(np.abs(log.z[-1]).max()),
            "max_abs_sigma_tail": float(np.abs(log.sigma[log.t >= 0.9 * t_end]).max()),
            "dual_behavior_intervals": analysis.dual_behavior_detector(
                log.t, log.sigma_sigmadot, lyapunov=log.lyapunov
            ),
        }
        metrics_path = os.path.join(args.out, f"{c}_metrics.json")
        _write_json(metrics_path, metrics)
        print(f"{c}: wrote {paths['csv']} and {metrics_path}")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        d = load_scenario_dict(args.scenario)
        d = _apply_overrides(d, args)
        os.makedirs(args.out, exist_ok=True)
        if not os.access(args.out, os.W_OK):
            print(f"error: output directory {args.out!r} not writable", file=sys.stderr)
            return EXIT_IO
        kind = d.get("kind", "airship")
        if kind == "siso":
            return _run_siso(d, args)
        if kind != "airship":
            print(f"error: unknown scenario kind {kind!r}", file=sys.stderr)
            return EXIT_CONFIG
        return _run_airship(d, args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: io failure: {e}", file=sys.stderr)
        return EXIT_IO


def cmd_list(args) -> int:
    for name in BUNDLED:
        d = json.loads(scenario_path(name).read_text())
        print(f"{name:14s} {d.get('description', '')}")
    return EXIT_OK


def cmd_bench(args) -> int:
    """Time the fused loop on the current backend and on the other one."""
    try:
        d = load_scenario_dict(args.scenario)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if d.get("kind") == "siso":
        print("error: bench expects an airship scenario", file=sys.stderr)
        return EXIT_CONFIG
    cfg = ScenarioConfig.from_dict(d)

    def timed() -> float:
        run_scenario(cfg)  # warm the kernel / caches
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            run_scenario(cfg)
            best = min(best, time.perf_counter() - t0)
        return best

    here = timed()
    n = cfg.n_steps
    print(f"backend={kernels.BACKEND}: {here:.4f} s for {n} steps "
          f"({here / n * 1e6:.2f} us/step)")

    other_flag = "0" if kernels.NUMBA_ENABLED else "1"
    env = dict(os.environ, **{kernels.NUMBA_ENV_VAR: other_flag})
    code = (
        "import json,time,sys\n"
        "from airshipsim import kernels\n"
        "from airshipsim.sim import ScenarioConfig, run_scenario\n"
        "cfg = ScenarioConfig.from_dict(json.loads(sys.stdin.read()))\n"
        "run_scenario(cfg)\n"
        f"best = float('inf')\n"
        f"for _ in range({args.repeat}):\n"
        "    t0 = time.perf_counter(); run_scenario(cfg)\n"
        "    best = min(best, time.perf_counter() - t0)\n"
        "print(json.dumps({'backend': kernels.BACKEND, 'best': best}))\n"
    )
    try:
        proc = subprocess.run(
            [sys.executable, "-c", code],
            input=json.dumps(cfg.to_dict()),
            capture_output=True, text=True, env=env, timeout=600,
        )
        result = json.loads(proc.stdout.strip().splitlines()[-1])
        there = result["best"]
        print(f"backend={result['backend']}: {there:.4f} s for {n} steps "
              f"({there / n * 1e6:.2f} us/step)")
        slower, faster = max(here, there), min(here, there)
        print(f"speed ratio: {slower / faster:.1f}x")
    except Exception as e:  # pragma: no cover - informational only
        print(f"(could not benchmark the other backend: {e})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airshipsim",
        description="6-DOF airship simulation with BS / SMC / BSMC controllers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario for one or more flavors")
    p_run.add_argument("--scenario", required=True,
                       help="bundled scenario name or JSON config path")
    p_run.add_argument("--flavors", default="bsmc",
                       help="comma-separated flavor list (bs,smc,bsmc)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--mode", choices=["ideal", "actual"], default=None)
    p_run.add_argument("--eps", type=float, default=None,
                       help="boundary-layer thickness override")
    p_run.add_argument("--switch", choices=["fixed", "timevarying"], default=None)
    p_run.add_argument("--plots", action="store_true",
                       help="emit flavor-comparison data files (plus images when matplotlib is present)")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list-scenarios", help="list bundled scenarios")
    p_list.set_defaults(func=cmd_list)

    p_bench = sub.add_parser("bench", help="compare numba and numpy backends")
    p_bench.add_argument("--scenario", default="actual_hover")
    p_bench.add_argument("--repeat", type=int, default=3)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "flavors"):
        given = argv if argv is not None else sys.argv[1:]
        args.flavors_given = any(a.startswith("--flavors") for a in given)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
