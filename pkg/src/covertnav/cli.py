"""Command-line interface.

Subcommands: gen-scenario, train, eval, compare, replay. Report-producing
commands write machine-readable JSON, a delimited CSV, and a rendered figure
side by side. Exit code 0 on success, 1 with a diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .ddpg import TrainConfig, load_checkpoint, save_checkpoint, train
from .errors import CovertNavError
from .harness.files import (
    load_episode_log,
    load_scenario,
    make_scenario,
    save_episode_log,
    save_report,
    save_scenario,
    write_curve_csv,
    write_report_csv,
    write_trajectory_csv,
)
from .harness.metrics import compare, format_report
from .harness.plots import plot_learning_curve, plot_report, plot_trajectories
from .harness.policies import (
    AgentPolicy,
    DwaPolicy,
    RandomPolicy,
    StandStillPolicy,
    StraightToGoalPolicy,
)
from .navenv import EnvConfig, NavEnv, training_env_config
from .terrain import ScenarioKind, ScenarioSpec, generate_scenario

_DEFAULTS = TrainConfig()


def _policy_factory(token: str):
    """Parse one policy token: dwa, random, standstill, straight, agent:<ckpt>."""
    if token.startswith("agent:"):
        agent, _ = load_checkpoint(token.split(":", 1)[1])
        return token, lambda rng: AgentPolicy(agent)
    simple = {
        "dwa": lambda rng: DwaPolicy(),
        "random": lambda rng: RandomPolicy(rng),
        "standstill": lambda rng: StandStillPolicy(),
        "straight": lambda rng: StraightToGoalPolicy(),
    }
    if token not in simple:
        raise CovertNavError(
            f"unknown policy {token!r}; expected dwa, random, standstill, straight, or agent:<checkpoint>"
        )
    return token, simple[token]


def _load_bundles(tokens: list[str]) -> dict[str, tuple]:
    bundles = {}
    for token in tokens:
        path = Path(token)
        if path.exists():
            bundle = load_scenario(path)
        else:
            try:
                kind = ScenarioKind(token)
            except ValueError as exc:
                raise CovertNavError(
                    f"scenario {token!r} is neither a file nor a kind name"
                ) from exc
            bundle = make_scenario(ScenarioSpec(kind, seed=0))
        bundles[bundle.name] = (bundle.grid, bundle.objects, bundle.spec)
    return bundles


def _figure_path(base: str | Path) -> Path:
    return Path(base).with_suffix(".png")


def cmd_gen_scenario(args) -> int:
    spec = ScenarioSpec(
        kind=ScenarioKind(args.kind),
        seed=args.seed,
        extent_m=args.extent,
        object_density=args.density,
        cell_size=args.cell_size,
    )
    bundle = make_scenario(spec)
    save_scenario(bundle, args.out)
    print(f"wrote scenario {bundle.name}: {len(bundle.objects)} objects -> {args.out}")
    return 0


def cmd_train(args) -> int:
    bundle = load_scenario(args.scenario)
    config = TrainConfig(
        episodes=args.episodes,
        steps_per_episode=args.steps,
        warmup_steps=args.warmup,
        noise_sigma=args.sigma,
        seed=args.seed,
    )
    env_config = training_env_config()
    agent, curve = train(
        lambda rng: NavEnv(bundle.grid, bundle.objects, rng, env_config), config
    )
    save_checkpoint(agent, config, args.out_checkpoint)
    write_curve_csv(curve, args.out_curve)
    plot_learning_curve(curve, _figure_path(args.out_curve))
    print(
        f"trained {config.episodes} episodes on {bundle.name}; "
        f"checkpoint -> {args.out_checkpoint}, curve -> {args.out_curve}"
    )
    return 0


def cmd_eval(args) -> int:
    agent, _ = load_checkpoint(args.checkpoint)
    bundle = load_scenario(args.scenario)
    scenarios = {bundle.name: (bundle.grid, bundle.objects, bundle.spec)}
    collected: dict = {}
    report = compare(
        {"agent": lambda rng: AgentPolicy(agent)},
        scenarios,
        episodes_per_cell=args.episodes,
        seed=args.seed,
        collect_logs=collected,
    )
    save_report(report, args.out_report)
    write_report_csv(report, Path(args.out_report).with_suffix(".csv"))
    logs = collected[("agent", bundle.name)]
    plot_trajectories(
        bundle.grid, bundle.objects, logs, _figure_path(args.out_report), title=bundle.name
    )
    if args.logs_dir:
        out = Path(args.logs_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, log in enumerate(logs):
            save_episode_log(log, out / f"episode_{i:03d}.json")
            write_trajectory_csv(log, out / f"episode_{i:03d}.csv")
    print(format_report(report))
    return 0


def cmd_compare(args) -> int:
    policies = dict(_policy_factory(tok) for tok in args.policies.split(","))
    scenarios = _load_bundles(args.scenarios.split(","))
    report = compare(policies, scenarios, episodes_per_cell=args.episodes, seed=args.seed)
    save_report(report, args.out)
    write_report_csv(report, Path(args.out).with_suffix(".csv"))
    plot_report(report, _figure_path(args.out))
    print(format_report(report))
    return 0


def cmd_replay(args) -> int:
    log = load_episode_log(args.log)
    if args.scenario:
        bundle = load_scenario(args.scenario)
        grid, objects = bundle.grid, bundle.objects
    elif log.scenario_spec is not None:
        grid, objects = generate_scenario(log.scenario_spec)
    else:
        raise CovertNavError(
            "log carries no scenario spec; pass --scenario to supply the terrain"
        )
    plot_trajectories(grid, objects, [log], args.out_plot, title=log.scenario_id)
    print(f"rendered {args.log} -> {args.out_plot}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertnav",
        description="Cover-seeking terrain navigation: scenarios, training, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-scenario", help="generate and save a scenario file")
    gen.add_argument("--kind", required=True, choices=[k.value for k in ScenarioKind])
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--extent", type=float, default=40.0)
    gen.add_argument("--cell-size", type=float, default=0.5)
    gen.add_argument("--density", type=float, default=0.5)
    gen.set_defaults(func=cmd_gen_scenario)

    tr = sub.add_parser("train", help="train an agent on a scenario")
    tr.add_argument("--scenario", required=True)
    tr.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    tr.add_argument("--episodes", type=int, default=_DEFAULTS.episodes)
    tr.add_argument("--steps", type=int, default=_DEFAULTS.steps_per_episode)
    tr.add_argument("--warmup", type=int, default=_DEFAULTS.warmup_steps)
    tr.add_argument("--sigma", type=float, default=_DEFAULTS.noise_sigma)
    tr.add_argument("--out-checkpoint", required=True)
    tr.add_argument("--out-curve", required=True)
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="evaluate a checkpoint on a scenario")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--scenario", required=True)
    ev.add_argument("--episodes", type=int, default=50)
    ev.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    ev.add_argument("--out-report", required=True)
    ev.add_argument("--logs-dir", default=None)
    ev.set_defaults(func=cmd_eval)

    cp = sub.add_parser("compare", help="run a policy x scenario comparison grid")
    cp.add_argument("--policies", required=True, help="comma list: dwa,random,agent:ckpt.json,...")
    cp.add_argument("--scenarios", required=True, help="comma list of scenario files or kind names")
    cp.add_argument("--episodes", type=int, default=50)
    cp.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    cp.add_argument("--out", required=True)
    cp.set_defaults(func=cmd_compare)

    rp = sub.add_parser("replay", help="render a saved episode log to a figure")
    rp.add_argument("--log", required=True)
    rp.add_argument("--out-plot", required=True)
    rp.add_argument("--scenario", default=None, help="scenario file for the terrain backdrop")
    rp.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CovertNavError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
