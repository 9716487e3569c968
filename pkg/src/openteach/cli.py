"""Command-line entry points.

    openteach run      --config cfg.toml [--robot arm] [--source synth|console]
    openteach bench    --preset 90hz --secs 10
    openteach record   --config cfg.toml --out dir --secs 10
    openteach compile  --in dir --primary robot/state --tolerance 0.00833 --out demo.otd
    openteach train    --demos demo1.otd demo2.otd --algo linear --out policy.otp
    openteach eval     --policy policy.otp --task reach --episodes 10
    openteach replay   --demo demo.otd
"""

import argparse
import json
import logging
import os
import signal
import sys
import threading


def _add_run(sub):
    p = sub.add_parser("run", help="run the teleop pipeline")
    p.add_argument("--config", default=None, help="TOML config file")
    p.add_argument("--robot", choices=["arm", "hand", "mobile"], default=None)
    p.add_argument("--source", choices=["synth", "console"], default=None)
    p.add_argument("--rate", type=float, default=None, help="override rate (Hz)")
    p.add_argument("--secs", type=float, default=None, help="stop after N seconds")
    p.add_argument("--serve-console", type=int, metavar="PORT", default=None,
                   help="also serve the console static bundle on this port")
    p.add_argument("--console-dir", default="frontend/dist")


def _add_bench(sub):
    p = sub.add_parser("bench", help="rate/latency benchmark")
    p.add_argument("--preset", default="90hz",
                   help="rate preset: 90hz, 60hz, 20hz, 5hz, or a number")
    p.add_argument("--secs", type=float, default=10.0)
    p.add_argument("--robot", choices=["arm", "hand", "mobile"], default="arm")


def _add_record(sub):
    p = sub.add_parser("record", help="run the pipeline and log topics")
    p.add_argument("--config", default=None)
    p.add_argument("--robot", choices=["arm", "hand", "mobile"], default=None)
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--secs", type=float, default=10.0)
    p.add_argument("--topics", nargs="*", default=None,
                   help="topics to log (default: state and command)")


def _add_compile(sub):
    p = sub.add_parser("compile", help="align logs into a demonstration")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--primary", default="robot/state")
    p.add_argument("--tolerance", type=float, default=None,
                   help="seconds; default: half the slowest stream period")
    p.add_argument("--offset", action="append", default=[], metavar="TOPIC=SECS",
                   help="shift a stream before matching, e.g. robot/cmd=-0.0333")
    p.add_argument("--out", required=True)


def _add_train(sub):
    p = sub.add_parser("train", help="fit a policy on demonstrations")
    p.add_argument("--demos", nargs="+", required=True)
    p.add_argument("--algo", choices=["linear", "knn"], default="linear")
    p.add_argument("--ridge", type=float, default=1e-6)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out", required=True)


def _add_eval(sub):
    p = sub.add_parser("eval", help="evaluate a policy closed-loop")
    p.add_argument("--policy", required=True)
    p.add_argument("--task", choices=["reach"], default="reach")
    p.add_argument("--episodes", type=int, default=10)


def _add_replay(sub):
    p = sub.add_parser("replay", help="replay a demonstration open-loop")
    p.add_argument("--demo", required=True)


def main(argv=None):
    logging.basicConfig(level=os.environ.get("OPENTEACH_LOG", "INFO"),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    parser = argparse.ArgumentParser(prog="openteach")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_run, _add_bench, _add_record, _add_compile, _add_train,
                _add_eval, _add_replay):
        add(sub)
    args = parser.parse_args(argv)
    return COMMANDS[args.command](args)


def _load_config(args):
    from .pipeline import PipelineConfig
    cfg = PipelineConfig.load(getattr(args, "config", None))
    if getattr(args, "robot", None):
        cfg.robot = args.robot
    if getattr(args, "source", None):
        cfg.source = args.source
    if getattr(args, "rate", None):
        cfg.rate_hz = args.rate
    return cfg


def cmd_run(args):
    from .pipeline import run_teleop_loop
    cfg = _load_config(args)
    server = None
    if args.serve_console is not None:
        server = _serve_static(args.console_dir, args.serve_console)
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    try:
        summary = run_teleop_loop(cfg, duration_s=args.secs, stop_event=stop)
    finally:
        if server is not None:
            server.shutdown()
    print(json.dumps(summary, indent=2))
    return 0


def cmd_bench(args):
    from .pipeline import bench
    summary = bench(preset=args.preset, secs=args.secs, robot=args.robot)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_record(args):
    from .pipeline import PipelineConfig, TeleopLoop, build_bus, build_env
    from .pipeline import SynthHandSource
    from .pipeline.run import make_script
    from .recorder import Recorder

    cfg = _load_config(args)
    topics = args.topics or [cfg.topics.state, cfg.topics.command]
    bus = build_bus(cfg)
    env = build_env(cfg)
    loop = TeleopLoop(bus, env, cfg.loop_config())
    recorder = Recorder(bus, topics, args.out).start()
    source = SynthHandSource(bus, cfg.topics.hand, make_script(cfg), cfg.rate_hz).start()
    try:
        loop.run(duration_s=args.secs)
    finally:
        source.stop()
        report = recorder.stop()
        bus.close()
    print(json.dumps({"out": args.out, "report": report}, indent=2))
    return 0


def cmd_compile(args):
    from .recorder import align, default_half_period_tolerance, load_stream_log, save

    logs = {}
    for name in os.listdir(args.in_dir):
        if name.endswith(".ndjson"):
            log = load_stream_log(os.path.join(args.in_dir, name))
            logs[log.topic] = log
    tolerance = args.tolerance
    if tolerance is None:
        tolerance = default_half_period_tolerance(logs)
    offsets = {}
    for spec in args.offset:
        topic, _, secs = spec.rpartition("=")
        offsets[topic] = float(secs)
    demo = align(logs, args.primary, tolerance, offsets=offsets)
    save(demo, args.out)
    print(json.dumps({"out": args.out, "steps": len(demo),
                      "kept": demo.metadata["kept"],
                      "dropped": demo.metadata["dropped"],
                      "tolerance_s": tolerance}, indent=2))
    return 0


def cmd_train(args):
    from .imitation import KnnPolicy, bc_fit_linear, save_policy
    from .recorder import load as load_demo

    demos = [load_demo(p) for p in args.demos]
    if args.algo == "linear":
        policy = bc_fit_linear(demos, lam=args.ridge)
    else:
        policy = KnnPolicy.from_demos(demos, k=args.k)
    save_policy(policy, args.out)
    print(json.dumps({"out": args.out, "algo": args.algo,
                      "steps": sum(len(d) for d in demos)}, indent=2))
    return 0


def cmd_eval(args):
    from .imitation import ReachTask, evaluate, load_policy

    policy = load_policy(args.policy)
    task = ReachTask()
    episodes = task.eval_episodes(args.episodes)
    successes, _ = evaluate(task.make_env(), policy, episodes, task.success,
                            rate_hz=task.rate_hz)
    print(json.dumps({"task": args.task, "episodes": args.episodes,
                      "successes": successes}, indent=2))
    return 0


def cmd_replay(args):
    import numpy as np

    from .imitation import replay_actions
    from .recorder import load as load_demo
    from .simrobot import ArmEnv

    demo = load_demo(args.demo)
    final = replay_actions(ArmEnv(kinematic=True), demo)
    recorded_final = demo.obs[-1][7:10] if len(demo) else None
    drift = (float(np.linalg.norm(final.ee_position - recorded_final))
             if recorded_final is not None else None)
    print(json.dumps({"steps": len(demo), "final_ee": final.ee_position.tolist(),
                      "drift_from_recorded_m": drift}, indent=2))
    return 0


def _serve_static(directory, port):
    import functools
    import http.server

    handler = functools.partial(http.server.SimpleHTTPRequestHandler,
                                directory=directory)
    server = http.server.ThreadingHTTPServer(("127.0.0.1", port), handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    logging.getLogger(__name__).info("console at http://127.0.0.1:%d", port)
    return server


COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "record": cmd_record,
    "compile": cmd_compile,
    "train": cmd_train,
    "eval": cmd_eval,
    "replay": cmd_replay,
}


if __name__ == "__main__":
    sys.exit(main())
