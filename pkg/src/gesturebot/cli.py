"""Command-line entry point.

Exit codes: 0 success, 2 input or configuration error, 3 no motion / no hand.
"""
import argparse
import logging
import os
import sys

from . import config as config_mod
from . import control_link, pipeline, synth
from .classifier import load_database
from .config import PipelineConfig
from .errors import GestureError, NoHandFoundError, NoMotionError, StageError

EXIT_OK, EXIT_INPUT, EXIT_NOTHING = 0, 2, 3


def _parse_ks(text):
    ks = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        ks.extend(range(int(lo), int(hi) + 1) if hi else [int(lo)])
    return ks


def _cfg(args):
    cfg = config_mod.load(args.config) if args.config else PipelineConfig()
    changes = {}
    if getattr(args, "k", None) and len(_parse_ks(args.k)) == 1:
        changes["k"] = _parse_ks(args.k)[0]
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return config_mod.with_classifier(cfg, **changes) if changes else cfg


def cmd_static(args):
    cfg = _cfg(args)
    res = pipeline.run_static(args.image, args.db, cfg, args.dump_dir)
    print("vector " + " ".join(f"{v:.6g}" for v in res.vector.values))
    if res.label is not None:
        print(f"label {res.label} {cfg.name_of(res.label)}")


def cmd_dynamic(args):
    cfg = _cfg(args)
    res = pipeline.run_dynamic(args.frames, args.small_db, args.large_db, cfg, args.dump_dir)
    print(f"gate {res.gate.value} transition {res.transition:.4f}")
    print("vector " + " ".join(f"{v:.6g}" for v in res.vector.values))
    if res.label is not None:
        print(f"label {res.label} {cfg.name_of(res.label)}")


def cmd_gate(args):
    cfg = _cfg(args)
    gate, transition, _ = pipeline.gate_sequence(args.frames, cfg)
    print(f"gate {gate.value} transition {transition:.4f}")


def cmd_flow_dump(args):
    if not args.dump_dir:
        raise GestureError("flow-dump needs --dump-dir")
    n = pipeline.flow_dump(args.frames, args.dump_dir, _cfg(args))
    print(f"wrote {n} flow fields to {args.dump_dir}")


def cmd_build_db(args):
    cfg = _cfg(args)
    if not args.db:
        raise GestureError("build-db needs --db (output path)")
    _, report = pipeline.build_db(args.root, args.kind, cfg, args.db)
    sys.stdout.write(report.to_text())


def cmd_xval(args):
    cfg = _cfg(args)
    if not args.db:
        raise GestureError("xval needs --db")
    db = load_database(args.db)
    ks = _parse_ks(args.k) if args.k else None
    names = dict(enumerate(cfg.gesture_names, start=1))
    for report in pipeline.xval(db, cfg, ks):
        sys.stdout.write(report.to_csv() if args.csv else report.to_text(names))
        if not args.csv:
            print()


def cmd_send(args):
    cfg = _cfg(args)
    n = args.n or len(cfg.gesture_names)
    print(control_link.send(args.host, args.port, args.class_idx, n, args.timeout))


def cmd_serve(args):
    cfg = _cfg(args)
    logging.getLogger(control_link.__name__).setLevel(logging.INFO)  # PERFORM lines
    control_link.serve(args.port, cfg.gesture_names, args.host)


def cmd_synth(args):
    total = 0
    for kind in args.kinds:
        total += synth.write_dataset(os.path.join(args.out, kind), kind, args.variants,
                                     noise=args.noise, base_seed=args.seed or 0)
    print(f"wrote {total} samples under {args.out}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline configuration")
    common.add_argument("--seed", type=int, help="fold-shuffle / generator seed")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="gesturebot", description="Gesture recognition toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("static", parents=[common], help="classify a still image")
    p.add_argument("image")
    p.add_argument("--db")
    p.add_argument("--dump-dir")
    p.add_argument("--k")
    p.set_defaults(func=cmd_static)

    p = sub.add_parser("dynamic", parents=[common], help="gate and classify a frame directory")
    p.add_argument("frames")
    p.add_argument("--small-db")
    p.add_argument("--large-db")
    p.add_argument("--dump-dir")
    p.add_argument("--k")
    p.set_defaults(func=cmd_dynamic)

    p = sub.add_parser("gate", parents=[common], help="small/large amplitude decision")
    p.add_argument("frames")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("flow-dump", parents=[common], help="write optical flow images")
    p.add_argument("frames")
    p.add_argument("--dump-dir")
    p.set_defaults(func=cmd_flow_dump)

    p = sub.add_parser("build-db", parents=[common], help="feature database from a dataset tree")
    p.add_argument("root")
    p.add_argument("--kind", choices=sorted(pipeline.DB_KINDS), required=True)
    p.add_argument("--db", help="output CSV")
    p.set_defaults(func=cmd_build_db)

    p = sub.add_parser("xval", parents=[common], help="k-fold cross-validation report")
    p.add_argument("--db")
    p.add_argument("--k", help="neighbour counts, e.g. 1 or 1,3,5 or 1-9")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_xval)

    p = sub.add_parser("send", parents=[common], help="send a control vector to the robot")
    p.add_argument("class_idx", type=int)
    p.add_argument("--n", type=int, help="vector length (default: gesture table size)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=control_link.DEFAULT_PORT)
    p.add_argument("--timeout", type=float, default=5.0)
    p.set_defaults(func=cmd_send)

    p = sub.add_parser("serve-robot", parents=[common], help="run the mock robot server")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=control_link.DEFAULT_PORT)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", parents=[common], help="write the synthetic dataset trees")
    p.add_argument("out")
    p.add_argument("--kinds", nargs="+", choices=sorted(synth.KIND_NAMES), default=sorted(synth.KIND_NAMES))
    p.add_argument("--variants", type=int, default=10)
    p.add_argument("--noise", type=float)
    p.set_defaults(func=cmd_synth)
    return ap


def _exit_code(exc):
    cause = exc.cause if isinstance(exc, StageError) else exc
    return EXIT_NOTHING if isinstance(cause, (NoMotionError, NoHandFoundError)) else EXIT_INPUT


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (GestureError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
