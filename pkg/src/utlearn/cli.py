"""Command-line experiment harness.

Subcommands::

    utlearn synth       write W*, Z*, P and a spectral report
    utlearn learn DATA  learn (W, Z) from a data matrix file
    utlearn fig1        eps-initialized recovery traces, one CSV per s
    utlearn fig2        objective traces for each initializer and s
    utlearn conjecture  Monte Carlo distribution of the q2 factor

Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, generative, learner
from .errors import UTLearnError
from .matrixio import format_float, read_matrix, write_matrix, write_trace
from .seeding import derive_int

log = logging.getLogger("utlearn")

DEFAULT_N = 50
DEFAULT_COLS = 10000
DEFAULT_S = "5,10"
DEFAULT_ITERS = {"learn": 100, "fig1": 100, "fig2": 1000}
DEFAULT_COLS_LIST = "1000,10000"
DEFAULT_TRIALS = 20


class UsageError(Exception):
    pass


@dataclass
class ExperimentSpec:
    command: str
    n: int = DEFAULT_N
    n_cols: int = DEFAULT_COLS
    s: tuple[int, ...] = (5, 10)
    iters: int = 100
    seed: int = 0
    init: tuple[str, ...] = learner.INIT_KINDS
    normalize: bool = False
    out_dir: Path = Path("out")
    trials: int = DEFAULT_TRIALS
    n_cols_list: tuple[int, ...] = (1000, 10000)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _init_list(text: str) -> tuple[str, ...]:
    kinds = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    bad = [k for k in kinds if k not in learner.INIT_KINDS]
    if bad or not kinds:
        raise argparse.ArgumentTypeError(
            f"unknown initializer(s) {bad}; choose from {','.join(learner.INIT_KINDS)}"
        )
    return kinds


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=DEFAULT_N, help="signal dimension")
    common.add_argument("--cols", type=int, default=DEFAULT_COLS, help="number of samples N")
    common.add_argument("--s", type=_int_list, default=None,
                        help="sparsity; comma-separated list for fig1/fig2")
    common.add_argument("--iters", type=int, default=None, help="iteration budget")
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--normalize", action="store_true", help="rescale so ||P||_2 = 1")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="utlearn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="synthesize a ground-truth model")

    p_learn = sub.add_parser("learn", parents=[common], help="learn from a data matrix")
    p_learn.add_argument("data", type=Path, help="data matrix file (n x N)")
    p_learn.add_argument("--init", type=_init_list, default=("rand",))
    p_learn.add_argument("--w-star", type=Path, help="ground-truth transform file")
    p_learn.add_argument("--z-star", type=Path, help="ground-truth codes file")

    sub.add_parser("fig1", parents=[common], help="eps-initialized recovery traces")
    p_fig2 = sub.add_parser("fig2", parents=[common], help="traces for several initializers")
    p_fig2.add_argument("--init", type=_init_list, default=learner.INIT_KINDS)

    p_conj = sub.add_parser("conjecture", parents=[common], help="Monte Carlo sweep of q2")
    p_conj.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p_conj.add_argument("--cols-list", type=_int_list, default=_int_list(DEFAULT_COLS_LIST))
    p_conj.add_argument("--workers", type=int, default=1)
    return parser


def _spec_from_args(args) -> ExperimentSpec:
    cmd = args.command
    s = args.s if args.s is not None else (_int_list(DEFAULT_S) if cmd in ("fig1", "fig2") else (5,))
    spec = ExperimentSpec(
        command=cmd, n=args.n, n_cols=args.cols, s=s,
        iters=args.iters if args.iters is not None else DEFAULT_ITERS.get(cmd, 100),
        seed=args.seed, init=getattr(args, "init", learner.INIT_KINDS),
        normalize=args.normalize, out_dir=args.out,
        trials=getattr(args, "trials", DEFAULT_TRIALS),
        n_cols_list=getattr(args, "cols_list", ()),
    )
    if spec.n < 1 or spec.n_cols < 1:
        raise UsageError("--n and --cols must be positive")
    if spec.iters < 1:
        raise UsageError("--iters must be positive")
    if spec.seed < 0:
        raise UsageError("--seed must be non-negative")
    if cmd != "learn" and any(not 1 <= s <= spec.n for s in spec.s):
        raise UsageError(f"--s values must lie in [1, {spec.n}]")
    if cmd in ("synth", "learn", "conjecture") and len(spec.s) != 1:
        raise UsageError(f"{cmd} takes a single --s value")
    if cmd == "conjecture":
        if spec.trials < 1:
            raise UsageError("--trials must be >= 1")
        if any(N < spec.n for N in spec.n_cols_list):
            raise UsageError("every --cols-list entry must be >= --n")
    return spec


def _model_for(spec: ExperimentSpec, s: int) -> generative.GenerativeModel:
    # Keyed by s alone so fig1 and fig2 share the ground truth for each s.
    cfg = generative.SamplerConfig(
        n=spec.n, n_cols=spec.n_cols, s=s,
        seed=derive_int(spec.seed, "model", s), normalize=spec.normalize,
    )
    return generative.synthesize(cfg)


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _report_text(report: analysis.SpectralReport) -> str:
    return "".join(f"{k}={format_float(v)}\n" for k, v in report.as_items())


def cmd_synth(spec: ExperimentSpec) -> None:
    (s,) = spec.s
    cfg = generative.SamplerConfig(n=spec.n, n_cols=spec.n_cols, s=s, seed=spec.seed,
                                   normalize=spec.normalize)
    model = generative.synthesize(cfg)
    write_matrix(spec.out_dir / "w_star.txt", model.w_star)
    write_matrix(spec.out_dir / "z_star.txt", model.z_star)
    write_matrix(spec.out_dir / "p.txt", model.p)
    text = _report_text(analysis.spectral_report(model.z_star))
    _write_text(spec.out_dir / "report.txt", text)
    sys.stdout.write(text)


def cmd_learn(spec: ExperimentSpec, data: Path, w_star: Path | None, z_star: Path | None) -> None:
    (s,) = spec.s
    if len(spec.init) != 1:
        raise UsageError("learn takes a single --init value")
    (kind,) = spec.init
    if (w_star is None) != (z_star is None):
        raise UsageError("--w-star and --z-star must be given together")
    if kind == "eps" and w_star is None:
        raise UsageError("--init eps needs ground truth (--w-star and --z-star)")
    p = read_matrix(data)
    n = p.shape[0]
    if not 1 <= s <= n:
        raise UsageError(f"--s must lie in [1, {n}] for this data")
    model = None
    if w_star is not None:
        w, z = read_matrix(w_star), read_matrix(z_star)
        if w.shape != (n, n) or z.shape != p.shape:
            raise UTLearnError("ground-truth files do not match the data shape")
        model = generative.GenerativeModel(w_star=w, z_star=z, p=p, n=n, n_cols=p.shape[1],
                                           s=s, normalized=False)
    w0 = learner.make_initializer(kind, model, derive_int(spec.seed, "learn"), n=n)
    trace = learner.run(p, w0, learner.LearnerConfig(s=s, max_iters=spec.iters,
                                                     trace_against=model))
    write_matrix(spec.out_dir / "learned_w.txt", trace.w)
    write_matrix(spec.out_dir / "learned_z.txt", trace.z)
    write_trace(spec.out_dir / "trace.csv", trace)
    print(f"final objective={format_float(trace.records[-1].objective)}")


def cmd_fig1(spec: ExperimentSpec) -> None:
    for s in spec.s:
        model = _model_for(spec, s)
        report = analysis.spectral_report(model.z_star)
        w0 = learner.make_initializer("eps", model, derive_int(spec.seed, "fig1", s))
        trace = learner.run(model.p, w0, learner.LearnerConfig(s, spec.iters, model))
        write_trace(spec.out_dir / f"fig1_s{s}.csv", trace)
        print(f"s={s} q2={format_float(report.q2)} epsilon={format_float(report.epsilon)} "
              f"final_err_w={format_float(trace.records[-1].err_w)}")


def cmd_fig2(spec: ExperimentSpec) -> None:
    rows = ["s,init,iters_to_1e-8,final_objective"]
    for s in spec.s:
        model = _model_for(spec, s)
        for kind in spec.init:
            w0 = learner.make_initializer(
                kind, model, derive_int(spec.seed, "fig2", s, learner.INIT_KINDS.index(kind))
            )
            trace = learner.run(model.p, w0, learner.LearnerConfig(s, spec.iters, model))
            write_trace(spec.out_dir / f"fig2_s{s}_{kind}.csv", trace)
            hit = trace.first_below(1e-8)
            final = format_float(trace.records[-1].objective)
            rows.append(f"{s},{kind},{'' if hit is None else hit},{final}")
            log.info("s=%d init=%s reached 1e-8 at %s", s, kind, hit)
    text = "\n".join(rows) + "\n"
    _write_text(spec.out_dir / "fig2_summary.csv", text)
    sys.stdout.write(text)


def cmd_conjecture(spec: ExperimentSpec, workers: int = 1) -> None:
    (s,) = spec.s
    results = analysis.monte_carlo_conjecture(spec.n, s, spec.n_cols_list, spec.trials,
                                              seed=spec.seed, workers=workers)
    trial_rows = ["n_cols,trial,q2"]
    summary = ["n,s,n_cols,trials,median_q2,max_q2,fraction_below_one"]
    for res in results:
        trial_rows.extend(f"{res.n_cols},{i},{format_float(q)}" for i, q in enumerate(res.q_values))
        summary.append(f"{res.n},{res.s},{res.n_cols},{res.trials},{format_float(res.median)},"
                       f"{format_float(res.max)},{format_float(res.fraction_below_one)}")
    _write_text(spec.out_dir / "conjecture_trials.csv", "\n".join(trial_rows) + "\n")
    text = "\n".join(summary) + "\n"
    _write_text(spec.out_dir / "conjecture_summary.csv", text)
    sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        spec = _spec_from_args(args)
        os.makedirs(spec.out_dir, exist_ok=True)
        if spec.command == "synth":
            cmd_synth(spec)
        elif spec.command == "learn":
            cmd_learn(spec, args.data, args.w_star, args.z_star)
        elif spec.command == "fig1":
            cmd_fig1(spec)
        elif spec.command == "fig2":
            cmd_fig2(spec)
        else:
            cmd_conjecture(spec, workers=args.workers)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"utlearn: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, UTLearnError, np.linalg.LinAlgError) as exc:
        print(f"utlearn: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
