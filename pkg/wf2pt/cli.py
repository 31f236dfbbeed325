# SPDX-License-Identifier: MIT
# Command-line front-end. Exit codes: 0 success, 1 error, 2 negative verdict, 3 inconclusive.

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from wf2pt import config as config_module
from wf2pt.config import Wf2PtConfig
from wf2pt.experiments import BenchExperiment, RediscoveryExperiment
from wf2pt.experiment_store import FileExperimentStore
from wf2pt.language_oracle import StepLogStatus, language_of, verify_step_log
from wf2pt.petri_net import NotAWorkflowNetError, ResultSetCapExceededError, StateSpaceCaps, \
    StateSpaceExhaustedError, check_soundness, sorted_traces
from wf2pt.pnml import read_pnml_file, write_pnml_file
from wf2pt.profiler import NullProfiler, Profiler, SectionProfiler
from wf2pt.reduction import ReducedTree, WorkflowNetReducer, describe_residual
from wf2pt.serialization import read_step_log, write_bench_csv, write_step_log
from wf2pt.tree_generator import GeneratorConfig, parse_activity_triple, parse_probabilities_text
from wf2pt.tree_text import read_tree_text
from wf2pt.tree_to_net import TranslationVariant, tree_to_wfnet

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_INCONCLUSIVE = 3

VARIANT_BOTH = "both"


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def cmd_convert(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    wfnet = read_pnml_file(args.input)
    profiler: Profiler = SectionProfiler() if config.profiling_enabled else NullProfiler()
    reducer = WorkflowNetReducer(args.strict_and or config.strict_and, config.detector_order, profiler)
    outcome = reducer.reduce(wfnet)
    profiler.report(0)
    if args.log_steps:
        _write_text(args.log_steps, write_step_log(outcome.steps))

    if isinstance(outcome, ReducedTree):
        print(outcome.tree)
        if args.output:
            _write_text(args.output, f"{outcome.tree}\n")
        return EXIT_OK
    print(describe_residual(outcome))
    return EXIT_NEGATIVE


def cmd_tree2net(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    tree = read_tree_text(_read_text(args.input))
    variant = TranslationVariant.parse(args.variant) if args.variant else config.translation_variant
    wfnet = tree_to_wfnet(tree, variant)
    write_pnml_file(wfnet, args.output)
    logger.info(f"wrote {variant.value} net with {len(wfnet.net.places)} places and "
                f"{len(wfnet.net.transitions)} transitions to {args.output}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    try:
        wfnet = read_pnml_file(args.input)
    except NotAWorkflowNetError as e:
        print(f"invalid workflow net: {e}")
        return EXIT_NEGATIVE
    print("valid workflow net")
    caps = config.state_space_caps()
    if args.max_states is not None:
        caps = StateSpaceCaps(args.max_states, caps.max_token_per_place)
    verdict = check_soundness(wfnet, caps)
    print(verdict)
    if verdict.sound:
        return EXIT_OK
    return EXIT_INCONCLUSIVE if verdict.inconclusive else EXIT_NEGATIVE


def cmd_lang(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    model = read_pnml_file(args.input) if args.kind == "net" else read_tree_text(_read_text(args.input))
    max_length = args.max_length if args.max_length is not None else config.default_max_length
    try:
        traces = language_of(model, max_length, config.state_space_caps(), config.trace_set_cap)
    except (StateSpaceExhaustedError, ResultSetCapExceededError) as e:
        print(f"inconclusive: {e}")
        return EXIT_INCONCLUSIVE
    for trace in sorted_traces(traces):
        print(",".join(trace) if trace else "<>")
    return EXIT_OK


def _generator_config(args: argparse.Namespace, config: Wf2PtConfig) -> GeneratorConfig:
    generator_config = config.generator_config()
    if args.generator_config:
        generator_config = GeneratorConfig.load(args.generator_config, generator_config)
    low, mode, high = generator_config.low, generator_config.mode, generator_config.high
    if args.activities:
        low, mode, high = parse_activity_triple(args.activities)
    probabilities = generator_config.probabilities
    if args.probs:
        probabilities = parse_probabilities_text(args.probs)
    seed = args.seed if args.seed is not None else generator_config.seed
    return GeneratorConfig(low, mode, high, probabilities, seed)


def cmd_rediscover(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    if args.workers is not None:
        config.experiment_workers = args.workers
    if args.variant == VARIANT_BOTH:
        variants: Sequence[TranslationVariant] = list(TranslationVariant)
    elif args.variant:
        variants = [TranslationVariant.parse(args.variant)]
    else:
        variants = [config.translation_variant]
    store = FileExperimentStore(args.state_file) if args.state_file else None
    experiment = RediscoveryExperiment(config, _generator_config(args, config), variants,
                                       args.check_soundness, store)
    report = experiment.run(args.count)
    for line in report.summary_lines():
        print(line)
    return EXIT_OK if report.all_matched else EXIT_NEGATIVE


def cmd_bench(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    variant = TranslationVariant.parse(args.variant) if args.variant else config.translation_variant
    experiment = BenchExperiment(config, _generator_config(args, config), variant)
    report = experiment.run(args.count)
    with open(args.csv, "wb") as f:
        f.write(write_bench_csv(report.rows))
    print(f"{len(report.rows)} nets timed, written to {args.csv}")
    if report.fit is not None:
        for line in report.fit.summary_lines():
            print(line)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Wf2PtConfig) -> int:
    wfnet = read_pnml_file(args.input)
    steps = read_step_log(_read_text(args.steps))
    max_length = args.max_length if args.max_length is not None else config.default_max_length
    verdict = verify_step_log(wfnet, steps, max_length, config.state_space_caps(), config.trace_set_cap)
    print(verdict)
    if verdict.status is StepLogStatus.VERIFIED:
        return EXIT_OK
    return EXIT_INCONCLUSIVE if verdict.status is StepLogStatus.INCONCLUSIVE else EXIT_NEGATIVE


def _add_generator_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--count", type=int, required=True, help="number of generated trees")
    parser.add_argument("--seed", type=int, help="seed of the first tree, the following trees use seed+1, ...")
    parser.add_argument("--activities", help="triangular distribution of the activity count as low,mode,high")
    parser.add_argument("--probs", help="operator probabilities, e.g. seq=0.35,xor=0.25,and=0.25,loop=0.15")
    parser.add_argument("--generator-config", help="key=value file with activities, probabilities and seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wf2pt", description="Reduce workflow nets to process trees.")
    parser.add_argument("--config", help=f"configuration file (default {config_module.config_filename})")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at debug level")
    commands = parser.add_subparsers(dest="command", required=True)

    convert = commands.add_parser("convert", help="reduce a PNML workflow net to a process tree")
    convert.add_argument("--input", required=True)
    convert.add_argument("--output")
    convert.add_argument("--strict-and", action="store_true", help="also require shared producer pre-sets "
                                                                   "and consumer post-sets for parallel patterns")
    convert.add_argument("--log-steps", help="write the reduction steps to this file")
    convert.set_defaults(handler=cmd_convert)

    tree2net = commands.add_parser("tree2net", help="translate a process tree into a PNML workflow net")
    tree2net.add_argument("--input", required=True)
    tree2net.add_argument("--variant", choices=[v.value for v in TranslationVariant])
    tree2net.add_argument("--output", required=True)
    tree2net.set_defaults(handler=cmd_tree2net)

    check = commands.add_parser("check", help="validate a workflow net and check soundness")
    check.add_argument("--input", required=True)
    check.add_argument("--max-states", type=int)
    check.set_defaults(handler=cmd_check)

    lang = commands.add_parser("lang", help="print the traces up to a length")
    lang.add_argument("--input", required=True)
    lang.add_argument("--kind", choices=["net", "tree"], required=True)
    lang.add_argument("--max-length", type=int)
    lang.set_defaults(handler=cmd_lang)

    rediscover = commands.add_parser("rediscover", help="generate, translate and reduce random trees")
    _add_generator_arguments(rediscover)
    rediscover.add_argument("--variant", choices=[v.value for v in TranslationVariant] + [VARIANT_BOTH])
    rediscover.add_argument("--workers", type=int)
    rediscover.add_argument("--state-file", help="checkpoint file, a rerun with the same flags resumes from it")
    rediscover.add_argument("--check-soundness", action="store_true",
                            help="also check soundness of every reduced net")
    rediscover.set_defaults(handler=cmd_rediscover)

    bench = commands.add_parser("bench", help="time the reduction of random trees")
    _add_generator_arguments(bench)
    bench.add_argument("--variant", choices=[v.value for v in TranslationVariant])
    bench.add_argument("--csv", required=True)
    bench.set_defaults(handler=cmd_bench)

    verify = commands.add_parser("verify", help="replay a step log and check every step")
    verify.add_argument("--input", required=True)
    verify.add_argument("--steps", required=True)
    verify.add_argument("--max-length", type=int)
    verify.set_defaults(handler=cmd_verify)
    return parser


def load_config(config_path: Optional[str]) -> Wf2PtConfig:
    path = config_path or config_module.config_filename
    logger.info(f"Loading configuration from {path}")
    config = Wf2PtConfig()
    config.load(path)
    return config


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        config = load_config(args.config)
        return args.handler(args, config)
    except OSError as e:
        return _error(str(e))
    except ValueError as e:
        return _error(f"{type(e).__name__}: {e}")


if __name__ == "__main__":
    sys.exit(main())
