# =============================================================================
# RL Curriculum Scheduler - Command Line
# =============================================================================
'''
RL Curriculum Scheduler - Command Line
-
Subcommands:

- `run --spec FILE [--out DIR] [--seeds 1,2,3] [--jobs N]` - runs every
    (variant, seed) of an experiment spec and writes one log per run.
- `report --logs DIR [--out DIR]` - task proportions and steps-to-best of
    every log in a directory.
- `probe --checkpoint FILE --log FILE --step N [--amplification A]` - probe
    matrix of a DQN agent on a recorded state.

Exit codes: `0` success, `2` usage or configuration error, `3` aborted run.
The output root is `--out`, else `$CURRICULUM_OUTPUT_ROOT`, else the spec's
`output_dir`.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# analysis
from .analysis import (
    action_proportions, # task proportions
    final_macro_score, # last small-data score
    log_steps_to_best, # steps to the best small-data score
    probe_matrix, # probe matrices
    proportions_csv, # per-window CSV
)

# core objects
from .core import (
    ExperimentLog, # run logs
    Scheduler, # scheduler contract
    run_experiment, # training loop
    write_atomic, # atomic file writing
)

# DQN agents
from .dqn import (
    AgentCheckpoint, # saved agents
    DqnScheduler, # DQN scheduler
)

# synthetic student
from .envs import SyntheticTransferStudent

# custom errors
from .errors import (
    ConfigError, # invalid configuration
    DimensionError, # shape mismatch
    FileTypeError, # unsupported extension
    NonFiniteError, # NaN outside a scheduler decision
    ReadError, # unparsable file
    RunAbortError, # aborted run
)

# experiment specs
from .experiment_spec import ExperimentSpec

# used for the command line
import argparse

# used for the report tables
import csv
import io
import json

# used for running seeds in parallel
from concurrent.futures import ProcessPoolExecutor

# used for diagnostic logging
import logging

# used for the output root override
import os

# used for file paths
from pathlib import Path

# used for matching log file names
import regex

# used for type hinting
from typing import (
    List, # list data type
    Optional, # nullable data type
    Sequence, # read-only sequences
    Tuple, # tuple data type
)


# =============================================================================
# Logging + Constants
# =============================================================================
logger = logging.getLogger(__name__)

EXIT_OK: int = 0
''' Every run finished. '''
EXIT_CONFIG: int = 2
''' Usage or configuration error. '''
EXIT_ABORT: int = 3
''' At least one run aborted. '''
OUTPUT_ROOT_ENV: str = 'CURRICULUM_OUTPUT_ROOT'
''' Environment variable overriding the output root. '''

_LOG_FILE = regex.compile(r'^(?P<run>.+_seed(?P<seed>-?\d+))\.json$')


# =============================================================================
# Run One
# =============================================================================
def run_one(spec: ExperimentSpec, seed: int, out_dir: Path) -> Tuple[str, int, str]:
    '''
    Run One
    -
    Runs one (variant, seed) of a spec and writes its outputs:
    `<run>.csv`, `<run>.json`, `<run>_eval.csv`, plus `<run>_agent.json`
    for DQN and `<run>_trajectory.csv` when trajectories are kept.

    Parameters
    -
    - spec : `ExperimentSpec`
        - The (variant) spec.
    - seed : `int`
        - Seed of the run.
    - out_dir : `Path`
        - Output directory.

    Returns
    -
    - `Tuple<str, int, str>`
        - Run name, exit code and a message.
    '''

    run_name = spec.RunName(seed)
    prefix = out_dir / run_name
    env = spec.BuildEnvironment()
    scheduler = spec.BuildScheduler(env.profiles, env.state_dim)
    config = spec.RunConfig(seed)
    snapshot = {
        'spec': spec.ToDict(),
        'run': config.ToDict(),
        'scheduler': scheduler.ConfigDict(),
        'environment': env.ConfigDict(),
    }

    def on_checkpoint(step: int, sched: Scheduler) -> None:
        if isinstance(sched, DqnScheduler):
            sched.Checkpoint().Write(
                prefix.with_name(f'{run_name}_agent_step{step}.json')
            )

    try:
        log = run_experiment(config, env, scheduler, snapshot, on_checkpoint)
    except (RunAbortError, NonFiniteError) as e:
        logger.error(f'{run_name}: run aborted: {e}')
        return run_name, EXIT_ABORT, str(e)

    log.Write(prefix)
    if isinstance(scheduler, DqnScheduler) and scheduler.online is not None:
        scheduler.Checkpoint().Write(prefix.with_name(f'{run_name}_agent.json'))
    if isinstance(env, SyntheticTransferStudent) and env.keep_trajectory:
        env.DumpTrajectory(prefix.with_name(f'{run_name}_trajectory.csv'))
    return run_name, EXIT_OK, f'{len(log.records)} steps'


# =============================================================================
# Command - Run
# =============================================================================
def cmd_run(
        spec_file: str,
        out: Optional[str] = None,
        seeds: Optional[Sequence[int]] = None,
        jobs: int = 1
) -> int:
    '''
    Command - Run
    -
    Validates a spec (every variant), then runs each (variant, seed).

    Parameters
    -
    - spec_file : `str`
        - Name + Directory of the spec.
    - out : `str | None`
        - Output root override.
    - seeds : `Sequence<int> | None`
        - Seeds replacing the spec's seed list.
    - jobs : `int`
        - Parallel worker processes (`1` runs in this process).

    Returns
    -
    - `int`
        - Exit code.
    '''

    try:
        spec = ExperimentSpec(spec_file).Read()
        if seeds:
            spec.seeds = list(seeds)
        spec.Check()
    except (ConfigError, FileTypeError, ReadError) as e:
        logger.error(f'Invalid experiment spec: {e}')
        return EXIT_CONFIG

    out_dir = Path(out or os.environ.get(OUTPUT_ROOT_ENV) or spec.output_dir)
    out_dir.mkdir(parents = True, exist_ok = True)
    variants = spec.Variants()
    resolved = {
        'spec': spec.ToDict(),
        'variants': [v.ToDict() for v in variants] if spec.sweep else [],
        'runs': [v.RunName(s) for v in variants for s in spec.seeds],
    }
    write_atomic(
        out_dir / f'{spec.name}_resolved_spec.json',
        json.dumps(resolved, indent = 1) + '\n'
    )

    runs = [(v, seed) for v in variants for seed in spec.seeds]
    for v, _ in runs:
        v.seeds = list(spec.seeds)
    logger.info(
        f'{spec.name}: {len(runs)} run(s) of {spec.total_steps} steps into ' \
        + f'`{out_dir}`'
    )
    if jobs > 1 and len(runs) > 1:
        with ProcessPoolExecutor(max_workers = jobs) as pool:
            results = list(pool.map(
                run_one,
                [v for v, _ in runs],
                [s for _, s in runs],
                [out_dir] * len(runs)
            ))
    else:
        results = [run_one(v, s, out_dir) for v, s in runs]

    code = EXIT_OK
    for run_name, status, message in results:
        logger.info(f'{run_name}: {message}')
        code = max(code, status)
    return code


# =============================================================================
# Command - Report
# =============================================================================
def cmd_report(
        logs: str,
        out: Optional[str] = None,
        window: int = 1000,
        ensemble_width: int = 4
) -> int:
    '''
    Command - Report
    -
    Writes `proportions.csv` (whole-run fractions, one row per log),
    `windows_<log>.csv` (per-window fractions) and `steps_to_best.csv`
    (one row per log).

    Parameters
    -
    - logs : `str`
        - Directory holding the JSON logs.
    - out : `str | None`
        - Output directory (defaults to `logs`).
    - window : `int`
        - Steps per proportion window.
    - ensemble_width : `int`
        - Evaluations averaged by steps-to-best.

    Returns
    -
    - `int`
        - Exit code.
    '''

    log_dir = Path(logs)
    files = sorted(
        p for p in log_dir.glob('*.json') if _LOG_FILE.match(p.name)
    ) if log_dir.is_dir() else []
    if not files:
        logger.error(f'No experiment logs found in `{log_dir}`')
        return EXIT_CONFIG
    out_dir = Path(out) if out else log_dir
    out_dir.mkdir(parents = True, exist_ok = True)

    proportions = io.StringIO()
    prop_writer = csv.writer(proportions, lineterminator = '\n')
    summary = io.StringIO()
    summary_writer = csv.writer(summary, lineterminator = '\n')
    summary_writer.writerow(
        ['log', 'scheduler', 'seed', 'steps_to_best', 'final_macro_score']
    )

    task_header: Optional[List[str]] = None
    for path in files:
        try:
            log = ExperimentLog.FromJson(path)
            windows, totals = action_proportions(log, window)
        except (ReadError, ValueError) as e:
            logger.error(f'Malformed log `{path}`: {e}')
            return EXIT_CONFIG

        run = path.stem
        scheduler = (log.config_snapshot.get('scheduler', {}) or {}).get(
            'kind', ''
        )
        if task_header is None:
            task_header = log.task_names
            prop_writer.writerow(['log', 'scheduler', 'seed'] + task_header)
        elif log.task_names != task_header:
            logger.error(f'`{path}` has a different task set')
            return EXIT_CONFIG
        prop_writer.writerow([run, scheduler, log.seed] + totals.tolist())
        write_atomic(
            out_dir / f'windows_{run}.csv',
            proportions_csv(windows, log.task_names)
        )

        try:
            best: object = log_steps_to_best(log, ensemble_width)
            final: object = final_macro_score(log)
        except ValueError as e:
            logger.warning(f'`{path}`: no steps-to-best ({e})')
            best, final = '', ''
        summary_writer.writerow([run, scheduler, log.seed, best, final])

    write_atomic(out_dir / 'proportions.csv', proportions.getvalue())
    write_atomic(out_dir / 'steps_to_best.csv', summary.getvalue())
    logger.info(f'Reported {len(files)} log(s) into `{out_dir}`')
    return EXIT_OK


# =============================================================================
# Command - Probe
# =============================================================================
def cmd_probe(
        checkpoint: str,
        log: str,
        step: int,
        amplification: float = 5.0,
        out: Optional[str] = None
) -> int:
    '''
    Command - Probe
    -
    Probes a DQN agent with every task in turn on the state recorded at
    `step`, and writes `<checkpoint>_probe_step<step>.json` and `.csv`.

    Parameters
    -
    - checkpoint : `str`
        - Agent checkpoint file.
    - log : `str`
        - JSON log holding the recorded states.
    - step : `int`
        - Step of the base state.
    - amplification : `float`
        - Multiplier of the probed block.
    - out : `str | None`
        - Output directory (defaults to the checkpoint's directory).

    Returns
    -
    - `int`
        - Exit code.
    '''

    try:
        agent = AgentCheckpoint.Read(checkpoint)
        run_log = ExperimentLog.FromJson(log)
    except ReadError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    if step not in run_log.states:
        logger.error(
            f'No state recorded at step {step} in `{log}` ' \
            + f'({len(run_log.states)} recorded states)'
        )
        return EXIT_CONFIG
    try:
        matrix = probe_matrix(
            agent,
            run_log.states[step],
            run_log.task_names,
            amplification,
            step
        )
    except (DimensionError, ValueError) as e:
        logger.error(f'Cannot probe `{checkpoint}`: {e}')
        return EXIT_CONFIG

    out_dir = Path(out) if out else Path(checkpoint).parent
    out_dir.mkdir(parents = True, exist_ok = True)
    prefix = out_dir / f'{Path(checkpoint).stem}_probe_step{step}'
    write_atomic(
        prefix.with_name(prefix.name + '.json'),
        json.dumps(matrix.ToDict(), indent = 1) + '\n'
    )
    write_atomic(prefix.with_name(prefix.name + '.csv'), matrix.ToCsv())
    logger.info(f'Wrote probe matrix `{prefix}`')
    return EXIT_OK


# =============================================================================
# Argument Parser
# =============================================================================
def _seed_list(text: str) -> List[int]:
    try:
        return [int(s) for s in text.split(',') if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'Invalid seed list `{text}`')


def build_parser() -> argparse.ArgumentParser:
    ''' Parser of the `run`, `report` and `probe` subcommands. '''
    parser = argparse.ArgumentParser(
        prog = 'curriculum_scheduler_py',
        description = 'Curriculum schedulers for multi-task students.'
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action = 'store_true')
    verbosity.add_argument('-q', '--quiet', action = 'store_true')
    sub = parser.add_subparsers(dest = 'cmd', required = True)

    run = sub.add_parser('run', help = 'run an experiment spec')
    run.add_argument('--spec', required = True)
    run.add_argument('--out', default = None)
    run.add_argument('--seeds', type = _seed_list, default = None)
    run.add_argument('--jobs', type = int, default = 1)

    report = sub.add_parser('report', help = 'summarize a directory of logs')
    report.add_argument('--logs', required = True)
    report.add_argument('--out', default = None)
    report.add_argument('--window', type = int, default = 1000)
    report.add_argument('--ensemble-width', type = int, default = 4)

    probe = sub.add_parser('probe', help = 'probe a DQN agent')
    probe.add_argument('--checkpoint', required = True)
    probe.add_argument('--log', required = True)
    probe.add_argument('--step', type = int, required = True)
    probe.add_argument('--amplification', type = float, default = 5.0)
    probe.add_argument('--out', default = None)
    return parser


# =============================================================================
# Main
# =============================================================================
def main(argv: Optional[Sequence[str]] = None) -> int:
    ''' Command-line entry point. Returns the exit code. '''
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level = level,
        format = '%(asctime)s %(levelname)s %(name)s: %(message)s'
    )

    if args.cmd == 'run':
        return cmd_run(args.spec, args.out, args.seeds, args.jobs)
    if args.cmd == 'report':
        return cmd_report(args.logs, args.out, args.window, args.ensemble_width)
    return cmd_probe(
        args.checkpoint,
        args.log,
        args.step,
        args.amplification,
        args.out
    )


# =============================================================================
# End of File
# =============================================================================
