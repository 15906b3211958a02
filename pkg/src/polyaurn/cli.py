"""Command-line front end.

One verb per capability: ``simulate`` (single discrete trajectory),
``embed`` (single continuous-time run), ``exact`` (state distribution),
``dominance`` (survival curve, exact or Monte Carlo), ``limits`` (scaled
samples at a continuous horizon), ``path`` (deterministic two-block
trajectory), ``report`` (aggregate per-replication CSV dumps).

Every run prints a summary JSON to stdout holding the subcommand, a
config echo sufficient to reproduce the run, the seed, and the wall
time.  ``--out`` writes the subcommand's result table as CSV or JSON;
those artifacts carry no timing or thread information, so repeated runs
are byte-identical.  Exit codes: 0 success, 1 usage error, 2 budget or
cap exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import exact as exact_mod
from . import montecarlo as mc
from .embedding import DEFAULT_EVENT_CAP, run_until, scaled_sample
from .errors import BudgetExceededError, UrnModelError
from .exact import DEFAULT_STATE_BUDGET
from .rng import UniformStream, derive_replication_seed
from .stats import wilson_interval
from .urn import (
    CRITERION_KINDS,
    DominanceCriterion,
    ReplacementRule,
    check_dominance_prefix,
    new_urn,
    run_trajectory,
    two_block_path,
)


class UsageError(Exception):
    """Invalid command line; the message lists every violated constraint."""


@dataclass(frozen=True)
class RunConfig:
    """A validated command-line request."""

    subcommand: str
    m: Optional[Tuple[int, ...]] = None
    initial: Optional[Tuple[int, ...]] = None
    n_steps: Optional[int] = None
    t_max: Optional[float] = None
    replications: Optional[int] = None
    seed: int = 0
    criterion: Optional[str] = "strict"
    focus: int = 0
    mode: str = "auto"
    exact: bool = False
    confidence: float = 0.95
    k_lead: Optional[int] = None
    k_trail: Optional[int] = None
    max_events: int = DEFAULT_EVENT_CAP
    state_budget: int = DEFAULT_STATE_BUDGET
    inputs: Tuple[str, ...] = ()
    out: Optional[str] = None
    fmt: str = "json"
    dump: Optional[str] = None
    threads: int = 1

    @property
    def q(self):
        return len(self.m) if self.m is not None else 0

    def echo(self):
        """Result-determining fields only; threads and paths are omitted."""
        fields = {"subcommand": self.subcommand, "seed": self.seed}
        if self.m is not None:
            fields["m"] = list(self.m)
        if self.initial is not None:
            fields["initial"] = list(self.initial)
        if self.n_steps is not None:
            fields["n_steps"] = self.n_steps
        if self.t_max is not None:
            fields["t_max"] = self.t_max
        if self.replications is not None:
            fields["replications"] = self.replications
        if self.subcommand in ("simulate", "dominance"):
            fields["criterion"] = self.criterion
            fields["focus"] = self.focus
        if self.subcommand in ("exact",) or (
            self.subcommand == "dominance" and self.exact
        ):
            fields["mode"] = self.mode
            fields["state_budget"] = self.state_budget
        if self.subcommand == "dominance":
            fields["exact"] = self.exact
        if self.subcommand in ("dominance", "limits", "report"):
            fields["confidence"] = self.confidence
        if self.subcommand in ("embed", "limits"):
            fields["max_events"] = self.max_events
        if self.subcommand == "path":
            fields["k_lead"] = self.k_lead
            fields["k_trail"] = self.k_trail
        if self.subcommand == "report":
            fields["inputs"] = list(self.inputs)
        return fields


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _add_urn_flags(sub):
    sub.add_argument("--m", required=True, help="replacement counts, e.g. 2,1")
    sub.add_argument("--init", required=True, help="initial counts, e.g. 2,1")


def _add_io_flags(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--threads", type=int, default=1)


def _build_parser():
    parser = _Parser(prog="polyaurn", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sim = subs.add_parser("simulate", help="single discrete trajectory")
    _add_urn_flags(sim)
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument(
        "--criterion", choices=CRITERION_KINDS + ("none",), default="strict"
    )
    sim.add_argument("--focus", type=int, default=0)
    _add_io_flags(sim)

    emb = subs.add_parser("embed", help="single continuous-time run")
    _add_urn_flags(emb)
    emb.add_argument("--t", type=float, required=True)
    emb.add_argument("--max-events", type=int, default=DEFAULT_EVENT_CAP)
    _add_io_flags(emb)

    exa = subs.add_parser("exact", help="exact state distribution")
    _add_urn_flags(exa)
    exa.add_argument("--steps", type=int, required=True)
    exa.add_argument("--mode", choices=("auto", "rational", "float"), default="auto")
    exa.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    _add_io_flags(exa)

    dom = subs.add_parser("dominance", help="survival curve, exact or MC")
    _add_urn_flags(dom)
    dom.add_argument("--steps", type=int, required=True)
    dom.add_argument("--criterion", choices=CRITERION_KINDS, default="strict")
    dom.add_argument("--focus", type=int, default=0)
    dom.add_argument("--exact", action="store_true")
    dom.add_argument("--reps", type=int, default=None)
    dom.add_argument("--mode", choices=("auto", "rational", "float"), default="auto")
    dom.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    dom.add_argument("--confidence", type=float, default=0.95)
    dom.add_argument("--dump", default=None, help="per-replication CSV path")
    _add_io_flags(dom)

    lim = subs.add_parser("limits", help="scaled-count samples at time t")
    _add_urn_flags(lim)
    lim.add_argument("--t", type=float, required=True)
    lim.add_argument("--reps", type=int, required=True)
    lim.add_argument("--max-events", type=int, default=DEFAULT_EVENT_CAP)
    lim.add_argument("--confidence", type=float, default=0.95)
    _add_io_flags(lim)

    pth = subs.add_parser("path", help="two-block dominance trajectory")
    _add_urn_flags(pth)
    pth.add_argument("--kb", type=int, required=True, help="lead-colour draws")
    pth.add_argument("--kw", type=int, required=True, help="trail-colour draws")
    _add_io_flags(pth)

    rep = subs.add_parser("report", help="aggregate per-replication dumps")
    rep.add_argument("inputs", nargs="+", help="CSV dump files")
    rep.add_argument("--confidence", type=float, default=0.95)
    _add_io_flags(rep)

    return parser


def parse_args(argv):
    """Parse and fully validate an argument vector into a RunConfig.

    Raises UsageError whose message lists every violated constraint.
    """
    ns = _build_parser().parse_args(argv)
    violations = []

    def check(ok, message):
        if not ok:
            violations.append(message)

    m = initial = None
    if hasattr(ns, "m"):
        try:
            m = _int_list(ns.m)
            check(len(m) >= 2, "--m needs at least two colours")
            check(all(v >= 1 for v in m), "--m entries must be >= 1")
        except UsageError as err:
            violations.append(f"--m: {err}")
            m = None
        try:
            initial = _int_list(ns.init)
        except UsageError as err:
            violations.append(f"--init: {err}")
        if m is not None and initial is not None:
            check(
                len(initial) == len(m),
                f"dimension mismatch: --m has {len(m)} entries, "
                f"--init has {len(initial)}",
            )
            if len(initial) == len(m) and all(v >= 1 for v in m):
                try:
                    new_urn(initial, ReplacementRule(m))
                except UrnModelError as err:
                    violations.append(str(err))

    check(0 <= ns.seed < 2**64, "--seed must lie in [0, 2^64)")
    check(ns.threads >= 1, "--threads must be >= 1")

    n_steps = getattr(ns, "steps", None)
    if n_steps is not None:
        check(n_steps >= 0, "--steps must be >= 0")
    t_max = getattr(ns, "t", None)
    if t_max is not None:
        check(t_max >= 0.0, "--t must be >= 0")
    reps = getattr(ns, "reps", None)
    if reps is not None:
        check(reps >= 1, "--reps must be >= 1")
    confidence = getattr(ns, "confidence", 0.95)
    check(0.0 < confidence < 1.0, "--confidence must lie in (0, 1)")
    max_events = getattr(ns, "max_events", DEFAULT_EVENT_CAP)
    check(max_events >= 1, "--max-events must be >= 1")
    state_budget = getattr(ns, "state_budget", DEFAULT_STATE_BUDGET)
    check(state_budget >= 1, "--state-budget must be >= 1")

    criterion = getattr(ns, "criterion", None)
    focus = getattr(ns, "focus", 0)
    if criterion is not None and criterion != "none" and m is not None:
        try:
            DominanceCriterion(criterion, focus).validate_for(len(m))
        except UrnModelError as err:
            violations.append(str(err))

    if ns.subcommand == "dominance":
        if ns.exact:
            check(ns.dump is None, "--dump requires Monte Carlo mode")
            check(ns.reps is None, "--reps conflicts with --exact")
        else:
            check(ns.reps is not None, "--reps is required without --exact")

    k_lead = getattr(ns, "kb", None)
    k_trail = getattr(ns, "kw", None)
    if ns.subcommand == "path":
        check(k_lead >= 0, "--kb must be >= 0")
        check(k_trail >= 0, "--kw must be >= 0")
        if m is not None and initial is not None and len(initial) == len(m):
            check(len(m) == 2, "path construction needs exactly two colours")
            if len(initial) == 2:
                check(
                    initial[0] > initial[1] >= 0,
                    "path construction needs init with count_0 > count_1 >= 0",
                )

    if violations:
        raise UsageError("; ".join(violations))

    return RunConfig(
        subcommand=ns.subcommand,
        m=m,
        initial=initial,
        n_steps=n_steps,
        t_max=t_max,
        replications=reps,
        seed=ns.seed,
        criterion=criterion if criterion != "none" else None,
        focus=focus,
        mode=getattr(ns, "mode", "auto"),
        exact=getattr(ns, "exact", False),
        confidence=confidence,
        k_lead=k_lead,
        k_trail=k_trail,
        max_events=max_events,
        state_budget=state_budget,
        inputs=tuple(getattr(ns, "inputs", ())),
        out=ns.out,
        fmt=ns.format,
        dump=getattr(ns, "dump", None),
        threads=ns.threads,
    )


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_table(path, fmt, header, rows):
    if fmt == "csv":
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    else:
        payload = {"columns": list(header), "rows": [list(r) for r in rows]}
        with open(path, "w") as handle:
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")


def _write_dump(path, q, seed, first_failure, final_counts):
    header = ["rep", "seed", "first_failure_step"] + [
        f"final_count_{j}" for j in range(q)
    ]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for rep in range(len(first_failure)):
            row = [rep, derive_replication_seed(seed, rep), int(first_failure[rep])]
            row += [int(c) for c in final_counts[rep]]
            writer.writerow(row)


def _criterion_of(config):
    if config.criterion is None:
        return None
    return DominanceCriterion(config.criterion, config.focus)


def _estimate_fields(est, prefix=""):
    return {
        prefix + "estimate": est.estimate,
        prefix + "ci_lo": est.lo,
        prefix + "ci_hi": est.hi,
        prefix + "confidence": est.confidence,
        prefix + "standard_error": est.standard_error,
    }


def _run_simulate(config):
    rule = ReplacementRule(config.m)
    state = new_urn(config.initial, rule)
    stream = UniformStream.for_replication(config.seed, 0)
    traj = run_trajectory(state, rule, config.n_steps, stream)
    crit = _criterion_of(config)
    result = {
        "final_counts": list(traj.final_state.counts),
        "steps": config.n_steps,
    }
    if crit is not None:
        holds, first_failure = check_dominance_prefix(traj, crit)
        result["dominance_holds"] = holds
        result["first_failure_step"] = -1 if first_failure is None else first_failure
    header = ["step", "colour"] + [f"count_{j}" for j in range(rule.q)]
    rows = []
    for i, st in enumerate(traj.all_states()):
        colour = -1 if i == 0 else traj.draws[i - 1]
        rows.append([st.step, colour] + list(st.counts))
    return result, (header, rows)


def _run_embed(config):
    rule = ReplacementRule(config.m)
    state = new_urn(config.initial, rule)
    stream = UniformStream.for_replication(config.seed, 0)
    ctraj = run_until(state, rule, config.t_max, stream, max_events=config.max_events)
    scaled = scaled_sample(ctraj, rule, config.t_max)
    result = {
        "final_counts": list(ctraj.final_state.counts),
        "events": len(ctraj.events),
        "t_max": config.t_max,
        "scaled_counts": [float(v) for v in scaled.values],
    }
    header = ["event", "time", "colour"] + [f"count_{j}" for j in range(rule.q)]
    rows = []
    states = ctraj.states()
    for i, (when, colour) in enumerate(ctraj.events):
        rows.append([i + 1, when, colour] + list(states[i].counts))
    return result, (header, rows)


def _run_exact(config):
    rule = ReplacementRule(config.m)
    dist = exact_mod.state_distribution(
        config.initial,
        rule,
        config.n_steps,
        mode=config.mode,
        state_budget=config.state_budget,
    )
    result = {
        "step": dist.step,
        "mode": dist.mode,
        "states": len(dist.entries),
        "total_probability": float(dist.total_probability()),
    }
    rational = dist.mode == "rational"
    header = [f"count_{j}" for j in range(rule.q)] + ["probability"]
    if rational:
        header.append("probability_exact")
    rows = []
    for counts in sorted(dist.entries):
        p = dist.entries[counts]
        row = list(counts) + [float(p)]
        if rational:
            row.append(str(Fraction(p)))
        rows.append(row)
    return result, (header, rows)


def _run_dominance_exact(config):
    rule = ReplacementRule(config.m)
    crit = _criterion_of(config)
    curve = exact_mod.survival_probability(
        config.initial,
        rule,
        config.n_steps,
        crit,
        mode=config.mode,
        state_budget=config.state_budget,
    )
    result = {
        "mode": curve.mode,
        "p_final": float(curve.values[-1]),
        "horizon": config.n_steps,
    }
    rational = curve.mode == "rational"
    header = ["n", "p"] + (["p_exact"] if rational else [])
    rows = []
    for n, p in enumerate(curve.values):
        row = [n, float(p)]
        if rational:
            row.append(str(Fraction(p)))
        rows.append(row)
    return result, (header, rows)


def _run_dominance_mc(config):
    rule = ReplacementRule(config.m)
    plan = mc.ExperimentPlan(
        initial=config.initial,
        rule=rule,
        replications=config.replications,
        master_seed=config.seed,
        n_steps=config.n_steps,
        criterion=_criterion_of(config),
        kind="dominance",
    )
    if config.dump is not None:
        first_failure, final_counts = mc.simulate_replications(
            plan, early_stop=False, want_counts=True, threads=config.threads
        )
        _write_dump(config.dump, rule.q, config.seed, first_failure, final_counts)
    curve = mc.survival_curve_mc(
        plan, confidence=config.confidence, threads=config.threads
    )
    final = curve[-1][1]
    result = {"horizon": config.n_steps, "replications": config.replications}
    result.update(_estimate_fields(final, prefix="p_final_"))
    header = ["n", "estimate", "ci_lo", "ci_hi"]
    rows = [[n, est.estimate, est.lo, est.hi] for n, est in curve]
    return result, (header, rows)


def _run_dominance(config):
    if config.exact:
        return _run_dominance_exact(config)
    return _run_dominance_mc(config)


def _run_limits(config):
    rule = ReplacementRule(config.m)
    plan = mc.ExperimentPlan(
        initial=config.initial,
        rule=rule,
        replications=config.replications,
        master_seed=config.seed,
        t_max=config.t_max,
        kind="limits",
    )
    sample = mc.sample_scaled_limits(
        plan,
        confidence=config.confidence,
        max_events=config.max_events,
        threads=config.threads,
    )
    values = sample.values
    result = {
        "t_max": config.t_max,
        "replications": config.replications,
        "scaled_means": [float(v) for v in values.mean(axis=0)],
        "scaled_standard_errors": [
            float(v) for v in values.std(axis=0, ddof=1) / len(values) ** 0.5
        ],
    }
    result.update(_estimate_fields(sample.white_below_black, prefix="white_below_black_"))
    header = ["rep", "seed"] + [f"scaled_{j}" for j in range(rule.q)]
    rows = []
    for rep in range(len(values)):
        row = [rep, derive_replication_seed(config.seed, rep)]
        row += [float(v) for v in values[rep]]
        rows.append(row)
    return result, (header, rows)


def _run_path(config):
    rule = ReplacementRule(config.m)
    traj, positive = two_block_path(
        config.initial[0], config.initial[1], rule, config.k_lead, config.k_trail
    )
    result = {
        "positive_throughout": positive,
        "k_lead": config.k_lead,
        "k_trail": config.k_trail,
        "final_counts": list(traj.final_state.counts),
        "trajectory": [list(st.counts) for st in traj.all_states()],
    }
    header = ["step", "count_0", "count_1"]
    rows = [[st.step] + list(st.counts) for st in traj.all_states()]
    return result, (header, rows)


def _run_report(config):
    total = 0
    successes = 0
    sums = None
    q = None
    for path in config.inputs:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or header[:3] != ["rep", "seed", "first_failure_step"]:
                raise UsageError(f"{path}: not a per-replication dump")
            file_q = len(header) - 3
            if q is None:
                q = file_q
                sums = [0] * q
            elif file_q != q:
                raise UsageError(f"{path}: colour count differs from earlier input")
            for row in reader:
                total += 1
                if int(row[2]) == -1:
                    successes += 1
                for j in range(q):
                    sums[j] += int(row[3 + j])
    if total == 0:
        raise UsageError("inputs contain no replications")
    lo, hi = wilson_interval(successes, total, config.confidence)
    result = {
        "replications": total,
        "successes": successes,
        "estimate": successes / total,
        "ci_lo": lo,
        "ci_hi": hi,
        "confidence": config.confidence,
        "mean_final_counts": [s / total for s in sums],
    }
    header = ["replications", "successes", "estimate", "ci_lo", "ci_hi"]
    rows = [[total, successes, successes / total, lo, hi]]
    return result, (header, rows)


_RUNNERS = {
    "simulate": _run_simulate,
    "embed": _run_embed,
    "exact": _run_exact,
    "dominance": _run_dominance,
    "limits": _run_limits,
    "path": _run_path,
    "report": _run_report,
}


def run(config, stdout=None):
    """Execute a validated config; returns the process exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    started = time.perf_counter()
    try:
        result, table = _RUNNERS[config.subcommand](config)
        if config.out is not None and table is not None:
            header, rows = table
            _write_table(config.out, config.fmt, header, rows)
    except BudgetExceededError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return 2
    except (UsageError, UrnModelError, OSError) as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    summary = {
        "subcommand": config.subcommand,
        "config": config.echo(),
        "seed": config.seed,
        "wall_time_s": time.perf_counter() - started,
        "result": result,
    }
    print(json.dumps(summary, sort_keys=True, indent=2), file=stdout)
    return 0


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        config = parse_args(argv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
