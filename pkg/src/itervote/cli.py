"""Command-line interface.

Subcommands: ``ew`` (equilibrium analysis of a profile file), ``eadpoa``
(Monte Carlo estimation over a range of agent counts), ``construct`` (the
linear-loss two-way-tie profile family), and ``verify`` (the brute-force and
identity check suites).

Exit codes: 0 success, 1 validation error, 2 budget or infeasibility,
3 I/O error.  Randomized subcommands require an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import montecarlo, oracle
from .core import (
    Profile,
    UtilityVector,
    ValidationError,
    format_profile_text,
    parse_profile_text,
    plurality_scores,
    plurality_winner,
    potential_winners,
)
from .dynamics import DEFAULT_MAX_STATES, ExplorationBudgetExceeded
from .welfare import (
    adversarial_loss,
    build_adversarial_tie_profile,
    construction_window,
    loss_lower_bound,
    _utility_flat_spot,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BUDGET = 2
EXIT_IO = 3

BUDGET_ENV = "ITERVOTE_BUDGET"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _parse_utilities(spec: str, m: int) -> UtilityVector:
    if spec == "borda":
        return UtilityVector.borda(m)
    if spec == "plurality":
        return UtilityVector.plurality(m)
    try:
        values = [Fraction(tok) for tok in spec.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse utility vector {spec!r}")
    cleaned = tuple(int(v) if v.denominator == 1 else v for v in values)
    if len(cleaned) != m:
        raise ValidationError(f"utility vector has {len(cleaned)} entries, expected m={m}")
    return UtilityVector(cleaned)


def _parse_n_range(spec: str) -> list[int]:
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) != 3:
        raise ValidationError(f"n range must be START:STOP:STEP, got {spec!r}")
    start, stop, step = (int(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValidationError(f"invalid n range {spec!r}")
    return list(range(start, stop + 1, step))


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get(BUDGET_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"{BUDGET_ENV} must be an integer, got {env!r}")
    return DEFAULT_MAX_STATES


def _fmt_set(values) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


def _cmd_ew(args) -> int:
    try:
        with open(args.profile, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.profile}: {exc}", file=sys.stderr)
        return EXIT_IO
    profile = parse_profile_text(text)
    u = _parse_utilities(args.u, profile.m)
    try:
        report = adversarial_loss(profile, u, max_states=_budget(args))
    except ExplorationBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    scores = plurality_scores(profile)
    print(f"agents: {profile.n}  alternatives: {profile.m}")
    print(f"plurality scores: {' '.join(str(scores[a]) for a in range(1, profile.m + 1))}")
    print(f"truthful winner: {report.truthful_winner}")
    print(f"potential winners: {_fmt_set(potential_winners(profile))}")
    print(f"equilibrium winners: {_fmt_set(report.equilibrium_winners)}")
    from .welfare import social_welfare

    sw = " ".join(f"{a}={social_welfare(profile, u, a)}" for a in range(1, profile.m + 1))
    print(f"social welfare: {sw}")
    print(f"adversarial loss: {report.loss}")
    return EXIT_OK


def _cmd_eadpoa(args) -> int:
    ns = _parse_n_range(args.n)
    rows: list[dict] = []
    budget = _budget(args)
    for n in ns:
        u = _parse_utilities(args.u, args.m)
        config = montecarlo.SamplerConfig(
            m=args.m,
            n=n,
            samples=args.samples,
            master_seed=args.seed,
            workers=args.workers,
        )
        summary = montecarlo.estimate_eadpoa(config, u, max_states=budget)
        rows.extend(montecarlo.summary_rows(summary))
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                if args.format == "csv":
                    montecarlo.write_csv(rows, fh)
                else:
                    montecarlo.write_json(rows, fh)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_IO
        _print_summary_table(rows)
    else:
        if args.format == "csv":
            montecarlo.write_csv(rows, sys.stdout)
        else:
            montecarlo.write_json(rows, sys.stdout)
    return EXIT_OK


def _print_summary_table(rows: list[dict]) -> None:
    print(montecarlo.CSV_HEADER.replace(",", "\t"))
    for row in rows:
        print(
            "\t".join(
                [
                    str(row["n"]),
                    row["alpha"],
                    str(row["count"]),
                    montecarlo._fmt(row["mean_loss"]),
                    montecarlo._fmt(row["ci95"]),
                    montecarlo._fmt(row["probability"]),
                    str(row["budget_failures"]),
                ]
            )
        )


def _cmd_construct(args) -> int:
    u = _parse_utilities(args.u, args.m)
    try:
        alpha, beta = construction_window(args.m, args.n)
        profile = build_adversarial_tie_profile(args.m, args.n, u)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    report = adversarial_loss(profile, u)
    bound = loss_lower_bound(args.m, args.n, u)
    text = format_profile_text(profile)
    lines = [
        f"alpha: {alpha}",
        f"beta: {beta}",
        f"k: {_utility_flat_spot(u)}",
        f"equilibrium winners: {_fmt_set(report.equilibrium_winners)}",
        f"adversarial loss: {report.loss}",
        f"guaranteed bound: {bound} ({float(bound):.6g})",
    ]
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_IO
        print("\n".join(lines))
    else:
        print("\n".join(lines), file=sys.stderr)
        sys.stdout.write(text)
    return EXIT_OK


def _check_line(name: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def _verify_claim1(args) -> bool:
    result = oracle.check_binomial_tail_identity(args.nmax)
    detail = (
        f"identity holds for all 0 <= p <= n <= {args.nmax}"
        if result.ok
        else f"first violation at (n, p) = {result.first_violation}"
    )
    return _check_line("claim1", result.ok, detail)


def _verify_stirling(args) -> bool:
    report = oracle.stirling_ratio_report(args.umax)
    ok = report["in_band"] and report["diffs_shrinking"]
    lo, hi = report["band"]
    detail = (
        f"ratios within [{lo}, {hi}] and converging; "
        f"empirical limit ~ {report['limit_estimate']:.6f} (for review)"
    )
    if not ok:
        detail = f"band/convergence violated; ratios: {report['ratios'][:8]}..."
    return _check_line("stirling", ok, detail)


def _verify_enum(args) -> bool:
    u = _parse_utilities(args.u, 3)
    report = oracle.exact_eadpoa(3, 5, u)
    ok = not report.mismatch_list
    detail = (
        f"{report.total_profiles} profiles, fast == exhaustive everywhere, "
        f"exact expected loss {report.exact_eadpoa} ({float(report.exact_eadpoa):.6f})"
    )
    if not ok:
        first = report.mismatch_list[0]
        detail = f"{len(report.mismatch_list)} mismatches; first: {first[0].rankings} fast={_fmt_set(first[1])} exhaustive={_fmt_set(first[2])}"
    return _check_line("enum-m3n5", ok, detail)


def _verify_ties(args) -> bool:
    if args.seed is None:
        raise ValidationError("verify ties requires --seed")
    ns = (50, 100, 200, 400)
    two_way = []
    three_way = []
    for n in ns:
        config = montecarlo.SamplerConfig(
            m=args.m, n=n, samples=args.samples, master_seed=args.seed, workers=args.workers
        )
        probs = montecarlo.tie_statistics(config)
        two_way.append(probs[2] * n**0.5)
        three_way.append(probs[3] * n)
    ok2 = max(two_way) <= 2 * min(two_way)
    ok3 = max(three_way) <= 2 * min(three_way)
    detail = (
        f"Pr(2-way)*sqrt(n) in [{min(two_way):.4f}, {max(two_way):.4f}], "
        f"Pr(3-way)*n in [{min(three_way):.4f}, {max(three_way):.4f}] over n={list(ns)}"
    )
    return _check_line("ties", ok2 and ok3, detail)


def _cmd_verify(args) -> int:
    checks = {
        "claim1": [_verify_claim1],
        "stirling": [_verify_stirling],
        "enum-m3n5": [_verify_enum],
        "ties": [_verify_ties],
        "all": [_verify_claim1, _verify_stirling, _verify_enum, _verify_ties],
    }[args.scope]
    all_ok = True
    for check in checks:
        all_ok = check(args) and all_ok
    return EXIT_OK if all_ok else EXIT_VALIDATION


def build_parser() -> _Parser:
    parser = _Parser(prog="itervote", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ew = sub.add_parser("ew", parents=[], help="equilibrium analysis of a profile file")
    p_ew.add_argument("profile", help="profile text file (one ranking per line)")
    p_ew.add_argument("--u", required=True, help="utility vector: borda, plurality, or comma list")
    p_ew.add_argument("--budget", type=int, default=None, help="exploration state budget")
    p_ew.set_defaults(func=_cmd_ew)

    p_e = sub.add_parser("eadpoa", help="Monte Carlo expected adversarial loss")
    p_e.add_argument("--m", type=int, required=True)
    p_e.add_argument("--n", required=True, help="agent count or START:STOP:STEP range")
    p_e.add_argument("--u", required=True)
    p_e.add_argument("--samples", type=int, required=True)
    p_e.add_argument("--seed", type=int, required=True, help="master seed (no clock default)")
    p_e.add_argument("--workers", type=int, default=1)
    p_e.add_argument("--output", default=None)
    p_e.add_argument("--format", choices=("csv", "json"), default="csv")
    p_e.add_argument("--budget", type=int, default=None)
    p_e.set_defaults(func=_cmd_eadpoa)

    p_c = sub.add_parser("construct", help="build the linear-loss two-way-tie profile")
    p_c.add_argument("--m", type=int, required=True)
    p_c.add_argument("--n", type=int, required=True)
    p_c.add_argument("--u", required=True)
    p_c.add_argument("--output", default=None, help="profile file to write")
    p_c.set_defaults(func=_cmd_construct)

    p_v = sub.add_parser("verify", help="run brute-force and identity check suites")
    p_v.add_argument("scope", choices=("all", "claim1", "stirling", "enum-m3n5", "ties"))
    p_v.add_argument("--nmax", type=int, default=30)
    p_v.add_argument("--umax", type=int, default=64)
    p_v.add_argument("--u", default="2,1,0")
    p_v.add_argument("--m", type=int, default=3)
    p_v.add_argument("--samples", type=int, default=200_000)
    p_v.add_argument("--seed", type=int, default=None)
    p_v.add_argument("--workers", type=int, default=1)
    p_v.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ExplorationBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except oracle.EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
