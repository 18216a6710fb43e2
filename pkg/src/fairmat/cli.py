"""Command-line front end.

Exit codes: 0 success, 2 a requested check failed, 3 infeasible or invalid
input, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .domain import Instance, Lottery, induced_fractional, validate_instance
from .errors import FairmatError, InfeasiblePoint
from .instances import build_partition_reduction, gallery, gallery_ids
from .mechanisms import MECHANISMS
from .sdrel import is_sd_efficient, is_sd_envy_free, is_sd_proportional

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT, EXIT_USAGE = 0, 2, 3, 64
CHECKS = ("efficiency", "envy", "proportionality", "feasibility")


class UsageError(Exception):
    pass


class BadInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_ints(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("expected positive integers")
    return vals


def _csv_checks(text: str) -> list[str]:
    out = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in out if c not in CHECKS]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"checks must be among {', '.join(CHECKS)}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    p = _Parser(prog="fairmat", description="Fair and efficient random assignment under constraints.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="run a mechanism")
    s.add_argument("--mechanism", required=True, choices=sorted(MECHANISMS))
    s.add_argument("--instance", required=True, help="instance JSON file or gallery:<id>")
    s.add_argument("--decompose", action="store_true", help="also emit a lottery")
    s.add_argument("--verify", action="store_true", help="re-check the output")
    s.add_argument("--tol", type=float, default=1e-9, help="anonymous mechanism tolerance")
    s.add_argument("--emit", help="write the result JSON here")

    v = sub.add_parser("verify", parents=[common], help="check a matrix or lottery")
    v.add_argument("--instance", required=True)
    v.add_argument("--pi", required=True, help="JSON file with a 'pi' matrix")
    v.add_argument("--lottery", help="JSON file with a lottery")
    v.add_argument("--checks", type=_csv_checks, default=list(CHECKS))

    d = sub.add_parser("decompose", parents=[common], help="write a matrix as a lottery")
    d.add_argument("--instance", required=True)
    d.add_argument("--pi", required=True)
    d.add_argument("--emit")

    g = sub.add_parser("gallery", parents=[common], help="built-in instances")
    mode = g.add_mutually_exclusive_group(required=True)
    mode.add_argument("--list", action="store_true")
    mode.add_argument("--id")
    g.add_argument("--n", type=int, help="agent count for thm5-general-n")
    g.add_argument("--values", type=_csv_ints, help="values for npc")
    g.add_argument("--emit")

    r = sub.add_parser("reduce-partition", parents=[common], help="PARTITION reduction instance")
    r.add_argument("--values", required=True, type=_csv_ints)
    r.add_argument("--emit")

    c = sub.add_parser("certify", parents=[common], help="nonexistence certificates")
    c.add_argument("--target", required=True, choices=["thm4", "thm5"])
    c.add_argument("--samples", type=int, default=None)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--n", type=int, default=3, help="agent count for thm5")
    c.add_argument("--emit")

    k = sub.add_parser("check-certificate", parents=[common], help="re-check certificate files")
    k.add_argument("--file", required=True)
    return p


def _read_json(path: str):
    try:
        return io.load_json(path)
    except OSError as exc:
        raise BadInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path} is not valid JSON: {exc}") from None


def load_instance(spec: str) -> Instance:
    if spec.startswith("gallery:"):
        try:
            return gallery(spec.split(":", 1)[1]).instance
        except KeyError as exc:
            raise BadInput(str(exc)) from None
    try:
        inst = io.instance_from_json(_read_json(spec))
    except (KeyError, ValueError, TypeError) as exc:
        raise BadInput(f"malformed instance: {exc}") from None
    problems = validate_instance(inst)
    if problems:
        raise BadInput("invalid instance: " + "; ".join(problems))
    return inst


def _load_matrix(inst: Instance, path: str):
    obj = _read_json(path)
    try:
        pi = io.matrix_from_json(obj)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise BadInput(f"malformed matrix: {exc}") from None
    if len(pi) != inst.n or any(len(r) != inst.m for r in pi):
        raise BadInput(f"matrix must be {inst.n} x {inst.m}")
    return pi, obj


def _load_lottery(inst: Instance, obj) -> Lottery:
    if isinstance(obj, dict) and "lottery" in obj:
        obj = obj["lottery"]
    try:
        return io.lottery_from_json(obj, inst.labels)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise BadInput(f"malformed lottery: {exc}") from None


def _fmt_matrix(inst: Instance, pi) -> str:
    cols = list(inst.labels)
    cells = [[str(v) for v in row] for row in pi]
    width = max([len(c) for c in cols] + [len(x) for row in cells for x in row])
    lines = ["      " + " ".join(c.rjust(width) for c in cols)]
    for i, row in enumerate(cells):
        lines.append(f"  {i + 1:>3} " + " ".join(x.rjust(width) for x in row))
    return "\n".join(lines)


def _fmt_lottery(inst: Instance, lottery: Lottery) -> str:
    lines = []
    for p, bundles in lottery.support:
        parts = ", ".join("{" + ",".join(inst.label_set(b)) + "}" for b in bundles)
        lines.append(f"  {p}: ({parts})")
    return "\n".join(lines)


def run_checks(inst: Instance, pi, lottery: Lottery | None, checks) -> tuple[dict, Lottery | None]:
    """Run the requested predicates; returns verdicts and the lottery used for envy."""
    from .verify import check_feasible

    out: dict[str, dict] = {}
    if "feasibility" in checks or ("envy" in checks and lottery is None):
        verdict = check_feasible(inst, pi)
        if "feasibility" in checks:
            out["feasibility"] = {"passed": verdict.feasible, "certificate": verdict.certificate.to_json()}
        if lottery is None and verdict.feasible:
            lottery = io.lottery_from_json(verdict.certificate.payload["lottery"], inst.labels)
    if lottery is not None and induced_fractional(lottery, inst.m) != tuple(tuple(r) for r in pi):
        raise BadInput("lottery does not induce the matrix")
    if "efficiency" in checks:
        eff = is_sd_efficient(inst, pi)
        entry = {"passed": eff.efficient}
        if eff.witness is not None:
            entry["dominated_by"] = io.matrix_to_json(eff.witness)["pi"]
        out["efficiency"] = entry
    if "envy" in checks:
        if lottery is None:
            out["envy"] = {"passed": False, "violations": [], "note": "matrix is not feasible"}
        else:
            rep = is_sd_envy_free(inst, lottery)
            out["envy"] = {"passed": rep.satisfied,
                           "violations": [{"envier": i + 1, "envied": j + 1,
                                           "item": inst.labels[rep.pairs[(i, j)].witness]}
                                          for i, j in rep.violations()]}
    if "proportionality" in checks:
        if not inst.all_matroids():
            out["proportionality"] = {"passed": None, "note": "needs matroid constraints"}
        else:
            out["proportionality"] = {"passed": is_sd_proportional(inst, pi)}
    return out, lottery


def _report_checks(results: dict) -> list[str]:
    lines = []
    for name, entry in results.items():
        state = {True: "pass", False: "FAIL", None: "n/a"}[entry["passed"]]
        extra = ""
        if name == "envy" and entry.get("violations"):
            extra = " " + ", ".join(f"{v['envier']} envies {v['envied']} at {v['item']}" for v in entry["violations"])
        lines.append(f"  {name:<16}{state}{extra}")
    return lines


def _failed(results: dict) -> bool:
    return any(entry["passed"] is False for entry in results.values())


def _emit(obj, path, as_json: bool, human: str) -> None:
    if path:
        io.dump_json(obj, path)
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        print(human)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    mech = MECHANISMS[args.mechanism]
    res = mech(inst, tol=args.tol) if args.mechanism == "anonymous" else mech(inst)
    out = {"mechanism": args.mechanism, "pi": io.matrix_to_json(res.pi)["pi"],
           "guarantees": sorted(res.guarantees)}
    lottery = res.lottery
    if args.decompose and lottery is None:
        from .verify import decompose

        lottery = decompose(inst, res.pi)
    if args.decompose:
        out["lottery"] = io.lottery_to_json(lottery, inst.labels)
    human = [f"{args.mechanism} assignment:", _fmt_matrix(inst, res.pi)]
    if args.decompose:
        human += ["lottery:", _fmt_lottery(inst, lottery)]
    code = EXIT_OK
    if args.verify:
        checks = ["feasibility", "efficiency", "envy"]
        if "sd-proportional" in res.guarantees:
            checks.append("proportionality")
        results, _ = run_checks(inst, res.pi, lottery, checks)
        out["checks"] = {k: {kk: vv for kk, vv in v.items() if kk != "certificate"} for k, v in results.items()}
        human += ["checks:"] + _report_checks(results)
        code = EXIT_CHECK_FAILED if _failed(results) else EXIT_OK
    _emit(out, args.emit, args.json, "\n".join(human))
    return code


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    pi, raw = _load_matrix(inst, args.pi)
    lottery = None
    if args.lottery:
        lottery = _load_lottery(inst, _read_json(args.lottery))
    elif isinstance(raw, dict) and "lottery" in raw:
        lottery = _load_lottery(inst, raw)
    results, _ = run_checks(inst, pi, lottery, args.checks)
    out = {"checks": {k: {kk: vv for kk, vv in v.items() if kk != "certificate"} for k, v in results.items()},
           "passed": not _failed(results)}
    _emit(out, None, args.json, "\n".join(["checks:"] + _report_checks(results)))
    return EXIT_CHECK_FAILED if _failed(results) else EXIT_OK


def cmd_decompose(args) -> int:
    from .verify import check_feasible

    inst = load_instance(args.instance)
    pi, _ = _load_matrix(inst, args.pi)
    verdict = check_feasible(inst, pi)
    if not verdict.feasible:
        out = {"feasible": False, "certificate": verdict.certificate.to_json()}
        _emit(out, args.emit, args.json, "matrix is not in P; separating certificate:\n"
              + json.dumps(verdict.certificate.payload["z"]) + f" + {verdict.certificate.payload['z0']}")
        return EXIT_BAD_INPUT
    lottery = io.lottery_from_json(verdict.certificate.payload["lottery"], inst.labels)
    out = {"pi": io.matrix_to_json(pi)["pi"], "lottery": io.lottery_to_json(lottery, inst.labels)}
    _emit(out, args.emit, args.json, "lottery:\n" + _fmt_lottery(inst, lottery))
    return EXIT_OK


def cmd_gallery(args) -> int:
    if args.list:
        ids = gallery_ids()
        _emit({"ids": ids}, None, args.json, "\n".join(ids))
        return EXIT_OK
    try:
        entry = gallery(args.id, n=args.n, values=args.values)
    except KeyError as exc:
        raise BadInput(str(exc.args[0] if exc.args else exc)) from None
    obj = io.instance_to_json(entry.instance)
    human = f"{entry.id}: {entry.notes}\n" + json.dumps(obj, indent=2)
    _emit(obj, args.emit, args.json, human)
    return EXIT_OK


def cmd_reduce_partition(args) -> int:
    inst = build_partition_reduction(args.values)
    obj = io.instance_to_json(inst)
    _emit(obj, args.emit, args.json, json.dumps(obj, indent=2))
    return EXIT_OK


def cmd_certify(args) -> int:
    from .verify import check_certificate
    from .verify.theorems import DEFAULT_SEED, certify_thm4_nonexistence, certify_thm5_sampling

    if args.target == "thm4":
        if args.samples is not None or args.seed is not None:
            raise UsageError("--samples/--seed only apply to thm5")
        res = certify_thm4_nonexistence()
        certs = [res.support, res.infeasibility]
        checks = [check_certificate(c) for c in certs]
        out = {"target": "thm4", "certificates": [c.to_json() for c in certs],
               "verified": all(ok for ok, _ in checks),
               "infeasible_without_pinned_marginals": res.infeasible_without_marginals}
        human = [f"support restriction: {len(res.support.payload['pairs'])} dominated assignments, "
                 f"{'verified' if checks[0][0] else 'NOT verified'}",
                 f"envy LP over full-coverage lotteries: infeasible, Farkas certificate "
                 f"{'verified' if checks[1][0] else 'NOT verified'}"]
    else:
        samples = 1000 if args.samples is None else args.samples
        if samples < 1:
            raise UsageError("--samples must be positive")
        seed = DEFAULT_SEED if args.seed is None else args.seed
        rep = certify_thm5_sampling(samples=samples, seed=seed, n=args.n)
        checks = [check_certificate(c) for c in rep.certificates]
        verified = all(ok for ok, _ in checks) and rep.all_dominated
        out = {"target": "thm5", "n": rep.n, "seed": rep.seed, "samples": rep.samples,
               "dimension": rep.dimension, "vertices": [io.matrix_to_json(v)["pi"] for v in rep.vertices],
               "bounds": {k: io.rat_str(v) for k, v in rep.bounds.items()},
               "parametrisation_holds": rep.parametrisation_holds, "directions": rep.directions,
               "undominated": len(rep.undominated), "verified": verified, "status": rep.status,
               "certificates": [c.to_json() for c in rep.certificates]}
        human = [f"Q: dimension {rep.dimension}, {len(rep.vertices)} vertices; seed {rep.seed}, {rep.samples} samples",
                 f"dominating-point certificates: {sum(ok for ok, _ in checks)}/{len(rep.vertices) + rep.samples} verified"]
        for k, v in rep.bounds.items():
            human.append(f"  {k} = {v}")
        if rep.directions:
            human.append(f"  improvement directions: {rep.directions}")
        human.append(rep.status)
    if args.json:
        print(json.dumps(out if args.emit is None else {k: v for k, v in out.items() if k != "certificates"},
                         indent=2))
    else:
        print("\n".join(human))
    if args.emit:
        io.dump_json(out, args.emit)
    return EXIT_OK if out["verified"] else EXIT_CHECK_FAILED


def cmd_check_certificate(args) -> int:
    from .verify import Certificate, check_certificate

    obj = _read_json(args.file)
    if isinstance(obj, dict) and "certificates" in obj:
        raw = obj["certificates"]
    elif isinstance(obj, list):
        raw = obj
    else:
        raw = [obj]
    results = []
    for item in raw:
        try:
            cert = Certificate.from_json(item)
        except (ValueError, AttributeError, KeyError) as exc:
            raise BadInput(f"not a certificate: {exc}") from None
        ok, why = check_certificate(cert)
        results.append({"kind": cert.kind, "valid": ok, "reason": why})
    human = "\n".join(f"{r['kind']}: {'valid' if r['valid'] else 'INVALID'} ({r['reason']})" for r in results)
    _emit({"results": results}, None, args.json, human)
    return EXIT_OK if all(r["valid"] for r in results) else EXIT_CHECK_FAILED


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "decompose": cmd_decompose,
    "gallery": cmd_gallery,
    "reduce-partition": cmd_reduce_partition,
    "certify": cmd_certify,
    "check-certificate": cmd_check_certificate,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "json"):
        args.json = False
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fairmat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BadInput, InfeasiblePoint) as exc:
        print(f"fairmat: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FairmatError as exc:
        print(f"fairmat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def main() -> None:
    sys.exit(run())

