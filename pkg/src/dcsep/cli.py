"""Command line front end.

Exit codes: 0 certificate emitted or verified, or membership found;
2 unsupported case; 3 budget exhausted; 4 input error or rejected certificate.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .budget import SearchBudget
from .certificate import CertificateError, canonical_json, parse, serialize, verify
from .doublecoset import distinguish_conjugacy, membership_probe, separate_double_coset, separate_subgroup
from .errors import BudgetExhausted, DcsepError, LatticeMembership, NotApplicable, NotSeparable, RootOfUnity
from .mobius import classify
from .numfield import EmbeddingHandle, NFElement, NumberField
from .problem import Problem, ProblemError, validate
from .residue import TrackedRing
from .algebra import parse_rational
from .separation import find_order_prime, separate_additive, separate_power

EXIT_OK, EXIT_UNSUPPORTED, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4

COMMANDS = ("classify", "subgroup-sep", "doublecoset-sep", "conj-distinguish", "order-find",
            "power-sep", "additive-sep", "probe", "verify")


class InputError(Exception):
    pass


def _ring_json(mp) -> dict:
    return {"p": mp.p, "factor": [str(c) for c in mp.factor.coeffs]}


def _budget(args) -> SearchBudget:
    return SearchBudget(
        max_prime=args.max_prime,
        max_exponent=args.max_exponent,
        max_prime_pairs=args.max_prime_pairs,
        precision_cap=args.precision_cap,
        enumeration_cap=args.enumeration_cap,
    )


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


# --------------------------------------------------------------------------
# scalar commands


def _scalar(data: dict, *keys: str, extra: tuple = ()):
    validate(data, "scalar")
    missing = [k for k in keys + extra if k not in data]
    if missing:
        raise InputError(f"missing keys: {', '.join(missing)}")
    try:
        F = NumberField.from_json(data["field"])
        vals = [NFElement.from_json(F, data[k]) for k in keys]
        gens = []
        for t in data.get("tracked", []):
            t = parse_rational(t)
            if t == 0:
                raise InputError("tracked denominators must be nonzero")
            gens += [F(1 / t), F(t)]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from None
    idx = data.get("embedding", {}).get("root_index", 0)
    if idx >= F.degree:
        raise InputError(f"root_index {idx} exceeds field degree {F.degree}")
    return F, vals, TrackedRing(F, tuple(gens)), EmbeddingHandle(F, idx)


def cmd_order_find(data, budget):
    F, (delta,), R, _ = _scalar(data, "delta", extra=("m",))
    m = int(data["m"])
    try:
        res = find_order_prime(delta, m, R, data.get("mode", "exact"), budget, projective=data.get("projective", False))
    except RootOfUnity as exc:
        return {"outcome": "unsupported", "reason": "RootOfUnity", "detail": str(exc)}, EXIT_UNSUPPORTED
    return {"outcome": "order_prime", "ring": _ring_json(res.map), "order": str(res.achieved_order), "mode": res.mode}, EXIT_OK


def cmd_power_sep(data, budget):
    F, (lam, om), R, h = _scalar(data, "lambda", "omega")
    try:
        res = separate_power(lam, om, R, budget, h)
    except NotSeparable as exc:
        return {"outcome": "not_separable", "exponent": str(exc.witness)}, EXIT_UNSUPPORTED
    return {"outcome": "power_separation", "primes": res.primes, "rings": [_ring_json(m) for m in res.maps]}, EXIT_OK


def cmd_additive_sep(data, budget):
    F, (b, beta), R, _ = _scalar(data, "b", "beta")
    try:
        res = separate_additive(b, beta, R, budget)
    except LatticeMembership as exc:
        return {"outcome": "lattice_member", "coordinates": [str(exc.m), str(exc.n)]}, EXIT_UNSUPPORTED
    except NotApplicable as exc:
        return {"outcome": "unsupported", "reason": "NotApplicable", "detail": str(exc)}, EXIT_UNSUPPORTED
    return {"outcome": "additive_separation", "p": res.p, "joint": res.joint, "rings": [_ring_json(m) for m in res.maps]}, EXIT_OK


# --------------------------------------------------------------------------
# problem commands


def _problem(data) -> Problem:
    try:
        return Problem.from_json(data)
    except ProblemError as exc:
        raise InputError(str(exc)) from None


def cmd_classify(data, budget):
    P = _problem(data)
    out = {"outcome": "classification", "gamma": classify(P.gamma)}
    for name in ("H", "K"):
        spec = getattr(P, name)
        if spec is not None:
            out[name] = [classify(M) for M in spec.gens()]
    return out, EXIT_OK


def _search(fn):
    def run(data, budget):
        P = _problem(data)
        try:
            outcome = fn(P, budget)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return outcome.to_json(), outcome.exit_code

    return run


def cmd_probe(data, budget):
    P = _problem(data)
    exps = membership_probe(P, budget)
    if exps is None:
        return {"outcome": "none"}, EXIT_OK
    return {"outcome": "membership", "exponents": {k: [str(e) for e in v] for k, v in exps.items()}}, EXIT_OK


def cmd_verify(data, budget, cert_path):
    if cert_path is None:
        raise InputError("verify needs --certificate")
    try:
        raw = Path(cert_path).read_bytes()
        blob = json.loads(raw)
        if isinstance(blob, dict) and "certificate" in blob and "outcome" in blob:
            raw = canonical_json(blob["certificate"])
        cert = parse(raw)
    except (OSError, ValueError, CertificateError) as exc:
        return {"outcome": "rejected", "failure_reason": f"unreadable certificate: {exc}"}, EXIT_INPUT
    try:
        validate(data, "problem")
    except ProblemError as exc:
        raise InputError(str(exc)) from None
    report = verify(data, cert, cap=budget.enumeration_cap)
    out = {"outcome": "accepted" if report.accepted else "rejected", **report.to_json()}
    return out, EXIT_OK if report.accepted else EXIT_INPUT


HANDLERS = {
    "classify": cmd_classify,
    "subgroup-sep": _search(separate_subgroup),
    "doublecoset-sep": _search(separate_double_coset),
    "conj-distinguish": _search(distinguish_conjugacy),
    "order-find": cmd_order_find,
    "power-sep": cmd_power_sep,
    "additive-sep": cmd_additive_sep,
    "probe": cmd_probe,
}


def run_one(command: str, path: Path, budget: SearchBudget, cert_path=None) -> tuple[dict, int]:
    try:
        data = _load_json(path)
        if command == "verify":
            return cmd_verify(data, budget, cert_path)
        return HANDLERS[command](data, budget)
    except (InputError, ProblemError) as exc:
        return {"outcome": "input_error", "error": str(exc)}, EXIT_INPUT
    except BudgetExhausted as exc:
        return {"outcome": "budget_exhausted", "detail": str(exc)}, EXIT_BUDGET
    except DcsepError as exc:
        return {"outcome": "input_error", "error": f"{type(exc).__name__}: {exc}"}, EXIT_INPUT


def _emit(result: dict, out: Path | None) -> None:
    text = json.dumps(result, indent=1, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _batch_worker(job):
    command, path, budget, out_dir = job
    result, code = run_one(command, Path(path), budget)
    if out_dir is not None:
        _emit(result, Path(out_dir) / (Path(path).stem + ".out.json"))
    return path, result, code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcsep", description="Congruence separation certificates in SL(2) over number fields.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", required=True, help="problem JSON file, or a directory for batch mode")
    ap.add_argument("--output", "-o", help="output file (directory in batch mode); stdout if omitted")
    ap.add_argument("--certificate", "-c", help="certificate file for verify")
    ap.add_argument("--trace", action="store_true", help="log the prime scan to stderr")
    ap.add_argument("--jobs", "-j", type=int, default=1, help="parallel workers in batch mode")
    d = SearchBudget()
    ap.add_argument("--max-prime", type=int, default=d.max_prime)
    ap.add_argument("--max-exponent", type=int, default=d.max_exponent)
    ap.add_argument("--max-prime-pairs", type=int, default=d.max_prime_pairs)
    ap.add_argument("--precision-cap", type=int, default=d.precision_cap)
    ap.add_argument("--enumeration-cap", type=int, default=d.enumeration_cap)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(name)s: %(message)s",
                        level=logging.DEBUG if args.trace else logging.WARNING)
    logging.getLogger("numba").setLevel(logging.WARNING)
    try:
        budget = _budget(args)
    except ValueError as exc:
        print(f"dcsep: {exc}", file=sys.stderr)
        return EXIT_INPUT
    src = Path(args.input)
    if src.is_dir():
        if args.command == "verify":
            print("dcsep: verify takes a single problem file", file=sys.stderr)
            return EXIT_INPUT
        out_dir = Path(args.output) if args.output else None
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
        jobs = [(args.command, str(p), budget, str(out_dir) if out_dir else None) for p in sorted(src.glob("*.json"))]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                results = list(ex.map(_batch_worker, jobs))
        else:
            results = [_batch_worker(j) for j in jobs]
        worst = 0
        for path, result, code in results:
            print(f"{Path(path).name}\t{result['outcome']}\t{code}")
            worst = max(worst, code)
        return worst
    result, code = run_one(args.command, src, budget, args.certificate)
    out = Path(args.output) if args.output else None
    if args.command in ("doublecoset-sep", "subgroup-sep", "conj-distinguish") and out is not None and "certificate" in result:
        # the output file holds the certificate itself so verify can read it directly
        out.write_bytes(serialize(parse(canonical_json(result["certificate"]))))
        print(json.dumps({k: v for k, v in result.items() if k != "certificate"} | {"written": str(out)}, sort_keys=True))
        return code
    _emit(result, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
