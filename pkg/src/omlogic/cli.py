"""Command-line front end for batch verification.

Exit codes: 0 when every check passed, 1 for verification or proof failures,
2 for usage and parse errors.  ``--seed`` fixes all randomized sampling and
``--json`` writes a machine-readable report; identical invocations with the
same seed produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from omlogic.axioms import GuardViolation, UnknownSchemaError, instantiate_axiom
from omlogic.derive import derive_composed, derive_measurement, semantic_crosscheck
from omlogic.formats import (
    ParseError,
    parse_derivation,
    parse_lattice,
    parse_map,
    serialize,
)
from omlogic.kernel import check_derivation
from omlogic.lattice import (
    FiniteOrthoLattice,
    LatticeError,
    LawCheck,
    NotOrthomodularError,
    UnknownElementError,
    build_family,
)
from omlogic.propagation import (
    compose_join,
    find_order_counterexample,
    is_transition_map,
    lift_join_map,
    measurement_map_identities,
    perfect_measurement_map,
    pointwise_join,
    quantale_compose,
    quantale_union,
    random_join_map,
    random_transition_map,
    random_union_preserving_map,
    sup_morphism,
    transition_oracle,
)
from omlogic.syntax import ascii_sequent, pretty_sequent

__all__ = ["main", "run"]

OK, CHECK_FAILED, USAGE_ERROR = 0, 1, 2

ORACLE_LIMIT = 12  # subset enumeration beyond this is pointless at a desk


class _Exit(Exception):
    def __init__(self, code: int, message: str | None = None):
        self.code = code
        self.message = message


def _load_lattice(path: str) -> FiniteOrthoLattice:
    try:
        return parse_lattice(Path(path).read_text())
    except OSError as err:
        raise _Exit(USAGE_ERROR, f"cannot read {path}: {err}")
    except ParseError as err:
        raise _Exit(USAGE_ERROR, f"{path}: {err}")


def _load_registry(lat: FiniteOrthoLattice, paths: list[str]) -> dict:
    maps = {}
    for path in paths:
        try:
            m = parse_map(Path(path).read_text(), lat)
        except OSError as err:
            raise _Exit(USAGE_ERROR, f"cannot read {path}: {err}")
        except ParseError as err:
            raise _Exit(USAGE_ERROR, f"{path}: {err}")
        maps[m.label] = m
    return maps


def _parse_set(text: str, lat: FiniteOrthoLattice) -> frozenset[str]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise _Exit(USAGE_ERROR, f"expected a set like '{{a, b}}', got {text!r}")
    names = [n.strip() for n in text[1:-1].split(",") if n.strip()]
    for n in names:
        if n not in lat:
            raise _Exit(USAGE_ERROR, f"unknown element {n!r}")
    return frozenset(names)


def _format_set(names, lat: FiniteOrthoLattice) -> str:
    return "{" + ", ".join(sorted(names, key=lat.index)) + "}"


def _write_output(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, command: str, checks: list[LawCheck], extra=None) -> int:
    for c in checks:
        mark = "PASS" if c.passed else "FAIL"
        witness = "" if c.witness is None else f"  witness ({', '.join(c.witness)})"
        print(f"{mark} {c.law}{witness}")
    ok = all(c.passed for c in checks)
    if getattr(args, "json", None):
        payload = {
            "command": command,
            "inputs": {
                k: v
                for k, v in sorted(vars(args).items())
                if k not in ("func", "json") and v is not None
            },
            "seed": getattr(args, "seed", None),
            "checks": [
                {
                    "name": c.law,
                    "passed": c.passed,
                    "witness": list(c.witness) if c.witness else None,
                }
                for c in checks
            ],
            "ok": ok,
        }
        if extra:
            payload.update(extra)
        Path(args.json).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return OK if ok else CHECK_FAILED


def _sweep(fn, items, workers: int):
    """Order-preserving map; results are independent of the worker count."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- commands -------------------------------------------------------------------


def _cmd_lattice_gen(args) -> int:
    names = args.names.split(",") if args.names else None
    try:
        lat = build_family(args.family, args.n, names)
    except ValueError as err:
        raise _Exit(USAGE_ERROR, str(err))
    _write_output(args.output, serialize(lat))
    return OK


def _cmd_lattice_verify(args) -> int:
    lat = _load_lattice(args.lattice_file)
    report = lat.verify()
    return _emit_report(args, "lattice verify", list(report.checks))


def _cmd_propagate(args) -> int:
    lat = _load_lattice(args.lattice)
    if args.measure:
        if args.measure not in lat:
            raise _Exit(USAGE_ERROR, f"unknown element {args.measure!r}")
        try:
            f = perfect_measurement_map(lat, args.measure)
        except ValueError as err:
            raise _Exit(CHECK_FAILED, str(err))
    else:
        maps = _load_registry(lat, [args.map])
        f = next(iter(maps.values()))
    initial = _parse_set(args.set, lat)
    if "0" in initial:
        raise _Exit(USAGE_ERROR, "actuality sets never contain 0")
    image = f.apply(initial)
    print(_format_set(image, lat))
    if args.json:
        payload = {
            "command": "propagate",
            "inputs": {"lattice": args.lattice, "measure": args.measure, "set": sorted(initial)},
            "image": sorted(image, key=lat.index),
            "ok": True,
            "seed": None,
        }
        Path(args.json).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return OK


def _cmd_quantale_verify(args) -> int:
    lat = _load_lattice(args.lattice)
    lat.ensure_verified()
    rng = random.Random(args.seed)
    checks: list[LawCheck] = []
    measurements = {a: perfect_measurement_map(lat, a) for a in lat.elements}

    def membership(a):
        return is_transition_map(measurements[a]).ok

    fast = _sweep(membership, lat.elements, args.workers)
    bad = [a for a, ok in zip(lat.elements, fast) if not ok]
    checks.append(LawCheck("measurement-membership", not bad, tuple(bad[:1]) or None))

    if len(lat) <= ORACLE_LIMIT:
        disagree = [
            a
            for a in lat.elements
            if transition_oracle(measurements[a]).ok != is_transition_map(measurements[a]).ok
            or not transition_oracle(measurements[a]).ok
        ]
        checks.append(
            LawCheck("measurement-membership-oracle", not disagree, tuple(disagree[:1]) or None)
        )
        mismatched = 0
        first = None
        for i in range(args.random_maps):
            f = random_union_preserving_map(lat, rng)
            if is_transition_map(f).ok != transition_oracle(f).ok:
                mismatched += 1
                first = first or (str(i),)
        checks.append(LawCheck("random-map-agreement", mismatched == 0, first))

    pairs = list(itertools.product(lat.elements, repeat=2))
    sups = {a: sup_morphism(measurements[a]) for a in lat.elements}
    w = None
    for a, b in pairs:
        f, g = measurements[a], measurements[b]
        if sup_morphism(quantale_compose(f, g)) != compose_join(sups[a], sups[b]):
            w = (a, b)
            break
    checks.append(LawCheck("morphism-compose-measurements", w is None, w))
    w = None
    for a, b in pairs:
        f, g = measurements[a], measurements[b]
        if sup_morphism(quantale_union([f, g])) != pointwise_join([sups[a], sups[b]]):
            w = (a, b)
            break
    checks.append(LawCheck("morphism-union-measurements", w is None, w))

    w = None
    for i in range(args.pairs):
        f = random_transition_map(lat, rng)
        g = random_transition_map(lat, rng)
        if sup_morphism(quantale_compose(f, g)) != compose_join(
            sup_morphism(f), sup_morphism(g)
        ):
            w = (f"compose sample {i}",)
            break
        if sup_morphism(quantale_union([f, g])) != pointwise_join(
            [sup_morphism(f), sup_morphism(g)]
        ):
            w = (f"union sample {i}",)
            break
        if not is_transition_map(quantale_compose(f, g)).ok:
            w = (f"compose closure sample {i}",)
            break
        if not is_transition_map(quantale_union([f, g])).ok:
            w = (f"union closure sample {i}",)
            break
    checks.append(LawCheck("morphism-random-pairs", w is None, w))

    w = None
    for i in range(args.join_maps):
        f = random_join_map(lat, rng)
        if sup_morphism(lift_join_map(f)) != f:
            w = (f"sample {i}",)
            break
    checks.append(LawCheck("surjectivity-lift-section", w is None, w))

    def branch_sound(a):
        if a == "0":
            return None
        f, ao = measurements[a], lat.ortho(a)
        for b in lat.nonzero():
            for c in f.singleton(b):
                if not (lat.leq(c, a) or lat.leq(c, ao)):
                    return (a, b, c)
        return None

    failures = [r for r in _sweep(branch_sound, lat.elements, args.workers) if r]
    checks.append(LawCheck("branch-soundness", not failures, failures[0] if failures else None))

    w = None
    for a in lat.nonzero():
        f = measurements[a]
        for b in lat.nonzero():
            if not lat.compatible(a, b):
                continue
            img = f.singleton(b)
            if not all(lat.leq(c, b) for c in img) or lat.join_set(img) != b:
                w = (a, b)
                break
        if w:
            break
    checks.append(LawCheck("compatibility-preservation", w is None, w))

    return _emit_report(args, "quantale verify", checks)


def _cmd_counterexample_order(args) -> int:
    lat = _load_lattice(args.lattice)
    witness = find_order_counterexample(lat)
    if witness is None:
        print("none")
        checks = [LawCheck("counterexample-search", True, None)]
        return _emit_report(args, "counterexample order", checks, {"witness": None})
    ok = witness.recheck(lat)
    print(
        f"witness: element={witness.element} other={witness.other} "
        f"argument={witness.argument} images=({witness.images[0]}, {witness.images[1]})"
    )
    checks = [
        LawCheck(
            "witness-recheck",
            ok,
            None if ok else (witness.element, witness.other),
        )
    ]
    extra = {
        "witness": {
            "element": witness.element,
            "other": witness.other,
            "argument": witness.argument,
            "images": list(witness.images),
        }
    }
    return _emit_report(args, "counterexample order", checks, extra)


def _cmd_prop1(args) -> int:
    lat = _load_lattice(args.lattice)
    report = measurement_map_identities(lat)
    return _emit_report(args, "prop1", list(report.checks))


def _prove(args, composed: bool) -> int:
    lat = _load_lattice(args.lattice)
    try:
        if composed:
            d = derive_composed(lat, args.actual, args.measure, args.then)
        else:
            d = derive_measurement(lat, args.actual, args.measure)
    except (GuardViolation, ValueError) as err:
        raise _Exit(CHECK_FAILED, str(err))
    verdict = check_derivation(lat, d)
    if not verdict.valid:
        raise _Exit(CHECK_FAILED, f"built derivation failed self-check: {verdict.failure}")
    render = pretty_sequent if args.unicode else ascii_sequent
    print(render(d.conclusion))
    if args.output:
        Path(args.output).write_text(serialize(d))
    return OK


def _cmd_prove_measurement(args) -> int:
    return _prove(args, composed=False)


def _cmd_prove_composed(args) -> int:
    return _prove(args, composed=True)


def _load_derivation(args, lat):
    try:
        return parse_derivation(Path(args.derivation).read_text(), lat)
    except OSError as err:
        raise _Exit(USAGE_ERROR, f"cannot read {args.derivation}: {err}")
    except ParseError as err:
        raise _Exit(USAGE_ERROR, f"{args.derivation}: {err}")


def _cmd_check(args) -> int:
    lat = _load_lattice(args.lattice)
    maps = _load_registry(lat, args.register)
    d = _load_derivation(args, lat)
    verdict = check_derivation(lat, d, maps)
    if verdict.valid:
        checks = [LawCheck("derivation-valid", True, None)]
    else:
        f = verdict.failure
        print(f"invalid at node {list(f.path)} ({f.rule}): {f.reason}")
        checks = [LawCheck("derivation-valid", False, (f.rule, f.reason))]
    return _emit_report(args, "check", checks)


def _cmd_axiom_instantiate(args) -> int:
    lat = _load_lattice(args.lattice)
    maps = _load_registry(lat, args.register)
    bindings = {}
    for item in args.bind:
        if "=" not in item:
            raise _Exit(USAGE_ERROR, f"bindings look like var=element, got {item!r}")
        k, v = item.split("=", 1)
        bindings[k] = v
    try:
        seq = instantiate_axiom(lat, args.schema, bindings, maps, unfold=args.unfold)
    except UnknownSchemaError as err:
        raise _Exit(USAGE_ERROR, str(err))
    except (GuardViolation, LatticeError, ValueError) as err:
        raise _Exit(CHECK_FAILED, f"guard failure: {err}")
    render = pretty_sequent if args.unicode else ascii_sequent
    print(render(seq))
    return OK


def _cmd_crosscheck(args) -> int:
    lat = _load_lattice(args.lattice)
    maps = _load_registry(lat, args.register)
    d = _load_derivation(args, lat)
    result = semantic_crosscheck(lat, d, maps)
    if result.ok:
        print(
            f"agree ({result.shape}): branches {_format_set(result.found, lat)} "
            f"match the propagated actuality set"
        )
    else:
        reason = result.reason or (
            f"branches {_format_set(result.found, lat)} != "
            f"propagated {_format_set(result.expected, lat)}"
        )
        print(f"disagree: {reason}")
    checks = [
        LawCheck(
            "logic-algebra-agreement",
            result.ok,
            None if result.ok else (result.reason or "branch sets differ",),
        )
    ]
    extra = {
        "shape": result.shape,
        "expected": sorted(result.expected, key=lat.index) if result.expected else None,
        "found": sorted(result.found, key=lat.index) if result.found else None,
    }
    return _emit_report(args, "crosscheck", checks, extra)


# -- argument wiring ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omlogic",
        description="Verify orthomodular property lattices, propagation maps, "
        "and measurement derivations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False, workers=False):
        p.add_argument("--json", metavar="PATH", help="write a structured report")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="seed for all sampling")
        if workers:
            p.add_argument(
                "--workers", type=int, default=1,
                help="parallelize exhaustive sweeps (results are worker-independent)",
            )

    lattice = sub.add_parser("lattice", help="generate and verify lattices")
    lattice_sub = lattice.add_subparsers(dest="subcommand", required=True)
    p = lattice_sub.add_parser("gen", help="generate a lattice family")
    p.add_argument("--family", required=True, choices=["boolean", "mo", "hexagon"])
    p.add_argument("--n", type=int, help="family size parameter")
    p.add_argument("--names", help="comma-separated atom names")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=_cmd_lattice_gen)
    p = lattice_sub.add_parser("verify", help="check every lattice law")
    p.add_argument("lattice_file")
    common(p)
    p.set_defaults(func=_cmd_lattice_verify)

    p = sub.add_parser("propagate", help="apply a propagation map to a set")
    p.add_argument("--lattice", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--measure", help="measured element (two-outcome map)")
    source.add_argument("--map", help="map file")
    p.add_argument("--set", required=True, help="initial actuality set, e.g. '{b}'")
    p.add_argument("--unicode", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_propagate)

    quantale = sub.add_parser("quantale", help="verify the transition-map algebra")
    quantale_sub = quantale.add_subparsers(dest="subcommand", required=True)
    p = quantale_sub.add_parser("verify")
    p.add_argument("--lattice", required=True)
    p.add_argument("--random-maps", type=int, default=200)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--join-maps", type=int, default=100)
    common(p, seed=True, workers=True)
    p.set_defaults(func=_cmd_quantale_verify)

    counter = sub.add_parser("counterexample", help="order-preservation searches")
    counter_sub = counter.add_subparsers(dest="subcommand", required=True)
    p = counter_sub.add_parser("order")
    p.add_argument("--lattice", required=True)
    common(p)
    p.set_defaults(func=_cmd_counterexample_order)

    p = sub.add_parser("prop1", help="measurement-map identities")
    p.add_argument("--lattice", required=True)
    common(p)
    p.set_defaults(func=_cmd_prop1)

    prove = sub.add_parser("prove", help="build checked derivations")
    prove_sub = prove.add_subparsers(dest="subcommand", required=True)
    p = prove_sub.add_parser("measurement")
    p.add_argument("--lattice", required=True)
    p.add_argument("--actual", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("-o", "--output", help="derivation file")
    p.add_argument("--unicode", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_prove_measurement)
    p = prove_sub.add_parser("composed")
    p.add_argument("--lattice", required=True)
    p.add_argument("--actual", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--then", required=True)
    p.add_argument("-o", "--output", help="derivation file")
    p.add_argument("--unicode", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_prove_composed)

    p = sub.add_parser("check", help="validate a derivation file")
    p.add_argument("derivation")
    p.add_argument("--lattice", required=True)
    p.add_argument("--register", action="append", default=[], help="map file for IND names")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("axiom", help="axiom schemas")
    axiom_sub = p.add_subparsers(dest="subcommand", required=True)
    p = axiom_sub.add_parser("instantiate")
    p.add_argument("--lattice", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--bind", action="append", default=[], help="var=element")
    p.add_argument("--register", action="append", default=[], help="map file for alpha bindings")
    p.add_argument("--unfold", action="store_true")
    p.add_argument("--unicode", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_axiom_instantiate)

    p = sub.add_parser("crosscheck", help="compare a derivation with the algebra")
    p.add_argument("derivation")
    p.add_argument("--lattice", required=True)
    p.add_argument("--register", action="append", default=[])
    common(p)
    p.set_defaults(func=_cmd_crosscheck)

    return parser


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else OK
    try:
        return args.func(args)
    except _Exit as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code
    except NotOrthomodularError as err:
        print(str(err), file=sys.stderr)
        return CHECK_FAILED
    except (ParseError, UnknownElementError, LatticeError) as err:
        print(str(err), file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
