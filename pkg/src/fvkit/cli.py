"""Command-line front end.

Subcommands tie the library into reproducible shell commands: classify,
decompose, transform, eval, check-decomposition, game, enumerate,
count-check, bench.  Exit codes: 0 success / property holds, 1 property
violation (counterexample printed as JSON), 2 usage or input error, 3 cap or
budget exceeded (inconclusive).  All randomized commands are seeded and every
iteration order is fixed, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
import time

from .decompose import (DecomposeOptions, VarPartition, decompose,
                        decompose_over_op, eval_reduction, reduction_stats,
                        reduction_to_json)
from .efgame import GameConfig, prefix_game_winner, tree_prefix_game_winner
from .enumeration import (EnumerationCaps, TestBed, count_bound_check,
                          enumerate_classes)
from .errors import BudgetExceeded, CapExceeded, FvError, ParseError, \
    ValidationError
from .formula import (Vocabulary, classify, formula_size, free_variables,
                      parse_formula, print_formula, random_formula,
                      vocabulary_from_json)
from .interp import (SumLikeOp, apply_sum_like, builtin, load_interpretation,
                     transform_formula)
from .modelcheck import assignment_from_json, evaluate
from .structure import Structure, load_structure, structure_to_json


def _load_vocab(spec: str) -> Vocabulary:
    """Vocabulary from inline JSON (tried first) or a file path."""
    try:
        data = json.loads(spec)
    except json.JSONDecodeError:
        with open(spec) as fh:
            data = json.load(fh)
    return vocabulary_from_json(data)


def _split_csv(spec: str | None) -> tuple[str, ...]:
    if not spec:
        return ()
    return tuple(part for part in spec.split(",") if part)


def _resolve_op(spec: str, vocab_hint: Vocabulary | None = None) -> SumLikeOp:
    """Builtin operation by name; nlc-sum takes its parameters from a file
    (``nlc-sum:params.json``).  When structures are at hand their vocabulary
    parameterizes the pass-through operations."""
    if spec.startswith("nlc-sum:"):
        with open(spec.split(":", 1)[1]) as fh:
            return builtin("nlc-sum", json.load(fh))
    if spec == "nlc-sum":
        raise ValidationError("nlc-sum needs a parameter file: nlc-sum:<file>")
    params = None
    if vocab_hint is not None:
        rels = dict(vocab_hint.relations)
        if spec == "disjoint-union":
            params = {"vocabulary": rels}
        elif spec == "ordered-sum":
            rels.pop("<=", None)
            params = {"extra": rels}
    return builtin(spec, params)


def _load_structure_dir(path: str) -> tuple[Structure, ...]:
    names = sorted(n for n in os.listdir(path) if n.endswith(".json"))
    if not names:
        raise ValidationError(f"no .json structures under {path!r}")
    return tuple(load_structure(os.path.join(path, n)) for n in names)


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_classify(args) -> int:
    vocab = _load_vocab(args.vocab)
    c = classify(parse_formula(args.formula, vocab))
    print(json.dumps({"sigma_level": c.sigma_level, "pi_level": c.pi_level,
                      "rank": c.rank, "block_uniform_k": c.block_uniform_k}))
    return 0


def _cmd_decompose(args) -> int:
    partition = VarPartition(_split_csv(args.left), _split_csv(args.right))
    options = DecomposeOptions(simplify=args.simplify)
    if args.op and args.interp:
        raise ValidationError("--op and --interp are mutually exclusive")
    if args.op or args.interp:
        op = _resolve_op(args.op) if args.op else \
            SumLikeOp("custom", load_interpretation(args.interp))
        f = parse_formula(args.formula, op.interp.target_vocab)
        d = decompose_over_op(f, op, partition, options)
    else:
        if not args.vocab:
            raise ValidationError("--vocab is required without --op/--interp")
        f = parse_formula(args.formula, _load_vocab(args.vocab))
        d = decompose(f, partition, options)
    text = json.dumps(reduction_to_json(d), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_transform(args) -> int:
    xi = load_interpretation(args.interp)
    f = parse_formula(args.formula, xi.target_vocab)
    print(print_formula(transform_formula(xi, f)))
    return 0


def _cmd_eval(args) -> int:
    structures = [load_structure(p) for p in args.structure]
    if len(structures) == 2:
        if not args.op:
            raise ValidationError("an --op is required with two structures")
        op = _resolve_op(args.op, structures[0].vocab)
        model = apply_sum_like(op, structures[0], structures[1])
    elif len(structures) == 1:
        if args.op:
            raise ValidationError("--op needs two --structure files")
        model = structures[0]
    else:
        raise ValidationError("pass one or two --structure files")
    f = parse_formula(args.formula, model.vocab)
    asg = {}
    if args.assign:
        with open(args.assign) as fh:
            asg = assignment_from_json(json.load(fh))
    print("true" if evaluate(model, f, asg) else "false")
    return 0


def _cmd_game(args) -> int:
    config = GameConfig(args.n, args.k)
    a = load_structure(args.left)
    b = load_structure(args.right)
    at = _split_csv(args.left_tuple)
    bt = _split_csv(args.right_tuple)
    if args.mode == "prefix":
        winner = prefix_game_winner(config, a, at, b, bt)
    else:
        winner = tree_prefix_game_winner(config, a, at, b, bt)
    print(winner.value)
    return 0


def _cmd_enumerate(args) -> int:
    bed = TestBed(_load_structure_dir(args.structures), _split_csv(args.vars))
    caps = EnumerationCaps(max_classes=args.max_classes)
    for c in enumerate_classes(args.cls, args.n, args.k, bed, caps):
        print(f"0x{c.bits:x} {print_formula(c.representative)}")
    return 0


def _cmd_count_check(args) -> int:
    vocab = _load_vocab(args.vocab)
    ctx = tuple(f"x{i + 1}" for i in range(args.t))
    bed = TestBed(_load_structure_dir(args.structures), ctx)
    caps = EnumerationCaps(max_classes=args.max_classes)
    result = count_bound_check(args.n, args.m, args.t, vocab, bed, caps)
    print(json.dumps(result))
    return 0 if result["ok"] else 1


# ---------------------------------------------------------------------------
# Randomized decomposition cross-check


def _random_structure(vocab: Vocabulary, size: int, rng) -> Structure:
    universe = tuple(f"e{i + 1}" for i in range(size))
    rels = {}
    for name, arity in vocab.relations.items():
        space = itertools.product(universe, repeat=arity)
        rels[name] = frozenset(t for t in space if rng.random() < 0.5)
    return Structure(vocab, universe, rels)


def _all_structures(vocab: Vocabulary, max_size: int, cap: int):
    total = 0
    for size in range(1, max_size + 1):
        bits = sum(size ** ar for ar in vocab.relations.values())
        total += 2 ** bits
        if total > cap:
            raise CapExceeded(
                "exhaustive structure space too large; use --trials")
    for size in range(1, max_size + 1):
        universe = tuple(f"e{i + 1}" for i in range(size))
        spaces = [(name, list(itertools.product(universe, repeat=ar)))
                  for name, ar in vocab.relations.items()]
        choices = [[frozenset(c) for r in range(len(space) + 1)
                    for c in itertools.combinations(space, r)]
                   for _, space in spaces]
        for combo in itertools.product(*choices):
            rels = {name: chosen
                    for (name, _), chosen in zip(spaces, combo)}
            yield Structure(vocab, universe, rels)


def _merged_assignment(partition: VarPartition, a_tuple, b_tuple) -> dict:
    asg = {v: f"L:{e}" for v, e in zip(partition.left, a_tuple)}
    asg.update({v: f"R:{e}" for v, e in zip(partition.right, b_tuple)})
    return asg


def _check_one(f, d, op, partition, a, b, a_tuple, b_tuple) -> dict | None:
    direct = evaluate(apply_sum_like(op, a, b), f,
                      _merged_assignment(partition, a_tuple, b_tuple))
    reduced = eval_reduction(d, a, b, a_tuple, b_tuple)
    if direct == reduced:
        return None
    return {"formula": print_formula(f),
            "left": structure_to_json(a), "right": structure_to_json(b),
            "left_tuple": list(a_tuple), "right_tuple": list(b_tuple),
            "sum_value": direct, "reduction_value": reduced}


def _parse_random_spec(spec: str) -> tuple[str, int, int]:
    parts = [p.strip() for p in spec.split(",")]
    if not parts or parts[0] not in ("sigma", "pi"):
        raise ValidationError(f"bad --random spec {spec!r}; "
                              "expected e.g. \"sigma,n=2,m=3\"")
    values = {"n": 1, "m": 2}
    for part in parts[1:]:
        key, _, val = part.partition("=")
        if key not in values or not val.isdigit():
            raise ValidationError(f"bad --random component {part!r}")
        values[key] = int(val)
    return parts[0], values["n"], values["m"]


def _cmd_check_decomposition(args) -> int:
    import random

    if bool(args.formula) == bool(args.random):
        raise ValidationError("pass exactly one of --formula / --random")
    op = _resolve_op(args.op)
    vocab = op.interp.target_vocab
    rng = random.Random(args.seed)

    if args.formula:
        f = parse_formula(args.formula, vocab)
        fv = free_variables(f)
        partition = VarPartition(fv[0::2], fv[1::2])
        d = decompose_over_op(f, op, partition)
        if args.trials is None:
            checks = 0
            shapes = list(_all_structures(vocab, args.max_size, cap=2000))
            for a, b in itertools.product(shapes, repeat=2):
                left_space = itertools.product(a.universe,
                                               repeat=len(partition.left))
                for a_tuple in left_space:
                    right_space = itertools.product(
                        b.universe, repeat=len(partition.right))
                    for b_tuple in right_space:
                        checks += 1
                        if checks > 1_000_000:
                            raise CapExceeded(
                                "exhaustive check too large; use --trials")
                        bad = _check_one(f, d, op, partition,
                                         a, b, a_tuple, b_tuple)
                        if bad is not None:
                            print(json.dumps(bad))
                            return 1
            return 0
        for _ in range(args.trials):
            a = _random_structure(vocab, rng.randint(1, args.max_size), rng)
            b = _random_structure(vocab, rng.randint(1, args.max_size), rng)
            a_tuple = tuple(rng.choice(a.universe) for _ in partition.left)
            b_tuple = tuple(rng.choice(b.universe) for _ in partition.right)
            bad = _check_one(f, d, op, partition, a, b, a_tuple, b_tuple)
            if bad is not None:
                print(json.dumps(bad))
                return 1
        return 0

    cls, n, m = _parse_random_spec(args.random)
    trials = args.trials if args.trials is not None else 100
    for trial in range(trials):
        t = trial % 3
        fv = ("v1", "v2")[:t]
        partition = VarPartition(fv[:1], fv[1:2])
        f = random_formula(cls, n, m, vocab, free_vars=fv,
                           seed=rng.randrange(2 ** 30))
        d = decompose_over_op(f, op, partition)
        a = _random_structure(vocab, rng.randint(1, args.max_size), rng)
        b = _random_structure(vocab, rng.randint(1, args.max_size), rng)
        a_tuple = tuple(rng.choice(a.universe) for _ in partition.left)
        b_tuple = tuple(rng.choice(b.universe) for _ in partition.right)
        bad = _check_one(f, d, op, partition, a, b, a_tuple, b_tuple)
        if bad is not None:
            print(json.dumps(bad))
            return 1
    return 0


def _cmd_bench(args) -> int:
    op = _resolve_op(args.op)
    vocab = op.interp.target_vocab
    writer = csv.writer(sys.stdout)
    writer.writerow(["n", "m", "phi_size", "decomp_size", "millis"])
    for mode in ("sigma", "pi"):
        for n in range(args.max_n + 1):
            for m in range(n, args.max_m + 1):
                for trial in range(args.trials):
                    f = random_formula(mode, n, m, vocab,
                                       free_vars=("v1", "v2"),
                                       seed=args.seed + trial)
                    partition = VarPartition(("v1",), ("v2",))
                    start = time.perf_counter()
                    d = decompose_over_op(f, op, partition)
                    millis = (time.perf_counter() - start) * 1000.0
                    writer.writerow([n, m, formula_size(f),
                                     reduction_stats(d)["total_size"],
                                     f"{millis:.3f}"])
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvkit",
        description="Decompositions and prefix games on finite structures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="print a formula's prefix levels")
    p.add_argument("--formula", required=True)
    p.add_argument("--vocab", required=True,
                   help="relation arities as inline JSON or a file path")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("decompose",
                       help="reduction sequence for a formula over a sum")
    p.add_argument("--formula", required=True)
    p.add_argument("--vocab", help="vocabulary when decomposing directly "
                                   "over the marked union")
    p.add_argument("--left", help="comma-separated left-component variables")
    p.add_argument("--right", help="comma-separated right-component variables")
    p.add_argument("--op", help="builtin operation name")
    p.add_argument("--interp", help="interpretation JSON file")
    p.add_argument("--simplify", action="store_true")
    p.add_argument("--out", help="write the reduction JSON here")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("transform",
                       help="rewrite a formula through an interpretation")
    p.add_argument("--interp", required=True)
    p.add_argument("--formula", required=True)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("eval", help="model-check a formula")
    p.add_argument("--structure", action="append", required=True,
                   help="structure JSON file (twice with --op)")
    p.add_argument("--op", help="combine two structures first")
    p.add_argument("--formula", required=True)
    p.add_argument("--assign", help="assignment JSON file")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("check-decomposition",
                       help="cross-check reductions against direct evaluation")
    p.add_argument("--formula")
    p.add_argument("--random", help="generator spec, e.g. \"sigma,n=2,m=3\"")
    p.add_argument("--op", required=True)
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check_decomposition)

    p = sub.add_parser("game", help="solve a prefix or tree-prefix game")
    p.add_argument("--mode", choices=("prefix", "tree"), required=True)
    p.add_argument("--n", type=int, required=True, help="number of rounds")
    p.add_argument("--k", type=int, required=True, help="tuple size per round")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--left-tuple", help="comma-separated starting elements")
    p.add_argument("--right-tuple")
    p.set_defaults(func=_cmd_game)

    p = sub.add_parser("enumerate", help="semantic classes over a test bed")
    p.add_argument("--class", dest="cls", choices=("sigma", "pi"),
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--structures", required=True,
                   help="directory of structure JSON files")
    p.add_argument("--vars", help="comma-separated context variables")
    p.add_argument("--max-classes", type=int, default=200_000)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("count-check",
                       help="class count vs the tower bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--structures", required=True)
    p.add_argument("--max-classes", type=int, default=200_000)
    p.set_defaults(func=_cmd_count_check)

    p = sub.add_parser("bench",
                       help="CSV of reduction statistics over random inputs")
    p.add_argument("--op", default="disjoint-union")
    p.add_argument("--max-n", type=int, default=2)
    p.add_argument("--max-m", type=int, default=3)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    return parser


def run(argv) -> int:
    """Parse and execute; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CapExceeded, BudgetExceeded) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ValidationError, FvError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
