"""Reduction sequences: evaluating a formula on a sum by parts.

Given a formula over the union vocabulary (components' vocabulary plus the
left marker) and a split of its free variables into left and right, the
decomposition produces two lists of factor formulas -- each to be evaluated on
one component with the component's share of the variables -- and a monotone
propositional formula over the factor outcomes.  The marked disjoint union
satisfies the original formula iff the propositional formula evaluates to true
under the factor truth values.  Sum-like operations reduce to this case by
first rewriting the formula through the operation's interpretation.

Quantified formulas are kept in *pair normal form*: for an existential-side
formula, beta is a disjunction of conjunctions Var(i,1) & Var(i,2), one
conjunct pair per factor index; dually a universal-side formula gets a
conjunction of disjunction pairs.  The quantifier cases peel one binder,
decompose the body twice (bound variable sent left, sent right), and stitch
the two views together; connective cases renormalize with a DNF/CNF
distribution over the selector formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ValidationError
from .formula import (And, Bot, Exists, Forall, Formula, Literal, Or, Top,
                      TOP, BOT, Vocabulary, alpha_normalize, formula_size,
                      free_variables, is_quantifier_free, parse_formula,
                      print_formula)
from .interp import SumLikeOp, transform_formula
from .modelcheck import EvalCache
from .structure import MARK, Structure

# Observed growth factor: for a formula of quantifier depth n and size s the
# produced reduction stays within tower(n, SIZE_BOUND_FACTOR * (n + 1) * s)
# total size (tower(0, b) = b).  The binding case is quantifier-free input,
# where the reduction is a constant-factor rewrite of the formula.
SIZE_BOUND_FACTOR = 4


# ---------------------------------------------------------------------------
# Propositional formulas over factor variables


@dataclass(frozen=True)
class PVar:
    """Truth of factor ``index`` of delta-``side`` (side 1 = left)."""

    index: int
    side: int

    def __post_init__(self) -> None:
        if self.side not in (1, 2) or self.index < 0:
            raise ValidationError(f"bad factor variable ({self.index}, {self.side})")


@dataclass(frozen=True)
class PTop:
    pass


@dataclass(frozen=True)
class PBot:
    pass


@dataclass(frozen=True)
class PAnd:
    children: tuple["PropFormula", ...]


@dataclass(frozen=True)
class POr:
    children: tuple["PropFormula", ...]


PropFormula = Union[PVar, PTop, PBot, PAnd, POr]

P_TOP = PTop()
P_BOT = PBot()


def prop_size(p: PropFormula) -> int:
    if isinstance(p, (PVar, PTop, PBot)):
        return 1
    return 1 + sum(prop_size(c) for c in p.children)


def prop_vars(p: PropFormula) -> set[tuple[int, int]]:
    if isinstance(p, PVar):
        return {(p.index, p.side)}
    if isinstance(p, (PTop, PBot)):
        return set()
    out: set[tuple[int, int]] = set()
    for c in p.children:
        out |= prop_vars(c)
    return out


def eval_prop(p: PropFormula, zeta) -> bool:
    """Evaluate under zeta: (index, side) -> bool."""
    if isinstance(p, PTop):
        return True
    if isinstance(p, PBot):
        return False
    if isinstance(p, PVar):
        return bool(zeta(p.index, p.side))
    if isinstance(p, PAnd):
        return all(eval_prop(c, zeta) for c in p.children)
    return any(eval_prop(c, zeta) for c in p.children)


def prop_to_json(p: PropFormula) -> dict:
    if isinstance(p, PTop):
        return {"const": True}
    if isinstance(p, PBot):
        return {"const": False}
    if isinstance(p, PVar):
        return {"var": [p.index, p.side]}
    key = "and" if isinstance(p, PAnd) else "or"
    return {key: [prop_to_json(c) for c in p.children]}


def prop_from_json(data: dict) -> PropFormula:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValidationError(f"bad propositional formula JSON: {data!r}")
    (key, value), = data.items()
    if key == "const":
        return P_TOP if value else P_BOT
    if key == "var":
        index, side = value
        return PVar(int(index), int(side))
    if key in ("and", "or"):
        ctor = PAnd if key == "and" else POr
        return ctor(tuple(prop_from_json(c) for c in value))
    raise ValidationError(f"bad propositional formula JSON key: {key!r}")


# ---------------------------------------------------------------------------
# Reduction sequences


@dataclass(frozen=True)
class VarPartition:
    """Disjoint left/right variable lists covering the formula's free
    variables; positions fix how evaluation tuples are read."""

    left: tuple[str, ...]
    right: tuple[str, ...]

    def __post_init__(self) -> None:
        names = self.left + self.right
        if len(set(names)) != len(names):
            raise ValidationError("left/right variable lists overlap")

    def side_of(self) -> dict[str, int]:
        sides = {v: 1 for v in self.left}
        sides.update({v: 2 for v in self.right})
        return sides


@dataclass(frozen=True)
class ReductionSequence:
    delta1: tuple[Formula, ...]
    delta2: tuple[Formula, ...]
    beta: PropFormula
    partition: VarPartition
    vocab: Vocabulary

    def __post_init__(self) -> None:
        for index, side in prop_vars(self.beta):
            bank = self.delta1 if side == 1 else self.delta2
            if index >= len(bank):
                raise ValidationError(
                    f"beta references factor ({index}, {side}) beyond delta{side}")


@dataclass(frozen=True)
class DecomposeOptions:
    simplify: bool = False
    memoize: bool = True


def reduction_stats(d: ReductionSequence) -> dict:
    total = (sum(formula_size(f) for f in d.delta1)
             + sum(formula_size(f) for f in d.delta2)
             + prop_size(d.beta))
    return {
        "total_size": total,
        "factor_count_1": len(d.delta1),
        "factor_count_2": len(d.delta2),
        "beta_size": prop_size(d.beta),
    }


def reduction_to_json(d: ReductionSequence) -> dict:
    return {
        "delta1": [print_formula(f) for f in d.delta1],
        "delta2": [print_formula(f) for f in d.delta2],
        "beta": prop_to_json(d.beta),
        "partition": {"left": list(d.partition.left),
                      "right": list(d.partition.right)},
        "vocabulary": {name: ar for name, ar in d.vocab.relations.items()},
        "stats": reduction_stats(d),
    }


def reduction_from_json(data: dict) -> ReductionSequence:
    vocab = Vocabulary(dict(data["vocabulary"]))
    return ReductionSequence(
        delta1=tuple(parse_formula(t, vocab) for t in data["delta1"]),
        delta2=tuple(parse_formula(t, vocab) for t in data["delta2"]),
        beta=prop_from_json(data["beta"]),
        partition=VarPartition(tuple(data["partition"]["left"]),
                               tuple(data["partition"]["right"])),
        vocab=vocab,
    )


# ---------------------------------------------------------------------------
# Pair normal form

SIGMA = "sigma"
PI = "pi"


_Block = tuple[tuple[Formula, ...], tuple[Formula, ...]]


def _prune(blocks: list[_Block]) -> list[_Block]:
    """Absorption: drop any block whose per-side picks contain some other
    block's picks -- a superset conjunction is redundant inside a
    disjunction, and dually for clauses.  Equal pick sets in different
    orders keep the first occurrence, so block order stays stable."""
    if len(blocks) < 2:
        return blocks
    sets = [(frozenset(l), frozenset(r)) for l, r in blocks]
    out = []
    for i, (li, ri) in enumerate(sets):
        dominated = False
        for j, (lj, rj) in enumerate(sets):
            if j == i:
                continue
            if lj <= li and rj <= ri and ((lj, rj) != (li, ri) or j < i):
                dominated = True
                break
        if not dominated:
            out.append(blocks[i])
    return out


def _distribute(p: PropFormula, delta1: tuple[Formula, ...],
                delta2: tuple[Formula, ...], mode: str) -> list[_Block]:
    """Blocks of the requested normal form, as the picked factor formulas
    per side.

    Sigma: the disjuncts of a DNF of beta; a block's picks form a
    conjunction, so ``true`` factors fold away, a ``false`` factor kills its
    disjunct, repeated picks collapse, and absorbed blocks are pruned.  Pi
    is the clause-wise dual.  Blocks come out leftmost-most-significant
    with duplicates removed; folding and pruning keep the distribution's
    intermediate size proportional to the number of *surviving* blocks
    rather than to 2^(variables).
    """
    conj = mode == SIGMA
    neutral_t = Top if conj else Bot
    absorb_t = Bot if conj else Top

    def add(state: _Block, var: PVar):
        g = (delta1 if var.side == 1 else delta2)[var.index]
        if isinstance(g, neutral_t):
            return state
        if isinstance(g, absorb_t):
            return None
        left, right = state
        if var.side == 1:
            return state if g in left else (left + (g,), right)
        return state if g in right else (left, right + (g,))

    def combine(s: _Block, t: _Block) -> _Block:
        left = list(s[0])
        right = list(s[1])
        left.extend(g for g in t[0] if g not in left)
        right.extend(g for g in t[1] if g not in right)
        return tuple(left), tuple(right)

    unit_t = PTop if conj else PBot      # one empty block
    void_t = PBot if conj else PTop      # no blocks at all
    spread_t = POr if conj else PAnd     # blocks accumulate across children
    empty: _Block = ((), ())

    def rec(q: PropFormula) -> list[_Block]:
        if isinstance(q, PVar):
            st = add(empty, q)
            return [st] if st is not None else []
        if isinstance(q, unit_t):
            return [empty]
        if isinstance(q, void_t):
            return []
        if isinstance(q, spread_t):
            seen: dict[_Block, None] = {}
            for c in q.children:
                for st in rec(c):
                    seen.setdefault(st)
            return _prune(list(seen))
        acc: list[_Block] = [empty]
        for c in q.children:
            parts = rec(c)
            nxt: dict[_Block, None] = {}
            for s in acc:
                for t in parts:
                    nxt.setdefault(combine(s, t))
            acc = _prune(list(nxt))
            if not acc:
                break
        return acc

    seen: dict[_Block, None] = {}
    for st in rec(p):
        seen.setdefault(st)
    return _prune(list(seen))


def _build_factor(picked: tuple[Formula, ...], mode: str) -> Formula:
    if not picked:
        return TOP if mode == SIGMA else BOT
    if len(picked) == 1:
        return picked[0]
    return And(picked) if mode == SIGMA else Or(picked)


def _pair_beta(count: int, mode: str) -> PropFormula:
    pair = PAnd if mode == SIGMA else POr
    blocks = tuple(pair((PVar(i, 1), PVar(i, 2))) for i in range(count))
    if count == 1:
        return blocks[0]
    return POr(blocks) if mode == SIGMA else PAnd(blocks)


def normalize_pairs(d: ReductionSequence, mode: str) -> ReductionSequence:
    """Renormalize into pair normal form.

    Sigma: beta becomes a disjunction of Var(i,1) & Var(i,2) conjunctions,
    with factor i the conjunction of the old factors selected on that side
    and an empty selection giving "true"; Pi is the dual (conjunction of
    disjunction pairs, empty selection "false").  Idempotent on pair-form
    input.  A single block stays a bare pair, matching the atomic base case.
    """
    if mode not in (SIGMA, PI):
        raise ValidationError(f"mode must be {SIGMA!r} or {PI!r}")
    blocks = _distribute(d.beta, d.delta1, d.delta2, mode)
    delta1 = tuple(_build_factor(left, mode) for left, _ in blocks)
    delta2 = tuple(_build_factor(right, mode) for _, right in blocks)
    return ReductionSequence(delta1, delta2, _pair_beta(len(blocks), mode),
                             d.partition, d.vocab)


def _in_pair_form(d: ReductionSequence, mode: str) -> bool:
    outer_t, pair_t = (POr, PAnd) if mode == SIGMA else (PAnd, POr)
    count = len(d.delta1)
    if len(d.delta2) != count:
        return False
    if count == 1 and isinstance(d.beta, pair_t):
        blocks: tuple = (d.beta,)
    elif isinstance(d.beta, outer_t):
        blocks = d.beta.children
        if len(blocks) != count:
            return False
    else:
        return False
    for i, c in enumerate(blocks):
        if not isinstance(c, pair_t) or len(c.children) != 2:
            return False
        a, b = c.children
        if not (isinstance(a, PVar) and a == PVar(i, 1)
                and isinstance(b, PVar) and b == PVar(i, 2)):
            return False
    return True


# ---------------------------------------------------------------------------
# The decomposition itself


def decompose(f: Formula, partition: VarPartition,
              options: DecomposeOptions = DecomposeOptions()) -> ReductionSequence:
    """Decompose f (over the union vocabulary, marker included) with respect
    to the marked disjoint union.

    Factors are over the vocabulary *without* the marker: marker literals are
    resolved into constants by the side split.  Quantified results are in
    pair normal form for the side matching the root (existential roots and
    conjunctions of quantified parts give the Sigma form, dually for Pi).
    """
    f = alpha_normalize(f)
    sides = partition.side_of()
    missing = [v for v in free_variables(f) if v not in sides]
    if missing:
        raise ValidationError(f"partition does not cover free variables {missing}")
    engine = _Engine(sides, options)
    delta1, delta2, beta = engine.run(f)
    component_vocab = Vocabulary(
        {name: ar for name, ar in _collect_vocab(f).items() if name != MARK})
    d = ReductionSequence(delta1, delta2, beta, partition, component_vocab)
    if options.simplify:
        d = simplify_reduction(d)
    return d


def _collect_vocab(f: Formula) -> dict[str, int]:
    from .formula import subformulas
    out: dict[str, int] = {}
    for g in subformulas(f):
        if isinstance(g, Literal) and g.relation != "=":
            if out.get(g.relation, len(g.args)) != len(g.args):
                raise ValidationError(
                    f"relation {g.relation!r} used with inconsistent arities")
            out[g.relation] = len(g.args)
    return out


def decompose_over_op(f: Formula, op: SumLikeOp, partition: VarPartition,
                      options: DecomposeOptions = DecomposeOptions()
                      ) -> ReductionSequence:
    """Decompose with respect to a sum-like operation: rewrite through the
    operation's interpretation, then decompose over the marked union."""
    return decompose(transform_formula(op.interp, f), partition, options)


_Triple = tuple[tuple[Formula, ...], tuple[Formula, ...], PropFormula]


class _Engine:
    def __init__(self, sides: dict[str, int], options: DecomposeOptions):
        self.sides = dict(sides)
        self.options = options
        self._memo: dict[tuple, ReductionSequence] = {}
        self._fv: dict[int, tuple[str, ...]] = {}
        self._pin: list[Formula] = []

    def run(self, f: Formula) -> _Triple:
        d = self._rec(f)
        return d.delta1, d.delta2, d.beta

    def _free(self, f: Formula) -> tuple[str, ...]:
        fv = self._fv.get(id(f))
        if fv is None:
            fv = free_variables(f)
            self._fv[id(f)] = fv
            self._pin.append(f)
        return fv

    def _rec(self, f: Formula) -> ReductionSequence:
        key = None
        if self.options.memoize:
            key = (id(f), tuple(self.sides[v] for v in self._free(f)))
            hit = self._memo.get(key)
            if hit is not None:
                return hit
        out = self._build(f)
        if key is not None:
            self._memo[key] = out
        return out

    def _mk(self, delta1, delta2, beta) -> ReductionSequence:
        # partition/vocab are irrelevant during recursion; patched at the top.
        return ReductionSequence(tuple(delta1), tuple(delta2), beta,
                                 VarPartition((), ()), Vocabulary({}))

    def _build(self, f: Formula) -> ReductionSequence:
        if isinstance(f, Top):
            return self._mk((), (), P_TOP)
        if isinstance(f, Bot):
            return self._mk((), (), P_BOT)
        if isinstance(f, Literal):
            return self._literal(f)
        if isinstance(f, (And, Or)):
            if is_quantifier_free(f):
                return self._connective_qf(f)
            return self._connective(f)
        if isinstance(f, Exists):
            return self._quantifier(f, SIGMA)
        return self._quantifier(f, PI)

    def _literal(self, f: Literal) -> ReductionSequence:
        if f.relation == MARK:
            on_left = self.sides[f.args[0]] == 1
            return self._mk((), (), P_TOP if on_left == f.positive else P_BOT)
        arg_sides = {self.sides[a] for a in f.args}
        if len(arg_sides) == 2:
            # atoms never hold across the components; equality neither
            return self._mk((), (), P_BOT if f.positive else P_TOP)
        if arg_sides == {1}:
            return self._mk((f,), (TOP,),
                            PAnd((PVar(0, 1), PVar(0, 2))))
        return self._mk((TOP,), (f,), PAnd((PVar(0, 1), PVar(0, 2))))

    def _connective_qf(self, f: Union[And, Or]) -> ReductionSequence:
        parts = [self._rec(c) for c in f.children]
        delta1, delta2, betas = self._concat(parts)
        ctor = PAnd if isinstance(f, And) else POr
        return self._mk(delta1, delta2, ctor(tuple(betas)))

    def _connective(self, f: Union[And, Or]) -> ReductionSequence:
        # Conjunction at a quantified level: children renormalized to the
        # universal pair form, combined, then the Sigma form is restored
        # (dually for disjunction).
        inner_mode = PI if isinstance(f, And) else SIGMA
        parts = [normalize_pairs(self._rec(c), inner_mode) for c in f.children]
        delta1, delta2, betas = self._concat(parts)
        ctor = PAnd if isinstance(f, And) else POr
        combined = self._mk(delta1, delta2, ctor(tuple(betas)))
        out_mode = SIGMA if isinstance(f, And) else PI
        return normalize_pairs(combined, out_mode)

    def _concat(self, parts: list[ReductionSequence]):
        delta1: list[Formula] = []
        delta2: list[Formula] = []
        betas: list[PropFormula] = []
        for part in parts:
            shift1, shift2 = len(delta1), len(delta2)
            delta1.extend(part.delta1)
            delta2.extend(part.delta2)
            betas.append(_shift(part.beta, shift1, shift2))
        return delta1, delta2, betas

    def _quantifier(self, f: Union[Exists, Forall], mode: str) -> ReductionSequence:
        var, body = f.var, f.body
        views = []
        for side in (1, 2):
            self.sides[var] = side
            views.append(normalize_pairs(self._rec(body), mode))
        del self.sides[var]
        kind = Exists if mode == SIGMA else Forall
        delta1: list[Formula] = []
        delta2: list[Formula] = []
        for view, side in zip(views, (1, 2)):
            for f1, f2 in zip(view.delta1, view.delta2):
                delta1.append(kind(var, f1) if side == 1 else f1)
                delta2.append(f2 if side == 1 else kind(var, f2))
        return self._mk(delta1, delta2, _pair_beta(len(delta1), mode))


def _shift(p: PropFormula, by1: int, by2: int) -> PropFormula:
    if isinstance(p, PVar):
        return PVar(p.index + (by1 if p.side == 1 else by2), p.side)
    if isinstance(p, (PTop, PBot)):
        return p
    return type(p)(tuple(_shift(c, by1, by2) for c in p.children))


# ---------------------------------------------------------------------------
# Evaluation and simplification


def eval_reduction(d: ReductionSequence, a: Structure, b: Structure,
                   a_tuple: tuple[str, ...] = (),
                   b_tuple: tuple[str, ...] = ()) -> bool:
    """Evaluate the reduction on a pair of component structures.

    The factor truth values are computed by model checking each factor on its
    component under the partition's share of the tuples, then beta decides.
    """
    if len(a_tuple) != len(d.partition.left) or len(b_tuple) != len(d.partition.right):
        raise ValidationError("tuple lengths do not match the partition")
    asg1 = dict(zip(d.partition.left, a_tuple))
    asg2 = dict(zip(d.partition.right, b_tuple))
    cache1, cache2 = EvalCache(a), EvalCache(b)
    memo: dict[tuple[int, int], bool] = {}

    # factors are checked on demand so that beta's short-circuiting carries
    # over to the (potentially much larger) factor lists
    def zeta(i: int, s: int) -> bool:
        key = (i, s)
        if key not in memo:
            g = (d.delta1 if s == 1 else d.delta2)[i]
            asg = asg1 if s == 1 else asg2
            cache = cache1 if s == 1 else cache2
            memo[key] = cache.evaluate(g, {v: asg[v] for v in free_variables(g)})
        return memo[key]

    return eval_prop(d.beta, zeta)


def simplify_reduction(d: ReductionSequence) -> ReductionSequence:
    """Semantics-preserving cleanup.

    On pair-form reductions: deduplicate factor pairs and drop pairs that can
    never matter (a ``false`` factor in a conjunctive pair, a ``true`` factor
    in a disjunctive pair).  Always: constant-fold beta and drop factors no
    longer referenced.  Pair normal form and factor classification bounds are
    preserved.
    """
    pairs_mode = None
    if _in_pair_form(d, SIGMA):
        pairs_mode = SIGMA
    elif _in_pair_form(d, PI):
        pairs_mode = PI
    if pairs_mode is not None:
        drop = BOT if pairs_mode == SIGMA else TOP
        kept: list[tuple[Formula, Formula]] = []
        seen = set()
        for f1, f2 in zip(d.delta1, d.delta2):
            if f1 == drop or f2 == drop:
                continue
            if (f1, f2) in seen:
                continue
            seen.add((f1, f2))
            kept.append((f1, f2))
        beta = _fold(_pair_beta(len(kept), pairs_mode))
        return ReductionSequence(tuple(p[0] for p in kept),
                                 tuple(p[1] for p in kept),
                                 beta, d.partition, d.vocab)
    beta = _fold(d.beta)
    used = prop_vars(beta)
    keep1 = [i for i in range(len(d.delta1)) if (i, 1) in used]
    keep2 = [i for i in range(len(d.delta2)) if (i, 2) in used]
    remap1 = {old: new for new, old in enumerate(keep1)}
    remap2 = {old: new for new, old in enumerate(keep2)}
    beta = _renumber(beta, remap1, remap2)
    return ReductionSequence(tuple(d.delta1[i] for i in keep1),
                             tuple(d.delta2[i] for i in keep2),
                             beta, d.partition, d.vocab)


def _fold(p: PropFormula) -> PropFormula:
    if isinstance(p, (PVar, PTop, PBot)):
        return p
    children = [_fold(c) for c in p.children]
    if isinstance(p, PAnd):
        if any(isinstance(c, PBot) for c in children):
            return P_BOT
        children = [c for c in children if not isinstance(c, PTop)]
        if not children:
            return P_TOP
        if len(children) == 1:
            return children[0]
        return PAnd(tuple(children))
    if any(isinstance(c, PTop) for c in children):
        return P_TOP
    children = [c for c in children if not isinstance(c, PBot)]
    if not children:
        return P_BOT
    if len(children) == 1:
        return children[0]
    return POr(tuple(children))


def _renumber(p: PropFormula, remap1: dict[int, int],
              remap2: dict[int, int]) -> PropFormula:
    if isinstance(p, PVar):
        remap = remap1 if p.side == 1 else remap2
        return PVar(remap[p.index], p.side)
    if isinstance(p, (PTop, PBot)):
        return p
    return type(p)(tuple(_renumber(c, remap1, remap2) for c in p.children))
