"""Prefix and tree-prefix model-comparison games.

One round of the (rounds, tuple_size) prefix game: Spoiler extends the pebble
tuple on the current left structure by a tuple_size-tuple (repetitions
allowed), Duplicator answers with a tuple on the right structure, and the
sides swap for the next round -- that swap is what matches the quantifier
alternation of block-uniform prefix formulas.  After the last round Duplicator
wins iff the final tuples define a partial isomorphism.

Duplicator wins the *tree* variant iff she wins the prefix game from both
orders of the pair; that mirrors closure of tree-shaped classes under
conjunction, where branches may start with either quantifier.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .errors import BudgetExceeded, ValidationError
from .structure import Structure, is_partial_isomorphism

DEFAULT_POSITION_BUDGET = 10_000_000


class Player(enum.Enum):
    Duplicator = "duplicator"
    Spoiler = "spoiler"


@dataclass(frozen=True)
class GameConfig:
    rounds: int
    tuple_size: int

    def __post_init__(self) -> None:
        if self.rounds < 0:
            raise ValidationError("rounds must be >= 0")
        if self.rounds >= 1 and self.tuple_size < 1:
            raise ValidationError("tuple_size must be >= 1 when rounds >= 1")
        if self.tuple_size < 0:
            raise ValidationError("tuple_size must be >= 0")


def _check_position(a: Structure, a_tuple: tuple[str, ...],
                    b: Structure, b_tuple: tuple[str, ...]) -> None:
    if a.vocab.relations != b.vocab.relations:
        raise ValidationError("vocabulary mismatch between the boards")
    if len(a_tuple) != len(b_tuple):
        raise ValidationError("initial tuples must have equal length")
    if not set(a_tuple) <= set(a.universe):
        raise ValidationError("left tuple mentions unknown elements")
    if not set(b_tuple) <= set(b.universe):
        raise ValidationError("right tuple mentions unknown elements")


def prefix_game_winner(config: GameConfig, a: Structure,
                       a_tuple: tuple[str, ...], b: Structure,
                       b_tuple: tuple[str, ...],
                       max_positions: int = DEFAULT_POSITION_BUDGET) -> Player:
    """Solve the prefix game started with Spoiler to move on ``a``.

    Deterministic exhaustive minimax with memoization; raises BudgetExceeded
    past ``max_positions`` explored positions instead of running unbounded.
    """
    _check_position(a, tuple(a_tuple), b, tuple(b_tuple))
    budget = [max_positions]
    memo: dict = {}

    def dup_wins(n: int, left_is_a: bool, left_tup: tuple[str, ...],
                 right_tup: tuple[str, ...]) -> bool:
        left, right = (a, b) if left_is_a else (b, a)
        if n == 0:
            return is_partial_isomorphism(left, left_tup, right, right_tup)
        key = (n, left_is_a, left_tup, right_tup)
        hit = memo.get(key)
        if hit is not None:
            return hit
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExceeded("game position budget exhausted")
        k = config.tuple_size
        result = True
        for move in itertools.product(left.universe, repeat=k):
            answered = False
            for reply in itertools.product(right.universe, repeat=k):
                # sides swap: the next block of quantifiers is the other kind
                if dup_wins(n - 1, not left_is_a,
                            right_tup + reply, left_tup + move):
                    answered = True
                    break
            if not answered:
                result = False
                break
        memo[key] = result
        return result

    won = dup_wins(config.rounds, True, tuple(a_tuple), tuple(b_tuple))
    return Player.Duplicator if won else Player.Spoiler


def tree_prefix_game_winner(config: GameConfig, a: Structure,
                            a_tuple: tuple[str, ...], b: Structure,
                            b_tuple: tuple[str, ...],
                            max_positions: int = DEFAULT_POSITION_BUDGET) -> Player:
    """Solve the tree variant: Duplicator must win the prefix game from both
    orders of the boards."""
    first = prefix_game_winner(config, a, a_tuple, b, b_tuple, max_positions)
    if first is Player.Spoiler:
        return Player.Spoiler
    second = prefix_game_winner(config, b, b_tuple, a, a_tuple, max_positions)
    return second
