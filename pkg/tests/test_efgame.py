import pytest
from hypothesis import given, settings, strategies as st

from fvkit import (BudgetExceeded, GameConfig, Player, Structure,
                   ValidationError, Vocabulary, is_partial_isomorphism,
                   prefix_game_winner, tree_prefix_game_winner)
from conftest import all_structures, linear_order

VU = Vocabulary({"U": 1})

L5 = linear_order(5)
L4 = linear_order(4, prefix="b")

WITH_U = Structure(VU, ("a",), {"U": frozenset({("a",)})})
WITHOUT_U = Structure(VU, ("b",), {"U": frozenset()})


def test_game_config_validation():
    GameConfig(0, 0)
    GameConfig(2, 1)
    with pytest.raises(ValidationError):
        GameConfig(-1, 1)
    with pytest.raises(ValidationError):
        GameConfig(1, 0)


def test_linear_orders_five_four():
    assert prefix_game_winner(GameConfig(3, 1), L5, (), L4, ()) == Player.Spoiler
    assert prefix_game_winner(GameConfig(2, 1), L5, (), L4, ()) == Player.Duplicator
    assert tree_prefix_game_winner(GameConfig(3, 1), L5, (), L4, ()) == Player.Spoiler


def test_copy_strategy():
    for cfg in (GameConfig(0, 0), GameConfig(1, 1), GameConfig(2, 2)):
        assert prefix_game_winner(cfg, L4, (), L4, ()) == Player.Duplicator
        assert tree_prefix_game_winner(cfg, L4, (), L4, ()) == Player.Duplicator


def test_unary_flag_detected_in_one_round():
    assert prefix_game_winner(GameConfig(1, 1), WITH_U, (), WITHOUT_U, ()) == \
        Player.Spoiler


def test_zero_rounds_is_partial_isomorphism_check():
    a = Structure(VU, ("x", "y"), {"U": frozenset({("x",)})})
    for s, t, ta, tb in [(a, a, ("x",), ("x",)), (a, a, ("x",), ("y",))]:
        winner = prefix_game_winner(GameConfig(0, 1), s, ta, t, tb)
        expected = is_partial_isomorphism(s, ta, t, tb)
        assert (winner == Player.Duplicator) == expected


def test_game_validates():
    with pytest.raises(ValidationError):
        prefix_game_winner(GameConfig(1, 1), WITH_U, ("a",), WITHOUT_U, ())
    with pytest.raises(ValidationError):
        prefix_game_winner(GameConfig(1, 1), WITH_U, (), L4, ())


def test_position_budget():
    big = linear_order(7)
    other = linear_order(8, prefix="b")
    with pytest.raises(BudgetExceeded):
        prefix_game_winner(GameConfig(3, 2), big, (), other, (),
                           max_positions=50)


@st.composite
def structure_pairs(draw):
    structs = all_structures(VU, 2)
    a = structs[draw(st.integers(0, len(structs) - 1))]
    b = structs[draw(st.integers(0, len(structs) - 1))]
    return a, b


@given(structure_pairs(), st.integers(1, 2), st.integers(1, 2))
@settings(max_examples=50, deadline=None)
def test_tree_game_swap_symmetric(pair, n, k):
    a, b = pair
    cfg = GameConfig(n, k)
    assert tree_prefix_game_winner(cfg, a, (), b, ()) == \
        tree_prefix_game_winner(cfg, b, (), a, ())


@given(structure_pairs(), st.integers(1, 2), st.integers(1, 2))
@settings(max_examples=50, deadline=None)
def test_spoiler_monotone_in_rounds(pair, n, k):
    a, b = pair
    if prefix_game_winner(GameConfig(n, k), a, (), b, ()) == Player.Spoiler:
        assert prefix_game_winner(GameConfig(n + 1, k), a, (), b, ()) == \
            Player.Spoiler
