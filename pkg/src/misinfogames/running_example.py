"""A small two-player instance used in the docs and tests.

The actual game has the chicken structure.  The row player's view is a
prisoner's dilemma and the column player's view is zero-sum.
"""

from __future__ import annotations

from .game import NormalFormGame
from .misinfo import MisinformationGame

ACTUAL = NormalFormGame.from_nested([[[6, 6], [2, 7]], [[7, 2], [1, 1]]])
VIEW_1 = NormalFormGame.from_nested([[[2, 2], [0, 3]], [[3, 0], [1, 1]]])
VIEW_2 = NormalFormGame.from_nested([[[-1, 1], [2, -2]], [[1, -1], [0, 0]]])


def running_example() -> MisinformationGame:
    return MisinformationGame(ACTUAL, (VIEW_1, VIEW_2))


# Figures that circulate with this example but do not follow from its payoffs.
# The values on the right are what the definitions give and what this package
# computes.
KNOWN_DISCREPANCIES = {
    "mixed_equilibrium_actual": {
        "quoted": "(2/3, 1/3)",
        "computed": "(1/2, 1/2) for both players; indifference 2 + 4q = 1 + 6q gives q = 1/2",
    },
    "worst_equilibrium_welfare": {"quoted": "26/3", "computed": "8"},
    "price_of_anarchy": {"quoted": "18/13", "computed": "3/2"},
    "nme_welfare": {"quoted": "9/2", "computed": "11/2"},
    "price_of_misinformation": {"quoted": "8/3", "computed": "24/11"},
    "terminal_set": {
        "quoted": "{after (2,1)} and {after (2,1),(2,2)}",
        "computed": "also {after (2,2)}: its nme realises (2,2), which is already learned, so it loops on itself",
    },
    "position_set_count": {"quoted": "5", "computed": "4: {}, {(2,1)}, {(2,2)}, {(2,1),(2,2)}"},
}
