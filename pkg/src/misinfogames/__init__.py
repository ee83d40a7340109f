"""Misinformation games: equilibria, inflation and the adaptation procedure."""

__version__ = "0.1.0"

from .errors import (
    CapExceededError,
    DegenerateGameError,
    InflationError,
    MisinfoGameError,
    NonCanonicalError,
    SchemaError,
    ShapeError,
    UndefinedMetricError,
)
from .game import (
    NormalFormGame,
    expected_payoff,
    price_of_anarchy,
    social_optimum,
    social_welfare,
    support,
)
from .nash import EquilibriumSet, all_nash, nash_numeric, pure_nash, support_enumeration_2p
from .inflation import InflationReport, add_player, add_strategy, compatible, inflate_game, is_inflated_version
from .misinfo import (
    MisinformationGame,
    add_game,
    characteristic_set,
    inflation_process,
    is_canonical,
    is_uniform,
    mg_equal,
    nme,
    price_of_misinformation,
    update,
    update_set,
)
from .adaptation import (
    AdaptationConfig,
    AdaptationGraph,
    adapt_step,
    adaptation_procedure,
    compute_sme,
    export_dot,
    find_one_sme,
    naive_adaptation,
    parallel_traverse,
    traverse,
)
from .experiments import Setting, adversarial_lad, emit_csv, monte_carlo, random_misinfo
