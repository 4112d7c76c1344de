"""Two-qubit quantum games, their induced classical payoff matrices, and
equilibrium analysis of the resulting bimatrix games."""

from .equilibrium import (
    MixedEquilibrium,
    PureEquilibrium,
    best_responses,
    dominance,
    mixed_2x2,
    pure_nash,
    support_enumeration,
)
from .games import (
    BimatrixGame,
    MixedProfile,
    PayoffParams,
    PayoffWeights,
    classical_game,
    game_from_grid,
    pd_weights,
)
from .protocols import (
    MixedLocalStrategy,
    PayoffPair,
    ProtocolSpec,
    StrategyCatalog,
    classical_replication_check,
    combined_table,
    ewl_catalog,
    ewl_spec,
    induced_matrix,
    play,
    random_flip,
    shared_state_spec,
    vb_maximize,
    vb_payoff_closed_form,
)
from .quantum import (
    JointUnitary,
    LocalUnitary,
    OutcomeDistribution,
    TwoQubitState,
    apply,
    disentangler,
    outcome_distribution,
    tensor,
)

__version__ = "0.1.0"
