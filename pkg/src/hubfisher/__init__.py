"""Interaction networks and Fisher-information parameter selection for multi-agent traces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DuplicateSample,
    EmptyEnsemble,
    GridTooSmall,
    HubFisherError,
    InconsistentGames,
    LengthMismatch,
    MalformedRow,
    MissingEntity,
    RosterViolation,
    SeriesTooShort,
)
from .estimators import (  # noqa: E402
    EstimatorConfig,
    brute_force_te_oracle,
    conditional_transfer_entropy,
    joint_counts,
)
from .fisher import (  # noqa: E402
    FisherCurve,
    SweepGrid,
    estimate_distribution,
    fisher_curve,
    select_theta_star,
)
from .network import (  # noqa: E402
    Direction,
    InteractionDiagram,
    ResponderTable,
    TEMatrix,
    build_diagram,
    diagram_from_matrices,
    responder_mode,
    responder_per_game,
    te_matrix,
)
from .simulator import ScenarioConfig, SweepConfig, simulate_match, sweep  # noqa: E402
from .trace import (  # noqa: E402
    EntityId,
    GameTrace,
    Side,
    SymbolizerConfig,
    SymbolSeries,
    compute_increments,
    parse_trace,
    symbolize,
    write_trace,
)
