"""glassbench: benchmark harness for minor-embedded 3D spin glasses.

Builds Chimera/Pegasus qubit-connectivity graphs, minor-embeds open-boundary
3D lattices with 4-qubit (Chimera) or 2-qubit (Pegasus) chains, samples the
embedded Ising problems with an exact oracle or simulated annealing, and
measures time-to-solution scaling and cube-isometry consistency.
"""

__version__ = "0.1.0"

from .embedding import (
    Chain,
    EmbeddedProblem,
    EmbeddingMap,
    ValidationReport,
    YieldReport,
    embed_cubic,
    embed_cubic_chimera,
    embed_cubic_pegasus,
    maximize_yield,
    physical_energy,
    set_parameters,
    unembed,
    validate_embedding,
)
from .errors import GlassbenchError
from .lattice import (
    Instance,
    Isometry,
    LatticeSpec,
    LogicalGraph,
    apply_isometry,
    build_lattice,
    enumerate_isometries,
    generate_instance,
    logical_energy,
)
from .metrics import (
    AggregateStats,
    InstanceResult,
    SuccessEstimate,
    TTSCurve,
    aggregate,
    isometry_consistency,
    run_protocol,
    select_optimal,
    speedup_pairs,
    tts,
)
from .sampler import (
    GroundTruthRegistry,
    SampleSet,
    SamplerConfig,
    count_ground_hits,
    sample_sa,
    solve_exact,
)
from .topology import (
    DefectMask,
    HardwareGraph,
    apply_defects,
    build_chimera,
    build_pegasus,
    graph_stats,
    sample_defect_mask,
)
