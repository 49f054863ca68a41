"""Rateless coding (LT, memory-based LT, amicable LT) and a two-hop erasure relay simulator."""

from ratelessrelay.degree import (
    DegreeDistribution,
    DegenerateDistribution,
    InvalidDistributionParameters,
    NoSolution,
    first_stage_length,
    ideal_soliton,
    optimal_memory_order,
    robust_soliton,
    sample_degree,
)
from ratelessrelay.codec import (
    CodedSymbol,
    Encoder,
    SourceBlock,
    dump_symbols,
    make_encoder,
)
from ratelessrelay.decoder import MalformedSymbol, PeelingDecoder, ge_oracle_decode
from ratelessrelay.channel import ErasureChannel
from ratelessrelay.sim import SimConfig, SimTrace, run_df, run_pdf, run_simulation, run_single_hop

from ratelessrelay.experiment import (
    AggregateTrace,
    ExperimentConfig,
    aggregate,
    emit_csv,
    emit_json_summary,
    monte_carlo,
    t_at_fraction,
    trial_seed,
)

__version__ = "0.1.0"
