"""Switch distributions, an LZ78 code length, and codewise Hilberg exponents."""

from .analysis import (
    CodeLengthSeries,
    FitError,
    MiSeries,
    PowerLawFit,
    code_length_series,
    fit_power_law,
    mi_series,
)
from .counts import CountStore, CountTable, FrozenStoreError, Mode, TrainingError, context_counts, count, train
from .lz import LzCode, LzParse, lz_code_length, lz_parse
from .markov import ConditionalLadder, ConfigurationError, conditional
from .repeats import DepthResult, max_repeat_length
from .sources import SourceError, SourceSpec, generate
from .switch import ModelConfig, SwitchModel, SwitchState, transition_weight
from .symbols import SymbolError, as_symbols

__version__ = "0.1.0"

__all__ = [
    "CodeLengthSeries",
    "ConditionalLadder",
    "ConfigurationError",
    "CountStore",
    "CountTable",
    "DepthResult",
    "FitError",
    "FrozenStoreError",
    "LzCode",
    "LzParse",
    "MiSeries",
    "Mode",
    "ModelConfig",
    "PowerLawFit",
    "SourceError",
    "SourceSpec",
    "SwitchModel",
    "SwitchState",
    "SymbolError",
    "TrainingError",
    "as_symbols",
    "code_length_series",
    "conditional",
    "context_counts",
    "count",
    "fit_power_law",
    "generate",
    "lz_code_length",
    "lz_parse",
    "max_repeat_length",
    "mi_series",
    "train",
    "transition_weight",
]
