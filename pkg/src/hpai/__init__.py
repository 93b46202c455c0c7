"""Health-promotion fighting-game AI: a seeded simulator that steers a player
toward using both sides of the body evenly."""

from .errors import ConfigError, HpaiError, IllegalActionError, IngestionError
from .health import HealthState, balancedness, fitness_dec
from .motion import MomentumVector
from .opponent import A2CTable

__version__ = "0.1.0"

__all__ = [
    "A2CTable", "ConfigError", "HealthState", "HpaiError", "IllegalActionError", "IngestionError",
    "MomentumVector", "balancedness", "fitness_dec", "__version__",
]
