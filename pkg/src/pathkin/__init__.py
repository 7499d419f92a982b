"""Transport along paths and relative mechanical quantities of particles.

Most names are re-exported here; the submodules hold the rest.
"""

from . import kinematics
from .builders import *  # noqa: F401,F403
from .covariant import *  # noqa: F401,F403
from .errors import (  # noqa: F401
    AccuracyWarning,
    ConfigurationError,
    DegenerateDirectionError,
    DomainError,
    InternalConsistencyError,
    InvalidParticleError,
    NumericError,
    PathkinError,
    PreconditionError,
)
from .geometry import *  # noqa: F401,F403
from .kernels import BACKEND  # noqa: F401
from .kinematics import *  # noqa: F401,F403
from .metric import *  # noqa: F401,F403
from .runner import run_scenario, verify  # noqa: F401
from .scenario import ScenarioError, load_scenario, parse_scenario  # noqa: F401
from .sr import *  # noqa: F401,F403
from .transport import *  # noqa: F401,F403

__version__ = "0.1.0"
