"""Max-min fair energy beamforming for multi-antenna power beacons.

The heavy lifting lives in the compiled ``_wetbeam`` extension; this package
re-exports its surface.
"""

from ._wetbeam import *  # noqa: F401,F403
from ._wetbeam import __doc__  # noqa: F401

__version__ = "0.1.0"
