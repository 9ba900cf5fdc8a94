from ._rsmoments import *  # noqa: F401,F403

from ._rsmoments import __doc__  # noqa: F401
