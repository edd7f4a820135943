from .chain import *  # noqa: F401,F403
from .chain import __all__  # noqa: F401
