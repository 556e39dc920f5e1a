try:
    from ._kls_lab import *  # noqa: F401,F403
except ImportError:  # in-tree builds put the extension on PYTHONPATH directly
    from _kls_lab import *  # noqa: F401,F403
