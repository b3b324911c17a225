"""Base exception for shadowrl.

Each module defines its own subclasses next to the code that raises them.
"""


class ShadowRLError(Exception):
    """Base exception for all shadowrl errors."""
    pass
