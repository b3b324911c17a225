"""Shadow-mode reinforcement learning on a 2D reach-avoid benchmark."""

__version__ = "0.1.0"
