"""Top-level package for slotlime."""

__author__ = "eyecan"
__email__ = "daniele.degregorio@eyecan.ai"
__version__ = "0.1.0"
