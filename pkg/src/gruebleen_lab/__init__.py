"""Theory-schema verification lab: similarities, grue-bleen spectacles and the triviality theorem."""

__version__ = "0.1.0"
