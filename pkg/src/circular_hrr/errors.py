"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Invalid vector dimension or mismatched operand dimensions."""


class SingularSpectrumError(ValueError):
    """A spectral bin is too close to zero to invert."""

    def __init__(self, index: int, magnitude: float):
        self.index = index
        self.magnitude = magnitude
        super().__init__(
            f"near-singular spectrum: bin {index} has magnitude {magnitude:.3e}"
        )


class DatasetFormatError(ValueError):
    """Malformed line in an XMC-format dataset file."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class TrainingDivergedError(FloatingPointError):
    """Loss or activations became non-finite during training."""
