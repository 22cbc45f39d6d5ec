"""Exception types shared by every representation."""


class UnivsliceError(Exception):
    """Base class; the CLI turns these into a nonzero exit."""


class EmptyInput(UnivsliceError, ValueError):
    pass


class NotStrictlyIncreasing(UnivsliceError, ValueError):
    def __init__(self, index: int):
        super().__init__(f"sequence not strictly increasing at index {index}")
        self.index = index


class UniverseTooSmall(UnivsliceError, ValueError):
    pass


class BufferTooSmall(UnivsliceError, ValueError):
    pass


class IndexOutOfBounds(UnivsliceError, IndexError):
    pass


class RankOutOfRange(UnivsliceError, ValueError):
    pass


class MalformedBuffer(UnivsliceError, ValueError):
    pass


class MalformedFile(UnivsliceError, ValueError):
    pass


class InfeasibleParameters(UnivsliceError, ValueError):
    pass


class ValidationFailure(UnivsliceError, RuntimeError):
    pass
