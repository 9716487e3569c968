"""Exception types shared across the package.

Every error raised on a documented contract boundary derives from
``OpenTeachError`` so callers can catch the package's failures in one net.
"""


class OpenTeachError(Exception):
    pass


# --- wire ---------------------------------------------------------------

class TopicTooLong(OpenTeachError):
    pass


class PayloadTooLarge(OpenTeachError):
    pass


class MalformedFrame(OpenTeachError):
    pass


class UnknownPayloadKind(OpenTeachError):
    pass


class KindMismatch(OpenTeachError):
    pass


class BusClosed(OpenTeachError):
    pass


class UnknownTopic(OpenTeachError):
    pass


# --- retargeting --------------------------------------------------------

class DegenerateHand(OpenTeachError):
    pass


class DegenerateFinger(OpenTeachError):
    pass


class Paused(OpenTeachError):
    pass


class BadBounds(OpenTeachError):
    pass


class NonFinite(OpenTeachError):
    pass


# --- simulation ---------------------------------------------------------

class DimensionMismatch(OpenTeachError):
    pass


class NoConvergence(OpenTeachError):
    """IK failed to reach tolerance. Carries the best iterate found."""

    def __init__(self, msg, q=None, residual=None):
        super().__init__(msg)
        self.q = q
        self.residual = residual


# --- pipeline -----------------------------------------------------------

class BadScript(OpenTeachError):
    pass


class BadMessage(OpenTeachError):
    pass


# --- recorder / imitation -----------------------------------------------

class IoFailure(OpenTeachError):
    pass


class SchemaVersionMismatch(OpenTeachError):
    pass


class EmptyPrimary(OpenTeachError):
    pass


class DegenerateData(OpenTeachError):
    pass


class EmptyDataset(OpenTeachError):
    pass
