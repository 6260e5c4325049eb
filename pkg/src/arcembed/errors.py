"""Exception hierarchy shared by all modules.

Every failure mode that a caller can meaningfully branch on gets its own
class.  Validators do *not* raise on certificate failure (they report);
constructors raise when a precondition or retry budget is violated.
"""

from __future__ import annotations


class ArcembedError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------------------
# geometry substrate

class DepthExceeded(ArcembedError):
    """Bisection hit its depth limit: the polyline grazes the union boundary.

    Callers should shrink the cover mesh and retry.
    """


class DegenerateArc(ArcembedError):
    """The polyline self-touches (zero clearance), so no chain cover exists."""


# ---------------------------------------------------------------------------
# piecewise-linear maps

class PLMapError(ArcembedError):
    """Base for invalid piecewise-linear map data."""


class NotMonotoneDomain(PLMapError):
    """Breakpoint abscissae are not strictly increasing."""


class OutOfRange(PLMapError):
    """A breakpoint ordinate lies outside [-1, 1]."""


class ConstantPiece(PLMapError):
    """Two consecutive breakpoints share the same ordinate."""


class DomainNotFull(PLMapError):
    """The breakpoints do not span exactly [-1, 1]."""


class OutOfDomain(PLMapError):
    """Evaluation requested outside [-1, 1]."""


class NotZeroFixing(PLMapError):
    """An operation requiring f(0) = 0 received a map that moves 0."""


# ---------------------------------------------------------------------------
# departures / tuck

class MixedDepartures(ArcembedError):
    """The map has radial departures of both orientations.

    Carries one witness pair per orientation; such maps admit no boundary
    tuck embedding.
    """

    def __init__(self, positive_witness, negative_witness):
        self.positive_witness = positive_witness
        self.negative_witness = negative_witness
        super().__init__(
            f"departures of both orientations exist: "
            f"positive at {positive_witness}, negative at {negative_witness}"
        )


class NegativeDepartures(ArcembedError):
    """A bonding map of an inverse-system input has a negative departure.

    System inputs must already be normalized to have none.
    """

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"negative radial departure at {witness}")


class BandExhausted(ArcembedError):
    """Tuck construction ran out of retries before certification passed."""


# ---------------------------------------------------------------------------
# chains

class RayTouchesArc(ArcembedError):
    """The ray intersects the stage arc; scene chains require disjointness."""


class EntryNotInFirstLink(ArcembedError):
    """The ray's first entry into the chain is not through the first link."""


class NotARefinement(ArcembedError):
    """A child link's closure fits inside no parent link."""

    def __init__(self, child_index):
        self.child_index = child_index
        super().__init__(f"child link {child_index} is contained in no parent link")


# ---------------------------------------------------------------------------
# stage tower

class MarginTooSmall(ArcembedError):
    """Requested stage tolerance exceeds the containment slack of the cover."""


class ValidationFailed(ArcembedError):
    """A construction exhausted its retries without a passing certificate."""


# ---------------------------------------------------------------------------
# ray routing / line closure

class WaypointUnavailable(ArcembedError):
    """No boundary point of the origin link is clear of the half-plane and
    of all other links; regenerate chains with smaller radii."""


class RoutingFailed(ArcembedError):
    """Corridor search exhausted without a certified route."""


class ItineraryInvalid(ArcembedError):
    """Itinerary indices are inconsistent with the tower's chains."""


class NeitherEndMeetsFirstLink(ArcembedError):
    """Line-mode declaration violates the chain dichotomy: neither ray end's
    remainder meets the first link."""


class NoPathAtResolution(ArcembedError):
    """Closure-arc grid search failed at the current resolution."""


# ---------------------------------------------------------------------------
# scene I/O

class SchemaError(ArcembedError):
    """Scene spec JSON violates the schema; message carries a pointer path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class RationalParseError(SchemaError):
    """A rational literal could not be parsed exactly."""
