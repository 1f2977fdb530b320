"""Exception taxonomy shared by the geometry core and the reconstruction engines.

Every failure mode that a caller is expected to branch on gets its own class;
the CLI maps these onto exit codes by name.
"""


class PolyreconError(Exception):
    """Base class for all library errors."""


# --- geometry core ---

class GeometryError(PolyreconError):
    pass


class SplitSides(GeometryError):
    """Points lie strictly on both sides of a plane."""


class Unbounded(GeometryError):
    """A half-space intersection does not close a finite volume."""


class Empty(GeometryError):
    """A half-space intersection has no interior."""


class Degenerate(GeometryError):
    """A region collapsed to lower dimension."""


class DegenerateRegion(GeometryError):
    """Zero-area input where positive area is required."""


class InvalidTopology(GeometryError):
    """Input violates the polyhedron invariants."""


class DegenerateScene(GeometryError):
    """A scene-level arrangement region collapsed."""


# --- marker model ---

class MarkupError(PolyreconError):
    pass


class MissingKey(MarkupError):
    """A marker lacks metadata required by the operation."""

    def __init__(self, marker_id, key):
        self.marker_id = marker_id
        self.key = key
        super().__init__(f"marker {marker_id} lacks required metadata {key!r}")


class InvalidMarkup(MarkupError):
    """Markup violates the preconditions of the chosen engine."""


# --- placement ---

class PlacementError(PolyreconError):
    pass


class EmptyFace(PlacementError):
    """A face has no interior to place a marker on."""


# --- reconstruction ---

class ReconstructionError(PolyreconError):
    pass


class RedundantPlaneWarning(UserWarning):
    """A marker's plane supports no face of the reconstructed hull."""


class RedundantPlane(ReconstructionError):
    """Strict-mode upgrade of RedundantPlaneWarning."""


class NoConsistentSeed(ReconstructionError):
    """The rectangle seed search found no candidate closing a rectangle."""

    def __init__(self, message, unconsumed=0):
        self.unconsumed = unconsumed
        super().__init__(message)


class MarkerAtCorner(ReconstructionError):
    """A marker sits exactly on a rectangle corner."""


class ProfileNotInterior(ReconstructionError):
    """An elaboration profile is not strictly inside its base face."""


class DepthExceedsSolid(ReconstructionError):
    """Elaboration depth is non-positive or exceeds the solid thickness."""


class NonPerpendicularMarker(ReconstructionError):
    """A marker is neither parallel nor perpendicular to its base face."""


class InconsistentDepth(ReconstructionError):
    """Markers fixing an elaboration depth disagree."""


class OrderCycleBroken(ReconstructionError):
    """Consecutive ordered profile lines are parallel and distinct."""


class NoEmptyClass(ReconstructionError):
    """Interior marker normal classes do not single out one intruded face."""


class FaceIdentificationFailed(ReconstructionError):
    """No box face passes the intruded-face test."""


class OddRowCount(ReconstructionError):
    """A connect-the-dots row has an odd number of vertices."""


class OddColumnCount(ReconstructionError):
    """A connect-the-dots column has an odd number of vertices."""


class OddLineCount(ReconstructionError):
    """An axis line of the 3D wireframe has an odd number of vertices."""


class NonManifold(ReconstructionError):
    """Connect-the-dots pairing produced crossings or bad vertex degrees."""


class FaceAssemblyFailed(ReconstructionError):
    """Recovered faces do not close into a valid polyhedron."""


class AssemblyFailed(ReconstructionError):
    """Kept faces do not close; carries the open edges for diagnosis."""

    def __init__(self, message, open_edges=()):
        self.open_edges = list(open_edges)
        super().__init__(message)


class NonPlanarFaceGroup(ReconstructionError):
    """Vertex records of one face group are not coplanar."""


class SelfIntersectingBoundary(ReconstructionError):
    """An ordered face boundary crosses itself."""


# --- oracle ---

class SearchBudgetExceeded(PolyreconError):
    """Exhaustive enumeration would exceed the configured budget."""
