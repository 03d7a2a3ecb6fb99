"""Exception hierarchy.

Everything raised on purpose by the library derives from :class:`BirdseyeError`.
Geometry failures (inputs that no real camera could have produced, or that sit
on a degenerate configuration) derive from :class:`GeometryError`; the CLI maps
those to exit code 3.
"""


class BirdseyeError(Exception):
    """Base class for library errors."""


class GeometryError(BirdseyeError, ValueError):
    """Inputs are geometrically degenerate or inconsistent."""


class ZeroResult(GeometryError):
    """Cross product of two proportional homogeneous vectors."""


class InfiniteInput(GeometryError):
    """A finite point or a finite line was required."""


class OutsideDisk(GeometryError):
    """Encoded point lies outside the code disk."""


class BoundaryUndefined(GeometryError):
    """Line code on the disk boundary has two preimages."""


class NotOnHorizon(GeometryError):
    """Horizontal vanishing point does not lie on the horizon."""


class SameSide(GeometryError):
    """Vertical vanishing point and horizon are on the same side of the principal point."""


class VzAtInfinity(GeometryError):
    """Vertical vanishing point at infinity: the focal length cannot be recovered."""


class VerticalHorizon(GeometryError):
    """Horizon is (nearly) vertical, roll outside the supported range."""


class UpwardTilt(GeometryError):
    """Camera is not pitched below the horizontal."""


class NadirDegenerate(GeometryError):
    """Overhead view without a known focal length."""


class NotCollinear(GeometryError):
    """Principal point, vertical vanishing point and horizon foot are not collinear."""


class EmptyRegion(GeometryError):
    """No part of the source image lies on the ground side of the horizon."""


class DegenerateCamera(GeometryError):
    """Camera cannot image the ground plane."""


class VerticalLine(GeometryError):
    """Line has no finite height over the image width."""


class SingularH(GeometryError):
    """Homography is not invertible."""


class AllZero(BirdseyeError, ValueError):
    """Selected probability mass is zero."""


class EmptyInput(BirdseyeError, ValueError):
    """An empty collection was given where at least one element is needed."""
