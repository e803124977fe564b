"""
Error Types

Exceptions raised by the tmoebius engine.
"""


class TMoebiusError(Exception):
    """Base class for all engine errors"""


class InvalidRequestError(TMoebiusError, ValueError):
    """A request violates one of the relations between surface, class and profile"""


class DiagramStructureError(TMoebiusError, ValueError):
    """A diagram description cannot be turned into a FloorDiagram"""


class ChamberCrossingError(TMoebiusError, RuntimeError):
    """A sample family left the chamber it started in"""


class RegularityFitError(TMoebiusError, RuntimeError):
    """No polynomial of admissible degree reproduces the samples"""
