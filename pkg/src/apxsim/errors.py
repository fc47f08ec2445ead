"""Domain error hierarchy shared by all subpackages.

Every error carries a machine-readable ``code`` (stable, snake_case) and an
optional ``details`` dict; the service maps codes onto HTTP statuses and the
CLI emits them as JSON on stderr.
"""

from __future__ import annotations


class ApxError(Exception):
    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.details = details

    def to_json(self) -> dict:
        return {"error": self.code, "message": self.message, "details": self.details}


# vision ---------------------------------------------------------------

class NoPositivePrompt(ApxError):
    code = "no_positive_prompt"


class EmptyMask(ApxError):
    code = "empty_mask"


class DimensionMismatch(ApxError):
    code = "dimension_mismatch"


class DegenerateResult(ApxError):
    code = "degenerate_result"


class DisconnectedSkeleton(ApxError):
    code = "disconnected_skeleton"


class AmbiguousTopology(ApxError):
    code = "ambiguous_topology"


# kinematics -----------------------------------------------------------

class DegeneratePolygon(ApxError):
    code = "degenerate_polygon"


class UnknownBody(ApxError):
    code = "unknown_body"


class StaticBodyDrag(ApxError):
    code = "static_body_drag"


class UnknownParameter(ApxError):
    code = "unknown_parameter"


class OutOfRange(ApxError):
    code = "out_of_range"


class SimulationDiverged(ApxError):
    code = "simulation_diverged"

    def __init__(self, message: str = "", last_valid_state=None, **details):
        super().__init__(message, **details)
        self.last_valid_state = last_valid_state


# optics ---------------------------------------------------------------

class NonPositiveObjectDistance(ApxError):
    code = "non_positive_object_distance"


# circuit --------------------------------------------------------------

class UnknownComponent(ApxError):
    code = "unknown_component"


class NonPositiveValue(ApxError):
    code = "non_positive_value"


class UnknownNode(ApxError):
    code = "unknown_node"


class SingularSystem(ApxError):
    code = "singular_system"


class UnresolvedNetlist(ApxError):
    """Netlist still carries extraction warnings (dangling terminals etc.)."""

    code = "unresolved_netlist"


# animation ------------------------------------------------------------

class DegeneratePath(ApxError):
    code = "degenerate_path"


class SampleOutOfRange(ApxError):
    code = "sample_out_of_range"


class DuplicateObjectTrack(ApxError):
    code = "duplicate_object_track"


class UnknownId(ApxError):
    code = "unknown_id"


# scene ----------------------------------------------------------------

class IllegalRoleForSimType(ApxError):
    code = "illegal_role_for_sim_type"


class UnknownEntity(ApxError):
    code = "unknown_entity"


class UnresolvedProperty(ApxError):
    code = "unresolved_property"


class UnknownToken(ApxError):
    code = "unknown_token"


class UnknownBinding(ApxError):
    code = "unknown_binding"


class NonMonotonicTime(ApxError):
    code = "non_monotonic_time"


class VersionMismatch(ApxError):
    code = "version_mismatch"


class SchemaViolation(ApxError):
    code = "schema_violation"

    def __init__(self, message: str = "", pointer: str = "", **details):
        super().__init__(message, pointer=pointer, **details)
        self.pointer = pointer


# service --------------------------------------------------------------

class UnknownSession(ApxError):
    code = "unknown_session"


class IllegalCommandForKind(ApxError):
    code = "illegal_command_for_kind"


class IllegalStateTransition(ApxError):
    code = "illegal_state_transition"
