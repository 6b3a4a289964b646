# Copyright 2025 Beacon, shrwnsan
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Custom exceptions for beliefsearch.

Every exception carries an error code from :class:`ErrorCode` and a details
dictionary, so that the CLI can map failures to exit codes and the harness can
record them in CSV rows without parsing messages.
"""

from __future__ import annotations

import logging
from enum import Enum
from typing import Any, TypedDict


class ErrorDetail(TypedDict, total=False):
    """Shape of :meth:`PlannerError.to_dict`."""

    message: str
    code: str
    details: dict[str, Any]


class ErrorCode(str, Enum):
    """Machine-readable failure kinds; the CLI maps them to exit codes."""

    UNKNOWN = "unknown_error"
    VALIDATION = "validation_error"
    DOMAIN = "domain_error"
    STATE = "state_error"
    RESOURCE = "resource_error"
    BUDGET_EXCEEDED = "budget_exceeded"
    NODE_CAP_EXCEEDED = "node_cap_exceeded"
    CAPABILITY = "capability_error"
    CONFIGURATION = "configuration_error"
    VERIFICATION = "verification_failed"
    INTERNAL = "internal_error"


class PlannerError(Exception):
    """Root of every error raised by planners, the harness and the CLI.

    Attributes:
        error_code: kind of failure, see ErrorCode
        message: text shown to the user
        details: structured context copied into reports
    """

    DEFAULT_ERROR_CODE = ErrorCode.UNKNOWN

    def __init__(
        self,
        message: str,
        error_code: ErrorCode | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        self.error_code = error_code or self.DEFAULT_ERROR_CODE
        self.details = details.copy() if details else {}
        super().__init__(message)

    def get_safe_message(self) -> str:
        """Return the message with file paths reduced to their last components.

        Full details are logged at debug level for troubleshooting.
        """
        logger = logging.getLogger(self.__class__.__module__)
        logger.debug(
            "Full exception details: %s: %s - %s", self.__class__.__name__, str(self), self.details
        )

        from beliefsearch.utils.security import sanitize_message

        return sanitize_message(str(self))

    def to_dict(self) -> ErrorDetail:
        """Serialisable view used by the JSON formatter and CSV error column."""
        return {"message": str(self), "code": self.error_code.value, "details": self.details}


class ConfigurationError(PlannerError):
    """Raised when a problem or sweep file cannot be read."""

    DEFAULT_ERROR_CODE = ErrorCode.CONFIGURATION


class ValidationError(PlannerError):
    """An input value is out of range or malformed.

    Attributes:
        message: what is wrong with the value
        field: dotted name of the offending input, if known
        value: the rejected value, if known
        error_code: overrides VALIDATION for subclasses
    """

    DEFAULT_ERROR_CODE = ErrorCode.VALIDATION

    def __init__(
        self,
        message: str,
        field: str | None = None,
        value: object | None = None,
        error_code: ErrorCode | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        self.field = field
        self.value = value
        details = details or {}
        if field is not None:
            details["field"] = field
        if value is not None:
            details["value"] = value

        super().__init__(
            message=message,
            error_code=error_code or self.DEFAULT_ERROR_CODE,
            details=details,
        )


class DomainError(ValidationError):
    """Raised when an argument lies outside a formula's mathematical domain."""

    DEFAULT_ERROR_CODE = ErrorCode.DOMAIN


class StateError(PlannerError):
    """Raised when a tree operation is invalid for the node's current state."""

    DEFAULT_ERROR_CODE = ErrorCode.STATE

    def __init__(self, message: str, node_id: int | None = None, **kwargs: Any) -> None:
        details = kwargs.pop("details", {})
        if node_id is not None:
            details["node_id"] = node_id
        self.node_id = node_id
        super().__init__(message=message, details=details, **kwargs)


class ResourceError(PlannerError):
    """Raised when a node cap, evaluation budget or oracle size is exceeded."""

    DEFAULT_ERROR_CODE = ErrorCode.RESOURCE

    def __init__(
        self,
        message: str,
        resource: str | None = None,
        required: float | None = None,
        limit: float | None = None,
        **kwargs: Any,
    ) -> None:
        details = kwargs.pop("details", {})
        if resource:
            details["resource"] = resource
        if required is not None:
            details["required"] = required
        if limit is not None:
            details["limit"] = limit
        super().__init__(message=message, details=details, **kwargs)


class CapabilityError(PlannerError):
    """Raised when a planner needs something the problem cannot provide."""

    DEFAULT_ERROR_CODE = ErrorCode.CAPABILITY

    def __init__(self, message: str, planner: str | None = None, **kwargs: Any) -> None:
        details = kwargs.pop("details", {})
        if planner:
            details["planner"] = planner
        super().__init__(message=message, details=details, **kwargs)


class VerificationError(PlannerError):
    """Raised when a verification check does not pass."""

    DEFAULT_ERROR_CODE = ErrorCode.VERIFICATION

    def __init__(self, message: str, check: str | None = None, **kwargs: Any) -> None:
        details = kwargs.pop("details", {})
        if check:
            details["check"] = check
        super().__init__(message=message, details=details, **kwargs)
