"""Tests for the exception hierarchy."""

import logging

import pytest

from beliefsearch.exceptions import (
    CapabilityError,
    ConfigurationError,
    DomainError,
    ErrorCode,
    PlannerError,
    ResourceError,
    StateError,
    ValidationError,
    VerificationError,
)


class TestErrorCodes:
    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (PlannerError("x"), ErrorCode.UNKNOWN),
            (ConfigurationError("x"), ErrorCode.CONFIGURATION),
            (ValidationError("x"), ErrorCode.VALIDATION),
            (DomainError("x"), ErrorCode.DOMAIN),
            (StateError("x"), ErrorCode.STATE),
            (ResourceError("x"), ErrorCode.RESOURCE),
            (CapabilityError("x"), ErrorCode.CAPABILITY),
            (VerificationError("x"), ErrorCode.VERIFICATION),
        ],
    )
    def test_default_codes(self, error, code):
        assert error.error_code is code
        assert isinstance(error, PlannerError)

    def test_explicit_code_wins(self):
        error = ResourceError("cap", error_code=ErrorCode.NODE_CAP_EXCEEDED)
        assert error.error_code.value == "node_cap_exceeded"

    def test_domain_error_is_a_validation_error(self):
        with pytest.raises(ValidationError):
            raise DomainError("gamma outside (0, 1)", field="gamma", value=1.0)


class TestDetails:
    def test_validation_details(self):
        error = ValidationError("bad", field="budget", value=0)
        assert error.field == "budget"
        assert error.details == {"field": "budget", "value": 0}

    def test_resource_details(self):
        error = ResourceError("too big", resource="nodes", required=85, limit=50)
        assert error.details == {"resource": "nodes", "required": 85, "limit": 50}

    def test_state_and_capability_details(self):
        assert StateError("expanded", node_id=3).details == {"node_id": 3}
        assert StateError("expanded", node_id=3).node_id == 3
        assert CapabilityError("no support", planner="flat_oracle").details == {
            "planner": "flat_oracle"
        }
        assert VerificationError("failed", check="hoeffding").details == {"check": "hoeffding"}

    def test_details_are_copied(self):
        details = {"run": 1}
        error = PlannerError("x", details=details)
        error.details["run"] = 2
        assert details == {"run": 1}

    def test_to_dict(self):
        data = ValidationError("bad seed", field="seed").to_dict()
        assert data == {
            "message": "bad seed",
            "code": "validation_error",
            "details": {"field": "seed"},
        }


class TestSafeMessage:
    def test_paths_are_shortened(self):
        error = ConfigurationError("Cannot read /home/user/experiments/problems/bandit.json")
        assert error.get_safe_message() == "Cannot read problems/bandit.json"

    def test_full_details_go_to_debug_log(self, caplog):
        error = ConfigurationError("Cannot read /srv/data/x.json", details={"line": 4})
        with caplog.at_level(logging.DEBUG):
            error.get_safe_message()
        assert "/srv/data/x.json" in caplog.text
