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

"""JSON output formatter."""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from beliefsearch.harness.verification import VerificationSummary
    from beliefsearch.planning.models import RunReport


def _finite(value: Any) -> Any:
    """Replace non-finite floats, which JSON cannot represent, by None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, list | tuple):
        return [_finite(item) for item in value]
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    return value


class JSONFormatter:
    """JSON formatter for planner runs and verification summaries."""

    def format_report(self, report: RunReport) -> str:
        data = report.to_dict()
        data["chosen_action"] = data.pop("chosen_branch")
        return json.dumps(_finite(data), indent=2)

    def format_verification(self, summary: VerificationSummary) -> str:
        data = {
            "check": summary.check.value,
            "trials": summary.trials,
            "seed": summary.seed,
            "confidence": summary.confidence,
            "passed": summary.passed,
            "out_path": None if summary.out_path is None else str(summary.out_path),
            "rows": [asdict(row) for row in summary.rows],
        }
        return json.dumps(_finite(data), indent=2)
