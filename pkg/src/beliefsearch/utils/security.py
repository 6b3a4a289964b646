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

"""Safe error reporting and output-file helpers."""

import logging
import os
import re
import tempfile
from pathlib import Path

from beliefsearch.config import performance_config

logger = logging.getLogger(__name__)

_ABSOLUTE_PATH = re.compile(r"(?:[A-Za-z]:)?[\\/](?:[^\s\\/'\"]+[\\/])+[^\s\\/'\"]*")


def sanitize_path(path: str | Path | None, max_components: int = 2) -> str:
    """Return only the last ``max_components`` components of a path.

    Examples:
        >>> sanitize_path("/home/user/experiments/problems/bandit.json")
        'problems/bandit.json'
    """
    if not path:
        return "<no path>"

    parts = Path(path).parts
    if parts and parts[0] in (os.sep, "/"):
        parts = parts[1:]
    if len(parts) <= max_components:
        return "/".join(parts)
    return "/".join(parts[-max_components:])


def sanitize_message(message: str, max_length: int | None = None) -> str:
    """Replace absolute paths inside a message and cap its length."""
    if not message:
        return "<no message>"

    sanitized = _ABSOLUTE_PATH.sub(lambda match: sanitize_path(match.group(0)), message)

    if max_length is None:
        max_length = performance_config.max_error_length
    if len(sanitized) > max_length:
        sanitized = sanitized[: max_length - 3] + "..."
    return sanitized


def atomic_write_text(path: Path, text: str) -> Path:
    """Write ``text`` next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        Path(tmp_name).replace(path)
    except OSError:
        logger.debug("Atomic write to %s failed", sanitize_path(path))
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path
