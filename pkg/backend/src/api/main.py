from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

if __package__ in (None, ""):
    backend_dir = Path(__file__).resolve().parents[2]
    if str(backend_dir) not in sys.path:
        sys.path.insert(0, str(backend_dir))

from src.api.app import create_app  # noqa: E402

logger = logging.getLogger(__name__)

GROUPIES = """
species X = ?a(1)@lam.X + !b(1)@del.Y
species Y = !a(1)@mu.X + ?b(1)@eta.Y
init X:1, Y:2
"""


def main() -> None:
    """
    Smoke test for the Flask app using the built-in test client.
    Does not start a server; hits each endpoint once and logs the responses.
    """

    log_level = os.environ.get("LOG_LEVEL", "INFO")
    logging.basicConfig(level=getattr(logging, log_level.upper(), logging.INFO))

    app = create_app()
    client = app.test_client()

    health = client.get("/api/health")
    logger.info("GET /api/health -> %s %s", health.status_code, health.json)

    version = client.get("/api/version")
    logger.info("GET /api/version -> %s %s", version.status_code, version.json)

    check = client.post("/api/check", json={"model": GROUPIES, "name": "groupies"})
    logger.info("POST /api/check -> %s %s", check.status_code, check.json["termination"]["initial"])

    logger.info("Flask smoke tests completed successfully.")


if __name__ == "__main__":
    main()
