import os
import sys
import logging
import time
from pathlib import Path
from typing import Any, Dict

from flask import Flask, jsonify, request
from flask_cors import CORS

# Allow running as script by putting backend/ on sys.path
if __package__ in (None, ""):
    backend_dir = Path(__file__).resolve().parents[2]
    if str(backend_dir) not in sys.path:
        sys.path.insert(0, str(backend_dir))

from src.analysis.pipeline import run_abstract, run_check  # noqa: E402
from src.api.report import dump_json  # noqa: E402
from src.cgf.errors import ModelError, StateCapExceeded  # noqa: E402
from src.cgf.parser import parse_model  # noqa: E402
from src.utils.config import AnalysisConfig  # noqa: E402

__version__ = "0.1.0"

logger = logging.getLogger(__name__)


def _request_config(base: AnalysisConfig, payload: Dict[str, Any]) -> AnalysisConfig:
    overrides = payload.get("config") or {}
    if not isinstance(overrides, dict):
        raise ModelError("config must be an object")
    try:
        return base.with_overrides(**overrides)
    except (TypeError, ValueError) as exc:
        raise ModelError(str(exc)) from exc


def create_app(config: AnalysisConfig | None = None):
    app = Flask(__name__)
    CORS(app)
    base_config = config or AnalysisConfig.from_env()

    def _analyse(runner):
        payload = request.get_json(silent=True) or {}
        text = payload.get("model")
        if not isinstance(text, str) or not text.strip():
            return jsonify({"error": "model is required", "diagnostics": []}), 400

        start = time.perf_counter()
        name = str(payload.get("name") or "model")
        try:
            run_config = _request_config(base_config, payload)
            env, initial = parse_model(text)
            run = runner(name, env, initial, run_config)
        except ModelError as exc:
            logger.info("Rejected model %s: %s", name, exc)
            return jsonify({"error": str(exc), "diagnostics": exc.diagnostics}), 400
        except StateCapExceeded as exc:
            logger.warning("State cap hit for %s: %s", name, exc)
            return jsonify({"error": str(exc), "cap": exc.cap}), 422
        except Exception as exc:
            logger.exception("Analysis of %s failed", name)
            return jsonify({"error": str(exc)}), 500
        logger.info("%s %s completed in %.3fs", request.path, name, time.perf_counter() - start)
        return app.response_class(dump_json(run.report), status=200, mimetype="application/json")

    @app.route("/api/health", methods=["GET"])
    def health():
        return jsonify({"status": "ok"}), 200

    @app.route("/api/version", methods=["GET"])
    def version():
        return jsonify({"version": __version__}), 200

    @app.route("/api/check", methods=["POST"])
    def check():
        return _analyse(run_check)

    @app.route("/api/abstract", methods=["POST"])
    def abstract():
        return _analyse(run_abstract)

    return app


if __name__ == "__main__":
    port = int(os.environ.get("PORT", 5000))
    app = create_app()
    app.run(host="0.0.0.0", port=port)
