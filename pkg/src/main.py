"""
Residua Main Application
Spectral transfer computations for normalized affine Hecke algebras from the command line
"""
import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from loguru import logger

# Import residua modules
from cli.commands import COMMANDS, EXIT_ERROR, EXIT_REFUTED, SCHEMA, Options, run
from cli.document import load
from core.config import configure, load_limits
from core.errors import Refutation, ResiduaError


class ResiduaApp:
    """Loads the limits once and runs commands on document files"""

    def __init__(self, config_dir: str = "config"):
        self.config_dir = Path(config_dir)
        self.limits = load_limits(str(self.config_dir))
        configure(self.limits)
        logger.info(f"Residua initialized with config from {self.config_dir}")

    def run(self, command: str, paths: List[str], v0: Optional[Fraction] = None, as_json: bool = False) -> int:
        """Run one command and write its report to stdout; returns the exit code"""
        try:
            documents = [load(path) for path in paths]
            report = run(command, documents, Options(v0=v0, as_json=as_json, limits=self.limits))
        except Refutation as e:
            logger.warning(f"Refuted: {e}")
            self._emit_failure(command, "refutation", str(e), as_json, e.report)
            return EXIT_REFUTED
        except ResiduaError as e:
            logger.error(f"{command} failed: {e}")
            self._emit_failure(command, type(e).__name__, str(e), as_json)
            return EXIT_ERROR
        except Exception as e:
            logger.error(f"Unexpected error in {command}: {e}")
            self._emit_failure(command, "internal", str(e), as_json)
            return EXIT_ERROR

        sys.stdout.write(report.json() if as_json else report.text())
        return report.exit_code

    def _emit_failure(self, command: str, kind: str, message: str, as_json: bool, details: Optional[dict] = None):
        if as_json:
            body = {"schema": SCHEMA, "command": command, "error": {"kind": kind, "message": message,
                                                                    "details": details or {}}}
            sys.stdout.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
        elif kind == "refutation":
            sys.stdout.write(f"REFUTED: {message}\n")
        else:
            sys.stderr.write(f"error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"'{text}' is not a rational number")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = argparse.ArgumentParser(description="Residua - spectral transfer morphisms of affine Hecke algebras")
    parser.add_argument("command", choices=sorted(COMMANDS),
                        help="Computation to run")
    parser.add_argument("documents", nargs="+",
                        help="Input documents (.residua), source first")
    parser.add_argument("--json", action="store_true",
                        help="Emit the residua/1 JSON report")
    parser.add_argument("--v0", type=_rational, default=None,
                        help="Rational v0 > 1 enabling numeric cross-checks")
    parser.add_argument("--config", default="config",
                        help="Configuration directory")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level")

    args = parser.parse_args(argv)

    # Configure logging
    logger.remove()
    logger.add(sys.stderr, level=args.log_level)
    if not os.getenv("RESIDUA_NO_LOG_FILE"):
        logger.add("logs/residua_{time}.log", rotation="1 day", level="DEBUG")

    app = ResiduaApp(config_dir=args.config)
    return app.run(args.command, args.documents, v0=args.v0, as_json=args.json)


if __name__ == "__main__":
    sys.exit(main())
