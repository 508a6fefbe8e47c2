#!/usr/bin/env python3
"""
Residua Test Runner
Unit, golden-file and command-line suites, optionally under coverage
"""
import argparse
import os
import sys
import unittest
from pathlib import Path
from typing import Dict

import coverage

ROOT = Path(__file__).parent.parent

# Documents chained by compose-stm in the integration run
CHAINS = [
    ["a1_weight", "a1_minimal", "a1_minimal"],
    ["cd_d_ad", "cd_d_zn", "cd_d_sc"],
    ["cd_b_ad", "cd_c_affine", "cd_c_sc"],
]


def discover_tests(pattern: str = "test_*.py") -> unittest.TestSuite:
    """Collect the test modules under tests/ matching pattern"""
    sys.path.insert(0, str(ROOT / "src"))
    return unittest.TestLoader().discover(str(ROOT / "tests"), pattern=pattern)


def module_summary(result: unittest.TestResult) -> Dict[str, int]:
    """Failures and errors per test module"""
    counts: Dict[str, int] = {}
    for test, _ in result.failures + result.errors:
        module = test.id().split(".")[0]
        counts[module] = counts.get(module, 0) + 1
    return counts


def run_suite(pattern: str, with_coverage: bool) -> bool:
    """Run the discovered suite, measuring src/ when with_coverage is set"""
    title = "with Coverage" if with_coverage else ""
    print(f"🧪 Running Residua Test Suite {title}".rstrip())
    print("=" * 50)

    cov = coverage.Coverage(source=[str(ROOT / "src")]) if with_coverage else None
    if cov is not None:
        cov.start()
    try:
        result = unittest.TextTestRunner(verbosity=2).run(discover_tests(pattern))
    except Exception as e:
        print(f"❌ Test execution failed: {e}")
        return False
    finally:
        if cov is not None:
            cov.stop()
            cov.save()

    for module, count in sorted(module_summary(result).items()):
        print(f"❌ {module}: {count} failing")
    if result.skipped:
        print(f"⏭️  {len(result.skipped)} skipped (set RESIDUA_SLOW=1 for the exhaustive suites)")

    if cov is not None:
        print("\n📊 Coverage Report:")
        cov.report(show_missing=False)
        html_dir = ROOT / "coverage_html"
        cov.html_report(directory=str(html_dir))
        print(f"📄 HTML report generated: {html_dir}/index.html")

    return result.wasSuccessful()


def run_integration_tests() -> bool:
    """Run the command line over the shipped documents"""
    print("\n🔗 Running Integration Tests")
    print("-" * 30)

    sys.path.insert(0, str(ROOT / "src"))
    os.environ.setdefault("RESIDUA_NO_LOG_FILE", "1")
    from main import main as residua

    data = ROOT / "data"
    config = str(ROOT / "config")
    success = True
    for path in sorted(data.glob("*.residua")):
        code = residua(["residual-cosets", str(path), "--config", config])
        print(f"{'✅' if code == 0 else '❌'} residual-cosets {path.name}: exit {code}")
        success &= code == 0
    # exit 2 is a refuted map, still a completed run
    for chain in CHAINS:
        code = residua(["compose-stm"] + [str(data / f"{name}.residua") for name in chain] + ["--config", config])
        print(f"{'✅' if code != 1 else '❌'} compose-stm {' -> '.join(chain)}: exit {code}")
        success &= code != 1
    return success


def main() -> int:
    parser = argparse.ArgumentParser(description="Residua Test Runner")
    parser.add_argument("--coverage", action="store_true",
                        help="Measure src/ and write coverage_html/")
    parser.add_argument("--fast", action="store_true",
                        help="Skip the exhaustive suites (sets RESIDUA_SLOW=0)")
    parser.add_argument("--golden", action="store_true",
                        help="Run only the golden-file tests")
    parser.add_argument("--update-golden", action="store_true",
                        help="Rewrite the golden files from the current output")
    parser.add_argument("--integration", action="store_true",
                        help="Run the command line over the shipped documents")
    args = parser.parse_args()

    if args.fast:
        os.environ["RESIDUA_SLOW"] = "0"
    if args.update_golden:
        os.environ["RESIDUA_UPDATE_GOLDEN"] = "1"
    os.environ.setdefault("RESIDUA_NO_LOG_FILE", "1")

    pattern = "test_golden.py" if args.golden or args.update_golden else "test_*.py"
    success = run_suite(pattern, args.coverage)
    if args.integration:
        success &= run_integration_tests()

    print("\n" + "=" * 50)
    print("🎉 All tests passed!" if success else "❌ Some tests failed!")
    return 0 if success else 1


if __name__ == "__main__":
    sys.exit(main())
