"""Run the ten acceptance criteria and print one PASS/FAIL line each."""
import pathlib
import runpy
import sys

target = pathlib.Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
sys.argv = [str(target)]
runpy.run_path(str(target), run_name="__main__")
