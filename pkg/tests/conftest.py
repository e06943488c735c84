import textwrap

import pytest

from crashseed.harness import bundled_scenarios, load_bundle
from crashseed.sutlang import parse_program, parse_tests


def program_of(*sources):
    """Parse dedented sources, each in its own file named after its index."""
    return parse_program([(f"F{i}.sut", textwrap.dedent(src)) for i, src in enumerate(sources)])


def suite_of(text, program):
    return parse_tests(textwrap.dedent(text), program, "T.sut-test")


def one_test(text, program):
    return suite_of(text, program)[0]


@pytest.fixture(scope="session")
def scenarios():
    return {p.name: load_bundle(p) for p in bundled_scenarios()}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
