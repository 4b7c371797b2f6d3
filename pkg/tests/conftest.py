import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ineqcert import certifier  # noqa: E402


@pytest.fixture(scope="session")
def lemma1_certificate():
    return certifier.certify_lemma(1, certifier.CertConfig.default(1))


@pytest.fixture(scope="session")
def lemma2_certificate():
    return certifier.certify_lemma(2, certifier.CertConfig.default(2))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
