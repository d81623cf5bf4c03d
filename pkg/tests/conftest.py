import json

import pytest

from infoagg import majority_game, parse_game
from infoagg.extended import extended_to_dict

from oracles import G1_JSON

# criterion lines collected by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES: list = []


@pytest.fixture
def g1():
    return parse_game(G1_JSON)


@pytest.fixture
def g2():
    return majority_game(5)


@pytest.fixture
def files(tmp_path):
    """Write JSON documents to ``tmp_path`` and return their paths as strings."""

    def write(name, doc):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)

    write.g1 = write("g1.json", G1_JSON)
    write.g2 = write("g2.json", extended_to_dict(majority_game(5)))
    return write


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
