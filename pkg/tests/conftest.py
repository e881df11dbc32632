import pytest

from rdfindex import build_index, graph

DOCS = [
    ("Yamada", "authored", "doc1"),
    ("Yamada", "knows", "McShea"),
    ("knows", "is_a_kind_of", "social_action"),
    ("Herzog", "authored", "doc2"),
    ("Herzog", "authored", "doc3"),
    ("McShea", "performed", "doc3"),
    ("McShea", "past_action", "authored"),
    ("doc1", "type", "PDF"),
    ("doc1", "rating", "4/5"),
    ("doc2", "type", "MP3"),
    ("doc3", "type", "MP3"),
    ("doc3", "created_on", "26.10.08"),
]

DOCS_QUERY = """SELECT ?date ?type
WHERE { McShea performed ?doc .
        ?doc created_on ?date .
        ?doc type ?type . }
"""

# lines collected by test_acceptance and echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def docs():
    return graph(DOCS)


@pytest.fixture(params=["triplet", "map", "hex"])
def family(request):
    return request.param


@pytest.fixture
def docs_index(docs, family):
    return build_index(family, docs)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
