import shutil

import pytest

import codesign


@pytest.fixture
def fixture_model():
    return codesign.load_model(codesign.fixture_model_path())


@pytest.fixture
def fixture_path(tmp_path):
    """Writable copy of the bundled model, safe for mutation tests."""
    dest = tmp_path / "automated_driving.xml"
    shutil.copy(codesign.fixture_model_path(), dest)
    return dest


@pytest.fixture
def two_node_xml():
    return (
        '<system name="mini">\n'
        '  <node name="A" start="true"/>\n'
        '  <node name="B" end="true" gate="OR(A)"/>\n'
        '  <edge from="A" to="B"/>\n'
        "</system>\n"
    )
