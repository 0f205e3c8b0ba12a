import json

import pytest

from dlsynth.schema import parse_schema
from dlsynth.synth import Example

UNIV_SOURCE = {
    "types": {
        "Univ": {"record": ["id", "name", "Admit"]},
        "Admit": {"record": ["uid", "count"]},
        "id": "Int",
        "name": "String",
        "uid": "Int",
        "count": "Int",
    }
}

UNIV_TARGET = {
    "types": {
        "Admission": {"record": ["grad", "ug", "num"]},
        "grad": "String",
        "ug": "String",
        "num": "Int",
    }
}

UNIV_INPUT = {
    "Univ": [
        {"id": 1, "name": "U1", "Admit": [{"uid": 1, "count": 10}, {"uid": 2, "count": 50}]},
        {"id": 2, "name": "U2", "Admit": [{"uid": 2, "count": 20}, {"uid": 1, "count": 40}]},
    ]
}

UNIV_OUTPUT = {
    "Admission": [
        {"grad": "U1", "ug": "U1", "num": 10},
        {"grad": "U1", "ug": "U2", "num": 50},
        {"grad": "U2", "ug": "U2", "num": 20},
        {"grad": "U2", "ug": "U1", "num": 40},
    ]
}

EMPDEPT_SOURCE = {
    "types": {
        "Employee": {"record": ["name", "deptId"]},
        "Department": {"record": ["id", "deptName"]},
        "name": "String",
        "deptId": "Int",
        "id": "Int",
        "deptName": "String",
    }
}

EMPDEPT_TARGET = {
    "types": {
        "WorksIn": {"record": ["name", "deptName"]},
        "name": "String",
        "deptName": "String",
    }
}

EMPDEPT_INPUT = {
    "Employee": [{"name": "Alice", "deptId": 11}],
    "Department": [{"id": 11, "deptName": "CS"}],
}

EMPDEPT_OUTPUT = {"WorksIn": [{"name": "Alice", "deptName": "CS"}]}

MOVIE_GRAPH = {
    "types": {
        "Movie": {"record": ["mid", "title"]},
        "Actor": {"record": ["aid", "name"]},
        "ACT_IN": {"record": ["source", "target", "role"]},
        "mid": "Int",
        "aid": "Int",
        "source": "Int",
        "target": "Int",
        "title": "String",
        "name": "String",
        "role": "String",
    },
    "top": ["Movie", "Actor", "ACT_IN"],
}


@pytest.fixture
def univ_source():
    return parse_schema(json.dumps(UNIV_SOURCE))


@pytest.fixture
def univ_target():
    return parse_schema(json.dumps(UNIV_TARGET))


@pytest.fixture
def univ_example():
    return Example(UNIV_INPUT, UNIV_OUTPUT)


@pytest.fixture
def empdept_source():
    return parse_schema(json.dumps(EMPDEPT_SOURCE))


@pytest.fixture
def empdept_target():
    return parse_schema(json.dumps(EMPDEPT_TARGET))


@pytest.fixture
def empdept_example():
    return Example(EMPDEPT_INPUT, EMPDEPT_OUTPUT)


@pytest.fixture
def movie_graph():
    return parse_schema(json.dumps(MOVIE_GRAPH))
