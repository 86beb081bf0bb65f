"""Smoke test for the pyspherical extension module.

Build the module and put it on the path first, for example:

    cargo build --release -p spherical-descent-python --features extension-module
    cp target/release/libpyspherical.so python/pyspherical.so
    python3 python/smoke_test.py
"""

import json

import pyspherical


def main():
    names = pyspherical.fixtures()
    assert "weil-restriction-so3" in names, names

    weil = json.loads(pyspherical.fixture("weil-restriction-so3"))
    datum = json.dumps(weil["datum"])
    action = json.dumps(weil["action"])
    fan = json.dumps(weil["fan"])

    assert json.loads(pyspherical.validate(datum))["violations"] == []
    report = json.loads(pyspherical.analyze(datum, action))
    assert report["verdict"]["verdict"] == "Exists", report["verdict"]
    assert pyspherical.count(datum, action) == 1
    assert json.loads(pyspherical.check_fan(datum, fan, action))["stability"]["stable"]

    torus = json.dumps(json.loads(pyspherical.fixture("pgl2-torus"))["datum"])
    assert pyspherical.count(torus) == 1

    try:
        pyspherical.validate("{")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed input accepted")

    print("pyspherical smoke test: ok")


if __name__ == "__main__":
    main()
