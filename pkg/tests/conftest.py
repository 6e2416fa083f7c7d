import pytest

from smanifolds import corpus
from smanifolds.importer import import_cycle

ACCEPTANCE = {}


def all_entries():
    return [(name, build()) for name, build in sorted(corpus.BUILDERS.items())]


def smanifolds_in_corpus():
    """Every s-manifold reachable from the corpus: plain models, corner bases and levels, imported cycles."""
    out = []
    for name, e in all_entries():
        if e.kind == "smanifold":
            out.append((name, e.model))
        elif e.kind == "corners":
            for k, C in enumerate(e.model.corners):
                out.append((f"{name}.C{k}", C))
        elif e.kind == "cycle":
            out.append((name, import_cycle(e.model).S))
        elif e.kind == "affine_fibre_product":
            out.append((f"{name}.X", e.model[0].base))
            out.append((f"{name}.Y", e.model[3].base))
    return out


def manifest(entry, key):
    for k, v, tag in entry.manifest:
        if k == key:
            return v, tag
    raise KeyError(key)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        ACCEPTANCE[marker.args[0]] = (marker.args[1], rep.passed)
    elif marker is not None and rep.when == "setup" and not rep.passed:
        ACCEPTANCE[marker.args[0]] = (marker.args[1], False)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")
