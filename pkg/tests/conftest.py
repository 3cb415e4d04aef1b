import pytest


def pytest_addoption(parser):
    parser.addoption("--nightly", action="store_true", default=False,
                     help="run the long nightly cells")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--nightly"):
        return
    skip = pytest.mark.skip(reason="nightly only; pass --nightly")
    for item in items:
        if "nightly" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LEDGER

    if not LEDGER:
        return
    terminalreporter.section("acceptance criteria")
    for line in LEDGER:
        terminalreporter.write_line(line)
