# Root conftest: puts the repo root on sys.path and adds the opt-in benchmark switch.
import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--run-benchmarks",
        action="store_true",
        default=False,
        help="Also run the slow statistical benchmarks and dataset reproductions",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "benchmark: slow statistical check, needs --run-benchmarks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-benchmarks"):
        return
    skip = pytest.mark.skip(reason="needs --run-benchmarks")
    for item in items:
        if "benchmark" in item.keywords:
            item.add_marker(skip)
