import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行标记为 slow 的验收场景")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def data_dir(tmp_path, monkeypatch):
    """把运行产物根目录指向临时目录"""
    path = tmp_path / "data"
    monkeypatch.setenv("HJBNET_DATA_DIR", str(path))
    return path
