import pytest

from beaverkit.compose import compose, load_manifest
from beaverkit.data import data_path
from beaverkit.harness import MachineResolver
from beaverkit.tables import apply_overlay, build_machine, load_overlay, load_table


@pytest.fixture(scope="session")
def data_dir():
    return data_path()


@pytest.fixture(scope="session")
def resolver(data_dir):
    return MachineResolver(data_dir / "scenarios")


@pytest.fixture(scope="session")
def fermat_t1(data_dir):
    raw = load_table(data_dir / "fermat_t1.tbl")
    raw = apply_overlay(raw, load_overlay(data_dir / "fermat_t1.overlay"))
    return build_machine(raw)


@pytest.fixture(scope="session")
def fermat_t2(data_dir):
    return build_machine(load_table(data_dir / "fermat_t2.tbl"))


@pytest.fixture(scope="session")
def fermat_t3(data_dir):
    return build_machine(load_table(data_dir / "fermat_t3.tbl"))


@pytest.fixture(scope="session")
def fermat_composed(data_dir):
    return compose(load_manifest(data_dir / "fermat.manifest"))


@pytest.fixture(scope="session")
def brocard_ref(data_dir):
    return compose(load_manifest(data_dir / "brocard.manifest"))


@pytest.fixture(scope="session")
def brocard_asprinted(data_dir):
    return compose(load_manifest(data_dir / "brocard_asprinted.manifest"))
