import pytest
from src.geometry.trajectory import TraceOptions
from src.pipeline import attach_measure, cubic_case, quintic_case, trace_arc


@pytest.fixture(scope="session")
def opts():
    return TraceOptions()


@pytest.fixture(scope="session")
def cubic_k0():
    return cubic_case(0.0)


@pytest.fixture(scope="session")
def cubic_k0_run(cubic_k0, opts):
    return attach_measure(trace_arc(cubic_k0, opts), panels=24)


@pytest.fixture(scope="session")
def quintic_p1_run(opts):
    return attach_measure(trace_arc(quintic_case(1), opts), panels=24)


@pytest.fixture(scope="session")
def quintic_p2_run(opts):
    return attach_measure(trace_arc(quintic_case(2), opts), panels=24)


@pytest.fixture
def config_file(tmp_path):
    def write(text: str):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return path

    return write
