import pytest
from hypothesis import HealthCheck, settings

# numpy-backed examples vary a lot in size; wall-clock deadlines only add flakes
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def verdict(request):
    """Write one PASS/WARN/FAIL line per acceptance criterion to the terminal."""
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(number, status, detail):
        line = f"[criterion {number}] {status}: {detail}"
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        else:
            print(line)
    return emit
