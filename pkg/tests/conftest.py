import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Acceptance checks register here; the summary prints one line per criterion.
CRITERIA: dict[int, list[tuple[str, bool]]] = {}


def record(criterion: int, check: str, ok: bool) -> bool:
    CRITERIA.setdefault(criterion, []).append((check, bool(ok)))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        checks = CRITERIA[k]
        failed = [name for name, ok in checks if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f"{len(checks) - len(failed)}/{len(checks)} checks"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(f"criterion {k}: {status} ({detail})")
