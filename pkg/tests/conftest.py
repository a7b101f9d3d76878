from contextlib import contextmanager

import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Context manager that records one acceptance verdict for the summary."""
    results = request.config.stash[ACCEPTANCE]

    @contextmanager
    def record(label, title):
        entry = {"label": label, "title": title, "detail": ""}
        try:
            yield entry
        except BaseException:
            entry["ok"] = False
            raise
        else:
            entry["ok"] = True
        finally:
            results.append(entry)
            verdict = "PASS" if entry.get("ok") else "FAIL"
            print(f"criterion {label}: {verdict}  {title}  {entry['detail']}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for r in results:
        verdict = "PASS" if r.get("ok") else "FAIL"
        terminalreporter.write_line(f"criterion {r['label']}: {verdict}  {r['title']}  {r['detail']}")
