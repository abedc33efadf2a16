ACCEPTANCE_RESULTS = {}


def record(number, title, passed, detail=""):
    ACCEPTANCE_RESULTS[number] = (title, passed, detail)
    line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        )
