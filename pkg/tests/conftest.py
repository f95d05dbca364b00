import pytest

from rareval import Campaign, Qrels, Run, RunEntry


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of every run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                name = nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in sorted(set(lines)):
            terminalreporter.write_line(f"{name}: {outcome}")


def make_run(system_id: str, per_topic: dict[str, list[str]]) -> Run:
    """Build a Run whose given doc order is canonical (strictly falling scores)."""
    rankings = {
        topic: tuple(
            RunEntry(doc, float(len(docs) - i), i + 1) for i, doc in enumerate(docs)
        )
        for topic, docs in per_topic.items()
    }
    return Run(system_id, rankings)


@pytest.fixture
def toy4() -> Campaign:
    """Four systems, one topic, relevant = {d1, d2, d3}."""
    runs = [
        make_run("A", {"t1": ["d1", "d2", "d4"]}),
        make_run("B", {"t1": ["d1", "d3", "d5"]}),
        make_run("C", {"t1": ["d1", "d2", "d6"]}),
        make_run("D", {"t1": ["d1", "d4", "d5"]}),
    ]
    return Campaign(runs, Qrels({"t1": {"d1": 1, "d2": 1, "d3": 1}}))
