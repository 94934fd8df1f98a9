from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
DEMO_MANIFEST = REPO / "demo" / "manifest.csv"


def write_corpus(root: Path, rows, name="manifest.csv"):
    """rows: (id, author, year, label, text). Returns the manifest path."""
    texts = root / "texts"
    texts.mkdir(parents=True, exist_ok=True)
    lines = ["id,author,year,source_label,path"]
    for doc_id, author, year, label, text in rows:
        (texts / f"{doc_id}.txt").write_text(text, encoding="utf-8")
        lines.append(f"{doc_id},{author},{year},{label},texts/{doc_id}.txt")
    manifest = root / name
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


@pytest.fixture
def small_corpus(tmp_path):
    rows = [
        ("r1", "Reagan", 1982, "human", "We will win. Our nation is strong and free."),
        ("r2", "Reagan", 1983, "human", "I believe in freedom. We shall not fail you."),
        ("b1", "Biden", 2021, "human", "You know, I love this country. They said no."),
        ("b2", "Biden", 2022, "human", "We can do it. I promise you that we will."),
        ("g1", "Reagan", 1982, "gpt", "Together we build a prosperous future for every family."),
        ("g2", "Biden", 2021, "gpt", "Our democracy endures because we stand united in purpose."),
        ("g3", "Reagan", 1983, "gpt", "We embrace opportunity and celebrate achievement across America."),
        ("g4", "Biden", 2022, "gpt", "Hope remains our greatest strength as we move forward."),
    ]
    return write_corpus(tmp_path, rows)


# Acceptance criteria record one verdict line each; they are echoed at the end
# of the run so they show up without -s.
ACCEPTANCE: list[str] = []


def record_criterion(number, title, ok, detail="", skipped=False):
    verdict = "SKIP" if skipped else "PASS" if ok else "FAIL"
    line = f"[{verdict}] criterion {number:>2}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
