"""Report schemas — flat key=value records for machine-readable output."""

from pydantic import BaseModel, Field

from solvkit.algebra.words import format_word
from solvkit.analysis.closure import ClosureReport
from solvkit.analysis.search import H_NAMES, SearchResult


class Record(BaseModel):
    """Ordered key/value pairs; values are already serialized."""

    items: list[tuple[str, str]] = Field(default_factory=list)

    def add(self, key: str, value: object) -> "Record":
        if isinstance(value, bool):
            value = str(value).lower()
        self.items.append((key, str(value)))
        return self

    def lines(self) -> list[str]:
        return [f"{k}={v}" for k, v in self.items]


def search_record(result: SearchResult, record: Record | None = None) -> Record:
    record = record or Record()
    record.add("search.found", result.found)
    record.add("search.explored", result.explored)
    record.add("search.reason", result.reason)
    if result.solution is not None:
        for i, w in enumerate(result.solution, start=1):
            record.add(f"search.x{i}", format_word(w, H_NAMES))
    return record


def closure_record(report: ClosureReport) -> Record:
    record = Record()
    record.add("rab", report.abelian_rank)
    record.add("rule", report.rule.value)
    record.add("verdict", report.verdict.value)
    if report.retraction is not None:
        for i in range(1, report.retraction.context.rank + 1):
            record.add(f"retraction.z{i}", report.retraction.image_label(i))
    if report.search is not None:
        search_record(report.search, record)
    fox = report.fox_system
    if fox is not None:
        record.add("fox.supported", fox.supported)
        if fox.supported and fox.determinant is not None:
            record.add("fox.solves", fox.solves)
            record.add("fox.det", fox.determinant.format())
            record.add("fox.residue", fox.residue)
            record.add("fox.annihilates", fox.annihilates)
        else:
            record.add("fox.reason", fox.reason)
    for n, line in enumerate(report.extra, start=1):
        record.add(f"note.{n}", line)
    for n, line in enumerate(report.justification, start=1):
        record.add(f"justification.{n}", line)
    return record
