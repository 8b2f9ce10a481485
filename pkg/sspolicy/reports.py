import csv
import datetime
import io
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from .config import settings

Row = Sequence[Any]


def format_value(value: Any, precision: int = 2) -> str:
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    return str(value)


def render_csv(header: Sequence[str], rows: List[Row], precision: int = 2) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value, precision) for value in row])
    return buffer.getvalue()


def render_table(header: Sequence[str], rows: List[Row], precision: int = 2) -> str:
    """Markdown table with right-aligned columns."""
    cells = [[format_value(value, precision) for value in row] for row in rows]
    widths = [max([len(name)] + [len(row[i]) for row in cells]) for i, name in enumerate(header)]
    lines = ["| " + " | ".join(name.rjust(w) for name, w in zip(header, widths)) + " |",
             "|" + "|".join("-" * (w + 1) + ":" for w in widths) + "|"]
    for row in cells:
        lines.append("| " + " | ".join(cell.rjust(w) for cell, w in zip(row, widths)) + " |")
    return "\n".join(lines) + "\n"


def render(header: Sequence[str], rows: List[Row], fmt: str = "table", precision: int = 2) -> str:
    if fmt == "csv":
        return render_csv(header, rows, precision)
    return render_table(header, rows, precision)


def policy_table(heuristic, plan, exact=None):
    """Per-period rows: optimal columns first when given, then heuristic and cycle columns."""
    header = ["n"]
    if exact is not None:
        header += ["s", "S", "G(S)"]
    header += ["s_hat", "S_hat", "G_hat(S_hat)", "a", "a_bar"]
    rows = []
    for n in range(1, heuristic.horizon + 1):
        row = [n]
        if exact is not None:
            row += [exact.s[n - 1], exact.S[n - 1], float(exact.g_at_S[n - 1])]
        row += [heuristic.s[n - 1], heuristic.S[n - 1], float(heuristic.g_at_S[n - 1]),
                plan.cycle_length(n), plan.bound(n)]
        rows.append(row)
    return header, rows


def report_rows(report) -> List[Row]:
    rows = [["heuristic_cost", report.expected_cost]]
    if report.optimal_cost is not None:
        rows += [["optimal_cost", report.optimal_cost], ["gap_percent", report.gap_percent]]
    if report.mc_estimate is not None:
        rows += [["mc_estimate", report.mc_estimate], ["mc_stderr", report.mc_stderr]]
    return rows


class RunArchive:
    def __init__(self, command_name: str, source: Optional[str] = None, root: str = None):
        self.command_name = command_name
        self.source = source
        self.timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
        self.folder_name = os.path.join(root or settings.archive_dir,
                                        f"{command_name}_{self.timestamp}")

    def create_folder(self) -> str:
        os.makedirs(self.folder_name, exist_ok=True)
        return self.folder_name

    def write_text_file(self, filename: str, content: str) -> None:
        filepath = os.path.join(self.folder_name, filename)
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(content)

    def generate(self, tables: Dict[str, str], summary: str = "") -> str:
        self.create_folder()
        for filename, content in tables.items():
            self.write_text_file(filename, content)

        files_generated = "\n".join(f"- `{filename}`" for filename in tables)
        audit_content = f"""# {self.command_name.capitalize()} Run Audit Trail

**Generated:** {datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")}
**Command:** `sspolicy {self.command_name}`
**Input:** {self.source or "command-line flags"}

## Summary
{summary or "No summary recorded"}

## Files Generated
{files_generated}
"""
        self.write_text_file("AUDIT_TRAIL.md", audit_content)
        print(f"✅ Run archive created in: {self.folder_name}/", file=sys.stderr)
        return self.folder_name
