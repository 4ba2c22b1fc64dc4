import csv
import io
import json


def free_rank_report(target, p, e, f, free_rank):
    report = {}
    report["target"] = target
    report["p"] = p
    report["e"] = e
    report["f"] = str(f)
    report["free_rank"] = free_rank
    return report


def verify_report(p, e, k, f, size, holds, counts=None, matfac=None):
    report = {}
    report["p"] = p
    report["e"] = e
    report["k"] = k
    report["f"] = str(f)
    report["size"] = size
    report["matrix_factorization"] = holds
    if counts is not None:
        report["t"] = counts.t
        report["r"] = counts.r
    if matfac is not None:
        report["matfac"] = matfac.to_dict()
    return report


def render_json(report):
    return json.dumps(report, indent=2)


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return " ".join(str(item) for item in value)
    if isinstance(value, dict):
        return json.dumps(value)
    return value


def render_csv(report):
    """One table per report: matrix triplets, the rows of the report's list field,
    or a single row of scalar fields."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if "entries" in report:
        writer.writerow(["row", "col", "entry"])
        writer.writerows(report["entries"])
        return buffer.getvalue()
    scalars = {key: value for key, value in report.items()
               if not (isinstance(value, list) and value and isinstance(value[0], dict))}
    tables = {key: value for key, value in report.items() if key not in scalars}
    if not tables:
        writer.writerow(list(scalars))
        writer.writerow([_cell(value) for value in scalars.values()])
        return buffer.getvalue()
    for key, rows in tables.items():
        header = list(scalars) + list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in scalars.values()] + [_cell(row.get(h)) for h in rows[0]])
    return buffer.getvalue()


def render(report, output_format="json"):
    if output_format == "csv":
        return render_csv(report)
    return render_json(report)
