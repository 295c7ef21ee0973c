"""Projects on disk: the log file, refreshing a changed source, undo.

Run: python demos/02_projects_and_refresh.py
"""

import tempfile
from pathlib import Path

from facetprep.engine import ReplaceValue, SetVisibility
from facetprep.project import Project, StoreSession, save_project

CSV_V1 = """\
Name,Location,Price
Kydon The Heart City Hotel,Chania,95
Lato Boutique Hotel,Iraklio,75
"""

CSV_V2 = """\
Name,Location,Price
Kydon The Heart City Hotel,Chania,99
Lato Boutique Hotel,Heraklion,75
Samaria Hotel,Chania,110
"""

workdir = Path(tempfile.mkdtemp(prefix="facetprep-demo-"))
source = workdir / "hotels.csv"
source.write_text(CSV_V1)

save_project(
    Project(name="hotels", kind="single-file", source={"path": str(source)}),
    workdir / "projects",
)
folder = workdir / "projects" / "hotels"
print("project folder:", folder)

with StoreSession.open(folder) as store:
    store.apply(ReplaceValue("Location", "Iraklio", "Heraklion"))
    store.apply(SetVisibility("Price", False))
    print("\nlog file after two edits:")
    print((folder / "transformations.jsonl").read_text())

    store.undo()
    print("after undo the file holds one record:")
    print((folder / "transformations.jsonl").read_text())
    store.redo()
    store.save()

# the source moved on: a price changed, the spelling is already fixed,
# and a hotel was added
source.write_text(CSV_V2)
with StoreSession.open(folder) as store:
    outcomes = store.refresh()
    print("refresh outcomes (the spelling fix no longer applies):")
    for i, outcome in enumerate(outcomes, start=1):
        print(f"  {i}\t{outcome.status}\t{outcome.reason or ''}")
    print("rows now:", len(store.session.dataset.rows))
    print("Price still hidden:", not store.session.dataset.facet("Price").visible)
