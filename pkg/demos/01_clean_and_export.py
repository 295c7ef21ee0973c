"""From a raw hotel CSV to exploration-ready RDF, step by step.

Run: python demos/01_clean_and_export.py
"""

from facetprep import build_dataset, distinct_values, parse_table
from facetprep.engine import (
    AddParent,
    AddRow,
    Conjunct,
    DefineIntervals,
    DeleteRows,
    DeriveFacet,
    ReorderFacets,
    ReplaceValue,
    RowCondition,
    Session,
    SetFacetType,
    SetVisibility,
)
from facetprep.intervals import LinearSpec
from facetprep.rdf_export import export_rdf

CSV = b"""\
Name,Location,Longitude,Latitude,Stars,Rooms,Price,Rating,Pets allowed,Smoking allowed
Kydon The Heart City Hotel,Chania,24.018204,35.511233,4,118,95,8.9,not allowed,not allowed
Lato Boutique Hotel,Iraklio,25.138017,35.343436,3,58,75,8.6,not allowed,allowed
Aquila Atlantis Hotel,Iraklio,25.132553,35.341560,5,164,130,8.4,allowed,not allowed
Samaria Hotel,Chania,24.015749,35.514855,4,68,110,9.0,not allowed,not allowed
Electra Palace,Athens,23.731998,37.972634,5,155,180,8.8,not allowed,allowed
Grand Hotel Palace,Thessaloniki,22.928445,40.644096,5,261,105,8.5,allowed,allowed
Ibis Paris Montmartre,Paris,2.337644,48.883760,3,326,88,7.9,not allowed,not allowed
Porto Veneziano,Chania,24.023083,35.517672,4,57,120,8.7,not allowed,not allowed
Capsis Astoria,Heraklion,25.137066,35.339193,4,131,98,8.2,allowed,not allowed
"""

session = Session(source=build_dataset(parse_table(CSV)))
print(f"loaded {len(session.dataset.rows)} hotels, {len(session.dataset.facets)} facets")
stats, _ = distinct_values(session.dataset, "Location")
print(f"Location has {len(stats)} distinct values:", [s.value for s in stats])

# 1. keep only hotels in Greece
session.apply(DeleteRows(RowCondition((Conjunct("Location", "=", "Paris"),))))
# 2. a new hotel arrives
session.apply(AddRow((
    "Mitsis Laguna Resort & Spa", "Heraklion", "25.371359", "35.307237",
    "5", "385", "115", "8.7", "allowed", "not allowed",
)))
# 3. mark the coordinate columns so a map view can use them
session.apply(SetFacetType("Longitude", "longitude"))
session.apply(SetFacetType("Latitude", "latitude"))
# 4. hotel entities take their names from Name
session.apply(SetFacetType("Name", "identifier"))
# 5. unify the spelling of Heraklion
session.apply(ReplaceValue("Location", "Iraklio", "Heraklion"))
# 6. Rooms should not appear as a facet
session.apply(SetVisibility("Rooms", False))
# 7. one combined pets-and-smoking facet
session.apply(DeriveFacet("Pets and Smoking", '{Pets allowed} ++ ", " ++ {Smoking allowed}'))
# 8. organize locations hierarchically
session.apply(AddParent("Location", ("Chania", "Heraklion"), "Crete"))
session.apply(AddParent("Location", ("Crete", "Athens", "Thessaloniki"), "Greece"))
# 9. bucket prices into a two-level interval hierarchy
session.apply(SetFacetType("Price", "integer"))
session.apply(DefineIntervals("Price", (LinearSpec(0, 600, 300), LinearSpec(0, 600, 100))))
# 10. final facet order
session.apply(ReorderFacets((0, 1, 3, 2, 4, 6, 7, 10, 8, 9, 5)))

print(f"\nafter the log: {len(session.dataset.rows)} rows")
print("facet order:", session.dataset.facet_names())

tree = session.dataset.facet("Location").term_tree()
print("\nLocation tree edges (child -> parent):")
for child, parent in tree.edges():
    print(f"  {child} -> {parent}")

ntriples, turtle = export_rdf(session.dataset)
print(f"\nexport: {len(ntriples.splitlines())} triples; first three lines:")
for line in ntriples.decode().splitlines()[:3]:
    print(" ", line)

# undo is prefix replay: drop the reorder again
session.undo()
print("\nafter undo, facet order:", session.dataset.facet_names())
