"""Ingesting a SPARQL endpoint (here: the bundled mock server).

Run: python demos/03_sparql_source.py
"""

from facetprep import build_dataset, distinct_values
from facetprep.sparql import Favourite, SparqlSource, execute_select, favourites_add, favourites_list
from facetprep.testing import MockSparqlServer

CARS = [
    {"Speed": "180", "Price": "22000", "Weight": "1300"},
    {"Speed": "160", "Price": "15500", "Weight": "1100"},
    {"Speed": "210", "Weight": "1500"},  # no Price binding
]

with MockSparqlServer(CARS) as server:
    source = SparqlSource(server.url, "SELECT ?Speed ?Price ?Weight WHERE { ?s ?p ?o }")
    table = execute_select(source)
    print("columns in projection order:", table.header)

    dataset = build_dataset(table, internal_paths=False)
    print("facets:", dataset.facet_names())
    stats, missing = distinct_values(dataset, "Price")
    print(f"Price: {len(stats)} distinct values, {missing} missing")
    print("row with the unbound variable:", dataset.rows[2])

    favourites = favourites_add([], Favourite("fast cars", source))
    print("favourites:", [f.label for f in favourites_list(favourites)])
